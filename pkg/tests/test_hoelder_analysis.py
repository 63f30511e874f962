"""
Tests del lema de raíces, los barridos de Hölder y las cotas globales.
"""

import sys
import warnings
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent / 'src'))

from exceptions import DegreeMismatch, SignatureViolation
from hoelder_analysis import (
    MonicPolynomial,
    bottleneck_assignment,
    degenerate_lagrangian_pair,
    estimate_hoelder_constant,
    fit_power_law,
    global_bound_check,
    hoelder_scan_boundedness,
    hoelder_scan_L,
    match_roots,
    maximal_degeneracy_pair,
    multiplicity_clusters,
    random_admissible_direction,
    refined_bound_check,
    root_bound_check,
    simple_spectrum_pair,
    symmetric_bound_check,
)
from kernel_lagrangian import lagrangian, xy_spectrum
from operator_core import (
    HilbertConfig,
    conjugate,
    make_operator,
    random_regular_operator,
    random_unitary,
    scale_operator,
    zero_operator,
)

STEPS = np.logspace(-2, -10, 17)


@pytest.fixture
def rng():
    return np.random.default_rng(11)


# ---------------------------------------------------------------------------
# Raíces de polinomios
# ---------------------------------------------------------------------------


def test_raiz_doble_se_separa():
    """λ² frente a λ² − 1e−6: raíces ±1e−3."""
    P = MonicPolynomial.from_roots([0.0, 0.0])
    Q = P.perturbed([-1e-6, 0.0])
    match = match_roots(P, Q)
    assert np.allclose(match.deviations, 1e-3, rtol=1e-6)
    assert list(match.multiplicities) == [2, 2]
    report = root_bound_check(P, Q)
    assert report.holds
    assert np.all(report.deltas >= 1e-3)


def test_grados_distintos():
    P = MonicPolynomial.from_roots([1.0, 2.0])
    Q = MonicPolynomial.from_roots([1.0, 2.0, 3.0])
    with pytest.raises(DegreeMismatch):
        root_bound_check(P, Q)


def test_polinomio_sin_grado():
    with pytest.raises(ValueError):
        MonicPolynomial(np.array([]))


@pytest.mark.parametrize("g", [2, 3, 4, 5, 6])
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_cota_de_raices_simples(g, seed):
    rng = np.random.default_rng(seed)
    P = MonicPolynomial.from_roots(np.linspace(-0.9, 0.9, g))
    Q = P.perturbed(1e-9 * (rng.standard_normal(g) + 1j * rng.standard_normal(g)))
    report = root_bound_check(P, Q)
    assert report.holds
    assert report.slack >= 1.0


def test_cota_con_raiz_multiple():
    P = MonicPolynomial.from_roots([0.5, 0.5, -0.5])
    Q = P.perturbed([1e-10, -1e-10, 0.0])
    report = root_bound_check(P, Q)
    assert report.holds
    assert sorted(report.multiplicities) == [1, 2, 2]
    assert report.separation == pytest.approx(1.0)


def test_reescalamiento_de_raices():
    P = MonicPolynomial.from_roots([4.0, -2.0])
    assert np.allclose(np.sort(P.rescaled(4.0).roots().real), [-0.5, 1.0])
    report = root_bound_check(P, P.perturbed([1e-12, 0.0]))
    assert report.scale == pytest.approx(4.0)


def test_cumulos_exactos():
    labels = multiplicity_clusters(np.array([0.0, 0.0, 1.0]), exact=True)
    assert sorted(np.bincount(labels)) == [1, 2]


def test_cumulos_numericos():
    """Raíz triple calculada numéricamente (separación ~eps^{1/3})."""
    roots = np.roots([1.0, -3.0, 3.0, -1.0])
    labels = multiplicity_clusters(roots)
    assert np.bincount(labels).max() == 3


def test_cumulos_dos_raices():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert list(multiplicity_clusters(np.array([1.0, 1.0 + 1e-9]))) == [0, 0]
        assert list(multiplicity_clusters(np.array([1.0, 2.0]))) == [0, 1]
        assert list(multiplicity_clusters(np.array([1.0, 1.0]), exact=True)) == [0, 0]
        assert list(multiplicity_clusters(np.array([1.0, 1.0 + 1e-9]), exact=True)) == [0, 1]


@pytest.mark.parametrize("d, n", [(4, 1), (6, 2)])
def test_par_de_espectro_simple(d, n):
    cfg = HilbertConfig(d, n)
    x, y = simple_spectrum_pair(cfg, np.random.default_rng(11))
    lambdas = xy_spectrum(x, y).nonzero
    assert lambdas.size == 2 * n
    assert np.max(np.abs(lambdas.imag)) <= 1e-8 * np.max(np.abs(lambdas))
    moduli = np.sort(np.abs(lambdas))
    assert np.min(np.diff(moduli)) >= 0.1 * moduli[-1]
    assert lagrangian(x, y) > 0.0


def test_asignacion_cuello_de_botella():
    cost = np.array([[1.0, 2.0], [2.0, 10.0]])
    assert list(bottleneck_assignment(cost)) == [1, 0]
    cost = np.array([[1.0, 5.0, 5.0], [5.0, 1.0, 2.0], [5.0, 2.0, 1.0]])
    assert list(bottleneck_assignment(cost)) == [0, 1, 2]


# ---------------------------------------------------------------------------
# Ajuste log-log
# ---------------------------------------------------------------------------


def test_ajuste_pendiente_conocida():
    fit = fit_power_law(STEPS, 3.0 * STEPS**0.5, reference_exponent=0.5)
    assert fit.exponent_hat == pytest.approx(0.5, abs=1e-10)
    assert fit.constant_hat == pytest.approx(3.0, rel=1e-8)
    assert fit.r2 == pytest.approx(1.0)
    assert not fit.low_confidence
    assert np.allclose(fit.scan["ratio"], 3.0)


def test_ajuste_cero_exacto():
    fit = fit_power_law(STEPS, np.zeros_like(STEPS), reference_exponent=1.0)
    assert fit.exact_zero
    assert np.isnan(fit.exponent_hat)
    assert fit.constant_hat == 0.0


def test_ajuste_menos_de_una_decada():
    steps = np.logspace(-2, -2.5, 5)
    fit = fit_power_law(steps, steps, reference_exponent=1.0)
    assert fit.low_confidence


def test_ajuste_pasos_invalidos():
    with pytest.raises(ValueError):
        fit_power_law([1e-3, 1e-2], [1.0, 1.0], reference_exponent=1.0)
    with pytest.raises(ValueError):
        fit_power_law([], [], reference_exponent=1.0)


def test_resumen_del_ajuste():
    summary = fit_power_law(STEPS, STEPS, reference_exponent=1.0).summary()
    assert set(summary) >= {"exponent_hat", "constant_hat", "r2", "low_confidence", "exact_zero"}


# ---------------------------------------------------------------------------
# Barridos sobre pares construidos
# ---------------------------------------------------------------------------


def test_par_degenerado_n1_lipschitz():
    x, y, D = degenerate_lagrangian_pair(HilbertConfig(2, 1))
    fit = hoelder_scan_L(x, y, D, STEPS)
    assert fit.exponent_hat == pytest.approx(1.0, abs=0.05)
    assert fit.reference_exponent == 1.0


def test_par_degenerado_n2_exponente_un_tercio():
    x, y, D = degenerate_lagrangian_pair(HilbertConfig(6, 2))
    fit = hoelder_scan_L(x, y, D, STEPS)
    assert fit.exponent_hat == pytest.approx(1 / 3, abs=0.1)


def test_par_degenerado_con_giro_unitario(rng):
    x, y, D = degenerate_lagrangian_pair(HilbertConfig(6, 2), rng)
    fit = hoelder_scan_L(x, y, D, STEPS)
    assert fit.exponent_hat == pytest.approx(1 / 3, abs=0.1)


def test_degeneracion_maxima_lagrangiano_nulo():
    """n = 1: xy_t tiene autovalores ±i√t, de igual módulo."""
    x, y, D = maximal_degeneracy_pair(HilbertConfig(2, 1))
    assert hoelder_scan_L(x, y, D, STEPS).exact_zero


@pytest.mark.parametrize("n", [1, 2])
def test_degeneracion_maxima_acotamiento(n):
    x, y, D = maximal_degeneracy_pair(HilbertConfig(2 * n + 2, n))
    fit = hoelder_scan_boundedness(x, y, D, np.logspace(-2, -8, 13))
    assert fit.exponent_hat >= 1 / (2 * n) - 0.1


def test_barrido_fuera_de_F():
    cfg = HilbertConfig(2, 1)
    x = make_operator(np.diag([1.0, -1.0]), cfg)
    y = make_operator(np.diag([1.0, 0.0]), cfg)
    # y + t·id tiene dos autovalores positivos
    with pytest.raises(SignatureViolation):
        hoelder_scan_L(x, y, np.eye(2), [1e-2, 1e-3])


# ---------------------------------------------------------------------------
# Cotas globales
# ---------------------------------------------------------------------------


def _local_triple(cfg, rng):
    x = random_regular_operator(cfg, rng)
    y = random_regular_operator(cfg, rng)
    D = random_admissible_direction(y, rng)
    y_tilde = make_operator(y.mat + 0.05 * y.norm * D, cfg)
    return x, y, y_tilde


@pytest.mark.parametrize("a", [0.1, 1.0, 10.0])
@pytest.mark.parametrize("b", [0.1, 1.0, 10.0])
def test_razon_global_invariante_por_escala(rng, a, b):
    x, y, y_tilde = _local_triple(HilbertConfig(6, 2), rng)
    base = global_bound_check(x, y, y_tilde)
    scaled = global_bound_check(scale_operator(x, a), scale_operator(y, b), scale_operator(y_tilde, b))
    assert base.within_neighborhood
    assert scaled.ratio == pytest.approx(base.ratio, rel=1e-6)


def test_razon_global_invariante_unitaria(rng):
    cfg = HilbertConfig(6, 2)
    x, y, y_tilde = _local_triple(cfg, rng)
    U = random_unitary(cfg.d, rng)
    base = global_bound_check(x, y, y_tilde)
    rotated = global_bound_check(conjugate(x, U), conjugate(y, U), conjugate(y_tilde, U))
    assert rotated.ratio == pytest.approx(base.ratio, rel=1e-6)


def test_rama_y_nulo(rng):
    cfg = HilbertConfig(4, 1)
    x = random_regular_operator(cfg, rng)
    y_tilde = random_regular_operator(cfg, rng)
    report = global_bound_check(x, zero_operator(cfg), y_tilde)
    assert report.branch == "y_zero"
    assert report.ratio == pytest.approx(lagrangian(x, y_tilde) / (x.norm**2 * y_tilde.norm**2))


def test_fuera_de_la_vecindad(rng):
    cfg = HilbertConfig(4, 1)
    x = random_regular_operator(cfg, rng)
    y = random_regular_operator(cfg, rng)
    far = random_regular_operator(cfg, rng)
    assert not global_bound_check(x, y, far).within_neighborhood


def test_version_simetrica(rng):
    x, y, y_tilde = _local_triple(HilbertConfig(4, 1), rng)
    direct = global_bound_check(x, y, y_tilde)
    swapped = symmetric_bound_check(y, y_tilde, x)
    assert swapped.ratio == pytest.approx(direct.ratio, rel=1e-10)


def test_cota_refinada(rng):
    cfg = HilbertConfig(6, 1)
    for _ in range(10):
        y, x, x_tilde = _local_triple(cfg, rng)
        report = refined_bound_check(x, x_tilde, y)
        scale = 1 + x.norm**2 * y.norm**2
        assert report.identity_residual <= 1e-9 * scale
        assert report.refined_rhs <= report.coarse_rhs * (1 + 1e-12)


def test_direccion_admisible(rng):
    y = random_regular_operator(HilbertConfig(6, 2), rng)
    D = random_admissible_direction(y, rng)
    assert np.allclose(D, D.conj().T)
    assert np.linalg.norm(D, 2) == pytest.approx(1.0)
    assert np.allclose(random_admissible_direction(zero_operator(y.cfg), rng), 0.0)


def test_constante_empirica(rng):
    table = estimate_hoelder_constant(HilbertConfig(4, 1), rng, trials=20)
    assert list(table.columns) == ["trial", "ratio", "delta_L", "step_norm"]
    assert len(table) == 20
    assert np.all(np.isfinite(table["ratio"]))
    assert np.all(table["ratio"] >= 0)


if __name__ == '__main__':
    pytest.main([__file__])
