"""
Tests de la inmersión de Hilbert-Schmidt, la métrica y la función E.
"""

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent / 'src'))

from exceptions import NotSelfadjoint
from operator_core import HilbertConfig, make_operator, random_regular_operator, spin_frame, zero_operator
from riemann_metric import (
    METRIC_NORMALIZATION,
    HSVector,
    dist_sq,
    dist_sq_hessian,
    embed_tangent,
    embedded_metric,
    fd_gradient,
    fd_hessian,
    hessian_verification,
    hs_embedding_roundtrip,
    hs_inner,
    metric,
    norm_equivalence,
    random_metric_setup,
    restricted_trace,
)
from wave_charts import (
    chart_forward,
    chart_origin,
    make_tangent,
    pushforward,
    random_chart_point,
    random_tangent,
    tangent_basis,
)


@pytest.fixture
def rng():
    return np.random.default_rng(7)


@pytest.fixture
def setup(rng):
    return random_metric_setup(HilbertConfig(6, 1), rng)


def test_hs_inner_ejemplos():
    zero = HSVector(np.zeros((2, 2)))
    assert hs_inner(zero, zero) == 0.0
    A = HSVector(np.diag([1.0, -1.0]))
    assert hs_inner(A, A) == pytest.approx(2.0)


def test_hs_inner_valores_singulares(rng):
    G = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    A = HSVector(0.5 * (G + G.conj().T))
    singular = np.linalg.svd(A.mat, compute_uv=False)
    assert hs_inner(A, A) == pytest.approx(np.sum(singular**2), rel=1e-12)


def test_hs_vector_no_autoadjunto():
    with pytest.raises(NotSelfadjoint):
        HSVector(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_inmersion_cero(setup):
    x, _, _ = setup
    v = make_tangent(x, np.zeros((2, x.cfg.d), dtype=complex))
    assert np.allclose(embed_tangent(v).ambient.mat, 0.0)


def test_inmersion_inyectiva_y_lineal(setup, rng):
    x, u, w = setup
    frame = spin_frame(x)
    for _ in range(100):
        v = make_tangent(x, random_tangent(frame, rng))
        assert np.linalg.norm(embed_tangent(v).ambient.mat) > 1e-8
    a, b = 0.3, -2.0
    combined = embed_tangent(make_tangent(x, a * u.v + b * w.v)).ambient.mat
    separate = a * embed_tangent(u).ambient.mat + b * embed_tangent(w).ambient.mat
    assert np.allclose(combined, separate, atol=1e-12)


def test_metrica_nula(setup):
    x, u, _ = setup
    zero = make_tangent(x, np.zeros_like(u.v))
    assert metric(x, u, zero) == 0.0


def test_metrica_simetrica_y_bilineal(setup, rng):
    x, u, v = setup
    w = make_tangent(x, random_tangent(spin_frame(x), rng))
    scale = np.sqrt(metric(x, u, u) * metric(x, v, v))
    assert abs(metric(x, u, v) - metric(x, v, u)) <= 1e-10 * scale
    a, b = 1.7, -0.4
    combo = make_tangent(x, a * u.v + b * w.v)
    assert metric(x, combo, v) == pytest.approx(a * metric(x, u, v) + b * metric(x, w, v), rel=1e-10, abs=1e-12)


def test_normalizacion_de_la_metrica(setup, rng):
    """g̃_x(u,u) = 2‖u†x + xu‖²_HS."""
    x, _, _ = setup
    frame = spin_frame(x)
    for _ in range(20):
        u = make_tangent(x, random_tangent(frame, rng))
        assert metric(x, u, u) == pytest.approx(METRIC_NORMALIZATION * embedded_metric(u, u), rel=1e-10)


@pytest.mark.parametrize("d, n", [(2, 1), (6, 1), (6, 2)])
def test_metrica_definida_positiva(rng, d, n):
    x = random_regular_operator(HilbertConfig(d, n), rng)
    frame = spin_frame(x)
    for _ in range(500):
        u = make_tangent(x, random_tangent(frame, rng))
        assert metric(x, u, u) > 0


def test_distancia_ejemplos():
    cfg = HilbertConfig(2, 1)
    x = make_operator(np.diag([1.0, -1.0]), cfg)
    assert dist_sq(x, x) == 0.0
    assert dist_sq(x, zero_operator(cfg)) == pytest.approx(2.0)


def test_desigualdad_triangular(rng):
    cfg = HilbertConfig(6, 2)
    for _ in range(20):
        x, y, z = (random_regular_operator(cfg, rng) for _ in range(3))
        dxy, dyz, dxz = (np.sqrt(dist_sq(a, b)) for a, b in ((x, y), (y, z), (x, z)))
        assert dxz <= dxy + dyz + 1e-12
        assert dist_sq(x, y) == pytest.approx(np.linalg.norm(x.mat - y.mat) ** 2, rel=1e-10)


def test_gradiente_nulo_en_el_origen(setup):
    x, _, _ = setup
    grad = fd_gradient(x, tangent_basis(spin_frame(x)))
    assert np.linalg.norm(grad) <= 1e-6 * max(1.0, x.norm**2)


def test_hessiana_forma_cerrada_vs_metrica(setup):
    x, u, v = setup
    assert dist_sq_hessian(x, u, v) == pytest.approx(metric(x, u, v), rel=1e-10, abs=1e-12)


def test_hessiana_forma_cerrada_vs_fd(setup):
    x, u, v = setup
    closed = dist_sq_hessian(x, u, v)
    numeric = fd_hessian(x, u.v, v.v)
    scale = np.sqrt(metric(x, u, u) * metric(x, v, v))
    assert abs(closed - numeric) <= 1e-4 * scale


def test_reporte_de_verificacion(rng):
    x = random_regular_operator(HilbertConfig(4, 1), rng)
    report = hessian_verification(x, rng, trials=10)
    assert list(report.columns) == ["trial", "closed_form", "fd_value", "rel_err"]
    assert report["rel_err"].max() <= 1e-4


def test_hessiana_independiente_de_la_carta(setup, rng):
    """Evaluada desde un ancla cercana con u, v transportados."""
    x, u, v = setup
    y = chart_forward(random_chart_point(x, rng, radius=0.03))
    u_y, v_y = pushforward(u, y), pushforward(v, y)
    value = dist_sq_hessian(x, u_y, v_y, chart_anchor=y)
    scale = np.sqrt(metric(x, u, u) * metric(x, v, v))
    assert abs(value - dist_sq_hessian(x, u, v)) <= 1e-5 * scale


def test_ida_y_vuelta_hs_en_el_origen(setup):
    x, _, _ = setup
    k = x.cfg.d - 2
    residuals = hs_embedding_roundtrip(x, chart_origin(x), np.zeros((k, k)))
    assert residuals[0] <= 1e-10 and residuals[1] <= 1e-10


def test_ida_y_vuelta_hs_aleatoria(setup, rng):
    x, _, _ = setup
    k = x.cfg.d - 2
    for _ in range(20):
        p = random_chart_point(x, rng, radius=0.05)
        G = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
        B = 0.01 * (G + G.conj().T)
        coords, ambient = hs_embedding_roundtrip(x, p, B)
        assert coords <= 1e-8 and ambient <= 1e-8


def test_equivalencia_de_normas(rng):
    x = random_regular_operator(HilbertConfig(6, 2), rng)
    op, hs, bound = norm_equivalence(x.mat)
    assert op <= hs * (1 + 1e-12)
    assert hs <= bound * (1 + 1e-12)
    assert bound <= np.sqrt(4) * op * (1 + 1e-12)


def test_traza_restringida(rng):
    basis = np.linalg.qr(rng.standard_normal((5, 2)) + 1j * rng.standard_normal((5, 2)))[0]
    inside = basis @ np.array([[2.0, 1.0j], [-1.0j, 3.0]]) @ basis.conj().T
    assert restricted_trace(inside, basis) == pytest.approx(np.trace(inside), abs=1e-12)
    assert restricted_trace(inside, basis) == pytest.approx(5.0, abs=1e-12)

    e = np.eye(5)
    mat = np.diag([1.0, 2.0, 3.0, 4.0, 5.0]).astype(complex)
    assert restricted_trace(mat, e[:, [1, 3]]) == pytest.approx(6.0)
    assert restricted_trace(mat, e[:, :0]) == 0.0


if __name__ == '__main__':
    pytest.main([__file__])
