"""
Tests de medidas discretas, acción causal y minimizador.
"""

import sys
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent / 'src'))

from io_utils import load_measure
from kernel_lagrangian import lagrangian
from measures_action import (
    DiscreteMeasure,
    causal_action,
    causal_action_serial,
    clip_to_signature,
    ell,
    empty_measure,
    lagrangian_matrix,
    local_trace_check,
    minimize_action,
)
from operator_core import HilbertConfig, make_operator, random_regular_operator

DATA_DIR = Path(__file__).parent.parent / 'data'
CFG2 = HilbertConfig(2, 1)


@pytest.fixture
def rng():
    return np.random.default_rng(3)


@pytest.fixture
def two_points():
    return load_measure(DATA_DIR / 'two_point_measure.json')


def _random_measure(cfg, rng, size):
    points = tuple(random_regular_operator(cfg, rng) for _ in range(size))
    return DiscreteMeasure(points, rng.uniform(0.5, 1.5, size))


# ---------------------------------------------------------------------------
# Medidas
# ---------------------------------------------------------------------------


def test_medida_validaciones():
    x = make_operator(np.diag([1.0, -1.0]), CFG2)
    with pytest.raises(ValueError):
        DiscreteMeasure((x,), np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        DiscreteMeasure((x,), np.array([0.0]))
    other = make_operator(np.diag([1.0, -1.0, 0.0, 0.0]), HilbertConfig(4, 1))
    with pytest.raises(ValueError):
        DiscreteMeasure((x, other), np.ones(2))


def test_medida_vacia():
    rho = empty_measure()
    assert rho.size == 0
    assert rho.cfg is None
    report = causal_action(rho)
    assert report.action == 0.0
    assert report.volume == 0.0
    assert report.boundedness == 0.0
    assert report.ell_values == []


def test_reemplazo_de_punto(two_points):
    y = make_operator(np.diag([3.0, -1.0]), CFG2)
    replaced = two_points.replace_point(0, y)
    assert replaced.points[0] is y
    assert two_points.points[0] is not y
    assert np.array_equal(replaced.weights, two_points.weights)


# ---------------------------------------------------------------------------
# Acción
# ---------------------------------------------------------------------------


def test_un_punto(rng):
    x = random_regular_operator(HilbertConfig(4, 1), rng)
    report = causal_action(DiscreteMeasure((x,), np.array([3.0])))
    assert report.action == pytest.approx(9.0 * lagrangian(x, x))


def test_medida_de_dos_puntos(two_points):
    """ℒ₁₁ = 0, ℒ₁₂ = 1/2, ℒ₂₂ = 9/2; |x_i x_j|² = 4, 9, 9, 25."""
    report = causal_action(two_points, s=0.5)
    assert report.action == pytest.approx(5.5)
    assert report.boundedness == pytest.approx(47.0)
    assert report.volume == pytest.approx(2.0)
    assert report.trace_integral == pytest.approx(1.0)
    assert report.ell_values == pytest.approx([0.0, 4.5])
    assert report.kappa_action(2.0) == pytest.approx(5.5 + 94.0)
    assert report.to_dict()["s_constant"] == 0.5


def test_matriz_de_lagrangiano(two_points):
    L, T = lagrangian_matrix(two_points)
    assert np.allclose(L, [[0.0, 0.5], [0.5, 4.5]])
    assert np.allclose(T, [[4.0, 9.0], [9.0, 25.0]])


def test_paralelo_igual_a_serial(rng):
    rho = _random_measure(HilbertConfig(4, 1), rng, 50)
    parallel = causal_action(rho, s=0.1, max_workers=4)
    serial = causal_action_serial(rho, s=0.1)
    assert parallel.action == serial.action
    assert parallel.boundedness == serial.boundedness
    assert parallel.ell_values == serial.ell_values


def test_identidad_de_ell(rng):
    rho = _random_measure(HilbertConfig(4, 1), rng, 6)
    s = 0.2
    report = causal_action(rho, s=s)
    for x, value in zip(rho.points, report.ell_values):
        assert value == pytest.approx(ell(x, rho, s), rel=1e-12, abs=1e-12)
    recovered = sum(c * (v + s) for c, v in zip(rho.weights, report.ell_values))
    assert recovered == pytest.approx(report.action, rel=1e-12)


def test_ell_constante_negativa(two_points):
    with pytest.raises(ValueError):
        ell(two_points.points[0], two_points, -1.0)


def test_traza_no_constante():
    rho = DiscreteMeasure(
        (make_operator(np.diag([1.0, 0.0]), CFG2), make_operator(np.diag([2.0, 0.0]), CFG2)), np.ones(2)
    )
    report = local_trace_check(rho)
    assert report.mean_trace == pytest.approx(1.5)
    assert report.max_deviation == pytest.approx(0.5)
    assert not report.constant_trace
    assert report.to_dict()["constant_trace"] is False


def test_traza_constante():
    x = make_operator(np.diag([2.0, -1.0]), CFG2)
    assert local_trace_check(DiscreteMeasure((x, x), np.ones(2))).constant_trace


def test_traza_medida_vacia():
    with pytest.raises(ValueError):
        local_trace_check(empty_measure())


# ---------------------------------------------------------------------------
# Minimizador
# ---------------------------------------------------------------------------


def test_recorte_de_firma():
    cfg = HilbertConfig(4, 1)
    clipped = clip_to_signature(np.diag([3.0, 2.0, -1.0, -4.0]), cfg)
    assert np.allclose(clipped.mat, np.diag([3.0, 0.0, 0.0, -4.0]), atol=1e-12)
    assert clipped.signature == (1, 1)


def test_presupuesto_cero(two_points):
    result = minimize_action(two_points, kappa=0.5, budget=0, seed=1)
    assert result.measure is two_points
    assert len(result.history) == 1
    assert result.accepted == 0


def test_minimizador_monotono_y_volumen(rng):
    rho = _random_measure(HilbertConfig(4, 1), rng, 5)
    result = minimize_action(rho, kappa=0.1, budget=200, seed=7)
    objective = result.history["objective"].to_numpy()
    assert np.all(np.diff(objective) <= 0)
    assert np.allclose(result.history["volume"], rho.volume, rtol=0, atol=1e-12 * rho.volume)
    assert result.measure.volume == pytest.approx(rho.volume, abs=1e-12)
    assert list(result.history.columns) == ["iter", "action", "boundedness", "volume", "objective", "accepted"]


def test_minimizador_determinista(rng):
    rho = _random_measure(HilbertConfig(4, 1), rng, 4)
    first = minimize_action(rho, kappa=0.1, budget=100, seed=42)
    second = minimize_action(rho, kappa=0.1, budget=100, seed=42)
    pd.testing.assert_frame_equal(first.history, second.history)
    for a, b in zip(first.measure.points, second.measure.points):
        assert np.array_equal(a.mat, b.mat)


def test_kappa_grande_reduce_acotamiento(rng):
    """Con κ grande el acotamiento final queda por debajo de la corrida κ = 0."""
    rho = _random_measure(HilbertConfig(4, 1), rng, 4)
    kappa = 1e3
    large, free = 0.0, 0.0
    for seed in (3, 4, 5):
        result = minimize_action(rho, kappa=kappa, budget=150, seed=seed)
        start = result.history.iloc[0]
        end = result.history.iloc[-1]
        assert end["boundedness"] <= start["boundedness"] + start["action"] / kappa
        large += end["boundedness"]
        free += minimize_action(rho, kappa=0.0, budget=150, seed=seed).history.iloc[-1]["boundedness"]
    assert large < free


def test_traza_fija(rng):
    rho = _random_measure(HilbertConfig(4, 1), rng, 3)
    result = minimize_action(rho, kappa=0.1, budget=80, seed=5, fix_trace=True)
    for before, after in zip(rho.points, result.measure.points):
        assert after.trace == pytest.approx(before.trace, rel=1e-9, abs=1e-12)


def test_minimizador_argumentos_invalidos(two_points):
    with pytest.raises(ValueError):
        minimize_action(two_points, kappa=-1.0, budget=10, seed=0)
    with pytest.raises(ValueError):
        minimize_action(two_points, kappa=1.0, budget=-1, seed=0)


if __name__ == '__main__':
    pytest.main([__file__])
