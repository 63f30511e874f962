"""
Tests de los esténciles de diferencias finitas.
"""

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent / 'src'))

from finite_differences import (
    curve_derivative,
    curve_derivative_richardson,
    default_step,
    directional_derivative,
    mixed_partial,
    mixed_partial_richardson,
    one_sided_gap,
    richardson,
)


def test_paso_por_defecto():
    assert default_step(np.zeros(3)) == pytest.approx(1e-5)
    assert default_step(np.array([3.0, 4.0])) == pytest.approx(6e-5)


def test_richardson_elimina_orden_dos():
    # D(h) = 1 + h²  ⇒  extrapolación exacta
    h = 0.1
    assert richardson(1 + h**2, 1 + (h / 2) ** 2) == pytest.approx(1.0)


def test_derivada_direccional_cubica():
    f = lambda v: float(np.sum(v**3))  # noqa: E731
    x = np.array([1.0, 2.0])
    d = np.array([0.5, -1.0])
    expected = 3 * (1.0 * 0.5 + 4.0 * -1.0)
    assert directional_derivative(f, x, d) == pytest.approx(expected, rel=1e-9)


def test_derivada_direccional_nula():
    f = lambda v: float(np.sum(v**2))  # noqa: E731
    assert directional_derivative(f, np.ones(2), np.zeros(2)) == 0.0


def test_derivada_direccional_matricial():
    """Funciones con valores matriciales: D(A ↦ A²)(B) = AB + BA."""
    A = np.array([[1.0, 2.0], [0.0, 1.0]])
    B = np.array([[0.0, 1.0], [1.0, 0.0]])
    result = directional_derivative(lambda M: M @ M, A, B)
    assert np.allclose(result, A @ B + B @ A, atol=1e-8)


def test_parcial_mixta_bilineal():
    """f(v) = v₀ v₁ ⇒ ∂²f/∂e₀∂e₁ = 1."""
    f = lambda v: v[0] * v[1]  # noqa: E731
    e0, e1 = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    assert mixed_partial(f, np.zeros(2), [e0, e1], 0.1) == pytest.approx(1.0)
    assert mixed_partial(f, np.zeros(2), [e0, e0], 0.1) == pytest.approx(0.0)


def test_parcial_mixta_simetrica():
    f = lambda v: np.sin(v[0]) * np.exp(v[1])  # noqa: E731
    x = np.array([0.3, -0.2])
    e0, e1 = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    first = mixed_partial_richardson(f, x, [e0, e1], 1e-3)
    second = mixed_partial_richardson(f, x, [e1, e0], 1e-3)
    assert first == pytest.approx(second, rel=1e-9)
    assert first == pytest.approx(np.cos(0.3) * np.exp(-0.2), rel=1e-7)


@pytest.mark.parametrize("order, expected", [(1, 3.0), (2, 6.0), (3, 6.0)])
def test_derivada_de_curva(order, expected):
    """t³ en t = 1."""
    f = lambda t: t**3  # noqa: E731
    assert curve_derivative_richardson(f, 1.0, order, 1e-2) == pytest.approx(expected, rel=1e-6)


def test_derivada_de_curva_polinomio_exacto():
    f = lambda t: 2 * t**2 - t  # noqa: E731
    assert curve_derivative(f, 0.5, 2, 0.1) == pytest.approx(4.0)


def test_brecha_lateral():
    """|α| tiene brecha 2 entre cocientes laterales; α² tiene brecha O(h)."""
    kink = lambda v: abs(v[0])  # noqa: E731
    smooth = lambda v: v[0] ** 2  # noqa: E731
    direction = np.array([1.0])
    assert one_sided_gap(kink, np.zeros(1), direction, 1e-3) == pytest.approx(2.0)
    assert one_sided_gap(smooth, np.zeros(1), direction, 1e-3) == pytest.approx(2e-3)


if __name__ == '__main__':
    pytest.main([__file__])
