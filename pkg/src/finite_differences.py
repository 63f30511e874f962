"""
Diferencias finitas centrales con extrapolación de Richardson.

Las derivadas de Fréchet exactas se realizan numéricamente: los esténciles
son simétricos (error par en h), de modo que una extrapolación con (h, h/2)
elimina el término O(h²).
"""

from __future__ import annotations

import itertools
import logging
from typing import Callable

import numpy as np
from scipy.special import comb

logger = logging.getLogger(__name__)

# Paso relativo por defecto para derivadas de primer orden
DEFAULT_REL_STEP = 1e-5


def default_step(x: np.ndarray, rel_step: float = DEFAULT_REL_STEP) -> float:
    """h = rel_step·(1 + ‖x‖)."""
    return rel_step * (1.0 + float(np.linalg.norm(x)))


def richardson(coarse, fine):
    """Extrapolación (4·D(h/2) − D(h))/3 para esténciles de error O(h²)."""
    return (4.0 * fine - coarse) / 3.0


def directional_derivative(
    func: Callable,
    x: np.ndarray,
    direction: np.ndarray,
    h: float | None = None,
):
    """
    Derivada direccional D func|_x (direction) por diferencias centrales.

    La dirección se normaliza antes de aplicar el paso y el resultado se
    reescala, de modo que h no depende de la magnitud de ``direction``.
    """
    scale = float(np.linalg.norm(direction))
    if scale == 0.0:
        return 0.0 * func(x)
    unit = direction / scale
    if h is None:
        h = default_step(x)

    def central(step):
        return (func(x + step * unit) - func(x - step * unit)) / (2.0 * step)

    return scale * richardson(central(h), central(h / 2))


def mixed_partial(
    func: Callable,
    x: np.ndarray,
    directions: list[np.ndarray],
    h: float,
):
    """
    ∂^k/∂α_1…∂α_k func(x + Σ α_i h_i) en α = 0, esténcil central 2^k puntos.

    Para direcciones repetidas se reduce a la diferencia central usual de
    orden superior con paso 2h.
    """
    k = len(directions)
    total = 0.0
    for signs in itertools.product((1.0, -1.0), repeat=k):
        shift = sum(s * d for s, d in zip(signs, directions))
        total = total + np.prod(signs) * func(x + h * shift)
    return total / (2.0 * h) ** k


def mixed_partial_richardson(func: Callable, x: np.ndarray, directions, h: float):
    """``mixed_partial`` con pasos (h, h/2) y Richardson."""
    return richardson(mixed_partial(func, x, directions, h), mixed_partial(func, x, directions, h / 2))


def curve_derivative(func_t: Callable[[float], object], t0: float, order: int, h: float):
    """
    Derivada de orden ``order`` de una función de un parámetro real.

    Esténcil central Σ_j (−1)^j C(k,j) f(t0 + (k/2 − j)h) / h^k.
    """
    total = 0.0
    for j in range(order + 1):
        coeff = (-1) ** j * comb(order, j, exact=True)
        total = total + coeff * func_t(t0 + (order / 2 - j) * h)
    return total / h**order


def curve_derivative_richardson(func_t, t0: float, order: int, h: float):
    return richardson(curve_derivative(func_t, t0, order, h), curve_derivative(func_t, t0, order, h / 2))


def one_sided_gap(func: Callable, x: np.ndarray, direction: np.ndarray, h: float) -> float:
    """
    |cociente hacia adelante − cociente hacia atrás| en el paso h.

    Para funciones C¹ decae como O(h); en un quiebre tipo |α| permanece
    constante.
    """
    f0 = func(x)
    forward = (func(x + h * direction) - f0) / h
    backward = (f0 - func(x - h * direction)) / h
    return float(np.max(np.abs(np.asarray(forward - backward))))
