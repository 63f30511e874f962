"""
Espectro del producto no normal xy, Lagrangiano causal y objetos de kernel.

El espectro se calcula sobre la reducción g×g de x·y·π_x al rango de x,
que es la que aparece en la prueba de continuidad de Hölder y está mejor
condicionada que el producto completo d×d.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import pandas as pd

from operator_core import Operator, spin_frame

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class XYSpectrum:
    """
    Autovalores λ_i^{xy} con multiplicidad algebraica, rellenados con ceros
    hasta 2n entradas y ordenados por módulo descendente.
    """

    lambdas: np.ndarray
    g: int

    @property
    def moduli(self) -> np.ndarray:
        return np.abs(self.lambdas)

    @property
    def nonzero(self) -> np.ndarray:
        return self.lambdas[: self.g]


@dataclass(frozen=True)
class KernelPair:
    """P(x,y) = π_x y|_{S_y}, P(y,x) y la cadena cerrada A_xy = P(x,y)P(y,x)."""

    P_xy: np.ndarray
    P_yx: np.ndarray
    A_xy: np.ndarray


def _range_basis(x: Operator) -> np.ndarray:
    # autovectores de autovalores no nulos; vale también para x no regular
    keep = np.abs(x.eigenvalues) > x.rank_cutoff
    return x.eigenvectors[:, keep]


def xy_spectrum(x: Operator, y: Operator) -> XYSpectrum:
    """
    Autovalores de x·y·π_x restringido a x(ℋ).

    Parameters
    ----------
    x, y : Operator
        Puntos de ℱ con la misma configuración.

    Returns
    -------
    XYSpectrum
        2n entradas; las g = rango(x) primeras son los autovalores de la
        matriz g×g B†xyB, el resto ceros exactos.
    """
    if x.cfg != y.cfg:
        raise ValueError("x e y deben compartir HilbertConfig")
    size = x.cfg.max_rank
    B = _range_basis(x)
    g = B.shape[1]
    lambdas = np.zeros(size, dtype=complex)
    if g == 0 or y.rank == 0:
        return XYSpectrum(lambdas=lambdas, g=g)

    M = B.conj().T @ x.mat @ y.mat @ B
    ev = np.linalg.eigvals(M)
    # módulo descendente, desempate por parte real y luego imaginaria
    order = np.lexsort((-ev.imag, -ev.real, -np.abs(ev)))
    lambdas[:g] = ev[order]
    return XYSpectrum(lambdas=lambdas, g=g)


def _lagrangian_from_moduli(moduli: np.ndarray, n: int) -> float:
    diff = moduli[:, None] - moduli[None, :]
    value = float(np.sum(diff**2)) / (4 * n)
    # ℒ ≥ 0; se recortan negativos de redondeo
    return max(value, 0.0)


def lagrangian(x: Operator, y: Operator) -> float:
    """
    Lagrangiano causal ℒ(x,y) = (1/4n) Σ_{i,j} (|λ_i| − |λ_j|)².

    Returns
    -------
    float
        Valor no negativo, simétrico en (x, y).
    """
    spec = xy_spectrum(x, y)
    return _lagrangian_from_moduli(spec.moduli, x.cfg.n)


def spectral_weight(x: Operator, y: Operator) -> float:
    """|xy| = Σ |λ_j^{xy}|."""
    return float(np.sum(xy_spectrum(x, y).moduli))


def boundedness_integrand(x: Operator, y: Operator) -> float:
    """|xy|², integrando de la restricción de acotamiento."""
    return spectral_weight(x, y) ** 2


def lagrangian_kappa(x: Operator, y: Operator, kappa: float) -> float:
    """ℒ_κ(x,y) = ℒ(x,y) + κ|xy|²."""
    if kappa < 0:
        raise ValueError(f"kappa debe ser ≥ 0, recibido {kappa}")
    spec = xy_spectrum(x, y)
    weight = float(np.sum(spec.moduli))
    return _lagrangian_from_moduli(spec.moduli, x.cfg.n) + kappa * weight**2


def kernel_pair(x: Operator, y: Operator) -> KernelPair:
    """
    Matrices del kernel en los marcos deterministas.

    Raises
    ------
    SingularPoint
        Si x o y no son regulares.
    """
    fx = spin_frame(x)
    fy = spin_frame(y)
    P_xy = fx.basis_I.conj().T @ y.mat @ fy.basis_I
    P_yx = fy.basis_I.conj().T @ x.mat @ fx.basis_I
    return KernelPair(P_xy=P_xy, P_yx=P_yx, A_xy=P_xy @ P_yx)


def _pair_row(points: list[Operator], i: int) -> list[tuple[int, int, float, float]]:
    x = points[i]
    rows = []
    for j, y in enumerate(points):
        spec = xy_spectrum(x, y)
        rows.append(
            (i, j, _lagrangian_from_moduli(spec.moduli, x.cfg.n), float(np.sum(spec.moduli)))
        )
    return rows


def pairwise_table(points: list[Operator], max_workers: int | None = None) -> pd.DataFrame:
    """
    Evaluación por lotes de ℒ y |xy| sobre todos los pares (i, j).

    Las filas se calculan en paralelo y se concatenan en orden fila-mayor,
    de modo que el resultado no depende del número de hilos.
    """
    columns = ["i", "j", "lagrangian", "spectral_weight"]
    if not points:
        return pd.DataFrame(columns=columns)
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        rows = list(pool.map(lambda i: _pair_row(points, i), range(len(points))))
    flat = [r for row in rows for r in row]
    logger.debug("tabla de pares: %d filas", len(flat))
    return pd.DataFrame(flat, columns=columns)
