"""
Medidas discretas, acción causal, restricciones y minimizador local.

Una medida es una suma finita ρ = Σ c_i δ_{x_i}. La acción y el funcional
de acotamiento se reducen siempre en orden fila-mayor (i, j) con el mismo
acumulador, de modo que la evaluación paralela y la serial coinciden bit a
bit.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from exceptions import CausalFermionError
from kernel_lagrangian import boundedness_integrand, lagrangian, pairwise_table
from operator_core import (
    DEFAULT_TOLERANCES,
    HilbertConfig,
    Operator,
    Tolerances,
    make_operator,
)

logger = logging.getLogger(__name__)

# Paso relativo por defecto del minimizador
MINIMIZER_STEP = 0.05


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """ρ = Σ c_i δ_{x_i} con pesos positivos y configuración común."""

    points: tuple
    weights: np.ndarray

    def __post_init__(self):
        points = tuple(self.points)
        weights = np.asarray(self.weights, dtype=float).reshape(-1)
        if len(points) != weights.size:
            raise ValueError(f"{len(points)} puntos y {weights.size} pesos")
        if np.any(weights <= 0):
            raise ValueError("los pesos deben ser positivos")
        if len({p.cfg for p in points}) > 1:
            raise ValueError("todos los puntos deben compartir HilbertConfig")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "weights", weights)

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def cfg(self) -> HilbertConfig | None:
        return self.points[0].cfg if self.points else None

    @property
    def volume(self) -> float:
        return float(np.sum(self.weights))

    def replace_point(self, k: int, point: Operator) -> "DiscreteMeasure":
        points = list(self.points)
        points[k] = point
        return DiscreteMeasure(tuple(points), self.weights.copy())

    def with_weights(self, weights: np.ndarray) -> "DiscreteMeasure":
        return DiscreteMeasure(self.points, weights)


def empty_measure() -> DiscreteMeasure:
    return DiscreteMeasure((), np.zeros(0))


@dataclass
class ActionReport:
    """
    Acción 𝒮, volumen ρ(ℱ), ∫ tr(x) dρ, funcional de acotamiento 𝒯 y ℓ(x_i).
    """

    action: float
    volume: float
    trace_integral: float
    boundedness: float
    ell_values: list[float] = field(default_factory=list)
    s: float = 0.0

    def kappa_action(self, kappa: float) -> float:
        """𝒮_κ = 𝒮 + κ·𝒯."""
        return self.action + kappa * self.boundedness

    def to_dict(self) -> dict:
        return {
            "action": self.action,
            "volume": self.volume,
            "trace_integral": self.trace_integral,
            "boundedness": self.boundedness,
            "ell_values": list(self.ell_values),
            "s_constant": self.s,
        }


def _double_sum(weights: np.ndarray, matrix: np.ndarray) -> float:
    # orden fila-mayor fijo; no usar np.sum (reduce por pares)
    total = 0.0
    for i in range(weights.size):
        ci = float(weights[i])
        for j in range(weights.size):
            total += ci * float(weights[j]) * float(matrix[i, j])
    return total


def _row_sums(weights: np.ndarray, matrix: np.ndarray) -> list[float]:
    sums = []
    for i in range(weights.size):
        total = 0.0
        for j in range(weights.size):
            total += float(weights[j]) * float(matrix[i, j])
        sums.append(total)
    return sums


def lagrangian_matrix(
    rho: DiscreteMeasure, max_workers: int | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """
    Matrices L_ij = ℒ(x_i, x_j) y T_ij = |x_i x_j|², filas en paralelo.

    Returns
    -------
    (np.ndarray, np.ndarray)
        Ambas m×m; vacías si la medida es vacía.
    """
    m = rho.size
    if m == 0:
        return np.zeros((0, 0)), np.zeros((0, 0))
    table = pairwise_table(list(rho.points), max_workers=max_workers)
    L = table["lagrangian"].to_numpy(dtype=float).reshape(m, m)
    weight = table["spectral_weight"].to_numpy(dtype=float).reshape(m, m)
    return L, weight**2


def _report(rho: DiscreteMeasure, L: np.ndarray, T: np.ndarray, s: float | None) -> ActionReport:
    shift = 0.0 if s is None else s
    return ActionReport(
        action=_double_sum(rho.weights, L),
        volume=rho.volume,
        trace_integral=float(sum(c * x.trace for x, c in zip(rho.points, rho.weights))),
        boundedness=_double_sum(rho.weights, T),
        ell_values=[v - shift for v in _row_sums(rho.weights, L)],
        s=shift,
    )


def causal_action(
    rho: DiscreteMeasure, s: float | None = None, max_workers: int | None = None
) -> ActionReport:
    """
    𝒮(ρ) = Σ_{i,j} c_i c_j ℒ(x_i, x_j), incluidos los términos diagonales.

    Parameters
    ----------
    rho : DiscreteMeasure
    s : float, optional
        Constante 𝔰 de ℓ; si falta, ``ell_values`` contiene Σ_j c_j ℒ(x_i, x_j).
    max_workers : int, optional
        Hilos para las filas de la matriz de ℒ.
    """
    L, T = lagrangian_matrix(rho, max_workers)
    report = _report(rho, L, T, s)
    logger.info("acción causal: 𝒮 = %.6e, 𝒯 = %.6e (%d puntos)", report.action, report.boundedness, rho.size)
    return report


def causal_action_serial(rho: DiscreteMeasure, s: float | None = None) -> ActionReport:
    """Doble bucle ingenuo O(m²); mismo orden de reducción que ``causal_action``."""
    m = rho.size
    L = np.zeros((m, m))
    T = np.zeros((m, m))
    for i, x in enumerate(rho.points):
        for j, y in enumerate(rho.points):
            L[i, j] = lagrangian(x, y)
            T[i, j] = boundedness_integrand(x, y)
    return _report(rho, L, T, s)


def ell(x: Operator, rho: DiscreteMeasure, s: float) -> float:
    """ℓ(x) = Σ_i c_i ℒ(x, y_i) − 𝔰."""
    if s < 0:
        raise ValueError(f"la constante 𝔰 debe ser ≥ 0, recibido {s}")
    total = 0.0
    for y, c in zip(rho.points, rho.weights):
        total += float(c) * lagrangian(x, y)
    return total - s


@dataclass
class TraceReport:
    """Desviación de las trazas respecto de su media (no ponderada)."""

    mean_trace: float
    traces: list[float]
    max_deviation: float
    tolerance: float

    @property
    def constant_trace(self) -> bool:
        return self.max_deviation <= self.tolerance

    def to_dict(self) -> dict:
        return {
            "mean_trace": self.mean_trace,
            "traces": self.traces,
            "max_deviation": self.max_deviation,
            "constant_trace": self.constant_trace,
        }


def local_trace_check(rho: DiscreteMeasure, tolerance: float = 1e-8) -> TraceReport:
    """
    max_i |tr(x_i) − media| como diagnóstico de la condición tr x = c en el
    soporte de un minimizador.
    """
    if rho.size == 0:
        raise ValueError("la medida debe ser no vacía")
    traces = [x.trace for x in rho.points]
    mean = float(np.mean(traces))
    deviation = float(max(abs(t - mean) for t in traces))
    if deviation > tolerance:
        logger.info("trazas no constantes: desviación %.3e", deviation)
    return TraceReport(mean_trace=mean, traces=traces, max_deviation=deviation, tolerance=tolerance)


# ---------------------------------------------------------------------------
# Minimizador
# ---------------------------------------------------------------------------


def clip_to_signature(mat: np.ndarray, cfg: HilbertConfig, tol: Tolerances = DEFAULT_TOLERANCES) -> Operator:
    """
    Proyección a ℱ: conserva los n autovalores positivos mayores y los n
    negativos de mayor módulo.
    """
    herm = 0.5 * (mat + mat.conj().T)
    eigenvalues, eigenvectors = np.linalg.eigh(herm)
    clipped = np.zeros_like(eigenvalues)
    # eigh ordena ascendente
    neg = np.flatnonzero(eigenvalues < 0)[: cfg.n]
    pos = np.flatnonzero(eigenvalues > 0)[::-1][: cfg.n]
    clipped[neg] = eigenvalues[neg]
    clipped[pos] = eigenvalues[pos]
    projected = (eigenvectors * clipped) @ eigenvectors.conj().T
    return make_operator(projected, cfg, tol)


def _random_hermitian(d: int, rng: np.random.Generator) -> np.ndarray:
    G = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return 0.5 * (G + G.conj().T)


@dataclass
class MinimizationResult:
    measure: DiscreteMeasure
    history: pd.DataFrame
    accepted: int


def minimize_action(
    rho0: DiscreteMeasure,
    kappa: float,
    budget: int,
    seed: int,
    step: float = MINIMIZER_STEP,
    fix_trace: bool = False,
) -> MinimizationResult:
    """
    Descenso por perturbaciones aleatorias de 𝒮_κ = 𝒮 + κ·𝒯.

    Cada iteración elige un punto y perturba su operador (proyectado a ℱ
    por recorte de autovalores) o su peso (renormalizando al volumen
    inicial). Solo se aceptan propuestas que no aumentan 𝒮_κ. No hay
    garantías de optimalidad.

    Parameters
    ----------
    rho0 : DiscreteMeasure
    kappa : float
        Multiplicador κ ≥ 0 del funcional de acotamiento.
    budget : int
        Número de iteraciones; 0 devuelve la medida de entrada.
    seed : int
        Semilla del generador PCG64.
    step : float
        Tamaño relativo de las perturbaciones.
    fix_trace : bool
        Si es True, cada operador propuesto se reescala para conservar su traza.

    Returns
    -------
    MinimizationResult
        Medida final, historial (iter, action, boundedness, volume,
        objective, accepted) y número de propuestas aceptadas.
    """
    if kappa < 0:
        raise ValueError(f"kappa debe ser ≥ 0, recibido {kappa}")
    if budget < 0:
        raise ValueError(f"presupuesto negativo: {budget}")

    rng = np.random.default_rng(seed)
    rho = rho0
    volume = rho0.volume
    L, T = lagrangian_matrix(rho)

    def objective(weights, L, T):
        action = _double_sum(weights, L)
        bound = _double_sum(weights, T)
        return action, bound, action + kappa * bound

    action, bound, current = objective(rho.weights, L, T)
    history = [(0, action, bound, rho.volume, current, True)]
    accepted = 0

    for it in range(1, budget + 1):
        if rho.size == 0:
            history.append((it, action, bound, rho.volume, current, False))
            continue
        k = int(rng.integers(rho.size))
        move_operator = bool(rng.random() < 0.5)
        candidate = None
        L_new, T_new = L, T
        if move_operator:
            x = rho.points[k]
            scale = step * max(x.norm, 1e-3)
            proposal = x.mat + scale * _random_hermitian(x.cfg.d, rng)
            try:
                new_point = clip_to_signature(proposal, x.cfg)
                if fix_trace and abs(x.trace) > 0:
                    ratio = x.trace / new_point.trace if new_point.trace != 0 else -1.0
                    if ratio <= 0:
                        raise ValueError("traza incompatible")
                    new_point = make_operator(ratio * new_point.mat, x.cfg)
            except (CausalFermionError, ValueError) as exc:
                logger.debug("iteración %d: propuesta descartada (%s)", it, exc)
                new_point = None
            if new_point is not None:
                candidate = rho.replace_point(k, new_point)
                L_new, T_new = L.copy(), T.copy()
                for j, y in enumerate(candidate.points):
                    L_new[k, j] = lagrangian(new_point, y)
                    L_new[j, k] = lagrangian(y, new_point)
                    T_new[k, j] = boundedness_integrand(new_point, y)
                    T_new[j, k] = boundedness_integrand(y, new_point)
        else:
            weights = rho.weights.copy()
            weights[k] *= np.exp(step * rng.standard_normal())
            weights *= volume / np.sum(weights)
            candidate = rho.with_weights(weights)

        ok = False
        if candidate is not None:
            a_new, b_new, obj_new = objective(candidate.weights, L_new, T_new)
            if obj_new <= current:
                rho, L, T = candidate, L_new, T_new
                action, bound, current = a_new, b_new, obj_new
                accepted += 1
                ok = True
                logger.debug("iteración %d aceptada: 𝒮_κ = %.6e", it, current)
        history.append((it, action, bound, rho.volume, current, ok))

    logger.info("minimizador: %d/%d propuestas aceptadas, 𝒮_κ final %.6e", accepted, budget, current)
    frame = pd.DataFrame(
        history, columns=["iter", "action", "boundedness", "volume", "objective", "accepted"]
    )
    return MinimizationResult(measure=rho, history=frame, accepted=accepted)
