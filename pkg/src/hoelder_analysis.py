"""
Continuidad de Hölder del Lagrangiano causal.

Incluye:

* el lema de perturbación de raíces de polinomios mónicos con la constante
  explícita δ_i = (g·2^{2g−p_i+1}/D^{g−p_i}·‖ΔP‖)^{1/p_i},
* barridos de perturbación y ajuste log-log del exponente,
* las cotas globales (con reescalamiento y versión refinada),
* familias construidas con degeneración máxima para probar exponentes.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np
import pandas as pd
from scipy import linalg
from scipy.cluster.hierarchy import fcluster, linkage
from scipy.optimize import linear_sum_assignment
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching
from scipy.spatial.distance import pdist
from scipy.stats import linregress

from exceptions import DegreeMismatch, PerturbationTooLarge
from kernel_lagrangian import boundedness_integrand, lagrangian, xy_spectrum
from operator_core import (
    DEFAULT_TOLERANCES,
    HilbertConfig,
    Operator,
    Tolerances,
    conjugate,
    make_operator,
    operator_norm,
    random_regular_operator,
    random_unitary,
)

logger = logging.getLogger(__name__)

# Cola de la regresión: K pasos más pequeños, abarcando al menos 2 décadas
FIT_TAIL = 10
FIT_MIN_DECADES = 2.0

# Vecindad local de la cota global: ‖ỹ − y‖ ≤ 0.1·‖y‖
LOCAL_NEIGHBORHOOD = 0.1

MACHINE_EPS = np.finfo(float).eps


# ---------------------------------------------------------------------------
# Polinomios y raíces
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class MonicPolynomial:
    """
    λ^g + c_{g−1}λ^{g−1} + … + c_0.

    ``exact_roots`` se guarda cuando el polinomio se construye a partir de
    sus raíces y da multiplicidades exactas.
    """

    coeffs: np.ndarray
    exact_roots: np.ndarray | None = None

    def __post_init__(self):
        if np.asarray(self.coeffs).size < 1:
            raise ValueError("el grado debe ser ≥ 1")

    @property
    def g(self) -> int:
        return int(np.asarray(self.coeffs).size)

    @classmethod
    def from_roots(cls, roots) -> "MonicPolynomial":
        roots = np.asarray(roots, dtype=complex)
        full = np.poly(roots)
        return cls(coeffs=np.asarray(full[::-1][:-1], dtype=complex), exact_roots=roots)

    def roots(self) -> np.ndarray:
        if self.exact_roots is not None:
            return np.asarray(self.exact_roots, dtype=complex)
        return np.roots(np.concatenate([[1.0], np.asarray(self.coeffs)[::-1]])).astype(complex)

    def perturbed(self, delta) -> "MonicPolynomial":
        return MonicPolynomial(coeffs=np.asarray(self.coeffs, dtype=complex) + np.asarray(delta))

    def rescaled(self, nu: float) -> "MonicPolynomial":
        """Polinomio cuyas raíces son las de self divididas por ν."""
        k = np.arange(self.g)
        coeffs = np.asarray(self.coeffs, dtype=complex) / nu ** (self.g - k)
        exact = None if self.exact_roots is None else np.asarray(self.exact_roots) / nu
        return MonicPolynomial(coeffs=coeffs, exact_roots=exact)

    def distance(self, other: "MonicPolynomial") -> float:
        """‖P − Q‖ como máximo de las diferencias de coeficientes."""
        if self.g != other.g:
            raise DegreeMismatch(f"grados {self.g} y {other.g}")
        return float(np.max(np.abs(np.asarray(self.coeffs) - np.asarray(other.coeffs))))


@dataclass(frozen=True)
class RootMatch:
    roots_P: np.ndarray
    roots_Q: np.ndarray
    pairing: np.ndarray
    deviations: np.ndarray
    multiplicities: np.ndarray
    clusters: np.ndarray


def multiplicity_clusters(roots: np.ndarray, exact: bool = False) -> np.ndarray:
    """
    Etiquetas de cúmulo de raíces múltiples.

    Con ``exact`` se agrupan raíces idénticas. Si no, la tolerancia es
    adaptativa, τ = eps^{1/(p+1)}·max(1, max|λ|): se prueba p desde g hacia
    abajo y se acepta el primer p que coincide con el cúmulo más grande.
    """
    roots = np.asarray(roots, dtype=complex)
    g = roots.size
    if g == 1:
        return np.zeros(1, dtype=int)
    distances = pdist(np.column_stack([roots.real, roots.imag]))
    scale = max(1.0, float(np.max(np.abs(roots))))
    if distances.size == 1:
        # dos raíces: un único umbral, sin jerarquía
        tau = 1e-12 * scale if exact else MACHINE_EPS ** (1.0 / 3.0) * scale
        return np.array([0, 0]) if distances[0] <= tau else np.array([0, 1])
    Z = linkage(distances, method="single")
    if exact:
        return fcluster(Z, t=1e-12 * scale, criterion="distance") - 1
    for p_guess in range(g, 0, -1):
        tau = MACHINE_EPS ** (1.0 / (p_guess + 1)) * scale
        labels = fcluster(Z, t=tau, criterion="distance") - 1
        if np.bincount(labels).max() == p_guess:
            return labels
    return np.arange(g)


def bottleneck_assignment(cost: np.ndarray) -> np.ndarray:
    """
    Biyección que minimiza el costo máximo; entre las óptimas, la de menor
    costo total.

    Returns
    -------
    np.ndarray
        pairing[i] = columna asignada a la fila i.
    """
    values = np.unique(cost)
    lo, hi = 0, values.size - 1
    while lo < hi:
        mid = (lo + hi) // 2
        graph = csr_matrix(cost <= values[mid])
        match = maximum_bipartite_matching(graph, perm_type="column")
        if np.all(match >= 0):
            hi = mid
        else:
            lo = mid + 1
    threshold = values[lo]
    masked = np.where(cost <= threshold, cost, cost.max() * cost.shape[0] + 1.0)
    _, cols = linear_sum_assignment(masked)
    return cols


def match_roots(P: MonicPolynomial, Q: MonicPolynomial) -> RootMatch:
    """
    Empareja las raíces de P y Q minimizando la desviación máxima.

    Raises
    ------
    DegreeMismatch
        Si los grados difieren.
    """
    if P.g != Q.g:
        raise DegreeMismatch(f"grados {P.g} y {Q.g}")
    exact = P.exact_roots is not None
    roots_P = P.roots()
    labels = multiplicity_clusters(roots_P, exact=exact)
    if not exact:
        # raíz múltiple estimada por la media del cúmulo
        roots_P = np.array([roots_P[labels == lab].mean() for lab in labels])
    counts = np.bincount(labels)
    multiplicities = counts[labels]

    roots_Q = Q.roots()
    cost = np.abs(roots_P[:, None] - roots_Q[None, :])
    pairing = bottleneck_assignment(cost)
    deviations = cost[np.arange(P.g), pairing]
    return RootMatch(
        roots_P=roots_P,
        roots_Q=roots_Q,
        pairing=pairing,
        deviations=deviations,
        multiplicities=multiplicities,
        clusters=labels,
    )


@dataclass(frozen=True)
class RootBoundReport:
    holds: bool
    deviations: np.ndarray
    deltas: np.ndarray
    multiplicities: np.ndarray
    separation: float | None
    norm_dp: float
    scale: float

    @property
    def slack(self) -> float:
        """min δ_i / desviación_i (∞ si todas las desviaciones son nulas)."""
        positive = self.deviations > 0
        if not np.any(positive):
            return float("inf")
        return float(np.min(self.deltas[positive] / self.deviations[positive]))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "deviation": self.deviations,
                "delta": self.deltas,
                "multiplicity": self.multiplicities,
            }
        )


def root_bound_check(P: MonicPolynomial, Q: MonicPolynomial) -> RootBoundReport:
    """
    Verifica |λ_i − λ̃_i| ≤ δ_i tras reescalar las raíces de P a la bola
    unitaria.

    Returns
    -------
    RootBoundReport
        ``holds`` es True si toda desviación emparejada es ≤ δ_i. Las
        desviaciones y δ_i se reportan en unidades reescaladas.

    Raises
    ------
    PerturbationTooLarge
        Si algún δ_i ≥ D/2.
    """
    if P.g != Q.g:
        raise DegreeMismatch(f"grados {P.g} y {Q.g}")
    g = P.g
    nu = max(1.0, float(np.max(np.abs(P.roots()))))
    Ps, Qs = P.rescaled(nu), Q.rescaled(nu)
    match = match_roots(Ps, Qs)
    norm_dp = Ps.distance(Qs)

    labels = match.clusters
    representatives = np.array([match.roots_P[labels == lab][0] for lab in np.unique(labels)])
    if representatives.size > 1:
        gaps = np.abs(representatives[:, None] - representatives[None, :])
        separation = float(np.min(gaps[np.triu_indices(representatives.size, k=1)]))
    else:
        separation = None

    p = match.multiplicities.astype(float)
    if separation is None:
        base = g * 2.0 ** (2 * g - p + 1) * norm_dp
    else:
        base = g * 2.0 ** (2 * g - p + 1) / separation ** (g - p) * norm_dp
    deltas = base ** (1.0 / p)

    if separation is not None and np.max(deltas) >= separation / 2:
        raise PerturbationTooLarge(float(np.max(deltas)), separation)

    # holgura de redondeo de la raíz numérica
    holds = bool(np.all(match.deviations <= deltas * (1 + 1e-9) + 64 * MACHINE_EPS))
    return RootBoundReport(
        holds=holds,
        deviations=match.deviations,
        deltas=deltas,
        multiplicities=match.multiplicities,
        separation=separation,
        norm_dp=norm_dp,
        scale=nu,
    )


# ---------------------------------------------------------------------------
# Barridos y ajuste log-log
# ---------------------------------------------------------------------------


@dataclass
class HoelderFit:
    """
    Resultado del ajuste log Δ vs log t.

    ``scan`` es un DataFrame con columnas (t, delta, ratio), ratio = Δ/t^α
    con α el exponente de referencia del teorema.
    """

    exponent_hat: float
    constant_hat: float
    r2: float
    scan: pd.DataFrame
    n_points: int
    reference_exponent: float
    exact_zero: bool = False
    low_confidence: bool = False

    def summary(self) -> dict:
        return {
            "exponent_hat": self.exponent_hat,
            "constant_hat": self.constant_hat,
            "r2": self.r2,
            "n_points": self.n_points,
            "reference_exponent": self.reference_exponent,
            "exact_zero": self.exact_zero,
            "low_confidence": self.low_confidence,
        }


def fit_power_law(
    steps,
    deltas,
    reference_exponent: float,
    tail: int = FIT_TAIL,
    zero_delta: float = DEFAULT_TOLERANCES.zero_delta,
) -> HoelderFit:
    """
    Ajuste por mínimos cuadrados de log Δ = log C + α log t sobre la cola
    asintótica (los ``tail`` pasos más pequeños, ampliada hasta abarcar 2
    décadas si hay pasos disponibles).
    """
    steps = np.asarray(steps, dtype=float)
    deltas = np.asarray(deltas, dtype=float)
    if steps.size == 0 or np.any(steps <= 0) or np.any(np.diff(steps) >= 0):
        raise ValueError("los pasos deben ser positivos y estrictamente decrecientes")
    scan = pd.DataFrame(
        {"t": steps, "delta": deltas, "ratio": deltas / steps**reference_exponent}
    )

    if np.all(deltas < zero_delta):
        logger.info("barrido degenerado: todas las diferencias bajo %.0e", zero_delta)
        return HoelderFit(
            exponent_hat=float("nan"),
            constant_hat=0.0,
            r2=float("nan"),
            scan=scan,
            n_points=0,
            reference_exponent=reference_exponent,
            exact_zero=True,
        )

    start = max(0, steps.size - tail)
    while start > 0 and np.log10(steps[start] / steps[-1]) < FIT_MIN_DECADES:
        start -= 1
    t_tail, d_tail = steps[start:], deltas[start:]
    usable = d_tail >= zero_delta
    t_fit, d_fit = t_tail[usable], d_tail[usable]

    decades = float(np.log10(t_fit[0] / t_fit[-1])) if t_fit.size > 1 else 0.0
    low_confidence = decades < FIT_MIN_DECADES
    if decades < 1.0:
        logger.warning("los pasos abarcan %.2f décadas (< 1): ajuste de baja confianza", decades)
    elif low_confidence:
        logger.warning("la cola del ajuste abarca %.2f décadas (< 2)", decades)

    if t_fit.size < 2:
        return HoelderFit(
            exponent_hat=float("nan"),
            constant_hat=float("nan"),
            r2=float("nan"),
            scan=scan,
            n_points=int(t_fit.size),
            reference_exponent=reference_exponent,
            low_confidence=True,
        )

    result = linregress(np.log(t_fit), np.log(d_fit))
    return HoelderFit(
        exponent_hat=float(result.slope),
        constant_hat=float(np.exp(result.intercept)),
        r2=float(result.rvalue**2),
        scan=scan,
        n_points=int(t_fit.size),
        reference_exponent=reference_exponent,
        low_confidence=low_confidence,
    )


def _scan(
    x: Operator,
    y: Operator,
    direction,
    steps,
    func: Callable[[Operator, Operator], float],
    reference_exponent: float,
    tol: Tolerances,
    max_workers: int | None,
) -> HoelderFit:
    direction = np.asarray(getattr(direction, "mat", direction), dtype=complex)
    steps = np.asarray(steps, dtype=float)
    base_value = func(x, y)

    def delta(t):
        # SignatureViolation se propaga si y + t·direction sale de ℱ
        y_t = make_operator(y.mat + t * direction, y.cfg, tol)
        return abs(func(x, y_t) - base_value)

    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        deltas = list(pool.map(delta, steps))
    return fit_power_law(steps, deltas, reference_exponent, zero_delta=tol.zero_delta)


def hoelder_scan_L(
    x: Operator,
    y: Operator,
    direction,
    steps,
    tol: Tolerances = DEFAULT_TOLERANCES,
    max_workers: int | None = None,
) -> HoelderFit:
    """
    Δℒ(t) = |ℒ(x, y + t·direction) − ℒ(x, y)| y ajuste del exponente.

    El exponente de referencia es 1/(2n − 1).

    Raises
    ------
    SignatureViolation
        Si algún punto perturbado sale de ℱ.
    """
    n = x.cfg.n
    return _scan(x, y, direction, steps, lagrangian, 1.0 / (2 * n - 1), tol, max_workers)


def hoelder_scan_boundedness(
    x: Operator,
    y: Operator,
    direction,
    steps,
    tol: Tolerances = DEFAULT_TOLERANCES,
    max_workers: int | None = None,
) -> HoelderFit:
    """Mismo barrido sobre ||xy|² − |xỹ|²|, exponente de referencia 1/(2n)."""
    n = x.cfg.n
    return _scan(x, y, direction, steps, boundedness_integrand, 1.0 / (2 * n), tol, max_workers)


# ---------------------------------------------------------------------------
# Cotas globales
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GlobalBoundReport:
    ratio: float
    alpha: float
    delta_L: float
    norm_x: float
    norm_y: float
    step_norm: float
    branch: str
    within_neighborhood: bool


def global_bound_check(x: Operator, y: Operator, y_tilde: Operator) -> GlobalBoundReport:
    """
    Razón |Δℒ| / (‖y‖^{2−α}‖x‖²‖ỹ − y‖^α) con α = 1/(2n − 1).

    La razón es invariante bajo x → ax, y → by, ỹ → bỹ y bajo
    conjugación unitaria conjunta. Si y = 0 se usa la rama
    |ℒ(x, ỹ)| ≤ c(n)‖x‖²‖ỹ‖² y la razón reportada es ℒ(x,ỹ)/(‖x‖²‖ỹ‖²).
    """
    n = x.cfg.n
    alpha = 1.0 / (2 * n - 1)
    norm_x, norm_y = x.norm, y.norm
    step = operator_norm(y_tilde.mat - y.mat)

    if norm_y == 0.0:
        value = lagrangian(x, y_tilde)
        denominator = norm_x**2 * y_tilde.norm**2
        ratio = value / denominator if denominator > 0 else 0.0
        return GlobalBoundReport(ratio, alpha, value, norm_x, norm_y, step, "y_zero", True)

    within = step <= LOCAL_NEIGHBORHOOD * norm_y * (1 + 1e-12)
    if not within:
        logger.warning("ỹ fuera de la vecindad local: ‖ỹ − y‖ = %.3e > 0.1‖y‖", step)
    delta_L = abs(lagrangian(x, y_tilde) - lagrangian(x, y))
    denominator = norm_y ** (2 - alpha) * norm_x**2 * step**alpha
    ratio = delta_L / denominator if denominator > 0 else 0.0
    return GlobalBoundReport(ratio, alpha, delta_L, norm_x, norm_y, step, "local", within)


def symmetric_bound_check(x: Operator, x_tilde: Operator, y: Operator) -> GlobalBoundReport:
    """Versión con el primer argumento perturbado, por simetría de ℒ."""
    return global_bound_check(y, x, x_tilde)


@dataclass(frozen=True)
class RefinedBoundReport:
    delta_L: float
    coarse_rhs: float
    refined_rhs: float
    projected_norm: float
    identity_residual: float

    @property
    def refined_ratio(self) -> float:
        return self.delta_L / self.refined_rhs if self.refined_rhs > 0 else 0.0

    @property
    def coarse_ratio(self) -> float:
        return self.delta_L / self.coarse_rhs if self.coarse_rhs > 0 else 0.0


def _range_columns(op: Operator) -> np.ndarray:
    return op.eigenvectors[:, np.abs(op.eigenvalues) > op.rank_cutoff]


def refined_bound_check(x: Operator, x_tilde: Operator, y: Operator) -> RefinedBoundReport:
    """
    Cota refinada con ‖π_J y π_J‖² en lugar de ‖y‖², J = span(S_x, S_x̃).

    También reporta |ℒ(x,y) − ℒ(x, π_J y π_J)| + |ℒ(x̃,y) − ℒ(x̃, π_J y π_J)|,
    que debe anularse porque los espectros coinciden.
    """
    n = x.cfg.n
    alpha = 1.0 / (2 * n - 1)
    stacked = np.hstack([_range_columns(x), _range_columns(x_tilde)])
    basis = linalg.orth(stacked) if stacked.shape[1] else stacked
    pi_J = basis @ basis.conj().T
    y_J = make_operator(pi_J @ y.mat @ pi_J, y.cfg)

    delta_L = abs(lagrangian(x, y) - lagrangian(x_tilde, y))
    step = operator_norm(x_tilde.mat - x.mat)
    common = x.norm ** (2 - alpha) * step**alpha
    identity = abs(lagrangian(x, y) - lagrangian(x, y_J)) + abs(
        lagrangian(x_tilde, y) - lagrangian(x_tilde, y_J)
    )
    return RefinedBoundReport(
        delta_L=delta_L,
        coarse_rhs=common * y.norm**2,
        refined_rhs=common * y_J.norm**2,
        projected_norm=y_J.norm,
        identity_residual=identity,
    )


def random_admissible_direction(y: Operator, rng: np.random.Generator) -> np.ndarray:
    """
    Incremento hermítico de norma 1 soportado en S_y; y + t·D permanece en
    ℱ para t pequeño.
    """
    B = _range_columns(y)
    g = B.shape[1]
    if g == 0:
        return np.zeros_like(y.mat)
    H = rng.standard_normal((g, g)) + 1j * rng.standard_normal((g, g))
    H = 0.5 * (H + H.conj().T)
    D = B @ H @ B.conj().T
    return D / operator_norm(D)


def estimate_hoelder_constant(
    cfg: HilbertConfig, rng: np.random.Generator, trials: int, relative_step: float = 0.05
) -> pd.DataFrame:
    """
    Estimación empírica de c(n): razones de ``global_bound_check`` sobre
    sorteos aleatorios (sin pretensión de optimalidad).

    Returns
    -------
    pd.DataFrame
        Columnas (trial, ratio, delta_L, step_norm).
    """
    rows = []
    for trial in range(trials):
        x = random_regular_operator(cfg, rng)
        y = random_regular_operator(cfg, rng)
        D = random_admissible_direction(y, rng)
        t = relative_step * y.norm * rng.uniform(0.01, 1.0)
        y_tilde = make_operator(y.mat + t * D, cfg)
        report = global_bound_check(x, y, y_tilde)
        rows.append((trial, report.ratio, report.delta_L, report.step_norm))
    return pd.DataFrame(rows, columns=["trial", "ratio", "delta_L", "step_norm"])


# ---------------------------------------------------------------------------
# Familias degeneradas construidas
# ---------------------------------------------------------------------------


def _sip(k: int) -> np.ndarray:
    # matriz antidiagonal de unos
    return np.fliplr(np.eye(k))


def _shift(k: int) -> np.ndarray:
    return np.eye(k, k, 1)


def _embed(block: np.ndarray, d: int) -> np.ndarray:
    out = np.zeros((d, d), dtype=complex)
    k = block.shape[0]
    out[:k, :k] = block
    return out


def _twist(mats, rng):
    if rng is None:
        return mats
    U = random_unitary(mats[0].shape[0], rng)
    return [U @ m @ U.conj().T for m in mats]


def degenerate_lagrangian_pair(
    cfg: HilbertConfig, rng: np.random.Generator | None = None
) -> tuple[Operator, Operator, np.ndarray]:
    """
    Par (x, y) con xy|_{S_x} = J_{2n−1} ⊕ 1: un autovalor 0 de multiplicidad
    2n − 1 en un bloque de Jordan y uno simple igual a 1.

    La dirección devuelta abre el bloque como raíces t^{1/(2n−1)}, de modo
    que Δℒ ∼ t^{1/(2n−1)}. Con ``rng`` se aplica una conjugación unitaria
    conjunta aleatoria.
    """
    k = 2 * cfg.n - 1
    G = _sip(k)
    x_block = linalg.block_diag(G, [[-1.0]])
    y_block = linalg.block_diag(G @ _shift(k), [[-1.0]])
    direction = np.zeros((k + 1, k + 1))
    direction[0, 0] = 1.0
    x_mat, y_mat, d_mat = _twist(
        [_embed(x_block, cfg.d), _embed(y_block, cfg.d), _embed(direction, cfg.d)], rng
    )
    return make_operator(x_mat, cfg), make_operator(y_mat, cfg), d_mat


def maximal_degeneracy_pair(
    cfg: HilbertConfig, rng: np.random.Generator | None = None
) -> tuple[Operator, Operator, np.ndarray]:
    """
    Par con xy|_{S_x} = J_{2n}: g = 2n autovalores nulos en un solo bloque.

    Bajo la dirección devuelta los 2n autovalores tienen el mismo módulo
    t^{1/(2n)}, así que ℒ ≡ 0 y |xy|² ∼ t^{1/n}.
    """
    k = 2 * cfg.n
    G = _sip(k)
    direction = np.zeros((k, k))
    direction[0, 0] = -1.0
    x_mat, y_mat, d_mat = _twist(
        [_embed(G, cfg.d), _embed(G @ _shift(k), cfg.d), _embed(direction, cfg.d)], rng
    )
    return make_operator(x_mat, cfg), make_operator(y_mat, cfg), d_mat


def simple_spectrum_pair(
    cfg: HilbertConfig,
    rng: np.random.Generator,
    scale: tuple[float, float] = (0.5, 2.0),
    twist: float = 0.05,
    min_gap: float = 0.1,
    max_attempts: int = 100,
) -> tuple[Operator, Operator]:
    """
    Par (x, y) con espectro de xy real, simple y de módulos separados.

    x e y se construyen diagonales en una base común de Haar con la misma
    firma, así que xy tiene autovalores a_i·b_i > 0. Después y se conjuga
    con exp(i·twist·K), K hermítica de norma 1, para salir de la base común.
    Los autovalores reales simples siguen siendo reales porque el espectro
    de xy es invariante por conjugación compleja. En estos pares ℒ es suave
    y estrictamente positivo.

    Raises
    ------
    RuntimeError
        Si tras ``max_attempts`` sorteos ningún par cumple la separación
        relativa ``min_gap`` entre módulos.
    """
    m = cfg.max_rank
    signs = np.concatenate([np.ones(cfg.n), -np.ones(cfg.n)])
    for _ in range(max_attempts):
        U = random_unitary(cfg.d, rng)[:, :m]
        a = rng.uniform(scale[0], scale[1], size=m)
        b = rng.uniform(scale[0], scale[1], size=m)
        K = rng.standard_normal((cfg.d, cfg.d)) + 1j * rng.standard_normal((cfg.d, cfg.d))
        K = (K + K.conj().T) / 2
        rotation = linalg.expm(1j * twist * K / operator_norm(K))
        x = make_operator(U @ np.diag(signs * a) @ U.conj().T, cfg)
        y = conjugate(make_operator(U @ np.diag(signs * b) @ U.conj().T, cfg), rotation)

        lambdas = xy_spectrum(x, y).nonzero
        moduli = np.abs(lambdas)
        if lambdas.size < m or np.max(np.abs(lambdas.imag)) > 1e-8 * moduli[0]:
            continue
        if np.min(-np.diff(moduli)) < min_gap * moduli[0]:
            continue
        return x, y
    raise RuntimeError(f"sin par de espectro simple tras {max_attempts} intentos")
