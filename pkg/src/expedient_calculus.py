"""
Cálculo diferencial sobre subespacios dados por el usuario.

Las funciones no suaves (como ℒ) solo son diferenciables a lo largo de
ciertos subespacios finitos H de direcciones de carta. Aquí H lo entrega
quien llama; el subespacio expedito abstracto no se construye. Los
veredictos de diferenciabilidad son heurísticos: se basan en la
convergencia de cocientes de diferencias al refinar el paso.

Sobre las curvas, el subespacio E₀ de la definición de continuidad de
Hölder a lo largo de una curva se toma como el generado por las derivadas
suministradas de la curva.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.stats import linregress

from exceptions import AnchorMismatch, InsufficientTangents, NonDifferentiableDirection, UnsupportedOrder
from finite_differences import (
    curve_derivative,
    curve_derivative_richardson,
    mixed_partial,
    one_sided_gap,
    richardson,
)
from kernel_lagrangian import kernel_pair, lagrangian
from operator_core import (
    DEFAULT_TOLERANCES,
    Operator,
    Tolerances,
    is_regular,
    make_operator,
    operator_norm,
    same_point,
    spin_frame,
)
from wave_charts import TangentVector, chart_origin, forward_matrix, make_tangent

logger = logging.getLogger(__name__)

# Paso inicial de las derivadas mixtas según el orden
DERIVATIVE_STEPS = {1: 1e-3, 2: 5e-3, 3: 2e-2}

# Pasos del barrido para la regla de la cadena
CHAIN_STEPS = (1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 3e-5, 1e-5)

# Factor de decaimiento mínimo de la brecha lateral entre h y h/4 para C¹
GAP_DECAY = 0.75

MAX_FAA_DI_BRUNO_ORDER = 3


@dataclass(frozen=True, eq=False)
class SubspaceBasis:
    """
    Base de un subespacio finito H ⊆ V_anchor en coordenadas de carta.

    Raises
    ------
    ValueError
        Si los vectores no son linealmente independientes (determinante de
        Gram normalizado ≤ τ_indep).
    """

    anchor: Operator | None
    vectors: tuple
    tol: Tolerances = field(default=DEFAULT_TOLERANCES, repr=False)

    def __post_init__(self):
        vectors = [np.asarray(v) for v in self.vectors]
        if not vectors:
            raise ValueError("el subespacio necesita al menos un vector")
        flat = np.array([np.concatenate([v.real.ravel(), v.imag.ravel()]) for v in vectors])
        norms = np.linalg.norm(flat, axis=1)
        if np.any(norms == 0):
            raise ValueError("vector nulo en la base del subespacio")
        unit = flat / norms[:, None]
        gram = float(np.linalg.det(unit @ unit.T))
        if gram <= self.tol.indep:
            raise ValueError(f"vectores linealmente dependientes (Gram = {gram:.3e})")
        object.__setattr__(self, "vectors", tuple(vectors))

    @property
    def dim(self) -> int:
        return len(self.vectors)

    def contains(self, direction: np.ndarray, rtol: float = 1e-8) -> bool:
        flat = np.array([np.concatenate([v.real.ravel(), v.imag.ravel()]) for v in self.vectors]).T
        target = np.concatenate([direction.real.ravel(), direction.imag.ravel()])
        coeffs, *_ = np.linalg.lstsq(flat, target, rcond=None)
        residual = np.linalg.norm(flat @ coeffs - target)
        return bool(residual <= rtol * max(1.0, np.linalg.norm(target)))


def _noise_floor(value: float, h: float, order: int) -> float:
    return 1e3 * np.finfo(float).eps * (1.0 + abs(value)) / h**order


def subspace_derivative(
    f: Callable[[np.ndarray], float],
    H: SubspaceBasis,
    order: int,
    directions: list[np.ndarray],
    base: np.ndarray | None = None,
    h: float | None = None,
) -> float:
    """
    ∂^k/∂α_1…∂α_k f(x₀ + Σ α_i h_i) en α = 0.

    Parameters
    ----------
    f : callable
        Función real de coordenadas de carta.
    H : SubspaceBasis
        Subespacio que contiene las direcciones.
    order : int
        k, igual a ``len(directions)``.
    directions : list of np.ndarray
    base : np.ndarray, optional
        x₀; por defecto el origen (id, 0) de la carta del ancla.
    h : float, optional
        Paso inicial; se refina a h/2 y h/4.

    Returns
    -------
    float
        Extrapolación de Richardson de los esténciles centrales.

    Raises
    ------
    NonDifferentiableDirection
        Si la sucesión de cocientes no es de Cauchy al refinar el paso, o
        (para k = 1) si los cocientes laterales no se acercan.
    """
    if len(directions) != order:
        raise ValueError(f"se esperaban {order} direcciones, recibidas {len(directions)}")
    for direction in directions:
        if not H.contains(direction):
            raise ValueError("dirección fuera del subespacio H")
    if base is None:
        if H.anchor is None:
            raise ValueError("sin ancla hay que indicar el punto base")
        base = chart_origin(H.anchor).psi
    if order == 0:
        return float(f(base))
    if all(np.linalg.norm(d) == 0 for d in directions):
        return 0.0
    h = DERIVATIVE_STEPS.get(order, 2e-2) if h is None else h

    values = [float(mixed_partial(f, base, directions, h / 2**j)) for j in range(3)]
    floor = _noise_floor(float(f(base)), h / 4, order)
    first_gap = abs(values[1] - values[0])
    second_gap = abs(values[2] - values[1])
    if second_gap > max(GAP_DECAY * first_gap, floor):
        raise NonDifferentiableDirection(
            f"cocientes de orden {order} sin convergencia: {values}"
        )
    if order == 1:
        gaps = [one_sided_gap(f, base, directions[0], h / 2**j) for j in (0, 2)]
        if gaps[1] > max(GAP_DECAY * gaps[0], _noise_floor(float(f(base)), h / 4, 1)):
            raise NonDifferentiableDirection(
                f"cocientes laterales no convergen: brecha {gaps[1]:.3e}"
            )
    return float(richardson(values[1], values[2]))


@dataclass
class ProbeEntry:
    indices: tuple[int, ...]
    steps: list[float]
    values: list[float]
    one_sided_gaps: list[float]
    converged: bool


@dataclass
class ProbeReport:
    """Diagnóstico heurístico de diferenciabilidad a lo largo de H."""

    order: int
    entries: list[ProbeEntry]
    heuristic: bool = True

    @property
    def passed(self) -> bool:
        return all(e.converged for e in self.entries)

    def failures(self) -> list[ProbeEntry]:
        return [e for e in self.entries if not e.converged]

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "passed": self.passed,
            "heuristic": self.heuristic,
            "entries": [
                {
                    "indices": list(e.indices),
                    "steps": e.steps,
                    "values": e.values,
                    "one_sided_gaps": e.one_sided_gaps,
                    "converged": e.converged,
                }
                for e in self.entries
            ],
        }


def admissibility_probe(
    f: Callable[[np.ndarray], float],
    H: SubspaceBasis,
    order: int,
    base: np.ndarray | None = None,
    n_steps: int = 5,
) -> ProbeReport:
    """
    Sondea todas las parciales mixtas hasta orden k sobre una malla de pasos.

    El veredicto es heurístico: la continuidad de derivadas en un punto no
    es decidible con finitas muestras. Una parcial converge si las
    diferencias sucesivas de sus cocientes decrecen (o quedan bajo el piso de
    ruido) y, en orden 1, si la brecha entre cocientes laterales decrece.
    """
    if base is None:
        base = chart_origin(H.anchor).psi
    f0 = float(f(base))
    entries = []
    for k in range(1, order + 1):
        h0 = DERIVATIVE_STEPS.get(k, 2e-2)
        steps = [h0 / 2**j for j in range(n_steps)]
        for indices in itertools.combinations_with_replacement(range(H.dim), k):
            directions = [H.vectors[i] for i in indices]
            values = [float(mixed_partial(f, base, directions, h)) for h in steps]
            diffs = np.abs(np.diff(values))
            floor = _noise_floor(f0, steps[-1], k)
            converged = bool(diffs[-1] <= max(GAP_DECAY * diffs[0], floor))
            gaps = []
            if k == 1:
                gaps = [one_sided_gap(f, base, directions[0], h) for h in steps]
                converged = converged and gaps[-1] <= max(GAP_DECAY * gaps[0], _noise_floor(f0, steps[-1], 1))
            entries.append(ProbeEntry(tuple(indices), steps, values, gaps, converged))
    report = ProbeReport(order=order, entries=entries)
    if not report.passed:
        logger.info("sonda de admisibilidad: %d parciales sin converger", len(report.failures()))
    return report


# ---------------------------------------------------------------------------
# Curvas y reglas de la cadena
# ---------------------------------------------------------------------------


@dataclass(eq=False)
class SmoothCurve:
    """
    Curva suave t ↦ γ(t) ∈ ℱ^reg con derivadas en t0 en la carta de γ(t0).

    ``chart_path`` da las coordenadas de carta de la curva cuando se conocen
    (curvas polinomiales en la carta); si falta, se obtienen de
    ``evaluator`` con φ_{γ(t0)}.
    """

    evaluator: Callable[[float], Operator]
    t0: float
    derivatives: list[np.ndarray] = field(default_factory=list)
    chart_path: Callable[[float], np.ndarray] | None = None
    anchor: Operator | None = None

    def __post_init__(self):
        if self.anchor is None:
            self.anchor = self.evaluator(self.t0)
        if not is_regular(self.anchor):
            raise ValueError("γ(t0) debe ser regular")

    @classmethod
    def from_chart_polynomial(
        cls, anchor: Operator, coefficients: list[np.ndarray], t0: float = 0.0
    ) -> "SmoothCurve":
        """
        γ(t) = R_x(ψ₀ + Σ_k c_k (t − t0)^k / k!), con derivadas exactas c_k.

        Es la aproximación polinomial γ_p de una curva con las derivadas
        dadas en t0.
        """
        frame = spin_frame(anchor)
        psi0 = chart_origin(anchor).psi
        coefficients = [np.asarray(c, dtype=complex) for c in coefficients]

        def path(t):
            s = t - t0
            out = psi0.copy()
            for k, c in enumerate(coefficients, start=1):
                out = out + c * s**k / math.factorial(k)
            return out

        def evaluator(t):
            return make_operator(forward_matrix(frame, path(t)), anchor.cfg)

        return cls(
            evaluator=evaluator,
            t0=t0,
            derivatives=list(coefficients),
            chart_path=path,
            anchor=anchor,
        )

    def coordinates(self, t: float) -> np.ndarray:
        if self.chart_path is not None:
            return self.chart_path(t)
        from wave_charts import chart_inverse

        return chart_inverse(self.anchor, self.evaluator(t)).psi

    def compute_derivatives(self, p: int, h: float = 1e-2) -> list[np.ndarray]:
        """γ^{(1..p)}(t0) por diferencias centrales de alto orden."""
        return [
            curve_derivative_richardson(self.coordinates, self.t0, k, h) for k in range(1, p + 1)
        ]

    def check_derivatives(self, rtol: float = 1e-4) -> bool:
        """Compara las derivadas guardadas con su recálculo numérico."""
        if not self.derivatives:
            return True
        numeric = self.compute_derivatives(len(self.derivatives))
        for cached, fresh in zip(self.derivatives, numeric):
            scale = max(1.0, float(np.linalg.norm(cached)))
            if np.linalg.norm(cached - fresh) > rtol * scale:
                return False
        return True


def product_curve(first: SmoothCurve, second: SmoothCurve) -> SmoothCurve:
    """
    Curva en el producto de cartas: coordenadas apiladas (ψ₁; ψ₂).

    El evaluador devuelve el primer factor; para funciones de dos puntos se
    usa ``lagrangian_in_charts`` sobre las coordenadas apiladas.
    """
    count = min(len(first.derivatives), len(second.derivatives))
    derivatives = [
        np.vstack([first.derivatives[k], second.derivatives[k]]) for k in range(count)
    ]
    return SmoothCurve(
        evaluator=first.evaluator,
        t0=first.t0,
        derivatives=derivatives,
        chart_path=lambda t: np.vstack([first.coordinates(t), second.coordinates(t)]),
        anchor=first.anchor,
    )


def lagrangian_in_charts(x: Operator, y: Operator) -> Callable[[np.ndarray], float]:
    """
    f(ψ₁; ψ₂) = ℒ(R_x(ψ₁), R_y(ψ₂)) sobre coordenadas apiladas 4n×d.
    """
    fx, fy = spin_frame(x), spin_frame(y)
    m = x.cfg.max_rank

    def f(coords: np.ndarray) -> float:
        a = make_operator(forward_matrix(fx, coords[:m]), x.cfg)
        b = make_operator(forward_matrix(fy, coords[m:]), y.cfg)
        return lagrangian(a, b)

    return f


@dataclass
class ChainRuleReport:
    residual_abs: float
    residual_rel: float
    decay_order: float | None
    steps: list[float]
    residuals: list[float]
    lhs: list[float]
    rhs: float
    required_tangents: int
    at_noise_floor: bool
    passed: bool

    def to_dict(self) -> dict:
        return {
            "residual_abs": self.residual_abs,
            "residual_rel": self.residual_rel,
            "decay_order": self.decay_order,
            "steps": self.steps,
            "residuals": self.residuals,
            "rhs": self.rhs,
            "required_tangents": self.required_tangents,
            "at_noise_floor": self.at_noise_floor,
            "passed": self.passed,
        }


def _decay_report(steps, lhs_values, rhs, floor_of, required, rtol) -> ChainRuleReport:
    residuals = [abs(v - rhs) for v in lhs_values]
    scale = max(1.0, abs(rhs))
    floors = [floor_of(h) for h in steps]
    above = [(h, r) for h, r, fl in zip(steps, residuals, floors) if r > fl]
    decay = None
    if len(above) >= 3:
        fit = linregress(np.log([h for h, _ in above]), np.log([r for _, r in above]))
        decay = float(fit.slope)
    at_floor = len(above) < len(steps)
    # el mejor residuo se toma en el paso más pequeño sobre el piso de ruido
    best = min(residuals)
    passed = best <= rtol * scale or (decay is not None and decay >= 1.0)
    return ChainRuleReport(
        residual_abs=best,
        residual_rel=best / scale,
        decay_order=decay,
        steps=list(steps),
        residuals=residuals,
        lhs=list(lhs_values),
        rhs=float(rhs),
        required_tangents=required,
        at_noise_floor=at_floor,
        passed=passed,
    )


def required_tangents(alpha: float, q: int = 1) -> int:
    """p = ⌈q/α⌉."""
    if not 0 < alpha <= 1:
        raise ValueError(f"exponente de Hölder fuera de (0, 1]: {alpha}")
    return math.ceil(q / alpha - 1e-12)


def chain_rule_check(
    f: Callable[[np.ndarray], float],
    gamma: SmoothCurve,
    alpha: float,
    steps=CHAIN_STEPS,
    rtol: float = 1e-5,
) -> ChainRuleReport:
    """
    (f∘γ)'(t0) por diferencias centrales frente a D f|_{x0} γ'(t0) sobre
    H = span(γ', …, γ^{(p)}), p = ⌈1/α⌉.

    Raises
    ------
    InsufficientTangents
        Si se entregan menos de p derivadas.
    """
    p = required_tangents(alpha)
    if len(gamma.derivatives) < p:
        raise InsufficientTangents(len(gamma.derivatives), p)

    base = gamma.coordinates(gamma.t0)
    composite = lambda t: float(f(gamma.coordinates(t)))  # noqa: E731
    lhs_values = [float(curve_derivative(composite, gamma.t0, 1, 2 * h)) for h in steps]

    tangent = gamma.derivatives[0]
    if np.linalg.norm(tangent) == 0:
        rhs = 0.0
    else:
        H = _span(gamma)
        rhs = subspace_derivative(f, H, 1, [tangent], base=base)
    f0 = composite(gamma.t0)
    return _decay_report(
        steps, lhs_values, rhs, lambda h: _noise_floor(f0, h, 1), p, rtol
    )


def _span(gamma: SmoothCurve) -> SubspaceBasis:
    # E₀ = span de las derivadas no nulas e independientes de la curva
    chosen = []
    for d in gamma.derivatives:
        if np.linalg.norm(d) == 0:
            continue
        try:
            SubspaceBasis(gamma.anchor, tuple(chosen + [d]))
        except ValueError:
            continue
        chosen.append(d)
    return SubspaceBasis(gamma.anchor, tuple(chosen))


def _faa_di_bruno(f, H, base, derivatives, q) -> float:
    def D(*dirs):
        if all(np.linalg.norm(d) == 0 for d in dirs):
            return 0.0
        return subspace_derivative(f, H, len(dirs), list(dirs), base=base)

    g1 = derivatives[0]
    if q == 1:
        return D(g1)
    g2 = derivatives[1]
    if q == 2:
        return D(g1, g1) + D(g2)
    g3 = derivatives[2]
    return D(g1, g1, g1) + 3.0 * D(g2, g1) + D(g3)


def higher_chain_rule_check(
    f: Callable[[np.ndarray], float],
    gamma: SmoothCurve,
    alpha: float,
    q: int,
    steps=CHAIN_STEPS[:5],
    rtol: float = 1e-4,
) -> ChainRuleReport:
    """
    Derivada de orden q de f∘γ frente a la combinación de Faà di Bruno:

        q = 2:  f''(γ',γ') + f'(γ'')
        q = 3:  f'''(γ',γ',γ') + 3 f''(γ'',γ') + f'(γ''')

    con p = ⌈q/α⌉ derivadas requeridas.

    Raises
    ------
    UnsupportedOrder
        Si q > 3.
    InsufficientTangents
        Si se entregan menos de p derivadas.
    """
    if q < 1 or q > MAX_FAA_DI_BRUNO_ORDER:
        raise UnsupportedOrder(f"Faà di Bruno implementado hasta orden 3, pedido {q}")
    p = required_tangents(alpha, q)
    if len(gamma.derivatives) < p:
        raise InsufficientTangents(len(gamma.derivatives), p)

    base = gamma.coordinates(gamma.t0)
    composite = lambda t: float(f(gamma.coordinates(t)))  # noqa: E731
    lhs_values = [
        float(curve_derivative_richardson(composite, gamma.t0, q, 2 * h)) for h in steps
    ]
    if all(np.linalg.norm(d) == 0 for d in gamma.derivatives[:q]):
        rhs = 0.0
    else:
        rhs = _faa_di_bruno(f, _span(gamma), base, gamma.derivatives, q)
    f0 = composite(gamma.t0)
    return _decay_report(steps, lhs_values, rhs, lambda h: _noise_floor(f0, h, q), p, rtol)


# ---------------------------------------------------------------------------
# Jets y la función ℓ
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Jet:
    """Jet 𝔲 = (a, u): valor de campo escalar y vector tangente."""

    a: float
    u: TangentVector

    def __add__(self, other: "Jet") -> "Jet":
        return Jet(self.a + other.a, self.u + other.u)


def ell_in_chart(x: Operator, rho, s: float) -> Callable[[np.ndarray], float]:
    """ψ ↦ ℓ(R_x(ψ)) = Σ_i c_i ℒ(R_x(ψ), y_i) − s."""
    frame = spin_frame(x)

    def f(coords: np.ndarray) -> float:
        z = make_operator(forward_matrix(frame, coords), x.cfg)
        return sum(c * lagrangian(z, y) for y, c in zip(rho.points, rho.weights)) - s

    return f


def jet_derivative_ell(jet: Jet, x: Operator, rho, s: float) -> float:
    """
    ∇_𝔲 ℓ(x) = a·ℓ(x) + (D_u ℓ)(x).

    Raises
    ------
    AnchorMismatch
        Si el vector del jet no está anclado en x.
    NonDifferentiableDirection
        Si ℓ no es diferenciable a lo largo de u.
    """
    u = jet.u
    if not same_point(u.base, x):
        raise AnchorMismatch("el jet debe estar anclado en x")
    f = ell_in_chart(x, rho, s)
    base = chart_origin(x).psi
    value = f(base)
    if np.linalg.norm(u.v) == 0:
        return jet.a * value
    H = SubspaceBasis(x, (u.v,))
    return jet.a * value + subspace_derivative(f, H, 1, [u.v], base=base)


def ell_curve_condition(gamma: SmoothCurve, rho, taus) -> float:
    """
    max_τ Σ_i c_i ‖P(γ(τ), y_i)‖⁴ ‖Y_i⁻¹‖² (normas de operador).

    Raises
    ------
    SingularPoint
        Si algún y_i no es regular.
    """
    if not rho.points:
        return 0.0
    inverse_norms = [operator_norm(spin_frame(y).X_inv) for y in rho.points]
    best = 0.0
    for tau in taus:
        z = gamma.evaluator(tau)
        total = 0.0
        for y, c, inv_norm in zip(rho.points, rho.weights, inverse_norms):
            P = kernel_pair(z, y).P_xy
            total += c * operator_norm(P) ** 4 * inv_norm**2
        best = max(best, total)
    return float(best)


def tangent_jet(x: Operator, v: np.ndarray, a: float = 0.0) -> Jet:
    """Jet (a, v) con v validado en V_x."""
    return Jet(a=a, u=make_tangent(x, v))
