"""
Cartas de onda simétricas sobre ℱ^reg.

Coordenadas: ψ es una matriz 2n×d en los marcos del ancla x, con bloques
ψ_I (2n×2n, simétrico de espín) y ψ_J (2n×(d−2n)). El origen de la carta
es ψ₀ = (id, 0), que corresponde a π_x.

    R_x(ψ)  = ψ† X ψ                       (levantado a d×d con el marco)
    φ_x(y)  = (X⁻¹ π_x y|_{S_x})^{−1/2} X⁻¹ π_x y

Las raíces cuadradas se evalúan con la serie binomial dentro de la bola
‖id − A‖ < 1/2.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.special import binom

from exceptions import AnchorMismatch, OutsideChartDomain, OutsideConvergenceRadius, SingularPoint
from finite_differences import default_step, directional_derivative
from operator_core import (
    DEFAULT_TOLERANCES,
    Operator,
    SpinSpaceFrame,
    Tolerances,
    is_regular,
    make_operator,
    operator_norm,
    same_point,
    spin_adjoint,
    spin_frame,
)

logger = logging.getLogger(__name__)

# Radio del dominio explícito de la carta y de la serie binomial
DOMAIN_RADIUS = 0.5


@dataclass(frozen=True, eq=False)
class WaveChartPoint:
    """Punto (ψ_I, ψ_J) de la carta simétrica anclada en ``anchor``."""

    anchor: Operator
    psi: np.ndarray

    def __post_init__(self):
        cfg = self.anchor.cfg
        if self.psi.shape != (cfg.max_rank, cfg.d):
            raise ValueError(
                f"ψ debe ser {cfg.max_rank}×{cfg.d}, recibido {self.psi.shape}"
            )

    @property
    def psi_I(self) -> np.ndarray:
        return self.psi[:, : self.anchor.cfg.max_rank]

    @property
    def psi_J(self) -> np.ndarray:
        return self.psi[:, self.anchor.cfg.max_rank :]


@dataclass(frozen=True, eq=False)
class TangentVector:
    """
    Dato tangente [base, v, ancla]: v son coordenadas en la carta del ancla,
    evaluadas en las coordenadas de ``base``.
    """

    base: Operator
    v: np.ndarray
    anchor: Operator

    def __post_init__(self):
        cfg = self.anchor.cfg
        if self.v.shape != (cfg.max_rank, cfg.d):
            raise ValueError(f"v debe ser {cfg.max_rank}×{cfg.d}, recibido {self.v.shape}")

    def scaled(self, a: float) -> "TangentVector":
        return TangentVector(self.base, a * self.v, self.anchor)

    def __add__(self, other: "TangentVector") -> "TangentVector":
        if not (same_point(self.base, other.base) and same_point(self.anchor, other.anchor)):
            raise AnchorMismatch("solo se suman vectores con la misma base y ancla")
        return TangentVector(self.base, self.v + other.v, self.anchor)


def chart_origin(x: Operator) -> WaveChartPoint:
    """ψ₀ = (id_{S_x}, 0)."""
    cfg = x.cfg
    psi = np.zeros((cfg.max_rank, cfg.d), dtype=complex)
    psi[:, : cfg.max_rank] = np.eye(cfg.max_rank)
    return WaveChartPoint(anchor=x, psi=psi)


def is_spin_symmetric(p: WaveChartPoint, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
    frame = spin_frame(p.anchor)
    return bool(operator_norm(spin_adjoint(p.psi_I, frame) - p.psi_I) <= tol.symm)


def forward_matrix(frame: SpinSpaceFrame, psi: np.ndarray) -> np.ndarray:
    """ψ† X ψ como matriz d×d en la base original."""
    Rf = psi.conj().T @ frame.X @ psi
    R = frame.from_frame(Rf)
    return 0.5 * (R + R.conj().T)


def chart_forward(p: WaveChartPoint, tol: Tolerances = DEFAULT_TOLERANCES) -> Operator:
    """
    R_x(ψ) = ψ† X ψ.

    Returns
    -------
    Operator
        Autoadjunto con firma ≤ (n, n).
    """
    frame = spin_frame(p.anchor)
    return make_operator(forward_matrix(frame, p.psi), p.anchor.cfg, tol)


def series_sqrt(A: np.ndarray, inverse: bool = False, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """
    A^{1/2} o A^{−1/2} por la serie binomial Σ (−1)^k C(±1/2, k)(id − A)^k.

    Parameters
    ----------
    A : np.ndarray
        Matriz cuadrada con ‖id − A‖ < 1/2.
    inverse : bool
        Si True devuelve A^{−1/2}.

    Raises
    ------
    OutsideConvergenceRadius
        Si ‖id − A‖ ≥ 1/2.

    Notes
    -----
    Los términos decrecen al menos por un factor ‖id − A‖ < 1/2, así que la
    serie se trunca con ≤ 45 términos para τ_series = 1e−13.
    """
    A = np.asarray(A, dtype=complex)
    identity = np.eye(A.shape[0], dtype=complex)
    E = identity - A
    distance = operator_norm(E)
    if distance >= DOMAIN_RADIUS:
        raise OutsideConvergenceRadius(distance)

    beta = -0.5 if inverse else 0.5
    result = identity.copy()
    power = identity.copy()
    previous = np.inf
    for k in range(1, tol.series_max_terms):
        power = power @ E
        term = (-1) ** k * binom(beta, k) * power
        size = operator_norm(term)
        if size > previous:
            logger.warning("serie binomial no monótona en k=%d: %.3e > %.3e", k, size, previous)
        result = result + term
        previous = size
        if size < tol.series:
            logger.debug("serie binomial convergió con %d términos", k)
            break
    else:
        logger.warning("serie binomial sin converger tras %d términos", tol.series_max_terms)
    return result


def inverse_from_rows(
    frame: SpinSpaceFrame, M: np.ndarray, tol: Tolerances = DEFAULT_TOLERANCES
) -> np.ndarray:
    """φ_x a partir de las filas M = π_x y en coordenadas del marco (2n×d)."""
    m = frame.dim_I
    A = frame.X_inv @ M[:, :m]
    distance = operator_norm(np.eye(m) - A)
    if distance >= DOMAIN_RADIUS:
        raise OutsideChartDomain(distance)
    return series_sqrt(A, inverse=True, tol=tol) @ frame.X_inv @ M


def chart_inverse(x: Operator, y: Operator, tol: Tolerances = DEFAULT_TOLERANCES) -> WaveChartPoint:
    """
    φ_x(y) = (X⁻¹ π_x y|_{S_x})^{−1/2} X⁻¹ π_x y.

    Raises
    ------
    SingularPoint
        Si x o y no son regulares.
    OutsideChartDomain
        Si ‖id − X⁻¹ π_x y|_{S_x}‖ ≥ 1/2.
    """
    frame = spin_frame(x)
    if not is_regular(y):
        raise SingularPoint(y.rank, y.cfg.max_rank)
    M = frame.to_frame(y.mat)[: frame.dim_I, :]
    psi = inverse_from_rows(frame, M, tol)

    residual = operator_norm(forward_matrix(frame, psi) - y.mat)
    if residual > tol.chart * max(1.0, y.norm):
        # dentro de la bola 1/2 esto es una anomalía, no se encoge el dominio
        logger.warning("anomalía de ida y vuelta en la carta: ‖R(φ(y)) − y‖ = %.3e", residual)
    return WaveChartPoint(anchor=x, psi=psi)


def transition_operator_B(
    frame_x: SpinSpaceFrame, frame_y: SpinSpaceFrame, psi: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """
    B_xy(ψ) = Y⁻¹ π_y ψ†Xψ en el marco de y y su bloque B̃_xy(ψ) sobre S_y.
    """
    change = frame_x.unitary.conj().T @ frame_y.unitary
    Rf = psi.conj().T @ frame_x.X @ psi
    R_y = change.conj().T @ Rf @ change
    B = frame_y.X_inv @ R_y[: frame_y.dim_I, :]
    return B, B[:, : frame_y.dim_I]


def _transition_coordinates(frame_x, frame_y, psi, tol):
    B, B_tilde = transition_operator_B(frame_x, frame_y, psi)
    distance = operator_norm(np.eye(B_tilde.shape[0]) - B_tilde)
    if distance >= DOMAIN_RADIUS:
        raise OutsideChartDomain(distance)
    # W(B̃ − id) = (id + (B̃ − id))^{−1/2}
    return series_sqrt(B_tilde, inverse=True, tol=tol) @ B


def transition_map(
    x: Operator, y: Operator, p: WaveChartPoint, tol: Tolerances = DEFAULT_TOLERANCES
) -> WaveChartPoint:
    """
    φ_y ∘ φ_x⁻¹(ψ), evaluada como W(B̃_xy(ψ) − id)·B_xy(ψ).

    Coincide con ``chart_inverse(y, chart_forward(p))``.
    """
    if not same_point(p.anchor, x):
        raise AnchorMismatch("el punto de carta debe estar anclado en x")
    if same_point(x, y):
        return WaveChartPoint(anchor=y, psi=p.psi.copy())
    frame_x = spin_frame(x)
    frame_y = spin_frame(y)
    return WaveChartPoint(anchor=y, psi=_transition_coordinates(frame_x, frame_y, p.psi, tol))


# ---------------------------------------------------------------------------
# Espacio tangente V_x = Symm(S_x) ⊕ L(J, S_x)
# ---------------------------------------------------------------------------


def _hermitian_basis(m: int) -> list[np.ndarray]:
    basis = []
    for a in range(m):
        E = np.zeros((m, m), dtype=complex)
        E[a, a] = 1.0
        basis.append(E)
    for a in range(m):
        for b in range(a + 1, m):
            E = np.zeros((m, m), dtype=complex)
            E[a, b] = E[b, a] = 1.0
            basis.append(E)
            E = np.zeros((m, m), dtype=complex)
            E[a, b] = 1j
            E[b, a] = -1j
            basis.append(E)
    return basis


def tangent_dimension(frame: SpinSpaceFrame) -> int:
    """Dimensión real 4n² + 4n(d − 2n)."""
    m = frame.dim_I
    return m * m + 2 * m * frame.dim_J


def tangent_basis(frame: SpinSpaceFrame) -> list[np.ndarray]:
    """
    Base real de V_x.

    Primero v_I = X⁻¹H con H recorriendo una base hermítica, luego las
    entradas reales e imaginarias de v_J.
    """
    m, k, d = frame.dim_I, frame.dim_J, frame.cfg.d
    basis = []
    for H in _hermitian_basis(m):
        v = np.zeros((m, d), dtype=complex)
        v[:, :m] = frame.X_inv @ H
        basis.append(v)
    for a in range(m):
        for b in range(k):
            for unit in (1.0, 1j):
                v = np.zeros((m, d), dtype=complex)
                v[a, m + b] = unit
                basis.append(v)
    return basis


def tangent_coordinates(v: np.ndarray, frame: SpinSpaceFrame) -> np.ndarray:
    """Coordenadas reales de v en ``tangent_basis`` (mismo orden)."""
    m, k = frame.dim_I, frame.dim_J
    H = frame.X @ v[:, :m]
    H = 0.5 * (H + H.conj().T)
    coords = [H[a, a].real for a in range(m)]
    for a in range(m):
        for b in range(a + 1, m):
            coords.extend([H[a, b].real, H[a, b].imag])
    v_J = v[:, m:]
    for a in range(m):
        for b in range(k):
            coords.extend([v_J[a, b].real, v_J[a, b].imag])
    return np.array(coords)


def from_tangent_coordinates(coords: np.ndarray, frame: SpinSpaceFrame) -> np.ndarray:
    basis = tangent_basis(frame)
    return sum(c * b for c, b in zip(coords, basis))


def project_to_tangent_space(v: np.ndarray, frame: SpinSpaceFrame) -> np.ndarray:
    """Proyecta v sobre V_x simetrizando X·v_I."""
    m = frame.dim_I
    out = np.array(v, dtype=complex)
    H = frame.X @ out[:, :m]
    out[:, :m] = frame.X_inv @ (0.5 * (H + H.conj().T))
    return out


def random_tangent(frame: SpinSpaceFrame, rng: np.random.Generator) -> np.ndarray:
    coords = rng.standard_normal(tangent_dimension(frame))
    return from_tangent_coordinates(coords, frame)


def random_chart_point(x: Operator, rng: np.random.Generator, radius: float = 0.1) -> WaveChartPoint:
    """ψ = ψ₀ + r·v/‖v‖ con v ∈ V_x aleatorio y r uniforme en [0, radius)."""
    frame = spin_frame(x)
    v = random_tangent(frame, rng)
    r = radius * rng.uniform()
    origin = chart_origin(x)
    return WaveChartPoint(anchor=x, psi=origin.psi + r * v / operator_norm(v))


def make_tangent(
    base: Operator, v: np.ndarray, anchor: Operator | None = None, tol: Tolerances = DEFAULT_TOLERANCES
) -> TangentVector:
    """
    Construye un TangentVector validando que v ∈ V_anchor.

    Raises
    ------
    ValueError
        Si X·v_I no es hermítica dentro de τ_symm.
    """
    anchor = base if anchor is None else anchor
    frame = spin_frame(anchor)
    m = frame.dim_I
    H = frame.X @ v[:, :m]
    defect = operator_norm(H - H.conj().T)
    if defect > tol.symm * (1.0 + operator_norm(v)):
        raise ValueError(f"v no pertenece a V_x: ‖XV_I − (XV_I)†‖ = {defect:.3e}")
    return TangentVector(base=base, v=np.asarray(v, dtype=complex), anchor=anchor)


def _base_coordinates(v: TangentVector, frame_anchor: SpinSpaceFrame, tol: Tolerances) -> np.ndarray:
    if same_point(v.base, v.anchor):
        return chart_origin(v.anchor).psi
    M = frame_anchor.to_frame(v.base.mat)[: frame_anchor.dim_I, :]
    return inverse_from_rows(frame_anchor, M, tol)


def pushforward(
    v: TangentVector, new_anchor: Operator, tol: Tolerances = DEFAULT_TOLERANCES
) -> TangentVector:
    """
    D(φ_new ∘ φ_anchor⁻¹)|_{φ_anchor(base)} v.

    Derivada direccional central con h = 1e−5·(1 + ‖coords‖) y una
    extrapolación de Richardson; el resultado se proyecta sobre V_new.

    Raises
    ------
    OutsideChartDomain
        Si la base no está en ambos dominios.
    """
    if same_point(v.anchor, new_anchor):
        return v
    frame_a = spin_frame(v.anchor)
    frame_b = spin_frame(new_anchor)
    psi = _base_coordinates(v, frame_a, tol)

    def transition(coords):
        return _transition_coordinates(frame_a, frame_b, coords, tol)

    dv = directional_derivative(transition, psi, v.v, h=default_step(psi))
    return TangentVector(base=v.base, v=project_to_tangent_space(dv, frame_b), anchor=new_anchor)


def transition_jacobian(
    x: Operator, y: Operator, p: WaveChartPoint, tol: Tolerances = DEFAULT_TOLERANCES
) -> tuple[np.ndarray, float]:
    """
    Jacobiano real de φ_y ∘ φ_x⁻¹ en p respecto de las bases tangentes.

    Returns
    -------
    jacobian : np.ndarray
        Matriz dim×dim con dim = 4n² + 4n(d − 2n).
    condition : float
        Número de condición espectral (finito en puntos interiores).
    """
    frame_x = spin_frame(x)
    frame_y = spin_frame(y)

    def transition(coords):
        return _transition_coordinates(frame_x, frame_y, coords, tol)

    h = default_step(p.psi)
    columns = [
        tangent_coordinates(directional_derivative(transition, p.psi, e, h=h), frame_y)
        for e in tangent_basis(frame_x)
    ]
    jacobian = np.column_stack(columns)
    return jacobian, float(np.linalg.cond(jacobian))
