"""
Inmersión de Hilbert-Schmidt, métrica Riemanniana canónica y función
distancia al cuadrado E(x, y) = tr((x − y)²).

Convenciones de normalización
-----------------------------
Sea g_x(A, B) = tr(AB) sobre tangentes inmersos (A = u†x + xu en el marco)
y g̃_x(u, v) = 4·Re(tr(xvxu) + tr(xuv†x)) la fórmula en coordenadas de carta.
Entonces

    g̃_x(u, v) = METRIC_NORMALIZATION · g_x(embed(u), embed(v)),

con METRIC_NORMALIZATION = 2, y g̃_x coincide con la Hessiana de
E_x ∘ φ_x⁻¹ en π_x.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd
from scipy import linalg

from exceptions import AnchorMismatch, NotSelfadjoint
from finite_differences import default_step, mixed_partial, mixed_partial_richardson
from operator_core import (
    DEFAULT_TOLERANCES,
    Operator,
    SpinSpaceFrame,
    Tolerances,
    operator_norm,
    random_regular_operator,
    same_point,
    spin_frame,
)
from wave_charts import (
    TangentVector,
    chart_inverse,
    chart_origin,
    forward_matrix,
    inverse_from_rows,
    make_tangent,
    random_tangent,
)

logger = logging.getLogger(__name__)

METRIC_NORMALIZATION = 2.0

# Paso para la Hessiana por diferencias finitas
HESSIAN_STEP = 1e-4


@dataclass(frozen=True, eq=False)
class HSVector:
    """Operador autoadjunto de Hilbert-Schmidt (a escala de escritorio)."""

    mat: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.mat)
        asymmetry = float(np.max(np.abs(mat - mat.conj().T))) if mat.size else 0.0
        tolerance = DEFAULT_TOLERANCES.herm * max(1.0, operator_norm(mat))
        if asymmetry > tolerance:
            raise NotSelfadjoint(asymmetry, tolerance)


@dataclass(frozen=True, eq=False)
class EmbeddedTangent:
    """Tangente inmerso −v*ψ₀ − ψ₀*v en el espacio de operadores autoadjuntos."""

    base: Operator
    psi0: np.ndarray
    v: np.ndarray
    ambient: HSVector


def restricted_trace(mat: np.ndarray, basis: np.ndarray) -> complex:
    """
    Traza de ``mat`` sobre el subespacio generado por las columnas
    ortonormales de ``basis``; coincide con tr(mat) si el rango de mat está
    contenido en ese subespacio.
    """
    if basis.shape[1] == 0:
        return 0.0 + 0.0j
    return complex(np.trace(basis.conj().T @ mat @ basis))


def _trace_I(mat: np.ndarray, m: int) -> complex:
    # traza restringida a S_x en coordenadas del marco
    return complex(np.trace(mat[:m, :m]))


def hs_inner(A: HSVector, B: HSVector) -> float:
    """g(A, B) = Re tr(AB)."""
    if A.mat.shape != B.mat.shape:
        raise ValueError("dimensiones incompatibles")
    return float(np.real(np.einsum("ij,ji->", A.mat, B.mat)))


def _lift(v: np.ndarray, d: int) -> np.ndarray:
    # coordenadas 2n×d → operador d×d en el marco (filas fuera de S_x nulas)
    out = np.zeros((d, d), dtype=complex)
    out[: v.shape[0], :] = v
    return out


def _require_own_anchor(v: TangentVector):
    if not same_point(v.base, v.anchor):
        raise AnchorMismatch("el vector tangente debe estar anclado en su propio punto base")


def embed_tangent(v: TangentVector) -> EmbeddedTangent:
    """
    Tangente inmerso −v*ψ₀ − ψ₀*v.

    En el marco de x vale u†x + xu con u = v levantado a d×d, y se devuelve
    en la base original.
    """
    _require_own_anchor(v)
    frame = spin_frame(v.base)
    L = _lift(v.v, frame.cfg.d)
    ambient_f = L.conj().T @ frame.X_frame + frame.X_frame @ L
    ambient = frame.from_frame(ambient_f)
    ambient = 0.5 * (ambient + ambient.conj().T)
    return EmbeddedTangent(
        base=v.base, psi0=chart_origin(v.base).psi, v=v.v, ambient=HSVector(ambient)
    )


def metric(x: Operator, u: TangentVector, v: TangentVector) -> float:
    """
    g̃_x(u, v) = 4·Re(tr(x v x u) + tr(x u v† x)).

    Las trazas se restringen a S_x: ambos productos tienen x a la izquierda.
    """
    for w in (u, v):
        _require_own_anchor(w)
        if not same_point(w.base, x):
            raise AnchorMismatch("u y v deben estar anclados en x")
    frame = spin_frame(x)
    d, m = frame.cfg.d, frame.dim_I
    xf = frame.X_frame
    Lu = _lift(u.v, d)
    Lv = _lift(v.v, d)
    first = _trace_I(xf @ Lv @ xf @ Lu, m)
    second = _trace_I(xf @ Lu @ Lv.conj().T @ xf, m)
    return 4.0 * float(np.real(first + second))


def embedded_metric(u: TangentVector, v: TangentVector) -> float:
    """g_x = tr(AB) de los tangentes inmersos."""
    return hs_inner(embed_tangent(u).ambient, embed_tangent(v).ambient)


def dist_sq(x: Operator, y: Operator) -> float:
    """
    E(x, y) = tr((x − y)²), evaluada sobre span(S_x, S_y).
    """
    if x.cfg != y.cfg:
        raise ValueError("x e y deben compartir HilbertConfig")
    columns = [
        op.eigenvectors[:, np.abs(op.eigenvalues) > op.rank_cutoff] for op in (x, y)
    ]
    stacked = np.hstack(columns)
    if stacked.shape[1] == 0:
        return 0.0
    basis = linalg.orth(stacked)
    diff = x.mat - y.mat
    return max(float(np.real(restricted_trace(diff @ diff, basis))), 0.0)


def dist_sq_in_chart(x: Operator, frame: SpinSpaceFrame, psi: np.ndarray) -> float:
    """E_x ∘ φ⁻¹(ψ) = ‖x − ψ†Yψ‖²_HS en la carta del marco dado."""
    diff = x.mat - forward_matrix(frame, psi)
    return float(np.sum(np.abs(diff) ** 2))


def dist_sq_hessian(
    x: Operator, u: TangentVector, v: TangentVector, chart_anchor: Operator | None = None
) -> float:
    """
    Forma cerrada de D²(E_x ∘ φ_y⁻¹)|_{φ_y(x)}(v, u).

        4·Re(tr(yφ u† yφ v†) + tr(yφφ† y u v†)),   φ = φ_y(x)

    Parameters
    ----------
    x : Operator
        Punto donde se evalúa E_x.
    u, v : TangentVector
        Con base x y ancla ``chart_anchor`` (por defecto x, donde φ = π_x).
    chart_anchor : Operator, optional
        Ancla y de la carta.
    """
    y = x if chart_anchor is None else chart_anchor
    for w in (u, v):
        if not (same_point(w.base, x) and same_point(w.anchor, y)):
            raise AnchorMismatch("u y v deben tener base x y ancla en la carta elegida")
    frame = spin_frame(y)
    d, m = frame.cfg.d, frame.dim_I
    phi = chart_origin(y).psi if same_point(x, y) else chart_inverse(y, x).psi
    yf = frame.X_frame
    Phi = _lift(phi, d)
    Lu = _lift(u.v, d)
    Lv = _lift(v.v, d)
    first = _trace_I(yf @ Phi @ Lu.conj().T @ yf @ Phi @ Lv.conj().T, m)
    second = _trace_I(yf @ Phi @ Phi.conj().T @ yf @ Lu @ Lv.conj().T, m)
    return 4.0 * float(np.real(first + second))


def fd_gradient(x: Operator, basis: list[np.ndarray], h: float = HESSIAN_STEP) -> np.ndarray:
    """Gradiente central de E_x ∘ φ_x⁻¹ en π_x a lo largo de ``basis``."""
    frame = spin_frame(x)
    psi0 = chart_origin(x).psi
    return np.array(
        [mixed_partial(lambda p: dist_sq_in_chart(x, frame, p), psi0, [e], h) for e in basis]
    )


def fd_hessian(x: Operator, u: np.ndarray, v: np.ndarray, h: float = HESSIAN_STEP) -> float:
    """D²(E_x ∘ φ_x⁻¹)|_{π_x}(u, v) con esténcil central (h, h/2) y Richardson."""
    frame = spin_frame(x)
    psi0 = chart_origin(x).psi
    return float(mixed_partial_richardson(lambda p: dist_sq_in_chart(x, frame, p), psi0, [u, v], h))


def hessian_verification(
    x: Operator, rng: np.random.Generator, trials: int, h: float = HESSIAN_STEP
) -> pd.DataFrame:
    """
    Compara la forma cerrada con la Hessiana numérica sobre pares aleatorios.

    Returns
    -------
    pd.DataFrame
        Columnas (trial, closed_form, fd_value, rel_err).
    """
    frame = spin_frame(x)
    rows = []
    for trial in range(trials):
        u = make_tangent(x, random_tangent(frame, rng))
        v = make_tangent(x, random_tangent(frame, rng))
        closed = dist_sq_hessian(x, u, v)
        fd_value = fd_hessian(x, u.v, v.v, h)
        scale = max(abs(closed), np.sqrt(abs(metric(x, u, u) * metric(x, v, v))))
        rows.append((trial, closed, fd_value, abs(closed - fd_value) / scale))
    return pd.DataFrame(rows, columns=["trial", "closed_form", "fd_value", "rel_err"])


def hs_embedding_roundtrip(
    x: Operator, psi, B: np.ndarray, tol: Tolerances = DEFAULT_TOLERANCES
) -> tuple[float, float]:
    """
    Residuos de ida y vuelta de la inmersión ℛ(ψ, B) = R_x(ψ) + diag(0, B).

    La inversa es Φ(E) = (φ_x(π_x E), π_J(E − R_x(φ_x(π_x E)))|_J).

    Returns
    -------
    (float, float)
        ‖Φ(ℛ(ψ,B)) − (ψ,B)‖ y ‖ℛ(Φ(E)) − E‖ con E = ℛ(ψ,B).

    Raises
    ------
    OutsideChartDomain
        Si π_x E sale del dominio de la carta.
    """
    frame = spin_frame(x)
    m = frame.dim_I
    psi = np.asarray(getattr(psi, "psi", psi))
    B = np.asarray(B, dtype=complex)

    def embed(coords, block):
        Ef = coords.conj().T @ frame.X @ coords
        Ef[m:, m:] += block
        return frame.from_frame(Ef)

    def invert(E):
        Ef = frame.to_frame(E)
        phi = inverse_from_rows(frame, Ef[:m, :], tol)
        block = (Ef - phi.conj().T @ frame.X @ phi)[m:, m:]
        return phi, block

    E = embed(psi, B)
    phi, block = invert(E)
    residual_coords = max(operator_norm(phi - psi), operator_norm(block - B))
    residual_ambient = operator_norm(embed(phi, block) - E)
    logger.debug("ida y vuelta HS: %.3e, %.3e", residual_coords, residual_ambient)
    return residual_coords, residual_ambient


def norm_equivalence(A: np.ndarray) -> tuple[float, float, float]:
    """
    (‖A‖, ‖A‖_HS, √rango·‖A‖); para rango ≤ 2n vale ‖A‖ ≤ ‖A‖_HS ≤ √(2n)‖A‖.
    """
    op = operator_norm(A)
    hs = float(np.linalg.norm(A, "fro"))
    rank = int(np.linalg.matrix_rank(A)) if A.size else 0
    return op, hs, float(np.sqrt(rank)) * op


def random_metric_setup(cfg, rng: np.random.Generator):
    """x regular aleatorio con dos tangentes aleatorios anclados en x."""
    x = random_regular_operator(cfg, rng)
    frame = spin_frame(x)
    u = make_tangent(x, random_tangent(frame, rng))
    v = make_tangent(x, random_tangent(frame, rng))
    return x, u, v
