"""
Operadores autoadjuntos de rango finito, espacios de espín y proyecciones.

Un punto de ℱ es una matriz compleja d×d autoadjunta con a lo más n
autovalores positivos y a lo más n negativos. Los puntos regulares tienen
rango exactamente 2n; para ellos se construye un marco determinista
(basis_I, basis_J, X) que usan las cartas de onda y la métrica.

Todas las normas son espectrales (norma de operador).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import linalg
from scipy.stats import unitary_group

from exceptions import NotSelfadjoint, SignatureViolation, SingularPoint

logger = logging.getLogger(__name__)

# Umbral para decidir la componente que fija la fase de un autovector
PHASE_CUTOFF = 1e-12


@dataclass(frozen=True)
class HilbertConfig:
    """Dimensión ambiente d y dimensión de espín n (d ≥ 2n, n ≥ 1)."""

    d: int
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"dimensión de espín inválida: n = {self.n}")
        if self.d < 2 * self.n:
            raise ValueError(f"se requiere d ≥ 2n, recibido d = {self.d}, n = {self.n}")

    @property
    def max_rank(self) -> int:
        return 2 * self.n


@dataclass(frozen=True)
class Tolerances:
    """
    Familia τ de tolerancias.

    ``herm`` y ``rank`` son relativas a ‖mat‖; las demás son absolutas o
    relativas según el módulo que las usa.
    """

    herm: float = 1e-12
    rank: float = 1e-10
    symm: float = 1e-9
    series: float = 1e-13
    series_max_terms: int = 200
    chart: float = 1e-8
    push: float = 1e-6
    indep: float = 1e-10
    zero_delta: float = 1e-14


DEFAULT_TOLERANCES = Tolerances()


def operator_norm(mat: np.ndarray) -> float:
    """Norma espectral (mayor valor singular)."""
    mat = np.asarray(mat)
    if mat.size == 0:
        return 0.0
    return float(linalg.norm(mat, 2))


@dataclass(frozen=True, eq=False)
class Operator:
    """
    Punto de ℱ.

    Attributes
    ----------
    mat : np.ndarray
        Matriz d×d compleja, exactamente hermítica (se simetriza al validar).
    cfg : HilbertConfig
    rank, n_pos, n_neg : int
        Conteos de autovalores sobre el umbral τ_rank·‖mat‖.
    eigenvalues, eigenvectors : np.ndarray
        Descomposición espectral de ``mat`` (orden ascendente de ``eigh``).
    """

    mat: np.ndarray
    cfg: HilbertConfig
    rank: int
    n_pos: int
    n_neg: int
    eigenvalues: np.ndarray = field(repr=False)
    eigenvectors: np.ndarray = field(repr=False)
    rank_cutoff: float = field(repr=False, default=0.0)

    @property
    def norm(self) -> float:
        return float(np.max(np.abs(self.eigenvalues))) if self.eigenvalues.size else 0.0

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.mat)))

    @property
    def signature(self) -> tuple[int, int]:
        return self.n_pos, self.n_neg


def make_operator(mat, cfg: HilbertConfig, tol: Tolerances = DEFAULT_TOLERANCES) -> Operator:
    """
    Valida una matriz como punto de ℱ.

    Parameters
    ----------
    mat : array_like
        Matriz d×d compleja.
    cfg : HilbertConfig
    tol : Tolerances

    Returns
    -------
    Operator
        Con rango y firma calculados.

    Raises
    ------
    NotSelfadjoint
        Si ‖mat − mat†‖_max > τ_herm·‖mat‖.
    SignatureViolation
        Si hay más de n autovalores positivos o negativos sobre τ_rank·‖mat‖.
    """
    mat = np.array(mat, dtype=complex)
    if mat.shape != (cfg.d, cfg.d):
        raise ValueError(f"se esperaba matriz {cfg.d}×{cfg.d}, recibido {mat.shape}")

    scale = operator_norm(mat)
    asymmetry = float(np.max(np.abs(mat - mat.conj().T)))
    if asymmetry > tol.herm * scale:
        raise NotSelfadjoint(asymmetry, tol.herm * scale)

    herm = 0.5 * (mat + mat.conj().T)
    eigenvalues, eigenvectors = linalg.eigh(herm)
    cutoff = tol.rank * scale
    n_pos = int(np.sum(eigenvalues > cutoff))
    n_neg = int(np.sum(eigenvalues < -cutoff))
    if n_pos > cfg.n or n_neg > cfg.n:
        raise SignatureViolation(n_pos, n_neg, cfg.n)

    return Operator(
        mat=herm,
        cfg=cfg,
        rank=n_pos + n_neg,
        n_pos=n_pos,
        n_neg=n_neg,
        eigenvalues=eigenvalues,
        eigenvectors=eigenvectors,
        rank_cutoff=cutoff,
    )


def is_regular(x: Operator) -> bool:
    """True si el rango es maximal (= 2n)."""
    return x.rank == x.cfg.max_rank


def _normalize_phase(vectors: np.ndarray) -> np.ndarray:
    # primera componente no nula real positiva
    out = vectors.copy()
    for k in range(out.shape[1]):
        col = out[:, k]
        idx = np.flatnonzero(np.abs(col) > PHASE_CUTOFF)
        if idx.size:
            c = col[idx[0]]
            out[:, k] = col * (np.conj(c) / abs(c))
    return out


@dataclass(frozen=True, eq=False)
class SpinSpaceFrame:
    """
    Marco determinista de un punto regular.

    basis_I : d×2n, autovectores de autovalores no nulos ordenados por |λ|
        descendente y luego λ descendente.
    basis_J : d×(d−2n), base ortonormal del núcleo.
    X : 2n×2n, matriz de x restringida a S_x en basis_I.
    """

    base: Operator
    basis_I: np.ndarray
    basis_J: np.ndarray
    X: np.ndarray

    @property
    def cfg(self) -> HilbertConfig:
        return self.base.cfg

    @property
    def dim_I(self) -> int:
        return self.basis_I.shape[1]

    @property
    def dim_J(self) -> int:
        return self.basis_J.shape[1]

    @cached_property
    def unitary(self) -> np.ndarray:
        """U = [basis_I | basis_J]."""
        return np.hstack([self.basis_I, self.basis_J])

    @cached_property
    def X_inv(self) -> np.ndarray:
        return np.linalg.inv(self.X)

    @cached_property
    def X_frame(self) -> np.ndarray:
        """diag(X, 0) como matriz d×d en coordenadas del marco."""
        d = self.cfg.d
        out = np.zeros((d, d), dtype=complex)
        out[: self.dim_I, : self.dim_I] = self.X
        return out

    def to_frame(self, mat: np.ndarray) -> np.ndarray:
        """U† · mat · U."""
        U = self.unitary
        return U.conj().T @ mat @ U

    def from_frame(self, mat: np.ndarray) -> np.ndarray:
        """U · mat · U†."""
        U = self.unitary
        return U @ mat @ U.conj().T


def spin_frame(x: Operator) -> SpinSpaceFrame:
    """
    Construye el marco (basis_I, basis_J, X) de un punto regular.

    Raises
    ------
    SingularPoint
        Si rango(x) < 2n.
    """
    if not is_regular(x):
        raise SingularPoint(x.rank, x.cfg.max_rank)

    w = x.eigenvalues
    nonzero = np.abs(w) > x.rank_cutoff
    idx_I = np.flatnonzero(nonzero)
    idx_J = np.flatnonzero(~nonzero)

    # lexsort: la última clave es la primaria
    order = np.lexsort((-w[idx_I], -np.abs(w[idx_I])))
    basis_I = _normalize_phase(x.eigenvectors[:, idx_I[order]])
    basis_J = _normalize_phase(x.eigenvectors[:, idx_J])

    X = basis_I.conj().T @ x.mat @ basis_I
    X = 0.5 * (X + X.conj().T)
    return SpinSpaceFrame(base=x, basis_I=basis_I, basis_J=basis_J, X=X)


def spin_adjoint(A: np.ndarray, frame: SpinSpaceFrame) -> np.ndarray:
    """
    Adjunto de espín A* = X⁻¹ A† X.

    References
    ----------
    Producto interno de espín ≺u|v≻ = −⟨u|xv⟩ restringido a S_x.
    """
    return frame.X_inv @ np.asarray(A).conj().T @ frame.X


def projector(x: Operator) -> np.ndarray:
    """Proyección ortogonal π_x sobre S_x = x(ℋ)."""
    frame = spin_frame(x)
    return frame.basis_I @ frame.basis_I.conj().T


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Unitaria de Haar d×d."""
    if d == 1:
        return np.exp(2j * np.pi * rng.uniform()) * np.ones((1, 1))
    return unitary_group.rvs(d, random_state=rng)


def random_regular_operator(
    cfg: HilbertConfig,
    rng: np.random.Generator,
    scale: tuple[float, float] = (0.5, 2.0),
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> Operator:
    """
    Punto regular aleatorio ψ†Aψ.

    ψ son las primeras 2n filas de una unitaria de Haar y A es diagonal con
    firma (n, n) y módulos uniformes en ``scale``, lo que mantiene X bien
    condicionada.
    """
    psi = random_unitary(cfg.d, rng)[: cfg.max_rank, :]
    moduli = rng.uniform(scale[0], scale[1], size=cfg.max_rank)
    signs = np.concatenate([np.ones(cfg.n), -np.ones(cfg.n)])
    A = np.diag(signs * moduli)
    return make_operator(psi.conj().T @ A @ psi, cfg, tol)


def conjugate(x: Operator, U: np.ndarray, tol: Tolerances = DEFAULT_TOLERANCES) -> Operator:
    """U x U†."""
    return make_operator(U @ x.mat @ U.conj().T, x.cfg, tol)


def scale_operator(x: Operator, a: float, tol: Tolerances = DEFAULT_TOLERANCES) -> Operator:
    """a·x para a real."""
    return make_operator(a * x.mat, x.cfg, tol)


def zero_operator(cfg: HilbertConfig) -> Operator:
    return make_operator(np.zeros((cfg.d, cfg.d)), cfg)


def same_point(x: Operator, y: Operator, atol: float = 1e-12) -> bool:
    """Igualdad numérica de dos puntos de ℱ."""
    if x is y:
        return True
    if x.cfg != y.cfg:
        return False
    scale = max(1.0, x.norm, y.norm)
    return bool(np.max(np.abs(x.mat - y.mat)) <= atol * scale)
