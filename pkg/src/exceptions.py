"""
Excepciones del toolkit de sistemas fermiónicos causales.

Todas heredan de ``CausalFermionError`` para que la CLI pueda distinguir
errores del dominio de fallas de E/S.
"""


class CausalFermionError(Exception):
    """Base de todos los errores del dominio."""


class NotSelfadjoint(CausalFermionError):
    """La matriz no es autoadjunta dentro de τ_herm."""

    def __init__(self, asymmetry: float, tolerance: float):
        self.asymmetry = asymmetry
        self.tolerance = tolerance
        super().__init__(
            f"matriz no autoadjunta: ‖A − A†‖_max = {asymmetry:.3e} > {tolerance:.3e}"
        )


class SignatureViolation(CausalFermionError):
    """Más de n autovalores positivos o negativos sobre τ_rank."""

    def __init__(self, n_pos: int, n_neg: int, n: int):
        self.n_pos = n_pos
        self.n_neg = n_neg
        self.n = n
        super().__init__(
            f"firma ({n_pos}, {n_neg}) excede (≤{n}, ≤{n})"
        )


class SingularPoint(CausalFermionError):
    """El operador no es regular (rango < 2n)."""

    def __init__(self, rank: int, expected: int):
        self.rank = rank
        self.expected = expected
        super().__init__(f"punto singular: rango {rank} < {expected}")


class OutsideConvergenceRadius(CausalFermionError):
    """‖id − A‖ ≥ 1/2: la serie binomial no tiene el margen requerido."""

    def __init__(self, distance: float):
        self.distance = distance
        super().__init__(f"‖id − A‖ = {distance:.6f} ≥ 1/2")


class OutsideChartDomain(CausalFermionError):
    """El punto no pertenece al dominio explícito de la carta."""

    def __init__(self, distance: float):
        self.distance = distance
        super().__init__(
            f"fuera del dominio de la carta: ‖id − X⁻¹π_x y|_S‖ = {distance:.6f} ≥ 1/2"
        )


class DegreeMismatch(CausalFermionError):
    """Polinomios de grados distintos."""


class PerturbationTooLarge(CausalFermionError):
    """δ_i ≥ D/2: la perturbación supera el umbral del lema de raíces."""

    def __init__(self, delta: float, separation: float):
        self.delta = delta
        self.separation = separation
        super().__init__(f"δ = {delta:.3e} ≥ D/2 = {separation / 2:.3e}")


class AnchorMismatch(CausalFermionError, ValueError):
    """Un jet, vector tangente o punto de carta está anclado en otro punto."""


class NonDifferentiableDirection(CausalFermionError):
    """Los cocientes de diferencias finitas no convergen al refinar el paso."""


class InsufficientTangents(CausalFermionError):
    """Se pidieron menos derivadas de la curva que ⌈q/α⌉."""

    def __init__(self, supplied: int, required: int):
        self.supplied = supplied
        self.required = required
        super().__init__(
            f"se requieren {required} derivadas de la curva, se entregaron {supplied}"
        )


class UnsupportedOrder(CausalFermionError):
    """Orden de Faà di Bruno no implementado (q > 3)."""


class ParseError(CausalFermionError):
    """Archivo de entrada malformado."""
