"""
Suites de verificación numérica por módulo.

Cada suite recibe la configuración, un generador sembrado y las
tolerancias, y devuelve una lista de ``CheckResult``. Un chequeo pasa si
``value <= threshold`` (o ``value >= threshold`` cuando ``lower_bound``).
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass

import numpy as np
import pandas as pd

from exceptions import InsufficientTangents, PerturbationTooLarge
from expedient_calculus import (
    SmoothCurve,
    chain_rule_check,
    higher_chain_rule_check,
    lagrangian_in_charts,
    product_curve,
)
from hoelder_analysis import (
    MonicPolynomial,
    degenerate_lagrangian_pair,
    global_bound_check,
    hoelder_scan_boundedness,
    hoelder_scan_L,
    match_roots,
    maximal_degeneracy_pair,
    random_admissible_direction,
    root_bound_check,
    simple_spectrum_pair,
)
from kernel_lagrangian import lagrangian
from measures_action import (
    DiscreteMeasure,
    causal_action,
    causal_action_serial,
    ell,
    minimize_action,
)
from operator_core import (
    DEFAULT_TOLERANCES,
    HilbertConfig,
    Tolerances,
    conjugate,
    make_operator,
    operator_norm,
    random_regular_operator,
    random_unitary,
    scale_operator,
    spin_frame,
)
from riemann_metric import (
    embedded_metric,
    fd_gradient,
    hessian_verification,
    metric,
)
from wave_charts import (
    chart_forward,
    chart_inverse,
    make_tangent,
    random_chart_point,
    random_tangent,
    series_sqrt,
    tangent_basis,
    transition_map,
)

logger = logging.getLogger(__name__)

SUITE_NAMES = ("charts", "metric", "hoelder", "chain", "action")

# Pasos de los barridos de Hölder
L_SCAN_STEPS = np.logspace(-2, -10, 17)
BOUNDEDNESS_SCAN_STEPS = np.logspace(-2, -8, 13)
RANDOM_SCAN_STEPS = np.logspace(-3, -8, 11)


@dataclass
class CheckResult:
    suite: str
    name: str
    value: float
    threshold: float
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return asdict(self)


def _check(suite, name, value, threshold, detail="", lower_bound=False) -> CheckResult:
    value = float(value)
    passed = value >= threshold if lower_bound else value <= threshold
    if not np.isfinite(value):
        passed = False
    return CheckResult(suite, name, value, float(threshold), bool(passed), detail)


def results_frame(results: list[CheckResult]) -> pd.DataFrame:
    return pd.DataFrame([r.to_dict() for r in results])


# ---------------------------------------------------------------------------
# Cartas
# ---------------------------------------------------------------------------


def suite_charts(
    cfg: HilbertConfig, rng: np.random.Generator, tol: Tolerances = DEFAULT_TOLERANCES, trials: int = 200
) -> list[CheckResult]:
    """Idas y vueltas φ_x∘R_x, R_x∘φ_x, mapas de transición y raíz escalar."""
    worst_coords = 0.0
    worst_ambient = 0.0
    worst_transition = 0.0
    for _ in range(trials):
        x = random_regular_operator(cfg, rng, tol=tol)
        p = random_chart_point(x, rng, radius=0.1)
        y = chart_forward(p, tol)
        back = chart_inverse(x, y, tol)
        worst_coords = max(worst_coords, operator_norm(back.psi - p.psi) / (1 + operator_norm(p.psi)))
        again = chart_forward(back, tol)
        worst_ambient = max(worst_ambient, operator_norm(again.mat - y.mat) / y.norm)

        # segunda ancla cerca de x, y dentro de ambos dominios
        z = chart_forward(random_chart_point(x, rng, radius=0.05), tol)
        via_transition = transition_map(x, z, p, tol).psi
        direct = chart_inverse(z, y, tol).psi
        worst_transition = max(
            worst_transition, operator_norm(via_transition - direct) / (1 + operator_norm(direct))
        )

    m = cfg.max_rank
    root = series_sqrt(0.64 * np.eye(m), tol=tol)
    inv_root = series_sqrt(0.64 * np.eye(m), inverse=True, tol=tol)
    scalar_error = max(operator_norm(root - 0.8 * np.eye(m)), operator_norm(inv_root - 1.25 * np.eye(m)))

    return [
        _check("charts", "phi_after_R", worst_coords, tol.chart, f"{trials} puntos"),
        _check("charts", "R_after_phi", worst_ambient, tol.chart, f"{trials} puntos"),
        _check("charts", "transition_consistency", worst_transition, 1e-7),
        _check("charts", "series_sqrt_scalar", scalar_error, 1e-12),
    ]


# ---------------------------------------------------------------------------
# Métrica
# ---------------------------------------------------------------------------


METRIC_TRIALS = 50
METRIC_POINTS = 5


def hessian_table(
    cfg: HilbertConfig, rng: np.random.Generator, tol: Tolerances = DEFAULT_TOLERANCES, trials: int = METRIC_TRIALS
) -> tuple[pd.DataFrame, list]:
    """
    Hessiana cerrada frente a la numérica en ``METRIC_POINTS`` puntos.

    Es el primer consumo del generador en ``suite_metric``: con un generador
    recién sembrado reproduce las filas que la suite evalúa.

    Returns
    -------
    tuple
        DataFrame (point, trial, closed_form, fd_value, rel_err) y los puntos.
    """
    per_point = max(1, trials // METRIC_POINTS)
    frames = []
    points = []
    for k in range(METRIC_POINTS):
        x = random_regular_operator(cfg, rng, tol=tol)
        points.append(x)
        frames.append(hessian_verification(x, rng, per_point).assign(point=k))
    table = pd.concat(frames, ignore_index=True)
    return table[["point", "trial", "closed_form", "fd_value", "rel_err"]], points


def suite_metric(
    cfg: HilbertConfig, rng: np.random.Generator, tol: Tolerances = DEFAULT_TOLERANCES, trials: int = METRIC_TRIALS
) -> list[CheckResult]:
    """Hessiana cerrada vs numérica, gradiente nulo, normalización y positividad."""
    table, points = hessian_table(cfg, rng, tol, trials)
    gradients = []
    for x in points:
        grad = fd_gradient(x, tangent_basis(spin_frame(x)))
        gradients.append(float(np.linalg.norm(grad)) / max(1.0, x.norm**2))

    x = random_regular_operator(cfg, rng, tol=tol)
    frame = spin_frame(x)
    worst_norm = 0.0
    min_metric = np.inf
    for k in range(500):
        u = make_tangent(x, random_tangent(frame, rng))
        value = metric(x, u, u)
        min_metric = min(min_metric, value)
        if k < 50:
            embedded = 2.0 * embedded_metric(u, u)
            worst_norm = max(worst_norm, abs(value - embedded) / abs(embedded))

    return [
        _check("metric", "hessian_closed_vs_fd", table["rel_err"].max(), 1e-4, f"{len(table)} pares"),
        _check("metric", "gradient_at_origin", max(gradients), 1e-6),
        _check("metric", "metric_normalization", worst_norm, 1e-10),
        CheckResult("metric", "metric_positive", float(min_metric), 0.0, bool(min_metric > 0), "500 tangentes"),
    ]


# ---------------------------------------------------------------------------
# Hölder
# ---------------------------------------------------------------------------


def random_root_family(g: int, rng: np.random.Generator) -> MonicPolynomial:
    """Polinomio de grado g con cúmulos de raíces separados al menos 0.3."""
    multiplicities = []
    remaining = g
    while remaining > 0:
        p = int(rng.integers(1, remaining + 1))
        multiplicities.append(p)
        remaining -= p
    centres = []
    while len(centres) < len(multiplicities):
        z = complex(*rng.uniform(-0.8, 0.8, size=2))
        if all(abs(z - c) >= 0.3 for c in centres):
            centres.append(z)
    roots = np.concatenate([[c] * p for c, p in zip(centres, multiplicities)])
    return MonicPolynomial.from_roots(roots)


def suite_hoelder(
    cfg: HilbertConfig, rng: np.random.Generator, tol: Tolerances = DEFAULT_TOLERANCES, trials: int = 20
) -> list[CheckResult]:
    """Lema de raíces, exponentes de los barridos e invariancia de la cota global."""
    n = cfg.n
    results = []

    eps = 1e-6
    square = MonicPolynomial.from_roots([0.0, 0.0])
    split = MonicPolynomial(coeffs=np.array([-eps, 0.0], dtype=complex))
    deviation = float(match_roots(square, split).deviations.max())
    results.append(_check("hoelder", "double_root_split", abs(deviation - np.sqrt(eps)) / np.sqrt(eps), 1e-6))

    checked = failed = skipped = 0
    for g in range(2, 7):
        for size in (1e-6, 1e-9, 1e-12):
            for _ in range(max(1, trials // 5)):
                P = random_root_family(g, rng)
                delta = rng.standard_normal(g) + 1j * rng.standard_normal(g)
                Q = P.perturbed(size * delta / np.max(np.abs(delta)))
                try:
                    report = root_bound_check(P, Q)
                except PerturbationTooLarge:
                    skipped += 1
                    continue
                checked += 1
                failed += int(not report.holds)
    results.append(
        _check("hoelder", "root_bound_violations", failed, 0, f"{checked} verificados, {skipped} fuera de umbral")
    )

    x, y, direction = degenerate_lagrangian_pair(cfg, rng)
    fit = hoelder_scan_L(x, y, direction, L_SCAN_STEPS, tol)
    reference = 1.0 / (2 * n - 1)
    results.append(
        _check("hoelder", "lagrangian_exponent", abs(fit.exponent_hat - reference), 0.1, f"α̂ = {fit.exponent_hat:.4f}")
    )
    window = fit.scan[(fit.scan["t"] <= 1e-2) & (fit.scan["t"] >= 1e-6)]["ratio"]
    results.append(_check("hoelder", "lagrangian_ratio_spread", window.max() / window.min(), 10.0))

    x, y, direction = maximal_degeneracy_pair(cfg, rng)
    fit = hoelder_scan_boundedness(x, y, direction, BOUNDEDNESS_SCAN_STEPS, tol)
    results.append(
        _check(
            "hoelder", "boundedness_exponent", fit.exponent_hat, 1.0 / (2 * n) - 0.1,
            f"α̂ = {fit.exponent_hat:.4f}", lower_bound=True,
        )
    )

    exponents = []
    for _ in range(trials):
        x = random_regular_operator(cfg, rng, tol=tol)
        y = random_regular_operator(cfg, rng, tol=tol)
        fit = hoelder_scan_L(x, y, random_admissible_direction(y, rng), RANDOM_SCAN_STEPS, tol)
        if not fit.exact_zero:
            exponents.append(fit.exponent_hat)
    if exponents:
        results.append(
            _check(
                "hoelder", "random_pairs_lipschitz", min(exponents), 0.95,
                f"{len(exponents)} barridos no nulos", lower_bound=True,
            )
        )

    x = random_regular_operator(cfg, rng, tol=tol)
    y = random_regular_operator(cfg, rng, tol=tol)
    y_tilde = make_operator(y.mat + 0.01 * y.norm * random_admissible_direction(y, rng), cfg, tol)
    base = global_bound_check(x, y, y_tilde).ratio
    worst = 0.0
    for a in (0.1, 1.0, 10.0):
        for b in (0.1, 1.0, 10.0):
            ratio = global_bound_check(scale_operator(x, a), scale_operator(y, b), scale_operator(y_tilde, b)).ratio
            worst = max(worst, abs(ratio - base) / max(base, 1e-12))
    results.append(_check("hoelder", "global_ratio_scaling", worst, 1e-8))
    return results


# ---------------------------------------------------------------------------
# Reglas de la cadena
# ---------------------------------------------------------------------------


def suite_chain(
    cfg: HilbertConfig, rng: np.random.Generator, tol: Tolerances = DEFAULT_TOLERANCES, trials: int = 3
) -> list[CheckResult]:
    """
    Regla de la cadena para ℒ en cartas y Faà di Bruno de orden 2.

    Los pares tienen espectro de xy real y simple: con autovalores complejos
    conjugados (frecuentes para n = 1) ℒ se anula cerca del punto y ambos
    lados de la regla valen cero.
    """
    n = cfg.n
    alpha = 1.0 / (2 * n - 1)
    p = 2 * n - 1
    worst = 0.0
    smallest_rhs = np.inf
    for _ in range(trials):
        x, y = simple_spectrum_pair(cfg, rng)
        fx, fy = spin_frame(x), spin_frame(y)
        c1 = SmoothCurve.from_chart_polynomial(x, [0.1 * random_tangent(fx, rng) for _ in range(p)])
        c2 = SmoothCurve.from_chart_polynomial(y, [0.1 * random_tangent(fy, rng) for _ in range(p)])
        report = chain_rule_check(lagrangian_in_charts(x, y), product_curve(c1, c2), alpha)
        smallest_rhs = min(smallest_rhs, abs(report.rhs))
        if report.rhs != 0.0:
            worst = max(worst, report.residuals[-1] / abs(report.rhs))

    x = random_regular_operator(cfg, rng, tol=tol)
    frame = spin_frame(x)
    W = rng.standard_normal((cfg.d, cfg.d))

    def quadratic(psi):
        return float(np.real(np.trace(psi @ W @ psi.conj().T)))

    curve = SmoothCurve.from_chart_polynomial(x, [random_tangent(frame, rng), random_tangent(frame, rng)])
    faa = higher_chain_rule_check(quadratic, curve, 1.0, 2)

    rejected = 0.0
    try:
        chain_rule_check(quadratic, SmoothCurve.from_chart_polynomial(x, []), 0.5)
    except InsufficientTangents:
        rejected = 1.0

    return [
        _check("chain", "lagrangian_chain_rule", worst, 1e-5, f"{trials} curvas, p = {p}"),
        _check(
            "chain", "lagrangian_reference_derivative", smallest_rhs, 1e-6,
            "|D ℒ · γ'| mínimo", lower_bound=True,
        ),
        _check("chain", "faa_di_bruno_order2", faa.residual_rel, 1e-4),
        _check("chain", "insufficient_tangents_rejected", rejected, 1.0, lower_bound=True),
    ]


# ---------------------------------------------------------------------------
# Acción
# ---------------------------------------------------------------------------


def random_measure(cfg: HilbertConfig, rng: np.random.Generator, size: int, tol=DEFAULT_TOLERANCES) -> DiscreteMeasure:
    points = tuple(random_regular_operator(cfg, rng, tol=tol) for _ in range(size))
    return DiscreteMeasure(points, rng.uniform(0.5, 1.5, size=size))


def suite_action(
    cfg: HilbertConfig, rng: np.random.Generator, tol: Tolerances = DEFAULT_TOLERANCES, trials: int = 50
) -> list[CheckResult]:
    """Paralelo vs serial, escalamiento, invariancia unitaria, ℓ y minimizador."""
    rho = random_measure(cfg, rng, trials, tol)
    parallel = causal_action(rho)
    serial = causal_action_serial(rho)
    bitwise = float(parallel.action != serial.action or parallel.boundedness != serial.boundedness)

    x = random_regular_operator(cfg, rng, tol=tol)
    y = random_regular_operator(cfg, rng, tol=tol)
    base = lagrangian(x, y)
    # escala natural: ℒ(x, y) ≤ c(n)‖x‖²‖y‖² (para n = 1 ℒ puede anularse)
    natural = x.norm**2 * y.norm**2
    scaling = 0.0
    for a, b in ((0.5, 3.0), (2.0, 0.1), (10.0, 10.0)):
        value = lagrangian(scale_operator(x, a), scale_operator(y, b))
        scaling = max(scaling, abs(value - (a * b) ** 2 * base) / ((a * b) ** 2 * natural))
    U = random_unitary(cfg.d, rng)
    unitary = abs(lagrangian(conjugate(x, U), conjugate(y, U)) - base) / natural

    s = 0.7
    identity = sum(c * (ell(xi, rho, s) + s) for xi, c in zip(rho.points, rho.weights))
    identity_error = abs(identity - parallel.action) / parallel.action

    small = random_measure(cfg, rng, 3, tol)
    first = minimize_action(small, kappa=0.5, budget=100, seed=7)
    second = minimize_action(small, kappa=0.5, budget=100, seed=7)
    objective = first.history["objective"].to_numpy()
    increase = float(max(0.0, np.max(np.diff(objective)))) if objective.size > 1 else 0.0
    volume = abs(first.measure.volume - small.volume) / small.volume
    deterministic = float(not first.history.equals(second.history))

    return [
        _check("action", "parallel_equals_serial", bitwise, 0.0, f"{rho.size} puntos"),
        _check("action", "lagrangian_scaling", scaling, 1e-8),
        _check("action", "joint_unitary_invariance", unitary, 1e-8),
        _check("action", "ell_recovers_action", identity_error, 1e-12),
        _check("action", "minimizer_monotone", increase, 0.0),
        _check("action", "minimizer_volume", volume, 1e-12),
        _check("action", "minimizer_deterministic", deterministic, 0.0),
    ]


SUITES = {
    "charts": suite_charts,
    "metric": suite_metric,
    "hoelder": suite_hoelder,
    "chain": suite_chain,
    "action": suite_action,
}


def run_suite(
    name: str, cfg: HilbertConfig, seed: int, tol: Tolerances = DEFAULT_TOLERANCES, trials: int | None = None
) -> list[CheckResult]:
    """
    Raises
    ------
    KeyError
        Si la suite no existe.
    """
    suite = SUITES[name]
    rng = np.random.default_rng(seed)
    kwargs = {} if trials is None else {"trials": trials}
    results = suite(cfg, rng, tol, **kwargs)
    failed = [r.name for r in results if not r.passed]
    if failed:
        logger.warning("suite %s: fallaron %s", name, ", ".join(failed))
    else:
        logger.info("suite %s: %d chequeos correctos", name, len(results))
    return results
