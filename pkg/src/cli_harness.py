"""
Punto de entrada de línea de comandos.

Subcomandos
-----------
gen       operadores regulares aleatorios (JSON)
verify    suites de verificación: charts, metric, hoelder, chain, action
pairwise  tabla de ℒ y |xy| sobre una lista de operadores (CSV)
scan      barrido de Hölder sobre un archivo (x, y, direction)
minimize  minimizador de 𝒮_κ sobre una medida
action    acción causal y restricciones de una medida

Códigos de salida: 0 éxito, 1 chequeo fallido, 2 error de uso,
3 error de E/S o de formato.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, field, fields, replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from exceptions import CausalFermionError, ParseError
from hoelder_analysis import hoelder_scan_boundedness, hoelder_scan_L
from kernel_lagrangian import pairwise_table
from io_utils import (
    load_measure,
    load_operators,
    measure_to_json,
    operator_to_json,
    read_json,
    scan_input_from_json,
    write_csv,
    write_json,
)
from measures_action import causal_action, local_trace_check, minimize_action
from operator_core import DEFAULT_TOLERANCES, HilbertConfig, Tolerances, is_regular, random_regular_operator
from verification import METRIC_TRIALS, SUITE_NAMES, hessian_table, results_frame, run_suite

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3

DEFAULT_DIM = 6
DEFAULT_SPIN = 1
DEFAULT_OUTPUT = "results"


@dataclass(frozen=True)
class RunConfig:
    """Configuración de una corrida; el PRNG es PCG64 de numpy."""

    cfg: HilbertConfig
    seed: int = 0
    tolerances: Tolerances = field(default_factory=lambda: DEFAULT_TOLERANCES)
    output_dir: Path = Path(DEFAULT_OUTPUT)

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


def _timestamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _banner(title: str):
    print("=" * 80)
    print(title)
    print("=" * 80)


def parse_steps(text: str) -> np.ndarray:
    """
    ``start:stop:count`` (log-espaciado) o lista separada por comas.

    Raises
    ------
    ValueError
        Si el formato es inválido o los pasos no son positivos decrecientes.
    """
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"formato de pasos inválido: {text}")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        if start <= 0 or stop <= 0 or count < 2:
            raise ValueError(f"pasos inválidos: {text}")
        steps = np.logspace(np.log10(start), np.log10(stop), count)
    else:
        steps = np.array([float(s) for s in text.split(",") if s.strip()])
    if steps.size == 0 or np.any(steps <= 0) or np.any(np.diff(steps) >= 0):
        raise ValueError("los pasos deben ser positivos y estrictamente decrecientes")
    return steps


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dim", type=int, default=DEFAULT_DIM, help="dimensión ambiente d")
    common.add_argument("--spin", type=int, default=DEFAULT_SPIN, help="dimensión de espín n")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", type=Path, default=Path(DEFAULT_OUTPUT), help="directorio de salida")
    common.add_argument("-v", "--verbose", action="store_true")
    for tol in fields(Tolerances):
        common.add_argument(
            f"--tol.{tol.name}", dest=f"tol_{tol.name}", type=type(tol.default), default=None,
            help=f"tolerancia τ_{tol.name} (por defecto {tol.default})",
        )
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="sistemas-fermionicos-causales",
        description="Herramientas numéricas para sistemas fermiónicos causales a escala de escritorio",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", parents=[common], help="generar operadores regulares aleatorios")
    gen.add_argument("--count", type=int, default=10)

    verify = sub.add_parser("verify", parents=[common], help="ejecutar una suite de verificación")
    verify.add_argument("suite", choices=SUITE_NAMES)
    verify.add_argument("--trials", type=int, default=None)

    pairwise = sub.add_parser("pairwise", parents=[common], help="ℒ y |xy| sobre todos los pares")
    pairwise.add_argument("operators", type=Path)
    pairwise.add_argument("--workers", type=int, default=None)

    scan = sub.add_parser("scan", parents=[common], help="barrido de Hölder")
    scan.add_argument("input", type=Path)
    scan.add_argument("--steps", default="1e-2:1e-10:17")
    scan.add_argument("--target", choices=("lagrangian", "boundedness"), default="lagrangian")

    minimize = sub.add_parser("minimize", parents=[common], help="minimizar 𝒮_κ")
    minimize.add_argument("measure", type=Path)
    minimize.add_argument("--kappa", type=float, default=0.0)
    minimize.add_argument("--budget", type=int, default=500)
    minimize.add_argument("--step", type=float, default=0.05)
    minimize.add_argument("--fix-trace", action="store_true")

    action = sub.add_parser("action", parents=[common], help="acción causal de una medida")
    action.add_argument("measure", type=Path)
    action.add_argument("--s-constant", type=float, required=True, help="constante 𝔰 de ℓ")
    action.add_argument("--kappa", type=float, default=0.0)
    return parser


def run_config_from_args(args) -> RunConfig:
    overrides = {
        tol.name: getattr(args, f"tol_{tol.name}")
        for tol in fields(Tolerances)
        if getattr(args, f"tol_{tol.name}") is not None
    }
    return RunConfig(
        cfg=HilbertConfig(args.dim, args.spin),
        seed=args.seed,
        tolerances=replace(DEFAULT_TOLERANCES, **overrides),
        output_dir=args.out,
    )


def cmd_gen(config: RunConfig, count: int) -> int:
    """Escribe ``count`` operadores regulares ψ†Aψ en operators.json."""
    rng = config.rng()
    operators = [random_regular_operator(config.cfg, rng, tol=config.tolerances) for _ in range(count)]
    irregular = sum(not is_regular(x) for x in operators)
    path = write_json([operator_to_json(x) for x in operators], config.output_dir / "operators.json")
    _banner("GENERACIÓN DE OPERADORES")
    print(f"d = {config.cfg.d}, n = {config.cfg.n}, semilla = {config.seed}")
    print(f"✅ {count} operadores escritos en {path}")
    if irregular:
        print(f"❌ {irregular} operadores no regulares")
        return EXIT_CHECK_FAILED
    return EXIT_OK


def cmd_verify(config: RunConfig, suite: str, trials: int | None = None) -> int:
    results = run_suite(suite, config.cfg, config.seed, config.tolerances, trials)
    frame = results_frame(results)
    passed = bool(frame["passed"].all())
    report = {
        "generated_at": _timestamp(),
        "suite": suite,
        "d": config.cfg.d,
        "n": config.cfg.n,
        "seed": config.seed,
        "passed": passed,
        "checks": [r.to_dict() for r in results],
    }
    write_json(report, config.output_dir / f"verify_{suite}.json")
    write_csv(frame, config.output_dir / f"verify_{suite}.csv")
    if suite == "metric":
        table, _ = hessian_table(config.cfg, config.rng(), config.tolerances, METRIC_TRIALS if trials is None else trials)
        write_csv(table, config.output_dir / "hessian_verification.csv")

    _banner(f"SUITE DE VERIFICACIÓN: {suite}")
    for r in results:
        mark = "✅" if r.passed else "❌"
        print(f"{mark} {r.name:<34} {r.value:.3e}  (umbral {r.threshold:.1e})  {r.detail}")
    print("=" * 80)
    return EXIT_OK if passed else EXIT_CHECK_FAILED


def cmd_pairwise(config: RunConfig, operators_path: Path, workers: int | None) -> int:
    """ℒ y |xy| sobre todos los pares de una lista JSON de operadores."""
    points = load_operators(operators_path, config.tolerances)
    configs = {x.cfg for x in points}
    if len(configs) > 1:
        raise ParseError(f"{operators_path}: operadores con configuraciones distintas {sorted(configs, key=str)}")
    table = pairwise_table(points, max_workers=workers)
    write_csv(table, config.output_dir / "pairwise.csv")
    summary = {
        "generated_at": _timestamp(),
        "count": len(points),
        "pairs": len(table),
        "max_lagrangian": float(table["lagrangian"].max()) if len(table) else 0.0,
        "max_spectral_weight": float(table["spectral_weight"].max()) if len(table) else 0.0,
    }
    write_json(summary, config.output_dir / "pairwise.json")

    _banner("TABLA DE PARES")
    print(f"Operadores: {len(points)}, pares: {len(table)}")
    print(f"max ℒ = {summary['max_lagrangian']:.6e}")
    return EXIT_OK


def cmd_scan(config: RunConfig, input_path: Path, steps: np.ndarray, target: str) -> int:
    x, y, direction = scan_input_from_json(read_json(input_path), config.tolerances)
    scan = hoelder_scan_L if target == "lagrangian" else hoelder_scan_boundedness
    fit = scan(x, y, direction, steps, config.tolerances)

    stem = f"scan_{target}"
    write_csv(fit.scan, config.output_dir / f"{stem}.csv")
    write_json({"generated_at": _timestamp(), "target": target, **fit.summary()}, config.output_dir / f"{stem}.json")

    _banner(f"BARRIDO DE HÖLDER ({target})")
    if fit.exact_zero:
        print("⚠️  todas las diferencias son nulas: sin exponente")
    else:
        print(f"Exponente estimado: {fit.exponent_hat:.4f} (referencia {fit.reference_exponent:.4f})")
        print(f"Constante estimada: {fit.constant_hat:.4e}, R² = {fit.r2:.4f}")
    if fit.low_confidence:
        print("⚠️  ajuste de baja confianza: los pasos abarcan menos de 2 décadas")
    return EXIT_OK


def cmd_minimize(config: RunConfig, measure_path: Path, kappa: float, budget: int, step: float, fix_trace: bool) -> int:
    rho0 = load_measure(measure_path, config.tolerances)
    result = minimize_action(rho0, kappa, budget, config.seed, step=step, fix_trace=fix_trace)
    write_json(measure_to_json(result.measure), config.output_dir / "minimized_measure.json")
    write_csv(result.history, config.output_dir / "minimize_history.csv")

    history = result.history
    _banner("MINIMIZACIÓN DE LA ACCIÓN")
    print(f"Iteraciones: {budget}, aceptadas: {result.accepted}")
    print(f"𝒮_κ inicial: {history['objective'].iloc[0]:.6e}")
    print(f"𝒮_κ final:   {history['objective'].iloc[-1]:.6e}")
    return EXIT_OK


def cmd_action(config: RunConfig, measure_path: Path, s: float, kappa: float) -> int:
    rho = load_measure(measure_path, config.tolerances)
    report = causal_action(rho, s=s)
    payload = {"generated_at": _timestamp(), **report.to_dict(), "kappa": kappa, "kappa_action": report.kappa_action(kappa)}
    if rho.size:
        payload["trace_check"] = local_trace_check(rho).to_dict()
    write_json(payload, config.output_dir / "action.json")

    _banner("ACCIÓN CAUSAL")
    print(f"Puntos: {rho.size}, volumen: {report.volume:.6f}")
    print(f"𝒮 = {report.action:.10e}")
    print(f"𝒯 = {report.boundedness:.10e}")
    print(f"∫ tr(x) dρ = {report.trace_integral:.10e}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        config = run_config_from_args(args)
        if args.command == "scan":
            steps = parse_steps(args.steps)
    except ValueError as exc:
        print(f"❌ error de uso: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        if args.command == "gen":
            if args.count < 0:
                print("❌ error de uso: --count debe ser ≥ 0", file=sys.stderr)
                return EXIT_USAGE
            return cmd_gen(config, args.count)
        if args.command == "verify":
            return cmd_verify(config, args.suite, args.trials)
        if args.command == "pairwise":
            if args.workers is not None and args.workers < 1:
                print("❌ error de uso: --workers debe ser ≥ 1", file=sys.stderr)
                return EXIT_USAGE
            return cmd_pairwise(config, args.operators, args.workers)
        if args.command == "scan":
            return cmd_scan(config, args.input, steps, args.target)
        if args.command == "minimize":
            return cmd_minimize(config, args.measure, args.kappa, args.budget, args.step, args.fix_trace)
        return cmd_action(config, args.measure, args.s_constant, args.kappa)
    except (ParseError, OSError) as exc:
        print(f"❌ error de entrada/salida: {exc}", file=sys.stderr)
        return EXIT_IO
    except (CausalFermionError, ValueError) as exc:
        print(f"❌ {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
