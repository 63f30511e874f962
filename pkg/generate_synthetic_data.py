import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent / "src"))

from hoelder_analysis import degenerate_lagrangian_pair, maximal_degeneracy_pair  # noqa: E402
from io_utils import measure_to_json, scan_input_to_json, write_json  # noqa: E402
from measures_action import DiscreteMeasure, causal_action  # noqa: E402
from operator_core import HilbertConfig, make_operator, random_regular_operator  # noqa: E402

# =============================
# PARÁMETROS DE GENERACIÓN
# =============================

SEED = 20240601
OUTPUT_DIR = Path("data")

# Medidas aleatorias: (nombre, d, n, número de puntos)
RANDOM_MEASURES = [
    ("measure_d2_n1_3pts", 2, 1, 3),
    ("measure_d6_n1_5pts", 6, 1, 5),
    ("measure_d4_n2_4pts", 4, 2, 4),
]

# Entradas de barrido de Hölder: (nombre, d, n, familia)
SCAN_INPUTS = [
    ("scan_degenerate_d4_n2", 4, 2, "lagrangian"),
    ("scan_maximal_d4_n2", 4, 2, "boundedness"),
    ("scan_degenerate_d6_n1", 6, 1, "lagrangian"),
]

rng = np.random.default_rng(SEED)

print("=" * 80)
print("GENERACIÓN DE DATOS SINTÉTICOS - SISTEMAS FERMIÓNICOS CAUSALES")
print("=" * 80)
print(f"\nSemilla: {SEED}")

# =============================
# MEDIDA DE DOS PUNTOS (valores a mano)
# =============================

cfg = HilbertConfig(2, 1)
two_point = DiscreteMeasure(
    (make_operator(np.diag([1.0, -1.0]), cfg), make_operator(np.diag([2.0, -1.0]), cfg)),
    np.array([1.0, 1.0]),
)
write_json(measure_to_json(two_point), OUTPUT_DIR / "two_point_measure.json")
report = causal_action(two_point, s=0.5)
print("\nMedida de dos puntos: x₁ = diag(1, −1), x₂ = diag(2, −1)")
print(f"   𝒮 = {report.action:.6f} (esperado 5.5)")
print(f"   𝒯 = {report.boundedness:.6f} (esperado 47)")

# =============================
# MEDIDAS ALEATORIAS
# =============================

print("\nMedidas aleatorias:")
for name, d, n, size in RANDOM_MEASURES:
    cfg = HilbertConfig(d, n)
    points = tuple(random_regular_operator(cfg, rng) for _ in range(size))
    rho = DiscreteMeasure(points, rng.uniform(0.5, 1.5, size=size))
    path = write_json(measure_to_json(rho), OUTPUT_DIR / "synthetic" / f"{name}.json")
    print(f"   ✅ {path}  (𝒮 = {causal_action(rho).action:.4e})")

# =============================
# ENTRADAS DE BARRIDO
# =============================

print("\nEntradas de barrido:")
for name, d, n, family in SCAN_INPUTS:
    cfg = HilbertConfig(d, n)
    build = degenerate_lagrangian_pair if family == "lagrangian" else maximal_degeneracy_pair
    x, y, direction = build(cfg, rng)
    path = write_json(scan_input_to_json(x, y, direction), OUTPUT_DIR / "synthetic" / f"{name}.json")
    print(f"   ✅ {path}  (--target {family})")

print("\n" + "=" * 80)
print("Datos listos para `python main.py action|scan|minimize` 🚀")
print("=" * 80)
