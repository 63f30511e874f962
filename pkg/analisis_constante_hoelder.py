"""
Estimación empírica de la constante c(n) de la cota global de Hölder
|ℒ(x,ỹ) − ℒ(x,y)| ≤ c(n)·‖y‖^{2−α}‖x‖²‖ỹ − y‖^α, α = 1/(2n − 1).

Resultados en results/constante_hoelder.csv.
"""

import sys
from pathlib import Path

import numpy as np
import pandas as pd

sys.path.insert(0, str(Path(__file__).parent / "src"))

from hoelder_analysis import estimate_hoelder_constant  # noqa: E402
from operator_core import HilbertConfig  # noqa: E402

# Parámetros
SEED = 7
TRIALS = 200
CONFIGS = [(2, 1), (4, 1), (6, 1), (4, 2), (6, 2), (6, 3)]
RELATIVE_STEPS = [0.05, 0.01]
OUTPUT = Path("results") / "constante_hoelder.csv"

rng = np.random.default_rng(SEED)

print("=" * 80)
print("ESTIMACIÓN EMPÍRICA DE c(n)")
print("=" * 80)

rows = []
for d, n in CONFIGS:
    cfg = HilbertConfig(d, n)
    for rel in RELATIVE_STEPS:
        trials = estimate_hoelder_constant(cfg, rng, TRIALS, relative_step=rel)
        ratios = trials["ratio"]
        rows.append(
            {
                "d": d,
                "n": n,
                "alpha": 1.0 / (2 * n - 1),
                "relative_step": rel,
                "ratio_max": ratios.max(),
                "ratio_p95": ratios.quantile(0.95),
                "ratio_median": ratios.median(),
            }
        )
        print(f"  d={d}, n={n}, paso {rel:.2f}: máx {ratios.max():.4e}, mediana {ratios.median():.4e}")

table = pd.DataFrame(rows)
OUTPUT.parent.mkdir(parents=True, exist_ok=True)
table.to_csv(OUTPUT, index=False)

print("\n" + "=" * 80)
print(f"✅ Tabla guardada en {OUTPUT}")
print("⚠️  Son cotas inferiores empíricas de c(n), no el valor óptimo")
print("=" * 80)
