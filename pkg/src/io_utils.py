"""
Utilidades para entrada/salida de datos.

Formatos JSON
-------------
Operator      {"d": int, "n": int, "re": [[...]], "im": [[...]]}
WaveChartPoint {"anchor": Operator, "psi_re": [[...]], "psi_im": [[...]]}
Medida        {"points": [Operator, ...], "weights": [...]}
Escaneo       {"x": Operator, "y": Operator, "direction": {"re": [[...]], "im": [[...]]}}

Las tablas se escriben como CSV desde DataFrames de pandas.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pandas as pd

from exceptions import CausalFermionError, ParseError
from measures_action import DiscreteMeasure
from operator_core import DEFAULT_TOLERANCES, HilbertConfig, Operator, Tolerances, make_operator
from wave_charts import WaveChartPoint


def _require(data: dict, key: str, where: str):
    if not isinstance(data, dict) or key not in data:
        raise ParseError(f"{where}: falta el campo '{key}'")
    return data[key]


def matrix_to_json(mat: np.ndarray) -> dict:
    mat = np.asarray(mat, dtype=complex)
    return {"re": mat.real.tolist(), "im": mat.imag.tolist()}


def matrix_from_json(data: dict, where: str = "matriz") -> np.ndarray:
    re = _require(data, "re", where)
    im = data.get("im") if isinstance(data, dict) else None
    try:
        real = np.array(re, dtype=float)
        imag = np.zeros_like(real) if im is None else np.array(im, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{where}: entradas no numéricas ({exc})") from exc
    if real.ndim != 2 or real.shape != imag.shape:
        raise ParseError(f"{where}: partes real/imaginaria con forma inválida {real.shape}, {imag.shape}")
    return real + 1j * imag


def operator_to_json(x: Operator) -> dict:
    return {"d": x.cfg.d, "n": x.cfg.n, **matrix_to_json(x.mat)}


def operator_from_json(data: dict, tol: Tolerances = DEFAULT_TOLERANCES, where: str = "operador") -> Operator:
    """
    Raises
    ------
    ParseError
        Si faltan campos, la forma no es d×d o la matriz no es un punto de ℱ.
    """
    d = _require(data, "d", where)
    n = _require(data, "n", where)
    mat = matrix_from_json(data, where)
    try:
        cfg = HilbertConfig(int(d), int(n))
        if mat.shape != (cfg.d, cfg.d):
            raise ParseError(f"{where}: se esperaba {cfg.d}×{cfg.d}, recibido {mat.shape}")
        return make_operator(mat, cfg, tol)
    except (ValueError, TypeError) as exc:
        raise ParseError(f"{where}: {exc}") from exc
    except CausalFermionError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"{where}: {exc}") from exc


def chart_point_to_json(p: WaveChartPoint) -> dict:
    psi = matrix_to_json(p.psi)
    return {"anchor": operator_to_json(p.anchor), "psi_re": psi["re"], "psi_im": psi["im"]}


def chart_point_from_json(data: dict, tol: Tolerances = DEFAULT_TOLERANCES) -> WaveChartPoint:
    anchor = operator_from_json(_require(data, "anchor", "punto de carta"), tol, "anchor")
    raw = {"re": _require(data, "psi_re", "punto de carta"), "im": _require(data, "psi_im", "punto de carta")}
    psi = matrix_from_json(raw, "psi")
    try:
        return WaveChartPoint(anchor=anchor, psi=psi)
    except (ValueError, CausalFermionError) as exc:
        raise ParseError(f"punto de carta: {exc}") from exc


def measure_to_json(rho: DiscreteMeasure) -> dict:
    return {
        "points": [operator_to_json(x) for x in rho.points],
        "weights": [float(c) for c in rho.weights],
    }


def measure_from_json(data: dict, tol: Tolerances = DEFAULT_TOLERANCES) -> DiscreteMeasure:
    raw_points = _require(data, "points", "medida")
    raw_weights = _require(data, "weights", "medida")
    if not isinstance(raw_points, list) or not isinstance(raw_weights, list):
        raise ParseError("medida: 'points' y 'weights' deben ser listas")
    points = [operator_from_json(p, tol, f"points[{i}]") for i, p in enumerate(raw_points)]
    try:
        return DiscreteMeasure(tuple(points), np.array(raw_weights, dtype=float))
    except (ValueError, TypeError) as exc:
        raise ParseError(f"medida: {exc}") from exc


def scan_input_from_json(data: dict, tol: Tolerances = DEFAULT_TOLERANCES):
    """(x, y, direction) de un archivo de escaneo."""
    x = operator_from_json(_require(data, "x", "escaneo"), tol, "x")
    y = operator_from_json(_require(data, "y", "escaneo"), tol, "y")
    direction = matrix_from_json(_require(data, "direction", "escaneo"), "direction")
    if direction.shape != (y.cfg.d, y.cfg.d):
        raise ParseError(f"direction: se esperaba {y.cfg.d}×{y.cfg.d}, recibido {direction.shape}")
    return x, y, direction


def scan_input_to_json(x: Operator, y: Operator, direction: np.ndarray) -> dict:
    return {"x": operator_to_json(x), "y": operator_to_json(y), "direction": matrix_to_json(direction)}


def read_json(path) -> dict:
    """
    Raises
    ------
    ParseError
        Si el archivo no es JSON válido.
    OSError
        Si el archivo no se puede leer.
    """
    text = Path(path).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: JSON inválido ({exc})") from exc


def write_json(data, path) -> Path:
    """JSON con claves ordenadas y sangría 2 (bytes deterministas)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n", encoding="utf-8")
    return path


def write_csv(df: pd.DataFrame, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(path, index=False)
    return path


def load_measure(path, tol: Tolerances = DEFAULT_TOLERANCES) -> DiscreteMeasure:
    return measure_from_json(read_json(path), tol)


def load_operators(path, tol: Tolerances = DEFAULT_TOLERANCES) -> list[Operator]:
    data = read_json(path)
    if not isinstance(data, list):
        raise ParseError(f"{path}: se esperaba una lista de operadores")
    return [operator_from_json(item, tol, f"[{i}]") for i, item in enumerate(data)]
