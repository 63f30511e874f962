"""
Tests de lectura y escritura JSON/CSV.
"""

import sys
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent / 'src'))

from exceptions import ParseError
from io_utils import (
    chart_point_from_json,
    chart_point_to_json,
    load_measure,
    load_operators,
    matrix_from_json,
    measure_from_json,
    operator_from_json,
    operator_to_json,
    read_json,
    scan_input_from_json,
    write_csv,
    write_json,
)
from operator_core import HilbertConfig, make_operator, random_regular_operator
from wave_charts import random_chart_point

DATA_DIR = Path(__file__).parent.parent / 'data'


def _operator(re, d=2, n=1, im=None):
    data = {"d": d, "n": n, "re": re}
    if im is not None:
        data["im"] = im
    return data


def test_operador_valido():
    x = operator_from_json(_operator([[1.0, 0.0], [0.0, -1.0]]))
    assert x.cfg == HilbertConfig(2, 1)
    assert np.allclose(x.mat, np.diag([1.0, -1.0]))


def test_matriz_sin_parte_imaginaria():
    assert np.array_equal(matrix_from_json({"re": [[1.0]]}), np.array([[1.0 + 0.0j]]))


@pytest.mark.parametrize(
    "data",
    [
        {"n": 1, "re": [[1.0, 0.0], [0.0, -1.0]]},
        {"d": 2, "re": [[1.0, 0.0], [0.0, -1.0]]},
        {"d": 2, "n": 1},
        _operator([[1.0, 1.0], [0.0, -1.0]]),
        _operator([[1.0, 0.0], [0.0, 1.0]]),
        _operator([[1.0, 0.0, 0.0]] * 3),
        _operator([["a", 0.0], [0.0, 1.0]]),
        _operator([[1.0, 0.0], [0.0, -1.0]], im=[[0.0]]),
        _operator([[1.0, 0.0], [0.0, -1.0]], d=3, n=2),
    ],
    ids=["sin_d", "sin_n", "sin_re", "no_hermitico", "firma", "forma", "no_numerico", "im_forma", "config"],
)
def test_operador_invalido(data):
    with pytest.raises(ParseError):
        operator_from_json(data)


def test_operador_ida_y_vuelta():
    x = random_regular_operator(HilbertConfig(4, 1), np.random.default_rng(0))
    assert np.allclose(operator_from_json(operator_to_json(x)).mat, x.mat, atol=1e-14)


def test_punto_de_carta_campos():
    x = random_regular_operator(HilbertConfig(4, 1), np.random.default_rng(1))
    p = random_chart_point(x, np.random.default_rng(2))
    data = chart_point_to_json(p)
    assert set(data) == {"anchor", "psi_re", "psi_im"}
    back = chart_point_from_json(data)
    assert np.allclose(back.psi, p.psi)


def test_punto_de_carta_forma_invalida():
    x = make_operator(np.diag([1.0, -1.0]), HilbertConfig(2, 1))
    data = {"anchor": operator_to_json(x), "psi_re": [[1.0, 0.0, 0.0]], "psi_im": [[0.0, 0.0, 0.0]]}
    with pytest.raises(ParseError):
        chart_point_from_json(data)


def test_medida_de_ejemplo():
    rho = load_measure(DATA_DIR / 'two_point_measure.json')
    assert rho.size == 2
    assert rho.volume == pytest.approx(2.0)


def test_medida_invalida():
    point = _operator([[1.0, 0.0], [0.0, -1.0]])
    with pytest.raises(ParseError):
        measure_from_json({"points": [point], "weights": [-1.0]})
    with pytest.raises(ParseError):
        measure_from_json({"points": [point], "weights": 1.0})
    with pytest.raises(ParseError):
        measure_from_json({"points": [point]})


def test_escaneo_direccion_incompatible():
    point = _operator([[1.0, 0.0], [0.0, -1.0]])
    data = {"x": point, "y": point, "direction": {"re": [[1.0]], "im": [[0.0]]}}
    with pytest.raises(ParseError):
        scan_input_from_json(data)


def test_json_invalido(tmp_path):
    path = tmp_path / "roto.json"
    path.write_text("{no es json", encoding="utf-8")
    with pytest.raises(ParseError):
        read_json(path)


def test_archivo_inexistente(tmp_path):
    with pytest.raises(OSError):
        read_json(tmp_path / "no_existe.json")


def test_lista_de_operadores(tmp_path):
    path = write_json({"d": 2}, tmp_path / "no_lista.json")
    with pytest.raises(ParseError):
        load_operators(path)
    path = write_json([_operator([[1.0, 0.0], [0.0, -1.0]])], tmp_path / "lista.json")
    assert len(load_operators(path)) == 1


def test_escritura_determinista(tmp_path):
    data = {"b": [1.0, 2.5], "a": {"z": 1, "y": "ñ"}}
    first = write_json(data, tmp_path / "uno" / "datos.json").read_bytes()
    second = write_json(dict(reversed(list(data.items()))), tmp_path / "dos" / "datos.json").read_bytes()
    assert first == second
    text = first.decode("utf-8")
    assert text.endswith("\n")
    assert text.index('"a"') < text.index('"b"')
    assert "ñ" in text


def test_escritura_csv(tmp_path):
    frame = pd.DataFrame({"t": [1e-2, 1e-3], "delta": [0.5, 0.05]})
    path = write_csv(frame, tmp_path / "sub" / "tabla.csv")
    assert pd.read_csv(path).equals(frame)


if __name__ == '__main__':
    pytest.main([__file__])
