import json
import math

import numpy as np
import pytest

from hypgeo import io


@pytest.mark.parametrize("text, value", [
    ("0.3+0.2i", 0.3 + 0.2j), ("1", 1), ("-2.5", -2.5), ("0.5i", 0.5j), ("i", 1j), ("-i", -1j),
    ("3+i", 3 + 1j), ("3-i", 3 - 1j), ("1e-3-2e2j", 1e-3 - 200j), (" 0.4 ", 0.4), ("+.5j", 0.5j),
])
def test_parse_complex(text, value):
    assert io.parse_complex(text) == value


@pytest.mark.parametrize("bad", ["", "abc", "1+", "i2", "1+2", "1+2i+3"])
def test_parse_complex_rejects(bad):
    with pytest.raises(io.InputError):
        io.parse_complex(bad)


def test_complex_json_round_trip():
    doc = json.loads(io.dumps({"z": 1 - 2j, "a": np.array([1j, 2.0]), "k": np.int64(3)}))
    assert doc["z"] == {"re": 1.0, "im": -2.0}
    assert doc["a"] == [{"re": 0.0, "im": 1.0}, {"re": 2.0, "im": 0.0}]
    assert doc["k"] == 3
    assert io.complex_from_json(doc["z"]) == 1 - 2j
    assert io.complex_from_json(2) == 2


def test_non_finite_values_are_strings():
    doc = json.loads(io.dumps({"a": math.inf, "b": -math.inf, "c": math.nan, "d": complex(math.inf, 0)}))
    assert doc == {"a": "inf", "b": "-inf", "c": "nan", "d": {"re": "inf", "im": 0.0}}


def test_complex_from_json_rejects():
    for bad in ("1+2i", {"x": 1}, {}, None, True):
        with pytest.raises(io.InputError):
            io.complex_from_json(bad)


def test_load_json_errors(tmp_path):
    with pytest.raises(io.InputError):
        io.load_json(tmp_path / "missing.json")
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(io.InputError):
        io.load_json(p)
    p.write_text(json.dumps({"schema": io.METRIC_SCHEMA}))
    with pytest.raises(io.InputError):
        io.load_json(p, io.DATA_SCHEMA)
    assert io.load_json(p, io.METRIC_SCHEMA)["schema"] == io.METRIC_SCHEMA


def test_grid_from_json():
    assert np.allclose(io.grid_from_json({"lo": 0, "hi": 1, "n": 5}), np.linspace(0, 1, 5))
    for bad in ({"lo": 0, "hi": 1, "n": 3}, {"lo": 1, "hi": 0, "n": 5}, {"lo": 0}, [0, 1, 5]):
        with pytest.raises(io.InputError):
            io.grid_from_json(bad)


def test_write_report(tmp_path):
    text = io.write_report({"schema": io.REPORT_SCHEMA, "v": 0.1}, tmp_path,
                           {"t": (["a", "z"], [(0.1, 1 + 2j), (2, complex(0, -0.5))])}, stem="x")
    assert (tmp_path / "x.json").read_text() == text + "\n"
    assert (tmp_path / "x-t.csv").read_text() == "a,z\n0.1,1.0+2.0j\n2,0.0-0.5j\n"
