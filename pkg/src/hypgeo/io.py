"""Reading and writing reports and input files.

JSON documents carry a `schema` string such as "hypgeo.report/1".  Complex
numbers are stored as {"re": x, "im": y}; numpy arrays become nested lists
with the same convention applied elementwise.  CSV tables are plain
comma-separated files with a header row; their columns are documented in
README.md.
"""
from __future__ import annotations

import csv
import json
import re
from pathlib import Path

import numpy as np

REPORT_SCHEMA = "hypgeo.report/1"
METRIC_SCHEMA = "hypgeo.metric/1"
DATA_SCHEMA = "hypgeo.immersion-data/1"
KNOWN_SCHEMAS = (REPORT_SCHEMA, METRIC_SCHEMA, DATA_SCHEMA)


class InputError(ValueError):
    """Malformed input file or command-line value (exit code 2)."""


# --- complex numbers --------------------------------------------------------

def parse_complex(text: str) -> complex:
    """Parse "a+bi", "a", "bi", "-i" and friends.  Only used for command-line values."""
    s = text.strip().replace(" ", "")
    if not s:
        raise InputError("empty complex number")
    num = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
    pure = re.fullmatch(rf"([+-]?)((?:{num})?)[ij]", s)
    if pure:
        return complex(0.0, _imag_coeff(pure.group(1) + (pure.group(2) or "")))
    m = re.fullmatch(rf"([+-]?{num})(?:([+-](?:{num})?)[ij])?", s)
    if m is None:
        raise InputError(f"cannot parse complex number {text!r}")
    re_part = float(m.group(1))
    im_part = _imag_coeff(m.group(2)) if m.group(2) else 0.0
    return complex(re_part, im_part)


def _imag_coeff(c: str) -> float:
    if c in ("", "+"):
        return 1.0
    if c == "-":
        return -1.0
    return float(c)


def complex_from_json(obj) -> complex:
    if isinstance(obj, (int, float)) and not isinstance(obj, bool):
        return complex(obj)
    if isinstance(obj, dict) and set(obj) <= {"re", "im"} and obj:
        try:
            return complex(float(obj.get("re", 0.0)), float(obj.get("im", 0.0)))
        except (TypeError, ValueError) as exc:
            raise InputError(f"bad complex object {obj!r}") from exc
    raise InputError(f"expected a number or {{re, im}} object, got {obj!r}")


def to_jsonable(x):
    """Recursively convert numpy values and complex numbers for json.dump."""
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return to_jsonable(x.tolist())
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": _finite(x.real), "im": _finite(x.imag)}
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return _finite(float(x))
    return x


def _finite(v: float):
    v = float(v)
    if np.isfinite(v):
        return v
    return "inf" if v > 0 else ("-inf" if v < 0 else "nan")


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True)


# --- input files ---------------------------------------------------------------

def load_json(path, schema: str | None = None) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except FileNotFoundError as exc:
        raise InputError(f"no such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc
    if not isinstance(doc, dict):
        raise InputError(f"{path}: top level must be an object")
    found = doc.get("schema")
    if schema is not None and found != schema:
        raise InputError(f"{path}: expected schema {schema!r}, found {found!r}")
    return doc


def require(doc: dict, key: str, kind=None, where: str = "input"):
    if key not in doc:
        raise InputError(f"{where}: missing field {key!r}")
    val = doc[key]
    if kind is not None and not isinstance(val, kind):
        raise InputError(f"{where}: field {key!r} has the wrong type")
    return val


def grid_from_json(spec, where: str = "grid"):
    """{"lo": a, "hi": b, "n": k} -> np.linspace(a, b, k), with k >= 4."""
    if not isinstance(spec, dict):
        raise InputError(f"{where}: expected an object with lo, hi, n")
    try:
        lo, hi, n = float(spec["lo"]), float(spec["hi"]), int(spec["n"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{where}: needs numeric lo, hi and integer n") from exc
    if n < 4:
        raise InputError(f"{where}: resolution must be at least 4")
    if not hi > lo:
        raise InputError(f"{where}: need hi > lo")
    return np.linspace(lo, hi, n)


# --- reports ---------------------------------------------------------------------

def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_csv_cell(v) for v in row])


def _csv_cell(v):
    if isinstance(v, (complex, np.complexfloating)):
        return f"{float(v.real)!r}{float(v.imag):+}j"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def write_report(report: dict, out_dir=None, tables: dict | None = None, stem: str = "report") -> str:
    """Serialize the report; with out_dir also write <stem>.json and one CSV per table.

    tables maps a name to (header, rows).  Returns the JSON text.
    """
    text = dumps(report)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{stem}.json").write_text(text + "\n")
        for name, (header, rows) in (tables or {}).items():
            write_csv(out / f"{stem}-{name}.csv", header, rows)
    return text
