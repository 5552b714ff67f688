"""Instance files (schema ``cheb-bounds/1``) and round-trip exact JSON output.

An instance document looks like::

    {
      "version": "cheb-bounds/1",
      "field": "real",            # or "complex"
      "dimension": 2,
      "weights": [0.5, 0.5],      # optional, uniform when absent
      "x": [[0, 0], [1, 0]],
      "y": [[0, 0], [1, 0]],      # optional for commands that only use x
      "enclosures": {"x_low": [0, 0], "x_high": [1, 0],
                     "y_low": [0, 0], "y_high": [1, 0]},   # optional
      "meta": {}                  # optional, free-form
    }

Complex coordinates are written as ``[re, im]`` pairs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .bounds import BallEnclosure
from .errors import ChebyshevError
from .vectors import WeightVector

SCHEMA_VERSION = "cheb-bounds/1"
_KEYS = {"version", "field", "dimension", "weights", "x", "y", "enclosures", "meta"}
_ENCLOSURE_KEYS = ("x_low", "x_high", "y_low", "y_high")


class InstanceParseError(ChebyshevError, ValueError):
    """Malformed instance document; ``where`` names the line or field at fault."""

    def __init__(self, where: str, message: str):
        self.where = where
        super().__init__(f"{where}: {message}")


@dataclass(frozen=True)
class Instance:
    """Weights (None for uniform), sequences and optional enclosures."""

    x: np.ndarray
    y: np.ndarray | None = None
    weights: np.ndarray | None = None
    ex: BallEnclosure | None = None
    ey: BallEnclosure | None = None

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def dimension(self) -> int:
        return self.x.shape[1]

    @property
    def field(self) -> str:
        arrays = [self.x, self.y] + [e.low for e in (self.ex, self.ey) if e is not None]
        return "complex" if any(a is not None and np.iscomplexobj(a) for a in arrays) else "real"

    def weight_vector(self) -> WeightVector:
        if self.weights is None:
            return WeightVector.uniform(self.n)
        return WeightVector(self.weights)


# -- parsing ---------------------------------------------------------------

def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InstanceParseError(where, f"expected a number, got {json.dumps(value)}")
    if not math.isfinite(value):
        raise InstanceParseError(where, "non-finite number")
    return float(value)


def _coordinate(value, field: str, where: str):
    if field == "real":
        return _number(value, where)
    if not (isinstance(value, list) and len(value) == 2):
        raise InstanceParseError(where, "complex coordinates must be [re, im] pairs")
    return complex(_number(value[0], where + "[0]"), _number(value[1], where + "[1]"))


def _vector(value, field: str, dim: int, where: str) -> np.ndarray:
    if not isinstance(value, list):
        raise InstanceParseError(where, "expected a list of coordinates")
    if len(value) != dim:
        raise InstanceParseError(where, f"ragged: {len(value)} coordinates, dimension is {dim}")
    dtype = np.float64 if field == "real" else np.complex128
    return np.array([_coordinate(c, field, f"{where}[{k}]") for k, c in enumerate(value)], dtype=dtype)


def _sequence(value, field: str, dim: int, where: str) -> np.ndarray:
    if not isinstance(value, list) or len(value) < 2:
        raise InstanceParseError(where, "expected a list of at least two vectors")
    return np.array([_vector(v, field, dim, f"{where}[{i}]") for i, v in enumerate(value)])


def instance_from_document(doc) -> Instance:
    if not isinstance(doc, dict):
        raise InstanceParseError("document", "top level must be a JSON object")
    unknown = set(doc) - _KEYS
    if unknown:
        raise InstanceParseError(sorted(unknown)[0], "unknown field")
    if doc.get("version") != SCHEMA_VERSION:
        raise InstanceParseError("version", f"expected {SCHEMA_VERSION!r}, got {doc.get('version')!r}")
    field = doc.get("field")
    if field not in ("real", "complex"):
        raise InstanceParseError("field", f"must be 'real' or 'complex', got {field!r}")
    dim = doc.get("dimension")
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise InstanceParseError("dimension", f"must be a positive integer, got {dim!r}")
    if "x" not in doc:
        raise InstanceParseError("x", "missing")
    x = _sequence(doc["x"], field, dim, "x")
    y = None
    if "y" in doc:
        y = _sequence(doc["y"], field, dim, "y")
        if y.shape[0] != x.shape[0]:
            raise InstanceParseError("y", f"has {y.shape[0]} members, x has {x.shape[0]}")
    weights = None
    if doc.get("weights") is not None:
        raw = doc["weights"]
        if not isinstance(raw, list) or len(raw) != x.shape[0]:
            raise InstanceParseError("weights", f"expected a list of {x.shape[0]} reals")
        weights = np.array([_number(v, f"weights[{i}]") for i, v in enumerate(raw)])
    ex = ey = None
    enc = doc.get("enclosures")
    if enc is not None:
        if not isinstance(enc, dict) or set(enc) - set(_ENCLOSURE_KEYS):
            raise InstanceParseError("enclosures", f"expected an object with keys among {_ENCLOSURE_KEYS}")
        vecs = {k: _vector(v, field, dim, f"enclosures.{k}") for k, v in enc.items()}
        for side in ("x", "y"):
            lo, hi = vecs.get(f"{side}_low"), vecs.get(f"{side}_high")
            if (lo is None) != (hi is None):
                raise InstanceParseError(f"enclosures.{side}_low", "low and high must be given together")
            if lo is not None:
                if side == "x":
                    ex = BallEnclosure(lo, hi)
                else:
                    ey = BallEnclosure(lo, hi)
    return Instance(x=x, y=y, weights=weights, ex=ex, ey=ey)


def parse_instance(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceParseError(f"line {exc.lineno} column {exc.colno}", exc.msg) from exc
    return instance_from_document(doc)


def load_instance(path) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read())


# -- serialisation ---------------------------------------------------------

def _coords(vec, field: str) -> list:
    if field == "real":
        return [float(np.real(c)) for c in vec]
    return [[float(c.real), float(c.imag)] for c in np.asarray(vec, dtype=complex)]


def instance_to_document(inst: Instance, meta: dict | None = None) -> dict:
    field = inst.field
    doc = {"version": SCHEMA_VERSION, "field": field, "dimension": inst.dimension}
    if inst.weights is not None:
        doc["weights"] = [float(v) for v in inst.weights]
    doc["x"] = [_coords(v, field) for v in inst.x]
    if inst.y is not None:
        doc["y"] = [_coords(v, field) for v in inst.y]
    enc = {}
    for side, e in (("x", inst.ex), ("y", inst.ey)):
        if e is not None:
            enc[f"{side}_low"] = _coords(e.low, field)
            enc[f"{side}_high"] = _coords(e.high, field)
    if enc:
        doc["enclosures"] = enc
    if meta:
        doc["meta"] = meta
    return doc


def format_float(value: float) -> str:
    """17 significant digits: parsing the text back gives the same double."""
    if not math.isfinite(value):
        return "null"
    return format(value, ".17g")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with every float written by :func:`format_float`."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return json.dumps(bool(obj) if obj is not None else None)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(float(obj))
    return json.dumps(obj)
