"""JSON interchange for matrices, tower points and Thom points.

Matrices are arrays of rows; every entry is a two-element ``[re, im]``
array.  The basepoint is the string ``"basepoint"``.
"""
from __future__ import annotations

import json
import math

import numpy as np

from .facial import INFINITY, Smash
from .opcalc import Tagged
from .tower import ThomPoint, TowerPoint

BASEPOINT_JSON = "basepoint"


class InputError(ValueError):
    """Malformed JSON input."""


def _clean(x: float) -> float:
    # avoid "-0.0" so that outputs are byte-stable under sign-of-zero noise
    x = float(x)
    return 0.0 if x == 0.0 else x


def matrix_to_json(m) -> list:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {a.shape}")
    return [[[_clean(z.real), _clean(z.imag)] for z in row] for row in a]


def matrix_from_json(obj, name: str = "matrix") -> np.ndarray:
    if not isinstance(obj, list):
        raise InputError(f"{name} must be an array of rows")
    rows = []
    width = None
    for r in obj:
        if not isinstance(r, list):
            raise InputError(f"{name}: each row must be an array")
        row = []
        for z in r:
            if isinstance(z, (int, float)) and not isinstance(z, bool):
                row.append(complex(z))
            elif (isinstance(z, list) and len(z) == 2
                  and all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in z)):
                row.append(complex(z[0], z[1]))
            else:
                raise InputError(f"{name}: entry {z!r} is not [re, im]")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise InputError(f"{name}: rows have different lengths")
        rows.append(row)
    if not all(math.isfinite(c.real) and math.isfinite(c.imag) for row in rows for c in row):
        raise InputError(f"{name}: entries must be finite")
    if not rows:
        return np.zeros((0, 0), dtype=complex)
    return np.array(rows, dtype=complex)


def _require(obj, keys, what):
    if not isinstance(obj, dict):
        raise InputError(f"{what} must be a JSON object")
    missing = [k for k in keys if k not in obj]
    if missing:
        raise InputError(f"{what} is missing {missing}")


def tower_point_to_json(p):
    if p is INFINITY:
        return BASEPOINT_JSON
    theta = BASEPOINT_JSON if p.theta is INFINITY else matrix_to_json(p.theta)
    return {"k": p.k, "alpha": matrix_to_json(p.alpha), "theta": theta}


def tower_point_from_json(obj):
    if obj == BASEPOINT_JSON:
        return INFINITY
    _require(obj, ["k", "alpha", "theta"], "tower point")
    if obj["theta"] == BASEPOINT_JSON:
        return INFINITY
    k = obj["k"]
    if not isinstance(k, int) or isinstance(k, bool) or k < 0:
        raise InputError("k must be a nonnegative integer")
    alpha = matrix_from_json(obj["alpha"], "alpha")
    theta = matrix_from_json(obj["theta"], "theta")
    if alpha.shape[0] != alpha.shape[1] or theta.shape[1] != alpha.shape[0] or k > alpha.shape[0]:
        raise InputError(f"inconsistent shapes alpha {alpha.shape}, theta {theta.shape}, k = {k}")
    return TowerPoint(k, alpha, theta)


def thom_point_to_json(q):
    if q is INFINITY:
        return BASEPOINT_JSON
    out = {"kind": q.kind, "W": matrix_to_json(q.W), "gamma": matrix_to_json(q.gamma),
           "psi": matrix_to_json(q.psi)}
    if q.suspension is not None:
        out["suspension"] = _clean(q.suspension)
    return out


def thom_point_from_json(obj):
    if obj == BASEPOINT_JSON:
        return INFINITY
    _require(obj, ["kind", "W", "gamma", "psi"], "Thom point")
    if obj.get("suspension") == BASEPOINT_JSON:
        return INFINITY
    s = obj.get("suspension")
    if s is not None and not (isinstance(s, (int, float)) and not isinstance(s, bool)):
        raise InputError("suspension must be a real number or \"basepoint\"")
    try:
        return ThomPoint(obj["kind"], matrix_from_json(obj["W"], "W"),
                         matrix_from_json(obj["gamma"], "gamma"),
                         matrix_from_json(obj["psi"], "psi"),
                         None if s is None else float(s))
    except ValueError as exc:
        raise InputError(str(exc)) from None


def value_to_json(v):
    """Render whatever an evaluator returned."""
    if v is INFINITY:
        return BASEPOINT_JSON
    if isinstance(v, TowerPoint):
        return tower_point_to_json(v)
    if isinstance(v, ThomPoint):
        return thom_point_to_json(v)
    if isinstance(v, Tagged):
        return {"op": matrix_to_json(v.op), "tag": value_to_json(v.tag)}
    if isinstance(v, Smash):
        return {"point": value_to_json(v.point), "tag": value_to_json(v.tag)}
    if isinstance(v, np.ndarray):
        return matrix_to_json(v) if v.ndim == 2 else [value_to_json(x) for x in v]
    if isinstance(v, (tuple, list)):
        return [value_to_json(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return _clean(v)
    if isinstance(v, dict):
        return {k: value_to_json(x) for k, x in v.items()}
    return v


def dumps(obj) -> str:
    """Deterministic JSON text."""
    return json.dumps(obj, sort_keys=True, separators=(", ", ": "), allow_nan=False)


def load_json_file(path: str, what: str = "input"):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise InputError(f"{what} file {path!r} does not exist") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{what} file {path!r} is not valid JSON: {exc}") from None
