"""Strict JSON problem files.

A problem file is one object::

    {"version": "1", "kind": "...", "payload": {...},
     "policy": {"relative_threshold": 1e-8, "absolute_floor": 1e-12},
     "schedule": {"w0": 1e-2, "ratio": 0.5, "theta": null,
                  "max_steps": 40, "stabilization_tol": 1e-7}}

Complex scalars are ``[re, im]``, matrices are row-major nested lists of
complex scalars, polynomials are lists of ``{"e": [exponents], "c": [re, im]}``.
Unknown keys are rejected everywhere so that typos surface as errors.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from torsion_lab.errors import ModelError
from torsion_lab.linalg import RankPolicy
from torsion_lab.polynomial import MultiPolynomial
from torsion_lab.tame_symbol import LimitSchedule

FORMAT_VERSION = "1"
KINDS = ("koszul", "joint-torsion", "tame-symbol", "carey-pincus", "noether", "axioms")


class ValidationError(ModelError):
    """A problem file does not match the format; ``path`` locates the field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.reason = message


@dataclass
class Problem:
    kind: str
    payload: dict[str, Any]
    policy: RankPolicy | None = None
    schedule: LimitSchedule | None = None


def _keys(obj, path: str, required: set[str], optional: set[str] = frozenset()) -> dict:
    if not isinstance(obj, dict):
        raise ValidationError(path, "expected an object")
    missing = required - set(obj)
    if missing:
        raise ValidationError(path, f"missing key(s) {sorted(missing)}")
    unknown = set(obj) - required - set(optional)
    if unknown:
        raise ValidationError(path, f"unknown key(s) {sorted(unknown)}")
    return obj


def _real(v, path: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ValidationError(path, "expected a finite number")
    return float(v)


def parse_complex(v, path: str) -> complex:
    if not isinstance(v, list) or len(v) != 2:
        raise ValidationError(path, "complex scalars are [re, im]")
    return complex(_real(v[0], f"{path}[0]"), _real(v[1], f"{path}[1]"))


def parse_matrix(v, path: str) -> np.ndarray:
    if not isinstance(v, list):
        raise ValidationError(path, "expected a row-major list of rows")
    if not v:
        return np.zeros((0, 0), dtype=complex)
    rows = []
    width = None
    for i, row in enumerate(v):
        if not isinstance(row, list):
            raise ValidationError(f"{path}[{i}]", "expected a row")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ValidationError(f"{path}[{i}]", f"row length {len(row)} != {width}")
        rows.append([parse_complex(c, f"{path}[{i}][{j}]") for j, c in enumerate(row)])
    return np.array(rows, dtype=complex).reshape(len(rows), width)


def parse_square_matrices(v, path: str) -> list[np.ndarray]:
    if not isinstance(v, list):
        raise ValidationError(path, "expected a list of matrices")
    mats = [parse_matrix(m, f"{path}[{i}]") for i, m in enumerate(v)]
    for i, m in enumerate(mats):
        if m.shape[0] != m.shape[1]:
            raise ValidationError(f"{path}[{i}]", f"matrix is {m.shape[0]}x{m.shape[1]}, not square")
        if m.shape != mats[0].shape:
            raise ValidationError(f"{path}[{i}]", f"shape {m.shape} differs from {mats[0].shape}")
    return mats


def parse_polynomial(v, path: str, nvars: int | None = None) -> MultiPolynomial:
    try:
        p = MultiPolynomial.from_json(v, nvars)
    except ModelError as exc:
        raise ValidationError(path, str(exc)) from None
    if nvars is not None and p.nvars != nvars:
        raise ValidationError(path, f"expected {nvars} variables, got {p.nvars}")
    return p


def parse_point(v, path: str, n: int) -> tuple[complex, ...]:
    if not isinstance(v, list) or len(v) != n:
        raise ValidationError(path, f"expected {n} complex coordinates")
    return tuple(parse_complex(c, f"{path}[{i}]") for i, c in enumerate(v))


def parse_policy(v, path: str = "policy") -> RankPolicy:
    obj = _keys(v, path, set(), {"relative_threshold", "absolute_floor"})
    kw = {k: _real(obj[k], f"{path}.{k}") for k in obj}
    try:
        return RankPolicy(**kw)
    except ValueError as exc:
        raise ValidationError(path, str(exc)) from None


def parse_schedule(v, path: str = "schedule") -> LimitSchedule:
    obj = _keys(v, path, set(), {"w0", "ratio", "theta", "max_steps", "stabilization_tol"})
    kw: dict[str, Any] = {}
    for k in ("w0", "ratio", "stabilization_tol"):
        if k in obj:
            kw[k] = _real(obj[k], f"{path}.{k}")
    if obj.get("theta") is not None:
        kw["theta"] = _real(obj["theta"], f"{path}.theta")
    if "max_steps" in obj:
        if isinstance(obj["max_steps"], bool) or not isinstance(obj["max_steps"], int):
            raise ValidationError(f"{path}.max_steps", "expected an integer")
        kw["max_steps"] = obj["max_steps"]
    try:
        return LimitSchedule(**kw)
    except ModelError as exc:
        raise ValidationError(path, str(exc)) from None


def _degree_map(v, path: str, parse) -> dict[int, Any]:
    if not isinstance(v, dict):
        raise ValidationError(path, "expected an object keyed by integer degree")
    out = {}
    for k, item in v.items():
        try:
            deg = int(k)
        except ValueError:
            raise ValidationError(f"{path}.{k}", "degree keys must be integers") from None
        out[deg] = parse(item, f"{path}.{k}")
    return out


def _dim(v, path: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int) or v < 0:
        raise ValidationError(path, "expected a nonnegative integer")
    return v


# payload readers -----------------------------------------------------------


def _payload_koszul(p, path):
    obj = _keys(p, path, {"matrices"}, {"dim"})
    mats = parse_square_matrices(obj["matrices"], f"{path}.matrices")
    dim = _dim(obj["dim"], f"{path}.dim") if "dim" in obj else None
    if not mats and dim is None:
        raise ValidationError(f"{path}.dim", "an empty tuple needs an explicit dim")
    if mats and dim is not None and dim != mats[0].shape[0]:
        raise ValidationError(f"{path}.dim", f"dim {dim} != matrix size {mats[0].shape[0]}")
    return {"matrices": mats, "dim": dim if dim is not None else mats[0].shape[0]}


def _payload_joint_torsion(p, path):
    if not isinstance(p, dict):
        raise ValidationError(path, "expected an object")
    model = p.get("model", "matrix")
    if model == "matrix":
        obj = _keys(p, path, {"matrices", "f", "g"}, {"model", "h"})
        mats = parse_square_matrices(obj["matrices"], f"{path}.matrices")
        if not mats:
            raise ValidationError(f"{path}.matrices", "the matrix model needs at least one matrix")
        n = len(mats)
        hs = obj.get("h", [])
        if not isinstance(hs, list):
            raise ValidationError(f"{path}.h", "expected a list of polynomials")
        return {
            "model": "matrix",
            "matrices": mats,
            "h": [parse_polynomial(q, f"{path}.h[{i}]", n) for i, q in enumerate(hs)],
            "f": parse_polynomial(obj["f"], f"{path}.f", n),
            "g": parse_polynomial(obj["g"], f"{path}.g", n),
        }
    if model == "complex":
        obj = _keys(p, path, {"model", "dims", "differentials", "f", "g"})
        dims = _degree_map(obj["dims"], f"{path}.dims", _dim)
        return {
            "model": "complex",
            "dims": dims,
            "differentials": _degree_map(obj["differentials"], f"{path}.differentials", parse_matrix),
            "f": _degree_map(obj["f"], f"{path}.f", parse_matrix),
            "g": _degree_map(obj["g"], f"{path}.g", parse_matrix),
        }
    raise ValidationError(f"{path}.model", f"unknown model {model!r}; use 'matrix' or 'complex'")


def _payload_tame_symbol(p, path):
    if not isinstance(p, dict):
        raise ValidationError(path, "expected an object")
    route = p.get("route", "limit")
    if route == "limit":
        obj = _keys(p, path, {"h", "f", "g", "point"}, {"route", "epsilon"})
        eps = obj.get("epsilon")
        if eps is not None:
            eps = _real(eps, f"{path}.epsilon")
            if eps <= 0:
                raise ValidationError(f"{path}.epsilon", "must be positive")
        return {
            "route": "limit",
            "h": parse_polynomial(obj["h"], f"{path}.h", 2),
            "f": parse_polynomial(obj["f"], f"{path}.f", 2),
            "g": parse_polynomial(obj["g"], f"{path}.g", 2),
            "point": parse_point(obj["point"], f"{path}.point", 2),
            "epsilon": eps,
        }
    if route == "regular":
        obj = _keys(p, path, {"route", "f", "g", "point"})
        return {
            "route": "regular",
            "f": parse_polynomial(obj["f"], f"{path}.f", 1),
            "g": parse_polynomial(obj["g"], f"{path}.g", 1),
            "point": parse_complex(obj["point"], f"{path}.point"),
        }
    raise ValidationError(f"{path}.route", f"unknown route {route!r}; use 'limit' or 'regular'")


def _payload_carey_pincus(p, path):
    obj = _keys(p, path, {"f", "g"})
    return {"f": parse_polynomial(obj["f"], f"{path}.f", 1), "g": parse_polynomial(obj["g"], f"{path}.g", 1)}


def _payload_noether(p, path):
    obj = _keys(p, path, {"f"}, {"nodes"})
    out = {"f": parse_polynomial(obj["f"], f"{path}.f", 1), "nodes": 4096}
    if "nodes" in obj:
        out["nodes"] = _dim(obj["nodes"], f"{path}.nodes")
        if out["nodes"] < 16:
            raise ValidationError(f"{path}.nodes", "use at least 16 quadrature nodes")
    return out


def _payload_axioms(p, path):
    obj = _keys(p, path, {"h", "f1", "f2", "f3", "t", "point"})
    out = {k: parse_polynomial(obj[k], f"{path}.{k}", 2) for k in ("h", "f1", "f2", "f3", "t")}
    out["point"] = parse_point(obj["point"], f"{path}.point", 2)
    return out


_PAYLOADS = {
    "koszul": _payload_koszul,
    "joint-torsion": _payload_joint_torsion,
    "tame-symbol": _payload_tame_symbol,
    "carey-pincus": _payload_carey_pincus,
    "noether": _payload_noether,
    "axioms": _payload_axioms,
}


def parse_problem(data) -> Problem:
    obj = _keys(data, "$", {"version", "kind", "payload"}, {"policy", "schedule"})
    if obj["version"] != FORMAT_VERSION:
        raise ValidationError("$.version", f"unsupported version {obj['version']!r}, expected {FORMAT_VERSION!r}")
    kind = obj["kind"]
    if kind not in _PAYLOADS:
        raise ValidationError("$.kind", f"unknown kind {kind!r}; expected one of {list(KINDS)}")
    payload = _PAYLOADS[kind](obj["payload"], "$.payload")
    policy = parse_policy(obj["policy"], "$.policy") if "policy" in obj else None
    schedule = parse_schedule(obj["schedule"], "$.schedule") if "schedule" in obj else None
    return Problem(kind, payload, policy, schedule)


def _reject_constant(name: str):
    raise ValueError(f"non-finite number {name} is not allowed")


def load_problem(path: str) -> Problem:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh, parse_constant=_reject_constant)
    except OSError as exc:
        raise ValidationError("$", f"cannot read {path}: {exc.strerror}") from None
    except ValueError as exc:
        raise ValidationError("$", f"invalid JSON: {exc}") from None
    return parse_problem(data)


# encoders -----------------------------------------------------------------


def encode_complex(z: complex) -> list[float]:
    z = complex(z)
    return [z.real + 0.0, z.imag + 0.0]  # no negative zeros


def encode_polar(z: complex) -> list[float]:
    z = complex(z.real + 0.0, z.imag + 0.0)
    return [abs(z), math.atan2(z.imag, z.real)]


def encode_matrix(m: np.ndarray) -> list:
    return [[encode_complex(c) for c in row] for row in np.asarray(m)]
