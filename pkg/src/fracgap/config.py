"""Run configuration: JSON schema, defaults, sweep expansion.

A config is a JSON object with ``schema_version`` 1 and a ``problem``.
Unknown keys are rejected. ``sweep`` holds one axis or a list of axes
(cartesian product, first axis slowest); each axis names a dotted path into
the resolved config, e.g. ``alpha``, ``harmonic.eta`` or
``domain.lengths.1``.
"""

from __future__ import annotations

import copy
import hashlib
import itertools
import json
from dataclasses import dataclass, field
from decimal import Decimal

import jsonschema

from .errors import ConfigError
from .geometry import check_alpha

__all__ = ["SCHEMA", "SCHEMA_VERSION", "RunConfig", "parse_config", "load_config", "config_hash", "expand_sweep"]

SCHEMA_VERSION = 1
PROBLEMS = ("local", "classical", "wholespace", "periodic", "well", "asymptotic", "bounds")
MAX_SWEEP_POINTS = 100000

_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}
_int2 = {"type": "integer", "minimum": 2}


def _obj(props: dict, required=()) -> dict:
    return {"type": "object", "properties": props, "required": list(required), "additionalProperties": False}


_trig = _obj({"amplitude": _num, "kind": {"enum": ["cos", "sin"]},
              "frequency": {"type": "array", "items": _num, "minItems": 1, "maxItems": 2}},
             ("amplitude", "kind", "frequency"))
_sweep_axis = {
    "type": "object",
    "properties": {
        "parameter": {"type": "string", "minLength": 1},
        "values": {"type": "array", "minItems": 1},
        "range": _obj({"start": _num, "stop": _num, "step": _pos}, ("start", "stop", "step")),
    },
    "required": ["parameter"],
    "oneOf": [{"required": ["values"]}, {"required": ["range"]}],
    "additionalProperties": False,
}

SCHEMA = _obj({
    "schema_version": {"const": SCHEMA_VERSION},
    "problem": {"enum": list(PROBLEMS)},
    "alpha": _num,
    "domain": {"oneOf": [
        _obj({"type": {"const": "box"}, "lengths": {"type": "array", "items": _pos, "minItems": 1, "maxItems": 2}},
             ("type", "lengths")),
        _obj({"type": {"const": "ellipse"}, "a": _pos, "b": _pos}, ("type", "a", "b")),
    ]},
    "potential": {"oneOf": [
        _obj({"type": {"const": "zero"}}, ("type",)),
        _obj({"type": {"const": "quadratic"}, "coefficients": {"type": "array", "items": _num, "minItems": 1},
              "center": {"type": ["array", "null"], "items": _num}}, ("type", "coefficients")),
        _obj({"type": {"const": "quadratic_trig"}, "coefficients": {"type": "array", "items": _num, "minItems": 1},
              "center": {"type": ["array", "null"], "items": _num}, "terms": {"type": "array", "items": _trig}},
             ("type", "coefficients", "terms")),
    ]},
    "basis": {"oneOf": [
        _obj({"type": {"const": "analytic"}, "modes_per_dim": {"type": "array", "items": _int2, "minItems": 1}},
             ("type", "modes_per_dim")),
        _obj({"type": {"const": "fd"}, "h": _pos, "mode_count": _int2}, ("type", "h", "mode_count")),
    ]},
    "refine": {"type": "boolean"},
    "modes": {"type": "array", "items": _int2, "minItems": 1},
    "extrapolate": {"type": "boolean"},
    "kquad": _obj({"k_max": {"type": ["number", "null"]}, "h_k": {"type": ["number", "null"]},
                   "tail": {"type": "boolean"}, "nodes_per_panel": {"type": "integer", "minimum": 4}}),
    "harmonic": {"oneOf": [
        _obj({"gammas": {"type": "array", "items": _pos, "minItems": 1, "maxItems": 2}}, ("gammas",)),
        _obj({"gamma": _pos, "eta": {"type": "number", "minimum": 1}, "n": {"enum": [1, 2]}}, ("gamma",)),
    ]},
    "trig": {"type": "array", "items": _trig},
    "method": {"enum": ["hermite", "fd"]},
    "order": {"type": "integer", "minimum": 4},
    "kgrid": _obj({"radius": _pos, "spacing": _pos}, ("radius", "spacing")),
    "well": _obj({"V0": _pos, "inner": {"type": "array", "items": _pos, "minItems": 1, "maxItems": 2},
                  "enclosure_factor": {"type": "number", "minimum": 4},
                  "modes": {"type": "array", "items": _int2, "minItems": 1},
                  "V0_values": {"type": "array", "items": _pos, "minItems": 1}}),
    "periodic": _obj({"modes": {"type": "array", "items": _int2, "minItems": 1},
                      "potential_fourier": {"type": "array", "items": _obj(
                          {"frequency": {"type": "array", "items": {"type": "integer"}, "minItems": 1},
                           "re": _num, "im": _num}, ("frequency", "re"))},
                      "ratios": {"oneOf": [{"type": "array", "items": _num, "minItems": 1},
                                           _obj({"start": _num, "stop": _num, "step": _pos},
                                                ("start", "stop", "step"))]}}),
    "asymptotic": _obj({"formula": {"enum": ["box1d", "box2d", "harmonic1d", "harmonic2d"]},
                        "gamma": _pos, "eta": {"type": "number", "minimum": 1},
                        "L": _pos, "form": {"enum": ["derived", "printed", "closed"]}}, ("formula",)),
    "bounds": _obj({"kind": {"enum": ["local", "dirichlet", "wholespace"]}, "n": {"enum": [1, 2, 3]},
                    "D": _pos, "d": _pos, "gamma1": _pos, "gamma2": _pos}, ("kind",)),
    "sweep": {"oneOf": [_sweep_axis, {"type": "array", "items": _sweep_axis, "minItems": 1}]},
    "output": _obj({"format": {"enum": ["csv", "json"]}, "path": {"type": "string"}}),
}, ("schema_version", "problem"))

DEFAULTS = {
    "alpha": 1.0,
    "local": {"domain": {"type": "box", "lengths": [1.0]}, "potential": {"type": "zero"}, "refine": True},
    "classical": {"domain": {"type": "box", "lengths": [1.0]}, "potential": {"type": "zero"}, "extrapolate": False},
    "wholespace": {"harmonic": {"gammas": [1.0]}, "trig": [], "method": "hermite"},
    "periodic": {"domain": {"type": "box", "lengths": [1.0]}, "periodic": {}},
    "well": {"well": {"V0": 10000.0, "inner": [1.0], "enclosure_factor": 4.0}},
    "asymptotic": {},
    "bounds": {},
}


@dataclass(frozen=True)
class RunConfig:
    """A validated config with defaults filled in."""

    data: dict = field(repr=False)

    @property
    def problem(self) -> str:
        return self.data["problem"]

    @property
    def alpha(self) -> float:
        return self.data["alpha"]

    @property
    def sweep(self) -> list:
        s = self.data.get("sweep")
        if s is None:
            return []
        return [s] if isinstance(s, dict) else list(s)

    def canonical(self) -> str:
        return json.dumps(self.data, sort_keys=True, separators=(",", ":"))

    def hash(self) -> str:
        return config_hash(self.data)


def config_hash(data: dict) -> str:
    blob = json.dumps(data, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _validate(data):
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        where = "/".join(str(p) for p in e.absolute_path) or "<root>"
        if e.validator == "additionalProperties":
            raise ConfigError(f"unknown key at {where}: {e.message}")
        raise ConfigError(f"invalid value at {where}: {e.message}")


def _reject_constant(name):
    raise ConfigError(f"non-finite number {name} is not allowed")


def parse_config(text: str) -> RunConfig:
    """Parse and validate a JSON config document; fill in defaults."""
    try:
        data = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    _validate(data)
    resolved = copy.deepcopy(data)
    resolved.setdefault("alpha", DEFAULTS["alpha"])
    for key, value in DEFAULTS[resolved["problem"]].items():
        if key not in resolved:
            resolved[key] = copy.deepcopy(value)
        elif key in ("well", "periodic"):
            for k, v in value.items():
                resolved[key].setdefault(k, copy.deepcopy(v))
    cfg = RunConfig(resolved)
    expand_sweep(cfg)
    return cfg


def load_config(path: str) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)


def grid_values(spec) -> list:
    """Values of a {start, stop, step} range, stop included when hit.

    Decimal arithmetic keeps 0.1:0.1:2 free of accumulated rounding.
    """
    start, stop, step = (Decimal(repr(float(spec[k]))) for k in ("start", "stop", "step"))
    if stop < start:
        raise ConfigError("range stop must not be below start")
    count = int((stop - start) / step + Decimal("1e-9")) + 1
    if count > MAX_SWEEP_POINTS:
        raise ConfigError("range has too many points")
    return [float(start + i * step) for i in range(count)]


def _axis_values(axis) -> list:
    return list(axis["values"]) if "values" in axis else grid_values(axis["range"])


def set_path(data: dict, path: str, value):
    """Set a dotted path (list indices allowed) in place; the path must exist
    except for its last key inside an existing object."""
    parts = path.split(".")
    node = data
    for p in parts[:-1]:
        node = _step(node, p, path)
    last = parts[-1]
    if isinstance(node, list):
        idx = _index(last, node, path)
        node[idx] = value
    elif isinstance(node, dict):
        node[last] = value
    else:
        raise ConfigError(f"sweep parameter {path!r} does not name a config field")


def _index(token, node, path):
    try:
        idx = int(token)
    except ValueError:
        raise ConfigError(f"sweep parameter {path!r}: {token!r} is not a list index") from None
    if not 0 <= idx < len(node):
        raise ConfigError(f"sweep parameter {path!r}: index {idx} out of range")
    return idx


def _step(node, token, path):
    if isinstance(node, dict):
        if token not in node or not isinstance(node[token], (dict, list)):
            raise ConfigError(f"sweep parameter {path!r} does not name a config field")
        return node[token]
    if isinstance(node, list):
        return node[_index(token, node, path)]
    raise ConfigError(f"sweep parameter {path!r} does not name a config field")


def expand_sweep(cfg: RunConfig) -> list:
    """Sweep points as ``(values, data)`` pairs in row order.

    Each point's data is re-validated against the schema and its alpha
    checked, so a swept value outside its field's domain is an error before
    anything runs.
    """
    axes = cfg.sweep
    base = copy.deepcopy(cfg.data)
    base.pop("sweep", None)
    base.pop("output", None)
    if not axes:
        check_alpha(base["alpha"])
        return [((), base)]
    grids = [_axis_values(a) for a in axes]
    total = 1
    for g in grids:
        total *= len(g)
    if total > MAX_SWEEP_POINTS:
        raise ConfigError("sweep has too many points")
    points = []
    for combo in itertools.product(*grids):
        data = copy.deepcopy(base)
        for axis, value in zip(axes, combo):
            set_path(data, axis["parameter"], copy.deepcopy(value))
        _validate(data)
        check_alpha(data["alpha"])
        points.append((combo, data))
    return points
