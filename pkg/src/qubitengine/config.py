"""Flat ``key = value`` run configuration."""

from __future__ import annotations

import ast
import hashlib
import operator
from dataclasses import fields
from pathlib import Path

import numpy as np

from .errors import DomainError

_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
        ast.Div: operator.truediv, ast.Pow: operator.pow, ast.USub: operator.neg, ast.UAdd: operator.pos}
_NAMES = {"pi": np.pi}


class ConfigError(DomainError):
    """Malformed or inconsistent configuration."""


def number(text):
    """Evaluate a numeric literal with + - * / ** and ``pi``."""
    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id in _NAMES:
            return _NAMES[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.operand))
        raise ConfigError(f"not a number: {text!r}")
    try:
        return ev(ast.parse(str(text).strip(), mode="eval"))
    except (SyntaxError, ZeroDivisionError) as exc:
        raise ConfigError(f"not a number: {text!r}") from exc


def number_list(text):
    items = [x for x in str(text).split(",") if x.strip()]
    return [number(x) for x in items]


def parse_config(text):
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"line {n}: expected key = value")
        key = key.strip()
        if key in out:
            raise ConfigError(f"line {n}: duplicate key {key!r}")
        out[key] = val.strip()
    return out


def load_config(path):
    return parse_config(Path(path).read_text())


def config_hash(cfg):
    canon = "\n".join(f"{k}={cfg[k]}" for k in sorted(cfg))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


_BOOL = {"true": True, "yes": True, "1": True, "false": False, "no": False, "0": False}
_STR_FIELDS = {"kind", "split", "profile", "convention"}
_INT_FIELDS = {"l"}
_BOOL_FIELDS = {"coupling", "strict"}
_CYCLE_ALIASES = {"Omega_1": 0, "Omega_2": 1, "Omega_3": 2, "Omega_4": 3}


def cycle_spec_from(cfg, strict=False):
    """Build a :class:`~qubitengine.cycles.CycleSpec` from config entries."""
    from .cycles import DEFAULT_OMEGAS, CycleSpec

    names = {f.name for f in fields(CycleSpec)}
    kw = {}
    if "kind" not in cfg:
        raise ConfigError("missing 'kind'")
    kind = cfg["kind"]
    if kind not in DEFAULT_OMEGAS:
        raise ConfigError(f"unknown kind {kind!r}")
    om = list(DEFAULT_OMEGAS[kind])
    custom = False
    for key, val in cfg.items():
        if key in _CYCLE_ALIASES:
            om[_CYCLE_ALIASES[key]] = number(val)
            custom = True
        elif key in names and key not in ("omegas", "kind"):
            if key in _STR_FIELDS:
                kw[key] = val
            elif key in _INT_FIELDS:
                kw[key] = int(number(val))
            elif key in _BOOL_FIELDS:
                if val.lower() not in _BOOL:
                    raise ConfigError(f"{key}: expected a boolean")
                kw[key] = _BOOL[val.lower()]
            else:
                kw[key] = number(val)
    if "tau_cyc" in kw and cfg.get("tau_unit", "model") == "omega_min":
        kw["tau_cyc"] *= 2.0 * np.pi / min(om)
    if kind == "local-carnot" and not custom and "Omega_min" in cfg:
        spec = CycleSpec.local_carnot(kw.pop("T_h", 10.0), kw.pop("T_c", 5.0), number(cfg["Omega_min"]),
                                      number(cfg.get("compression", "3")), **kw)
    else:
        spec = CycleSpec(kind, omegas=tuple(om), **kw)
    if strict:
        from dataclasses import replace
        spec = replace(spec, strict=True)
    return spec


KNOWN_KEYS = (set(("kind", "T_h", "T_c", "A", "A_h", "A_c", "tau_cyc", "mu", "Phi", "l", "k_d",
                            "split", "profile", "tau_h", "tau_c", "tau_adi", "gamma", "gamma_tau",
                            "coupling", "convention", "dT", "dt", "strict", "tau_unit", "Omega_min",
                            "compression", "sweep_param", "sweep_values", "sweep_min", "sweep_max",
                            "sweep_n", "sweep_scale", "k_d_values", "tau_values", "protocol",
                            "Omega_i", "Omega_f", "T", "tau", "phi_i", "phi_f", "omega_i", "omega_f",
                            "epsilon", "a", "seed", "tol", "workers"))
              | set(_CYCLE_ALIASES))


def check_keys(cfg):
    unknown = sorted(set(cfg) - KNOWN_KEYS)
    if unknown:
        raise ConfigError(f"unknown keys: {', '.join(unknown)}")


def sweep_values(cfg, prefix="sweep"):
    """Values from ``<prefix>_values`` or ``<prefix>_min/_max/_n/_scale``."""
    if f"{prefix}_values" in cfg:
        vals = number_list(cfg[f"{prefix}_values"])
    elif f"{prefix}_min" in cfg:
        lo, hi = number(cfg[f"{prefix}_min"]), number(cfg[f"{prefix}_max"])
        n = int(number(cfg.get(f"{prefix}_n", "20")))
        scale = cfg.get(f"{prefix}_scale", "log")
        if scale not in ("log", "linear"):
            raise ConfigError(f"{prefix}_scale must be log or linear")
        if n < 1:
            vals = []
        elif scale == "log":
            vals = list(np.geomspace(lo, hi, n))
        else:
            vals = list(np.linspace(lo, hi, n))
    else:
        vals = []
    if not vals:
        raise ConfigError("empty sweep")
    return vals
