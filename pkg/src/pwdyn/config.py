"""Experiment configuration: JSON schema, loading and object construction.

A config is a JSON object.  Every number that enters exact arithmetic is
written as a scalar string (``"1/3"``, ``"-1/2 + 1/2*sqrt(5)"``); plain
JSON integers are accepted where the schema says ``integer``.  See
``docs/config.md`` for the full reference.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import jsonschema

from .errors import ValidationError
from .iet import Iet, from_permutation, keynes_newton, power, rotation
from .itm import Itm
from .pwi2d import ConvexPoly, PolyDensity, PwRotation, RotMap
from .scalar import parse_scalar
from .stepfn import StepFn

__all__ = ["ConfigError", "ExperimentConfig", "load_config", "parse_config", "CONFIG_SCHEMA"]

_SCALAR = {"type": "string", "pattern": r"^[0-9+\-*/ sqrt()]+$"}
_SCALARS = {"type": "array", "items": _SCALAR}
_POINT = {"type": "array", "items": _SCALAR, "minItems": 2, "maxItems": 2}
_POLY = {"type": "array", "items": _POINT, "minItems": 3}

_MAP_SCHEMA = {
    "type": "object",
    "required": ["type"],
    "properties": {
        "type": {"enum": ["iet", "itm", "rotation", "keynes_newton", "permutation", "pwrotation"]},
        "breakpoints": _SCALARS,
        "translations": _SCALARS,
        "gamma": _SCALAR,
        "beta": _SCALAR,
        "power": {"type": "integer"},
        "lengths": _SCALARS,
        "permutation": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "atoms": {"type": "array", "items": _POLY, "minItems": 1},
        "maps": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["c", "s"],
                "properties": {"c": _SCALAR, "s": _SCALAR, "offset": _POINT, "center": _POINT},
                "additionalProperties": False,
            },
        },
        "ambient": _POLY,
        "field_d": {"type": ["integer", "null"]},
    },
    "additionalProperties": False,
    "allOf": [
        {"if": {"properties": {"type": {"enum": ["iet", "itm"]}}},
         "then": {"required": ["breakpoints", "translations"]}},
        {"if": {"properties": {"type": {"const": "rotation"}}}, "then": {"required": ["gamma"]}},
        {"if": {"properties": {"type": {"const": "keynes_newton"}}}, "then": {"required": ["beta", "gamma"]}},
        {"if": {"properties": {"type": {"const": "permutation"}}},
         "then": {"required": ["lengths", "permutation"]}},
        {"if": {"properties": {"type": {"const": "pwrotation"}}},
         "then": {"required": ["atoms", "maps", "ambient"]}},
    ],
}

_SEED_SCHEMA = {
    "oneOf": [
        {"type": "object", "required": ["breakpoints", "values"],
         "properties": {"breakpoints": _SCALARS, "values": _SCALARS}, "additionalProperties": False},
        {"type": "object", "required": ["indicator"],
         "properties": {"indicator": {"type": "array", "items": _SCALAR, "minItems": 2, "maxItems": 2},
                        "value": _SCALAR}, "additionalProperties": False},
        {"type": "object", "required": ["cells"],
         "properties": {"cells": {"type": "array", "items": {
             "type": "object", "required": ["polygon", "value"],
             "properties": {"polygon": _POLY, "value": _SCALAR}, "additionalProperties": False}}},
         "additionalProperties": False},
    ]
}

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["map"],
    "properties": {
        "map": _MAP_SCHEMA,
        "second_map": _MAP_SCHEMA,
        "seeds": {"type": "array", "items": _SEED_SCHEMA},
        "iterations": {"oneOf": [{"type": "integer", "minimum": 1},
                                 {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1}]},
        "depth": {"type": "integer", "minimum": 0},
        "delta": _SCALAR,
        "cell_budget": {"type": "integer", "minimum": 1},
        "tolerance": _SCALAR,
        "null_tolerance": _SCALAR,
        "points": _SCALARS,
        "nomadic_n": {"type": "integer", "minimum": 1},
        "extra_cuts": _SCALARS,
        "box_exponents": {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 2},
        "keane_depth": {"type": "integer", "minimum": 1},
        "random_seed": {"type": "integer"},
        "output": {
            "type": "object",
            "properties": {"dir": {"type": "string"},
                           "formats": {"type": "array", "items": {"enum": ["json", "csv", "svg"]}},
                           "samples": {"type": "integer", "minimum": 1}},
            "additionalProperties": False,
        },
    },
    "additionalProperties": False,
}


class ConfigError(ValidationError):
    pass


@dataclass
class ExperimentConfig:
    map: Any
    raw: dict
    second_map: Any = None
    seeds: list = field(default_factory=list)
    iterations: list = field(default_factory=lambda: [1000])
    depth: int = 10
    delta: Any = None
    cell_budget: int | None = None
    tolerance: Any = None
    null_tolerance: Any = None
    points: list = field(default_factory=list)
    nomadic_n: int = 1000
    extra_cuts: list = field(default_factory=list)
    box_exponents: list | None = None
    keane_depth: int | None = None
    random_seed: int | None = None
    out_dir: str | None = None
    formats: list = field(default_factory=lambda: ["json"])
    samples: int = 200


def _scalar(raw, where):
    try:
        return parse_scalar(raw)
    except ValueError as exc:
        raise ConfigError(f"field {where}: {exc}") from None


def build_map(data: dict, where: str = "map"):
    kind = data["type"]
    try:
        if kind in ("iet", "itm"):
            cls = Iet if kind == "iet" else Itm
            return cls(tuple(_scalar(b, f"{where}.breakpoints") for b in data["breakpoints"]),
                       tuple(_scalar(t, f"{where}.translations") for t in data["translations"]))
        if kind == "rotation":
            return rotation(_scalar(data["gamma"], f"{where}.gamma"))
        if kind == "keynes_newton":
            f = keynes_newton(_scalar(data["beta"], f"{where}.beta"), _scalar(data["gamma"], f"{where}.gamma"))
            return power(f, data.get("power", 1))
        if kind == "permutation":
            return from_permutation([_scalar(x, f"{where}.lengths") for x in data["lengths"]],
                                    data["permutation"])
        atoms = [ConvexPoly.from_json(a) for a in data["atoms"]]
        if len(data["maps"]) != len(atoms):
            raise ConfigError(f"field {where}.maps: need one map per atom")
        maps = []
        for i, m in enumerate(data["maps"]):
            c, s = _scalar(m["c"], f"{where}.maps[{i}].c"), _scalar(m["s"], f"{where}.maps[{i}].s")
            if "center" in m:
                maps.append(RotMap.about(c, s, tuple(_scalar(v, f"{where}.maps[{i}].center") for v in m["center"])))
            else:
                off = m.get("offset", ["0", "0"])
                maps.append(RotMap(c, s, _scalar(off[0], f"{where}.maps[{i}].offset"),
                                   _scalar(off[1], f"{where}.maps[{i}].offset")))
        return PwRotation(tuple(atoms), tuple(maps), ConvexPoly.from_json(data["ambient"]))
    except ConfigError:
        raise
    except (ValidationError, ValueError, TypeError) as exc:
        raise ConfigError(f"field {where}: {exc}") from None


def build_seed(data: dict, where: str):
    try:
        if "cells" in data:
            return PolyDensity.from_json(data["cells"])
        if "indicator" in data:
            a, b = (_scalar(x, where) for x in data["indicator"])
            return StepFn.indicator(a, b, _scalar(data.get("value", "1"), where))
        return StepFn.from_json(data)
    except ConfigError:
        raise
    except (ValidationError, ValueError) as exc:
        raise ConfigError(f"field {where}: {exc}") from None


def _path(err: jsonschema.ValidationError) -> str:
    out = ""
    for p in err.absolute_path:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else str(p))
    return out or "<root>"


def parse_config(raw: dict) -> ExperimentConfig:
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(raw), key=lambda e: list(e.absolute_path))
    if errors:
        lines = [f"field {_path(e)}: {e.message}" for e in errors]
        raise ConfigError("invalid config:\n  " + "\n  ".join(lines))
    cfg = ExperimentConfig(map=build_map(raw["map"]), raw=raw)
    if "second_map" in raw:
        cfg.second_map = build_map(raw["second_map"], "second_map")
    cfg.seeds = [build_seed(s, f"seeds[{i}]") for i, s in enumerate(raw.get("seeds", []))]
    it = raw.get("iterations")
    if it is not None:
        cfg.iterations = [it] if isinstance(it, int) else sorted(set(it))
    cfg.depth = raw.get("depth", cfg.depth)
    if "delta" in raw:
        cfg.delta = _scalar(raw["delta"], "delta")
    cfg.cell_budget = raw.get("cell_budget")
    if "tolerance" in raw:
        cfg.tolerance = _scalar(raw["tolerance"], "tolerance")
    if "null_tolerance" in raw:
        cfg.null_tolerance = _scalar(raw["null_tolerance"], "null_tolerance")
    cfg.points = [_scalar(p, f"points[{i}]") for i, p in enumerate(raw.get("points", []))]
    cfg.nomadic_n = raw.get("nomadic_n", cfg.nomadic_n)
    cfg.extra_cuts = [_scalar(c, f"extra_cuts[{i}]") for i, c in enumerate(raw.get("extra_cuts", []))]
    cfg.box_exponents = raw.get("box_exponents")
    cfg.keane_depth = raw.get("keane_depth")
    cfg.random_seed = raw.get("random_seed")
    out = raw.get("output", {})
    cfg.out_dir = out.get("dir")
    cfg.formats = out.get("formats", cfg.formats)
    cfg.samples = out.get("samples", cfg.samples)
    return cfg


def load_config(path: str | Path) -> ExperimentConfig:
    text = Path(path).read_text(encoding="utf-8")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return parse_config(raw)
