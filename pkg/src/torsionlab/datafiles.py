"""JSON loading for complexes and filtrations, and access to the bundled examples."""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Mapping

from .errors import SchemaError
from .exterior import TorusBase
from .torsion import FiltrationData, FlatComplexWithMetrics

BASES = {"point": 0, "t1": 1, "t2": 2}
DEFAULT_GRID = {0: 0, 1: 64, 2: 32}

BUNDLED = ("scalar_r2", "equal_metrics", "t1_anomaly", "bad_d2")


def make_base(kind: str, grid: int | None = None) -> TorusBase:
    if kind not in BASES:
        raise SchemaError(f"base must be one of {', '.join(BASES)}, got {kind!r}")
    dim = BASES[kind]
    return TorusBase(dim, DEFAULT_GRID[dim] if grid is None else int(grid))


def read_json(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(obj, dict):
        raise SchemaError(f"{path}: top level must be an object")
    return obj


def complex_from_obj(obj: Mapping, base: str | None = None, grid: int | None = None) -> FlatComplexWithMetrics:
    """Build a complex; ``base`` and ``grid`` override the optional keys of the same name in the file."""
    kind = base or obj.get("base")
    if kind is None:
        raise SchemaError("no base given on the command line or in the file")
    grid = grid if grid is not None else obj.get("grid")
    return FlatComplexWithMetrics.from_json(obj, make_base(kind, grid))


def load_complex(path, base: str | None = None, grid: int | None = None) -> FlatComplexWithMetrics:
    return complex_from_obj(read_json(path), base, grid)


def load_filtration(path) -> FiltrationData:
    return FiltrationData.from_json(read_json(path))


def bundled_path(name: str) -> Path:
    if name not in BUNDLED:
        raise KeyError(f"no bundled example {name!r}")
    return Path(str(resources.files("torsionlab") / "data" / f"{name}.json"))


def bundled_complex(name: str, grid: int | None = None) -> FlatComplexWithMetrics:
    return load_complex(bundled_path(name), grid=grid)
