"""CSV/JSON serialization for paths and reports.

Formats are fixed so downstream plotting needs no bespoke parsers:
grid functions and lattice paths are `t,value` CSV or {"m"/"n", "values"}
JSON; coupled triples are `k,walk,correction,bridge`; sign paths are one
+-1 row.  Multi-replication files prepend a `rep` column.  Floats are
written with repr (shortest round-trip), so output is byte-stable for a
given numpy version.
"""

from __future__ import annotations

import io
import json

import numpy as np

from .bernoulli import SignPath
from .coupling import CoupledTriple
from .empirical import GridFunction
from .stats import StatReport
from .walks import LatticePath


def grid_function_to_dict(g: GridFunction) -> dict:
    return {"m": g.m, "values": [float(v) for v in g.values]}


def lattice_path_to_dict(p: LatticePath) -> dict:
    return {"n": p.n, "values": [int(v) for v in p.values]}


def coupled_triple_to_dict(c: CoupledTriple) -> dict:
    return {
        "n": c.walk.n,
        "walk": [int(v) for v in c.walk.values],
        "correction": [int(v) for v in c.correction.values],
        "bridge": [int(v) for v in c.bridge.values],
    }


def sign_path_to_dict(s: SignPath) -> dict:
    return {"two_n": s.two_n, "increments": [int(v) for v in s.increments]}


def path_to_dict(obj) -> dict:
    if isinstance(obj, GridFunction):
        return grid_function_to_dict(obj)
    if isinstance(obj, CoupledTriple):
        return coupled_triple_to_dict(obj)
    if isinstance(obj, LatticePath):
        return lattice_path_to_dict(obj)
    if isinstance(obj, SignPath):
        return sign_path_to_dict(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def paths_to_json(paths) -> str:
    return json.dumps([path_to_dict(p) for p in paths], indent=2) + "\n"


def _csv_rows(obj, rep: int | None):
    prefix = () if rep is None else (rep,)
    if isinstance(obj, GridFunction):
        for t, v in zip(obj.grid, obj.values):
            yield prefix + (repr(float(t)), repr(float(v)))
    elif isinstance(obj, CoupledTriple):
        for k in range(obj.walk.n + 1):
            yield prefix + (
                k,
                int(obj.walk.values[k]),
                int(obj.correction.values[k]),
                int(obj.bridge.values[k]),
            )
    elif isinstance(obj, LatticePath):
        for k, v in enumerate(obj.values):
            yield prefix + (k, int(v))
    elif isinstance(obj, SignPath):
        yield prefix + tuple(int(v) for v in obj.increments)
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def _csv_header(obj, with_rep: bool) -> str | None:
    prefix = "rep," if with_rep else ""
    if isinstance(obj, GridFunction):
        return prefix + "t,value"
    if isinstance(obj, CoupledTriple):
        return prefix + "k,walk,correction,bridge"
    if isinstance(obj, LatticePath):
        return prefix + "t,value"
    if isinstance(obj, SignPath):
        return None  # one bare +-1 row per path
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def paths_to_csv(paths) -> str:
    paths = list(paths)
    if not paths:
        return ""
    with_rep = len(paths) > 1
    out = io.StringIO()
    header = _csv_header(paths[0], with_rep)
    if header is not None:
        out.write(header + "\n")
    for rep, p in enumerate(paths):
        for row in _csv_rows(p, rep if with_rep else None):
            out.write(",".join(str(x) for x in row) + "\n")
    return out.getvalue()


def reports_to_json(reports: list[StatReport]) -> str:
    return json.dumps([r.to_json_dict() for r in reports], indent=2) + "\n"


def study_rows_to_csv(columns: list[str], rows: list[tuple]) -> str:
    out = io.StringIO()
    out.write(",".join(columns) + "\n")
    for row in rows:
        out.write(",".join(repr(x) if isinstance(x, float) else str(x) for x in row) + "\n")
    return out.getvalue()
