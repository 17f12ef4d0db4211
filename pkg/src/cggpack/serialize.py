"""JSON formats for graphs, weights, LP outcomes, packings and run manifests."""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from fractions import Fraction
from typing import Any, Mapping

import numpy as np

from .errors import ParseError
from .graphs import Cgg, OrderedGraph
from .lp import FeasibilityOutcome
from .packing import Packing
from .weighted import WeightedCgg

_KINDS = {"cgg": Cgg, "ordered": OrderedGraph}


def frac_str(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def parse_frac(s, where: str = "$") -> Fraction:
    if isinstance(s, bool):
        raise ParseError("expected a rational", where)
    if isinstance(s, int):
        return Fraction(s)
    if isinstance(s, str):
        try:
            return Fraction(s)
        except (ValueError, ZeroDivisionError):
            pass
    raise ParseError(f"expected a rational like \"p/q\", got {s!r}", where)


def dumps(obj: Any) -> str:
    """Canonical text: sorted keys, compact separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False) + "\n"


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None


def read_json(path: str) -> Any:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def write_text_atomic(path: str, text: str) -> None:
    folder = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def sha256_file(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


# --- graphs -------------------------------------------------------------------


def graph_to_json(G) -> dict:
    kind = "cgg" if G.cyclic else "ordered"
    if G.complete:
        return {"kind": kind, "n": G.n, "complete": True}
    return {"kind": kind, "n": G.n, "edges": [list(e) for e in G.edge_list()]}


def _expect(obj, key, typ, where):
    if key not in obj:
        raise ParseError(f"missing key {key!r}", where)
    val = obj[key]
    if typ is int and (isinstance(val, bool) or not isinstance(val, int)):
        raise ParseError(f"{key!r} must be an integer", f"{where}.{key}")
    if typ is not int and not isinstance(val, typ):
        raise ParseError(f"{key!r} has the wrong type", f"{where}.{key}")
    return val


def graph_from_json(obj, where: str = "$"):
    if not isinstance(obj, dict):
        raise ParseError("a graph must be a JSON object", where)
    kind = _expect(obj, "kind", str, where)
    if kind not in _KINDS:
        raise ParseError(f"unknown graph kind {kind!r} (expected 'cgg' or 'ordered')", f"{where}.kind")
    cls = _KINDS[kind]
    n = _expect(obj, "n", int, where)
    if n < 0:
        raise ParseError("n must be nonnegative", f"{where}.n")
    if obj.get("complete") is True:
        return cls.complete_graph(n)
    edges = _expect(obj, "edges", list, where)
    pairs = []
    for i, e in enumerate(edges):
        at = f"{where}.edges[{i}]"
        if not (isinstance(e, list) and len(e) == 2 and all(isinstance(v, int) and not isinstance(v, bool) for v in e)):
            raise ParseError("an edge is a pair of integers", at)
        if not (0 <= e[0] < n and 0 <= e[1] < n) or e[0] == e[1]:
            raise ParseError(f"edge {e} is not a pair of distinct vertices in 0..{n - 1}", at)
        pairs.append(tuple(e))
    return cls.from_edges(n, pairs)


def parse_graph_text(text: str):
    return graph_from_json(loads(text))


def read_graph(path: str):
    return graph_from_json(read_json(path))


# --- weights and LP outcomes --------------------------------------------------


def weighted_to_json(w: WeightedCgg) -> dict:
    return {"k": w.k, "weights": [frac_str(x) for x in w.weights]}


def weighted_from_json(obj, where: str = "$") -> WeightedCgg:
    if not isinstance(obj, dict):
        raise ParseError("weights must be a JSON object", where)
    k = _expect(obj, "k", int, where)
    vals = _expect(obj, "weights", list, where)
    ws = [parse_frac(v, f"{where}.weights[{i}]") for i, v in enumerate(vals)]
    try:
        return WeightedCgg(k, tuple(ws))
    except ValueError as exc:
        raise ParseError(str(exc), where) from None


def outcome_to_json(outcome: FeasibilityOutcome) -> dict:
    out: dict = {"feasible": outcome.feasible, "m": outcome.m, "pivots": outcome.pivots}
    if outcome.feasible:
        if outcome.classes is not None:
            out["x"] = [
                {"gaps": list(outcome.classes[j].gaps), "value": frac_str(v)} for j, v in sorted(outcome.x.items())
            ]
        else:
            out["x"] = {str(j): frac_str(v) for j, v in sorted(outcome.x.items())}
    else:
        out["y"] = [frac_str(v) for v in outcome.y]
    return out


# --- packings -----------------------------------------------------------------


def packing_to_json(P: Packing) -> dict:
    return {
        "host": graph_to_json(P.host),
        "pattern": graph_to_json(P.pattern),
        "copies": np.asarray(P.copies).tolist(),
        "coverage": frac_str(P.coverage),
    }


def packing_from_json(obj, where: str = "$") -> Packing:
    if not isinstance(obj, dict):
        raise ParseError("a packing must be a JSON object", where)
    host = graph_from_json(_expect(obj, "host", dict, where), f"{where}.host")
    pattern = graph_from_json(_expect(obj, "pattern", dict, where), f"{where}.pattern")
    rows = _expect(obj, "copies", list, where)
    for i, row in enumerate(rows):
        if not (isinstance(row, list) and len(row) == pattern.n and all(isinstance(v, int) and not isinstance(v, bool) for v in row)):
            raise ParseError(f"a copy is a list of {pattern.n} integers", f"{where}.copies[{i}]")
    arr = np.array(rows, dtype=np.int64).reshape(-1, pattern.n)
    P = Packing(host, pattern, arr, {})
    if "coverage" in obj:
        claimed = parse_frac(obj["coverage"], f"{where}.coverage")
        P.stats["claimed_coverage"] = claimed
    return P


def read_packings(path: str) -> list:
    """Packings from a file holding one packing or ``{"runs": [...]}``."""
    obj = read_json(path)
    if isinstance(obj, dict) and "runs" in obj:
        runs = obj["runs"]
        if not isinstance(runs, list):
            raise ParseError("'runs' must be a list", "$.runs")
        return [packing_from_json(r, f"$.runs[{i}]") for i, r in enumerate(runs)]
    return [packing_from_json(obj)]


def manifest(command: str, params: Mapping[str, Any], input_path: str = None, version: str = None) -> dict:
    from . import __version__

    out = {
        "command": command,
        "parameters": dict(params),
        "version": version or __version__,
        "rng": "numpy.random.default_rng (PCG64)",
    }
    if input_path is not None:
        out["input"] = os.path.abspath(input_path)
        out["input_sha256"] = sha256_file(input_path)
    return out
