"""Command-line interface: ``cggpack {chroma,feasible,pack,bound,replay}``."""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from . import __version__
from .errors import CggError, ParameterError, PreconditionError
from .graphs import Cgg, chromatic_number
from .lp import compressed_matrix, k4_witness_m, kk_witness_m, minimal_feasible_m, solve_feasibility
from .obstruction import bound_report
from .packing import disjoint_length_design, greedy_maximal_packing, require_valid, rotation_schedule_packing
from .pipeline import pack_chi_le4, pack_ordered_chi3
from .serialize import (
    dumps,
    frac_str,
    manifest,
    outcome_to_json,
    packing_to_json,
    read_graph,
    read_json,
    read_packings,
    sha256_file,
    write_text_atomic,
)
from .weighted import WeightedCgg

ROUTES = ("auto", "greedy", "chi-le4", "ordered", "rotation")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, Fraction):
        return frac_str(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _parse_weights(text: str) -> List[Fraction]:
    try:
        return [Fraction(s.strip()) for s in text.split(",") if s.strip()]
    except (ValueError, ZeroDivisionError):
        raise ParameterError(f"cannot read weights {text!r}; use a comma list like 1,1/2") from None


def _weighted_from_cli(k: int, ws: List[Fraction]) -> WeightedCgg:
    """Per-length weights ``w_1..w_{k//2}``, or one weight per vertex pair."""
    if k < 2:
        raise ParameterError("--k must be at least 2")
    if len(ws) == k // 2:
        return WeightedCgg.from_lengths(k, {l + 1: v for l, v in enumerate(ws)})
    if len(ws) == k * (k - 1) // 2:
        return WeightedCgg(k, tuple(ws))
    raise ParameterError(f"--k {k} needs {k // 2} per-length weights or {k * (k - 1) // 2} pair weights")


# --- commands -----------------------------------------------------------------
# each runner takes the recorded parameters and returns (result JSON, text lines)


def run_chroma(p: dict) -> Tuple[dict, List[str]]:
    G = read_graph(p["input"])
    chi, part = chromatic_number(G)
    name = "chi_c" if G.cyclic else "chi_<"
    res = {"kind": "cgg" if G.cyclic else "ordered", "n": G.n, "chi": chi, "parts": part.parts()}
    lines = [f"{name} = {chi}", f"parts: {part.parts()}"]
    return res, lines


def run_feasible(p: dict) -> Tuple[dict, List[str]]:
    k = p["k"]
    ws = _parse_weights(p["weights"])
    w = _weighted_from_cli(k, ws)
    lw = w.length_weights()
    lines: List[str] = []
    res: dict = {"k": k, "length_weights": {str(l): frac_str(v) for l, v in sorted(lw.items())}}
    m = p.get("m")
    if p.get("witness"):
        if k == 4:
            m = k4_witness_m(lw.get(1, 0), lw.get(2, 0))
            res["witness"] = {"m": m}
            lines.append(f"witness m = {m}")
        elif k % 2 == 0 and k >= 6:
            half = k // 2
            rep = kk_witness_m([lw.get(l, 0) for l in range(1, half + 1)], half)
            res["witness"] = {"holds": rep.holds, "C_k": rep.constant, "m_half": rep.m_half, "m": rep.m}
            if not rep.holds:
                lines.append(f"long-edge condition fails (C_k = {rep.constant}); no witness m")
                return res, lines
            lines.append(f"witness m' = {rep.m_half}, m = {rep.m}")
            if rep.m > p.get("lp_cap", 401):
                res["lp"] = "skipped"
                lines.append(f"LP at m = {rep.m} is beyond the --lp-cap; not attempted")
                return res, lines
            m = rep.m
        else:
            raise ParameterError("--witness needs an even k >= 4")
    if p.get("minimal"):
        cap = m if m is not None else (k4_witness_m(lw.get(1, 0), lw.get(2, 0)) if k == 4 else None)
        if cap is None:
            raise ParameterError("--minimal needs --m as the scan cap (or k = 4, which uses the witness m)")
        found = minimal_feasible_m(w, cap)
        if found is None:
            res["minimal"] = None
            res["feasible"] = False
            lines.append(f"no feasible odd m <= {cap}")
            return res, lines
        m, outcome = found
        res["minimal"] = m
        lines.append(f"minimal feasible m = {m}")
    else:
        if m is None:
            raise ParameterError("give --m, --witness or --minimal")
        outcome = solve_feasibility(compressed_matrix(w, m))
    res.update(outcome_to_json(outcome))
    lines.append(f"m = {m}, {'feasible' if outcome.feasible else 'infeasible'}")
    if outcome.feasible:
        for item in res["x"]:
            lines.append(f"  gaps {tuple(item['gaps'])}: x = {item['value']}")
    else:
        lines.append("  certificate y = (" + ", ".join(res["y"]) + ")")
    return res, lines


def _run_object(P, n, seed, route, report) -> dict:
    vr = require_valid(P)
    obj = packing_to_json(P)
    obj.update({"n": n, "seed": seed, "route": route, "verified": vr.ok, "report": _jsonable(report)})
    return obj


def _pack_once(G, n: int, seed: int, p: dict):
    route = p.get("route", "auto")
    if route == "auto":
        route = "chi-le4" if G.cyclic else "ordered"
    if route == "greedy":
        host = type(G).complete_graph(n)
        P = greedy_maximal_packing(G, host, seed=seed)
        return P, route, {"route": "greedy", "maximal": True}
    if route == "rotation":
        if not G.cyclic:
            raise ParameterError("the rotation route needs a cgg pattern")
        w = WeightedCgg.from_edge_map(G.n, {e: 1 for e in G.iter_edges()})
        M = compressed_matrix(w, n)
        x = disjoint_length_design(w, n, seed=seed, matrix=M)
        P = rotation_schedule_packing(w, x, n, matrix=M)
        # the pattern is the weight-1 support of w, which is G itself
        return P, route, {"route": "rotation", **P.stats}
    if route == "chi-le4":
        if not G.cyclic:
            raise ParameterError("the chi-le4 route needs a cgg pattern")
        P, rep = pack_chi_le4(G, n, seed=seed, t=p.get("t"), epsilon=p.get("epsilon", 0.05))
        return P, route, rep
    if route == "ordered":
        if G.cyclic:
            raise ParameterError("the ordered route needs an ordered pattern")
        P, rep = pack_ordered_chi3(G, n, epsilon=p.get("epsilon", 0.05), seed=seed, cutoff=p.get("cutoff"))
        return P, route, rep
    raise ParameterError(f"unknown route {route!r}")


def _stage_lines(n, seed, route, P, rep) -> List[str]:
    lines = [f"{n:>7} {seed:>6} {route:>9} {P.num_copies:>9} {float(P.coverage):>9.4f}  {frac_str(P.coverage)}"]
    if "losses" in rep:
        lines.append("        losses: " + ", ".join(f"{k}={v}" for k, v in rep["losses"].items()))
    for lv in rep.get("levels", []):
        lines.append(
            f"        level {lv['depth']}: size {lv['size']} n'={lv['n_prime']} "
            f"sizes {tuple(lv['sizes'])} I4={lv['I4']} covered {lv['covered']}/{lv['cross_edges']}"
        )
    return lines


def run_pack(p: dict) -> Tuple[dict, List[str]]:
    G = read_graph(p["input"])
    runs = []
    lines = [f"{'n':>7} {'seed':>6} {'route':>9} {'copies':>9} {'coverage':>9}"]
    for n in p["n"]:
        for seed in p["seeds"]:
            P, route, rep = _pack_once(G, n, seed, p)
            runs.append(_run_object(P, n, seed, route, rep))
            lines.extend(_stage_lines(n, seed, route, P, rep))
    res = runs[0] if len(runs) == 1 else {"runs": runs}
    return res, lines


def run_bound(p: dict) -> Tuple[dict, List[str]]:
    G = read_graph(p["input"])
    if not isinstance(G, Cgg):
        raise ParameterError("bounds are computed for cgg patterns")
    n = p["n"]
    res = bound_report(G, n, p.get("mode", "auto"))
    b = Fraction(res["bound"])
    lines = [f"L = {res['L']} ({res['mode']})", f"bound = {res['bound']} ~ {float(b):.4f}"]
    if p.get("packing"):
        verdicts = []
        for P in read_packings(p["packing"]):
            same = P.pattern.cyclic == G.cyclic and np.array_equal(P.pattern.edge_ids(), G.edge_ids())
            if P.host.n != n or P.pattern.n != G.n or not same:
                raise PreconditionError("packing file does not match the pattern and n")
            require_valid(P)
            c = P.coverage
            ok = c <= b
            verdicts.append({"coverage": frac_str(c), "within_bound": ok})
            rel = "<=" if ok else ">"
            lines.append(f"achieved {float(c):.4f} {rel} bound {float(b):.4f}: {'ok' if ok else 'VIOLATION'}")
        res["packings"] = verdicts
    return res, lines


RUNNERS: Dict[str, Callable[[dict], Tuple[dict, List[str]]]] = {
    "chroma": run_chroma,
    "feasible": run_feasible,
    "pack": run_pack,
    "bound": run_bound,
}


# --- argument handling ---------------------------------------------------------


def _params(args) -> dict:
    cmd = args.command
    if cmd == "chroma":
        return {"input": os.path.abspath(args.input)}
    if cmd == "feasible":
        return {
            "k": args.k,
            "weights": args.weights,
            "m": args.m,
            "witness": args.witness,
            "minimal": args.minimal,
            "lp_cap": args.lp_cap,
        }
    if cmd == "pack":
        return {
            "input": os.path.abspath(args.input),
            "n": args.n,
            "seeds": args.seed or [0],
            "route": args.route,
            "epsilon": args.epsilon,
            "cutoff": args.cutoff,
            "t": args.t,
        }
    if cmd == "bound":
        n = args.n[0] if isinstance(args.n, list) else args.n
        return {
            "input": os.path.abspath(args.input),
            "n": n,
            "mode": args.mode,
            "packing": os.path.abspath(args.packing) if args.packing else None,
        }
    raise ParameterError(f"unknown command {cmd}")  # pragma: no cover


def _inputs(p: dict) -> List[str]:
    return [p[k] for k in ("input", "packing") if p.get(k)]


def _emit(cmd: str, p: dict, out: Optional[str], manifest_path: Optional[str]) -> int:
    res, lines = RUNNERS[cmd](p)
    for line in lines:
        print(line)
    if out:
        write_text_atomic(out, dumps(_jsonable(res)))
    if manifest_path:
        man = manifest(cmd, p)
        man["inputs_sha256"] = {path: sha256_file(path) for path in _inputs(p)}
        if out:
            man["output"] = os.path.abspath(out)
        write_text_atomic(manifest_path, dumps(man))
    return 0


def _replay(args) -> int:
    man = read_json(args.manifest)
    if not isinstance(man, dict) or man.get("command") not in RUNNERS:
        raise ParameterError("not a cggpack manifest")
    p = man.get("parameters", {})
    for path, digest in man.get("inputs_sha256", {}).items():
        if not os.path.exists(path) or sha256_file(path) != digest:
            raise PreconditionError(f"input {path} changed since the manifest was written")
    out = args.out or man.get("output")
    return _emit(man["command"], p, out, None)


def _set_threads() -> None:
    raw = os.environ.get("PACK_THREADS")
    if not raw:
        return
    try:
        k = int(raw)
    except ValueError:
        raise ParameterError(f"PACK_THREADS must be an integer, got {raw!r}") from None
    if k < 1:
        raise ParameterError("PACK_THREADS must be at least 1")
    import numba

    numba.set_num_threads(min(k, numba.config.NUMBA_NUM_THREADS))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cggpack", description="Packings of convex geometric and ordered graphs.")
    ap.add_argument("--version", action="version", version=f"cggpack {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, need_input=True):
        if need_input:
            sp.add_argument("--input", required=True, help="graph JSON file")
        sp.add_argument("--out", help="write the result JSON here")
        sp.add_argument("--manifest", help="write a replayable manifest here (default: OUT.manifest.json)")

    sp = sub.add_parser("chroma", help="cyclic or interval chromatic number")
    common(sp)

    sp = sub.add_parser("feasible", help="exact LP feasibility of M x = 1")
    common(sp, need_input=False)
    sp.add_argument("--k", type=int, required=True, help="number of pattern vertices")
    sp.add_argument("--weights", required=True, help="per-length weights w_1..w_{k/2} (or all pair weights)")
    sp.add_argument("--m", type=int, help="odd host size (scan cap with --minimal)")
    sp.add_argument("--witness", action="store_true", help="use the witness host size")
    sp.add_argument("--minimal", action="store_true", help="scan odd m upward for the first feasible one")
    sp.add_argument("--lp-cap", type=int, default=401, help="skip the LP for witnesses above this m")

    sp = sub.add_parser("pack", help="build and verify a packing of K_n")
    common(sp)
    sp.add_argument("--n", type=int, action="append", required=True, help="host size (repeatable)")
    sp.add_argument("--seed", type=int, action="append", help="RNG seed (repeatable; default 0)")
    sp.add_argument("--route", choices=ROUTES, default="auto")
    sp.add_argument("--epsilon", type=float, default=0.05)
    sp.add_argument("--cutoff", type=int, help="recursion cutoff for the ordered route")
    sp.add_argument("--t", type=int, help="blowup factor for the chi-le4 route")

    sp = sub.add_parser("bound", help="edge-length coverage bound")
    common(sp)
    sp.add_argument("--n", type=int, required=True, help="odd host size")
    sp.add_argument("--mode", choices=("auto", "exact", "cycle-bound"), default="auto")
    sp.add_argument("--packing", help="packing JSON to compare against the bound")

    sp = sub.add_parser("replay", help="re-run a manifest")
    sp.add_argument("--manifest", required=True)
    sp.add_argument("--out", help="override the recorded output path")
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        _set_threads()
        if args.command == "replay":
            return _replay(args)
        man = args.manifest or (args.out + ".manifest.json" if args.out else None)
        return _emit(args.command, _params(args), args.out, man)
    except CggError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
