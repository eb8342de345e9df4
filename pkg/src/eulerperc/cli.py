"""Command-line entry point.

Exit codes: 0 success, 1 usage or input error, 2 a verification failed.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

SCAN_COLUMNS = ["p", "L", "samples", "crossing_freq", "ci_low", "ci_high", "largest_frac_mean"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def version() -> str:
    try:
        from importlib.metadata import version as _v
        return _v("artifact")
    except Exception:
        return "0.1.0"


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    t = int(epoch) if epoch else int(time.time())
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(t))


def manifest(command: str, params: dict, seed) -> dict:
    return {"subcommand": command, "params": params, "seed": seed,
            "version": version(), "created": _timestamp()}


def _resolve(path: str | None) -> Path | None:
    if path is None:
        return None
    p = Path(path)
    base = os.environ.get("EULERPERC_OUTPUT_DIR")
    if base and not p.is_absolute():
        p = Path(base) / p
    p.parent.mkdir(parents=True, exist_ok=True)
    return p


def _emit(text: str, out: str | None) -> None:
    path = _resolve(out)
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text)


def _finite(obj):
    # strict JSON has no NaN or infinity
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


def _json(obj) -> str:
    return json.dumps(_finite(obj), indent=2, sort_keys=True, default=_default, allow_nan=False) + "\n"


def _default(o):
    if isinstance(o, Fraction):
        return f"{o.numerator}/{o.denominator}"
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    raise TypeError(type(o).__name__)


def _params(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "command", "out")}


# -- subcommands -------------------------------------------------------------

def cmd_sample_even(args) -> int:
    from .contour import EdgeConfig
    from .evenperc import iter_mu_p
    from .lattice import build_box

    g = build_box(args.L)
    head = manifest("sample-even", _params(args), args.seed)
    head["geometry"] = {"L": args.L, "n_edges": g.n_edges,
                        "edge_order": "row-major sites, right then up", "bit_order": "msb-first"}
    lines = [json.dumps(head, sort_keys=True)]
    for bits in iter_mu_p(args.L, args.p, args.samples, args.sweeps, args.thinning, args.seed, args.method):
        cfg = EdgeConfig(g, bits)
        lines.append(cfg.to_hex() if args.format == "hex" else cfg.to_ascii() + "\n")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def write_scan_csv(rows: list[dict], head: dict) -> str:
    buf = io.StringIO()
    buf.write("# manifest: " + json.dumps(head, sort_keys=True) + "\n")
    w = csv.DictWriter(buf, fieldnames=SCAN_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: repr(float(r[k])) if isinstance(r[k], float) else r[k] for k in SCAN_COLUMNS})
    return buf.getvalue()


def read_scan_csv(text: str) -> tuple[dict, list[dict]]:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# manifest: "):
        raise ValueError("missing manifest line")
    head = json.loads(lines[0][len("# manifest: "):])
    rows = []
    for r in csv.DictReader(lines[1:]):
        rows.append({k: (int(v) if k in ("L", "samples") else float(v)) for k, v in r.items()})
    return head, rows


def _grid(lo: float, hi: float, step: float) -> list[float]:
    if step <= 0 or hi < lo:
        raise UsageError("need p-min <= p-max and a positive p-step")
    n = int(round((hi - lo) / step))
    return [round(lo + i * step, 10) for i in range(n + 1)]


def cmd_sweep(args) -> int:
    from .clusters import curve_intersection, half_crossing_point, threshold_scan

    grid = _grid(args.p_min, args.p_max, args.p_step)
    for p in grid:
        if not 0 < p < 1:
            raise UsageError("p values must lie strictly between 0 and 1")
    rows = threshold_scan(grid, args.L, args.samples, args.seed, args.method, args.burnin,
                          args.thinning, args.threads)
    head = manifest("sweep", _params(args), args.seed)
    _emit(write_scan_csv(rows, head), args.out)
    if args.out is not None:
        summary = {"half_crossing": {str(L): half_crossing_point(rows, L) for L in args.L}
                   if len(grid) > 1 else {}}
        Ls = sorted(args.L)
        if len(Ls) >= 2 and len(grid) > 1:
            summary["curve_intersection"] = curve_intersection(rows, Ls[-2], Ls[-1])
        print(_json(summary), end="")
    return 0


def cmd_verify_coupling(args) -> int:
    from .coupling import verify_coupling_report

    rep = verify_coupling_report(args.L, args.p, args.samples, args.seed, args.method, args.thinning,
                                 args.burnin)
    rep["manifest"] = manifest("verify-coupling", _params(args), args.seed)
    _emit(_json(rep), args.out)
    bad = rep["p2_violations"] or rep["p3_violations"] or rep["square_violations"]
    return 2 if bad else 0


def cmd_fk_compare(args) -> int:
    from .fk import compare_mu_to_fk

    rep = compare_mu_to_fk(args.L, args.p, args.samples, args.seed, args.burnin, args.thinning)
    rep["manifest"] = manifest("fk-compare", _params(args), args.seed)
    _emit(_json(rep), args.out)
    return 2 if rep["any_violation"] else 0


def _load_graph(spec: str):
    from .exactgraph import FiniteGraph, build_figure_graph, figure_events

    if spec == "fig5":
        g = build_figure_graph()
        return g, figure_events(g)
    path = Path(spec)
    if not path.exists():
        raise UsageError(f"graph file {spec!r} not found")
    return FiniteGraph.parse(path.read_text()), {}


def cmd_exact_finite(args) -> int:
    from .exactgraph import event_poly, parse_event, partition_poly
    from .polyarith import to_string

    g, named = _load_graph(args.graph)
    ev = parse_event(args.event, g, named)
    P, Z = event_poly(g, ev), partition_poly(g)
    rep = {"graph": args.graph, "event": args.event,
           "event_poly": to_string(P), "partition_poly": to_string(Z),
           "probability_formula": f"({to_string(P)}) / ({to_string(Z)})"}
    if args.p is not None:
        p = Fraction(args.p)
        if not 0 < p < 1:
            raise UsageError("p must lie strictly between 0 and 1")
        q = p / (1 - p)
        exact = P(q) / Z(q)
        rep.update({"p": args.p, "probability": float(exact), "probability_exact": exact})
    rep["manifest"] = manifest("exact-finite", _params(args), None)
    _emit(_json(rep), args.out)
    return 0


def cmd_monotone_verify(args) -> int:
    from .monotone import certify_monotonicity, enumerate_monotone

    rep = certify_monotonicity()
    if args.n != 4:
        rep = {"counts_per_arity": {args.n: len(enumerate_monotone(args.n))}}
    rep["manifest"] = manifest("monotone-verify", _params(args), None)
    _emit(_json(rep), args.out)
    if args.n == 4 and (rep["positive_root_violations"] or not rep["matches_expected_set"]):
        return 2
    return 0


def cmd_verify_lemma_image(args) -> int:
    from .evenperc import verify_lemmeimage

    try:
        h, w = (int(x) for x in args.shape.lower().split("x"))
    except ValueError:
        raise UsageError("shape must look like 2x2")
    rep = verify_lemmeimage((h, w), args.boundary, args.p, args.seed).as_dict()
    rep["manifest"] = manifest("verify-lemma-image", _params(args), args.seed)
    _emit(_json(rep), args.out)
    return 0 if rep["passed"] else 2


# -- parser ---------------------------------------------------------------------

def _prob(text: str) -> float:
    v = float(text)
    if not 0 < v < 1:
        raise argparse.ArgumentTypeError("must lie strictly between 0 and 1")
    return v


def _pos(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="eulerperc", description="Even bond percolation on Z^2: sampling and exact checks.")
    ap.add_argument("--version", action="version", version=version())
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, sampling=True):
        sp.add_argument("--out", help="output file (default stdout)")
        sp.add_argument("--threads", type=_pos, default=1)
        if sampling:
            sp.add_argument("--seed", type=int, default=0)
            sp.add_argument("--thinning", type=_pos, default=2)
            sp.add_argument("--burnin", type=_pos, default=None)

    sp = sub.add_parser("sample-even", help="contour samples of the even measure, hex per line")
    sp.add_argument("--p", type=_prob, required=True)
    sp.add_argument("--L", type=_pos, required=True)
    sp.add_argument("--sweeps", type=_pos, default=None, help="burn-in sweeps")
    sp.add_argument("--samples", type=_pos, default=1)
    sp.add_argument("--method", choices=["glauber", "sw"], default="glauber")
    sp.add_argument("--format", choices=["hex", "ascii"], default="hex")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--thinning", type=_pos, default=1)
    sp.add_argument("--out")
    sp.add_argument("--threads", type=_pos, default=1)
    sp.set_defaults(func=cmd_sample_even)

    sp = sub.add_parser("sweep", help="crossing frequencies over a p grid")
    sp.add_argument("--p-min", type=float, required=True)
    sp.add_argument("--p-max", type=float, required=True)
    sp.add_argument("--p-step", type=float, default=0.01)
    sp.add_argument("--L", type=_pos, nargs="+", required=True)
    sp.add_argument("--samples", type=_pos, default=1000)
    sp.add_argument("--method", choices=["glauber", "sw"], default="sw")
    common(sp)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("verify-coupling", help="check the square coupling on sampled boxes")
    sp.add_argument("--p", type=_prob, required=True)
    sp.add_argument("--L", type=_pos, required=True)
    sp.add_argument("--samples", type=_pos, default=1000)
    sp.add_argument("--method", choices=["glauber", "sw"], default="sw")
    common(sp)
    sp.set_defaults(func=cmd_verify_coupling)

    sp = sub.add_parser("fk-compare", help="even measure at p against free FK at (2p, 2)")
    sp.add_argument("--p", type=_prob, required=True)
    sp.add_argument("--L", type=_pos, required=True)
    sp.add_argument("--samples", type=_pos, default=1000)
    common(sp)
    sp.set_defaults(func=cmd_fk_compare)

    sp = sub.add_parser("exact-finite", help="event and partition polynomials on a finite graph")
    sp.add_argument("--graph", required=True, help="'fig5' or a file with one 'u v' edge per line")
    sp.add_argument("--event", required=True, help="e.g. C1, X0&X2, E0-F0&!E1-F1, #3")
    sp.add_argument("--p", default=None, help="decimal or fraction, evaluated exactly")
    common(sp, sampling=False)
    sp.set_defaults(func=cmd_exact_finite)

    sp = sub.add_parser("monotone-verify", help="root certification over all monotone functions")
    sp.add_argument("--n", type=int, default=4, choices=[1, 2, 3, 4])
    common(sp, sampling=False)
    sp.set_defaults(func=cmd_monotone_verify)

    sp = sub.add_parser("verify-lemma-image", help="exact contour push-forward check")
    sp.add_argument("--shape", default="2x2")
    sp.add_argument("--boundary", default="plus", choices=["plus", "minus", "checkerboard", "random"])
    sp.add_argument("--p", type=_prob, default=0.3)
    sp.add_argument("--seed", type=int, default=0)
    common(sp, sampling=False)
    sp.set_defaults(func=cmd_verify_lemma_image)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except (UsageError, ValueError, KeyError) as e:
        print(f"eulerperc: error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
