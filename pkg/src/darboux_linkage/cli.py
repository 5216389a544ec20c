"""Command-line front end.

Exit codes: 0 success, 1 input or validation error, 2 verification or
realness failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

import numpy as np

from .darboux_factor import DesignParams, InvalidDesign, VerificationFailure, extract_linkage, factorize
from .dq_core import DEFAULT_TOL
from .files import (
    FileFormatError,
    dumps_linkage,
    linkage_to_dict,
    load_linkage,
    params_hash,
    read_trajectory,
    trajectory_to_csv,
    trajectory_to_json,
)
from .linkage_model import trace_point
from .mode_analysis import assembly2_exists, enumerate_modes, sweep
from .svgplot import VIEWS, render_svg

EXIT_OK, EXIT_INPUT, EXIT_FAIL = 0, 1, 2


def _err(msg: str) -> None:
    print(f"error: {msg}", file=sys.stderr)


def _range(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a:b, got {text!r}")
    if not lo < hi:
        raise argparse.ArgumentTypeError("range needs a < b")
    return lo, hi


def _point(text: str) -> tuple[float, float, float]:
    try:
        x, y, z = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x,y,z, got {text!r}")
    return x, y, z


def _write(text: str, path: Optional[str]) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def cmd_synth(args) -> int:
    try:
        params = DesignParams.create(
            args.b, args.c, args.q1, args.q2, z1=args.z1, z2=args.z2, z=args.z, z3=args.z3, tol=args.tol
        )
        f = factorize(params)
    except InvalidDesign as exc:
        _err(f"invalid design: {exc}")
        return EXIT_INPUT
    except VerificationFailure as exc:
        _err(str(exc))
        return EXIT_INPUT
    data = linkage_to_dict(f, extract_linkage(f))
    _write(dumps_linkage(data), args.output)
    branch = "degenerate" if params.degenerate else "generic"
    print(f"wrote {args.output} ({branch} branch, residual {f.residual:.3e})", file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        f, _ = load_linkage(args.file)
    except FileFormatError as exc:
        _err(str(exc))
        return EXIT_INPUT
    tol = args.tol if args.tol is not None else f.params.tol
    scale = max(1.0, *(p.max_abs() for p in f.factors))
    ok = f.residual <= tol * scale
    print(f"max residual of P1 P2 P3 P4^2 - (t^2+1) M: {f.residual:.3e} (tolerance {tol * scale:.1e})")
    if f.closed_form_deviation > tol * scale:
        print(f"note: P1 deviates from the reference closed form by {f.closed_form_deviation:.3e}")
    print("OK" if ok else "FAILED")
    return EXIT_OK if ok else EXIT_FAIL


def _mode_summary(f, mode, samples, span):
    rep = sweep(f, mode, samples=samples, span=span)
    real = mode.real and rep.real
    return {
        "branch": mode.branch,
        "assembly": mode.assembly,
        "driver": mode.driver,
        "realness": mode.realness if mode.discriminant is not None else ("real" if rep.real else "complex"),
        "real": real,
        "domain": f"{mode.driver} in [{span[0]}, {span[1]}]",
        "poles": list(mode.poles),
        "discriminant": mode.discriminant,
        "evaluated": rep.evaluated,
        "samples": rep.samples,
        "max_residual": rep.max_residual if rep.evaluated else None,
        "notes": mode.notes,
    }


def cmd_modes(args) -> int:
    try:
        f, _ = load_linkage(args.file)
    except FileFormatError as exc:
        _err(str(exc))
        return EXIT_INPUT
    p = f.params
    if args.assembly == 2 and not assembly2_exists(p):
        msg = f"assembly 2 does not exist: b^2 + c^2 - 4(q1^2 + q2^2) = {p.condition!r}"
        if args.json:
            print(json.dumps({"assembly": 2, "exists": False, "condition": p.condition}))
        else:
            print(msg)
        return EXIT_OK
    modes = enumerate_modes(f, args.assembly)
    summaries = [_mode_summary(f, m, args.samples, args.range) for m in modes]
    tol = args.tol if args.tol is not None else p.tol
    failed = [s["branch"] for s in summaries if s["max_residual"] is not None and s["max_residual"] > tol]
    if args.json:
        print(json.dumps({"assembly": args.assembly, "exists": True, "branches": summaries}, indent=2))
    else:
        print(f"assembly {args.assembly}: {len(summaries)} branches")
        for s in summaries:
            res = "n/a" if s["max_residual"] is None else f"{s['max_residual']:.3e}"
            line = (
                f"  {s['branch']:<10} {s['realness']:<8} driver {s['driver']}  "
                f"closed {s['evaluated']}/{s['samples']}  max residual {res}"
            )
            if s["poles"]:
                line += "  poles " + ", ".join(f"{v:.6g}" for v in s["poles"])
            if s["discriminant"] is not None:
                line += f"  discriminant {s['discriminant']:.6g}"
            print(line)
            for note in s["notes"]:
                print(f"    {note}")
    if failed:
        _err("closure residual above tolerance on " + ", ".join(failed))
        return EXIT_FAIL
    return EXIT_OK


def cmd_trace(args) -> int:
    try:
        f, data = load_linkage(args.file)
    except FileFormatError as exc:
        _err(str(exc))
        return EXIT_INPUT
    if args.assembly == 2 and not assembly2_exists(f.params):
        _err("assembly 2 does not exist for these parameters")
        return EXIT_INPUT
    modes = {m.branch: m for m in enumerate_modes(f, args.assembly)}
    mode = modes.get(args.branch)
    if mode is None:
        _err(f"unknown branch {args.branch!r} for assembly {args.assembly}; available: {', '.join(modes)}")
        return EXIT_INPUT
    if not mode.real:
        _err(f"branch {args.branch} is complex (discriminant {mode.discriminant!r})")
        return EXIT_FAIL
    samples = np.linspace(args.range[0], args.range[1], args.samples)
    traj = trace_point(f, mode, args.point, samples, label=args.branch, assembly=args.assembly)
    if not traj.rows:
        _err(f"branch {args.branch} has no real configurations in {args.range}")
        return EXIT_FAIL
    fmt = args.format
    if fmt is None:
        fmt = "json" if args.output and args.output.endswith(".json") else "csv"
    phash = params_hash(data)
    text = trajectory_to_json(traj, phash) if fmt == "json" else trajectory_to_csv(traj, phash)
    _write(text, args.output)
    return EXIT_OK


def cmd_plot(args) -> int:
    try:
        trajs = [read_trajectory(p) for p in args.files]
    except (OSError, FileFormatError) as exc:
        _err(str(exc))
        return EXIT_INPUT
    empty = [p for p, t in zip(args.files, trajs) if not t.rows]
    if empty:
        _err("empty trajectory: " + ", ".join(empty))
        return EXIT_INPUT
    _write(render_svg(trajs, view=args.view, title=args.title or ""), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="darboux-linkage",
        description="Synthesize and analyse the overconstrained 4RC vertical Darboux linkage.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="construct the linkage and write it as JSON")
    for name in ("b", "c", "q1", "q2"):
        p.add_argument(f"--{name}", type=float, required=True)
    p.add_argument("--z1", type=float, help="generic branch: P2 moment component")
    p.add_argument("--z2", type=float, help="generic branch: P2 moment component")
    p.add_argument("--z", type=float, help="degenerate branch: scale of (z1, z2)")
    p.add_argument("--z3", type=float, help="degenerate branch: free P2 moment component")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("-o", "--output", default="linkage.json")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("verify", help="recheck the factorization stored in a linkage file")
    p.add_argument("file")
    p.add_argument("--tol", type=float)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("modes", help="list operation modes and their closure residuals")
    p.add_argument("file")
    p.add_argument("--assembly", type=int, choices=(1, 2), default=1)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--range", type=_range, default=(-10.0, 10.0))
    p.add_argument("--tol", type=float)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_modes)

    p = sub.add_parser("trace", help="sample the trajectory of a point along one branch")
    p.add_argument("file")
    p.add_argument("--assembly", type=int, choices=(1, 2), default=1)
    p.add_argument("--branch", required=True)
    p.add_argument("--point", type=_point, default=(1.0, 0.0, 0.0))
    p.add_argument("--samples", type=int, default=400)
    p.add_argument("--range", type=_range, default=(-10.0, 10.0))
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("plot", help="render trajectory files as an SVG")
    p.add_argument("files", nargs="+")
    p.add_argument("--out")
    p.add_argument("--view", choices=sorted(VIEWS), default="iso")
    p.add_argument("--title")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors; those are input errors here
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
