"""Command-line front end.

    gscap approx    seed -> Newton -> trace projection -> coefficient file
    gscap continue  natural-parameter continuation in lambda2 from a file
    gscap prove     bounds, radius and periodic-branch check -> certificate
    gscap export-grid  samples of the candidate on a grid as CSV

Numerical libraries are imported inside the commands so that ``--threads``
can set the BLAS thread count first.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from fractions import Fraction
from pathlib import Path

__all__ = ["build_parser", "main"]

log = logging.getLogger("gscap")

_THREAD_VARS = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS")


def _fraction(text: str) -> Fraction:
    try:
        f = Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc
    if f <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return f


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON file of option defaults (flags win)")
    p.add_argument("--threads", type=int, default=None, help="BLAS thread count")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gscap", description="Computer-assisted proofs of localized Gray-Scott patterns.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("approx", help="compute an approximate solution")
    _add_common(p)
    p.add_argument("--mode", choices=("full", "reduced"), default="full")
    p.add_argument("--lambda1", type=_fraction, required=True)
    p.add_argument("--lambda2", type=_fraction, default=None,
                   help="required in full mode; implied as 1/lambda1 in reduced mode")
    p.add_argument("--d", type=float, required=True)
    p.add_argument("--N0", type=int, required=True, help="coefficient order")
    p.add_argument("--seed-form", choices=("sqrt", "linear"), default="sqrt")
    p.add_argument("--max-iter", type=int, default=30, help="Newton iterations (0 writes the seed)")
    p.add_argument("--tol", type=float, default=1e-13)
    p.add_argument("--no-trace", action="store_true", help="skip the trace projection")
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("continue", help="continue a candidate in lambda2")
    _add_common(p)
    p.add_argument("--from", dest="source", type=Path, required=True)
    p.add_argument("--lambda2", type=_fraction, required=True, help="target lambda2")
    p.add_argument("--step", type=float, default=0.25)
    p.add_argument("--out", type=Path, required=True, help="output directory")

    p = sub.add_parser("prove", help="run the computer-assisted proof on a candidate")
    _add_common(p)
    p.add_argument("candidate", type=Path)
    p.add_argument("--mode", choices=("full", "reduced"), default=None,
                   help="default: reduced for one component, full for two")
    p.add_argument("--N", type=int, default=None, help="operator order (default: candidate order)")
    p.add_argument("--r0", type=float, default=None, help="probe radius")
    p.add_argument("--periodic", action=argparse.BooleanOptionalAction, default=True,
                   help="also check the periodic-branch condition")
    p.add_argument("--apply-trace", action="store_true",
                   help="project a candidate that is not in the trace kernel")
    p.add_argument("--squarings", type=int, default=6)
    p.add_argument("--out", type=Path, default=None, help="certificate path")

    p = sub.add_parser("export-grid", help="sample a candidate on a grid (CSV)")
    _add_common(p)
    p.add_argument("candidate", type=Path)
    p.add_argument("--resolution", type=int, default=64, help="grid cells per side")
    p.add_argument("--extent", type=float, default=None, help="half-width of the sampled square")
    p.add_argument("--out", type=Path, required=True)
    return parser


def _config_path(argv) -> str | None:
    """Value of ``--config`` found before full parsing (config may supply required options)."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    return known.config


def _apply_config(parser: argparse.ArgumentParser, argv) -> argparse.Namespace:
    argv = list(sys.argv[1:] if argv is None else argv)
    path = _config_path(argv)
    if path is None or not argv or argv[0] not in _COMMANDS:
        return parser.parse_args(argv)
    try:
        cfg = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        parser.error(f"cannot read config {path}: {exc}")
    if not isinstance(cfg, dict):
        parser.error(f"config {path} must be a JSON object")
    sub = parser._subparsers._group_actions[0].choices[argv[0]]
    known = {a.dest for a in sub._actions} - {"help", "config"}
    unknown = set(cfg) - known
    if unknown:
        parser.error(f"unknown config keys: {sorted(unknown)}")
    for a in sub._actions:
        if a.dest in cfg:
            if a.type is not None and isinstance(cfg[a.dest], (str, int, float)) \
                    and not isinstance(cfg[a.dest], bool):
                try:
                    cfg[a.dest] = a.type(str(cfg[a.dest]))
                except (argparse.ArgumentTypeError, ValueError) as exc:
                    parser.error(f"config key {a.dest}: {exc}")
            a.required = False
    sub.set_defaults(**cfg)
    return parser.parse_args(argv)


# ----------------------------------------------------------------------------
# commands


def cmd_approx(args) -> int:
    from . import solver
    from .candidate import write_candidate
    from .d4seq import D4Seq, Grid, PairSeq, seq_norm
    from .model import GSParams

    l1 = args.lambda1
    if args.mode == "reduced":
        l2 = 1 / l1
    elif args.lambda2 is None:
        raise SystemExit("approx: --lambda2 is required in full mode")
    else:
        l2 = args.lambda2
    grid = Grid(args.d, args.N0, args.N0)
    params = GSParams(l1, l2, grid)
    if args.max_iter > 0:
        cfg = solver.NewtonConfig(tol=args.tol, max_iter=args.max_iter)
        res, form = solver.solve_seeded(params, args.mode, args.seed_form, cfg)
        U = res.solution
        print(f"newton ({form} seed): {res.iterations} iterations, residual {res.history[-1]:.3e}")
    else:
        seed = solver.seed_1d_radial(params, grid, args.seed_form)
        U = seed if args.mode == "reduced" else PairSeq(seed, D4Seq.zeros(args.N0, grid))
    first = U if args.mode == "reduced" else U.first
    b = solver.boundary_residual(first)
    print(f"boundary value {b:.3e} (relative {b / max(float(seq_norm(first, 'l1')), 1e-300):.3e})")
    if not args.no_trace and args.max_iter > 0:
        U = (solver.build_u0_reduced if args.mode == "reduced" else solver.build_u0)(params, U)
    write_candidate(args.out, U, l1, l2)
    print(f"wrote {args.out}")
    return 0


def cmd_continue(args) -> int:
    from . import solver
    from .candidate import read_candidate, write_candidate
    from .d4seq import PairSeq
    from .model import GSParams

    cand = read_candidate(args.source)
    if not isinstance(cand.U, PairSeq):
        raise SystemExit("continue: needs a two-component candidate")
    start = cand.params()
    target = GSParams(start.lambda1, args.lambda2, start.grid)
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    cfg = solver.ContinuationConfig(target=float(args.lambda2), step=args.step)
    written = []

    def emit(chain):
        for i, (p, U) in enumerate(chain[len(written):], start=len(written)):
            path = out / f"step_{i:03d}.json"
            write_candidate(path, U, p.lambda1, p.lambda2)
            written.append(path)

    try:
        chain = solver.continue_param(start, target, cand.U, cfg)
    except solver.ContinuationError as exc:
        emit(exc.partial)
        print(f"continuation failed: {exc}; kept {len(written)} files in {out}", file=sys.stderr)
        return 1
    emit(chain)
    p, U = chain[-1]
    final = out / "final.json"
    write_candidate(final, solver.build_u0(p, U), p.lambda1, p.lambda2)
    print(f"wrote {len(written)} steps and {final}")
    return 0


def _summary(cert) -> str:
    rows = [("bound", "upper endpoint")]
    for k, v in cert.bounds.items():
        rows.append((k, f"{float(v.hi):.6e}"))
    if cert.periodic is not None:
        for k, v in cert.periodic.items():
            rows.append((f"periodic.{k}", f"{float(v.hi):.6e}"))
    rows.append(("r0", f"{float(cert.r0.hi):.6e}"))
    rows.append(("localized", str(cert.verdicts["localized"])))
    if cert.periodic is not None:
        rows.append(("periodic", str(cert.verdicts["periodic"])))
    w = max(len(r[0]) for r in rows)
    return "\n".join(f"{a:<{w}}  {b}" for a, b in rows)


def cmd_prove(args) -> int:
    from .candidate import candidate_digest, read_candidate
    from .d4seq import Grid, PairSeq
    from .proof import EXIT_FAILURE, ProofError, prove, write_certificate

    cand = read_candidate(args.candidate)
    mode = args.mode or ("full" if isinstance(cand.U, PairSeq) else "reduced")
    N = args.N or cand.order
    try:
        grid = Grid(cand.d, cand.order, N)
    except ValueError as exc:
        raise SystemExit(f"prove: {exc}")
    cand = cand.with_grid(grid)
    try:
        cert = prove(mode, cand.params(N), cand.U, probe=args.r0, periodic=args.periodic,
                     squarings=args.squarings, apply_trace=args.apply_trace,
                     digest=candidate_digest(args.candidate))
    except ProofError as exc:
        print(f"proof failed: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    out = args.out or args.candidate.with_suffix(".cert.json")
    write_certificate(cert, out)
    print(_summary(cert))
    print(f"certificate written to {out}")
    return cert.exit_code()


def cmd_export_grid(args) -> int:
    import numpy as np

    from .candidate import read_candidate
    from .d4seq import PairSeq, eval_grid

    cand = read_candidate(args.candidate)
    if args.resolution < 1:
        raise SystemExit("export-grid: resolution must be at least 1")
    d = cand.d
    ext = d if args.extent is None else args.extent
    xs = np.linspace(-ext, ext, args.resolution + 1)
    comps = [cand.U.first, cand.U.second] if isinstance(cand.U, PairSeq) else [cand.U]
    inside = np.abs(xs) <= d
    vals = []
    for c in comps:
        v = np.zeros((xs.size, xs.size))
        v[np.ix_(inside, inside)] = eval_grid(c, xs[inside], xs[inside])
        vals.append(v)
    if len(vals) == 1:
        vals.append(np.zeros_like(vals[0]))
    with open(args.out, "w") as fh:
        fh.write("x,y,u1,u2\n")
        for i, x in enumerate(xs):
            for j, y in enumerate(xs):
                fh.write(f"{x:.17g},{y:.17g},{vals[0][i, j]:.17g},{vals[1][i, j]:.17g}\n")
    print(f"wrote {args.out}")
    return 0


_COMMANDS = {
    "approx": cmd_approx,
    "continue": cmd_continue,
    "prove": cmd_prove,
    "export-grid": cmd_export_grid,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = _apply_config(parser, argv)
    if args.threads is not None:
        if args.threads < 1:
            parser.error("--threads must be positive")
        for var in _THREAD_VARS:
            os.environ[var] = str(args.threads)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    for attr in ("candidate", "source"):
        path = getattr(args, attr, None)
        if path is not None and not Path(path).is_file():
            parser.error(f"file not found: {path}")
    try:
        return _COMMANDS[args.command](args)
    except ValueError as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
