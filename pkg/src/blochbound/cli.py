"""Command-line interface: ``blochbound {basis,bounds,entangle,verify}``.

Reports are JSON on stdout (or ``--out``); a short summary goes to stderr.
Exit codes: 0 success, 1 error, 2 entangled verdict, 3 verification failure.
"""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from . import __version__
from .bounds import build_set, qubit_bounds, theorem1_bounds
from .codec import max_bloch_norm
from .errors import BlochError, InvalidDimensionError, ShapeError
from .fileio import basis_to_dict, dumps_report, read_matrix_file, write_basis, write_matrix_file
from .oracle import DEFAULT_SEED, SamplerConfig, extremize_sum
from .su_algebra import build_basis
from .verify import SUITES, run_suite
from .witness import (
    Verdict,
    criterion_kyfan,
    criterion_local_sum,
    extract_bipartite,
    optimal_observables,
    subsystem_dim,
)

EXIT_OK, EXIT_ERROR, EXIT_ENTANGLED, EXIT_VERIFY_FAILED = 0, 1, 2, 3
VERIFY_SLACK = 1e-9


def _parse_dims(text):
    dims = []
    for part in text.split(","):
        if ".." in part:
            lo, hi = part.split("..")
            dims.extend(range(int(lo), int(hi) + 1))
        else:
            dims.append(int(part))
    return sorted(set(dims))


def build_parser():
    p = argparse.ArgumentParser(prog="blochbound", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("basis", help="write the SU(N) generators and d-tensor")
    b.add_argument("--dim", type=int, required=True)
    b.add_argument("--out", type=Path, help="output directory (default: report on stdout)")

    bd = sub.add_parser("bounds", help="state-independent bounds on a sum of variances")
    bd.add_argument("observables", nargs="+", type=Path)
    norm = bd.add_mutually_exclusive_group(required=True)
    norm.add_argument("--bloch-norm", type=float)
    norm.add_argument("--pure", action="store_true", help="use the pure-state Bloch norm")
    bd.add_argument("--mode", choices=("theorem1", "qubit", "strict-paper"), default="theorem1")
    bd.add_argument("--strict-paper", action="store_true", help="same as --mode strict-paper")
    bd.add_argument("--verify", action="store_true", help="add oracle extrema to the report")
    bd.add_argument("--samples", type=int, default=2000)
    bd.add_argument("--seed", type=int, default=DEFAULT_SEED)
    bd.add_argument("--out", type=Path)

    e = sub.add_parser("entangle", help="entanglement test for an N x N bipartite state")
    e.add_argument("state", type=Path)
    e.add_argument("--criterion", choices=("kyfan", "local-sum"), default="kyfan")
    e.add_argument("--emit-observables", type=Path, metavar="DIR")
    e.add_argument("--out", type=Path)

    v = sub.add_parser("verify", help="run the randomized verification suites")
    v.add_argument("--suite", choices=SUITES + ("all",), default="all")
    v.add_argument("--samples", type=int, default=10**4)
    v.add_argument("--seed", type=int, default=DEFAULT_SEED)
    v.add_argument("--dims", type=_parse_dims, default=[2, 3])
    v.add_argument("--workers", type=int, default=1)
    v.add_argument("--out", type=Path)
    return p


def cmd_basis(args):
    basis = build_basis(args.dim)
    if args.out is not None:
        write_basis(args.out, basis)
        result = {"dim": basis.dim, "directory": str(args.out), "n_generators": basis.size}
    else:
        manifest = basis_to_dict(basis)
        manifest["generators"] = [
            {"label": lab, "re": g.real.tolist(), "im": g.imag.tolist()}
            for lab, g in zip(basis.labels, basis.generators)
        ]
        result = manifest
    print(f"SU({basis.dim}): {basis.size} generators", file=sys.stderr)
    return {"inputs": {"dim": args.dim}, "result": result}, EXIT_OK


def cmd_bounds(args):
    files = [read_matrix_file(p) for p in args.observables]
    dims = {f.dim for f in files}
    if len(dims) != 1:
        raise ShapeError(f"observables have mixed dimensions {sorted(dims)}")
    dim = dims.pop()
    basis = build_basis(dim)
    obs_set = build_set([f.matrix for f in files], basis)
    mode = "strict-paper" if args.strict_paper else args.mode
    x = max_bloch_norm(dim) if args.pure else args.bloch_norm
    if mode == "qubit":
        if dim != 2:
            raise InvalidDimensionError(f"--mode qubit needs N=2, got N={dim}")
        report = qubit_bounds(obs_set, x)
    else:
        report = theorem1_bounds(obs_set, x, strict_paper=mode == "strict-paper")
    result = {"bounds": report.to_dict()}
    code = EXIT_OK
    if args.verify:
        purity = "pure" if args.pure else x
        ex = extremize_sum(obs_set, purity, SamplerConfig(seed=args.seed, n_samples=args.samples, dim=dim), basis)
        inside = (
            report.lower - VERIFY_SLACK <= ex.empirical_min and ex.empirical_max <= report.upper + VERIFY_SLACK
        )
        result["oracle"] = ex.to_dict()
        result["oracle"]["inside_sandwich"] = inside
        code = EXIT_OK if inside else EXIT_VERIFY_FAILED
    print(f"{report.lower:.12g} <= sum of variances <= {report.upper:.12g}  ({mode}, |r|={x:.6g})", file=sys.stderr)
    inputs = {"observables": [str(p) for p in args.observables], "bloch_norm": x, "mode": mode, "verify": args.verify}
    return {"inputs": inputs, "seed": args.seed, "result": result}, code


def cmd_entangle(args):
    f = read_matrix_file(args.state)
    N = subsystem_dim(f.dim)
    basis = build_basis(N)
    state = extract_bipartite(f.matrix, basis)
    pairs = optimal_observables(state, basis)
    if args.criterion == "kyfan":
        report = criterion_kyfan(state)
    else:
        report = criterion_local_sum(state, pairs, basis)
    result = {"witness": report.to_dict()}
    if args.emit_observables is not None:
        out = args.emit_observables
        out.mkdir(parents=True, exist_ok=True)
        names = []
        for i, (A, B) in enumerate(pairs, start=1):
            write_matrix_file(out / f"A_{i:03d}.json", A, "observable")
            write_matrix_file(out / f"B_{i:03d}.json", B, "observable")
            names.append([f"A_{i:03d}.json", f"B_{i:03d}.json"])
        result["observables"] = {"directory": str(out), "pairs": names}
    print(
        f"{report.verdict.value}: ||T||_KF = {report.kyfan:.12g}, threshold = {report.threshold:.12g}, "
        f"local sum = {report.local_sum:.12g} (floor {report.local_floor:g})",
        file=sys.stderr,
    )
    code = EXIT_ENTANGLED if report.verdict is Verdict.ENTANGLED else EXIT_OK
    inputs = {"state": str(args.state), "criterion": args.criterion}
    return {"inputs": inputs, "result": result}, code


def cmd_verify(args):
    result = run_suite(args.suite, args.samples, args.seed, args.dims, args.workers)
    for c in result["checks"]:
        print(f"{'PASS' if c['passed'] else 'FAIL'}  {c['name']}", file=sys.stderr)
    inputs = {"suite": args.suite, "samples": args.samples, "dims": args.dims}
    return {"inputs": inputs, "seed": args.seed, "result": result}, (
        EXIT_OK if result["passed"] else EXIT_VERIFY_FAILED
    )


COMMANDS = {"basis": cmd_basis, "bounds": cmd_bounds, "entangle": cmd_entangle, "verify": cmd_verify}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        body, code = COMMANDS[args.command](args)
    except (BlochError, OSError, ValueError, KeyError) as exc:
        print(f"blochbound {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    report = {"tool": "blochbound", "version": __version__, "command": args.command, "seed": None}
    report.update(body)
    report["wall_time"] = time.perf_counter() - start
    text = dumps_report(report)
    out = getattr(args, "out", None)
    if out is not None and args.command != "basis":
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
