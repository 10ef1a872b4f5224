"""Command-line front end: solve, verify, gen, fuzz, regress.

Exit codes: 0 clean verdict, 1 verification or regression failure,
2 usage, I/O or parse error.
"""

from __future__ import annotations

import argparse
from pathlib import Path
import sys

import numpy as np

from . import caseio
from .campaign import DEFAULT_MARGIN_FACTOR, DEFAULT_SHIFT, parse_dims, parse_mix, run_campaign
from .casegen import CaseRecipe, RegenerationLimit, derive_seed, generate
from .ldp import Status, ldp_solve
from .problem import ToleranceConfig
from .regress import run_regression
from .verify import verify_feasible

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _fmt(v) -> str:
    return " ".join(caseio.format_value(x) for x in v)


def _config(args) -> ToleranceConfig:
    try:
        return ToleranceConfig(
            tau_feas=args.tau_feas,
            tau_w=args.tau_w,
            tau_div=args.tau_div,
            tau_kkt=args.tau_kkt,
            max_iterations=args.max_iter,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _load(path) -> caseio.CaseFile:
    try:
        return caseio.load(path)
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}") from None
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from None


def cmd_solve(args) -> int:
    cfg = _config(args)
    case = _load(args.case)
    prob = case.problem
    out = ldp_solve(prob, cfg)
    print(f"status: {out.status}")
    if out.status is Status.SOLVED:
        print(f"x: {_fmt(out.x)}")
        print(f"norm: {caseio.format_value(float(np.linalg.norm(out.x)))}")
        rep = out.report
        print(f"max violation: {rep.max_violation:.6g} (row {rep.worst_row + 1})")
        c = out.certificate
        print(
            f"kkt: stationarity {c.stationarity_residual:.3e}, "
            f"complementarity {c.complementarity_residual:.3e}, lambda_min {c.lam_min:.3e}"
        )
        return EXIT_OK
    res = out.internals.nnls
    if res is not None:
        print(f"nnls residual norm: {res.rnorm:.6g}, pivot r_(n+1): {out.internals.pivot:.6g}")
    if out.status is Status.INFEASIBLE:
        return EXIT_OK
    rep = out.report
    if rep is not None:
        print(f"rejected: {rep.reason}")
        print(f"candidate x: {_fmt(rep.candidate_x)}")
        print(f"max violation: {rep.max_violation:.6g} (row {rep.worst_row + 1})")
        if rep.kkt is not None:
            c = rep.kkt
            print(
                f"kkt: stationarity {c.stationarity_residual:.3e}, "
                f"complementarity {c.complementarity_residual:.3e}, lambda_min {c.lam_min:.3e}"
            )
    return EXIT_FAIL


def _parse_vector(text: str) -> np.ndarray:
    try:
        return np.array([caseio.parse_value(t) for t in text.replace(",", " ").split()])
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_verify(args) -> int:
    cfg = _config(args)
    case = _load(args.case)
    if args.witness:
        if case.witness is None:
            raise UsageError(f"{args.case}: no witness section")
        x = case.witness
    elif args.x is not None:
        x = _parse_vector(args.x)
    else:
        try:
            x = _parse_vector(Path(args.x_file).read_text())
        except OSError as exc:
            raise UsageError(f"{args.x_file}: {exc.strerror}") from None
    if x.shape[0] != case.problem.n:
        raise UsageError(f"candidate has {x.shape[0]} entries but n = {case.problem.n}")
    rep = verify_feasible(case.problem, x, cfg)
    print(f"x: {_fmt(x)}")
    for i, (v, s) in enumerate(zip(rep.violations, rep.scales)):
        flag = "ok" if v <= cfg.tau_feas * s else "VIOLATED"
        print(f"row {i + 1}: violation {v:.6g} (allowed {cfg.tau_feas * s:.3g}) {flag}")
    verdict = "PASS" if rep.passed else "FAIL"
    print(f"{verdict}: worst row {rep.worst_row + 1}, max violation {rep.max_violation:.6g}")
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_gen(args) -> int:
    kind = args.kind
    if args.margin is not None and kind != "interior":
        raise UsageError("--margin only applies to --kind interior")
    if args.shift is not None and kind != "infeasible":
        raise UsageError("--shift only applies to --kind infeasible")
    if args.l is not None and kind not in ("transformed", "interior"):
        raise UsageError("--l only applies to --kind transformed or interior")
    if args.count < 1:
        raise UsageError("--count must be at least 1")
    out_dir = Path(args.out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise UsageError(f"{out_dir}: {exc.strerror}") from None
    for index in range(args.count):
        try:
            recipe = CaseRecipe(
                m=args.m,
                n=args.n,
                l=args.l,
                scale_g=args.scale_g,
                scale_x0=args.scale_x0,
                zero_cols=args.zero_cols,
                margin=(args.margin or DEFAULT_MARGIN_FACTOR * args.scale_g) if kind == "interior" else None,
                shift=(args.shift or DEFAULT_SHIFT) if kind == "infeasible" else None,
                use_transform=kind == "transformed" or (kind == "interior" and args.l is not None),
                seed=derive_seed(args.seed, index),
            )
            record = generate(recipe)
        except (ValueError, RegenerationLimit) as exc:
            raise UsageError(str(exc)) from None
        meta = {"master_seed": args.seed, "index": index, "case_seed": recipe.seed, "kind": record.kind}
        path = out_dir / f"case-s{args.seed}-i{index:05d}.ldp"
        try:
            caseio.dump(path, record.problem, record.witness, meta)
        except OSError as exc:
            raise UsageError(f"{path}: {exc.strerror}") from None
        print(path)
    return EXIT_OK


def cmd_fuzz(args) -> int:
    cfg = _config(args)
    try:
        mix = parse_mix(args.mix) if args.mix else None
        dims = parse_dims(args.dims) if args.dims else None
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.cases < 1:
        raise UsageError("--cases must be at least 1")
    try:
        report = run_campaign(
            args.cases, args.seed, mix, dims, args.dump_dir, cfg,
            workers=args.workers, oracle=args.oracle,
        )
    except OSError as exc:
        raise UsageError(f"I/O failure: {exc}") from None
    print(report.render_text(), end="")
    print("--- report ---")
    print(report.render_kv(), end="")
    target = args.report or (Path(args.dump_dir) / "campaign-report.txt" if args.dump_dir else None)
    if target is not None:
        try:
            Path(target).write_text(report.render_kv())
        except OSError as exc:
            raise UsageError(f"{target}: {exc.strerror}") from None
    if not report.clean or (args.strict and report.anomalies):
        return EXIT_FAIL
    return EXIT_OK


def cmd_regress(args) -> int:
    cfg = _config(args)
    checks = run_regression(args.fixtures, cfg)
    for c in checks:
        print(c.line())
    passed = sum(c.passed for c in checks)
    ok = passed == len(checks)
    print(f"{'PASS' if ok else 'FAIL'}: {passed}/{len(checks)} assertions")
    return EXIT_OK if ok else EXIT_FAIL


def _add_tolerances(p: argparse.ArgumentParser):
    d = ToleranceConfig()
    g = p.add_argument_group("tolerances")
    g.add_argument("--tau-feas", type=float, default=d.tau_feas, help="scaled feasibility tolerance")
    g.add_argument("--tau-w", type=float, default=d.tau_w, help="NNLS dual tolerance")
    g.add_argument("--tau-div", type=float, default=d.tau_div, help="division guard on r_(n+1)")
    g.add_argument("--tau-kkt", type=float, default=d.tau_kkt, help="KKT certificate tolerance")
    g.add_argument("--max-iter", type=int, default=None, help="NNLS iteration cap (default 3 per constraint row)")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ldpguard", description="Verified least distance programming.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="solve one case file")
    p.add_argument("case")
    _add_tolerances(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check a candidate vector against a case file")
    p.add_argument("case")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--x", help="candidate, comma or space separated")
    src.add_argument("--x-file", help="file holding the candidate values")
    src.add_argument("--witness", action="store_true", help="use the case file's witness")
    _add_tolerances(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="write generated case files")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--l", type=int, default=None, help="rows after the A G B transform")
    p.add_argument("--kind", choices=("consistent", "transformed", "interior", "infeasible"), default="consistent")
    p.add_argument("--zero-cols", type=int, default=0)
    p.add_argument("--scale-g", type=float, default=100.0)
    p.add_argument("--scale-x0", type=float, default=1000.0)
    p.add_argument("--margin", type=float, default=None, help="upper end of the margin draw (interior)")
    p.add_argument("--shift", "--shift-scale", dest="shift", type=float, default=None,
                   help="shift size relative to max|h| (infeasible)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("fuzz", help="run a seeded campaign")
    p.add_argument("--cases", type=int, default=50_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mix", default=None, help="e.g. consistent=40,transformed=20,interior=20,infeasible=20")
    p.add_argument("--dims", default=None, help="e.g. m=1:12,n=1:6")
    p.add_argument("--dump-dir", default=None)
    p.add_argument("--report", default=None, help="write the key=value report here")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--oracle", action="store_true", help="cross-check verdicts with the exact oracle")
    p.add_argument("--strict", action="store_true", help="exit 1 on any anomaly, including guard rejections")
    _add_tolerances(p)
    p.set_defaults(func=cmd_fuzz)

    p = sub.add_parser("regress", help="run the built-in regression fixtures")
    p.add_argument("--fixtures", default=None, help="directory holding case1.ldp .. case3.ldp")
    _add_tolerances(p)
    p.set_defaults(func=cmd_regress)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"ldpguard: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
