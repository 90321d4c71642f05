"""Command-line interface.

Subcommands:
    hunt run --config FILE [--rho-override R] [--seed S] [--out-dir D]
        Run the full pipeline; writes report.json and report.csv.
    hunt verify {chen,denseness,smoothing,asymptotics} [--trials N]
        Re-run a certificate suite; exit status 0 iff every case passes.
    hunt diagnose ssoc --pair A,B --xmax X [--checkpoints ...]
        Pairwise orthonormality diagnostic as CSV on stdout.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .catalog import ssoc_csv, ssoc_diagnostic
from .pipeline import emit_report, parse_config, run_hunt, spec_from_token
from .verify import verify_asymptotics, verify_chen, verify_denseness, \
    verify_smoothing


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hunt",
        description="Hunt simultaneous extreme values of L-functions on a "
                    "vertical line.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the hunt pipeline from a config file")
    p_run.add_argument("--config", required=True, help="key = value config file")
    p_run.add_argument("--rho-override", type=float, default=None,
                       help="window center override (>= 3)")
    p_run.add_argument("--seed", type=int, default=None,
                       help="baseline sampling seed override")
    p_run.add_argument("--out-dir", default=".", help="report output directory")

    p_verify = sub.add_parser("verify", help="re-run a certificate suite")
    p_verify.add_argument("suite",
                          choices=("chen", "denseness", "smoothing",
                                   "asymptotics"))
    p_verify.add_argument("--trials", type=int, default=100,
                          help="number of random cases where applicable")
    p_verify.add_argument("--seed", type=int, default=0)

    p_diag = sub.add_parser("diagnose", help="emit diagnostic tables")
    diag_sub = p_diag.add_subparsers(dest="diagnostic", required=True)
    p_ssoc = diag_sub.add_parser("ssoc", help="pairwise prime-sum diagnostic")
    p_ssoc.add_argument("--pair", required=True,
                        help="comma-separated spec tokens, e.g. zeta,chi4")
    p_ssoc.add_argument("--xmax", type=float, required=True)
    p_ssoc.add_argument("--checkpoints", default=None,
                        help="comma-separated x values (default: decades up "
                             "to xmax)")
    return parser


def _cmd_run(args) -> int:
    text = Path(args.config).read_text(encoding="utf-8")
    config = parse_config(text)
    if args.rho_override is not None:
        config.rho_override = args.rho_override
    if args.seed is not None:
        config.seed = args.seed
    report = run_hunt(config)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    emit_report(report, "json", out / "report.json")
    emit_report(report, "csv", out / "report.csv")
    for r in report.results:
        pct = "n/a" if r.percentile is None else f"{r.percentile:.2f}"
        print(f"{r.name}: t={r.t_best:.6f} aligned log value {r.achieved:+.6f} "
              f"(baseline percentile {pct})")
    print(f"window_ok={report.window_ok} max|t_i-t_j|={report.max_pairwise_dt:.4f} "
          f"2*tau={2 * report.tau:.4f}")
    print(f"wrote {out / 'report.json'} and {out / 'report.csv'}")
    return 0


def _cmd_verify(args) -> int:
    if args.suite == "chen":
        result = verify_chen(trials=args.trials, seed=args.seed)
    elif args.suite == "denseness":
        result = verify_denseness()
    elif args.suite == "smoothing":
        result = verify_smoothing(trials=args.trials, seed=args.seed)
    else:
        result = verify_asymptotics()
    print(result.summary())
    if not result.ok:
        for case in result.cases:
            if not case.get("ok", False):
                print(f"  failed: {case}")
    return 0 if result.ok else 1


def _cmd_diagnose(args) -> int:
    tokens = [t.strip() for t in args.pair.split(",")]
    if len(tokens) != 2:
        print("--pair needs exactly two spec tokens", file=sys.stderr)
        return 2
    spec_a = spec_from_token(tokens[0])
    spec_b = spec_from_token(tokens[1])
    if args.checkpoints:
        checkpoints = [float(x) for x in args.checkpoints.split(",")]
    else:
        checkpoints = []
        x = 10.0
        while x < args.xmax:
            checkpoints.append(x)
            x *= 10.0
        checkpoints.append(float(args.xmax))
    rows = ssoc_diagnostic(spec_a, spec_b, args.xmax, checkpoints)
    sys.stdout.write(ssoc_csv(rows))
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "verify":
        return _cmd_verify(args)
    return _cmd_diagnose(args)


if __name__ == "__main__":
    sys.exit(main())
