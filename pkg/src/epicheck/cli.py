"""Command-line entry point.

Subcommands
-----------
run
    execute a suite from a JSON config (or the built-in default suite)
    and emit a JSON/CSV report.  Exit code 0: all verdicts hold, 1: at
    least one violation, 2: bad configuration.
check
    run a single named check on freshly generated instances.
scan-lambda
    exploratory second-difference scan of the conditional ratio curve
    along the interpolation path; no verdict, exit code 0.
"""

from __future__ import annotations

import argparse
import json
import sys

from .checks import CheckConfig, lambda_concavity_scan
from .exceptions import ConfigError
from .runner import (
    REGISTRY,
    config_from_dict,
    default_config,
    generate_instance,
    run_suite,
    write_report,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="epicheck",
        description="Numerical checks of entropy-power, Fisher-information, "
        "and determinant-ratio inequalities on Gaussian mixtures.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a configured suite of checks")
    run_p.add_argument("--config", help="JSON suite configuration file")
    run_p.add_argument("--seed", type=int, help="override the suite seed")
    run_p.add_argument("--out", help="report destination (default: stdout)")
    run_p.add_argument("--format", choices=("json", "csv"), help="report format")

    check_p = sub.add_parser("check", help="run one named check")
    check_p.add_argument("name", help="registered check name (see 'run --help')")
    check_p.add_argument("--dim", type=int, default=3)
    check_p.add_argument("--instances", type=int, default=1)
    check_p.add_argument("--samples", type=int, default=20_000)
    check_p.add_argument("--seed", type=int, default=0)
    check_p.add_argument("--out", help="also write a JSON report here")

    scan_p = sub.add_parser(
        "scan-lambda", help="second-difference scan of the conditional ratio curve"
    )
    scan_p.add_argument("--dim", type=int, default=3)
    scan_p.add_argument("--grid", type=int, default=21)
    scan_p.add_argument("--samples", type=int, default=20_000)
    scan_p.add_argument("--seed", type=int, default=0)
    scan_p.add_argument("--out", help="scan destination (default: stdout)")
    return parser


def _print_summary(report: dict, stream) -> None:
    for name, counts in report["summary"].items():
        parts = ", ".join(f"{verdict}: {count}" for verdict, count in counts.items() if count)
        print(f"{name:28s} {parts}", file=stream)


def _cmd_run(args) -> int:
    if args.config is not None:
        try:
            with open(args.config, encoding="utf-8") as handle:
                data = json.load(handle)
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config!r}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {args.config!r} is not valid JSON: {exc}") from exc
        config = config_from_dict(data)
    else:
        config = default_config()
    if args.seed is not None:
        config.seed = args.seed
    if args.out is not None:
        config.output_path = args.out
    if args.format is not None:
        config.output_format = args.format

    report, code = run_suite(config)
    if config.output_path:
        write_report(report, config.output_path, config.output_format)
        _print_summary(report, sys.stdout)
        print(f"wrote {config.output_format} report to {config.output_path}")
    elif config.output_format == "csv":
        from .runner import report_to_csv

        sys.stdout.write(report_to_csv(report))
    else:
        json.dump(report, sys.stdout, indent=2)
        sys.stdout.write("\n")
    return code


def _cmd_check(args) -> int:
    if args.name not in REGISTRY:
        known = ", ".join(sorted(REGISTRY))
        raise ConfigError(f"unknown check {args.name!r}; known checks: {known}")
    config = default_config(seed=args.seed)
    config.mc_samples = args.samples
    entry = REGISTRY[args.name]
    dim = max(args.dim, entry.min_dim)
    config.checks = [
        type(config.checks[0])(args.name, (dim,), args.instances, None, dict(entry.defaults))
    ]
    report, code = run_suite(config)
    for record in report["records"]:
        lam = "" if record["lambda"] is None else f" lambda={record['lambda']:.3g}"
        print(
            f"{record['check_name']} [{record['instance_id']}]{lam} "
            f"verdict={record['verdict']} gap={record['gap']:.6g} "
            f"stderr={record['stderr']:.3g}"
        )
    if args.out:
        write_report(report, args.out, "json")
        print(f"wrote json report to {args.out}")
    return code


def _cmd_scan(args) -> int:
    if args.dim < 2:
        raise ConfigError("scan-lambda needs --dim >= 2")
    if args.grid < 5:
        raise ConfigError("scan-lambda needs --grid >= 5")
    x, y = generate_instance("mixture_pair", args.dim, 0, args.seed)
    cfg = CheckConfig(m=args.samples, seed=args.seed)
    scan = lambda_concavity_scan(x, y, grid=args.grid, cfg=cfg)
    payload = scan.to_dict()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            json.dump(payload, handle, indent=2)
            handle.write("\n")
        print(f"wrote scan to {args.out}")
    else:
        json.dump(payload, sys.stdout, indent=2)
        sys.stdout.write("\n")
    if scan.flagged:
        print(
            f"flagged {len(scan.flagged)} grid point(s) with significantly "
            f"negative second differences",
            file=sys.stderr,
        )
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "check":
            return _cmd_check(args)
        return _cmd_scan(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
