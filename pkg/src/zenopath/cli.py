"""Batch experiment driver.

Subcommands: verify, schedule, run, gap-scan. Exit codes are stable:
0 ok, 1 usage or parse error, 2 verification failure, 3 gapless path,
4 runtime protocol error.
"""

from __future__ import annotations

import argparse
import datetime
import sys
from pathlib import Path

from . import configio
from .errors import ConfigError, DegeneratePath, NoGap, ZenopathError
from .hamiltonians import FrustrationFreeHamiltonian, verify_frustration_free
from .protocol import compute_conventional_time, run as run_protocol
from .schedule import analyze_schedule, gap_profile, required_steps

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY_FAIL = 2
EXIT_NO_GAP = 3
EXIT_RUNTIME = 4


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors; the documented usage/parse
    # exit code here is 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _build_parser() -> _Parser:
    parser = _Parser(prog="zenopath", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="check frustration-freeness along a path")
    verify.add_argument("--config", required=True, help="instance/path file (TOML)")
    verify.add_argument("--samples", type=int, default=33)
    verify.add_argument("--tol", type=float, default=1e-9)
    verify.add_argument("--out", default=None, help="output directory")

    schedule = sub.add_parser("schedule", help="choose N and emit the per-step table")
    schedule.add_argument("--config", required=True)
    schedule.add_argument("--epsilon", type=float, required=True)
    schedule.add_argument("--out", default=None)

    runp = sub.add_parser("run", help="execute a protocol run from an experiment file")
    runp.add_argument("--config", required=True)
    runp.add_argument("--seed", type=int, default=None, help="override protocol.seed")
    runp.add_argument("--trajectories", type=int, default=None)
    runp.add_argument("--epsilon", type=float, default=None)
    runp.add_argument("--out", default=None)
    runp.add_argument("--format", default=None, help="comma-separated subset of json,csv")

    scan = sub.add_parser("gap-scan", help="gap and ground energy along the path")
    scan.add_argument("--config", required=True)
    scan.add_argument("--samples", type=int, default=64)
    scan.add_argument("--out", default=None)

    return parser


def _load_path(config_file: str):
    data = configio.load_toml(config_file)
    if "instance" not in data:
        raise ConfigError(f"{config_file}: missing [instance] table")
    instance = configio.parse_instance(data["instance"], Path(config_file).parent)
    if isinstance(instance, FrustrationFreeHamiltonian):
        return configio.as_constant_path(instance)
    return instance


def _out_dir(arg: str | None, fallback: Path | None = None) -> Path:
    directory = Path(arg) if arg is not None else (fallback or Path("."))
    directory.mkdir(parents=True, exist_ok=True)
    return directory


def _cmd_verify(args) -> int:
    path = _load_path(args.config)
    report = verify_frustration_free(path, n_samples=args.samples, tol=args.tol)
    out = _out_dir(args.out) / "ff_report.json"
    out.write_text(configio.ff_report_json(report))
    status = "pass" if report.passed else "fail"
    print(
        f"frustration_free={status} max_residual={report.max_residual!r} "
        f"worst_s={report.worst_s!r} report={out}"
    )
    return EXIT_OK if report.passed else EXIT_VERIFY_FAIL


def _cmd_schedule(args) -> int:
    path = _load_path(args.config)
    n_steps = required_steps(path, args.epsilon)
    analysis = analyze_schedule(path, n_steps)
    out = _out_dir(args.out) / "schedule.csv"
    out.write_text(configio.schedule_csv(analysis))
    try:
        # diagnostic rescaling of N by the largest per-step change; no dynamics attached
        time_scale = repr(compute_conventional_time(analysis))
    except DegeneratePath:
        time_scale = "nan"
    print(
        f"N={n_steps} epsilon_bound={analysis.epsilon_bound!r} "
        f"max_ratio={analysis.max_ratio!r} conventional_time={time_scale} csv={out}"
    )
    return EXIT_OK


def _cmd_run(args) -> int:
    experiment = configio.parse_experiment(args.config)
    instance = experiment.instance
    if isinstance(instance, FrustrationFreeHamiltonian):
        instance = configio.as_constant_path(instance)
    table = dict(experiment.protocol_table)
    if args.seed is not None:
        table["seed"] = args.seed
    if args.trajectories is not None:
        table["trajectories"] = args.trajectories
    if args.epsilon is not None:
        table["epsilon"] = args.epsilon
    config = configio.parse_protocol(table, instance)

    report = run_protocol(config)

    formats = experiment.formats
    if args.format is not None:
        formats = tuple(f.strip() for f in args.format.split(",") if f.strip())
        bad = set(formats) - set(configio.FORMATS)
        if bad:
            raise ConfigError(f"--format: unknown formats {sorted(bad)}")
    directory = _out_dir(args.out, experiment.output_dir)
    timestamp = datetime.datetime.now(datetime.timezone.utc).isoformat()
    if "json" in formats:
        (directory / "report.json").write_text(configio.report_json(report, timestamp))
    if "csv" in formats:
        (directory / "steps.csv").write_text(configio.per_step_csv(report))
    print(
        f"success_exact={report.overall_success_exact!r} "
        f"bound={report.success_lower_bound!r} N={report.N_used} "
        f"mode={report.mode} seed={report.seed}"
    )
    return EXIT_OK


def _cmd_gap_scan(args) -> int:
    path = _load_path(args.config)
    points = gap_profile(path, n_samples=args.samples)
    out = _out_dir(args.out) / "gap_profile.csv"
    out.write_text(configio.gap_profile_csv(points))
    gapless = sum(1 for p in points if p.gap is None)
    print(f"samples={len(points)} gapless_points={gapless} csv={out}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handlers = {
        "verify": _cmd_verify,
        "schedule": _cmd_schedule,
        "run": _cmd_run,
        "gap-scan": _cmd_gap_scan,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NoGap as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_GAP
    except ZenopathError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entry_point() -> None:
    sys.exit(main())
