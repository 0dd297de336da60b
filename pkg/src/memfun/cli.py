"""Command-line front end.

Commands::

    memfun eval               --config cfg.json [--out DIR] [--grid N] [--tol X] [--seed S]
    memfun classify-kernel    --config cfg.json [--out DIR] [--grid N] [--tol X]
    memfun verify-sensitivity --config cfg.json [--out DIR] [--seed S]
    memfun verify            [--config suite.json] [--out DIR] [--seed S]

Exit codes: 0 success, 1 verification failures, 2 config or parse error,
3 numerical non-convergence.  ``MEMFUN_THREADS`` caps internal parallelism.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .config import build_kernel, build_sensitivity, build_trajectory, load_run_config
from .errors import ConfigError, InvalidParameter, NonConvergence, UnsupportedKernelClass
from .functionals import memory_functional
from .kernels import classify
from .sensitivity import verify_axioms
from .verify import SuiteConfig, run_suite

EXIT_OK = 0
EXIT_FAILURES = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _worker_cap() -> int | None:
    raw = os.environ.get("MEMFUN_THREADS")
    if raw is None:
        return None
    try:
        workers = int(raw)
    except ValueError:
        raise ConfigError(f"MEMFUN_THREADS must be an integer, got '{raw}'")
    if workers < 1:
        raise ConfigError("MEMFUN_THREADS must be at least 1")
    return workers


def _out_path(out_dir: str | None, configured: str | None, default_name: str, base_dir: Path) -> Path:
    if configured is not None:
        path = Path(configured)
        if not path.is_absolute():
            path = (Path(out_dir) if out_dir else base_dir) / path
    else:
        path = Path(out_dir or ".") / default_name
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _cmd_eval(args) -> int:
    config = load_run_config(args.config, args.grid, args.tol)
    if config.trajectory_source is None:
        raise ConfigError("eval needs a 'trajectory' section in the config")
    domain = config.domain
    kernel = build_kernel(config.kernel_spec, domain, config.base_dir)
    sensitivity = build_sensitivity(config.sensitivity_spec, domain, args.seed, config.base_dir)
    trajectory = build_trajectory(config.trajectory_source, domain, args.seed, config.base_dir)
    try:
        report = memory_functional(trajectory, kernel, sensitivity, config.quad_tol)
    except UnsupportedKernelClass as exc:
        raise ConfigError(str(exc))

    report_path = _out_path(args.out, config.report_path, "eval_report.json", config.base_dir)
    report_path.write_text(json.dumps(report.to_dict(), indent=2) + "\n")
    if config.plot_path is not None:
        plot_path = _out_path(args.out, config.plot_path, "eval_plot.csv", config.base_dir)
        plot_path.write_text(report.plot_csv())

    print(f"value       {report.value:.17g}")
    print(f"sup_norm    {report.sup_norm:.17g}")
    print(f"upper_bound {report.upper_bound:.17g}")
    print(f"peak_time   {report.peak_time:.17g}")
    print(f"report      {report_path}")
    return EXIT_OK


def _cmd_classify_kernel(args) -> int:
    config = load_run_config(args.config, args.grid, args.tol)
    kernel = build_kernel(config.kernel_spec, config.domain, config.base_dir)
    report = classify(kernel)
    text = json.dumps(report.to_dict(), indent=2)
    print(text)
    if args.out is not None:
        path = _out_path(args.out, None, "kernel_report.json", config.base_dir)
        path.write_text(text + "\n")
    return EXIT_OK


def _cmd_verify_sensitivity(args) -> int:
    config = load_run_config(args.config, args.grid, args.tol)
    sensitivity = build_sensitivity(config.sensitivity_spec, config.domain, args.seed, config.base_dir)
    report = verify_axioms(sensitivity)
    text = json.dumps(report.to_dict(), indent=2)
    print(text)
    if args.out is not None:
        path = _out_path(args.out, None, "sensitivity_report.json", config.base_dir)
        path.write_text(text + "\n")
    return EXIT_OK if report.passed else EXIT_FAILURES


def _cmd_verify(args) -> int:
    if args.config is not None:
        path = Path(args.config)
        if not path.exists():
            raise ConfigError(f"config file does not exist: {path}")
        try:
            raw = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}")
        config = SuiteConfig.from_dict(raw)
    else:
        config = SuiteConfig()
    report = run_suite(config, seed=args.seed, max_workers=_worker_cap())

    out_path = _out_path(args.out, None, "verify_report.json", Path("."))
    out_path.write_text(report.to_json())
    for entry in report.entries:
        status = "PASS" if entry.failures == 0 else "FAIL"
        print(
            f"{status} {entry.theorem_id} trials={entry.trials} "
            f"failures={entry.failures} worst_margin={entry.worst_margin:.17g}"
        )
    print(f"report      {out_path}")
    return EXIT_OK if report.passed else EXIT_FAILURES


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="memfun", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn, needs_config in (
        ("eval", _cmd_eval, True),
        ("classify-kernel", _cmd_classify_kernel, True),
        ("verify-sensitivity", _cmd_verify_sensitivity, True),
        ("verify", _cmd_verify, False),
    ):
        p = sub.add_parser(name)
        p.add_argument("--config", required=needs_config, help="JSON config path")
        p.add_argument("--seed", type=int, default=0, help="seed for generators and the suite")
        p.add_argument("--out", default=None, help="output directory for reports")
        p.add_argument("--grid", type=int, default=None, help="override grid node count")
        p.add_argument("--tol", type=float, default=None, help="override quadrature tolerance")
        p.set_defaults(fn=fn)
    return parser


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InvalidParameter as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NonConvergence as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
