"""Command-line entry point: simulate, study, certify."""
import argparse
import sys
from pathlib import Path
from typing import List, Optional

from config.loader import load_run_config, settings
from config.validator import validate_run_config
from experiments.report import emit_report
from experiments.runner import apply_overrides, certify_csv, run_simulation
from experiments.studies import study_dimred_damped, study_dimred_undamped, study_nu_to_zero
from experiments.sweep import SweepManager
from utils.exceptions import (
    CertificationError,
    ConfigError,
    NonConvergenceError,
    SingularSystemError,
    StorageError,
)
from utils.logger import set_level, setup_logger

logger = setup_logger(__name__)

STUDIES = {
    'nu': study_nu_to_zero,
    'dimred-undamped': study_dimred_undamped,
    'dimred-damped': study_dimred_damped,
}

EXIT_OK = 0
EXIT_CERTIFICATION = 1
EXIT_CONFIG = 2
EXIT_NUMERICS = 3


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """Parse command-line arguments."""
    parser = argparse.ArgumentParser(description="Adhesive-contact plate simulator and verification harness.")
    parser.add_argument("--log-level", default=None, help="Overrides ADHESIVE_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_run_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("config", help="YAML/JSON run configuration")
        p.add_argument("--seed", type=int, default=None, help="Overrides the config seed")
        p.add_argument("--dt", type=float, default=None, help="Overrides scheme.dt")
        p.add_argument("--out-dir", default=None, help="Output directory (default: <out_dir>/<name>)")
        p.add_argument("--format", choices=["csv", "json"], default="csv", help="Report format")

    add_run_flags(sub.add_parser("simulate", help="Run one configuration and certify it"))

    study = sub.add_parser("study", help="Run a parameter study")
    study.add_argument("kind", choices=sorted(STUDIES))
    add_run_flags(study)
    study.add_argument("--workers", type=int, default=None, help="Parallel runs (default: settings.max_workers)")

    certify = sub.add_parser("certify", help="Re-check the energy balance of a trajectory.csv")
    certify.add_argument("trajectory", help="trajectory.csv written by simulate")
    certify.add_argument("--tolerance", type=float, default=None, help="Relative balance tolerance")
    certify.add_argument("--one-sided", action="store_true", default=None,
                         help="Check the inequality only (undamped runs)")
    return parser.parse_args(argv)


def _simulate(args: argparse.Namespace) -> int:
    result = run_simulation(args.config, out_dir=args.out_dir, seed=args.seed, dt=args.dt, fmt=args.format)
    print(f"{result.run.name}: passed={result.passed} -> {result.out_dir}")
    if not result.passed:
        raise CertificationError(f"Certification failed for {result.run.name}")
    return EXIT_OK


def _study(args: argparse.Namespace) -> int:
    run = apply_overrides(validate_run_config(load_run_config(args.config)), seed=args.seed, dt=args.dt)
    out_dir = Path(args.out_dir) if args.out_dir else Path(settings.out_dir) / f"{run.name}_{args.kind}"
    report = STUDIES[args.kind](run, SweepManager(args.workers), out_dir)
    files = emit_report(report, out_dir, fmt=args.format)
    for name, ok in report.flags.items():
        print(f"  {name}: {'ok' if ok else 'FAILED'}")
    print(f"{report.study}: {len(report.rows)} rows -> {files[0]}")
    failed = sorted(name for name, ok in report.flags.items() if not ok)
    if failed:
        raise CertificationError(f"Study {report.study} failed: {', '.join(failed)}")
    return EXIT_OK


def _certify(args: argparse.Namespace) -> int:
    report = certify_csv(args.trajectory, rel_tol=args.tolerance, one_sided=args.one_sided)
    print(f"{args.trajectory}: max |residual| {report.max_abs_residual:.3e} "
          f"(scale {report.energy_scale:.3e}), passed={report.passed}")
    if not report.passed:
        raise CertificationError(f"Certification failed for {args.trajectory}")
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    args = parse_args(argv)
    if args.log_level:
        set_level(args.log_level)
    handlers = {'simulate': _simulate, 'study': _study, 'certify': _certify}
    try:
        return handlers[args.command](args)
    except CertificationError as e:
        logger.error(str(e))
        return EXIT_CERTIFICATION
    except (ConfigError, FileNotFoundError, StorageError) as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG
    except (NonConvergenceError, SingularSystemError) as e:
        logger.error(f"Numerical failure: {e}")
        return EXIT_NUMERICS


if __name__ == "__main__":
    sys.exit(main())
