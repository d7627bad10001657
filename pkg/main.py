"""Command-line entry point for the spin-cavity entanglement toolkit."""

import argparse
import sys
from pathlib import Path

from src.cli.runner import available_experiments, run_experiment
from src.core.errors import EXIT_NUMERIC, exit_code_for
from src.utils.logger import configure_logging, disable_external_logging, get_main_logger


def parse_args(argv=None):
    """Parse command line arguments."""
    parser = argparse.ArgumentParser(
        description='Spin-cavity entanglement studies: each subcommand writes CSV/JSON data, '
                    'SVG figures and a manifest to --out'
    )
    parser.add_argument('experiment', choices=available_experiments(),
                        help='Study to run')
    parser.add_argument('--config', type=Path,
                        help='ModelParams JSON, or {"model": ..., "settings": ...}')
    parser.add_argument('--out', type=Path, default=Path('results'),
                        help='Output directory (default=results)')
    parser.add_argument('--seed', type=int, default=0,
                        help='Root seed of every random stream (default=0)')
    parser.add_argument('--jobs', '-j', type=int, default=1,
                        help='Worker processes (default=1)')
    parser.add_argument('--set', dest='overrides', action='append', default=[], metavar='KEY=VALUE',
                        help='Override a setting, or a model field as model.<field>=<json>; repeatable')
    parser.add_argument('--replay', action='store_true',
                        help='optimize: replay a published table row instead of searching')
    parser.add_argument('--gamma', type=float,
                        help='optimize: uniform decay rate for a dissipative replay')
    parser.add_argument('--no-plots', action='store_false', dest='plots',
                        help='Skip SVG figures')
    parser.add_argument('--log-level', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'],
                        default='INFO', help='Logging level (default=INFO)')
    parser.add_argument('--quiet', '-q', action='store_true',
                        help='Suppress all logging output')
    parser.add_argument('--log-file', type=str, help='Log to file (e.g., --log-file run.log)')
    args = parser.parse_args(argv)
    if (args.replay or args.gamma is not None) and args.experiment != 'optimize':
        parser.error(f"--replay and --gamma apply to optimize only, not {args.experiment}")
    return args


def collect_overrides(args):
    """--set arguments plus the optimize shortcuts, shortcuts last."""
    overrides = list(args.overrides)
    if args.replay:
        overrides.append('replay=true')
    if args.gamma is not None:
        overrides.append(f'gamma={args.gamma!r}')
    return overrides


def main(argv=None):
    """Run one experiment and return its exit code."""
    args = parse_args(argv)

    configure_logging(level=args.log_level, quiet=args.quiet, log_file=args.log_file)
    disable_external_logging()
    logger = get_main_logger()
    logger.debug(f"Arguments: {vars(args)}")

    try:
        result = run_experiment(
            args.experiment,
            out_dir=args.out,
            config_path=args.config,
            seed=args.seed,
            jobs=args.jobs,
            overrides=collect_overrides(args),
            plots=args.plots,
        )
    except KeyboardInterrupt:
        logger.error("Interrupted")
        return EXIT_NUMERIC
    except Exception as e:
        code = exit_code_for(e)
        logger.error(f"{args.experiment} failed ({type(e).__name__}, exit {code}): {e}")
        logger.debug("Traceback", exc_info=True)
        return code

    if result.outcome.budget_exhausted:
        logger.warning("Evaluation budget exhausted; results are the best point found")
    logger.info(f"Manifest: {result.manifest}")
    return result.exit_code


if __name__ == '__main__':
    sys.exit(main())
