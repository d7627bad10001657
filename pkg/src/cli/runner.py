"""Run one named experiment end to end: resolve, execute, write the manifest."""

import time
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence

from ..core.errors import EXIT_BUDGET, EXIT_OK, ConfigError
from ..core.interfaces import ExperimentOutcome, ExperimentRegistry, ExperimentRunner
from ..utils.logger import get_cli_logger
from . import experiments  # noqa: F401  (registers the runners)
from .config import ExperimentSpec, resolve_spec
from .output import OutputWriter

logger = get_cli_logger()


@dataclass(frozen=True)
class RunResult:
    spec: ExperimentSpec
    outcome: ExperimentOutcome
    manifest: Path
    seconds: float

    @property
    def exit_code(self) -> int:
        return EXIT_BUDGET if self.outcome.budget_exhausted else EXIT_OK


def available_experiments() -> List[str]:
    return ExperimentRegistry.list_available()


def create_runner(name: str) -> ExperimentRunner:
    """Registered runner for a subcommand; unknown names raise ConfigError."""
    try:
        return ExperimentRegistry.create(name)
    except ValueError as e:
        raise ConfigError(f"{e} (available: {', '.join(available_experiments())})") from e


def run_experiment(
    name: str,
    out_dir: Path,
    config_path: Optional[Path] = None,
    seed: int = 0,
    jobs: int = 1,
    overrides: Sequence[str] = (),
    plots: bool = True,
) -> RunResult:
    """
    Resolve the configuration of one subcommand, run it and write its manifest.

    Args:
        name: Subcommand name
        out_dir: Output directory (created if missing)
        config_path: Optional config file
        seed: Root seed
        jobs: Worker process bound
        overrides: --set arguments
        plots: Write SVG figures

    Returns:
        RunResult

    Raises:
        SpinCavityError: configuration or numerical failures, for main to map to exit codes
    """
    runner = create_runner(name)
    spec = resolve_spec(runner, config_path, out_dir, seed=seed, jobs=jobs, overrides=overrides, plots=plots)
    logger.info(f"Running {name} (seed={seed}, jobs={jobs}, config hash {spec.config_hash[:12]})")
    writer = OutputWriter(spec.out_dir, plots=plots)
    start = time.perf_counter()
    outcome = runner.run(spec, writer)
    elapsed = time.perf_counter() - start
    manifest = writer.write_manifest(spec.resolved(), spec.config_hash, outcome.checks, outcome.budget_exhausted)
    for key, value in outcome.checks.items():
        logger.info(f"{name} check {key}: {value}")
    logger.info(f"{name} finished in {elapsed:.1f} s; {len(writer.outputs)} files in {spec.out_dir}")
    return RunResult(spec=spec, outcome=outcome, manifest=manifest, seconds=elapsed)
