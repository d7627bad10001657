"""Core interfaces for pluggable experiments."""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Type


@dataclass
class ExperimentOutcome:
    """Result of one CLI experiment run.

    Attributes:
        outputs: Paths of the data files written, relative to the output directory
        checks: Named scalar diagnostics recorded in the manifest
        budget_exhausted: True when an optimizer stopped on its evaluation budget
    """

    outputs: List[str] = field(default_factory=list)
    checks: Dict[str, Any] = field(default_factory=dict)
    budget_exhausted: bool = False


class ExperimentRunner(ABC):
    """Interface for a named figure-reproduction experiment."""

    name: str = ""
    uses_model: bool = True

    @abstractmethod
    def default_settings(self) -> Dict[str, Any]:
        """
        Typed defaults for every setting the experiment accepts.

        Returns:
            Dict mapping setting name to its default value
        """
        pass

    @abstractmethod
    def default_model(self) -> Optional[Any]:
        """Model parameters used when the config file supplies none."""
        pass

    @abstractmethod
    def run(self, spec: Any, writer: Any) -> ExperimentOutcome:
        """
        Execute the experiment.

        Args:
            spec: Resolved ExperimentSpec
            writer: Output writer bound to the run directory

        Returns:
            ExperimentOutcome describing files and checks
        """
        pass


class ExperimentRegistry:
    """Factory for experiment runners, keyed by subcommand name."""

    _runners: Dict[str, Type[ExperimentRunner]] = {}

    @classmethod
    def register(cls, name: str, runner_class: Type[ExperimentRunner]) -> None:
        """Register an experiment implementation."""
        cls._runners[name] = runner_class

    @classmethod
    def create(cls, name: str, **kwargs) -> ExperimentRunner:
        """Create an experiment runner instance."""
        if name not in cls._runners:
            raise ValueError(f"Unknown experiment: {name}")
        return cls._runners[name](**kwargs)

    @classmethod
    def list_available(cls) -> List[str]:
        """List registered subcommand names in registration order."""
        return list(cls._runners.keys())
