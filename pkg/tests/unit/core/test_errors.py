"""Tests for the error hierarchy, exit codes and the experiment registry."""

import pytest

from src.core.errors import (
    EXIT_CONFIG,
    EXIT_NUMERIC,
    AccuracyError,
    CaseError,
    ConfigError,
    ParameterError,
    SizeError,
    SpinCavityError,
    UnsupportedCaseError,
    exit_code_for,
)
from src.core.interfaces import ExperimentOutcome, ExperimentRegistry, ExperimentRunner


def test_exit_codes():
    """Test configuration problems exit 2 and numerical ones exit 3."""
    assert exit_code_for(ConfigError("x")) == EXIT_CONFIG
    assert exit_code_for(ParameterError("x")) == EXIT_CONFIG
    assert exit_code_for(UnsupportedCaseError("x")) == EXIT_CONFIG
    assert exit_code_for(SizeError("x")) == EXIT_NUMERIC
    assert exit_code_for(AccuracyError("x")) == EXIT_NUMERIC
    assert exit_code_for(ZeroDivisionError()) == EXIT_NUMERIC


def test_hierarchy():
    """Test subclasses share the library base."""
    assert issubclass(UnsupportedCaseError, CaseError)
    assert issubclass(ParameterError, ValueError)
    for cls in (ConfigError, CaseError, SizeError, AccuracyError):
        assert issubclass(cls, SpinCavityError)


class _Dummy(ExperimentRunner):
    name = 'dummy-test'

    def default_settings(self):
        return {'n': 1}

    def default_model(self):
        return None

    def run(self, spec, writer):
        return ExperimentOutcome(checks={'n': spec})


class TestRegistry:
    """Test experiment registration."""

    def teardown_method(self):
        """Remove the dummy runner."""
        ExperimentRegistry._runners.pop(_Dummy.name, None)

    def test_register_and_create(self):
        """Test a registered runner can be created by name."""
        ExperimentRegistry.register(_Dummy.name, _Dummy)
        runner = ExperimentRegistry.create(_Dummy.name)
        assert isinstance(runner, _Dummy)
        assert _Dummy.name in ExperimentRegistry.list_available()
        assert runner.run(2, None).checks == {'n': 2}

    def test_unknown(self):
        """Test unknown names raise ValueError."""
        with pytest.raises(ValueError, match="Unknown experiment"):
            ExperimentRegistry.create('no-such-study')
