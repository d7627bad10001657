"""Tests for seeded disorder ensembles."""

import csv
import json

import numpy as np
import pytest

from src.core.errors import ParameterError
from src.disorder.ensemble import (
    CSV_COLUMNS, REPLAY_DELTA_C, DisorderSpec, ipr_energy_histogram, replay_realization, run_ensemble,
    scatter_ensemble, write_delta_sidecar, write_ensemble_csv,
)
from src.dynamics.propagator import evolve_unitary, excitation_state
from src.entanglement.concurrence import concurrence_trace
from src.model.hamiltonian import build_single_excitation_h
from src.model.params import ModelParams, standard_model

TIMES = np.arange(0.0, 200.5, 0.5)


def _ordered_trace(times=TIMES):
    p = standard_model(10)
    states = evolve_unitary(build_single_excitation_h(p), excitation_state(p.ordering, 0), times)
    return concurrence_trace(states, p.ordering, times)


class TestDisorderSpec:
    """Test spec validation and seed spawning."""

    def test_rejects_negative_width(self):
        """Test W < 0 raises ParameterError."""
        with pytest.raises(ParameterError):
            DisorderSpec(W=-0.1)

    def test_rejects_empty_ensemble(self):
        """Test zero realizations raise ParameterError."""
        with pytest.raises(ParameterError):
            DisorderSpec(W=1.0, n_realizations=0)

    def test_seeds_reproducible_and_distinct(self):
        """Test the same seed spawns the same distinct per-realization seeds."""
        a = DisorderSpec(W=1.0, n_realizations=20, seed=7).realization_seeds()
        b = DisorderSpec(W=1.0, n_realizations=20, seed=7).realization_seeds()
        c = DisorderSpec(W=1.0, n_realizations=20, seed=8).realization_seeds()
        assert a == b
        assert len(set(a)) == 20
        assert a != c

    def test_prefix_stable(self):
        """Test growing the ensemble keeps the earlier seeds."""
        short = DisorderSpec(W=1.0, n_realizations=5, seed=3).realization_seeds()
        long = DisorderSpec(W=1.0, n_realizations=10, seed=3).realization_seeds()
        assert long[:5] == short


class TestRunEnsemble:
    """Test ensemble evolution."""

    def setup_method(self):
        self.base = standard_model(10)

    def test_zero_width_reproduces_ordered_trace(self):
        """Test W=0 gives the ordered trace in every realization."""
        result = run_ensemble(self.base, DisorderSpec(W=0.0, n_realizations=3, seed=1), TIMES)
        ordered = _ordered_trace()
        for row in result.traces:
            np.testing.assert_allclose(row, ordered.c, atol=1e-12)
        assert result.mean_c_max == pytest.approx(ordered.c_max, abs=1e-12)
        assert result.mean_c_max > 0.95

    def test_draws_within_box(self):
        """Test every detuning lies in [-W, W]."""
        result = run_ensemble(self.base, DisorderSpec(W=0.7, n_realizations=10, seed=2), TIMES[:11])
        draws = np.array([r.delta_c for r in result.realizations])
        assert draws.shape == (10, 10)
        assert np.all(np.abs(draws) <= 0.7)
        assert np.ptp(draws) > 0

    def test_deterministic_under_seed(self):
        """Test two runs with one seed are bit-identical."""
        spec = DisorderSpec(W=1.0, n_realizations=6, seed=11)
        a = run_ensemble(self.base, spec, TIMES[:101])
        b = run_ensemble(self.base, spec, TIMES[:101])
        np.testing.assert_array_equal(a.traces, b.traces)
        assert a.rows() == b.rows()

    def test_parallel_matches_serial(self):
        """Test worker processes reproduce the in-process result."""
        spec = DisorderSpec(W=1.0, n_realizations=6, seed=5)
        serial = run_ensemble(self.base, spec, TIMES[:41], jobs=1)
        parallel = run_ensemble(self.base, spec, TIMES[:41], jobs=2)
        np.testing.assert_array_equal(serial.traces, parallel.traces)
        assert serial.rows() == parallel.rows()

    def test_aggregate_lengths(self):
        """Test per-realization and aggregate sizes agree."""
        result = run_ensemble(self.base, DisorderSpec(W=0.5, n_realizations=4, seed=0), TIMES[:21])
        assert len(result) == 4
        assert result.traces.shape == (4, 21)
        assert result.c_max.shape == (4,)
        assert len(result.mean_trace) == 21
        assert result.ipr_histogram().counts.sum() == 4 * self.base.n_total

    def test_rejects_driven_base(self):
        """Test a driven model raises ParameterError."""
        driven = ModelParams.uniform(10, pos=(2, 8), omega=0.2)
        with pytest.raises(ParameterError):
            run_ensemble(driven, DisorderSpec(W=0.1, n_realizations=1), TIMES[:5])

    @pytest.mark.slow
    def test_mean_peak_decreases_with_width(self):
        """Test weak disorder keeps a higher averaged peak than strong disorder."""
        peaks = {
            W: run_ensemble(self.base, DisorderSpec(W=W, n_realizations=200, seed=42), TIMES).mean_c_max
            for W in (0.1, 0.3, 1.5, 2.0)
        }
        assert peaks[0.1] > peaks[2.0]
        assert peaks[0.3] > peaks[1.5]


class TestIPRHistogram:
    """Test pooled IPR versus energy."""

    def test_weak_disorder_localizes_near_atom_energy(self):
        """Test states in the central bin are more localized than the band."""
        hist = ipr_energy_histogram(DisorderSpec(W=0.1, n_realizations=50, seed=3), standard_model(10))
        centre = int(np.argmin(np.abs(hist.centers)))
        others = np.abs(hist.energies) > 0.1
        assert hist.counts[centre] > 0
        assert hist.mean_ipr[centre] > 2 * hist.iprs[others].mean()

    def test_strong_disorder_keeps_delocalized_states(self):
        """Test some eigenstates stay spread out at W=1."""
        hist = ipr_energy_histogram(DisorderSpec(W=1.0, n_realizations=50, seed=4), standard_model(10))
        assert hist.iprs.min() < 0.2

    def test_uncoupled_atoms_fully_localized(self):
        """Test g=0 gives exactly two IPR=1 points at the atom energies."""
        base = ModelParams.uniform(10, pos=(2, 8), g=0.0).replace(delta_n=(0.05, -0.05))
        hist = ipr_energy_histogram(DisorderSpec(W=0.0, n_realizations=1), base)
        unit = np.isclose(hist.iprs, 1.0)
        assert unit.sum() == 2
        np.testing.assert_allclose(sorted(hist.energies[unit]), [-0.05, 0.05], atol=1e-12)

    def test_rows_cover_edges(self):
        """Test one row per bin with NaN for empty bins."""
        hist = ipr_energy_histogram(DisorderSpec(W=0.1, n_realizations=2), standard_model(10))
        rows = hist.rows()
        assert len(rows) == 25
        assert rows[0][0] == pytest.approx(-2.5)
        assert rows[-1][1] == pytest.approx(2.5)
        assert np.isnan(rows[0][3])


class TestReplayRealization:
    """Test single-realization diagnostics."""

    def test_zero_detuning_matches_ordered(self):
        """Test all-zero delta_c reproduces the ordered trace."""
        replay = replay_realization([0.0] * 10, standard_model(10), TIMES)
        np.testing.assert_allclose(replay.trace.c, _ordered_trace().c, atol=1e-12)

    def test_return_probabilities(self):
        """Test r1 starts at one and r1 + r2 never exceeds one."""
        replay = replay_realization(REPLAY_DELTA_C, standard_model(10), TIMES)
        assert replay.r1[0] == pytest.approx(1.0)
        assert replay.r2[0] == pytest.approx(0.0)
        assert np.all(replay.r1 + replay.r2 <= 1.0 + 1e-10)
        assert 1.0 / 12 <= replay.ipr_mean <= 1.0

    def test_listed_realization(self):
        """Test the listed W=1 detunings keep C_max near 0.99 with mean IPR near 0.23."""
        replay = replay_realization(REPLAY_DELTA_C, standard_model(10), TIMES)
        assert replay.trace.c_max == pytest.approx(0.99, abs=0.02)
        assert replay.ipr_mean == pytest.approx(0.23, abs=0.02)

    def test_length_mismatch(self):
        """Test a wrong-length detuning list raises ParameterError."""
        with pytest.raises(ParameterError):
            replay_realization([0.0] * 9, standard_model(10), TIMES)

    def test_strong_barrier_blocks_transmission(self):
        """Test a strongly detuned cavity spin isolates the two halves of the chain."""
        base = standard_model(10)
        delta_c = [0.0] * 10
        delta_c[4] = 1.0e4
        p = base.replace(delta_c=tuple(delta_c))
        states = evolve_unitary(build_single_excitation_h(p), excitation_state(p.ordering, 0), TIMES)
        barrier = p.ordering.cavity_index[4]
        beyond = np.sum(np.abs(states[:, barrier + 1:]) ** 2, axis=1)
        assert beyond.max() < 1e-3
        assert replay_realization(delta_c, base, TIMES).trace.c_max < 0.1


class TestScatter:
    """Test the C_m versus mean-IPR scatter."""

    def test_small_scatter_shapes(self):
        """Test W is drawn inside the range for every realization."""
        result = scatter_ensemble(standard_model(10), 8, (0.5, 1.5), seed=1, times=TIMES[:41])
        widths = np.array([r.W for r in result.ensemble.realizations])
        assert np.all((widths >= 0.5) & (widths <= 1.5))
        assert len(set(widths.tolist())) == 8
        assert -1.0 <= result.spearman_rho <= 1.0

    def test_rejects_bad_range(self):
        """Test an inverted range raises ParameterError."""
        with pytest.raises(ParameterError):
            scatter_ensemble(standard_model(10), 4, (2.0, 1.0))

    @pytest.mark.slow
    def test_peak_anticorrelates_with_ipr(self):
        """Test higher mean IPR goes with lower C_m over 500 realizations."""
        result = scatter_ensemble(standard_model(10), 500, (0.0, 2.0), seed=2024, times=TIMES)
        assert result.spearman_rho < 0


def test_writers(tmp_path):
    """Test the CSV table and delta_c sidecar."""
    result = run_ensemble(standard_model(10), DisorderSpec(W=0.3, n_realizations=3, seed=9), TIMES[:11])
    csv_path = write_ensemble_csv(result, tmp_path / 'ensemble.csv')
    with csv_path.open(newline='') as f:
        rows = list(csv.DictReader(f))
    assert tuple(rows[0].keys()) == CSV_COLUMNS
    assert [int(r['realization_id']) for r in rows] == [0, 1, 2]

    sidecar = json.loads(write_delta_sidecar(result, tmp_path / 'delta_c.json').read_text())
    assert set(sidecar) == {'0', '1', '2'}
    assert len(sidecar['1']['delta_c']) == 10
    assert sidecar['2']['seed'] == result.realizations[2].seed
