"""End-to-end runs of the command-line studies at reduced size."""

import csv
import json

import pytest

import main
from src.cli.output import MANIFEST_NAME

pytestmark = pytest.mark.integration

QUIET = ['--log-level', 'ERROR', '--no-plots']
SMALL_PARITY = ['--set', 'L_min=6', '--set', 'L_max=7', '--set', 't_final=50', '--set', 'dt=0.5']
SMALL_CHIRALITY = ['--set', 'phi_points=3', '--set', 't_final=20', '--set', 'dt=0.5']


def run(tmp_path, name, *extra, out='out'):
    out_dir = tmp_path / out
    code = main.main([name, '--out', str(out_dir), *QUIET, *extra])
    manifest = out_dir / MANIFEST_NAME
    return code, out_dir, (json.loads(manifest.read_text()) if manifest.exists() else None)


def read_rows(path):
    with path.open(newline='', encoding='utf-8') as f:
        return list(csv.DictReader(f))


class TestFailures:
    """Test configuration failures map to exit code 2 without output."""

    def test_missing_config(self, tmp_path):
        """Test a missing config file."""
        code, _, manifest = run(tmp_path, 'chirality', '--config', str(tmp_path / 'nope.json'))
        assert code == 2
        assert manifest is None

    def test_unknown_setting(self, tmp_path):
        """Test an unknown --set key."""
        code, _, manifest = run(tmp_path, 'parity', '--set', 'bogus=1')
        assert code == 2
        assert manifest is None

    def test_invalid_range(self, tmp_path):
        """Test an empty cavity-length range."""
        code, _, _ = run(tmp_path, 'parity', '--set', 'L_min=8', '--set', 'L_max=6')
        assert code == 2

    def test_length_with_touching_atoms(self, tmp_path):
        """Test L=5 places both atoms against one cavity spin and is rejected."""
        code, _, _ = run(tmp_path, 'parity', '--set', 'L_min=5', '--set', 'L_max=6')
        assert code == 2

    def test_inconsistent_model(self, tmp_path):
        """Test a model file whose lists disagree with L."""
        bad = tmp_path / 'model.json'
        bad.write_text(json.dumps({
            'L': 6, 'N': 2, 'delta_c': [0.0] * 5, 'delta_n': [0.0, 0.0], 'J_c': [1.0] * 5,
            'g_left': [0.1, 0.1], 'g_right': [0.1, 0.1], 'phi': [0.0, 0.0], 'omega': [0.0, 0.0],
            'pos': [2, 5],
        }))
        code, _, _ = run(tmp_path, 'chirality', '--config', str(bad), *SMALL_CHIRALITY)
        assert code == 2


class TestParity:
    """Test the cavity-length scan."""

    def test_outputs_and_manifest(self, tmp_path):
        """Test files, checks and hashes of a two-length scan."""
        code, out_dir, manifest = run(tmp_path, 'parity', *SMALL_PARITY)
        assert code == 0

        summary = read_rows(out_dir / 'parity_summary.csv')
        assert [row['L'] for row in summary] == ['6', '7']
        assert set(manifest['outputs']) == {'parity_heatmap.csv', 'parity_summary.csv'}
        assert manifest['figures'] == {}
        assert manifest['experiment'] == 'parity'
        assert manifest['config']['settings']['L_max'] == 7
        assert manifest['budget_exhausted'] is False
        assert 0.0 <= manifest['checks']['even_min_C_m'] <= 1.0
        assert 0.0 <= manifest['checks']['odd_max_C_m'] <= 1.0

    def test_rerun_is_byte_identical(self, tmp_path):
        """Test the same configuration and seed reproduce every data file."""
        _, first, m1 = run(tmp_path, 'parity', *SMALL_PARITY, out='a')
        _, second, m2 = run(tmp_path, 'parity', *SMALL_PARITY, out='b')
        assert m1['outputs'] == m2['outputs']
        assert m1['config_hash'] == m2['config_hash']
        for name in m1['outputs']:
            assert (first / name).read_bytes() == (second / name).read_bytes()

    def test_plots_written(self, tmp_path):
        """Test figures are listed separately when plotting is on."""
        out_dir = tmp_path / 'plots'
        code = main.main(['parity', '--out', str(out_dir), '--log-level', 'ERROR', *SMALL_PARITY])
        manifest = json.loads((out_dir / MANIFEST_NAME).read_text())
        assert code == 0
        assert set(manifest['figures']) == {'parity_heatmap.svg', 'parity_summary.svg'}


class TestChirality:
    """Test the hopping-phase scan."""

    def test_outputs_and_checks(self, tmp_path):
        """Test the phase grid, the mirror comparison and the peak-time checks are reported."""
        code, out_dir, manifest = run(tmp_path, 'chirality', *SMALL_CHIRALITY)
        assert code == 0
        checks = manifest['checks']
        assert checks['symmetry_deviation'] >= 0.0
        assert {'t_m_phi0', 't_m_phi_pi4'} <= set(checks)
        assert set(manifest['outputs']) == {'chirality_heatmap.csv', 'chirality_summary.csv'}
        phis = {row['phi'] for row in read_rows(out_dir / 'chirality_summary.csv')}
        assert len(phis) == 3

    def test_model_override_recorded(self, tmp_path):
        """Test model overrides change the recorded model and the hash."""
        _, _, base = run(tmp_path, 'chirality', *SMALL_CHIRALITY, out='base')
        _, _, strong = run(tmp_path, 'chirality', *SMALL_CHIRALITY, '--set', 'model.g=0.2', out='strong')
        assert strong['config']['model']['g_left'] == [0.2, 0.2]
        assert strong['config_hash'] != base['config_hash']


class TestOracle:
    """Test the full versus effective comparison study."""

    def test_bound_checks_reported(self, tmp_path):
        """Test the 0.1 bound is evaluated over one period and up to the first peak."""
        code, _, manifest = run(tmp_path, 'oracle', '--set', 'dt=0.5', '--set', 'g_values=0.1')
        assert code == 0
        checks = manifest['checks']
        assert checks['oracle_bound'] == 0.1
        assert checks['oracle_within_bound'] is (checks['max_diff_overall'] < 0.1)
        assert set(checks['max_diff_first_peak']) == {f'{label}_distance_phi{i}'
                                                     for label in ('even', 'odd') for i in range(3)}
        for name, first_peak in checks['max_diff_first_peak'].items():
            assert first_peak <= checks['max_diff'][name]
        for label in ('even', 'odd'):
            assert checks[f'{label}_peak_within_tolerance'] is (checks[f'{label}_peak_error'] <= 0.05)


class TestTrotter:
    """Test the Trotterized-circuit study."""

    def test_budget_and_error_scaling(self, tmp_path):
        """Test the 3+12 layer budget over 24 steps and first-order scaling at dt 2..0.25."""
        code, out_dir, manifest = run(tmp_path, 'trotter', '--set', 'dts=5', '--set', 't_final=20')
        assert code == 0
        checks = manifest['checks']
        assert checks['budget_layers'] == {'single': 3, 'rotation': 12}
        assert checks['budget_step_us'] == pytest.approx(13.95)
        assert checks['budget_total_us'] == pytest.approx(334.8)
        assert 200.0 < checks['budget_total_us'] < 350.0
        assert manifest['config']['settings']['scaling_dts'] == [2.0, 1.0, 0.5, 0.25]
        assert checks['scaling_metric'] == 'state'
        assert len(checks['scaling_ratios']) == 3
        assert checks['first_order'] is True
        rows = read_rows(out_dir / 'trotter' / 'error_scaling.csv')
        assert [float(row['dt']) for row in rows] == [2.0, 1.0, 0.5, 0.25]
        assert 'state_error' in rows[0]

    def test_unknown_metric(self, tmp_path):
        """Test an unsupported error metric is a configuration error."""
        code, _, _ = run(tmp_path, 'trotter', '--set', 'dts=5', '--set', 't_final=20',
                         '--set', 'scaling_metric=fidelity')
        assert code == 2


class TestOptimize:
    """Test the parameter-engineering study."""

    def test_replay(self, tmp_path):
        """Test a published row replays to a high concurrence."""
        code, out_dir, manifest = run(tmp_path, 'optimize', '--replay')
        assert code == 0
        assert manifest['checks']['branch'] == 'replay'
        assert manifest['checks']['C_m'] > 0.9
        assert (out_dir / 'optimize' / 'params.json').is_file()

    def test_budget_exhausted_exit_code(self, tmp_path):
        """Test a tiny search budget ends with exit code 4 and a flagged manifest."""
        code, out_dir, manifest = run(tmp_path, 'optimize', '--set', 'budget=100', '--set', 'restarts=1')
        assert code == 4
        assert manifest['budget_exhausted'] is True
        assert manifest['checks']['evaluations'] <= 100
        assert 'optimize/report.json' in manifest['outputs']
