"""Tests for closed-form concurrence, optimal times and dip predictions."""

import math

import numpy as np
import pytest

from src.core.errors import CaseError, ParameterError, UnsupportedCaseError
from src.perturbation.analytic import (
    analytic_concurrence, analytic_period, dip_strengths, optimal_time,
)

G = 0.1
TIMES = np.arange(0, 400, 0.05)


class TestAnalyticConcurrence:
    """Test the closed-form traces."""

    def test_case_one_peak(self):
        """Test C=1 at t = pi J / (4 g^2)."""
        t_peak = math.pi / (4 * G ** 2)
        trace = analytic_concurrence('even-even', G, 1.0, 0.0, [t_peak])
        assert trace.c[0] == pytest.approx(1.0)

    def test_case_three_quarter_phase_equals_case_one(self):
        """Test cos(2phi)=0 reduces case 3 to |sin(2 g^2 t / J)|."""
        a = analytic_concurrence('even-odd', G, 1.0, math.pi / 4, TIMES)
        b = analytic_concurrence('even-even', G, 1.0, math.pi / 4, TIMES)
        np.testing.assert_allclose(a.c, b.c, atol=1e-12)

    def test_paired_cases_coincide(self):
        """Test cases 1/2 and 3/4 give identical traces."""
        for phi in (0.0, 0.4):
            np.testing.assert_array_equal(
                analytic_concurrence('even-even', G, 1.0, phi, TIMES).c,
                analytic_concurrence('odd-odd', G, 1.0, phi, TIMES).c,
            )
            np.testing.assert_array_equal(
                analytic_concurrence('even-odd', G, 1.0, phi, TIMES).c,
                analytic_concurrence('odd-even', G, 1.0, phi, TIMES).c,
            )

    def test_case_three_zero_phase_reaches_one(self):
        """Test case 3 at phi=0 still reaches C=1 at its optimal time."""
        t_opt = optimal_time(G, 1.0, 0.0)
        trace = analytic_concurrence('even-odd', G, 1.0, 0.0, [t_opt])
        assert trace.c[0] == pytest.approx(1.0, abs=1e-9)
        dense = analytic_concurrence('even-odd', G, 1.0, 0.0, TIMES)
        assert dense.c_max == pytest.approx(1.0, abs=1e-6)

    def test_odd_cavity_unsupported(self):
        """Test the odd-cavity tag raises UnsupportedCaseError."""
        with pytest.raises(UnsupportedCaseError):
            analytic_concurrence('odd-cavity', G, 1.0, 0.0, TIMES)

    def test_unknown_tag(self):
        """Test unknown tags raise CaseError."""
        with pytest.raises(CaseError):
            analytic_concurrence('case-9', G, 1.0, 0.0, TIMES)

    def test_period(self):
        """Test analytic periods for the two families."""
        assert analytic_period('even-even', G, 1.0, 0.0) == pytest.approx(math.pi / (2 * G ** 2))
        assert analytic_period('even-odd', G, 1.0, 0.0) == pytest.approx(math.pi / (G ** 2 * math.sqrt(2)))


class TestOptimalTime:
    """Test T_C."""

    def test_quarter_phase(self):
        """Test phi=pi/4 gives pi J / (4 g^2)."""
        assert optimal_time(G, 1.0, math.pi / 4) == pytest.approx(math.pi / (4 * G ** 2))

    def test_zero_phase(self):
        """Test phi=0 gives pi J / (2 sqrt(2) g^2)."""
        assert optimal_time(G, 1.0, 0.0) == pytest.approx(math.pi / (2 * math.sqrt(2) * G ** 2))

    def test_speedup_ratio(self):
        """Test T_C(pi/4) / T_C(0) = 1/sqrt(2)."""
        ratio = optimal_time(G, 1.0, math.pi / 4) / optimal_time(G, 1.0, 0.0)
        assert ratio == pytest.approx(1 / math.sqrt(2))

    @pytest.mark.parametrize("phi", [0.0, 0.2, 0.5, math.pi / 4])
    def test_matches_numerical_first_peak(self, phi):
        """Test the '-' branch with k=0 is the first maximum of the case-3 trace."""
        c2 = math.cos(2 * phi) ** 2
        t_limit = math.pi / (2 * G ** 2 * math.sqrt(1 + c2)) + 0.5
        window = analytic_concurrence('even-odd', G, 1.0, phi, TIMES).window(t_limit)
        t_peak = window.times[np.argmax(window.c)]
        assert t_peak == pytest.approx(optimal_time(G, 1.0, phi), abs=0.05)

    def test_later_branches_are_later(self):
        """Test larger k and the '+' branch give later maxima."""
        first = optimal_time(G, 1.0, 0.3)
        assert optimal_time(G, 1.0, 0.3, branch='+') > first
        assert optimal_time(G, 1.0, 0.3, k=1) > first

    def test_invalid_arguments(self):
        """Test negative k and bad branch raise ParameterError."""
        with pytest.raises(ParameterError):
            optimal_time(G, 1.0, 0.0, k=-1)
        with pytest.raises(ParameterError):
            optimal_time(G, 1.0, 0.0, branch='x')


class TestDipStrengths:
    """Test driving-dip predictions."""

    def test_even_cavity_values(self):
        """Test L=10, delta=0 gives |cos(pi k / 11)| for k=1..5."""
        omegas = [d.omega_k for d in dip_strengths(10)]
        np.testing.assert_allclose(omegas, [0.1423, 0.4154, 0.6549, 0.8413, 0.9595], atol=1e-4)
        assert [d.k for d in dip_strengths(10)] == [5, 4, 3, 2, 1]

    def test_odd_cavity_includes_zero(self):
        """Test odd L includes the resonant mode at Omega=0."""
        dips = dip_strengths(11)
        assert dips[0].omega_k == pytest.approx(0.0, abs=1e-12)
        assert dips[0].k == 6

    def test_zero_hopping(self):
        """Test J=0 puts every dip at zero."""
        assert [d.omega_k for d in dip_strengths(10, J=0.0)] == [0.0]

    def test_negative_radicands_dropped(self):
        """Test detuned atoms keep only modes with a real Omega."""
        dips = dip_strengths(10, delta=-1.0)
        assert all(d.k > 5 for d in dips)
        assert all(d.omega_k >= 0 for d in dips)
        assert [d.omega_k for d in dips] == sorted(d.omega_k for d in dips)

    def test_rejects_short_cavity(self):
        """Test L < 2 raises ParameterError."""
        with pytest.raises(ParameterError):
            dip_strengths(1)
