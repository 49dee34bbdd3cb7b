"""Unit tests for the truncated-Fock-space evolution."""

import math

import numpy as np
import pytest

from cantimol.errors import ValidationError
from cantimol.fock import (
    TwoModeVariances,
    coherent,
    destroy,
    evolve_single_mode,
    evolve_two_mode,
    mode_occupations,
    quadrature_variance,
    quantized_pump_run,
    vacuum,
)


class TestOperators:
    def test_destroy_commutator(self):
        n = 12
        b = destroy(n)
        comm = b @ b.T - b.T @ b
        # the commutator is the identity except in the truncated corner
        assert np.allclose(comm[: n - 1, : n - 1], np.eye(n - 1), atol=1e-13)

    def test_coherent_state_statistics(self):
        alpha = 1.5
        amp = coherent(alpha, 40)
        assert np.sum(amp**2) == pytest.approx(1.0, abs=1e-12)
        n = np.arange(41)
        assert float(np.sum(n * amp**2)) == pytest.approx(alpha**2, rel=1e-10)

    def test_coherent_zero_is_vacuum(self):
        assert np.array_equal(coherent(0.0, 10), vacuum(10))


class TestSingleMode:
    def test_vacuum_variance(self):
        state = evolve_single_mode(1.0, 0.0, n_max=20)
        assert quadrature_variance(state) == pytest.approx(0.25, abs=1e-12)

    def test_squeezing_matches_closed_form(self):
        C = 1.0
        u = 1.0
        state = evolve_single_mode(C, u / (2 * C), n_max=60)
        assert quadrature_variance(state) == pytest.approx(
            0.25 * math.exp(-2.0), rel=1e-4
        )
        assert not state.cutoff_limited

    def test_only_even_levels_populated(self):
        """Pair creation preserves Fock parity exactly."""
        state = evolve_single_mode(1.0, 0.4, n_max=40)
        odd = state.amplitudes[1::2]
        assert float(np.max(np.abs(odd))) == 0.0

    def test_norm_preserved(self):
        state = evolve_single_mode(1.0, 0.4, n_max=60)
        assert state.norm_deficit < 1e-10

    def test_cutoff_flagged_when_too_small(self):
        state = evolve_single_mode(1.0, 1.2, n_max=8)
        assert state.cutoff_limited

    def test_cutoff_convergence(self):
        """Doubling the basis moves the answer by far less than the 1% gate."""
        C, t = 1.0, 0.5
        v20 = quadrature_variance(evolve_single_mode(C, t, n_max=20))
        v40 = quadrature_variance(evolve_single_mode(C, t, n_max=40))
        v80 = quadrature_variance(evolve_single_mode(C, t, n_max=80))
        # the squeezed-vacuum number tail decays geometrically, so each
        # doubling shrinks the truncation error by orders of magnitude
        assert abs(v80 - v40) < 0.05 * abs(v40 - v20)
        assert abs(v80 - v40) < 1e-3 * v80

    def test_bad_inputs(self):
        with pytest.raises(ValidationError):
            evolve_single_mode(1.0, 0.1, n_max=1)
        with pytest.raises(ValidationError):
            evolve_single_mode(1.0, 0.1, n_max=20, sample_times=[0.2, 0.1])


class TestTwoMode:
    def test_variance_sum_decay(self):
        C_k = 1.0
        t = 0.5
        state = evolve_two_mode(C_k, t, n_max=40)
        total = sum(quadrature_variance(state))
        assert total == pytest.approx(2.0 * math.exp(-2.0 * C_k * t), rel=1e-4)

    def test_number_difference_conserved(self):
        """Pair creation keeps the two occupations exactly equal."""
        state = evolve_two_mode(1.0, 0.4, n_max=30)
        n_plus, n_minus = mode_occupations(state)
        assert n_plus == pytest.approx(n_minus, abs=1e-12)
        assert n_plus > 0.1

    def test_epr_variances_are_symmetric(self):
        state = evolve_two_mode(1.0, 0.3, n_max=30)
        v = quadrature_variance(state)
        assert isinstance(v, TwoModeVariances)
        assert v.var_s1 == pytest.approx(v.var_s2, rel=1e-10)


class TestQuantizedPump:
    def test_conserved_combination(self):
        run = quantized_pump_run(1.0, 2.0, np.linspace(0.0, 0.2, 5), n_pump=24, n_mol=24)
        drift = np.max(np.abs(run.conserved - run.conserved[0]))
        assert drift < 1e-8 * run.conserved[0]

    def test_pump_depletes_as_molecule_populates(self):
        run = quantized_pump_run(1.0, 2.0, np.linspace(0.0, 0.2, 5), n_pump=24, n_mol=24)
        assert run.pump_occupation[-1] < run.pump_occupation[0]
        assert run.molecule_occupation[-1] > 0

    def test_classical_limit_improves_with_pump_size(self):
        """Larger coherent pumps track the classical squeezing curve better."""
        g = 1.0
        u = 0.4
        devs = []
        for nbar in (4.0, 16.0):
            alpha = math.sqrt(nbar)
            t = u / (2.0 * g * alpha)
            run = quantized_pump_run(g, alpha, [t], n_pump=int(nbar + 8 * alpha), n_mol=24)
            devs.append(abs(run.variance_x1[0] - 0.25 * math.exp(-2 * u)))
        assert devs[1] < devs[0]
