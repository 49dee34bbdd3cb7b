"""Unit tests for the chain equilibrium and normal-mode machinery."""

import math

import numpy as np
import pytest

from cantimol.errors import ValidationError
from cantimol.lattice import (
    chain_energy,
    chain_hessian,
    closed_form_pair_spacing,
    dispersion_compare,
    equilibrium_positions,
    hessian_modes,
    infinite_chain_dispersion,
    nearest_neighbor_band_edge,
    tune_trap_for_central_spacing,
    uniform_chain_reference,
)
from cantimol.quantities import CrystalSetup, SRO

TRAP = 1.0e6  # rad/s


def finite_difference_gradient(x, species, trap, h=None):
    """Central-difference gradient of the chain energy (independent oracle)."""
    x = np.asarray(x, dtype=float)
    if h is None:
        h = 1e-6 * float(np.mean(np.diff(x)))
    grad = np.zeros_like(x)
    for i in range(len(x)):
        xp, xm = x.copy(), x.copy()
        xp[i] += h
        xm[i] -= h
        grad[i] = (chain_energy(xp, species, trap)[0] - chain_energy(xm, species, trap)[0]) / (2 * h)
    return grad


class TestEnergyAndGradient:
    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(7)
        base = closed_form_pair_spacing(SRO, TRAP)
        x = np.sort(np.arange(8) * base * (1.0 + 0.05 * rng.standard_normal(8)))
        analytic = chain_energy(x, SRO, TRAP)[1]
        numeric = finite_difference_gradient(x, SRO, TRAP)
        scale = float(np.max(np.abs(analytic)))
        assert np.max(np.abs(analytic - numeric)) < 1e-6 * scale

    def test_hessian_matches_gradient_differences(self):
        base = closed_form_pair_spacing(SRO, TRAP)
        x = np.arange(5) * base
        hess = chain_hessian(x, SRO, TRAP)
        h = 1e-7 * base
        for i in range(5):
            xp, xm = x.copy(), x.copy()
            xp[i] += h
            xm[i] -= h
            col = (chain_energy(xp, SRO, TRAP)[1] - chain_energy(xm, SRO, TRAP)[1]) / (2 * h)
            assert np.allclose(col, hess[:, i], rtol=1e-5, atol=1e-5 * np.max(np.abs(hess)))

    def test_coincident_positions_rejected(self):
        with pytest.raises(ValidationError):
            chain_energy(np.array([0.0, 0.0, 1e-7]), SRO, TRAP)


class TestEquilibrium:
    def test_pair_matches_closed_form(self):
        cfg = equilibrium_positions(2, SRO, TRAP)
        expected = closed_form_pair_spacing(SRO, TRAP)
        assert cfg.mean_spacing == pytest.approx(expected, rel=1e-8)

    def test_reflection_symmetry(self):
        cfg = equilibrium_positions(9, SRO, TRAP)
        x = cfg.positions
        assert np.max(np.abs(x + x[::-1])) < 1e-10 * cfg.mean_spacing

    def test_outer_spacings_exceed_central(self):
        cfg = equilibrium_positions(12, SRO, TRAP)
        gaps = np.diff(cfg.positions)
        assert gaps[0] > cfg.central_spacing
        assert gaps[-1] > cfg.central_spacing

    def test_converged_flag_and_tiny_gradient(self):
        cfg = equilibrium_positions(30, SRO, TRAP)
        assert cfg.converged
        _, grad = chain_energy(cfg.positions, SRO, cfg.trap_omega_t)
        typical = 3.0 * (SRO.dipole_dm**2 / (4 * math.pi * 8.8541878128e-12)) / cfg.mean_spacing**4
        assert np.max(np.abs(grad)) < 1e-10 * typical

    def test_single_molecule_sits_at_center(self):
        cfg = equilibrium_positions(1, SRO, TRAP)
        assert cfg.positions[0] == 0.0

    def test_trap_tuning_hits_target_spacing(self):
        target = 2.0e-7
        trap = tune_trap_for_central_spacing(10, SRO, target)
        cfg = equilibrium_positions(10, SRO, trap)
        assert cfg.central_spacing == pytest.approx(target, rel=1e-8)


class TestModes:
    def test_frequencies_positive_and_sorted(self):
        cfg = equilibrium_positions(10, SRO, TRAP)
        spec = hessian_modes(cfg)
        assert np.all(spec.frequencies > 0)
        assert np.all(np.diff(spec.frequencies) >= 0)

    def test_lowest_mode_is_center_of_mass(self):
        """The trap-dominated lowest mode is rigid translation at omega_t."""
        cfg = equilibrium_positions(10, SRO, TRAP)
        spec = hessian_modes(cfg)
        assert spec.frequencies[0] == pytest.approx(TRAP, rel=1e-10)
        v = spec.mode_vectors[:, 0]
        assert np.max(np.abs(v - v.mean())) < 1e-8

    def test_mode_vectors_orthonormal(self):
        cfg = equilibrium_positions(8, SRO, TRAP)
        spec = hessian_modes(cfg)
        gram = spec.mode_vectors.T @ spec.mode_vectors
        assert np.allclose(gram, np.eye(8), atol=1e-12)


class TestDispersion:
    def test_band_edge_above_closed_form_scale(self):
        """The force-constant zone edge is sqrt(2) above twice the sine-band
        normalization used by the coupling formulas."""
        crystal = CrystalSetup(SRO, 2.0e-7, 30, 2.0e-6)
        from cantimol.quantities import phonon_base_frequency

        edge = nearest_neighbor_band_edge(SRO, 2.0e-7)
        assert edge == pytest.approx(math.sqrt(2.0) * 2.0 * phonon_base_frequency(crystal), rel=1e-12)

    def test_infinite_chain_reduces_to_nearest_neighbor_at_long_wavelength(self):
        l = 2.0e-7
        k = 0.02 * math.pi / l
        w_inf = infinite_chain_dispersion(SRO, l, k)
        edge = nearest_neighbor_band_edge(SRO, l)
        # long-wavelength: all-neighbor sum raises the sound speed by
        # sqrt(zeta(3)/1) relative to the single-shell term
        ratio = w_inf / (edge * abs(math.sin(k * l / 2.0)))
        zeta3 = sum(1.0 / n**3 for n in range(1, 400))
        assert ratio == pytest.approx(math.sqrt(zeta3), rel=1e-3)

    def test_interior_modes_track_sine_band(self):
        crystal = CrystalSetup(SRO, 2.0e-7, 30, 2.0e-6)
        ref_cfg, ref_spec = uniform_chain_reference(30, SRO, 2.0e-7)
        report = dispersion_compare(ref_spec, crystal, ref_cfg)
        rows = report.interior_upper_band()
        assert len(rows) >= 5
        assert max(r.rel_err_sine for r in rows) < 0.05

    def test_finite_size_error_shrinks_with_n(self):
        errs = {}
        for n in (20, 60):
            crystal = CrystalSetup(SRO, 2.0e-7, n, 2.0e-6)
            ref_cfg, ref_spec = uniform_chain_reference(n, SRO, 2.0e-7)
            report = dispersion_compare(ref_spec, crystal, ref_cfg)
            rows = [r for r in report.rows if not r.edge_mode]
            errs[n] = max(r.rel_err_infinite for r in rows)
        assert errs[60] < errs[20]

    def test_trapped_chain_spectrum_is_not_a_lattice_band(self):
        # the trapped equilibrium chain is inhomogeneous; its spectrum must
        # not be compared against the uniform-lattice dispersion
        trap = tune_trap_for_central_spacing(30, SRO, 2.0e-7)
        cfg = equilibrium_positions(30, SRO, trap)
        crystal = CrystalSetup(SRO, 2.0e-7, 30, 2.0e-6)
        report = dispersion_compare(hessian_modes(cfg), crystal, cfg)
        rows = report.interior_upper_band()
        assert max(r.rel_err_sine for r in rows) > 0.05
