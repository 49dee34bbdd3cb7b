"""Equilibrium and normal modes of a trapped 1D dipole chain.

All dipole pairs are summed exactly (no nearest-neighbor truncation); the
chain sizes of interest stay below a few hundred molecules. The analytic
sine-form dispersion quoted alongside the coupling formulas uses a base
frequency omega_o that is a factor sqrt(2) below what the chain's actual
force constants give; dispersion_compare therefore reports mode frequencies
against both the force-constant sine band and the exact all-neighbor
infinite-chain dispersion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .constants import CODATA, PhysicalConstants
from .errors import NumericalError, ValidationError
from .quantities import CrystalSetup, MoleculeSpecies, phonon_base_frequency

#: convergence threshold: max |force| below 1e-12 x (dipole force at mean spacing)
FORCE_RTOL = 1e-12


def _dipole_prefactor(species: MoleculeSpecies, consts: PhysicalConstants) -> float:
    """A = d_m^2 / (4 pi eps0); pair energy is A / r^3."""
    return species.dipole_dm**2 / (4.0 * math.pi * consts.epsilon0)


@dataclass(frozen=True)
class ChainConfiguration:
    positions: np.ndarray        # m, strictly increasing
    species: MoleculeSpecies
    trap_omega_t: float          # rad/s
    gradient_norm: float         # N, max |dU/dx_i| at the stored positions
    converged: bool

    def __post_init__(self):
        if not np.all(np.diff(self.positions) > 0):
            raise ValidationError("chain positions must be strictly increasing")

    @property
    def mean_spacing(self) -> float:
        return float(np.mean(np.diff(self.positions)))

    @property
    def central_spacing(self) -> float:
        n = len(self.positions)
        return float(self.positions[n // 2] - self.positions[n // 2 - 1])


def chain_energy(
    positions: np.ndarray,
    species: MoleculeSpecies,
    trap_omega_t: float,
    consts: PhysicalConstants = CODATA,
) -> tuple[float, np.ndarray]:
    """Potential energy and its analytic gradient for the trapped chain."""
    x = np.asarray(positions, dtype=float)
    n = len(x)
    A = _dipole_prefactor(species, consts)
    m = species.mass_m
    if n == 1:
        return 0.5 * m * trap_omega_t**2 * float(x[0]) ** 2, m * trap_omega_t**2 * x.copy()
    dx = x[:, None] - x[None, :]
    r = np.abs(dx)
    np.fill_diagonal(r, np.inf)
    if np.min(r) == 0.0:
        raise ValidationError("coincident positions")
    energy = 0.5 * A * float(np.sum(r**-3)) + 0.5 * m * trap_omega_t**2 * float(np.sum(x**2))
    grad = -3.0 * A * np.sum(np.sign(dx) * r**-4, axis=1) + m * trap_omega_t**2 * x
    return energy, grad


def chain_hessian(
    positions: np.ndarray,
    species: MoleculeSpecies,
    trap_omega_t: float,
    consts: PhysicalConstants = CODATA,
) -> np.ndarray:
    """Analytic Hessian of the chain potential."""
    x = np.asarray(positions, dtype=float)
    A = _dipole_prefactor(species, consts)
    m = species.mass_m
    dx = x[:, None] - x[None, :]
    r = np.abs(dx)
    np.fill_diagonal(r, np.inf)
    off = -12.0 * A * r**-5
    hess = off.copy()
    np.fill_diagonal(hess, 0.0)
    np.fill_diagonal(hess, -np.sum(hess, axis=1) + m * trap_omega_t**2)
    return hess


def closed_form_pair_spacing(
    species: MoleculeSpecies, trap_omega_t: float, consts: PhysicalConstants = CODATA
) -> float:
    """Equilibrium separation of two trapped dipoles: (6 A / (m w^2))^(1/5)."""
    if trap_omega_t <= 0:
        raise ValidationError("trap_omega_t must be > 0")
    A = _dipole_prefactor(species, consts)
    return (6.0 * A / (species.mass_m * trap_omega_t**2)) ** 0.2


def equilibrium_positions(
    N: int,
    species: MoleculeSpecies,
    trap_omega_t: float,
    consts: PhysicalConstants = CODATA,
    max_iter: int = 200,
) -> ChainConfiguration:
    """Minimize the chain energy by damped Newton with backtracking.

    Deterministic start: a uniform lattice at the two-body closed-form
    spacing, rescaled once by a 1-D line minimization over a global scale
    factor, which lands inside the Newton basin for these convex-like chains.
    """
    if N < 1:
        raise ValidationError("N must be >= 1")
    if trap_omega_t <= 0:
        raise ValidationError("trap_omega_t must be > 0")
    if N == 1:
        return ChainConfiguration(np.zeros(1), species, trap_omega_t, 0.0, True)

    s2 = closed_form_pair_spacing(species, trap_omega_t, consts)
    x = (np.arange(N) - (N - 1) / 2.0) * s2
    scale = minimize_scalar(
        lambda c: chain_energy(c * x, species, trap_omega_t, consts)[0],
        bounds=(0.05, 20.0),
        method="bounded",
        options={"xatol": 1e-10},
    ).x
    x = scale * x

    A = _dipole_prefactor(species, consts)
    energy, grad = chain_energy(x, species, trap_omega_t, consts)
    for _ in range(max_iter):
        sbar = float(np.mean(np.diff(x)))
        tol = FORCE_RTOL * A / sbar**4
        gmax = float(np.max(np.abs(grad)))
        if gmax < tol:
            return ChainConfiguration(x, species, trap_omega_t, gmax, True)
        hess = chain_hessian(x, species, trap_omega_t, consts)
        try:
            step = np.linalg.solve(hess, -grad)
        except np.linalg.LinAlgError:
            step = -grad * sbar**4 / A
        # backtracking line search; ordering is preserved by shrinking the step
        alpha = 1.0
        for _ in range(60):
            x_new = x + alpha * step
            if np.all(np.diff(x_new) > 0):
                e_new, g_new = chain_energy(x_new, species, trap_omega_t, consts)
                if e_new <= energy:
                    x, energy, grad = x_new, e_new, g_new
                    break
            alpha *= 0.5
        else:
            raise NumericalError("line search failed to find a decreasing, ordered step")
    raise NumericalError(f"Newton did not converge in {max_iter} iterations")


@dataclass(frozen=True)
class NormalModeSpectrum:
    frequencies: np.ndarray      # rad/s, ascending
    mode_vectors: np.ndarray     # columns, orthonormal
    effective_wavenumbers: np.ndarray  # rad/m per mode, from sign-change counting


def hessian_modes(
    config: ChainConfiguration, consts: PhysicalConstants = CODATA
) -> NormalModeSpectrum:
    """Diagonalize the chain Hessian; frequencies are sqrt(eigenvalue / m)."""
    hess = chain_hessian(config.positions, config.species, config.trap_omega_t, consts)
    evals, vecs = np.linalg.eigh(hess)
    if np.min(evals) < -1e-10 * max(np.max(np.abs(evals)), 1e-300):
        raise NumericalError("negative Hessian eigenvalue: configuration is not a minimum")
    freqs = np.sqrt(np.clip(evals, 0.0, None) / config.species.mass_m)
    n = len(freqs)
    lc = config.central_spacing if n >= 2 else 0.0
    k_eff = np.array([_mode_wavenumber(vecs[:, i], lc, n) for i in range(n)])
    return NormalModeSpectrum(freqs, vecs, k_eff)


def _mode_wavenumber(vec: np.ndarray, spacing: float, n: int) -> float:
    """Effective k from sign changes, normalized so the fully alternating
    zone-edge pattern maps to pi / spacing."""
    if spacing <= 0 or n < 2:
        return 0.0
    sign = np.sign(vec)
    changes = int(np.sum(sign[:-1] * sign[1:] < 0))
    return math.pi / spacing * changes / (n - 1)


def uniform_chain_reference(
    N: int,
    species: MoleculeSpecies,
    spacing: float,
    consts: PhysicalConstants = CODATA,
) -> tuple[ChainConfiguration, NormalModeSpectrum]:
    """Ideal equally spaced untrapped chain and its normal modes.

    The trapped equilibrium chain is inhomogeneous (outer gaps grow toward
    the ends), so its spectrum does not follow a single lattice band.
    Dispersion comparisons therefore use this ideal reference configuration
    at the target spacing; it is not a force equilibrium (converged=False)
    and its free translation mode comes out at zero frequency.
    """
    if N < 2:
        raise ValidationError("N must be >= 2")
    if spacing <= 0:
        raise ValidationError("spacing must be > 0")
    x = (np.arange(N) - (N - 1) / 2.0) * spacing
    _, grad = chain_energy(x, species, 0.0, consts)
    config = ChainConfiguration(x, species, 0.0, float(np.max(np.abs(grad))), False)
    return config, hessian_modes(config, consts)


def nearest_neighbor_band_edge(
    species: MoleculeSpecies, spacing: float, consts: PhysicalConstants = CODATA
) -> float:
    """Zone-edge frequency 2 sqrt(Phi/m) from the actual pair force constant
    Phi = 12 A / l^5 (sqrt(2) above the closed-form 2*omega_o)."""
    A = _dipole_prefactor(species, consts)
    return 2.0 * math.sqrt(12.0 * A / (species.mass_m * spacing**5))


def infinite_chain_dispersion(
    species: MoleculeSpecies,
    spacing: float,
    k: float,
    consts: PhysicalConstants = CODATA,
    n_shells: int = 200,
) -> float:
    """Exact acoustic dispersion of the infinite 1/r^3 chain, all neighbors."""
    A = _dipole_prefactor(species, consts)
    n = np.arange(1, n_shells + 1)
    w2 = 24.0 * A / (species.mass_m * spacing**5) * np.sum((1.0 - np.cos(k * n * spacing)) / n**5)
    return math.sqrt(max(w2, 0.0))


class DispersionRow(NamedTuple):
    mode_index: int
    k_eff: float              # rad/m
    omega_numeric: float      # rad/s
    omega_sine: float         # force-constant sine band at k_eff
    omega_infinite: float     # all-neighbor infinite chain at k_eff
    rel_err_sine: float
    rel_err_infinite: float
    edge_mode: bool           # excluded from band comparisons


@dataclass(frozen=True)
class DispersionReport:
    rows: tuple
    central_spacing: float
    omega_o_closed_form: float   # the sine-band base frequency in the coupling formulas
    band_edge: float             # force-constant zone edge actually reached by the chain

    def interior_upper_band(self) -> list:
        """Rows in the upper half of the band, edge modes excluded."""
        top = max(r.omega_numeric for r in self.rows)
        return [r for r in self.rows if not r.edge_mode and r.omega_numeric > 0.5 * top]


def dispersion_compare(
    spectrum: NormalModeSpectrum,
    crystal: CrystalSetup,
    config: ChainConfiguration,
    consts: PhysicalConstants = CODATA,
) -> DispersionReport:
    """Compare numerical mode frequencies against the analytic dispersions.

    The lattice constant is taken as the central spacing of the converged
    chain. Modes with zero or fully saturated sign counts (center-of-mass and
    boundary-dominated patterns) are flagged as edge modes.
    """
    lc = config.central_spacing
    band_edge = nearest_neighbor_band_edge(crystal.species, lc, consts)
    rows = []
    n = len(spectrum.frequencies)
    for i in range(n):
        k = float(spectrum.effective_wavenumbers[i])
        w_num = float(spectrum.frequencies[i])
        w_sine = band_edge * abs(math.sin(k * lc / 2.0))
        w_inf = infinite_chain_dispersion(crystal.species, lc, k, consts)
        edge = k == 0.0 or k >= math.pi / lc * (1.0 - 1e-12)
        e_sine = abs(w_num - w_sine) / w_sine if w_sine > 0 else math.inf
        e_inf = abs(w_num - w_inf) / w_inf if w_inf > 0 else math.inf
        rows.append(DispersionRow(i, k, w_num, w_sine, w_inf, e_sine, e_inf, edge))
    return DispersionReport(
        tuple(rows), lc, phonon_base_frequency(crystal, consts), band_edge
    )


def tune_trap_for_central_spacing(
    N: int,
    species: MoleculeSpecies,
    target_spacing: float,
    consts: PhysicalConstants = CODATA,
) -> float:
    """Trap frequency that produces a given central spacing for an N-chain.

    The central spacing scales as omega_t^(-2/5); bracketing from the
    two-body closed form is robust."""
    if target_spacing <= 0:
        raise ValidationError("target_spacing must be > 0")
    A = _dipole_prefactor(species, consts)
    w_pair = math.sqrt(6.0 * A / (species.mass_m * target_spacing**5))

    def central(w):
        cfg = equilibrium_positions(N, species, w, consts)
        return cfg.central_spacing - target_spacing

    lo, hi = w_pair / (N * N), w_pair * 2.0
    return brentq(central, lo, hi, rtol=1e-9)
