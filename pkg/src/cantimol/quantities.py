"""Parameter types and closed-form derived quantities.

Shifted trap frequency, squeezing couplings, phonon dispersion and the
validity window of the noisy-squeezing formulas, all in SI units. Pure
functions over immutable value types.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .constants import ATOMIC_MASS, CODATA, DEBYE, PhysicalConstants
from .errors import ValidationError


class Status(enum.Enum):
    VALID = "valid"
    MARGINAL = "marginal"
    VIOLATED = "violated"


@dataclass(frozen=True)
class MoleculeSpecies:
    name: str
    mass_m: float    # kg
    dipole_dm: float  # C m

    def __post_init__(self):
        if self.mass_m <= 0:
            raise ValidationError("mass_m must be > 0")
        if self.dipole_dm <= 0:
            raise ValidationError("dipole_dm must be > 0")


# Default species table. The SrO dipole moment is the standard literature
# value (8.9 debye); computed couplings for the shipped example geometries
# are reported side by side with the published target numbers rather than
# tuned to match them.
SRO = MoleculeSpecies(name="SrO", mass_m=103.62 * ATOMIC_MASS, dipole_dm=8.9 * DEBYE)
SPECIES_TABLE = {"SrO": SRO}


@dataclass(frozen=True)
class CantileverParams:
    """Mechanical oscillator with a dipolar tip.

    Occupation is given either as a temperature (K) or directly as the mean
    quantum number nbar; exactly one of the two.
    """

    omega_c: float    # rad/s
    m_c: float        # kg
    damping_D: float  # 1/s
    d_c: float        # C m
    nbar: Optional[float] = None
    temperature: Optional[float] = None  # K

    def __post_init__(self):
        if self.omega_c <= 0:
            raise ValidationError("omega_c must be > 0")
        if self.m_c <= 0:
            raise ValidationError("m_c must be > 0")
        if self.damping_D < 0:
            raise ValidationError("damping_D must be >= 0")
        if self.d_c < 0:
            raise ValidationError("d_c must be >= 0")
        if (self.nbar is None) == (self.temperature is None):
            raise ValidationError("specify exactly one of nbar or temperature")
        if self.nbar is not None and self.nbar < 0:
            raise ValidationError("nbar must be >= 0")
        if self.temperature is not None and self.temperature < 0:
            raise ValidationError("temperature must be >= 0")


@dataclass(frozen=True)
class SingleMoleculeSetup:
    species: MoleculeSpecies
    trap_omega_t: float  # rad/s, bare trap; may be 0 (cantilever-provided trap)
    distance_R: float    # m

    def __post_init__(self):
        if self.trap_omega_t < 0:
            raise ValidationError("trap_omega_t must be >= 0")
        if self.distance_R <= 0:
            raise ValidationError("distance_R must be > 0")


@dataclass(frozen=True)
class CrystalSetup:
    species: MoleculeSpecies
    spacing_l: float     # m
    count_N: int
    distance_R: float    # m
    trap_omega_t: float = 0.0  # rad/s, used by the numerical lattice work

    def __post_init__(self):
        if self.spacing_l <= 0:
            raise ValidationError("spacing_l must be > 0")
        if self.count_N < 2:
            raise ValidationError("count_N must be >= 2")
        if self.distance_R <= 0:
            raise ValidationError("distance_R must be > 0")
        if self.trap_omega_t < 0:
            raise ValidationError("trap_omega_t must be >= 0")


def thermal_occupation(c: CantileverParams, consts: PhysicalConstants = CODATA) -> float:
    """Mean excitation number of the cantilever mode."""
    if c.nbar is not None:
        return c.nbar
    return consts.kB * c.temperature / (consts.hbar * c.omega_c)


def zero_point_length(mass: float, omega: float, consts: PhysicalConstants = CODATA) -> float:
    """Ground-state positional spread sqrt(hbar / 2 m omega)."""
    if omega <= 0:
        raise ValidationError("omega must be > 0 for a zero-point length")
    return math.sqrt(consts.hbar / (2.0 * mass * omega))


def _graded_status(ratio: float, valid_above: float, marginal_above: float) -> Status:
    if ratio > valid_above:
        return Status.VALID
    if ratio > marginal_above:
        return Status.MARGINAL
    return Status.VIOLATED


def single_molecule_hierarchy(
    s: SingleMoleculeSetup, c: CantileverParams, consts: PhysicalConstants = CODATA
) -> Status:
    """Check R >> zero-point lengths of molecule and cantilever (ratio > 100)."""
    omega_t_eff = shifted_trap_frequency(s, c, consts)
    x_m = zero_point_length(s.species.mass_m, omega_t_eff, consts)
    x_c = zero_point_length(c.m_c, c.omega_c, consts)
    ratio = s.distance_R / max(x_m, x_c)
    return _graded_status(ratio, 100.0, 10.0)


def crystal_hierarchy(cr: CrystalSetup, consts: PhysicalConstants = CODATA) -> Status:
    """Check the chain length-scale hierarchy: x_zp << l and N l << R."""
    omega_o = phonon_base_frequency(cr, consts)
    x_zp = zero_point_length(cr.species.mass_m, omega_o, consts)
    ratio_chain = cr.distance_R / (cr.count_N * cr.spacing_l)   # want > 10 (N l / R < 0.1)
    ratio_zp = cr.spacing_l / x_zp
    s1 = _graded_status(ratio_chain, 10.0, 3.0)
    s2 = _graded_status(ratio_zp, 100.0, 10.0)
    order = {Status.VALID: 0, Status.MARGINAL: 1, Status.VIOLATED: 2}
    return s1 if order[s1] >= order[s2] else s2


def shifted_trap_frequency(
    s: SingleMoleculeSetup, c: CantileverParams, consts: PhysicalConstants = CODATA
) -> float:
    """Trap frequency including the tightening by the cantilever dipole."""
    sp = s.species
    shift_sq = 3.0 * sp.dipole_dm * c.d_c / (math.pi * consts.epsilon0 * sp.mass_m * s.distance_R**5)
    return math.sqrt(s.trap_omega_t**2 + shift_sq)


def single_mode_coupling(
    s: SingleMoleculeSetup, c: CantileverParams, consts: PhysicalConstants = CODATA
) -> float:
    """Parametric squeezing rate C for the trapped single molecule (1/s)."""
    omega_t_eff = shifted_trap_frequency(s, c, consts)
    if omega_t_eff == 0.0:
        raise ValidationError("shifted trap frequency is zero; coupling formula is singular")
    nbar = thermal_occupation(c, consts)
    sp = s.species
    prefac = 15.0 * sp.dipole_dm * c.d_c / (
        4.0 * math.pi * consts.epsilon0 * sp.mass_m * omega_t_eff * s.distance_R**6
    )
    x_zp_c = math.sqrt(consts.hbar / (2.0 * c.m_c * c.omega_c))
    return math.sqrt(nbar) * prefac * x_zp_c


def phonon_base_frequency(cr: CrystalSetup, consts: PhysicalConstants = CODATA) -> float:
    """Dispersion scale omega_o = d_m sqrt(3 / (2 pi eps0 m l^5)).

    This is the closed-form normalization used by the coupling formulas and
    the published example values. The numerically exact band of the 1/r^3
    chain is a factor sqrt(2) higher; see lattice.nearest_neighbor_band_edge.
    """
    sp = cr.species
    return sp.dipole_dm * math.sqrt(
        3.0 / (2.0 * math.pi * consts.epsilon0 * sp.mass_m * cr.spacing_l**5)
    )


def phonon_dispersion(cr: CrystalSetup, k: float, consts: PhysicalConstants = CODATA) -> float:
    """Acoustic dispersion omega_k = 2 omega_o |sin(k l / 2)|, first zone only."""
    if abs(k) > math.pi / cr.spacing_l * (1.0 + 1e-12):
        raise ValidationError("k outside the first Brillouin zone")
    omega_o = phonon_base_frequency(cr, consts)
    return 2.0 * omega_o * abs(math.sin(k * cr.spacing_l / 2.0))


class ShiftedPhonon(NamedTuple):
    omega_k_prime: float   # rad/s
    relative_shift: float  # (omega' - omega)/omega
    status: Status         # MARGINAL when the perturbative shift is not small


def shifted_phonon_frequency(
    cr: CrystalSetup, c: CantileverParams, k: float, consts: PhysicalConstants = CODATA
) -> ShiftedPhonon:
    """Phonon frequency including the static pull of the cantilever dipole."""
    omega_k = phonon_dispersion(cr, k, consts)
    if omega_k == 0.0:
        raise ValidationError("omega_k = 0: perturbative shift is singular at the zone center")
    sp = cr.species
    shift = sp.dipole_dm * c.d_c / (
        4.0 * math.pi * consts.epsilon0 * sp.mass_m * omega_k**2 * cr.distance_R**5
    )
    rel = shift / omega_k
    status = Status.VALID if rel <= 0.1 else Status.MARGINAL
    return ShiftedPhonon(omega_k + shift, rel, status)


class TwoModeCoupling(NamedTuple):
    C_k_prime: float  # signed, negative for positive parameters (1/s)
    C_k: float        # sqrt(nbar) * C_k_prime (1/s); dynamics consume |C_k|


def two_mode_coupling(
    cr: CrystalSetup, c: CantileverParams, k: float, consts: PhysicalConstants = CODATA
) -> TwoModeCoupling:
    """Cantilever-phonon pair-creation coupling at wavenumber k."""
    omega_k_prime = shifted_phonon_frequency(cr, c, k, consts).omega_k_prime
    if omega_k_prime == 0.0:
        raise ValidationError("omega_k' = 0: coupling formula is singular")
    sp = cr.species
    x_zp_c = math.sqrt(consts.hbar / (2.0 * c.m_c * c.omega_c))
    ckp = -3.0 * sp.dipole_dm * c.d_c / (
        2.0 * math.pi * consts.epsilon0 * sp.mass_m * omega_k_prime * cr.distance_R**6
    ) * x_zp_c
    nbar = thermal_occupation(c, consts)
    return TwoModeCoupling(ckp, math.sqrt(nbar) * ckp)


def resonance_frequency(target: float) -> float:
    """Cantilever frequency for parametric resonance: twice the mode frequency."""
    if target <= 0:
        raise ValidationError("target frequency must be > 0")
    return 2.0 * target


def resonance_detuning(c: CantileverParams, target: float) -> float:
    """Detuning omega_c - 2*target of a given cantilever from resonance."""
    return c.omega_c - resonance_frequency(target)


class ValidityWindow(NamedTuple):
    t_min: float  # s
    t_max: float  # s, inf when D = 0
    empty: bool


def validity_window(C: float, D: float) -> ValidityWindow:
    """Time window D < 1/t < 2C where the noisy-variance formulas apply."""
    if C <= 0:
        raise ValidationError("C must be > 0")
    t_min = 1.0 / (2.0 * C)
    t_max = math.inf if D == 0 else 1.0 / D
    return ValidityWindow(t_min, t_max, empty=t_min >= t_max)
