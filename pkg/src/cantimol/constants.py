"""Physical constants and unit helpers.

All quantities in this package are SI. Frequencies labelled "MHz" in the
shipped profiles are angular frequencies in units of 1e6 rad/s; every report
header restates this convention.
"""

from dataclasses import dataclass

from .errors import ValidationError


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA constants, overridable for unit-audit tests."""

    hbar: float = 1.054571817e-34     # J s
    epsilon0: float = 8.8541878128e-12  # F/m
    kB: float = 1.380649e-23          # J/K

    def __post_init__(self):
        if self.hbar <= 0 or self.epsilon0 <= 0 or self.kB <= 0:
            raise ValidationError("physical constants must be strictly positive")


CODATA = PhysicalConstants()

#: 1 debye in C m
DEBYE = 3.33564e-30
#: atomic mass unit in kg
ATOMIC_MASS = 1.66053906660e-27
#: "MHz" label convention used throughout: angular frequency, 1e6 rad/s
MEGAHERTZ = 1.0e6

UNIT_CONVENTION = "angular frequencies in rad/s; 'MHz' means 1e6 rad/s; couplings and damping in 1/s"
