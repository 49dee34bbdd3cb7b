"""Cantilever-coupled dipolar molecules: squeezing, entanglement, lattices.

Closed-form noisy-squeezing dynamics, numerical chain equilibria and normal
modes, exact truncated-Fock cross-checks, and a config-driven CLI that writes
delimited trace files and deterministic SVG plots.
"""

__version__ = "0.1.0"

from .config import PROFILES, RunConfig, emit_config, parse_config
from .constants import CODATA, DEBYE, MEGAHERTZ, PhysicalConstants
from .errors import (
    CantimolError,
    ConfigParseError,
    CutoffLimitedError,
    NumericalError,
    ValidationError,
)
from .quantities import (
    CantileverParams,
    CrystalSetup,
    MoleculeSpecies,
    SingleMoleculeSetup,
    SPECIES_TABLE,
    SRO,
    Status,
    phonon_base_frequency,
    phonon_dispersion,
    shifted_phonon_frequency,
    shifted_trap_frequency,
    single_mode_coupling,
    thermal_occupation,
    two_mode_coupling,
    validity_window,
)
from .dynamics import (
    cubic_roots,
    entanglement_window,
    laplace_ode_oracle,
    optimal_single_mode_squeezing,
    single_mode_trace,
    single_mode_variance,
    two_mode_trace,
    two_mode_variance_sum,
)
from .lattice import (
    dispersion_compare,
    equilibrium_positions,
    hessian_modes,
    tune_trap_for_central_spacing,
)
from .fock import evolve_single_mode, evolve_two_mode, quadrature_variance, quantized_pump_run
from .runner import reference_report, run_scenario
from .tracefile import TraceFile, read_trace

__all__ = [name for name in dir() if not name.startswith("_")]
