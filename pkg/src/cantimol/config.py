"""Flat key=value run configuration with section prefixes.

Format: one `section.key = value` per line, '#' comments, UTF-8. The same
keys appear in trace-file headers so that any output can be re-run from its
own header.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import Optional

from .constants import ATOMIC_MASS, DEBYE
from .errors import ConfigParseError, ValidationError
from .quantities import (
    CantileverParams,
    CrystalSetup,
    MoleculeSpecies,
    SPECIES_TABLE,
    SingleMoleculeSetup,
)

SCENARIOS = ("single-mode", "two-mode", "lattice", "oracle", "sweep")
ORACLE_KINDS = ("single", "two", "pump")

# key -> (RunConfig attribute, type)
_KEYS = {
    "scenario": ("scenario", str),
    "cantilever.omega_c": ("omega_c", float),
    "cantilever.m_c": ("m_c", float),
    "cantilever.damping_D": ("damping_D", float),
    "cantilever.d_c": ("d_c", float),
    "cantilever.nbar": ("nbar", float),
    "cantilever.temperature": ("temperature", float),
    "species.name": ("species_name", str),
    "species.mass": ("species_mass", float),
    "species.dipole": ("species_dipole", float),
    "setup.trap_omega_t": ("trap_omega_t", float),
    "setup.distance_R": ("distance_R", float),
    "setup.spacing_l": ("spacing_l", float),
    "setup.count_N": ("count_N", int),
    "dynamics.C": ("pinned_C", float),
    "dynamics.C_k": ("pinned_C_k", float),
    "grid.u_min": ("u_min", float),
    "grid.u_max": ("u_max", float),
    "grid.points": ("grid_points", int),
    "oracle.kind": ("oracle_kind", str),
    "oracle.n_max": ("oracle_n_max", int),
    "oracle.coupling": ("oracle_coupling", float),
    "oracle.nbars": ("oracle_nbars", str),
    "sweep.axis": ("sweep_axis", str),
    "sweep.min": ("sweep_min", float),
    "sweep.max": ("sweep_max", float),
    "sweep.points": ("sweep_points", int),
    "output.dir": ("output_dir", str),
    "output.svg": ("output_svg", bool),
}
_ATTR_TO_KEY = {attr: key for key, (attr, _) in _KEYS.items()}


@dataclass
class RunConfig:
    scenario: str = ""
    omega_c: float = 4.0e6
    m_c: float = 1.0e-16
    damping_D: float = 1.0
    d_c: float = 2.1e-23
    nbar: Optional[float] = 100.0
    temperature: Optional[float] = None
    species_name: str = "SrO"
    species_mass: Optional[float] = None
    species_dipole: Optional[float] = None
    trap_omega_t: float = 0.0
    distance_R: float = 2.0e-6
    spacing_l: Optional[float] = None
    count_N: Optional[int] = None
    pinned_C: Optional[float] = None
    pinned_C_k: Optional[float] = None
    u_min: float = 0.0
    u_max: float = 3.0
    grid_points: int = 301
    oracle_kind: Optional[str] = None
    oracle_n_max: Optional[int] = None
    oracle_coupling: Optional[float] = None
    oracle_nbars: Optional[str] = None
    sweep_axis: Optional[str] = None
    sweep_min: Optional[float] = None
    sweep_max: Optional[float] = None
    sweep_points: Optional[int] = None
    output_dir: Optional[str] = None
    output_svg: bool = False

    def validate(self) -> "RunConfig":
        import math

        if self.scenario not in SCENARIOS:
            raise ValidationError(
                f"scenario must be one of {SCENARIOS}, got {self.scenario!r}"
            )
        if self.grid_points < 2:
            raise ValidationError("grid.points must be >= 2")
        if not (math.isfinite(self.u_min) and math.isfinite(self.u_max)):
            raise ValidationError("grid range must be finite")
        if self.u_max <= self.u_min:
            raise ValidationError("grid.u_max must exceed grid.u_min")
        if self.scenario == "two-mode" or self.scenario == "lattice":
            if self.spacing_l is None or self.count_N is None:
                raise ValidationError(
                    f"{self.scenario} scenario requires setup.spacing_l and setup.count_N"
                )
        if self.scenario == "oracle" and self.oracle_kind not in ORACLE_KINDS:
            raise ValidationError(f"oracle.kind must be one of {ORACLE_KINDS}")
        if self.scenario == "sweep":
            if not self.sweep_axis:
                raise ValidationError("sweep scenario requires sweep.axis")
            if self.sweep_min is None or self.sweep_max is None or self.sweep_points is None:
                raise ValidationError("sweep scenario requires sweep.min/max/points")
            if self.sweep_points < 2:
                raise ValidationError("sweep.points must be >= 2")
            if not (math.isfinite(self.sweep_min) and math.isfinite(self.sweep_max)):
                raise ValidationError("sweep range must be finite")
            if self.sweep_max <= self.sweep_min:
                raise ValidationError("sweep.max must exceed sweep.min")
            if self.sweep_axis not in _KEYS or _KEYS[self.sweep_axis][1] not in (float, int):
                raise ValidationError(f"sweep.axis names no numeric parameter: {self.sweep_axis!r}")
        # constructing the domain types runs their invariants
        self.cantilever()
        self.species()
        return self

    def species(self) -> MoleculeSpecies:
        if self.species_mass is None and self.species_dipole is None:
            if self.species_name in SPECIES_TABLE:
                return SPECIES_TABLE[self.species_name]
            raise ValidationError(
                f"unknown species {self.species_name!r}; give species.mass and species.dipole"
            )
        base = SPECIES_TABLE.get(self.species_name)
        mass = self.species_mass if self.species_mass is not None else base.mass_m
        dip = self.species_dipole if self.species_dipole is not None else base.dipole_dm
        return MoleculeSpecies(self.species_name, mass, dip)

    def cantilever(self) -> CantileverParams:
        return CantileverParams(
            omega_c=self.omega_c,
            m_c=self.m_c,
            damping_D=self.damping_D,
            d_c=self.d_c,
            nbar=self.nbar,
            temperature=self.temperature,
        )

    def single_setup(self) -> SingleMoleculeSetup:
        return SingleMoleculeSetup(self.species(), self.trap_omega_t, self.distance_R)

    def crystal_setup(self) -> CrystalSetup:
        if self.spacing_l is None or self.count_N is None:
            raise ValidationError("crystal setup requires setup.spacing_l and setup.count_N")
        return CrystalSetup(
            self.species(), self.spacing_l, self.count_N, self.distance_R, self.trap_omega_t
        )

    def to_items(self) -> list[tuple[str, str]]:
        """Flat (key, value-string) pairs for every non-default-None field."""
        out = []
        for key, (attr, typ) in _KEYS.items():
            val = getattr(self, attr)
            if val is None:
                continue
            if typ is bool:
                out.append((key, "true" if val else "false"))
            elif typ is float:
                out.append((key, repr(float(val))))
            elif typ is int:
                out.append((key, str(int(val))))
            else:
                out.append((key, str(val)))
        return out


def _convert(key: str, raw: str, typ, line: int):
    try:
        if typ is bool:
            if raw.lower() in ("true", "1", "yes"):
                return True
            if raw.lower() in ("false", "0", "no"):
                return False
            raise ValueError(raw)
        if typ is int:
            return int(raw)
        if typ is float:
            return float(raw)
        return raw
    except ValueError:
        raise ConfigParseError(f"cannot parse value {raw!r} for key {key!r}", line)


def parse_config(text: str) -> RunConfig:
    """Parse and validate a config; errors carry line numbers."""
    cfg = RunConfig()
    seen = set()
    explicit_nbar = False
    for lineno, rawline in enumerate(text.splitlines(), start=1):
        line = rawline.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigParseError(f"expected 'key = value', got {rawline.strip()!r}", lineno)
        key, _, raw = line.partition("=")
        key = key.strip()
        raw = raw.strip()
        if key not in _KEYS:
            raise ConfigParseError(f"unknown key {key!r}", lineno)
        if key in seen:
            raise ConfigParseError(f"duplicate key {key!r}", lineno)
        seen.add(key)
        attr, typ = _KEYS[key]
        setattr(cfg, attr, _convert(key, raw, typ, lineno))
        if key == "cantilever.nbar":
            explicit_nbar = True
        if key == "cantilever.temperature" and not explicit_nbar:
            cfg.nbar = None  # temperature replaces the default nbar
    return cfg.validate()


def emit_config(cfg: RunConfig) -> str:
    """Config text that parses back to an equal RunConfig."""
    lines = [f"{key} = {val}" for key, val in cfg.to_items()]
    return "\n".join(lines) + "\n"


def set_axis_value(cfg: RunConfig, axis: str, value: float) -> RunConfig:
    """Copy cfg with the named numeric parameter replaced (sweep machinery)."""
    if axis not in _KEYS:
        raise ValidationError(f"unknown axis {axis!r}")
    attr, typ = _KEYS[axis]
    if typ not in (float, int):
        raise ValidationError(f"axis {axis!r} is not numeric")
    out = RunConfig(**{f.name: getattr(cfg, f.name) for f in fields(RunConfig)})
    setattr(out, attr, typ(value) if typ is int else float(value))
    return out


PROFILES = {
    "fig2": """\
# Single trapped molecule: quadrature variance vs squeezing parameter.
# Published worked example; the coupling is pinned to the quoted 20.4 1/s.
scenario = single-mode
cantilever.omega_c = 4.0e6
cantilever.m_c = 1e-16
cantilever.damping_D = 1.0
cantilever.d_c = 2.1e-23
cantilever.nbar = 100.0
species.name = SrO
setup.trap_omega_t = 0.0
setup.distance_R = 2.0e-6
dynamics.C = 20.4
grid.u_min = 0.0
grid.u_max = 3.0
grid.points = 301
""",
    "fig3": """\
# Dipolar chain: sum of EPR variances vs squeezing parameter.
# Published worked example; the coupling is pinned to the quoted 6.2 1/s.
# The grid extends to u = 6 so the re-crossing of the bound at 2 is visible.
scenario = two-mode
cantilever.omega_c = 2.0e6
cantilever.m_c = 1e-16
cantilever.damping_D = 1.0
cantilever.d_c = 2.1e-23
cantilever.nbar = 100.0
species.name = SrO
setup.spacing_l = 2.0e-7
setup.count_N = 30
setup.distance_R = 2.0e-6
dynamics.C_k = 6.2
grid.u_min = 0.0
grid.u_max = 6.0
grid.points = 601
""",
    "lattice-n30": """\
# 30-molecule SrO chain: equilibrium positions and normal-mode spectrum.
# trap_omega_t = 0 means: tune the trap so the central spacing hits setup.spacing_l.
scenario = lattice
cantilever.omega_c = 2.0e6
cantilever.m_c = 1e-16
cantilever.damping_D = 1.0
cantilever.d_c = 2.1e-23
cantilever.nbar = 100.0
species.name = SrO
setup.spacing_l = 2.0e-7
setup.count_N = 30
setup.distance_R = 2.0e-6
setup.trap_omega_t = 0.0
grid.u_min = 0.0
grid.u_max = 1.0
grid.points = 2
""",
    "oracle-single": """\
# Truncated-Fock check of the single-mode squeezing curve (noiseless pump).
scenario = oracle
oracle.kind = single
oracle.coupling = 1.0
oracle.n_max = 60
grid.u_min = 0.0
grid.u_max = 1.0
grid.points = 21
""",
    "oracle-two": """\
# Truncated-Fock check of the two-mode variance-sum decay (noiseless pump).
scenario = oracle
oracle.kind = two
oracle.coupling = 1.0
oracle.n_max = 40
grid.u_min = 0.0
grid.u_max = 1.0
grid.points = 11
""",
    "oracle-pump": """\
# Quantized coherent pump at nbar in {4, 9, 16} vs the classical-pump curve.
scenario = oracle
oracle.kind = pump
oracle.coupling = 1.0
oracle.nbars = 4,9,16
grid.u_min = 0.0
grid.u_max = 0.5
grid.points = 11
""",
}
