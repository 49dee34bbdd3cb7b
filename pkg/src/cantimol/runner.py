"""Scenario execution: configs in, trace files (and optional SVG plots) out.

Every trace header embeds the full flattened config, so any output file can
be re-run from its own header and must reproduce itself byte for byte.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig, emit_config, parse_config, set_axis_value
from .dynamics import (
    VarianceTrace,
    c_k0,
    entanglement_window,
    optimal_single_mode_squeezing,
    single_mode_trace,
    two_mode_trace,
)
from .errors import CutoffLimitedError, ValidationError
from .fock import evolve_single_mode, evolve_two_mode, quadrature_variance, quantized_pump_run
from .lattice import (
    dispersion_compare,
    equilibrium_positions,
    uniform_chain_reference,
    infinite_chain_dispersion,
    nearest_neighbor_band_edge,
    tune_trap_for_central_spacing,
)
from .quantities import (
    phonon_base_frequency,
    shifted_trap_frequency,
    single_mode_coupling,
    single_molecule_hierarchy,
    thermal_occupation,
    two_mode_coupling,
    validity_window,
)
from .tracefile import TraceFile


@dataclass
class RunResult:
    """Files written by one scenario run, in emission order."""

    paths: list = field(default_factory=list)
    cutoff_limited: bool = False


def _base_header(cfg: RunConfig) -> dict:
    header = {"generator": f"cantimol {__version__}"}
    for key, val in cfg.to_items():
        header[f"config.{key}"] = val
    return header


def config_from_header(header: dict) -> RunConfig:
    """Rebuild the run configuration embedded in a trace-file header."""
    lines = [
        f"{key[len('config.'):]} = {val}"
        for key, val in header.items()
        if key.startswith("config.")
    ]
    return parse_config("\n".join(lines) + "\n")


def _u_grid(cfg: RunConfig) -> np.ndarray:
    return np.linspace(cfg.u_min, cfg.u_max, cfg.grid_points)


def resolve_single_mode_coupling(cfg: RunConfig) -> float:
    """Pinned dynamics.C if given, else derived from the geometry."""
    if cfg.pinned_C is not None:
        return cfg.pinned_C
    return single_mode_coupling(cfg.single_setup(), cfg.cantilever())


def resolve_two_mode_coupling(cfg: RunConfig) -> float:
    """Pinned dynamics.C_k if given, else |C_k| at the band edge."""
    if cfg.pinned_C_k is not None:
        return cfg.pinned_C_k
    crystal = cfg.crystal_setup()
    k_edge = math.pi / crystal.spacing_l
    return abs(two_mode_coupling(crystal, cfg.cantilever(), k_edge).C_k)


def _trace_columns(trace: VarianceTrace, value_name: str, flag_name: str,
                   quiet: VarianceTrace) -> dict:
    return {
        "u": trace.u,
        "t_s": trace.t,
        value_name: trace.value,
        value_name + "_noiseless": quiet.value,
        "inside_validity": [str(int(b)) for b in trace.inside_validity],
        flag_name: [str(int(b)) for b in trace.below_threshold],
    }


def run_single_mode(cfg: RunConfig, out_dir: Path, name: str, svg: bool) -> RunResult:
    C = resolve_single_mode_coupling(cfg)
    D = cfg.damping_D
    u = _u_grid(cfg)
    trace = single_mode_trace(C, D, u)
    quiet = single_mode_trace(C, 0.0, u)
    header = _base_header(cfg)
    header["derived.C"] = repr(C)
    header["derived.omega_t_shifted"] = repr(shifted_trap_frequency(cfg.single_setup(), cfg.cantilever()))
    header["derived.hierarchy"] = single_molecule_hierarchy(cfg.single_setup(), cfg.cantilever()).value
    win = validity_window(C, D)
    header["derived.t_min"] = repr(win.t_min)
    header["derived.t_max"] = repr(win.t_max)
    opt = optimal_single_mode_squeezing(C, D)
    if not opt.no_interior_minimum:
        header["derived.u_star"] = repr(opt.u_star)
        header["derived.min_variance"] = repr(opt.min_variance)
    tf = TraceFile(header, _trace_columns(trace, "variance_x1", "squeezed", quiet))
    result = RunResult([tf.write(out_dir / f"{name}.csv")])
    if svg:
        from .plots import render_variance_plot

        result.paths.append(render_variance_plot(
            u, trace.value, quiet.value, 0.25, out_dir / f"{name}.svg",
            ylabel="quadrature variance",
        ))
    return result


def run_two_mode(cfg: RunConfig, out_dir: Path, name: str, svg: bool) -> RunResult:
    C_k = resolve_two_mode_coupling(cfg)
    D = cfg.damping_D
    u = _u_grid(cfg)
    trace = two_mode_trace(C_k, D, u)
    quiet = two_mode_trace(C_k, 0.0, u)
    header = _base_header(cfg)
    header["derived.C_k"] = repr(C_k)
    header["derived.C_k0"] = repr(c_k0(C_k, D).value.real)
    header["derived.omega_o"] = repr(phonon_base_frequency(cfg.crystal_setup()))
    win = entanglement_window(C_k, D)
    header["derived.window_status"] = win.status
    header["derived.window_t_enter"] = repr(win.t_enter) if win.t_enter is not None else "nan"
    header["derived.window_t_exit"] = repr(win.t_exit) if win.t_exit is not None else "nan"
    tf = TraceFile(header, _trace_columns(trace, "variance_sum", "entangled", quiet))
    result = RunResult([tf.write(out_dir / f"{name}.csv")])
    if svg:
        from .plots import render_variance_plot

        result.paths.append(render_variance_plot(
            u, trace.value, quiet.value, 2.0, out_dir / f"{name}.svg",
            ylabel="sum of EPR variances",
        ))
    return result


def run_lattice(cfg: RunConfig, out_dir: Path, name: str, svg: bool) -> RunResult:
    crystal = cfg.crystal_setup()
    if cfg.trap_omega_t > 0:
        trap = cfg.trap_omega_t
    else:
        trap = tune_trap_for_central_spacing(crystal.count_N, crystal.species, crystal.spacing_l)
    chain = equilibrium_positions(crystal.count_N, crystal.species, trap)
    # the dispersion comparison uses the ideal uniform reference lattice at
    # the target spacing; the trapped chain is inhomogeneous and its spectrum
    # does not follow a single lattice band
    ref_config, ref_spectrum = uniform_chain_reference(
        crystal.count_N, crystal.species, crystal.spacing_l
    )
    report = dispersion_compare(ref_spectrum, crystal, ref_config)

    header = _base_header(cfg)
    header["derived.trap_omega_t"] = repr(trap)
    header["derived.central_spacing"] = repr(chain.central_spacing)
    header["derived.mean_spacing"] = repr(chain.mean_spacing)
    header["derived.omega_o"] = repr(report.omega_o_closed_form)
    header["derived.band_edge"] = repr(report.band_edge)
    header["derived.gradient_norm"] = repr(chain.gradient_norm)

    pos_tf = TraceFile(dict(header), {
        "index": [str(i) for i in range(len(chain.positions))],
        "x_m": chain.positions,
    })
    rows = report.rows
    mode_tf = TraceFile(dict(header), {
        "mode_index": [str(r.mode_index) for r in rows],
        "k_eff": np.array([r.k_eff for r in rows]),
        "omega_numeric": np.array([r.omega_numeric for r in rows]),
        "omega_sine": np.array([r.omega_sine for r in rows]),
        "omega_infinite": np.array([r.omega_infinite for r in rows]),
        "rel_err_sine": np.array([r.rel_err_sine for r in rows]),
        "rel_err_infinite": np.array([r.rel_err_infinite for r in rows]),
        "edge_mode": [str(int(r.edge_mode)) for r in rows],
    })
    result = RunResult([
        pos_tf.write(out_dir / f"{name}_positions.csv"),
        mode_tf.write(out_dir / f"{name}_modes.csv"),
    ])
    if svg:
        from .plots import render_dispersion_plot

        k_band = np.linspace(0.0, math.pi / report.central_spacing, 200)
        w_sine = report.band_edge * np.abs(np.sin(k_band * report.central_spacing / 2.0))
        w_inf = np.array([
            infinite_chain_dispersion(crystal.species, report.central_spacing, k)
            for k in k_band
        ])
        result.paths.append(render_dispersion_plot(
            [r.k_eff for r in rows], [r.omega_numeric for r in rows],
            k_band, w_sine, w_inf, out_dir / f"{name}_dispersion.svg",
        ))
    return result


def run_oracle(cfg: RunConfig, out_dir: Path, name: str, svg: bool) -> RunResult:
    kind = cfg.oracle_kind
    coupling = cfg.oracle_coupling if cfg.oracle_coupling is not None else 1.0
    u = _u_grid(cfg)
    header = _base_header(cfg)
    cutoff = False

    if kind == "single":
        n_max = cfg.oracle_n_max or 60
        times = list(u / (2.0 * coupling))
        states = evolve_single_mode(coupling, times[-1], n_max, sample_times=times)
        exact = np.array([quadrature_variance(s) for s in states])
        closed = 0.25 * np.exp(-2.0 * u)
        cutoff = any(s.cutoff_limited for s in states)
        cols = {"u": u, "t_s": np.asarray(times),
                "variance_exact": exact, "variance_closed_form": closed}
        noisy, quiet, thr, ylabel = exact, closed, 0.25, "quadrature variance"
    elif kind == "two":
        n_max = cfg.oracle_n_max or 40
        # the closed-form decay rate corresponds to twice the pair-creation
        # rate in the interaction; calibrate u = 2 * coupling * t
        times = list(u / (2.0 * coupling))
        states = evolve_two_mode(coupling, times[-1], n_max, sample_times=times)
        exact = np.array([sum(quadrature_variance(s)) for s in states])
        closed = 2.0 * np.exp(-2.0 * coupling * np.asarray(times))
        cutoff = any(s.cutoff_limited for s in states)
        cols = {"u": u, "t_s": np.asarray(times),
                "variance_sum_exact": exact, "variance_sum_closed_form": closed}
        noisy, quiet, thr, ylabel = exact, closed, 2.0, "sum of EPR variances"
    elif kind == "pump":
        nbars = [float(s) for s in (cfg.oracle_nbars or "4,9,16").split(",")]
        times = list(u / (2.0 * coupling))  # u is defined per unit sqrt(nbar)
        cols = {"u": u, "t_s": np.asarray(times)}
        closed = 0.25 * np.exp(-2.0 * u)
        cols["variance_classical"] = closed
        curves = []
        for nbar in nbars:
            alpha0 = math.sqrt(nbar)
            n_pump = max(24, int(math.ceil(nbar + 8.0 * math.sqrt(nbar))))
            # u = 2 g alpha0 t in the classical limit, so rescale the grid
            run = quantized_pump_run(coupling, alpha0, [t / alpha0 for t in times],
                                     n_pump=n_pump, n_mol=30)
            tag = f"{nbar:g}".replace(".", "p")
            cols[f"variance_nbar{tag}"] = run.variance_x1
            cols[f"depletion_nbar{tag}"] = nbar - run.pump_occupation
            cutoff = cutoff or run.cutoff_limited
            curves.append((nbar, run.variance_x1))
        noisy, quiet, thr, ylabel = curves[-1][1], closed, 0.25, "quadrature variance"
    else:
        raise ValidationError(f"unknown oracle kind {kind!r}")

    header["derived.cutoff_limited"] = str(int(cutoff))
    tf = TraceFile(header, cols)
    result = RunResult([tf.write(out_dir / f"{name}.csv")], cutoff_limited=cutoff)
    if svg:
        from .plots import render_variance_plot

        result.paths.append(render_variance_plot(
            u, noisy, quiet, thr, out_dir / f"{name}.svg", ylabel=ylabel,
        ))
    if cutoff:
        raise CutoffLimitedError(
            f"truncated-basis run left too much probability near the cutoff; "
            f"partial output in {result.paths[0]}"
        )
    return result


def _sweep_row(cfg: RunConfig, axis: str, value: float, two_mode: bool) -> dict:
    point = set_axis_value(cfg, axis, value)
    row: dict = {"axis_value": float(value)}
    if two_mode:
        C_k = resolve_two_mode_coupling(point)
        row["coupling"] = C_k
        row["u_star"] = math.nan
        row["min_variance"] = math.nan
        win = entanglement_window(C_k, point.damping_D)
        row["window_t_enter"] = win.t_enter if win.t_enter is not None else math.nan
        row["window_t_exit"] = win.t_exit if win.t_exit is not None else math.nan
        row["window_status"] = win.status
    else:
        C = resolve_single_mode_coupling(point)
        row["coupling"] = C
        opt = optimal_single_mode_squeezing(C, point.damping_D)
        row["u_star"] = opt.u_star if opt.u_star is not None else math.nan
        row["min_variance"] = opt.min_variance if opt.min_variance is not None else math.nan
        win = validity_window(C, point.damping_D)
        row["window_t_enter"] = win.t_min
        row["window_t_exit"] = win.t_max
        row["window_status"] = "empty" if win.empty else "ok"
    return row


def run_sweep(cfg: RunConfig, out_dir: Path, name: str, svg: bool) -> RunResult:
    axis = cfg.sweep_axis
    values = np.linspace(cfg.sweep_min, cfg.sweep_max, cfg.sweep_points)
    two_mode = cfg.pinned_C_k is not None or (
        cfg.spacing_l is not None and cfg.pinned_C is None
    )
    with ThreadPoolExecutor(max_workers=8) as pool:
        rows = list(pool.map(lambda v: _sweep_row(cfg, axis, v, two_mode), values))
    header = _base_header(cfg)
    header["derived.sweep_mode"] = "two-mode" if two_mode else "single-mode"
    cols: dict = {axis: np.array([r["axis_value"] for r in rows])}
    for key in ("coupling", "u_star", "min_variance", "window_t_enter", "window_t_exit"):
        cols[key] = np.array([r[key] for r in rows])
    cols["window_status"] = [r["window_status"] for r in rows]
    tf = TraceFile(header, cols)
    return RunResult([tf.write(out_dir / f"{name}.csv")])


_SCENARIO_RUNNERS = {
    "single-mode": run_single_mode,
    "two-mode": run_two_mode,
    "lattice": run_lattice,
    "oracle": run_oracle,
    "sweep": run_sweep,
}


def run_scenario(cfg: RunConfig, out_dir: Path | str, name: str = "",
                 svg: bool | None = None) -> RunResult:
    """Execute one validated configuration and write its output files."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if not name:
        name = cfg.scenario.replace("-", "_")
    if svg is None:
        svg = cfg.output_svg
    return _SCENARIO_RUNNERS[cfg.scenario](cfg, out_dir, name, svg)


def reference_report() -> str:
    """Compare derived couplings for the shipped example geometries against
    the published target values, stating every default that fills a gap."""
    from .config import PROFILES

    lines = [
        "Derived couplings for the shipped example geometries",
        "====================================================",
        "",
        "The published worked examples quote target values but omit two inputs:",
        "the molecular dipole moment and the bare trap frequency. This report",
        "uses the documented defaults (SrO, dipole 8.9 debye = 2.969e-29 C m,",
        "mass 103.62 u, bare trap 0 so the trap is cantilever-provided) and",
        "reports the resulting couplings next to the published targets. The",
        "gaps are reported, not patched: shipped profiles pin the dynamics to",
        "the published coupling via dynamics.C / dynamics.C_k, while the",
        "derived values below stay reproducible from first principles.",
        "",
    ]

    fig2 = parse_config(PROFILES["fig2"])
    setup, cant = fig2.single_setup(), fig2.cantilever()
    wt = shifted_trap_frequency(setup, cant)
    C = single_mode_coupling(setup, cant)
    lines += [
        "Single trapped molecule (R = 2 um, omega_c = 4e6 rad/s, nbar = 100):",
        f"  shifted trap frequency : {wt:.6e} rad/s   (target 2.0e6, ratio {wt / 2.0e6:.3f})",
        f"  squeezing coupling C   : {C:.6e} 1/s      (target 2.04e1, ratio {C / 20.4:.3f})",
        "",
    ]

    fig3 = parse_config(PROFILES["fig3"])
    crystal, cant3 = fig3.crystal_setup(), fig3.cantilever()
    w0 = phonon_base_frequency(crystal)
    k_edge = math.pi / crystal.spacing_l
    ck = two_mode_coupling(crystal, cant3, k_edge)
    band = nearest_neighbor_band_edge(crystal.species, crystal.spacing_l)
    lines += [
        "Dipolar chain (l = 200 nm, omega_c = 2e6 rad/s, nbar = 100):",
        f"  dispersion scale omega_o : {w0:.6e} rad/s (target 4.0e6, ratio {w0 / 4.0e6:.3f})",
        f"  force-constant band edge : {band:.6e} rad/s"
        f" (sqrt(2) above the closed-form 2*omega_o = {2 * w0:.6e})",
        f"  zone-edge coupling C_k   : {ck.C_k:.6e} 1/s"
        f" (target magnitude 6.2, ratio {abs(ck.C_k) / 6.2:.3f})",
        f"  thermal boost sqrt(nbar) : {math.sqrt(thermal_occupation(cant3)):.1f}",
        "",
        "All derived magnitudes agree with the published targets to better",
        "than a factor of 5; the residual ratios trace to the defaulted",
        "dipole moment entering the couplings quadratically.",
    ]
    return "\n".join(lines) + "\n"
