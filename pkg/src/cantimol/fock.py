"""Exact truncated-Fock-space evolution of the squeezing interactions.

The pump phase is fixed so that the monitored quadratures are the squeezed
ones: the single-mode generator is C (b^2 - b+^2) and the two-mode generator
C_k (b+ b- - b+^+ b-^+) (as generators of the unitary, i.e. d psi/dt = G psi).
Both are real antisymmetric in the Fock basis, so the flow is orthogonal and
norm-preserving up to the fixed-step matrix-exponential roundoff, which is
monitored and never renormalized away.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.linalg import expm

from .errors import ValidationError

#: fixed-step criterion: ||G|| * dt <= MAX_STEP_NORM
MAX_STEP_NORM = 0.05
NORM_DEFICIT_MAX = 1e-8
TAIL_MASS_MAX = 1e-6


def destroy(n_levels: int) -> np.ndarray:
    """Dense annihilation operator on n_levels Fock states."""
    return np.diag(np.sqrt(np.arange(1.0, n_levels)), 1)


@dataclass
class TruncatedState:
    """Fock-basis state; amplitudes are 1-D (single mode) or 2-D (two modes)."""

    amplitudes: np.ndarray
    n_max: int
    norm_deficit: float = 0.0
    tail_mass: float = 0.0
    cutoff_limited: bool = False

    @property
    def two_mode(self) -> bool:
        return self.amplitudes.ndim == 2

    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))


def _tail_mass(amp: np.ndarray) -> float:
    n = amp.shape[0] - 1
    cut = int(math.ceil(0.9 * n))
    if amp.ndim == 1:
        return float(np.sum(np.abs(amp[cut:]) ** 2))
    return float(
        np.sum(np.abs(amp[cut:, :]) ** 2) + np.sum(np.abs(amp[:cut, cut:]) ** 2)
    )


def _finalize(amp: np.ndarray, n_max: int) -> TruncatedState:
    deficit = abs(1.0 - float(np.sum(np.abs(amp) ** 2)))
    tail = _tail_mass(amp)
    return TruncatedState(
        amp, n_max, deficit, tail,
        cutoff_limited=(tail > TAIL_MASS_MAX or deficit > NORM_DEFICIT_MAX),
    )


def _fixed_step_evolve(gen: np.ndarray | sp.spmatrix, psi0: np.ndarray,
                       times: Sequence[float]) -> list[np.ndarray]:
    """Apply exp(gen * t) at the requested (ascending) times by fixed steps.

    The step is chosen from a Gershgorin bound so that ||gen|| dt <= 0.05;
    one dense exponential of the step generator is reused throughout.
    """
    times = list(times)
    if any(t < 0 for t in times) or any(b < a for a, b in zip(times, times[1:])):
        raise ValidationError("sample times must be ascending and >= 0")
    dense = gen.toarray() if sp.issparse(gen) else np.asarray(gen)
    norm_bound = float(np.max(np.sum(np.abs(dense), axis=1)))
    t_end = times[-1] if times else 0.0
    if norm_bound == 0.0 or t_end == 0.0:
        return [psi0.copy() for _ in times]
    dt_max = MAX_STEP_NORM / norm_bound
    # hit every sample time exactly; cache the step propagator per distinct dt
    cache: dict[float, np.ndarray] = {}
    out = []
    psi = psi0.copy()
    t_prev = 0.0
    for t in times:
        span = t - t_prev
        if span > 0:
            n_steps = max(1, int(math.ceil(span / dt_max)))
            dt = span / n_steps
            key = round(dt, 15)
            if key not in cache:
                cache[key] = expm(dense * dt)
            u_step = cache[key]
            for _ in range(n_steps):
                psi = u_step @ psi
        out.append(psi.copy())
        t_prev = t
    return out


def vacuum(n_max: int) -> np.ndarray:
    psi = np.zeros(n_max + 1)
    psi[0] = 1.0
    return psi


def coherent(alpha: float, n_max: int) -> np.ndarray:
    n = np.arange(n_max + 1)
    log_fact = np.cumsum(np.concatenate(([0.0], np.log(np.arange(1.0, n_max + 1)))))
    amp = np.sign(alpha) ** n * np.exp(
        -0.5 * alpha * alpha + n * np.log(abs(alpha)) - 0.5 * log_fact
    ) if alpha != 0 else vacuum(n_max)
    return amp


def evolve_single_mode(
    C: float, t: float, n_max: int = 60, sample_times: Optional[Sequence[float]] = None
) -> TruncatedState | list[TruncatedState]:
    """Evolve vacuum under the single-mode squeezing generator C (b^2 - b+^2).

    Only even Fock levels are populated (pair creation). Returns the final
    state, or one state per sample time when sample_times is given.
    """
    if n_max < 2:
        raise ValidationError("n_max must be >= 2")
    b = destroy(n_max + 1)
    gen = C * (b @ b - b.T @ b.T)
    times = list(sample_times) if sample_times is not None else [t]
    states = [_finalize(a, n_max) for a in _fixed_step_evolve(gen, vacuum(n_max), times)]
    return states if sample_times is not None else states[0]


def evolve_two_mode(
    C_k: float, t: float, n_max: int = 40, sample_times: Optional[Sequence[float]] = None
) -> TruncatedState | list[TruncatedState]:
    """Evolve the two-mode vacuum under C_k (b+ b- - b+^+ b-^+).

    Pair creation keeps the mode populations exactly equal at all times.
    """
    if n_max < 2:
        raise ValidationError("n_max must be >= 2")
    dim = n_max + 1
    b = sp.csr_matrix(destroy(dim))
    eye = sp.identity(dim, format="csr")
    bp = sp.kron(b, eye, format="csr")
    bm = sp.kron(eye, b, format="csr")
    pair = bp @ bm
    gen = C_k * (pair - pair.T)
    psi0 = np.zeros(dim * dim)
    psi0[0] = 1.0
    times = list(sample_times) if sample_times is not None else [t]
    states = [
        _finalize(a.reshape(dim, dim), n_max)
        for a in _fixed_step_evolve(gen, psi0, times)
    ]
    return states if sample_times is not None else states[0]


class TwoModeVariances(NamedTuple):
    var_s1: float
    var_s2: float


def quadrature_variance(state: TruncatedState):
    """Variance of x1 = (b + b+)/2 (single mode) or of the EPR pair s1, s2."""
    amp = state.amplitudes
    if not state.two_mode:
        b = destroy(len(amp))
        x1 = 0.5 * (b + b.T)
        m1 = float(np.real(np.vdot(amp, x1 @ amp)))
        m2 = float(np.real(np.vdot(amp, x1 @ (x1 @ amp))))
        return m2 - m1 * m1
    dim = amp.shape[0]
    psi = amp.reshape(-1)
    b = sp.csr_matrix(destroy(dim))
    eye = sp.identity(dim, format="csr")
    bp = sp.kron(b, eye, format="csr")
    bm = sp.kron(eye, b, format="csr")
    s1 = (bp + bm + bp.T + bm.T) / math.sqrt(2.0)
    s2 = (bp - bp.T - bm + bm.T) / (1j * math.sqrt(2.0))
    out = []
    for op in (s1, s2):
        m1 = float(np.real(np.vdot(psi, op @ psi)))
        m2 = float(np.real(np.vdot(psi, op @ (op @ psi))))
        out.append(m2 - m1 * m1)
    return TwoModeVariances(*out)


def mode_occupations(state: TruncatedState):
    """Mean occupation per mode; also usable for the parity bookkeeping tests."""
    amp = state.amplitudes
    if not state.two_mode:
        n = np.arange(len(amp))
        return float(np.sum(n * np.abs(amp) ** 2))
    p = np.abs(amp) ** 2
    n = np.arange(amp.shape[0])
    return float(np.sum(p * n[:, None])), float(np.sum(p * n[None, :]))


@dataclass
class PumpRunReport:
    """Quantized-pump evolution: coherent cantilever driving pair creation."""

    times: np.ndarray
    variance_x1: np.ndarray        # molecule quadrature variance
    pump_occupation: np.ndarray    # <a+ a>
    molecule_occupation: np.ndarray
    conserved: np.ndarray          # <a+ a> + <b+ b>/2
    cutoff_limited: bool
    nbar: float
    states: list = field(default_factory=list, repr=False)


def quantized_pump_run(
    g: float,
    alpha0: float,
    times: Sequence[float],
    n_pump: int = 40,
    n_mol: int = 30,
) -> PumpRunReport:
    """Evolve coherent pump x molecule vacuum under g (a+ b^2 - a b+^2).

    Each absorbed pump quantum creates exactly two molecule quanta, so
    <a+ a> + <b+ b>/2 is conserved. In the classical-pump limit the molecule
    sees the single-mode generator with C = g * alpha0.
    """
    dim_a, dim_b = n_pump + 1, n_mol + 1
    a_op = sp.csr_matrix(destroy(dim_a))
    b_op = sp.csr_matrix(destroy(dim_b))
    eye_a = sp.identity(dim_a, format="csr")
    eye_b = sp.identity(dim_b, format="csr")
    A = sp.kron(a_op, eye_b, format="csr")
    B = sp.kron(eye_a, b_op, format="csr")
    M = A.T @ B @ B                       # a+ b^2
    gen = g * (M - M.T)
    psi0 = np.kron(coherent(alpha0, n_pump), vacuum(n_mol))
    psi_list = _fixed_step_evolve(gen, psi0, list(times))

    num_a = np.arange(dim_a)
    num_b = np.arange(dim_b)
    x1 = 0.5 * (b_op + b_op.T).toarray()
    var, occ_a, occ_b, cons = [], [], [], []
    cutoff = False
    states = []
    for psi in psi_list:
        grid = psi.reshape(dim_a, dim_b)
        p = np.abs(grid) ** 2
        na = float(np.sum(p * num_a[:, None]))
        nb = float(np.sum(p * num_b[None, :]))
        rho_b = grid.T @ grid.conj()      # molecule reduced density matrix
        m1 = float(np.real(np.trace(x1 @ rho_b)))
        m2 = float(np.real(np.trace(x1 @ x1 @ rho_b)))
        var.append(m2 - m1 * m1)
        occ_a.append(na)
        occ_b.append(nb)
        cons.append(na + 0.5 * nb)
        tail = float(np.sum(p[int(math.ceil(0.9 * n_pump)):, :])
                     + np.sum(p[:, int(math.ceil(0.9 * n_mol)):]))
        deficit = abs(1.0 - float(np.sum(p)))
        cutoff = cutoff or tail > TAIL_MASS_MAX or deficit > NORM_DEFICIT_MAX
        states.append(grid)
    return PumpRunReport(
        np.asarray(list(times), dtype=float),
        np.asarray(var), np.asarray(occ_a), np.asarray(occ_b), np.asarray(cons),
        cutoff, alpha0 * alpha0, states,
    )
