"""Squeezing dynamics under pump phase noise.

Closed forms for the single-mode quadrature variance, the two-mode variance
sum with its characteristic cubic, entanglement-window detection, and an
independent ODE oracle that re-derives the residue sum by integrating the
linear ODE whose Laplace transform has the same poles.

Conventions: the squeezing parameter is u = 2 C t (single mode) and
u = 2 C_k0 t (two-mode). Dynamics consume coupling magnitudes; signs are
preserved upstream in quantities.two_mode_coupling.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq, minimize_scalar

from .errors import NumericalError, ValidationError
from .quantities import validity_window

#: exponent clamp; e^700 is near the double overflow threshold
EXP_CLAMP = 700.0

#: relative root-separation below which the partial-fraction form is abandoned
DEGENERACY_RTOL = 1e-8

#: allowed imaginary leakage of the complex-evaluated closed form
IMAG_RTOL = 1e-9


def _clamped_exp(arg: float) -> tuple[float, bool]:
    if arg > EXP_CLAMP:
        return math.exp(EXP_CLAMP), True
    if arg < -EXP_CLAMP:
        return math.exp(-EXP_CLAMP), True
    return math.exp(arg), False


def single_mode_variance(C: float, D: float, t: float) -> float:
    """Position-quadrature variance (1/4 e^-2u + 1/8 e^2u D t), u = 2 C t."""
    if C <= 0:
        raise ValidationError("C must be > 0")
    if D < 0 or t < 0:
        raise ValidationError("D and t must be >= 0")
    u = 2.0 * C * t
    e_minus, _ = _clamped_exp(-2.0 * u)
    e_plus, _ = _clamped_exp(2.0 * u)
    return 0.25 * e_minus + 0.125 * e_plus * D * t


def single_mode_variance_u(C: float, D: float, u: float) -> float:
    """Same as single_mode_variance but parametrized by u = 2 C t."""
    return single_mode_variance(C, D, u / (2.0 * C))


class OptimalSqueezing(NamedTuple):
    u_star: Optional[float]
    min_variance: Optional[float]
    no_interior_minimum: bool


def optimal_single_mode_squeezing(C: float, D: float) -> OptimalSqueezing:
    """Minimize the noisy single-mode variance over u > 0.

    With D = 0 the variance decreases monotonically and there is no interior
    minimum; this is flagged, not an error.
    """
    if C <= 0:
        raise ValidationError("C must be > 0")
    if D == 0:
        return OptimalSqueezing(None, None, True)
    res = minimize_scalar(
        lambda u: single_mode_variance_u(C, D, u),
        bounds=(1e-12, 10.0),
        method="bounded",
        options={"xatol": 1e-10},
    )
    return OptimalSqueezing(float(res.x), float(res.fun), False)


class Ck0Result(NamedTuple):
    value: complex        # 0.5 * sqrt(4 C_k^2 - D^2); imaginary when overdamped
    overdamped: bool      # D > 2 |C_k|
    degenerate: bool      # D == 2 |C_k| (branch point)


def c_k0(C_k: float, D: float) -> Ck0Result:
    """Effective two-mode rate, complex-capable across the overdamped branch."""
    if C_k == 0:
        raise ValidationError("C_k must be nonzero")
    disc = 4.0 * C_k * C_k - D * D
    value = 0.5 * cmath.sqrt(complex(disc))
    return Ck0Result(value, overdamped=disc < 0, degenerate=disc == 0)


@dataclass(frozen=True)
class CubicRoots:
    lambdas: tuple[complex, complex, complex]
    is_degenerate: bool
    residual: float  # max |p(lambda_i)| relative to max(|D|, |C_k0|)^3

    def vieta(self, D: float, C_k0_sq: float) -> tuple[float, float, float]:
        """Absolute errors of the three Vieta identities."""
        l1, l2, l3 = self.lambdas
        e1 = abs((l1 + l2 + l3) - (-5.0 * D))
        e2 = abs((l1 * l2 + l1 * l3 + l2 * l3) - (4.0 * D * D - C_k0_sq))
        e3 = abs(l1 * l2 * l3 - 2.0 * C_k0_sq * D)
        return e1, e2, e3


def cubic_roots(D: float, C_k0: complex) -> CubicRoots:
    """Roots of lambda^3 + 5 D lambda^2 + (4 D^2 - C_k0^2) lambda - 2 C_k0^2 D.

    Companion-matrix eigenvalues followed by one Newton polish per root.
    The coefficients depend on C_k0 only through its square, which is real
    for both the underdamped and overdamped branches.
    """
    if D < 0:
        raise ValidationError("D must be >= 0")
    c2 = complex(C_k0) ** 2
    if abs(c2.imag) > 1e-12 * max(1.0, abs(c2.real)):
        raise ValidationError("C_k0^2 must be real")
    c2 = c2.real
    a2, a1, a0 = 5.0 * D, 4.0 * D * D - c2, -2.0 * c2 * D
    companion = np.array(
        [[-a2, -a1, -a0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], dtype=float
    )
    lam = np.linalg.eigvals(companion).astype(complex)

    def p(x):
        return ((x + a2) * x + a1) * x + a0

    def dp(x):
        return (3.0 * x + 2.0 * a2) * x + a1

    for i in range(3):
        d = dp(lam[i])
        if abs(d) > 0:
            lam[i] = lam[i] - p(lam[i]) / d
    # real-coefficient cubic: snap conjugate pairs / tiny imaginary parts
    scale = max(abs(D), abs(C_k0), 1e-300)
    lam = np.where(np.abs(lam.imag) < 1e-12 * np.abs(lam).max(initial=scale), lam.real + 0j, lam)
    residual = float(max(abs(p(x)) for x in lam)) / scale**3
    lmax = max(abs(x) for x in lam)
    degenerate = any(
        abs(lam[i] - lam[j]) < DEGENERACY_RTOL * max(lmax, 1e-300)
        for i in range(3)
        for j in range(i + 1, 3)
    )
    return CubicRoots(tuple(lam), degenerate, residual)


def residue_sum(roots: Sequence[complex], D: float, C_k0: complex, t: float) -> complex:
    """Partial-fraction term sum_i e^{l_i t} 2 C_k0 (l_i + 4D) / prod_{j!=i}(l_i - l_j)."""
    total = 0.0 + 0.0j
    lam = list(roots)
    for i in range(3):
        prod = 1.0 + 0.0j
        for j in range(3):
            if j != i:
                prod *= lam[i] - lam[j]
        arg = lam[i] * t
        if arg.real > EXP_CLAMP:
            arg = complex(EXP_CLAMP, arg.imag)
        total += cmath.exp(arg) * 2.0 * C_k0 * (lam[i] + 4.0 * D) / prod
    return total


def laplace_ode_oracle(
    D: float, C_k0: complex, t: float | np.ndarray, roots: Optional[CubicRoots] = None
) -> np.ndarray:
    """Residue sum via its defining linear ODE, independent of the root values.

    Integrates y''' + 5D y'' + (4D^2 - C_k0^2) y' - 2 C_k0^2 D y = 0 with
    y(0) = 0, y'(0) = 2 C_k0, y''(0) = -2 C_k0 D (Taylor-matched to the
    partial-fraction sum at t = 0) using an adaptive controller at rtol 1e-10.
    Regular at degenerate roots. `roots` is accepted for interface parity but
    not used; the ODE only needs D and C_k0.
    """
    del roots
    c2 = (complex(C_k0) ** 2).real
    ck0 = complex(C_k0)
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t_arr < 0):
        raise ValidationError("t must be >= 0")
    t_end = float(t_arr.max())
    if t_end == 0.0:
        return np.zeros_like(t_arr)

    is_complex = abs(ck0.imag) > 0

    def rhs(_, y):
        return [y[1], y[2], -5.0 * D * y[2] - (4.0 * D * D - c2) * y[1] + 2.0 * c2 * D * y[0]]

    y0 = [0.0, 2.0 * ck0, -2.0 * ck0 * D]
    if not is_complex:
        y0 = [v.real if isinstance(v, complex) else v for v in y0]
    sol = solve_ivp(
        rhs,
        (0.0, t_end),
        np.asarray(y0, dtype=complex if is_complex else float),
        method="DOP853",
        t_eval=np.sort(np.unique(np.append(t_arr, t_end))),
        rtol=1e-10,
        atol=1e-12 * max(1.0, abs(ck0)),
        dense_output=True,
    )
    if not sol.success:
        raise NumericalError(f"ODE oracle step controller failed: {sol.message}")
    out = sol.sol(t_arr)[0]
    return out if is_complex else out.astype(float)


def _first_term(C_k0: complex, D: float, t: float) -> complex:
    """e^{-Dt/2}/C_k0 * (D sinh(C_k0 t) + 2 C_k0 cosh(C_k0 t)), with the
    removable C_k0 -> 0 limit e^{-Dt/2} (D t + 2)."""
    damp = cmath.exp(-0.5 * D * t)
    if abs(C_k0) * abs(t) < 1e-12:
        return damp * (D * t + 2.0)
    arg = C_k0 * t
    if arg.real > EXP_CLAMP:
        arg = complex(EXP_CLAMP, arg.imag)
    return damp * (D * cmath.sinh(arg) + 2.0 * C_k0 * cmath.cosh(arg)) / C_k0


def two_mode_variance_sum(C_k: float, D: float, t: float) -> float:
    """Sum of the two EPR quadrature variances at time t (vacuum value 2).

    Evaluated in complex arithmetic; the imaginary residue must stay below
    IMAG_RTOL of the real part. Near-degenerate roots switch the residue term
    to the ODE oracle, which is regular at confluence. The overdamped branch
    D > 2|C_k| has no real-valued closed form and raises.
    """
    if t < 0:
        raise ValidationError("t must be >= 0")
    ck0 = c_k0(C_k, D)
    if ck0.overdamped:
        raise NumericalError(
            "overdamped pump (D > 2|C_k|): the variance-sum closed form is not real-valued"
        )
    roots = cubic_roots(D, ck0.value)
    first = _first_term(ck0.value, D, t)
    if roots.is_degenerate or ck0.degenerate:
        res = laplace_ode_oracle(D, ck0.value, t)[0]
    else:
        res = residue_sum(roots.lambdas, D, ck0.value, t)
    total = first - res
    total = complex(total)
    if abs(total.imag) > IMAG_RTOL * max(abs(total.real), 1.0):
        raise NumericalError(
            f"imaginary residue {total.imag:.3e} exceeds tolerance; roots or formula corrupted"
        )
    return total.real


class EntanglementWindow(NamedTuple):
    t_enter: Optional[float]     # s; None when empty
    t_exit: Optional[float]      # s; None when empty or open
    open_ended: bool             # no re-crossing (D = 0, or formula never returns above 2)
    empty: bool
    status: str                  # "ok", "open", "empty-overdamped", "empty", "breakdown-open"


def entanglement_window(C_k: float, D: float, horizon_u: float = 60.0) -> EntanglementWindow:
    """First interval where the variance sum is below 2 (inseparability bound).

    Endpoints are located by bisection to relative tolerance 1e-9. The entry
    point is t = 0 whenever the sum dips below 2 immediately (its value at
    t = 0 is exactly 2). For D = 0 the window never closes. Overdamped pumps
    report an empty window. If the closed form never returns above 2 within
    the search horizon (it diverges to -inf deep outside its validity range),
    the exit is reported open with a breakdown status.
    """
    if C_k == 0:
        raise ValidationError("C_k must be nonzero")
    ck0 = c_k0(C_k, D)
    if ck0.overdamped or ck0.degenerate:
        return EntanglementWindow(None, None, False, True, "empty-overdamped")
    rate = ck0.value.real
    if D == 0:
        return EntanglementWindow(0.0, None, True, False, "open")

    f = lambda t: two_mode_variance_sum(C_k, D, t) - 2.0
    t_hi = horizon_u / (2.0 * rate)
    grid = np.linspace(0.0, t_hi, 2001)[1:]
    vals = np.array([f(t) for t in grid])

    below = vals < 0.0
    if not below.any():
        return EntanglementWindow(None, None, False, True, "empty")
    i0 = int(np.argmax(below))
    if i0 == 0:
        t_enter = 0.0
    else:
        t_enter = brentq(f, grid[i0 - 1], grid[i0], rtol=1e-9)

    above_after = np.where(~below[i0:])[0]
    if len(above_after) == 0:
        return EntanglementWindow(t_enter, None, True, False, "breakdown-open")
    j = i0 + int(above_after[0])
    # the formula can leave (0,2) downward (negative values) without ever
    # re-crossing 2; check the sign at the first not-below point
    if vals[j] > 0.0:
        t_exit = brentq(f, grid[j - 1], grid[j], rtol=1e-9)
        return EntanglementWindow(t_enter, t_exit, False, False, "ok")
    return EntanglementWindow(t_enter, None, True, False, "breakdown-open")


@dataclass
class VarianceTrace:
    """Variance (or variance-sum) curve on a strictly increasing time grid."""

    t: np.ndarray
    u: np.ndarray
    value: np.ndarray
    inside_validity: np.ndarray      # bool per point
    below_threshold: np.ndarray      # squeezed / entangled flag per point
    threshold: float                 # 1/4 single-mode, 2 two-mode
    threshold_crossings: list = field(default_factory=list)

    def __post_init__(self):
        if not np.all(np.diff(self.t) > 0):
            raise ValidationError("trace grid must be strictly increasing in t")


def single_mode_trace(C: float, D: float, u_grid: np.ndarray) -> VarianceTrace:
    u = np.asarray(u_grid, dtype=float)
    t = u / (2.0 * C)
    value = np.array([single_mode_variance(C, D, ti) for ti in t])
    win = validity_window(C, D)
    inside = (t > win.t_min) & (t < win.t_max)
    crossings = _crossings(lambda ti: single_mode_variance(C, D, ti) - 0.25, t, value - 0.25)
    return VarianceTrace(t, u, value, inside, value < 0.25, 0.25, crossings)


def two_mode_trace(C_k: float, D: float, u_grid: np.ndarray) -> VarianceTrace:
    ck0 = c_k0(C_k, D)
    if ck0.overdamped or ck0.degenerate:
        raise NumericalError("no real-valued two-mode trace for D >= 2|C_k|")
    rate = ck0.value.real
    u = np.asarray(u_grid, dtype=float)
    t = u / (2.0 * rate)
    value = np.array([two_mode_variance_sum(C_k, D, ti) for ti in t])
    win = validity_window(abs(C_k), D)
    inside = (t > win.t_min) & (t < win.t_max)
    crossings = _crossings(lambda ti: two_mode_variance_sum(C_k, D, ti) - 2.0, t, value - 2.0)
    return VarianceTrace(t, u, value, inside, value < 2.0, 2.0, crossings)


def _crossings(f, t: np.ndarray, residual: np.ndarray) -> list:
    out = []
    sign = np.sign(residual)
    for i in range(1, len(t)):
        if sign[i - 1] != 0 and sign[i] != 0 and sign[i] != sign[i - 1]:
            out.append(float(brentq(f, t[i - 1], t[i], rtol=1e-9)))
    return out
