"""Insert prescribed bound levels below a potential's spectrum.

One step adds a single level E below everything the potential already has:
solve the Riccati equation

    U'(x) + U(x)^2 = 2*(V(x) - E),        U(0) = alpha,

outward from x = 0, then form the partner potential

    V_new(x) = U(x)^2 - V(x) + 2*E,

whose ground state sits exactly at E while all previous levels survive.
Iterating over a descending level list grows an arbitrary finite spectrum.

U is integrated directly (never the auxiliary Schrodinger solution, whose
values overflow for deep levels); the outward direction makes the wanted
branch of U attracting, so the integration is stable.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline

from .grids import Grid, SampledPotential, Wavefunction
from .spectra import RationalLike, as_fraction

SQRT2 = float(np.sqrt(2.0))

DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-12
DEFAULT_BLOWUP = 1e6


class IntertwineError(Exception):
    """Base class for level-insertion failures."""


class PoleDetectedError(IntertwineError):
    """The superpotential blew up before reaching the boundary.

    This signals a requested level at or above the current ground state, or
    an asymmetry parameter alpha large enough for the odd part's zero to
    contaminate the auxiliary solution.
    """

    def __init__(self, x_blowup: float, level: Fraction, threshold: float):
        self.x_blowup = x_blowup
        super().__init__(
            f"superpotential for level {level} exceeded {threshold:g} at x = {x_blowup:.6g}"
        )


class ToleranceFailureError(IntertwineError):
    """The adaptive integrator could not meet its local error target."""


class DegenerateLevelError(IntertwineError):
    """Requested level equals the current ground state (pole guaranteed)."""


class LevelOrderError(IntertwineError):
    """Requested level is not strictly below all previously injected levels."""


class DesignStepError(IntertwineError):
    """A step of the design loop failed; records which level broke it."""

    def __init__(self, index: int, level: Fraction, cause: IntertwineError):
        self.index = index
        self.level = level
        super().__init__(f"design step {index} (level {level}) failed: {cause}")


@dataclass(frozen=True, eq=False)
class Superpotential:
    """Solution U of the Riccati equation for one inserted level."""

    grid: Grid
    values: np.ndarray
    level: Fraction
    alpha: float

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.n_points,):
            raise ValueError("superpotential shape does not match its grid")
        if not np.all(np.isfinite(values)):
            raise ValueError("superpotential values must be finite")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)


def _check_level_admissible(v_prev: SampledPotential, level: Fraction) -> None:
    if not v_prev.injected_levels:
        return
    ground = v_prev.injected_levels[-1]
    if level == ground:
        raise DegenerateLevelError(
            f"level {level} equals the current ground state; the auxiliary "
            "solution acquires a zero and U develops a pole"
        )
    if level > ground:
        raise LevelOrderError(
            f"level {level} is above the current ground state {ground}; "
            "levels must be added in descending order"
        )


def _integrate_half(
    rhs,
    x_end: float,
    alpha: float,
    x_nodes: np.ndarray,
    level: Fraction,
    rtol: float,
    atol: float,
    blowup_threshold: float,
) -> np.ndarray:
    def blow_up(x, y):
        return blowup_threshold - abs(y[0])

    blow_up.terminal = True

    sol = solve_ivp(
        rhs,
        (0.0, x_end),
        [alpha],
        method="RK45",
        rtol=rtol,
        atol=atol,
        dense_output=True,
        events=blow_up,
    )
    if sol.status == 1:
        raise PoleDetectedError(float(sol.t_events[0][0]), level, blowup_threshold)
    if sol.status != 0:
        raise ToleranceFailureError(sol.message)
    return sol.sol(x_nodes)[0]


def solve_riccati(
    v_prev: SampledPotential,
    level: RationalLike,
    alpha: float = 0.0,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    blowup_threshold: float = DEFAULT_BLOWUP,
) -> Superpotential:
    """Integrate U' = 2*(V - E) - U^2 outward from U(0) = alpha.

    The potential is evaluated between nodes with a cubic spline.  alpha = 0
    with an even potential yields an odd U; that case integrates the right
    half only and mirrors it, so the resulting arrays are exactly symmetric.
    """
    level = as_fraction(level)
    _check_level_admissible(v_prev, level)
    grid = v_prev.grid
    e = float(level)
    vfun = CubicSpline(grid.x, v_prev.values)

    def rhs(x, y):
        u = y[0]
        return (2.0 * (float(vfun(x)) - e) - u * u,)

    c = grid.center_index
    x_right = grid.x[c:]
    right = _integrate_half(
        rhs, grid.half_width, alpha, x_right, level, rtol, atol, blowup_threshold
    )
    right[0] = alpha
    if alpha == 0.0 and v_prev.is_even():
        values = np.concatenate([-right[-1:0:-1], right])
    else:
        x_left = grid.x[: c + 1]
        left = _integrate_half(
            rhs, -grid.half_width, alpha, x_left, level, rtol, atol, blowup_threshold
        )
        left[-1] = alpha
        values = np.concatenate([left, right[1:]])
    return Superpotential(grid=grid, values=values, level=level, alpha=alpha)


def intertwine_step(
    v_prev: SampledPotential,
    level: RationalLike,
    alpha: float = 0.0,
    **solver_options,
) -> SampledPotential:
    """Partner potential V_new = U^2 - V + 2E carrying one extra level at E."""
    level = as_fraction(level)
    u = solve_riccati(v_prev, level, alpha=alpha, **solver_options)
    values = u.values**2 - v_prev.values + 2.0 * float(level)
    return v_prev.with_level(values, level)


def design_potential(
    v0: SampledPotential,
    add_levels: Sequence[RationalLike],
    alpha: float = 0.0,
    **solver_options,
) -> SampledPotential:
    """Iterate intertwine_step over `add_levels` (strictly descending).

    Every level must lie below the ground state of the running potential;
    a failing step raises DesignStepError naming the offending index.
    """
    levels = [as_fraction(e) for e in add_levels]
    for hi, lo in zip(levels, levels[1:]):
        if not lo < hi:
            raise LevelOrderError(f"add list must be strictly descending, got {hi} then {lo}")
    v = v0
    for i, e in enumerate(levels):
        try:
            v = intertwine_step(v, e, alpha=alpha, **solver_options)
        except IntertwineError as err:
            if isinstance(err, DesignStepError):
                raise
            raise DesignStepError(i, e, err) from err
    return v


def design_bottom_up(
    target: Sequence[RationalLike],
    base: SampledPotential,
    alpha: float = 0.0,
    **solver_options,
) -> SampledPotential:
    """Design with an ascending target list under a base lying above it.

    Identical to design_potential with the list reversed: the intertwining
    itself always works downward, so a bottom-to-top specification is simply
    added in reverse order beneath the (typically constant) base.
    """
    levels = [as_fraction(e) for e in target]
    return design_potential(base, levels[::-1], alpha=alpha, **solver_options)


def apply_intertwiner(
    u: Superpotential,
    psi: Wavefunction,
    sign: int = +1,
) -> Wavefunction:
    """Apply A = (sign * d/dx + U)/sqrt(2) via centered differences.

    sign=+1 annihilates the new ground state and maps excited states of the
    partner Hamiltonian onto same-energy states of the original; sign=-1 is
    its adjoint.  The result is not normalized.
    """
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    if psi.grid != u.grid:
        raise ValueError("wavefunction and superpotential live on different grids")
    dpsi = np.gradient(psi.amplitudes, u.grid.dx, edge_order=2)
    return Wavefunction(u.grid, (sign * dpsi + u.values * psi.amplitudes) / SQRT2)
