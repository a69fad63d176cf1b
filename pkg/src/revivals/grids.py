"""Uniform 1D grids, sampled potentials and wavefunctions.

All L2 inner products use trapezoid quadrature on the grid.  Grids always
have an odd number of points so x = 0 is a node: the intertwining solver
imposes its initial condition there.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Sequence

import numpy as np


@dataclass(frozen=True)
class Grid:
    """Uniform mesh x_k = -half_width + k*dx with an odd number of nodes."""

    half_width: float
    n_points: int

    def __post_init__(self) -> None:
        if self.half_width <= 0:
            raise ValueError("half_width must be positive")
        if self.n_points < 3 or self.n_points % 2 == 0:
            raise ValueError("n_points must be an odd integer >= 3")

    @property
    def dx(self) -> float:
        return 2.0 * self.half_width / (self.n_points - 1)

    @cached_property
    def x(self) -> np.ndarray:
        # mirrored construction keeps the mesh exactly antisymmetric, so even
        # potentials sample to exactly even arrays
        half = self.dx * np.arange(self.center_index + 1)
        x = np.concatenate([-half[:0:-1], half])
        x.flags.writeable = False
        return x

    @property
    def center_index(self) -> int:
        return self.n_points // 2

    def refined(self, factor: int = 2) -> "Grid":
        """Same interval with dx divided by `factor` (node count scales)."""
        return Grid(self.half_width, factor * (self.n_points - 1) + 1)


def trapezoid_weights(grid: Grid) -> np.ndarray:
    w = np.full(grid.n_points, grid.dx)
    w[0] = w[-1] = 0.5 * grid.dx
    return w


@dataclass(frozen=True, eq=False)
class SampledPotential:
    """Potential values on a grid plus the record of injected levels.

    ``injected_levels`` lists the exact rational levels added so far, in the
    order they were added, i.e. strictly decreasing.  ``base_tag`` names the
    starting potential ("harmonic" or "constant:<value>").
    """

    grid: Grid
    values: np.ndarray
    injected_levels: tuple[Fraction, ...] = ()
    base_tag: str = "custom"

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.n_points,):
            raise ValueError(f"values shape {values.shape} != ({self.grid.n_points},)")
        if not np.all(np.isfinite(values)):
            raise ValueError("potential values must be finite")
        for hi, lo in zip(self.injected_levels, self.injected_levels[1:]):
            if not lo < hi:
                raise ValueError("injected levels must be strictly decreasing")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    def with_level(self, values: np.ndarray, level: Fraction) -> "SampledPotential":
        return SampledPotential(
            grid=self.grid,
            values=values,
            injected_levels=self.injected_levels + (level,),
            base_tag=self.base_tag,
        )

    def is_even(self, tolerance: float = 0.0) -> bool:
        return bool(np.max(np.abs(self.values - self.values[::-1])) <= tolerance)

    def metadata(self, generated_by: str | None = None) -> dict:
        meta = {
            "base_tag": self.base_tag,
            "injected_levels": [f"{e.numerator}/{e.denominator}" for e in self.injected_levels],
            "grid": {"half_width": self.grid.half_width, "n_points": self.grid.n_points},
        }
        if generated_by is not None:
            meta["generated_by"] = generated_by
        return meta

    def to_csv(self) -> str:
        """`x,V` rows in full double precision (shortest round-trip repr)."""
        lines = ["x,V"]
        x = self.grid.x
        for k in range(self.grid.n_points):
            lines.append(f"{float(x[k])!r},{float(self.values[k])!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(
        cls,
        text: str,
        injected_levels: Sequence[Fraction] = (),
        base_tag: str = "custom",
    ) -> "SampledPotential":
        rows = [line for line in text.splitlines() if line.strip()]
        if not rows or rows[0].strip().lower() != "x,v":
            raise ValueError("potential CSV must start with an `x,V` header")
        data = np.array([[float(tok) for tok in row.split(",")] for row in rows[1:]])
        x, v = data[:, 0], data[:, 1]
        n = len(x)
        grid = Grid(half_width=float(x[-1]), n_points=n)
        if not np.allclose(grid.x, x, rtol=0.0, atol=1e-9 * max(1.0, grid.half_width)):
            raise ValueError("potential CSV nodes are not a uniform symmetric grid")
        return cls(grid=grid, values=v, injected_levels=tuple(injected_levels), base_tag=base_tag)


@dataclass(frozen=True, eq=False)
class Wavefunction:
    """Complex amplitudes on a grid."""

    grid: Grid
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.grid.n_points,):
            raise ValueError(f"amplitudes shape {amps.shape} != ({self.grid.n_points},)")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    def inner(self, other: "Wavefunction") -> complex:
        """Trapezoid <self|other>, conjugate-linear in self."""
        if other.grid != self.grid:
            raise ValueError("wavefunctions live on different grids")
        w = trapezoid_weights(self.grid)
        return complex(np.sum(w * np.conj(self.amplitudes) * other.amplitudes))

    def norm(self) -> float:
        w = trapezoid_weights(self.grid)
        return float(math.sqrt(np.sum(w * np.abs(self.amplitudes) ** 2)))

    def normalized(self) -> "Wavefunction":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero wavefunction")
        return Wavefunction(self.grid, self.amplitudes / n)

    def __add__(self, other: "Wavefunction") -> "Wavefunction":
        if other.grid != self.grid:
            raise ValueError("wavefunctions live on different grids")
        return Wavefunction(self.grid, self.amplitudes + other.amplitudes)

    def __mul__(self, scalar: complex) -> "Wavefunction":
        return Wavefunction(self.grid, self.amplitudes * scalar)

    __rmul__ = __mul__


def harmonic_potential(grid: Grid) -> SampledPotential:
    """V(x) = x**2 / 2."""
    return SampledPotential(grid=grid, values=0.5 * grid.x**2, base_tag="harmonic")


def constant_potential(grid: Grid, value: float) -> SampledPotential:
    return SampledPotential(
        grid=grid,
        values=np.full(grid.n_points, float(value)),
        base_tag=f"constant:{float(value)!r}",
    )


def metadata_to_json(meta: dict) -> str:
    return json.dumps(meta, indent=2, sort_keys=True) + "\n"


# Grid sizing.  Two error sources must stay below the eigenvalue tolerance a
# design is verified at:
#   * 3-point finite differences: error ~ <p^4> dx^2 / 24, bounded with
#     p_max^2 = 2*(E_top - V_min);
#   * the Dirichlet walls: eigenstates must decay before +-L, which needs
#     L well beyond the outermost classical turning point.
# Each intertwining step against a harmonic base lowers the potential tail
# by 1 (the superpotential slope tends to 1), so after m additions the top
# kept level E_top turns around at sqrt(2*(E_top + m)).

_DX_SAFETY = 3.0
_TAIL_FACTOR = 1.4
_TAIL_PAD = 2.0


def _dx_for_tolerance(eigen_tolerance: float, p_max_sq: float) -> float:
    return math.sqrt(24.0 * eigen_tolerance / _DX_SAFETY) / max(p_max_sq, 1.0)


def _odd_points(half_width: float, dx_target: float) -> int:
    n = int(math.ceil(2.0 * half_width / dx_target)) + 1
    return n if n % 2 == 1 else n + 1


def suggest_grid_harmonic_base(
    added_levels: Sequence[Fraction | float] = (),
    kept_top: float = 9.5,
    eigen_tolerance: float = 1e-4,
) -> Grid:
    """Grid for designs grown below a harmonic oscillator (or plain harmonic)."""
    added = sorted(float(e) for e in added_levels)
    m = len(added)
    if added:
        # mirror the first gap below the new ground state (next level up is
        # the harmonic ground 1/2 when only one level is added)
        above = added[1] if m > 1 else 0.5
        v_min = min(0.0, 2.0 * added[0] - above)
    else:
        v_min = 0.0
    turning = math.sqrt(2.0 * (kept_top + m))
    half_width = _TAIL_FACTOR * turning + _TAIL_PAD
    p_max_sq = 2.0 * (kept_top - v_min)
    dx = _dx_for_tolerance(eigen_tolerance, p_max_sq)
    return Grid(half_width=half_width, n_points=_odd_points(half_width, dx))


def suggest_grid_constant_base(
    levels: Sequence[Fraction | float],
    base_constant: float,
    eigen_tolerance: float = 1e-4,
) -> Grid:
    """Grid for designs grown bottom-up under a flat potential `base_constant`."""
    values = sorted(float(e) for e in levels)
    if values[-1] >= base_constant:
        raise ValueError("all levels must lie strictly below the base constant")
    e_top, e_min = values[-1], values[0]
    v_min = 2.0 * e_min - (values[1] if len(values) > 1 else base_constant)
    # WKB estimate of the half-width needed to hold len(values) levels, plus
    # room for the top state's evanescent tail under the flat base.
    core = math.pi * len(values) / math.sqrt(2.0 * (e_top - v_min))
    kappa = math.sqrt(2.0 * (base_constant - e_top))
    half_width = core + 16.0 / kappa + _TAIL_PAD
    p_max_sq = 2.0 * (e_top - v_min)
    dx = _dx_for_tolerance(eigen_tolerance, p_max_sq)
    return Grid(half_width=half_width, n_points=_odd_points(half_width, dx))
