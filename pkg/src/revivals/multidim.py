"""Separable products of 1D designs with a shared revival ladder.

A sum V(x_1, ..., x_n) = sum_k V_k(x_k) of designed potentials has energy
levels that are sums of the per-axis levels.  If all axes share a common
ladder spacing, every sum lands on that ladder too, so the product state
revives with period 2*pi/spacing.  Nothing is ever materialized on an n-D
grid: states, spectra and autocorrelations all factorize.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .evolve import SpectralDecomposition, autocorrelation
from .grids import SampledPotential
from .spectra import TWO_PI, LevelSet, fraction_gcd, revival_params


class IncommensurateLevelsError(Exception):
    """Component level sets do not admit a common positive ladder spacing."""


@dataclass(frozen=True, eq=False)
class SeparablePotential:
    """Per-axis potentials and level sets with a validated common spacing."""

    components: tuple[SampledPotential, ...]
    level_sets: tuple[LevelSet, ...]
    spacing: Fraction
    offsets: tuple[Fraction, ...]

    @property
    def revival_time(self) -> float:
        return TWO_PI / float(self.spacing)

    @property
    def total_offset(self) -> Fraction:
        return sum(self.offsets, Fraction(0))


def combine(
    components: Sequence[tuple[SampledPotential, LevelSet]],
) -> SeparablePotential:
    """Validate a product construction over >= 2 axes.

    The common spacing is the rational gcd of the per-axis ladder spacings
    (single-level axes impose no constraint).  Rational level sets are always
    commensurate; a zero or undefined gcd reports the offending pair.
    """
    if len(components) < 2:
        raise ValueError("a separable potential needs at least 2 axes")
    potentials = tuple(p for p, _ in components)
    level_sets = tuple(ls for _, ls in components)
    spacing = Fraction(0)
    constrained_axis: int | None = None
    for axis, levels in enumerate(level_sets):
        if len(levels) < 2:
            continue
        axis_spacing = revival_params(levels).spacing
        spacing = fraction_gcd(spacing, axis_spacing)
        if spacing <= 0:
            raise IncommensurateLevelsError(
                f"axes {constrained_axis} and {axis} admit no common level spacing"
            )
        constrained_axis = axis
    if spacing == 0:
        spacing = Fraction(1)  # all axes single-level; any ladder works
    offsets = tuple(levels[0] % spacing for levels in level_sets)
    return SeparablePotential(
        components=potentials,
        level_sets=level_sets,
        spacing=spacing,
        offsets=offsets,
    )


def product_levels(
    sep: SeparablePotential,
    counts: Sequence[int],
) -> list[tuple[tuple[int, ...], Fraction]]:
    """All sums of the first counts[k] levels per axis, as (multi-index, E).

    Sums may repeat (degeneracy does not affect revivals); the listing is in
    lexicographic multi-index order.
    """
    if len(counts) != len(sep.level_sets):
        raise ValueError("need one count per axis")
    ranges = []
    for count, levels in zip(counts, sep.level_sets):
        if not 1 <= count <= len(levels):
            raise ValueError(f"count {count} out of range for axis with {len(levels)} levels")
        ranges.append(range(count))
    out = []
    for multi_index in itertools.product(*ranges):
        energy = sum(
            (sep.level_sets[axis][k] for axis, k in enumerate(multi_index)),
            Fraction(0),
        )
        out.append((multi_index, energy))
    return out


def product_levels_to_csv(table: list[tuple[tuple[int, ...], Fraction]]) -> str:
    if not table:
        return ""
    n_axes = len(table[0][0])
    lines = [",".join(f"k{i + 1}" for i in range(n_axes)) + ",energy"]
    for multi_index, energy in table:
        lines.append(",".join(str(k) for k in multi_index) + f",{float(energy)!r}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True, eq=False)
class ProductState:
    """A separable wavepacket: one bound-basis decomposition per axis."""

    factors: tuple[SpectralDecomposition, ...]

    def __post_init__(self) -> None:
        if len(self.factors) < 2:
            raise ValueError("a product state needs at least 2 factors")


def product_autocorrelation(
    state: ProductState,
    times: Sequence[float],
    energies_per_axis: Sequence[Sequence[float] | None] | None = None,
) -> np.ndarray:
    """A(t) = product over axes of the per-axis autocorrelations."""
    if energies_per_axis is None:
        energies_per_axis = [None] * len(state.factors)
    if len(energies_per_axis) != len(state.factors):
        raise ValueError("need one energy override (or None) per axis")
    t = np.asarray(times, dtype=float)
    result = np.ones(t.shape, dtype=complex)
    for factor, energies in zip(state.factors, energies_per_axis):
        result *= autocorrelation(factor, t, energies=energies)
    return result
