"""Shared fixtures: the expensive designed potentials are built once."""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import pytest

import revivals as rv
from revivals.eigensolve import EigenPair
from revivals.evolve import SpectralDecomposition
from revivals.grids import Grid, SampledPotential

# Frozen benchmark packet for the biperiodic carpets: a strong component in
# the outer (slow) region plus a weaker, kicked component in the deep well.
BENCH_PACKET = (
    {"center": 6.0, "momentum": 0.0, "width": 1.0, "amplitude": 1.0},
    {"center": 0.0, "momentum": 3.0, "width": 0.5, "amplitude": 0.55},
)


@dataclass(frozen=True)
class DesignCase:
    level_set: rv.LevelSet
    added_desc: tuple[Fraction, ...]
    grid: Grid
    potential: SampledPotential
    design_seconds: float
    base_constant: Fraction | None = None


def _two_gaussian_packet(grid: Grid) -> rv.Wavefunction:
    total = None
    for comp in BENCH_PACKET:
        part = comp["amplitude"] * rv.gaussian_packet(
            grid, comp["center"], comp["momentum"], comp["width"]
        )
        total = part if total is None else total + part
    return total.normalized()


@pytest.fixture(scope="session")
def biperiodic_case() -> DesignCase:
    """Desk-scale biperiodic design: 25 levels -1..-49 under the oscillator."""
    level_set = rv.biperiodic_levels(25, harmonic_count=10)
    added = tuple(sorted((e for e in level_set if e < 0), reverse=True))
    grid = rv.suggest_grid_harmonic_base(added, kept_top=9.5, eigen_tolerance=1e-3)
    base = rv.harmonic_potential(grid)
    start = time.perf_counter()
    potential = rv.design_potential(base, added)
    elapsed = time.perf_counter() - start
    return DesignCase(level_set, added, grid, potential, elapsed)


@pytest.fixture(scope="session")
def biperiodic_pairs(biperiodic_case) -> list[EigenPair]:
    k = len(biperiodic_case.level_set)
    return rv.eigenstates(rv.discretize(biperiodic_case.potential), k)


@pytest.fixture(scope="session")
def biperiodic_packet(biperiodic_case, biperiodic_pairs) -> SpectralDecomposition:
    """Bound-projected benchmark packet in the biperiodic design."""
    raw = _two_gaussian_packet(biperiodic_case.grid)
    projected = rv.project_to_bound(rv.decompose(raw, biperiodic_pairs))
    return rv.decompose(projected, biperiodic_pairs)


@pytest.fixture(scope="session")
def mini_biperiodic_case() -> DesignCase:
    """Small biperiodic design (5 added levels) for cheap invariant tests."""
    level_set = rv.biperiodic_levels(5, harmonic_count=6)
    added = tuple(sorted((e for e in level_set if e < 0), reverse=True))
    grid = rv.suggest_grid_harmonic_base(added, kept_top=5.5, eigen_tolerance=1e-3)
    base = rv.harmonic_potential(grid)
    start = time.perf_counter()
    potential = rv.design_potential(base, added)
    elapsed = time.perf_counter() - start
    return DesignCase(level_set, added, grid, potential, elapsed)


@pytest.fixture(scope="session")
def mini_biperiodic_pairs(mini_biperiodic_case) -> list[EigenPair]:
    k = len(mini_biperiodic_case.level_set)
    return rv.eigenstates(rv.discretize(mini_biperiodic_case.potential), k)


@pytest.fixture(scope="session")
def prime15_case() -> DesignCase:
    """Prime spectrum at desk scale: 15 primes under the flat base 53."""
    level_set, base_constant = rv.prime_levels(15)
    grid = rv.suggest_grid_constant_base(level_set, float(base_constant), eigen_tolerance=1e-3)
    base = rv.constant_potential(grid, float(base_constant))
    start = time.perf_counter()
    potential = rv.design_bottom_up(list(level_set), base)
    elapsed = time.perf_counter() - start
    return DesignCase(
        level_set,
        tuple(sorted(level_set, reverse=True)),
        grid,
        potential,
        elapsed,
        base_constant=base_constant,
    )


@pytest.fixture(scope="session")
def harmonic_mini_pairs() -> list[EigenPair]:
    """Cheap harmonic eigenbasis for packet/propagation unit tests."""
    grid = Grid(8.0, 1601)
    pairs = rv.eigenstates(rv.discretize(rv.harmonic_potential(grid)), 12)
    return pairs
