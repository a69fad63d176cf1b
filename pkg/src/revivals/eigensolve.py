"""Independent spectrum verification by finite-difference diagonalization.

The designed potentials are checked against their target levels with a
3-point discretization of H = -(1/2) d^2/dx^2 + V on the grid interior
(Dirichlet walls at the boundary nodes).  Eigenvalues come from Sturm
bisection on the symmetric tridiagonal matrix, eigenvectors from inverse
iteration; both are deterministic and extract only the lowest k slots.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.linalg import eig_banded, eigh_tridiagonal

from .grids import Grid, SampledPotential, Wavefunction
from .spectra import LevelSet

DEGENERACY_GAP = 1e-10
RESIDUAL_TOLERANCE = 1e-8


class EigensolveError(Exception):
    pass


@dataclass(frozen=True, eq=False)
class TridiagonalHamiltonian:
    """Symmetric tridiagonal H over the interior nodes of a grid."""

    grid: Grid
    diagonal: np.ndarray
    off_diagonal: np.ndarray

    def __post_init__(self) -> None:
        n_int = self.grid.n_points - 2
        if self.diagonal.shape != (n_int,) or self.off_diagonal.shape != (n_int - 1,):
            raise ValueError("tridiagonal arrays do not match the grid interior")

    def apply(self, interior: np.ndarray) -> np.ndarray:
        out = self.diagonal * interior
        out[:-1] += self.off_diagonal * interior[1:]
        out[1:] += self.off_diagonal * interior[:-1]
        return out


@dataclass(frozen=True, eq=False)
class EigenPair:
    """A bound level and its trapezoid-normalized eigenstate."""

    energy: float
    state: Wavefunction


@dataclass(frozen=True, eq=False)
class VerificationReport:
    """Computed-versus-target level comparison for a designed potential."""

    target_levels: tuple[Fraction, ...]
    computed: np.ndarray
    tolerance: float

    @property
    def errors(self) -> np.ndarray:
        return np.abs(self.computed - np.array([float(e) for e in self.target_levels]))

    @property
    def max_error(self) -> float:
        return float(np.max(self.errors))

    @property
    def passed(self) -> bool:
        return self.max_error <= self.tolerance

    def to_csv(self) -> str:
        lines = ["index,target,computed,abs_error"]
        errors = self.errors
        for i, (target, value) in enumerate(zip(self.target_levels, self.computed)):
            lines.append(f"{i},{float(target)!r},{float(value)!r},{float(errors[i])!r}")
        status = "pass" if self.passed else "fail"
        lines.append(f"# max_error={self.max_error!r},tolerance={self.tolerance!r},status={status}")
        return "\n".join(lines) + "\n"


def discretize(v: SampledPotential) -> TridiagonalHamiltonian:
    """3-point Laplacian with Dirichlet boundaries at +-half_width."""
    dx2 = v.grid.dx**2
    diagonal = 1.0 / dx2 + v.values[1:-1]
    off = np.full(v.grid.n_points - 3, -0.5 / dx2)
    return TridiagonalHamiltonian(grid=v.grid, diagonal=diagonal, off_diagonal=off)


def lowest_eigenvalues(h: TridiagonalHamiltonian, k: int) -> np.ndarray:
    """k smallest eigenvalues, ascending, via Sturm-sequence bisection."""
    n_int = len(h.diagonal)
    if not 1 <= k <= n_int:
        raise ValueError(f"k must be in 1..{n_int}")
    try:
        return eigh_tridiagonal(
            h.diagonal,
            h.off_diagonal,
            eigvals_only=True,
            select="i",
            select_range=(0, k - 1),
            lapack_driver="stebz",
        )
    except np.linalg.LinAlgError as err:
        raise EigensolveError(f"bisection failed: {err}") from err


def eigenstates(h: TridiagonalHamiltonian, k: int) -> list[EigenPair]:
    """Lowest k eigenpairs; states are normalized under trapezoid quadrature.

    Residuals ||H psi - E psi|| are checked against RESIDUAL_TOLERANCE, and
    adjacent eigenvalues closer than DEGENERACY_GAP trigger a warning (1D
    bound spectra should never be degenerate).
    """
    n_int = len(h.diagonal)
    if not 1 <= k <= n_int:
        raise ValueError(f"k must be in 1..{n_int}")
    try:
        energies, vectors = eigh_tridiagonal(
            h.diagonal,
            h.off_diagonal,
            select="i",
            select_range=(0, k - 1),
            lapack_driver="stebz",
        )
    except np.linalg.LinAlgError as err:
        raise EigensolveError(f"eigenpair extraction failed: {err}") from err
    if k > 1 and np.min(np.diff(energies)) < DEGENERACY_GAP:
        warnings.warn("near-degenerate eigenvalue cluster detected", stacklevel=2)
    pairs = []
    sqrt_dx = np.sqrt(h.grid.dx)
    for j in range(k):
        vec = vectors[:, j]
        residual = float(np.linalg.norm(h.apply(vec.copy()) - energies[j] * vec))
        if residual > RESIDUAL_TOLERANCE:
            raise EigensolveError(
                f"eigenpair {j} residual {residual:.3e} exceeds {RESIDUAL_TOLERANCE:.1e}"
            )
        full = np.zeros(h.grid.n_points, dtype=complex)
        full[1:-1] = vec / sqrt_dx
        pairs.append(EigenPair(energy=float(energies[j]), state=Wavefunction(h.grid, full)))
    return pairs


def lowest_eigenvalues_fourth_order(v: SampledPotential, k: int) -> np.ndarray:
    """5-point (fourth-order) variant for tight tolerances on coarse grids."""
    n_int = v.grid.n_points - 2
    if not 1 <= k <= n_int:
        raise ValueError(f"k must be in 1..{n_int}")
    dx2 = v.grid.dx**2
    band = np.zeros((3, n_int))
    band[0, 2:] = 1.0 / (24.0 * dx2)
    band[1, 1:] = -2.0 / (3.0 * dx2)
    band[2, :] = 5.0 / (4.0 * dx2) + v.values[1:-1]
    return eig_banded(
        band,
        lower=False,
        eigvals_only=True,
        select="i",
        select_range=(0, k - 1),
    )


def boundary_sensitivity(state: Wavefunction) -> float:
    """Relative weight at the first interior nodes: large means box-dependent.

    States of the continuum (above a flat base) have no business being
    compared against target levels; this flags them.
    """
    amps = np.abs(state.amplitudes)
    peak = float(np.max(amps))
    return float(max(amps[1], amps[-2]) / peak) if peak > 0 else 0.0


def verify_design(
    v: SampledPotential,
    target: LevelSet | Sequence[Fraction],
    tolerance: float = 1e-4,
    fourth_order: bool = False,
) -> VerificationReport:
    """Compare the lowest len(target) computed levels against the target."""
    levels = tuple(target.levels if isinstance(target, LevelSet) else target)
    k = len(levels)
    if k > v.grid.n_points - 2:
        raise ValueError("more target levels than interior grid nodes")
    if fourth_order:
        computed = lowest_eigenvalues_fourth_order(v, k)
    else:
        computed = lowest_eigenvalues(discretize(v), k)
    return VerificationReport(target_levels=levels, computed=computed, tolerance=float(tolerance))
