"""Wavepacket construction, propagation, autocorrelation and quantum carpets.

A packet is expanded over computed bound eigenstates; each component then
just rotates with phase exp(-i E t).  Content outside the retained bound
basis is tracked as a residual and excluded from propagation (revivals are
a property of the discrete spectrum only).  A Crank-Nicolson propagator on
the same tridiagonal Hamiltonian provides an independent cross-check that
never sees the eigenbasis.
"""

from __future__ import annotations

import struct
import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy.linalg import lapack

from .eigensolve import EigenPair, TridiagonalHamiltonian, discretize
from .grids import Grid, SampledPotential, Wavefunction, trapezoid_weights

RESIDUAL_WARNING = 0.5


def gaussian_packet(grid: Grid, center: float, momentum: float, width: float) -> Wavefunction:
    """Normalized Gaussian exp(-(x-center)^2/(4 width^2) + i momentum x)."""
    if width <= 0:
        raise ValueError("width must be positive")
    x = grid.x
    amps = np.exp(-((x - center) ** 2) / (4.0 * width**2) + 1j * momentum * x)
    return Wavefunction(grid, amps).normalized()


def cosine_packet(grid: Grid, window: tuple[float, float] | None = None) -> Wavefunction:
    """Normalized shifted-cosine bump (1 + cos)/2 supported on `window`.

    The profile oscillates between 0 and 1, peaking at the window center and
    vanishing smoothly at the window edges; outside it is exactly zero.
    Default window is the full grid.
    """
    lo, hi = window if window is not None else (-grid.half_width, grid.half_width)
    if not lo < hi:
        raise ValueError("window must satisfy lo < hi")
    x = grid.x
    inside = (x >= lo) & (x <= hi)
    amps = np.zeros(grid.n_points, dtype=complex)
    amps[inside] = 0.5 * (1.0 + np.cos(2.0 * np.pi * (x[inside] - 0.5 * (lo + hi)) / (hi - lo)))
    return Wavefunction(grid, amps).normalized()


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Coefficients of a packet over a retained bound eigenbasis."""

    basis: tuple[EigenPair, ...]
    coefficients: np.ndarray
    residual_norm: float

    def __post_init__(self) -> None:
        coeffs = np.asarray(self.coefficients, dtype=complex)
        if coeffs.shape != (len(self.basis),):
            raise ValueError("coefficient count does not match basis size")
        coeffs.flags.writeable = False
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def pairs(self) -> tuple[tuple[EigenPair, complex], ...]:
        return tuple(zip(self.basis, (complex(c) for c in self.coefficients)))

    @property
    def grid(self) -> Grid:
        return self.basis[0].state.grid

    @cached_property
    def energies(self) -> np.ndarray:
        return np.array([pair.energy for pair in self.basis])

    @cached_property
    def state_matrix(self) -> np.ndarray:
        return np.stack([pair.state.amplitudes for pair in self.basis])

    def restricted(self, indices: Sequence[int], renormalize: bool = True) -> "SpectralDecomposition":
        """Sub-decomposition keeping only the given basis slots."""
        idx = list(indices)
        coeffs = self.coefficients[idx]
        if renormalize:
            scale = np.linalg.norm(coeffs)
            if scale == 0.0:
                raise ValueError("restriction removed all weight")
            coeffs = coeffs / scale
        return SpectralDecomposition(
            basis=tuple(self.basis[i] for i in idx),
            coefficients=coeffs,
            residual_norm=0.0 if renormalize else self.residual_norm,
        )


def decompose(psi: Wavefunction, basis: Sequence[EigenPair]) -> SpectralDecomposition:
    """Project onto the eigenbasis; the residual is the weight left outside."""
    if not basis:
        raise ValueError("basis must be nonempty")
    grid = basis[0].state.grid
    if psi.grid != grid:
        raise ValueError("packet and basis live on different grids")
    w = trapezoid_weights(grid)
    states = np.stack([pair.state.amplitudes for pair in basis])
    coeffs = states.conj() @ (w * psi.amplitudes)
    captured = float(np.sum(np.abs(coeffs) ** 2))
    residual_sq = max(psi.norm() ** 2 - captured, 0.0)
    return SpectralDecomposition(
        basis=tuple(basis),
        coefficients=coeffs,
        residual_norm=float(np.sqrt(residual_sq)),
    )


def project_to_bound(decomposition: SpectralDecomposition) -> Wavefunction:
    """Reassemble the retained bound content, renormalized.

    Warns when the residual says the input was mostly outside the basis.
    """
    if decomposition.residual_norm >= RESIDUAL_WARNING:
        warnings.warn(
            f"residual norm {decomposition.residual_norm:.3f}: initial state is "
            "mostly outside the retained bound basis",
            stacklevel=2,
        )
    amps = decomposition.coefficients @ decomposition.state_matrix
    return Wavefunction(decomposition.grid, amps).normalized()


def _phases(energies: np.ndarray, t: float) -> np.ndarray:
    return np.exp(-1j * energies * t)


def _resolve_energies(
    decomposition: SpectralDecomposition, energies: Sequence[float] | None
) -> np.ndarray:
    if energies is None:
        return decomposition.energies
    values = np.array([float(e) for e in energies], dtype=float)
    if values.shape != decomposition.energies.shape:
        raise ValueError("override energies must match the basis size")
    return values


def propagate_spectral(
    decomposition: SpectralDecomposition,
    t: float,
    energies: Sequence[float] | None = None,
) -> Wavefunction:
    """Sum of c_n exp(-i E_n t) psi_n.

    By default E_n are the computed eigenvalues; passing `energies`
    substitutes e.g. the exact designed levels, which isolates the ladder
    arithmetic from discretization error.
    """
    e = _resolve_energies(decomposition, energies)
    amps = (decomposition.coefficients * _phases(e, t)) @ decomposition.state_matrix
    return Wavefunction(decomposition.grid, amps)


def autocorrelation(
    decomposition: SpectralDecomposition,
    times: Sequence[float],
    energies: Sequence[float] | None = None,
) -> np.ndarray:
    """A(t) = sum |c_n|^2 exp(-i E_n t); residual content is excluded."""
    e = _resolve_energies(decomposition, energies)
    weights = np.abs(decomposition.coefficients) ** 2
    t = np.asarray(times, dtype=float)
    return np.exp(-1j * np.outer(t, e)) @ weights


def propagate_unitary(
    psi: Wavefunction,
    v: SampledPotential,
    t_final: float,
    n_steps: int,
) -> Wavefunction:
    """Crank-Nicolson evolution on the tridiagonal H (exactly unitary).

    (1 + i dt/2 H) psi_{k+1} = (1 - i dt/2 H) psi_k; the constant tridiagonal
    system is LU-factored once and back-substituted every step.
    """
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    if psi.grid != v.grid:
        raise ValueError("packet and potential live on different grids")
    h = discretize(v)
    dt = float(t_final) / n_steps
    z = 0.5j * dt
    diag = 1.0 + z * h.diagonal
    lower = z * h.off_diagonal
    dl, d, du, du2, ipiv, info = lapack.zgttrf(lower, diag, lower)
    if info != 0:
        raise np.linalg.LinAlgError(f"zgttrf failed with info={info}")
    interior = psi.amplitudes[1:-1].astype(complex)
    for _ in range(n_steps):
        rhs = interior - z * h.apply(interior)
        interior, info = lapack.zgttrs(dl, d, du, du2, ipiv, rhs)
        if info != 0:
            raise np.linalg.LinAlgError(f"zgttrs failed with info={info}")
    out = np.zeros(psi.grid.n_points, dtype=complex)
    out[1:-1] = interior
    return Wavefunction(psi.grid, out)


@dataclass(frozen=True, eq=False)
class Carpet:
    """|psi(x, t)| raster (rows = times) plus the autocorrelation series."""

    times: np.ndarray
    magnitudes: np.ndarray
    autocorrelation: np.ndarray
    residual_norm: float = 0.0

    def __post_init__(self) -> None:
        if self.magnitudes.shape != (len(self.times), self.magnitudes.shape[1]):
            raise ValueError("magnitude raster does not match the time axis")
        if self.autocorrelation.shape != self.times.shape:
            raise ValueError("autocorrelation does not match the time axis")


def quantum_carpet(
    decomposition: SpectralDecomposition,
    t_max: float,
    n_times: int = 512,
    energies: Sequence[float] | None = None,
) -> Carpet:
    """Raster of |psi| over n_times rows equally spaced on [0, t_max]."""
    if n_times < 2:
        raise ValueError("n_times must be >= 2")
    e = _resolve_energies(decomposition, energies)
    times = np.linspace(0.0, float(t_max), n_times)
    phases = np.exp(-1j * np.outer(times, e))
    amplitudes = (phases * decomposition.coefficients) @ decomposition.state_matrix
    magnitudes = np.abs(amplitudes)
    weights = np.abs(decomposition.coefficients) ** 2
    autocorr = phases @ weights
    return Carpet(
        times=times,
        magnitudes=magnitudes,
        autocorrelation=autocorr,
        residual_norm=decomposition.residual_norm,
    )


def carpet_to_pgm(carpet: Carpet) -> bytes:
    """16-bit binary PGM of the magnitude raster.

    Pixel value = round(65535 * |psi| / max|psi|), stored big-endian per the
    netpbm P5 convention; renderers map larger values to darker ink.
    """
    mags = carpet.magnitudes
    peak = float(np.max(mags))
    scale = 65535.0 / peak if peak > 0 else 0.0
    pixels = np.rint(mags * scale).astype(">u2")
    height, width = pixels.shape
    header = f"P5\n{width} {height}\n65535\n".encode("ascii")
    return header + pixels.tobytes()


def autocorrelation_to_csv(times: np.ndarray, values: np.ndarray) -> str:
    lines = ["t,re,im,abs"]
    for t, a in zip(times, values):
        lines.append(f"{float(t)!r},{float(a.real)!r},{float(a.imag)!r},{float(abs(a))!r}")
    return "\n".join(lines) + "\n"
