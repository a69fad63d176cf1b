"""Inverse spectral design of 1D potentials with perfect wavepacket revivals."""

from .spectra import (
    LevelSet,
    RevivalParams,
    alternating_gap_levels,
    biperiodic_levels,
    fibonacci_levels,
    harmonic_levels,
    prime_levels,
    reverse_biperiodic_levels,
    revival_params,
)
from .grids import (
    Grid,
    SampledPotential,
    Wavefunction,
    constant_potential,
    harmonic_potential,
    suggest_grid_constant_base,
    suggest_grid_harmonic_base,
)
from .intertwine import (
    DesignStepError,
    IntertwineError,
    PoleDetectedError,
    Superpotential,
    apply_intertwiner,
    design_bottom_up,
    design_potential,
    intertwine_step,
    solve_riccati,
)
from .eigensolve import (
    EigenPair,
    TridiagonalHamiltonian,
    VerificationReport,
    discretize,
    eigenstates,
    lowest_eigenvalues,
    verify_design,
)
from .evolve import (
    Carpet,
    SpectralDecomposition,
    autocorrelation,
    cosine_packet,
    decompose,
    gaussian_packet,
    project_to_bound,
    propagate_spectral,
    propagate_unitary,
    quantum_carpet,
)
from .multidim import (
    ProductState,
    SeparablePotential,
    combine,
    product_autocorrelation,
    product_levels,
)

__version__ = "0.1.0"

__all__ = [
    "LevelSet",
    "RevivalParams",
    "alternating_gap_levels",
    "biperiodic_levels",
    "fibonacci_levels",
    "harmonic_levels",
    "prime_levels",
    "reverse_biperiodic_levels",
    "revival_params",
    "Grid",
    "SampledPotential",
    "Wavefunction",
    "constant_potential",
    "harmonic_potential",
    "suggest_grid_constant_base",
    "suggest_grid_harmonic_base",
    "DesignStepError",
    "IntertwineError",
    "PoleDetectedError",
    "Superpotential",
    "apply_intertwiner",
    "design_bottom_up",
    "design_potential",
    "intertwine_step",
    "solve_riccati",
    "EigenPair",
    "TridiagonalHamiltonian",
    "VerificationReport",
    "discretize",
    "eigenstates",
    "lowest_eigenvalues",
    "verify_design",
    "Carpet",
    "SpectralDecomposition",
    "autocorrelation",
    "cosine_packet",
    "decompose",
    "gaussian_packet",
    "project_to_bound",
    "propagate_spectral",
    "propagate_unitary",
    "quantum_carpet",
    "ProductState",
    "SeparablePotential",
    "combine",
    "product_autocorrelation",
    "product_levels",
    "__version__",
]
