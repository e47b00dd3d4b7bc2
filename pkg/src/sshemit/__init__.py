"""Linewidth narrowing of single-photon emission from noisy emitter chains.

A chain of two-level emitters with staggered hoppings J, J' and
time-correlated Gaussian onsite noise emits, from its edge site, a photon
whose spectral line narrows dramatically near the hopping-balance point
J = J'.  The package simulates this at desk scale along with the matching
single-emitter self-energy theory, frozen-disorder eigenvalue statistics,
and continuum estimates of achievable hopping amplitudes in micropillar
geometries.
"""

from .constants import HBAR_MEV_PS, KINETIC_MEV_NM2
from .dynamics import (
    EmissionRecord,
    EvolutionConfig,
    FitError,
    LorentzianFit,
    SweepRow,
    correlation,
    energy_grid,
    fit_lorentzian,
    fwhm_direct,
    propagate,
    run_emission,
    spectral_width_iqr,
    spectrum,
    sweep,
    window_floor_fwhm,
)
from .dyson import (
    SelfEnergy,
    lorentzian_spectrum,
    self_energy_lowest_order,
    self_energy_self_consistent,
)
from .lattice import (
    BandStructure,
    ChainParams,
    EdgeMode,
    band_structure,
    build_hamiltonian,
    edge_mode,
    winding_number,
)
from .micropillar import (
    MATERIAL_LINEWIDTHS,
    CavityParams,
    HoppingEstimate,
    PillarGeometry,
    solve_cavity_coupled,
    solve_double_well,
    sweep_pillars,
)
from .noise import (
    NoiseParams,
    NoiseTrajectory,
    autocovariance,
    sample_trajectories,
    spectral_density,
    trajectory,
)
from .quasistatic import (
    DisorderEnsemble,
    DosHistogram,
    EdgeEigStats,
    dos_map,
    edge_eigenvalue_stats,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
