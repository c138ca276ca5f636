"""Giant atoms coupled to a 1D tight-binding lattice: bound states and dynamics."""

__version__ = "0.1.0"

from .model import SystemParams, channel_density, memory_kernel, spectral_density_j0, spectral_density_j1
from .spectrum import BoundState, SpectrumResult, full_spectrum
from .dynamics import (
    Trajectory, evolve_lattice, run_solver, solve_markov, solve_volterra, solve_ww, steady_state,
)
from .observables import concurrence, concurrence_series, reduced_density_matrix

__all__ = [
    "SystemParams", "channel_density", "memory_kernel", "spectral_density_j0",
    "spectral_density_j1", "BoundState", "SpectrumResult", "full_spectrum", "Trajectory",
    "evolve_lattice", "run_solver", "solve_markov", "solve_volterra", "solve_ww",
    "steady_state", "concurrence", "concurrence_series", "reduced_density_matrix",
]
