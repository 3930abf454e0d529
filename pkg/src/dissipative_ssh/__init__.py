"""Non-Hermitian SSH chain with dissipative (common-bath) couplings."""

__version__ = "0.1.0"

from .model import ChainParams, Couplings, OnSitePotential, build_open_chain, bloch_hamiltonian, couplings
from .linalg import EigenDecomposition, eig, eigvals, evolve, solve
from .topology import classify_phase, dispersion, winding_number
from .edge import analyze_edges, analytic_edge_constants, analytic_splitting, oscillation_sweep
from .dynamics import adiabatic_edge_coupling, build_liouvillian, evolve_single_excitation

__all__ = [
    "ChainParams", "Couplings", "OnSitePotential", "build_open_chain", "bloch_hamiltonian",
    "couplings", "EigenDecomposition", "eig", "eigvals", "evolve", "solve",
    "classify_phase", "dispersion", "winding_number", "analyze_edges",
    "analytic_edge_constants", "analytic_splitting", "oscillation_sweep",
    "adiabatic_edge_coupling", "build_liouvillian", "evolve_single_excitation",
]
