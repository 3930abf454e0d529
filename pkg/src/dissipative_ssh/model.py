"""Chain parameters and Hamiltonian matrices.

Site ordering is fixed everywhere as (A1, B1, A2, B2, ..., AN, BN), so site
``A_n`` has index ``2(n-1)`` and ``B_n`` has index ``2(n-1)+1``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import UnsupportedOnsite

ONSITE_KINDS = ("none", "uniform_loss", "staggered_gain_loss", "endpoints_only")


@dataclass(frozen=True)
class OnSitePotential:
    """Diagonal complex potential added on top of the coupling matrix.

    ``uniform_loss``: -i*strength on every site.
    ``staggered_gain_loss``: +i*strength on A sites, -i*strength on B sites.
    ``endpoints_only``: -i*strength on site 1, +i*strength on site 2N.
    """

    kind: str = "none"
    strength: float = 0.0

    def __post_init__(self):
        if self.kind not in ONSITE_KINDS:
            raise ValueError(f"unknown on-site kind {self.kind!r}")
        if not self.strength >= 0:
            raise ValueError("on-site strength must be nonnegative")

    def diagonal(self, n_cells: int) -> np.ndarray:
        d = np.zeros(2 * n_cells, dtype=np.complex128)
        g = self.strength
        if self.kind == "uniform_loss":
            d[:] = -1j * g
        elif self.kind == "staggered_gain_loss":
            d[0::2] = 1j * g
            d[1::2] = -1j * g
        elif self.kind == "endpoints_only":
            d[0] += -1j * g
            d[-1] += 1j * g
        return d


@dataclass(frozen=True)
class ChainParams:
    """Physical parameters of one chain configuration.

    Rates ``gamma1``, ``gamma2`` and ``tau`` are in the same units as ``t0``.
    ``omega`` is the qubit frequency; 0 means the rotating frame.
    """

    n_cells: int
    t0: float = 1.0
    phi: float = 0.0
    gamma1: float = 0.0
    gamma2: float = 0.0
    tau: float = 0.0
    omega: float = 0.0
    onsite: OnSitePotential = field(default_factory=OnSitePotential)

    def __post_init__(self):
        if int(self.n_cells) != self.n_cells or self.n_cells < 1:
            raise ValueError(f"n_cells must be a positive integer, got {self.n_cells}")
        if not self.t0 > 0:
            raise ValueError("t0 must be positive")
        for name in ("gamma1", "gamma2", "tau"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be nonnegative")
        for name in ("phi", "omega"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if not 0.0 <= self.phi <= math.pi + 1e-12:
            raise ValueError(f"phi must lie in [0, pi], got {self.phi}")

    def replace(self, **changes) -> "ChainParams":
        d = {f: getattr(self, f) for f in self.__dataclass_fields__}
        d.update(changes)
        return ChainParams(**d)

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Couplings:
    t_A: complex
    t_B: complex
    t_A_real: float
    t_B_real: float


def couplings(p: ChainParams) -> Couplings:
    """Intracell/intercell couplings, real parts t0(1 -+ cos phi)."""
    c = math.cos(p.phi)
    ta = p.t0 * (1.0 - c)
    tb = p.t0 * (1.0 + c)
    return Couplings(complex(ta, -p.gamma1), complex(tb, -p.gamma2), ta, tb)


def hopping_matrix(n_cells: int, t_intra: complex, t_inter: complex) -> np.ndarray:
    """Complex symmetric 2N x 2N matrix with alternating bonds, zero diagonal."""
    h = np.zeros((2 * n_cells, 2 * n_cells), dtype=np.complex128)
    i = np.arange(2 * n_cells - 1)
    bonds = np.where(i % 2 == 0, t_intra, t_inter)
    h[i, i + 1] = bonds
    h[i + 1, i] = bonds
    return h


def build_open_chain(p: ChainParams) -> np.ndarray:
    """Single-excitation matrix of the open chain with dissipative couplings."""
    c = couplings(p)
    h = hopping_matrix(p.n_cells, c.t_A, c.t_B)
    diag = p.onsite.diagonal(p.n_cells) + p.omega
    h[np.diag_indices_from(h)] += diag
    return h


def bloch_hamiltonian(p: ChainParams, k: float) -> np.ndarray:
    """2x2 Bloch matrix [[0, t_A + t_B e^{-ik}], [t_A + t_B e^{ik}, 0]]."""
    if p.onsite.kind != "none":
        raise UnsupportedOnsite("Bloch form needs a translation-invariant chain")
    c = couplings(p)
    return np.array(
        [[0.0, c.t_A + c.t_B * np.exp(-1j * k)],
         [c.t_A + c.t_B * np.exp(1j * k), 0.0]],
        dtype=np.complex128,
    )


def mirror_permutation(n_cells: int) -> np.ndarray:
    """Index map of the chain reflection A_n <-> B_{N+1-n}."""
    return np.arange(2 * n_cells)[::-1].copy()
