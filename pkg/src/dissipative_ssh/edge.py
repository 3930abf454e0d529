"""Hybridized edge states of the finite chain and their analytic comparators.

The two edge states of a finite chain in the topological phase hybridize into
a mirror-even and a mirror-odd combination.  ``E_plus`` always denotes the
eigenvalue of the mirror-even state (the symmetric combination of the left
and right edge states) and ``E_minus`` the mirror-odd one.  With this labeling
Re(E_plus) changes sign as the splitting oscillates.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np

from . import linalg
from .errors import DegenerateCoupling, NoEdgePair, NumericalError
from .linalg import EigenDecomposition
from .model import ChainParams, build_open_chain, couplings, mirror_permutation


@dataclass(frozen=True)
class EdgeStateAnalysis:
    E_plus: complex
    E_minus: complex
    delta_E: complex
    profile_plus: np.ndarray
    A_T: float
    theta_T: float
    xi_T: complex
    zeta: complex
    N_T: int
    index_plus: int
    index_minus: int

    @property
    def delta_E_by_energy(self) -> complex:
        """Splitting with the pair ordered by real part instead of parity (Re >= 0)."""
        hi, lo = (self.E_plus, self.E_minus) if self.E_plus.real >= self.E_minus.real \
            else (self.E_minus, self.E_plus)
        return hi - lo


class AnalyticSplitting(NamedTuple):
    E_plus: complex
    E_minus: complex
    delta_E: complex
    zeta: complex


def analytic_edge_constants(p: ChainParams) -> tuple[float, float, complex]:
    """Return (A_T, theta_T, xi_T) for the coupling ratio t_B / t_A.

    A_T = |t_B / t_A|, theta_T = Arg(t_B / t_A) in (-pi, pi] and
    xi_T = 1 / (ln A_T + i theta_T).
    """
    c = couplings(p)
    if c.t_A == 0:
        raise DegenerateCoupling("t_A = 0: perfectly dimerized chain, A_T is infinite")
    if c.t_B == 0:
        raise DegenerateCoupling("t_B = 0: intercell coupling vanishes, A_T = 0")
    ratio = c.t_B / c.t_A
    a_t = abs(ratio)
    theta = math.atan2(ratio.imag, ratio.real)
    if theta == -math.pi:
        theta = math.pi
    denom = complex(math.log(a_t), theta)
    xi = 1.0 / denom if denom != 0 else complex(math.inf, 0.0)
    return a_t, theta, xi


def biorthogonal_norm_product(q: complex, n_cells: int) -> complex:
    """N_L^* N_R from sum_{n=1}^{N} q^n = 1 / (N_L^* N_R)."""
    s = np.sum(q ** np.arange(1, n_cells + 1, dtype=float))
    return 1.0 / complex(s)


def analytic_splitting(p: ChainParams) -> AnalyticSplitting:
    """Closed-form hybridized edge energies of an N-cell chain.

    E_+ = N_L^* N_R t_A^{N+2} / (-t_B)^{N+1} with E_- = -E_+, evaluated as
    (-1)^{N+1} t_A (t_A/t_B)^{N+1} to avoid overflow.  zeta is the prefactor
    with E_+ = zeta exp(-(N-1)/xi_T).
    """
    if p.n_cells < 2:
        raise ValueError("analytic splitting needs N >= 2")
    analytic_edge_constants(p)  # raises on degenerate couplings
    c = couplings(p)
    n = p.n_cells
    r = c.t_A / c.t_B
    norm = biorthogonal_norm_product(r * r, n)
    sign = -1.0 if (n + 1) % 2 else 1.0
    e_plus = complex(norm * sign * c.t_A * r ** (n + 1))
    zeta = complex(norm * sign * c.t_A * r * r)
    return AnalyticSplitting(e_plus, -e_plus, 2.0 * e_plus, zeta)


def _outer_weight(v: np.ndarray, n_cells: int, outer_fraction: float) -> float:
    w = np.abs(v) ** 2
    per_cell = w[0::2] + w[1::2]
    m = max(1, math.ceil(outer_fraction * n_cells))
    if 2 * m >= n_cells:
        return 1.0
    return float((per_cell[:m].sum() + per_cell[-m:].sum()) / per_cell.sum())


def mirror_parity(v: np.ndarray) -> float:
    """Re <v|P|v> / <v|v> for the chain reflection P."""
    pv = v[mirror_permutation(len(v) // 2)]
    return float(np.real(np.vdot(v, pv)) / np.real(np.vdot(v, v)))


def find_edge_pair(h, decomp: EigenDecomposition, center: complex = 0.0,
                   min_weight: float = 0.6, outer_fraction: float = 0.25) -> tuple[int, int]:
    """Indices (plus, minus) of the hybridized edge pair.

    Picks the two eigenvalues nearest ``center`` (omega plus any uniform
    on-site shift) and requires each eigenvector to carry at least
    ``min_weight`` of its |psi|^2 in the outer ``outer_fraction`` of cells at
    either end.  The mirror-even state is returned first.
    """
    dim = np.shape(h)[0]
    if dim < 4 or dim % 2:
        raise ValueError("edge pair needs an even dimension 2N >= 4")
    n_cells = dim // 2
    vals = decomp.eigenvalues
    order = np.argsort(np.abs(vals - center), kind="stable")
    i, j = int(order[0]), int(order[1])
    for idx in (i, j):
        wgt = _outer_weight(decomp.right[:, idx], n_cells, outer_fraction)
        if wgt < min_weight:
            raise NoEdgePair(f"state {idx} has only {wgt:.2f} weight at the edges")
    if mirror_parity(decomp.right[:, j]) > mirror_parity(decomp.right[:, i]):
        i, j = j, i
    return i, j


def localization_profile(decomp: EigenDecomposition, state_index: int,
                         n_cells: int) -> np.ndarray:
    """Per-cell biorthogonal weights <psi_L|Pi_n|psi_R>, n = 1..N (sum = 1)."""
    v = decomp.right[:, state_index]
    w = decomp.left[:, state_index]
    site = np.conj(w) * v
    p = site[0::2] + site[1::2]
    return p[:n_cells] / np.sum(p)


def edge_profiles(decomp: EigenDecomposition, pair: tuple[int, int],
                  n_cells: int) -> tuple[np.ndarray, np.ndarray]:
    """Profiles of the de-hybridized left and right edge states.

    The pair is rescaled so both right vectors agree on the largest left-half
    amplitude; their sum and difference then localize on the left and right
    ends and remain biorthonormal to the matching left-vector combinations.
    """
    ip, im = pair
    vp, vm = decomp.right[:, ip], decomp.right[:, im]
    wp, wm = decomp.left[:, ip], decomp.left[:, im]
    s0 = int(np.argmax(np.abs(vp[:n_cells])))
    cp, cm = 1.0 / vp[s0], 1.0 / vm[s0]
    vp, wp = vp * cp, wp / np.conj(cp)
    vm, wm = vm * cm, wm / np.conj(cm)

    def _profile(u, y):
        site = np.conj(y) * u
        return site[0::2] + site[1::2]

    left = _profile(0.5 * (vp + vm), wp + wm)
    right = _profile(0.5 * (vp - vm), wp - wm)
    return left, right


def _center(p: ChainParams) -> complex:
    c = complex(p.omega)
    if p.onsite.kind == "uniform_loss":
        c -= 1j * p.onsite.strength
    return c


def decompose_chain(p: ChainParams) -> tuple[np.ndarray, EigenDecomposition]:
    h = build_open_chain(p)
    mode = "transpose" if np.array_equal(h, h.T) else "adjoint"
    return h, linalg.eig(h, left=mode)


def analyze_edges(p: ChainParams, min_weight: float = 0.6,
                  outer_fraction: float = 0.25) -> EdgeStateAnalysis:
    """Numerical edge pair of the open chain with its analytic comparators.

    Energies are reported relative to ``omega`` and any uniform on-site shift.
    """
    h, dec = decompose_chain(p)
    center = _center(p)
    ip, im = find_edge_pair(h, dec, center, min_weight, outer_fraction)
    e_p = complex(dec.eigenvalues[ip] - center)
    e_m = complex(dec.eigenvalues[im] - center)
    profile = localization_profile(dec, ip, p.n_cells)
    try:
        a_t, theta, xi = analytic_edge_constants(p)
        zeta = analytic_splitting(p).zeta
    except DegenerateCoupling:
        a_t, theta, xi, zeta = math.inf, 0.0, complex(0.0), complex(math.nan)
    return EdgeStateAnalysis(e_p, e_m, e_p - e_m, profile, a_t, theta, xi, zeta,
                             p.n_cells - 1, ip, im)


@dataclass(frozen=True)
class OscillationRow:
    phi: float
    n_cells: int
    E_plus: complex
    E_minus: complex
    delta_E: complex
    E_plus_analytic: complex
    E_minus_analytic: complex
    delta_E_analytic: complex
    A_T: float
    theta_T: float
    xi_T: complex
    flag: str = ""


_NAN = complex(math.nan, math.nan)


def _oscillation_row(p: ChainParams) -> OscillationRow:
    flag = ""
    try:
        num = analyze_edges(p)
        e_p, e_m = num.E_plus, num.E_minus
    except NumericalError as exc:
        e_p = e_m = _NAN
        flag = type(exc).__name__
    try:
        a_t, theta, xi = analytic_edge_constants(p)
        an = analytic_splitting(p) if p.n_cells >= 2 else AnalyticSplitting(_NAN, _NAN, _NAN, _NAN)
    except DegenerateCoupling as exc:
        a_t, theta, xi = math.nan, math.nan, _NAN
        an = AnalyticSplitting(_NAN, _NAN, _NAN, _NAN)
        flag = flag or type(exc).__name__
    return OscillationRow(p.phi, p.n_cells, e_p, e_m, e_p - e_m, an.E_plus, an.E_minus,
                          an.delta_E, a_t, theta, xi, flag)


def oscillation_sweep(p: ChainParams, phis: Optional[Iterable[float]] = None,
                      n_values: Optional[Iterable[int]] = None,
                      workers: int = 1) -> list[OscillationRow]:
    """Numerical and analytic edge energies over a phi grid or an N grid.

    Rows that fail (e.g. NoEdgePair near the phase boundary) are kept and
    carry the error name in ``flag``.  Row order follows the grid.
    """
    if (phis is None) == (n_values is None):
        raise ValueError("give exactly one of phis or n_values")
    if phis is not None:
        points: Sequence[ChainParams] = [p.replace(phi=float(x)) for x in phis]
    else:
        points = [p.replace(n_cells=int(n)) for n in n_values]
    if not points:
        raise ValueError("empty sweep grid")
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(_oscillation_row, points))
    return [_oscillation_row(q) for q in points]
