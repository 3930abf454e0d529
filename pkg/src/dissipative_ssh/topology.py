"""Phase classification, Bloch dispersion and the winding number."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import GapClosure, NonQuantized, UnsupportedOnsite
from .model import ChainParams, couplings

DEFAULT_KPOINTS = 4001
BOUNDARY_EPS = 1e-12
GAP_TOL = 1e-8
MAX_KPOINTS = 1 << 22


@dataclass(frozen=True)
class PhaseReport:
    phase: str
    lhs: float
    rhs: float
    winding: Optional[int] = None
    min_abs_E_on_grid: float = float("nan")


@dataclass(frozen=True)
class DispersionCurve:
    k_grid: np.ndarray
    E_plus: np.ndarray
    E_minus: np.ndarray


def _require_no_onsite(p: ChainParams) -> None:
    if p.onsite.kind != "none":
        raise UnsupportedOnsite("band topology is defined for the chain without on-site terms")


def phase_sides(p: ChainParams) -> tuple[float, float]:
    """Return (t_A'^2 + gamma1^2, t_B'^2 + gamma2^2), i.e. |t_A|^2 and |t_B|^2."""
    c = couplings(p)
    return c.t_A_real ** 2 + p.gamma1 ** 2, c.t_B_real ** 2 + p.gamma2 ** 2


def classify_phase(p: ChainParams) -> PhaseReport:
    """Topological iff |t_A| < |t_B|, with a boundary band of 1e-12 t0^2."""
    _require_no_onsite(p)
    lhs, rhs = phase_sides(p)
    eps = BOUNDARY_EPS * p.t0 ** 2
    if lhs < rhs - eps:
        phase = "topological"
    elif lhs > rhs + eps:
        phase = "trivial"
    else:
        phase = "boundary"
    return PhaseReport(phase, lhs, rhs)


def k_grid(n_k: int) -> np.ndarray:
    """Uniform grid on [-pi, pi], endpoints included, exactly symmetric."""
    if n_k < 2:
        raise ValueError("need at least two k-points")
    k = np.linspace(-np.pi, np.pi, n_k)
    return 0.5 * (k - k[::-1])


def dispersion(p: ChainParams, n_k: int = DEFAULT_KPOINTS) -> DispersionCurve:
    """E_+-(k) = +-sqrt(t_A^2 + t_B^2 + 2 t_A t_B cos k) on a continuous branch.

    The branch is fixed by the principal root at k = -pi and continued along
    the grid by choosing, at each step, the root nearest the previous value.
    """
    _require_no_onsite(p)
    c = couplings(p)
    k = k_grid(n_k)
    e2 = c.t_A ** 2 + c.t_B ** 2 + 2.0 * c.t_A * c.t_B * np.cos(k)
    root = np.sqrt(e2.astype(np.complex128))
    e_plus = np.empty_like(root)
    e_plus[0] = root[0]
    for j in range(1, len(k)):
        r = root[j]
        e_plus[j] = r if abs(r - e_plus[j - 1]) <= abs(r + e_plus[j - 1]) else -r
    return DispersionCurve(k, e_plus, -e_plus)


def _wrapped_winding(z: np.ndarray) -> tuple[float, float]:
    """Sum of phase increments along a closed sampled curve, in units of 2 pi.

    Also returns the largest single increment in absolute value.
    """
    d = np.angle(z[1:] / z[:-1])
    return float(d.sum() / (2.0 * np.pi)), float(np.abs(d).max())


def winding_number(p: ChainParams, n_k: int = DEFAULT_KPOINTS, refine: bool = True) -> int:
    """Winding of the chiral Bloch matrix around the Brillouin zone.

    The energy E(k)^2 factorizes into the two off-diagonal entries
    t_A + t_B e^{ik} and t_A + t_B e^{-ik}.  E(k) itself is even in k, so its
    phase returns on itself and never winds; the invariant is half the
    difference of the windings of the two off-diagonal entries, each
    discretized as a sum of increments wrapped into (-pi, pi].

    A grid whose largest increment exceeds pi/2 cannot resolve the curve; with
    ``refine`` the grid is doubled until it does.
    """
    if n_k < 1001:
        raise ValueError("winding number needs at least 1001 k-points")
    _require_no_onsite(p)
    c = couplings(p)
    while True:
        k = k_grid(n_k)
        upper = c.t_A + c.t_B * np.exp(-1j * k)
        lower = c.t_A + c.t_B * np.exp(1j * k)
        min_abs_e = float(np.sqrt(np.abs(upper * lower)).min())
        if min_abs_e < GAP_TOL * p.t0:
            raise GapClosure(f"min |E(k)| = {min_abs_e:.3g} on the grid")
        w_low, step_low = _wrapped_winding(lower)
        w_up, step_up = _wrapped_winding(upper)
        if max(step_low, step_up) <= 0.5 * np.pi:
            break
        if not refine or 2 * n_k - 1 > MAX_KPOINTS:
            raise NonQuantized(f"phase increments up to {max(step_low, step_up):.3g} rad "
                               f"with {n_k} k-points")
        n_k = 2 * n_k - 1
    raw = 0.5 * (w_low - w_up)
    nu = int(round(raw))
    if abs(raw - nu) > 1e-3 / (2.0 * np.pi):
        raise NonQuantized(f"winding sum {raw:.6f} is not an integer")
    return nu


def phase_report(p: ChainParams, n_k: int = DEFAULT_KPOINTS) -> PhaseReport:
    """classify_phase plus winding and the smallest |E| on the k-grid.

    The winding is left empty at the boundary.
    """
    base = classify_phase(p)
    curve = dispersion(p, n_k)
    min_e = float(np.abs(curve.E_plus).min())
    winding = None
    if base.phase != "boundary":
        try:
            winding = winding_number(p, max(n_k, 1001))
        except GapClosure:
            winding = None
    return PhaseReport(base.phase, base.lhs, base.rhs, winding, min_e)
