"""Open-system dynamics of the chain and elimination of the middle qubits.

Each nearest-neighbour pair shares a bath: collective jumps
sqrt(tau)(a_n + b_n) and sqrt(tau)(a_{n+1} + b_n).  Jumps only lower the
excitation number, so the one-excitation block evolves under the conditional
Hamiltonian H_nh = H_T - (i/2) sum L^dag L while jumps feed the ground state.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import SingularMatrix, SingularMiddleBlock
from .model import ChainParams, OnSitePotential, build_open_chain, couplings, hopping_matrix


@dataclass(frozen=True)
class JumpOperator:
    """sqrt(rate) * sum of lowering operators on ``sites``."""

    sites: tuple[int, ...]
    rate: float

    def vector(self, dim: int) -> np.ndarray:
        c = np.zeros(dim)
        c[list(self.sites)] = 1.0
        return c


@dataclass(frozen=True)
class LiouvillianModel:
    params: ChainParams
    H_T_block: np.ndarray
    jump_ops: list[JumpOperator]
    H_nh: np.ndarray
    M: np.ndarray
    M_prime: np.ndarray
    G: np.ndarray
    V: np.ndarray
    consistency_residual: float = field(default=0.0)

    @property
    def dim(self) -> int:
        return self.H_T_block.shape[0]


@dataclass(frozen=True)
class EdgeCoupling:
    delta_g: float
    delta_gamma: float
    E_prime_plus: complex
    E_prime_minus: complex


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    amplitudes: np.ndarray
    populations: np.ndarray
    excited: np.ndarray
    ground: np.ndarray


def middle_matrices(p: ChainParams) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """M, M', G, V over the middle qubits (b_1, a_2, b_2, ..., a_N)."""
    c = couplings(p)
    tau = p.tau
    m = 2 * p.n_cells - 2
    # middle chain starts with the intercell bond b_1 - a_2
    mat = hopping_matrix(p.n_cells - 1, c.t_B_real - 0.5j * tau, c.t_A_real - 0.5j * tau) \
        if m else np.zeros((0, 0), dtype=np.complex128)
    mat[np.diag_indices(m)] = -1j * tau
    m_prime = tau * np.eye(m) + 0.5 * tau * (np.eye(m, k=1) + np.eye(m, k=-1))
    g = np.zeros(m, dtype=np.complex128)
    v = np.zeros(m, dtype=np.complex128)
    if m:
        g[0] = c.t_A_real - 0.5j * tau
        v[-1] = c.t_A_real - 0.5j * tau
    return mat, m_prime, g, v


def build_liouvillian(p: ChainParams) -> LiouvillianModel:
    """Coherent block, jumps and middle-qubit matrices of the bath model.

    The consistency residual compares H_nh (rotating frame) with the open
    chain at gamma1 = gamma2 = tau/2 plus the bath level shifts: -i tau on
    middle sites, -i tau/2 on the two end sites.
    """
    n = p.n_cells
    dim = 2 * n
    c = couplings(p)
    h_t = hopping_matrix(n, c.t_A_real, c.t_B_real) + p.omega * np.eye(dim)
    jumps = [JumpOperator((2 * i, 2 * i + 1), p.tau) for i in range(n)]
    jumps += [JumpOperator((2 * i + 2, 2 * i + 1), p.tau) for i in range(n - 1)]
    decay = np.zeros((dim, dim))
    for j in jumps:
        cv = j.vector(dim)
        decay += j.rate * np.outer(cv, cv)
    h_nh = h_t - 0.5j * decay

    mat, m_prime, g, v = middle_matrices(p)
    chain = build_open_chain(p.replace(gamma1=0.5 * p.tau, gamma2=0.5 * p.tau,
                                       omega=0.0, onsite=OnSitePotential()))
    shift = np.full(dim, -1j * p.tau)
    shift[0] = shift[-1] = -0.5j * p.tau
    expected = chain + np.diag(shift)
    rot = h_nh - p.omega * np.eye(dim)
    resid = float(np.max(np.abs(rot - expected)))
    if dim > 2:
        mid = slice(1, dim - 1)
        resid = max(resid,
                    float(np.max(np.abs(rot[mid, mid] - mat))),
                    float(np.max(np.abs(rot[0, mid] - g))),
                    float(np.max(np.abs(rot[-1, mid] - v))),
                    float(np.max(np.abs(decay[mid, mid] - 2.0 * m_prime))))
    return LiouvillianModel(p, h_t, jumps, h_nh, mat, m_prime, g, v, resid)


def adiabatic_edge_coupling(model: LiouvillianModel, level_shift=None,
                            renormalize: bool = False) -> EdgeCoupling:
    """Effective coupling of a_1 and b_N after eliminating the middle qubits.

    The middle block is taken relative to ``level_shift`` (default: its
    uniform bath shift -i tau), kappa = -G^T (M - level_shift)^-1 V, and
    H_edge = kappa (a_1^dag b_N + h.c.) with kappa = delta_g - i delta_gamma,
    so E'_+- = +-kappa.  ``level_shift=0`` uses M as it stands.

    With ``renormalize`` kappa is divided by 1 + y^T y, y = (M - shift)^-1 G,
    the weight the edge state carries on the eliminated qubits.
    """
    p = model.params
    if p.n_cells < 2:
        raise ValueError("elimination needs N >= 2 (no middle qubits for N = 1)")
    shift = -1j * p.tau if level_shift is None else complex(level_shift)
    m_s = model.M - shift * np.eye(model.M.shape[0])
    try:
        x = linalg.solve(m_s, np.column_stack([model.V, model.G]))
    except SingularMatrix as exc:
        raise SingularMiddleBlock(str(exc)) from exc
    kappa = -complex(model.G @ x[:, 0])
    if renormalize:
        y = x[:, 1]
        kappa /= 1.0 + complex(y @ y)
    return EdgeCoupling(kappa.real, -kappa.imag, kappa, -kappa)


def evolve_single_excitation(model: LiouvillianModel, psi0, t_grid) -> Trajectory:
    """One-excitation amplitudes under H_nh with populations and P_e(t)."""
    psi0 = np.asarray(psi0, dtype=np.complex128)
    if abs(np.linalg.norm(psi0) - 1.0) > 1e-10:
        raise ValueError("psi0 must be normalized")
    amps = linalg.evolve(model.H_nh, psi0, t_grid)
    pops = np.abs(amps) ** 2
    excited = pops.sum(axis=1)
    return Trajectory(np.asarray(t_grid, dtype=float), amps, pops, excited, 1.0 - excited)


def beat_period(times, signal) -> float:
    """Period of the dominant oscillation in ``signal`` (uniform ``times``).

    Peak of the zero-padded discrete Fourier transform of the mean-removed
    signal, refined by parabolic interpolation.
    """
    t = np.asarray(times, dtype=float)
    x = np.asarray(signal, dtype=float)
    x = (x - x.mean()) * np.hanning(len(x))
    n_fft = 16 * len(x)
    spec = np.abs(np.fft.rfft(x, n_fft))
    spec[0] = 0.0
    k = int(np.argmax(spec))
    if 0 < k < len(spec) - 1:
        a, b, c = np.log(spec[k - 1:k + 2] + 1e-300)
        denom = a - 2 * b + c
        k = k + (0.5 * (a - c) / denom if denom != 0 else 0.0)
    dt = t[1] - t[0]
    return float(n_fft * dt / k)
