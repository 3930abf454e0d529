"""Dense complex linear algebra: eigendecomposition, linear solves, evolution.

Matrices are plain ``numpy`` complex128 arrays; :func:`as_complex_matrix`
validates them.  The eigensolver is self-contained (see ``_kernels``); the
time integrator wraps SciPy's adaptive Dormand-Prince 8(5,3) scheme.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from . import _kernels
from .errors import DefectivePairing, NonConvergence, SingularMatrix, StepUnderflow

MAX_DIM = 1024
PAIR_TOL = 1e-6
DEFECT_TOL = 1e-8
MAX_QR_ITER_PER_EIG = 60


def as_complex_matrix(a, square: bool = True) -> np.ndarray:
    """Return ``a`` as a finite complex128 2-D array (copy not guaranteed)."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    if square and m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues with biorthonormal right/left eigenvector columns.

    ``left[:, i].conj() @ right[:, i] == 1``; right vectors have unit norm.
    """

    eigenvalues: np.ndarray
    right: np.ndarray
    left: np.ndarray
    residual_max: float

    def __len__(self) -> int:
        return len(self.eigenvalues)


def _schur_eigenpairs(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and unit right eigenvectors of a general complex matrix."""
    n = a.shape[0]
    h = np.array(a, dtype=np.complex128, order="C", copy=True)
    if n == 1:
        return h[0].copy(), np.ones((1, 1), dtype=np.complex128)
    scale = _kernels.balance(h)
    q = np.eye(n, dtype=np.complex128)
    _kernels.hessenberg(h, q)
    qh = np.ascontiguousarray(q.conj().T)
    failed = _kernels.schur(h, qh, MAX_QR_ITER_PER_EIG)
    q = qh.conj().T
    if failed:
        raise NonConvergence(f"QR iteration did not converge ({failed} eigenvalues left)")
    vals = np.diag(h).copy()
    y = _kernels.triangular_eigenvectors(h)
    vecs = scale[:, None] * (q @ y)
    vecs /= np.linalg.norm(vecs, axis=0)
    return vals, vecs


def eigvals(a) -> np.ndarray:
    """Eigenvalues only (same algorithm as :func:`eig`), sorted by (Re, Im)."""
    a = as_complex_matrix(a)
    vals, _ = _schur_eigenpairs(a)
    return vals[np.lexsort((vals.imag, vals.real))]


def _pair_left(vals, right, mu, left):
    """Greedy nearest-eigenvalue matching of adjoint eigenpairs to right ones."""
    n = len(vals)
    dist = np.abs(vals[:, None] - np.conj(mu)[None, :])
    overlap = np.abs(left.conj().T @ right).T  # [i, j] = |<w_j|v_i>|
    order = np.argsort(dist.min(axis=1), kind="stable")
    taken = np.zeros(n, dtype=bool)
    perm = np.empty(n, dtype=np.intp)
    tol = PAIR_TOL * max(1.0, float(np.max(np.abs(vals))))
    for i in order:
        d = np.where(taken, np.inf, dist[i])
        best = d.min()
        if not np.isfinite(best) or best > tol:
            raise DefectivePairing(f"no adjoint eigenvalue within {tol:g} of {vals[i]}")
        candidates = np.flatnonzero(d <= best + tol)
        j = candidates[np.argmax(overlap[i, candidates])]
        perm[i] = j
        taken[j] = True
    return left[:, perm]


def _clusters(vals, tol):
    """Group indices whose eigenvalues lie within ``tol`` (single linkage)."""
    n = len(vals)
    label = np.arange(n)
    for i in range(n):
        for j in range(i + 1, n):
            if abs(vals[i] - vals[j]) <= tol and label[j] != label[i]:
                label[label == label[j]] = label[i]
    return [np.flatnonzero(label == g) for g in np.unique(label)]


def _biorthonormalize(vals, right, left):
    left = left / np.linalg.norm(left, axis=0)
    tol = PAIR_TOL * max(1.0, float(np.max(np.abs(vals))))
    for idx in _clusters(vals, tol):
        if len(idx) > 1:
            s = left[:, idx].conj().T @ right[:, idx]
            if np.linalg.svd(s, compute_uv=False).min() < DEFECT_TOL:
                raise DefectivePairing(
                    f"near-defective eigenvalue cluster around {vals[idx[0]]}")
            left[:, idx] = left[:, idx] @ np.linalg.inv(s).conj().T
        else:
            i = idx[0]
            ov = np.vdot(left[:, i], right[:, i])
            if abs(ov) < DEFECT_TOL:
                raise DefectivePairing(
                    f"|<w|v>| = {abs(ov):.3g} for eigenvalue {vals[i]}")
            left[:, i] = left[:, i] / np.conj(ov)
    return left


def eig(h, left: str = "adjoint") -> EigenDecomposition:
    """Full non-Hermitian eigendecomposition with biorthonormal left vectors.

    ``left="adjoint"`` solves the adjoint problem separately and pairs its
    eigenvectors to the right ones by nearest conjugated eigenvalue, breaking
    ties by vector overlap.  ``left="transpose"`` uses ``conj(right)``, valid
    only for complex symmetric ``h`` (H = H^T).

    Raises NonConvergence or DefectivePairing.
    """
    h = as_complex_matrix(h)
    n = h.shape[0]
    if n > MAX_DIM:
        raise ValueError(f"dimension {n} exceeds {MAX_DIM}")
    vals, right = _schur_eigenpairs(h)
    order = np.lexsort((vals.imag, vals.real))
    vals, right = vals[order], right[:, order]

    if left == "adjoint":
        mu, wl = _schur_eigenpairs(h.conj().T)
        wl = _pair_left(vals, right, mu, wl)
    elif left == "transpose":
        if not np.array_equal(h, h.T):
            raise ValueError("left='transpose' requires a complex symmetric matrix")
        wl = right.conj()
    else:
        raise ValueError(f"unknown left-vector mode {left!r}")
    wl = _biorthonormalize(vals, right, wl)

    r_right = np.linalg.norm(h @ right - right * vals, axis=0)
    r_left = np.linalg.norm(h.conj().T @ wl - wl * vals.conj(), axis=0)
    resid = float(max(r_right.max(), r_left.max()))
    return EigenDecomposition(vals, right, wl, resid)


def solve(a, b) -> np.ndarray:
    """Solve ``a x = b`` by LU with partial pivoting and one refinement step.

    ``b`` may be a vector or a matrix of right-hand sides.  Raises
    SingularMatrix when a pivot falls below 1e-14 * ||a||_F.
    """
    a = as_complex_matrix(a)
    b = np.asarray(b, dtype=np.complex128)
    n = a.shape[0]
    if b.shape[0] != n:
        raise ValueError(f"rhs has {b.shape[0]} rows, matrix has {n}")
    lu = a.copy()
    piv = np.arange(n)
    thresh = 1e-14 * np.linalg.norm(a)
    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        if abs(lu[p, k]) <= thresh:
            raise SingularMatrix(f"pivot {abs(lu[p, k]):.3g} at column {k}")
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            piv[[k, p]] = piv[[p, k]]
        lu[k + 1:, k] /= lu[k, k]
        lu[k + 1:, k + 1:] -= np.outer(lu[k + 1:, k], lu[k, k + 1:])

    def _substitute(rhs):
        y = rhs[piv].copy()
        for i in range(1, n):
            y[i] -= lu[i, :i] @ y[:i]
        for i in range(n - 1, -1, -1):
            y[i] = (y[i] - lu[i, i + 1:] @ y[i + 1:]) / lu[i, i]
        return y

    x = _substitute(b)
    return x + _substitute(b - a @ x)


def evolve(h, psi0, t_grid, rtol: float = 1e-10) -> np.ndarray:
    """Integrate i d(psi)/dt = H psi and return psi at each time in ``t_grid``.

    ``H`` may be non-Hermitian.  Returns an array of shape (len(t_grid), n).
    """
    h = as_complex_matrix(h)
    psi0 = np.asarray(psi0, dtype=np.complex128)
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or len(t) == 0 or t[0] != 0.0:
        raise ValueError("t_grid must be a 1-D grid starting at 0")
    if np.any(np.diff(t) <= 0):
        raise ValueError("t_grid must be strictly increasing")
    if psi0.shape != (h.shape[0],):
        raise ValueError("psi0 length does not match H")
    if len(t) == 1 or not np.any(h):
        return np.tile(psi0, (len(t), 1))

    mh = -1j * h
    span = t[-1]
    scale = max(float(np.linalg.norm(psi0)), 1e-300)
    sol = solve_ivp(
        lambda _t, y: mh @ y, (0.0, span), psi0, method="DOP853", t_eval=t,
        rtol=rtol, atol=1e-3 * rtol * scale, first_step=None,
    )
    if sol.status != 0:
        raise StepUnderflow(sol.message)
    return sol.y.T.copy()
