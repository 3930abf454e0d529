"""Compiled kernels for the dense complex eigensolver.

Pipeline: diagonal balancing, Householder reduction to upper Hessenberg form,
implicitly shifted single-shift complex QR to Schur form, and eigenvectors
by back-substitution on the triangular factor.  All routines operate in place
on complex128 arrays and release the GIL.
"""

import numpy as np
from numba import njit

_EPS = np.finfo(np.float64).eps
_RADIX = 2.0


@njit(cache=True, nogil=True)
def _cabs1(z):
    return abs(z.real) + abs(z.imag)


@njit(cache=True, nogil=True)
def balance(a):
    """Scale rows/columns by powers of two so their 1-norms are comparable.

    Returns the scaling vector d with a <- D^-1 a D.
    """
    n = a.shape[0]
    d = np.ones(n)
    converged = False
    while not converged:
        converged = True
        for i in range(n):
            c = 0.0
            r = 0.0
            for j in range(n):
                if j != i:
                    c += _cabs1(a[j, i])
                    r += _cabs1(a[i, j])
            if c == 0.0 or r == 0.0:
                continue
            g = r / _RADIX
            f = 1.0
            s = c + r
            while c < g:
                f *= _RADIX
                c *= _RADIX * _RADIX
            g = r * _RADIX
            while c >= g:
                f /= _RADIX
                c /= _RADIX * _RADIX
            if (c + r) / f < 0.95 * s:
                converged = False
                d[i] *= f
                for j in range(n):
                    a[i, j] /= f
                for j in range(n):
                    a[j, i] *= f
    return d


@njit(cache=True, nogil=True)
def hessenberg(a, q):
    """Reduce ``a`` to upper Hessenberg form, accumulating reflectors into ``q``."""
    n = a.shape[0]
    for k in range(n - 2):
        m = n - k - 1
        v = a[k + 1:, k].copy()
        xnorm = np.sqrt(np.sum(v.real ** 2 + v.imag ** 2))
        if xnorm == 0.0:
            continue
        x0 = v[0]
        if x0 == 0:
            phase = 1.0 + 0.0j
        else:
            phase = x0 / abs(x0)
        alpha = -phase * xnorm
        v[0] -= alpha
        vnorm = np.sqrt(np.sum(v.real ** 2 + v.imag ** 2))
        if vnorm == 0.0:
            continue
        v /= vnorm
        # a <- (I - 2vv^H) a (I - 2vv^H)
        for j in range(k, n):
            s = 0.0j
            for i in range(m):
                s += np.conj(v[i]) * a[k + 1 + i, j]
            for i in range(m):
                a[k + 1 + i, j] -= 2.0 * v[i] * s
        for i in range(n):
            s = 0.0j
            for j in range(m):
                s += a[i, k + 1 + j] * v[j]
            for j in range(m):
                a[i, k + 1 + j] -= 2.0 * s * np.conj(v[j])
            s = 0.0j
            for j in range(m):
                s += q[i, k + 1 + j] * v[j]
            for j in range(m):
                q[i, k + 1 + j] -= 2.0 * s * np.conj(v[j])
        a[k + 1, k] = alpha
        for i in range(k + 2, n):
            a[i, k] = 0.0


@njit(cache=True, nogil=True)
def _givens(f, g):
    # [c s; -conj(s) c] [f; g] = [r; 0] with c real
    if g == 0:
        return 1.0, 0.0j
    if f == 0:
        return 0.0, np.conj(g) / abs(g)
    nf = abs(f)
    nrm = np.hypot(nf, abs(g))
    alpha = f / nf
    return nf / nrm, alpha * np.conj(g) / nrm


@njit(cache=True, nogil=True)
def _rot_rows(a, i, j, c, s, start, stop):
    for m in range(start, stop):
        x = a[i, m]
        y = a[j, m]
        a[i, m] = c * x + s * y
        a[j, m] = -np.conj(s) * x + c * y


@njit(cache=True, nogil=True)
def _rot_cols(a, i, j, c, s, start, stop):
    for m in range(start, stop):
        x = a[m, i]
        y = a[m, j]
        a[m, i] = c * x + np.conj(s) * y
        a[m, j] = -s * x + c * y


@njit(cache=True, nogil=True)
def schur(h, qh, max_iter_per_eig):
    """Complex Schur form of a Hessenberg matrix by shifted QR.

    ``h`` is overwritten by the upper triangular factor T.  ``qh`` holds the
    conjugate transpose of the accumulated unitary (row rotations keep memory
    access contiguous).  Returns the number of eigenvalues that failed to
    converge (0 on success).
    """
    n = h.shape[0]
    hi = n - 1
    its = 0
    while hi >= 0:
        # locate the start of the unreduced block ending at hi
        lo = hi
        while lo > 0:
            tst = _cabs1(h[lo - 1, lo - 1]) + _cabs1(h[lo, lo])
            if tst == 0.0:
                tst = 0.0
                for i in range(n):
                    for j in range(n):
                        tst = max(tst, _cabs1(h[i, j]))
            if _cabs1(h[lo, lo - 1]) <= _EPS * tst:
                h[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            hi -= 1
            its = 0
            continue
        if its >= max_iter_per_eig:
            return hi + 1
        its += 1

        if its % 11 == 10:
            # exceptional shift to break cycles
            mu = h[hi, hi] + 0.75 * abs(h[hi, hi - 1].real) + 0.4375j * abs(h[hi, hi - 1])
        else:
            a = h[hi - 1, hi - 1]
            b = h[hi - 1, hi]
            c = h[hi, hi - 1]
            d = h[hi, hi]
            half = 0.5 * (a - d)
            disc = np.sqrt(half * half + b * c)
            # Wilkinson shift: eigenvalue of the trailing 2x2 nearer to d
            mu1 = 0.5 * (a + d) + disc
            mu2 = 0.5 * (a + d) - disc
            mu = mu1 if abs(mu1 - d) <= abs(mu2 - d) else mu2

        # implicit single-shift sweep over [lo, hi]
        f = h[lo, lo] - mu
        g = h[lo + 1, lo]
        for k in range(lo, hi):
            if k > lo:
                f = h[k, k - 1]
                g = h[k + 1, k - 1]
            c, s = _givens(f, g)
            col0 = k - 1 if k > lo else lo
            _rot_rows(h, k, k + 1, c, s, col0, n)
            if k > lo:
                h[k + 1, k - 1] = 0.0
            _rot_cols(h, k, k + 1, c, s, 0, min(k + 3, hi + 1))
            _rot_rows(qh, k, k + 1, c, s, 0, n)
    return 0


@njit(cache=True, nogil=True)
def triangular_eigenvectors(t):
    """Right eigenvectors of upper triangular ``t`` as columns (unnormalized)."""
    n = t.shape[0]
    tnorm = 0.0
    for i in range(n):
        for j in range(i, n):
            tnorm = max(tnorm, _cabs1(t[i, j]))
    smin = max(_EPS * tnorm, 1e-300)
    y = np.zeros((n, n), dtype=np.complex128)
    for k in range(n):
        lam = t[k, k]
        y[k, k] = 1.0
        for i in range(k - 1, -1, -1):
            s = t[i, k]
            for j in range(i + 1, k):
                s += t[i, j] * y[j, k]
            den = t[i, i] - lam
            if _cabs1(den) < smin:
                den = smin
            y[i, k] = -s / den
            if _cabs1(y[i, k]) > 1e150:
                for j in range(i, k + 1):
                    y[j, k] *= 1e-150
    return y
