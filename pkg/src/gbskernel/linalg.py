"""Small dense linear-algebra helpers.

Symmetric eigendecomposition is a cyclic Jacobi sweep (numba kernel); inverse
and log-determinant go through scipy's partial-pivoting LU.
"""

import warnings

import numpy as np
import scipy.linalg

from ._accel import njit
from .errors import EigenFailure, SingularMatrix

JACOBI_TOL = 1e-12
PIVOT_TOL = 1e-14


@njit
def _jacobi_kernel(a, tol, max_sweeps):
    n = a.shape[0]
    a = a.copy()
    v = np.eye(n)
    scale = 0.0
    for i in range(n):
        for j in range(n):
            scale += a[i, j] * a[i, j]
    scale = max(1.0, np.sqrt(scale))
    for sweep in range(max_sweeps):
        off = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                off += 2.0 * a[i, j] * a[i, j]
        if np.sqrt(off) < tol * scale:
            return a, v, sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if theta >= 0.0:
                    t = 1.0 / (theta + np.sqrt(1.0 + theta * theta))
                else:
                    t = -1.0 / (-theta + np.sqrt(1.0 + theta * theta))
                cs = 1.0 / np.sqrt(1.0 + t * t)
                sn = t * cs
                a[p, p] -= t * apq
                a[q, q] += t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    if k == p or k == q:
                        continue
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = cs * akp - sn * akq
                    a[p, k] = a[k, p]
                    a[k, q] = sn * akp + cs * akq
                    a[q, k] = a[k, q]
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = cs * vkp - sn * vkq
                    v[k, q] = sn * vkp + cs * vkq
    return a, v, -1


def jacobi_eigh(a, tol=JACOBI_TOL, max_sweeps=100):
    """Eigen-decompose a real symmetric matrix by cyclic Jacobi rotations.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvectors as columns, so
    ``a == V @ diag(w) @ V.T``. Eigenvalues are not sorted.
    """
    a = np.ascontiguousarray(a, dtype=np.float64)
    if a.shape[0] == 0:
        return np.zeros(0), np.zeros((0, 0))
    if not np.all(np.isfinite(a)):
        raise EigenFailure("matrix has non-finite entries")
    d, v, sweeps = _jacobi_kernel(a, tol, max_sweeps)
    if sweeps < 0:
        raise EigenFailure(f"Jacobi did not converge in {max_sweeps} sweeps")
    return np.diag(d).copy(), v


def spectral_radius(a):
    """Largest absolute eigenvalue of a symmetric matrix (its largest singular value)."""
    if a.shape[0] == 0:
        return 0.0
    w, _ = jacobi_eigh(a)
    return float(np.max(np.abs(w)))


def lu(a):
    a = np.asarray(a, dtype=np.float64)
    with warnings.catch_warnings():
        # exact singularity is reported through SingularMatrix below
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu_, piv = scipy.linalg.lu_factor(a, check_finite=True)
    diag = np.abs(np.diag(lu_))
    if diag.size and diag.min() < PIVOT_TOL:
        raise SingularMatrix(f"pivot {diag.min():.3e} below {PIVOT_TOL}")
    return lu_, piv


def inv_and_logdet(a):
    """Return ``(inverse, sign, log|det|)`` from one LU factorisation."""
    n = a.shape[0]
    lu_, piv = lu(a)
    inverse = scipy.linalg.lu_solve((lu_, piv), np.eye(n))
    diag = np.diag(lu_)
    swaps = np.count_nonzero(piv != np.arange(n))
    sign = (-1.0) ** swaps * np.prod(np.sign(diag))
    return inverse, float(sign), float(np.sum(np.log(np.abs(diag))))
