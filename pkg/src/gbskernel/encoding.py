"""Gaussian-state parameters for a rescaled graph: Q matrix, covariance, displacement, loss.

Convention throughout: ``sigma = Q - I/2`` with ``Q = (I - X A~)^-1`` and ``X``
the block swap of the two ``M``-mode halves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import EncodingError, OutOfRange, SpectralBoundViolated
from .graphcore import ScaledGraph, doubled_adjacency
from .linalg import inv_and_logdet, jacobi_eigh


def swap_halves(y: np.ndarray) -> np.ndarray:
    """Left-multiply by ``X``: exchange the top and bottom ``M`` rows."""
    m = y.shape[0] // 2
    return np.concatenate([y[m:], y[:m]], axis=0)


@dataclass(frozen=True, eq=False)
class GbsEncoding:
    m_modes: int
    a_tilde: np.ndarray
    q: np.ndarray
    q_inv: np.ndarray
    logdet_q: float
    sigma: np.ndarray
    d_scalar: float
    b: np.ndarray
    alpha_exp: float
    nu: float = 0.0

    @property
    def det_q(self) -> float:
        return math.exp(self.logdet_q)

    @property
    def displacement(self) -> np.ndarray:
        return np.full(2 * self.m_modes, self.d_scalar)

    @property
    def is_pure(self) -> bool:
        return self.nu == 0.0


def _displacement_terms(q_inv, d):
    dvec = np.full(q_inv.shape[0], float(d))
    b = dvec @ q_inv
    return b, -0.5 * float(b @ dvec)


def encode(g: ScaledGraph, d_scalar: float = 0.0) -> GbsEncoding:
    """Encode a rescaled graph with uniform real displacement ``d_scalar`` on every mode."""
    if d_scalar < 0 or not math.isfinite(d_scalar):
        raise OutOfRange(f"displacement must be a non-negative real, got {d_scalar}")
    if g.c * g.s_max >= 1.0:
        raise SpectralBoundViolated(f"c * s_max = {g.c * g.s_max} >= 1")
    m = g.num_nodes
    a_tilde = doubled_adjacency(g)
    q_inv = np.eye(2 * m) - swap_halves(a_tilde)
    q, sign, logdet_inv = inv_and_logdet(q_inv)
    if sign <= 0:
        raise SpectralBoundViolated("det(I - X A~) is not positive")
    q = 0.5 * (q + q.T)
    b, alpha_exp = _displacement_terms(q_inv, d_scalar)
    return GbsEncoding(
        m_modes=m,
        a_tilde=a_tilde,
        q=q,
        q_inv=q_inv,
        logdet_q=-logdet_inv,
        sigma=q - 0.5 * np.eye(2 * m),
        d_scalar=float(d_scalar),
        b=b,
        alpha_exp=alpha_exp,
        nu=0.0,
    )


def apply_loss(e: GbsEncoding, nu: float) -> GbsEncoding:
    """Pass the state through the uniform loss channel ``sigma -> (1-nu) sigma + nu I/2``."""
    if not 0.0 <= nu <= 1.0:
        raise OutOfRange(f"loss parameter must lie in [0, 1], got {nu}")
    if nu == 0.0:
        return e
    n2 = 2 * e.m_modes
    sigma = (1.0 - nu) * e.sigma + 0.5 * nu * np.eye(n2)
    q = sigma + 0.5 * np.eye(n2)
    q_inv, sign, logdet = inv_and_logdet(q)
    if sign <= 0:
        raise EncodingError("lossy Q matrix has non-positive determinant")
    q_inv = 0.5 * (q_inv + q_inv.T)
    a_tilde = swap_halves(np.eye(n2) - q_inv)
    a_tilde = 0.5 * (a_tilde + a_tilde.T)
    b, alpha_exp = _displacement_terms(q_inv, e.d_scalar)
    total_nu = 1.0 - (1.0 - e.nu) * (1.0 - nu)
    return replace(e, a_tilde=a_tilde, q=q, q_inv=q_inv, logdet_q=logdet, sigma=sigma, b=b,
                   alpha_exp=alpha_exp, nu=total_nu)


def lossy_a_via_eigen(e: GbsEncoding, nu: float) -> np.ndarray:
    """Lossy ``A``-matrix from the eigenvalues of ``X A~`` instead of the covariance route.

    With ``X A~ = V diag(L) V^T`` the result is
    ``X (I - V diag((L - 1) / (L nu - 1)) V^T)``.
    """
    if not e.is_pure:
        raise EncodingError("eigen route needs the lossless encoding")
    if not 0.0 <= nu <= 1.0:
        raise OutOfRange(f"loss parameter must lie in [0, 1], got {nu}")
    w, v = jacobi_eigh(swap_halves(e.a_tilde))
    f = (w - 1.0) / (w * nu - 1.0)
    inner = (v * f) @ v.T
    out = swap_halves(np.eye(2 * e.m_modes) - inner)
    return 0.5 * (out + out.T)
