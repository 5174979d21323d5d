"""Hafnians, loop Hafnians, matchings and the moment expansion built on them.

``count_r_matchings`` is a direct backtracking enumeration over edge sets and
shares no code with the Hafnian kernels; it serves as their oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from ._kernels import PURE_PLAIN, PURE_SQUARED, haf_kernel, orbit_sum_kernel
from .errors import NotPositiveDefinite, NotSymmetric, OddSize, TooLarge

MAX_PAIR_SIZE = 20
MAX_LOOP_SIZE = 16
MAX_POLY_NODES = 20


def _adjacency(g) -> np.ndarray:
    a = getattr(g, "adjacency", g)
    return np.ascontiguousarray(a, dtype=np.float64)


def _check_symmetric(m, tol=1e-12):
    m = np.ascontiguousarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if m.size and np.max(np.abs(m - m.T)) > tol * max(1.0, np.max(np.abs(m))):
        raise NotSymmetric("matrix is not symmetric")
    return m


def pair_partitions(n: int) -> Iterator[tuple[tuple[int, int], ...]]:
    """Yield every partition of ``range(n)`` into unordered pairs.

    The lowest unpaired index is always matched first, so pairs come out
    sorted and the order is lexicographic in the partner choices.
    """
    if n % 2:
        raise OddSize(f"cannot pair an odd index set of size {n}")
    if n > MAX_PAIR_SIZE:
        raise TooLarge(f"pair enumeration limited to {MAX_PAIR_SIZE} indices")
    if n < 0:
        raise ValueError("n must be non-negative")

    def rec(rest):
        if not rest:
            yield ()
            return
        i = rest[0]
        for k in range(1, len(rest)):
            for tail in rec(rest[1:k] + rest[k + 1:]):
                yield ((i, rest[k]),) + tail

    yield from rec(tuple(range(n)))


def partitions_up_to_two(n: int) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Yield every partition of ``range(n)`` into singletons and pairs."""
    if n > MAX_LOOP_SIZE:
        raise TooLarge(f"loop enumeration limited to {MAX_LOOP_SIZE} indices")
    if n < 0:
        raise ValueError("n must be non-negative")

    def rec(rest):
        if not rest:
            yield ()
            return
        i = rest[0]
        for tail in rec(rest[1:]):
            yield ((i,),) + tail
        for k in range(1, len(rest)):
            for tail in rec(rest[1:k] + rest[k + 1:]):
                yield ((i, rest[k]),) + tail

    yield from rec(tuple(range(n)))


def double_factorial_pairs(n: int) -> int:
    """Number of pair partitions of ``n`` indices, ``n! / ((n/2)! 2^(n/2))``."""
    if n % 2:
        return 0
    return math.factorial(n) // (math.factorial(n // 2) * 2 ** (n // 2))


def involution_number(n: int) -> int:
    a, b = 1, 1
    for k in range(1, n):
        a, b = b, b + k * a
    return b if n else 1


def hafnian(m) -> float:
    """Hafnian of a real symmetric matrix (sum over perfect matchings of paired entries)."""
    m = _check_symmetric(m)
    if m.shape[0] > MAX_PAIR_SIZE:
        raise TooLarge(f"hafnian enumeration limited to {MAX_PAIR_SIZE}x{MAX_PAIR_SIZE}")
    return float(haf_kernel(m, False))


def loop_hafnian(m) -> float:
    """Loop Hafnian: pairs contribute off-diagonal entries, singletons the diagonal."""
    m = _check_symmetric(m)
    if m.shape[0] > MAX_LOOP_SIZE:
        raise TooLarge(f"loop hafnian enumeration limited to {MAX_LOOP_SIZE}x{MAX_LOOP_SIZE}")
    return float(haf_kernel(m, True))


def count_r_matchings(g, r: int) -> float:
    """Weighted count of ``r``-matchings by backtracking over the edge list.

    For 0/1 adjacency this is the number of sets of ``r`` pairwise disjoint
    edges; with weights, each set contributes the product of its weights.
    """
    a = _adjacency(g)
    n = a.shape[0]
    if r < 0:
        raise ValueError("r must be non-negative")
    if r == 0:
        return 1.0
    if 2 * r > n:
        return 0.0
    edges = [(i, j, a[i, j]) for i in range(n) for j in range(i + 1, n) if a[i, j] != 0.0]
    terms = []

    def rec(start, used, remaining, prod):
        if remaining == 0:
            terms.append(prod)
            return
        for e in range(start, len(edges) - remaining + 1):
            i, j, w = edges[e]
            if used >> i & 1 or used >> j & 1:
                continue
            rec(e + 1, used | (1 << i) | (1 << j), remaining - 1, prod * w)

    rec(0, 0, r, 1.0)
    return math.fsum(terms)


@dataclass(frozen=True)
class MatchingPolynomial:
    """Coefficients ``m(G, r)`` for ``r = 0 .. ceil(M/2)``; sign ``(-1)^r`` is implied."""

    coefficients: tuple[float, ...]
    num_nodes: int

    def __call__(self, x):
        m = self.num_nodes
        return sum((-1) ** r * c * x ** (m - 2 * r) for r, c in enumerate(self.coefficients) if c)


@dataclass(frozen=True)
class GbsPolynomial:
    """Coefficients ``g(G, r)``: sums of squared Hafnians over single-photon events with ``2r`` ones."""

    coefficients: tuple[float, ...]
    num_nodes: int

    def __call__(self, x):
        m = self.num_nodes
        return sum((-1) ** r * c * x ** (m - 2 * r) for r, c in enumerate(self.coefficients) if c)


def _ones(count):
    return np.ones(count, dtype=np.int64)


def single_photon_hafnian_sum(g, r: int, squared: bool) -> float:
    """Sum of ``haf`` (or ``haf**2``) over every induced subgraph on ``2r`` nodes."""
    a = _adjacency(g)
    if 2 * r > a.shape[0]:
        return 0.0
    kind = PURE_SQUARED if squared else PURE_PLAIN
    return float(orbit_sum_kernel(a, np.zeros(a.shape[0]), _ones(2 * r), kind))


def matching_polynomial(g, method: str = "enumerate") -> MatchingPolynomial:
    """Matching-polynomial coefficients.

    ``method="enumerate"`` backtracks over edge sets; ``method="hafnian"`` sums
    Hafnians of all ``2r``-node induced subgraphs. Both give the same numbers.
    """
    a = _adjacency(g)
    n = a.shape[0]
    if n > MAX_POLY_NODES:
        raise TooLarge(f"matching polynomial limited to {MAX_POLY_NODES} nodes")
    top = (n + 1) // 2
    if method == "enumerate":
        coeffs = [count_r_matchings(a, r) for r in range(top + 1)]
    elif method == "hafnian":
        coeffs = [single_photon_hafnian_sum(a, r, squared=False) for r in range(top + 1)]
    else:
        raise ValueError(f"unknown method {method!r}")
    return MatchingPolynomial(tuple(coeffs), n)


def gbs_polynomial(g) -> GbsPolynomial:
    a = _adjacency(g)
    n = a.shape[0]
    if n > MAX_POLY_NODES:
        raise TooLarge(f"GBS polynomial limited to {MAX_POLY_NODES} nodes")
    top = (n + 1) // 2
    return GbsPolynomial(tuple(single_photon_hafnian_sum(a, r, squared=True) for r in range(top + 1)), n)


def isserlis_moment(cov, indices) -> float:
    """Zero-mean Gaussian moment ``E[prod_k x_{indices[k]}]`` (0-based indices).

    Equals the Hafnian of the covariance with rows and columns repeated per
    multiplicity; odd orders vanish.
    """
    cov = _check_symmetric(cov)
    try:
        np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        raise NotPositiveDefinite("covariance is not positive definite") from None
    idx = np.asarray(list(indices), dtype=np.int64)
    if idx.size == 0:
        raise ValueError("indices must be non-empty")
    if idx.size % 2:
        return 0.0
    return hafnian(cov[np.ix_(idx, idx)])
