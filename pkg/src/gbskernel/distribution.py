"""Exact photon-event, orbit and meta-orbit probabilities."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from ._kernels import LOOP_SQUARED, LOSSY, PURE_SQUARED, haf_kernel, orbit_sum_kernel
from .encoding import GbsEncoding
from .errors import DisplacedLossUnsupported, LengthMismatch, LossyEncodingRequiresGeneralPath, TooLarge
from .graphcore import as_event

# largest total photon number each route will enumerate
MAX_TOTAL_PURE = 20
MAX_TOTAL_DISPLACED = 16
MAX_TOTAL_LOSSY = 10


@dataclass(frozen=True, order=False)
class Orbit:
    """All permutations of a photon event, keyed by its sorted non-zero counts."""

    partition: tuple[int, ...]

    def __post_init__(self):
        p = tuple(int(x) for x in self.partition)
        if any(x <= 0 for x in p) or list(p) != sorted(p, reverse=True):
            raise ValueError(f"orbit partition must be non-increasing positive integers: {p}")
        object.__setattr__(self, "partition", p)

    @classmethod
    def of_event(cls, n) -> "Orbit":
        return cls(tuple(sorted((x for x in as_event(n).counts if x), reverse=True)))

    @property
    def total(self) -> int:
        return sum(self.partition)

    @property
    def max_count(self) -> int:
        return self.partition[0] if self.partition else 0

    @property
    def is_single_photon(self) -> bool:
        return all(x == 1 for x in self.partition)

    @property
    def label(self) -> str:
        return "o[" + ",".join(map(str, self.partition)) + "]"

    def __str__(self):
        return self.label


@dataclass(frozen=True)
class MetaOrbit:
    """Union of the orbits with ``total`` photons whose largest count is ``max_count``."""

    total: int
    max_count: int

    def __post_init__(self):
        if self.total == 0:
            if self.max_count != 0:
                raise ValueError("vacuum meta-orbit has max_count 0")
        elif not 1 <= self.max_count <= self.total:
            raise ValueError(f"need 1 <= s <= total, got s={self.max_count}, total={self.total}")

    def contains(self, o: Orbit) -> bool:
        return o.total == self.total and o.max_count == self.max_count

    @property
    def label(self) -> str:
        return f"m[{self.total},{self.max_count}]"

    def __str__(self):
        return self.label


def _partitions(total: int, max_part: int, max_parts: int) -> Iterator[tuple[int, ...]]:
    if total == 0:
        yield ()
        return
    if max_parts == 0:
        return
    for first in range(min(total, max_part), 0, -1):
        for rest in _partitions(total - first, first, max_parts - 1):
            yield (first,) + rest


def enumerate_orbits(k: int, m: int) -> list[Orbit]:
    """Orbits with at most ``k`` photons on ``m`` modes.

    Ordered by total, then by partition in descending lexicographic order.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    return [Orbit(p) for t in range(k + 1) for p in _partitions(t, t, m)]


def enumerate_meta_orbits(k: int, m: int) -> list[MetaOrbit]:
    """Meta-orbits with at most ``k`` photons on ``m`` modes, ordered by total then ``s`` descending."""
    out = [MetaOrbit(0, 0)]
    for t in range(1, k + 1):
        for s in range(t, 0, -1):
            if s * m >= t:
                out.append(MetaOrbit(t, s))
    return out


def _log_nfact(counts) -> float:
    return sum(math.lgamma(x + 1) for x in counts)


def _check_total(e: GbsEncoding, total: int):
    if not e.is_pure:
        limit = MAX_TOTAL_LOSSY
    elif e.d_scalar > 0:
        limit = MAX_TOTAL_DISPLACED
    else:
        limit = MAX_TOTAL_PURE
    if total > limit:
        raise TooLarge(f"{total} photons exceeds the exact-enumeration limit {limit} for this encoding")


def _pure_block(e: GbsEncoding) -> np.ndarray:
    m = e.m_modes
    return np.ascontiguousarray(e.a_tilde[:m, :m])


def _finish(value: float, log_prefactor: float) -> float:
    if value == 0.0:
        return 0.0
    return float(value) * math.exp(log_prefactor)


def event_probability(e: GbsEncoding, n) -> float:
    """Probability of photon event ``n`` for a lossless encoding, displaced or not."""
    if not e.is_pure:
        raise LossyEncodingRequiresGeneralPath("use lossy_event_probability for nu > 0")
    n = as_event(n)
    if len(n) != e.m_modes:
        raise LengthMismatch(f"event has {len(n)} modes, encoding has {e.m_modes}")
    _check_total(e, n.total)
    if e.d_scalar == 0.0 and n.total % 2:
        return 0.0
    idx = np.repeat(np.arange(e.m_modes), n.counts)
    sub = _pure_block(e)[np.ix_(idx, idx)]
    if e.d_scalar > 0.0:
        sub[np.diag_indices_from(sub)] = e.b[idx]
        h = haf_kernel(np.ascontiguousarray(sub), True)
    else:
        h = haf_kernel(np.ascontiguousarray(sub), False)
    return _finish(h * h, e.alpha_exp - 0.5 * e.logdet_q - _log_nfact(n.counts))


def lossy_event_probability(e: GbsEncoding, n) -> float:
    """Probability of ``n`` for a (possibly) mixed state, via the Hafnian of the ``2|n|`` reduced matrix."""
    if e.d_scalar > 0.0:
        raise DisplacedLossUnsupported("loss combined with displacement is not supported")
    n = as_event(n)
    m = e.m_modes
    if len(n) != m:
        raise LengthMismatch(f"event has {len(n)} modes, encoding has {m}")
    _check_total(e, n.total)
    idx = np.repeat(np.arange(m), n.counts)
    idx = np.concatenate([idx, idx + m])
    h = haf_kernel(np.ascontiguousarray(e.a_tilde[np.ix_(idx, idx)]), False)
    return _finish(h, -0.5 * e.logdet_q - _log_nfact(n.counts))


def probability(e: GbsEncoding, n) -> float:
    """Dispatch to the pure or lossy event formula."""
    return event_probability(e, n) if e.is_pure else lossy_event_probability(e, n)


def orbit_probability(e: GbsEncoding, o: Orbit) -> float:
    """Sum of event probabilities over every distinct permutation of the orbit across the modes."""
    parts = np.asarray(o.partition, dtype=np.int64)
    _check_total(e, o.total)
    if len(parts) > e.m_modes:
        return 0.0
    log_pref = -0.5 * e.logdet_q - _log_nfact(o.partition)
    if not e.is_pure:
        if e.d_scalar > 0.0:
            raise DisplacedLossUnsupported("loss combined with displacement is not supported")
        value = orbit_sum_kernel(np.ascontiguousarray(e.a_tilde), np.zeros(e.m_modes), parts, LOSSY)
    elif e.d_scalar > 0.0:
        value = orbit_sum_kernel(_pure_block(e), np.ascontiguousarray(e.b[: e.m_modes]), parts, LOOP_SQUARED)
        log_pref += e.alpha_exp
    else:
        if o.total % 2:
            return 0.0
        value = orbit_sum_kernel(_pure_block(e), np.zeros(e.m_modes), parts, PURE_SQUARED)
    return _finish(float(value), log_pref)


def orbit_probabilities(e: GbsEncoding, orbits) -> np.ndarray:
    return np.array([orbit_probability(e, o) for o in orbits], dtype=np.float64)


def meta_orbit_probability(e: GbsEncoding, mo: MetaOrbit) -> float:
    """Sum of orbit probabilities over the orbits of ``mo.total`` photons with largest count ``mo.max_count``."""
    orbits = [o for o in enumerate_orbits(mo.total, e.m_modes) if mo.contains(o)]
    return math.fsum(orbit_probability(e, o) for o in orbits)


def meta_from_orbit_probabilities(orbits, probs, metas) -> np.ndarray:
    """Aggregate already computed orbit probabilities into meta-orbit probabilities."""
    slot = {(mo.total, mo.max_count): i for i, mo in enumerate(metas)}
    buckets = [[] for _ in metas]
    for o, p in zip(orbits, probs):
        key = (o.total, o.max_count)
        if key in slot:
            buckets[slot[key]].append(p)
    return np.array([math.fsum(b) for b in buckets])


def truncated_mass(e: GbsEncoding, k: int) -> float:
    """Total probability of all events with at most ``k`` photons."""
    return math.fsum(orbit_probabilities(e, enumerate_orbits(k, e.m_modes)))
