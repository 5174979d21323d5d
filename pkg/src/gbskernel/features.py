"""Feature vectors from (meta-)orbit probabilities, sampling estimates, and graph kernels."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .distribution import (
    enumerate_meta_orbits,
    enumerate_orbits,
    meta_from_orbit_probabilities,
    orbit_probabilities,
)
from .encoding import GbsEncoding, apply_loss, encode
from .errors import ConfigMismatch, DimensionMismatch, KExceedsModes, OutOfRange
from .graphcore import ScaledGraph

COARSE_GRAININGS = ("orbit", "meta_orbit")


@dataclass(frozen=True)
class FeatureConfig:
    """Hyperparameters of the feature map (``rbf_delta`` is only used by kernels)."""

    k: int = 6
    d_scalar: float = 0.0
    coarse_graining: str = "orbit"
    nu: float = 0.0
    rbf_delta: float = 1.0

    def __post_init__(self):
        if self.k < 0:
            raise OutOfRange(f"k must be non-negative, got {self.k}")
        if self.d_scalar < 0:
            raise OutOfRange(f"displacement must be non-negative, got {self.d_scalar}")
        if not 0.0 <= self.nu <= 1.0:
            raise OutOfRange(f"loss must lie in [0, 1], got {self.nu}")
        if not self.rbf_delta > 0:
            raise OutOfRange(f"rbf_delta must be positive, got {self.rbf_delta}")
        if self.coarse_graining not in COARSE_GRAININGS:
            raise ValueError(f"coarse_graining must be one of {COARSE_GRAININGS}")

    def index_map(self) -> list:
        """Canonical feature descriptors; depends on ``k`` and the coarse-graining only."""
        if self.coarse_graining == "orbit":
            return enumerate_orbits(self.k, self.k)
        return enumerate_meta_orbits(self.k, self.k)

    @property
    def dimension(self) -> int:
        return len(self.index_map())

    def feature_key(self):
        """Fields that determine feature values (everything except the kernel width)."""
        return (self.k, self.d_scalar, self.coarse_graining, self.nu)


@dataclass(frozen=True, eq=False)
class FeatureVector:
    values: np.ndarray
    config: FeatureConfig
    index_map: tuple
    overflow: float = 0.0

    @property
    def labels(self) -> list[str]:
        return [x.label for x in self.index_map]

    def __len__(self):
        return len(self.values)


def exact_probabilities(e: GbsEncoding, cfg: FeatureConfig) -> tuple[np.ndarray, list]:
    """Canonical-order probabilities of the configured classes for an encoding."""
    orbits = enumerate_orbits(cfg.k, cfg.k)
    probs = orbit_probabilities(e, orbits)
    if cfg.coarse_graining == "orbit":
        return probs, orbits
    metas = enumerate_meta_orbits(cfg.k, cfg.k)
    return meta_from_orbit_probabilities(orbits, probs, metas), metas


def encoding_for(g: ScaledGraph, cfg: FeatureConfig) -> GbsEncoding:
    return apply_loss(encode(g, cfg.d_scalar), cfg.nu)


def feature_vector(g: ScaledGraph, cfg: FeatureConfig) -> FeatureVector:
    """Exact (meta-)orbit probabilities of ``g`` under ``cfg``.

    Events with more than ``cfg.k`` photons are dropped; their mass is kept in
    ``overflow``.
    """
    if cfg.k > g.num_nodes:
        raise KExceedsModes(f"k={cfg.k} exceeds the {g.num_nodes} modes of this graph")
    probs, index = exact_probabilities(encoding_for(g, cfg), cfg)
    overflow = max(0.0, 1.0 - math.fsum(probs))
    return FeatureVector(probs, cfg, tuple(index), overflow)


def required_samples(d_features: int, epsilon: float, delta: float) -> int:
    """Samples needed so the L1 error of a ``D``-outcome histogram is below ``epsilon`` w.p. ``1 - delta``."""
    if d_features < 1:
        raise OutOfRange("d_features must be at least 1")
    if not (0 < epsilon < 1 and 0 < delta < 1):
        raise OutOfRange("epsilon and delta must lie in (0, 1)")
    return math.ceil(2.0 * (math.log(2.0) * d_features + math.log(1.0 / delta)) / epsilon**2)


@dataclass(frozen=True, eq=False)
class SampleSet:
    """Outcomes drawn over the canonical index plus a trailing overflow bucket.

    ``sequence`` holds the drawn indices (``len(index_map)`` means overflow);
    ``counts`` the per-bucket tallies.
    """

    config: FeatureConfig
    index_map: tuple
    counts: np.ndarray
    sequence: np.ndarray | None = None
    seed: int | None = None

    @property
    def n_samples(self) -> float:
        return float(np.sum(self.counts))

    @property
    def outcomes(self) -> list:
        """Drawn outcomes as descriptors, ``None`` for overflow."""
        dim = len(self.index_map)
        return [self.index_map[i] if i < dim else None for i in self.sequence]


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based Philox stream; identical draws on every platform for a given seed."""
    return np.random.Generator(np.random.Philox(int(seed) & 0xFFFFFFFFFFFFFFFF))


def sample_events(e: GbsEncoding, cfg: FeatureConfig, n_samples: int, seed: int) -> SampleSet:
    """Draw i.i.d. outcomes by inverse CDF over the exact class distribution plus overflow."""
    if n_samples < 1:
        raise OutOfRange("n_samples must be at least 1")
    probs, index = exact_probabilities(e, cfg)
    cdf = np.cumsum(probs)
    u = make_rng(seed).random(n_samples)
    seq = np.searchsorted(cdf, u, side="right").astype(np.int64)
    counts = np.bincount(seq, minlength=len(index) + 1)
    return SampleSet(cfg, tuple(index), counts, seq, seed)


def empirical_features(samples: SampleSet, cfg: FeatureConfig) -> FeatureVector:
    """Relative frequencies over the canonical index; overflow reported separately, no smoothing."""
    if samples.config.feature_key() != cfg.feature_key():
        raise ConfigMismatch("samples were drawn under a different feature configuration")
    counts = np.asarray(samples.counts, dtype=np.float64)
    total = counts.sum()
    freq = counts / total
    return FeatureVector(freq[:-1], cfg, samples.index_map, float(freq[-1]))


def _values(f) -> np.ndarray:
    return np.asarray(f.values if isinstance(f, FeatureVector) else f, dtype=np.float64)


def _check_pair(f1, f2):
    if isinstance(f1, FeatureVector) and isinstance(f2, FeatureVector):
        if f1.config.feature_key() != f2.config.feature_key():
            raise ConfigMismatch("feature vectors come from different configurations")
    a, b = _values(f1), _values(f2)
    if a.shape != b.shape:
        raise DimensionMismatch(f"feature dimensions differ: {a.shape} vs {b.shape}")
    return a, b


def linear_kernel(f1, f2) -> float:
    a, b = _check_pair(f1, f2)
    return float(a @ b)


def rbf_kernel(f1, f2, delta: float) -> float:
    a, b = _check_pair(f1, f2)
    if not delta > 0:
        raise OutOfRange("delta must be positive")
    return math.exp(-float(np.sum((a - b) ** 2)) / (2.0 * delta**2))


@dataclass(frozen=True, eq=False)
class GramMatrix:
    values: np.ndarray
    kernel_kind: str
    config: FeatureConfig | None = None
    delta: float | None = None

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.values).min()) if len(self.values) else 0.0

    def is_psd(self, tol: float = 1e-8) -> bool:
        return self.min_eigenvalue() >= -tol

    def __len__(self):
        return len(self.values)


def standardize(features: np.ndarray) -> np.ndarray:
    """Column-wise z-scores; constant columns become zero."""
    mu = features.mean(axis=0)
    sd = features.std(axis=0)
    sd[sd == 0] = 1.0
    return (features - mu) / sd


def feature_matrix(features: Sequence) -> np.ndarray:
    if len(features) == 0:
        return np.zeros((0, 0))
    first = features[0]
    for f in features[1:]:
        _check_pair(first, f)
    return np.vstack([_values(f) for f in features])


def gram_matrix(features: Sequence, kind: str = "rbf", delta: float | None = None,
                standardized: bool = False) -> GramMatrix:
    """Pairwise kernel matrix; exact symmetry and unit rbf diagonal by construction."""
    f = feature_matrix(features)
    cfg = features[0].config if len(features) and isinstance(features[0], FeatureVector) else None
    if standardized and len(f):
        f = standardize(f)
    if kind == "linear":
        g = f @ f.T
        g = 0.5 * (g + g.T)
        return GramMatrix(g, "linear", cfg)
    if kind != "rbf":
        raise ValueError(f"unknown kernel kind {kind!r}")
    if delta is None:
        delta = cfg.rbf_delta if cfg is not None else 1.0
    if not delta > 0:
        raise OutOfRange("delta must be positive")
    n = len(f)
    sq = np.zeros((n, n))
    for i in range(n):
        sq[i, i + 1:] = np.sum((f[i + 1:] - f[i]) ** 2, axis=1)
    sq = sq + sq.T
    g = np.exp(-sq / (2.0 * delta**2))
    return GramMatrix(g, "rbf", cfg, delta)
