"""Graphs, dataset-wide rescaling and extended induced subgraphs."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import EmptyDataset, EmptyMatrix, LengthMismatch, NotSymmetric, SelfLoop, SpectralBoundViolated
from .linalg import spectral_radius

SYMMETRY_TOL = 1e-12
SCALE_EPS = 1e-8


def _frozen(a):
    a = np.array(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Graph:
    """Simple undirected graph stored as a dense symmetric weighted adjacency matrix."""

    adjacency: np.ndarray

    @property
    def num_nodes(self) -> int:
        return self.adjacency.shape[0]

    @property
    def edges(self) -> list[tuple[int, int, float]]:
        iu, ju = np.nonzero(np.triu(self.adjacency, 1))
        return [(int(i), int(j), float(self.adjacency[i, j])) for i, j in zip(iu, ju)]

    @property
    def num_edges(self) -> int:
        return int(np.count_nonzero(np.triu(self.adjacency, 1)))

    def spectral_norm(self) -> float:
        return spectral_radius(self.adjacency)

    def permuted(self, perm: Sequence[int]) -> "Graph":
        """Relabel nodes so that new node ``i`` is old node ``perm[i]``."""
        p = np.asarray(perm)
        return Graph(_frozen(self.adjacency[np.ix_(p, p)]))

    def __eq__(self, other):
        return isinstance(other, Graph) and np.array_equal(self.adjacency, other.adjacency)

    def __hash__(self):
        return hash(self.adjacency.tobytes())


@dataclass(frozen=True, eq=False)
class ScaledGraph:
    """A graph together with the rescaling constant ``c`` that bounds its spectrum."""

    graph: Graph
    c: float
    s_max: float = field(default=None)

    def __post_init__(self):
        if self.s_max is None:
            object.__setattr__(self, "s_max", self.graph.spectral_norm())
        if not self.c > 0:
            raise SpectralBoundViolated(f"scale factor must be positive, got {self.c}")
        if self.c * self.s_max >= 1.0:
            raise SpectralBoundViolated(f"c * s_max = {self.c * self.s_max} >= 1")

    @property
    def num_nodes(self) -> int:
        return self.graph.num_nodes

    @property
    def adjacency(self) -> np.ndarray:
        """The rescaled adjacency ``c * A``."""
        return self.c * self.graph.adjacency


@dataclass(frozen=True)
class PhotonEvent:
    counts: tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(x) for x in self.counts)
        if any(x < 0 for x in counts):
            raise ValueError(f"photon counts must be non-negative: {counts}")
        object.__setattr__(self, "counts", counts)

    @property
    def total(self) -> int:
        return sum(self.counts)

    def __len__(self):
        return len(self.counts)


def as_event(n) -> PhotonEvent:
    return n if isinstance(n, PhotonEvent) else PhotonEvent(tuple(n))


def validate_graph(adjacency) -> Graph:
    """Check a square matrix describes a simple graph and return it as a :class:`Graph`.

    The accepted matrix is symmetrised by averaging so downstream code sees
    exact symmetry.
    """
    a = np.asarray(adjacency, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"adjacency must be square, got shape {a.shape}")
    if a.shape[0] == 0:
        raise EmptyMatrix("adjacency matrix has size 0")
    if not np.all(np.isfinite(a)):
        raise ValueError("adjacency has non-finite entries")
    if np.any(np.diag(a) != 0.0):
        raise SelfLoop(f"nonzero diagonal at nodes {np.flatnonzero(np.diag(a)).tolist()}")
    if np.max(np.abs(a - a.T)) > SYMMETRY_TOL:
        raise NotSymmetric(f"max asymmetry {np.max(np.abs(a - a.T)):.3e}")
    return Graph(_frozen(0.5 * (a + a.T)))


def dataset_scale_factor(graphs: Sequence[Graph]) -> float:
    """Common rescaling constant ``min(1, 1 / (max s_max + 1e-8))`` for a dataset."""
    if len(graphs) == 0:
        raise EmptyDataset("cannot scale an empty dataset")
    s = max(g.spectral_norm() for g in graphs)
    if s == 0.0:
        return 1.0
    return min(1.0, 1.0 / (s + SCALE_EPS))


def scale_dataset(graphs: Sequence[Graph], c: float | None = None) -> list[ScaledGraph]:
    if c is None:
        c = dataset_scale_factor(graphs)
    return [ScaledGraph(g, c) for g in graphs]


def extended_subgraph(g: ScaledGraph, n) -> np.ndarray:
    """Rescaled adjacency of the extended induced subgraph selected by event ``n``.

    Node ``j`` appears ``n[j]`` times; copies keep all edges to other nodes
    but are not connected to each other.
    """
    n = as_event(n)
    if len(n) != g.num_nodes:
        raise LengthMismatch(f"event has {len(n)} modes, graph has {g.num_nodes} nodes")
    idx = np.repeat(np.arange(g.num_nodes), n.counts)
    return g.adjacency[np.ix_(idx, idx)]


def doubled_adjacency(g: ScaledGraph) -> np.ndarray:
    m = g.num_nodes
    a = g.adjacency
    out = np.zeros((2 * m, 2 * m))
    out[:m, :m] = a
    out[m:, m:] = a
    return out
