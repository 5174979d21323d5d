"""Seeded random graphs and a molecule-like two-class dataset for desk-scale benchmarks."""

from __future__ import annotations

import numpy as np

from .datasets import RawDataset, RawGraph
from .graphcore import Graph, validate_graph

AROMATIC, SINGLE, DOUBLE = "0", "1", "2"


def random_graph(n: int, p: float, seed: int, weighted: bool = False) -> Graph:
    """Erdos-Renyi ``G(n, p)``; with ``weighted`` the edges get uniform(0.1, 1) weights."""
    rng = np.random.default_rng(seed)
    a = np.triu(rng.random((n, n)) < p, 1).astype(np.float64)
    if weighted:
        a *= rng.uniform(0.1, 1.0, size=(n, n))
    return validate_graph(a + a.T)


def random_symmetric(n: int, seed: int, zero_diagonal: bool = True) -> np.ndarray:
    rng = np.random.default_rng(seed)
    a = rng.uniform(-1.0, 1.0, size=(n, n))
    a = a + a.T
    if zero_diagonal:
        np.fill_diagonal(a, 0.0)
    return a


class _Molecule:
    def __init__(self):
        self.n = 0
        self.edges = {}

    def add(self):
        self.n += 1
        return self.n - 1

    def bond(self, i, j, label):
        self.edges[(min(i, j), max(i, j))] = label

    def fused_rings(self, count):
        """Linearly fused six-rings (benzene, naphthalene, anthracene, ...); returns ring atoms."""
        ring = [self.add() for _ in range(6)]
        for t in range(6):
            self.bond(ring[t], ring[(t + 1) % 6], AROMATIC)
        atoms = list(ring)
        shared = (ring[2], ring[3])
        for _ in range(count - 1):
            new = [self.add() for _ in range(4)]
            path = [shared[0]] + new + [shared[1]]
            for u, v in zip(path, path[1:]):
                self.bond(u, v, AROMATIC)
            atoms.extend(new)
            shared = (new[1], new[2])
        return atoms

    def chain(self, anchor, length):
        prev = anchor
        for _ in range(length):
            cur = self.add()
            self.bond(prev, cur, SINGLE)
            prev = cur

    def nitro(self, anchor):
        n = self.add()
        self.bond(anchor, n, SINGLE)
        for _ in range(2):
            self.bond(n, self.add(), DOUBLE)


def molecule_dataset(n_graphs: int = 188, seed: int = 0, positive_share: float = 0.665) -> RawDataset:
    """Aromatic-compound-like graphs in two classes.

    Class 1 tends to carry more fused rings and a nitro-like branch; class 0
    fewer rings and alkyl chains. The class tendencies overlap on purpose, so
    the problem is learnable but not separable.
    """
    rng = np.random.default_rng(seed)
    graphs = []
    for _ in range(n_graphs):
        label = 1 if rng.random() < positive_share else 0
        mol = _Molecule()
        rings = rng.choice([1, 2, 3], p=[0.2, 0.5, 0.3] if label else [0.55, 0.35, 0.1])
        atoms = mol.fused_rings(int(rings))
        free = [a for a in atoms]
        rng.shuffle(free)
        n_nitro = int(rng.random() < (0.75 if label else 0.25))
        for _ in range(n_nitro):
            mol.nitro(free.pop())
        for _ in range(int(rng.integers(0, 3))):
            mol.chain(free.pop(), int(rng.integers(1, 4 if label else 5)))
        graphs.append(RawGraph(mol.n, dict(mol.edges), label))
    return RawDataset("MOLSYN", graphs)


def density_dataset(n_per_class: int = 30, nodes: tuple = (8, 12), seed: int = 0) -> RawDataset:
    """Two classes of random graphs that differ in edge density (dense = class 1)."""
    rng = np.random.default_rng(seed)
    graphs = []
    for label, p in ((0, 0.2), (1, 0.6)):
        for _ in range(n_per_class):
            n = int(rng.integers(nodes[0], nodes[1] + 1))
            a = np.triu(rng.random((n, n)) < p, 1)
            edges = {(int(i), int(j)): None for i, j in zip(*np.nonzero(a))}
            graphs.append(RawGraph(n, edges, label))
    return RawDataset("DENSITY", graphs)
