"""Kernel SVM, double cross-validation and graphlet comparison features."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from itertools import combinations, permutations
from typing import Sequence

import numpy as np

from ._accel import njit
from .distribution import Orbit
from .errors import DegenerateLabels, NotConverged, NotPsd, NotSinglePhotonOrbit, TooFewGraphs, UnsupportedSize
from .features import FeatureConfig, GramMatrix, feature_vector, gram_matrix
from .graphcore import ScaledGraph
from .hafnian import count_r_matchings

SMO_TOL = 1e-3
PSD_TOL = 1e-8
TAU = 1e-12


@njit
def smo_kernel(k, y, c, tol, max_iter):
    n = k.shape[0]
    alpha = np.zeros(n)
    grad = -np.ones(n)
    it = 0
    gap = 0.0
    while it < max_iter:
        gmax = -np.inf
        gmin = np.inf
        i = -1
        j = -1
        for t in range(n):
            v = -y[t] * grad[t]
            if (y[t] > 0 and alpha[t] < c) or (y[t] < 0 and alpha[t] > 0):
                if v > gmax:
                    gmax = v
                    i = t
            if (y[t] > 0 and alpha[t] > 0) or (y[t] < 0 and alpha[t] < c):
                if v < gmin:
                    gmin = v
                    j = t
        gap = gmax - gmin
        if i < 0 or j < 0 or gap < tol:
            break
        quad = k[i, i] + k[j, j] - 2.0 * k[i, j]
        if quad < TAU:
            quad = TAU
        lam = gap / quad
        bi = c - alpha[i] if y[i] > 0 else alpha[i]
        bj = alpha[j] if y[j] > 0 else c - alpha[j]
        ai_new = alpha[i] + y[i] * lam
        aj_new = alpha[j] - y[j] * lam
        if lam >= bi:
            lam = bi
            ai_new = c if y[i] > 0 else 0.0
            aj_new = alpha[j] - y[j] * lam
        if lam >= bj:
            lam = bj
            aj_new = 0.0 if y[j] > 0 else c
            ai_new = alpha[i] + y[i] * lam
            if lam == bi:
                ai_new = c if y[i] > 0 else 0.0
        alpha[i] = min(max(ai_new, 0.0), c)
        alpha[j] = min(max(aj_new, 0.0), c)
        for t in range(n):
            grad[t] += y[t] * lam * (k[t, i] - k[t, j])
        it += 1
    # offset: mean of y*grad over free vectors, else midpoint of the feasible interval
    ub = np.inf
    lb = -np.inf
    s = 0.0
    nfree = 0
    for t in range(n):
        yg = y[t] * grad[t]
        if alpha[t] >= c:
            if y[t] < 0:
                ub = min(ub, yg)
            else:
                lb = max(lb, yg)
        elif alpha[t] <= 0.0:
            if y[t] > 0:
                ub = min(ub, yg)
            else:
                lb = max(lb, yg)
        else:
            nfree += 1
            s += yg
    rho = s / nfree if nfree > 0 else 0.5 * (ub + lb)
    return alpha, -rho, it, gap


@dataclass
class BinarySvm:
    """One C-SVM: ``decision(x) = sum_t alpha_t y_t K(t, x) + bias``; positive -> ``classes[1]``."""

    alpha: np.ndarray
    y: np.ndarray
    bias: float
    classes: tuple
    c_penalty: float
    n_iter: int
    kkt_gap: float

    def decision_function(self, k_test_train) -> np.ndarray:
        return np.asarray(k_test_train) @ (self.alpha * self.y) + self.bias


@dataclass
class SvmModel:
    classes: tuple
    machines: list

    def decision_function(self, k_test_train) -> np.ndarray:
        """Shape ``(n_test,)`` for two classes, ``(n_test, n_classes)`` for one-vs-rest."""
        if len(self.machines) == 1:
            return self.machines[0].decision_function(k_test_train)
        return np.column_stack([m.decision_function(k_test_train) for m in self.machines])

    def predict(self, k_test_train) -> np.ndarray:
        dec = self.decision_function(k_test_train)
        if len(self.machines) == 1:
            return np.where(dec > 0, self.classes[1], self.classes[0])
        # argmax returns the first maximum: ties go to the lowest class id
        return np.asarray(self.classes)[np.argmax(dec, axis=1)]


def _gram_values(gram) -> np.ndarray:
    return np.ascontiguousarray(gram.values if isinstance(gram, GramMatrix) else gram, dtype=np.float64)


def _train_binary(k, pos_mask, classes, c_penalty, tol, max_iter):
    y = np.where(pos_mask, 1.0, -1.0)
    alpha, bias, n_iter, gap = smo_kernel(k, y, float(c_penalty), tol, max_iter)
    if n_iter >= max_iter:
        raise NotConverged(f"SMO hit {max_iter} iterations with KKT gap {gap:.3e}")
    return BinarySvm(alpha, y, float(bias), classes, float(c_penalty), int(n_iter), float(gap))


def svm_train(gram, labels, c_penalty: float, tol: float = SMO_TOL, max_iter: int = 1_000_000,
              check_psd: bool = True) -> SvmModel:
    """Fit a C-SVM on a precomputed kernel by sequential minimal optimisation.

    Working pairs are chosen by maximal KKT violation; training stops once the
    violation drops below ``tol``. More than two classes are handled one-vs-rest.
    """
    k = _gram_values(gram)
    labels = np.asarray(labels)
    if k.shape != (len(labels), len(labels)):
        raise ValueError(f"gram shape {k.shape} does not match {len(labels)} labels")
    if check_psd and len(k) and np.linalg.eigvalsh(k).min() < -PSD_TOL:
        raise NotPsd("gram matrix is not positive semi-definite")
    classes = tuple(sorted(set(labels.tolist())))
    if len(classes) < 2:
        raise DegenerateLabels("training labels contain a single class")
    if len(classes) == 2:
        return SvmModel(classes, [_train_binary(k, labels == classes[1], classes, c_penalty, tol, max_iter)])
    machines = [_train_binary(k, labels == cl, (None, cl), c_penalty, tol, max_iter) for cl in classes]
    return SvmModel(classes, machines)


@dataclass(frozen=True)
class CvProtocol:
    outer_folds: int = 10
    inner_folds: int = 10
    repeats: int = 10
    c_grid: tuple = tuple(np.logspace(-4, 3, 8).tolist())
    seed: int = 0


def _rng(*key) -> np.random.Generator:
    ss = np.random.SeedSequence([int(x) & 0xFFFFFFFF for x in key])
    return np.random.Generator(np.random.Philox(ss))


def stratified_folds(labels, n_folds: int, seed, *stream) -> np.ndarray:
    """Fold id per sample: each class is shuffled and dealt round-robin across folds."""
    labels = np.asarray(labels)
    rng = _rng(seed, *stream)
    folds = np.empty(len(labels), dtype=np.int64)
    start = 0
    for cl in sorted(set(labels.tolist())):
        idx = np.flatnonzero(labels == cl)
        idx = idx[rng.permutation(len(idx))]
        folds[idx] = (start + np.arange(len(idx))) % n_folds
        start = (start + len(idx)) % n_folds
    return folds


class _Constant:
    def __init__(self, label):
        self.label = label

    def predict(self, k_test_train):
        return np.full(len(k_test_train), self.label, dtype=object)


def _fit(k, labels, c):
    try:
        return svm_train(k, labels, c, check_psd=False)
    except DegenerateLabels:
        return _Constant(labels[0])


def _accuracy(model, k_test_train, labels) -> float:
    return float(np.mean(model.predict(k_test_train) == labels))


def _select_c(k, labels, protocol: CvProtocol, *stream) -> float:
    folds = stratified_folds(labels, protocol.inner_folds, protocol.seed, *stream)
    best_c, best_acc = None, -1.0
    for c in sorted(protocol.c_grid):
        accs = []
        for f in range(protocol.inner_folds):
            te = folds == f
            tr = ~te
            if not te.any() or not tr.any():
                continue
            model = _fit(k[np.ix_(tr, tr)], labels[tr], c)
            accs.append(_accuracy(model, k[np.ix_(te, tr)], labels[te]))
        acc = float(np.mean(accs))
        if acc > best_acc:
            best_c, best_acc = c, acc
    return best_c


@dataclass
class CvResult:
    mean: float
    std: float
    repeat_accuracies: list
    fold_accuracies: list
    chosen_c: list
    protocol: dict = field(default_factory=dict)
    majority_baseline: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)


def cross_validate_gram(gram, labels, protocol: CvProtocol = CvProtocol()) -> CvResult:
    """Repeated double cross-validation on a precomputed kernel.

    The inner loop picks ``C`` from ``protocol.c_grid`` by mean inner accuracy
    (ties -> smallest ``C``); the outer loop scores that choice on held-out data.
    """
    k = _gram_values(gram)
    labels = np.asarray(labels)
    classes = sorted(set(labels.tolist()))
    if len(classes) < 2:
        raise TooFewGraphs("need at least two classes")
    if len(labels) < 20:
        raise TooFewGraphs(f"need at least 20 graphs, got {len(labels)}")
    if np.linalg.eigvalsh(k).min() < -PSD_TOL:
        raise NotPsd("gram matrix is not positive semi-definite")
    repeat_acc, fold_acc, chosen = [], [], []
    for r in range(protocol.repeats):
        outer = stratified_folds(labels, protocol.outer_folds, protocol.seed, r)
        accs = []
        for f in range(protocol.outer_folds):
            te = outer == f
            tr = ~te
            if not te.any():
                continue
            k_tr = k[np.ix_(tr, tr)]
            c = _select_c(k_tr, labels[tr], protocol, r, f)
            model = _fit(k_tr, labels[tr], c)
            accs.append(_accuracy(model, k[np.ix_(te, tr)], labels[te]))
            chosen.append(c)
        fold_acc.append(accs)
        repeat_acc.append(float(np.mean(accs)))
    counts = [int(np.sum(labels == cl)) for cl in classes]
    return CvResult(
        mean=float(np.mean(repeat_acc)),
        std=float(np.std(repeat_acc)),
        repeat_accuracies=repeat_acc,
        fold_accuracies=fold_acc,
        chosen_c=chosen,
        protocol={**asdict(protocol), "c_grid": list(protocol.c_grid), "stratified": True,
                  "multiclass": "one-vs-rest", "c_tie_break": "smallest"},
        majority_baseline=max(counts) / len(labels),
    )


def double_cross_validate(bundle, cfg: FeatureConfig, protocol: CvProtocol = CvProtocol(),
                          kernel: str = "rbf") -> CvResult:
    """Features -> Gram matrix -> repeated double cross-validation for a preprocessed dataset."""
    if len(bundle.graphs) < 20:
        raise TooFewGraphs(f"need at least 20 graphs, got {len(bundle.graphs)}")
    feats = [feature_vector(g, cfg) for g in bundle.graphs]
    gram = gram_matrix(feats, kernel, cfg.rbf_delta)
    return cross_validate_gram(gram, bundle.labels, protocol)


# ---------------------------------------------------------------- graphlets

GRAPHLET_SIZES = (3, 4, 5)


def _pairs(n):
    return list(combinations(range(n), 2))




@lru_cache(maxsize=None)
def _graphlet_table(n: int):
    """Map every labelled graph bitmask on ``n`` nodes to its isomorphism-class index.

    Classes are ordered by edge count, then canonical code (minimum bitmask over
    all node relabellings).
    """
    pairs = _pairs(n)
    pos = {p: b for b, p in enumerate(pairs)}
    perm_maps = []
    for perm in permutations(range(n)):
        perm_maps.append([pos[tuple(sorted((perm[i], perm[j])))] for i, j in pairs])
    canon = np.empty(1 << len(pairs), dtype=np.int64)
    for bits in range(1 << len(pairs)):
        best = None
        for pm in perm_maps:
            code = 0
            for b in range(len(pairs)):
                if bits >> b & 1:
                    code |= 1 << pm[b]
            if best is None or code < best:
                best = code
        canon[bits] = best
    reps = sorted(set(canon.tolist()), key=lambda c: (bin(c).count("1"), c))
    index = {c: i for i, c in enumerate(reps)}
    return np.array([index[c] for c in canon.tolist()], dtype=np.int64), tuple(reps)


def graphlet_classes(n: int) -> list[np.ndarray]:
    """Representative 0/1 adjacency of every isomorphism class on ``n`` nodes, in count order."""
    if n not in GRAPHLET_SIZES:
        raise UnsupportedSize(f"graphlet size must be one of {GRAPHLET_SIZES}")
    _, reps = _graphlet_table(n)
    out = []
    for code in reps:
        a = np.zeros((n, n))
        for b, (i, j) in enumerate(_pairs(n)):
            if code >> b & 1:
                a[i, j] = a[j, i] = 1.0
        out.append(a)
    return out


def graphlet_count_features(g, sizes: Sequence[int] = GRAPHLET_SIZES) -> dict[int, np.ndarray]:
    """Induced-subgraph counts per isomorphism class for every requested graphlet size.

    Edge presence is ``weight != 0``; counts are exhaustive over node subsets.
    """
    a = np.asarray(getattr(g, "adjacency", g)) != 0
    out = {}
    for n in sizes:
        if n not in GRAPHLET_SIZES:
            raise UnsupportedSize(f"graphlet size must be one of {GRAPHLET_SIZES}")
        table, reps = _graphlet_table(n)
        pairs = _pairs(n)
        counts = np.zeros(len(reps), dtype=np.int64)
        for subset in combinations(range(a.shape[0]), n):
            bits = 0
            for b, (i, j) in enumerate(pairs):
                if a[subset[i], subset[j]]:
                    bits |= 1 << b
            counts[table[bits]] += 1
        out[n] = counts
    return out


def gbs_feature_as_squared_matchings(g: ScaledGraph, o: Orbit) -> float:
    """Sum over the orbit's events of the squared weighted perfect-matching count of the induced subgraph.

    Uses only edge-set backtracking on the rescaled weights, no Hafnians.
    """
    if not isinstance(o, Orbit):
        o = Orbit(tuple(o))
    if not o.is_single_photon:
        raise NotSinglePhotonOrbit(f"{o.label} has a detector with more than one photon")
    t = o.total
    if t % 2:
        return 0.0
    a = g.adjacency
    terms = []
    for subset in combinations(range(g.num_nodes), t):
        pm = count_r_matchings(a[np.ix_(subset, subset)], t // 2)
        terms.append(pm * pm)
    return math.fsum(terms)
