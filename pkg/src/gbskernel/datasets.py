"""Reader/writer for the TU graph-benchmark text format and dataset preprocessing.

Files for a dataset ``NAME`` in one directory:

``NAME_A.txt``
    one edge per line, ``u, v`` with 1-based global node ids.
``NAME_graph_indicator.txt``
    line ``i`` holds the 1-based graph id of node ``i``.
``NAME_graph_labels.txt``
    line ``g`` holds the class label of graph ``g``.
``NAME_edge_labels.txt`` (optional)
    one label per line, aligned with ``NAME_A.txt``.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import (
    AsymmetricEdgeLabels,
    DanglingNode,
    DatasetError,
    MalformedLine,
    MissingFile,
    UnknownRule,
)
from .graphcore import ScaledGraph, dataset_scale_factor, validate_graph

MIN_NODES = 6
MAX_NODES = 25


@dataclass
class RawGraph:
    """Graph as read from disk: node count, undirected edges ``(i, j)`` with ``i < j`` -> label."""

    num_nodes: int
    edges: dict[tuple[int, int], str | None]
    label: int | str


@dataclass
class RawDataset:
    name: str
    graphs: list[RawGraph]

    @property
    def labels(self):
        return [g.label for g in self.graphs]


def _read_lines(path: Path) -> list[tuple[int, str]]:
    if not path.is_file():
        raise MissingFile(f"missing dataset file {path}")
    lines = path.read_text(encoding="utf-8").split("\n")
    while lines and not lines[-1].strip():
        lines.pop()
    out = []
    for no, line in enumerate(lines, start=1):
        text = line.strip()
        if not text:
            raise MalformedLine(path, no, "blank line")
        out.append((no, text))
    return out


def _parse_int(path, no, text):
    try:
        return int(text)
    except ValueError:
        raise MalformedLine(path, no, f"expected an integer, got {text!r}") from None


def _parse_label(text):
    try:
        return int(text)
    except ValueError:
        return text


def parse_tu_dataset(directory, name: str) -> RawDataset:
    """Assemble undirected graphs and class labels from the four-file text format.

    Node labels and attributes are ignored. An edge may be listed in either or
    both directions.
    """
    directory = Path(directory)
    a_path = directory / f"{name}_A.txt"
    ind_path = directory / f"{name}_graph_indicator.txt"
    lab_path = directory / f"{name}_graph_labels.txt"
    el_path = directory / f"{name}_edge_labels.txt"

    label_lines = _read_lines(lab_path)
    labels = [_parse_label(text) for _, text in label_lines]
    n_graphs = len(labels)

    node_graph = []
    for no, text in _read_lines(ind_path):
        gid = _parse_int(ind_path, no, text)
        if not 1 <= gid <= n_graphs:
            raise MalformedLine(ind_path, no, f"graph id {gid} outside 1..{n_graphs}")
        if node_graph and gid < node_graph[-1]:
            raise MalformedLine(ind_path, no, "graph ids must be non-decreasing")
        node_graph.append(gid - 1)
    node_graph = np.asarray(node_graph, dtype=np.int64)
    sizes = np.bincount(node_graph, minlength=n_graphs)
    for g, size in enumerate(sizes):
        if size == 0:
            raise MalformedLine(lab_path, label_lines[g][0], f"graph {g + 1} has no nodes")
    offsets = np.concatenate([[0], np.cumsum(sizes)])

    edge_lines = _read_lines(a_path)
    edge_labels = None
    if el_path.exists():
        el_lines = _read_lines(el_path)
        if len(el_lines) != len(edge_lines):
            raise MalformedLine(el_path, len(el_lines), f"{len(el_lines)} edge labels for {len(edge_lines)} edges")
        edge_labels = [text for _, text in el_lines]

    graphs = [RawGraph(int(s), {}, lab) for s, lab in zip(sizes, labels)]
    n_nodes = len(node_graph)
    for pos, (no, text) in enumerate(edge_lines):
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 2:
            raise MalformedLine(a_path, no, f"expected 'u, v', got {text!r}")
        u, v = (_parse_int(a_path, no, p) for p in parts)
        for x in (u, v):
            if not 1 <= x <= n_nodes:
                raise DanglingNode(f"{a_path}:{no}: node {x} is not assigned to any graph")
        u, v = u - 1, v - 1
        if node_graph[u] != node_graph[v]:
            raise DanglingNode(f"{a_path}:{no}: edge joins nodes of graphs {node_graph[u] + 1} and {node_graph[v] + 1}")
        if u == v:
            raise MalformedLine(a_path, no, f"self-loop on node {u + 1}")
        g = int(node_graph[u])
        i, j = sorted((u - offsets[g], v - offsets[g]))
        lab = edge_labels[pos] if edge_labels is not None else None
        key = (int(i), int(j))
        edges = graphs[g].edges
        if key in edges and edges[key] != lab:
            raise AsymmetricEdgeLabels(f"{a_path}:{no}: conflicting labels {edges[key]!r} and {lab!r} for edge {key}")
        edges[key] = lab
    return RawDataset(name, graphs)


def write_tu_dataset(raw: RawDataset, directory, name: str | None = None) -> Path:
    """Write ``raw`` in the four-file format, listing every edge in both directions."""
    name = name or raw.name
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    all_labels = [lab for g in raw.graphs for lab in g.edges.values()]
    has_labels = bool(all_labels) and all(lab is not None for lab in all_labels)
    a_lines, el_lines, ind_lines = [], [], []
    offset = 0
    for gid, g in enumerate(raw.graphs, start=1):
        ind_lines.extend([str(gid)] * g.num_nodes)
        for (i, j), lab in sorted(g.edges.items()):
            for u, v in ((i, j), (j, i)):
                a_lines.append(f"{u + offset + 1}, {v + offset + 1}")
                el_lines.append(str(lab))
        offset += g.num_nodes
    (directory / f"{name}_A.txt").write_text("\n".join(a_lines) + "\n", encoding="utf-8")
    (directory / f"{name}_graph_indicator.txt").write_text("\n".join(ind_lines) + "\n", encoding="utf-8")
    (directory / f"{name}_graph_labels.txt").write_text(
        "\n".join(str(g.label) for g in raw.graphs) + "\n", encoding="utf-8")
    if has_labels:
        (directory / f"{name}_edge_labels.txt").write_text("\n".join(el_lines) + "\n", encoding="utf-8")
    return directory


@dataclass(frozen=True)
class LabelTranslationRule:
    """Maps raw edge labels to weights and optionally restricts the graph classes kept."""

    name: str
    weight: Callable[[str | None], float]
    keep_classes: frozenset | None = None


def _unit(label):
    return 1.0


def bond_rule(no_bond_labels=()) -> LabelTranslationRule:
    """Chemical bonds (single/double/triple/aromatic) -> 1; labels meaning "no bond" -> 0."""
    no_bond = {str(x) for x in no_bond_labels}
    return LabelTranslationRule("bond", lambda lab: 0.0 if lab is not None and str(lab) in no_bond else 1.0)


def _valence(label):
    if label is not None and str(label) not in {"0", "1", "2"}:
        raise DatasetError(f"valence rule got unexpected edge label {label!r}")
    return 1.0


def valence_rule() -> LabelTranslationRule:
    return LabelTranslationRule("valence", _valence)


def fingerprint_rule() -> LabelTranslationRule:
    return LabelTranslationRule("fingerprint", _unit, frozenset({0, 4, 5}))


def weight_map_rule(path) -> LabelTranslationRule:
    """User rule from a JSON file ``{"weights": {label: weight}, "keep_classes": [...]}``."""
    cfg = json.loads(Path(path).read_text(encoding="utf-8"))
    weights = {str(k): float(v) for k, v in cfg.get("weights", {}).items()}
    default = cfg.get("default")

    def weight(label):
        key = "" if label is None else str(label)
        if key in weights:
            return weights[key]
        if default is None:
            raise DatasetError(f"weight map has no entry for edge label {label!r}")
        return float(default)

    keep = cfg.get("keep_classes")
    return LabelTranslationRule(f"map:{Path(path).name}", weight, frozenset(keep) if keep is not None else None)


RULES = {
    "none": lambda: LabelTranslationRule("none", _unit),
    "bond": bond_rule,
    "valence": valence_rule,
    "fingerprint": fingerprint_rule,
}

DATASET_RULES = {
    "MUTAG": "bond",
    "PTC_FM": "bond",
    "BZR_MD": "bond",
    "COX2_MD": "bond",
    "ER_MD": "bond",
    "AIDS": "valence",
    "FINGERPRINT": "fingerprint",
}


def get_rule(rule) -> LabelTranslationRule:
    if isinstance(rule, LabelTranslationRule):
        return rule
    if rule in RULES:
        return RULES[rule]()
    if isinstance(rule, str) and rule.endswith(".json"):
        return weight_map_rule(rule)
    raise UnknownRule(f"unknown label translation rule {rule!r}; choose from {sorted(RULES)}")


@dataclass
class PreprocessReport:
    dataset: str
    rule: str
    n_input: int
    excluded_by_size: int
    excluded_by_class: int
    n_retained: int
    min_nodes: int
    max_nodes: int
    scale_factor: float
    scale_overridden: bool = False
    class_counts: dict = field(default_factory=dict)

    @property
    def excluded_fraction(self) -> float:
        return 1.0 - self.n_retained / self.n_input if self.n_input else 0.0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["excluded_fraction"] = self.excluded_fraction
        d["class_counts"] = {str(k): v for k, v in self.class_counts.items()}
        return d

    def write(self, path):
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")


@dataclass
class DatasetBundle:
    name: str
    graphs: list[ScaledGraph]
    labels: list
    report: PreprocessReport
    raw: list[RawGraph]

    @property
    def c(self) -> float:
        return self.report.scale_factor

    def to_raw(self) -> RawDataset:
        return RawDataset(self.name, list(self.raw))

    def __len__(self):
        return len(self.graphs)


def raw_adjacency(g: RawGraph, rule: LabelTranslationRule) -> np.ndarray:
    a = np.zeros((g.num_nodes, g.num_nodes))
    for (i, j), lab in g.edges.items():
        w = rule.weight(lab)
        a[i, j] = a[j, i] = w
    return a


def preprocess(raw: RawDataset, rule="none", c_override: float | None = None,
               min_nodes: int = MIN_NODES, max_nodes: int = MAX_NODES) -> DatasetBundle:
    """Select graphs by size, translate edge labels to weights and rescale with one global constant."""
    rule = get_rule(rule)
    sized = [g for g in raw.graphs if min_nodes <= g.num_nodes <= max_nodes]
    kept = sized if rule.keep_classes is None else [g for g in sized if g.label in rule.keep_classes]
    graphs = [validate_graph(raw_adjacency(g, rule)) for g in kept]
    c = dataset_scale_factor(graphs) if c_override is None else float(c_override)
    scaled = [ScaledGraph(g, c) for g in graphs]
    counts = {}
    for g in kept:
        counts[g.label] = counts.get(g.label, 0) + 1
    report = PreprocessReport(
        dataset=raw.name,
        rule=rule.name,
        n_input=len(raw.graphs),
        excluded_by_size=len(raw.graphs) - len(sized),
        excluded_by_class=len(sized) - len(kept),
        n_retained=len(kept),
        min_nodes=min_nodes,
        max_nodes=max_nodes,
        scale_factor=c,
        scale_overridden=c_override is not None,
        class_counts=dict(sorted(counts.items(), key=lambda kv: str(kv[0]))),
    )
    return DatasetBundle(raw.name, scaled, [g.label for g in kept], report, kept)


def load_tu_dataset(directory, name: str, rule=None, **kwargs) -> DatasetBundle:
    if rule is None:
        rule = DATASET_RULES.get(name, "none")
    return preprocess(parse_tu_dataset(directory, name), rule, **kwargs)


def load_adjacency_csv(path):
    """Read a single graph stored as a dense comma-separated adjacency matrix."""
    path = Path(path)
    if not path.is_file():
        raise MissingFile(f"missing graph file {path}")
    rows = []
    for no, text in _read_lines(path):
        try:
            rows.append([float(x) for x in text.split(",")])
        except ValueError:
            raise MalformedLine(path, no, "non-numeric entry") from None
    return validate_graph(np.array(rows))
