"""Command-line interface.

Exit codes
----------
0   success
1   other library error
2   usage error (bad flags)
10  graph validation (NotSymmetric, SelfLoop, EmptyMatrix, EmptyDataset, LengthMismatch)
11  combinatorics (OddSize, TooLarge, NotPositiveDefinite)
12  encoding (SpectralBoundViolated, SingularMatrix, EigenFailure)
13  OutOfRange
14  distribution (DisplacedLossUnsupported, LossyEncodingRequiresGeneralPath)
15  features / kernels (KExceedsModes, ConfigMismatch, DimensionMismatch)
16  dataset files (MissingFile, MalformedLine, DanglingNode, AsymmetricEdgeLabels, UnknownRule)
17  benchmark (NotPsd, DegenerateLabels, NotConverged, TooFewGraphs, UnsupportedSize)
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .bench import CvProtocol, cross_validate_gram
from .datasets import DATASET_RULES, load_adjacency_csv, parse_tu_dataset, preprocess, write_tu_dataset
from .distribution import Orbit, enumerate_orbits, orbit_probabilities, orbit_probability, probability
from .encoding import apply_loss, encode
from .errors import GbsKernelError
from .features import FeatureConfig, feature_vector, gram_matrix
from .graphcore import ScaledGraph, dataset_scale_factor
from .synthetic import density_dataset, molecule_dataset, random_graph

COARSE = {"orbit": "orbit", "meta": "meta_orbit"}


def fmt(x: float) -> str:
    return f"{x:.17g}"


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _input_digests(paths):
    out = {}
    for p in paths:
        p = Path(p)
        if p.is_dir():
            for f in sorted(p.iterdir()):
                if f.is_file():
                    out[str(f)] = sha256_file(f)
        elif p.is_file():
            out[str(p)] = sha256_file(p)
    return out


class Run:
    """Collects the manifest of one command; outputs carry the digest of the run identity."""

    def __init__(self, command, config, inputs):
        self.started = time.time()
        identity = {"command": command, "config": config, "inputs": _input_digests(inputs),
                    "version": __version__}
        self.identity = identity
        self.digest = hashlib.sha256(json.dumps(identity, sort_keys=True).encode()).hexdigest()
        self.outputs = {}

    def header(self) -> str:
        return f"# gbskernel run={self.digest}\n"

    def write_text(self, path, text):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.header() + text, encoding="utf-8")
        self.outputs[str(path)] = sha256_file(path)

    def write_json(self, path, payload: dict):
        """JSON outputs carry the digest as a field instead of a comment line."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        text = json.dumps({"run_digest": self.digest, **payload}, indent=2, sort_keys=True) + "\n"
        path.write_text(text, encoding="utf-8")
        self.outputs[str(path)] = sha256_file(path)

    def write_manifest(self, path):
        manifest = {
            **self.identity,
            "run_digest": self.digest,
            "outputs": self.outputs,
            "started_utc": datetime.fromtimestamp(self.started, timezone.utc).isoformat(),
            "wall_clock_seconds": time.time() - self.started,
        }
        Path(path).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def read_table(path):
    """Read a CSV written by this tool, skipping ``#`` comment lines."""
    lines = [ln for ln in Path(path).read_text(encoding="utf-8").splitlines() if not ln.startswith("#")]
    rows = list(csv.reader(lines))
    return rows[0], rows[1:]


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _jobs(args) -> int:
    if args.jobs is not None:
        return max(1, args.jobs)
    return max(1, int(os.environ.get("GBSKERNEL_JOBS", "1")))


def _config(args) -> FeatureConfig:
    return FeatureConfig(k=args.k, d_scalar=args.displacement, coarse_graining=COARSE[args.coarse],
                         nu=args.loss, rbf_delta=getattr(args, "delta", 1.0))


def _load_bundle(args):
    raw = parse_tu_dataset(args.dataset, args.name)
    rule = args.rule or DATASET_RULES.get(args.name, "none")
    return preprocess(raw, rule, c_override=args.scale_override,
                      min_nodes=args.min_nodes, max_nodes=args.max_nodes)


def _feature_job(item):
    g, cfg = item
    f = feature_vector(g, cfg)
    return f.values, f.overflow, f.labels


def compute_features(graphs, cfg, jobs=1):
    items = [(g, cfg) for g in graphs]
    if jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_feature_job, items))
    return [_feature_job(it) for it in items]


def _feature_args(p):
    p.add_argument("--k", type=int, default=6, help="maximum total photon number")
    p.add_argument("--displacement", type=float, default=0.0)
    p.add_argument("--coarse", choices=sorted(COARSE), default="orbit")
    p.add_argument("--loss", type=float, default=0.0)


def _dataset_args(p):
    p.add_argument("dataset", help="directory holding the TU-format files")
    p.add_argument("name", help="dataset name (file prefix)")
    p.add_argument("--rule", default=None, help="label rule: none, bond, valence, fingerprint or a .json weight map")
    p.add_argument("--scale-override", type=float, default=None)
    p.add_argument("--min-nodes", type=int, default=6)
    p.add_argument("--max-nodes", type=int, default=25)


def cmd_features(args):
    cfg = _config(args)
    bundle = _load_bundle(args)
    run = Run("features", {**vars_config(args), "scale_factor": bundle.c}, [args.dataset])
    results = compute_features(bundle.graphs, cfg, _jobs(args))
    labels = results[0][2] if results else [x.label for x in cfg.index_map()]
    rows = [[str(i), str(lab)] + [fmt(v) for v in vals] + [fmt(ovf)]
            for i, ((vals, ovf, _), lab) in enumerate(zip(results, bundle.labels))]
    out = Path(args.out)
    run.write_text(out, _csv(["graph_id", "label"] + labels + ["overflow"], rows))
    run.write_json(out.with_suffix(".report.json"), bundle.report.to_dict())
    run.write_manifest(out.with_suffix(out.suffix + ".manifest.json"))
    print(f"wrote {len(rows)} feature rows x {len(labels)} columns to {out}")
    return 0


def vars_config(args) -> dict:
    skip = {"func", "out", "jobs", "dataset", "name"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def load_feature_file(path):
    header, rows = read_table(path)
    if header[:2] != ["graph_id", "label"] or header[-1] != "overflow":
        raise GbsKernelError(f"{path} is not a feature file written by this tool")
    ids = [r[0] for r in rows]
    labels = [r[1] for r in rows]
    values = np.array([[float(x) for x in r[2:-1]] for r in rows])
    return ids, labels, values


def cmd_kernel(args):
    if args.features:
        ids, _, values = load_feature_file(args.features)
        inputs = [args.features]
        run = Run("kernel", vars_config(args), inputs)
    else:
        if not args.dataset or not args.name:
            raise SystemExit("kernel: give --features FILE or --dataset DIR --name NAME")
        cfg = _config(args)
        bundle = _load_bundle(args)
        run = Run("kernel", {**vars_config(args), "scale_factor": bundle.c}, [args.dataset])
        values = np.array([r[0] for r in compute_features(bundle.graphs, cfg, _jobs(args))])
        ids = [str(i) for i in range(len(values))]
    gram = gram_matrix(list(values), args.kernel, args.delta, standardized=args.standardize)
    rows = [[gid] + [fmt(v) for v in row] for gid, row in zip(ids, gram.values)]
    out = Path(args.out)
    run.write_text(out, _csv(["graph_id"] + ids, rows))
    run.write_manifest(out.with_suffix(out.suffix + ".manifest.json"))
    print(f"wrote {len(ids)}x{len(ids)} {args.kernel} gram matrix to {out}")
    return 0


def _parse_counts(text):
    return tuple(int(x) for x in text.replace("[", "").replace("]", "").split(",") if x.strip())


def cmd_probe(args):
    g = load_adjacency_csv(args.graph)
    c = args.scale_override if args.scale_override is not None else dataset_scale_factor([g])
    e = apply_loss(encode(ScaledGraph(g, c), args.displacement), args.loss)
    if args.event is not None:
        n = _parse_counts(args.event)
        p = probability(e, n)
        what = "event [" + ",".join(map(str, n)) + "]"
    else:
        o = Orbit(tuple(sorted(_parse_counts(args.orbit), reverse=True)))
        p = orbit_probability(e, o)
        what = f"orbit {o.label}"
    print(f"c = {fmt(c)}")
    print(f"det_q = {fmt(e.det_q)}")
    print(f"p({what}) = {fmt(p)}")
    return 0


def cmd_bench(args):
    cfg = _config(args)
    bundle = _load_bundle(args)
    protocol = CvProtocol(outer_folds=args.outer_folds, inner_folds=args.inner_folds,
                          repeats=args.repeats, seed=args.seed)
    run = Run("bench", {**vars_config(args), "scale_factor": bundle.c}, [args.dataset])
    values = [r[0] for r in compute_features(bundle.graphs, cfg, _jobs(args))]
    gram = gram_matrix(values, args.kernel, args.delta, standardized=args.standardize)
    result = cross_validate_gram(gram, bundle.labels, protocol)
    payload = {"dataset": bundle.name, "config": vars_config(args), "scale_factor": bundle.c,
               "n_graphs": len(bundle), **result.to_dict()}
    out = Path(args.out)
    run.write_json(out, payload)
    run.write_manifest(out.with_suffix(out.suffix + ".manifest.json"))
    print(f"{bundle.name}: accuracy {100 * result.mean:.2f} +- {100 * result.std:.2f} "
          f"(majority {100 * result.majority_baseline:.2f}) over {protocol.repeats} repeats")
    return 0


def squeezing_scale(g, db: float) -> float:
    """Scale ``c`` at which the largest squeezing parameter ``r = artanh(c s_max)`` equals ``db`` decibels."""
    s = g.spectral_norm()
    if s == 0.0:
        return 1.0
    r = db / (20.0 * math.log10(math.e))
    return math.tanh(r) / s


def cmd_loss_demo(args):
    if args.graph:
        g = load_adjacency_csv(args.graph)
        inputs = [args.graph]
    else:
        g = random_graph(args.nodes, args.edge_prob, args.random_seed)
        inputs = []
    if args.scale_override is not None:
        c = args.scale_override
    else:
        c = squeezing_scale(g, args.max_squeezing_db)
    run = Run("loss-demo", {**vars_config(args), "scale_factor": c}, inputs)
    e = encode(ScaledGraph(g, c))
    orbits = enumerate_orbits(args.k, g.num_nodes)
    lossless = orbit_probabilities(e, orbits)
    lossy = orbit_probabilities(apply_loss(e, args.nu), orbits)
    rows = [[o.label, fmt(p0), fmt(p1)] for o, p0, p1 in zip(orbits, lossless, lossy)]
    text = _csv(["orbit", "lossless", f"lossy_nu={fmt(args.nu)}"], rows)
    if args.out:
        out = Path(args.out)
        run.write_text(out, text)
        run.write_manifest(out.with_suffix(out.suffix + ".manifest.json"))
    else:
        sys.stdout.write(run.header() + text)
    return 0


def cmd_synth(args):
    raw = molecule_dataset(args.graphs, args.seed) if args.kind == "molecules" else density_dataset(args.graphs // 2, seed=args.seed)
    name = args.name or raw.name
    write_tu_dataset(raw, args.out, name)
    print(f"wrote {len(raw.graphs)} graphs as {name} to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gbskernel", description="Exact GBS graph features and kernels.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("features", help="feature matrix CSV for a TU dataset")
    _dataset_args(p)
    _feature_args(p)
    p.add_argument("--seed", type=int, default=0, help="recorded in the manifest")
    p.add_argument("--jobs", type=int, default=None, help="worker processes (env GBSKERNEL_JOBS)")
    p.add_argument("--out", default="features.csv")
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("kernel", help="Gram matrix CSV from a feature file or a dataset")
    p.add_argument("--features", default=None)
    p.add_argument("--dataset", default=None)
    p.add_argument("--name", default=None)
    p.add_argument("--rule", default=None)
    p.add_argument("--scale-override", type=float, default=None)
    p.add_argument("--min-nodes", type=int, default=6)
    p.add_argument("--max-nodes", type=int, default=25)
    _feature_args(p)
    p.add_argument("--kernel", choices=["linear", "rbf"], default="rbf")
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--standardize", action="store_true")
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--out", default="gram.csv")
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("probe", help="probability of one event or orbit for a single graph")
    p.add_argument("graph", help="adjacency matrix CSV")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--event", help="photon counts, e.g. 1,1,0")
    group.add_argument("--orbit", help="orbit partition, e.g. 2,1")
    p.add_argument("--displacement", type=float, default=0.0)
    p.add_argument("--loss", type=float, default=0.0)
    p.add_argument("--scale-override", type=float, default=None,
                   help="rescaling constant c; by default the graph alone sets c = 1/(s_max + 1e-8), "
                        "which sits at the edge of the allowed range")
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("bench", help="repeated double cross-validation with a kernel SVM")
    _dataset_args(p)
    _feature_args(p)
    p.add_argument("--kernel", choices=["linear", "rbf"], default="rbf")
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--standardize", action="store_true")
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--outer-folds", type=int, default=10)
    p.add_argument("--inner-folds", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--out", default="bench.json")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("loss-demo", help="orbit distribution with and without photon loss")
    p.add_argument("graph", nargs="?", default=None, help="adjacency matrix CSV")
    p.add_argument("--random-seed", type=int, default=0)
    p.add_argument("--nodes", type=int, default=10)
    p.add_argument("--edge-prob", type=float, default=0.5)
    p.add_argument("--nu", type=float, default=0.5)
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--max-squeezing-db", type=float, default=6.2,
                   help="choose c so the strongest squeezer has this many dB")
    p.add_argument("--scale-override", type=float, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_loss_demo)

    p = sub.add_parser("synth", help="write a synthetic dataset in TU format")
    p.add_argument("out")
    p.add_argument("--kind", choices=["molecules", "density"], default="molecules")
    p.add_argument("--name", help="file prefix (default MOLSYN or DENSITY)")
    p.add_argument("--graphs", type=int, default=188)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GbsKernelError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
