"""Time the hot kernels with numba on and off.

Each mode runs in its own interpreter because the flag is read at import time.

    python3 benchmarks/bench_kernels.py            # both modes, side by side
    python3 benchmarks/bench_kernels.py --worker   # one mode, JSON to stdout
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def _best_of(fn, repeats):
    fn()  # warm-up (includes JIT compilation)
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def worker(repeats: int) -> dict:
    from gbskernel import _accel
    from gbskernel.bench import svm_train
    from gbskernel.distribution import enumerate_orbits, orbit_probabilities
    from gbskernel.encoding import encode
    from gbskernel.graphcore import ScaledGraph
    from gbskernel.hafnian import hafnian
    from gbskernel.synthetic import random_graph, random_symmetric

    a = random_symmetric(12, 0)
    g = random_graph(12, 0.4, 1)
    e = encode(ScaledGraph(g, 0.8 / g.spectral_norm()), 0.25)
    orbits = enumerate_orbits(4, 12)
    rng = np.random.default_rng(2)
    x = rng.normal(size=(120, 5))
    y = (x[:, 0] + 0.5 * rng.normal(size=120) > 0).astype(int)
    k = np.exp(-((x[:, None] - x[None]) ** 2).sum(-1) / 4)

    cases = {
        "hafnian 12x12 dense": lambda: hafnian(a),
        "displaced orbits k=4, 12 modes": lambda: orbit_probabilities(e, orbits),
        "SMO 120 points rbf": lambda: svm_train(k, y, 1.0),
    }
    return {"numba": _accel.NUMBA_ENABLED,
            "seconds": {name: _best_of(fn, repeats) for name, fn in cases.items()}}


def run_mode(disable: bool, repeats: int) -> dict:
    env = dict(os.environ)
    if disable:
        env["GBSKERNEL_DISABLE_NUMBA"] = "1"
    else:
        env.pop("GBSKERNEL_DISABLE_NUMBA", None)
    out = subprocess.run([sys.executable, __file__, "--worker", "--repeats", str(repeats)],
                         env=env, check=True, capture_output=True, text=True)
    return json.loads(out.stdout)


def main():
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--worker", action="store_true")
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()
    if args.worker:
        print(json.dumps(worker(args.repeats)))
        return
    fast = run_mode(False, args.repeats)
    slow = run_mode(True, args.repeats)
    print(f"{'case':34s} {'numba [s]':>11s} {'python [s]':>11s} {'speedup':>8s}")
    for name, t_fast in fast["seconds"].items():
        t_slow = slow["seconds"][name]
        print(f"{name:34s} {t_fast:11.4f} {t_slow:11.4f} {t_slow / t_fast:7.1f}x")


if __name__ == "__main__":
    main()
