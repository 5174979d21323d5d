import os
import subprocess
import sys

import numpy as np
import pytest

from gbskernel import _accel
from gbskernel._kernels import LOOP_SQUARED, LOSSY, PURE_SQUARED, haf_kernel, orbit_sum_kernel
from gbskernel.bench import smo_kernel
from gbskernel.linalg import _jacobi_kernel
from gbskernel.synthetic import random_symmetric


@pytest.mark.parametrize("n", [2, 4, 6, 8])
def test_hafnian_kernel_paths_agree(n):
    a = random_symmetric(n, n)
    for loops in (False, True):
        b = a.copy()
        if loops:
            b[np.diag_indices(n)] = np.arange(1, n + 1) / n
        assert haf_kernel(b, loops) == pytest.approx(haf_kernel.py_func(b, loops), rel=1e-13)


def test_orbit_kernel_paths_agree():
    a = random_symmetric(6, 1)
    diag = np.linspace(0.1, 0.6, 6)
    parts = np.array([2, 1, 1], dtype=np.int64)
    for kind in (PURE_SQUARED, LOOP_SQUARED):
        assert orbit_sum_kernel(a, diag, parts, kind) == pytest.approx(
            orbit_sum_kernel.py_func(a, diag, parts, kind), rel=1e-13)
    big = random_symmetric(12, 2)
    assert orbit_sum_kernel(big, np.zeros(6), parts, LOSSY) == pytest.approx(
        orbit_sum_kernel.py_func(big, np.zeros(6), parts, LOSSY), rel=1e-13)


def test_jacobi_paths_agree():
    a = random_symmetric(7, 3, zero_diagonal=False)
    w1, v1 = _jacobi_kernel(a, 1e-12, 100)[:2]
    w2, v2 = _jacobi_kernel.py_func(a, 1e-12, 100)[:2]
    assert np.allclose(w1, w2, atol=1e-12)


def test_smo_paths_agree():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(25, 2))
    y = np.where(x[:, 0] > 0, 1.0, -1.0)
    k = x @ x.T
    r1 = smo_kernel(k, y, 1.0, 1e-3, 100000)
    r2 = smo_kernel.py_func(k, y, 1.0, 1e-3, 100000)
    assert np.allclose(r1[0], r2[0], atol=1e-12)
    assert r1[1] == pytest.approx(r2[1], abs=1e-12)


def test_fallback_mode_end_to_end():
    code = (
        "from gbskernel import _accel; from gbskernel.graphcore import *; "
        "from gbskernel.encoding import encode; from gbskernel.distribution import event_probability; "
        "import numpy as np; assert not _accel.NUMBA_ENABLED; "
        "e = encode(ScaledGraph(validate_graph(np.ones((2, 2)) - np.eye(2)), 0.5)); "
        "print(repr(event_probability(e, [1, 1])))"
    )
    env = {**os.environ, "GBSKERNEL_DISABLE_NUMBA": "1"}
    res = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, env=env)
    assert res.returncode == 0, res.stderr
    assert float(res.stdout) == pytest.approx(0.1875, rel=1e-14)


def test_flag_reported():
    assert isinstance(_accel.NUMBA_ENABLED, bool)
