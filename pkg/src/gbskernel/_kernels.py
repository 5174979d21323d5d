"""Hot enumeration kernels (numba-compiled unless disabled, see ``_accel``).

``haf_kernel`` walks the partitions of ``{0..n-1}`` depth-first: the lowest
unmatched index is paired with each remaining partner in increasing order (and,
with ``loops``, first taken as a singleton). Partners with a zero entry are
skipped because their whole subtree contributes exactly zero. Terms are
accumulated with Kahan summation in enumeration order, so the result is
bitwise reproducible.
"""

import numpy as np

from ._accel import njit

PURE_SQUARED = 0
LOOP_SQUARED = 1
LOSSY = 2
PURE_PLAIN = 3


@njit
def haf_kernel(a, loops):
    n = a.shape[0]
    if n == 0:
        return 1.0
    if not loops and n % 2 == 1:
        return 0.0
    used = np.zeros(n, dtype=np.bool_)
    first = np.empty(n, dtype=np.int64)
    partner = np.empty(n, dtype=np.int64)
    prod = np.empty(n + 1, dtype=np.float64)
    prod[0] = 1.0
    total = 0.0
    comp = 0.0
    nused = 1
    depth = 0
    first[0] = 0
    partner[0] = -1 if loops else 0
    used[0] = True
    while depth >= 0:
        i = first[depth]
        j = partner[depth]
        if j > i:
            used[j] = False
            nused -= 1
        j += 1
        found = False
        while j < n:
            if j == i:
                if loops and a[i, i] != 0.0:
                    found = True
                    break
            elif not used[j] and a[i, j] != 0.0:
                found = True
                break
            j += 1
        if not found:
            used[i] = False
            nused -= 1
            depth -= 1
            continue
        partner[depth] = j
        if j > i:
            used[j] = True
            nused += 1
        p = prod[depth] * a[i, j]
        if nused == n:
            y = p - comp
            t = total + y
            comp = (t - total) - y
            total = t
            continue
        k = i + 1
        while used[k]:
            k += 1
        depth += 1
        first[depth] = k
        partner[depth] = k - 1 if loops else k
        used[k] = True
        nused += 1
        prod[depth] = p
    return total


@njit
def _event_value(a, diag, parts, modes, size, kind):
    m = diag.shape[0]
    idx = np.empty(size, dtype=np.int64)
    pos = 0
    for t in range(parts.shape[0]):
        for _ in range(parts[t]):
            idx[pos] = modes[t]
            pos += 1
    if kind == LOSSY:
        full = np.empty(2 * size, dtype=np.int64)
        for u in range(size):
            full[u] = idx[u]
            full[u + size] = idx[u] + m
        idx = full
    n = idx.shape[0]
    mat = np.empty((n, n))
    for u in range(n):
        for v in range(n):
            mat[u, v] = a[idx[u], idx[v]]
    if kind == LOSSY:
        return haf_kernel(mat, False)
    if kind == LOOP_SQUARED:
        for u in range(n):
            mat[u, u] = diag[idx[u]]
        h = haf_kernel(mat, True)
        return h * h
    h = haf_kernel(mat, False)
    if kind == PURE_PLAIN:
        return h
    return h * h


@njit
def orbit_sum_kernel(a, diag, parts, kind):
    """Sum a per-event Hafnian quantity over every distinct mode assignment of ``parts``.

    ``parts`` is a non-increasing array of positive photon counts; equal parts
    are assigned to increasing modes so each event is visited exactly once.
    """
    m = diag.shape[0]
    n_parts = parts.shape[0]
    if n_parts == 0:
        return 1.0
    size = 0
    for t in range(n_parts):
        size += parts[t]
    modes = np.empty(n_parts, dtype=np.int64)
    placed = np.zeros(n_parts, dtype=np.bool_)
    used = np.zeros(m, dtype=np.bool_)
    total = 0.0
    comp = 0.0
    t = 0
    modes[0] = -1
    while t >= 0:
        if placed[t]:
            used[modes[t]] = False
            placed[t] = False
        c = modes[t] + 1
        while c < m and used[c]:
            c += 1
        if c >= m:
            t -= 1
            continue
        modes[t] = c
        used[c] = True
        placed[t] = True
        if t == n_parts - 1:
            val = _event_value(a, diag, parts, modes, size, kind)
            y = val - comp
            s = total + y
            comp = (s - total) - y
            total = s
        else:
            t += 1
            if parts[t] == parts[t - 1]:
                modes[t] = modes[t - 1]
            else:
                modes[t] = -1
    return total
