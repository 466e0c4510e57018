"""Compiled Gibbs-sampler inner loops.

State is a symmetric bit-packed adjacency matrix (``uint64``, one row
per node) plus a degree vector.  Terms arrive as the flat arrays of
:class:`ergmsize.terms.CompiledModel`.  Randomness comes from a NumPy
``Generator`` (PCG64) passed in from Python, so a seed fixes the whole
trajectory.
"""

import numpy as np
from numba import njit

# Kind codes mirror ergmsize.terms.
EDGE_COUNT, ACTIVITY, WITHIN, BETWEEN, SAME, NUM_ACTIVITY, NUM_DIFFERENCE, ASYMMETRY, DEGREE = range(9)

ONE = np.uint64(1)


def empty_bits(n):
    return np.zeros((n, max(1, (n + 63) // 64)), dtype=np.uint64)


@njit(cache=True)
def has_edge(bits, i, j):
    return (bits[i, j >> 6] >> np.uint64(j & 63)) & ONE


@njit(cache=True)
def flip(bits, i, j):
    bits[i, j >> 6] ^= ONE << np.uint64(j & 63)
    bits[j, i >> 6] ^= ONE << np.uint64(i & 63)


@njit(cache=True)
def load_edges(bits, deg, edges):
    for e in range(edges.shape[0]):
        i, j = edges[e, 0], edges[e, 1]
        if not has_edge(bits, i, j):
            flip(bits, i, j)
            deg[i] += 1
            deg[j] += 1


@njit(cache=True)
def edge_array(bits, n, n_edges):
    out = np.empty((n_edges, 2), dtype=np.int64)
    m = 0
    W = bits.shape[1]
    for i in range(n):
        for w in range((i + 1) >> 6, W):
            word = bits[i, w]
            while word:
                b = 0
                x = word
                # index of lowest set bit
                while (x & ONE) == 0:
                    x >>= ONE
                    b += 1
                j = w * 64 + b
                word &= word - ONE
                if j > i:
                    out[m, 0] = i
                    out[m, 1] = j
                    m += 1
    return out[:m]


@njit(cache=True)
def dyad_delta(dl, kinds, p1, p2, cat, num, deg, on, i, j):
    """Fill ``dl`` with the change statistics of dyad (i, j)."""
    for k in range(kinds.shape[0]):
        kind = kinds[k]
        if kind == EDGE_COUNT:
            dl[k] = 1.0
        elif kind == ACTIVITY:
            dl[k] = (cat[k, i] == p1[k]) + (cat[k, j] == p1[k])
        elif kind == WITHIN:
            dl[k] = 1.0 if (cat[k, i] == p1[k] and cat[k, j] == p1[k]) else 0.0
        elif kind == BETWEEN:
            ci = cat[k, i]
            cj = cat[k, j]
            dl[k] = 1.0 if ((ci == p1[k] and cj == p2[k]) or (ci == p2[k] and cj == p1[k])) else 0.0
        elif kind == SAME:
            dl[k] = 1.0 if cat[k, i] == cat[k, j] else 0.0
        elif kind == NUM_ACTIVITY:
            dl[k] = num[k, i] + num[k, j]
        elif kind == NUM_DIFFERENCE:
            v = abs(num[k, i] - num[k, j])
            dl[k] = v if p1[k] == 1 else v * v
        elif kind == ASYMMETRY:
            ci = cat[k, i]
            cj = cat[k, j]
            ti = num[k, i]
            tj = num[k, j]
            if (ci == p1[k] and cj == p2[k] and ti > tj) or (cj == p1[k] and ci == p2[k] and tj > ti):
                dl[k] = 1.0
            else:
                dl[k] = 0.0
        else:
            d = p1[k]
            s = 0.0
            if cat[k, i]:
                b = deg[i] - on
                s += (b + 1 == d) - (b == d)
            if cat[k, j]:
                b = deg[j] - on
                s += (b + 1 == d) - (b == d)
            dl[k] = s


@njit(cache=True)
def global_stats(bits, deg, n, kinds, p1, p2, cat, num):
    """Full recomputation of the statistic vector from the bit matrix."""
    K = kinds.shape[0]
    out = np.zeros(K)
    dl = np.zeros(K)
    edges = edge_array(bits, n, deg.sum() // 2)
    for e in range(edges.shape[0]):
        dyad_delta(dl, kinds, p1, p2, cat, num, deg, 1, edges[e, 0], edges[e, 1])
        for k in range(K):
            if kinds[k] != DEGREE:
                out[k] += dl[k]
    for k in range(K):
        if kinds[k] == DEGREE:
            c = 0
            for v in range(n):
                if cat[k, v] and deg[v] == p1[k]:
                    c += 1
            out[k] = c
    return out


@njit(cache=True)
def gibbs_run(rng, n, bits, deg, kinds, p1, p2, cat, num, theta, offset, stats,
              steps, record_interval, out):
    """Run ``steps`` Gibbs updates in place.

    A uniformly random unordered dyad is drawn each step and set to a
    tie with its full-conditional probability.  ``stats`` is kept equal
    to g(y) by adding or subtracting the change statistic on each flip.
    When ``record_interval > 0`` a copy of ``stats`` is written to the
    next row of ``out`` after every ``record_interval`` steps.
    Returns the number of flips.
    """
    K = kinds.shape[0]
    dl = np.zeros(K)
    nn1 = n * (n - 1)
    row = 0
    flips = 0
    for s in range(steps):
        r = rng.integers(0, nn1)
        i = r // (n - 1)
        j = r % (n - 1)
        if j >= i:
            j += 1
        on = has_edge(bits, i, j)
        dyad_delta(dl, kinds, p1, p2, cat, num, deg, on, i, j)
        eta = offset
        for k in range(K):
            eta += theta[k] * dl[k]
        p = 1.0 / (1.0 + np.exp(-eta))
        if rng.random() < p:
            if not on:
                flip(bits, i, j)
                deg[i] += 1
                deg[j] += 1
                for k in range(K):
                    stats[k] += dl[k]
                flips += 1
        elif on:
            flip(bits, i, j)
            deg[i] -= 1
            deg[j] -= 1
            for k in range(K):
                stats[k] -= dl[k]
            flips += 1
        if record_interval > 0 and (s + 1) % record_interval == 0:
            for k in range(K):
                out[row, k] = stats[k]
            row += 1
    return flips


@njit(cache=True)
def gibbs_state_counts(rng, n, bits, deg, kinds, p1, p2, cat, num, theta, offset,
                       steps, dyad_index, code, counts):
    """Gibbs updates tallying the visited graph after every step.

    Graphs are encoded as bit masks over the dyad ordering in
    ``dyad_index``; ``code`` is the mask of the starting state.
    Returns the final code.
    """
    K = kinds.shape[0]
    dl = np.zeros(K)
    nn1 = n * (n - 1)
    for s in range(steps):
        r = rng.integers(0, nn1)
        i = r // (n - 1)
        j = r % (n - 1)
        if j >= i:
            j += 1
        on = has_edge(bits, i, j)
        dyad_delta(dl, kinds, p1, p2, cat, num, deg, on, i, j)
        eta = offset
        for k in range(K):
            eta += theta[k] * dl[k]
        p = 1.0 / (1.0 + np.exp(-eta))
        if rng.random() < p:
            if not on:
                flip(bits, i, j)
                deg[i] += 1
                deg[j] += 1
                code |= np.int64(1) << dyad_index[i, j]
        elif on:
            flip(bits, i, j)
            deg[i] -= 1
            deg[j] -= 1
            code &= ~(np.int64(1) << dyad_index[i, j])
        counts[code] += 1
    return code
