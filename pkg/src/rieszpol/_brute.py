"""Compiled exhaustive searches over node multisets (oracles for the solvers)."""

import math

import numpy as np
from numba import njit


@njit(cache=True)
def _last_level(partial, kmat, kcolmin, order, best):
    """max over sources k of min_y (partial[y] + kmat[y, k]), scanning y in ascending partial order.

    The scan for a given k stops as soon as the remaining candidates cannot
    lower the running minimum, or the running minimum cannot beat ``best``.
    Returns (value, k) of the best candidate above ``best``, else (best, -1).
    """
    m = partial.shape[0]
    best_k = -1
    for k in range(kmat.shape[1]):
        run = math.inf
        for t in range(m):
            y = order[t]
            if partial[y] + kcolmin[k] >= run:
                break
            v = partial[y] + kmat[y, k]
            if v < run:
                run = v
                if run <= best:
                    break
        if run > best:
            best = run
            best_k = k
    return best, best_k


@njit(cache=True)
def max_min_multiset(kmat, n, start_min):
    """Exhaustive max over non-decreasing index tuples of length n of min_y sum_j kmat[y, idx_j].

    ``kmat[y, x]`` is the kernel with target y and source x.  Ties keep the
    first tuple in lexicographic order.
    """
    m = kmat.shape[0]
    kcolmin = np.empty(kmat.shape[1])
    for k in range(kmat.shape[1]):
        kcolmin[k] = kmat[:, k].min()
    best = start_min
    best_idx = np.zeros(n, dtype=np.int64)
    if n == 1:
        zero = np.zeros(m)
        order = np.arange(m)
        val, k = _last_level(zero, kmat, kcolmin, order, best)
        best_idx[0] = max(k, 0)
        return val, best_idx
    idx = np.zeros(n - 1, dtype=np.int64)
    partial = np.zeros((n, m))
    level = 0
    idx[0] = 0
    while level >= 0:
        if idx[level] >= m:
            level -= 1
            if level >= 0:
                idx[level] += 1
            continue
        partial[level + 1] = partial[level] + kmat[:, idx[level]]
        if level < n - 2:
            level += 1
            idx[level] = idx[level - 1]
            continue
        pre = partial[level + 1]
        order = np.argsort(pre, kind="mergesort")
        lo = idx[level]
        val, k = _last_level(pre, kmat[:, lo:], kcolmin[lo:], order, best)
        if k >= 0:
            best = val
            for t in range(n - 1):
                best_idx[t] = idx[t]
            best_idx[n - 1] = lo + k
        idx[level] += 1
    return best, best_idx


@njit(cache=True)
def min_energy_subset(kmat, n, prune):
    """Exhaustive min over strictly increasing index tuples of sum_{i != j} kmat[x_i, x_j].

    With ``prune`` set (kernel known to be non-negative) partial sums that
    already reach the best value are abandoned.
    """
    m = kmat.shape[0]
    best = math.inf
    best_idx = np.arange(n)
    idx = np.zeros(n, dtype=np.int64)
    acc = np.zeros(n + 1)
    level = 0
    idx[0] = 0
    while level >= 0:
        if idx[level] > m - (n - level):
            level -= 1
            if level >= 0:
                idx[level] += 1
            continue
        c = idx[level]
        add = 0.0
        for t in range(level):
            add += kmat[c, idx[t]] + kmat[idx[t], c]
        acc[level + 1] = acc[level] + add
        if prune and acc[level + 1] >= best:
            idx[level] += 1
            continue
        if level == n - 1:
            if acc[n] < best:
                best = acc[n]
                for t in range(n):
                    best_idx[t] = idx[t]
            idx[level] += 1
            continue
        level += 1
        idx[level] = idx[level - 1] + 1
    return best, best_idx
