"""Compiled potential sums.

Each output entry is accumulated sequentially over sources in index order, so
results are bit-identical for any number of worker threads.
"""

import math

import numpy as np
from numba import config as _nb_config, njit, prange

# TBB in this image is too old and only produces a warning; skip it.
_nb_config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]


@njit(cache=True, inline="always")
def _inv_pow(d, s, si):
    # d**-s, with an integer fast path when s is integral
    if si > 0:
        return 1.0 / d**si
    return d ** (-s)


@njit(cache=True, inline="always")
def _linear_drop(g, nrm, kap, h):
    # max over the cell of -g.(y - z); the chord's normal part is -kap |y - z|^2 / 2
    gn = 0.0
    for k in range(g.shape[0]):
        gn += g[k] * nrm[k]
    tt = 0.0
    for k in range(g.shape[0]):
        t = g[k] - gn * nrm[k]
        tt += t * t
    return math.sqrt(tt) * h + max(gn, 0.0) * 0.5 * kap * h * h


@njit(parallel=True, cache=True)
def riesz_values(nodes, src, s, si, eps):
    m, p = nodes.shape
    n = src.shape[0]
    out = np.empty(m)
    for i in prange(m):
        acc = 0.0
        for j in range(n):
            d2 = 0.0
            for k in range(p):
                t = nodes[i, k] - src[j, k]
                d2 += t * t
            d = math.sqrt(d2)
            if d < eps:
                d = eps
            if d == 0.0:
                acc = math.inf
            else:
                acc += _inv_pow(d, s, si)
        out[i] = acc
    return out


@njit(parallel=True, cache=True)
def riesz_bracket(nodes, radii, normals, kappa, src, s, si):
    """Node values and certified lower bounds of sum_j |y - x_j|^-s over each cell ball.

    Lower bound per cell is the larger of the monotone bound
    sum_j (d_j + h)^-s and, when no source lies in the ball, the second-order
    bound U(z) - max_y[-grad U(z).(y - z)] - h^2/2 * sum_j s (d_j - h)^(-s-2);
    the last sum bounds the most negative Hessian eigenvalue on the ball.
    """
    m, p = nodes.shape
    n = src.shape[0]
    vals = np.empty(m)
    lows = np.empty(m)
    for i in prange(m):
        h = radii[i]
        g = np.zeros(p)
        val = 0.0
        mono = 0.0
        curv = 0.0
        separated = True
        for j in range(n):
            d2 = 0.0
            for k in range(p):
                t = nodes[i, k] - src[j, k]
                d2 += t * t
            d = math.sqrt(d2)
            if d == 0.0:
                val = math.inf
            else:
                term = _inv_pow(d, s, si)
                val += term
                fac = -s * term / d2
                for k in range(p):
                    g[k] += fac * (nodes[i, k] - src[j, k])
            mono += _inv_pow(d + h, s, si) if d + h > 0.0 else math.inf
            if d > h:
                curv += s * _inv_pow(d - h, s, si) / ((d - h) * (d - h))
            else:
                separated = False
        low = mono
        if separated and val < math.inf:
            second = val - _linear_drop(g, normals[i], kappa[i], h) - 0.5 * curv * h * h
            if second > low:
                low = second
        vals[i] = val
        lows[i] = low
    return vals, lows


@njit(parallel=True, cache=True)
def log_values(nodes, src, eps):
    m, p = nodes.shape
    n = src.shape[0]
    out = np.empty(m)
    for i in prange(m):
        acc = 0.0
        for j in range(n):
            d2 = 0.0
            for k in range(p):
                t = nodes[i, k] - src[j, k]
                d2 += t * t
            d = math.sqrt(d2)
            if d < eps:
                d = eps
            if d == 0.0:
                acc = math.inf
            else:
                acc -= math.log(d)
        out[i] = acc
    return out


@njit(parallel=True, cache=True)
def log_bracket(nodes, radii, normals, kappa, src):
    """Same as :func:`riesz_bracket` for -log|y - x|; the negative curvature is 1/d^2."""
    m, p = nodes.shape
    n = src.shape[0]
    vals = np.empty(m)
    lows = np.empty(m)
    for i in prange(m):
        h = radii[i]
        g = np.zeros(p)
        val = 0.0
        mono = 0.0
        curv = 0.0
        separated = True
        for j in range(n):
            d2 = 0.0
            for k in range(p):
                t = nodes[i, k] - src[j, k]
                d2 += t * t
            d = math.sqrt(d2)
            if d == 0.0:
                val = math.inf
            else:
                val -= math.log(d)
                for k in range(p):
                    g[k] -= (nodes[i, k] - src[j, k]) / d2
            mono -= math.log(d + h) if d + h > 0.0 else -math.inf
            if d > h:
                curv += 1.0 / ((d - h) * (d - h))
            else:
                separated = False
        low = mono
        if separated and val < math.inf:
            second = val - _linear_drop(g, normals[i], kappa[i], h) - 0.5 * curv * h * h
            if second > low:
                low = second
        vals[i] = val
        lows[i] = low
    return vals, lows


@njit(parallel=True, cache=True)
def riesz_values_q(nodes, src, q, s, si, eps):
    """sum_j q_j |y - x_j|^-s with per-source strengths q."""
    m, p = nodes.shape
    n = src.shape[0]
    out = np.empty(m)
    for i in prange(m):
        acc = 0.0
        for j in range(n):
            d2 = 0.0
            for k in range(p):
                t = nodes[i, k] - src[j, k]
                d2 += t * t
            d = math.sqrt(d2)
            if d < eps:
                d = eps
            if d == 0.0:
                acc = math.inf
            else:
                acc += q[j] * _inv_pow(d, s, si)
        out[i] = acc
    return out


@njit(parallel=True, cache=True)
def source_sums(nodes, c, src, s, si, eps, is_log):
    """A_j = sum_y c_y K(y, x_j) and B_j = sum_y c_y dK/dx_j for the radial kernel K.

    Used to assemble gradients of weighted node sums with respect to the
    sources; each source is reduced sequentially over the nodes.
    """
    m, p = nodes.shape
    n = src.shape[0]
    A = np.zeros(n)
    B = np.zeros((n, p))
    for j in prange(n):
        a = 0.0
        for i in range(m):
            if c[i] == 0.0:
                continue
            d2 = 0.0
            for k in range(p):
                t = nodes[i, k] - src[j, k]
                d2 += t * t
            d = math.sqrt(d2)
            clamped = d < eps
            if clamped:
                d = eps
            if is_log:
                a -= c[i] * math.log(d)
                coef = 1.0 / (d * d)
            else:
                base = _inv_pow(d, s, si)
                a += c[i] * base
                coef = s * base / (d * d)
            if not clamped:
                for k in range(p):
                    B[j, k] += c[i] * coef * (nodes[i, k] - src[j, k])
        A[j] = a
    return A, B
