"""Maximizing the polarization of N-point configurations.

The objective ``P(omega) = min_y U(y; omega)`` is non-smooth, so the
optimizers work on a fixed mesh of the set and use one of

* ``anneal``: ascent on the softmin ``-(1/beta) log sum_y exp(-beta U(y))``
  with a doubling ``beta`` schedule;
* ``exchange``: repeatedly move the source contributing least at the
  current worst point towards that point;
* ``multistart(k)``: k seeded annealing runs, keeping the best certified
  lower bound.

Each run can finish with a polish step that solves the discretized
semi-infinite program ``max t s.t. U(y_k; omega) >= t`` with SLSQP over
the current low points ``y_k``.  Every reported value is a certified
bracket from :func:`rieszpol.potential.polarization`.
"""

from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass, field
from itertools import product

import numpy as np
from scipy import optimize as spo
from scipy.spatial import cKDTree

from . import _brute, _fast
from . import geometry as geo
from .errors import BudgetRefusedError, InvalidArgumentError
from .kernel import KernelSpec
from .potential import Configuration, PolarizationEstimate, polarization, potential_values

GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))


@dataclass
class SolveResult:
    config: Configuration
    estimate: PolarizationEstimate
    method: str
    seed: int
    trace: dict = field(default_factory=dict)
    budget_exhausted: bool = False

    @property
    def value(self) -> float:
        """Certified lower bound on the polarization constant."""
        return self.estimate.lower

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "seed": self.seed,
            "N": self.config.N,
            "points": self.config.points.tolist(),
            "estimate": self.estimate.to_dict(),
            "budget_exhausted": self.budget_exhausted,
            "trace": {k: v for k, v in self.trace.items() if k != "best_so_far"}
            | {"best_so_far": list(self.trace.get("best_so_far", []))},
        }


# ---------------------------------------------------------------------------
# seeds and constructions


def _one_param_positions(set_: geo.SetDescriptor, fractions: np.ndarray) -> np.ndarray:
    """Points at the given fractions of total arclength along the parts of a 1-D set."""
    parts = set_.parts()
    lengths = np.array([m.measure for m in parts])
    edges = np.concatenate([[0.0], np.cumsum(lengths)])
    target = fractions * edges[-1]
    out = np.empty((fractions.size, set_.ambient_dim))
    for i, u in enumerate(target):
        k = min(int(np.searchsorted(edges, u, side="right")) - 1, len(parts) - 1)
        m = parts[k]
        local = (u - edges[k]) / lengths[k]
        t0, t1 = m._param_range()
        if isinstance(m, geo.Curve):
            ts = np.linspace(t0, t1, 4097)
            cum = np.concatenate([[0.0], np.cumsum(m.arclength(ts[:-1], ts[1:]))])
            t = np.interp(local * cum[-1], cum, ts)
        else:
            t = t0 + local * (t1 - t0)
        out[i] = m.point_at([t])[0]
    return out


def seed_configuration(set_: geo.SetDescriptor, N: int, style: str = "equally-spaced", seed: int = 0) -> Configuration:
    """Deterministic starting configuration.

    Styles: ``equally-spaced`` (1-D sets), ``tensor-lattice`` (boxes, N a
    perfect p-th power), ``fibonacci-sphere`` (S^2), ``jittered-uniform``
    (uniform samples drawn with ``seed``; any set).
    """
    if N < 1:
        raise InvalidArgumentError("N must be >= 1")
    if style == "equally-spaced":
        if set_.hausdorff_dim != 1:
            raise InvalidArgumentError("equally-spaced seeds need a one-dimensional set")
        if isinstance(set_, geo.Arc) and set_.is_full:
            th = set_.theta0 + 2 * math.pi * np.arange(N) / N
            return Configuration(set_.point_at(th), set_)
        pts = _one_param_positions(set_, (np.arange(N) + 0.5) / N)
        return Configuration(set_.project(pts), set_)
    if style == "tensor-lattice":
        if not isinstance(set_, geo.Box):
            raise InvalidArgumentError("tensor-lattice seeds need a box")
        p = set_.ambient_dim
        n = int(round(N ** (1.0 / p)))
        if n**p != N:
            raise InvalidArgumentError(f"tensor-lattice needs N = n^{p}, got {N}")
        lo, hi = np.asarray(set_.lo), np.asarray(set_.hi)
        axes = [lo[k] + (hi[k] - lo[k]) * (np.arange(n) + 0.5) / n for k in range(p)]
        pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, p)
        return Configuration(pts, set_)
    if style == "fibonacci-sphere":
        if not (isinstance(set_, geo.Sphere) and set_.dim == 3):
            raise InvalidArgumentError("fibonacci-sphere seeds need S^2 in R^3")
        k = np.arange(N)
        z = 1 - (2 * k + 1) / N
        r = np.sqrt(1 - z * z)
        phi = k * GOLDEN_ANGLE
        pts = np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
        return Configuration(np.asarray(set_.center) + set_.radius * pts, set_)
    if style == "jittered-uniform":
        return Configuration(geo.sample_uniform(set_, N, seed), set_)
    raise InvalidArgumentError(f"unknown seed style {style!r}")


def default_seed_style(set_: geo.SetDescriptor, N: int) -> str:
    if set_.hausdorff_dim == 1:
        return "equally-spaced"
    if isinstance(set_, geo.Box):
        p = set_.ambient_dim
        if int(round(N ** (1.0 / p))) ** p == N:
            return "tensor-lattice"
    if isinstance(set_, geo.Sphere) and set_.dim == 3:
        return "fibonacci-sphere"
    return "jittered-uniform"


def tile_configuration(config: Configuration, m: int) -> Configuration:
    """Union over j in {0..m-1}^p of (1/m)(omega + j), mapped into the configuration's box."""
    box = config.set
    if not isinstance(box, geo.Box):
        raise InvalidArgumentError("tiling needs a configuration on a cube")
    if int(m) != m or m < 2:
        raise InvalidArgumentError("m must be an integer >= 2")
    m = int(m)
    p = box.ambient_dim
    lo, hi = np.asarray(box.lo), np.asarray(box.hi)
    unit = (config.points - lo) / (hi - lo)
    shifts = np.array(list(product(range(m), repeat=p)), dtype=float)
    tiled = ((unit[None, :, :] + shifts[:, None, :]) / m).reshape(-1, p)
    return Configuration(lo + tiled * (hi - lo), box)


def circle_alignment_error(config: Configuration, reference: Configuration) -> float:
    """min over rotations (and cyclic relabelings) of the max point-to-point distance.

    Both configurations must lie on the same full circle.
    """
    c = config.set
    if not (isinstance(c, geo.Arc) and c.is_full):
        raise InvalidArgumentError("alignment is defined on a full circle")
    if config.N != reference.N:
        raise InvalidArgumentError("configurations differ in size")
    a = np.sort(c.parameter_of(config.points))
    b = np.sort(c.parameter_of(reference.points))
    n = a.size
    best = math.inf
    for k in range(n):
        delta = np.roll(b, -k) - a
        delta = np.mod(delta - delta[0] + math.pi, 2 * math.pi) - math.pi + delta[0]
        spread = 0.5 * (delta.max() - delta.min())
        best = min(best, spread)
    return float(2 * c.radius * math.sin(min(best, math.pi) / 2))


def discretize(set_: geo.SetDescriptor, M: int) -> np.ndarray:
    """M equally spaced nodes (1-D sets: parameter grid incl. endpoints; full circle: M-gon; box: grid)."""
    if isinstance(set_, geo.Arc) and set_.is_full:
        return set_.point_at(set_.theta0 + 2 * math.pi * np.arange(M) / M)
    if set_.hausdorff_dim == 1 and len(set_.parts()) == 1:
        m = set_.parts()[0]
        t0, t1 = m._param_range()
        return m.point_at(t0 + (t1 - t0) * np.arange(M) / (M - 1))
    if isinstance(set_, geo.Box):
        p = set_.ambient_dim
        n = int(round(M ** (1.0 / p)))
        if n**p != M:
            raise InvalidArgumentError("box discretization needs M = n^p")
        lo, hi = np.asarray(set_.lo), np.asarray(set_.hi)
        axes = [np.linspace(lo[k], hi[k], n) for k in range(p)]
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, p)
    raise InvalidArgumentError(f"no discretization rule for {set_.kind}")


def kernel_matrix(nodes: np.ndarray, kernel: KernelSpec, sources: np.ndarray | None = None) -> np.ndarray:
    """``K[y, x]`` for targets ``nodes`` and sources (defaults to the nodes); exact, no clamp."""
    sources = nodes if sources is None else sources
    cols = [potential_values(nodes, sources[j:j + 1], kernel, 0.0) for j in range(sources.shape[0])]
    return np.column_stack(cols)


def brute_force_small(
    set_: geo.SetDescriptor,
    kernel: KernelSpec,
    N: int,
    M: int | None = None,
    nodes: np.ndarray | None = None,
    budget: float = 5e7,
) -> SolveResult:
    """Exact optimum of the discretized problem: sources and targets both range over the M nodes."""
    if N < 1:
        raise InvalidArgumentError("N must be >= 1")
    if nodes is None:
        if M is None:
            raise InvalidArgumentError("give M or nodes")
        nodes = discretize(set_, M)
    M = nodes.shape[0]
    count = math.comb(M + N - 1, N)
    if count > budget:
        raise BudgetRefusedError(f"C({M}+{N}-1, {N}) = {count} multisets exceeds the budget {budget:g}")
    kmat = kernel_matrix(nodes, kernel)
    value, idx = _brute.max_min_multiset(kmat, N, -math.inf)
    cfg = Configuration(nodes[np.asarray(idx)], set_)
    vals = kmat[:, idx].sum(axis=1)
    w = int(np.argmin(vals))
    est = PolarizationEstimate(
        upper=float(value), lower=float(value), witness=nodes[w].copy(), covering_radius=0.0,
        meta={"discrete": True, "M": M},
    )
    return SolveResult(cfg, est, "brute-force", 0, {"multisets": count, "indices": np.asarray(idx).tolist()})


# ---------------------------------------------------------------------------
# smooth machinery on a fixed mesh


def _values(nodes, pts, kernel: KernelSpec, eps: float) -> np.ndarray:
    return potential_values(nodes, pts, kernel, eps)


def _weighted_grad(nodes, c, pts, kernel: KernelSpec, eps: float) -> np.ndarray:
    """Gradient of ``sum_y c_y U(y)`` with respect to each source (shape (N, p))."""
    s = float(kernel.s)
    si = int(s) if s.is_integer() and 0 < s <= 64 else 0
    nodes = np.ascontiguousarray(nodes)
    pts = np.ascontiguousarray(pts)
    if kernel.is_log:
        return _fast.source_sums(nodes, c, pts, 0.0, 0, eps, True)[1]
    w = kernel.weight
    if w is None or w.kind == "constant":
        return kernel.scale * _fast.source_sums(nodes, c, pts, s, si, eps, False)[1]
    if w.kind == "separable":
        A, B = _fast.source_sums(nodes, np.ascontiguousarray(c / w.v(nodes)), pts, s, si, eps, False)
        return w.u(pts)[:, None] * B + A[:, None] * w.u.gradient(pts.shape[1])[None, :]
    rows = np.flatnonzero(c)
    _, grad = _potential_and_grad(nodes, pts, kernel, eps, rows=rows)
    return np.einsum("m,mjk->jk", c[rows], grad)


def _potential_and_grad(nodes, pts, kernel: KernelSpec, eps: float, need_grad=True, rows=None):
    """U at each node and dU(y)/dx_j (shape (M, N, p)), restricted to ``rows`` if given."""
    y = nodes if rows is None else nodes[rows]
    diff = y[:, None, :] - pts[None, :, :]
    d = np.sqrt(np.sum(diff * diff, axis=2))
    clamp = d < eps
    d = np.where(clamp, eps, d)
    if kernel.is_log:
        terms = -np.log(d)
        coef = 1.0 / (d * d)
    else:
        s = kernel.s
        base = d ** (-s)
        coef = s * base / (d * d)
        if kernel.weight is not None:
            w = kernel.weight(y[:, None, :], pts[None, :, :])
            terms = w * base
            coef = w * coef
        else:
            terms = base
    U = terms.sum(axis=1)
    if not need_grad:
        return U, None
    coef = np.where(clamp, 0.0, coef)
    grad = coef[:, :, None] * diff
    if kernel.is_weighted:
        grad = grad + kernel.weight.grad_source(y[:, None, :], pts[None, :, :]) * base[:, :, None]
    return U, grad


def _softmin(U, beta):
    m = U.min()
    z = np.exp(-beta * (U - m))
    tot = z.sum()
    return m - math.log(tot) / beta, z / tot


def _nn_scale(pts: np.ndarray, set_: geo.SetDescriptor) -> float:
    n = pts.shape[0]
    if n < 2:
        return set_.diameter()
    d = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)
    np.fill_diagonal(d, np.inf)
    nn = d.min(axis=1)
    pos = nn[nn > 0]
    return float(np.median(pos)) if pos.size else set_.diameter() / n


def _dejitter(pts, set_, rng):
    """Separate coincident points by a deterministic 1e-6 * diam jitter."""
    pts = pts.copy()
    _, first, inverse = np.unique(np.round(pts, 12), axis=0, return_index=True, return_inverse=True)
    inverse = np.asarray(inverse).reshape(-1)
    dup = np.ones(pts.shape[0], dtype=bool)
    dup[first] = False
    if np.any(dup):
        step = 1e-6 * set_.diameter()
        noise = rng.standard_normal((int(dup.sum()), pts.shape[1]))
        noise /= np.linalg.norm(noise, axis=1)[:, None]
        pts[dup] = set_.project(pts[dup] + step * noise)
    return pts


class _Budget:
    def __init__(self, total: int):
        self.total = int(total)
        self.used = 0

    def take(self, k: int = 1) -> bool:
        self.used += k
        return self.used <= self.total

    @property
    def left(self) -> bool:
        return self.used < self.total


def _anneal(set_, kernel, nodes, pts, eps, budget: _Budget, epochs=20, trace=None):
    U0 = _values(nodes, pts, kernel, eps)
    # the median, not the mean: a node sitting on a source makes the mean useless
    finite = U0[np.isfinite(U0)]
    scale = float(np.median(np.abs(finite))) if finite.size else 1.0
    if not scale > 0:
        scale = 1.0
    beta = 10.0 / scale
    for _ in range(epochs):
        U = _values(nodes, pts, kernel, eps)
        F, wts = _softmin(U, beta)
        if not budget.take():
            return pts, True
        for _it in range(50):
            c = np.where(wts > 1e-14 * wts.max(), wts, 0.0)
            G = _weighted_grad(nodes, c, pts, kernel, eps)
            gmax = np.linalg.norm(G, axis=1).max()
            if not gmax > 0 or not np.isfinite(gmax):
                break
            step = 0.1 * _nn_scale(pts, set_)
            improved = False
            for _h in range(30):
                cand = set_.project(pts + (step / gmax) * G)
                Uc = _values(nodes, cand, kernel, eps)
                Fc, wc = _softmin(Uc, beta)
                if not budget.take():
                    return pts, True
                if Fc > F:
                    improved = True
                    break
                step *= 0.5
            if not improved:
                break
            gain = Fc - F
            pts, F, wts = cand, Fc, wc
            if gain <= 1e-10 * abs(F):
                break
        if trace is not None:
            trace.setdefault("beta", []).append(beta)
        beta *= 2.0
    return pts, False


def _exchange(set_, kernel, nodes, pts, eps, budget: _Budget):
    U = _values(nodes, pts, kernel, eps)
    cur = U.min()
    stall = 0
    while budget.left and stall < pts.shape[0]:
        w = int(np.argmin(U))
        y = nodes[w]
        contrib = source_contributions(y, pts, kernel, eps)
        order = np.argsort(contrib, kind="stable")
        j = int(order[stall])
        moved = False
        alpha = 0.5
        while alpha > 1e-3 and budget.take():
            cand = pts.copy()
            cand[j] = set_.project(pts[j] + alpha * (y - pts[j]))
            Uc = _values(nodes, cand, kernel, eps)
            if Uc.min() > cur:
                pts, U, cur = cand, Uc, Uc.min()
                moved = True
                break
            alpha *= 0.5
        stall = 0 if moved else stall + 1
    return pts, not budget.left


def source_contributions(y, pts, kernel, eps):
    """Individual source contributions K(y, x_j) at a single point ``y``."""
    diff = np.atleast_2d(y)[:, None, :] - pts[None, :, :]
    d = np.maximum(np.sqrt(np.sum(diff * diff, axis=2)), eps)[0]
    if kernel.is_log:
        return -np.log(d)
    out = d ** (-kernel.s)
    if kernel.weight is not None:
        out = kernel.weight(np.atleast_2d(y), pts) * out
    return out


# ---------------------------------------------------------------------------
# polish: discretized semi-infinite program


def _special_points(set_: geo.SetDescriptor) -> np.ndarray:
    out = []
    for m in set_.parts():
        if isinstance(m, geo.Interval):
            out += [[m.a], [m.b]]
        elif isinstance(m, geo.Arc) and not m.is_full:
            out += list(m.point_at([m.theta0, m.theta1]))
        elif isinstance(m, geo.Box):
            out += [list(c) for c in product(*zip(m.lo, m.hi))]
        elif isinstance(m, geo.Curve):
            out += list(m.point_at([m.t0, m.t1]))
    return np.asarray(out, dtype=float).reshape(-1, set_.ambient_dim)


def _set_constraints(set_: geo.SetDescriptor, N: int, p: int):
    """SLSQP constraints and bounds keeping the points on the set, or None if unsupported."""
    nv = N * p + 1
    if isinstance(set_, geo.Interval):
        return [], [(set_.a, set_.b)] * (N * p) + [(None, None)]
    if isinstance(set_, geo.Box):
        return [], [(set_.lo[k], set_.hi[k]) for _ in range(N) for k in range(p)] + [(None, None)]
    if isinstance(set_, (geo.Sphere, geo.Ball)) or (isinstance(set_, geo.Arc) and set_.is_full):
        c = np.asarray(set_.center)
        r2 = set_.radius ** 2

        def fun(z):
            X = z[:-1].reshape(N, p) - c
            return np.sum(X * X, axis=1) - r2

        def jac(z):
            X = z[:-1].reshape(N, p) - c
            J = np.zeros((N, nv))
            for j in range(N):
                J[j, j * p:(j + 1) * p] = 2 * X[j]
            return J

        if isinstance(set_, geo.Ball):
            return [{"type": "ineq", "fun": lambda z: -fun(z), "jac": lambda z: -jac(z)}], None
        return [{"type": "eq", "fun": fun, "jac": jac}], None
    return None


def _polish(set_, kernel, pts, best: PolarizationEstimate, budget: _Budget, gap_kw, rounds=24):
    cons = _set_constraints(set_, pts.shape[0], set_.ambient_dim)
    if cons is None or not budget.left:
        return pts, best
    set_cons, bounds = cons
    N, p = pts.shape
    eps = kernel.effective_eps(set_)
    extra = _special_points(set_)
    dense = geo.mesh_with_nodes(set_, max(64 * N, 1024)).nodes
    nbr = cKDTree(dense).query(dense, k=min(2 * set_.hausdorff_dim + 3, dense.shape[0]))[1]
    trust = 0.25 * _nn_scale(pts, set_)
    for _ in range(rounds):
        if not budget.take(10):
            break
        U = _values(dense, pts, kernel, eps)
        # every local minimum of U on the mesh and its neighbors, plus the lowest nodes
        minima = np.flatnonzero(np.all(U[:, None] <= U[nbr], axis=1))
        minima = minima[np.argsort(U[minima], kind="stable")[: 4 * N + 8]]
        k = min(dense.shape[0], 4 * N + 4)
        low = np.unique(np.concatenate([nbr[minima].ravel(), np.argsort(U, kind="stable")[:k]]))
        Y = np.vstack([dense[low], best.witness[None, :], extra])
        z0 = np.concatenate([pts.ravel(), [U.min()]])
        lo_tr = z0[:-1] - trust
        hi_tr = z0[:-1] + trust

        def f(z):
            return -z[-1]

        def fj(z):
            g = np.zeros_like(z)
            g[-1] = -1.0
            return g

        def g_fun(z):
            Uy = _values(Y, z[:-1].reshape(N, p), kernel, eps)
            return Uy - z[-1]

        def g_jac(z):
            _, gr = _potential_and_grad(Y, z[:-1].reshape(N, p), kernel, eps)
            J = np.zeros((Y.shape[0], z.size))
            J[:, :-1] = gr.reshape(Y.shape[0], N * p)
            J[:, -1] = -1.0
            return J

        if bounds is None:
            bnds = [(lo_tr[i], hi_tr[i]) for i in range(N * p)] + [(None, None)]
        else:
            bnds = [(max(b[0], lo_tr[i]), min(b[1], hi_tr[i])) for i, b in enumerate(bounds[:-1])] + [(None, None)]
        with warnings.catch_warnings():
            # SLSQP clips steps to the trust box itself; the warning is noise
            warnings.filterwarnings("ignore", "Values in x were outside bounds", RuntimeWarning)
            res = spo.minimize(
                f, z0, jac=fj, method="SLSQP", bounds=bnds,
                constraints=[{"type": "ineq", "fun": g_fun, "jac": g_jac}] + set_cons,
                options={"maxiter": 200, "ftol": 1e-14},
            )
        cand = set_.project(res.x[:-1].reshape(N, p))
        try:
            est = polarization(Configuration(cand, set_), kernel.with_eps(None), **gap_kw)
        except InvalidArgumentError:
            trust *= 0.5
            continue
        if est.lower > best.lower * (1 + 1e-12):
            pts, best = cand, est
            trust *= 2.0
        else:
            trust *= 0.5
            if trust < 1e-9 * set_.diameter():
                break
    return pts, best


# ---------------------------------------------------------------------------


_METHOD_RE = re.compile(r"^(anneal|exchange|multistart)(?:\((\d+)\))?$")


def parse_method(method: str) -> tuple[str, int]:
    m = _METHOD_RE.match(method.strip())
    if not m:
        raise InvalidArgumentError(f"unknown method {method!r}")
    name, k = m.group(1), m.group(2)
    if name == "multistart":
        return name, int(k) if k else 4
    if k:
        raise InvalidArgumentError(f"{name} takes no restart count")
    return name, 1


def _certify(set_, kernel, pts, gap_kw) -> PolarizationEstimate:
    return polarization(Configuration(pts, set_), kernel.with_eps(None), **gap_kw)


def optimize(
    set_: geo.SetDescriptor,
    kernel: KernelSpec,
    N: int,
    method: str = "multistart(4)",
    seed: int = 0,
    budget: int = 20_000,
    mesh_nodes: int | None = None,
    polish: bool = True,
    rel_gap: float = 1e-9,
    initial: Configuration | None = None,
) -> SolveResult:
    """Best N-point configuration found for the polarization problem, with a certified bracket.

    Deterministic in ``(method, seed, budget)``.  ``budget`` caps potential
    evaluations over the whole mesh (all restarts together).
    """
    if N < 1:
        raise InvalidArgumentError("N must be >= 1")
    if budget <= 0:
        raise InvalidArgumentError("budget must be positive")
    name, restarts = parse_method(method)
    if mesh_nodes is None:
        mesh_nodes = max(32 * N, 512) if set_.hausdorff_dim == 1 else max(24 * N, 1024)
    nodes = geo.mesh_with_nodes(set_, mesh_nodes).nodes
    eps = kernel.effective_eps(set_)
    gap_kw = {"rel_gap": rel_gap}
    bud = _Budget(budget)
    streams = np.random.SeedSequence(seed).spawn(restarts)
    trace = {"restarts": restarts, "best_so_far": [], "mesh_nodes": int(nodes.shape[0])}
    best_pts, best_est, exhausted = None, None, False
    # the local phase of every restart shares four fifths of the budget; the
    # best restart is then polished with the rest
    local_total = int(budget * 0.8) if polish else budget
    for r in range(restarts):
        rng = np.random.default_rng(streams[r])
        if initial is not None and r == 0:
            pts = initial.points.copy()
        elif r == 0:
            pts = seed_configuration(set_, N, default_seed_style(set_, N)).points.copy()
        else:
            pts = seed_configuration(set_, N, "jittered-uniform", int(rng.integers(2**31))).points.copy()
        pts = _dejitter(pts, set_, rng)
        if r == 0:
            # the structured start is often already optimal; keep it as a candidate
            best_pts, best_est = pts.copy(), _certify(set_, kernel, pts, gap_kw)
        local = _Budget(max((local_total - bud.used) // (restarts - r), 1))
        if name == "exchange":
            pts, ex = _exchange(set_, kernel, nodes, pts, eps, local)
        else:
            pts, ex = _anneal(set_, kernel, nodes, pts, eps, local, trace=trace if r == 0 else None)
        bud.take(min(local.used, local.total))
        exhausted |= ex
        est = _certify(set_, kernel, pts, gap_kw)
        if best_est is None or est.lower > best_est.lower:
            best_pts, best_est = pts, est
        trace["best_so_far"].append(best_est.lower)
    if polish:
        local = _Budget(max(budget - bud.used, 10))
        best_pts, best_est = _polish(set_, kernel, best_pts, best_est, local, gap_kw)
        bud.take(min(local.used, local.total))
        trace["best_so_far"].append(best_est.lower)
    trace["evaluations"] = bud.used
    return SolveResult(Configuration(best_pts, set_), best_est, method, seed, trace, exhausted or bud.used > bud.total)
