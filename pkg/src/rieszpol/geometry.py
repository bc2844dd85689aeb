"""Compact sets with exact Hausdorff measure, certified meshes, sampling and projection.

Every mesh node owns a *cell*: a piece of the set contained in the closed
ball of radius ``radii[i]`` around ``nodes[i]``.  Cells can be split, which is
what the certified minimizers in :mod:`rieszpol.potential` and
:mod:`rieszpol.extremal` use for adaptive refinement.

Cells are stored as two arrays ``a`` and ``b`` of width ``ambient_dim``:

* one-parameter kinds (interval, arc, curve) keep the parameter range
  ``[a[:, 0], b[:, 0]]``;
* box-based kinds (box, sphere, ball) keep a box center in ``a`` and its
  half-widths in ``b``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, optimize

from .errors import InvalidArgumentError, InvalidSetError, ResourceLimitError

DEFAULT_MAX_NODES = 2_000_000

# Gauss-Legendre rule used for arclength of small curve cells.
_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


def _as_points(x, p: int) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    single = arr.ndim <= 1
    if p == 1 and arr.ndim == 1 and arr.shape[0] != 1:
        # a flat array of scalars on a 1-D set
        arr = arr.reshape(-1, 1)
        single = False
    arr = np.atleast_2d(arr)
    if arr.shape[1] != p:
        raise InvalidArgumentError(f"expected points of dimension {p}, got shape {np.shape(x)}")
    return arr, single


def _lexmin_rows(cands: np.ndarray) -> int:
    """Index of the lexicographically smallest row."""
    order = np.lexsort(cands.T[::-1])
    return int(order[0])


class SetDescriptor:
    """Base class for the supported compact sets."""

    kind: str = ""
    ambient_dim: int
    hausdorff_dim: int

    # --- public surface -------------------------------------------------
    @property
    def measure(self) -> float:
        return hausdorff_measure(self)

    def parts(self) -> tuple["SetDescriptor", ...]:
        return (self,)

    def diameter(self) -> float:
        raise NotImplementedError

    def project(self, x):
        """Nearest point(s) of the set; accepts one point or an ``(n, p)`` array."""
        pts, single = _as_points(x, self.ambient_dim)
        out = self._project(pts)
        return out[0] if single else out

    def contains(self, x, tol: float | None = None):
        pts, single = _as_points(x, self.ambient_dim)
        if tol is None:
            tol = 1e-9 * self.diameter()
        dist = np.linalg.norm(self._project(pts) - pts, axis=1)
        ok = dist <= tol
        return bool(ok[0]) if single else ok

    def transformed(self, scale: float = 1.0, shift=None) -> "SetDescriptor":
        """Image of the set under ``x -> scale * x + shift``."""
        if scale <= 0:
            raise InvalidArgumentError("scale must be positive")
        shift = np.zeros(self.ambient_dim) if shift is None else np.asarray(shift, dtype=float)
        return self._transformed(float(scale), shift)

    # --- per-kind hooks ----------------------------------------------------
    def _measure(self, rtol: float) -> float:
        raise NotImplementedError

    def _project(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def _initial_cells(self, resolution: float) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def _cell_geometry(self, a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def _split(self, a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def _cell_normals(self, nodes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Unit normal ``n`` and curvature ``k`` per node such that every ``y`` in the
        cell satisfies ``(y - z).n = -k |y - z|^2 / 2``.  Zero normals mean "no
        constraint" (flat or unknown geometry)."""
        return np.zeros_like(nodes), np.zeros(nodes.shape[0])

    def _transformed(self, scale: float, shift: np.ndarray) -> "SetDescriptor":
        raise NotImplementedError


# ---------------------------------------------------------------------------
# one-parameter kinds


class _OneParam(SetDescriptor):
    hausdorff_dim = 1

    def _param_range(self) -> tuple[float, float]:
        raise NotImplementedError

    def point_at(self, t) -> np.ndarray:
        raise NotImplementedError

    def parameter_of(self, x) -> np.ndarray:
        """Parameter value of points already on the set."""
        raise NotImplementedError

    def arclength(self, t0, t1) -> np.ndarray:
        raise NotImplementedError

    def _reach(self, t0, t1) -> np.ndarray:
        """Upper bound on the distance between the points at ``t0`` and ``t1``."""
        return self.arclength(t0, t1)

    def _param_cells(self, lo: np.ndarray, hi: np.ndarray):
        a = np.zeros((lo.size, self.ambient_dim))
        b = np.zeros((lo.size, self.ambient_dim))
        a[:, 0] = lo
        b[:, 0] = hi
        return a, b

    def _initial_cells(self, resolution):
        t0, t1 = self._param_range()
        n = int(math.floor(self.measure / resolution)) + 1
        edges = t0 + (t1 - t0) * np.arange(n + 1) / n
        edges[-1] = t1
        return self._param_cells(edges[:-1], edges[1:])

    def _split(self, a, b):
        lo, hi = a[:, 0], b[:, 0]
        mid = 0.5 * (lo + hi)
        return self._param_cells(np.concatenate([lo, mid]), np.concatenate([mid, hi]))

    def _cell_geometry(self, a, b):
        lo, hi = a[:, 0], b[:, 0]
        mid = 0.5 * (lo + hi)
        nodes = self.point_at(mid)
        radii = np.maximum(self._reach(lo, mid), self._reach(mid, hi))
        return nodes, radii


@dataclass(frozen=True, eq=False)
class Interval(_OneParam):
    a: float
    b: float
    kind = "interval"
    ambient_dim = 1

    def __post_init__(self):
        if not (np.isfinite(self.a) and np.isfinite(self.b) and self.b > self.a):
            raise InvalidSetError(f"interval needs a < b, got ({self.a}, {self.b})")

    def diameter(self):
        return self.b - self.a

    def _measure(self, rtol):
        return self.b - self.a

    def _param_range(self):
        return self.a, self.b

    def point_at(self, t):
        return np.asarray(t, dtype=float).reshape(-1, 1)

    def parameter_of(self, x):
        pts, _ = _as_points(x, 1)
        return pts[:, 0].copy()

    def arclength(self, t0, t1):
        return np.abs(np.asarray(t1, dtype=float) - np.asarray(t0, dtype=float))

    def _project(self, pts):
        return np.clip(pts, self.a, self.b)

    def _sample(self, n, rng):
        return (self.a + (self.b - self.a) * rng.random(n)).reshape(-1, 1)

    def _transformed(self, scale, shift):
        return Interval(scale * self.a + shift[0], scale * self.b + shift[0])


@dataclass(frozen=True, eq=False)
class Arc(_OneParam):
    """Circular arc ``center + radius*(cos t, sin t)``, ``t in [theta0, theta1]``.

    A full range of 2*pi is the whole circle (kind ``"circle"``).
    """

    radius: float = 1.0
    center: tuple = (0.0, 0.0)
    theta0: float = 0.0
    theta1: float = 2 * math.pi
    ambient_dim = 2

    def __post_init__(self):
        if not self.radius > 0:
            raise InvalidSetError("circle radius must be positive")
        span = self.theta1 - self.theta0
        if not (0 < span <= 2 * math.pi + 1e-15):
            raise InvalidSetError(f"arc span must lie in (0, 2pi], got {span}")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if len(self.center) != 2:
            raise InvalidSetError("circle center must be a 2-vector")

    @property
    def kind(self):
        return "circle" if self.is_full else "arc"

    @property
    def is_full(self) -> bool:
        return self.theta1 - self.theta0 >= 2 * math.pi - 1e-15

    def diameter(self):
        span = self.theta1 - self.theta0
        if span >= math.pi:
            return 2 * self.radius
        return 2 * self.radius * math.sin(span / 2)

    def _measure(self, rtol):
        return self.radius * (self.theta1 - self.theta0)

    def _param_range(self):
        return self.theta0, self.theta1

    def point_at(self, t):
        t = np.asarray(t, dtype=float).reshape(-1)
        c = np.asarray(self.center)
        return c + self.radius * np.column_stack([np.cos(t), np.sin(t)])

    def parameter_of(self, x):
        pts, _ = _as_points(x, 2)
        v = pts - np.asarray(self.center)
        th = np.arctan2(v[:, 1], v[:, 0])
        # map into [theta0, theta0 + 2pi)
        th = self.theta0 + np.mod(th - self.theta0, 2 * math.pi)
        if not self.is_full:
            # points at the far endpoint may wrap to theta0 + 2pi - tiny
            over = th > self.theta1
            th[over] = np.where(
                th[over] - self.theta1 < self.theta0 + 2 * math.pi - th[over],
                self.theta1,
                self.theta0,
            )
        return th

    def arclength(self, t0, t1):
        return self.radius * np.abs(np.asarray(t1, dtype=float) - np.asarray(t0, dtype=float))

    def _reach(self, t0, t1):
        # the chord is the exact distance, tighter than the arc
        dt = np.abs(np.asarray(t1, dtype=float) - np.asarray(t0, dtype=float))
        return 2 * self.radius * np.sin(np.minimum(dt, math.pi) / 2)

    def _project(self, pts):
        c = np.asarray(self.center)
        v = pts - c
        nrm = np.linalg.norm(v, axis=1)
        out = np.empty_like(pts)
        zero = nrm == 0
        tie = c + self.radius * np.array([-1.0, 0.0])
        if not self.is_full:
            ends = self.point_at([self.theta0, self.theta1])
            tie = ends[_lexmin_rows(ends)] if not self._angle_in_arc(np.array([math.pi]))[0] else tie
        out[zero] = tie
        nz = ~zero
        radial = c + self.radius * v[nz] / nrm[nz, None]
        if not self.is_full:
            th = np.arctan2(v[nz, 1], v[nz, 0])
            inside = self._angle_in_arc(th)
            ends = self.point_at([self.theta0, self.theta1])
            q = pts[nz]
            d0 = np.linalg.norm(q - ends[0], axis=1)
            d1 = np.linalg.norm(q - ends[1], axis=1)
            pick1 = (d1 < d0) | ((d1 == d0) & (_lexmin_rows(ends) == 1))
            endpt = np.where(pick1[:, None], ends[1], ends[0])
            radial = np.where(inside[:, None], radial, endpt)
        out[nz] = radial
        return out

    def _cell_normals(self, nodes):
        return (nodes - np.asarray(self.center)) / self.radius, np.full(nodes.shape[0], 1.0 / self.radius)

    def _angle_in_arc(self, th):
        rel = np.mod(th - self.theta0, 2 * math.pi)
        return rel <= (self.theta1 - self.theta0) + 1e-15

    def _sample(self, n, rng):
        return self.point_at(self.theta0 + (self.theta1 - self.theta0) * rng.random(n))

    def _transformed(self, scale, shift):
        c = scale * np.asarray(self.center) + shift
        return Arc(scale * self.radius, tuple(c), self.theta0, self.theta1)


@dataclass(frozen=True, eq=False)
class Curve(_OneParam):
    """Parametric C^1 curve ``gamma: [t0, t1] -> R^p``.

    ``gamma`` and ``dgamma`` must accept a 1-D array of parameters and return
    an ``(n, p)`` array.
    """

    gamma: Callable[[np.ndarray], np.ndarray]
    dgamma: Callable[[np.ndarray], np.ndarray]
    dim: int
    t0: float = 0.0
    t1: float = 1.0
    rtol: float = 1e-10
    kind = "curve"

    def __post_init__(self):
        if not self.t1 > self.t0:
            raise InvalidSetError("curve needs t0 < t1")
        t = np.linspace(self.t0, self.t1, 1025)
        speed = self.speed(t)
        if speed.shape != t.shape or not np.all(np.isfinite(speed)):
            raise InvalidSetError("curve derivative must return finite (n, p) values")
        if speed.min() <= 1e-12 * max(speed.max(), 1e-300):
            raise InvalidSetError("degenerate curve: derivative vanishes")

    @property
    def ambient_dim(self):
        return self.dim

    def speed(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float).reshape(-1)
        return np.linalg.norm(np.asarray(self.dgamma(t), dtype=float).reshape(t.size, -1), axis=1)

    def point_at(self, t):
        t = np.asarray(t, dtype=float).reshape(-1)
        return np.asarray(self.gamma(t), dtype=float).reshape(t.size, self.dim)

    def arclength(self, t0, t1):
        t0 = np.atleast_1d(np.asarray(t0, dtype=float))
        t1 = np.atleast_1d(np.asarray(t1, dtype=float))
        half = 0.5 * (t1 - t0)
        mid = 0.5 * (t1 + t0)
        tt = mid[:, None] + half[:, None] * _GL_X[None, :]
        sp = self.speed(tt.ravel()).reshape(tt.shape)
        # tiny inflation keeps the quadrature estimate on the safe side
        return np.abs(half) * (sp @ _GL_W) * (1 + 1e-9)

    def _measure(self, rtol):
        val, _ = integrate.quad(
            lambda t: float(self.speed(np.array([t]))[0]), self.t0, self.t1,
            epsrel=rtol, epsabs=0.0, limit=500,
        )
        return val

    def _param_range(self):
        return self.t0, self.t1

    def diameter(self):
        pts = self.point_at(np.linspace(self.t0, self.t1, 257))
        lo, hi = pts.min(axis=0), pts.max(axis=0)
        return float(np.linalg.norm(hi - lo)) + self.measure / 256

    def _closest_param(self, x: np.ndarray) -> float:
        ts = np.linspace(self.t0, self.t1, 1025)
        pts = self.point_at(ts)
        k = int(np.argmin(np.sum((pts - x) ** 2, axis=1)))

        def g(t):
            return float(np.dot(self.point_at([t])[0] - x, np.asarray(self.dgamma(np.array([t]))).reshape(-1)))

        best_t = ts[k]
        lo, hi = ts[max(k - 1, 0)], ts[min(k + 1, ts.size - 1)]
        glo, ghi = g(lo), g(hi)
        if glo < 0 < ghi:
            best_t = optimize.brentq(g, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
        elif k not in (0, ts.size - 1):
            # flat or kinked distance; fall back to bounded search
            res = optimize.minimize_scalar(
                lambda t: float(np.sum((self.point_at([t])[0] - x) ** 2)),
                bounds=(lo, hi), method="bounded", options={"xatol": 1e-14},
            )
            best_t = float(res.x)
        cands = [best_t, self.t0, self.t1]
        dists = [float(np.sum((self.point_at([t])[0] - x) ** 2)) for t in cands]
        return cands[int(np.argmin(dists))]

    def parameter_of(self, x):
        pts, _ = _as_points(x, self.dim)
        return np.array([self._closest_param(q) for q in pts])

    def _project(self, pts):
        return self.point_at(np.array([self._closest_param(q) for q in pts]))

    def _sample(self, n, rng):
        ts = np.linspace(self.t0, self.t1, 4097)
        cum = np.concatenate([[0.0], np.cumsum(self.arclength(ts[:-1], ts[1:]))])
        u = rng.random(n) * cum[-1]
        return self.point_at(np.interp(u, cum, ts))

    def _transformed(self, scale, shift):
        g, dg = self.gamma, self.dgamma
        return Curve(
            lambda t: scale * np.asarray(g(t), dtype=float).reshape(np.size(t), -1) + shift,
            lambda t: scale * np.asarray(dg(t), dtype=float).reshape(np.size(t), -1),
            self.dim, self.t0, self.t1, self.rtol,
        )


# ---------------------------------------------------------------------------
# box-based kinds


class _BoxCells(SetDescriptor):
    def _grid_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def _keep(self, center: np.ndarray, half: np.ndarray) -> np.ndarray:
        return np.ones(center.shape[0], dtype=bool)

    def _initial_cells(self, resolution):
        lo, hi = self._grid_bounds()
        p = self.ambient_dim
        side = hi - lo
        counts = np.floor(side * math.sqrt(p) / resolution).astype(int) + 1
        if np.prod(counts.astype(float)) > DEFAULT_MAX_NODES * 4:
            raise ResourceLimitError(f"initial grid of {counts.tolist()} cells exceeds the node cap")
        axes = [lo[k] + side[k] * (np.arange(counts[k]) + 0.5) / counts[k] for k in range(p)]
        center = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, p)
        half = np.broadcast_to(side / (2 * counts), center.shape).copy()
        keep = self._keep(center, half)
        return center[keep], half[keep]

    def _split(self, a, b):
        p = self.ambient_dim
        offs = np.array(np.meshgrid(*([[-0.5, 0.5]] * p), indexing="ij")).reshape(p, -1).T
        center = (a[:, None, :] + offs[None, :, :] * b[:, None, :]).reshape(-1, p)
        half = np.repeat(0.5 * b, offs.shape[0], axis=0)
        keep = self._keep(center, half)
        return center[keep], half[keep]

    def _cell_geometry(self, a, b):
        nodes = self._project(a) if a.shape[0] else a.copy()
        radii = np.linalg.norm(b, axis=1) + np.linalg.norm(a - nodes, axis=1)
        return nodes, radii


@dataclass(frozen=True, eq=False)
class Box(_BoxCells):
    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in np.atleast_1d(self.lo))
        hi = tuple(float(v) for v in np.atleast_1d(self.hi))
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if len(lo) != len(hi) or not all(h > l for l, h in zip(lo, hi)):
            raise InvalidSetError(f"box needs lo < hi componentwise, got {lo}, {hi}")

    @property
    def kind(self):
        unit = all(v == 0.0 for v in self.lo) and all(v == 1.0 for v in self.hi)
        return "cube" if unit else "box"

    @property
    def ambient_dim(self):
        return len(self.lo)

    @property
    def hausdorff_dim(self):
        return len(self.lo)

    def diameter(self):
        return float(np.linalg.norm(np.subtract(self.hi, self.lo)))

    def _measure(self, rtol):
        return float(np.prod(np.subtract(self.hi, self.lo)))

    def _grid_bounds(self):
        return np.asarray(self.lo), np.asarray(self.hi)

    def _project(self, pts):
        return np.clip(pts, np.asarray(self.lo), np.asarray(self.hi))

    def _sample(self, n, rng):
        lo, hi = np.asarray(self.lo), np.asarray(self.hi)
        return lo + (hi - lo) * rng.random((n, lo.size))

    def _transformed(self, scale, shift):
        return Box(tuple(scale * np.asarray(self.lo) + shift), tuple(scale * np.asarray(self.hi) + shift))


class _Round(_BoxCells):
    dim: int
    radius: float
    center: tuple

    def _validate(self):
        if self.dim < 1 or not self.radius > 0:
            raise InvalidSetError("dimension must be >= 1 and radius positive")
        c = tuple(float(v) for v in (self.center if self.center is not None else np.zeros(self.dim)))
        if len(c) != self.dim:
            raise InvalidSetError("center has wrong dimension")
        object.__setattr__(self, "center", c)

    @property
    def ambient_dim(self):
        return self.dim

    def diameter(self):
        return 2 * self.radius

    def _grid_bounds(self):
        c = np.asarray(self.center)
        return c - self.radius, c + self.radius

    def _radial(self, pts):
        c = np.asarray(self.center)
        v = pts - c
        nrm = np.linalg.norm(v, axis=1)
        out = np.empty_like(pts)
        zero = nrm == 0
        e1 = np.zeros(self.dim)
        e1[0] = -1.0
        out[zero] = c + self.radius * e1
        out[~zero] = c + self.radius * v[~zero] / nrm[~zero, None]
        return out, nrm


@dataclass(frozen=True, eq=False)
class Sphere(_Round):
    """Sphere of the given radius in R^dim (unit S^{dim-1} by default)."""

    dim: int
    radius: float = 1.0
    center: tuple | None = None
    kind = "sphere"

    def __post_init__(self):
        self._validate()
        if self.dim < 2:
            raise InvalidSetError("sphere needs ambient dimension >= 2")

    @property
    def hausdorff_dim(self):
        return self.dim - 1

    def _measure(self, rtol):
        p = self.dim
        return 2 * math.pi ** (p / 2) / math.gamma(p / 2) * self.radius ** (p - 1)

    def _project(self, pts):
        return self._radial(pts)[0]

    def _keep(self, center, half):
        dist = np.linalg.norm(center - np.asarray(self.center), axis=1)
        return np.abs(dist - self.radius) <= np.linalg.norm(half, axis=1)

    def _cell_normals(self, nodes):
        return (nodes - np.asarray(self.center)) / self.radius, np.full(nodes.shape[0], 1.0 / self.radius)

    def _sample(self, n, rng):
        g = rng.standard_normal((n, self.dim))
        g /= np.linalg.norm(g, axis=1)[:, None]
        return np.asarray(self.center) + self.radius * g

    def _transformed(self, scale, shift):
        return Sphere(self.dim, scale * self.radius, tuple(scale * np.asarray(self.center) + shift))


@dataclass(frozen=True, eq=False)
class Ball(_Round):
    dim: int
    radius: float = 1.0
    center: tuple | None = None
    kind = "ball"

    def __post_init__(self):
        self._validate()

    @property
    def hausdorff_dim(self):
        return self.dim

    def _measure(self, rtol):
        p = self.dim
        return math.pi ** (p / 2) / math.gamma(p / 2 + 1) * self.radius ** p

    def _project(self, pts):
        radial, nrm = self._radial(pts)
        return np.where((nrm <= self.radius)[:, None], pts, radial)

    def _keep(self, center, half):
        dist = np.linalg.norm(center - np.asarray(self.center), axis=1)
        return dist - self.radius <= np.linalg.norm(half, axis=1)

    def _sample(self, n, rng):
        g = rng.standard_normal((n, self.dim))
        g /= np.linalg.norm(g, axis=1)[:, None]
        r = rng.random(n) ** (1.0 / self.dim)
        return np.asarray(self.center) + self.radius * g * r[:, None]

    def _transformed(self, scale, shift):
        return Ball(self.dim, scale * self.radius, tuple(scale * np.asarray(self.center) + shift))


# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Union(SetDescriptor):
    """Finite union of sets of equal ambient and Hausdorff dimension.

    Parts are assumed to overlap at most in H_d-null sets, so the measure is
    additive.
    """

    members: tuple
    kind = "union"

    def __post_init__(self):
        members = tuple(self.members)
        if not members:
            raise InvalidSetError("union needs at least one part")
        if any(isinstance(m, Union) for m in members):
            members = tuple(q for m in members for q in m.parts())
        if len({m.ambient_dim for m in members}) != 1 or len({m.hausdorff_dim for m in members}) != 1:
            raise InvalidSetError("union parts must share ambient and Hausdorff dimension")
        object.__setattr__(self, "members", members)

    def parts(self):
        return self.members

    @property
    def ambient_dim(self):
        return self.members[0].ambient_dim

    @property
    def hausdorff_dim(self):
        return self.members[0].hausdorff_dim

    def diameter(self):
        pts = np.concatenate([m.point_at([t for t in m._param_range()]) if isinstance(m, _OneParam)
                              else np.vstack(m._grid_bounds()) for m in self.members])
        span = pts.max(axis=0) - pts.min(axis=0)
        return float(np.linalg.norm(span)) + max(m.diameter() for m in self.members)

    def _measure(self, rtol):
        return float(sum(m._measure(rtol) for m in self.members))

    def _project(self, pts):
        projs = np.stack([m._project(pts) for m in self.members])  # (k, n, p)
        dist = np.linalg.norm(projs - pts[None], axis=2)
        out = np.empty_like(pts)
        for i in range(pts.shape[0]):
            dmin = dist[:, i].min()
            cands = projs[dist[:, i] == dmin, i]
            out[i] = cands[_lexmin_rows(cands)]
        return out

    def _sample(self, n, rng):
        w = np.array([m.measure for m in self.members])
        idx = rng.choice(len(self.members), size=n, p=w / w.sum())
        out = np.empty((n, self.ambient_dim))
        for k, m in enumerate(self.members):
            sel = idx == k
            out[sel] = m._sample(int(sel.sum()), rng)
        return out

    def _transformed(self, scale, shift):
        return Union(tuple(m._transformed(scale, shift) for m in self.members))


# ---------------------------------------------------------------------------
# constructors


def interval(a: float, b: float) -> Interval:
    return Interval(float(a), float(b))


def circle(radius: float = 1.0, center=(0.0, 0.0)) -> Arc:
    return Arc(float(radius), tuple(center))


def arc(theta0: float, theta1: float, radius: float = 1.0, center=(0.0, 0.0)) -> Arc:
    return Arc(float(radius), tuple(center), float(theta0), float(theta1))


def sphere(p: int, radius: float = 1.0, center=None) -> Sphere:
    """Sphere S^{p-1} in R^p."""
    return Sphere(int(p), float(radius), center)


def ball(p: int, radius: float = 1.0, center=None) -> Ball:
    return Ball(int(p), float(radius), center)


def cube(p: int) -> Box:
    """Unit cube [0, 1]^p."""
    return Box((0.0,) * p, (1.0,) * p)


def box(lo: Sequence[float], hi: Sequence[float]) -> Box:
    return Box(tuple(lo), tuple(hi))


def curve(gamma, dgamma, dim: int, t0: float = 0.0, t1: float = 1.0, rtol: float = 1e-10) -> Curve:
    return Curve(gamma, dgamma, int(dim), float(t0), float(t1), float(rtol))


def union(*sets: SetDescriptor) -> Union:
    return Union(tuple(sets))


# ---------------------------------------------------------------------------
# operations


def hausdorff_measure(set_: SetDescriptor, rtol: float = 1e-10) -> float:
    """d-dimensional Hausdorff measure, normalized so unit d-cubes have measure 1."""
    return float(set_._measure(rtol))


def sample_uniform(set_: SetDescriptor, n: int, seed: int) -> np.ndarray:
    """``n`` i.i.d. points from normalized H_d on the set; deterministic in ``seed``."""
    if n < 1:
        raise InvalidArgumentError("n must be >= 1")
    rng = np.random.default_rng(seed)
    return set_._sample(int(n), rng)


def project(set_: SetDescriptor, x):
    return set_.project(x)


@dataclass(frozen=True, eq=False)
class Cells:
    """A list of mesh cells; see the module docstring for the layout of ``a``/``b``."""

    part: np.ndarray
    a: np.ndarray
    b: np.ndarray
    nodes: np.ndarray
    radii: np.ndarray
    normals: np.ndarray
    kappa: np.ndarray

    _FIELDS = ("part", "a", "b", "nodes", "radii", "normals", "kappa")

    def __len__(self):
        return self.part.shape[0]

    def take(self, idx) -> "Cells":
        return Cells(*(getattr(self, f)[idx] for f in self._FIELDS))

    @staticmethod
    def concat(items: Sequence["Cells"]) -> "Cells":
        items = list(items)
        return Cells(*(np.concatenate([getattr(c, f) for c in items]) for f in Cells._FIELDS))


def _make_cells(set_: SetDescriptor, part_idx: int, a: np.ndarray, b: np.ndarray) -> Cells:
    member = set_.parts()[part_idx]
    p = set_.ambient_dim
    if a.shape[0] == 0:
        z = np.zeros((0, p))
        return Cells(np.zeros(0, dtype=np.int64), z, z, z, np.zeros(0), z, np.zeros(0))
    nodes, radii = member._cell_geometry(a, b)
    normals, kappa = member._cell_normals(nodes)
    return Cells(np.full(a.shape[0], part_idx, dtype=np.int64), a, b, nodes, radii, normals, kappa)


def initial_cells(set_: SetDescriptor, resolution: float) -> Cells:
    if not resolution > 0:
        raise InvalidArgumentError("resolution must be positive")
    blocks = []
    for k, member in enumerate(set_.parts()):
        a, b = member._initial_cells(resolution)
        blocks.append(_make_cells(set_, k, a, b))
    return Cells.concat(blocks)


def split_cells(set_: SetDescriptor, cells: Cells) -> Cells:
    """Children of every cell in ``cells``, grouped by part in part order."""
    blocks = []
    for k, member in enumerate(set_.parts()):
        sel = cells.part == k
        if not np.any(sel):
            continue
        a, b = member._split(cells.a[sel], cells.b[sel])
        blocks.append(_make_cells(set_, k, a, b))
    if not blocks:
        return cells.take(np.zeros(0, dtype=np.int64))
    return Cells.concat(blocks)


@dataclass(frozen=True, eq=False)
class Mesh:
    """Finite node set with a certified covering radius."""

    set: SetDescriptor
    cells: Cells
    resolution: float

    @property
    def nodes(self) -> np.ndarray:
        return self.cells.nodes

    @property
    def covering_radius(self) -> float:
        return float(self.cells.radii.max())

    @property
    def size(self) -> int:
        return len(self.cells)


def mesh(set_: SetDescriptor, resolution: float, max_nodes: int = DEFAULT_MAX_NODES) -> Mesh:
    """Mesh of the set whose covering radius is at most ``resolution``."""
    cells = initial_cells(set_, resolution)
    while True:
        if len(cells) > max_nodes:
            raise ResourceLimitError(f"mesh needs more than {max_nodes} nodes at resolution {resolution}")
        big = cells.radii > resolution
        if not np.any(big):
            break
        cells = Cells.concat([cells.take(~big), split_cells(set_, cells.take(big))])
    return Mesh(set_, cells, float(resolution))


def mesh_with_nodes(set_: SetDescriptor, n_nodes: int, max_nodes: int = DEFAULT_MAX_NODES) -> Mesh:
    """Mesh whose node count is roughly ``n_nodes`` (at least that many for 1-D sets)."""
    d = set_.hausdorff_dim
    res = (set_.measure / max(n_nodes, 1)) ** (1.0 / d)
    if d > 1:
        res *= 0.5 * math.sqrt(d)
    return mesh(set_, res, max_nodes)
