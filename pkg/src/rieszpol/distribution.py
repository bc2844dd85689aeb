"""Weighted Hausdorff measure and the limit distribution of optimal configurations.

The predicted limit of the counting measures of asymptotically optimal
configurations has density proportional to ``w(x, x)^{-d/s}`` with respect
to ``H_d`` on the set.  Regions used for counting are half-open: lower
boundaries are included, upper boundaries are excluded except where they
coincide with the end of the set, so counts always add up to N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from . import geometry as geo
from .errors import CPDViolationError, InvalidArgumentError
from .kernel import WeightSpec
from .potential import Configuration

QUAD_RTOL = 1e-8


def _density(weight: WeightSpec | None, s: float, d: int, w_min: float | None):
    """x -> w(x, x)^{-d/s}, checking the CPD bound on every evaluation."""
    if weight is None:
        return None

    def f(x):
        w = weight.diagonal(x)
        if np.any(~(w > 0)) or (w_min is not None and np.any(w < w_min * (1 - 1e-12))):
            raise CPDViolationError(f"w(x,x) = {np.min(w):.6g} below the CPD bound during quadrature")
        return w ** (-d / s)

    return f


class Region:
    """A piece of a set used to partition it for counting."""

    label: str = ""

    def mass(self, weight: WeightSpec | None, s: float) -> float:
        raise NotImplementedError

    def contains(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError


@dataclass(eq=False)
class ParamRegion(Region):
    """Parameter interval ``[t0, t1)`` of a one-parameter part (closed at the part's end)."""

    part: geo.SetDescriptor
    t0: float
    t1: float
    closed: bool = False
    label: str = ""

    def _speed(self, t):
        if isinstance(self.part, geo.Curve):
            return self.part.speed(t)
        if isinstance(self.part, geo.Arc):
            return np.full_like(np.asarray(t, dtype=float), self.part.radius)
        return np.ones_like(np.asarray(t, dtype=float))

    def mass(self, weight, s):
        if weight is None:
            return float(self.part.arclength(self.t0, self.t1)) if not isinstance(self.part, geo.Curve) else \
                float(integrate.quad(lambda t: float(self._speed(np.array([t]))[0]), self.t0, self.t1,
                                     epsabs=0, epsrel=QUAD_RTOL, limit=200)[0])
        dens = _density(weight, s, 1, weight.w_min)

        def f(t):
            tt = np.array([t])
            return float(dens(self.part.point_at(tt))[0] * self._speed(tt)[0])

        val, _ = integrate.quad(f, self.t0, self.t1, epsabs=0, epsrel=QUAD_RTOL, limit=200)
        return float(val)

    def contains(self, pts):
        pts = np.atleast_2d(pts)
        on = self.part.contains(pts)
        out = np.zeros(pts.shape[0], dtype=bool)
        if np.any(on):
            t = self.part.parameter_of(pts[on])
            inside = (t >= self.t0) & ((t <= self.t1) if self.closed else (t < self.t1))
            out[on] = inside
        return out


@dataclass(eq=False)
class BoxRegion(Region):
    """Half-open box ``[lo, hi)`` with the faces in ``closed`` (per axis) included."""

    lo: np.ndarray
    hi: np.ndarray
    closed: np.ndarray
    label: str = ""

    def mass(self, weight, s):
        p = len(self.lo)
        vol = float(np.prod(np.asarray(self.hi) - np.asarray(self.lo)))
        if weight is None:
            return vol
        dens = _density(weight, s, p, weight.w_min)
        f = lambda *x: float(dens(np.array(x))) # noqa: E731
        val, _ = integrate.nquad(f, list(zip(self.lo, self.hi)), opts={"epsrel": QUAD_RTOL, "epsabs": 0})
        return float(val)

    def contains(self, pts):
        pts = np.atleast_2d(pts)
        lo, hi = np.asarray(self.lo), np.asarray(self.hi)
        upper = np.where(self.closed, pts <= hi, pts < hi)
        return np.all((pts >= lo) & upper, axis=1)


@dataclass(eq=False)
class SpherePatch(Region):
    """Patch ``z in [z0, z1), phi in [phi0, phi1)`` of a 2-sphere in cylindrical coordinates.

    Equal ``dz * dphi`` patches have equal area (Archimedes).
    """

    sphere: geo.Sphere
    z0: float
    z1: float
    phi0: float
    phi1: float
    closed_z: bool = False
    label: str = ""

    def _point(self, z, phi):
        R = self.sphere.radius
        r = math.sqrt(max(R * R - z * z, 0.0))
        return np.asarray(self.sphere.center) + np.array([r * math.cos(phi), r * math.sin(phi), z])

    def mass(self, weight, s):
        R = self.sphere.radius
        area = R * (self.z1 - self.z0) * (self.phi1 - self.phi0)
        if weight is None:
            return area
        dens = _density(weight, s, 2, weight.w_min)
        val, _ = integrate.dblquad(
            lambda phi, z: float(dens(self._point(z, phi))), self.z0, self.z1, self.phi0, self.phi1,
            epsabs=0, epsrel=QUAD_RTOL,
        )
        return float(R * val)

    def contains(self, pts):
        pts = np.atleast_2d(pts)
        v = pts - np.asarray(self.sphere.center)
        z = v[:, 2]
        phi = np.mod(np.arctan2(v[:, 1], v[:, 0]), 2 * math.pi)
        zin = (z >= self.z0) & ((z <= self.z1) if self.closed_z else (z < self.z1))
        return zin & (phi >= self.phi0) & (phi < self.phi1)


def partition(set_: geo.SetDescriptor, k: int) -> list[Region]:
    """Deterministic partition of the set into regions of equal unweighted measure (per part).

    One-parameter parts are cut into ``k`` equal arclength pieces, boxes into a
    ``k^p`` grid and 2-spheres into ``k`` bands times ``2k`` sectors.
    """
    if k < 1:
        raise InvalidArgumentError("k must be >= 1")
    out: list[Region] = []
    for pi, m in enumerate(set_.parts()):
        if isinstance(m, (geo.Interval, geo.Arc)):
            t0, t1 = m._param_range()
            edges = np.linspace(t0, t1, k + 1)
            closed_end = not (isinstance(m, geo.Arc) and m.is_full)
            for i in range(k):
                out.append(ParamRegion(m, edges[i], edges[i + 1], closed_end and i == k - 1, f"{pi}:{i}"))
        elif isinstance(m, geo.Curve):
            ts = np.linspace(m.t0, m.t1, 4097)
            cum = np.concatenate([[0.0], np.cumsum(m.arclength(ts[:-1], ts[1:]))])
            edges = np.interp(np.linspace(0, cum[-1], k + 1), cum, ts)
            for i in range(k):
                out.append(ParamRegion(m, edges[i], edges[i + 1], i == k - 1, f"{pi}:{i}"))
        elif isinstance(m, geo.Box):
            p = m.ambient_dim
            lo, hi = np.asarray(m.lo), np.asarray(m.hi)
            axes = [np.linspace(lo[j], hi[j], k + 1) for j in range(p)]
            for idx in np.ndindex(*([k] * p)):
                a = np.array([axes[j][idx[j]] for j in range(p)])
                b = np.array([axes[j][idx[j] + 1] for j in range(p)])
                closed = np.array([idx[j] == k - 1 for j in range(p)])
                out.append(BoxRegion(a, b, closed, f"{pi}:{idx}"))
        elif isinstance(m, geo.Sphere) and m.dim == 3:
            R = m.radius
            zs = np.linspace(-R, R, k + 1) + m.center[2]
            zs_rel = np.linspace(-R, R, k + 1)
            phis = np.linspace(0, 2 * math.pi, 2 * k + 1)
            for i in range(k):
                for j in range(2 * k):
                    out.append(SpherePatch(m, zs_rel[i], zs_rel[i + 1], phis[j], phis[j + 1], i == k - 1, f"{pi}:{i},{j}"))
            del zs
        else:
            raise InvalidArgumentError(f"no partition rule for {m.kind}")
    return out


class _Whole(Region):
    def __init__(self, set_):
        self.set = set_

    def mass(self, weight, s):
        return weighted_hausdorff(self.set, weight, s)


def weighted_hausdorff(set_: geo.SetDescriptor, weight: WeightSpec | None, s: float, region: Region | None = None) -> float:
    """``H_d^{s,w}(region) = int_region w(x,x)^{-d/s} dH_d``; the whole set when ``region`` is None."""
    d = set_.hausdorff_dim
    if s < d:
        raise InvalidArgumentError("the weighted Hausdorff measure is used for s >= d")
    if region is not None:
        return region.mass(weight, s)
    if weight is None or weight.kind == "constant":
        c = 1.0 if weight is None else weight.c
        return geo.hausdorff_measure(set_) * c ** (-d / s)
    total = 0.0
    for m in set_.parts():
        if isinstance(m, (geo.Interval, geo.Arc, geo.Curve)):
            t0, t1 = m._param_range()
            total += ParamRegion(m, t0, t1, True).mass(weight, s)
        elif isinstance(m, geo.Box):
            total += BoxRegion(np.asarray(m.lo), np.asarray(m.hi), np.ones(m.ambient_dim, bool)).mass(weight, s)
        elif isinstance(m, geo.Sphere) and m.dim == 3:
            total += SpherePatch(m, -m.radius, m.radius, 0.0, 2 * math.pi, True).mass(weight, s)
        else:
            raise InvalidArgumentError(f"weighted measure not available for {m.kind}")
    return total


def empirical_counts(config: Configuration, regions: list[Region]) -> np.ndarray:
    """Number of configuration points (with multiplicity) in each region.

    A point is given to the first region that contains it, so counts add up
    to N even if regions overlap on a boundary.
    """
    pts = config.points
    counts = np.zeros(len(regions), dtype=np.int64)
    left = np.ones(pts.shape[0], dtype=bool)
    for i, r in enumerate(regions):
        if not np.any(left):
            break
        hit = np.zeros(pts.shape[0], dtype=bool)
        hit[left] = r.contains(pts[left])
        counts[i] = int(hit.sum())
        left &= ~hit
    if np.any(left):
        raise InvalidArgumentError(f"{int(left.sum())} point(s) fall outside every region")
    return counts


def predicted_cdf(set_: geo.SetDescriptor, weight: WeightSpec | None, s: float, t: np.ndarray) -> np.ndarray:
    """Limit-measure CDF along the parameter of a single one-parameter set."""
    if len(set_.parts()) != 1 or set_.hausdorff_dim != 1:
        raise InvalidArgumentError("CDFs are defined along a single one-parameter set")
    t0, t1 = set_._param_range()
    total = ParamRegion(set_, t0, t1, True).mass(weight, s)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    # cumulative masses between consecutive sorted abscissae
    order = np.argsort(t)
    ts = np.clip(t[order], t0, t1)
    cum = np.empty_like(ts)
    acc, prev = 0.0, t0
    for i, ti in enumerate(ts):
        if ti > prev:
            acc += ParamRegion(set_, prev, ti).mass(weight, s)
            prev = ti
        cum[i] = acc
    out = np.empty_like(cum)
    out[order] = cum / total
    return out


def cdf_discrepancy(config: Configuration, weight: WeightSpec | None, s: float) -> float:
    """Kolmogorov-Smirnov distance between the empirical and predicted CDFs along the parameter."""
    set_ = config.set
    t = np.sort(set_.parameter_of(config.points))
    F = predicted_cdf(set_, weight, s, t)
    n = t.size
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - F), np.max(F - (i - 1) / n)))


@dataclass
class DistributionRecord:
    N: int
    discrepancy: float
    counts: list
    certified_lower: float | None = None


@dataclass
class DistributionReport:
    regions: list
    masses: list
    total_mass: float
    records: list
    metric: str
    tolerance: float | None
    passed: bool | None
    trend_decreasing: bool
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "regions": self.regions,
            "masses": self.masses,
            "total_mass": self.total_mass,
            "records": [r.__dict__ for r in self.records],
            "metric": self.metric,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "trend_decreasing": self.trend_decreasing,
            "notes": self.notes,
        }


def _merge_small(regions, masses, threshold):
    """Merge consecutive regions until each merged group has at least ``threshold`` mass."""
    groups, cur, acc = [], [], 0.0
    for i, m in enumerate(masses):
        cur.append(i)
        acc += m
        if acc >= threshold:
            groups.append(cur)
            cur, acc = [], 0.0
    if cur:
        if groups:
            groups[-1].extend(cur)
        else:
            groups.append(cur)
    return groups


def compare_distribution(
    configs: list[Configuration],
    weight: WeightSpec | None,
    s: float,
    k: int = 16,
    tolerance: float | None = 0.1,
    log_kernel: bool = False,
    certified: list | None = None,
) -> DistributionReport:
    """Compare configurations of increasing N with the predicted limit density.

    One-parameter sets use the sup-distance of CDFs; other sets the maximal
    relative error over bins of predicted mass at least ``5/N`` (smaller bins
    are merged).  The pass/fail verdict uses the largest N.
    """
    if not configs:
        raise InvalidArgumentError("need at least one configuration")
    set_ = configs[0].set
    notes = []
    if log_kernel:
        notes.append("out-of-theorem: logarithmic kernel, report only")
    regions = partition(set_, k)
    masses = [r.mass(weight, s) for r in regions]
    total = float(sum(masses))
    one_d = set_.hausdorff_dim == 1 and len(set_.parts()) == 1
    records = []
    for i, cfg in enumerate(configs):
        counts = empirical_counts(cfg, regions)
        if one_d:
            disc = cdf_discrepancy(cfg, weight, s)
        else:
            groups = _merge_small(regions, masses, 5.0 / cfg.N * total)
            if len(groups) < len(regions):
                notes.append(f"N={cfg.N}: merged {len(regions)} bins into {len(groups)}")
            errs = []
            for g in groups:
                pm = sum(masses[j] for j in g) / total
                em = counts[g].sum() / cfg.N
                errs.append(abs(em - pm) / pm)
            disc = float(max(errs))
        cl = None if certified is None else certified[i]
        records.append(DistributionRecord(cfg.N, disc, counts.tolist(), cl))
    discs = [r.discrepancy for r in records]
    trend = all(b < a for a, b in zip(discs, discs[1:]))
    passed = None if (tolerance is None or log_kernel) else bool(discs[-1] <= tolerance)
    return DistributionReport(
        [r.label for r in regions], masses, total, records,
        "sup-cdf" if one_d else "max-relative-bin-error", tolerance, passed, trend, notes,
    )
