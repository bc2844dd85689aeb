"""Weighted Riesz potentials and certified brackets on their infimum over a set.

The bracket is a branch-and-bound over mesh cells.  Each cell carries the
potential at its node (an attained value, so the running minimum is an upper
bound on the infimum) and a lower bound valid on the whole cell.  Cells whose
lower bound blocks the requested gap are split until the gap closes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _fast
from . import geometry as geo
from .errors import InvalidArgumentError
from .kernel import KernelSpec, audit_weight

# node * source pairs per numpy chunk on the weighted path
_CHUNK_PAIRS = 2_000_000


@dataclass(frozen=True, eq=False)
class Configuration:
    """An N-point multiset on a set; repeated points are allowed."""

    points: np.ndarray
    set: geo.SetDescriptor

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1) if self.set.ambient_dim == 1 else pts.reshape(1, -1)
        if pts.ndim != 2 or pts.shape[1] != self.set.ambient_dim or pts.shape[0] < 1:
            raise InvalidArgumentError(f"configuration must be a non-empty (N, {self.set.ambient_dim}) array")
        if not np.all(np.isfinite(pts)):
            raise InvalidArgumentError("configuration has non-finite coordinates")
        bad = ~self.set.contains(pts, 1e-9 * self.set.diameter())
        if np.any(bad):
            raise InvalidArgumentError(f"{int(bad.sum())} configuration point(s) are off the set")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def N(self) -> int:
        return self.points.shape[0]

    def __len__(self):
        return self.N

    def on(self, set_: geo.SetDescriptor) -> "Configuration":
        """Same points, viewed as a configuration on another set."""
        return Configuration(self.points, set_)

    def merged(self, other: "Configuration", set_: geo.SetDescriptor | None = None) -> "Configuration":
        return Configuration(np.vstack([self.points, other.points]), set_ or self.set)

    def transformed(self, scale: float = 1.0, shift=None) -> "Configuration":
        shift = np.zeros(self.set.ambient_dim) if shift is None else np.asarray(shift, dtype=float)
        return Configuration(scale * self.points + shift, self.set.transformed(scale, shift))


@dataclass
class PolarizationEstimate:
    """Certified bracket ``lower <= inf_y U(y) <= upper``."""

    upper: float
    lower: float
    witness: np.ndarray
    covering_radius: float
    budget_exhausted: bool = False
    rounds: int = 0
    evaluations: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def gap(self) -> float:
        return self.upper - self.lower

    @property
    def value(self) -> float:
        return self.upper

    def contains(self, x: float, slack: float = 0.0) -> bool:
        return self.lower - slack <= x <= self.upper + slack

    def to_dict(self) -> dict:
        return {
            "upper": self.upper,
            "lower": self.lower,
            "witness": np.asarray(self.witness).tolist(),
            "covering_radius": self.covering_radius,
            "budget_exhausted": self.budget_exhausted,
            "rounds": self.rounds,
            "evaluations": self.evaluations,
        }


def _int_exponent(s: float) -> int:
    return int(s) if float(s).is_integer() and 0 < s <= 64 else 0


def _as_src(config) -> np.ndarray:
    pts = config.points if isinstance(config, Configuration) else np.asarray(config, dtype=float)
    return np.ascontiguousarray(pts, dtype=float)


def potential_values(y: np.ndarray, sources, kernel: KernelSpec, eps: float = 0.0) -> np.ndarray:
    """U(y_i) for every row of ``y``; distances are clamped below by ``eps``."""
    y = np.ascontiguousarray(np.atleast_2d(y), dtype=float)
    src = _as_src(sources)
    if kernel.is_log:
        return _fast.log_values(y, src, float(eps))
    if not kernel.is_weighted:
        s = float(kernel.s)
        return kernel.scale * _fast.riesz_values(y, src, s, _int_exponent(s), float(eps))
    w = kernel.weight
    if w.kind == "separable":
        s = float(kernel.s)
        q = np.ascontiguousarray(w.u(src), dtype=float)
        return _fast.riesz_values_q(y, src, q, s, _int_exponent(s), float(eps)) / w.v(y)
    out = np.empty(y.shape[0])
    step = max(1, _CHUNK_PAIRS // max(src.shape[0], 1))
    for i in range(0, y.shape[0], step):
        yy = y[i:i + step]
        d = np.maximum(np.linalg.norm(yy[:, None, :] - src[None, :, :], axis=2), eps)
        w = kernel.weight(yy[:, None, :], src[None, :, :])
        with np.errstate(divide="ignore"):
            out[i:i + step] = np.sum(w * d ** (-kernel.s), axis=1)
    return out


def potential_at(y, config: Configuration, kernel: KernelSpec) -> float:
    """U(y; config), respecting multiplicities; ``+inf`` on a source when eps is 0."""
    y = np.asarray(y, dtype=float).reshape(1, -1)
    return float(potential_values(y, config, kernel, kernel.effective_eps())[0])


def cell_bounds(cells: geo.Cells, sources, kernel: KernelSpec, wbounds=None) -> tuple[np.ndarray, np.ndarray]:
    """Node values and per-cell certified lower bounds (exact kernel, no clamp)."""
    nodes = np.ascontiguousarray(cells.nodes)
    radii = np.ascontiguousarray(cells.radii)
    normals = np.ascontiguousarray(cells.normals)
    kappa = np.ascontiguousarray(cells.kappa)
    src = _as_src(sources)
    if kernel.is_log:
        return _fast.log_bracket(nodes, radii, normals, kappa, src)
    s = float(kernel.s)
    if not kernel.is_weighted:
        vals, lows = _fast.riesz_bracket(nodes, radii, normals, kappa, src, s, _int_exponent(s))
        c = kernel.scale
        return c * vals, c * lows
    w = kernel.weight
    vals = np.empty(nodes.shape[0])
    lows = np.empty(nodes.shape[0])
    step = max(1, _CHUNK_PAIRS // max(src.shape[0], 1))
    for i in range(0, nodes.shape[0], step):
        z = nodes[i:i + step]
        h = radii[i:i + step, None]
        d = np.linalg.norm(z[:, None, :] - src[None, :, :], axis=2)
        wz = w(z[:, None, :], src[None, :, :])
        if w.kind == "separable":
            # 1/v(y) >= 1/(v(z) + |slope| h) on the cell ball
            wlo = w.u(src)[None, :] / (w.v(z)[:, None] + abs(w.v.slope) * h)
        else:
            wlo = wz - wbounds.lip_target * h
        wlo = np.maximum(wlo, wbounds.lo)
        with np.errstate(divide="ignore"):
            vals[i:i + step] = np.sum(wz * d ** (-s), axis=1)
            lows[i:i + step] = np.sum(wlo * (d + h) ** (-s), axis=1)
    return vals, lows


def _fp_allowance(value: float, n: int, kernel: KernelSpec, region: geo.SetDescriptor) -> float:
    """Rounding allowance for a sum of n kernel terms: (n + 4) u times the sum of magnitudes.

    For positive kernels the sum of magnitudes is |value|; log terms are
    bounded by |value| + n * max(1, |log diam|) at the points that matter.
    """
    mag = abs(value)
    if kernel.is_log:
        mag += n * max(1.0, abs(math.log(region.diameter())))
    return (n + 4) * 2.0**-53 * mag


def default_resolution(config: Configuration, region: geo.SetDescriptor) -> float:
    """Initial mesh scale: a fraction of the typical spacing of the configuration."""
    d = region.hausdorff_dim
    spacing = (config.set.measure / config.N) ** (1.0 / d)
    return min(region.diameter() / 16, 0.25 * spacing)


def _check_region(config: Configuration, region: geo.SetDescriptor):
    if region.ambient_dim != config.set.ambient_dim:
        raise InvalidArgumentError("region and configuration live in different spaces")


def polarization(
    config: Configuration,
    kernel: KernelSpec,
    region: geo.SetDescriptor | None = None,
    target_gap: float = 0.0,
    rel_gap: float = 1e-8,
    resolution: float | None = None,
    max_rounds: int = 60,
    max_refine: int = 1 << 16,
    max_evaluations: int = 5_000_000,
) -> PolarizationEstimate:
    """Certified bracket on ``inf_{y in region} U(y; config)``.

    The loop stops once ``upper - lower <= max(target_gap, rel_gap*|upper|)``.
    Every round splits all cells whose lower bound is below
    ``upper - gap`` (lowest first, at most ``max_refine`` of them).  When a
    budget runs out the best bracket so far is returned with
    ``budget_exhausted`` set.
    """
    region = config.set if region is None else region
    _check_region(config, region)
    if target_gap < 0 or rel_gap < 0:
        raise InvalidArgumentError("gaps must be non-negative")
    wb = audit_weight(kernel.weight, config.set) if kernel.is_weighted else None
    src = _as_src(config)
    if resolution is None:
        resolution = default_resolution(config, region)
    cells = geo.mesh(region, resolution).cells
    vals, lows = cell_bounds(cells, src, kernel, wb)
    evaluations = len(cells)
    k = int(np.argmin(vals))
    upper, witness = float(vals[k]), cells.nodes[k].copy()
    rounds = 0
    exhausted = False
    while True:
        lower = float(lows.min())
        goal = max(target_gap, rel_gap * abs(upper))
        if upper - lower <= goal:
            break
        if rounds >= max_rounds or evaluations >= max_evaluations:
            exhausted = True
            break
        keep = lows <= upper
        blocking = np.flatnonzero(lows < upper - goal)
        if blocking.size > max_refine:
            blocking = blocking[np.argsort(lows[blocking], kind="stable")[:max_refine]]
        split = np.zeros(len(cells), dtype=bool)
        split[blocking] = True
        children = geo.split_cells(region, cells.take(split))
        cvals, clows = cell_bounds(children, src, kernel, wb)
        evaluations += len(children)
        rest = keep & ~split
        cells = geo.Cells.concat([cells.take(rest), children])
        vals = np.concatenate([vals[rest], cvals])
        lows = np.concatenate([lows[rest], clows])
        if len(children):
            j = int(np.argmin(cvals))
            if cvals[j] < upper:
                upper, witness = float(cvals[j]), children.nodes[j].copy()
        rounds += 1
    fp = _fp_allowance(upper, src.shape[0], kernel, region)
    active = lows < upper - max(target_gap, rel_gap * abs(upper)) if exhausted else lows <= upper
    h = float(cells.radii[active].max()) if np.any(active) else float(cells.radii.max())
    return PolarizationEstimate(
        upper=upper + fp,
        lower=min(lower, upper) - fp,
        witness=witness,
        covering_radius=h,
        budget_exhausted=exhausted,
        rounds=rounds,
        evaluations=evaluations,
        meta={"fp_allowance": fp},
    )


def polarization_over_union(config: Configuration, kernel: KernelSpec, regions, **kw) -> PolarizationEstimate:
    """Bracket on the infimum over a union of regions: min of uppers, min of lowers."""
    regions = list(regions)
    if not regions:
        raise InvalidArgumentError("regions must be non-empty")
    ests = [polarization(config, kernel, r, **kw) for r in regions]
    k = int(np.argmin([e.upper for e in ests]))
    return PolarizationEstimate(
        upper=ests[k].upper,
        lower=min(e.lower for e in ests),
        witness=ests[k].witness,
        covering_radius=max(e.covering_radius for e in ests),
        budget_exhausted=any(e.budget_exhausted for e in ests),
        rounds=max(e.rounds for e in ests),
        evaluations=sum(e.evaluations for e in ests),
        meta={"per_region": [(e.lower, e.upper) for e in ests]},
    )


def mesh_values(config: Configuration, mesh: geo.Mesh, kernel: KernelSpec) -> np.ndarray:
    """Exact potential at every mesh node."""
    return potential_values(mesh.nodes, config, kernel, 0.0)


def mesh_bracket(config: Configuration, mesh: geo.Mesh, kernel: KernelSpec) -> PolarizationEstimate:
    """One-shot bracket from a fixed mesh, without refinement."""
    wb = audit_weight(kernel.weight, config.set) if kernel.is_weighted else None
    vals, lows = cell_bounds(mesh.cells, config, kernel, wb)
    k = int(np.argmin(vals))
    fp = _fp_allowance(float(vals[k]), config.N, kernel, mesh.set)
    return PolarizationEstimate(
        upper=float(vals[k]) + fp,
        lower=float(min(lows.min(), vals[k])) - fp,
        witness=mesh.nodes[k].copy(),
        covering_radius=mesh.covering_radius,
        evaluations=mesh.size,
    )


def period_region(circle: geo.Arc, N: int, phase: float = 0.0) -> geo.Arc:
    """One period arc of an N-fold rotationally symmetric configuration on a circle.

    For a configuration invariant under rotation by 2*pi/N the infimum over
    this arc equals the infimum over the whole circle.
    """
    if not circle.is_full:
        raise InvalidArgumentError("period regions need a full circle")
    return geo.arc(phase, phase + 2 * math.pi / N, circle.radius, circle.center)
