"""Separation, covering radius and the s -> infinity links to covering and packing.

As s grows, ``P_s(omega)^{1/s}`` tends to ``1 / rho(omega)`` (rho is the
covering radius) and ``E_s(omega)^{1/s}`` to ``1 / delta(omega)`` (delta is
the separation).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import pdist

from . import geometry as geo
from .errors import InvalidArgumentError
from .kernel import riesz
from .potential import Configuration, period_region, polarization


@dataclass
class CoveringBracket:
    lower: float
    upper: float
    witness: np.ndarray
    budget_exhausted: bool = False
    rounds: int = 0

    def contains(self, x: float, slack: float = 0.0) -> bool:
        return self.lower - slack <= x <= self.upper + slack


@dataclass
class ExtremalStats:
    N: int
    separation: float
    covering: CoveringBracket


def separation(config: Configuration) -> float:
    """Minimum pairwise distance (0 for repeated points)."""
    if config.N < 2:
        raise InvalidArgumentError("separation needs N >= 2")
    return float(pdist(config.points).min())


def covering_radius(
    config: Configuration,
    set_: geo.SetDescriptor | None = None,
    target_gap: float = 0.0,
    rel_gap: float = 1e-9,
    max_rounds: int = 60,
    max_cells: int = 5_000_000,
) -> CoveringBracket:
    """Certified bracket on ``max_{y in A} min_j |y - x_j|``.

    The nearest-distance function is 1-Lipschitz, so a cell of radius h
    around node z cannot exceed ``f(z) + h``.
    """
    set_ = config.set if set_ is None else set_
    tree = cKDTree(config.points)
    res = min(set_.diameter() / 16, 0.25 * (set_.measure / config.N) ** (1.0 / set_.hausdorff_dim))
    cells = geo.mesh(set_, res).cells
    vals = tree.query(cells.nodes)[0]
    ups = vals + cells.radii
    k = int(np.argmax(vals))
    best, witness = float(vals[k]), cells.nodes[k].copy()
    rounds, total, exhausted = 0, len(cells), False
    while True:
        upper = float(ups.max())
        goal = max(target_gap, rel_gap * best)
        if upper - best <= goal:
            break
        if rounds >= max_rounds or total >= max_cells:
            exhausted = True
            break
        split = ups > best + goal
        keep = ups >= best
        children = geo.split_cells(set_, cells.take(split))
        cv = tree.query(children.nodes)[0]
        total += len(children)
        rest = keep & ~split
        cells = geo.Cells.concat([cells.take(rest), children])
        vals = np.concatenate([vals[rest], cv])
        ups = np.concatenate([ups[rest], cv + children.radii])
        j = int(np.argmax(cv)) if len(cv) else -1
        if j >= 0 and cv[j] > best:
            best, witness = float(cv[j]), children.nodes[j].copy()
        rounds += 1
    upper = float(ups.max())
    if not any(isinstance(m, geo.Curve) for m in set_.parts()):
        # rho <= diam(A); the diameter is exact for the closed-form kinds
        upper = min(upper, set_.diameter())
    return CoveringBracket(best, max(upper, best), witness, exhausted, rounds)


def extremal_stats(config: Configuration) -> ExtremalStats:
    sep = separation(config) if config.N >= 2 else math.nan
    return ExtremalStats(config.N, sep, covering_radius(config))


def _is_equally_spaced_circle(config: Configuration) -> bool:
    c = config.set
    if not (isinstance(c, geo.Arc) and c.is_full) or config.N < 1:
        return False
    th = np.sort(c.parameter_of(config.points))
    gaps = np.diff(np.concatenate([th, [th[0] + 2 * math.pi]]))
    return bool(np.allclose(gaps, 2 * math.pi / config.N, rtol=0, atol=1e-12))


@dataclass
class LargeSRecord:
    s: float
    polarization: float
    covering_product: float
    covering_deviation: float
    energy: float | None
    packing_product: float | None
    packing_deviation: float | None


@dataclass
class LargeSReport:
    N: int
    covering_radius: float
    separation: float | None
    records: list = field(default_factory=list)

    @property
    def covering_monotone(self) -> bool:
        devs = [r.covering_deviation for r in self.records]
        return all(b < a for a, b in zip(devs, devs[1:]))

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "covering_radius": self.covering_radius,
            "separation": self.separation,
            "records": [r.__dict__ for r in self.records],
            "covering_monotone": self.covering_monotone,
        }


def check_large_s_limits(config: Configuration, s_list, rel_gap: float = 1e-12) -> LargeSReport:
    """``P_s(omega)^{1/s} * rho`` and ``E_s(omega)^{1/s} * delta`` for increasing s.

    Equally spaced circle configurations are evaluated on one period arc.
    """
    from .energy import energy_of

    s_list = list(s_list)
    if any(b <= a for a, b in zip(s_list, s_list[1:])):
        raise InvalidArgumentError("s values must increase")
    rho_b = covering_radius(config, rel_gap=1e-13)
    rho = rho_b.lower
    delta = separation(config) if config.N >= 2 else None
    sym = _is_equally_spaced_circle(config)
    rep = LargeSReport(config.N, rho, delta)
    for s in s_list:
        k = riesz(s)
        if sym:
            th0 = float(config.set.parameter_of(config.points[:1])[0])
            est = polarization(config, k, period_region(config.set, config.N, th0), rel_gap=rel_gap)
        else:
            est = polarization(config, k, rel_gap=rel_gap)
        P = est.upper
        cov = P ** (1.0 / s) * rho
        if config.N >= 2:
            E = energy_of(config, k)
            pack = E ** (1.0 / s) * delta
            rec = LargeSRecord(s, P, cov, abs(cov - 1), E, pack, abs(pack - 1))
        else:
            rec = LargeSRecord(s, P, cov, abs(cov - 1), None, None, None)
        rep.records.append(rec)
    return rep


def sandwich_bounds(config: Configuration, s: float) -> tuple[float, float]:
    """``1/rho <= P_s(omega)^{1/s} <= N^{1/s}/rho`` evaluated with the certified rho bracket."""
    b = covering_radius(config, rel_gap=1e-12)
    return 1.0 / b.upper, config.N ** (1.0 / s) / b.lower
