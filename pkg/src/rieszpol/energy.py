"""Minimal (weighted) Riesz energy and the polarization-energy inequality.

Energies use ordered pairs: ``E(omega) = sum_{i != j} K(x_i, x_j)``, so each
unordered pair is counted twice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _brute
from . import geometry as geo
from .errors import BudgetRefusedError, InvalidArgumentError
from .kernel import KernelSpec, log_kernel, riesz
from .potential import Configuration
from .solver import _Budget, _dejitter, _nn_scale, default_seed_style, discretize, kernel_matrix, seed_configuration, brute_force_small


@dataclass
class EnergyResult:
    config: Configuration
    value: float
    trace: dict = field(default_factory=dict)
    budget_exhausted: bool = False

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "N": self.config.N,
            "points": self.config.points.tolist(),
            "budget_exhausted": self.budget_exhausted,
            "trace": self.trace,
        }


def _pair_terms(pts: np.ndarray, kernel: KernelSpec, eps: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    diff = pts[:, None, :] - pts[None, :, :]
    d = np.sqrt(np.sum(diff * diff, axis=2))
    d = np.maximum(d, eps)
    off = ~np.eye(pts.shape[0], dtype=bool)
    with np.errstate(divide="ignore"):
        if kernel.is_log:
            terms = -np.log(d)
        else:
            terms = d ** (-kernel.s)
            if kernel.weight is not None:
                terms = kernel.weight(pts[:, None, :], pts[None, :, :]) * terms
    return np.where(off, terms, 0.0), diff, d


def energy_of(config: Configuration, kernel: KernelSpec) -> float:
    """Sum of ``K(x_i, x_j)`` over ordered pairs ``i != j``; ``+inf`` for coincident points when eps is 0."""
    if config.N < 2:
        raise InvalidArgumentError("energy needs N >= 2")
    terms, _, _ = _pair_terms(config.points, kernel, kernel.effective_eps())
    # correctly rounded, hence exactly invariant under relabeling the points
    return math.fsum(terms.ravel())


def _energy_and_grad(pts, kernel: KernelSpec, eps: float):
    terms, diff, d = _pair_terms(pts, kernel, eps)
    E = float(np.sum(terms))
    off = ~np.eye(pts.shape[0], dtype=bool)
    with np.errstate(divide="ignore", invalid="ignore"):
        if kernel.is_log:
            coef = -1.0 / (d * d)
        else:
            coef = -kernel.s * d ** (-kernel.s - 2)
    coef = np.where(off, coef, 0.0)
    if kernel.weight is not None and not kernel.is_log:
        w = kernel.weight(pts[:, None, :], pts[None, :, :])
        coef = coef * w
    if not kernel.is_weighted:
        # symmetric kernel: x_i appears as target and as source
        return E, 2.0 * np.einsum("ij,ijk->ik", coef, diff)
    # x_i as target (first sum) and as source (second sum) of w(y, x) d^-s
    g = np.einsum("ij,ijk->ik", coef, diff) - np.einsum("ji,jik->ik", coef, diff)
    with np.errstate(divide="ignore"):
        base = np.where(off, d ** (-kernel.s), 0.0)
    g = g + np.einsum("ji,jik->ik", base, kernel.weight.grad_source(pts[:, None, :], pts[None, :, :]))
    h = 1e-7
    for k in range(pts.shape[1]):
        e = np.zeros(pts.shape[1])
        e[k] = h
        dw = kernel.weight(pts[:, None, :] + e, pts[None, :, :]) - kernel.weight(pts[:, None, :] - e, pts[None, :, :])
        g[:, k] += np.sum(base * dw / (2 * h), axis=1)
    return E, g


def _descend(set_, kernel, pts, eps, budget: _Budget, tol=1e-12):
    E, g = _energy_and_grad(pts, kernel, eps)
    iters = 0
    while budget.take():
        gmax = np.linalg.norm(g, axis=1).max()
        if not gmax > 0 or not np.isfinite(gmax):
            break
        step = 0.1 * _nn_scale(pts, set_)
        improved = False
        for _ in range(40):
            cand = set_.project(pts - (step / gmax) * g)
            Ec, gc = _energy_and_grad(cand, kernel, eps)
            if not budget.take():
                return pts, E, iters, True
            if Ec < E:
                improved = True
                break
            step *= 0.5
        if not improved:
            break
        gain = E - Ec
        pts, E, g = cand, Ec, gc
        iters += 1
        if gain <= tol * abs(E):
            break
    return pts, E, iters, not budget.left


def minimize_energy(
    set_: geo.SetDescriptor,
    kernel: KernelSpec,
    N: int,
    seed: int = 0,
    budget: int = 50_000,
    restarts: int = 4,
) -> EnergyResult:
    """Projected gradient descent with multistart; restart 0 starts from the closed-form seed."""
    if N < 2:
        raise InvalidArgumentError("energy needs N >= 2")
    if budget <= 0:
        raise InvalidArgumentError("budget must be positive")
    eps = kernel.effective_eps(set_)
    bud = _Budget(budget)
    streams = np.random.SeedSequence(seed).spawn(restarts)
    best_pts, best_E, exhausted = None, math.inf, False
    history = []
    for r in range(restarts):
        rng = np.random.default_rng(streams[r])
        if r == 0:
            pts = seed_configuration(set_, N, default_seed_style(set_, N)).points.copy()
        else:
            pts = seed_configuration(set_, N, "jittered-uniform", int(rng.integers(2**31))).points.copy()
        pts = _dejitter(pts, set_, rng)
        pts, E, _, ex = _descend(set_, kernel, pts, eps, bud)
        exhausted |= ex
        E = energy_of(Configuration(pts, set_), kernel.with_eps(None))
        if E < best_E:
            best_pts, best_E = pts, E
        history.append(best_E)
    trace = {"restarts": restarts, "best_so_far": history, "evaluations": bud.used}
    return EnergyResult(Configuration(best_pts, set_), float(best_E), trace, exhausted)


def brute_force_energy(set_: geo.SetDescriptor, kernel: KernelSpec, N: int, M: int | None = None,
                       nodes: np.ndarray | None = None, budget: float = 5e7) -> EnergyResult:
    """Exact minimum energy over N distinct nodes of an M-node discretization."""
    if N < 2:
        raise InvalidArgumentError("energy needs N >= 2")
    if nodes is None:
        nodes = discretize(set_, M)
    M = nodes.shape[0]
    count = math.comb(M, N)
    if count > budget:
        raise BudgetRefusedError(f"C({M}, {N}) = {count} subsets exceeds the budget {budget:g}")
    kmat = kernel_matrix(nodes, kernel)
    np.fill_diagonal(kmat, 0.0)
    value, idx = _brute.min_energy_subset(kmat, N, bool(np.all(kmat >= 0)))
    cfg = Configuration(nodes[np.asarray(idx)], set_)
    return EnergyResult(cfg, float(value), {"subsets": count, "indices": np.asarray(idx).tolist()})


@dataclass
class BoundReport:
    """Both discretized optima and whether ``P >= E / (N - 1)``."""

    set_kind: str
    kernel: dict
    N: int
    M: int
    polarization: float
    energy: float
    bound: float
    holds: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def check_polarization_energy_bound(set_: geo.SetDescriptor, kernel: KernelSpec, N: int, M: int,
                                    budget: float = 5e7) -> BoundReport:
    """Exhaustive search on both sides over the same M nodes.

    Minimal energy is taken over N distinct nodes, maximal polarization over
    node multisets with the inner minimum over all M nodes.
    """
    if N < 2:
        raise InvalidArgumentError("the bound needs N >= 2")
    nodes = discretize(set_, M)
    P = brute_force_small(set_, kernel, N, nodes=nodes, budget=budget).value
    E = brute_force_energy(set_, kernel, N, nodes=nodes, budget=budget).value
    bound = E / (N - 1)
    return BoundReport(set_.kind, kernel.to_dict(), N, M, P, E, bound, bool(P >= bound))


def default_bound_instances():
    """Two sets, three N, two kernels: twelve exhaustively solvable instances."""
    sets = [(geo.circle(), 120), (geo.interval(-1.0, 1.0), 101)]
    kernels = [riesz(2.0), log_kernel()]
    return [(s, M, k, N) for s, M in sets for N in (2, 3, 4) for k in kernels]


def equally_spaced_energy(N: int, s: float) -> float:
    """Energy of N equally spaced points on the unit circle (ordered pairs), by chord sums."""
    k = np.arange(1, N)
    chords = 2.0 * np.sin(math.pi * k / N)
    return float(N * np.sum(chords ** (-s)))


@dataclass
class EnergyRatioReport:
    Ns: list
    ratios: list
    rel_steps: list
    cauchy: bool
    limit: float


def circle_energy_ratios(s: float, kmin: int = 4, kmax: int = 14, k_check: int = 10, tol: float = 0.01) -> EnergyRatioReport:
    """``E_s(S^1; N) / N^{1+s}`` at ``N = 2^k`` for equally spaced points, with a Cauchy check for ``k >= k_check``."""
    Ns = [2**k for k in range(kmin, kmax + 1)]
    ratios = [equally_spaced_energy(N, s) / N ** (1 + s) for N in Ns]
    steps = [abs(b - a) / abs(a) for a, b in zip(ratios, ratios[1:])]
    cauchy = all(st < tol for N, st in zip(Ns[1:], steps) if N >= 2**k_check)
    return EnergyRatioReport(Ns, ratios, steps, cauchy, ratios[-1])
