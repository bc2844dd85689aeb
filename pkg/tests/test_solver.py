import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rieszpol import geometry as geo
from rieszpol import kernel as kern
from rieszpol import solver as sol
from rieszpol.asymptotics import equally_spaced_circle
from rieszpol.errors import BudgetRefusedError, InvalidArgumentError
from rieszpol.potential import Configuration, polarization

C = geo.circle()
I = geo.interval(-1.0, 1.0)


def test_optimize_square_on_circle():
    r = sol.optimize(C, kern.riesz(2.0), 4, seed=0)
    assert r.estimate.contains(4.0)
    assert r.value == r.estimate.lower
    assert sol.circle_alignment_error(r.config, equally_spaced_circle(4)) <= 1e-3


def test_optimize_chebyshev_pair():
    r = sol.optimize(I, kern.log_kernel(), 2, seed=0)
    z = np.sort(r.config.points[:, 0])
    assert np.allclose(z, [-math.sqrt(0.5), math.sqrt(0.5)], atol=1e-3)
    assert abs(r.value - math.log(2)) <= 1e-4


def test_optimize_single_point():
    r = sol.optimize(C, kern.riesz(2.0), 1, seed=3)
    assert r.estimate.contains(0.25)


def test_optimize_rejects_bad_arguments():
    with pytest.raises(InvalidArgumentError):
        sol.optimize(C, kern.riesz(2.0), 0)
    with pytest.raises(InvalidArgumentError):
        sol.optimize(C, kern.riesz(2.0), 2, budget=0)
    with pytest.raises(InvalidArgumentError):
        sol.optimize(C, kern.riesz(2.0), 2, method="gradient")


def test_optimize_is_deterministic():
    a = sol.optimize(C, kern.riesz(3.0), 5, seed=2, budget=4000)
    b = sol.optimize(C, kern.riesz(3.0), 5, seed=2, budget=4000)
    assert np.array_equal(a.config.points, b.config.points)
    assert (a.estimate.lower, a.estimate.upper) == (b.estimate.lower, b.estimate.upper)


@pytest.mark.parametrize("method", ["anneal", "exchange", "multistart(2)"])
def test_each_method_reaches_square_value(method):
    r = sol.optimize(C, kern.riesz(2.0), 4, method=method, seed=1, budget=6000)
    assert r.estimate.lower <= 4.0 + r.estimate.gap
    assert r.estimate.lower >= 3.99


def test_small_budget_sets_flag():
    r = sol.optimize(C, kern.riesz(2.0), 6, seed=0, budget=5)
    assert r.budget_exhausted
    assert r.estimate.lower <= r.estimate.upper


def test_parse_method():
    assert sol.parse_method("multistart(7)") == ("multistart", 7)
    assert sol.parse_method("multistart") == ("multistart", 4)
    assert sol.parse_method("anneal") == ("anneal", 1)
    with pytest.raises(InvalidArgumentError):
        sol.parse_method("anneal(3)")


def test_brute_force_examples():
    k = kern.riesz(2.0)
    one = sol.brute_force_small(C, k, 1, M=360)
    assert one.value == pytest.approx(0.25, rel=1e-14)
    nodes = sol.discretize(C, 360)
    vals = sol.kernel_matrix(nodes, k)[:, 0]
    assert np.allclose(vals[vals < np.inf].min(), 0.25, rtol=1e-14)
    two = sol.brute_force_small(C, k, 2, M=360)
    assert two.value == pytest.approx(1.0, rel=1e-14)
    assert np.linalg.norm(two.config.points.sum(axis=0)) <= 1e-12


def test_brute_force_chebyshev_nodes():
    nodes = sol.discretize(I, 201)
    r = sol.brute_force_small(I, kern.log_kernel(), 2, nodes=nodes)
    z = np.sort(r.config.points[:, 0])
    want = [nodes[np.argmin(np.abs(nodes[:, 0] - t)), 0] for t in (-math.sqrt(0.5), math.sqrt(0.5))]
    assert np.allclose(z, want)


def test_brute_force_refuses_large_searches():
    with pytest.raises(BudgetRefusedError):
        sol.brute_force_small(C, kern.riesz(2.0), 8, M=360)


@pytest.mark.parametrize("s,N", [(2.0, 2), (3.0, 3), (2.0, 3)])
def test_oracle_equivalence_small(s, N):
    k = kern.riesz(s)
    bf = sol.brute_force_small(C, k, N, M=360)
    r = sol.optimize(C, k, N, seed=0)
    assert r.estimate.lower <= bf.value + r.estimate.gap + 1e-9
    # brute force is restricted to the 360-gon, so the continuous optimum can only be larger
    assert r.estimate.upper >= bf.value - 1e-9


def test_split_bound_on_disjoint_arcs():
    k = kern.riesz(2.0)
    B, D = geo.arc(0.0, 1.0), geo.arc(2.0, 3.5)
    rb = sol.optimize(B, k, 2, seed=0, budget=6000)
    rd = sol.optimize(D, k, 2, seed=0, budget=6000)
    ru = sol.optimize(geo.union(B, D), k, 4, seed=0, budget=8000)
    slack = rb.estimate.gap + rd.estimate.gap + ru.estimate.gap
    assert ru.estimate.lower >= min(rb.estimate.lower, rd.estimate.lower) - slack
    # the union of the two sub-configurations is feasible and certifies the same bound
    joint = polarization(Configuration(np.vstack([rb.config.points, rd.config.points]), geo.union(B, D)), k,
                         rel_gap=1e-10)
    assert joint.lower >= min(rb.estimate.lower, rd.estimate.lower) - slack


def test_seed_examples():
    cfg = sol.seed_configuration(C, 3, "equally-spaced")
    th = np.sort(np.mod(np.arctan2(cfg.points[:, 1], cfg.points[:, 0]), 2 * math.pi))
    assert np.allclose(th, [0, 2 * math.pi / 3, 4 * math.pi / 3], atol=1e-12)
    cube = sol.seed_configuration(geo.cube(2), 9, "tensor-lattice")
    centers = {(a, b) for a in (1 / 6, 0.5, 5 / 6) for b in (1 / 6, 0.5, 5 / 6)}
    assert {tuple(np.round(p, 12)) for p in cube.points} == {tuple(np.round(c, 12)) for c in centers}
    fib = sol.seed_configuration(geo.sphere(3), 100, "fibonacci-sphere")
    assert fib.N == 100 and np.allclose(np.linalg.norm(fib.points, axis=1), 1.0, atol=1e-12)


@pytest.mark.parametrize("set_,style", [(geo.cube(2), "equally-spaced"), (C, "tensor-lattice"),
                                        (geo.ball(3), "fibonacci-sphere"), (geo.cube(2), "tensor-lattice")])
def test_incompatible_seed_styles(set_, style):
    with pytest.raises(InvalidArgumentError):
        sol.seed_configuration(set_, 8 if style == "tensor-lattice" and set_.kind != "circle" else 4, style)


def test_tiling_examples():
    t = sol.tile_configuration(Configuration([[0.5]], geo.cube(1)), 2)
    assert np.allclose(np.sort(t.points[:, 0]), [0.25, 0.75])
    t = sol.tile_configuration(Configuration([[0.5, 0.5]], geo.cube(2)), 2)
    got = sorted(map(tuple, np.round(t.points, 12)))
    assert got == [(0.25, 0.25), (0.25, 0.75), (0.75, 0.25), (0.75, 0.75)]
    with pytest.raises(InvalidArgumentError):
        sol.tile_configuration(equally_spaced_circle(3), 2)


def test_tiling_single_point_inequality():
    k = kern.riesz(3.0)
    one = Configuration([[0.5]], geo.cube(1))
    P1 = polarization(one, k, rel_gap=1e-12)
    P3 = polarization(sol.tile_configuration(one, 3), k, rel_gap=1e-12)
    assert P3.lower >= 27 * P1.upper - P3.gap - 27 * P1.gap


@given(st.integers(1, 4), st.integers(2, 3), st.integers(0, 1000))
def test_tiling_inequality_random(N, m, seed):
    Q = geo.cube(1)
    k = kern.riesz(2.0)
    base = sol.seed_configuration(Q, N, "jittered-uniform", seed)
    P0 = polarization(base, k, rel_gap=1e-10)
    Pt = polarization(sol.tile_configuration(base, m), k, rel_gap=1e-10)
    assert Pt.lower >= m**2 * P0.upper - Pt.gap - m**2 * P0.gap


@given(st.integers(2, 9), st.floats(0, 2 * math.pi))
def test_alignment_is_rotation_invariant(N, phase):
    assert sol.circle_alignment_error(equally_spaced_circle(N, phase=phase), equally_spaced_circle(N)) <= 1e-12
