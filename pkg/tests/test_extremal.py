import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.spatial import cKDTree

from rieszpol import extremal as ext
from rieszpol import geometry as geo
from rieszpol import kernel as kern
from rieszpol.asymptotics import equally_spaced_circle
from rieszpol.potential import Configuration, polarization

C = geo.circle()


def test_separation_examples():
    assert ext.separation(equally_spaced_circle(4)) == pytest.approx(math.sqrt(2), rel=1e-15)
    assert ext.separation(Configuration([[1.0, 0.0], [1.0, 0.0]], C)) == 0.0
    assert ext.separation(Configuration([[-1.0], [1.0]], geo.interval(-1, 1))) == 2.0


def test_covering_examples():
    assert ext.covering_radius(equally_spaced_circle(4)).contains(2 * math.sin(math.pi / 8))
    assert ext.covering_radius(equally_spaced_circle(1)).contains(2.0)
    b = ext.covering_radius(Configuration([[0.0], [1.0]], geo.interval(0, 1)))
    assert b.contains(0.5) and b.upper - b.lower <= 1e-9


SETS = [C, geo.interval(-1, 1), geo.cube(2), geo.sphere(3), geo.ball(2)]


@given(st.sampled_from(range(len(SETS))), st.integers(1, 12), st.integers(0, 10_000))
def test_covering_bracket_contains_monte_carlo(i, N, seed):
    set_ = SETS[i]
    cfg = Configuration(geo.sample_uniform(set_, N, seed), set_)
    b = ext.covering_radius(cfg, rel_gap=1e-6)
    y = geo.sample_uniform(set_, 100_000, seed + 1)
    mc = cKDTree(cfg.points).query(y)[0].max()
    assert mc <= b.upper * (1 + 1e-12)
    assert b.lower <= b.upper
    assert b.upper <= set_.diameter() * (1 + 1e-12)


@given(st.integers(2, 8), st.integers(0, 10_000), st.sampled_from([2.0, 8.0, 32.0]))
def test_sandwich_bounds(N, seed, s):
    cfg = Configuration(geo.sample_uniform(C, N, seed), C)
    lo, hi = ext.sandwich_bounds(cfg, s)
    e = polarization(cfg, kern.riesz(s), rel_gap=1e-10)
    assert lo * (1 - 1e-9) <= e.upper ** (1 / s)
    assert e.lower ** (1 / s) <= hi * (1 + 1e-9)


def test_sandwich_slack_shrinks_with_s():
    cfg = Configuration(geo.sample_uniform(C, 5, 2), C)
    gaps = [np.log(ext.sandwich_bounds(cfg, s)[1] / ext.sandwich_bounds(cfg, s)[0]) for s in (2, 8, 32)]
    assert gaps[0] > gaps[1] > gaps[2]


def test_large_s_examples():
    rep = ext.check_large_s_limits(equally_spaced_circle(5), [200.0, 400.0])
    d200, d400 = (r.covering_deviation for r in rep.records)
    assert d200 <= 0.05 and d400 < d200
    assert rep.covering_monotone


@pytest.mark.parametrize("s", [1.0, 5.0, 50.0, 300.0])
def test_single_point_limit_exact(s):
    rep = ext.check_large_s_limits(equally_spaced_circle(1), [s])
    r = rep.records[0]
    assert r.polarization ** (1 / s) == pytest.approx(0.5, rel=1e-9)
    assert rep.covering_radius == pytest.approx(2.0, rel=1e-9)


def test_packing_product_tends_to_one():
    rep = ext.check_large_s_limits(equally_spaced_circle(6), [50.0, 200.0, 800.0])
    packs = [r.packing_deviation for r in rep.records]
    assert packs[0] > packs[1] > packs[2]


def test_extremal_ranges():
    cfg = Configuration(geo.sample_uniform(C, 7, 5), C)
    st_ = ext.extremal_stats(cfg)
    assert st_.separation <= 2 * 1.0
    assert 0 < st_.covering.lower <= C.diameter()
