import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from rieszpol import distribution as dist
from rieszpol import geometry as geo
from rieszpol import kernel as kern
from rieszpol.asymptotics import equally_spaced_circle
from rieszpol.errors import CPDViolationError
from rieszpol.potential import Configuration

C = geo.circle()
U = kern.Modulation(2.0, 1.0, 0)


@pytest.mark.parametrize("s", [1.0, 2.0, 7.5])
def test_unweighted_and_constant_measure(s):
    assert dist.weighted_hausdorff(C, None, s) == pytest.approx(2 * math.pi, rel=1e-12)
    assert dist.weighted_hausdorff(C, kern.constant_weight(3.0), s) == pytest.approx(3.0 ** (-1 / s) * 2 * math.pi,
                                                                                   rel=1e-12)


def test_weighted_measure_standard_integral():
    val = dist.weighted_hausdorff(C, kern.separable_weight(U), 1.0)
    assert val == pytest.approx(2 * math.pi / math.sqrt(3), rel=1e-8)


def test_weighted_measure_on_square_by_quadrature():
    w = kern.separable_weight(kern.Modulation(2.0, 1.0, 0), kern.Modulation(1.0, 0.5, 1))
    val = dist.weighted_hausdorff(geo.cube(2), w, 3.0)
    oracle = integrate.dblquad(lambda y, x: ((2 + x) / (1 + 0.5 * y)) ** (-2 / 3), 0, 1, 0, 1, epsabs=0, epsrel=1e-11)[0]
    assert val == pytest.approx(oracle, rel=1e-8)


def test_cpd_violation_during_quadrature():
    bad = kern.separable_weight(kern.Modulation(0.5, 1.0, 0))
    with pytest.raises(CPDViolationError):
        dist.weighted_hausdorff(C, bad, 2.0)


@given(st.integers(1, 12), st.floats(1.0, 6.0))
def test_masses_additive(k, s):
    w = kern.separable_weight(U)
    regions = dist.partition(C, k)
    total = dist.weighted_hausdorff(C, w, s)
    assert sum(r.mass(w, s) for r in regions) == pytest.approx(total, rel=1e-8)


@pytest.mark.parametrize("set_", [C, geo.interval(-1, 1), geo.cube(2), geo.sphere(3),
                                  geo.union(geo.arc(0, 1), geo.arc(2, 4))], ids=lambda s: s.kind)
def test_unweighted_masses_proportional_to_measure(set_):
    regions = dist.partition(set_, 4)
    masses = np.array([r.mass(None, 3.0) for r in regions])
    total = dist.weighted_hausdorff(set_, None, 3.0)
    assert masses.sum() == pytest.approx(total, rel=1e-10)
    # equal-measure partition within each part
    if len(set_.parts()) == 1:
        assert np.allclose(masses / total, 1 / len(regions), rtol=1e-10, atol=0)


def test_count_examples():
    quads = [dist.ParamRegion(C, i * math.pi / 2, (i + 1) * math.pi / 2) for i in range(4)]
    cfg = equally_spaced_circle(4, phase=math.pi / 4)
    assert dist.empirical_counts(cfg, quads).tolist() == [1, 1, 1, 1]
    same = Configuration(np.repeat([[1.0, 0.0]], 5, axis=0), C)
    assert dist.empirical_counts(same, quads).tolist() == [5, 0, 0, 0]
    halves = [dist.ParamRegion(C, 0.0, math.pi), dist.ParamRegion(C, math.pi, 2 * math.pi)]
    assert dist.empirical_counts(equally_spaced_circle(8), halves).tolist() == [4, 4]


@given(st.integers(1, 60), st.integers(0, 9999), st.integers(1, 9))
def test_counts_sum_to_N(N, seed, k):
    for set_ in (C, geo.cube(2), geo.sphere(3)):
        cfg = Configuration(geo.sample_uniform(set_, N, seed), set_)
        assert dist.empirical_counts(cfg, dist.partition(set_, k)).sum() == N


def test_equally_spaced_discrepancy_small_and_decreasing():
    Ns = [8, 16, 32, 64, 128]
    rep = dist.compare_distribution([equally_spaced_circle(N, phase=0.1) for N in Ns], None, 3.0)
    d = [r.discrepancy for r in rep.records]
    assert all(x <= 1 / N + 1e-12 for x, N in zip(d, Ns))
    assert rep.trend_decreasing and rep.passed


def test_predicted_cdf_matches_quadrature():
    w = kern.separable_weight(U)
    t = np.array([0.5, 2.0, 4.0])
    F = dist.predicted_cdf(C, w, 3.0, t)
    dens = lambda th: (2 + math.cos(th)) ** (-1 / 3)  # noqa: E731
    tot = integrate.quad(dens, 0, 2 * math.pi, epsrel=1e-12)[0]
    want = [integrate.quad(dens, 0, x, epsrel=1e-12)[0] / tot for x in t]
    assert np.allclose(F, want, rtol=1e-8)


def test_log_kernel_is_report_only():
    I = geo.interval(-1, 1)
    cfg = Configuration(np.cos((2 * np.arange(1, 9) - 1) * math.pi / 16).reshape(-1, 1), I)
    rep = dist.compare_distribution([cfg], None, 1.0, log_kernel=True)
    assert rep.passed is None
    assert any("out-of-theorem" in n for n in rep.notes)


def test_small_bins_are_merged_with_a_note():
    cfg = Configuration(geo.sample_uniform(geo.cube(2), 20, 0), geo.cube(2))
    rep = dist.compare_distribution([cfg], None, 3.0, k=6)
    assert any("merged" in n for n in rep.notes)
    assert rep.metric == "max-relative-bin-error"
