import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rieszpol import energy as en
from rieszpol import geometry as geo
from rieszpol import kernel as kern
from rieszpol import solver as sol
from rieszpol.asymptotics import equally_spaced_circle
from rieszpol.potential import Configuration

C = geo.circle()
I = geo.interval(-1.0, 1.0)


def test_energy_examples():
    k = kern.riesz(2.0)
    assert en.energy_of(equally_spaced_circle(3), k) == pytest.approx(2.0, rel=1e-14)
    assert en.energy_of(equally_spaced_circle(2), k) == pytest.approx(0.5, rel=1e-15)
    assert en.energy_of(Configuration([[1.0, 0.0], [1.0, 0.0]], C), k) == math.inf


def test_energy_pair_enumeration():
    cfg = Configuration(geo.sample_uniform(C, 6, 3), C)
    w = kern.separable_weight(kern.Modulation(2.0, 1.0, 0), kern.Modulation(1.5, 0.5, 1))
    for k in (kern.riesz(2.5), kern.log_kernel(), kern.weighted_riesz(3.0, w)):
        pts = cfg.points
        direct = sum(kern.eval(k, pts[i], pts[j]) for i in range(6) for j in range(6) if i != j)
        assert en.energy_of(cfg, k) == pytest.approx(direct, rel=1e-13)


@given(st.integers(2, 8), st.integers(0, 10_000), st.randoms(use_true_random=False))
def test_energy_permutation_invariant(N, seed, rnd):
    cfg = Configuration(geo.sample_uniform(geo.sphere(3), N, seed), geo.sphere(3))
    perm = list(range(N))
    rnd.shuffle(perm)
    shuffled = Configuration(cfg.points[perm], cfg.set)
    for k in (kern.riesz(2.0), kern.log_kernel()):
        assert en.energy_of(shuffled, k) == en.energy_of(cfg, k)


def test_minimize_energy_examples():
    k = kern.riesz(2.0)
    r3 = en.minimize_energy(C, k, 3, seed=0)
    assert r3.value == pytest.approx(2.0, rel=1e-6)
    assert sol.circle_alignment_error(r3.config, equally_spaced_circle(3)) <= 1e-3
    r2 = en.minimize_energy(C, k, 2, seed=0)
    assert r2.value == pytest.approx(0.5, rel=1e-6)
    ri = en.minimize_energy(I, k, 2, seed=0)
    assert ri.value == pytest.approx(0.5, rel=1e-6)
    assert np.allclose(np.sort(ri.config.points[:, 0]), [-1.0, 1.0], atol=1e-6)


def test_minimize_energy_is_an_upper_bound_on_brute_force():
    k = kern.riesz(2.0)
    bf = en.brute_force_energy(C, k, 3, M=120)
    r = en.minimize_energy(C, k, 3, seed=1)
    # the continuous minimum is below every discrete one
    assert r.value <= bf.value + 1e-9
    assert r.value >= 0


def test_bound_examples():
    r = en.check_polarization_energy_bound(C, kern.riesz(2.0), 2, 120)
    assert r.polarization == pytest.approx(1.0, rel=1e-14)
    assert r.energy == pytest.approx(0.5, rel=1e-14)
    assert r.bound == pytest.approx(0.5) and r.holds
    assert en.check_polarization_energy_bound(C, kern.riesz(3.0), 3, 120).holds
    assert en.check_polarization_energy_bound(I, kern.log_kernel(), 2, 101).holds


def test_all_twelve_bound_instances():
    inst = en.default_bound_instances()
    assert len(inst) == 12
    for set_, M, k, N in inst:
        assert en.check_polarization_energy_bound(set_, k, N, M).holds


def test_circle_energy_ratio_is_cauchy():
    rep = en.circle_energy_ratios(2.0)
    assert rep.cauchy
    # independent check of the stored limit with closed-form chord sums
    N = rep.Ns[-1]
    k = np.arange(1, N)
    direct = N * np.sum((2 * np.sin(np.pi * k / N)) ** -2.0) / N**3
    assert rep.limit == pytest.approx(direct, rel=1e-12)


def test_equally_spaced_energy_matches_pair_sum():
    for N in (2, 5, 11):
        assert en.equally_spaced_energy(N, 3.0) == pytest.approx(en.energy_of(equally_spaced_circle(N), kern.riesz(3.0)),
                                                                 rel=1e-12)
