import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from rieszpol import asymptotics as asy
from rieszpol import geometry as geo
from rieszpol import kernel as kern
from rieszpol.asymptotics import equally_spaced_circle
from rieszpol.errors import InvalidArgumentError, UnavailableConstantError
from rieszpol.potential import Configuration

mpmath.mp.dps = 40


def test_tau_examples():
    assert asy.tau(3, 1, 100) == 1e6
    assert asy.tau(1, 1, 100) == pytest.approx(100 * math.log(100), rel=1e-15)
    assert asy.tau(2, 2, math.e) == pytest.approx(math.e, rel=1e-15)
    with pytest.raises(InvalidArgumentError):
        asy.tau(0.5, 1, 10)


@given(st.integers(1, 3), st.integers(2, 5), st.integers(2, 10_000), st.floats(0.01, 5.0))
def test_tau_multiplicative_under_tiling(p, m, N, excess):
    s = p + excess
    assert asy.tau(s, p, m**p * N) == pytest.approx(m**s * asy.tau(s, p, N), rel=1e-12)


@pytest.mark.parametrize("s", [1.0001, 1.5, 2.0, 3.0, 4.5, 10.0, 40.0])
def test_zeta_against_mpmath(s):
    assert asy.riemann_zeta(s) == pytest.approx(float(mpmath.zeta(s)), rel=1e-12)


def test_sigma_1d_examples():
    assert asy.sigma_1d_exact(2.0) == pytest.approx(math.pi**2, rel=1e-14)
    assert asy.sigma_1d_exact(3.0) == pytest.approx(float(14 * mpmath.zeta(3)), rel=1e-14)
    assert asy.sigma_1d_exact(3.0) == pytest.approx(16.828801, abs=5e-6)
    with pytest.raises(InvalidArgumentError):
        asy.sigma_1d_exact(1.0)


def test_sigma_1d_ratio_decreases_to_one():
    r = [asy.sigma_1d_exact(s) / 2 ** (s + 1) for s in (4, 8, 16, 32)]
    assert all(x > 0 for x in r)
    assert all(b < a for a, b in zip(r, r[1:]))
    assert r[-1] == pytest.approx(1.0, abs=1e-9)


def _epstein_mpmath(s):
    # r(n) = 6 sum_{d | n} chi_{-3}(d), so the sum factors as 6 zeta(x) L(x, chi_{-3}) with x = s/2
    x = mpmath.mpf(s) / 2
    L = 3**-x * (mpmath.zeta(x, mpmath.mpf(1) / 3) - mpmath.zeta(x, mpmath.mpf(2) / 3))
    return float(mpmath.mpf(asy.TRIANGULAR_A) ** -s * 6 * mpmath.zeta(x) * L)


@pytest.mark.parametrize("s", [3.0, 4.0, 5.0, 8.0, 20.0])
def test_epstein_against_dirichlet_factorization(s):
    assert asy.epstein_zeta_triangular(s) == pytest.approx(_epstein_mpmath(s), rel=1e-8)


def test_epstein_examples():
    big = asy.epstein_zeta_triangular(100.0)
    assert big == pytest.approx(6 * asy.TRIANGULAR_A**-100, rel=1e-6)
    r = asy.epstein_zeta_detail(5.0)
    half, full = asy.epstein_partial(5.0, r.radius / 2), asy.epstein_partial(5.0, r.radius)
    assert abs(full - half) <= 1e-8 * abs(full)
    with pytest.raises(InvalidArgumentError):
        asy.epstein_zeta_triangular(2.0)


def test_lattice_has_unit_covolume():
    # six nearest vectors of length a, and |v|^2 = a^2 (m^2 + mn + n^2)
    q = asy._triangular_norms_sq(asy.TRIANGULAR_A * 1.01)
    assert q.size == 6
    assert asy.TRIANGULAR_A**2 * math.sqrt(3) / 2 == pytest.approx(1.0, rel=1e-15)


def test_conjectured_sigma_is_flagged():
    c = asy.conjectured_sigma_2(3.0)
    assert c.provenance == asy.CONJECTURED
    assert c.value == pytest.approx((3**1.5 - 1) / 2 * _epstein_mpmath(3.0), rel=1e-8)
    assert asy.sigma_constant(3.0, 1).provenance == asy.PROVED
    assert asy.sigma_constant(3.0, 2).provenance == asy.CONJECTURED


def test_predicted_limit_examples():
    p = asy.predicted_limit(geo.circle(), None, 3.0)
    assert p.value == pytest.approx(float(14 * mpmath.zeta(3) / (2 * mpmath.pi) ** 3), rel=1e-9)
    assert p.value == pytest.approx(0.067844, abs=1e-6)
    assert asy.predicted_limit(geo.interval(0.0, 1.0), None, 2.0).value == pytest.approx(math.pi**2, rel=1e-9)
    assert asy.predicted_limit(geo.circle(), None, 1.0).value == pytest.approx(1 / math.pi, rel=1e-9)


def test_predicted_limit_unavailable_in_high_dimension():
    with pytest.raises(UnavailableConstantError):
        asy.predicted_limit(geo.sphere(4), None, 4.0)


def test_estimate_limit_synthetic():
    Ns = [16 * 2**k for k in range(9)]
    ser = asy.RatioSeries.from_values(Ns, [(5 + 3 / N) * N**3 for N in Ns], 3.0, 1)
    assert abs(asy.estimate_limit(ser).value - 5) <= 1e-3
    ser = asy.RatioSeries.from_values(Ns, [3.0 * N**3 for N in Ns], 3.0, 1)
    e = asy.estimate_limit(ser)
    assert e.value == pytest.approx(3.0, rel=1e-12) and e.uncertainty <= 1e-12


def test_estimate_limit_flags_wild_series():
    Ns = [16 * 2**k for k in range(8)]
    vals = [(1 + 2 * (k % 2)) * N**3 for k, N in enumerate(Ns)]
    assert asy.estimate_limit(asy.RatioSeries.from_values(Ns, vals, 3.0, 1)).low_confidence


def test_estimate_limit_recovers_planted_constants():
    rng = np.random.default_rng(2024)
    hits = 0
    for _ in range(200):
        d = int(rng.integers(1, 3))
        c, b, e = rng.uniform(1, 10), rng.uniform(-5, 5), rng.uniform(-5, 5)
        Ns = np.array([2**k for k in range(int(rng.integers(4, 6)), 13)])
        r = c + b * Ns ** (-1 / d) + e * Ns ** (-2 / d)
        ser = asy.RatioSeries.from_values(Ns, r * Ns.astype(float) ** 3, 3.0 * d, d)
        est = asy.estimate_limit(ser)
        hits += abs(est.value - c) < est.uncertainty
    assert hits >= 190


def test_circle_series_estimate_matches_prediction():
    ser = asy.circle_ratio_series([64, 128, 256, 512, 1024], kern.riesz(3.0), rel_gap=1e-12)
    pred = asy.predicted_limit(geo.circle(), None, 3.0).value
    assert asy.estimate_limit(ser).value == pytest.approx(pred, rel=0.01)
    assert asy.ratios_bounded(ser)


def test_circle_closed_form_gap_midpoint():
    # equally spaced points: the minimum sits at gap midpoints, sum of 1/(2 sin((2k+1) pi / 2N))^3
    for N in (7, 64):
        k = np.arange(N)
        closed = float(np.sum((2 * np.sin((2 * k + 1) * np.pi / (2 * N))) ** -3.0))
        e = asy.symmetric_circle_polarization(N, kern.riesz(3.0), rel_gap=1e-13)
        assert e.contains(closed, slack=1e-12 * closed)


def test_chebyshev_series_half_power_circle():
    # uniform-measure potential on the circle, by quadrature
    target = float(mpmath.quad(lambda t: (2 * mpmath.sin(t / 2)) ** -0.5, [0, mpmath.pi, 2 * mpmath.pi]) / (2 * mpmath.pi))
    Ns = [16, 64, 256, 1024]
    ser = asy.chebyshev_ratio_series(geo.circle(), kern.riesz(0.5), Ns, rel_gap=1e-12)
    err = np.abs(ser.ratios - target)
    assert all(b < a for a, b in zip(err, err[1:]))
    assert err[-1] <= 0.02 * target


def test_chebyshev_series_constant_for_repeated_point():
    c = geo.circle()
    for k in (kern.riesz(0.3), kern.log_kernel()):
        same = [Configuration(np.repeat(c.point_at([0.4]), n, axis=0), c) for n in (1, 3, 5)]
        r = asy.chebyshev_ratio_series(c, k, [1, 3, 5], configs=same, rel_gap=1e-12).ratios
        assert np.allclose(r, r[0], rtol=1e-12)


def test_chebyshev_series_grows_as_s_approaches_d():
    r = asy.chebyshev_ratio_series(geo.circle(), kern.riesz(0.95), [16, 64, 256, 1024], rel_gap=1e-10).ratios
    assert all(b > a for a, b in zip(r, r[1:]))
    with pytest.raises(InvalidArgumentError):
        asy.chebyshev_ratio_series(geo.circle(), kern.riesz(2.0), [4])
