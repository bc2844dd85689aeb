import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from rieszpol import geometry as geo
from rieszpol import kernel as kern
from rieszpol.errors import CPDViolationError, InvalidArgumentError

U = kern.Modulation(2.0, 1.0, 0)  # 2 + cos(theta) on the unit circle
coords = st.floats(-5, 5, allow_nan=False)
point2 = st.tuples(coords, coords).map(np.array)


def at(theta):
    return np.array([math.cos(theta), math.sin(theta)])


def test_kernel_examples():
    x, y = np.array([1.0, 0.0]), np.array([-1.0, 0.0])
    assert kern.eval(kern.riesz(2.0), x, y) == 0.25
    assert kern.eval(kern.weighted_riesz(2.0, kern.constant_weight(2.0)), x, y) == 0.5
    assert kern.eval(kern.log_kernel(), [0.0], [0.5]) == pytest.approx(math.log(2), rel=1e-15)


def test_coincident_points_are_infinite():
    assert kern.eval(kern.riesz(2.0), [0.3, 0.1], [0.3, 0.1]) == math.inf
    assert kern.eval(kern.log_kernel(), [0.3], [0.3]) == math.inf


def test_clamp():
    k = kern.riesz(2.0, eps=1e-3)
    assert kern.eval(k, [0.0], [0.0]) == pytest.approx(1e6)


def test_weight_examples():
    w = kern.constant_weight(3.0)
    assert np.all(w(at(0.4), at(0.4)) == 3.0)
    w = kern.separable_weight(U)
    assert w(at(0.0), at(0.0)) == pytest.approx(3.0)
    w = kern.separable_weight(None, U)
    assert w(at(math.pi), at(math.pi)) == pytest.approx(1.0)


def test_nonpositive_constant_rejected():
    with pytest.raises(InvalidArgumentError):
        kern.constant_weight(0.0)


def test_cpd_violation_detected():
    bad = kern.custom_weight(lambda y, x: 0.5 + 0 * x[..., 0], w_min=1.0, lo=0.5, hi=0.5, lip_target=0.0)
    with pytest.raises(CPDViolationError):
        kern.diagonal_weight(bad, at(0.1))
    with pytest.raises(CPDViolationError):
        kern.audit_weight(bad, geo.circle())


def test_separable_factor_must_be_positive():
    w = kern.separable_weight(kern.Modulation(0.5, 1.0, 0))
    with pytest.raises(CPDViolationError):
        w.bounds(geo.circle())


def test_separable_bounds_hold_on_samples():
    w = kern.separable_weight(U, kern.Modulation(3.0, -1.0, 1))
    b = kern.audit_weight(w, geo.circle())
    y, x = geo.sample_uniform(geo.circle(), 2000, 1), geo.sample_uniform(geo.circle(), 2000, 2)
    vals = w(y, x)
    assert b.lo <= vals.min() and vals.max() <= b.hi


def test_separable_gradient_matches_difference_quotient():
    w = kern.separable_weight(U, kern.Modulation(3.0, 0.5, 1))
    y, x = np.array([0.2, -0.4]), np.array([0.7, 0.1])
    g = w.grad_source(y, x)
    h = 1e-6
    fd = [(w(y, x + h * e) - w(y, x - h * e)) / (2 * h) for e in np.eye(2)]
    assert np.allclose(g, fd, rtol=1e-8)


@given(point2, point2, st.floats(0.5, 6.0))
def test_unweighted_symmetric(x, y, s):
    for k in (kern.riesz(s), kern.log_kernel(), kern.weighted_riesz(s, kern.constant_weight(1.7))):
        assert kern.eval(k, x, y) == kern.eval(k, y, x)


@given(st.lists(st.floats(1e-3, 50.0), min_size=3, max_size=3, unique=True), st.floats(0.1, 8.0))
def test_riesz_strictly_decreasing_in_distance(ds, s):
    ds = sorted(ds)
    assume(ds[1] > ds[0] * (1 + 1e-9) and ds[2] > ds[1] * (1 + 1e-9))
    k = kern.riesz(s)
    v = [kern.eval(k, [0.0], [d]) for d in ds]
    assert v[0] > v[1] > v[2]


@given(point2, point2, st.floats(0.1, 10.0), st.floats(0.5, 6.0))
def test_riesz_scaling_law(x, y, alpha, s):
    assume(np.linalg.norm(x - y) > 1e-3)
    k = kern.riesz(s)
    lhs = kern.eval(k, alpha * x, alpha * y)
    rhs = alpha ** (-s) * kern.eval(k, x, y)
    assert lhs == pytest.approx(rhs, rel=1e-12)
