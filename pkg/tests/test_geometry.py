import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.spatial import cKDTree

from rieszpol import geometry as geo
from rieszpol.errors import InvalidSetError, ResourceLimitError


def half_circle():
    return geo.curve(lambda t: np.stack([np.cos(np.pi * t), np.sin(np.pi * t)], axis=-1),
                     lambda t: np.stack([-np.pi * np.sin(np.pi * t), np.pi * np.cos(np.pi * t)], axis=-1), 2)


ALL_SETS = [
    geo.interval(-1.0, 1.0),
    geo.circle(),
    geo.arc(0.3, 2.0, radius=1.5),
    geo.sphere(3),
    geo.ball(2),
    geo.ball(3),
    geo.cube(2),
    geo.cube(3),
    geo.box([0.0, -1.0], [2.0, 0.5]),
    geo.union(geo.arc(0.0, 1.0), geo.arc(2.0, 3.0)),
]


def test_measures():
    assert geo.circle().measure == pytest.approx(2 * math.pi, rel=1e-14)
    assert geo.cube(3).measure == pytest.approx(1.0, rel=1e-14)
    assert geo.interval(-1, 1).measure == pytest.approx(2.0)


def test_curve_arclength_half_circle():
    assert half_circle().measure == pytest.approx(math.pi, rel=1e-8)


def test_degenerate_curve_rejected():
    with pytest.raises(InvalidSetError):
        geo.curve(lambda t: np.zeros(np.shape(t) + (2,)), lambda t: np.zeros(np.shape(t) + (2,)), 2)


def test_mesh_counts():
    m = geo.mesh(geo.circle(), 0.01)
    assert m.size >= math.ceil(math.pi / 0.01)
    assert m.covering_radius <= 0.01
    m = geo.mesh(geo.interval(-1, 1), 0.1)
    assert m.size >= 21 and m.covering_radius <= 0.1


def test_mesh_node_cap():
    with pytest.raises(ResourceLimitError):
        geo.mesh(geo.sphere(3), 1e-4, max_nodes=10_000)


@pytest.mark.parametrize("set_", ALL_SETS + [half_circle()], ids=lambda s: s.kind)
def test_mesh_coverage_monte_carlo(set_):
    m = geo.mesh(set_, 0.2 * set_.diameter() / 2)
    y = geo.sample_uniform(set_, 100_000, 3)
    d, _ = cKDTree(m.nodes).query(y)
    assert d.max() <= m.covering_radius


def test_sphere_mesh_resolution():
    m = geo.mesh(geo.sphere(3), 0.2)
    assert m.covering_radius <= 0.2
    d, _ = cKDTree(m.nodes).query(geo.sample_uniform(geo.sphere(3), 100_000, 0))
    assert d.max() <= m.covering_radius


def test_sampling_membership_and_determinism():
    c = geo.circle()
    a = geo.sample_uniform(c, 4, 7)
    assert a.shape == (4, 2)
    assert np.allclose(np.linalg.norm(a, axis=1), 1.0, atol=1e-14)
    assert np.array_equal(a, geo.sample_uniform(c, 4, 7))


def test_sphere_sampling_archimedes():
    z = np.sort(geo.sample_uniform(geo.sphere(3), 100_000, 1)[:, 2])
    emp = np.arange(1, z.size + 1) / z.size
    assert np.max(np.abs(emp - (z + 1) / 2)) <= 0.01


def test_projection_examples():
    assert np.allclose(geo.project(geo.sphere(3), [2.0, 0.0, 0.0]), [1.0, 0.0, 0.0])
    assert np.allclose(geo.project(geo.cube(2), [-0.3, 0.5]), [0.0, 0.5])
    assert np.allclose(geo.project(geo.interval(0, 1), [0.4]), [0.4])


def test_projection_of_sphere_center_is_deterministic():
    a = geo.project(geo.sphere(3), [0.0, 0.0, 0.0])
    b = geo.project(geo.sphere(3), [0.0, 0.0, 0.0])
    assert np.array_equal(a, b) and np.linalg.norm(a) == pytest.approx(1.0)


@given(st.sampled_from(range(len(ALL_SETS))),
       st.lists(st.floats(-3, 3, allow_nan=False), min_size=3, max_size=3))
def test_projection_idempotent(i, xs):
    set_ = ALL_SETS[i]
    x = np.array(xs[: set_.ambient_dim])
    p1 = set_.project(x)
    p2 = set_.project(p1)
    assert np.allclose(p1, p2, rtol=1e-12, atol=1e-12 * set_.diameter())
    assert set_.contains(p1)


@given(st.floats(0.1, 10.0), st.floats(-5.0, 5.0))
def test_transformed_measure_scales(lam, b):
    c = geo.circle()
    t = c.transformed(lam, [b, -b])
    assert t.measure == pytest.approx(lam * c.measure, rel=1e-12)
