import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hypgeo import minkowski as mk
from hypgeo.geodesic_space import random_unit_tangent

E4 = np.array([0.0, 0, 0, 1])
E1 = np.array([1.0, 0, 0, 0])


def test_inner_signatures():
    sp = mk.BilinearSpace(4, 3, 1)
    assert mk.inner(E4, E4, sp) == -1
    assert mk.inner(E1, E4, sp) == 0
    z = np.array([1j, 0])
    assert mk.inner(z, z, mk.BilinearSpace.complex(2)) == -1
    assert mk.cinner(z, z) == -1


def test_hyp_exp_examples():
    assert np.allclose(mk.hyp_exp(E4, np.zeros(4)), E4)
    y = mk.hyp_exp(E4, E1)
    assert np.allclose(y, [np.sinh(1), 0, 0, np.cosh(1)], atol=1e-14)
    assert mk.hyp_distance(E4, y) == pytest.approx(1.0, abs=1e-12)


def test_hyp_exp_rejects_non_tangent():
    with pytest.raises(mk.GeometryError):
        mk.hyp_exp(E4, E4)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.01, 4.0))
def test_exp_log_round_trip(seed, t):
    ut = random_unit_tangent(4, np.random.default_rng(seed))
    y = mk.hyp_exp(ut.x, t * ut.v)
    assert abs(mk.mink(y, y) + 1) < 1e-10
    assert mk.hyp_distance(ut.x, y) == pytest.approx(t, rel=1e-9, abs=1e-9)
    assert np.allclose(mk.hyp_log(ut.x, y), t * ut.v, atol=1e-8 * max(1, np.cosh(t)))


def test_quadric_exp_null_and_zero():
    z = np.array([0, 0, 0, 1j])
    v = np.array([1, 1j, 0, 0])          # <v, v> = 0, <z, v> = 0
    assert np.allclose(mk.quadric_exp(z, v), z + v)
    assert np.allclose(mk.quadric_exp(z, 0 * v), z)


def test_quadric_exp_branch_independence(rng):
    for _ in range(50):
        ut = random_unit_tangent(4, rng)
        z = mk.pseudo_quadric_embed(ut.x, 3)
        v = rng.normal(size=4) + 1j * rng.normal(size=4)
        v = v - mk.cinner(z, v) / mk.cinner(z, z) * z
        a = mk.quadric_exp(z, v, branch=0)
        b = mk.quadric_exp(z, v, branch=1)
        assert np.abs(a - b).max() < 1e-12
        assert mk.quadric_residual(a) < 1e-9 * max(1, np.abs(a).max() ** 2)


def test_boundary_endpoints():
    assert np.allclose(mk.boundary_endpoint(E4, E1, +1), [1, 0, 0, 1])
    assert np.allclose(mk.boundary_endpoint(E4, E1, -1), [-1, 0, 0, 1])


def test_boundary_endpoint_is_limit(rng):
    for _ in range(20):
        ut = random_unit_tangent(4, rng)
        far = mk.hyp_exp(ut.x, 20 * ut.v)
        assert np.abs(far / far[-1] - mk.boundary_endpoint(ut.x, ut.v, +1)).max() < 1e-8


def test_pseudo_quadric_embed():
    assert np.allclose(mk.pseudo_quadric_embed(E4, 3), [0, 0, 0, 1j])
    assert np.allclose(mk.pseudo_quadric_embed(E4, 2), [0, 0, 0, 1j])
    x = np.array([0.0, 0, 0.6, 0.8])
    assert np.allclose(mk.pseudo_quadric_embed(x, 2), [0, 0, 0.6j, 0.8j])


def test_pseudo_quadric_embed_residual(rng):
    for _ in range(100):
        x = random_unit_tangent(4, rng).x
        assert mk.quadric_residual(mk.pseudo_quadric_embed(x, 3)) < 1e-12 * max(1, x @ x)


def test_x1_chart():
    z = np.array([1j * np.cos(0), 1j * np.sin(0)])
    assert mk.x1_chart(z) == pytest.approx(1)
    assert mk.x1_metric(1.0, 1.0) == pytest.approx(1)


def test_x1_chart_pullback(rng):
    # |w|^-2 dw^2 against the finite-difference pull-back of sum dz_i^2
    for _ in range(50):
        w = complex(*rng.normal(size=2))
        dw = complex(*rng.normal(size=2))
        h = 1e-3 * abs(w)
        f = lambda s: mk.x1_chart_inverse(w + s * h * dw)
        dz = (8 * (f(1) - f(-1)) - (f(2) - f(-2))) / (12 * h)
        g = mk.x1_metric(w, dw)
        assert abs(np.sum(dz * dz) - g) < 1e-10 * max(1, abs(g))
        assert mk.x1_chart(mk.x1_chart_inverse(w)) == pytest.approx(w)
