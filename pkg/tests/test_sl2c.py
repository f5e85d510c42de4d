import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hypgeo import sl2c
from hypgeo.minkowski import GeometryError

V1, V2, V3 = sl2c.BASIS

cplx = st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)


def test_basis_is_orthonormal_and_positive():
    G = np.array([[sl2c.killing_inner(a, b) for b in sl2c.BASIS] for a in sl2c.BASIS])
    assert np.allclose(G, np.eye(3))
    assert np.allclose(sl2c.cross(V1, V2), V3)
    assert np.allclose(sl2c.cross(V1, V1), 0)


def test_F_iso_is_isometric(rng):
    for _ in range(100):
        z, w = rng.normal(size=(2, 4)) + 1j * rng.normal(size=(2, 4))
        assert abs(sl2c.killing_inner(sl2c.F_iso(z), sl2c.F_iso(w)) - np.sum(z * w)) < 1e-12 * (1 + np.abs(z).max() * np.abs(w).max())
        assert np.allclose(sl2c.F_iso_inverse(sl2c.F_iso(z)), z)


@settings(max_examples=200, deadline=None)
@given(st.lists(cplx, min_size=6, max_size=6))
def test_cross_norm_identity(c):
    V, W = sl2c.from_coords(c[:3]), sl2c.from_coords(c[3:])
    scale = 1 + np.abs(V).max() ** 2 * np.abs(W).max() ** 2
    assert sl2c.cross_norm_residual(V, W) < 1e-12 * scale


def test_exp_and_classify_examples():
    N = V2 - 1j * V3
    assert sl2c.sq_norm(N) == 0
    assert sl2c.classify(N) == "parabolic"
    t = 0.8
    assert sl2c.classify(t * V1) == "hyperbolic"
    assert np.trace(sl2c.sl2_exp(t * V1)) == pytest.approx(2 * np.cosh(t))
    c = sl2c.classify_tangent(1j * np.pi * V1)
    assert c == "identity" and c.boundary
    assert sl2c.classify_element(sl2c.sl2_exp(1j * np.pi * V1)) == "identity"


def test_exp_matches_scipy(rng):
    from scipy.linalg import expm

    for _ in range(50):
        V = sl2c.random_tangent(rng)
        assert np.abs(sl2c.sl2_exp(V) - expm(V)).max() < 1e-10 * max(1, np.abs(expm(V)).max())


def test_classify_tangent_and_element_agree(rng):
    for _ in range(300):
        V = sl2c.random_tangent(rng)
        assert sl2c.classify_tangent(V) == sl2c.classify_element(sl2c.sl2_exp(V))
        # i times a real combination has imaginary norm: a rotation
        R = 1j * (rng.normal() * V1 + rng.normal() * V2)
        assert sl2c.classify_tangent(R) == sl2c.classify_element(sl2c.sl2_exp(R))


def test_ad_invariance(rng):
    for _ in range(50):
        g, V, W = sl2c.random_sl2(rng), sl2c.random_tangent(rng), sl2c.random_tangent(rng)
        a = sl2c.killing_inner(sl2c.ad(g, V), sl2c.ad(g, W))
        assert abs(a - sl2c.killing_inner(V, W)) < 1e-9 * max(1, abs(a))


def test_axis_examples():
    assert sl2c.axis(np.array([[0, 1j], [1j, 0]])) == (pytest.approx(1), pytest.approx(-1))
    src, tgt = sl2c.axis(V1)
    assert {src, tgt} == {0, sl2c.INF}
    A = sl2c.sl2_exp(0.7 * V1)
    assert sl2c.mobius(A, 0) == 0 and sl2c.mobius(A, sl2c.INF) == sl2c.INF


def test_axis_rejects_isotropic():
    with pytest.raises(GeometryError):
        sl2c.axis(V2 - 1j * V3)


def test_axis_equivariance(rng):
    for _ in range(50):
        V = sl2c.random_tangent(rng)
        g = sl2c.random_sl2(rng, 0.5)
        want = tuple(sl2c.mobius(g, p) for p in sl2c.axis(V))
        assert sl2c.pair_distance(sl2c.axis(sl2c.ad(g, V)), want) < 1e-8


def test_axis_endpoints_are_fixed(rng):
    for _ in range(20):
        V = sl2c.random_tangent(rng)
        A = sl2c.sl2_exp(V)
        for p in sl2c.axis(V):
            assert sl2c.chordal(sl2c.mobius(A, p), p) < 1e-8
        rep, att = sl2c.boundary_fixed_points(A)
        assert sl2c.pair_distance(sl2c.axis(V), (rep, att)) < 1e-8


def test_parabolic_fixed_point():
    A = np.array([[1, 2], [0, 1]], dtype=complex)
    assert sl2c.boundary_fixed_points(A) == (sl2c.INF,)
    assert np.allclose(sl2c.sl2_exp(V2 + 1j * V3), A)
    assert np.allclose(sl2c.sl2_exp(V2 - 1j * V3), A.T)
    assert sl2c.boundary_fixed_points(A.T) == (0,)


def test_identity_has_no_fixed_points():
    with pytest.raises(GeometryError):
        sl2c.boundary_fixed_points(-np.eye(2))


def test_embeddings(rng):
    for _ in range(20):
        # a point of AdS^3: x1^2 + x2^2 - x3^2 - x4^2 = -1
        a = rng.normal(size=2)
        b = rng.normal(size=2)
        b *= np.sqrt(1 + a @ a) / np.linalg.norm(b)
        x = np.concatenate([a, b])
        A = sl2c.embed("SL2R", x)
        assert np.abs(A.imag).max() < 1e-12
        assert abs(np.linalg.det(A) - 1) < 1e-10
        y = rng.normal(size=4)
        y /= np.linalg.norm(y)
        assert sl2c.unitarity_residual(sl2c.embed("SU2", y)) < 1e-12
        w = rng.normal(size=3)
        h = np.concatenate([w, [np.sqrt(1 + w @ w)]])
        assert sl2c.is_H3_slice(sl2c.embed("H3", h), tol=1e-10)


def test_embed_unknown_model():
    with pytest.raises(GeometryError):
        sl2c.embed("dS", np.zeros(4))
