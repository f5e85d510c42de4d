import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hypgeo import hypersurface as hs
from hypgeo import geodesic_space as gs
from hypgeo.minkowski import GeometryError, mink

U0 = np.array([0.1, -0.2])


def test_plane_shape():
    sd = hs.shape_data(hs.plane(), U0)
    assert np.abs(sd.B).max() < 1e-8
    assert hs.kappa(hs.plane(), U0) == pytest.approx(0, abs=1e-8)


def test_horosphere_shape():
    imm = hs.horosphere()
    sd = hs.shape_data(imm, U0)
    assert np.abs(sd.B - np.eye(2)).max() < 1e-7
    assert np.abs(hs.gauss_fff(imm, U0)).max() < 1e-7


@pytest.mark.parametrize("r", [0.2, 0.5, 1.0])
def test_r_cap(r):
    imm = hs.r_cap(r)
    assert np.allclose(hs.principal_curvatures(imm, U0), -np.tanh(r), atol=1e-8)
    assert hs.kappa(imm, U0) == pytest.approx(-r, abs=1e-8)


def test_sphere_curvatures():
    for r in (0.5, 1.5):
        assert np.allclose(hs.principal_curvatures(hs.sphere(r), U0), 1 / np.tanh(r), atol=1e-7)


def test_plane_gauss_endpoints():
    imm = hs.plane()
    p = np.zeros(2)
    assert np.allclose(hs.gauss_lift(imm, p).v, [1, 0, 0, 0])
    assert np.allclose(hs.hyperbolic_gauss(imm, p, +1), [1, 0, 0, 1])
    assert np.allclose(hs.hyperbolic_gauss(imm, p, -1), [-1, 0, 0, 1])


def test_plane_gauss_map_isometric():
    imm = hs.plane()
    sd = hs.shape_data(imm, U0)
    assert np.abs(hs.gauss_fff(imm, U0) - sd.I).max() < 1e-8


def test_hyperbolic_gauss_differential():
    # dG^{+-}(V) = dsigma (id -+ B) V projected to the boundary slice
    imm = hs.r_cap(0.5)
    sd = hs.shape_data(imm, U0)
    h = 1e-5
    for sign in (1, -1):
        ut = hs.gauss_lift(imm, U0)
        for i in range(2):
            e = np.eye(2)[i]
            fd = (hs.hyperbolic_gauss(imm, U0 + h * e, sign) - hs.hyperbolic_gauss(imm, U0 - h * e, sign)) / (2 * h)
            w = sd.jac @ (np.eye(2) - sign * sd.B) @ e
            dX = np.array([sd.jac @ e, -sd.jac @ sd.B @ e])
            pred = gs.endpoint_velocity(ut, dX, sign)
            assert np.abs(fd - pred).max() < 1e-5
            # the unnormalized derivative of x + sign*nu is the claimed vector
            assert np.allclose(dX[0] + sign * dX[1], w)


def test_point_family_pullback_is_minus_sphere_metric():
    lift = hs.point_family()
    h = 1e-6
    for u in (np.array([0.3, -0.1]), np.array([-1.2, 0.4])):
        ut = lift(u)
        cols = [np.array([(lift(u + h * e).x - lift(u - h * e).x) / (2 * h),
                          (lift(u + h * e).v - lift(u - h * e).v) / (2 * h)]) for e in np.eye(2)]
        assert np.abs(cols[0][0]).max() == 0  # base point fixed
        g = np.array([[gs.sasaki_inner(a, b, ut) for b in cols] for a in cols])
        conf = 4 / (1 + u @ u) ** 2
        assert np.abs(g + conf * np.eye(2)).max() < 1e-8


def test_catalog_pullbacks_agree():
    for name, kw in [("plane", {}), ("horosphere", {}), ("sphere", {"r": 0.8}),
                     ("cylinder", {"k": 1, "r": 0.6}), ("r-cap", {"r": 0.5})]:
        imm = hs.catalog(name, **kw)
        u = np.array([0.2, 0.3])
        assert np.abs(hs.gauss_fff(imm, u) - hs.gauss_pullback_direct(imm, u)).max() < 1e-5, name


def test_cylinder_signature():
    imm = hs.cylinder(1, 0.6)
    assert hs.signature(hs.gauss_fff(imm, np.array([0.2, 0.3]))) == (1, 1)


def test_evolution_closed_form():
    assert hs.evolved_shape(np.zeros((2, 2)), 1.0) == pytest.approx(-np.tanh(1) * np.eye(2))


@settings(max_examples=100, deadline=None)
@given(st.floats(-0.9, 0.9), st.floats(-0.9, 0.9), st.floats(-2, 2), st.floats(0, 3.14))
def test_evolution_matches_scalar_law(l1, l2, t, ang):
    R = np.array([[np.cos(ang), -np.sin(ang)], [np.sin(ang), np.cos(ang)]])
    B = R @ np.diag([l1, l2]) @ R.T
    Bt = hs.evolved_shape(B, t)
    want = R @ np.diag(np.tanh(np.arctanh([l1, l2]) - t)) @ R.T
    assert np.abs(Bt - want).max() < 1e-10


@pytest.mark.parametrize("t", [0.1, 0.5])
def test_kappa_under_evolution(t):
    for imm in (hs.r_cap(0.5), hs.graph(hs.default_graph_height)):
        ev = hs.normal_evolution(imm, t)
        assert hs.kappa(ev, U0) == pytest.approx(hs.kappa(imm, U0) - t, abs=1e-8)
        assert hs.gauss_map(ev, U0).distance_to(hs.gauss_map(imm, U0)) < 1e-8


def test_kappa_routes(rng):
    for _ in range(100):
        A = rng.normal(size=(3, 3))
        Q, _ = np.linalg.qr(A)
        B = Q @ np.diag(rng.uniform(-0.95, 0.95, 3)) @ Q.T
        assert abs(hs.kappa_from_B(B) - hs.kappa_eigen(B)) < 1e-10


def test_kappa_rejects_large_curvature():
    with pytest.raises(GeometryError):
        hs.kappa(hs.sphere(0.5), U0)


@pytest.mark.parametrize("inward, eig", [(True, -1), (False, 1)])
def test_horosphere_lift_is_J_eigen(inward, eig):
    # B = +-id, so dnu = -+dsigma and the lift lies in one eigenspace of J
    imm = hs.horosphere(inward=inward)
    ut = hs.gauss_lift(imm, U0)
    Z = hs.dzeta(imm, U0)
    for i in range(2):
        X = gs.horizontal_part(Z[..., i], ut)
        assert np.abs(gs.J(X) - eig * X).max() < 1e-8


def test_normal_is_unit_and_orthogonal():
    imm = hs.graph(hs.default_graph_height)
    for u in (U0, np.array([0.3, 0.25])):
        x, nu = imm.point(u), imm.nu(u)
        assert abs(mink(nu, nu) - 1) < 1e-10
        assert abs(mink(x, nu)) < 1e-10
        assert np.abs(imm.jacobian(u).T @ np.diag([1, 1, 1, -1]) @ nu).max() < 1e-8
