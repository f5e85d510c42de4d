import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hypgeo import geodesic_space as gs
from hypgeo.minkowski import GeometryError
from hypgeo.suites import _chi_perp, _split_orthonormal_pair

E1, E2, E4 = np.eye(4)[0], np.eye(4)[1], np.eye(4)[3]
BASE = gs.UnitTangent(E4, E1)


def test_flow_examples():
    ut = gs.geodesic_flow(BASE, 0.0)
    assert np.allclose(ut.x, E4) and np.allclose(ut.v, E1)
    ut = gs.geodesic_flow(BASE, 1.0)
    assert np.allclose(ut.x, [np.sinh(1), 0, 0, np.cosh(1)])
    assert np.allclose(ut.v, [np.cosh(1), 0, 0, np.sinh(1)])


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.floats(-3, 3), st.floats(-3, 3))
def test_flow_composition(seed, s, t):
    ut = gs.random_unit_tangent(4, np.random.default_rng(seed))
    a = gs.geodesic_flow(ut, s + t)
    b = gs.geodesic_flow(gs.geodesic_flow(ut, s), t)
    scale = np.cosh(abs(s) + abs(t)) * max(1, np.abs(ut.x).max())
    assert np.abs(a.x - b.x).max() < 1e-10 * scale
    assert np.abs(a.v - b.v).max() < 1e-10 * scale


def test_lifts():
    assert np.allclose(gs.chi(BASE), [E1, E4])
    assert np.allclose(gs.lift("chi", BASE), [E1, E4])
    assert np.allclose(gs.lift("horizontal", BASE, E2), [E2, 0 * E2])
    assert np.allclose(gs.lift("vertical", BASE, E2), [0 * E2, E2])
    assert gs.sasaki_inner(gs.chi(BASE), gs.chi(BASE), BASE) == pytest.approx(1)


def test_lift_rejects_non_orthogonal():
    with pytest.raises(GeometryError):
        gs.lift("horizontal", BASE, E1)


def test_sasaki_values(rng):
    H = gs.lift("horizontal", BASE, E2)
    V = gs.lift("vertical", BASE, E2)
    assert gs.sasaki_inner(H, H, BASE) == pytest.approx(1)
    assert gs.sasaki_inner(V, V, BASE) == pytest.approx(-1)
    for _ in range(10):
        ut = gs.random_unit_tangent(4, rng)
        X, Y = _chi_perp(ut, rng), _chi_perp(ut, rng)
        Xh = np.array([X[0], 0 * X[0]])
        Yv = np.array([0 * Y[1], Y[1]])
        assert abs(gs.sasaki_inner(Xh, Yv, ut)) < 1e-12


def test_connection_form(rng):
    assert gs.connection_form(gs.chi(BASE), BASE) == pytest.approx(1)
    assert gs.connection_form(gs.lift("horizontal", BASE, E2), BASE) == 0
    for _ in range(20):
        ut = gs.random_unit_tangent(4, rng)
        X = _chi_perp(ut, rng) + rng.normal() * gs.chi(ut)
        t = rng.uniform(-2, 2)
        a = gs.connection_form(gs.flow_differential(X, t), gs.geodesic_flow(ut, t))
        assert abs(a - gs.connection_form(X, ut)) < 1e-10 * max(1, np.abs(X).max()) * np.cosh(t)


def test_projection_is_flow_invariant(rng):
    for _ in range(10):
        ut = gs.random_unit_tangent(4, rng, spread=0.5)
        line = gs.project_to_G(ut)
        for t in (-5, -1, 1, 5):
            assert gs.project_to_G(gs.geodesic_flow(ut, t)).distance_to(line) < 1e-9


def test_dp_closed_form(rng):
    for _ in range(20):
        a, b, c, d = rng.normal(size=4)
        X = gs.standard_dim3_vector(a, b, c, d)
        z1, z2, (dplus, dminus) = gs.chart_data(BASE, X, chart=0)
        assert (z1, z2) == (pytest.approx(1), pytest.approx(-1))
        want_minus, want_plus = gs.dp_closed_form(a, b, c, d)
        assert dplus == pytest.approx(want_plus, abs=1e-12)
        assert dminus == pytest.approx(want_minus, abs=1e-12)


def test_dp_rejects_chi():
    with pytest.raises(GeometryError):
        gs.dp(gs.chi(BASE), BASE)


def test_parakahler_values(rng):
    H = gs.TangentOfG(BASE, gs.lift("horizontal", BASE, E2))
    V = gs.TangentOfG(BASE, gs.lift("vertical", BASE, E2))
    assert gs.G_metric(H, H) == pytest.approx(1)
    assert gs.G_metric(V, V) == pytest.approx(-1)
    g, JH, om = gs.parakahler(H, V)
    assert om == pytest.approx(1)
    assert np.allclose(JH.vector, V.vector)
    for _ in range(10):
        ut = gs.random_unit_tangent(4, rng, spread=0.5)
        X, Y = (gs.TangentOfG(ut, _chi_perp(ut, rng)) for _ in range(2))
        a = gs.parakahler(X, Y)
        b = gs.parakahler(X.pushed(0.7), Y.pushed(0.7))
        assert abs(a[0] - b[0]) < 1e-9 * max(1, abs(a[0]))
        assert abs(a[2] - b[2]) < 1e-9 * max(1, abs(a[2]))


def test_numeric_domega_examples():
    H2 = gs.lift("horizontal", BASE, E2)
    H3 = gs.lift("horizontal", BASE, np.eye(4)[2])
    V2 = gs.lift("vertical", BASE, E2)
    assert abs(gs.numeric_domega(BASE, H2, H3)) < 1e-7
    assert gs.numeric_domega(BASE, H2, V2) == pytest.approx(1, abs=1e-7)


@pytest.mark.parametrize("N", [3, 4, 5])
def test_numeric_domega_matches_omega(rng, N):
    for _ in range(30):
        ut = gs.random_unit_tangent(N, rng, spread=0.5)
        X, Y = _split_orthonormal_pair(ut, rng)
        assert abs(gs.numeric_domega(ut, X, Y, h=1e-4) - gs.omega_form(X, Y, ut)) < 1e-5


def test_g3_half_plane_slice():
    assert gs.g3_complex_metric(1j, -1j, (1, 1), (1, 1)) == pytest.approx(1)


def test_g3_pullback_lemma(rng):
    for _ in range(50):
        a, b, c, d = rng.normal(size=4)
        X = gs.standard_dim3_vector(a, b, c, d)
        want = a * a + b * b - c * c - d * d - 2j * (a * d - b * c)
        assert gs.g3_at(BASE, X, X, chart=0) == pytest.approx(want, abs=1e-10)


def test_g3_real_part_is_g(rng):
    for _ in range(100):
        ut = gs.random_unit_tangent(4, rng, spread=0.7)
        X, Y = _chi_perp(ut, rng), _chi_perp(ut, rng)
        g = gs.sasaki_inner(X, Y, ut)
        assert abs(gs.g3_at(ut, X, Y).real - g) < 1e-8 * max(1, abs(g))


def test_isometry_equivariance(rng):
    for _ in range(20):
        ut = gs.random_unit_tangent(4, rng, spread=0.5)
        A = gs.random_lorentz(4, rng, 0.5)
        X, Y = _chi_perp(ut, rng), _chi_perp(ut, rng)
        ut2 = ut.transform(A)
        a = gs.omega_form(X, Y, ut)
        b = gs.omega_form((A @ X.T).T, (A @ Y.T).T, ut2)
        assert abs(a - b) < 1e-9 * max(1, abs(a))
