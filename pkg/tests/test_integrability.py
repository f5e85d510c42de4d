import numpy as np
import pytest

from hypgeo import geodesic_space as gs
from hypgeo import hypersurface as hs
from hypgeo import integrability as ig
from hypgeo.minkowski import GeometryError


@pytest.fixture(scope="module")
def graph():
    return hs.graph(hs.default_graph_height)


def test_gauss_map_of_cap_is_lagrangian():
    G = ig.gauss_immersion(hs.r_cap(0.5))
    for p in ([0.0, 0.0], [0.3, -0.2]):
        assert ig.lagrangian_residual(G, p) < 1e-6


def test_curve_is_trivially_lagrangian():
    G = ig.constant_angle_curve(np.pi / 3)
    assert ig.lagrangian_residual(G, [0.4]) < 1e-15


def _perturbed(eps):
    base = ig.gauss_immersion(hs.plane())

    def line(p):
        L = base(p)
        plus = L.plus.copy()
        plus[1] += eps * p[0] * p[0]
        return gs.GeodesicLine(ig.normalize_boundary_point(plus), L.minus)

    return ig.ImmersionIntoG.from_lines(line, 2)


def test_perturbation_breaks_lagrangian_linearly():
    p = np.array([0.3, 0.1])
    r = [ig.lagrangian_residual(_perturbed(e), p) for e in (1e-3, 2e-3, 4e-3)]
    assert r[0] > 1e-6
    assert r[1] / r[0] == pytest.approx(2, rel=0.02)
    assert r[2] / r[1] == pytest.approx(2, rel=0.02)


def test_lift_of_flat_section_is_itself():
    imm = hs.plane()
    G = ig.gauss_immersion(imm)
    loop = ig.LoopPath.circle([0.1, 0.0], 0.3)
    start = hs.gauss_lift(imm, loop.path(0.0))
    for shift in (0.0, 0.3):
        sol = ig.lift_solve(G, loop, initial=gs.geodesic_flow(start, shift))
        for s in np.linspace(0, 1, 9):
            want = gs.geodesic_flow(hs.gauss_lift(imm, loop.path(s)), shift)
            got = sol.zeta(s)
            assert np.abs(got.x - want.x).max() < 1e-7
            assert np.abs(got.v - want.v).max() < 1e-7


def test_lift_is_flow_orthogonal(graph):
    G = ig.gauss_immersion(graph)
    sol = ig.lift_solve(G, ig.LoopPath.segment([-0.3, 0.2], [0.3, -0.1]))
    assert sol.orthogonality(samples=40) < 1e-6


def test_reconstruct_cap():
    imm = hs.r_cap(0.5)
    G = ig.gauss_immersion(imm)
    xs = np.linspace(-0.3, 0.3, 7)
    rec = ig.reconstruct_sigma(G, xs, xs)
    ri = rec.immersion()
    for p in ([0.1, 0.2], [-0.25, 0.05]):
        assert hs.gauss_map(ri, p).distance_to(hs.gauss_map(imm, p)) < 1e-6
    # the recovered surface is a normal evolution of the cap: same constant kappa up to a shift
    k = [hs.kappa(ri, np.array(p)) for p in ([0, 0], [0.2, -0.2])]
    assert k[0] == pytest.approx(k[1], abs=1e-5)


def test_reconstruct_rejects_non_lagrangian():
    xs = np.linspace(-0.3, 0.3, 5)
    with pytest.raises(GeometryError):
        ig.reconstruct_sigma(_perturbed(0.5), xs, xs)


def test_riemannian_gauss_map_has_no_vertical_kernel(rng):
    imm = hs.r_cap(0.5)
    for _ in range(10):
        u = rng.uniform(-0.5, 0.5, 2)
        Z = hs.dzeta(imm, u)
        # a vertical image dzeta(X) = (0, *) would need dsigma X = 0
        assert np.linalg.svd(Z[0], compute_uv=False).min() > 0.1


def test_right_angle_curve_reconstructs_the_geodesic():
    G = ig.constant_angle_curve(np.pi / 2)
    sol = ig.lift_solve(G, ig.LoopPath.segment([0.0], [1.0]))
    for s in np.linspace(0, 1, 5):
        assert np.allclose(sol.sigma(s), [np.sinh(s), 0, np.cosh(s)], atol=1e-10)


def test_contractible_holonomy_vanishes(graph):
    for imm in (hs.r_cap(0.5), graph):
        G = ig.gauss_immersion(imm)
        assert abs(ig.loop_holonomy(G, ig.LoopPath.circle([0.05, -0.05], 0.2))) < 1e-6


def test_constant_angle_holonomy():
    loop = ig.LoopPath.segment([0.2], [1.2], deck=0)
    assert abs(ig.loop_holonomy(ig.constant_angle_curve(np.pi / 2), loop)) < 1e-6
    G = ig.constant_angle_curve(np.pi / 3)
    h = ig.loop_holonomy(G, loop)
    assert h == pytest.approx(0.5, abs=1e-6)
    assert abs(h - ig.kappa_difference(G, loop)) < 1e-5


def test_deck_check():
    G = ig.constant_angle_curve(np.pi / 3, 1.0)
    assert G.check_deck([0.3]) < 1e-10
    G.deck[0] = (G.deck[0][0], ig.boost(0.5))
    with pytest.raises(GeometryError):
        G.check_deck([0.3])


def test_mean_curvature_vanishes_for_constant_kappa():
    for imm in (hs.plane(), hs.r_cap(0.5)):
        assert np.abs(ig.gauss_mean_curvature(imm, np.array([0.1, 0.2]))).max() < 1e-5


def test_mean_curvature_against_kappa_differential(graph, rng):
    for _ in range(10):
        u = rng.uniform(-0.3, 0.3, 2)
        V = rng.normal(size=2)
        h = 1e-4
        dk = (hs.kappa(graph, u + h * V) - hs.kappa(graph, u - h * V)) / (2 * h)
        assert abs(ig.maslov_form(graph, u, V) - dk) < 1e-4


def test_maslov_integral(graph):
    assert abs(ig.maslov_integral(hs.r_cap(0.5), ig.LoopPath.circle([0, 0], 0.2))) < 1e-6
    loop = ig.LoopPath.circle([0.05, 0.0], 0.2)
    loop.panels = 8
    m = ig.maslov_integral(graph, loop)
    assert abs(m) < 1e-6
    assert abs(m - ig.loop_holonomy(ig.gauss_immersion(graph), loop)) < 1e-4


def test_flux():
    loop = ig.LoopPath.segment([0.2], [1.2], deck=0)
    const = lambda s: ig.constant_angle_curve(np.pi / 3)
    assert abs(ig.flux(const, loop, s_order=4)) < 1e-8
    f = ig.flux(ig.angle_isotopy(np.pi / 2, np.pi / 3), loop)
    d = ig.loop_holonomy(ig.constant_angle_curve(np.pi / 3), loop) - ig.loop_holonomy(
        ig.constant_angle_curve(np.pi / 2), loop)
    assert abs(f - d) < 1e-3


def test_flux_of_normal_evolution_isotopy():
    # Gauss maps do not change under normal evolution, so the isotopy is constant in G
    imm = hs.r_cap(0.5)
    fam = lambda s: ig.gauss_immersion(hs.normal_evolution(imm, 0.3 * s))
    loop = ig.LoopPath.circle([0.0, 0.0], 0.2)
    assert abs(ig.flux(fam, loop, s_order=4, order=4)) < 1e-6


def test_counterexample_arc():
    C = ig.CounterexampleCurve()
    co = C.speed_coefficients(np.linspace(-2, 2, 801))
    for t in (-2.0, -0.5, 0.0, 0.7, 2.0):
        assert C.singular_at(t, coeffs=co)
    assert C.local_shift(0.5, 0.6) is not None
    G = C.as_immersion_into_G()
    sol = ig.lift_solve(G, ig.LoopPath.segment([-1.0], [1.0]), initial=G.lift(np.array([-1.0])))
    assert sol.orthogonality(samples=40) < 1e-6
