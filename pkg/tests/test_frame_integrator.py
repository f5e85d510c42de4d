import numpy as np
import pytest

from hypgeo import complex_metric as cm
from hypgeo import frame_integrator as fi

P0 = np.array([0.3, 0.8])
GRID = np.linspace(-0.5, 0.5, 9)


def _flat():
    g = cm.ComplexMetric(lambda P: np.broadcast_to(np.eye(2), np.shape(P)[:-1] + (2, 2)).astype(complex))
    return fi.ImmersionData(g, fi.zero_shape())


def test_flat_data_has_only_theta_blocks():
    W = fi.build_omega(_flat())(P0)
    assert np.abs(W[:, :2, :3]).max() < 1e-12
    assert np.abs(W[:, 3, :2] - 1j * np.eye(2)).max() < 1e-12
    assert np.abs(W[:, :2, 3] + 1j * np.eye(2)).max() < 1e-12


def test_omega_matches_hand_assembly():
    z = 0.3 + 0.2j
    data = fi.cosh_data(z)
    W = fi.MaurerCartanField(data, ref_point=P0)(P0)
    c, s = np.cosh(z), P0[0]
    F = cm.orthonormal_frame(data.g(P0))
    sg = np.diag(F) * np.array([c, c * np.cosh(s)])   # +-1 from the square-root branch
    assert np.allclose(np.abs(sg), 1) and np.abs(F - np.diag(np.diag(F))).max() == 0
    theta = np.diag(sg * np.array([c, c * np.cosh(s)]))   # theta^i(d_a)
    A = [np.zeros((2, 2)), np.array([[0, -np.sinh(s)], [np.sinh(s), 0]]) * sg[0] * sg[1]]
    for a in range(2):
        M = np.zeros((4, 4), dtype=complex)
        M[:2, :2] = A[a]
        M[:2, 2] = np.tanh(z) * theta[:, a]
        M[2, :2] = -np.tanh(z) * theta[:, a]
        M[:2, 3] = -1j * theta[:, a]
        M[3, :2] = 1j * theta[:, a]
        assert np.abs(W[a] - M).max() < 1e-12


def test_flatness():
    assert fi.flatness_residual(fi.build_omega(fi.landslide_data(0.3 + 0.2j)), P0) < 1e-4
    tg = fi.ImmersionData(cm.fermi_hyperbolic(), fi.zero_shape())
    assert fi.flatness_residual(fi.build_omega(tg), P0) < 1e-5
    bad = fi.cosh_data(0.4)
    bad = fi.ImmersionData(bad.g, fi.scalar_shape(1.1 * np.tanh(0.4)))
    assert fi.flatness_residual(fi.build_omega(bad), P0) > 1e-2


def test_totally_geodesic_normal_is_constant():
    data = fi.ImmersionData(cm.fermi_hyperbolic(), fi.zero_shape())
    grid = fi.immersion_from_data(data, GRID, GRID, base=(4, 4), substeps=4)
    nu = grid.nu
    assert np.abs(nu - nu[4, 4]).max() < 1e-7


def test_round_trip_cosh():
    data = fi.cosh_data(0.4)
    xs = np.linspace(-0.5, 0.5, 17)
    grid = fi.immersion_from_data(data, xs, xs, base=(8, 8), substeps=8)
    m, s = fi.round_trip_residuals(data, grid)
    assert m < 1e-4 and s < 1e-3
    assert np.abs((grid.sigma ** 2).sum(-1) + 1).max() < 1e-8


def test_path_independence():
    assert fi.path_independence(fi.landslide_data(0.3 + 0.2j), GRID, GRID, substeps=4) < 1e-6


def test_left_translation(rng):
    data = fi.landslide_data(0.4)
    om = fi.MaurerCartanField(data)
    path = np.stack([np.linspace(0, 0.4, 9), np.linspace(0, -0.3, 9)], -1)
    A = fi.random_complex_orthogonal(4, rng)
    a = fi.integrate_frame(om, path, np.eye(4), substeps=2)
    b = fi.integrate_frame(om, path, A, substeps=2)
    assert np.abs(A @ a - b).max() < 1e-12


def test_orthogonality_drift():
    om = fi.MaurerCartanField(fi.landslide_data(0.5j))
    path = np.stack([np.linspace(0, 0.5, 33), np.linspace(0, 0.5, 33)], -1)
    assert fi.orthogonality_drift(fi.integrate_frame(om, path, np.eye(4), substeps=2)) < 1e-8


def test_rk4_order():
    om = fi.MaurerCartanField(fi.landslide_data(0.3 + 0.2j))
    path = np.stack([np.linspace(0, 0.5, 5), np.linspace(0, 0.4, 5)], -1)
    assert 12 <= fi.rk4_order_ratio(om, path, base_steps=8) <= 20


def test_monodromy_trivial_deck():
    assert np.allclose(fi.monodromy(fi.landslide_data(0.2), (0.2, 0.0), (0.0, 0.0)), np.eye(4))


def test_monodromy_requires_invariance():
    with pytest.raises(fi.GeometryError):
        fi.monodromy(fi.landslide_data(0.2), (0.2, 0.0), (1.0, 0.0), n_steps=4)


def test_fuchsian_monodromy_is_real():
    data = fi.cosh_data(0.0)
    mon = fi.monodromy(data, (0.2, 0.0), (0.0, 1.0), n_steps=16, substeps=2)
    D = fi.real_form_conjugator(data, (0.2, 0.0))
    assert np.abs(np.imag(fi.normalize_to_real_form(mon, D))).max() < 1e-8


def test_monodromy_holomorphic_small():
    f = lambda z: fi.monodromy(fi.landslide_data(z), (0.2, 0.0), (0.0, 1.0), n_steps=8)
    assert fi.cauchy_riemann_residual(f, 0.3 + 0.2j, grid=2) < 1e-5


def test_classify_real_form():
    pts = np.array([[0.1, 0.2], [0.5, -0.3]])
    assert fi.classify_real_form(fi.cosh_data(0.4), pts)[0] == "H"
    assert fi.classify_real_form(fi.cosh_data(0.4j), pts)[0] == "AdS"
    neg = fi.ImmersionData(cm.fermi_hyperbolic().scaled(lambda P: -np.ones(np.shape(P)[:-1])),
                           fi.scalar_shape(0.5j))
    assert fi.classify_real_form(neg, pts)[0] == "-S"
    assert fi.classify_real_form(fi.landslide_data(0.3 + 0.2j), pts)[0] == "none"
