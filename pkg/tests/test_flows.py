import numpy as np
import pytest

from hypgeo import flows
from hypgeo import hypersurface as hs
from hypgeo import integrability as ig
from hypgeo.flows import EDGE, FlowState
from hypgeo.minkowski import GeometryError

XS = np.linspace(-0.5, 0.5, 21)
C = 10
INNER = (slice(EDGE, -EDGE), slice(EDGE, -EDGE))


@pytest.fixture(scope="module")
def graph_state():
    return FlowState.from_immersion(hs.graph(hs.default_graph_height), XS, XS)


def test_unit_speed_on_cap_is_normal_evolution():
    cap = hs.r_cap(0.5)
    st = flows.flow_step(FlowState.from_immersion(cap, XS, XS), 1.0, 0.1)
    ev = hs.normal_evolution(cap, 0.1)
    assert np.abs(st.sigma[C, C] - ev.point(np.array([XS[C], XS[C]]))).max() < 1e-12
    lam = st.geometry().lambdas[INNER]
    assert np.abs(lam + np.tanh(0.6)).max() < 1e-6


def test_kappa_flow_fixes_plane():
    st0 = FlowState.from_immersion(hs.plane(), XS, XS)
    st = flows.run_flow(st0, "kappa", 1e-3, 5)
    assert np.abs(st.sigma - st0.sigma).max() < 1e-12


def test_kappa_flow_shrinks_cap():
    st = FlowState.from_immersion(hs.r_cap(0.5), XS, XS)
    last = abs(st.geometry().kappa[C, C])
    for _ in range(10):
        st = flows.flow_step(st, "kappa", 1e-3)
        k = abs(st.geometry().kappa[C, C])
        assert k < last
        last = k


def test_constant_speed_keeps_gauss_map(graph_state):
    assert flows.gauss_velocity_check(graph_state, 1.0, C, C) < 1e-6


def test_kappa_flow_gauss_velocity(graph_state):
    st = graph_state
    for _ in range(10):
        assert flows.gauss_velocity_check(st, "kappa", C, C) < 1e-3
        st = flows.flow_step(st, "kappa", 1e-3)
    d = st.diagnostics
    assert max(x["hyperboloid_residual"] for x in d) < 1e-10
    assert max(x["lagrangian_residual"] for x in d) < 1e-5


def test_kappa_flow_is_mean_curvature_flow_up_to_tangent(graph_state):
    imm = hs.graph(hs.default_graph_height)
    for i, j in [(C, C), (C + 3, C - 2)]:
        H = ig.gauss_mean_curvature(imm, np.array([XS[i], XS[j]]))
        assert flows.kappa_flow_normal_residual(graph_state, H, i, j) < 1e-3
        assert flows.maslov_defect(graph_state, H, i, j) < 1e-3


def test_unstable_step_is_rejected(graph_state):
    with pytest.raises(GeometryError):
        flows.flow_step(graph_state, "kappa", 0.1)


def test_large_curvature_halts():
    st = FlowState.from_immersion(hs.sphere(0.8), XS * 0.5, XS * 0.5)
    out = flows.flow_step(st, 1.0, 1e-3)
    assert out.halted is not None
    assert out.t == st.t


def test_non_uniform_grid_rejected():
    with pytest.raises(GeometryError):
        FlowState.from_immersion(hs.plane(), XS ** 3, XS)
