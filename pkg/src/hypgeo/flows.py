"""Normal-velocity flows of grid-sampled hypersurfaces and the induced motion of the Gauss map.

Each grid point moves along its normal geodesic: sigma <- cosh(dt f) sigma +
sinh(dt f) nu.  Derivatives on the grid use fourth-order finite differences
(one-sided stencils at the edges).  The patch has a free boundary, so the
outer rows drift over long runs; diagnostics are taken on interior nodes.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geodesic_space import (
    J,
    UnitTangent,
    endpoint_velocity,
    horizontal_part,
    omega_form,
    sasaki_inner,
)
from .hypersurface import Immersion
from .minkowski import GeometryError, minkowski_gram

# fourth-order first-derivative stencils: interior, and one-sided for the first two rows
_CENTRAL = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_EDGE0 = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0
_EDGE1 = np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) / 12.0
EDGE = 2  # rows touched by one-sided stencils


def grid_derivative(F, h: float, axis: int) -> np.ndarray:
    """Fourth-order d/du along `axis` of samples F on a uniform grid."""
    F = np.moveaxis(np.asarray(F, dtype=float), axis, 0)
    m = F.shape[0]
    if m < 5:
        raise GeometryError("need at least 5 samples per axis")
    D = np.empty_like(F)
    D[2:-2] = sum(c * F[k:m - 4 + k] for k, c in enumerate(_CENTRAL))
    D[0] = sum(c * F[k] for k, c in enumerate(_EDGE0))
    D[1] = sum(c * F[k] for k, c in enumerate(_EDGE1))
    D[-1] = -sum(c * F[m - 1 - k] for k, c in enumerate(_EDGE0))
    D[-2] = -sum(c * F[m - 1 - k] for k, c in enumerate(_EDGE1))
    return np.moveaxis(D / h, 0, axis)


def _mink(a, b):
    return np.sum(a[..., :-1] * b[..., :-1], axis=-1) - a[..., -1] * b[..., -1]


def _normalize_hyp(P):
    return P / np.sqrt(-_mink(P, P))[..., None]


def _cofactor_normals(S, P):
    """Unit normals Minkowski-orthogonal to the tangent columns S (..., N, n) and to P."""
    N = P.shape[-1]
    base = np.concatenate([S, P[..., None], np.zeros(P.shape + (1,))], axis=-1)
    c = np.empty(P.shape)
    for i in range(N):
        M = base.copy()
        M[..., i, -1] = 1.0
        c[..., i] = np.linalg.det(M)
    c[..., -1] *= -1
    return c / np.sqrt(_mink(c, c))[..., None]


@dataclass
class GridGeometry:
    S: np.ndarray      # (..., N, n) tangent columns
    dnu: np.ndarray    # (..., N, n)
    I: np.ndarray      # (..., n, n)
    B: np.ndarray      # (..., n, n)
    Ibar: np.ndarray   # (..., n, n)
    lambdas: np.ndarray
    kappa: np.ndarray


@dataclass
class FlowState:
    """Grid-sampled hypersurface in H^{n+1} (n = 2) under a normal flow."""

    xs: np.ndarray
    ys: np.ndarray
    sigma: np.ndarray
    nu: np.ndarray
    t: float = 0.0
    diagnostics: list = field(default_factory=list)
    halted: str | None = None

    @property
    def h(self):
        return (self.xs[1] - self.xs[0], self.ys[1] - self.ys[0])

    @classmethod
    def from_immersion(cls, imm: Immersion, xs, ys) -> "FlowState":
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        if imm.n != 2:
            raise GeometryError("flows are implemented for surfaces")
        if not (np.allclose(np.diff(xs), xs[1] - xs[0]) and np.allclose(np.diff(ys), ys[1] - ys[0])):
            raise GeometryError("grid must be uniform")
        P = np.array([[imm.point(np.array([x, y])) for y in ys] for x in xs])
        V = np.array([[imm.nu(np.array([x, y])) for y in ys] for x in xs])
        return cls(xs, ys, P, V)

    def geometry(self) -> GridGeometry:
        hx, hy = self.h
        S = np.stack([grid_derivative(self.sigma, hx, 0), grid_derivative(self.sigma, hy, 1)], axis=-1)
        dnu = np.stack([grid_derivative(self.nu, hx, 0), grid_derivative(self.nu, hy, 1)], axis=-1)
        Gm = minkowski_gram(self.sigma.shape[-1])
        St = np.swapaxes(S, -1, -2)
        I = St @ Gm @ S
        B = np.linalg.solve(I, -(St @ Gm @ dnu))
        BT = np.swapaxes(B, -1, -2)
        Ibar = I - BT @ I @ B
        Ibar = 0.5 * (Ibar + np.swapaxes(Ibar, -1, -2))
        lam = np.sort(np.linalg.eigvals(B).real, axis=-1)
        with np.errstate(invalid="ignore", divide="ignore"):
            kap = np.mean(np.arctanh(lam), axis=-1)
        return GridGeometry(S, dnu, I, B, Ibar, lam, kap)

    def hyperboloid_residual(self) -> float:
        return float(np.abs(_mink(self.sigma, self.sigma) + 1).max())

    def lagrangian_residual(self, margin: int = EDGE) -> float:
        """max |Omega(dzeta e_1, dzeta e_2)| over interior nodes."""
        g = self.geometry()
        Z1 = np.stack([g.S[..., 0], g.dnu[..., 0]], axis=-2)
        Z2 = np.stack([g.S[..., 1], g.dnu[..., 1]], axis=-2)
        # Omega(X, Y) = g(X, JY) = <xdot_X, vdot_Y> - <vdot_X, xdot_Y> on chi-perp
        om = _mink(Z1[..., 0, :], Z2[..., 1, :]) - _mink(Z1[..., 1, :], Z2[..., 0, :])
        sl = slice(margin, -margin)
        return float(np.abs(om[sl, sl]).max())

    def lift(self, i: int, j: int) -> UnitTangent:
        return UnitTangent(self.sigma[i, j], self.nu[i, j])


def velocity(state: FlowState, f, geom: GridGeometry | None = None) -> np.ndarray:
    """Normal speed on the grid: a constant, the string "kappa", or an array."""
    if isinstance(f, str):
        if f != "kappa":
            raise ValueError(f"unknown velocity {f!r}")
        geom = geom or state.geometry()
        return geom.kappa
    f = np.asarray(f, dtype=float)
    return np.broadcast_to(f, state.sigma.shape[:-1]).copy()


def max_stable_dt(geom: GridGeometry, h=None) -> float:
    """min(0.1 (1 - max|lambda|), h^2/2); the second term is the explicit diffusion limit."""
    bound = 0.1 * (1 - np.abs(geom.lambdas).max())
    if h is not None:
        bound = min(bound, 0.5 * min(h) ** 2)
    return float(bound)


def flow_step(state: FlowState, f, dt: float, enforce_cfl: bool = True) -> FlowState:
    """One explicit step of the normal flow with speed f.

    Constant speeds are exact normal evolution: the normal is carried along
    in closed form.  For variable speeds the normal is recomputed from the
    new grid.  If the principal curvatures leave (-1, 1) the input state is
    returned with `halted` set.
    """
    geom = state.geometry()
    if np.abs(geom.lambdas).max() >= 1:
        return _halt(state, "principal curvatures left (-1, 1)")
    is_const = not isinstance(f, str) and np.ndim(f) == 0
    if enforce_cfl and not is_const and abs(dt) > max_stable_dt(geom, state.h):
        raise GeometryError(f"dt = {dt} exceeds the stability bound {max_stable_dt(geom, state.h):.3g}")
    speed = velocity(state, f, geom)
    a = (dt * speed)[..., None]
    sigma = _normalize_hyp(np.cosh(a) * state.sigma + np.sinh(a) * state.nu)
    if is_const:
        nu = np.sinh(a) * state.sigma + np.cosh(a) * state.nu
    else:
        hx, hy = state.h
        S = np.stack([grid_derivative(sigma, hx, 0), grid_derivative(sigma, hy, 1)], axis=-1)
        nu = _cofactor_normals(S, sigma)
        flip = np.sign(_mink(nu, state.nu))[..., None]
        nu = flip * nu
    new = FlowState(state.xs, state.ys, sigma, nu, state.t + dt, list(state.diagnostics))
    try:
        g = new.geometry()
    except np.linalg.LinAlgError:
        return _halt(state, "degenerate grid geometry")
    if np.abs(g.lambdas).max() >= 1:
        return _halt(state, "principal curvatures left (-1, 1)")
    inner = (slice(EDGE, -EDGE), slice(EDGE, -EDGE))
    new.diagnostics.append({
        "t": new.t,
        "lambda_min": float(g.lambdas.min()),
        "lambda_max": float(g.lambdas.max()),
        "kappa_min": float(np.nanmin(g.kappa[inner])),
        "kappa_max": float(np.nanmax(g.kappa[inner])),
        "hyperboloid_residual": new.hyperboloid_residual(),
        "lagrangian_residual": new.lagrangian_residual(),
        "small_curvature": bool(np.abs(g.lambdas).max() < 1),
    })
    return new


def _halt(state: FlowState, reason: str) -> FlowState:
    out = FlowState(state.xs, state.ys, state.sigma, state.nu, state.t, list(state.diagnostics), halted=reason)
    return out


def run_flow(state: FlowState, f, dt: float, steps: int) -> FlowState:
    for _ in range(steps):
        state = flow_step(state, f, dt)
        if state.halted:
            break
    return state


def _grad(state: FlowState, geom: GridGeometry, speed) -> np.ndarray:
    hx, hy = state.h
    df = np.stack([grid_derivative(speed, hx, 0), grid_derivative(speed, hy, 1)], axis=-1)
    return np.linalg.solve(geom.Ibar, df[..., None])[..., 0]


def predicted_gauss_velocity(state: FlowState, f, i: int, j: int, geom: GridGeometry | None = None):
    """-dzeta(B grad f) - J dzeta(grad f) at node (i, j), gradient taken for Ibar."""
    geom = geom or state.geometry()
    speed = velocity(state, f, geom)
    grad = _grad(state, geom, speed)[i, j]
    D = np.array([geom.S[i, j], geom.dnu[i, j]])
    return -(D @ (geom.B[i, j] @ grad)) - J(D @ grad)


def observed_gauss_velocity(state: FlowState, f, i: int, j: int, dt: float = 1e-3):
    """Central difference in time of the Gauss lift at node (i, j), chi part removed."""
    plus = flow_step(state, f, dt, enforce_cfl=False)
    minus = flow_step(state, f, -dt, enforce_cfl=False)
    if plus.halted or minus.halted:
        raise GeometryError("flow halted during the velocity check")
    d = np.array([(plus.sigma[i, j] - minus.sigma[i, j]) / (2 * dt),
                  (plus.nu[i, j] - minus.nu[i, j]) / (2 * dt)])
    return horizontal_part(d, state.lift(i, j))


def gauss_velocity_check(state: FlowState, f, i: int, j: int, dt: float = 1e-3) -> float:
    """Max difference of endpoint velocities: observed time derivative vs the formula."""
    ut = state.lift(i, j)
    X = observed_gauss_velocity(state, f, i, j, dt)
    Y = predicted_gauss_velocity(state, f, i, j)
    return float(max(np.abs(endpoint_velocity(ut, X - Y, s)).max() for s in (1, -1)))


def normal_part(state: FlowState, X, i: int, j: int, geom: GridGeometry | None = None):
    """Component of a chi-orthogonal vector normal to the Gauss map."""
    geom = geom or state.geometry()
    ut = state.lift(i, j)
    cols = [np.array([geom.S[i, j][:, k], geom.dnu[i, j][:, k]]) for k in range(2)]
    c = np.linalg.solve(geom.Ibar[i, j], [sasaki_inner(col, X, ut) for col in cols])
    return X - sum(ck * col for ck, col in zip(c, cols))


def kappa_flow_normal_residual(state: FlowState, H, i: int, j: int, dt: float = 1e-3) -> float:
    """Normal part of the Gauss-map velocity under the kappa flow, minus Hbar."""
    X = observed_gauss_velocity(state, "kappa", i, j, dt)
    ut = state.lift(i, j)
    diff = normal_part(state, X, i, j) - np.asarray(H)
    return float(max(np.abs(endpoint_velocity(ut, diff, s)).max() for s in (1, -1)))


def maslov_defect(state: FlowState, H, i: int, j: int) -> float:
    """|Omega(H, dzeta e_k) - d kappa(e_k)| at a node, as a consistency diagnostic."""
    geom = state.geometry()
    hx, hy = state.h
    dk = [grid_derivative(geom.kappa, hx, 0)[i, j], grid_derivative(geom.kappa, hy, 1)[i, j]]
    ut = state.lift(i, j)
    out = 0.0
    for k in range(2):
        col = np.array([geom.S[i, j][:, k], geom.dnu[i, j][:, k]])
        out = max(out, abs(omega_form(H, col, ut) - dk[k]))
    return out
