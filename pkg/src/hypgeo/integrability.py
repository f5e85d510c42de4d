"""Integrating maps into the space of geodesics back to hypersurfaces.

A map G from a parameter domain into the space of geodesics is carried
together with some smooth lift to the unit tangent bundle.  Any two lifts
differ by the geodesic flow, so solving for a lift orthogonal to the flow
reduces to the scalar ODE tau' = -omega(lift').  Holonomy, Maslov
integrals, and flux are computed by quadrature along parameter paths.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import solve_ivp

from .geodesic_space import (
    GeodesicLine,
    UnitTangent,
    J,
    chi,
    connection_form,
    flow_differential,
    geodesic_flow,
    horizontal_part,
    omega_form,
    project_to_G,
    sasaki_inner,
)
from .hypersurface import (
    Immersion,
    central_jacobian,
    dzeta,
    gauss_fff,
    gauss_lift,
    kappa,
    kappa_from_B,
    shape_data,
)
from .minkowski import GeometryError, mink, minkowski_gram

LIFT_STEP = 1e-6
LAGRANGIAN_TOL = 1e-5
ROUTE_TOL = 1e-3


# --- lines and lifts ----------------------------------------------------------

def unit_tangent_from_line(line: GeodesicLine) -> UnitTangent:
    """The representative of a geodesic symmetric with respect to its endpoints.

    With p, m the null vectors over the endpoints, x = (p + m)/sqrt(-2<p,m>)
    and v = (p - m)/sqrt(-2<p,m>).
    """
    p = np.asarray(line.plus, dtype=float)
    m = np.asarray(line.minus, dtype=float)
    q = -2 * mink(p, m)
    if q <= 1e-14:
        raise GeometryError("endpoints coincide")
    s = np.sqrt(q)
    return UnitTangent((p + m) / s, (p - m) / s)


def normalize_boundary_point(e) -> np.ndarray:
    """Rescale the spatial part of a point of the slice x_last = 1 back onto the unit sphere."""
    e = np.asarray(e, dtype=float)
    sp = e[:-1] / e[-1]
    return np.concatenate([sp / np.linalg.norm(sp), [1.0]])


def _stack(ut: UnitTangent) -> np.ndarray:
    return np.array([ut.x, ut.v])


def fiber_offset(a: UnitTangent, b: UnitTangent, tol: float = 1e-7) -> float:
    """The t with phi_t(a) = b, for a, b on the same oriented geodesic."""
    t = float(np.arcsinh(mink(b.x, a.v)))
    c = geodesic_flow(a, t)
    err = max(np.abs(c.x - b.x).max(), np.abs(c.v - b.v).max()) / max(1.0, np.abs(b.x).max())
    if err > tol:
        raise GeometryError(f"unit tangents do not lie on a common fiber (mismatch {err:.2e})")
    return t


@dataclass
class ImmersionIntoG:
    """G: U subset R^n -> space of geodesics, with a smooth lift and optional deck data.

    `lift(p)` returns a UnitTangent over G(p).  `dlift(p)`, if given, returns the
    (2, N, n) Jacobian of the lift; otherwise it is taken by central
    differences.  Each deck entry is a pair (domain map, Lorentz matrix) with
    G(map(p)) = A G(p).
    """

    lift: Callable
    n: int
    dlift: Callable | None = None
    deck: list = field(default_factory=list)
    name: str = "G"
    meta: dict = field(default_factory=dict)

    def __call__(self, p) -> GeodesicLine:
        return project_to_G(self.lift(np.asarray(p, dtype=float)))

    def jacobian(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        if self.dlift is not None:
            return np.asarray(self.dlift(p), dtype=float)
        cols = []
        for i in range(self.n):
            e = np.zeros(self.n)
            e[i] = LIFT_STEP
            a = _stack(self.lift(p + e))
            b = _stack(self.lift(p - e))
            cols.append((a - b) / (2 * LIFT_STEP))
        return np.stack(cols, axis=-1)

    def check_deck(self, p, k: int = 0, tol: float = 1e-8) -> float:
        fmap, A = self.deck[k]
        lhs = self(fmap(np.asarray(p, dtype=float)))
        ut = self.lift(np.asarray(p, dtype=float)).transform(A)
        err = lhs.distance_to(project_to_G(ut))
        if err > tol:
            raise GeometryError(f"deck map {k} is not a symmetry of G (error {err:.2e})")
        return err

    @classmethod
    def from_lines(cls, line_map: Callable, n: int, **kw) -> "ImmersionIntoG":
        """Wrap a map returning GeodesicLine values, lifting through the symmetric representative."""
        return cls(lambda p: unit_tangent_from_line(line_map(p)), n, **kw)


def gauss_immersion(imm: Immersion) -> ImmersionIntoG:
    """The Gauss map of a hypersurface, with its Gauss lift."""
    return ImmersionIntoG(lambda u: gauss_lift(imm, u), imm.n,
                          dlift=lambda u: dzeta(imm, u), name=f"gauss({imm.name})",
                          meta={"source": imm})


def _omega_matrix(Z, ut: UnitTangent) -> np.ndarray:
    n = Z.shape[-1]
    H = [horizontal_part(Z[..., i], ut) for i in range(n)]
    return np.array([[omega_form(H[i], H[j], ut) for j in range(n)] for i in range(n)])


def lagrangian_residual(G: ImmersionIntoG, p) -> float:
    """max |Omega(dG e_i, dG e_j)| over coordinate directions."""
    p = np.asarray(p, dtype=float)
    ut = G.lift(p)
    Z = G.jacobian(p)
    if np.linalg.matrix_rank(np.array([horizontal_part(Z[..., i], ut).ravel() for i in range(G.n)]),
                             tol=1e-9) < G.n:
        raise GeometryError("G is not immersive here")
    return float(np.abs(_omega_matrix(Z, ut)).max())


# --- paths and quadrature -------------------------------------------------------

@dataclass
class LoopPath:
    """A parameter path s in [0, 1] -> U.

    If `deck` is None the path must close up; otherwise its end must be the
    image of its start under the registered deck map with that index.
    """

    path: Callable
    dpath: Callable
    deck: int | None = None
    panels: int = 32
    name: str = "loop"

    @classmethod
    def polyline(cls, samples, deck: int | None = None, closed: bool = True) -> "LoopPath":
        P = np.asarray(samples, dtype=float)
        if closed and deck is None and np.abs(P[0] - P[-1]).max() > 1e-12:
            P = np.vstack([P, P[:1]])
        m = len(P) - 1

        def path(s):
            k = min(int(s * m), m - 1)
            return P[k] + (s * m - k) * (P[k + 1] - P[k])

        def dpath(s):
            k = min(int(s * m), m - 1)
            return m * (P[k + 1] - P[k])

        return cls(path, dpath, deck=deck, panels=m, name="polyline")

    @classmethod
    def circle(cls, center, radius: float, axes=(0, 1), n: int = 2) -> "LoopPath":
        c = np.asarray(center, dtype=float)
        i, j = axes

        def path(s):
            p = c.copy()
            p[i] += radius * np.cos(2 * np.pi * s)
            p[j] += radius * np.sin(2 * np.pi * s)
            return p

        def dpath(s):
            d = np.zeros_like(c)
            d[i] = -2 * np.pi * radius * np.sin(2 * np.pi * s)
            d[j] = 2 * np.pi * radius * np.cos(2 * np.pi * s)
            return d

        return cls(path, dpath, name="circle")

    @classmethod
    def segment(cls, a, b, deck: int | None = None) -> "LoopPath":
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        return cls(lambda s: a + s * (b - a), lambda s: b - a, deck=deck, name="segment")

    def nodes(self, order: int = 8):
        """Gauss-Legendre nodes and weights on [0, 1], panel by panel."""
        x, w = leggauss(order)
        edges = np.linspace(0.0, 1.0, self.panels + 1)
        s = np.concatenate([(a + b) / 2 + (b - a) / 2 * x for a, b in zip(edges[:-1], edges[1:])])
        ws = np.concatenate([(b - a) / 2 * w for a, b in zip(edges[:-1], edges[1:])])
        return s, ws

    def reparametrized(self, phi: Callable, dphi: Callable) -> "LoopPath":
        """Precompose with an increasing diffeomorphism phi of [0, 1]."""
        return LoopPath(lambda s: self.path(phi(s)), lambda s: self.dpath(phi(s)) * dphi(s),
                        deck=self.deck, panels=self.panels, name=self.name + "~")


def _omega_along(G: ImmersionIntoG, p, dp_) -> float:
    ut = G.lift(p)
    return connection_form(G.jacobian(p) @ dp_, ut)


def _closing_offset(G: ImmersionIntoG, loop: LoopPath) -> float:
    """t with phi_t(lift(end)) equal to the deck image of lift(start)."""
    start = loop.path(0.0)
    end = loop.path(1.0)
    a = G.lift(end)
    if loop.deck is None:
        if np.abs(start - end).max() > 1e-9:
            raise GeometryError("loop does not close")
        b = G.lift(start)
    else:
        fmap, A = G.deck[loop.deck]
        if np.abs(fmap(start) - end).max() > 1e-9:
            raise GeometryError("path end is not the deck image of its start")
        b = G.lift(start).transform(A)
    return fiber_offset(a, b)


def loop_holonomy(G: ImmersionIntoG, loop: LoopPath, order: int = 8) -> float:
    """Integral of omega over the lift of the loop, closed up along the fiber.

    For a deck loop the lift is closed by the fiber segment from lift(end) to
    the deck image of lift(start).
    """
    s, w = loop.nodes(order)
    total = sum(wk * _omega_along(G, loop.path(sk), loop.dpath(sk)) for sk, wk in zip(s, w))
    return float(total + _closing_offset(G, loop))


def relifted(G: ImmersionIntoG, shift: Callable, dshift: Callable | None = None) -> ImmersionIntoG:
    """Same G with lift phi_{shift(p)}(lift(p)); used to test lift independence."""

    def lift(p):
        return geodesic_flow(G.lift(p), shift(p))

    def dlift(p):
        Z = G.jacobian(p)
        t = shift(p)
        if dshift is None:
            g = central_jacobian(lambda q: np.atleast_1d(shift(q)), p, 1e-6)[0]
        else:
            g = np.asarray(dshift(p), dtype=float)
        moved = np.stack([flow_differential(Z[..., i], t) for i in range(G.n)], axis=-1)
        return moved + chi(lift(p))[..., None] * g
    return ImmersionIntoG(lift, G.n, dlift=dlift, deck=G.deck, name=G.name + "~", meta=G.meta)


# --- horizontal lifts ---------------------------------------------------------------

@dataclass
class LiftSolution:
    """Lift orthogonal to the flow, zeta(s) = phi_tau(s)(lift(path(s)))."""

    G: ImmersionIntoG
    loop: LoopPath
    sol: object
    s_span: tuple

    def tau(self, s):
        return float(self.sol.sol(s)[0])

    def zeta(self, s) -> UnitTangent:
        return geodesic_flow(self.G.lift(self.loop.path(s)), self.tau(s))

    def sigma(self, s) -> np.ndarray:
        return self.zeta(s).x

    def orthogonality(self, samples: int = 200, h: float = 1e-5) -> float:
        """sup |omega(zeta')| with zeta' by central differences."""
        lo, hi = self.s_span
        worst = 0.0
        for s in np.linspace(lo + 2 * h, hi - 2 * h, samples):
            a, b = self.zeta(s + h), self.zeta(s - h)
            d = np.array([(a.x - b.x) / (2 * h), (a.v - b.v) / (2 * h)])
            worst = max(worst, abs(connection_form(d, self.zeta(s))))
        return worst


def lift_solve(G: ImmersionIntoG, loop: LoopPath, initial: UnitTangent | None = None,
               s_span=(0.0, 1.0), rtol: float = 1e-11, atol: float = 1e-12) -> LiftSolution:
    """Solve tau' = -omega(lift'), starting from the fiber point `initial`."""
    start = loop.path(s_span[0])
    tau0 = 0.0 if initial is None else fiber_offset(G.lift(start), initial)

    def rhs(s, y):
        return [-_omega_along(G, loop.path(s), loop.dpath(s))]

    sol = solve_ivp(rhs, s_span, [tau0], method="DOP853", rtol=rtol, atol=atol,
                    dense_output=True, max_step=(s_span[1] - s_span[0]) / 64)
    if not sol.success:
        raise GeometryError(f"lift ODE failed: {sol.message}")
    return LiftSolution(G, loop, sol, tuple(s_span))


def flat_jacobian(G: ImmersionIntoG, p, tau: float) -> np.ndarray:
    """Jacobian at p of a flat lift passing through phi_tau(lift(p)).

    dzeta = dphi_tau(dlift) + chi (x) dtau with dtau = -omega(dlift).
    """
    Z = G.jacobian(p)
    ut = G.lift(p)
    zt = geodesic_flow(ut, tau)
    dtau = np.array([-connection_form(Z[..., i], ut) for i in range(G.n)])
    moved = np.stack([flow_differential(Z[..., i], tau) for i in range(G.n)], axis=-1)
    return moved + chi(zt)[..., None] * dtau


def shape_from_lift(D) -> np.ndarray:
    """Shape operator B of sigma = x-part of a flat lift with Jacobian D (2, N, n)."""
    Jx, Jv = D[0], D[1]
    Gm = minkowski_gram(Jx.shape[0])
    I = Jx.T @ Gm @ Jx
    return np.linalg.solve(I, -(Jx.T @ Gm @ Jv))


def kappa_at(G: ImmersionIntoG, p, tau: float) -> float:
    return kappa_from_B(shape_from_lift(flat_jacobian(G, p, tau)))


def kappa_difference(G: ImmersionIntoG, loop: LoopPath, tau0: float = 0.0) -> float:
    """Holonomy through the curvature function: kappa at the deck image minus kappa at the start.

    A flat lift is solved along the path; the reconstructed hypersurface at the
    end is compared with the deck image of the one at the start.
    """
    start = loop.path(0.0)
    sol = lift_solve(G, loop, geodesic_flow(G.lift(start), tau0))
    k0 = kappa_at(G, start, tau0)
    k1 = kappa_at(G, loop.path(1.0), sol.tau(1.0))
    return k1 - k0


# --- grid reconstruction --------------------------------------------------------------

@dataclass
class Reconstruction:
    G: ImmersionIntoG
    xs: np.ndarray
    ys: np.ndarray
    tau: np.ndarray
    closure: np.ndarray
    shift: float = 0.0

    def _nearest(self, p):
        i = int(np.argmin(np.abs(self.xs - p[0])))
        j = int(np.argmin(np.abs(self.ys - p[1])))
        return i, j

    def tau_at(self, p, order: int = 12) -> float:
        """tau at p by integrating -omega from the nearest grid node."""
        p = np.asarray(p, dtype=float)
        i, j = self._nearest(p)
        q = np.array([self.xs[i], self.ys[j]])
        d = p - q
        if not np.any(d):
            return float(self.tau[i, j]) + self.shift
        x, w = leggauss(order)
        acc = 0.0
        for xk, wk in zip(x, w):
            acc += wk / 2 * _omega_along(self.G, q + (xk + 1) / 2 * d, d)
        return float(self.tau[i, j] - acc) + self.shift

    def zeta(self, p) -> UnitTangent:
        return geodesic_flow(self.G.lift(np.asarray(p, dtype=float)), self.tau_at(p))

    def immersion(self, orientation: int | None = None) -> Immersion:
        """sigma = x-part of the flat lift; the normal comes from the sigma's own Jacobian."""
        imm = Immersion(lambda p: self.zeta(p).x, 2, name="reconstructed")
        if orientation is None:
            p0 = np.array([self.xs[len(self.xs) // 2], self.ys[len(self.ys) // 2]])
            imm.orientation = 1
            if mink(imm.nu(p0), self.zeta(p0).v) < 0:
                orientation = -1
            else:
                orientation = 1
        imm.orientation = orientation
        return imm

    def min_singular_value(self, t: float = 0.0) -> float:
        worst = np.inf
        for i, x in enumerate(self.xs):
            for j, y in enumerate(self.ys):
                D = flat_jacobian(self.G, np.array([x, y]), self.tau[i, j] + self.shift + t)
                worst = min(worst, _immersion_singular_value(D))
        return float(worst)


def _immersion_singular_value(D) -> float:
    """Smallest singular value of dsigma measured in the induced metric."""
    Jx = D[0]
    I = Jx.T @ minkowski_gram(Jx.shape[0]) @ Jx
    ev = np.linalg.eigvalsh(0.5 * (I + I.T))
    return float(np.sqrt(max(ev[0], 0.0)))


def _edge_increment(G, a, b, order=8) -> float:
    x, w = leggauss(order)
    d = b - a
    return -sum(wk / 2 * _omega_along(G, a + (xk + 1) / 2 * d, d) for xk, wk in zip(x, w))


DESING_GRID = tuple(sorted({0.05 * k * s for k in range(41) for s in (1, -1)}, key=lambda t: (abs(t), -t)))


def reconstruct_sigma(G: ImmersionIntoG, xs, ys, initial: UnitTangent | None = None,
                      closure_tol: float = LAGRANGIAN_TOL, sv_tol: float = 1e-6) -> Reconstruction:
    """Flat lift over a rectangular grid, via the spanning tree "middle row, then columns".

    Per-cell closure residuals (the sum of edge increments around each cell,
    divided by its area) serve as the Lagrangian test.  If the projected map
    is singular somewhere, the smallest flow shift on the scan grid making it
    regular is applied.
    """
    if G.n != 2:
        raise GeometryError("grid reconstruction handles two-dimensional domains")
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    nx, ny = len(xs), len(ys)
    i0, j0 = nx // 2, ny // 2
    P = lambda i, j: np.array([xs[i], ys[j]])
    tau = np.zeros((nx, ny))
    tau[i0, j0] = 0.0 if initial is None else fiber_offset(G.lift(P(i0, j0)), initial)
    for i in range(i0 + 1, nx):
        tau[i, j0] = tau[i - 1, j0] + _edge_increment(G, P(i - 1, j0), P(i, j0))
    for i in range(i0 - 1, -1, -1):
        tau[i, j0] = tau[i + 1, j0] + _edge_increment(G, P(i + 1, j0), P(i, j0))
    for i in range(nx):
        for j in range(j0 + 1, ny):
            tau[i, j] = tau[i, j - 1] + _edge_increment(G, P(i, j - 1), P(i, j))
        for j in range(j0 - 1, -1, -1):
            tau[i, j] = tau[i, j + 1] + _edge_increment(G, P(i, j + 1), P(i, j))
    closure = np.zeros((nx - 1, ny - 1))
    for i in range(nx - 1):
        for j in range(ny - 1):
            c = (_edge_increment(G, P(i, j), P(i + 1, j)) + _edge_increment(G, P(i + 1, j), P(i + 1, j + 1))
                 + _edge_increment(G, P(i + 1, j + 1), P(i, j + 1)) + _edge_increment(G, P(i, j + 1), P(i, j)))
            closure[i, j] = abs(c) / ((xs[i + 1] - xs[i]) * (ys[j + 1] - ys[j]))
    if closure.max() > closure_tol:
        raise GeometryError(f"G is not Lagrangian on this grid (closure residual {closure.max():.2e})")
    rec = Reconstruction(G, xs, ys, tau, closure)
    for t in DESING_GRID:
        if rec.min_singular_value(t) > sv_tol:
            rec.shift = t
            return rec
    raise GeometryError("no flow shift on the scan grid makes the reconstruction an immersion")


# --- mean curvature of Gauss maps ---------------------------------------------------------

def _lift_point(imm: Immersion, u) -> np.ndarray:
    return np.array([imm.point(u), imm.nu(u)])


def _second_derivatives(imm: Immersion, u, h: float):
    n = imm.n
    out = np.empty((n, n, 2, u.size + 2))
    E = np.eye(n) * h
    for i in range(n):
        for j in range(i, n):
            f = lambda a, b: _lift_point(imm, u + a * E[i] + b * E[j])
            out[i, j] = (f(1, 1) - f(1, -1) - f(-1, 1) + f(-1, -1)) / (4 * h * h)
            out[j, i] = out[i, j]
    return out


def _tangent_projection(Z, ut: UnitTangent) -> np.ndarray:
    """Orthogonal projection onto T T^1H for the flat form <.,.> (+) -<.,.>."""
    x, v = ut.x, ut.v
    zero = np.zeros_like(x)
    normals = [np.array([x, zero]), np.array([v, -x]), np.array([zero, v])]
    h = lambda A, B: mink(A[0], B[0]) - mink(A[1], B[1])
    M = np.array([[h(a, b) for b in normals] for a in normals])
    c = np.linalg.solve(M, [h(a, Z) for a in normals])
    return Z - sum(ck * nk for ck, nk in zip(c, normals))


def mean_curvature_by_trace(imm: Immersion, u, h: float = 1e-3) -> np.ndarray:
    """Mean curvature of the Gauss map from second derivatives of the Gauss lift.

    Covariant derivatives in G are the projections of flat second derivatives
    of the (flow-orthogonal) Gauss lift onto T T^1H, taken modulo chi; the
    normal part is then traced against Ibar.
    """
    u = np.asarray(u, dtype=float)
    ut = gauss_lift(imm, u)
    sd = shape_data(imm, u)
    Z = dzeta(imm, u, sd=sd)
    n = imm.n
    cols = [Z[..., i] for i in range(n)]
    Ib = np.array([[sasaki_inner(a, b, ut) for b in cols] for a in cols])
    Ibinv = np.linalg.inv(Ib)
    D2 = _second_derivatives(imm, u, h)
    H = np.zeros((2, ut.dim))
    for i in range(n):
        for j in range(n):
            Y = horizontal_part(_tangent_projection(D2[i, j], ut), ut)
            coef = Ibinv @ np.array([sasaki_inner(c, Y, ut) for c in cols])
            normal = Y - sum(ck * c for ck, c in zip(coef, cols))
            H += Ibinv[i, j] * normal
    return H / n


def kappa_gradient(imm: Immersion, u, h: float = 1e-4) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    g = np.empty(imm.n)
    for i in range(imm.n):
        e = np.zeros(imm.n)
        e[i] = h
        g[i] = (kappa(imm, u + e) - kappa(imm, u - e)) / (2 * h)
    return g


def mean_curvature_by_kappa(imm: Immersion, u) -> np.ndarray:
    """-J(dG(gradient of kappa)), the gradient taken for Ibar."""
    u = np.asarray(u, dtype=float)
    sd = shape_data(imm, u)
    grad = np.linalg.solve(gauss_fff(imm, u, sd), kappa_gradient(imm, u))
    return -J(dzeta(imm, u, grad, sd=sd))


def gauss_mean_curvature(imm: Immersion, u, tol: float = ROUTE_TOL) -> np.ndarray:
    """Mean curvature vector of the Gauss map, as a chi-orthogonal vector at the Gauss lift.

    Both the trace route and the kappa-gradient route are evaluated; a
    disagreement beyond `tol` is treated as a numerical failure.
    """
    a = mean_curvature_by_trace(imm, u)
    b = mean_curvature_by_kappa(imm, u)
    scale = max(1.0, np.abs(b).max())
    if np.abs(a - b).max() > tol * scale:
        raise GeometryError(f"mean curvature routes disagree ({np.abs(a - b).max():.2e})")
    return b


def maslov_form(imm: Immersion, u, V, H=None) -> float:
    """Omega(Hbar, dG V)."""
    u = np.asarray(u, dtype=float)
    if H is None:
        H = mean_curvature_by_kappa(imm, u)
    return omega_form(H, dzeta(imm, u, V), gauss_lift(imm, u))


def maslov_integral(imm: Immersion, loop: LoopPath, order: int = 8, route: str = "kappa") -> float:
    """Integral of G*(Omega(Hbar, .)) along a parameter loop."""
    s, w = loop.nodes(order)
    fn = mean_curvature_by_kappa if route == "kappa" else mean_curvature_by_trace
    total = 0.0
    for sk, wk in zip(s, w):
        u = loop.path(sk)
        total += wk * maslov_form(imm, u, loop.dpath(sk), fn(imm, u))
    return float(total)


# --- flux -----------------------------------------------------------------------------------

def flux(family: Callable, loop: LoopPath, s_order: int = 16, order: int = 8,
         h: float = 1e-5, convention: str = "holonomy") -> float:
    """Lagrangian flux of an isotopy s -> family(s) (an ImmersionIntoG) along a loop.

    The integrand Omega(X_s, dG_s(loop')) uses chi-orthogonal parts of lift
    derivatives; X_s is the s-derivative of the lift by central differences.
    With convention "holonomy" the double integral is taken with the
    orientation that makes flux equal hol(G_1) - hol(G_0) for our sign of
    Omega; "literal" returns the opposite orientation.
    """
    xs, ws = leggauss(s_order)
    sl, wl = loop.nodes(order)
    total = 0.0
    for xk, wk in zip(xs, ws):
        s = (xk + 1) / 2
        Gs, Gp, Gm = family(s), family(s + h), family(s - h)
        for tl, wt in zip(sl, wl):
            p = loop.path(tl)
            ut = Gs.lift(p)
            X = (_stack(Gp.lift(p)) - _stack(Gm.lift(p))) / (2 * h)
            Y = Gs.jacobian(p) @ loop.dpath(tl)
            total += wk / 2 * wt * omega_form(horizontal_part(X, ut), horizontal_part(Y, ut), ut)
    if convention == "holonomy":
        return float(-total)
    if convention == "literal":
        return float(total)
    raise ValueError(f"unknown convention {convention!r}")


# --- examples ---------------------------------------------------------------------------------

def boost(c: float) -> np.ndarray:
    """Hyperbolic translation of length c along gamma(t) = (sinh t, 0, cosh t)."""
    ch, sh = np.cosh(c), np.sinh(c)
    return np.array([[ch, 0.0, sh], [0.0, 1.0, 0.0], [sh, 0.0, ch]])


def angle_chart_lift(t: float, theta: float) -> UnitTangent:
    """(gamma(t), cos theta gamma'(t) + sin theta w) in T^1 H^2."""
    g = np.array([np.sinh(t), 0.0, np.cosh(t)])
    gp = np.array([np.cosh(t), 0.0, np.sinh(t)])
    w = np.array([0.0, 1.0, 0.0])
    return UnitTangent(g, np.cos(theta) * gp + np.sin(theta) * w)


def angle_chart_jacobian(t: float, theta: float) -> np.ndarray:
    """Columns d/dt and d/dtheta of angle_chart_lift, shape (2, 3, 2)."""
    g = np.array([np.sinh(t), 0.0, np.cosh(t)])
    gp = np.array([np.cosh(t), 0.0, np.sinh(t)])
    w = np.array([0.0, 1.0, 0.0])
    dt = np.array([gp, np.cos(theta) * g])
    dth = np.array([np.zeros(3), -np.sin(theta) * gp + np.cos(theta) * w])
    return np.stack([dt, dth], axis=-1)


def constant_angle_curve(theta0: float, c: float = 1.0) -> ImmersionIntoG:
    """Geodesics crossing a fixed geodesic at constant angle theta0, with the translation deck."""
    if not 0 < theta0 < np.pi:
        raise GeometryError("theta0 must lie in (0, pi)")
    return ImmersionIntoG(lambda p: angle_chart_lift(p[0], theta0), 1,
                          dlift=lambda p: angle_chart_jacobian(p[0], theta0)[..., :1],
                          deck=[(lambda p: p + c, boost(c))], name=f"angle({theta0:g})",
                          meta={"theta0": theta0, "c": c})


def angle_isotopy(theta_a: float, theta_b: float, c: float = 1.0) -> Callable:
    """s -> constant-angle curve with angle interpolated linearly from theta_a to theta_b."""
    return lambda s: constant_angle_curve(theta_a + s * (theta_b - theta_a), c)


def constant_angle_holonomy(theta0: float, c: float = 1.0) -> float:
    """Closed form c cos(theta0): the given lift is deck-invariant and has omega = cos(theta0) dt."""
    return c * np.cos(theta0)


def smooth_step(x):
    """C-infinity step: 0 for x <= 0, 1 for x >= 1."""
    x = np.asarray(x, dtype=float)
    f = lambda y: np.where(y > 0, np.exp(-1.0 / np.where(y > 0, y, 1.0)), 0.0)
    a, b = f(x), f(1 - x)
    return a / (a + b)


@dataclass
class CounterexampleCurve:
    """A curve in the space of geodesics of H^2 whose flow-orthogonal lift never projects to an immersion.

    sigma_+ is the arclength curve with curvature k(s) rising smoothly from
    tanh r (an r-cap piece, normal toward the core geodesic {x1 = 0}) to
    coth r (a circle of radius r, normal toward its centre).  The lift is
    phi_r(zeta_+) for s >= 0 and phi_{-r}(zeta_-) for s < 0, where zeta_- is
    the image of zeta_+ under the point reflection at the foot point y0 = e3.
    """

    r: float = 0.5
    s1: float = 0.2
    s2: float = 1.2
    T: float = 2.0

    def __post_init__(self):
        lo, hi = np.tanh(self.r), 1 / np.tanh(self.r)
        self._k = lambda s: lo + (hi - lo) * smooth_step((s - self.s1) / (self.s2 - self.s1))
        c, sh = np.cosh(self.r), np.sinh(self.r)
        F0 = np.array([[sh, 0.0, -c], [0.0, 1.0, 0.0], [c, 0.0, -sh]])  # columns sigma, T, N

        def rhs(s, y):
            F = y.reshape(3, 3)
            k = float(self._k(s))
            A = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, -k], [0.0, k, 0.0]])
            return (F @ A).ravel()

        self._sol = solve_ivp(rhs, (0.0, self.T), F0.ravel(), method="DOP853",
                              rtol=1e-12, atol=1e-13, dense_output=True)
        self.R0 = np.diag([-1.0, -1.0, 1.0])

    def curvature_plus(self, s):
        return float(self._k(s))

    def frame_plus(self, s) -> np.ndarray:
        return self._sol.sol(s).reshape(3, 3)

    def zeta_and_derivative(self, s):
        """zeta(s) as a UnitTangent and zeta'(s) as a (2, 3) array."""
        if s >= 0:
            F = self.frame_plus(s)
            sig, T, N = F[:, 0], F[:, 1], F[:, 2]
            k = self.curvature_plus(s)
            base = UnitTangent(sig, N)
            d = np.array([T, -k * T])
            t = self.r
        else:
            F = self.frame_plus(-s)
            sig, T, N = F[:, 0], F[:, 1], F[:, 2]
            k = self.curvature_plus(-s)
            R = self.R0
            base = UnitTangent(R @ sig, -R @ N)
            d = np.array([-R @ T, -k * (R @ T)])
            t = -self.r
        return geodesic_flow(base, t), flow_differential(d, t)

    def as_immersion_into_G(self) -> ImmersionIntoG:
        return ImmersionIntoG(lambda p: self.zeta_and_derivative(float(p[0]))[0], 1,
                              dlift=lambda p: self.zeta_and_derivative(float(p[0]))[1][..., None],
                              name="counterexample")

    def speed_coefficients(self, s_grid) -> np.ndarray:
        """(a, b) per sample with speed factor a cosh t + b sinh t.

        The flow-orthogonal lift has x' and v' along the unit tangent x cross v,
        so the projected speed of phi_t(zeta) is linear in (cosh t, sinh t).
        """
        out = np.empty((len(s_grid), 2))
        for k, s in enumerate(s_grid):
            ut, d = self.zeta_and_derivative(float(s))
            T = lorentz_cross(ut.x, ut.v)
            out[k] = mink(d[0], T), mink(d[1], T)
        return out

    def speed_factor(self, s, t: float) -> float:
        """Signed speed of pi(phi_t(zeta)) against the unit tangent x cross v."""
        a, b = self.speed_coefficients([s])[0]
        return float(a * np.cosh(t) + b * np.sinh(t))

    def singular_at(self, t: float, s_grid=None, tol: float = 1e-9, coeffs=None) -> bool:
        """True if s -> pi(phi_t(zeta(s))) has a vanishing differential on the grid's span."""
        if coeffs is None:
            if s_grid is None:
                s_grid = np.linspace(-self.T, self.T, 4001)
            coeffs = self.speed_coefficients(s_grid)
        f = coeffs[:, 0] * np.cosh(t) + coeffs[:, 1] * np.sinh(t)
        return bool(np.any(np.abs(f) < tol) or np.any(np.sign(f[1:]) != np.sign(f[:-1])))

    def local_shift(self, a: float, b: float, samples: int = 201, sv_tol: float = 1e-6):
        """Smallest flow shift on the scan grid making the arc [a, b] project to an immersion."""
        coeffs = self.speed_coefficients(np.linspace(a, b, samples))
        for t in DESING_GRID:
            f = coeffs[:, 0] * np.cosh(t) + coeffs[:, 1] * np.sinh(t)
            if np.all(np.abs(f) > sv_tol) and np.all(np.sign(f) == np.sign(f[0])):
                return t
        return None


def lorentz_cross(a, b) -> np.ndarray:
    """Lorentz cross product in R^{2,1}: the vector c with <c, y> = det(a, b, y)."""
    c = np.cross(a, b)
    c[-1] = -c[-1]
    return c
