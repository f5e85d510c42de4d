"""Unit tangent bundle of hyperbolic space, geodesic flow, and the space of geodesics.

A point of T^1 H^{n+1} is a pair (x, v) in R^{n+1,1}.  A tangent vector at
(x, v) is a pair (xdot, vdot) stored as a (2, N) array.  The generator of the
geodesic flow is chi = (v, x).

Tangent vectors to the space of geodesics are carried as vectors orthogonal
to chi at a chosen representative (x, v).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .minkowski import (
    DEFAULT_TOL,
    GeometryError,
    boundary_endpoint,
    mink,
    project_hyp,
)


@dataclass(frozen=True)
class UnitTangent:
    x: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float))

    @property
    def dim(self) -> int:
        return self.x.shape[0]

    def residual(self) -> float:
        x, v = self.x, self.v
        return max(abs(mink(x, x) + 1), abs(mink(x, v)), abs(mink(v, v) - 1))

    def check(self, tol=DEFAULT_TOL) -> "UnitTangent":
        if self.residual() > tol:
            raise GeometryError(f"not a unit tangent vector (residual {self.residual():.2e})")
        return self

    def transform(self, A) -> "UnitTangent":
        return UnitTangent(A @ self.x, A @ self.v)


@dataclass(frozen=True)
class GeodesicLine:
    """Oriented geodesic as (plus, minus) endpoints on the slice x_last = 1."""

    plus: np.ndarray
    minus: np.ndarray

    def distance_to(self, other: "GeodesicLine") -> float:
        return float(max(np.max(np.abs(self.plus - other.plus)),
                         np.max(np.abs(self.minus - other.minus))))


def retract(x, v):
    """Push an approximate (x, v) back onto T^1 H."""
    x = project_hyp(x)
    v = v + mink(x, v) * x
    return x, v / np.sqrt(mink(v, v))


def standard_unit_tangent(N: int) -> UnitTangent:
    """x = (0,...,0,1), v = e_1."""
    x = np.zeros(N)
    x[-1] = 1.0
    v = np.zeros(N)
    v[0] = 1.0
    return UnitTangent(x, v)


def random_lorentz(N: int, rng, scale: float = 1.0) -> np.ndarray:
    """Random element of the identity component of O(N-1, 1)."""
    from scipy.linalg import expm

    A = rng.normal(scale=scale, size=(N, N))
    # X in so(N-1,1) means X^T G + G X = 0
    G = np.eye(N)
    G[-1, -1] = -1
    X = A - G @ A.T @ G
    return expm(X / 2)


def random_unit_tangent(N: int, rng, spread: float = 1.0) -> UnitTangent:
    x0 = standard_unit_tangent(N)
    L = random_lorentz(N, rng, spread)
    return x0.transform(L)


def orthonormal_complement(ut: UnitTangent) -> np.ndarray:
    """Rows spanning T_x H intersected with v-perp, Minkowski orthonormal."""
    N = ut.dim
    basis = []
    for e in np.eye(N):
        w = e + mink(ut.x, e) * ut.x - mink(ut.v, e) * ut.v
        for b in basis:
            w = w - mink(b, w) * b
        nrm = mink(w, w)
        if nrm > 1e-8:
            basis.append(w / np.sqrt(nrm))
        if len(basis) == N - 2:
            break
    return np.array(basis)


# --- flow and lifts --------------------------------------------------------

def geodesic_flow(ut: UnitTangent, t: float) -> UnitTangent:
    c, s = np.cosh(t), np.sinh(t)
    return UnitTangent(c * ut.x + s * ut.v, s * ut.x + c * ut.v)


def flow_differential(X, t: float) -> np.ndarray:
    """Push a tangent vector forward by the flow; the flow is linear in (x, v)."""
    X = np.asarray(X, dtype=float)
    c, s = np.cosh(t), np.sinh(t)
    return np.array([c * X[0] + s * X[1], s * X[0] + c * X[1]])


def is_tangent(X, ut: UnitTangent, tol=1e-8) -> bool:
    xd, vd = X
    x, v = ut.x, ut.v
    return (abs(mink(x, xd)) < tol and abs(mink(x, vd) + mink(v, xd)) < tol
            and abs(mink(v, vd)) < tol)


def lift(kind: str, ut: UnitTangent, w=None, tol=1e-8) -> np.ndarray:
    """Horizontal (w, 0), vertical (0, w) or chi = (v, x)."""
    if kind == "chi":
        return np.array([ut.v, ut.x])
    w = np.asarray(w, dtype=float)
    if abs(mink(w, ut.v)) > tol or abs(mink(w, ut.x)) > tol:
        raise GeometryError("w must be orthogonal to both x and v")
    z = np.zeros_like(w)
    if kind == "horizontal":
        return np.array([w, z])
    if kind == "vertical":
        return np.array([z, w])
    raise ValueError(f"unknown lift kind {kind!r}")


def chi(ut: UnitTangent) -> np.ndarray:
    return lift("chi", ut)


def decompose(X, ut: UnitTangent):
    """Split X = a chi + u^H + w^V.  Returns (a, u, w)."""
    xd, vd = np.asarray(X, dtype=float)
    a = mink(xd, ut.v)
    return a, xd - a * ut.v, vd - a * ut.x


def sasaki_inner(X, Y, ut: UnitTangent) -> float:
    a1, u1, w1 = decompose(X, ut)
    a2, u2, w2 = decompose(Y, ut)
    return float(a1 * a2 + mink(u1, u2) - mink(w1, w2))


def ambient_split_inner(X, Y) -> float:
    """<xdot, xdot'> - <vdot, vdot'>; coincides with the para-Sasaki metric on chi-perp."""
    X = np.asarray(X)
    Y = np.asarray(Y)
    return float(mink(X[0], Y[0]) - mink(X[1], Y[1]))


def connection_form(X, ut: UnitTangent) -> float:
    """omega(X) = Sas(X, chi) = <xdot, v>."""
    return float(mink(np.asarray(X)[0], ut.v))


def horizontal_part(X, ut: UnitTangent) -> np.ndarray:
    """Component of X orthogonal to chi."""
    return np.asarray(X, dtype=float) - connection_form(X, ut) * chi(ut)


# --- space of geodesics ----------------------------------------------------

def project_to_G(ut: UnitTangent) -> GeodesicLine:
    return GeodesicLine(boundary_endpoint(ut.x, ut.v, +1, tol=1e-7),
                        boundary_endpoint(ut.x, ut.v, -1, tol=1e-7))


def endpoint_velocity(ut: UnitTangent, X, sign: int) -> np.ndarray:
    """Derivative of (x + sign v)/(x + sign v)_last along X."""
    X = np.asarray(X, dtype=float)
    w = ut.x + sign * ut.v
    dw = X[0] + sign * X[1]
    L = w[-1]
    return dw / L - w * dw[-1] / L ** 2


def dp(X, ut: UnitTangent, tol=1e-8):
    """Differential of the projection T^1 H -> G as a pair of endpoint velocities.

    X must be orthogonal to chi (chi spans the kernel).
    """
    if abs(connection_form(X, ut)) > tol:
        raise GeometryError("dp is only defined on vectors orthogonal to chi")
    return endpoint_velocity(ut, X, +1), endpoint_velocity(ut, X, -1)


def J(X) -> np.ndarray:
    """Para-complex structure on chi-perp: (xdot, vdot) -> (vdot, xdot)."""
    X = np.asarray(X)
    return np.array([X[1], X[0]])


@dataclass(frozen=True)
class TangentOfG:
    base: UnitTangent
    vector: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "vector", np.asarray(self.vector, dtype=float))

    @classmethod
    def from_any(cls, base: UnitTangent, X) -> "TangentOfG":
        """Represent the class of X modulo chi."""
        return cls(base, horizontal_part(X, base))

    def pushed(self, t: float) -> "TangentOfG":
        """Same tangent of G, seen at the flowed representative."""
        return TangentOfG(geodesic_flow(self.base, t), flow_differential(self.vector, t))


def _same_base(X: TangentOfG, Y: TangentOfG, tol=1e-9):
    if np.max(np.abs(X.base.x - Y.base.x)) > tol or np.max(np.abs(X.base.v - Y.base.v)) > tol:
        raise GeometryError("tangent vectors carry different representatives")


def G_metric(X: TangentOfG, Y: TangentOfG) -> float:
    _same_base(X, Y)
    return sasaki_inner(X.vector, Y.vector, X.base)


def G_omega(X: TangentOfG, Y: TangentOfG) -> float:
    """Fundamental form Omega(X, Y) = g(X, J Y)."""
    _same_base(X, Y)
    return sasaki_inner(X.vector, J(Y.vector), X.base)


def parakahler(X: TangentOfG, Y: TangentOfG):
    """(g(X, Y), J X, Omega(X, Y))."""
    return G_metric(X, Y), TangentOfG(X.base, J(X.vector)), G_omega(X, Y)


def omega_form(X, Y, ut: UnitTangent) -> float:
    """Omega on raw chi-perp representatives at ut."""
    return sasaki_inner(X, J(Y), ut)


# --- curvature of the connection form ---------------------------------------

def _family(ut: UnitTangent, X, Y):
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)

    def F(s, t):
        return retract(ut.x + s * X[0] + t * Y[0], ut.v + s * X[1] + t * Y[1])

    return F


def numeric_domega(ut: UnitTangent, X, Y, h: float = 1e-4, convention: str = "source") -> float:
    """Exterior derivative of omega by nested central differences.

    Builds a two-parameter family F(s, t) on T^1 H with dF/ds = X and
    dF/dt = Y at the origin.  The "standard" convention returns
    d/ds omega(F_t) - d/dt omega(F_s); the default "source" convention has the
    opposite sign, which is the one making d omega equal the pull-back of Omega.
    """
    F = _family(ut, X, Y)

    def omega_s(s, t):
        x1, _ = F(s + h, t)
        x0, _ = F(s - h, t)
        _, v = F(s, t)
        return mink((x1 - x0) / (2 * h), v)

    def omega_t(s, t):
        x1, _ = F(s, t + h)
        x0, _ = F(s, t - h)
        _, v = F(s, t)
        return mink((x1 - x0) / (2 * h), v)

    d_s_omega_t = (omega_t(h, 0) - omega_t(-h, 0)) / (2 * h)
    d_t_omega_s = (omega_s(0, h) - omega_s(0, -h)) / (2 * h)
    standard = d_s_omega_t - d_t_omega_s
    if convention == "standard":
        return float(standard)
    if convention == "source":
        return float(-standard)
    raise ValueError(f"unknown convention {convention!r}")


def domega_closed_form(X, Y) -> float:
    """Standard-convention exterior derivative of omega = <xdot, v>: <vdot_X, xdot_Y> - <vdot_Y, xdot_X>."""
    X = np.asarray(X)
    Y = np.asarray(Y)
    return float(mink(X[1], Y[0]) - mink(Y[1], X[0]))


def numeric_dOmega(ut: UnitTangent, X, Y, Z, h: float = 1e-3) -> float:
    """Exterior derivative of Omega on the three-parameter linear family, by central differences.

    Omega is evaluated on chi-perp parts of coordinate fields; on the linear
    family the coordinate fields commute so d Omega reduces to the cyclic sum
    of first derivatives.
    """
    X, Y, Z = (np.asarray(A, dtype=float) for A in (X, Y, Z))

    def point(a):
        return retract(ut.x + a[0] * X[0] + a[1] * Y[0] + a[2] * Z[0],
                       ut.v + a[0] * X[1] + a[1] * Y[1] + a[2] * Z[1])

    def partial(a, k):
        e = np.zeros(3)
        e[k] = h
        xp, vp = point(a + e)
        xm, vm = point(a - e)
        return np.array([(xp - xm) / (2 * h), (vp - vm) / (2 * h)])

    def Om(a, i, j):
        x, v = point(a)
        u = UnitTangent(x, v)
        A = horizontal_part(partial(a, i), u)
        B = horizontal_part(partial(a, j), u)
        return omega_form(A, B, u)

    total = 0.0
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        e = np.zeros(3)
        e[i] = h
        total += (Om(e, j, k) - Om(-e, j, k)) / (2 * h)
    return float(total)


# --- dimension 3: the boundary as CP^1 ---------------------------------------

def boundary_to_C(e, chart: int = 0) -> complex:
    """Stereographic chart of the boundary sphere of H^3.

    chart 0: z = (x1 + i x2)/(1 - x3), infinity at e_3.
    chart 1: z' = 1/z = (x1 - i x2)/(1 + x3), infinity at -e_3.
    """
    e = np.asarray(e, dtype=float)
    e = e / e[-1]
    if chart == 0:
        return complex(e[0], e[1]) / (1 - e[2])
    return complex(e[0], -e[1]) / (1 + e[2])


def boundary_velocity_to_C(e, de, chart: int = 0) -> complex:
    """Differential of boundary_to_C at the normalized point e along de."""
    e = np.asarray(e, dtype=float)
    de = np.asarray(de, dtype=float)
    if chart == 0:
        d = 1 - e[2]
        return complex(de[0], de[1]) / d + complex(e[0], e[1]) * de[2] / d ** 2
    d = 1 + e[2]
    return complex(de[0], -de[1]) / d - complex(e[0], -e[1]) * de[2] / d ** 2


def C_to_boundary(z: complex, chart: int = 0) -> np.ndarray:
    if chart == 1:
        z = 1.0 / z if z != 0 else np.inf
    r2 = abs(z) ** 2
    return np.array([2 * z.real, 2 * z.imag, r2 - 1, r2 + 1]) / (r2 + 1)


def choose_chart(line: GeodesicLine, margin: float = 0.1) -> int:
    """Use the standard chart unless an endpoint is within `margin` of its infinity."""
    for e in (line.plus, line.minus):
        if np.linalg.norm(e[:3] - np.array([0, 0, 1.0])) < margin:
            return 1
    return 0


def g3_complex_metric(z1, z2, X, Y) -> complex:
    """Holomorphic metric on G_3: -4/(z1 - z2)^2 * sym(dz1 dz2).

    X and Y are pairs (dz1, dz2) of endpoint velocities in a common affine chart.
    """
    if abs(z1 - z2) < 1e-14:
        raise GeometryError("endpoints coincide")
    sym = 0.5 * (X[0] * Y[1] + Y[0] * X[1])
    return complex(-4.0 / (z1 - z2) ** 2 * sym)


def chart_data(ut: UnitTangent, X, chart: int | None = None):
    """Endpoint coordinates and velocities in an affine chart of CP^1 (dimension 3 only)."""
    if ut.dim != 4:
        raise GeometryError("the holomorphic metric needs H^3")
    line = project_to_G(ut)
    if chart is None:
        chart = choose_chart(line)
    dplus, dminus = dp(horizontal_part(X, ut), ut)
    z1 = boundary_to_C(line.plus, chart)
    z2 = boundary_to_C(line.minus, chart)
    return z1, z2, (boundary_velocity_to_C(line.plus, dplus, chart),
                    boundary_velocity_to_C(line.minus, dminus, chart))


def g3_at(ut: UnitTangent, X, Y, chart: int | None = None) -> complex:
    """Holomorphic metric evaluated on tangents given as vectors at ut."""
    if chart is None:
        chart = choose_chart(project_to_G(ut))
    z1, z2, dX = chart_data(ut, X, chart)
    _, _, dY = chart_data(ut, Y, chart)
    return g3_complex_metric(z1, z2, dX, dY)


def dp_closed_form(alpha, beta, gamma, delta):
    """Endpoint velocities (d minus, d plus) at the standard base point.

    Horizontal part (i alpha, beta) and vertical part (i gamma, delta), see
    standard_dim3_vector for the identification with ambient vectors.
    """
    return (complex(delta - beta, alpha - gamma), complex(delta + beta, alpha + gamma))


def standard_dim3_vector(alpha, beta, gamma, delta) -> np.ndarray:
    """Tangent vector at (e_4, e_1) with horizontal part alpha e_2 + beta e_3
    and vertical part gamma e_2 + delta e_3.

    In the chart z = (x1 + i x2)/(1 - x3) the endpoints are minus = -1 and
    plus = 1, and e_2, e_3 correspond to i and 1.
    """
    return np.array([[0.0, alpha, beta, 0.0], [0.0, gamma, delta, 0.0]])
