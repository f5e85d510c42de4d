"""Parametrized hypersurfaces of hyperbolic space and their Gauss maps.

Conventions: I = J^T G J with J the ambient Jacobian; the shape operator B
satisfies dsigma o B = -d nu; II = I(B., .), III = I(B., B.).  The Gauss map
first fundamental form is Ibar = I - III.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .geodesic_space import (
    GeodesicLine,
    TangentOfG,
    UnitTangent,
    G_metric,
    project_to_G,
)
from .minkowski import GeometryError, boundary_endpoint, mink, minkowski_gram

FD_STEP = 1e-5
COND_MAX = 1e8


def complex_step_jacobian(f: Callable, u, h: float = 1e-30) -> np.ndarray:
    """Jacobian of an analytic map by the complex-step trick (exact to rounding)."""
    u = np.asarray(u, dtype=float)
    cols = []
    for i in range(u.size):
        du = np.zeros(u.size, dtype=complex)
        du[i] = 1j * h
        cols.append(np.imag(f(u + du)) / h)
    return np.array(cols).T


def central_jacobian(f: Callable, u, h: float = FD_STEP) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    cols = []
    for i in range(u.size):
        du = np.zeros(u.size)
        du[i] = h
        cols.append((np.asarray(f(u + du)) - np.asarray(f(u - du))) / (2 * h))
    return np.array(cols).T


def cofactor_normal(Jac, x) -> np.ndarray:
    """Unit vector Minkowski-orthogonal to x and to the columns of Jac."""
    N = x.size
    M = np.column_stack([Jac, x, np.zeros(N)])
    c = np.empty(N)
    for i in range(N):
        M[:, -1] = 0.0
        M[i, -1] = 1.0
        c[i] = np.linalg.det(M)
    n = minkowski_gram(N) @ c
    q = mink(n, n)
    if q <= 0:
        raise GeometryError("degenerate tangent space")
    return n / np.sqrt(q)


@dataclass
class Immersion:
    """sigma: U subset R^n -> H^{n+1}.

    `eval` maps a parameter to an ambient point.  With `analytic=True` it must
    also accept complex parameters, and the Jacobian is taken by complex
    step.  A closed-form `normal` may be registered; otherwise the normal is
    the cofactor normal times `orientation`.
    """

    eval: Callable
    n: int
    orientation: int = 1
    jac: Callable | None = None
    normal: Callable | None = None
    analytic: bool = False
    domain: tuple | None = None
    periodic: tuple = ()
    name: str = "immersion"
    meta: dict = field(default_factory=dict)

    def point(self, u) -> np.ndarray:
        return np.real(np.asarray(self.eval(np.asarray(u, dtype=float)))).astype(float)

    def jacobian(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if self.jac is not None:
            return np.asarray(self.jac(u), dtype=float)
        if self.analytic:
            return complex_step_jacobian(self.eval, u)
        return central_jacobian(self.point, u)

    def nu(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if self.normal is not None:
            return np.asarray(self.normal(u), dtype=float)
        return self.orientation * cofactor_normal(self.jacobian(u), self.point(u))

    def dnu(self, u, h: float = FD_STEP) -> np.ndarray:
        return central_jacobian(self.nu, u, h)


@dataclass
class ShapeData:
    I: np.ndarray
    nu: np.ndarray
    B: np.ndarray
    lambdas: np.ndarray
    jac: np.ndarray
    dnu: np.ndarray
    cond: float


def first_fundamental_form(Jac) -> np.ndarray:
    return Jac.T @ minkowski_gram(Jac.shape[0]) @ Jac


def shape_data(imm: Immersion, u, h: float = FD_STEP) -> ShapeData:
    Jac = imm.jacobian(u)
    I = first_fundamental_form(Jac)
    try:
        np.linalg.cholesky(I)
    except np.linalg.LinAlgError as exc:
        raise GeometryError("first fundamental form is not positive definite") from exc
    cond = np.linalg.cond(Jac)
    if cond > COND_MAX:
        raise GeometryError(f"Jacobian is degenerate (condition number {cond:.2e})")
    nu = imm.nu(u)
    dnu = imm.dnu(u, h)
    # -dnu = Jac B; minimize in the Minkowski metric, which on the tangent space is I
    G = minkowski_gram(Jac.shape[0])
    B = np.linalg.solve(I, -(Jac.T @ G @ dnu))
    lam = np.sort(np.linalg.eigvals(B).real)
    return ShapeData(I, nu, B, lam, Jac, dnu, cond)


def principal_curvatures(imm: Immersion, u) -> np.ndarray:
    return shape_data(imm, u).lambdas


def gauss_lift(imm: Immersion, u) -> UnitTangent:
    return UnitTangent(imm.point(u), imm.nu(u))


def gauss_map(imm: Immersion, u) -> GeodesicLine:
    return project_to_G(gauss_lift(imm, u))


def hyperbolic_gauss(imm: Immersion, u, sign: int) -> np.ndarray:
    ut = gauss_lift(imm, u)
    return boundary_endpoint(ut.x, ut.v, sign, tol=1e-7)


def dzeta(imm: Immersion, u, W=None, sd: ShapeData | None = None) -> np.ndarray:
    """Differential of the Gauss lift.

    Returns (2, N, n) columns (dsigma e_i, dnu e_i) or, with W, a single (2, N) vector.
    """
    sd = sd or shape_data(imm, u)
    D = np.array([sd.jac, -sd.jac @ sd.B])
    if W is None:
        return D
    return D @ np.asarray(W, dtype=float)


def gauss_fff(imm: Immersion, u, sd: ShapeData | None = None) -> np.ndarray:
    """Ibar = I - III, the first fundamental form of the Gauss map."""
    sd = sd or shape_data(imm, u)
    I, B = sd.I, sd.B
    Ib = I - B.T @ I @ B
    return 0.5 * (Ib + Ib.T)


def gauss_pullback_direct(imm: Immersion, u) -> np.ndarray:
    """Pull-back of the metric of G via the lift, with d nu taken by finite differences."""
    ut = gauss_lift(imm, u)
    Jac = imm.jacobian(u)
    dnu = imm.dnu(u)
    n = imm.n
    vecs = [TangentOfG(ut, np.array([Jac[:, i], dnu[:, i]])) for i in range(n)]
    return np.array([[G_metric(vecs[i], vecs[j]) for j in range(n)] for i in range(n)])


def kappa(imm: Immersion, u, sd: ShapeData | None = None) -> float:
    sd = sd or shape_data(imm, u)
    return kappa_from_B(sd.B)


def kappa_from_B(B) -> float:
    B = np.asarray(B)
    n = B.shape[0]
    lam = np.linalg.eigvals(B).real
    if np.any(np.abs(lam) >= 1):
        raise GeometryError("principal curvatures must lie in (-1, 1)")
    Id = np.eye(n)
    s1, l1 = np.linalg.slogdet(Id + B)
    s2, l2 = np.linalg.slogdet(Id - B)
    return float((l1 - l2) / (2 * n))


def kappa_eigen(B) -> float:
    lam = np.linalg.eigvals(np.asarray(B)).real
    return float(np.mean(np.arctanh(lam)))


def evolved_shape(B, t: float) -> np.ndarray:
    """Shape operator after normal evolution by t: (id - tanh t B)^{-1}(B - tanh t id)."""
    B = np.asarray(B, dtype=float)
    n = B.shape[0]
    th = np.tanh(t)
    M = np.eye(n) - th * B
    if abs(np.linalg.det(M)) < 1e-14:
        raise GeometryError("id - tanh(t) B is singular")
    return np.linalg.solve(M, B - th * np.eye(n))


def normal_evolution(imm: Immersion, t: float) -> Immersion:
    """sigma_t = cosh t sigma + sinh t nu with normal sinh t sigma + cosh t nu."""
    c, s = np.cosh(t), np.sinh(t)

    def ev(u):
        return c * imm.point(u) + s * imm.nu(u)

    def jac(u):
        return c * imm.jacobian(u) + s * imm.dnu(u)

    def nrm(u):
        return s * imm.point(u) + c * imm.nu(u)

    return Immersion(ev, imm.n, imm.orientation, jac=jac, normal=nrm, domain=imm.domain,
                     periodic=imm.periodic, name=f"{imm.name}+evolved({t:g})",
                     meta=dict(imm.meta, evolved=imm.meta.get("evolved", 0.0) + t))


def is_small_curvature(imm: Immersion, u) -> bool:
    return bool(np.all(np.abs(principal_curvatures(imm, u)) < 1))


def is_convex(imm: Immersion, u) -> bool:
    """Positive semidefinite II with respect to the flagged normal."""
    return bool(np.all(principal_curvatures(imm, u) >= -1e-12))


# --- catalog ----------------------------------------------------------------

def _plane_point(u):
    """Totally geodesic copy of H^n in {x_1 = 0}."""
    u = np.asarray(u)
    return np.concatenate([[0.0 * u[0]], u, [np.sqrt(1 + u @ u)]])


def _e1(N):
    e = np.zeros(N)
    e[0] = 1.0
    return e


def _stereo_sphere(u):
    """Inverse stereographic map R^m -> S^m (complex-step friendly)."""
    u = np.asarray(u)
    r2 = u @ u
    return np.concatenate([2 * u, [r2 - 1]]) / (r2 + 1)


def plane(n: int = 2) -> Immersion:
    N = n + 2
    e1 = _e1(N)
    return Immersion(_plane_point, n, analytic=True, normal=lambda u: e1, name="plane")


def r_cap(r: float, n: int = 2, toward: bool = False) -> Immersion:
    """Equidistant hypersurface at distance r from the plane {x_1 = 0}.

    Default normal points away from the plane (principal curvatures -tanh r);
    `toward=True` flips it.
    """
    if r <= 0:
        raise GeometryError("r must be positive")
    N = n + 2
    e1 = _e1(N)
    c, s = np.cosh(r), np.sinh(r)
    sgn = -1.0 if toward else 1.0

    def ev(u):
        return c * _plane_point(u) + s * e1

    def nrm(u):
        return sgn * (s * _plane_point(np.asarray(u, dtype=float)) + c * e1)

    return Immersion(ev, n, orientation=int(sgn), analytic=True, normal=nrm,
                     name=f"r-cap({r:g})", meta={"r": r})


def graph(hfun: Callable, n: int = 2, name: str = "graph") -> Immersion:
    """sigma(u) = cosh h(u) P(u) + sinh h(u) e_1 over the plane P.

    `hfun` should accept complex arguments.  The orientation is fixed so that
    a constant h gives the away-from-plane normal of r_cap.
    """
    N = n + 2
    e1 = _e1(N)

    def ev(u):
        hu = hfun(u)
        return np.cosh(hu) * _plane_point(u) + np.sinh(hu) * e1

    imm = Immersion(ev, n, analytic=True, name=name)
    u0 = np.zeros(n)
    ref = np.sinh(hfun(u0)) * _plane_point(u0) + np.cosh(hfun(u0)) * e1
    if mink(imm.nu(u0), np.real(ref)) < 0:
        imm.orientation = -1
    return imm


def default_graph_height(u):
    """Non-umbilic height with small principal curvatures near the origin."""
    return 0.3 * np.sin(u[0]) * np.cos(0.7 * u[1]) + 0.1 * u[1] + 0.05 * u[0] * u[1]


def horosphere(n: int = 2, inward: bool = True) -> Immersion:
    """{<x, l> = -1} with l = (-1, 0, ..., 0, 1).

    Inward normal l - sigma gives B = id; outward gives B = -id.
    """
    N = n + 2
    ell = np.zeros(N)
    ell[0] = -1.0
    ell[-1] = 1.0

    def ev(u):
        u = np.asarray(u)
        q = (u @ u) / 2
        return np.concatenate([[-q], u, [1 + q]])

    sgn = 1.0 if inward else -1.0

    def nrm(u):
        return sgn * (ell - np.real(ev(np.asarray(u, dtype=float))))

    return Immersion(ev, n, orientation=int(sgn), analytic=True, normal=nrm,
                     name="horosphere", meta={"center": ell, "inward": inward})


def sphere(r: float, n: int = 2) -> Immersion:
    """Sphere of radius r about the base point, inward normal (principal curvatures coth r)."""
    if r <= 0:
        raise GeometryError("r must be positive")
    N = n + 2
    e = np.zeros(N)
    e[-1] = 1.0
    c, s = np.cosh(r), np.sinh(r)

    def om(u):
        return np.concatenate([_stereo_sphere(u), [0.0 * u[0]]])

    def ev(u):
        return c * e + s * om(u)

    def nrm(u):
        return -(s * e + c * np.real(om(np.asarray(u, dtype=float))))

    return Immersion(ev, n, orientation=-1, analytic=True, normal=nrm,
                     name=f"sphere({r:g})", meta={"r": r})


def point_family(n: int = 2):
    """The unit sphere of T_e H^{n+1} as a map S^n -> T^1 H (stereographic parameter)."""
    N = n + 2
    e = np.zeros(N)
    e[-1] = 1.0

    def lift(u):
        return UnitTangent(e, np.concatenate([_stereo_sphere(np.asarray(u, dtype=float)), [0.0]]))

    return lift


def cylinder(k: int, r: float, n: int = 2) -> Immersion:
    """Tube of radius r around a totally geodesic H^k.

    Parameters are (s in R^k, u in R^{n-k}); the H^k sits in the last k+1
    coordinates and the sphere factor S^{n-k} in the first n-k+1.  The normal
    points away from the core: principal curvatures -tanh r (k times) and
    -coth r (n-k times).
    """
    if r <= 0 or not (1 <= k < n):
        raise GeometryError("need r > 0 and 1 <= k < n")
    m = n - k
    c, s = np.cosh(r), np.sinh(r)

    def core(sv):
        return np.concatenate([np.zeros(m + 1) * sv[0], sv, [np.sqrt(1 + sv @ sv)]])

    def ring(uv):
        if m == 1:
            th = uv[0]
            w = np.array([np.cos(th), np.sin(th)])
        else:
            w = _stereo_sphere(uv)
        return np.concatenate([w, np.zeros(k + 1) * uv[0]])

    def ev(p):
        p = np.asarray(p)
        return c * core(p[:k]) + s * ring(p[k:])

    def nrm(p):
        p = np.asarray(p, dtype=float)
        return s * core(p[:k]) + c * ring(p[k:])

    return Immersion(ev, n, analytic=True, normal=nrm, name=f"cylinder({k},{r:g})",
                     meta={"k": k, "r": r})


def catalog(name: str, **params) -> Immersion:
    name = name.replace("_", "-")
    n = params.pop("n", 2)
    if name == "plane":
        return plane(n)
    if name == "r-cap":
        return r_cap(params.get("r", 0.5), n, params.get("toward", False))
    if name == "sphere":
        return sphere(params.get("r", 1.0), n)
    if name == "horosphere":
        return horosphere(n, params.get("inward", True))
    if name == "cylinder":
        return cylinder(params.get("k", 1), params.get("r", 0.5), n)
    if name == "graph":
        return graph(params.get("h", default_graph_height), n)
    raise GeometryError(f"unknown catalog entry {name!r}")


CATALOG_NAMES = ("plane", "sphere", "horosphere", "cylinder", "r-cap", "graph")


def signature(M, tol: float = 1e-9):
    ev = np.linalg.eigvalsh(0.5 * (M + M.T))
    return int(np.sum(ev > tol)), int(np.sum(ev < -tol))


def sample_rows(imm: Immersion, params) -> list[dict]:
    """Rows for mesh export: parameter, point, normal, principal curvatures, kappa."""
    rows = []
    for u in params:
        sd = shape_data(imm, u)
        try:
            k = kappa_from_B(sd.B)
        except GeometryError:
            k = float("nan")
        rows.append({"param": np.asarray(u).tolist(), "point": imm.point(u).tolist(),
                     "nu": sd.nu.tolist(), "lambdas": sd.lambdas.tolist(), "kappa": k})
    return rows
