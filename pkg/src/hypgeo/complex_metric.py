"""Complex metrics on real manifolds: frames, curvature, Gauss-Codazzi, positivity, area forms.

A metric is a callable g(P) taking points of shape (..., n) and returning
complex symmetric matrices of shape (..., n, n).  All routines are written
for batches of points so that whole quadrature grids are processed at once.

Curvature follows the frame route: a Gram-Schmidt frame field X_i, its
structure constants c_ij^k from brackets, connection coefficients
Gamma_ij^k = g(nabla_{X_i} X_j, X_k) from the Koszul formula, and
K = -g(R(X_1, X_2) X_1, X_2).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .minkowski import GeometryError

FRAME_STEP = 1e-3
ISOTROPY_TOL = 1e-8
_RESEED_ANGLE = 0.3


# --- finite differences -----------------------------------------------------

_STENCIL = ((-2, 1 / 12), (-1, -8 / 12), (1, 8 / 12), (2, -1 / 12))


def _shifted(P, a, s, h):
    Q = np.array(P, dtype=float, copy=True)
    Q[..., a] += s * h
    return Q


def partials(f: Callable, P, h: float = FRAME_STEP):
    """Fourth-order central differences of f along each coordinate; returns a list over coordinates."""
    P = np.asarray(P, dtype=float)
    n = P.shape[-1]
    out = []
    for a in range(n):
        acc = 0.0
        for s, w in _STENCIL:
            acc = acc + w * f(_shifted(P, a, s, h))
        out.append(acc / h)
    return out


# --- metric container --------------------------------------------------------

@dataclass
class ComplexMetric:
    g: Callable
    n: int = 2
    domain: tuple | None = None
    name: str = "metric"
    meta: dict = field(default_factory=dict)

    def __call__(self, P):
        return np.asarray(self.g(np.asarray(P, dtype=float)), dtype=complex)

    def scaled(self, factor: Callable, name: str | None = None) -> "ComplexMetric":
        """Conformal change g -> factor(P) g."""
        base = self.g

        def g2(P):
            return np.asarray(factor(P))[..., None, None] * base(P)

        return ComplexMetric(g2, self.n, self.domain, name or f"{self.name}*conformal", dict(self.meta))


def diag_metric(*entries: Callable) -> Callable:
    def g(P):
        P = np.asarray(P, dtype=float)
        n = len(entries)
        out = np.zeros(P.shape[:-1] + (n, n), dtype=complex)
        for i, e in enumerate(entries):
            out[..., i, i] = e(P)
        return out

    return g


# --- orthonormal frames ---------------------------------------------------------

def _bil(g, u, v):
    return np.einsum("...i,...ij,...j->...", u, g, v)


def seed_basis(n: int, reseed: int = 0) -> np.ndarray:
    """Columns of the seed basis; reseeding rotates it by a fixed rotation in each coordinate plane."""
    S = np.eye(n)
    for _ in range(reseed):
        R = np.eye(n)
        for a in range(n - 1):
            Ra = np.eye(n)
            c, s = np.cos(_RESEED_ANGLE * (a + 1)), np.sin(_RESEED_ANGLE * (a + 1))
            Ra[a, a], Ra[a, a + 1], Ra[a + 1, a], Ra[a + 1, a + 1] = c, -s, s, c
            R = R @ Ra
        S = R @ S
    return S


def _align(s, ref):
    """Pick the square root sign closest to a reference root."""
    if ref is None:
        return s
    flip = np.abs(s - ref) > np.abs(s + ref)
    return np.where(flip, -s, s)


def orthonormal_frame(gm, ref_roots=None, reseed: int = 0, max_reseed: int = 4, return_roots=False):
    """Gram-Schmidt for a complex bilinear form.

    gm has shape (..., n, n).  Returns F with F^T g F = id, columns being the
    frame vectors.  `ref_roots` fixes square-root signs so that frames at
    nearby points vary smoothly.
    """
    gm = np.asarray(gm, dtype=complex)
    n = gm.shape[-1]
    batch = gm.shape[:-2]
    for attempt in range(reseed, max_reseed + 1):
        S = seed_basis(n, attempt)
        cols = []
        roots = []
        ok = True
        for k in range(n):
            w = np.broadcast_to(S[:, k], batch + (n,)).astype(complex)
            for c in cols:
                w = w - _bil(gm, c, w)[..., None] * c
            q = _bil(gm, w, w)
            if np.any(np.abs(q) < ISOTROPY_TOL):
                ok = False
                break
            s = np.sqrt(q)
            s = _align(s, None if ref_roots is None else ref_roots[..., k])
            roots.append(s)
            cols.append(w / s[..., None])
        if ok:
            F = np.stack(cols, axis=-1)
            if return_roots:
                return F, np.stack(roots, axis=-1), attempt
            return F
        if ref_roots is not None:
            break
    raise GeometryError("isotropic pivot in Gram-Schmidt after reseeding")


def frame_field(metric: Callable, P, ref_roots=None, reseed=0):
    return orthonormal_frame(metric(P), ref_roots=ref_roots, reseed=reseed)


# --- connection and curvature ---------------------------------------------------

def _structure(metric, P, h, ref, reseed):
    """Frame, coframe, structure constants and Koszul connection coefficients at P."""
    F = frame_field(metric, P, ref, reseed)
    dF = partials(lambda Q: frame_field(metric, Q, ref, reseed), P, h)
    n = F.shape[-1]
    # [X_i, X_j]^c = X_i(X_j^c) - X_j(X_i^c), with X_i = sum_a F[a, i] d_a
    DX = np.stack(dF, axis=-3)  # (..., a, c, j): d_a F[c, j]
    dirder = np.einsum("...ai,...acj->...cij", F, DX)  # X_i applied to X_j^c
    br = dirder - np.swapaxes(dirder, -1, -2)
    Finv = np.linalg.inv(F)
    c = np.einsum("...kc,...cij->...ijk", Finv, br)
    Gam = 0.5 * (c - np.einsum("...jki->...ijk", c) + np.einsum("...kij->...ijk", c))
    return F, Finv, c, Gam


def connection_coefficients(metric: Callable, P, h: float = FRAME_STEP, reseed: int = 0):
    """Gamma[..., i, j, k] = g(nabla_{X_i} X_j, X_k) for the Gram-Schmidt frame."""
    P = np.asarray(P, dtype=float)
    _, roots, rs = orthonormal_frame(metric(P), reseed=reseed, return_roots=True)
    return _structure(metric, P, h, roots, rs)[3]


def riemann_frame(metric: Callable, P, h: float = FRAME_STEP, reseed: int = 0):
    """R[..., i, j, k, l]: X_l-component of R(X_i, X_j) X_k in the Gram-Schmidt frame."""
    P = np.asarray(P, dtype=float)
    _, roots, rs = orthonormal_frame(metric(P), reseed=reseed, return_roots=True)
    F, _, c, Gam = _structure(metric, P, h, roots, rs)
    dGam = partials(lambda Q: _structure(metric, Q, h, roots, rs)[3], P, h)
    DG = np.stack(dGam, axis=-4)  # (..., a, i, j, k)
    XG = np.einsum("...am,...ajkl->...mjkl", F, DG)  # X_m(Gamma_jk^l)
    R = (XG - np.swapaxes(XG, -4, -3)
         + np.einsum("...jkm,...iml->...ijkl", Gam, Gam)
         - np.einsum("...ikm,...jml->...ijkl", Gam, Gam)
         - np.einsum("...ijm,...mkl->...ijkl", c, Gam))
    return R, F


def curvature(metric: Callable, P, h: float = FRAME_STEP, reseed: int = 0):
    """Sectional curvature of the plane of frame vectors X_1, X_2 (the Gaussian curvature for surfaces).

    For n > 2 returns the matrix K[i, j] of sectional curvatures of frame planes.
    """
    R, _ = riemann_frame(metric, P, h, reseed)
    n = R.shape[-1]
    if n == 2:
        return -R[..., 0, 1, 0, 1]
    K = np.zeros(R.shape[:-4] + (n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            if i != j:
                K[..., i, j] = -R[..., i, j, i, j]
    return K


def christoffel(metric: Callable, P, h: float = FRAME_STEP):
    """Coordinate Christoffel symbols Gamma^k_ij, shape (..., k, i, j)."""
    P = np.asarray(P, dtype=float)
    g = metric(P)
    dg = np.stack(partials(metric, P, h), axis=-3)  # (..., a, i, j)
    ginv = np.linalg.inv(g)
    # T[..., l, i, j] = d_i g_lj + d_j g_li - d_l g_ij
    T = (np.einsum("...ilj->...lij", dg) + np.einsum("...jli->...lij", dg) - dg)
    return 0.5 * np.einsum("...kl,...lij->...kij", ginv, T)


def coordinate_curvature(metric: Callable, P, h: float = FRAME_STEP):
    """Gaussian curvature from coordinate Christoffel symbols; an independent check of `curvature`."""
    P = np.asarray(P, dtype=float)
    Gm = christoffel(metric, P, h)
    dG = np.stack(partials(lambda Q: christoffel(metric, Q, h), P, h), axis=-4)  # (..., a, k, i, j)
    # R^l_{ijk} = d_i Gamma^l_jk - d_j Gamma^l_ik + Gamma^l_im Gamma^m_jk - Gamma^l_jm Gamma^m_ik
    i, j = 0, 1
    Rl = (dG[..., i, :, j, i] - dG[..., j, :, i, i]
          + np.einsum("...lm,...m->...l", Gm[..., :, i, :], Gm[..., :, j, i])
          - np.einsum("...lm,...m->...l", Gm[..., :, j, :], Gm[..., :, i, i]))
    g = metric(P)
    # R(d_0, d_1) d_0 = Rl, K = -g(R(d0,d1)d0, d1)/det g
    num = np.einsum("...l,...l->...", Rl, g[..., :, 1])
    return -num / np.linalg.det(g)


# --- Gauss-Codazzi ------------------------------------------------------------------

def self_adjoint_residual(g, Psi):
    """||g Psi - Psi^T g|| for a (1,1)-tensor Psi in coordinates."""
    M = np.einsum("...ij,...jk->...ik", g, Psi)
    return np.abs(M - np.swapaxes(M, -1, -2)).max(axis=(-1, -2))


def codazzi_tensor(metric: Callable, Psi: Callable, P, h: float = FRAME_STEP):
    """(d^nabla Psi)(d_i, d_j)^k in coordinates, shape (..., i, j, k)."""
    P = np.asarray(P, dtype=float)
    Gm = christoffel(metric, P, h)
    Ps = np.asarray(Psi(P), dtype=complex)
    dPs = np.stack(partials(lambda Q: np.asarray(Psi(Q), dtype=complex), P, h), axis=-3)  # (..., a, k, j)
    # D[i, j, k] = d_i Psi^k_j + Gamma^k_{il} Psi^l_j
    D = np.einsum("...ikj->...ijk", dPs) + np.einsum("...kil,...lj->...ijk", Gm, Ps)
    return D - np.swapaxes(D, -3, -2)


def gc_residuals(metric: Callable, Psi: Callable, P, h: float = FRAME_STEP, sa_tol: float = 1e-8):
    """Returns (codazzi, gauss) suprema over the sample points (surfaces for the Gauss part)."""
    P = np.asarray(P, dtype=float)
    g = metric(P)
    Ps = np.asarray(Psi(P), dtype=complex)
    if np.max(self_adjoint_residual(g, Ps)) > sa_tol:
        raise GeometryError("Psi is not self-adjoint for g")
    cod = float(np.max(np.abs(codazzi_tensor(metric, Psi, P, h))))
    K = curvature(metric, P, h)
    if np.ndim(K) == np.ndim(P) - 1:
        gauss = float(np.max(np.abs(K + 1 - np.linalg.det(Ps))))
    else:
        gauss = float("nan")
    return cod, gauss


# --- positivity, bicomplex structure, area ------------------------------------------

def isotropic_slopes(gm):
    """Slopes m with g((1, m), (1, m)) = 0; infinity marks the direction (0, 1)."""
    gm = np.asarray(gm, dtype=complex)
    a, b, c = gm[..., 0, 0], gm[..., 0, 1], gm[..., 1, 1]
    disc = np.sqrt(b * b - a * c)
    with np.errstate(divide="ignore", invalid="ignore"):
        m1 = np.where(np.abs(c) > 1e-14, (-b + disc) / c, np.inf)
        m2 = np.where(np.abs(c) > 1e-14, (-b - disc) / c, -a / (2 * b))
    return m1, m2


def is_positive(gm, tol: float = 1e-12):
    """Isotropic directions on opposite sides of the real locus (neither real)."""
    m1, m2 = isotropic_slopes(gm)
    finite = np.isfinite(m1) & np.isfinite(m2)
    with np.errstate(invalid="ignore"):
        prod = np.imag(m1) * np.imag(m2)
    return finite & (prod < -tol)


def bicomplex_J(gm):
    """The endomorphism with J^2 = -id, g(J., J.) = g, rotating like +90 degrees on Riemannian metrics.

    Eigenvalue +i on the isotropic direction with negative imaginary slope.
    """
    gm = np.asarray(gm, dtype=complex)
    if not np.all(is_positive(gm)):
        raise GeometryError("metric is not positive")
    m1, m2 = isotropic_slopes(gm)
    lower = np.where(np.imag(m1) < 0, m1, m2)
    upper = np.where(np.imag(m1) < 0, m2, m1)
    ones = np.ones_like(lower)
    Pm = np.stack([np.stack([ones, ones], -1), np.stack([lower, upper], -1)], -2)
    D = np.zeros(Pm.shape, dtype=complex)
    D[..., 0, 0] = 1j
    D[..., 1, 1] = -1j
    return Pm @ D @ np.linalg.inv(Pm)


def positivity_and_J(metric: Callable, P):
    gm = metric(np.asarray(P, dtype=float))
    pos = is_positive(gm)
    if not np.all(pos):
        return pos, None
    return pos, bicomplex_J(gm)


def area_density(gm):
    """a = dA(d_0, d_1) with dA(V, W) = g(J V, W)."""
    J = bicomplex_J(gm)
    JV = J[..., :, 0]
    return np.einsum("...i,...ij->...j", JV, gm)[..., 1]


def area_form(gm, V, W):
    J = bicomplex_J(gm)
    return _bil(gm, np.einsum("...ij,...j->...i", J, V), W)


def gauss_bonnet_grid(metric: Callable, lo, hi, shape, h: float | None = None):
    """Midpoint-rule integral of K dA over the box [lo, hi] with `shape` cells.

    Cell centres next to a coordinate singularity (a pole of spherical
    coordinates) sit half a cell from it, and the nested curvature stencil
    reaches 4h, so by default h = min(FRAME_STEP, cell / 64).
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if h is None:
        h = min(FRAME_STEP, float(np.min((hi - lo) / np.asarray(shape))) / 64)
    axes = [lo[a] + (np.arange(shape[a]) + 0.5) * (hi[a] - lo[a]) / shape[a] for a in range(2)]
    P = np.stack(np.meshgrid(*axes, indexing="ij"), -1)
    K = curvature(metric, P, h)
    a = area_density(metric(P))
    cell = np.prod((hi - lo) / np.asarray(shape))
    return complex(np.sum(K * a) * cell)


def gauss_bonnet_nodes(metric: Callable, P, weights, h: float = FRAME_STEP):
    """Quadrature of K dA with explicit nodes and weights (weights include coordinate Jacobians)."""
    K = curvature(metric, P, h)
    a = area_density(metric(P))
    return complex(np.sum(K * a * weights))


# --- metrics from pairs of maps to CP^1 ---------------------------------------------

def metric_from_pair(f1: Callable, f2: Callable, h: float = FRAME_STEP, name="pair") -> ComplexMetric:
    """g = -4/(f1 - f2)^2 sym(df1 df2) for maps f_j from a planar chart to C."""

    def g(P):
        P = np.asarray(P, dtype=float)
        a, b = f1(P), f2(P)
        if np.any(np.abs(a - b) < 1e-12):
            raise GeometryError("the two maps collide")
        d1 = partials(f1, P, h)
        d2 = partials(f2, P, h)
        n = len(d1)
        out = np.empty(P.shape[:-1] + (n, n), dtype=complex)
        pref = -4.0 / (a - b) ** 2
        for i in range(n):
            for j in range(n):
                out[..., i, j] = pref * 0.5 * (d1[i] * d2[j] + d1[j] * d2[i])
        return out

    return ComplexMetric(g, 2, name=name)


def _zc(P):
    return P[..., 0] + 1j * P[..., 1]


def hyperbolic_half_plane() -> ComplexMetric:
    return ComplexMetric(diag_metric(lambda P: 1 / P[..., 1] ** 2, lambda P: 1 / P[..., 1] ** 2),
                         name="half-plane")


def poincare_disk() -> ComplexMetric:
    def f(P):
        return 4.0 / (1 - P[..., 0] ** 2 - P[..., 1] ** 2) ** 2

    return ComplexMetric(diag_metric(f, f), name="disk")


def negative_round_disk() -> ComplexMetric:
    """-4/(1+|z|^2)^2 dz dzbar."""
    def f(P):
        return -4.0 / (1 + P[..., 0] ** 2 + P[..., 1] ** 2) ** 2

    return ComplexMetric(diag_metric(f, f), name="neg-round")


def negative_sphere() -> ComplexMetric:
    """-(d theta^2 + sin^2 theta d phi^2) in coordinates (theta, phi)."""
    return ComplexMetric(diag_metric(lambda P: -np.ones(P.shape[:-1]), lambda P: -np.sin(P[..., 0]) ** 2),
                         name="neg-sphere", domain=((0, np.pi), (0, 2 * np.pi)))


def fermi_hyperbolic() -> ComplexMetric:
    """ds^2 + cosh^2 s dt^2 in coordinates (s, t): a hyperbolic metric invariant under t -> t + c."""
    return ComplexMetric(diag_metric(lambda P: np.ones(P.shape[:-1]), lambda P: np.cosh(P[..., 0]) ** 2),
                         name="fermi")


# --- landslide family ---------------------------------------------------------------

def fermi_regular_tensor(K0: float = 0.5):
    """An h-regular tensor for the Fermi metric: diag(1/c, c) in the frame (d_s, d_t/cosh s),
    c = sqrt(1 - K0 sech^2 s).  Returned in coordinates as a callable."""

    def b(P):
        s = P[..., 0]
        c = np.sqrt(1 - K0 / np.cosh(s) ** 2)
        out = np.zeros(P.shape[:-1] + (2, 2))
        out[..., 0, 0] = 1 / c
        out[..., 1, 1] = c
        return out

    return b


def fermi_J(P):
    """Complex structure of the Fermi metric in coordinates: J d_s = d_t/cosh s."""
    s = np.asarray(P)[..., 0]
    out = np.zeros(np.shape(P)[:-1] + (2, 2))
    out[..., 1, 0] = 1 / np.cosh(s)
    out[..., 0, 1] = -np.cosh(s)
    return out


def landslide_family(h: ComplexMetric, b: Callable, z: complex, Jh: Callable | None = None) -> ComplexMetric:
    """g_z = h(beta ., beta .) with beta = cos z id - sin z J b."""
    if Jh is None:
        def Jh(P):
            return np.real(bicomplex_J(h(P)))

    def beta(P):
        return np.cos(z) * np.eye(2) - np.sin(z) * np.einsum("...ij,...jk->...ik", Jh(P), b(P))

    def g(P):
        B = beta(P)
        return np.einsum("...ai,...ab,...bj->...ij", B, h(P), B)

    return ComplexMetric(g, 2, name=f"landslide({z})", meta={"z": complex(z)})


def regular_tensor_residuals(h: ComplexMetric, b: Callable, P, fd: float = FRAME_STEP):
    """(self-adjointness, |det b - 1|, Codazzi) residuals of b with respect to h."""
    P = np.asarray(P, dtype=float)
    bb = np.asarray(b(P), dtype=complex)
    sa = float(np.max(self_adjoint_residual(h(P), bb)))
    det = float(np.max(np.abs(np.linalg.det(bb) - 1)))
    cod = float(np.max(np.abs(codazzi_tensor(h, lambda Q: np.asarray(b(Q), dtype=complex), P, fd))))
    return sa, det, cod


# --- genus-2 test surface ------------------------------------------------------------

def octagon_vertex_radius() -> float:
    """Euclidean radius of the vertices of the regular octagon with angles pi/4 in the disk."""
    rho = np.arccosh(1 / np.tan(np.pi / 8) ** 2)
    return float(np.tanh(rho / 2))


def octagon_side_circle(k: int):
    """Center and radius of the circle containing side k (between vertices k and k+1)."""
    R = octagon_vertex_radius()
    a0 = 2 * np.pi * k / 8
    v1 = R * np.exp(1j * a0)
    mid = np.exp(1j * (a0 + np.pi / 8))
    # circle orthogonal to the unit circle centered on the ray through mid: |c|^2 = 1 + rad^2
    # and passing through v1: |c - v1| = rad
    # c = d * mid, d^2 = 1 + rad^2, |d mid - v1|^2 = rad^2 -> d^2 - 2 d Re(conj(mid) v1) + R^2 = rad^2
    proj = (np.conj(mid) * v1).real
    d = (1 + R ** 2) / (2 * proj)
    return d * mid, np.sqrt(d ** 2 - 1)


def octagon_pairing(k: int):
    """Mobius matrix gluing side k+4 onto the opposite side k.

    It is the hyperbolic translation along the diameter through the two side
    midpoints.  Opposite-side gluing of this octagon gives a closed genus-2
    surface with all vertices identified.
    """
    c, r = octagon_side_circle(k)
    u = c / abs(c)
    s_mid = abs(c) - r
    t = 2 * s_mid / (1 + s_mid ** 2)
    M = np.array([[1, t * u], [t * np.conj(u), 1]], dtype=complex)
    return M / np.sqrt(1 - t ** 2)


def mobius(M, z):
    return (M[0, 0] * z + M[0, 1]) / (M[1, 0] * z + M[1, 1])


def octagon_quadrature(n_ang: int = 48, n_rad: int = 64):
    """Polar Gauss-Legendre nodes and weights over the octagon (coordinates (x, y) in the disk)."""
    xa, wa = np.polynomial.legendre.leggauss(n_ang)
    xr, wr = np.polynomial.legendre.leggauss(n_rad)
    pts, wts = [], []
    for k in range(8):
        c, r = octagon_side_circle(k)
        a0 = 2 * np.pi * k / 8
        th = a0 + (xa + 1) * np.pi / 8
        wth = wa * np.pi / 8
        for t, wt in zip(th, wth):
            e = np.exp(1j * t)
            # boundary radius along the ray: |s e - c| = r, smaller root
            B = (np.conj(e) * c).real
            s_max = B - np.sqrt(B ** 2 - (abs(c) ** 2 - r ** 2))
            s = (xr + 1) * s_max / 2
            ws = wr * s_max / 2
            z = s * e
            pts.append(np.stack([z.real, z.imag], -1))
            wts.append(wt * ws * s)
    return np.concatenate(pts), np.concatenate(wts)


def smooth_bump(P, radius: float):
    r2 = (P[..., 0] ** 2 + P[..., 1] ** 2) / radius ** 2
    out = np.zeros(P.shape[:-1])
    inside = r2 < 1
    out[inside] = np.exp(1 - 1 / (1 - r2[inside]))
    return out


# --- conformal factors on the closed test surfaces -------------------------------------

def sphere_conformal_factor(rng, scale: float = 0.3) -> Callable:
    """exp(a . X) with X the unit-sphere point of (theta, phi) and a random complex a; smooth at the poles."""
    a = scale * (rng.normal(size=3) + 1j * rng.normal(size=3))

    def f(P):
        th, ph = P[..., 0], P[..., 1]
        X = np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], -1)
        return np.exp(X @ a)

    return f


def octagon_conformal_factor(rng, scale: float = 0.3) -> Callable:
    """exp(c bump) with the bump supported inside the octagon, so it descends to the glued surface."""
    c = scale * complex(rng.normal(), rng.normal())
    c0, r0 = octagon_side_circle(0)
    inradius = abs(c0) - r0
    radius = 0.75 * inradius
    centre = rng.uniform(-0.1, 0.1, 2)   # |centre| + radius stays below the inradius

    def f(P):
        return np.exp(c * smooth_bump(P - centre, radius))

    return f
