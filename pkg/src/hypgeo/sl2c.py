"""SL(2,C) as the complex quadric X_3, with its Killing-type metric.

Matrices are plain 2x2 complex numpy arrays.  Boundary points of H^3 are
elements of the Riemann sphere, encoded as Python complex numbers with
``INF`` standing for the point at infinity.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .minkowski import GeometryError, pseudo_quadric_embed

INF = complex(np.inf, 0.0)
BAND = 1e-9
I2 = np.eye(2, dtype=complex)

V1 = np.array([[1, 0], [0, -1]], dtype=complex)
V2 = np.array([[0, 1], [1, 0]], dtype=complex)
V3 = np.array([[0, -1j], [1j, 0]], dtype=complex)
BASIS = (V1, V2, V3)


def check_sl2(A, tol=1e-9) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.shape != (2, 2):
        raise GeometryError("expected a 2x2 matrix")
    if abs(np.linalg.det(A) - 1) > tol * max(1.0, np.abs(A).max() ** 2):
        raise GeometryError("determinant is not 1")
    return A


def check_traceless(V, tol=1e-9) -> np.ndarray:
    V = np.asarray(V, dtype=complex)
    if V.shape != (2, 2):
        raise GeometryError("expected a 2x2 matrix")
    if abs(np.trace(V)) > tol * max(1.0, np.abs(V).max()):
        raise GeometryError("matrix is not traceless")
    return V


def killing_inner(M, N) -> complex:
    """<M,N> = (tr(MN) - tr M tr N)/2, the polarization of -det on Mat(2,C)."""
    M = np.asarray(M, dtype=complex)
    N = np.asarray(N, dtype=complex)
    return complex(0.5 * (np.trace(M @ N) - np.trace(M) * np.trace(N)))


def F_iso(z) -> np.ndarray:
    """Linear isometry C^4 -> Mat(2,C) with det F(z) = -sum z_i^2."""
    z1, z2, z3, z4 = np.asarray(z, dtype=complex)
    return np.array([[-z1 - 1j * z4, -z2 - 1j * z3],
                     [-z2 + 1j * z3, z1 - 1j * z4]])


def F_iso_inverse(M) -> np.ndarray:
    M = np.asarray(M, dtype=complex)
    z1 = (M[1, 1] - M[0, 0]) / 2
    z4 = 1j * (M[0, 0] + M[1, 1]) / 2
    z2 = -(M[0, 1] + M[1, 0]) / 2
    z3 = 1j * (M[0, 1] - M[1, 0]) / 2
    return np.array([z1, z2, z3, z4])


def from_coords(c) -> np.ndarray:
    """Element of sl(2,C) with coordinates c in the basis V1, V2, V3."""
    c = np.asarray(c, dtype=complex)
    return c[0] * V1 + c[1] * V2 + c[2] * V3


def to_coords(V) -> np.ndarray:
    return np.array([killing_inner(V, B) for B in BASIS])


def cross(V, W) -> np.ndarray:
    """V x W = [V, W] / 2i."""
    V = np.asarray(V, dtype=complex)
    W = np.asarray(W, dtype=complex)
    return (V @ W - W @ V) / 2j


def bracket(V, W) -> np.ndarray:
    return np.asarray(V) @ np.asarray(W) - np.asarray(W) @ np.asarray(V)


def sq_norm(V) -> complex:
    return killing_inner(V, V)


def norm(V) -> complex:
    """Principal square root of <V,V> (real part >= 0)."""
    return complex(np.sqrt(sq_norm(V)))


def cross_norm_residual(V, W) -> float:
    """| ||[V,W]||^2 - (-4||V||^2||W||^2 + 4<V,W>^2) |."""
    lhs = sq_norm(bracket(V, W))
    rhs = -4 * sq_norm(V) * sq_norm(W) + 4 * killing_inner(V, W) ** 2
    return float(abs(lhs - rhs))


def sl2_exp(V) -> np.ndarray:
    """cosh(s) I + sinh(s)/s V with s^2 = <V,V>; even in s, so branch free."""
    V = check_traceless(V)
    q = sq_norm(V)
    if abs(q) < 1e-16:
        # series in q: sinh(s)/s = 1 + q/6, cosh(s) = 1 + q/2
        return (1 + q / 2) * I2 + (1 + q / 6) * V
    s = np.sqrt(q)
    return np.cosh(s) * I2 + np.sinh(s) / s * V


def ad(g, V) -> np.ndarray:
    g = np.asarray(g, dtype=complex)
    return g @ np.asarray(V) @ np.linalg.inv(g)


def psl_equal(A, B, tol=1e-9) -> bool:
    A = np.asarray(A)
    B = np.asarray(B)
    return bool(min(np.abs(A - B).max(), np.abs(A + B).max()) < tol)


def mobius(A, z):
    """Action of a 2x2 matrix on the Riemann sphere."""
    (a, b), (c, d) = np.asarray(A, dtype=complex)
    z = complex(z)
    if np.isinf(z.real) or np.isinf(z.imag):
        return INF if abs(c) < 1e-300 else a / c
    den = c * z + d
    if abs(den) < 1e-300:
        return INF
    return (a * z + b) / den


def chordal(z, w) -> float:
    """Chordal distance on the Riemann sphere (diameter 2)."""
    def proj(u):
        u = complex(u)
        if np.isinf(u.real) or np.isinf(u.imag):
            return np.array([0.0, 0.0, 1.0])
        r2 = abs(u) ** 2
        return np.array([2 * u.real, 2 * u.imag, r2 - 1]) / (r2 + 1)
    return float(np.linalg.norm(proj(z) - proj(w)))


def pair_distance(p, q, ordered=True) -> float:
    d = max(chordal(p[0], q[0]), chordal(p[1], q[1]))
    if ordered:
        return d
    return min(d, max(chordal(p[0], q[1]), chordal(p[1], q[0])))


# --- classification -----------------------------------------------------------

KINDS = ("identity", "elliptic", "parabolic", "hyperbolic", "loxodromic")


@dataclass(frozen=True)
class Classification:
    kind: str
    boundary: bool = False

    def __eq__(self, other):
        if isinstance(other, str):
            return self.kind == other
        return isinstance(other, Classification) and self.kind == other.kind


def _dist_to_lattice(x: float, step: float) -> float:
    return abs(x - step * round(x / step))


def classify_tangent(V, band: float = BAND) -> Classification:
    """Isometry type of exp(V) in PSL(2,C), read off from ||V||.

    Inputs whose norm lies within `band` of a lower-dimensional stratum are
    snapped to it and flagged as boundary cases.
    """
    V = check_traceless(V)
    scale = np.abs(V).max()
    if scale < band:
        return Classification("identity", boundary=scale > 0)
    q = sq_norm(V)
    if abs(q) < band:
        return Classification("parabolic", boundary=q != 0)
    s = np.sqrt(q)
    re, im = abs(s.real), s.imag
    d_im = _dist_to_lattice(im, np.pi)
    if re < band:
        if d_im < band:
            # ||V|| in i pi Z: exp(V) = +-I, trivial in PSL
            return Classification("identity", boundary=True)
        return Classification("elliptic", boundary=re > 0)
    if d_im < band:
        return Classification("hyperbolic", boundary=d_im > 0)
    return Classification("loxodromic")


def classify_element(A, band: float = BAND) -> Classification:
    """Isometry type of A in PSL(2,C) from its trace."""
    A = check_sl2(A)
    if psl_equal(A, I2, band):
        return Classification("identity", boundary=not (np.array_equal(A, I2) or np.array_equal(A, -I2)))
    t = complex(np.trace(A))
    if abs(t * t - 4) < band:
        return Classification("parabolic", boundary=t * t != 4)
    if abs(t.imag) < band:
        kind = "elliptic" if abs(t.real) < 2 else "hyperbolic"
        return Classification(kind, boundary=t.imag != 0)
    return Classification("loxodromic")


def classify(X, band: float = BAND) -> Classification:
    """Dispatch: traceless input is treated as a Lie algebra element, otherwise as a group element."""
    X = np.asarray(X, dtype=complex)
    if abs(np.trace(X)) < 1e-12 and abs(np.linalg.det(X) - 1) > 1e-9:
        return classify_tangent(X, band)
    return classify_element(X, band)


# --- axis and fixed points -----------------------------------------------------

def axis(V):
    """Oriented axis of exp(tV) as a pair of boundary points (source, target).

    V is rescaled to W = V/(i||V||), which has determinant 1, and the fixed
    points of z -> (az+b)/(cz-a) are read off as ((a+i)/c, (a-i)/c), with the
    equivalent forms -b/(a-i), -b/(a+i) used when c is small.  With the
    principal root for ||V||, the target is the attracting fixed point of
    exp(V) whenever Re ||V|| > 0.  For rotations (||V|| imaginary, on the
    branch cut of the root) there is no attracting point; W = V/|V| is used
    instead, which leaves a V of determinant 1 unchanged.
    """
    V = check_traceless(V)
    if abs(sq_norm(V)) < BAND:
        raise GeometryError("axis is undefined for isotropic V")
    nv = norm(V)
    W = V / abs(nv) if abs(nv.real) < BAND else V / (1j * nv)
    a, b, c = W[0, 0], W[0, 1], W[1, 0]
    out = []
    for sgn in (1, -1):
        num, alt = a + sgn * 1j, a - sgn * 1j
        if abs(c) > 1e-300 and abs(c) >= abs(alt):
            out.append(num / c)
        elif abs(alt) > 1e-300:
            out.append(-b / alt)
        else:
            out.append(INF)
    return tuple(_snap_inf(z) for z in out)


def _snap_inf(z, big=1e12):
    return INF if abs(z) > big else complex(z)


def _kernel_point(M):
    """Point of CP^1 spanned by the kernel of a rank one 2x2 matrix."""
    r = int(np.argmax(np.abs(M).sum(axis=1)))
    v = np.array([-M[r, 1], M[r, 0]])
    if abs(v[1]) < 1e-14 * abs(v[0]):
        return INF
    return _snap_inf(v[0] / v[1])


def boundary_fixed_points(A):
    """Fixed points on the Riemann sphere of A != +-I.

    Parabolic elements return a single point (the image of A - mu I, which
    equals its kernel).  Otherwise returns (repelling, attracting); for
    elliptic elements the order follows the eigenvalue modulus convention.
    """
    A = check_sl2(A)
    if psl_equal(A, I2, BAND):
        raise GeometryError("the identity has no isolated fixed points")
    t = complex(np.trace(A))
    disc = np.sqrt(t * t - 4)
    mus = ((t + disc) / 2, (t - disc) / 2)
    if abs(t * t - 4) < BAND:
        mu = t / 2
        N = A - mu * I2
        col = int(np.argmax(np.abs(N).sum(axis=0)))
        v = N[:, col]
        return (INF if abs(v[1]) < 1e-14 * abs(v[0]) else _snap_inf(v[0] / v[1]),)
    mu_big, mu_small = sorted(mus, key=abs, reverse=True)
    attracting = _kernel_point(A - mu_big * I2)
    repelling = _kernel_point(A - mu_small * I2)
    return (repelling, attracting)


# --- embeddings ----------------------------------------------------------------

_MODEL_SPLIT = {"H3": 3, "SL2R": 2, "SU2": 0}


def embed(model: str, x) -> np.ndarray:
    """Totally geodesic copies of H^3, AdS^3 and -S^3 inside SL(2,C).

    x lies on the quadric {<x,x> = -1} of signature (3,1), (2,2) or (0,4).
    The image is the F_iso image of the corresponding point of X_3.
    """
    if model not in _MODEL_SPLIT:
        raise GeometryError(f"unknown model {model!r}; expected one of {sorted(_MODEL_SPLIT)}")
    return F_iso(pseudo_quadric_embed(x, _MODEL_SPLIT[model]))


def model_inner(model: str, u, v) -> float:
    m1 = _MODEL_SPLIT[model]
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return float(u[:m1] @ v[:m1] - u[m1:] @ v[m1:])


def embed_isometry_residual(model: str, x, u, v, h: float = 1e-5) -> float:
    """Compare <dF u, dF v> (central differences) with the quadric metric."""
    x = np.asarray(x, dtype=float)

    def d(w):
        return (F_iso(_lin(model, x + h * w)) - F_iso(_lin(model, x - h * w))) / (2 * h)

    return float(abs(killing_inner(d(u), d(v)) - model_inner(model, u, v)))


def _lin(model, x):
    z = np.asarray(x, dtype=complex).copy()
    z[_MODEL_SPLIT[model]:] *= 1j
    return z


def unitarity_residual(A) -> float:
    A = np.asarray(A)
    return float(np.abs(A.conj().T @ A - I2).max())


def is_H3_slice(A, tol=1e-12) -> bool:
    """a, d real and c = conj(b)."""
    A = np.asarray(A)
    return bool(abs(A[0, 0].imag) < tol and abs(A[1, 1].imag) < tol and abs(A[1, 0] - np.conj(A[0, 1])) < tol)


def random_sl2(rng, scale: float = 1.0) -> np.ndarray:
    c = scale * (rng.normal(size=3) + 1j * rng.normal(size=3))
    return sl2_exp(from_coords(c))


def random_tangent(rng, scale: float = 1.0) -> np.ndarray:
    return from_coords(scale * (rng.normal(size=3) + 1j * rng.normal(size=3)))
