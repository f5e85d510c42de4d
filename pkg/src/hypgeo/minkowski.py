"""Bilinear forms, the hyperboloid model, the complex quadric and boundary points.

Points live in ambient coordinates.  Real points of hyperbolic space sit on
the upper sheet of {<x,x> = -1} in R^{n+1,1}, where the last coordinate is
the timelike one.  Points of the complex quadric X_n sit on
{sum z_i^2 = -1} in C^{n+1}.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_TOL = 1e-9


class GeometryError(ValueError):
    """Raised when an input violates a geometric precondition."""


@dataclass(frozen=True)
class BilinearSpace:
    """R^dim with signature (p, q), or C^dim with the standard bilinear form."""

    dim: int
    p: int = 0
    q: int = 0
    complex_symmetric: bool = False

    def __post_init__(self):
        if self.dim <= 0:
            raise GeometryError("dimension must be positive")
        if not self.complex_symmetric and self.p + self.q != self.dim:
            raise GeometryError("signature must satisfy p + q = dim")

    @classmethod
    def minkowski(cls, dim: int) -> "BilinearSpace":
        return cls(dim, dim - 1, 1)

    @classmethod
    def complex(cls, dim: int) -> "BilinearSpace":
        return cls(dim, complex_symmetric=True)

    @property
    def signs(self) -> np.ndarray:
        if self.complex_symmetric:
            return np.ones(self.dim)
        return np.concatenate([np.ones(self.p), -np.ones(self.q)])

    def gram(self) -> np.ndarray:
        return np.diag(self.signs)


def inner(u, v, space: BilinearSpace | None = None):
    """Bilinear pairing sum eps_i u_i v_i (no conjugation, even over C).

    Without an explicit space the Minkowski form of matching dimension is used.
    Works on stacks of vectors along the last axis.
    """
    u = np.asarray(u)
    v = np.asarray(v)
    if u.shape[-1] != v.shape[-1]:
        raise GeometryError(f"dimension mismatch: {u.shape[-1]} vs {v.shape[-1]}")
    if space is None:
        space = BilinearSpace.minkowski(u.shape[-1])
    if space.dim != u.shape[-1]:
        raise GeometryError(f"vector length {u.shape[-1]} does not match space dim {space.dim}")
    return np.sum(space.signs * u * v, axis=-1)


def mink(u, v):
    """Minkowski pairing with the last coordinate timelike."""
    u = np.asarray(u)
    v = np.asarray(v)
    return np.sum(u[..., :-1] * v[..., :-1], axis=-1) - u[..., -1] * v[..., -1]


def cinner(u, v):
    """Standard complex bilinear form sum u_i v_i on C^N."""
    return np.sum(np.asarray(u) * np.asarray(v), axis=-1)


def minkowski_gram(N: int) -> np.ndarray:
    G = np.eye(N)
    G[-1, -1] = -1.0
    return G


def base_point(n_ambient: int) -> np.ndarray:
    """(0, ..., 0, 1) on the hyperboloid of R^{n_ambient-1,1}."""
    x = np.zeros(n_ambient)
    x[-1] = 1.0
    return x


def is_hyp_point(x, tol=DEFAULT_TOL) -> bool:
    x = np.asarray(x)
    return abs(mink(x, x) + 1) < tol and x[-1] > 0


def project_hyp(x) -> np.ndarray:
    """Renormalize a timelike vector onto the upper sheet."""
    x = np.asarray(x, dtype=float)
    q = mink(x, x)
    if q >= 0:
        raise GeometryError("vector is not timelike")
    y = x / np.sqrt(-q)
    return y if y[-1] > 0 else -y


def project_tangent(x, v) -> np.ndarray:
    """Minkowski-orthogonal projection of v onto T_x H."""
    return v + mink(x, v) * x


def hyp_exp(x, v, tol=DEFAULT_TOL) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    if abs(mink(x, v)) > tol:
        raise GeometryError("v is not tangent at x")
    nv = np.sqrt(max(mink(v, v), 0.0))
    if nv == 0.0:
        return x.copy()
    return np.cosh(nv) * x + np.sinh(nv) / nv * v


def hyp_distance(x, y) -> float:
    c = -mink(x, y)
    return float(np.arccosh(max(c, 1.0)))


def hyp_log(x, y) -> np.ndarray:
    """Tangent vector at x pointing to y with norm d(x, y)."""
    d = hyp_distance(x, y)
    if d < 1e-15:
        return np.zeros_like(np.asarray(x, dtype=float))
    u = np.asarray(y) + mink(x, y) * np.asarray(x)
    return d * u / np.sqrt(mink(u, u))


def _csqrt_branch(q, branch: int = 0):
    s = np.sqrt(complex(q))
    return -s if branch else s


def quadric_exp(z, v, tol=DEFAULT_TOL, branch: int = 0) -> np.ndarray:
    """Exponential map of X_n.  `branch` picks the square root; the result does not depend on it."""
    z = np.asarray(z, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if abs(cinner(z, v)) > tol:
        raise GeometryError("v is not tangent at z")
    q = cinner(v, v)
    if abs(q) < 1e-300:
        return z + v
    s = _csqrt_branch(q, branch)
    return np.cosh(s) * z + np.sinh(s) / s * v


def quadric_residual(z) -> float:
    return float(abs(cinner(z, z) + 1))


def boundary_endpoint(x, v, sign: int = 1, tol=DEFAULT_TOL) -> np.ndarray:
    """Endpoint at t -> sign*inf of the geodesic through x with velocity v, on the slice x_last = 1."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    if abs(mink(x, v)) > tol or abs(mink(v, v) - 1) > 1e3 * tol:
        raise GeometryError("v must be a unit tangent vector at x")
    w = x + sign * v
    return w / w[-1]


def normalize_boundary(w) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    return w / w[-1]


def pseudo_quadric_embed(x, m1: int, tol=DEFAULT_TOL) -> np.ndarray:
    """Send a point of the quadric {<x,x>_{m1, N-m1} = -1} into X_{N-1}.

    The first m1 coordinates are kept and the rest are multiplied by i.
    """
    x = np.asarray(x, dtype=float)
    sp = BilinearSpace(len(x), m1, len(x) - m1)
    if abs(inner(x, x, sp) + 1) > tol:
        raise GeometryError("point is not on the pseudo-Riemannian quadric")
    z = x.astype(complex)
    z[m1:] *= 1j
    return z


# --- X_1 as C^* -------------------------------------------------------------

def x1_chart(z) -> complex:
    """X_1 -> C^*, z -> z_2 - i z_1.  Sends (i cos w, i sin w) to e^{iw}."""
    z = np.asarray(z, dtype=complex)
    return complex(z[1] - 1j * z[0])


def x1_chart_inverse(w) -> np.ndarray:
    w = complex(w)
    # (z_2 - i z_1)(z_2 + i z_1) = z_1^2 + z_2^2 = -1
    a = -1.0 / w
    z2 = (w + a) / 2
    z1 = (a - w) / (2j)
    return np.array([z1, z2])


def x1_metric(w, dw1, dw2=None) -> complex:
    """Push-forward metric dw^2 / w^2 on C^*."""
    if dw2 is None:
        dw2 = dw1
    return complex(dw1) * complex(dw2) / complex(w) ** 2


def x1_geodesic(mu1, mu2, t):
    return mu1 * np.exp(t * mu2)
