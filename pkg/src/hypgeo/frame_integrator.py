"""Integration of immersion data (g, Psi) into X_{n+1} through the frame ODE Phi' = Phi omega.

Block layout of omega along a coordinate direction a, with X_j the
Gram-Schmidt frame of g and theta its coframe:

    omega[:n, :n]   connection matrix, nabla_a X_j = sum_k omega[k, j] X_k
    omega[i, n]     =  Psi^i(d_a),   omega[n, j]   = -Psi^j(d_a)
    omega[i, n+1]   = -i theta^i(d_a), omega[n+1, j] = i theta^j(d_a)

The immersion is sigma = i Phi v_{n+2}.  With this layout Phi v_{n+1} has
differential dsigma o Psi, so Psi is the shape operator with respect to the
normal nu = -Phi v_{n+1} (dsigma o Psi = -d nu).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .complex_metric import (
    FRAME_STEP,
    ComplexMetric,
    _structure,
    gc_residuals,
    orthonormal_frame,
    partials,
    self_adjoint_residual,
)
from .minkowski import GeometryError

REORTH_EVERY = 16
# the flatness identity is d omega + [omega, omega] = 0 read as
# d_a omega_b - d_b omega_a + BRACKET_COEFF * (omega_a omega_b - omega_b omega_a) = 0
BRACKET_COEFF = 1.0


@dataclass
class ImmersionData:
    g: ComplexMetric
    Psi: Callable
    n: int = 2
    name: str = "data"
    meta: dict = field(default_factory=dict)

    def psi(self, P):
        return np.asarray(self.Psi(np.asarray(P, dtype=float)), dtype=complex)

    def check(self, P, tol: float = 1e-6):
        P = np.asarray(P, dtype=float)
        sa = float(np.max(self_adjoint_residual(self.g(P), self.psi(P))))
        if sa > tol:
            raise GeometryError(f"Psi is not g-self-adjoint (residual {sa:.2e})")
        return gc_residuals(self.g, self.psi, P)


def zero_shape(n: int = 2):
    def Psi(P):
        P = np.asarray(P)
        return np.zeros(P.shape[:-1] + (n, n), dtype=complex)

    return Psi


def scalar_shape(c: complex, n: int = 2):
    def Psi(P):
        P = np.asarray(P)
        return c * np.broadcast_to(np.eye(n), P.shape[:-1] + (n, n)).astype(complex)

    return Psi


def landslide_data(z: complex, K0: float = 0.5) -> ImmersionData:
    """(g_z, 0) for the Fermi hyperbolic metric and its regular tensor; curvature -1, invariant under t -> t + c."""
    from .complex_metric import fermi_hyperbolic, fermi_J, fermi_regular_tensor, landslide_family

    g = landslide_family(fermi_hyperbolic(), fermi_regular_tensor(K0), z, fermi_J)
    return ImmersionData(g, zero_shape(2), name=f"landslide({complex(z)})", meta={"z": complex(z), "K0": K0})


def cosh_data(z: complex) -> ImmersionData:
    """(cosh^2(z) h, tanh(z) id) on the Fermi hyperbolic metric."""
    from .complex_metric import fermi_hyperbolic

    c2 = np.cosh(z) ** 2
    g = fermi_hyperbolic().scaled(lambda P: c2 * np.ones(np.shape(P)[:-1]), name=f"cosh2({z})")
    return ImmersionData(g, scalar_shape(np.tanh(z)), name=f"cosh({complex(z)})", meta={"z": complex(z)})


# --- Maurer-Cartan field ------------------------------------------------------------

class MaurerCartanField:
    """omega_a(P) for each coordinate direction a, built from immersion data."""

    def __init__(self, data: ImmersionData, h: float = FRAME_STEP, ref_point=None):
        self.data = data
        self.h = h
        self.n = data.n
        # square-root signs are pinned at a reference point so the frame field is continuous
        P0 = np.zeros(self.n) if ref_point is None else np.asarray(ref_point, dtype=float)
        _, roots, rs = orthonormal_frame(data.g(P0), return_roots=True)
        self._ref = roots
        self._reseed = rs

    def frame(self, P):
        P = np.asarray(P, dtype=float)
        return orthonormal_frame(self.data.g(P), ref_roots=self._ref, reseed=self._reseed)

    def __call__(self, P):
        """Array of shape (..., n, n+2, n+2): one matrix per coordinate direction."""
        P = np.asarray(P, dtype=float)
        n = self.n
        F, Finv, c, Gam = _structure(self.data.g, P, self.h, self._ref, self._reseed)
        theta = Finv  # theta^i(d_a) = Finv[i, a]
        # omega_a[k, j] = sum_i theta^i(d_a) Gamma_ij^k
        A = np.einsum("...ia,...ijk->...akj", theta, Gam)
        psi = np.einsum("...ij,...ja->...ia", Finv, self.data.psi(P))  # Psi^i(d_a)
        out = np.zeros(P.shape[:-1] + (n, n + 2, n + 2), dtype=complex)
        out[..., :n, :n] = A
        out[..., :n, n] = np.swapaxes(psi, -1, -2)
        out[..., n, :n] = -np.swapaxes(psi, -1, -2)
        out[..., :n, n + 1] = -1j * np.swapaxes(theta, -1, -2)
        out[..., n + 1, :n] = 1j * np.swapaxes(theta, -1, -2)
        return out

    def along(self, P, d):
        """omega(d) at P for a direction vector d."""
        return np.einsum("...a,...aij->...ij", np.asarray(d, dtype=float), self(P))


def build_omega(data: ImmersionData, h: float = FRAME_STEP) -> MaurerCartanField:
    return MaurerCartanField(data, h)


def flatness_residual(omega: MaurerCartanField, P, h: float = FRAME_STEP) -> float:
    """sup over points and direction pairs of |d_a omega_b - d_b omega_a + [omega_a, omega_b]|."""
    P = np.asarray(P, dtype=float)
    W = omega(P)
    dW = partials(omega, P, h)  # list over a of (..., b, N, N)
    n = omega.n
    worst = 0.0
    for a in range(n):
        for b in range(a + 1, n):
            Wa, Wb = W[..., a, :, :], W[..., b, :, :]
            R = dW[a][..., b, :, :] - dW[b][..., a, :, :] + BRACKET_COEFF * (Wa @ Wb - Wb @ Wa)
            worst = max(worst, float(np.max(np.abs(R))))
    return worst


# --- integration -----------------------------------------------------------------------

def complex_gram_schmidt(Phi) -> np.ndarray:
    """Re-orthonormalize the columns of Phi (batched) for the complex bilinear form.

    Phi is assumed close to orthogonal, so every square root is taken on the
    branch through 1.
    """
    Phi = np.array(Phi, dtype=complex, copy=True)
    N = Phi.shape[-1]
    for k in range(N):
        w = Phi[..., :, k].copy()
        for j in range(k):
            w = w - np.sum(Phi[..., :, j] * w, -1)[..., None] * Phi[..., :, j]
        s = np.sqrt(np.sum(w * w, -1))
        s = np.where(np.abs(s - 1) > np.abs(s + 1), -s, s)
        Phi[..., :, k] = w / s[..., None]
    return Phi


def orthogonality_drift(Phi) -> float:
    Phi = np.asarray(Phi)
    return float(np.max(np.abs(np.swapaxes(Phi, -1, -2) @ Phi - np.eye(Phi.shape[-1]))))


def integrate_frame(omega: MaurerCartanField, path, Phi0, substeps: int = 1,
                    reorth_every: int = REORTH_EVERY, return_all: bool = True):
    """RK4 for Phi' = Phi omega(path') along a polyline.

    `path` has shape (M, ..., n); extra axes integrate a batch of paths at
    once, with Phi0 of shape (..., N, N).  Each segment is traversed in
    `substeps` steps with linear interpolation.  Returns the frames at the
    polyline vertices, shape (M, ..., N, N).
    """
    path = np.asarray(path, dtype=float)
    Phi = np.array(np.broadcast_to(Phi0, path.shape[1:-1] + np.shape(Phi0)[-2:]), dtype=complex)
    out = [Phi.copy()]
    steps = 0
    W_prev = None  # omega (all directions) at the current node, reused across steps
    for p0, p1 in zip(path[:-1], path[1:]):
        d = (p1 - p0) / substeps
        for k in range(substeps):
            a = p0 + d * k
            Wa_full = omega(a) if W_prev is None else W_prev
            Wc_full = omega(a + d)
            Wa = np.einsum("...a,...aij->...ij", d, Wa_full)
            Wb = omega.along(a + 0.5 * d, d)
            Wc = np.einsum("...a,...aij->...ij", d, Wc_full)
            W_prev = Wc_full
            k1 = Phi @ Wa
            k2 = (Phi + 0.5 * k1) @ Wb
            k3 = (Phi + 0.5 * k2) @ Wb
            k4 = (Phi + k3) @ Wc
            Phi = Phi + (k1 + 2 * k2 + 2 * k3 + k4) / 6
            steps += 1
            if reorth_every and steps % reorth_every == 0:
                Phi = complex_gram_schmidt(Phi)
        if reorth_every:
            # every returned frame is projected back onto the orthogonal group
            Phi = complex_gram_schmidt(Phi)
        out.append(Phi.copy())
    return np.array(out) if return_all else out[-1]


def sigma_from_frame(Phi) -> np.ndarray:
    """i Phi v_{n+2}."""
    return 1j * np.asarray(Phi)[..., :, -1]


def normal_from_frame(Phi) -> np.ndarray:
    """nu = -Phi v_{n+1}, the normal for which Psi is the shape operator."""
    return -np.asarray(Phi)[..., :, -2]


@dataclass
class GridImmersion:
    xs: np.ndarray
    ys: np.ndarray
    Phi: np.ndarray  # (len(xs), len(ys), N, N)

    @property
    def sigma(self):
        return sigma_from_frame(self.Phi)

    @property
    def nu(self):
        return normal_from_frame(self.Phi)


def immersion_from_data(data: ImmersionData, xs, ys, Phi0=None, base=(0, 0), substeps: int = 1,
                        omega: MaurerCartanField | None = None, order: str = "spine-x") -> GridImmersion:
    """Integrate over a rectangular grid: a spine through `base` along one axis, then all ribs
    along the other axis as one batch."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    N = data.n + 2
    if Phi0 is None:
        Phi0 = np.eye(N, dtype=complex)
    if omega is None:
        omega = MaurerCartanField(data, ref_point=(xs[base[0]], ys[base[1]]))
    if order == "spine-y":
        res = _integrate_grid(_SwappedField(omega), ys, xs, Phi0, (base[1], base[0]), substeps)
        return GridImmersion(xs, ys, np.swapaxes(res, 0, 1))
    if order != "spine-x":
        raise ValueError(f"unknown order {order!r}")
    return GridImmersion(xs, ys, _integrate_grid(omega, xs, ys, Phi0, base, substeps))


def _integrate_grid(omega, xs, ys, Phi0, base, substeps):
    nx, ny = len(xs), len(ys)
    N = np.shape(Phi0)[-1]
    i0, j0 = base
    Phi = np.zeros((nx, ny, N, N), dtype=complex)

    def line(a, b):
        return np.stack([a, b], -1)

    fw = integrate_frame(omega, line(xs[i0:], np.full(nx - i0, ys[j0])), Phi0, substeps)
    bw = integrate_frame(omega, line(xs[i0::-1], np.full(i0 + 1, ys[j0])), Phi0, substeps)
    Phi[i0:, j0] = fw
    Phi[:i0 + 1, j0] = bw[::-1]
    spine = Phi[:, j0].copy()
    X = np.broadcast_to(xs[None, :], (ny, nx))
    Yup = np.broadcast_to(ys[j0:, None], (ny - j0, nx))
    up = integrate_frame(omega, line(X[: ny - j0], Yup), spine, substeps)  # (ny-j0, nx, N, N)
    Ydn = np.broadcast_to(ys[j0::-1, None], (j0 + 1, nx))
    dn = integrate_frame(omega, line(X[: j0 + 1], Ydn), spine, substeps)
    Phi[:, j0:] = np.swapaxes(up, 0, 1)
    Phi[:, :j0 + 1] = np.swapaxes(dn[::-1], 0, 1)
    return Phi


class _SwappedField:
    """omega with the two coordinates exchanged (for integrating with the spine along y)."""

    def __init__(self, omega):
        self.omega = omega
        self.n = omega.n

    def __call__(self, P):
        return self.omega(np.asarray(P)[..., ::-1])[..., ::-1, :, :]

    def along(self, P, d):
        P = np.asarray(P)[..., ::-1]
        d = np.asarray(d)[..., ::-1]
        return self.omega.along(P, d)


# --- round-trip diagnostics ------------------------------------------------------------

def _grid_d4(F, spacing, axis):
    """Fourth-order central difference along a grid axis (interior points only, 2-point margin)."""
    F = np.moveaxis(F, axis, 0)
    D = (F[:-4] - 8 * F[1:-3] + 8 * F[3:-1] - F[4:]) / (12 * spacing)
    return np.moveaxis(D, 0, axis)


def complex_normal(dsig, sigma):
    """Unit vector (for the complex bilinear form) orthogonal to sigma and to the columns of dsig."""
    N = sigma.shape[-1]
    M = np.concatenate([dsig, sigma[..., :, None], np.zeros(sigma.shape + (1,), dtype=complex)], -1)
    c = np.empty(sigma.shape, dtype=complex)
    for i in range(N):
        M[..., :, -1] = 0
        M[..., i, -1] = 1
        c[..., i] = np.linalg.det(M)
    q = np.sum(c * c, -1)
    return c / np.sqrt(q)[..., None]


def round_trip_residuals(data: ImmersionData, grid: GridImmersion):
    """Compare the pull-back metric and shape operator of the integrated sigma with (g, Psi).

    Derivatives of sigma and of its normal are taken by fourth-order finite
    differences on the grid, so this check does not reuse omega.
    """
    xs, ys = grid.xs, grid.ys
    hx, hy = xs[1] - xs[0], ys[1] - ys[0]
    S = grid.sigma
    Sx = _grid_d4(S, hx, 0)[:, 2:-2]
    Sy = _grid_d4(S, hy, 1)[2:-2, :]
    Sc = S[2:-2, 2:-2]
    dsig = np.stack([Sx, Sy], -1)  # (nx', ny', N, 2)
    gpull = np.einsum("...ka,...kb->...ab", dsig, dsig)
    P = np.stack(np.meshgrid(xs[2:-2], ys[2:-2], indexing="ij"), -1)
    g = data.g(P)
    metric_res = float(np.max(np.abs(gpull - g)))
    nu = complex_normal(dsig, Sc)
    ref = grid.nu[2:-2, 2:-2]
    sgn = np.sign(np.real(np.sum(nu * ref, -1)))
    nu_full = np.zeros_like(S)
    nu_full[2:-2, 2:-2] = nu * sgn[..., None]
    # normal on the full grid needed for derivatives; recompute on the inner block only
    inner = nu_full[2:-2, 2:-2]
    Nx = _grid_d4(inner, hx, 0)[:, 2:-2]
    Ny = _grid_d4(inner, hy, 1)[2:-2, :]
    dnu = np.stack([Nx, Ny], -1)
    dsig2 = dsig[2:-2, 2:-2]
    g2 = gpull[2:-2, 2:-2]
    # dsig B = -dnu  =>  B = g^{-1} dsig^T (-dnu)
    rhs = -np.einsum("...ka,...kb->...ab", dsig2, dnu)
    B = np.linalg.solve(g2, rhs)
    Psi = data.psi(P[2:-2, 2:-2])
    shape_res = float(np.max(np.abs(B - Psi)))
    return metric_res, shape_res


def path_independence(data: ImmersionData, xs, ys, substeps: int = 1) -> float:
    a = immersion_from_data(data, xs, ys, substeps=substeps, order="spine-x")
    b = immersion_from_data(data, xs, ys, substeps=substeps, order="spine-y")
    return float(np.max(np.abs(a.Phi - b.Phi)))


def rk4_order_ratio(omega: MaurerCartanField, path, Phi0=None, base_steps: int = 4) -> float:
    """Ratio of successive differences of endpoint frames under step halving (about 16 for RK4)."""
    path = np.asarray(path, dtype=float)
    N = omega.n + 2
    Phi0 = np.eye(N, dtype=complex) if Phi0 is None else Phi0
    ends = [integrate_frame(omega, path, Phi0, substeps=base_steps * 2 ** k, reorth_every=0,
                            return_all=False) for k in range(3)]
    d1 = np.max(np.abs(ends[0] - ends[1]))
    d2 = np.max(np.abs(ends[1] - ends[2]))
    return float(d1 / d2)


def random_complex_orthogonal(N: int, rng, scale: float = 0.5) -> np.ndarray:
    from scipy.linalg import expm

    A = rng.normal(scale=scale, size=(N, N)) + 1j * rng.normal(scale=scale, size=(N, N))
    return expm(A - A.T)


# --- monodromy and real forms ----------------------------------------------------------------

def monodromy(data: ImmersionData, start, deck_shift, n_steps: int = 64, substeps: int = 1,
              omega: MaurerCartanField | None = None) -> np.ndarray:
    """Phi(end) with Phi(start) = id along the straight deck path start -> start + deck_shift.

    For data invariant under the translation p -> p + deck_shift this is the
    holonomy of the integrated immersion on the deck generator.
    """
    start = np.asarray(start, dtype=float)
    shift = np.asarray(deck_shift, dtype=float)
    if omega is None:
        omega = MaurerCartanField(data, ref_point=start)
    probe = start + np.array([0.37, 0.11])[: start.size] * 0.1
    drift = float(np.max(np.abs(data.g(probe + shift) - data.g(probe))))
    if drift > 1e-9:
        raise GeometryError(f"data is not invariant under the deck translation (drift {drift:.2e})")
    if np.allclose(shift, 0):
        return np.eye(data.n + 2, dtype=complex)
    ts = np.linspace(0, 1, n_steps + 1)
    path = start + ts[:, None] * shift
    return integrate_frame(omega, path, np.eye(data.n + 2, dtype=complex), substeps, return_all=False)


def _is_real(A, tol):
    return bool(np.max(np.abs(np.imag(A))) < tol)


REAL_FORMS = {
    ((2, 0), "real"): "H",
    ((2, 0), "imag"): "AdS",
    ((1, 1), "real"): "AdS",
    ((1, 1), "imag"): "-dS",
    ((0, 2), "real"): "-dS",
    ((0, 2), "imag"): "-S",
}


def classify_real_form(data: ImmersionData, samples, tol: float = 1e-9):
    """Label in {H, AdS, -dS, -S, none} from the signature of g on real tangents and realness of Psi or i Psi.

    Returns (label, all_matches).  When Psi = 0 both realness tests pass and
    the first listed match is returned.
    """
    P = np.asarray(samples, dtype=float)
    g = data.g(P)
    if not _is_real(g, tol):
        return "none", []
    ev = np.linalg.eigvalsh(np.real(g))
    if np.any(np.abs(ev) < tol):
        raise GeometryError("degenerate signature at some sample")
    pos = np.sum(ev > 0, axis=-1)
    if not np.all(pos == pos.flat[0]):
        raise GeometryError("signature changes across the samples")
    sig = (int(pos.flat[0]), data.n - int(pos.flat[0]))
    Psi = data.psi(P)
    matches = []
    for kind, ok in (("real", _is_real(Psi, tol)), ("imag", _is_real(1j * Psi, tol))):
        if ok and (sig, kind) in REAL_FORMS:
            matches.append(REAL_FORMS[(sig, kind)])
    return (matches[0] if matches else "none"), matches


def real_form_conjugator(data: ImmersionData, point, kind: str = "real") -> np.ndarray:
    """Diagonal D with D^{-1} omega D real for real-form data at the reference frame."""
    F = orthonormal_frame(data.g(np.asarray(point, dtype=float)))
    n = data.n
    d = np.ones(n + 2, dtype=complex)
    for j in range(n):
        d[j] = 1 if np.max(np.abs(np.imag(F[:, j]))) < 1e-12 else 1j
    d[n] = 1 if kind == "real" else 1j
    d[n + 1] = 1j
    return np.diag(d)


def normalize_to_real_form(mon, D) -> np.ndarray:
    return np.linalg.inv(D) @ mon @ D


def cauchy_riemann_residual(fun: Callable, z0: complex, h: float = 1e-3, grid: int = 5, spacing: float = 0.01):
    """max |d_x f + i d_y f| over a grid of centres around z0, central differences of step h."""
    offs = (np.arange(grid) - (grid - 1) / 2) * spacing
    worst = 0.0
    for a in offs:
        for b in offs:
            z = z0 + a + 1j * b
            fx = (fun(z + h) - fun(z - h)) / (2 * h)
            fy = (fun(z + 1j * h) - fun(z - 1j * h)) / (2 * h)
            worst = max(worst, float(np.max(np.abs(fx + 1j * fy))))
    return worst
