"""Verification suites run by `hypgeo verify`.

Each suite checks one invariant of one module on random samples and
returns the worst residual together with a per-sample table.  A suite
passes when the residual is below its tolerance.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import complex_metric as cm
from . import frame_integrator as fi
from . import geodesic_space as gs
from . import hypersurface as hs
from . import integrability as ig
from . import minkowski as mk
from . import sl2c
from .flows import FlowState, flow_step, run_flow


@dataclass
class Context:
    samples: int = 20
    dim: int = 3       # dimension of the hyperbolic space
    seed: int = 0

    def rng(self):
        return np.random.default_rng(self.seed)


@dataclass
class Suite:
    name: str
    module: str
    invariant: str
    tol: float
    run: Callable          # Context -> (residual, rows)
    columns: tuple = ("sample", "residual")
    uses_dim: bool = False


REGISTRY: dict[str, Suite] = {}


def suite(name, module, invariant, tol, columns=("sample", "residual"), uses_dim=False):
    def deco(fn):
        REGISTRY[name] = Suite(name, module, invariant, tol, fn, tuple(columns), uses_dim)
        return fn
    return deco


def _worst(rows, col=-1):
    return max((float(r[col]) for r in rows), default=0.0)


def _chi_perp(ut, rng):
    """Random vector orthogonal to chi: horizontal plus vertical parts in the normal space of (x, v)."""
    E = gs.orthonormal_complement(ut)
    a, b = rng.normal(size=(2, len(E)))
    return np.array([a @ E, b @ E])


# --- minkowski-core ---------------------------------------------------------------

@suite("hyperboloid-exp", "minkowski-core", "hyperboloid residual of exp outputs", 1e-10, uses_dim=True)
def _hyp_exp(ctx):
    rng = ctx.rng()
    rows = []
    for k in range(ctx.samples):
        ut = gs.random_unit_tangent(ctx.dim + 1, rng)
        y = mk.hyp_exp(ut.x, rng.uniform(0, 3) * ut.v)
        rows.append((k, abs(mk.mink(y, y) + 1)))
    return _worst(rows), rows


@suite("distance-metric", "minkowski-core", "hyp_distance symmetry and triangle inequality", 1e-9,
       uses_dim=True)
def _dist(ctx):
    rng = ctx.rng()
    rows = []
    for k in range(ctx.samples):
        x, y, z = (gs.random_unit_tangent(ctx.dim + 1, rng).x for _ in range(3))
        sym = abs(mk.hyp_distance(x, y) - mk.hyp_distance(y, x))
        tri = mk.hyp_distance(x, z) - mk.hyp_distance(x, y) - mk.hyp_distance(y, z)
        rows.append((k, max(sym, tri, 0.0)))
    return _worst(rows), rows


@suite("quadric-exp", "minkowski-core", "quadric_exp branch independence and group law", 1e-8, uses_dim=True)
def _quadric_exp(ctx):
    rng = ctx.rng()
    rows = []
    for k in range(ctx.samples):
        ut = gs.random_unit_tangent(ctx.dim + 1, rng)
        # the hyperboloid sits in X_n as the slice with last coordinate imaginary
        x = mk.pseudo_quadric_embed(ut.x, ctx.dim)
        v = ut.v.astype(complex)
        v[-1] *= 1j
        s, t = rng.uniform(-1, 1, 2)
        branch = float(np.abs(mk.quadric_exp(x, s * v, branch=0) - mk.quadric_exp(x, s * v, branch=1)).max())
        y = mk.quadric_exp(x, s * v)
        w = np.sinh(s) * x + np.cosh(s) * v      # v transported to y
        law = float(np.abs(mk.quadric_exp(x, (s + t) * v) - mk.quadric_exp(y, t * w)).max())
        rows.append((k, max(branch, law)))
    return _worst(rows), rows


@suite("embed-isometry", "minkowski-core", "pseudo_quadric_embed is isometric", 1e-6)
def _embed(ctx):
    rng = ctx.rng()
    rows = []
    for k in range(ctx.samples):
        model = ("H3", "SL2R", "SU2")[k % 3]
        m1 = {"H3": 3, "SL2R": 2, "SU2": 0}[model]
        sp = mk.BilinearSpace(4, m1, 4 - m1)
        q = 1.0
        while q > -0.05:
            x = rng.normal(size=4)
            q = mk.inner(x, x, sp)
        x = x / np.sqrt(-q)
        # two tangent vectors at x
        G = np.diag(sp.signs)
        u, v = rng.normal(size=(2, 4))
        u = u + (u @ G @ x) * x
        v = v + (v @ G @ x) * x
        rows.append((k, sl2c.embed_isometry_residual(model, x, u, v)))
    return _worst(rows), rows


# --- geodesic-space ----------------------------------------------------------------

@suite("flow-isometry", "geodesic-space", "the geodesic flow is an isometry of the para-Sasaki metric",
       1e-10, uses_dim=True)
def _flow_iso(ctx):
    rng = ctx.rng()
    rows = []
    for k in range(ctx.samples):
        ut = gs.random_unit_tangent(ctx.dim + 1, rng)
        X = _chi_perp(ut, rng) + rng.normal() * gs.chi(ut)
        Y = _chi_perp(ut, rng) + rng.normal() * gs.chi(ut)
        t = rng.uniform(-2, 2)
        ut_t = gs.geodesic_flow(ut, t)
        a = gs.sasaki_inner(gs.flow_differential(X, t), gs.flow_differential(Y, t), ut_t)
        rows.append((k, abs(a - gs.sasaki_inner(X, Y, ut)) / max(1.0, abs(a))))
    return _worst(rows), rows


@suite("omega-closed", "geodesic-space", "Omega is closed", 1e-4, uses_dim=True)
def _omega_closed(ctx):
    rng = ctx.rng()
    rows = []
    for k in range(ctx.samples):
        ut = gs.random_unit_tangent(ctx.dim + 1, rng, spread=0.5)
        X, Y, Z = (_chi_perp(ut, rng) for _ in range(3))
        rows.append((k, abs(gs.numeric_dOmega(ut, X, Y, Z))))
    return _worst(rows), rows


@suite("isometry-equivariance", "geodesic-space", "isometries preserve g, J and Omega", 1e-9, uses_dim=True)
def _equivariance(ctx):
    rng = ctx.rng()
    rows = []
    for k in range(ctx.samples):
        ut = gs.random_unit_tangent(ctx.dim + 1, rng, spread=0.5)
        A = gs.random_lorentz(ctx.dim + 1, rng, 0.5)
        X, Y = (gs.TangentOfG(ut, _chi_perp(ut, rng)) for _ in range(2))
        ut2 = ut.transform(A)
        X2 = gs.TangentOfG(ut2, (A @ X.vector.T).T)
        Y2 = gs.TangentOfG(ut2, (A @ Y.vector.T).T)
        g1, JX1, om1 = gs.parakahler(X, Y)
        g2, JX2, om2 = gs.parakahler(X2, Y2)
        dJ = float(np.abs((A @ JX1.vector.T).T - JX2.vector).max())
        scale = max(1.0, abs(g1), abs(om1))
        rows.append((k, max(abs(g1 - g2), abs(om1 - om2), dJ) / scale))
    return _worst(rows), rows


def _split_orthonormal_pair(ut, rng):
    """X, Y orthogonal to chi and to each other with Sas(X, X), Sas(Y, Y) = +-1.

    Built as hyperbolic rotations of horizontal and vertical lifts of
    orthonormal directions, so the vectors stay of moderate Euclidean size.
    """
    E = gs.orthonormal_complement(ut)
    s, t = rng.uniform(-1, 1, 2)
    if len(E) == 1:
        e = E[0]
        return (np.array([np.cosh(s) * e, np.sinh(s) * e]),
                np.array([np.sinh(s) * e, np.cosh(s) * e]))
    Q, _ = np.linalg.qr(rng.normal(size=(len(E), len(E))))
    R, _ = np.linalg.qr(rng.normal(size=(len(E), len(E))))
    a, c = Q[:, 0] @ E, Q[:, 1] @ E
    b, d = R[:, 0] @ E, R[:, 1] @ E
    return (np.array([np.cosh(s) * a, np.sinh(s) * b]),
            np.array([np.cosh(t) * c, np.sinh(t) * d]))


@suite("curvature-form", "geodesic-space", "d omega equals the pull-back of Omega by the projection",
       1e-5, uses_dim=True)
def _curvature_form(ctx):
    rng = ctx.rng()
    rows = []
    for k in range(ctx.samples):
        ut = gs.random_unit_tangent(ctx.dim + 1, rng, spread=0.5)
        X, Y = _split_orthonormal_pair(ut, rng)
        lhs = gs.numeric_domega(ut, X, Y, h=1e-4)
        rows.append((k, abs(lhs - gs.omega_form(X, Y, ut))))
    return _worst(rows), rows


@suite("horosphere-eigenspace", "geodesic-space", "the Gauss lift of a horosphere spans one J eigenspace",
       1e-8)
def _horosphere(ctx):
    rng = ctx.rng()
    rows = []
    imm = hs.horosphere(2)
    for k in range(ctx.samples):
        u = rng.uniform(-1, 1, 2)
        ut = hs.gauss_lift(imm, u)
        Z = hs.dzeta(imm, u)
        H = [gs.horizontal_part(Z[..., i], ut) for i in range(2)]
        # both columns must share one eigenvalue
        worst = min(max(np.abs(gs.J(X) - s * X).max() for X in H) for s in (1, -1))
        rows.append((k, worst))
    return _worst(rows), rows


# --- hypersurface ------------------------------------------------------------------

def _catalog_mix(rng, small_only: bool = False):
    kind = rng.integers(4)
    if small_only and kind == 1:
        kind = 0
    if kind == 0:
        r = rng.uniform(0.1, 2.0)
        return hs.r_cap(r), f"r-cap {r:.3f}"
    if kind == 1:
        r = rng.uniform(0.3, 2.0)
        return hs.sphere(r), f"sphere {r:.3f}"
    a = rng.uniform(0.2, 3.0)
    return hs.graph(lambda u, a=a: a * hs.default_graph_height(u)), f"graph x{a:.3f}"


@suite("small-curvature", "hypersurface", "small principal curvatures iff the Gauss metric is positive",
       0.5, columns=("sample", "surface", "small", "positive", "mismatch"))
def _small(ctx):
    rng = ctx.rng()
    rows = []
    for k in range(ctx.samples):
        imm, label = _catalog_mix(rng)
        u = rng.uniform(-0.3, 0.3, 2)
        lam = hs.principal_curvatures(imm, u)
        # stay off the boundary |lambda| = 1 where both answers are legitimate
        if np.min(np.abs(np.abs(lam) - 1)) < 1e-3:
            continue
        small = bool(np.all(np.abs(lam) < 1))
        pos = bool(np.all(np.linalg.eigvalsh(hs.gauss_fff(imm, u)) > 0))
        rows.append((k, label, small, pos, int(small != pos)))
    return _worst(rows), rows


@suite("zeta-orthogonal", "hypersurface", "the Gauss lift is orthogonal to the flow", 1e-8)
def _zeta_orth(ctx):
    rng = ctx.rng()
    rows = []
    for k in range(ctx.samples):
        imm, _ = _catalog_mix(rng)
        u = rng.uniform(-0.3, 0.3, 2)
        ut = hs.gauss_lift(imm, u)
        Z = hs.dzeta(imm, u)
        rows.append((k, max(abs(gs.connection_form(Z[..., i], ut)) for i in range(2))))
    return _worst(rows), rows


@suite("kappa-invariance", "hypersurface", "kappa is invariant under ambient isometries", 1e-9)
def _kappa_inv(ctx):
    rng = ctx.rng()
    rows = []
    for k in range(ctx.samples):
        imm, _ = _catalog_mix(rng, small_only=True)
        A = gs.random_lorentz(4, rng, 0.3)
        moved = hs.Immersion(lambda u, imm=imm, A=A: A @ imm.point(u), 2,
                             normal=lambda u, imm=imm, A=A: A @ imm.nu(u))
        u = rng.uniform(-0.3, 0.3, 2)
        rows.append((k, abs(hs.kappa(moved, u) - hs.kappa(imm, u))))
    return _worst(rows), rows


# --- integrability ----------------------------------------------------------------

def _graph():
    return hs.graph(hs.default_graph_height)


@suite("lift-orthogonality", "integrability", "solved lifts are orthogonal to the flow", 1e-6)
def _lift_orth(ctx):
    rng = ctx.rng()
    G = ig.gauss_immersion(_graph())
    rows = []
    for k in range(max(1, ctx.samples // 4)):
        a, b = rng.uniform(-0.4, 0.4, (2, 2))
        sol = ig.lift_solve(G, ig.LoopPath.segment(a, b))
        rows.append((k, sol.orthogonality(samples=50)))
    return _worst(rows), rows


@suite("holonomy-lift-independence", "integrability",
       "holonomy does not depend on the lift or the parametrization", 1e-6)
def _hol_indep(ctx):
    rng = ctx.rng()
    rows = []
    for k in range(max(1, ctx.samples // 4)):
        th = rng.uniform(0.3, 2.8)
        G = ig.constant_angle_curve(th, 1.0)
        loop = ig.LoopPath.segment([0.2], [1.2], deck=0)
        base = ig.loop_holonomy(G, loop)
        a = rng.uniform(0.1, 0.5)
        G2 = ig.relifted(G, lambda p, a=a: a * np.sin(2 * p[0]) + p[0] ** 2)
        rep = loop.reparametrized(lambda s, a=a: s + a / (2 * np.pi) * np.sin(2 * np.pi * s) * 0.9,
                                  lambda s, a=a: 1 + 0.9 * a * np.cos(2 * np.pi * s))
        rows.append((k, max(abs(ig.loop_holonomy(G2, loop) - base), abs(ig.loop_holonomy(G, rep) - base))))
    return _worst(rows), rows


@suite("contractible-holonomy", "integrability", "holonomy vanishes on contractible loops", 1e-6)
def _contractible(ctx):
    rng = ctx.rng()
    G = ig.gauss_immersion(_graph())
    rows = []
    for k in range(max(1, ctx.samples // 4)):
        c = rng.uniform(-0.2, 0.2, 2)
        rows.append((k, abs(ig.loop_holonomy(G, ig.LoopPath.circle(c, rng.uniform(0.05, 0.25))))))
    return _worst(rows), rows


@suite("maslov-holonomy", "integrability", "the Maslov integral equals the loop holonomy", 1e-4)
def _maslov(ctx):
    rng = ctx.rng()
    imm = _graph()
    G = ig.gauss_immersion(imm)
    rows = []
    for k in range(max(1, ctx.samples // 10)):
        loop = ig.LoopPath.circle(rng.uniform(-0.1, 0.1, 2), rng.uniform(0.1, 0.25))
        loop.panels = 8
        rows.append((k, abs(ig.maslov_integral(imm, loop) - ig.loop_holonomy(G, loop))))
    return _worst(rows), rows


# --- complex-metric ----------------------------------------------------------------

def _random_symmetric(rng):
    while True:
        A = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        g = A + A.T
        if abs(np.linalg.det(g)) > 0.1:
            return g


@suite("frame-orthonormal", "complex-metric", "every produced frame is orthonormal", 1e-10)
def _frames(ctx):
    rng = ctx.rng()
    rows = []
    for k in range(ctx.samples):
        g = _random_symmetric(rng)
        F = cm.orthonormal_frame(g)
        rows.append((k, float(np.abs(F.T @ g @ F - np.eye(2)).max())))
    return _worst(rows), rows


@suite("curvature-reseed", "complex-metric", "curvature does not depend on the frame", 1e-6)
def _reseed(ctx):
    rng = ctx.rng()
    rows = []
    metrics = [cm.hyperbolic_half_plane(), cm.negative_round_disk(), fi.landslide_data(0.3 + 0.2j).g]
    for k in range(ctx.samples):
        g = metrics[k % 3]
        P = np.array([rng.uniform(-0.3, 0.3), rng.uniform(0.5, 1.0)])
        rows.append((k, abs(cm.curvature(g, P) - cm.curvature(g, P, reseed=1))))
    return _worst(rows), rows


@suite("riemannian-curvature", "complex-metric", "curvature matches the classical value on Riemannian metrics",
       1e-4)
def _classical(ctx):
    rng = ctx.rng()
    rows = []
    metrics = [cm.hyperbolic_half_plane(), cm.poincare_disk(), cm.fermi_hyperbolic()]
    for k in range(ctx.samples):
        g = metrics[k % 3]
        P = np.array([rng.uniform(-0.3, 0.3), rng.uniform(0.3, 0.6)])
        rows.append((k, abs(cm.curvature(g, P) - cm.coordinate_curvature(g, P))))
    return _worst(rows), rows


@suite("conformal-gauss-bonnet", "complex-metric", "the Gauss-Bonnet integral is conformally invariant",
       1e-2, columns=("sample", "integral_re", "integral_im", "residual"))
def _conformal(ctx):
    rng = ctx.rng()
    g = cm.negative_sphere()
    shape = (64, 32)
    base = cm.gauss_bonnet_grid(g, (0, 0), (np.pi, 2 * np.pi), shape)
    rows = []
    for k in range(max(1, ctx.samples // 10)):
        val = cm.gauss_bonnet_grid(g.scaled(cm.sphere_conformal_factor(rng)), (0, 0), (np.pi, 2 * np.pi), shape)
        rows.append((k, val.real, val.imag, abs(val - base)))
    return _worst(rows), rows


@suite("bicomplex-compatibility", "complex-metric", "J preserves g", 1e-9)
def _jcompat(ctx):
    rng = ctx.rng()
    rows = []
    g = fi.landslide_data(0.3 + 0.2j).g
    for k in range(ctx.samples):
        P = rng.uniform(-0.5, 0.5, 2)
        gm = g(P)
        Jm = cm.bicomplex_J(gm)
        rows.append((k, float(np.abs(Jm.T @ gm @ Jm - gm).max())))
    return _worst(rows), rows


# --- frame-integrator ---------------------------------------------------------------

_FI_GRID = np.linspace(-0.5, 0.5, 9)


@suite("orthogonality-drift", "frame-integrator", "integrated frames stay complex orthogonal", 1e-8)
def _orth_drift(ctx):
    rows = []
    for k, z in enumerate((0, 0.4, 0.5j, 0.3 + 0.2j)):
        gi = fi.immersion_from_data(fi.landslide_data(z), _FI_GRID, _FI_GRID, base=(4, 4))
        rows.append((k, fi.orthogonality_drift(gi.Phi)))
    return _worst(rows), rows


@suite("left-translation", "frame-integrator", "integrations differing by a left translation agree", 1e-12)
def _left(ctx):
    rng = ctx.rng()
    d = fi.landslide_data(0.3 + 0.2j)
    om = fi.MaurerCartanField(d)
    a = fi.immersion_from_data(d, _FI_GRID, _FI_GRID, base=(4, 4), omega=om)
    rows = []
    for k in range(max(1, ctx.samples // 10)):
        A = fi.random_complex_orthogonal(4, rng)
        b = fi.immersion_from_data(d, _FI_GRID, _FI_GRID, base=(4, 4), omega=om, Phi0=A)
        rows.append((k, float(np.abs(A @ a.Phi - b.Phi).max())))
    return _worst(rows), rows


@suite("rk4-order", "frame-integrator", "halving RK4 steps shrinks the error about sixteen-fold", 1e-12,
       columns=("sample", "ratio", "residual"))
def _rk4(ctx):
    rows = []
    path = np.array([[-0.5, -0.5], [0.5, 0.5]])
    for k, z in enumerate((0, 0.4, 0.5j, 0.3 + 0.2j)):
        r = fi.rk4_order_ratio(fi.MaurerCartanField(fi.landslide_data(z)), path, base_steps=8)
        rows.append((k, r, max(0.0, 12 - r, r - 20)))
    return _worst(rows), rows


@suite("real-slice", "frame-integrator", "real-form data integrate into the matching real slice", 1e-6,
       columns=("sample", "form", "residual"))
def _real_slice(ctx):
    rows = []
    cases = [fi.landslide_data(0), fi.cosh_data(0.4), fi.cosh_data(0.4j)]
    for k, data in enumerate(cases):
        label, _ = fi.classify_real_form(data, np.array([[0.0, 0.0], [0.3, 0.2]]))
        kind = "real" if np.abs(data.psi(np.zeros(2)).imag).max() < 1e-12 else "imag"
        D = fi.real_form_conjugator(data, (0.0, 0.0), kind)
        om = fi.MaurerCartanField(data, ref_point=(0.0, 0.0))
        gi = fi.immersion_from_data(data, _FI_GRID, _FI_GRID, base=(4, 4), omega=om)
        S = np.einsum("ij,...j->...i", np.linalg.inv(D), gi.sigma)
        rows.append((k, label, float(np.abs(S.imag).max())))
    return _worst(rows), rows


# --- sl2c ------------------------------------------------------------------------------

@suite("ad-invariance", "sl2c", "the Killing form is Ad-invariant", 1e-10)
def _ad(ctx):
    rng = ctx.rng()
    rows = []
    for k in range(ctx.samples):
        g = sl2c.random_sl2(rng, 0.5)
        V, W = sl2c.random_tangent(rng), sl2c.random_tangent(rng)
        a = sl2c.killing_inner(sl2c.ad(g, V), sl2c.ad(g, W))
        b = sl2c.killing_inner(V, W)
        rows.append((k, abs(a - b) / max(1.0, abs(b))))
    return _worst(rows), rows


@suite("exp-agreement", "sl2c", "sl2_exp agrees with generic matrix exponentiation", 1e-10)
def _exp(ctx):
    from scipy.linalg import expm

    rng = ctx.rng()
    rows = []
    for k in range(ctx.samples):
        V = sl2c.random_tangent(rng)
        rows.append((k, float(np.abs(sl2c.sl2_exp(V) - expm(V)).max() / max(1.0, np.abs(expm(V)).max()))))
    return _worst(rows), rows


@suite("classify-agreement", "sl2c", "classification by trace agrees with classification by norm", 0.5,
       columns=("sample", "by_norm", "by_trace", "mismatch"))
def _classify(ctx):
    rng = ctx.rng()
    rows = []
    for k in range(ctx.samples):
        V = sample_tangent_by_kind(rng, k % 4)
        a = sl2c.classify_tangent(V)
        b = sl2c.classify_element(sl2c.sl2_exp(V))
        if a.boundary or b.boundary:
            continue
        rows.append((k, a.kind, b.kind, int(a.kind != b.kind)))
    return _worst(rows), rows


def sample_tangent_by_kind(rng, kind: int):
    """Random tangents concentrated on each conjugacy type (0 generic, 1 real norm, 2 elliptic, 3 parabolic)."""
    g = sl2c.random_sl2(rng, 0.5)
    if kind == 0:
        return sl2c.random_tangent(rng)
    if kind == 1:
        return sl2c.ad(g, rng.uniform(0.2, 3.0) * sl2c.V2 / np.sqrt(sl2c.sq_norm(sl2c.V2)))
    if kind == 2:
        return sl2c.ad(g, 1j * rng.uniform(0.2, 3.0) * sl2c.V1 / sl2c.norm(sl2c.V1))
    return sl2c.ad(g, complex(rng.normal(), rng.normal()) * (sl2c.V2 - 1j * sl2c.V3))


@suite("axis-span", "sl2c", "the axis depends only on the complex span", 1e-9)
def _axis(ctx):
    rng = ctx.rng()
    rows = []
    for k in range(ctx.samples):
        V = sl2c.random_tangent(rng)
        lam = complex(*rng.normal(size=2))
        p, q = sl2c.axis(V)
        p2, q2 = sl2c.axis(lam * V)
        rows.append((k, sl2c.pair_distance((p, q), (p2, q2), ordered=False)))
    return _worst(rows), rows


# --- flows ------------------------------------------------------------------------------

_FLOW_GRID = np.linspace(-0.5, 0.5, 21)


@suite("flow-hyperboloid", "flows", "geodesic stepping keeps points on the hyperboloid", 1e-10)
def _flow_hyp(ctx):
    rng = ctx.rng()
    st = FlowState.from_immersion(hs.r_cap(0.5), _FLOW_GRID, _FLOW_GRID)
    rows = []
    for k in range(max(1, ctx.samples // 4)):
        dt = rng.uniform(0.01, 0.3)
        rows.append((k, flow_step(st, 1.0, dt).hyperboloid_residual()))
    return _worst(rows), rows


@suite("flow-semigroup", "flows", "constant-speed steps compose", 1e-12)
def _semigroup(ctx):
    rng = ctx.rng()
    st = FlowState.from_immersion(_graph(), _FLOW_GRID, _FLOW_GRID)
    rows = []
    for k in range(max(1, ctx.samples // 4)):
        c, dt = rng.uniform(-1, 1), rng.uniform(0.01, 0.05)
        a = flow_step(flow_step(st, c, dt), c, dt)
        b = flow_step(st, c, 2 * dt)
        rows.append((k, float(np.abs(a.sigma - b.sigma).max())))
    return _worst(rows), rows


@suite("flow-lagrangian", "flows", "the kappa-flow keeps the Gauss map Lagrangian", 1e-5)
def _flow_lag(ctx):
    st = FlowState.from_immersion(_graph(), _FLOW_GRID, _FLOW_GRID)
    out = run_flow(st, "kappa", 1e-3, 10)
    rows = [(k, d["lagrangian_residual"]) for k, d in enumerate(out.diagnostics)]
    return _worst(rows), rows


# --- running ---------------------------------------------------------------------------

def run_suite(name: str, ctx: Context, tol: float | None = None) -> dict:
    s = REGISTRY[name]
    residual, rows = s.run(ctx)
    limit = s.tol if tol is None else tol
    return {
        "suite": name,
        "module": s.module,
        "invariant": s.invariant,
        "dim": ctx.dim if s.uses_dim else None,
        "samples": len(rows),
        "residual": float(residual),
        "tol": limit,
        "pass": bool(residual < limit),
        "columns": list(s.columns),
        "rows": rows,
    }
