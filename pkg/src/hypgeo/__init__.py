"""Geometry of hypersurfaces in hyperbolic space through their Gauss maps.

Submodules:
    minkowski        bilinear forms, hyperboloid and complex quadric
    geodesic_space   unit tangent bundle, space of geodesics, para-Kahler data
    hypersurface     immersions, shape operators, Gauss maps, kappa
    integrability    holonomy, flat lifts, reconstruction, Maslov form
    complex_metric   complex metrics, curvature, positivity, Gauss-Bonnet
    frame_integrator immersion data and the frame ODE into X_{n+1}
    sl2c             SL(2,C) as isometries of H^3
    flows            normal flows on grid surfaces
    cli              the `hypgeo` command
"""
from .minkowski import GeometryError

__version__ = "0.1.0"
__all__ = ["GeometryError", "__version__"]
