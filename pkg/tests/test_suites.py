import pytest

from hypgeo.suites import REGISTRY, Context, run_suite

MODULES = {"minkowski-core", "geodesic-space", "hypersurface", "integrability", "complex-metric",
           "frame-integrator", "sl2c", "flows"}


def test_every_module_has_a_suite():
    assert {s.module for s in REGISTRY.values()} == MODULES


@pytest.mark.parametrize("name", sorted(REGISTRY))
def test_suite_passes(name):
    r = run_suite(name, Context(samples=8, dim=3, seed=3))
    assert r["pass"], (name, r["residual"], r["tol"])
    assert len(r["rows"]) >= 1


@pytest.mark.parametrize("dim", [2, 4])
@pytest.mark.parametrize("name", sorted(n for n, s in REGISTRY.items() if s.uses_dim))
def test_dimension_aware_suites(name, dim):
    assert run_suite(name, Context(samples=6, dim=dim, seed=5))["pass"]


def test_tolerance_override():
    r = run_suite("hyperboloid-exp", Context(samples=4, dim=3, seed=0), tol=1e-300)
    assert not r["pass"] and r["tol"] == 1e-300
