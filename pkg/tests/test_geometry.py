import math

import pytest

from soliton_lab import catalog, conformal, geometry, profiles
from soliton_lab.curvature import MetricAnsatz
from soliton_lab.errors import BadSeed, NotSimpleRoot, Unclassifiable
from soliton_lab.profiles import Polynomial


def _s1(b0=1.0, c=1.0):
    return MetricAnsatz(Polynomial([1, 0, -c]), Polynomial([b0, 0, c]), conformal.HomogeneousClosed(1, b0))


@pytest.mark.parametrize("b0,seed,want", [(1.0, (0.2, 1.0), "a"), (-0.25, (0.0, 1.0), "b"),
                                          (0.0, (0.0, 1.0), "d")])
def test_s1_domain_classes(b0, seed, want):
    region = geometry.compute_domain(_s1(b0), seed)
    got, why = geometry.classify_domain(region)
    assert got == want, why


def test_schwarzschild_single_ray():
    m = MetricAnsatz(Polynomial([1, 0, 1, -1]), Polynomial([1, 0, -1]), conformal.Affine(1, 0))
    got, _ = geometry.classify_domain(geometry.compute_domain(m, (0.5, 0.2)))
    assert got == "d"


def test_non_homogeneous_reports_points():
    m = MetricAnsatz(Polynomial([1, 0, 0, -1]), Polynomial([1, 0, 0, -1]), conformal.Affine(1, 1, 1))
    region = geometry.compute_domain(m, (0.3, 0.2), box=1.0, n=41)
    got, _ = geometry.classify_domain(region)
    assert got == "other" and region.zero_points


def test_bad_seed():
    with pytest.raises(BadSeed):
        geometry.compute_domain(_s1(), (2.0, 1.0))


def test_vertical_lengths():
    r = geometry.path_length(_s1(c=1.0), geometry.Curve.vertical(0.5), 1.0, math.inf)
    assert r.finite
    r0 = geometry.path_length(_s1(c=0.0), geometry.Curve.vertical(0.5), 1.0, math.inf)
    assert not r0.finite and r0.kind == "log" and r0.r2 > 0.99


def test_length_reparametrization_invariant():
    m = _s1()
    a = geometry.path_length(m, geometry.Curve.segment((0.1, 0.5), (0.4, 1.2)), 0.0, 1.0).value
    b = geometry.path_length(m, geometry.Curve.polyline([(0.1, 0.5), (0.25, 0.85), (0.4, 1.2)]),
                             0.0, 1.0).value
    c = geometry.path_length(m, geometry.Curve(lambda t: (0.1 + 0.3 * t * t, 0.5 + 0.7 * t * t)),
                             0.0, 1.0).value
    assert b == pytest.approx(a, rel=1e-8) and c == pytest.approx(a, rel=1e-8)


def test_radial_path_to_origin_diverges():
    r = geometry.path_length(_s1(), geometry.Curve.radial(0.1, 1.0), 1.0, 0.0, singular_end="end")
    assert not r.finite


def test_power_half_end_is_finite():
    m = MetricAnsatz(Polynomial([0, 1]), Polynomial([0, 1]), conformal.Separable(profiles.PowerLaw(1, 0.5)))
    r = geometry.path_length(m, geometry.Curve.horizontal(1.0), 1.0, 0.0, singular_end="end")
    assert r.finite


def test_cone_angles():
    assert geometry.cone_angle(Polynomial([1, 0, -1]), 1.0) == pytest.approx(2 * math.pi)
    assert geometry.cone_angle(Polynomial([0, 1]), 0.0) == pytest.approx(math.pi)
    with pytest.raises(NotSimpleRoot):
        geometry.cone_angle(Polynomial([0, 0, 1]), 0.0)
    with pytest.raises(NotSimpleRoot):
        geometry.cone_angle(Polynomial([1, 1]), 0.5)


def test_boundary_characters():
    m = MetricAnsatz(Polynomial([1, 0, 0, -1]), Polynomial([1, 0, 0, -1]), conformal.Affine(1, 1))
    assert geometry.boundary_character(m, (0.3, -0.3), (1, 1)).kind == "End"
    assert geometry.boundary_character(_s1(), (1.0, 0.5), (-1, 0)).kind == "SmoothCap"
    with pytest.raises(Unclassifiable):
        geometry.boundary_character(_s1(), (0.2, 0.5), (1, 0))


def test_sb_metric_boundary():
    spec = catalog.FamilySpec("SB")
    c = catalog.build_family(spec)
    probe = catalog._REGISTRY["SB"].probes(spec.resolved)[0]
    bc = geometry.boundary_character(c.m, probe.point, probe.inward)
    assert bc.kind == "MetricBoundary" and bc.exponent < 1
    assert max(abs(k) for _, k in bc.curvature) > 1e4
    assert bc.to_json()["kind"] == "MetricBoundary"
