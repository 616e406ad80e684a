import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from soliton_lab import ode
from soliton_lab.errors import InvalidSpec, NotExtended, SingularDenominator


def test_consistency_roots():
    r1, r2 = ode.consistency_roots(1.0, 1.0, 1.0, 1.0)
    assert (r1, r2) == pytest.approx((1.0, 4.0))


@settings(max_examples=20, deadline=None)
@given(st.floats(0.5, 2), st.floats(0.2, 2), st.floats(-4, 2), st.floats(0.5, 2))
def test_root2_series_solves_equation(a0, b0, lam, f0):
    if abs(2 * b0 * f0 * f0 + lam) < 0.1:
        return
    p = np.polynomial.Polynomial(ode.root2_series(a0, b0, lam, f0))
    z = 0.01
    vals = [float(p.deriv(k)(z)) if k else float(p(z)) for k in range(4)]
    terms = ode.star_terms(a0, b0, lam, z, *vals[:3])
    r = ode.star_residual(a0, b0, lam, z, *vals)
    assert abs(r) <= 1e-9 * (1 + sum(abs(t) for t in terms))


def test_root2_series_undetermined():
    with pytest.raises(InvalidSpec):
        ode.root2_series(1.0, 1.0, -2.0, 1.0)


def test_manifold_solution_tracks_closed_form():
    sol = ode.integrate_star(1, 1, -2, (1.0, 0.0, 1.0), mode="series")
    z = np.linspace(-10, 10, 801)
    assert np.max(np.abs(sol.eval(z) - np.sqrt(1 + z * z))) < 1e-8
    assert sol.start["manifold_lambda"] == -2.0
    assert ode.closing_defect(sol, Z=10.0) < 1e-6


def test_closing_defect_needs_full_line():
    sol = ode.integrate_star(1, 1, 1, (1.0, 0.0, -1.0), mode="offset")
    with pytest.raises(NotExtended):
        ode.closing_defect(sol)


def test_root2_start_is_smooth_through_origin():
    ctl = ode.Controls(blowup=1e12)
    sol = ode.integrate_star(1, 1, -5, (1.0, 0.0, -2.0), controls=ctl)
    assert sol.start["mode"] == "series" and sol.start["root"] == 2
    assert sol.L1 == pytest.approx(-sol.L2, rel=1e-9)
    assert sol.is_concave()
    assert sol.residual_profile() < 1e-5
    # on both sides of the series radius the trajectory agrees with the series
    p = np.polynomial.Polynomial(sol.start["series"])
    for z in (0.5, 0.999, 1.001, 2.0):
        z *= ode.SERIES_RADIUS
        assert sol.derivs(z, 3)[3] == pytest.approx(float(p.deriv(3)(z)), abs=1e-7)
        assert float(sol.deriv(z, 2)) == pytest.approx(float(p.deriv(2)(z)), abs=1e-9)


def test_offset_mode_events():
    sol = ode.integrate_star(1, 1, 1, (1.0, 0.0, -1.0), mode="offset")
    assert sol.L1 < 0 < sol.L2
    kinds = {e.kind for e in sol.events}
    assert ode.ZERO in kinds and ode.BLOWUP in kinds
    assert sol.residual_profile() < 1e-4


def test_series_requires_root():
    with pytest.raises(InvalidSpec):
        ode.integrate_star(1, 1, 1, (1.0, 0.0, -1.0), mode="series")
    with pytest.raises(InvalidSpec):
        ode.integrate_star(-1, 1, 1, (1.0, 0.0, -1.0))
    with pytest.raises(InvalidSpec):
        ode.integrate_star(1, 1, 1, (1.0, 0.0, -1.0), mode="bogus")


def test_json_and_csv_roundtrip(tmp_path):
    sol = ode.integrate_star(1, 1, 1, (1.0, 0.0, -1.0), mode="offset")
    back = ode.OdeSolution.from_json(sol.to_json())
    assert back.L2 == sol.L2
    assert float(back.eval(0.003)) == float(sol.eval(0.003))
    path = tmp_path / "t.csv"
    sol.to_csv(path)
    nodes = ode.OdeSolution.read_csv_nodes(path)
    np.testing.assert_array_equal(nodes["f"], sol.nodes["f"])


def test_theta_variant_one():
    sol = ode.integrate_theta(1, -6.0, (1.0, 1.0, 0.1), t0=1.0)
    assert sol.param == "t"
    assert sol.residual_profile() < 1e-6


def test_theta_variant_two_leading_coefficient():
    # theta = sqrt(t) makes theta - 2 t theta' vanish
    with pytest.raises(SingularDenominator):
        ode.integrate_theta(2, 1.0, (1.0, 0.5, -0.25), t0=1.0)


def test_theta_exponential_negative_control():
    for t in (0.0, 0.7):
        e = math.exp(t)
        r = ode.star_star_residual(ode._ThetaPoint(e, e, e, e), 3.0, t)
        assert r == pytest.approx(-2 * math.exp(4 * t), rel=1e-12)


def test_theta_linear_is_hyperbolic():
    # theta = t solves the A = B = 1 equation with lambda = -6
    assert ode.star_star_residual(ode._ThetaPoint(0.8, 1.0, 0.0, 0.0), -6.0, 0.8) == 0.0


def test_shooting_keeps_two_zero_runs():
    hits = ode.shoot_boundary_solutions(1, 1, 1, 1.0, (-2.0, -0.5, 4))
    assert hits
    for f2, sol in hits:
        assert sol.L1 < 0 < sol.L2 and sol.is_concave()
