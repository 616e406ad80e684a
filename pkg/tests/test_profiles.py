import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from soliton_lab import profiles
from soliton_lab.errors import DomainError, InvalidSpec, NotPositive, UnsupportedOrder

coef = st.floats(-3, 3, allow_nan=False)


@given(st.lists(coef, min_size=1, max_size=5), st.floats(-2, 2))
def test_polynomial_derivatives_match_numpy(c, t):
    p = profiles.Polynomial(c)
    ref = np.polynomial.Polynomial(c)
    for k in range(5):
        assert float(p.deriv(t, k)) == pytest.approx(ref.deriv(k)(t), abs=1e-9)


def test_polynomial_degree_limit():
    with pytest.raises(InvalidSpec):
        profiles.Polynomial([1, 0, 0, 0, 0, 1])


def test_order_above_four_rejected():
    with pytest.raises(UnsupportedOrder):
        profiles.Polynomial([1, 1]).deriv(0.0, 5)


def test_power_law_domain():
    p = profiles.PowerLaw(2.0, 0.5)
    assert p.deriv(4.0, 0) == pytest.approx(4.0)
    with pytest.raises(DomainError):
        p.eval(-1.0)
    # integer powers extend to the whole line
    assert profiles.PowerLaw(1.0, 2).eval(-3.0) == pytest.approx(9.0)


def test_mu_pole():
    assert profiles.mu(0.8) == pytest.approx(2 * 0.64 / 0.6)
    with pytest.raises(InvalidSpec):
        profiles.mu(0.5)


@pytest.mark.parametrize("p", [
    profiles.PowerFamily(0.8, 1.0, 1.0),
    profiles.ExpAffine(1.0, 2.0, 0.5, slope=0.3),
    profiles.ExpSum([(1.0, 1.0), (0.3, -2.0)], k0=0.2, slope=-0.1),
    profiles.QuadraticShift(profiles.Polynomial([1, 0, -1]), 0.25),
    profiles.SqrtQuadratic(1.0, 2.0, 0.5),
])
def test_derivatives_by_differences(p):
    t, h = 0.7, 1e-4
    for k in range(4):
        fd = (p.deriv(t + h, k) - p.deriv(t - h, k)) / (2 * h)
        assert float(p.deriv(t, k + 1)) == pytest.approx(float(fd), rel=1e-6, abs=1e-7)


def test_positivity_window_polynomial():
    p = profiles.Polynomial([1, 0, -1])
    lo, hi = p.positivity_window(0.2)
    assert lo == pytest.approx(-1.0, abs=1e-12) and hi == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(NotPositive):
        p.positivity_window(2.0)


def test_positivity_window_scan():
    p = profiles.ExpAffine(-1.0, 1.0, 2.0)     # 2 - e^t > 0 for t < log 2
    lo, hi = p.positivity_window(0.0)
    assert math.isinf(lo) and hi == pytest.approx(math.log(2), abs=1e-9)


def test_tabulated_accuracy_and_orders():
    base = profiles.Polynomial([1, 0.5, -1, 0.2])
    tab = profiles.Tabulated.from_profile(base, np.linspace(-1, 1, 41))
    for t in (-0.73, 0.05, 0.91):
        for k in range(3):
            assert float(tab.deriv(t, k)) == pytest.approx(float(base.deriv(t, k)), abs=1e-9)
    with pytest.raises(UnsupportedOrder):
        tab.deriv(0.1, 3)
    approx = profiles.Tabulated.from_profile(base, np.linspace(-1, 1, 41), approximate=True)
    assert float(approx.deriv(0.1, 3)) == pytest.approx(1.2, abs=1e-2)


def test_tabulated_csv(tmp_path):
    path = tmp_path / "p.csv"
    t = np.linspace(0, 1, 6)
    np.savetxt(path, np.column_stack([t, t**2, 2 * t, 2 + 0 * t]), delimiter=",")
    tab = profiles.Tabulated.from_csv(path)
    assert float(tab.eval(0.55)) == pytest.approx(0.3025, abs=1e-12)


@settings(max_examples=25)
@given(st.lists(coef, min_size=1, max_size=5))
def test_json_roundtrip(c):
    p = profiles.Polynomial(c)
    q = profiles.from_json(p.to_json())
    assert float(q.eval(0.37)) == float(p.eval(0.37))


def test_json_roundtrip_nested():
    p = profiles.QuadraticShift(profiles.PowerFamily(0.7, 1.0, 2.0), -0.3)
    q = profiles.from_json(p.to_json())
    assert float(q.deriv(1.3, 2)) == float(p.deriv(1.3, 2))
