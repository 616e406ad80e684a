import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from soliton_lab import conformal, curvature, kernels
from soliton_lab.curvature import CustomField, MetricAnsatz, ZeroField
from soliton_lab.profiles import Polynomial


def _hyperbolic():
    return MetricAnsatz(Polynomial([1.0]), Polynomial([1.0]), conformal.Affine(1.0, 1.0))


@settings(max_examples=20, deadline=None)
@given(st.lists(st.floats(-0.5, 0.5), min_size=3, max_size=3),
       st.lists(st.floats(-0.5, 0.5), min_size=3, max_size=3),
       st.floats(0.5, 2), st.floats(-1, 1))
def test_closed_form_ricci_matches_oracle(ca, cb, a, b):
    m = MetricAnsatz(Polynomial([1.0] + ca), Polynomial([1.0] + cb), conformal.Affine(a, b, 2.0))
    x, y = 0.2, -0.1
    ric = curvature.ricci_closed_form(m, x, y).m
    ref = curvature.ricci_oracle(m, x, y).m
    assert np.max(np.abs(ric - ref)) < 1e-5 * max(1.0, np.max(np.abs(ric)))


def test_hyperbolic_is_einstein():
    # q = x + y with unit profiles: sectional curvature -2
    m = _hyperbolic()
    for x, y in ((0.3, 0.2), (1.0, 2.0)):
        ric = curvature.ricci_closed_form(m, x, y).m
        g = curvature.metric_components(m, x, y).m
        np.testing.assert_allclose(ric, -6.0 * g, atol=1e-12)
        assert curvature.scalar_curvature(m, x, y) == pytest.approx(-24.0, abs=1e-6)


def test_lie_derivative_matches_flow():
    m = MetricAnsatz(Polynomial([1, 0, 0, -1]), Polynomial([1, 0, 0, -1]), conformal.Affine(1, 1))
    V = CustomField(lambda x, y: (math.sin(x * y), x + y * y))
    a = curvature.lie_derivative(m, V, 0.3, 0.2).m
    b = curvature.lie_derivative_flow(m, V, 0.3, 0.2).m
    assert np.max(np.abs(a - b)) < 1e-6


def test_zero_field_has_no_lie_derivative():
    m = _hyperbolic()
    assert curvature.lie_derivative(m, ZeroField(), 0.4, 0.5).norm() == 0.0


def test_riemann_kernels_agree():
    rng = np.random.default_rng(1)
    n = 50
    g = rng.random((n, 4, 4))
    g = g + g.transpose(0, 2, 1) + 8 * np.eye(4)
    dg = rng.random((n, 4, 4, 4))
    dg = dg + dg.transpose(0, 1, 3, 2)
    ddg = rng.random((n, 4, 4, 4, 4))
    ddg = ddg + ddg.transpose(0, 1, 2, 4, 3)
    ddg = ddg + ddg.transpose(0, 2, 1, 3, 4)
    r1, c1 = kernels.riemann(g, dg, ddg, use_jit=True)
    r2, c2 = kernels.riemann(g, dg, ddg, use_jit=False)
    np.testing.assert_allclose(r1, r2, atol=1e-12)
    np.testing.assert_allclose(c1, c2, atol=1e-12)


def test_star_kernels_agree():
    rng = np.random.default_rng(2)
    z, f, f1, f2 = rng.uniform(-1, 1, (4, 200))
    f = f + 2
    a = kernels.star_f3_batch(1.0, 0.5, -2.0, z, f, f1, f2, use_jit=True)
    b = kernels.star_f3_batch(1.0, 0.5, -2.0, z, f, f1, f2, use_jit=False)
    np.testing.assert_allclose(a, b, rtol=1e-12)


def test_weyl_traceless_and_flat():
    m = MetricAnsatz(Polynomial([1, 0, -1]), Polynomial([1, 0, 1]), conformal.HomogeneousClosed(1, 1))
    wp, wm = curvature.weyl_spectra(m, 0.2, 0.7)
    assert abs(sum(wp)) < 1e-8 and abs(sum(wm)) < 1e-8
    flat = MetricAnsatz(Polynomial([1.0]), Polynomial([1.0]), conformal.HomogeneousClosed(1, 1))
    wp, wm = curvature.weyl_spectra(flat, 0.2, 0.7)
    assert max(map(abs, wp + wm)) < 1e-6


def test_double_eigenvalue_gap():
    assert curvature.has_double_eigenvalue((-1.0, -1.0 + 1e-8, 2.0))
    assert not curvature.has_double_eigenvalue((-1.0, 0.0, 1.0))


def test_sym_tensor_json():
    T = curvature.SymTensor4.diag(1.0, 2.0, 3.0, 4.0, xy=0.5)
    obj = T.to_json()
    assert obj is not None and T.norm() > 0
