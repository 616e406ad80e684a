"""Named soliton families: constructors, expected behaviour, and a
verification driver that turns residuals and geometry into PASS/FAIL items.

Every family builds a SolitonCandidate (metric ansatz, plane vector field V,
lambda).  The expected lambda is a closed form in the family parameters and
is evaluated at build time, so parameter sweeps need no hard-coded numbers.
"""
import functools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import conformal, curvature, geometry, ode, profiles, soliton
from .curvature import CustomField, MetricAnsatz, PlaneVectorField, ZeroField
from .errors import DomainError, InvalidSpec, SolitonLabError
from .soliton import SolitonCandidate

FAMILIES = ("S0", "Schwarzschild", "S1", "SStar", "SB", "F_alpha", "StarStar", "S2",
            "StarStarBar", "CP", "ProductSolitons", "Gaussian")
# families whose metric is given in closed form (no ODE solve)
EXPLICIT = ("S0", "Schwarzschild", "S1", "F_alpha", "S2", "CP", "ProductSolitons", "Gaussian")

# tighter than the solver defaults: V of the ODE families is differentiated numerically
ODE_CONTROLS = {"rtol": 1e-13, "atol": 1e-14, "node_spacing": 0.002}

DEFAULT_TOLERANCES = {
    "full_tensor": 1e-8,
    # ODE-backed members carry interpolation error from the dense output
    "full_tensor_ode": 1e-6,
    "lambda": 1e-8,
    "lambda_ode": 1e-6,
    "relations": 1e-6,
    "relations_ode": 1e-5,
    # third derivatives of a numerically differentiated V
    "second_derivatives_ode": 1e-2,
}
# derivative relations checked against V; the scalar ones depend on the gauge
# of S and are reported but only enforced for explicit V
RELATION_KEYS = ("monge_ampere", "xy_relation", "xx_vs_ss", "yy_vs_tt", "coupling_pde",
                 "final_xx", "second_derivatives")


# ------------------------------------------------------------------ fields

class AffineRadialField(PlaneVectorField):
    """V = (u(t) + k)(x d_x + y d_y) with u = a log(x + y); t = x + y."""

    kind = "log_radial"

    def __init__(self, a, k):
        self.a, self.k = float(a), float(k)

    def evaluate(self, x, y):
        t = x + y
        if not t > 0:
            raise DomainError(f"log_radial field needs x + y > 0, got {t}")
        w = self.a * math.log(t) + self.k
        w1 = self.a / t
        J = np.array([[w + w1 * x, w1 * x], [w1 * y, w + w1 * y]])
        return w * x, w * y, J

    def to_json(self):
        return {"kind": self.kind, "a": self.a, "k": self.k}


class LinearField(PlaneVectorField):
    """V = (a x + b, c y + d)."""

    kind = "linear"

    def __init__(self, a, b, c, d):
        self.a, self.b, self.c, self.d = (float(v) for v in (a, b, c, d))

    def evaluate(self, x, y):
        return self.a * x + self.b, self.c * y + self.d, np.array([[self.a, 0.0], [0.0, self.c]])

    def to_json(self):
        return {"kind": self.kind, "coeffs": [self.a, self.b, self.c, self.d]}


class ProfileScaledField(PlaneVectorField):
    """V = w(x, y) (A(x) d_x, B(y) d_y) for a scalar w with known gradient."""

    kind = "profile_scaled"

    def __init__(self, A, B, w, label):
        self.A, self.B, self.w, self.label = A, B, w, label

    def evaluate(self, x, y):
        w, wx, wy = self.w(x, y)
        a0, a1 = (float(v) for v in self.A.derivs(x, 1))
        b0, b1 = (float(v) for v in self.B.derivs(y, 1))
        J = np.array([[a1 * w + a0 * wx, a0 * wy], [b0 * wx, b1 * w + b0 * wy]])
        return a0 * w, b0 * w, J

    def to_json(self):
        return {"kind": self.kind, "label": self.label}


def theta_field(sol, A, B, variant, lam):
    """V = (2 Theta - 2 theta theta') (A d_x + B d_y) with Theta from the
    algebraic relation; d/dt of the bracket is -2 theta theta''."""

    def w(x, y):
        t = x + y
        th, t1, t2 = (float(v) for v in sol.derivs(t, 2)[:3])
        big = ode.theta_aux(variant, lam, t, th, t1, t2)
        s1 = -2.0 * th * t2
        return 2.0 * big - 2.0 * th * t1, s1, s1

    return ProfileScaledField(A, B, w, f"theta-variant-{variant}")


def power_field(A, B, alpha):
    """V for the power-product family: A q^2/x (mu_a - 2a) d_x + B q^2/y (mu_b - 2b) d_y."""
    a, b = alpha, 1.0 - alpha
    ca = profiles.mu(a) - 2 * a
    cb = profiles.mu(b) - 2 * b

    def fn(x, y):
        q2 = x ** (2 * a) * y ** (2 * b)
        return float(A(x)) * q2 / x * ca, float(B(y)) * q2 / y * cb

    def jac(x, y):
        q2 = x ** (2 * a) * y ** (2 * b)
        Ax, A1 = (float(v) for v in A.derivs(x, 1))
        By, B1 = (float(v) for v in B.derivs(y, 1))
        gx = q2 / x * ca
        gy = q2 / y * cb
        return np.array([
            [A1 * gx + Ax * gx * (2 * a - 1) / x, Ax * gx * 2 * b / y],
            [By * gy * 2 * a / x, B1 * gy + By * gy * (2 * b - 1) / y],
        ])

    return CustomField(fn, jac=jac, label=f"power-product-{alpha}")


# ------------------------------------------------------------------ specs

@dataclass
class FamilySpec:
    family: str
    params: dict = field(default_factory=dict)
    #: lambda used for verification; None means the closed-form expectation
    lam: float = None

    def __post_init__(self):
        if self.family not in _REGISTRY:
            raise InvalidSpec(f"unknown family {self.family!r}; choose from {', '.join(FAMILIES)}")
        unknown = set(self.params) - set(_REGISTRY[self.family].defaults)
        if unknown:
            raise InvalidSpec(f"{self.family}: unknown parameters {sorted(unknown)}")

    @property
    def resolved(self):
        p = dict(_REGISTRY[self.family].defaults)
        p.update(self.params)
        return p

    def expected_lambda(self):
        return float(_REGISTRY[self.family].lam(self.resolved))

    def to_json(self):
        return {"family": self.family, "params": self.resolved, "lambda": self.lam}

    @classmethod
    def from_json(cls, obj):
        if "family" not in obj:
            raise InvalidSpec("family spec needs a 'family' field")
        return cls(obj["family"], dict(obj.get("params", {})), obj.get("lambda"))


@dataclass
class BoundaryProbe:
    label: str
    point: tuple
    inward: tuple
    expected: str


@dataclass
class _Family:
    defaults: dict
    lam: object
    build: object
    window: object
    seed: object = None
    domain: object = None
    probes: object = None
    explicit: bool = True


def _poly(*c):
    return profiles.Polynomial(list(c))


def _check(cond, family, msg):
    if not cond:
        raise InvalidSpec(f"{family}: {msg}")


# -- S0: q = c1 x + c2 y, cubic P
def _s0_build(p):
    c1, c2, a0, b0 = p["c1"], p["c2"], p["a0"], p["b0"]
    _check(c1 != 0 and c2 != 0, "S0", "c1 and c2 must be nonzero (c2 = 0 is Schwarzschild)")
    p0, p1, p2, p3 = p["P"]
    A = _poly(a0 - p0 / c1**2, -p1 / c1, -p2, -p3 * c1)
    B = _poly(b0 + p0 / c2**2, -p1 / c2, p2, -p3 * c2)
    return MetricAnsatz(A, B, conformal.Affine(c1, c2)), ZeroField()


def _s0_probes(p):
    c1, c2 = p["c1"], p["c2"]
    # a point on the zero line of q, moving into q > 0
    x0 = 0.3
    return [BoundaryProbe("q = 0", (x0, -c1 * x0 / c2), (c1, c2), "End")]


# -- Schwarzschild: q = c1 x
def _schw_build(p):
    c1, a0, k, mass, b0, b1 = p["c1"], p["a0"], p["k"], p["m"], p["b0"], p["b1"]
    _check(c1 != 0, "Schwarzschild", "c1 must be nonzero")
    A = _poly(a0, 0.0, k, -mass * c1)
    B = _poly(b0, b1, -k)
    return MetricAnsatz(A, B, conformal.Affine(c1, 0.0)), ZeroField()


# -- S1: A = a0 - c x^2, B = b0 + c y^2, q = sqrt(b0 x^2 + a0 y^2)
def _s1_build(p):
    a0, b0, c, ct = p["a0"], p["b0"], p["c"], p["ctilde"]
    _check(a0 > 0, "S1", "a0 must be positive")
    _check(c >= 0, "S1", "c must be non-negative")
    m = MetricAnsatz(_poly(a0, 0.0, -c), _poly(b0, 0.0, c), conformal.HomogeneousClosed(a0, b0))
    if b0 == 0:
        return m, ZeroField()
    # the sign of the arctan term is fixed by matching; ctilde is a free Killing shift
    V, _ = soliton.fit_arctan_killing(a0, b0, c, m, points=_s1_fit_points(p))
    return m, curvature.ArctanKilling(a0, b0, c, ct, V.eps)


def _s1_fit_points(p):
    (x0, x1), (y0, y1) = _s1_window(p)
    return ((x0 + 0.3 * (x1 - x0), y0 + 0.4 * (y1 - y0)), (x0 + 0.7 * (x1 - x0), y0 + 0.6 * (y1 - y0)))


def _s1_window(p):
    a0, b0, c = p["a0"], p["b0"], p["c"]
    # constant profiles (c = 0) have no A = 0 edge; use a unit scale
    xa = math.sqrt(a0 / c) if c > 0 else 1.0
    if b0 >= 0:
        return (-xa, xa), (0.2 * xa, 2.0 * xa)
    yb = math.sqrt(-b0 / c) if c > 0 else math.sqrt(-b0 / a0)
    # keep |b0| x^2 < a0 y^2 across the window
    y0 = 1.5 * yb
    xm = min(xa, 0.9 * y0 * math.sqrt(a0 / -b0))
    return (-xm, xm), (y0, y0 + 2.0 * xa)


def _s1_domain(p):
    b0 = p["b0"]
    return "a" if b0 > 0 else ("b" if b0 < 0 else "d")


def _s1_probes(p):
    a0, c = p["a0"], p["c"]
    if p["b0"] <= 0 or c == 0:
        return []
    xa = math.sqrt(a0 / c)
    kind = "SmoothCap" if abs(geometry.cone_angle(_poly(a0, 0.0, -c), xa) - 2 * math.pi) < 1e-6 \
        else "EdgeSingularity"
    return [BoundaryProbe("A = 0", (xa, 0.5 * xa), (-1.0, 0.0), kind)]


# -- ODE-backed homogeneous families
def _star_solution(p):
    return _star_cached(p["a0"], p["b0"], p["lam"], p["f0"], p["f1"], p["f2"], p["mode"],
                        p["eps"], p["blowup"])


@functools.lru_cache(maxsize=32)
def _star_cached(a0, b0, lam, f0, f1, f2, mode, eps, blowup):
    ctl = ode.Controls(blowup=blowup, eps=eps, **ODE_CONTROLS)
    return ode.integrate_star(a0, b0, lam, (f0, f1, f2), mode=mode, controls=ctl)


def _star_build(p):
    _check(p["a0"] > 0, "SStar", "a0 must be positive")
    sol = _star_solution(p)
    q = conformal.HomogeneousFromF(sol)
    m = MetricAnsatz(_poly(p["a0"], 0.0, -p["c"]), _poly(p["b0"], 0.0, p["c"]), q)
    V = soliton.vector_from_resolvent(m, soliton.FromResolvent(m, p["lam"], removable=True))
    return m, V


def _star_window(p):
    sol = _star_solution(p)
    xa = math.sqrt(p["a0"] / p["c"]) if p["c"] > 0 else 1.0
    lo, hi = sol.interval
    # keep x / y inside the solution interval: |x| < s y with a margin
    s = 0.9 * min(-lo, hi, 10.0)
    y0, y1 = 0.2, 2.2
    x = min(0.75 * xa, s * (y0 + 0.3 * (y1 - y0)) / 0.6 * 0.9)
    return (-x, x), (y0, y1)


def _sb_domain(p):
    return "b"


def _sb_probes(p):
    sol = _star_solution(p)
    L = sol.L2
    n = math.hypot(1.0, L)
    return [BoundaryProbe("q = 0 (z = L2)", (L, 1.0), (-1.0 / n, L / n), "MetricBoundary")]


# -- power product
def _f_build(p):
    al = p["alpha"]
    _check(al not in (0.0, 0.5, 1.0), "F_alpha", "alpha must avoid 0, 1/2 and 1")
    A = profiles.PowerFamily(al, p["c"], p["k1"])
    B = profiles.PowerFamily(1.0 - al, -p["c"], p["k2"])
    return MetricAnsatz(A, B, conformal.PowerProduct(al)), power_field(A, B, al)


def _f_window(p):
    return (0.2, 2.0), (0.05, 0.95)


# -- theta(x + y) families
def _theta_solution(p, variant):
    return _theta_cached(variant, p["lam"], tuple(p["start"]), p["t0"], p["t_lo"], p["t_hi"])


@functools.lru_cache(maxsize=32)
def _theta_cached(variant, lam, start, t0, t_lo, t_hi):
    ctl = ode.Controls(span=(t_lo, t_hi), **ODE_CONTROLS)
    return ode.integrate_theta(variant, lam, start, t0=t0, controls=ctl)


def _starstar_build(p):
    A, B = _poly(p["a0"]), _poly(p["b0"])
    sol = _theta_solution(p, 1)
    return MetricAnsatz(A, B, conformal.Separable(sol)), theta_field(sol, A, B, 1, p["lam"])


def _theta_window(p):
    t0 = p["t0"]
    return (0.1 * t0, 0.9 * t0), (0.1 * t0, 0.9 * t0)


def _starstarbar_build(p):
    A, B = _poly(0.0, 1.0), _poly(0.0, 1.0)
    lam = p["lam"]
    kind = p["theta"]
    if kind == "t":
        # theta = t: q = x + y with V = -2 lambda (x d_x + y d_y)
        return MetricAnsatz(A, B, conformal.Affine(1.0, 1.0)), LinearField(-2 * lam, 0.0, -2 * lam, 0.0)
    if kind == "sqrt":
        _check(lam == 0.5, "StarStarBar", "theta = sqrt(t) forces lambda = 1/2")
        return _s2_build({})
    _check(kind == "ode", "StarStarBar", "theta must be 'ode', 't' or 'sqrt'")
    sol = _theta_solution(p, 2)
    return MetricAnsatz(A, B, conformal.Separable(sol)), theta_field(sol, A, B, 2, lam)


# -- q = sqrt(x + y), A = x, B = y
def _s2_build(p):
    m = MetricAnsatz(_poly(0.0, 1.0), _poly(0.0, 1.0), conformal.Separable(profiles.PowerLaw(1.0, 0.5)))
    return m, AffineRadialField(0.5, -1.0)


# -- q = e^(x + y), conformal to a product of cigars
def _cp_build(p):
    k1, k2, k0 = p["k1"], p["k2"], p["k0"]
    A = profiles.ExpAffine(k1, 1.0, k0)
    B = profiles.ExpAffine(k2, 1.0, -k0)
    q = conformal.Separable(profiles.ExpAffine(1.0, 1.0, 0.0))

    def w(x, y):
        e = -math.exp(2 * (x + y))
        return e, 2 * e, 2 * e

    return MetricAnsatz(A, B, q), ProfileScaledField(A, B, w, "product-of-cigars")


def _cp_window(p):
    k2, k0 = p["k2"], p["k0"]
    ylo = math.log(k0 / k2) if k0 > 0 else -1.0
    return (-1.0, 1.0), (ylo + 0.3, ylo + 2.3)


# -- q = 1 product solitons
def _product_profile(C, k, lam, c0, c1):
    if C == 0:
        return _poly(c0, c1, -lam)
    return profiles.ExpSum([(k, C)], k0=c0, slope=2 * lam / C)


def _prod_build(p):
    lam = p["lam"]
    A = _product_profile(p["C1"], p["k1"], lam, p["a0"], p["a1"])
    B = _product_profile(p["C2"], p["k2"], lam, p["b0"], p["b1"])
    V = _ProductField(A, B, p["C1"], p["C2"])
    return MetricAnsatz(A, B, conformal.Affine(0.0, 0.0, 1.0)), V


class _ProductField(PlaneVectorField):
    kind = "product"

    def __init__(self, A, B, C1, C2):
        self.A, self.B, self.C1, self.C2 = A, B, float(C1), float(C2)

    def evaluate(self, x, y):
        a0, a1 = (float(v) for v in self.A.derivs(x, 1))
        b0, b1 = (float(v) for v in self.B.derivs(y, 1))
        J = np.array([[self.C1 * a1, 0.0], [0.0, self.C2 * b1]])
        return self.C1 * a0, self.C2 * b0, J

    def to_json(self):
        return {"kind": self.kind, "C1": self.C1, "C2": self.C2}


def _prod_window(p):
    return (-0.5, 1.0), (-0.5, 1.0)


def _gauss_build(p):
    lam = p["lam"]
    m = MetricAnsatz(_poly(0.0, 1.0), _poly(0.0, 1.0), conformal.Affine(0.0, 0.0, 1.0))
    return m, LinearField(2 * lam, 0.0, 2 * lam, 0.0)


_STAR_DEFAULTS = {"a0": 1.0, "b0": 1.0, "c": 1.0, "lam": -5.0, "f0": 1.0, "f1": 0.0,
                  "f2": -2.0, "mode": "series", "eps": 1e-3, "blowup": 1e12}
_THETA_DEFAULTS = {"lam": -6.0, "start": [1.0, 1.0, 0.1], "t0": 1.0, "t_lo": 0.0, "t_hi": 4.0}

_REGISTRY = {
    "S0": _Family(
        {"c1": 1.0, "c2": 1.0, "a0": 1.0, "b0": 1.0, "P": [0.0, 0.0, 0.0, 1.0]},
        lambda p: -3 * (p["a0"] * p["c1"] ** 2 + p["b0"] * p["c2"] ** 2),
        _s0_build, lambda p: ((0.0, 1.0), (0.0, 1.0)), lambda p: (0.5, 0.5),
        lambda p: "d", _s0_probes),
    "Schwarzschild": _Family(
        {"c1": 1.0, "a0": 1.0, "k": 1.0, "m": 1.0, "b0": 1.0, "b1": 1.0},
        lambda p: -3 * p["a0"] * p["c1"] ** 2,
        _schw_build, lambda p: ((0.05, 1.4), (-0.6, 1.6)), lambda p: (0.5, 0.5),
        lambda p: "d", None),
    "S1": _Family(
        {"a0": 1.0, "b0": 1.0, "c": 1.0, "ctilde": 0.0},
        lambda p: -2 * p["a0"] * p["b0"],
        _s1_build, _s1_window, lambda p: (0.0, math.sqrt(p["a0"] / p["c"]) if p["c"] > 0 else 1.0),
        _s1_domain, _s1_probes),
    "SStar": _Family(
        dict(_STAR_DEFAULTS, lam=-1.0, f2=2.0, blowup=1e6),
        lambda p: p["lam"], _star_build, _star_window, lambda p: (0.0, 1.0),
        None, None, explicit=False),
    "SB": _Family(
        dict(_STAR_DEFAULTS), lambda p: p["lam"], _star_build, _star_window,
        lambda p: (0.0, 1.0), _sb_domain, _sb_probes, explicit=False),
    "F_alpha": _Family(
        {"alpha": 0.8, "c": 1.0, "k1": 1.0, "k2": 1.0},
        lambda p: 0.0, _f_build, _f_window),
    "StarStar": _Family(
        dict(_THETA_DEFAULTS, a0=1.0, b0=1.0), lambda p: p["lam"], _starstar_build,
        _theta_window, explicit=False),
    "S2": _Family({}, lambda p: 0.5, _s2_build, lambda p: ((0.1, 2.0), (0.1, 2.0))),
    "StarStarBar": _Family(
        dict(_THETA_DEFAULTS, lam=1.0, theta="ode"), lambda p: p["lam"], _starstarbar_build,
        _theta_window, explicit=False),
    "CP": _Family({"k1": 1.0, "k2": 1.0, "k0": 0.5}, lambda p: 0.0, _cp_build, _cp_window),
    "ProductSolitons": _Family(
        {"lam": 0.5, "C1": 1.0, "C2": 1.0, "k1": 1.0, "k2": 1.0, "a0": 1.0, "b0": 1.0,
         "a1": 0.0, "b1": 0.0},
        lambda p: p["lam"], _prod_build, _prod_window),
    "Gaussian": _Family({"lam": 1.0}, lambda p: p["lam"], _gauss_build,
                        lambda p: ((0.1, 2.0), (0.1, 2.0))),
}


# ------------------------------------------------------------------ build

def build_family(spec):
    """Assemble the metric ansatz, V and lambda for a family spec."""
    fam = _REGISTRY[spec.family]
    p = spec.resolved
    try:
        m, V = fam.build(p)
    except SolitonLabError as exc:
        if isinstance(exc, InvalidSpec):
            raise
        raise type(exc)(f"{spec.family}: {exc}") from exc
    lam = spec.expected_lambda() if spec.lam is None else float(spec.lam)
    return SolitonCandidate(m, V, lam)


def window(spec):
    return _REGISTRY[spec.family].window(spec.resolved)


def default_grid(spec, n=15, fraction=0.6):
    """n x n tensor grid over the central ``fraction`` of the family window."""
    (x0, x1), (y0, y1) = window(spec)
    pad = 0.5 * (1.0 - fraction)
    xs = np.linspace(x0 + pad * (x1 - x0), x1 - pad * (x1 - x0), n)
    ys = np.linspace(y0 + pad * (y1 - y0), y1 - pad * (y1 - y0), n)
    return [(float(x), float(y)) for x in xs for y in ys]


# ------------------------------------------------------------------ verify

@dataclass
class Item:
    name: str
    value: object
    expected: object
    passed: bool
    detail: str = ""

    def to_json(self):
        return {"name": self.name, "value": self.value, "expected": self.expected,
                "passed": self.passed, "detail": self.detail}


@dataclass
class FamilyReport:
    spec: FamilySpec
    lam: float
    expected_lam: float
    residuals: object
    items: list

    @property
    def passed(self):
        return all(it.passed for it in self.items)

    def to_json(self):
        return {
            "spec": self.spec.to_json(),
            "lambda": self.lam,
            "expected_lambda": self.expected_lam,
            "passed": self.passed,
            "items": [it.to_json() for it in self.items],
            "residuals": self.residuals.to_json() if self.residuals is not None else None,
        }

    def table(self):
        rows = [f"{self.spec.family}  lambda={self.lam:.6g}  "
                f"{'PASS' if self.passed else 'FAIL'}"]
        for it in self.items:
            val = f"{it.value:.3e}" if isinstance(it.value, float) else str(it.value)
            rows.append(f"  {'PASS' if it.passed else 'FAIL'}  {it.name:<28} {val:<14} {it.detail}")
        return "\n".join(rows)


def verify_family(spec, grid=None, tolerances=None, geometry_checks=True):
    """Residuals, inferred lambda, domain class and boundary characters of a family."""
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    fam = _REGISTRY[spec.family]
    p = spec.resolved
    c = build_family(spec)
    expected = spec.expected_lambda()
    grid = grid if grid is not None else default_grid(spec)
    items = []
    ft_tol = tol["full_tensor"] if fam.explicit else tol["full_tensor_ode"]
    lam_tol = tol["lambda"] if fam.explicit else tol["lambda_ode"]

    sup, arg = 0.0, None
    for x, y in grid:
        r = soliton.soliton_residual_relative(c, x, y)
        if not r <= sup:
            sup, arg = r, (x, y)
    items.append(Item("full_tensor", float(sup), ft_tol, bool(sup < ft_tol),
                      f"sup over {len(grid)} points at {arg}"))

    lam_hat, _ = soliton.infer_lambda(c.m, c.V, grid)
    items.append(Item("lambda", float(lam_hat), float(c.lam), bool(abs(lam_hat - c.lam) < lam_tol),
                      f"closed form {expected:.17g}"))

    rel = None
    try:
        rel = soliton.relation_residuals(c, grid[:: max(1, len(grid) // 25)])
    except SolitonLabError as exc:
        items.append(Item("relations", None, tol["relations"], False, f"{type(exc).__name__}: {exc}"))
    if rel is not None:
        for k in RELATION_KEYS:
            v = rel.residuals.get(k)
            if v is None:
                continue
            t = tol["relations"]
            if not fam.explicit:
                t = tol["second_derivatives_ode"] if k == "second_derivatives" else tol["relations_ode"]
            items.append(Item(k, float(v), t, bool(v < t), f"at {rel.argmax[k]}"))

    if geometry_checks and fam.domain is not None:
        want = fam.domain(p)
        try:
            region = geometry.compute_domain(c.m, fam.seed(p))
            got, why = geometry.classify_domain(region)
            items.append(Item("domain_class", got, want, got == want, why))
        except SolitonLabError as exc:
            items.append(Item("domain_class", None, want, False, f"{type(exc).__name__}: {exc}"))
    if geometry_checks and fam.probes is not None:
        for pr in fam.probes(p):
            try:
                bc = geometry.boundary_character(c.m, pr.point, pr.inward)
                items.append(Item(f"boundary[{pr.label}]", bc.kind, pr.expected,
                                  bc.kind == pr.expected, str(bc.notes)))
            except SolitonLabError as exc:
                items.append(Item(f"boundary[{pr.label}]", None, pr.expected, False,
                                  f"{type(exc).__name__}: {exc}"))
    return FamilyReport(spec, float(c.lam), expected, rel, items)


def _verify_one(args):
    spec, grid, tol, geo = args
    return verify_family(spec, grid, tol, geo)


def verify_families(specs, workers=None, tolerances=None, geometry_checks=True):
    """verify_family over many specs, in parallel by spec."""
    workers = worker_count(workers)
    jobs = [(s, None, tolerances, geometry_checks) for s in specs]
    if workers <= 1 or len(jobs) <= 1:
        return [_verify_one(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_verify_one, jobs))


def worker_count(requested=None):
    """Requested workers capped by SOLITON_LAB_THREADS (default: CPU count)."""
    cap = os.environ.get("SOLITON_LAB_THREADS")
    n = requested if requested is not None else (os.cpu_count() or 1)
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            raise InvalidSpec(f"SOLITON_LAB_THREADS must be an integer, got {cap!r}") from None
    return max(1, int(n))


def default_specs(explicit_only=False):
    names = EXPLICIT if explicit_only else FAMILIES
    specs = [FamilySpec(n) for n in names]
    if "F_alpha" in names:
        specs.insert(names.index("F_alpha") + 1, FamilySpec("F_alpha", {"alpha": 0.7}))
    return specs
