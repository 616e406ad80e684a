"""Conformal factors q(x, y) with exact partials up to total order 3."""
import math

import numpy as np

from . import profiles
from .errors import DomainError, DegenerateHessian, MissingDerivative, InvalidSpec

HESSIAN_EPS = 1e-12


def _table():
    out = np.full((4, 4), np.nan)
    return out


class ConformalFactor:
    kind = "q"
    #: True when q is known to be homogeneous of degree one about the origin
    homogeneous = False

    def partials(self, x, y):
        """4x4 array P with P[i, j] = d^i/dx^i d^j/dy^j q (i + j <= 3)."""
        raise NotImplementedError

    def value(self, x, y):
        return float(self.partials(x, y)[0, 0])

    def __call__(self, x, y):
        return self.value(x, y)

    def to_json(self):
        return {"kind": self.kind, "params": self.params()}

    def params(self):
        return {}

    def __repr__(self):
        inner = ", ".join(f"{k}={v!r}" for k, v in self.params().items())
        return f"{type(self).__name__}({inner})"


class Affine(ConformalFactor):
    kind = "affine"

    def __init__(self, a, b, c=0.0):
        self.a, self.b, self.c = float(a), float(b), float(c)
        self.homogeneous = self.c == 0.0

    def partials(self, x, y):
        P = _table()
        P[0, 0] = self.a * x + self.b * y + self.c
        P[1, 0], P[0, 1] = self.a, self.b
        for i in range(4):
            for j in range(4 - i):
                if i + j >= 2:
                    P[i, j] = 0.0
        return P

    def params(self):
        return {"a": self.a, "b": self.b, "c": self.c}


class PolynomialXY(ConformalFactor):
    """sum c_ij x^i y^j from a {(i, j): c} mapping."""

    kind = "polynomial_xy"

    def __init__(self, coeffs):
        self.coeffs = {(int(i), int(j)): float(c) for (i, j), c in dict(coeffs).items()}

    def partials(self, x, y):
        P = _table()
        for a in range(4):
            for b in range(4 - a):
                s = 0.0
                for (i, j), c in self.coeffs.items():
                    if i >= a and j >= b:
                        s += c * profiles._falling(i, a) * profiles._falling(j, b) \
                            * x ** (i - a) * y ** (j - b)
                P[a, b] = s
        return P

    def params(self):
        return {"coeffs": [[i, j, c] for (i, j), c in sorted(self.coeffs.items())]}


class HomogeneousClosed(ConformalFactor):
    """q = sqrt(b0 x^2 + a0 y^2)."""

    kind = "homogeneous_closed"
    homogeneous = True

    def __init__(self, a0, b0):
        self.a0, self.b0 = float(a0), float(b0)

    def partials(self, x, y):
        a, b = self.a0, self.b0
        u = b * x * x + a * y * y
        if not u > 0:
            raise DomainError(f"b0 x^2 + a0 y^2 = {u} <= 0 at ({x}, {y})")
        q = math.sqrt(u)
        q3, q5 = q**3, q**5
        P = _table()
        P[0, 0] = q
        P[1, 0] = b * x / q
        P[0, 1] = a * y / q
        P[2, 0] = a * b * y * y / q3
        P[1, 1] = -a * b * x * y / q3
        P[0, 2] = a * b * x * x / q3
        P[3, 0] = -3 * a * b * b * x * y * y / q5
        P[2, 1] = a * b * y * (2 * b * x * x - a * y * y) / q5
        P[1, 2] = a * b * x * (2 * a * y * y - b * x * x) / q5
        P[0, 3] = -3 * a * a * b * x * x * y / q5
        return P

    def params(self):
        return {"a0": self.a0, "b0": self.b0}


class HomogeneousFromF(ConformalFactor):
    """q = y f(x/y) for a one-variable f exposing derivs(z, n)."""

    kind = "homogeneous_from_f"
    homogeneous = True

    def __init__(self, f):
        self.f = f

    def _fd(self, z):
        try:
            vals = self.f.derivs(z, 3)
        except MissingDerivative:
            raise
        return [float(v) for v in vals]

    def partials(self, x, y):
        if y == 0:
            raise DomainError("HomogeneousFromF requires y != 0")
        z = x / y
        try:
            f0, f1, f2, f3 = self._fd(z)
        except DomainError as exc:
            raise DomainError(f"x/y = {z} outside the domain of f: {exc}") from None
        P = _table()
        P[0, 0] = y * f0
        P[1, 0] = f1
        P[0, 1] = f0 - z * f1
        P[2, 0] = f2 / y
        P[1, 1] = -z * f2 / y
        P[0, 2] = z * z * f2 / y
        y2 = y * y
        P[3, 0] = f3 / y2
        P[2, 1] = -(z * f3 + f2) / y2
        P[1, 2] = (2 * z * f2 + z * z * f3) / y2
        P[0, 3] = -(3 * z * z * f2 + z**3 * f3) / y2
        return P

    def zero_directions(self):
        """Unit directions (x, y), y > 0, along which q vanishes (zeros of f)."""
        zs = getattr(self.f, "zeros", lambda: [])()
        return [(z / math.hypot(z, 1.0), 1.0 / math.hypot(z, 1.0)) for z in zs]

    def params(self):
        to_json = getattr(self.f, "to_json", None)
        return {"f": to_json() if to_json else repr(self.f)}


class PowerProduct(ConformalFactor):
    """q = x^alpha y^(1 - alpha) on the open first quadrant."""

    kind = "power_product"
    homogeneous = True

    def __init__(self, alpha):
        self.alpha = float(alpha)

    def partials(self, x, y):
        if not (x > 0 and y > 0):
            raise DomainError("PowerProduct requires x > 0 and y > 0")
        a, b = self.alpha, 1.0 - self.alpha
        P = _table()
        for i in range(4):
            for j in range(4 - i):
                P[i, j] = profiles._falling(a, i) * profiles._falling(b, j) * x ** (a - i) * y ** (b - j)
        return P

    def params(self):
        return {"alpha": self.alpha}


class SqrtXY(PowerProduct):
    """q = sqrt(xy); admits no soliton (negative control)."""

    kind = "sqrt_xy"

    def __init__(self):
        super().__init__(0.5)

    def params(self):
        return {}


class Separable(ConformalFactor):
    """q = theta(x + y) for a one-variable theta exposing derivs(t, n)."""

    kind = "separable"

    def __init__(self, theta):
        self.theta = theta

    def partials(self, x, y):
        vals = [float(v) for v in self.theta.derivs(x + y, 3)]
        P = _table()
        for i in range(4):
            for j in range(4 - i):
                P[i, j] = vals[i + j]
        return P

    def params(self):
        to_json = getattr(self.theta, "to_json", None)
        return {"theta": to_json() if to_json else repr(self.theta)}


class LogSumExp(ConformalFactor):
    """q = log(e^x + e^y) (negative control)."""

    kind = "log_sum_exp"

    def partials(self, x, y):
        m = max(x, y)
        q = m + math.log(math.exp(x - m) + math.exp(y - m))
        s = math.exp(x - q)
        v = s * (1 - s)
        w = v * (1 - 2 * s)
        P = _table()
        P[0, 0] = q
        P[1, 0], P[0, 1] = s, 1 - s
        P[2, 0], P[1, 1], P[0, 2] = v, -v, v
        P[3, 0], P[2, 1], P[1, 2], P[0, 3] = w, -w, w, -w
        return P


class Translated(ConformalFactor):
    """q(x - x0, y - y0) for a base factor."""

    kind = "translated"

    def __init__(self, base, x0, y0):
        self.base, self.x0, self.y0 = base, float(x0), float(y0)

    def partials(self, x, y):
        return self.base.partials(x - self.x0, y - self.y0)

    def params(self):
        return {"base": self.base.to_json(), "x0": self.x0, "y0": self.y0}


# module-level operations -------------------------------------------------

def q_partial(q, x, y, ax, ay):
    if ax < 0 or ay < 0 or ax + ay > 3:
        raise InvalidSpec("partials are available up to total order 3")
    v = q.partials(x, y)[ax, ay]
    if not np.isfinite(v):
        raise MissingDerivative(f"partial ({ax},{ay}) unavailable")
    return float(v)


def monge_ampere_residual(q, x, y):
    P = q.partials(x, y)
    return float(P[2, 0] * P[0, 2] - P[1, 1] ** 2)


def monge_ampere_scaled(q, x, y):
    """Monge-Ampere residual divided by 1 + |D^2 q|^2."""
    P = q.partials(x, y)
    hess2 = P[2, 0] ** 2 + 2 * P[1, 1] ** 2 + P[0, 2] ** 2
    return abs(P[2, 0] * P[0, 2] - P[1, 1] ** 2) / (1.0 + hess2)


def euler_residual(q, x, y):
    P = q.partials(x, y)
    return float(x * P[1, 0] + y * P[0, 1] - P[0, 0])


def euler_companions(q, x, y):
    """(x q_xy + y q_yy, x q_xx + y q_xy), both zero for homogeneous q."""
    P = q.partials(x, y)
    return (float(x * P[1, 1] + y * P[0, 2]), float(x * P[2, 0] + y * P[1, 1]))


def homogeneity_detector_residuals(q, x, y):
    P = q.partials(x, y)
    qq, qx, qy = P[0, 0], P[1, 0], P[0, 1]
    qxx, qxy, qyy = P[2, 0], P[1, 1], P[0, 2]
    if min(abs(qxx), abs(qxy), abs(qyy)) < HESSIAN_EPS:
        raise DegenerateHessian(f"second partials ({qxx}, {qxy}, {qyy}) at ({x}, {y})")
    qxxy, qxyy, qyyy = P[2, 1], P[1, 2], P[0, 3]
    r1 = qq * qxy * qyyy + qy * qxy * qyy - qq * qyy * qxyy - qx * qyy**2
    r2 = qq * qyy * qxxy + qx * qxy * qyy - qq * qxy * qxyy - qy * qxy**2
    return (float(r1), float(r2))


def third_order_identity_residual(q, x, y):
    """q_xxx q_xy q_yy - q_xx (2 q_xxy q_yy - q_xyy q_xy)."""
    P = q.partials(x, y)
    return float(P[3, 0] * P[1, 1] * P[0, 2] - P[2, 0] * (2 * P[2, 1] * P[0, 2] - P[1, 2] * P[1, 1]))


def is_homogeneous(q, points=((0.3, 1.1), (-0.4, 0.9), (1.2, 0.7)), tol=1e-10):
    """Structural flag, else a numeric Euler test at a few points."""
    if getattr(q, "homogeneous", False):
        return True
    ok = 0
    for x, y in points:
        try:
            P = q.partials(x, y)
        except DomainError:
            continue
        if abs(x * P[1, 0] + y * P[0, 1] - P[0, 0]) > tol * (1 + abs(P[0, 0])):
            return False
        ok += 1
    return ok > 0


_SIMPLE = {cls.kind: cls for cls in (Affine, HomogeneousClosed, PowerProduct, LogSumExp)}


def from_json(obj, resolver=None):
    kind, params = obj["kind"], dict(obj.get("params", {}))
    if kind in _SIMPLE:
        return _SIMPLE[kind](**params)
    if kind == "sqrt_xy":
        return SqrtXY()
    if kind == "polynomial_xy":
        return PolynomialXY({(i, j): c for i, j, c in params["coeffs"]})
    if kind == "translated":
        return Translated(from_json(params["base"], resolver), params["x0"], params["y0"])
    if kind in ("homogeneous_from_f", "separable"):
        key = "f" if kind == "homogeneous_from_f" else "theta"
        inner = params[key]
        fn = (resolver or _default_resolver)(inner)
        return HomogeneousFromF(fn) if kind == "homogeneous_from_f" else Separable(fn)
    raise InvalidSpec(f"unknown conformal factor kind {kind!r}")


def _default_resolver(obj):
    if isinstance(obj, dict) and obj.get("kind") == "ode_solution":
        from .ode import OdeSolution
        return OdeSolution.from_json(obj)
    return profiles.from_json(obj)
