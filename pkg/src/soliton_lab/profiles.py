"""One-variable metric profiles A(x), B(y).

Every profile exposes ``eval``, ``deriv`` (orders 0..4) and
``positivity_window``.  Profiles are immutable and JSON-serializable.
"""
import math

import numpy as np
from scipy.interpolate import BPoly

from .errors import DomainError, NotPositive, UnsupportedOrder, InvalidSpec

MAX_ORDER = 4


def _falling(a, n):
    out = 1.0
    for j in range(n):
        out *= a - j
    return out


class Profile:
    kind = "profile"
    #: open interval on which the profile is defined
    interval = (-math.inf, math.inf)

    def _check(self, t, order):
        if not 0 <= order <= MAX_ORDER:
            raise UnsupportedOrder(f"derivative order {order} not in 0..{MAX_ORDER}")
        lo, hi = self.interval
        ta = np.asarray(t, dtype=float)
        if np.any(~np.isfinite(ta)) or np.any(ta <= lo) or np.any(ta >= hi):
            raise DomainError(f"{self.kind}: t={t!r} outside {self.interval}")

    def eval(self, t):
        return self.deriv(t, 0)

    def deriv(self, t, order=0):
        self._check(t, order)
        return self._deriv(t, order)

    def _deriv(self, t, order):
        raise NotImplementedError

    def derivs(self, t, n=4):
        """Tuple (p, p', ..., p^(n)) at t."""
        return tuple(self.deriv(t, k) for k in range(n + 1))

    def __call__(self, t):
        return self.eval(t)

    def positivity_window(self, t0):
        return positivity_window(self, t0)

    def to_json(self):
        return {"kind": self.kind, "params": self.params()}

    def params(self):
        raise NotImplementedError

    def __repr__(self):
        inner = ", ".join(f"{k}={v!r}" for k, v in self.params().items())
        return f"{type(self).__name__}({inner})"


class Polynomial(Profile):
    """sum(coeffs[k] * t**k), degree at most 4."""

    kind = "polynomial"

    def __init__(self, coeffs):
        coeffs = [float(c) for c in coeffs]
        if not coeffs:
            coeffs = [0.0]
        if len(coeffs) > 5:
            if any(c != 0 for c in coeffs[5:]):
                raise InvalidSpec("Polynomial profiles have degree <= 4")
            coeffs = coeffs[:5]
        self.coeffs = tuple(coeffs)

    def _deriv(self, t, order):
        c = np.polynomial.polynomial.polyder(self.coeffs, order) if order else self.coeffs
        return np.polynomial.polynomial.polyval(t, c) + 0.0 * np.asarray(t, dtype=float)

    def roots(self):
        c = np.trim_zeros(np.asarray(self.coeffs), "b")
        if len(c) <= 1:
            return []
        r = np.polynomial.polynomial.polyroots(c)
        return sorted(float(z.real) for z in r if abs(z.imag) <= 1e-9 * (1 + abs(z)))

    def params(self):
        return {"coeffs": list(self.coeffs)}


class PowerLaw(Profile):
    """k * t**p on t > 0 (all of R when p is a non-negative integer)."""

    kind = "power_law"

    def __init__(self, k, p):
        self.k, self.p = float(k), float(p)
        if not (self.p >= 0 and self.p == int(self.p)):
            self.interval = (0.0, math.inf)

    def _deriv(self, t, order):
        t = np.asarray(t, dtype=float)
        m = _falling(self.p, order)
        if m == 0:
            return 0.0 * t
        return self.k * m * t ** (self.p - order)

    def params(self):
        return {"k": self.k, "p": self.p}


def mu(alpha):
    """Exponent mu_alpha = 2 alpha^2 / (2 alpha - 1)."""
    if alpha == 0.5:
        raise InvalidSpec("mu_alpha has a pole at alpha = 1/2")
    return 2.0 * alpha * alpha / (2.0 * alpha - 1.0)


class PowerFamily(Profile):
    """F_{alpha,c,k}(t) = c t^2 + k t^(mu_alpha + 1) on t > 0."""

    kind = "power_family"
    interval = (0.0, math.inf)

    def __init__(self, alpha, c, k):
        self.alpha, self.c, self.k = float(alpha), float(c), float(k)
        self.mu = mu(self.alpha)
        self.exponent = self.mu + 1.0

    def _deriv(self, t, order):
        t = np.asarray(t, dtype=float)
        quad = self.c * _falling(2.0, order) * t ** max(2 - order, 0) if order <= 2 else 0.0 * t
        return quad + self.k * _falling(self.exponent, order) * t ** (self.exponent - order)

    def params(self):
        return {"alpha": self.alpha, "c": self.c, "k": self.k}


class ExpAffine(Profile):
    """k1 exp(r t) + slope t + k0."""

    kind = "exp_affine"

    def __init__(self, k1, r, k0, slope=0.0):
        self.k1, self.r, self.k0, self.slope = float(k1), float(r), float(k0), float(slope)

    def _deriv(self, t, order):
        t = np.asarray(t, dtype=float)
        e = self.k1 * self.r**order * np.exp(self.r * t)
        if order == 0:
            return e + self.slope * t + self.k0
        if order == 1:
            return e + self.slope
        return e

    def params(self):
        return {"k1": self.k1, "r": self.r, "k0": self.k0, "slope": self.slope}


class ExpSum(Profile):
    """sum_i k_i exp(r_i t) + slope t + k0."""

    kind = "exp_sum"

    def __init__(self, terms, k0=0.0, slope=0.0):
        self.terms = tuple((float(k), float(r)) for k, r in terms)
        self.k0, self.slope = float(k0), float(slope)

    def _deriv(self, t, order):
        t = np.asarray(t, dtype=float)
        val = sum(k * r**order * np.exp(r * t) for k, r in self.terms) + 0.0 * t
        if order == 0:
            val = val + self.slope * t + self.k0
        elif order == 1:
            val = val + self.slope
        return val

    def params(self):
        return {"terms": [list(p) for p in self.terms], "k0": self.k0, "slope": self.slope}


class QuadraticShift(Profile):
    """base(t) + c t^2, the profile transport used for homogeneous q."""

    kind = "quadratic_shift"

    def __init__(self, base, c):
        self.base, self.c = base, float(c)
        self.interval = base.interval

    def _deriv(self, t, order):
        t = np.asarray(t, dtype=float)
        extra = (self.c * t * t, 2 * self.c * t, 2 * self.c + 0 * t)[order] if order <= 2 else 0 * t
        return self.base._deriv(t, order) + extra

    def params(self):
        return {"base": self.base.to_json(), "c": self.c}


class Tabulated(Profile):
    """Quintic Hermite interpolant of (t, f, f', f'') samples.

    Orders 0..2 are exact derivatives of the interpolant; orders 3 and 4 are
    only available with ``approximate=True`` (error roughly h^2 and h).
    """

    kind = "tabulated"

    def __init__(self, nodes, values, d1, d2, approximate=False):
        t = np.asarray(nodes, dtype=float)
        if t.ndim != 1 or len(t) < 4:
            raise InvalidSpec("Tabulated needs at least 4 nodes")
        if np.any(np.diff(t) <= 0):
            raise InvalidSpec("Tabulated nodes must be strictly increasing")
        self.t = t
        self.f = np.asarray(values, dtype=float)
        self.f1 = np.asarray(d1, dtype=float)
        self.f2 = np.asarray(d2, dtype=float)
        self.approximate = approximate
        self._poly = BPoly.from_derivatives(self.t, np.column_stack([self.f, self.f1, self.f2]))
        # closed hull: nodes themselves are valid points
        self.interval = (np.nextafter(t[0], -np.inf), np.nextafter(t[-1], np.inf))

    @classmethod
    def from_profile(cls, p, nodes, **kw):
        nodes = np.asarray(nodes, dtype=float)
        return cls(nodes, p.deriv(nodes, 0), p.deriv(nodes, 1), p.deriv(nodes, 2), **kw)

    @classmethod
    def from_csv(cls, path, **kw):
        data = np.loadtxt(path, delimiter=",", ndmin=2, comments="#")
        if data.shape[1] < 4:
            raise InvalidSpec("CSV needs columns t, f, f1, f2")
        return cls(data[:, 0], data[:, 1], data[:, 2], data[:, 3], **kw)

    def _deriv(self, t, order):
        if order > 2 and not self.approximate:
            raise UnsupportedOrder("Tabulated profiles are exact only to order 2")
        out = self._poly(np.asarray(t, dtype=float), nu=order)
        return out if np.ndim(out) else float(out)

    def params(self):
        return {"nodes": self.t.tolist(), "values": self.f.tolist(),
                "d1": self.f1.tolist(), "d2": self.f2.tolist()}


_KINDS = {cls.kind: cls for cls in (Polynomial, PowerLaw, PowerFamily, ExpAffine, ExpSum,
                                    QuadraticShift, Tabulated)}


def from_json(obj):
    kind, params = obj["kind"], dict(obj["params"])
    if kind not in _KINDS:
        raise InvalidSpec(f"unknown profile kind {kind!r}")
    if kind == "quadratic_shift":
        return QuadraticShift(from_json(params["base"]), params["c"])
    if kind == "exp_sum":
        return ExpSum([tuple(p) for p in params["terms"]], params["k0"], params["slope"])
    return _KINDS[kind](**params)


# module-level operations -------------------------------------------------

def eval(p, t):  # noqa: A001 - mirrors the operation name
    return p.eval(t)


def deriv(p, t, order=0):
    return p.deriv(t, order)


SCAN_STEP = 1e-3
_FAR = 1e8


def _bisect_root(p, a, b):
    """Shrink [a, b] (p(a) > 0 >= p(b)) to a 1e-12 bracket and return its midpoint."""
    for _ in range(200):
        if abs(b - a) <= 1e-12:
            break
        m = 0.5 * (a + b)
        if float(p.eval(m)) > 0:
            a = m
        else:
            b = m
    return 0.5 * (a + b)


def _scan(p, t0, direction):
    """Walk from t0 until p stops being positive; return the endpoint."""
    lo, hi = p.interval
    edge = hi if direction > 0 else lo
    pos = t0
    step = SCAN_STEP
    chunk = 2000
    while True:
        ts = pos + direction * step * np.arange(1, chunk + 1)
        if direction > 0:
            inside = ts < edge
        else:
            inside = ts > edge
        ts_in = ts[inside]
        if len(ts_in):
            vals = np.asarray(p.eval(ts_in), dtype=float)
            bad = np.nonzero(~(vals > 0))[0]
            if len(bad):
                k = bad[0]
                a = pos if k == 0 else ts_in[k - 1]
                return _bisect_root(p, a, ts_in[k])
            pos = ts_in[-1]
        if not np.all(inside):
            # reached the definition edge while positive
            return edge
        if abs(pos) > _FAR:
            return direction * math.inf
        # farther out the resolution relaxes in proportion to |t|
        step = max(SCAN_STEP, 1e-3 * abs(pos))


def positivity_window(p, t0):
    """Maximal open interval around t0 on which p > 0."""
    v = float(p.eval(t0))
    if not v > 0:
        raise NotPositive(f"profile not positive at t0={t0}: {v}")
    if isinstance(p, Polynomial):
        roots = p.roots()
        left = max((r for r in roots if r < t0), default=-math.inf)
        right = min((r for r in roots if r > t0), default=math.inf)
        return (_polish(p, left, t0), _polish(p, right, t0))
    return (_scan(p, t0, -1), _scan(p, t0, 1))


def _polish(p, r, t0):
    if math.isinf(r):
        return r
    d = 1.0 if r > t0 else -1.0
    delta = 1e-7 * max(1.0, abs(r))
    a = r - d * delta
    if (a - t0) * d <= 0:
        a = 0.5 * (r + t0)
    b = r + d * delta
    if float(p.eval(a)) > 0 and float(p.eval(b)) <= 0:
        return _bisect_root(p, a, b)
    return r  # even-multiplicity root: np.roots value is already the endpoint


class SqrtQuadratic(Profile):
    """scale * sqrt(a0 + b0 t^2); the closed-form homogeneous profile."""

    kind = "sqrt_quadratic"

    def __init__(self, a0, b0, scale=1.0):
        self.a0, self.b0, self.scale = float(a0), float(b0), float(scale)

    def _check(self, t, order):
        super()._check(t, order)
        if np.any(self.a0 + self.b0 * np.asarray(t, dtype=float) ** 2 <= 0):
            raise DomainError("a0 + b0 t^2 must be positive")

    def _deriv(self, t, order):
        t = np.asarray(t, dtype=float)
        a, b = self.a0, self.b0
        k = a + b * t * t
        r = np.sqrt(k)
        if order == 0:
            v = r
        elif order == 1:
            v = b * t / r
        elif order == 2:
            v = a * b / k**1.5
        elif order == 3:
            v = -3 * a * b * b * t / k**2.5
        else:
            v = 3 * a * b * b * (4 * b * t * t - a) / k**3.5
        return self.scale * v

    def params(self):
        return {"a0": self.a0, "b0": self.b0, "scale": self.scale}


_KINDS[SqrtQuadratic.kind] = SqrtQuadratic
