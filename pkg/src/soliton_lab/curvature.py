"""Metric ansatz, closed-form Ricci and Lie-derivative tensors, and
finite-difference curvature oracles (Ricci, Weyl).

Coordinates are ordered (x, y, s, t) throughout and the metric is

    g = q^-2 (dx^2 / A(x) + dy^2 / B(y) + A(x) ds^2 + B(y) dt^2).
"""
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DomainError, MissingDerivative, UnsupportedOrder

COORDS = ("x", "y", "s", "t")
PAIRS = [(i, j) for i in range(4) for j in range(i, 4)]


class SymTensor4:
    """Symmetric rank-2 tensor in the (x, y, s, t) chart."""

    __slots__ = ("m",)

    def __init__(self, matrix):
        m = np.asarray(matrix, dtype=float)
        self.m = 0.5 * (m + m.T)

    @classmethod
    def diag(cls, xx, yy, ss, tt, xy=0.0):
        m = np.diag([xx, yy, ss, tt]).astype(float)
        m[0, 1] = m[1, 0] = xy
        return cls(m)

    def __getitem__(self, key):
        if isinstance(key, str):
            key = (COORDS.index(key[0]), COORDS.index(key[1]))
        return float(self.m[key])

    def components(self):
        return {COORDS[i] + COORDS[j]: float(self.m[i, j]) for i, j in PAIRS}

    def norm(self):
        return float(np.max(np.abs(self.m)))

    def __add__(self, other):
        return SymTensor4(self.m + other.m)

    def __sub__(self, other):
        return SymTensor4(self.m - other.m)

    def __mul__(self, k):
        return SymTensor4(self.m * float(k))

    __rmul__ = __mul__

    def to_json(self, point=None):
        out = {}
        if point is not None:
            out["point"] = [float(point[0]), float(point[1])]
        out["components"] = self.components()
        out["norm"] = self.norm()
        return out

    def __repr__(self):
        return f"SymTensor4({self.components()})"


@dataclass(frozen=True)
class Local:
    """Pointwise data: profile derivatives and q partials."""

    x: float
    y: float
    A: tuple
    B: tuple
    P: np.ndarray

    @property
    def q(self):
        return self.P[0, 0]


@dataclass(frozen=True)
class MetricAnsatz:
    A: object
    B: object
    q: object
    periods: tuple = field(default=(2 * math.pi, 2 * math.pi))

    def local(self, x, y, order=2):
        """Profile derivatives to ``order`` (or NaN when unavailable) and q partials."""
        x, y = float(x), float(y)
        A = _profile_derivs(self.A, x, order)
        B = _profile_derivs(self.B, y, order)
        if not A[0] > 0 or not B[0] > 0:
            raise DomainError(f"A={A[0]}, B={B[0]} must be positive at ({x}, {y})")
        P = self.q.partials(x, y)
        if P[0, 0] == 0 or not np.isfinite(P[0, 0]):
            raise DomainError(f"q vanishes at ({x}, {y})")
        return Local(x, y, A, B, P)

    def contains(self, x, y):
        try:
            self.local(x, y, order=0)
        except DomainError:
            return False
        return True

    def with_profiles(self, A, B):
        return MetricAnsatz(A, B, self.q, self.periods)

    def swapped(self):
        """The ansatz under x<->y, A<->B (q reflected accordingly)."""
        return MetricAnsatz(self.B, self.A, _SwappedQ(self.q), self.periods[::-1])

    def to_json(self):
        return {"A": self.A.to_json(), "B": self.B.to_json(), "q": self.q.to_json(),
                "periods": list(self.periods)}


def _profile_derivs(p, t, order):
    out = []
    for k in range(order + 1):
        try:
            out.append(float(p.deriv(t, k)))
        except (UnsupportedOrder, MissingDerivative):
            out.append(math.nan)
    return tuple(out)


class _SwappedQ:
    homogeneous = False

    def __init__(self, q):
        self.base = q
        self.homogeneous = getattr(q, "homogeneous", False)

    def partials(self, x, y):
        return self.base.partials(y, x).T.copy()

    def to_json(self):
        return {"kind": "swapped", "params": {"base": self.base.to_json()}}


# ------------------------------------------------------------ vector fields

class PlaneVectorField:
    """V = V^x(x,y) d_x + V^y(x,y) d_y."""

    kind = "field"

    def evaluate(self, x, y):
        """(V^x, V^y, J) with J[i][j] = d_j V^i, (i, j) over (x, y)."""
        raise NotImplementedError

    def __call__(self, x, y):
        vx, vy, _ = self.evaluate(x, y)
        return vx, vy

    def __add__(self, other):
        return SumField([self, other])

    def to_json(self):
        return {"kind": self.kind}


class ZeroField(PlaneVectorField):
    kind = "zero"

    def evaluate(self, x, y):
        return 0.0, 0.0, np.zeros((2, 2))


def _fd_jacobian(fn, x, y, h):
    J = np.empty((2, 2))
    for j, (dx, dy) in enumerate(((h, 0.0), (0.0, h))):
        p2 = np.array(fn(x + 2 * dx, y + 2 * dy))
        p1 = np.array(fn(x + dx, y + dy))
        m1 = np.array(fn(x - dx, y - dy))
        m2 = np.array(fn(x - 2 * dx, y - 2 * dy))
        J[:, j] = (-p2 + 8 * p1 - 8 * m1 + m2) / (12 * h)
    return J


class CustomField(PlaneVectorField):
    """Field from callables; the Jacobian falls back to 4th-order differences."""

    kind = "custom"

    def __init__(self, fn, jac=None, h=1e-5, label="custom"):
        self.fn, self.jac, self.h, self.label = fn, jac, h, label

    def evaluate(self, x, y):
        vx, vy = self.fn(x, y)
        J = np.asarray(self.jac(x, y), dtype=float) if self.jac else _fd_jacobian(self.fn, x, y, self.h)
        return float(vx), float(vy), J

    def to_json(self):
        return {"kind": self.kind, "label": self.label}


class SumField(PlaneVectorField):
    kind = "sum"

    def __init__(self, fields):
        self.fields = list(fields)

    def evaluate(self, x, y):
        vx = vy = 0.0
        J = np.zeros((2, 2))
        for f in self.fields:
            a, b, K = f.evaluate(x, y)
            vx, vy, J = vx + a, vy + b, J + K
        return vx, vy, J

    def to_json(self):
        return {"kind": self.kind, "fields": [f.to_json() for f in self.fields]}


class GaugeField(PlaneVectorField):
    """V-shift matching the resolvent gauge (S^x + C0 y + C1, S^y - C0 x - C2)."""

    kind = "gauge"

    def __init__(self, A, B, C0=0.0, C1=0.0, C2=0.0):
        self.A, self.B = A, B
        self.C = (float(C0), float(C1), float(C2))

    def evaluate(self, x, y):
        C0, C1, C2 = self.C
        a, a1 = float(self.A.deriv(x, 0)), float(self.A.deriv(x, 1))
        b, b1 = float(self.B.deriv(y, 0)), float(self.B.deriv(y, 1))
        u, w = C0 * y + C1, C0 * x + C2
        J = np.array([[a1 * u, a * C0], [-b * C0, -b1 * w]])
        return a * u, -b * w, J

    def to_json(self):
        return {"kind": self.kind, "C": list(self.C)}


class ArctanKilling(PlaneVectorField):
    """V = phi V0 with V0 = (a0 - c x^2) y d_x - (b0 + c y^2) x d_y and
    phi = ct - 2 eps sqrt(a0 |b0|) g(sqrt|b0| x / (sqrt(a0) y)),
    g = arctan for b0 > 0 and artanh for b0 < 0 (phi = ct when b0 = 0).
    """

    kind = "arctan_killing"

    def __init__(self, a0, b0, c, ctilde=0.0, eps=1.0):
        self.a0, self.b0, self.c = float(a0), float(b0), float(c)
        self.ctilde, self.eps = float(ctilde), float(eps)

    def phi(self, x, y):
        a0, b0 = self.a0, self.b0
        if b0 == 0:
            return self.ctilde, 0.0, 0.0
        if y == 0:
            raise DomainError("ArctanKilling is singular on y = 0")
        k = math.sqrt(abs(b0) / a0)
        u = k * x / y
        if b0 > 0:
            g, gp = math.atan(u), 1.0 / (1.0 + u * u)
        else:
            if abs(u) >= 1:
                raise DomainError("artanh branch requires |b0| x^2 < a0 y^2")
            g, gp = math.atanh(u), 1.0 / (1.0 - u * u)
        amp = -2.0 * self.eps * math.sqrt(a0 * abs(b0))
        return self.ctilde + amp * g, amp * gp * k / y, -amp * gp * u / y

    def evaluate(self, x, y):
        ph, px, py = self.phi(x, y)
        c = self.c
        A = self.a0 - c * x * x
        B = self.b0 + c * y * y
        v0x, v0y = A * y, -B * x
        J0 = np.array([[-2 * c * x * y, A], [-B, -2 * c * x * y]])
        J = ph * J0 + np.array([[v0x * px, v0x * py], [v0y * px, v0y * py]])
        return ph * v0x, ph * v0y, J

    def killing_part(self):
        return _V0(self.a0, self.b0, self.c)

    def to_json(self):
        return {"kind": self.kind, "a0": self.a0, "b0": self.b0, "c": self.c,
                "ctilde": self.ctilde, "eps": self.eps}


class _V0(PlaneVectorField):
    kind = "v0"

    def __init__(self, a0, b0, c):
        self.a0, self.b0, self.c = a0, b0, c

    def evaluate(self, x, y):
        c = self.c
        A = self.a0 - c * x * x
        B = self.b0 + c * y * y
        return A * y, -B * x, np.array([[-2 * c * x * y, A], [-B, -2 * c * x * y]])


# ------------------------------------------------------------ closed forms

def metric_components(m, x, y):
    L = m.local(x, y, order=0)
    q2 = L.q**2
    a, b = L.A[0], L.B[0]
    return SymTensor4.diag(1 / (q2 * a), 1 / (q2 * b), a / q2, b / q2)


def inverse_metric(m, x, y):
    L = m.local(x, y, order=0)
    q2 = L.q**2
    a, b = L.A[0], L.B[0]
    return SymTensor4.diag(q2 * a, q2 * b, q2 / a, q2 / b)


def _ricci_local(L):
    q = L.q
    P = L.P
    qx, qy, qxx, qxy, qyy = P[1, 0], P[0, 1], P[2, 0], P[1, 1], P[0, 2]
    A, A1, A2 = L.A[:3]
    B, B1, B2 = L.B[:3]
    grad = 3 * (qx * qx * A + qy * qy * B) / q**2
    Rxx = -(A2 / 2 - (2 * qx * A1 + 3 * qxx * A + qy * B1 + qyy * B) / q + grad) / A
    Rss = -A * (A2 / 2 - (2 * qx * A1 + qxx * A + qy * B1 + qyy * B) / q + grad)
    Ryy = -(B2 / 2 - (2 * qy * B1 + 3 * qyy * B + qx * A1 + qxx * A) / q + grad) / B
    Rtt = -B * (B2 / 2 - (2 * qy * B1 + qyy * B + qx * A1 + qxx * A) / q + grad)
    Rxy = 2 * qxy / q
    return SymTensor4.diag(Rxx, Ryy, Rss, Rtt, Rxy)


def ricci_closed_form(m, x, y):
    return _ricci_local(m.local(x, y))


def _lie_local(L, V):
    vx, vy, J = V.evaluate(L.x, L.y)
    q = L.q
    qx, qy = L.P[1, 0], L.P[0, 1]
    A, A1 = L.A[:2]
    B, B1 = L.B[:2]
    flux = (vx * qx + vy * qy) / q**3
    Lxx = (2 * J[0, 0] * A - vx * A1) / (q * q * A * A) - 2 * flux / A
    Lyy = (2 * J[1, 1] * B - vy * B1) / (q * q * B * B) - 2 * flux / B
    Lxy = (J[1, 0] * A + J[0, 1] * B) / (q * q * A * B)
    Lss = vx * A1 / q**2 - 2 * A * flux
    Ltt = vy * B1 / q**2 - 2 * B * flux
    return SymTensor4.diag(Lxx, Lyy, Lss, Ltt, Lxy)


def lie_derivative(m, V, x, y):
    return _lie_local(m.local(x, y, order=1), V)


def scalar_curvature(m, x, y):
    L = m.local(x, y)
    R = _ricci_local(L).m
    q2 = L.q**2
    ginv = np.array([q2 * L.A[0], q2 * L.B[0], q2 / L.A[0], q2 / L.B[0]])
    return float(np.sum(ginv * np.diag(R)))


# ------------------------------------------------------- oracles (FD based)

_D1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0       # offsets -2..2
_D2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0


def _metric_matrix(m, x, y):
    return metric_components(m, x, y).m


def metric_derivatives(m, x, y, h=1e-4):
    """g, dg, ddg at (x, y) from 4th-order central differences."""
    offs = np.arange(-2, 3)
    G = np.empty((5, 5, 4, 4))
    for i, a in enumerate(offs):
        for j, b in enumerate(offs):
            G[i, j] = _metric_matrix(m, x + a * h, y + b * h)
    g = G[2, 2]
    dg = np.zeros((4, 4, 4))
    ddg = np.zeros((4, 4, 4, 4))
    dg[0] = np.tensordot(_D1, G[:, 2], axes=1) / h
    dg[1] = np.tensordot(_D1, G[2, :], axes=1) / h
    ddg[0, 0] = np.tensordot(_D2, G[:, 2], axes=1) / h**2
    ddg[1, 1] = np.tensordot(_D2, G[2, :], axes=1) / h**2
    mixed = np.einsum("i,j,ijab->ab", _D1, _D1, G) / h**2
    ddg[0, 1] = ddg[1, 0] = mixed
    return g, dg, ddg


def _batch_derivatives(m, points, h):
    n = len(points)
    g = np.empty((n, 4, 4))
    dg = np.empty((n, 4, 4, 4))
    ddg = np.empty((n, 4, 4, 4, 4))
    for k, (x, y) in enumerate(points):
        g[k], dg[k], ddg[k] = metric_derivatives(m, x, y, h)
    return g, dg, ddg


def ricci_oracle(m, x, y, h=1e-4):
    g, dg, ddg = metric_derivatives(m, x, y, h)
    _, ric = kernels.riemann(g[None], dg[None], ddg[None])
    return SymTensor4(ric[0])


def ricci_oracle_batch(m, points, h=1e-4):
    g, dg, ddg = _batch_derivatives(m, points, h)
    _, ric = kernels.riemann(g, dg, ddg)
    return [SymTensor4(r) for r in ric]


def lie_derivative_flow(m, V, x, y, eps=1e-5):
    """Central difference of the pullback of g under the linearized flow of V."""
    vx, vy = V(x, y)
    J = _fd_jacobian(lambda a, b: V(a, b), x, y, eps)

    def pulled(sign):
        e = sign * eps
        G = _metric_matrix(m, x + e * vx, y + e * vy)
        Phi = np.eye(4)
        Phi[:2, :2] += e * J
        return Phi.T @ G @ Phi

    return SymTensor4((pulled(1) - pulled(-1)) / (2 * eps))


# ------------------------------------------------------------------- Weyl

# 2-form basis: (xy, xs, xt | st, ty, ys) so that *e_I = e_{I+3}
_BASIS = [(0, 1), (0, 2), (0, 3), (2, 3), (3, 1), (1, 2)]


def weyl_tensor(riem, ric, g):
    gi = np.linalg.inv(g)
    R = float(np.einsum("ab,ab->", gi, ric))
    n = 4
    gr = (np.einsum("ac,bd->abcd", g, ric) - np.einsum("ad,bc->abcd", g, ric)
          - np.einsum("bc,ad->abcd", g, ric) + np.einsum("bd,ac->abcd", g, ric))
    gg = np.einsum("ac,bd->abcd", g, g) - np.einsum("ad,bc->abcd", g, g)
    W = riem - gr / (n - 2) + R * gg / ((n - 1) * (n - 2))
    return W


def weyl_operators(m, x, y, h=1e-4):
    """3x3 matrices of W+ and W- in an orthonormal self-dual/anti-self-dual basis."""
    g, dg, ddg = metric_derivatives(m, x, y, h)
    riem, ric = kernels.riemann(g[None], dg[None], ddg[None])
    W = weyl_tensor(riem[0], ric[0], g)
    e = 1.0 / np.sqrt(np.diag(g))          # diagonal metric: orthonormal frame scales
    Wf = W * np.einsum("a,b,c,d->abcd", e, e, e, e)
    M = np.array([[Wf[i, j, k, l] for (k, l) in _BASIS] for (i, j) in _BASIS])
    s = 1 / math.sqrt(2)
    plus = np.hstack([np.eye(3), np.eye(3)]) * s
    minus = np.hstack([np.eye(3), -np.eye(3)]) * s
    Wp = plus @ M @ plus.T
    Wm = minus @ M @ minus.T
    return 0.5 * (Wp + Wp.T), 0.5 * (Wm + Wm.T)


def weyl_spectra(m, x, y, h=1e-4):
    Wp, Wm = weyl_operators(m, x, y, h)
    return tuple(np.linalg.eigvalsh(Wp)), tuple(np.linalg.eigvalsh(Wm))


def has_double_eigenvalue(spec, tol=1e-6):
    s = sorted(spec)
    return min(s[1] - s[0], s[2] - s[1]) <= tol
