"""Resolvents S^x, S^y, reduced soliton relations as residuals, and the
full tensor residual Ric + 1/2 L_V g - lambda g.

S is tied to the vector field by S^x = 2 q q_x + V^x / A and
S^y = 2 q q_y + V^y / B.
"""
import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from . import conformal, curvature
from .profiles import Polynomial, QuadraticShift
from .curvature import CustomField, GaugeField, MetricAnsatz, PlaneVectorField, SumField
from .errors import (DegenerateD, IllConditioned, NotHomogeneous, QuadratureFailure,
                     SeparableBranch)

D_THRESHOLD = 1e-10
FD_H1 = 1e-4
FD_H2 = 1e-3

RESIDUAL_KEYS = ("monge_ampere", "xy_relation", "xx_vs_ss", "yy_vs_tt", "coupling_pde",
                 "final_xx", "second_compatibility", "second_derivatives", "full_tensor")
# relations that only involve derivatives of S; unchanged by a gauge shift
GAUGE_INVARIANT = ("monge_ampere", "xy_relation", "xx_vs_ss", "yy_vs_tt", "second_derivatives")


@dataclass(frozen=True)
class Resolvent:
    Sx: float
    Sy: float
    D: float
    provenance: str
    point: tuple
    gauge: tuple = (0.0, 0.0, 0.0)

    def shifted(self, C0=0.0, C1=0.0, C2=0.0):
        x, y = self.point
        g = tuple(a + b for a, b in zip(self.gauge, (C0, C1, C2)))
        return Resolvent(self.Sx + C0 * y + C1, self.Sy - C0 * x - C2, self.D,
                         self.provenance, self.point, g)


@dataclass(frozen=True)
class SolitonCandidate:
    m: MetricAnsatz
    V: object
    lam: float


@dataclass
class ResidualReport:
    residuals: dict
    argmax: dict
    grid: list
    gauge: tuple = (0.0, 0.0, 0.0)
    skipped: dict = field(default_factory=dict)

    def worst(self, keys=None):
        keys = keys or [k for k in self.residuals if self.residuals[k] is not None]
        return max(self.residuals[k] for k in keys)

    def passed(self, tol, keys=None):
        return self.worst(keys) <= tol

    def to_json(self):
        return {
            "residuals": {k: v for k, v in self.residuals.items()},
            "argmax": {k: list(v) if v is not None else None for k, v in self.argmax.items()},
            "grid": [list(p) for p in self.grid],
            "gauge": list(self.gauge),
            "skipped": dict(self.skipped),
        }


def _rel(value, *terms):
    return abs(value) / (1.0 + max(abs(t) for t in terms))


# ------------------------------------------------------------ resolvents

def _gamma(L, lam):
    P = L.P
    q, qx, qy, qxx, qyy = P[0, 0], P[1, 0], P[0, 1], P[2, 0], P[0, 2]
    A, A1 = L.A[:2]
    B, B1 = L.B[:2]
    return q * (qx * A1 + qxx * A + qy * B1 + qyy * B) - (qx * qx * A + qy * qy * B) - lam


def denominator(L):
    """D and its scale |A B' q_x| + |A' B q_y| + |A' B' q| / 2."""
    P = L.P
    q, qx, qy = P[0, 0], P[1, 0], P[0, 1]
    A, A1 = L.A[:2]
    B, B1 = L.B[:2]
    t1, t2, t3 = A * B1 * qx, A1 * B * qy, 0.5 * A1 * B1 * q
    return t1 + t2 - t3, abs(t1) + abs(t2) + abs(t3)


def resolvent_general(m, lam, x, y):
    """Unique (S^x, S^y) solving the coupling relation and the final (xx) relation."""
    L = m.local(x, y)
    D, scale = denominator(L)
    if not abs(D) > D_THRESHOLD * scale or scale == 0:
        raise DegenerateD(f"D = {D} (scale {scale}) at ({x}, {y})")
    P = L.P
    q, qx, qy = P[0, 0], P[1, 0], P[0, 1]
    A, A1, A2 = L.A[:3]
    B, B1, B2 = L.B[:3]
    g = _gamma(L, lam) - 0.5 * B2 * q * q
    Sx = q * ((B * qy - 0.5 * B1 * q) * (A2 - B2) * q + B1 * g) / D
    Sy = q * (A1 * g - A * (A2 - B2) * q * qx) / D
    return Resolvent(float(Sx), float(Sy), float(D), "general-2x2", (x, y))


def resolvent_homogeneous(m, x, y):
    """Resolvent from the coupling relation and x S^x + y S^y = 2 q^2."""
    if not conformal.is_homogeneous(m.q):
        raise NotHomogeneous(f"{m.q!r} is not homogeneous of degree one")
    L = m.local(x, y)
    q = L.q
    A1, A2 = L.A[1:3]
    B1, B2 = L.B[1:3]
    den = y * A1 + x * B1
    scale = abs(y * A1) + abs(x * B1)
    if not abs(den) > D_THRESHOLD * scale or scale == 0:
        raise DegenerateD(f"y A' + x B' = {den} at ({x}, {y})")
    Sx = q * q * (y * (A2 - B2) + 2 * B1) / den
    if y != 0:
        Sy = (2 * q * q - x * Sx) / y
    elif B1 != 0:
        Sy = q * q * (B2 - A2) / B1 + Sx * A1 / B1
    else:
        raise DegenerateD(f"y = 0 and B' = 0 at ({x}, {y})")
    return Resolvent(float(Sx), float(Sy), float(den), "homogeneous", (x, y))


def resolvent_from_vector(m, V, x, y):
    L = m.local(x, y, order=0)
    vx, vy = V(x, y)
    P = L.P
    Sx = 2 * P[0, 0] * P[1, 0] + vx / L.A[0]
    Sy = 2 * P[0, 0] * P[0, 1] + vy / L.B[0]
    return Resolvent(float(Sx), float(Sy), math.nan, "explicit", (x, y))


class SSource:
    """S as a function of (x, y) with first and second partials."""

    provenance = "explicit"

    def values(self, x, y):
        raise NotImplementedError

    def first(self, x, y):
        """J[k, i] = d_i S^k."""
        return _fd_first(self.values, x, y, FD_H1)

    def second(self, x, y):
        """H[k, i, j] = d_i d_j S^k."""
        H = np.empty((2, 2, 2))
        for j, (dx, dy) in enumerate(((FD_H2, 0.0), (0.0, FD_H2))):
            st = [self.first(x + a * dx, y + a * dy) for a in (-2, -1, 1, 2)]
            H[:, :, j] = (st[0] - 8 * st[1] + 8 * st[2] - st[3]) / (12 * FD_H2)
        return 0.5 * (H + H.transpose(0, 2, 1))


def _fd_first(fn, x, y, h):
    J = np.empty((2, 2))
    for i, (dx, dy) in enumerate(((h, 0.0), (0.0, h))):
        st = [np.asarray(fn(x + a * dx, y + a * dy)) for a in (-2, -1, 1, 2)]
        J[:, i] = (st[0] - 8 * st[1] + 8 * st[2] - st[3]) / (12 * h)
    return J


class FromVector(SSource):
    """S from V, with analytic first partials (V's Jacobian)."""

    provenance = "explicit"

    def __init__(self, m, V):
        self.m, self.V = m, V

    def values(self, x, y):
        r = resolvent_from_vector(self.m, self.V, x, y)
        return r.Sx, r.Sy

    def first(self, x, y):
        L = self.m.local(x, y, order=1)
        vx, vy, J = self.V.evaluate(x, y)
        P = L.P
        q, qx, qy = P[0, 0], P[1, 0], P[0, 1]
        A, A1 = L.A[:2]
        B, B1 = L.B[:2]
        out = np.empty((2, 2))
        out[0, 0] = 2 * qx * qx + 2 * q * P[2, 0] + (J[0, 0] * A - vx * A1) / (A * A)
        out[0, 1] = 2 * qy * qx + 2 * q * P[1, 1] + J[0, 1] / A
        out[1, 0] = 2 * qx * qy + 2 * q * P[1, 1] + J[1, 0] / B
        out[1, 1] = 2 * qy * qy + 2 * q * P[0, 2] + (J[1, 1] * B - vy * B1) / (B * B)
        return out


class FromResolvent(SSource):
    """Pointwise resolvent (general or homogeneous) differentiated numerically."""

    #: offset for the limit across an isolated zero of D
    LIMIT_STEP = 1e-3

    def __init__(self, m, lam, kind="general", removable=False):
        self.m, self.lam, self.kind = m, lam, kind
        self.removable = removable
        self.provenance = "general-2x2" if kind == "general" else "homogeneous"

    def resolvent(self, x, y):
        if self.kind == "general":
            return resolvent_general(self.m, self.lam, x, y)
        return resolvent_homogeneous(self.m, x, y)

    def values(self, x, y):
        try:
            r = self.resolvent(x, y)
        except DegenerateD:
            if not self.removable:
                raise
            return self._limit(x, y)
        return r.Sx, r.Sy

    def _limit(self, x, y):
        # S is smooth across a curve where D and the numerators vanish together;
        # average over a cross of points and extrapolate in the step (O(h^4))
        def cross(h):
            vals = []
            for dx, dy in ((h, 0.0), (0.0, h)):
                try:
                    pair = [self._direct(x + dx, y + dy), self._direct(x - dx, y - dy)]
                except DegenerateD:
                    # D also vanishes along this axis; use the other one
                    continue
                vals.extend(pair)
            if not vals:
                raise DegenerateD(f"D vanishes on a neighbourhood of ({x}, {y})")
            return np.mean(np.array(vals), axis=0)

        h = self.LIMIT_STEP
        s = (4 * cross(h / 2) - cross(h)) / 3
        return float(s[0]), float(s[1])

    def _direct(self, x, y):
        r = self.resolvent(x, y)
        return r.Sx, r.Sy


class Gauged(SSource):
    def __init__(self, base, C0=0.0, C1=0.0, C2=0.0):
        self.base, self.C = base, (C0, C1, C2)
        self.provenance = base.provenance

    def values(self, x, y):
        C0, C1, C2 = self.C
        sx, sy = self.base.values(x, y)
        return sx + C0 * y + C1, sy - C0 * x - C2

    def first(self, x, y):
        C0 = self.C[0]
        return self.base.first(x, y) + np.array([[0.0, C0], [-C0, 0.0]])

    def second(self, x, y):
        return self.base.second(x, y)


def vector_from_resolvent(m, source):
    """V^x = A (S^x - 2 q q_x), V^y = B (S^y - 2 q q_y)."""

    def fn(x, y):
        L = m.local(x, y, order=0)
        sx, sy = source.values(x, y)
        P = L.P
        return L.A[0] * (sx - 2 * P[0, 0] * P[1, 0]), L.B[0] * (sy - 2 * P[0, 0] * P[0, 1])

    return CustomField(fn, h=FD_H1, label=f"from-resolvent:{source.provenance}")


class RescaledField(PlaneVectorField):
    """(A~/A) V^x d_x + (B~/B) V^y d_y: V for new profiles with S held fixed."""

    kind = "rescaled"

    def __init__(self, V, A, B, A_new, B_new):
        self.V, self.A, self.B, self.A_new, self.B_new = V, A, B, A_new, B_new

    def evaluate(self, x, y):
        vx, vy, J = self.V.evaluate(x, y)
        a, a1 = float(self.A.deriv(x, 0)), float(self.A.deriv(x, 1))
        b, b1 = float(self.B.deriv(y, 0)), float(self.B.deriv(y, 1))
        an, an1 = float(self.A_new.deriv(x, 0)), float(self.A_new.deriv(x, 1))
        bn, bn1 = float(self.B_new.deriv(y, 0)), float(self.B_new.deriv(y, 1))
        ra, rb = an / a, bn / b
        ra1 = (an1 * a - an * a1) / (a * a)
        rb1 = (bn1 * b - bn * b1) / (b * b)
        K = np.array([[ra1 * vx + ra * J[0, 0], ra * J[0, 1]],
                      [rb * J[1, 0], rb1 * vy + rb * J[1, 1]]])
        return ra * vx, rb * vy, K

    def to_json(self):
        return {"kind": self.kind, "base": self.V.to_json()}


def quadratic_shift(c, shift):
    """(A + shift x^2, B - shift y^2, lambda) with V transported so S is unchanged.

    For homogeneous q the reduced relations only see A'' - B'' and the
    combinations y A' + x B', both preserved by this shift.
    """
    if not conformal.is_homogeneous(c.m.q):
        raise NotHomogeneous("the quadratic shift needs q homogeneous of degree one")
    A, B = QuadraticShift(c.m.A, shift), QuadraticShift(c.m.B, -shift)
    m = c.m.with_profiles(A, B)
    return SolitonCandidate(m, RescaledField(c.V, c.m.A, c.m.B, A, B), c.lam)


# ------------------------------------------------------------ residuals

def full_tensor(m, V, lam, x, y):
    """Ric + 1/2 L_V g - lambda g as a SymTensor4."""
    L = m.local(x, y)
    ric = curvature._ricci_local(L)
    lie = curvature._lie_local(L, V)
    g = curvature.metric_components(m, x, y)
    return ric + 0.5 * lie - lam * g, (ric, lie, g)


def soliton_residual(c, x, y):
    T, _ = full_tensor(c.m, c.V, c.lam, x, y)
    return T.norm()


def soliton_residual_relative(c, x, y):
    T, (ric, lie, g) = full_tensor(c.m, c.V, c.lam, x, y)
    return T.norm() / (1.0 + max(ric.norm(), 0.5 * lie.norm(), abs(c.lam) * g.norm()))


def _pointwise_relations(m, lam, src, V, x, y):
    L = m.local(x, y)
    P = L.P
    q, qx, qy = P[0, 0], P[1, 0], P[0, 1]
    qxx, qxy, qyy = P[2, 0], P[1, 1], P[0, 2]
    A, A1, A2 = L.A
    B, B1, B2 = L.B
    sx, sy = src.values(x, y)
    J = src.first(x, y)
    out = {}
    out["monge_ampere"] = _rel(qxx * qyy - qxy * qxy, qxx * qyy, qxy * qxy)
    out["xy_relation"] = _rel(J[0, 1] + J[1, 0] - 4 * qx * qy, J[0, 1], J[1, 0], 4 * qx * qy)
    out["xx_vs_ss"] = _rel(J[0, 0] - 2 * qx * qx, J[0, 0], 2 * qx * qx)
    out["yy_vs_tt"] = _rel(J[1, 1] - 2 * qy * qy, J[1, 1], 2 * qy * qy)
    wx = A2 - sx * A1 / (q * q)
    wy = B2 - sy * B1 / (q * q)
    out["coupling_pde"] = _rel(wx - wy, A2, sx * A1 / q**2, B2, sy * B1 / q**2)
    t1 = (qx * A1 + qxx * A + qy * B1 + qyy * B) / q
    t2 = (qx * qx * A + qy * qy * B) / q**2
    t3 = (sx * qx * A + sy * qy * B) / q**3
    out["final_xx"] = _rel(lam / q**2 + 0.5 * wx - t1 + t2 + t3, lam / q**2, 0.5 * wx, t1, t2, t3)
    H = src.second(x, y)
    qk = (qx, qy)
    hess = np.array([[qxx, qxy], [qxy, qyy]])
    worst = 0.0
    for k in range(2):
        for i in range(2):
            for j in range(2):
                worst = max(worst, _rel(H[k, i, j] - 4 * qk[k] * hess[i, j], H[k, i, j], 4 * qk[k] * hess[i, j]))
    out["second_derivatives"] = worst
    out["second_compatibility"] = _second_compat(m, lam, L)
    T, (ric, lie, g) = full_tensor(m, V, lam, x, y)
    out["full_tensor"] = T.norm() / (1.0 + max(ric.norm(), 0.5 * lie.norm(), abs(lam) * g.norm()))
    return out


def _second_compat(m, lam, L):
    """(A'/B') d_xS^x + (B'/A') d_yS^y - (d_yS^x + d_xS^y) - 2 (A'q_x - B'q_y)^2 / (A'B')
    on the general resolvent; None when A' or B' vanishes or D is degenerate."""
    A1, B1 = L.A[1], L.B[1]
    if A1 == 0 or B1 == 0:
        return None
    src = FromResolvent(m, lam)
    try:
        J = src.first(L.x, L.y)
    except DegenerateD:
        return None
    qx, qy = L.P[1, 0], L.P[0, 1]
    terms = (A1 / B1 * J[0, 0], B1 / A1 * J[1, 1], J[0, 1], J[1, 0],
             2 * (A1 * qx - B1 * qy) ** 2 / (A1 * B1))
    return _rel(terms[0] + terms[1] - terms[2] - terms[3] - terms[4], *terms)


def relation_residuals(c, grid, source=None, gauge=(0.0, 0.0, 0.0)):
    """Sup of every reduced relation over ``grid``, each normalized by 1 + its largest term.

    ``source`` defaults to S computed from c.V.  A nonzero ``gauge`` shifts S by
    (C0 y + C1, -C0 x - C2) and V by the matching field.
    """
    grid = [tuple(map(float, p)) for p in grid]
    if not grid:
        raise ValueError("grid must be nonempty")
    V = c.V
    src = source or FromVector(c.m, V)
    if any(gauge):
        src = Gauged(src, *gauge)
        V = SumField([V, GaugeField(c.m.A, c.m.B, *gauge)])
    sup = {k: None for k in RESIDUAL_KEYS}
    arg = {k: None for k in RESIDUAL_KEYS}
    skipped = {}
    for x, y in grid:
        vals = _pointwise_relations(c.m, c.lam, src, V, x, y)
        for k, v in vals.items():
            if v is None:
                skipped[k] = "needs A', B' != 0 and a nondegenerate D"
                continue
            if sup[k] is None or v > sup[k] or not math.isfinite(v):
                sup[k], arg[k] = float(v), (x, y)
    for k in sup:
        if sup[k] is not None:
            skipped.pop(k, None)
    return ResidualReport(sup, arg, grid, tuple(gauge), skipped)


def infer_lambda(m, V, grid):
    """Least-squares lambda over all ten components at every grid point."""
    num = den = 0.0
    rows = []
    for x, y in grid:
        T0, (ric, lie, g) = full_tensor(m, V, 0.0, x, y)
        r0 = np.array([T0.m[i, j] for i, j in curvature.PAIRS])
        gv = np.array([g.m[i, j] for i, j in curvature.PAIRS])
        num += float(r0 @ gv)
        den += float(gv @ gv)
        rows.append((r0, gv))
    if len(rows) < 1 or math.sqrt(den) < 1e-12:
        raise IllConditioned("lambda sensitivity column is numerically zero")
    lam = num / den
    res = max(float(np.max(np.abs(r0 - lam * gv))) for r0, gv in rows)
    return lam, res


def fit_arctan_killing(a0, b0, c, m, points=((0.3, 0.9), (-0.2, 0.7))):
    """Choose eps in {+1, -1} and the Killing coefficient by residual minimization."""
    a0, b0 = float(a0), float(b0)
    lam = -2 * a0 * b0
    best = None
    for eps in (1.0, -1.0):
        V = curvature.ArctanKilling(a0, b0, c, 0.0, eps)
        V0 = V.killing_part()
        r0, r1 = [], []
        for x, y in points:
            T, _ = full_tensor(m, V, lam, x, y)
            K = 0.5 * curvature.lie_derivative(m, V0, x, y).m
            r0.append(T.m.ravel())
            r1.append(K.ravel())
        r0, r1 = np.concatenate(r0), np.concatenate(r1)
        ct = -float(r0 @ r1) / float(r1 @ r1) if float(r1 @ r1) > 1e-24 else 0.0
        err = float(np.max(np.abs(r0 + ct * r1)))
        if best is None or err < best[0]:
            best = (err, curvature.ArctanKilling(a0, b0, c, ct, eps))
    return best[1], best[0]


# ------------------------------------------------- conformally flat branch

def _flat_system(q, lam, x, y):
    """Pointwise (S^x, S^y) for A = B = 1 and the leftover scalar condition.

    Rows: q_x S^x + q_y S^y = -gamma and its derivative along grad q.  When q
    is homogeneous the second row vanishes identically (grad q spans the
    Hessian kernel); it is then replaced by x S^x + y S^y = 2 q^2 and its
    right-hand side becomes a condition on q alone.
    """
    P = q.partials(x, y)
    Q, qx, qy = P[0, 0], P[1, 0], P[0, 1]
    qxx, qxy, qyy = P[2, 0], P[1, 1], P[0, 2]
    qxxx, qxxy, qxyy, qyyy = P[3, 0], P[2, 1], P[1, 2], P[0, 3]
    lap = qxx + qyy
    grad2 = qx * qx + qy * qy
    gam = -Q * Q * lap + Q * (grad2 + lam)
    gx = -2 * Q * qx * lap - Q * Q * (qxxx + qxyy) + qx * (grad2 + lam) + Q * (2 * qx * qxx + 2 * qy * qxy)
    gy = -2 * Q * qy * lap - Q * Q * (qxxy + qyyy) + qy * (grad2 + lam) + Q * (2 * qx * qxy + 2 * qy * qyy)
    gt = 2 * grad2 * grad2 + qx * gx + qy * gy
    sep = qx * qxy - qy * qxx
    scale = abs(qx * qxy) + abs(qy * qxx)
    if scale == 0 or abs(sep) <= 1e-10 * scale:
        raise SeparableBranch(f"q_x q_xy - q_y q_xx = {sep} at ({x}, {y}); use the theta-ODE path")
    row2 = np.array([qx * qxx + qy * qxy, qx * qxy + qy * qyy])
    hscale = abs(qx * qxx) + abs(qy * qxy) + abs(qx * qxy) + abs(qy * qyy)
    leftover = 0.0
    if np.abs(row2).max() <= 1e-10 * hscale:
        leftover = _rel(gt, 2 * grad2 * grad2, qx * gx, qy * gy)
        M = np.array([[qx, qy], [x, y]])
        rhs = np.array([-gam, 2 * Q * Q])
    else:
        M = np.array([[qx, qy], row2])
        rhs = -np.array([gam, gt])
    det = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
    if abs(det) <= 1e-10 * (abs(M[0, 0] * M[1, 1]) + abs(M[0, 1] * M[1, 0])):
        raise DegenerateD(f"S is not pointwise determined at ({x}, {y}) (radially symmetric q)")
    return np.linalg.solve(M, rhs), P, leftover


def conformally_flat_residuals(q, lam, grid, source=None):
    """Residuals of d_x S^x = 2 q_x^2 and d_y S^y = 2 q_y^2 for A = B = 1.

    With ``source`` (an SSource) S is taken from it instead of the pointwise
    solve, and the first-row residual is reported as well.
    """
    grid = [tuple(map(float, p)) for p in grid]
    keys = ("pair_x", "pair_y", "scalar", "first_row")
    sup = dict.fromkeys(keys, 0.0)
    arg = dict.fromkeys(keys)
    for x, y in grid:
        P = q.partials(x, y)
        if source is None:
            _, _, extra = _flat_system(q, lam, x, y)
            J = _fd_first(lambda a, b: _flat_system(q, lam, a, b)[0], x, y, FD_H1)
            row = 0.0
        else:
            extra = 0.0
            J = source.first(x, y)
            sx, sy = source.values(x, y)
            Q, qx, qy = P[0, 0], P[1, 0], P[0, 1]
            gam = -Q * Q * (P[2, 0] + P[0, 2]) + Q * (qx * qx + qy * qy + lam)
            row = _rel(qx * sx + qy * sy + gam, qx * sx, qy * sy, gam)
        vals = {
            "pair_x": _rel(J[0, 0] - 2 * P[1, 0] ** 2, J[0, 0], 2 * P[1, 0] ** 2),
            "pair_y": _rel(J[1, 1] - 2 * P[0, 1] ** 2, J[1, 1], 2 * P[0, 1] ** 2),
            "scalar": extra,
            "first_row": row,
        }
        for k, v in vals.items():
            if arg[k] is None or v > sup[k]:
                sup[k], arg[k] = float(v), (x, y)
    return ResidualReport(sup, arg, grid)


# ------------------------------------------------- warped product branch

def warped_coupled_residuals(h, A, lam, C1, C2, b1, interval, n=41):
    """Sup residuals of the coupled (A, h) system with H = int_a^x (h')^2."""
    a, b = map(float, interval)
    xs = np.linspace(a, b, n)[1:]
    bc = b1 * C2
    Lam = lam + 0.5 * bc
    r1 = r2 = 0.0
    H = 0.0
    left = a
    for x in xs:
        val = _quad(h, left, x)
        H += val
        left = x
        h0, h1, h2 = (float(h.deriv(x, k)) for k in range(3))
        a0_, a1_, a2_ = (float(A.deriv(x, k)) for k in range(3))
        k1 = h0 * h0 * a2_ - (2 * H + C1) * a1_ - bc
        r1 = max(r1, _rel(k1, h0 * h0 * a2_, (2 * H + C1) * a1_, bc))
        parts = (Lam * h0, -h0 * h0 * (h1 * a1_ + h2 * a0_), h0 * h1 * h1 * a0_, (2 * H + C1) * h1 * a0_)
        r2 = max(r2, _rel(sum(parts), *parts))
    return r1, r2


def _quad(h, a, b):
    with np.errstate(all="raise"):
        try:
            val, err = integrate.quad(lambda t: float(h.deriv(t, 1)) ** 2, a, b, epsabs=1e-13, epsrel=1e-12)
        except (FloatingPointError, integrate.IntegrationWarning) as exc:
            raise QuadratureFailure(str(exc)) from None
    if not math.isfinite(val) or err > 1e-8 * (1 + abs(val)):
        raise QuadratureFailure(f"H quadrature error estimate {err}")
    return val


@dataclass
class LatticeScan:
    point: tuple
    tried: int
    skipped: int
    best: float
    best_profiles: tuple
    worst: float

    def to_json(self):
        return {"point": list(self.point), "tried": self.tried, "skipped": self.skipped,
                "best": self.best, "best_profiles": [list(c) for c in self.best_profiles],
                "worst": self.worst}


def sqrt_xy_scan(point=(1.0, 2.0), coeffs=(-1.0, 0.0, 1.0), degree=3):
    """Smallest relation residual for q = sqrt(xy) over a lattice of polynomial A, B.

    A and B run over all polynomials of degree <= ``degree`` with coefficients
    from ``coeffs`` that are positive at ``point``.  S comes from the homogeneous
    resolvent, so neither V nor lambda is needed, and only gauge-invariant
    first-order relations are scored: the result bounds every gauge choice.
    Pairs where the resolvent is degenerate are skipped.
    """
    x, y = map(float, point)
    q = conformal.SqrtXY()
    polys = [c for c in itertools.product(coeffs, repeat=degree + 1)]
    A_ok = [c for c in polys if np.polyval(c[::-1], x) > 0]
    B_ok = [c for c in polys if np.polyval(c[::-1], y) > 0]
    keys = ("xy_relation", "xx_vs_ss", "yy_vs_tt")
    best, best_pair, worst, skipped = math.inf, None, 0.0, 0
    for ca in A_ok:
        A = Polynomial(list(ca))
        for cb in B_ok:
            m = MetricAnsatz(A, Polynomial(list(cb)), q)
            src = FromResolvent(m, 0.0, kind="homogeneous")
            try:
                L = m.local(x, y, order=1)
                J = src.first(x, y)
            except (DegenerateD, ValueError):
                skipped += 1
                continue
            qx, qy = L.P[1, 0], L.P[0, 1]
            r = {
                "xy_relation": _rel(J[0, 1] + J[1, 0] - 4 * qx * qy, J[0, 1], J[1, 0], 4 * qx * qy),
                "xx_vs_ss": _rel(J[0, 0] - 2 * qx * qx, J[0, 0], 2 * qx * qx),
                "yy_vs_tt": _rel(J[1, 1] - 2 * qy * qy, J[1, 1], 2 * qy * qy),
            }
            v = max(r[k] for k in keys)
            if not math.isfinite(v):
                skipped += 1
                continue
            worst = max(worst, v)
            if v < best:
                best, best_pair = v, (ca, cb)
    tried = len(A_ok) * len(B_ok)
    return LatticeScan((x, y), tried, skipped, float(best), best_pair, float(worst))
