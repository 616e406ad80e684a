"""Reduced ODEs: the homogeneous-profile equation for f(z) and the two
third-order equations for theta(t), with event-aware integration.

Homogeneous profile equation (K = a0 + b0 z^2, bracket = b0 z f - K f'):

    K * bracket * f^2 * f''' = N(z, f, f', f'') - b0 z f^2 f'' bracket

The coefficient of f''' vanishes at z = 0 whenever f'(0) = 0, so starts there
either lie on a consistency root (series) or are moved off to z = +-eps.
"""
import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import BPoly, CubicHermiteSpline

from . import kernels
from .errors import (DomainError, InvalidSpec, MissingDerivative, NotExtended,
                     SingularDenominator, StepSizeUnderflow, UnsupportedOrder)

ZERO = "ZeroOfF"
BLOWUP = "DerivativeBlowup"
DENOM = "DenominatorZero"
EDGE = "DomainEdge"

# relative size under which bracket and numerator count as vanishing together
MANIFOLD_TOL = 1e-9
# root-2 starts leave z = 0 along the Taylor series out to this radius
SERIES_RADIUS = 1e-2


@dataclass
class Controls:
    span: tuple = (-10.0, 10.0)
    rtol: float = 1e-11
    atol: float = 1e-12
    blowup: float = 1e6
    max_step: float = 0.05
    #: extra growth allowed when probing past a blow-up for the zero location
    probe_factor: float = 1e6
    eps: float = 1e-3
    #: largest gap between stored nodes; extra nodes come from the dense output
    node_spacing: float = 0.005


@dataclass(frozen=True)
class Event:
    kind: str
    location: float
    data: dict = field(default_factory=dict)

    def to_json(self):
        return {"kind": self.kind, "location": self.location, "data": self.data}


# ------------------------------------------------------------ f''' formula

def star_terms(a0, b0, lam, z, f, f1, f2):
    """Separate terms of the numerator, for relative vanishing tests."""
    K = a0 + b0 * z * z
    Q = a0 * f1 * f1 + b0 * (f - z * f1) ** 2
    br = b0 * z * f - K * f1
    return (-3 * Q * Q, -lam * Q, (4 * a0 - b0 * z * z) * b0 * f**3 * f2,
            K * K * f * f2 * (f1 * f1 - f * f2), lam * K * f * f2, -b0 * z * f * f * f2 * br)


def f_triple_prime(a0, b0, lam, z, f, f1, f2):
    """f''' from the homogeneous-profile equation.

    On the invariant family f = C sqrt(K), where bracket and numerator vanish
    together, the limit -3 b0 z f'' / K is returned.
    """
    K = a0 + b0 * z * z
    if K == 0:
        raise SingularDenominator("a0+b0z^2=0", f"a0 + b0 z^2 = 0 at z={z}")
    if f == 0:
        raise SingularDenominator("f=0", f"f = 0 at z={z}")
    br = b0 * z * f - K * f1
    br_scale = abs(b0 * z * f) + abs(K * f1)
    if abs(br) <= MANIFOLD_TOL * br_scale or br == 0:
        terms = star_terms(a0, b0, lam, z, f, f1, f2)
        if abs(sum(terms)) <= MANIFOLD_TOL * (sum(abs(t) for t in terms) + 1e-300):
            return -3 * b0 * z * f2 / K
        raise SingularDenominator("bracket=0", f"b0 z f - K f' = {br} at z={z}")
    return float(kernels.star_f3(float(a0), float(b0), float(lam), float(z), float(f),
                                 float(f1), float(f2), False))


def consistency_roots(a0, b0, lam, f0):
    """Values of f''(0) compatible with f'(0) = 0 and a bounded f'''(0)."""
    return (b0 * f0 / a0, (3 * b0 * f0 * f0 + lam) / (a0 * f0))


def root2_series(a0, b0, lam, f0):
    """Even Taylor coefficients (through z^8) of the analytic solution with
    f'(0) = 0 and f''(0) on the second consistency root."""
    if 2 * b0 * f0 * f0 + lam == 0:
        raise InvalidSpec("the consistency roots coincide; the series is not determined")
    b, L, F = b0 * f0 * f0, lam, f0
    f2 = (3 * b + L) / (a0 * F)
    c4 = (-3 * b**2 + 2 * b * L + L**2) / (24 * a0**2 * F**3)
    c6 = (183 * b**3 + 187 * b**2 * L + 93 * b * L**2 + 17 * L**3) / (720 * a0**3 * F**5)
    c8 = (-19143 * b**4 - 25980 * b**3 * L - 13490 * b**2 * L**2 - 2700 * b * L**3
          - 127 * L**4) / (40320 * a0**4 * F**7)
    return [F, 0.0, 0.5 * f2, 0.0, c4, 0.0, c6, 0.0, c8]


def star_residual(a0, b0, lam, z, f, f1, f2, f3):
    """Equation residual K*bracket*f^2*f''' - numerator."""
    num, br = kernels.star_parts(a0, b0, lam, z, f, f1, f2)
    return (a0 + b0 * z * z) * br * f * f * f3 - num


def star_star_residual(theta, lam, t):
    """Residual of the theta equation for A = B = 1 (lambda~ = lambda / 2)."""
    th, t1, t2, t3 = (float(v) for v in theta.derivs(t, 3))
    lt = 0.5 * lam
    return th * th * t1 * t3 - th * th * t2 * t2 + th * (lt + t1 * t1) * t2 - 3 * t1**4 - lt * t1 * t1


def star_star_bar_residual(theta, lam, t):
    """Residual of the theta equation for (A, B) = (x, y)."""
    th, t1, t2, t3 = (float(v) for v in theta.derivs(t, 3))
    w = th - t1 * t
    return (t * th * th * (th - 2 * t * t1) * t3 + 2 * t * t * th * th * t2 * t2
            + th * (3 * th * th - t * th * t1 - 2 * t * t * t1 * t1 - 2 * lam * t) * t2
            + 6 * t1 * t1 * w * w - 2 * lam * t1 * w)


def theta_aux(variant, lam, t, th, t1, t2):
    """Theta = int (theta')^2 fixed by the algebraic relation of each variant."""
    if variant == 1:
        if t1 == 0:
            raise SingularDenominator("theta'=0", f"theta' = 0 at t={t}")
        return -(lam * th + 2 * th * (t1 * t1 - th * t2)) / (4 * t1)
    lead = th - 2 * t * t1
    if lead == 0:
        raise SingularDenominator("theta-2t*theta'=0", f"theta - 2 t theta' = 0 at t={t}")
    return (lam * th - 2 * th * th * t1 + t * th * (t1 * t1 - th * t2)) / lead


def theta_relation_residual(variant, lam, t, th, t1, t2, aux):
    if variant == 1:
        parts = (lam * th, 2 * th * (t1 * t1 - th * t2), 4 * t1 * aux)
    else:
        parts = (aux * (th - 2 * t * t1), -lam * th, 2 * th * th * t1, -t * th * (t1 * t1 - th * t2))
    return abs(sum(parts)) / (1 + max(abs(p) for p in parts))


# ------------------------------------------------------------ solutions

class OdeSolution:
    """Dense trajectory through quintic Hermite interpolation of (f, f', f'')."""

    def __init__(self, param, nodes, events, problem, start):
        self.param = param
        self.nodes = {k: np.asarray(v, dtype=float) for k, v in nodes.items()}
        self.events = list(events)
        self.problem = dict(problem)
        self.start = dict(start)
        z = self.nodes["z"]
        if len(z) < 2 or np.any(np.diff(z) <= 0):
            raise InvalidSpec("solution nodes must be strictly increasing")
        self.interval = (float(z[0]), float(z[-1]))
        self._series = None
        if "series" in self.start:
            self._series = np.polynomial.Polynomial(self.start["series"])
            self._series_r = float(self.start["series_radius"])
        data = np.column_stack([self.nodes["f"], self.nodes["f1"], self.nodes["f2"]])
        self._poly = BPoly.from_derivatives(z, data)
        # f'' from the quintic loses ~1/h^2 digits on fine meshes; interpolate it
        # separately with the equation's own f''' as slope
        self._f2 = CubicHermiteSpline(z, self.nodes["f2"], self._node_f3())
        self._aux = None
        if "aux" in self.nodes:
            self._aux = CubicHermiteSpline(z, self.nodes["aux"], self.nodes["f1"] ** 2)

    def _node_f3(self):
        z, f, f1, f2 = (self.nodes[k] for k in ("z", "f", "f1", "f2"))
        out = np.asarray(self._poly(z, nu=3), dtype=float)
        for i in range(len(z)):
            if self._near_start(z[i]):
                out[i] = self._series.deriv(3)(z[i])
                continue
            try:
                v = self._f3(float(z[i]), float(f[i]), float(f1[i]), float(f2[i]))
            except (SingularDenominator, ZeroDivisionError):
                continue
            if math.isfinite(v):
                out[i] = v
        return out

    def _value(self, z, order):
        if order == 2:
            return self._f2(z)
        return self._poly(z, nu=order)

    # -- profile-like interface
    def _check(self, z):
        lo, hi = self.interval
        za = np.asarray(z, dtype=float)
        if np.any(~np.isfinite(za)) or np.any(za < lo) or np.any(za > hi):
            raise DomainError(f"{self.param}={z!r} outside the integrated range {self.interval}")

    def _f3(self, z, f, f1, f2):
        p = self.problem
        if p["equation"] == "star":
            if p.get("manifold"):
                return -3 * p["b0"] * z * f2 / (p["a0"] + p["b0"] * z * z)
            return f_triple_prime(p["a0"], p["b0"], p["lam"], z, f, f1, f2)
        return float(kernels.theta_f3(int(p["variant"]), float(p["lam"]), float(z),
                                      float(f), float(f1), float(f2)))

    def deriv(self, z, order=0):
        if not 0 <= order <= 3:
            raise UnsupportedOrder(f"order {order} not in 0..3")
        self._check(z)
        if order <= 2:
            out = self._value(np.asarray(z, dtype=float), order)
            return out if np.ndim(out) else float(out)
        if np.ndim(z):
            return np.array([self.deriv(float(v), 3) for v in np.ravel(z)]).reshape(np.shape(z))
        if self._near_start(z):
            return float(self._series.deriv(3)(z))
        f, f1, f2 = (float(self._value(z, k)) for k in range(3))
        return self._f3(float(z), f, f1, f2)

    def _near_start(self, z):
        return self._series is not None and abs(float(z)) <= self._series_r

    def eval(self, z):
        return self.deriv(z, 0)

    __call__ = eval

    def derivs(self, z, n=3):
        if n > 3:
            raise MissingDerivative("solutions carry derivatives up to order 3")
        self._check(z)
        if self._near_start(z):
            return tuple(float(self._series.deriv(k)(z)) if k else float(self._series(z))
                         for k in range(n + 1))
        vals = [float(self._value(z, k)) for k in range(min(n, 2) + 1)]
        if n == 3:
            vals.append(self._f3(float(z), *vals))
        return tuple(vals)

    def aux(self, z):
        if self._aux is None:
            raise MissingDerivative("this solution carries no auxiliary channel")
        self._check(z)
        return float(self._aux(z))

    def zeros(self):
        return sorted(e.location for e in self.events if e.kind == ZERO)

    def events_of(self, kind):
        return [e for e in self.events if e.kind == kind]

    @property
    def L1(self):
        neg = [z for z in self.zeros() if z < 0]
        return max(neg) if neg else None

    @property
    def L2(self):
        pos = [z for z in self.zeros() if z > 0]
        return min(pos) if pos else None

    def is_concave(self):
        return bool(np.all(self.nodes["f2"] < 0))

    def residual_profile(self, n=200, near=1e3):
        """Max relative equation residual at midpoints between nodes, with f''
        and f''' taken from the f'' spline.  Intervals touching a node with
        |f'| or |f''| above ``near`` (the approach to an event) are skipped."""
        z = self.nodes["z"]
        big = np.maximum(np.abs(self.nodes["f1"]), np.abs(self.nodes["f2"])) > near
        ok = ~(big[:-1] | big[1:])
        if self.start.get("mode") == "offset":
            # (-eps, eps) was never integrated; the interpolant just bridges it
            ok &= ~((z[:-1] < 0) & (z[1:] > 0))
        mids = (0.5 * (z[:-1] + z[1:]))[ok]
        if len(mids) > n:
            mids = mids[np.linspace(0, len(mids) - 1, n).astype(int)]
        worst = 0.0
        for m in mids:
            f, f1 = (float(self._poly(m, nu=k)) for k in range(2))
            f2, f3 = float(self._f2(m)), float(self._f2(m, 1))
            worst = max(worst, self._rel_residual(m, f, f1, f2, f3))
        return worst

    def _rel_residual(self, z, f, f1, f2, f3):
        p = self.problem
        if p["equation"] == "star":
            if p.get("manifold"):
                K = p["a0"] + p["b0"] * z * z
                return abs(K * f3 + 3 * p["b0"] * z * f2) / (1 + abs(K * f3))
            K = p["a0"] + p["b0"] * z * z
            br = p["b0"] * z * f - K * f1
            lhs = K * br * f * f * f3
            terms = star_terms(p["a0"], p["b0"], p["lam"], z, f, f1, f2)
            return abs(lhs - sum(terms)) / (1 + abs(lhs) + sum(abs(t) for t in terms))
        g = _ThetaPoint(f, f1, f2, f3)
        fn = star_star_residual if p["variant"] == 1 else star_star_bar_residual
        return abs(fn(g, p["lam"], z)) / (1 + abs(f) ** 4 + abs(f1) ** 4 + abs(f2) ** 2)

    # -- serialization
    def to_json(self):
        out = {
            "kind": "ode_solution",
            "param": self.param,
            "problem": self.problem,
            "start": self.start,
            "events": [e.to_json() for e in self.events],
            "nodes": {k: v.tolist() for k, v in self.nodes.items()},
        }
        return out

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        events = [Event(e["kind"], e["location"], e.get("data", {})) for e in obj["events"]]
        return cls(obj["param"], obj["nodes"], events, obj["problem"], obj["start"])

    def to_csv(self, path):
        keys = [k for k in ("z", "f", "f1", "f2", "aux") if k in self.nodes]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(keys)
            for row in zip(*(self.nodes[k] for k in keys)):
                w.writerow([repr(float(v)) for v in row])

    @classmethod
    def read_csv_nodes(cls, path):
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        head = rows[0]
        cols = list(zip(*[[float(v) for v in r] for r in rows[1:]]))
        return {k: np.array(c) for k, c in zip(head, cols)}

    def __repr__(self):
        return (f"OdeSolution({self.problem}, range={self.interval}, "
                f"events={[(e.kind, round(e.location, 6)) for e in self.events]})")


class _ThetaPoint:
    def __init__(self, *vals):
        self.vals = vals

    def derivs(self, t, n):
        return self.vals[: n + 1]


# ------------------------------------------------------------ integration

def _run(rhs, args, t0, u0, t_end, ctl, event_fns, names):
    """One directional solve; returns (t, y, terminal event or None, status message)."""
    for fn in event_fns:
        fn.terminal = True
    sol = solve_ivp(rhs, (t0, t_end), np.asarray(u0, dtype=float), method="DOP853",
                    rtol=ctl.rtol, atol=ctl.atol, max_step=ctl.max_step,
                    events=event_fns, args=args, dense_output=True)
    hit = None
    for name, te, ye in zip(names, sol.t_events, sol.y_events):
        if len(te):
            cand = (name, float(te[0]), ye[0])
            if hit is None or abs(cand[1] - t0) < abs(hit[1] - t0):
                hit = cand
    return sol, hit


def _zero_estimate(z, f, f1, f2):
    """Local power-law fit f ~ C r^p: exponent and distance to the zero."""
    if f1 == 0:
        return None, None
    denom = 1 - f * f2 / (f1 * f1)
    if denom == 0:
        return None, None
    p = 1.0 / denom
    r = -p * f / f1
    return p, z + r


def _star_events(a0, b0, lam, ctl, manifold):
    M = ctl.blowup

    def zero(z, u, *a):
        return u[0]
    zero.direction = -1

    def big1(z, u, *a):
        return abs(u[1]) - M

    def big2(z, u, *a):
        return abs(u[2]) - M

    fns = [zero, big1, big2]
    names = [ZERO, BLOWUP, BLOWUP]
    if not manifold:
        def bracket(z, u, *a):
            return b0 * z * u[0] - (a0 + b0 * z * z) * u[1]
        fns.append(bracket)
        names.append(DENOM)
    return fns, names


def _probe(rhs, args, t0, u0, t_end, ctl, fns, names):
    """Continue past the blow-up threshold (no nodes kept) to sharpen the zero estimate."""
    deep = Controls(ctl.span, ctl.rtol, ctl.atol, ctl.blowup * ctl.probe_factor, ctl.max_step, ctl.eps)
    keep = [(fn, nm) for fn, nm in zip(fns, names) if nm != BLOWUP]
    big = [lambda t, u, *a: abs(u[1]) - deep.blowup, lambda t, u, *a: abs(u[2]) - deep.blowup]
    evs = [k[0] for k in keep] + big
    try:
        sol, _ = _run(rhs, args, t0, u0, t_end, deep, evs, [k[1] for k in keep] + [BLOWUP] * 2)
    except (ValueError, FloatingPointError):
        return t0, u0
    if sol.status == -1 or not len(sol.t):
        return t0, u0
    return float(sol.t[-1]), sol.y[:, -1]


def _direction(problem, rhs, args, t0, u0, t_end, ctl, fns, names, sign):
    sol, hit = _run(rhs, args, t0, u0, t_end, ctl, fns, names)
    events = []
    if sol.status == -1:
        last = sol.y[:, -1]
        hyp = "ZeroOfF/DerivativeBlowup" if abs(last[1]) > 1e3 else "DenominatorZero"
        raise StepSizeUnderflow(float(sol.t[-1]), hyp)
    if hit is not None:
        name, te, ye = hit
        data = {"state": [float(v) for v in ye[:3]]}
        if name == BLOWUP:
            events.append(Event(BLOWUP, te, data))
            zt, zy = _probe(rhs, args, te, ye, t_end, ctl, fns, names)
            p, L = _zero_estimate(zt, *zy[:3])
            if p is not None and zy[0] > 0 and (L - te) * sign > 0:
                events.append(Event(ZERO, float(L), {"extrapolated": True, "exponent": p,
                                                     "probe_end": zt}))
        else:
            events.append(Event(name, te, data))
    else:
        events.append(Event(EDGE, float(sol.t[-1]), {"state": [float(v) for v in sol.y[:3, -1]]}))
    t, y = _densify(sol, ctl.node_spacing)
    return t, y, events


def _densify(sol, spacing):
    """Accepted steps plus dense-output samples so no gap exceeds ``spacing``."""
    t = sol.t
    if sol.sol is None or len(t) < 2 or not spacing > 0:
        return t, sol.y
    pieces = [t[:1]]
    for a, b in zip(t[:-1], t[1:]):
        k = int(math.ceil(abs(b - a) / spacing))
        pieces.append(np.linspace(a, b, k + 1)[1:])
    tt = np.concatenate(pieces)
    y = sol.sol(tt)
    # keep the accepted-step values exactly
    idx = np.searchsorted(tt, t) if t[-1] > t[0] else len(tt) - 1 - np.searchsorted(tt[::-1], t)
    y[:, idx] = sol.y
    return tt, y


def _assemble(param, branches, problem, start):
    ts, ys, evs = [], [], []
    for t, y, e in branches:
        ts.append(t)
        ys.append(y)
        evs.extend(e)
    t = np.concatenate(ts)
    y = np.concatenate(ys, axis=1)
    order = np.argsort(t, kind="stable")
    t, y = t[order], y[:, order]
    keep = np.concatenate([[True], np.diff(t) > 0])
    t, y = t[keep], y[:, keep]
    nodes = {"z": t, "f": y[0], "f1": y[1], "f2": y[2]}
    if y.shape[0] > 3:
        nodes["aux"] = y[3]
    evs.sort(key=lambda e: e.location)
    return OdeSolution(param, nodes, evs, problem, start)


def integrate_star(a0, b0, lam, start, mode="auto", controls=None):
    """Integrate the homogeneous-profile equation in both directions.

    ``start`` is (f0, f1_0, f2_0) prescribed at z = 0.  ``mode`` is "series"
    (exact start at 0, only on a consistency root or when f1_0 != 0),
    "offset" (degree-2 Taylor data at z = +-eps) or "auto".
    """
    ctl = controls or Controls()
    a0, b0, lam = float(a0), float(b0), float(lam)
    f0, f1, f2 = (float(v) for v in start)
    if not a0 > 0:
        raise InvalidSpec("a0 must be positive")
    if not f0 > 0:
        raise InvalidSpec("f0 must be positive")
    r1, r2 = consistency_roots(a0, b0, lam, f0)
    on_root = None
    if f1 == 0:
        for k, r in ((1, r1), (2, r2)):
            if abs(f2 - r) <= 1e-12 * (1 + abs(r)):
                on_root = k
                break
    if mode == "auto":
        mode = "series" if (on_root or f1 != 0) else "offset"
    if mode == "series" and f1 == 0 and on_root is None:
        raise InvalidSpec(f"series start needs f''(0) in {r1, r2}; use offset mode")
    if mode not in ("series", "offset"):
        raise InvalidSpec(f"unknown start mode {mode!r}")
    manifold = mode == "series" and on_root == 1
    problem = {"equation": "star", "a0": a0, "b0": b0, "lam": lam, "manifold": manifold}
    eps = ctl.eps
    startrec = {"mode": mode, "eps": eps if mode == "offset" else 0.0, "data": [f0, f1, f2],
                "consistency_roots": [r1, r2], "root": on_root,
                # f = C sqrt(K) solves the degenerate equation for every lambda but
                # is a soliton profile only at this lambda
                "manifold_lambda": -2.0 * b0 * f0 * f0 / a0}
    series = None
    if mode == "series" and on_root == 2:
        series = np.polynomial.Polynomial(root2_series(a0, b0, lam, f0))
        startrec["series"] = series.coef.tolist()
        startrec["series_radius"] = SERIES_RADIUS
    fns, names = _star_events(a0, b0, lam, ctl, manifold)
    args = (a0, b0, lam, manifold)
    branches = []
    lo, hi = ctl.span
    for sign, end in ((-1, lo), (1, hi)):
        if series is not None:
            # step off the removable singularity along the analytic series
            z0 = sign * SERIES_RADIUS
            u0 = [float(series.deriv(k)(z0)) if k else float(series(z0)) for k in range(3)]
        elif mode == "series":
            z0, u0 = 0.0, [f0, f1, f2]
        else:
            z0 = sign * eps
            u0 = [f0 + f1 * z0 + 0.5 * f2 * z0 * z0, f1 + f2 * z0, f2]
        t, y, ev = _direction(problem, kernels.star_rhs, args, z0, u0, end, ctl, fns, names, sign)
        branches.append((t, y, ev))
    if series is not None:
        zs = np.linspace(-SERIES_RADIUS, SERIES_RADIUS, 9)[1:-1]
        ys = np.array([series(zs), series.deriv(1)(zs), series.deriv(2)(zs)])
        branches.append((zs, ys, []))
    return _assemble("z", branches, problem, startrec)


def integrate_theta(variant, lam, start, t0=1.0, controls=None):
    """Integrate a theta equation with the auxiliary channel Theta' = theta'^2."""
    ctl = controls or Controls(span=(0.0, 4.0))
    variant, lam = int(variant), float(lam)
    th, t1, t2 = (float(v) for v in start)
    if variant not in (1, 2):
        raise InvalidSpec("variant must be 1 or 2")
    if variant == 2:
        if not t0 > 0:
            raise InvalidSpec("variant 2 needs t0 > 0")
        if th - 2 * t0 * t1 == 0:
            raise SingularDenominator("theta-2t*theta'=0",
                                      "theta - 2 t theta' = 0 at the start (excluded sqrt(t) case)")
    aux0 = theta_aux(variant, lam, t0, th, t1, t2)
    problem = {"equation": "theta", "variant": variant, "lam": lam}
    startrec = {"mode": "series", "t0": t0, "data": [th, t1, t2, aux0]}
    M = ctl.blowup

    def zero(t, u, *a):
        return u[0]

    def big1(t, u, *a):
        return abs(u[1]) - M

    def big2(t, u, *a):
        return abs(u[2]) - M

    def lead(t, u, *a):
        return u[1] if variant == 1 else u[0] - 2 * t * u[1]

    fns = [zero, big1, big2, lead]
    names = [ZERO, BLOWUP, BLOWUP, DENOM]
    lo, hi = ctl.span
    if variant == 2:
        lo = max(lo, 1e-9)
    branches = []
    for sign, end in ((-1, lo), (1, hi)):
        if (end - t0) * sign <= 0:
            continue
        t, y, ev = _direction(problem, kernels.theta_rhs, (variant, lam), t0,
                              [th, t1, t2, aux0], end, ctl, fns, names, sign)
        branches.append((t, y, ev))
    return _assemble("t", branches, problem, startrec)


def closing_defect(sol, Z=1e3):
    """|lim f(z)/|z| as z -> +inf  minus the same limit as z -> -inf|.

    Both limits are extrapolated linearly in 1/Z from Z/2 and Z.
    """
    lo, hi = sol.interval
    if sol.zeros() or lo > -Z or hi < Z:
        raise NotExtended(f"solution on [{lo}, {hi}] with zeros {sol.zeros()} does not reach |z| = {Z}")

    def d(Zv):
        return (float(sol.eval(Zv)) - float(sol.eval(-Zv))) / Zv

    return abs(2 * d(Z) - d(Z / 2))


def shoot_boundary_solutions(a0, b0, lam, f0, f2_range, controls=None):
    """Scan f''(0) over (lo, hi, n); keep concave runs with two zeros."""
    lo, hi, n = f2_range
    out = []
    for f2 in np.linspace(lo, hi, int(n)):
        try:
            sol = integrate_star(a0, b0, lam, (f0, 0.0, float(f2)), mode="offset", controls=controls)
        except (SingularDenominator, StepSizeUnderflow):
            continue
        if sol.L1 is not None and sol.L2 is not None and sol.is_concave():
            out.append((float(f2), sol))
    return out


def solution_to_conformal(sol):
    from .conformal import HomogeneousFromF, Separable
    return HomogeneousFromF(sol) if sol.param == "z" else Separable(sol)
