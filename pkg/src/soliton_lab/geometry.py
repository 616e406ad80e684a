"""Domains, path lengths and boundary behaviour of the (x, y) base."""
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize, stats

from . import curvature, profiles
from .errors import (BadSeed, DomainError, NotPositive, NotSimpleRoot, QuadratureFailure,
                     Unclassifiable)

N_DIRECTIONS = 720
DECAY_THRESHOLD = 1e-3


@dataclass
class DomainRegion:
    x_window: tuple
    y_window: tuple
    seed: tuple
    homogeneous: bool
    #: angles in [0, 2 pi) of rays through the origin along which q vanishes
    zero_rays: list = field(default_factory=list)
    #: angular sector (lo, hi) containing the seed, homogeneous case
    sector: tuple = None
    #: sampled points of {q = 0} in the box, general case
    zero_points: list = field(default_factory=list)
    closes: bool = None

    def zero_slopes(self):
        """z = x / y of the zero rays in the upper half plane."""
        out = []
        for th in self.zero_rays:
            dx, dy = math.cos(th), math.sin(th)
            if dy > 1e-12:
                out.append(dx / dy)
        return sorted(out)

    def axis_zero(self):
        """Whether q vanishes along the x-axis (a zero ray at z = +-inf)."""
        return any(abs(math.sin(th)) <= 1e-9 for th in self.zero_rays)

    def contains(self, x, y, m):
        if not (self.x_window[0] < x < self.x_window[1] and self.y_window[0] < y < self.y_window[1]):
            return False
        if not m.contains(x, y):
            return False
        if self.homogeneous and self.sector is not None:
            th = math.atan2(y, x) % (2 * math.pi)
            lo, hi = self.sector
            return _angle_between(th, lo, hi)
        return True

    def to_json(self):
        return {
            "x_window": list(self.x_window), "y_window": list(self.y_window),
            "seed": list(self.seed), "homogeneous": self.homogeneous,
            "zero_rays": list(self.zero_rays), "zero_slopes": self.zero_slopes(),
            "sector": list(self.sector) if self.sector else None,
            "zero_points": [list(p) for p in self.zero_points[:200]],
            "closes": self.closes,
        }


def _angle_between(th, lo, hi):
    two_pi = 2 * math.pi
    return (th - lo) % two_pi < (hi - lo) % two_pi or (hi - lo) % two_pi == 0


def _q_on_circle(q, th):
    try:
        return float(q.value(math.cos(th), math.sin(th)))
    except DomainError:
        return math.nan


def _ray_angles(q):
    """Zero rays of a homogeneous q by a sign scan over N_DIRECTIONS angles.

    Transitions into a region where q is undefined also count (q tends to 0
    at the edge of its definition for the square-root families).
    """
    if hasattr(q, "zero_directions"):
        dirs = q.zero_directions()
        if dirs:
            return sorted(math.atan2(dy, dx) % (2 * math.pi) for dx, dy in dirs)
    ths = np.linspace(0, 2 * math.pi, N_DIRECTIONS, endpoint=False)
    vals = [_q_on_circle(q, t) for t in ths]
    out = []
    for k in range(N_DIRECTIONS):
        a, b = ths[k], ths[k] + 2 * math.pi / N_DIRECTIONS
        va, vb = vals[k], vals[(k + 1) % N_DIRECTIONS]
        if va == 0:
            out.append(a)
            continue
        if math.isnan(va) and math.isnan(vb):
            continue
        if math.isnan(va) or math.isnan(vb):
            out.append(_edge_of_definition(q, a, b, math.isnan(va)))
        elif va * vb < 0:
            out.append(optimize.brentq(lambda t: _q_on_circle(q, t), a, b, xtol=1e-14))
    return sorted(t % (2 * math.pi) for t in out)


def _edge_of_definition(q, a, b, left_nan):
    for _ in range(60):
        m = 0.5 * (a + b)
        if math.isnan(_q_on_circle(q, m)) == left_nan:
            a = m
        else:
            b = m
    return 0.5 * (a + b)


def compute_domain(m, seed, box=10.0, n=201):
    x0, y0 = map(float, seed)
    try:
        L = m.local(x0, y0, order=0)
    except DomainError as exc:
        raise BadSeed(f"seed {seed} not admissible: {exc}") from None
    if L.q == 0:
        raise BadSeed("q vanishes at the seed")
    try:
        xw = profiles.positivity_window(m.A, x0)
        yw = profiles.positivity_window(m.B, y0)
    except NotPositive as exc:
        raise BadSeed(str(exc)) from None
    homogeneous = bool(getattr(m.q, "homogeneous", False))
    region = DomainRegion(xw, yw, (x0, y0), homogeneous)
    if homogeneous:
        rays = _ray_angles(m.q)
        region.zero_rays = rays
        th0 = math.atan2(y0, x0) % (2 * math.pi)
        if rays:
            after = [r for r in rays if r > th0]
            before = [r for r in rays if r < th0]
            hi = min(after) if after else min(rays) + 2 * math.pi
            lo = max(before) if before else max(rays) - 2 * math.pi
            region.sector = (lo % (2 * math.pi), hi % (2 * math.pi))
        region.closes = _closes(m.q) if not region.zero_slopes() else False
    else:
        region.zero_points = _zero_points(m, xw, yw, (x0, y0), box, n)
    return region


def _closes(q, delta=1e-6):
    """Whether f(z)/|z| has equal limits as z -> +-inf (q extends across y = 0)."""
    a, b = _q_on_circle(q, delta), _q_on_circle(q, math.pi - delta)
    if math.isnan(a) or math.isnan(b):
        return False
    return abs(a - b) <= 1e-6 * (1 + abs(a))


def _zero_points(m, xw, yw, seed, box, n):
    """Sign changes of q along grid edges of a box around the seed."""
    xs = np.linspace(max(xw[0], seed[0] - box), min(xw[1], seed[0] + box), n)
    ys = np.linspace(max(yw[0], seed[1] - box), min(yw[1], seed[1] + box), n)
    Q = np.full((n, n), np.nan)
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            try:
                Q[i, j] = m.q.value(x, y)
            except DomainError:
                pass
    pts = []
    for i in range(n):
        for j in range(n):
            for di, dj in ((1, 0), (0, 1)):
                if i + di >= n or j + dj >= n:
                    continue
                a, b = Q[i, j], Q[i + di, j + dj]
                if a * b < 0 or a == 0:
                    t = a / (a - b) if a != b else 0.0
                    x = xs[i] + t * (xs[i + di] - xs[i])
                    y = ys[j] + t * (ys[j + dj] - ys[j])
                    pts.append((float(x), float(y)))
    return pts


def classify_domain(region):
    """Taxonomy by the zero rays met in the upper half plane.

    a: no zero ray and q extends across the x-axis; b: two rays on either
    side of the y-axis; c: two rays on one side; d: a single ray, or q
    vanishing along the x-axis itself.
    """
    if not region.homogeneous:
        if not region.zero_points:
            return "other", "q is not homogeneous; no zero curve in the sampled box"
        return "other", "q is not homogeneous; zero set reported as sampled points"
    zs = region.zero_slopes()
    if not zs and region.axis_zero():
        return "d", "single zero line along the x-axis (z = +-inf)"
    if not zs:
        if region.closes:
            return "a", "no zero ray besides the origin; closing condition holds"
        return "other", "no zero ray but q does not extend across the x-axis"
    if len(zs) == 1:
        return "d", f"single zero ray z = {zs[0]:.6g}"
    if len(zs) == 2:
        if zs[0] < 0 < zs[1]:
            return "b", f"zero rays z = {zs[0]:.6g} < 0 < {zs[1]:.6g}"
        return "c", f"zero rays z = {zs[0]:.6g}, {zs[1]:.6g} on one side"
    return "other", f"{len(zs)} zero rays"


# ------------------------------------------------------------ curves & lengths

class Curve:
    """Planar curve tau -> (x, y) with constant (s, t)."""

    def __init__(self, point, velocity=None, label="curve"):
        self.point = point
        self.velocity = velocity or self._fd_velocity
        self.label = label

    def _fd_velocity(self, tau, h=1e-6):
        h = h * max(1.0, abs(tau))
        a = np.asarray(self.point(tau + h))
        b = np.asarray(self.point(tau - h))
        return tuple((a - b) / (2 * h))

    @classmethod
    def vertical(cls, x0):
        return cls(lambda t: (x0, t), lambda t: (0.0, 1.0), f"vertical x={x0}")

    @classmethod
    def horizontal(cls, y0):
        return cls(lambda t: (t, y0), lambda t: (1.0, 0.0), f"horizontal y={y0}")

    @classmethod
    def radial(cls, dx, dy):
        n = math.hypot(dx, dy)
        ux, uy = dx / n, dy / n
        return cls(lambda t: (t * ux, t * uy), lambda t: (ux, uy), f"radial ({ux:.4g},{uy:.4g})")

    @classmethod
    def segment(cls, p0, p1):
        (x0, y0), (x1, y1) = p0, p1
        return cls(lambda t: (x0 + t * (x1 - x0), y0 + t * (y1 - y0)),
                   lambda t: (x1 - x0, y1 - y0), "segment")

    @classmethod
    def polyline(cls, pts):
        pts = np.asarray(pts, dtype=float)
        seg = np.linspace(0, 1, len(pts))

        def point(t):
            return (float(np.interp(t, seg, pts[:, 0])), float(np.interp(t, seg, pts[:, 1])))

        def vel(t):
            k = min(max(int(np.searchsorted(seg, t, side="right")) - 1, 0), len(pts) - 2)
            d = (pts[k + 1] - pts[k]) / (seg[k + 1] - seg[k])
            return (float(d[0]), float(d[1]))

        return cls(point, vel, "polyline")


def speed(m, curve, tau):
    x, y = curve.point(tau)
    vx, vy = curve.velocity(tau)
    L = m.local(x, y, order=0)
    return math.sqrt(vx * vx / L.A[0] + vy * vy / L.B[0]) / abs(L.q)


@dataclass
class LengthResult:
    finite: bool
    value: float = math.nan
    rate: float = math.nan
    kind: str = ""
    cutoffs: list = field(default_factory=list)
    partials: list = field(default_factory=list)
    r2: float = math.nan

    def to_json(self):
        return {"finite": self.finite, "value": self.value, "rate": self.rate, "kind": self.kind,
                "cutoffs": self.cutoffs, "partials": self.partials, "r2": self.r2}


def _piece(m, curve, a, b):
    with np.errstate(all="ignore"):
        val, err = integrate.quad(lambda t: speed(m, curve, t), a, b, limit=200,
                                  epsabs=1e-13, epsrel=1e-11)
    if not math.isfinite(val):
        raise QuadratureFailure(f"non-finite length on [{a}, {b}]")
    return abs(val)


def path_length(m, curve, tau0, tau1, singular_end=None, max_doublings=60):
    """Length of ``curve`` over [tau0, tau1].

    When tau1 is infinite (or ``singular_end`` = "end"), cutoffs are doubled
    (or the distance to tau1 halved) until the increments either decay
    geometrically (Finite, with a geometric tail) or stop decaying
    (Divergent, log or power).
    """
    tau0, tau1 = float(tau0), float(tau1)
    if math.isfinite(tau1) and singular_end is None and math.isfinite(tau0):
        v = _piece(m, curve, tau0, tau1)
        return LengthResult(True, v, kind="regular")
    if math.isinf(tau1):
        base = max(abs(tau0), 1.0)
        cut = [tau0 + base * 2.0**k for k in range(max_doublings)]
        logc = [math.log(c - tau0) for c in cut]
    else:
        span = tau1 - tau0
        cut = [tau1 - span * 2.0 ** (-k) for k in range(1, max_doublings)]
        # late cutoffs round onto tau1 in floating point
        cut = [c for c in cut if c != tau1]
        logc = [-math.log(abs(tau1 - c)) for c in cut]
    total = _piece(m, curve, tau0, cut[0])
    partials, deltas = [total], []
    for k in range(1, len(cut)):
        d = _piece(m, curve, cut[k - 1], cut[k])
        deltas.append(d)
        total += d
        partials.append(total)
        if len(deltas) < 6:
            continue
        r = [deltas[-i] / deltas[-i - 1] if deltas[-i - 1] > 0 else 0.0 for i in range(1, 5)]
        n = len(partials)
        if all(x < 0.9 for x in r):
            rho = r[0]
            tail = deltas[-1] * rho / (1 - rho)
            return LengthResult(True, total + tail, kind="finite", cutoffs=cut[:n], partials=partials)
        if all(0.9 <= x <= 1.1 for x in r):
            fit = stats.linregress(logc[n - 5:n], partials[-5:])
            if fit.rvalue**2 > 0.99:
                return LengthResult(False, math.inf, rate=float(fit.slope), kind="log",
                                    cutoffs=cut[:n], partials=partials, r2=float(fit.rvalue**2))
        if all(x > 1.1 for x in r):
            fit = stats.linregress(logc[n - 5:n], np.log(partials[-5:]))
            return LengthResult(False, math.inf, rate=float(fit.slope), kind="power",
                                cutoffs=cut[:n], partials=partials, r2=float(fit.rvalue**2))
    raise QuadratureFailure("no length verdict within the cutoff budget")


# ------------------------------------------------------------ boundaries

def cone_angle(p, root, period=2 * math.pi):
    """(period / 2) |p'(root)| at a simple root of p."""
    v = float(p.deriv(root, 0))
    d = float(p.deriv(root, 1))
    if abs(v) > 1e-8 * (1 + abs(d)):
        raise NotSimpleRoot(f"p({root}) = {v} is not zero")
    if abs(d) < 1e-12:
        raise NotSimpleRoot(f"p'({root}) = {d}: root is not simple")
    return 0.5 * period * abs(d)


@dataclass
class BoundaryCharacter:
    kind: str
    exponent: float = math.nan
    length: object = None
    cone_angle: float = math.nan
    curvature: list = field(default_factory=list)
    notes: str = ""

    def to_json(self):
        return {"kind": self.kind, "exponent": self.exponent,
                "length": self.length.to_json() if self.length else None,
                "cone_angle": self.cone_angle,
                "curvature": [list(c) for c in self.curvature], "notes": self.notes}


def _decay_fit(fn, deltas):
    vals = np.array([abs(fn(d)) for d in deltas])
    fit = stats.linregress(np.log(deltas), np.log(vals))
    return float(fit.slope), float(fit.rvalue**2)


def boundary_character(m, point, inward, periods=None, deltas=None, tol=1e-6):
    """Classify the boundary point ``point`` approached along ``inward``.

    q -> 0 with decay exponent p (q ~ dist^p): p < 1 - 1e-3 gives a metric
    boundary at finite distance, otherwise an end.  A simple root of A or B
    with q != 0 is a smooth cap when the cone angle is 2 pi.
    """
    periods = periods or m.periods
    x0, y0 = map(float, point)
    nx, ny = map(float, inward)
    nn = math.hypot(nx, ny)
    nx, ny = nx / nn, ny / nn
    deltas = np.logspace(-6, -4, 9) if deltas is None else np.asarray(deltas, dtype=float)

    def at(d):
        return x0 + d * nx, y0 + d * ny

    def qv(d):
        return m.q.value(*at(d))

    # q decays along the approach (slow power laws such as dist^0.37 included)
    q_small = abs(qv(deltas[0])) < 0.05 * abs(qv(1e-1))
    a_root = abs(float(m.A.deriv(x0, 0))) < 1e-10 if _in_interval(m.A, x0) else False
    b_root = abs(float(m.B.deriv(y0, 0))) < 1e-10 if _in_interval(m.B, y0) else False
    curv = []
    for d in deltas:
        try:
            curv.append((float(d), curvature.scalar_curvature(m, *at(d))))
        except DomainError:
            pass
    if q_small and (a_root or b_root):
        pq, r2q = _decay_fit(qv, deltas)
        prof = m.A if a_root else m.B
        c0 = x0 if a_root else y0
        pa, r2a = _decay_fit(lambda d: float(prof.deriv(at(d)[0] if a_root else at(d)[1], 0)), deltas)
        raise Unclassifiable(
            f"q and {'A' if a_root else 'B'} both vanish at {point}: q decay {pq:.4f} (R2 {r2q:.4f}),"
            f" profile decay {pa:.4f} (R2 {r2a:.4f}); sqrt(r) benchmark exponent 0.5, root at {c0}")
    if q_small:
        p, r2 = _decay_fit(qv, deltas)
        kind = "MetricBoundary" if p < 1 - DECAY_THRESHOLD else "End"
        return BoundaryCharacter(kind, exponent=p, curvature=curv,
                                 notes=f"q ~ dist^{p:.5f} (R2 {r2:.5f})")
    if a_root or b_root:
        prof, root, per = (m.A, x0, periods[0]) if a_root else (m.B, y0, periods[1])
        ang = cone_angle(prof, root, per)
        kind = "SmoothCap" if abs(ang - 2 * math.pi) <= tol * 2 * math.pi else "EdgeSingularity"
        return BoundaryCharacter(kind, cone_angle=ang, curvature=curv,
                                 notes=f"cone angle {ang:.10g} with period {per:.10g}")
    raise Unclassifiable(f"neither q nor A, B vanish at {point}")


def _in_interval(p, t):
    lo, hi = p.interval
    return lo < t < hi
