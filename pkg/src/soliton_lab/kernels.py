"""Hot numerical kernels.

Each kernel exists as a plain-loop function compiled with numba when it is
available (see ``_jit``) and as a vectorized numpy counterpart.  ``riemann``
dispatches on ``_jit.JIT_ENABLED``.
"""
import numpy as np

from . import _jit
from ._jit import njit

# ---------------------------------------------------------------- curvature


@njit
def _riemann_loops(g, dg, ddg):
    n_pts = g.shape[0]
    riem = np.zeros((n_pts, 4, 4, 4, 4))
    ric = np.zeros((n_pts, 4, 4))
    for p in range(n_pts):
        gi = np.linalg.inv(g[p])
        # Christoffel symbols of the first kind: gam1[d, b, c] = Gamma_{dbc}
        gam1 = np.zeros((4, 4, 4))
        for d in range(4):
            for b in range(4):
                for c in range(4):
                    gam1[d, b, c] = 0.5 * (dg[p, c, d, b] + dg[p, b, d, c] - dg[p, d, b, c])
        gam2 = np.zeros((4, 4, 4))
        for a in range(4):
            for b in range(4):
                for c in range(4):
                    s = 0.0
                    for d in range(4):
                        s += gi[a, d] * gam1[d, b, c]
                    gam2[a, b, c] = s
        for i in range(4):
            for k in range(4):
                for l in range(4):
                    for m in range(4):
                        v = 0.5 * (ddg[p, k, l, i, m] + ddg[p, i, m, k, l]
                                   - ddg[p, k, m, i, l] - ddg[p, i, l, k, m])
                        for n in range(4):
                            # g_np Gamma^p_im = Gamma_{n i m}
                            v += gam2[n, k, l] * gam1[n, i, m] - gam2[n, k, m] * gam1[n, i, l]
                        riem[p, i, k, l, m] = v
        for k in range(4):
            for m in range(4):
                s = 0.0
                for i in range(4):
                    for l in range(4):
                        s += gi[i, l] * riem[p, i, k, l, m]
                ric[p, k, m] = s
    return riem, ric


def _riemann_numpy(g, dg, ddg):
    gi = np.linalg.inv(g)
    gam1 = 0.5 * (np.einsum("pcdb->pdbc", dg) + np.einsum("pbdc->pdbc", dg) - dg)
    gam2 = np.einsum("pad,pdbc->pabc", gi, gam1)
    lin = 0.5 * (np.einsum("pklim->piklm", ddg) + np.einsum("pimkl->piklm", ddg)
                 - np.einsum("pkmil->piklm", ddg) - np.einsum("pilkm->piklm", ddg))
    quad = np.einsum("pnkl,pnim->piklm", gam2, gam1) - np.einsum("pnkm,pnil->piklm", gam2, gam1)
    riem = lin + quad
    ric = np.einsum("pil,piklm->pkm", gi, riem)
    return riem, ric


def riemann(g, dg, ddg, use_jit=None):
    """Riemann (all indices down) and Ricci tensors from metric derivatives.

    Shapes: g (N,4,4), dg (N,4,4,4) with dg[p,c,a,b] = d_c g_ab, ddg (N,4,4,4,4)
    with ddg[p,c,d,a,b] = d_c d_d g_ab.  Convention: R_km = g^{il} R_iklm.
    """
    g = np.ascontiguousarray(g, dtype=float)
    dg = np.ascontiguousarray(dg, dtype=float)
    ddg = np.ascontiguousarray(ddg, dtype=float)
    if use_jit is None:
        use_jit = _jit.JIT_ENABLED
    if use_jit:
        return _riemann_loops(g, dg, ddg)
    return _riemann_numpy(g, dg, ddg)


# ------------------------------------------------------- reduced ODEs

@njit
def star_parts(a0, b0, lam, z, f, f1, f2):
    """(numerator, bracket) with f''' = numerator / ((a0 + b0 z^2) bracket f^2)."""
    K = a0 + b0 * z * z
    Q = a0 * f1 * f1 + b0 * (f - z * f1) ** 2
    br = b0 * z * f - K * f1
    N = (-3.0 * Q * Q - lam * Q + (4.0 * a0 - b0 * z * z) * b0 * f ** 3 * f2
         + K * K * f * f2 * (f1 * f1 - f * f2) + lam * K * f * f2)
    return N - b0 * z * f * f * f2 * br, br


@njit
def star_f3(a0, b0, lam, z, f, f1, f2, manifold):
    if manifold:
        return -3.0 * b0 * z * f2 / (a0 + b0 * z * z)
    num, br = star_parts(a0, b0, lam, z, f, f1, f2)
    return num / ((a0 + b0 * z * z) * br * f * f)


@njit
def star_rhs(z, u, a0, b0, lam, manifold):
    out = np.empty(3)
    out[0] = u[1]
    out[1] = u[2]
    out[2] = star_f3(a0, b0, lam, z, u[0], u[1], u[2], manifold)
    return out


@njit
def theta_f3(variant, lam, t, th, th1, th2):
    if variant == 1:
        lt = 0.5 * lam
        rest = -th * th * th2 * th2 + th * (lt + th1 * th1) * th2 - 3.0 * th1 ** 4 - lt * th1 * th1
        return -rest / (th * th * th1)
    lead = t * th * th * (th - 2.0 * t * th1)
    w = th - th1 * t
    rest = (2.0 * t * t * th * th * th2 * th2
            + th * (3.0 * th * th - t * th * th1 - 2.0 * t * t * th1 * th1 - 2.0 * lam * t) * th2
            + 6.0 * th1 * th1 * w * w - 2.0 * lam * th1 * w)
    return -rest / lead


@njit
def theta_rhs(t, u, variant, lam):
    out = np.empty(4)
    out[0] = u[1]
    out[1] = u[2]
    out[2] = theta_f3(variant, lam, t, u[0], u[1], u[2])
    out[3] = u[1] * u[1]
    return out


@njit
def _star_f3_batch_loops(a0, b0, lam, z, f, f1, f2, manifold):
    out = np.empty(z.shape[0])
    for i in range(z.shape[0]):
        out[i] = star_f3(a0, b0, lam, z[i], f[i], f1[i], f2[i], manifold)
    return out


def _star_f3_batch_numpy(a0, b0, lam, z, f, f1, f2, manifold):
    K = a0 + b0 * z * z
    if manifold:
        return -3.0 * b0 * z * f2 / K
    Q = a0 * f1 * f1 + b0 * (f - z * f1) ** 2
    br = b0 * z * f - K * f1
    N = (-3.0 * Q * Q - lam * Q + (4.0 * a0 - b0 * z * z) * b0 * f**3 * f2
         + K * K * f * f2 * (f1 * f1 - f * f2) + lam * K * f * f2)
    return (N - b0 * z * f * f * f2 * br) / (K * br * f * f)


def star_f3_batch(a0, b0, lam, z, f, f1, f2, manifold=False, use_jit=None):
    """Vectorized f''' over arrays of states."""
    args = [np.ascontiguousarray(a, dtype=float) for a in (z, f, f1, f2)]
    if use_jit is None:
        use_jit = _jit.JIT_ENABLED
    if use_jit:
        return _star_f3_batch_loops(float(a0), float(b0), float(lam), *args, bool(manifold))
    return _star_f3_batch_numpy(float(a0), float(b0), float(lam), *args, bool(manifold))
