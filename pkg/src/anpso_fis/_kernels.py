"""Batch kernels for membership evaluation, rule firing and premise gradients.

Two implementations live side by side: numba ``@njit`` loops and a pure-numpy
path. ``ANPSO_FIS_NUMBA=0`` (or a missing numba install) selects numpy. Both
take the packed model layout used by :class:`anpso_fis.fis.FISModel`:

* ``kinds``  int64 ``(I, M)``      MF kind codes (0 triangle, 1 gaussian, 2 trapezoid)
* ``params`` float64 ``(I, M, 4)`` MF parameters, zero padded
* ``n_mf``   int64 ``(I,)``        active MF count per input
* ``ant``    int64 ``(R, I)``      antecedent MF index per rule and input
"""

from __future__ import annotations

import os

import numpy as np

TRIANGLE, GAUSSIAN, TRAPEZOID = 0, 1, 2
SIGMA_EPS = 1e-12

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and os.environ.get("ANPSO_FIS_NUMBA", "1").lower() not in (
    "0",
    "false",
    "no",
    "off",
)
BACKEND = "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# numpy path
# ---------------------------------------------------------------------------


def membership_numpy(X, kinds, params, n_mf):
    mu, _ = _membership_numpy(X, kinds, params, n_mf, grad=False)
    return mu


def membership_grad_numpy(X, kinds, params, n_mf):
    return _membership_numpy(X, kinds, params, n_mf, grad=True)


def _membership_numpy(X, kinds, params, n_mf, grad):
    n, n_in = X.shape
    m_max = kinds.shape[1]
    x = X[:, :, None]
    a = params[None, :, :, 0]
    b = params[None, :, :, 1]
    c = params[None, :, :, 2]
    d = params[None, :, :, 3]
    kind = kinds[None]
    mu = np.zeros((n, n_in, m_max))
    dmu = np.zeros((n, n_in, m_max, 4)) if grad else None
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        # gaussian: (center=a, width=b)
        sig = np.maximum(b, SIGMA_EPS)
        z = (x - a) / sig
        g = np.exp(-0.5 * z * z)
        # rising edge shared by triangle (a,b) and trapezoid (a,b)
        up = (a < x) & (x < b)
        dab = np.where(b > a, b - a, 1.0)
        f_up = (x - a) / dab
        # triangle falling edge (b,c); trapezoid falling edge (c,d)
        tri_down = (b < x) & (x < c)
        dcb = np.where(c > b, c - b, 1.0)
        f_tri_down = (c - x) / dcb
        tra_down = (c < x) & (x < d)
        ddc = np.where(d > c, d - c, 1.0)
        f_tra_down = (d - x) / ddc
        tri = np.where(up, f_up, np.where(x == b, 1.0, np.where(tri_down, f_tri_down, 0.0)))
        plateau = (b <= x) & (x <= c)
        tra = np.where(up, f_up, np.where(plateau, 1.0, np.where(tra_down, f_tra_down, 0.0)))
        val = np.where(kind == GAUSSIAN, g, np.where(kind == TRIANGLE, tri, tra))
        active = np.arange(m_max)[None, :] < n_mf[:, None]
        mu[:] = np.where(active[None], val, 0.0)
        if grad:
            is_g = (kind == GAUSSIAN) & active[None]
            is_tri = (kind == TRIANGLE) & active[None]
            is_tra = (kind == TRAPEZOID) & active[None]
            up_a = (x - b) / (dab * dab)
            up_b = -(x - a) / (dab * dab)
            # gaussian partials
            dmu[..., 0] = np.where(is_g, g * z / sig, 0.0)
            dmu[..., 1] = np.where(is_g, g * z * z / sig, 0.0)
            # triangle partials
            td_b = (c - x) / (dcb * dcb)
            td_c = (x - b) / (dcb * dcb)
            dmu[..., 0] += np.where(is_tri & up, up_a, 0.0)
            dmu[..., 1] += np.where(is_tri & up, up_b, 0.0)
            dmu[..., 1] += np.where(is_tri & tri_down, td_b, 0.0)
            dmu[..., 2] += np.where(is_tri & tri_down, td_c, 0.0)
            # trapezoid partials
            pd_c = (d - x) / (ddc * ddc)
            pd_d = (x - c) / (ddc * ddc)
            dmu[..., 0] += np.where(is_tra & up, up_a, 0.0)
            dmu[..., 1] += np.where(is_tra & up, up_b, 0.0)
            dmu[..., 2] += np.where(is_tra & tra_down, pd_c, 0.0)
            dmu[..., 3] += np.where(is_tra & tra_down, pd_d, 0.0)
    return mu, dmu


def firing_numpy(mu, ant):
    n_in = ant.shape[1]
    sel = mu[:, np.arange(n_in)[None, :], ant]  # (n, R, I)
    return sel.prod(axis=2)


def premise_grad_numpy(mu, dmu, ant, g_w):
    """Chain rule from dL/dw (per sample, per rule) to dL/dparams ``(I, M, 4)``."""
    n_rules, n_in = ant.shape
    m_max = mu.shape[2]
    sel = mu[:, np.arange(n_in)[None, :], ant]  # (n, R, I)
    ones = np.ones(sel.shape[:2] + (1,))
    prefix = np.concatenate([ones, np.cumprod(sel, axis=2)[:, :, :-1]], axis=2)
    suffix = np.concatenate(
        [np.cumprod(sel[:, :, ::-1], axis=2)[:, :, ::-1][:, :, 1:], ones], axis=2
    )
    contrib = g_w[:, :, None] * prefix * suffix  # (n, R, I)
    onehot = (ant[:, :, None] == np.arange(m_max)[None, None, :]).astype(np.float64)
    per_mf = np.einsum("nri,rim->nim", contrib, onehot)
    return np.einsum("nim,nimk->imk", per_mf, dmu)


# ---------------------------------------------------------------------------
# numba path
# ---------------------------------------------------------------------------

if HAVE_NUMBA:
    njit = numba.njit(cache=True, nogil=True)

    @njit
    def _mf_value_grad(kind, p, x, out):
        """Degree of one MF at ``x``; partials written to ``out`` (len 4)."""
        out[0] = 0.0
        out[1] = 0.0
        out[2] = 0.0
        out[3] = 0.0
        a = p[0]
        b = p[1]
        if kind == GAUSSIAN:
            sig = b if b > SIGMA_EPS else SIGMA_EPS
            z = (x - a) / sig
            g = np.exp(-0.5 * z * z)
            out[0] = g * z / sig
            out[1] = g * z * z / sig
            return g
        c = p[2]
        if a < x and x < b:
            den = b - a
            out[0] = (x - b) / (den * den)
            out[1] = -(x - a) / (den * den)
            return (x - a) / den
        if kind == TRIANGLE:
            if x == b:
                return 1.0
            if b < x and x < c:
                den = c - b
                out[1] = (c - x) / (den * den)
                out[2] = (x - b) / (den * den)
                return (c - x) / den
            return 0.0
        d = p[3]
        if b <= x and x <= c:
            return 1.0
        if c < x and x < d:
            den = d - c
            out[2] = (d - x) / (den * den)
            out[3] = (x - c) / (den * den)
            return (d - x) / den
        return 0.0

    @njit
    def membership_numba(X, kinds, params, n_mf):
        n, n_in = X.shape
        m_max = kinds.shape[1]
        mu = np.zeros((n, n_in, m_max))
        scratch = np.zeros(4)
        for s in range(n):
            for i in range(n_in):
                for m in range(n_mf[i]):
                    mu[s, i, m] = _mf_value_grad(kinds[i, m], params[i, m], X[s, i], scratch)
        return mu

    @njit
    def membership_grad_numba(X, kinds, params, n_mf):
        n, n_in = X.shape
        m_max = kinds.shape[1]
        mu = np.zeros((n, n_in, m_max))
        dmu = np.zeros((n, n_in, m_max, 4))
        for s in range(n):
            for i in range(n_in):
                for m in range(n_mf[i]):
                    mu[s, i, m] = _mf_value_grad(
                        kinds[i, m], params[i, m], X[s, i], dmu[s, i, m]
                    )
        return mu, dmu

    @njit
    def firing_numba(mu, ant):
        n = mu.shape[0]
        n_rules, n_in = ant.shape
        w = np.ones((n, n_rules))
        for s in range(n):
            for r in range(n_rules):
                acc = 1.0
                for i in range(n_in):
                    acc *= mu[s, i, ant[r, i]]
                w[s, r] = acc
        return w

    @njit
    def premise_grad_numba(mu, dmu, ant, g_w):
        n = mu.shape[0]
        n_rules, n_in = ant.shape
        m_max = mu.shape[2]
        out = np.zeros((n_in, m_max, 4))
        for s in range(n):
            for r in range(n_rules):
                g = g_w[s, r]
                if g == 0.0:
                    continue
                for i in range(n_in):
                    excl = g
                    for j in range(n_in):
                        if j != i:
                            excl *= mu[s, j, ant[r, j]]
                    if excl == 0.0:
                        continue
                    m = ant[r, i]
                    for k in range(4):
                        out[i, m, k] += excl * dmu[s, i, m, k]
        return out

else:  # pragma: no cover
    membership_numba = membership_grad_numba = firing_numba = premise_grad_numba = None


if USE_NUMBA:
    membership = membership_numba
    membership_grad = membership_grad_numba
    firing = firing_numba
    premise_grad = premise_grad_numba
else:
    membership = membership_numpy
    membership_grad = membership_grad_numpy
    firing = firing_numpy
    premise_grad = premise_grad_numpy
