"""Hot numeric kernels.

Each kernel exists twice: a loop-style version compiled with ``numba.njit`` and
a vectorised pure-numpy version. ``USE_NUMBA`` selects the dispatched version;
set ``OLPGAME_PURE_NUMPY=1`` to force the numpy path (useful when numba is
unavailable or when debugging). Both versions are always importable so the
benchmark and parity tests can compare them directly.
"""

import os

import numpy as np

try:
    import numba

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    _HAVE_NUMBA = False

USE_NUMBA = _HAVE_NUMBA and os.environ.get("OLPGAME_PURE_NUMPY", "").lower() not in (
    "1",
    "true",
    "yes",
)


def _njit(fn):
    if not _HAVE_NUMBA:
        return fn
    return numba.njit(cache=True, nogil=True)(fn)


# --------------------------------------------------------------------- simplex


def project_simplex_np(v):
    """Euclidean projection onto the probability simplex (sort based)."""
    v = np.asarray(v, dtype=np.float64)
    n = v.shape[0]
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    ind = np.arange(1, n + 1)
    rho = np.nonzero(u - css / ind > 0)[0][-1]
    theta = css[rho] / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


@_njit
def project_simplex_nb(v):
    n = v.shape[0]
    u = np.sort(v)[::-1]
    css = 0.0
    theta = 0.0
    for i in range(n):
        css += u[i]
        t = (css - 1.0) / (i + 1.0)
        if u[i] - t > 0.0:
            theta = t
    out = np.empty(n)
    for i in range(n):
        d = v[i] - theta
        out[i] = d if d > 0.0 else 0.0
    return out


# ------------------------------------------------------- optimistic MWU play


def _softmax_np(w):
    z = np.exp(w - w.max())
    return z / z.sum()


def omwu_np(A, eta, max_rounds, check_every, tol):
    """Optimistic multiplicative weights self-play on ``x^T A y`` (x maximises).

    Returns ``(x, y, lower, upper, rounds)`` where ``lower <= value <= upper``
    are certified by the best row and column strategies seen so far.
    """
    m, n = A.shape
    wx = np.zeros(m)
    wy = np.zeros(n)
    x = np.full(m, 1.0 / m)
    y = np.full(n, 1.0 / n)
    gx_prev = A @ y
    gy_prev = A.T @ x
    xs = np.zeros(m)
    ys = np.zeros(n)
    best_x = x.copy()
    best_y = y.copy()
    lower = (x @ A).min()
    upper = (A @ y).max()
    t = 0
    while t < max_rounds:
        gx = A @ y
        gy = A.T @ x
        wx += eta * (2.0 * gx - gx_prev)
        wy -= eta * (2.0 * gy - gy_prev)
        gx_prev = gx
        gy_prev = gy
        x = _softmax_np(wx)
        y = _softmax_np(wy)
        xs += x
        ys += y
        t += 1
        if t % check_every == 0 or t == max_rounds:
            for cx in (xs / t, x):
                lo = (cx @ A).min()
                if lo > lower:
                    lower = lo
                    best_x = cx.copy()
            for cy in (ys / t, y):
                up = (A @ cy).max()
                if up < upper:
                    upper = up
                    best_y = cy.copy()
            if upper - lower <= 2.0 * tol:
                break
    return best_x, best_y, lower, upper, t


@_njit
def _softmax_nb(w):
    mx = w.max()
    z = np.exp(w - mx)
    return z / z.sum()


@_njit
def omwu_nb(A, eta, max_rounds, check_every, tol):
    m, n = A.shape
    wx = np.zeros(m)
    wy = np.zeros(n)
    x = np.full(m, 1.0 / m)
    y = np.full(n, 1.0 / n)
    gx_prev = A @ y
    gy_prev = A.T @ x
    xs = np.zeros(m)
    ys = np.zeros(n)
    best_x = x.copy()
    best_y = y.copy()
    lower = (x @ A).min()
    upper = (A @ y).max()
    t = 0
    while t < max_rounds:
        gx = A @ y
        gy = A.T @ x
        for i in range(m):
            wx[i] += eta * (2.0 * gx[i] - gx_prev[i])
        for j in range(n):
            wy[j] -= eta * (2.0 * gy[j] - gy_prev[j])
        gx_prev = gx
        gy_prev = gy
        x = _softmax_nb(wx)
        y = _softmax_nb(wy)
        xs += x
        ys += y
        t += 1
        if t % check_every == 0 or t == max_rounds:
            ax = xs / t
            lo = (ax @ A).min()
            if lo > lower:
                lower = lo
                best_x = ax.copy()
            lo = (x @ A).min()
            if lo > lower:
                lower = lo
                best_x = x.copy()
            ay = ys / t
            up = (A @ ay).max()
            if up < upper:
                upper = up
                best_y = ay.copy()
            up = (A @ y).max()
            if up < upper:
                upper = up
                best_y = y.copy()
            if upper - lower <= 2.0 * tol:
                break
    return best_x, best_y, lower, upper, t


# ------------------------------------------------------------ batch payoffs


def batch_payoffs_np(S, x, y):
    """``x^T S[k] y`` for every matrix in the stack ``S`` of shape (k, m, n)."""
    return np.einsum("i,kij,j->k", x, S, y)


@_njit
def batch_payoffs_nb(S, x, y):
    k, m, n = S.shape
    out = np.empty(k)
    for s in range(k):
        acc = 0.0
        for i in range(m):
            if x[i] == 0.0:
                continue
            row = 0.0
            for j in range(n):
                row += S[s, i, j] * y[j]
            acc += x[i] * row
        out[s] = acc
    return out


if USE_NUMBA:
    project_simplex_kernel = project_simplex_nb
    omwu_kernel = omwu_nb
    batch_payoffs_kernel = batch_payoffs_nb
else:
    project_simplex_kernel = project_simplex_np
    omwu_kernel = omwu_np
    batch_payoffs_kernel = batch_payoffs_np
