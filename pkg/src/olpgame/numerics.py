"""Shared numerical kernels: simplex projection, canonical SVD, null spaces,
projected subgradient ascent and a zero-sum game value oracle."""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from . import _kernels
from .errors import InvalidInput, ObjectiveError

#: Absolute threshold below which a unit-vector component counts as zero when
#: choosing singular-vector signs.
SIGN_EPS = 1e-10


def as_matrix(A, name="matrix"):
    """Return ``A`` as a finite 2-D float64 array or raise InvalidInput."""
    try:
        arr = np.array(A, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise InvalidInput(f"{name}: not numeric ({exc})") from None
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidInput(f"{name}: expected a non-empty 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInput(f"{name}: entries must be finite")
    return arr


def as_vector(v, name="vector"):
    try:
        arr = np.array(v, dtype=np.float64).reshape(-1)
    except (TypeError, ValueError) as exc:
        raise InvalidInput(f"{name}: not numeric ({exc})") from None
    if arr.size < 1:
        raise InvalidInput(f"{name}: empty")
    if not np.all(np.isfinite(arr)):
        raise InvalidInput(f"{name}: entries must be finite")
    return arr


def check_simplex(x, dim, name="strategy", atol=1e-9):
    """Validate a mixed strategy of the given dimension and return it as an array."""
    x = as_vector(x, name)
    if x.size != dim:
        raise InvalidInput(f"{name}: expected dimension {dim}, got {x.size}")
    if x.min() < -atol or abs(x.sum() - 1.0) > atol:
        raise InvalidInput(f"{name}: not a point of the probability simplex")
    return x


def project_simplex(v):
    """Euclidean projection of ``v`` onto the probability simplex."""
    v = as_vector(v, "v")
    return _kernels.project_simplex_kernel(np.ascontiguousarray(v))


@dataclass(frozen=True)
class SvdFactors:
    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray


def _first_nonzero_sign(col):
    idx = np.flatnonzero(np.abs(col) > SIGN_EPS)
    return 0.0 if idx.size == 0 else float(np.sign(col[idx[0]]))


def canonical_svd(A, tie_tol=1e-9):
    """Full SVD with deterministic signs.

    Each left singular vector is flipped so its first nonzero component is
    negative; the paired right vector follows. Right vectors without a partner
    (n > m) get the same rule applied to themselves. ``tie_tol`` is accepted
    for interface symmetry; tie detection happens at truncation time.
    """
    A = as_matrix(A, "A")
    m, n = A.shape
    U, s, Vt = np.linalg.svd(A, full_matrices=True)
    V = Vt.T.copy()
    k = min(m, n)
    for i in range(m):
        if _first_nonzero_sign(U[:, i]) > 0:
            U[:, i] = -U[:, i]
            if i < k:
                V[:, i] = -V[:, i]
    for i in range(k, n):
        if _first_nonzero_sign(V[:, i]) > 0:
            V[:, i] = -V[:, i]
    return SvdFactors(U=U, sigma=s, V=V)


def numerical_rank(sigma, rank_tol=1e-9):
    """Count singular values above ``rank_tol * sigma_max``."""
    if sigma.size == 0 or sigma[0] <= 0.0:
        return 0
    return int(np.count_nonzero(sigma > rank_tol * sigma[0]))


def null_space_bases(A, rank_tol=1e-9):
    """Orthonormal bases ``(right, left)`` of the null spaces of ``A`` and ``A^T``."""
    f = canonical_svd(A)
    r = numerical_rank(f.sigma, rank_tol)
    return f.V[:, r:].copy(), f.U[:, r:].copy()


@dataclass(frozen=True)
class SubgradientReport:
    argmax: np.ndarray
    value: float
    iterations: int
    certified_gap: float


def _call(objective, x):
    val, g = objective(x)
    val = float(val)
    g = np.asarray(g, dtype=np.float64).reshape(-1)
    if not math.isfinite(val) or not np.all(np.isfinite(g)):
        raise ObjectiveError("objective returned a non-finite value or subgradient")
    return val, g


def subgradient_maximize(objective, dim, tol=1e-6, max_iters=2000, seed=0, step0=1.0, window=100):
    """Maximise a concave function over the simplex.

    The first phase is projected subgradient ascent with steps ``s/sqrt(t)``,
    where ``s`` starts at ``step0`` and is halved (with a restart from the best
    point) after every window of ``window`` steps that fails to improve. Every
    evaluated ``(x, f(x), g)`` also defines a supporting hyperplane of the
    concave objective; the second phase maximises the resulting cutting-plane
    model by LP, which yields both a new trial point and a valid upper bound on
    the supremum. ``certified_gap`` is that upper bound minus the returned value
    (it is the improvement over the last window when the LP is unavailable).
    """
    if dim < 1:
        raise InvalidInput("dim must be positive")
    if dim == 1:
        x = np.ones(1)
        val, _ = _call(objective, x)
        return SubgradientReport(argmax=x, value=val, iterations=1, certified_gap=0.0)
    rng = np.random.default_rng(seed)
    xs, fs, gs = [], [], []

    def evaluate(z):
        v, g = _call(objective, z)
        xs.append(z.copy())
        fs.append(v)
        gs.append(g)
        return v, g

    bary = np.full(dim, 1.0 / dim)
    start = rng.dirichlet(np.ones(dim))
    v0, g0 = evaluate(bary)
    v1, g1 = evaluate(start)
    if v1 > v0:
        best_x, best_v, x, g = start, v1, start.copy(), g1
    else:
        best_x, best_v, x, g = bary, v0, bary.copy(), g0
    phase1 = max(max_iters // 2, 2)
    scale = float(step0) if step0 > 0 else 1.0
    t = 0
    window_start_best = best_v
    last_gain = math.inf
    avg = np.zeros(dim)
    windows = 0
    while len(fs) < phase1:
        t += 1
        gnorm = np.linalg.norm(g)
        if gnorm == 0.0:
            # zero subgradient certifies optimality for a concave function
            return SubgradientReport(argmax=x, value=fs[-1], iterations=len(fs), certified_gap=0.0)
        x = _kernels.project_simplex_kernel(x + (scale / math.sqrt(t)) * g / gnorm)
        avg += x
        val, g = evaluate(x)
        if val > best_v:
            best_v, best_x = val, x.copy()
        if t >= window:
            # the window average sits on ridges that the iterates zig-zag across
            va, _ = evaluate(avg / t)
            avg[:] = 0.0
            if va > best_v:
                best_v, best_x = va, xs[-1]
            last_gain = best_v - window_start_best
            if last_gain <= tol / 10.0:
                scale *= 0.5
                x = best_x.copy()
                g = gs[int(np.argmax(fs))]
            window_start_best = best_v
            t = 0
            windows += 1
            if scale < 1e-12:
                break
            if windows % 4 == 0 and _cut_bound(xs, fs, gs)[0] - best_v <= tol:
                break
    gap = 0.0 if not math.isfinite(last_gain) else max(last_gain, 0.0)
    # cutting-plane phase: f(z) <= f_i + g_i.(z - x_i) for every evaluated point
    while len(fs) < max_iters:
        upper, z = _cut_bound(xs, fs, gs)
        if z is None:
            break
        gap = max(upper - best_v, 0.0)
        if gap <= tol:
            break
        val, _ = evaluate(z)
        if val > best_v:
            best_v, best_x = val, z.copy()
    return SubgradientReport(argmax=best_x, value=best_v, iterations=len(fs), certified_gap=gap)


def _cut_bound(xs, fs, gs):
    """Maximum of the cutting-plane model built from evaluated subgradients."""
    G = np.asarray(gs)
    h = np.asarray(fs) - np.einsum("ij,ij->i", G, np.asarray(xs))
    return lp_max_min(G, h)


def zero_sum_value(A, tol=1e-4):
    """Value of the zero-sum game ``max_x min_y x^T A y`` by optimistic MWU self-play.

    Play stops as soon as the best strategies seen so far certify the value to
    within ``tol`` (the midpoint of the certified interval is returned), or
    after ``ceil(16 ln(max(m, n)) (range/tol)^2)`` rounds.
    """
    A = as_matrix(A, "A")
    m, n = A.shape
    lo, hi = float(A.min()), float(A.max())
    rng_ = hi - lo
    if m == 1:
        j = int(np.argmin(A[0]))
        y = np.zeros(n)
        y[j] = 1.0
        return float(A[0, j]), np.ones(1), y
    if n == 1:
        i = int(np.argmax(A[:, 0]))
        x = np.zeros(m)
        x[i] = 1.0
        return float(A[i, 0]), x, np.ones(1)
    if rng_ == 0.0:
        return lo, np.full(m, 1.0 / m), np.full(n, 1.0 / n)
    S = np.ascontiguousarray((A - lo) / rng_)
    stol = tol / rng_
    rounds = int(math.ceil(16.0 * math.log(max(m, n)) / stol**2))
    x, y, lower, upper, _ = _kernels.omwu_kernel(S, 0.25, max(rounds, 1), 50, stol)
    value = lo + rng_ * 0.5 * (lower + upper)
    return float(value), np.asarray(x), np.asarray(y)


def lp_max_min(G, h=None, A_ub=None, b_ub=None):
    """Solve ``max_{z in simplex} min_k (G z + h)_k`` subject to ``A_ub z <= b_ub``.

    Returns ``(value, z)`` or ``(None, None)`` when the extra constraints make
    the problem infeasible. ``G`` has one row per affine piece.
    """
    G = np.atleast_2d(np.asarray(G, dtype=np.float64))
    K, d = G.shape
    h = np.zeros(K) if h is None else np.asarray(h, dtype=np.float64)
    # variables: z (d), t (1); minimise -t
    c = np.zeros(d + 1)
    c[-1] = -1.0
    rows = [np.hstack([-G, np.ones((K, 1))])]
    rhs = [h]
    if A_ub is not None and len(A_ub):
        A_ub = np.atleast_2d(np.asarray(A_ub, dtype=np.float64))
        rows.append(np.hstack([A_ub, np.zeros((A_ub.shape[0], 1))]))
        rhs.append(np.asarray(b_ub, dtype=np.float64))
    A_eq = np.hstack([np.ones((1, d)), np.zeros((1, 1))])
    bounds = [(0.0, None)] * d + [(None, None)]
    res = linprog(
        c,
        A_ub=np.vstack(rows),
        b_ub=np.concatenate(rhs),
        A_eq=A_eq,
        b_eq=[1.0],
        bounds=bounds,
        method="highs",
    )
    if res.status != 0:
        return None, None
    z = np.maximum(res.x[:d], 0.0)
    z /= z.sum()
    return float(np.min(G @ z + h)), z
