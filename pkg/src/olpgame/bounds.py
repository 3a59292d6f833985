"""Lower and upper expected true-payoff bounds over concretization sets."""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DegenerateDirection, InvalidInput, InvalidPerturbation
from .numerics import as_matrix, check_simplex, null_space_bases, numerical_rank
from .perception import (
    INF,
    BoxPreimage,
    FinitePreimage,
    LimitedRank,
    LowRankPreimage,
    _BoxFamily,
    check_level,
    sample_concretization,
)


@dataclass(frozen=True)
class PayoffBounds:
    lower: float
    upper: float

    def as_dict(self):
        return {"lower": self.lower, "upper": self.upper}


def expected_payoff(u, x, y):
    """``x^T u y``."""
    u = as_matrix(u, "u")
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if x.size != u.shape[0] or y.size != u.shape[1]:
        raise InvalidInput(f"dimension mismatch: u is {u.shape}, x has {x.size}, y has {y.size}")
    return float(x @ u @ y)


def _strategies(v, x, y):
    m, n = v.shape
    return check_simplex(x, m, "x"), check_simplex(y, n, "y")


def box_matrices(pre):
    """Lower/upper endpoint matrices ``(L, H)`` of a box preimage."""
    return pre.lo, pre.hi


def _lowrank_term(pre, x, y):
    if pre.sigma == 0.0:
        return 0.0
    a = np.linalg.norm(pre.left_null.T @ x)
    b = np.linalg.norm(pre.right_null.T @ y)
    return pre.sigma * a * b


def bounds_from_preimage(pre, x, y):
    """Payoff bounds given an already computed preimage structure."""
    if isinstance(pre, BoxPreimage):
        return PayoffBounds(float(x @ pre.lo @ y), float(x @ pre.hi @ y))
    if isinstance(pre, LowRankPreimage):
        mid = float(x @ pre.center @ y)
        t = _lowrank_term(pre, x, y)
        return PayoffBounds(float(mid - t), float(mid + t))
    if isinstance(pre, FinitePreimage):
        vals = _kernels.batch_payoffs_kernel(np.ascontiguousarray(np.array(pre.matrices)), x, y)
        return PayoffBounds(float(vals.min()), float(vals.max()))
    raise TypeError(f"unknown preimage {type(pre).__name__}")


def lower_pieces(pre):
    """Matrices whose pointwise minimum of ``x^T M y`` is the lower bound, or None."""
    if isinstance(pre, BoxPreimage):
        return [pre.lo]
    if isinstance(pre, FinitePreimage):
        return list(pre.matrices)
    return None


def upper_pieces(pre):
    if isinstance(pre, BoxPreimage):
        return [pre.hi]
    if isinstance(pre, FinitePreimage):
        return list(pre.matrices)
    return None


def payoff_bounds(family, v, c, x, y):
    """Infimum and supremum of ``x^T u y`` over the concretization set of ``v``."""
    v = as_matrix(v, "v")
    x, y = _strategies(v, x, y)
    pre = family.preimage(v, check_level(c))
    return bounds_from_preimage(pre, x, y)


def uncertainty_limited_rank(A, c, x, y, rank_tol=1e-9):
    """``sigma_L(A) * |left_null(A)^T x| * |null(A)^T y|`` at the governing level.

    ``L = max(rank(A), c)``; the singular value is zero when ``rank(A) < L`` or
    ``L >= min(m, n)``, so the term vanishes in those cases.
    """
    A = as_matrix(A, "A")
    x, y = _strategies(A, x, y)
    c = check_level(c)
    s = np.linalg.svd(A, compute_uv=False)
    r = numerical_rank(s, rank_tol)
    L = max(r, c)
    if L == INF or L >= min(A.shape) or r < L or r == 0:
        return 0.0
    right, left = null_space_bases(A, rank_tol)
    return float(s[r - 1] * np.linalg.norm(left.T @ x) * np.linalg.norm(right.T @ y))


def null_directions(A, x, y, rank_tol=1e-9):
    """Unit left/right null directions aligned with ``x`` and ``y``, plus the norms."""
    right, left = null_space_bases(A, rank_tol)
    xb = left @ (left.T @ x)
    yb = right @ (right.T @ y)
    a, b = float(np.linalg.norm(xb)), float(np.linalg.norm(yb))
    return xb, yb, a, b


def extremal_concretization_limited_rank(A, r, x, y, q, rank_tol=1e-9):
    """The rank-``r+1`` perturbation ``A + q x_hat y_hat^T`` moving ``x^T A y`` by
    ``q`` times the product of null-space component norms."""
    A = as_matrix(A, "A")
    x, y = _strategies(A, x, y)
    s = np.linalg.svd(A, compute_uv=False)
    rank = numerical_rank(s, rank_tol)
    r = int(r)
    if rank != r or r < 1 or r >= min(A.shape):
        raise InvalidInput(f"need rank(A) = r with 1 <= r < min(m, n); rank(A) = {rank}, r = {r}")
    if abs(q) >= s[r - 1]:
        raise InvalidPerturbation(f"|q| = {abs(q)!r} must be below sigma_r = {s[r - 1]!r}")
    xb, yb, a, b = null_directions(A, x, y, rank_tol)
    if a <= 1e-12 or b <= 1e-12:
        raise DegenerateDirection("strategy has no component in the null space")
    return A + q * np.outer(xb / a, yb / b)


def extremal_samples(family, v, c, x, y):
    """Deterministic members of the concretization set near both payoff bounds."""
    v = as_matrix(v, "v")
    c = check_level(c)
    if isinstance(family, _BoxFamily):
        return family.endpoint_fills(v, c, x, y)
    if isinstance(family, LimitedRank):
        pre = family.preimage(v, c)
        if pre.singleton:
            return [v.copy()]
        r = family.rank(v)
        out = []
        for sign in (-1.0, 1.0):
            try:
                out.append(
                    extremal_concretization_limited_rank(
                        v, r, x, y, sign * pre.sigma * (1.0 - 1e-9), family.rank_tol
                    )
                )
            except DegenerateDirection:
                return [v.copy()]
        return out
    return []


def bounds_sampling_oracle(family, v, c, x, y, n, seed=0):
    """Monte-Carlo estimate of the payoff bounds.

    Uses ``n`` random concretization samples plus the extremal witnesses of
    :func:`extremal_samples`; finite (table) preimages are enumerated exactly.
    """
    v = as_matrix(v, "v")
    x, y = _strategies(v, x, y)
    c = check_level(c)
    pre = family.preimage(v, c)
    if isinstance(pre, FinitePreimage):
        return bounds_from_preimage(pre, x, y)
    samples = sample_concretization(family, v, c, n, seed) + extremal_samples(family, v, c, x, y)
    vals = _kernels.batch_payoffs_kernel(np.ascontiguousarray(np.array(samples)), x, y)
    return PayoffBounds(float(vals.min()), float(vals.max()))
