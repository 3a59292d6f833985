"""Maximin solving for the lower-capability player, best responses for the
higher-capability player, and numeric property certificates."""

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .bounds import (
    bounds_from_preimage,
    extremal_concretization_limited_rank,
    lower_pieces,
    payoff_bounds,
    upper_pieces,
)
from .errors import DegenerateDirection, InvalidInput, TooLarge
from .numerics import as_matrix, check_simplex, lp_max_min, subgradient_maximize
from .perception import (
    INF,
    SHRINK,
    BoxPreimage,
    FinitePreimage,
    LimitedRank,
    LowRankPreimage,
    Masked,
    NarrowSet,
    Quantized,
    Table,
    _BoxFamily,
    check_level,
    format_level,
)

#: Activity tolerance for choosing the subgradient branch of a minimum.
ACTIVE_TOL = 1e-10


@dataclass
class GameInstance:
    """A two-player limited-perception game seen from the lower-capability player.

    ``perceived_row`` is ``u1``; ``perceived_col`` is ``v1`` (``None`` for
    zero-sum games, where the column payoff is ``-u1``). Both are perceptions
    at level ``c1 <= c2``. Use :func:`make_game` to normalise ``c1 > c2``.
    """

    family: object
    perceived_row: np.ndarray
    c1: object
    c2: object
    zero_sum: bool = True
    perceived_col: np.ndarray = None
    true_row: np.ndarray = None
    true_col: np.ndarray = None
    swapped: bool = False
    cap: int = 10**6
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.c1 = check_level(self.c1)
        self.c2 = check_level(self.c2)
        if self.c1 > self.c2:
            raise InvalidInput("GameInstance requires c1 <= c2; use make_game to normalise")
        self.perceived_row = as_matrix(self.perceived_row, "perceived_row")
        self.family.check_perceived(self.perceived_row, self.c1)
        if self.zero_sum:
            if self.perceived_col is not None:
                raise InvalidInput("zero-sum games take no perceived_col")
            if not self.family.odd:
                raise InvalidInput("zero-sum games require an odd perception family")
        else:
            if self.perceived_col is None:
                raise InvalidInput("general-sum games need perceived_col")
            self.perceived_col = as_matrix(self.perceived_col, "perceived_col")
            if self.perceived_col.shape != self.perceived_row.shape:
                raise InvalidInput("perceived_row and perceived_col shapes differ")
            self.family.check_perceived(self.perceived_col, self.c1)
        for name in ("true_row", "true_col"):
            val = getattr(self, name)
            if val is not None:
                setattr(self, name, as_matrix(val, name))

    @property
    def shape(self):
        return self.perceived_row.shape

    @property
    def m(self):
        return self.perceived_row.shape[0]

    @property
    def n(self):
        return self.perceived_row.shape[1]

    @property
    def opponent_base(self):
        """The matrix whose narrow set describes the opponent's possible views."""
        return self.perceived_row if self.zero_sum else self.perceived_col

    @cached_property
    def narrow(self):
        return self.family.narrow(self.opponent_base, self.c1, self.c2, cap=self.cap)

    @cached_property
    def row_preimage(self):
        return self.family.preimage(self.perceived_row, self.c1)

    def preimage_at(self, u, c):
        key = (matrix_bytes(u), c)
        pre = self._cache.get(key)
        if pre is None:
            pre = self.family.preimage(u, c)
            self._cache[key] = pre
        return pre

    def narrow_elements(self, n_samples=200, seed=0):
        """Enumerated narrow set, or a seeded sample when it is parametric/too large."""
        try:
            T = self.narrow
        except TooLarge:
            return self._narrow_fallback_sample(n_samples, seed), False
        if T.is_enumerated:
            return list(T.elements), True
        return T.sample(n_samples, seed), False

    def _narrow_fallback_sample(self, n, seed):
        # perceiving any concretization of F(v, c1) at c2 lands in the narrow set
        from .perception import sample_concretization

        w = self.family.perceive(self.opponent_base, self.c1)
        return [self.family.perceive(u, self.c2) for u in sample_concretization(self.family, w, self.c1, n, seed)]

    def describe(self):
        return {
            "family": self.family.name,
            "shape": list(self.shape),
            "capabilities": [format_level(self.c1), format_level(self.c2)],
            "zero_sum": self.zero_sum,
            "swapped": self.swapped,
        }


def matrix_bytes(u):
    u = np.asarray(u, dtype=np.float64) + 0.0
    return (u.shape, u.tobytes())


def make_game(family, perceived_row, c1, c2, zero_sum=True, perceived_col=None, true_row=None, true_col=None, **kw):
    """Build a GameInstance, swapping players when ``c1 > c2``.

    After a swap the new row player is the old column player. Their views are
    obtained by perceiving (at the lower level) the transposed true matrices
    when given, otherwise the transposed perceived matrices.
    """
    c1, c2 = check_level(c1), check_level(c2)
    if c1 <= c2:
        return GameInstance(family, perceived_row, c1, c2, zero_sum, perceived_col, true_row, true_col, **kw)
    if isinstance(family, Table):
        raise InvalidInput("table games must be given with c1 <= c2")
    row = as_matrix(true_row if true_row is not None else perceived_row, "row")
    if zero_sum:
        new_row = family.perceive(-row.T, c2)
        new_col = None
        new_true_row = None if true_row is None else -as_matrix(true_row).T
        new_true_col = None
    else:
        col = as_matrix(true_col if true_col is not None else perceived_col, "col")
        new_row = family.perceive(col.T, c2)
        new_col = family.perceive(row.T, c2)
        new_true_row = None if true_col is None else as_matrix(true_col).T
        new_true_col = None if true_row is None else as_matrix(true_row).T
    return GameInstance(
        family, new_row, c2, c1, zero_sum, new_col, new_true_row, new_true_col, swapped=True, **kw
    )


# ------------------------------------------------------------------ branches


def column_lower_bounds(pre, x):
    """``P^-(x, e_k)`` for every column ``k`` and a subgradient in ``x`` for each."""
    if isinstance(pre, BoxPreimage):
        return x @ pre.lo, pre.lo
    if isinstance(pre, LowRankPreimage):
        v = pre.center
        vals = x @ v
        if pre.sigma == 0.0:
            return vals, v
        z = pre.left_null.T @ x
        a = float(np.linalg.norm(z))
        b = np.linalg.norm(pre.right_null, axis=1)
        gx = pre.left_null @ z / a if a > 0 else np.zeros_like(x)
        return vals - pre.sigma * a * b, v - pre.sigma * np.outer(gx, b)
    if isinstance(pre, FinitePreimage):
        W = np.array(pre.matrices)
        P = np.einsum("i,kij->kj", x, W)
        vals = P.min(axis=0)
        pick = np.argmax(P <= vals + ACTIVE_TOL, axis=0)
        grads = W[pick, :, np.arange(W.shape[2])].T
        return vals, grads
    raise TypeError(type(pre).__name__)


def maximin_objective(game, x):
    """``f1(x) = min_k P^-(u1, c1, x, e_k)`` and a subgradient at ``x``."""
    x = check_simplex(x, game.m, "x")
    vals, grads = column_lower_bounds(game.row_preimage, x)
    best = vals.min()
    k = int(np.argmax(vals <= best + ACTIVE_TOL))
    return float(best), grads[:, k].copy()


@dataclass(frozen=True)
class MaximinResult:
    x_star: np.ndarray
    value: float
    iterations: int
    certified_gap: float

    def report(self):
        return {"iterations": self.iterations, "certified_gap": self.certified_gap}


def solve_maximin(game, tol=1e-6, max_iters=2000, seed=0):
    """Maximise the concave maximin objective over the row simplex."""
    span = float(np.ptp(game.perceived_row))
    rep = subgradient_maximize(
        lambda x: maximin_objective(game, x),
        game.m,
        tol=tol,
        max_iters=max_iters,
        seed=seed,
        step0=span if span > 0 else 1.0,
    )
    return MaximinResult(rep.argmax, rep.value, rep.iterations, rep.certified_gap)


# ------------------------------------------------------------ best responses


def _pure(n, k):
    y = np.zeros(n)
    y[k] = 1.0
    return y


def _lowrank_response(pre, x, sign, tol, seed):
    """Maximise ``sign * x^T v y - sigma * a * |N^T y|`` over the column simplex.

    ``sign=+1`` maximises the lower bound, ``sign=-1`` minimises the upper bound.
    """
    v = pre.center
    lin = sign * (x @ v)
    n = v.shape[1]
    a = float(np.linalg.norm(pre.left_null.T @ x)) if pre.sigma else 0.0
    w = pre.sigma * a
    if w == 0.0:
        return _pure(n, int(np.argmax(lin)))

    def obj(y):
        z = pre.right_null.T @ y
        nz = float(np.linalg.norm(z))
        g = lin - (w * (pre.right_null @ z) / nz if nz > 0 else 0.0)
        return float(lin @ y) - w * nz, g

    rep = subgradient_maximize(obj, n, tol=tol, max_iters=600, seed=seed, step0=max(float(np.ptp(lin)), w))
    # a pure column that is as good is preferred for readability of reports
    k = int(np.argmax(lin - w * np.linalg.norm(pre.right_null, axis=1)))
    if obj(_pure(n, k))[0] >= rep.value - 1e-12:
        return _pure(n, k)
    return rep.argmax


def _finite_response(pre, x, sign):
    G = sign * np.array([x @ W for W in pre.matrices])
    if G.shape[0] == 1:
        return _pure(G.shape[1], int(np.argmax(G[0])))
    pure_vals = G.min(axis=0)
    _, y = lp_max_min(G)
    k = int(np.argmax(pure_vals))
    if pure_vals[k] >= np.min(G @ y) - 1e-12:
        return _pure(G.shape[1], k)
    return y


def _response(game, v2, c2, x, sign, tol, seed):
    x = check_simplex(x, game.m, "x")
    pre = game.preimage_at(as_matrix(v2, "v2"), check_level(c2))
    if isinstance(pre, BoxPreimage):
        M = pre.lo if sign > 0 else pre.hi
        return _pure(game.n, int(np.argmax(sign * (x @ M))))
    if isinstance(pre, FinitePreimage):
        return _finite_response(pre, x, sign)
    return _lowrank_response(pre, x, float(sign), tol, seed)


def best_response_lower(game, v2, c2, x, tol=1e-9, seed=0):
    """``argmax_y P^-(v2, c2, x, y)``: the general-sum opponent's response."""
    return _response(game, v2, c2, x, +1, tol, seed)


def best_response_upper(game, v2, c2, x, tol=1e-9, seed=0):
    """``argmin_y P^+(v2, c2, x, y)``: the zero-sum opponent's response."""
    return _response(game, v2, c2, x, -1, tol, seed)


# ---------------------------------------------------------- property checks


@dataclass
class PropertyReport:
    """Outcome of a numeric property certificate.

    ``verdict`` is one of ``holds``, ``fails``, ``holds-up-to-tolerance``,
    ``holds-up-to-sampling`` or ``not-applicable``. Failures always carry
    witnesses with enough data (inputs and seed) to reproduce them.
    """

    property: str
    verdict: str
    witnesses: list = field(default_factory=list)
    details: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def ok(self):
        return self.verdict.startswith("holds") or self.verdict == "not-applicable"

    def as_dict(self):
        return {
            "property": self.property,
            "verdict": self.verdict,
            "witnesses": self.witnesses,
            "details": self.details,
            "notes": self.notes,
        }


def _random_payoffs(rng, m, n, zero_entry=False):
    u = rng.uniform(0.1, 5.0, size=(m, n)) * rng.choice([-1.0, 1.0], size=(m, n))
    if zero_entry:
        u[rng.integers(m), rng.integers(n)] = 0.0
    return u


def check_constant_gap(family, c, n_trials=200, seed=0, tol=1e-12, max_dim=4):
    """Test whether ``P^+ - P^-`` depends on the level only.

    Every fifth trial plants a zero entry; for Quantized those trials are
    reported separately under ``details["zero_entry_trials"]`` because a zero
    perceived entry has a two-sided truncation preimage.
    """
    c = check_level(c)
    if isinstance(family, Table):
        return PropertyReport("constant-gap", "not-applicable", notes=["table families have no random generator"])
    rng = np.random.default_rng(seed)
    regular, flagged = [], []
    for t in range(n_trials):
        m, n = (int(k) for k in rng.integers(1, max_dim + 1, size=2))
        u = _random_payoffs(rng, m, n, zero_entry=(t % 5 == 4))
        v = family.perceive(u, c)
        x = rng.dirichlet(np.ones(m))
        y = rng.dirichlet(np.ones(n))
        b = payoff_bounds(family, v, c, x, y)
        rec = {"trial": t, "seed": seed, "v": v.tolist(), "x": x.tolist(), "y": y.tolist(), "gap": b.upper - b.lower}
        (flagged if np.any(v == 0) else regular).append(rec)
    details = {"level": format_level(c), "trials": n_trials, "regular_trials": len(regular)}
    if isinstance(family, Quantized):
        delta = 0.0 if c == INF else 10.0 ** (-c)
        details["expected_gap"] = delta
        bad = [r for r in regular if abs(r["gap"] - delta) > tol]
        details["max_abs_deviation"] = max((abs(r["gap"] - delta) for r in regular), default=0.0)
        zero_bad = [r for r in flagged if abs(r["gap"] - delta) > tol]
        details["zero_entry_trials"] = len(flagged)
        details["zero_entry_deviating"] = len(zero_bad)
        notes = []
        if flagged:
            notes.append(
                "flagged: perceived matrices with zero entries have a two-sided preimage, so their gap"
                " exceeds the level gap wherever the zero entry carries probability"
            )
        witnesses = bad[:5] + [dict(r, flagged="zero-entry") for r in zero_bad[:5]]
        return PropertyReport("constant-gap", "fails" if bad else "holds", witnesses, details, notes)
    gaps = [r["gap"] for r in regular + flagged]
    recs = regular + flagged
    lo, hi = int(np.argmin(gaps)), int(np.argmax(gaps))
    spread = gaps[hi] - gaps[lo]
    details["gap_spread"] = spread
    if spread <= tol:
        return PropertyReport("constant-gap", "holds", [], details)
    return PropertyReport("constant-gap", "fails", [recs[lo], recs[hi]], details)


def _masked_column_fill(family, u1, c1, k):
    """``u1`` with the masked entries of column ``k`` set just inside ``-theta``."""
    pre = family.preimage(u1, c1)
    if pre.singleton:
        return u1.copy(), 0
    masked = pre.hi != pre.lo
    theta = float(np.max(pre.hi - pre.center))
    w = u1.copy()
    rows = np.flatnonzero(masked[:, k])
    w[rows, k] = -theta * SHRINK
    return w, rows.size


def _quantized_lowest(u1, c1, c2):
    """The entrywise smallest element of the quantized narrow set."""
    q2 = 10.0 ** (-c2)
    K = 10 ** (c2 - c1)
    w = u1.copy()
    w[u1 <= 0] = u1[u1 <= 0] - (K - 1) * q2
    return Quantized().perceive(w, c2)


def _lowrank_witness(game, x, k):
    pre = game.row_preimage
    if pre.singleton:
        return game.perceived_row.copy()
    r = game.family.rank(game.perceived_row)
    try:
        return extremal_concretization_limited_rank(
            game.perceived_row, r, x, _pure(game.n, k), -pre.sigma * SHRINK, game.family.rank_tol
        )
    except DegenerateDirection:
        return game.perceived_row.copy()


def check_narrowly_reversible(game, n_x_samples=10, seed=0, tol=1e-6):
    """Compare ``P^-(u1, c1, x, e_k)`` with an upper estimate of
    ``inf_{u' in T} P^+(u', c2, x, e_k)`` built from the family's witness."""
    if not game.zero_sum:
        raise InvalidInput("narrow reversibility is defined for zero-sum games")
    rng = np.random.default_rng(seed)
    fam, u1, c1, c2 = game.family, game.perceived_row, game.c1, game.c2
    notes = []
    verdict_ok = "holds"
    elements = None
    if c1 == c2:
        notes.append("degenerate comparison: the narrow set is the single perception u1")
    elif isinstance(fam, (Quantized, Table)):
        try:
            elements = list(game.narrow.elements)
        except TooLarge:
            if isinstance(fam, Table):
                raise
            elements = [_quantized_lowest(u1, c1, c2)]
            verdict_ok = "holds-up-to-sampling"
            notes.append("narrow set too large to enumerate; used the entrywise lowest element")
    worst = 0.0
    witnesses = []
    not_applicable = set()
    for s in range(n_x_samples):
        x = rng.dirichlet(np.ones(game.m))
        lhs_all, _ = column_lower_bounds(game.row_preimage, x)
        for k in range(game.n):
            e = _pure(game.n, k)
            if c1 == c2:
                cands = [u1]
            elif isinstance(fam, Masked):
                w, count = _masked_column_fill(fam, u1, c1, k)
                if count > c2 - c1:
                    not_applicable.add(k)
                    continue
                cands = [w]
            elif isinstance(fam, LimitedRank):
                cands = [_lowrank_witness(game, x, k)]
            else:
                cands = elements
            rhs = min(payoff_bounds(fam, w, c2, x, e).upper for w in cands)
            if c1 == c2:
                # singleton narrow set: only the ordering P+ >= P- is required
                diff = max(float(lhs_all[k]) - rhs, 0.0)
            else:
                diff = abs(rhs - float(lhs_all[k]))
            if diff > worst:
                worst = diff
            if diff > tol:
                witnesses.append({"x": x.tolist(), "column": k, "seed": seed, "sample": s, "lower": float(lhs_all[k]), "upper_inf_est": rhs})
    details = {"max_abs_difference": worst, "not_applicable_columns": sorted(not_applicable), "samples": n_x_samples}
    if len(not_applicable) == game.n:
        return PropertyReport("narrowly-reversible", "not-applicable", [], details, notes)
    if witnesses:
        return PropertyReport("narrowly-reversible", "fails", witnesses[:10], details, notes)
    if isinstance(fam, LimitedRank):
        notes.append("limited-rank games are narrowly reversible analytically")
    if isinstance(fam, Masked):
        notes.append("masked column-fill criterion applies to the checked columns")
    return PropertyReport("narrowly-reversible", verdict_ok, [], details, notes)


class GapProbe(NamedTuple):
    h1: float
    g_upper: float
    g_lower_est: float


def stackelberg_gap_probe(game, x, n_samples=200, seed=0, tol=1e-9):
    """Maximin value ``h1(x)`` against estimates of the Stackelberg objective ``g(x)``.

    ``g_lower_est`` is the minimum of ``P^-(u', c2, x, BR(u', x))`` over the
    enumerated or sampled narrow set plus extremal witnesses; ``g_upper`` is
    the same quantity for the family's single analytic witness (or the
    smallest sampled value when the family has none). Both bound ``g(x)`` from
    above, and ``h1(x) <= g(x)`` holds in general.
    """
    if not game.zero_sum:
        raise InvalidInput("the Stackelberg probe is defined for zero-sum games")
    x = check_simplex(x, game.m, "x")
    h1, _ = maximin_objective(game, x)
    fam, u1, c1, c2 = game.family, game.perceived_row, game.c1, game.c2
    if c1 == c2:
        cands, witnesses = [fam.perceive(u1, c2)], []
    else:
        cands, _ = game.narrow_elements(n_samples, seed)
        vals, _ = column_lower_bounds(game.row_preimage, x)
        order = list(np.argsort(vals, kind="stable"))
        if isinstance(fam, Quantized) and c2 != INF:
            witnesses = [_quantized_lowest(u1, c1, c2)]
        elif isinstance(fam, LimitedRank):
            witnesses = [_lowrank_witness(game, x, int(k)) for k in order]
        elif isinstance(fam, Masked):
            witnesses = []
            for k in order:
                w, count = _masked_column_fill(fam, u1, c1, int(k))
                if count <= c2 - c1:
                    witnesses.append(w)
        else:
            witnesses = []

    def g_of(w):
        y = best_response_upper(game, w, c2, x, seed=seed)
        return bounds_from_preimage(game.preimage_at(w, c2), x, y).lower

    wvals = [g_of(w) for w in witnesses]
    cvals = [g_of(w) for w in cands]
    g_lower = min(wvals + cvals)
    g_upper = wvals[0] if wvals else min(cvals)
    return GapProbe(float(h1), float(g_upper), float(g_lower))


def attainability_basis(game):
    """Name the analytic criterion that makes the game maximin-attainable, or None.

    Quantized games whose perceived entries are all nonzero are constant-gap;
    limited-rank games are narrowly reversible; masked games are narrowly
    reversible when every column has at most ``c2 - c1`` masked entries.
    Without such a criterion a small probe gap is sampled evidence only.
    """
    fam, u1, c1, c2 = game.family, game.perceived_row, game.c1, game.c2
    if c1 == c2:
        return "equal capabilities: the narrow set is a single perception"
    if isinstance(fam, Quantized) and np.all(u1 != 0):
        return "quantized with all-nonzero perceived entries: constant-gap game"
    if isinstance(fam, LimitedRank):
        return "limited-rank game: narrowly reversible"
    if isinstance(fam, Masked):
        counts = [_masked_column_fill(fam, u1, c1, k)[1] for k in range(game.n)]
        if max(counts) <= c2 - c1:
            return "masked with at most c2 - c1 masked entries per column: narrowly reversible"
    return None


def maximin_value_exact(game):
    """``V_h`` and its maximiser by LP, for piecewise-linear bounds."""
    pieces = lower_pieces(game.row_preimage)
    if pieces is None:
        raise InvalidInput("exact maximin value needs piecewise-linear bounds")
    rows = np.array([B[:, k] for B in pieces for k in range(game.n)])
    return lp_max_min(rows)


def stackelberg_objective(game, x, tie_tol=1e-12):
    """``g(x)`` on an enumerated zero-sum game.

    Each narrow-set element answers with a minimiser of ``P^+``; among tied
    minimisers the one best for player one is taken (the strong convention),
    so ``g`` dominates ``f_R`` at any ``x`` for any best-response map ``R``.
    """
    if not game.zero_sum:
        raise InvalidInput("the Stackelberg objective is defined for zero-sum games")
    x = check_simplex(x, game.m, "x")
    elements, enumerated = game.narrow_elements()
    if not enumerated:
        raise InvalidInput("the exact Stackelberg objective needs an enumerated narrow set")
    vals = []
    for u in elements:
        pre = game.preimage_at(u, game.c2)
        up, lo = upper_pieces(pre), lower_pieces(pre)
        if up is None:
            raise InvalidInput("the exact Stackelberg objective needs piecewise-linear bounds")
        A = np.array([x @ Q for Q in up])
        neg_best, _ = lp_max_min(-A)
        G = np.array([x @ B for B in lo])
        v, _ = lp_max_min(G, A_ub=A, b_ub=np.full(len(A), -neg_best + tie_tol))
        vals.append(v)
    return float(min(vals))


def stackelberg_value(game, grid_resolution=16, extra_points=(), max_grid_points=300):
    """``V_s`` estimated as the best ``g`` over a simplex grid and ``extra_points``.

    The grid resolution is halved until the grid has at most
    ``max_grid_points`` points.
    """
    from .equilibrium import _grid_count, simplex_grid

    R = int(grid_resolution)
    while R > 1 and _grid_count(game.m, R) > max_grid_points:
        R //= 2
    pts = list(simplex_grid(game.m, R)) + [np.asarray(p, dtype=float) for p in extra_points]
    vals = [stackelberg_objective(game, p) for p in pts]
    k = int(np.argmax(vals))
    return vals[k], pts[k]
