"""Nash verification and search on finite narrow sets, the compact response
representation, and the general-sum to zero-sum reduction for table games."""

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .errors import (
    InvalidInput,
    InvalidResponseFunction,
    NotFound,
    OracleFailure,
    ReductionViolation,
)
from .numerics import check_simplex, lp_max_min, subgradient_maximize
from .perception import (
    BoxPreimage,
    FinitePreimage,
    LowRankPreimage,
    Table,
    TableFamily,
    table_oddness_violations,
    validate_table_family,
)
from .bounds import lower_pieces, upper_pieces
from .solver import (
    GameInstance,
    _pure,
    best_response_lower,
    best_response_upper,
    maximin_value_exact,
    stackelberg_value,
)

#: Slack added to eps when deciding a verification verdict.
VERIFY_SLACK = 1e-9


# ------------------------------------------------------------ response maps


@dataclass
class EnumeratedResponse:
    """Explicit response function: ``elements[i] -> responses[i]``."""

    family: object
    elements: list
    responses: list

    def __post_init__(self):
        if len(self.elements) != len(self.responses):
            raise InvalidResponseFunction("elements and responses differ in length")
        self.responses = [np.asarray(y, dtype=np.float64) for y in self.responses]

    def lookup(self, u):
        u = np.asarray(u, dtype=np.float64)
        for e, y in zip(self.elements, self.responses):
            if e.shape == u.shape and self.family.same(u, e):
                return y
        return None

    def __call__(self, u):
        y = self.lookup(u)
        if y is None:
            raise InvalidResponseFunction("perception outside the response function's domain")
        return y

    def as_list(self):
        return [(e, y) for e, y in zip(self.elements, self.responses)]


class CompactResponse:
    """Response function induced by a compact representation and its oracle."""

    def __init__(self, game, rep):
        self.game = game
        self.rep = rep

    def __call__(self, u):
        return eval_compact_repr(self.game, self.rep, u)


def _resolve(Ry, game, elements):
    """Responses for the given elements, checking the domain."""
    if isinstance(Ry, CompactResponseRepr):
        Ry = CompactResponse(game, Ry)
    if isinstance(Ry, EnumeratedResponse):
        T = game.narrow
        if T.is_enumerated:
            if len(Ry.elements) != len(T.elements) or any(Ry.lookup(e) is None for e in T.elements):
                raise InvalidResponseFunction("response domain differs from the narrow set")
    out = []
    for e in elements:
        y = check_simplex(Ry(e), game.n, "response")
        out.append(y)
    return out


# ------------------------------------------------------------ piece algebra


def lower_value_grad_x(pre, x, y):
    """``P^-(x, y)`` and a supergradient in ``x`` for any preimage kind."""
    if isinstance(pre, LowRankPreimage):
        v = pre.center
        val = float(x @ v @ y)
        grad = v @ y
        if pre.sigma == 0.0:
            return val, grad
        z = pre.left_null.T @ x
        a = float(np.linalg.norm(z))
        b = float(np.linalg.norm(pre.right_null.T @ y))
        if a > 0:
            grad = grad - pre.sigma * b * (pre.left_null @ z) / a
        return val - pre.sigma * a * b, grad
    pieces = lower_pieces(pre)
    vals = [float(x @ M @ y) for M in pieces]
    k = int(np.argmin(vals))
    return vals[k], pieces[k] @ y


@dataclass
class _Element:
    """Per-element data: the opponent's objective and player one's pieces."""

    matrix: np.ndarray
    opp_pre: object
    first_pre: object
    opp_pieces: list = None  # signed so the opponent always maximises the minimum
    first_pieces: list = None


class _Structure:
    def __init__(self, game, elements):
        self.game = game
        self.sign = -1.0 if game.zero_sum else 1.0
        self.elements = []
        self.piecewise_linear = True
        for e in elements:
            opp_pre = game.preimage_at(e, game.c2)
            first_pre = opp_pre if game.zero_sum else game.row_preimage
            el = _Element(e, opp_pre, first_pre)
            if game.zero_sum:
                up = upper_pieces(opp_pre)
                el.opp_pieces = None if up is None else [-M for M in up]
            else:
                el.opp_pieces = lower_pieces(opp_pre)
            el.first_pieces = lower_pieces(first_pre)
            if el.opp_pieces is None or el.first_pieces is None:
                self.piecewise_linear = False
            self.elements.append(el)

    # opponent side -----------------------------------------------------
    def opp_rows(self, el, x):
        return np.array([x @ Q for Q in el.opp_pieces])

    def opp_best(self, el, x):
        """Best achievable opponent objective (signed, maximised) and a maximiser."""
        if el.opp_pieces is not None:
            A = self.opp_rows(el, x)
            if A.shape[0] == 1:
                k = int(np.argmax(A[0]))
                return float(A[0, k]), _pure(A.shape[1], k)
            val, y = lp_max_min(A)
            return val, y
        if self.game.zero_sum:
            y = best_response_upper(self.game, el.matrix, self.game.c2, x)
        else:
            y = best_response_lower(self.game, el.matrix, self.game.c2, x)
        return self.opp_value(el, x, y), y

    def opp_value(self, el, x, y):
        if el.opp_pieces is not None:
            return float(np.min(self.opp_rows(el, x) @ y))
        from .bounds import bounds_from_preimage

        b = bounds_from_preimage(el.opp_pre, x, y)
        return b.upper * -1.0 if self.game.zero_sum else b.lower

    # first player side -------------------------------------------------
    def f_pieces(self, responses):
        """Vectors ``s`` with ``f_R(x) = min_s s.x`` (piecewise-linear case)."""
        rows, owners = [], []
        for i, (el, y) in enumerate(zip(self.elements, responses)):
            for B in el.first_pieces:
                rows.append(B @ y)
                owners.append(i)
        return np.array(rows), owners

    def f_value(self, x, responses):
        vals = [lower_value_grad_x(el.first_pre, x, y)[0] for el, y in zip(self.elements, responses)]
        return float(min(vals))

    def f_max(self, responses, seed=0):
        """``max_x f_R(x)`` and a maximiser."""
        if self.piecewise_linear:
            S, _ = self.f_pieces(responses)
            return lp_max_min(S)

        def obj(x):
            best = None
            for el, y in zip(self.elements, responses):
                val, g = lower_value_grad_x(el.first_pre, x, y)
                if best is None or val < best[0] - 1e-10:
                    best = (val, g)
            return best

        span = float(np.ptp(self.game.perceived_row)) or 1.0
        rep = subgradient_maximize(obj, self.game.m, tol=1e-9, max_iters=2000, seed=seed, step0=span)
        return rep.value + rep.certified_gap, rep.argmax


# ------------------------------------------------------------ verification


@dataclass
class EquilibriumReport:
    max_deviation_p1: float
    max_deviation_p2: float
    eps: float
    holds: bool
    f_star: float
    worst_element: int
    checked_elements: int
    sampled: bool

    def as_dict(self):
        return {
            "max_deviation_p1": self.max_deviation_p1,
            "max_deviation_p2": self.max_deviation_p2,
            "eps": self.eps,
            "holds": self.holds,
            "f_star": self.f_star,
            "worst_element": self.worst_element,
            "checked_elements": self.checked_elements,
            "sampled": self.sampled,
        }


def verify_nash(game, x_star, Ry, eps=1e-6, check_budget=10**4, seed=0):
    """Check both equilibrium conditions for ``(x_star, Ry)``.

    The opponent condition is checked on every narrow-set element (or on
    ``check_budget`` samples of a parametric set); the first-player condition
    compares ``f(x_star)`` with ``max_x f(x)``, solved exactly by LP in the
    piecewise-linear case and by subgradient ascent otherwise.
    """
    x_star = check_simplex(x_star, game.m, "x_star")
    elements, enumerated = game.narrow_elements(check_budget, seed)
    if enumerated and len(elements) > check_budget:
        rng = np.random.default_rng(seed)
        pick = sorted(rng.choice(len(elements), size=check_budget, replace=False))
        elements = [elements[i] for i in pick]
        enumerated = False
    responses = _resolve(Ry, game, elements)
    st = _Structure(game, elements)
    dev2, worst = 0.0, -1
    for i, (el, y) in enumerate(zip(st.elements, responses)):
        best, _ = st.opp_best(el, x_star)
        d = best - st.opp_value(el, x_star, y)
        if d > dev2:
            dev2, worst = d, i
    f_star = st.f_value(x_star, responses)
    fmax, _ = st.f_max(responses, seed)
    dev1 = max(fmax - f_star, 0.0)
    holds = dev1 <= eps + VERIFY_SLACK and dev2 <= eps + VERIFY_SLACK
    return EquilibriumReport(float(dev1), float(dev2), float(eps), bool(holds), float(f_star), worst, len(elements), not enumerated)


# ------------------------------------------------------------ search


def _maxmin_duals(S):
    """``max_x min_j s_j.x`` over the simplex with the optimal dual weights."""
    K, m = S.shape
    c = np.zeros(m + 1)
    c[-1] = -1.0
    A_ub = np.hstack([-S, np.ones((K, 1))])
    A_eq = np.hstack([np.ones((1, m)), np.zeros((1, 1))])
    res = linprog(c, A_ub=A_ub, b_ub=np.zeros(K), A_eq=A_eq, b_eq=[1.0], bounds=[(0, None)] * m + [(None, None)], method="highs")
    lam = np.maximum(-res.ineqlin.marginals, 0.0)
    total = lam.sum()
    lam = lam / total if total > 0 else np.full(K, 1.0 / K)
    return -float(res.fun), lam


class _CandidateSolver:
    """Chooses responses inside best-response polytopes at a fixed ``x``."""

    def __init__(self, st, eps):
        self.st = st
        self.tau = eps / 2.0

    def best_values(self, x):
        out = []
        for el in self.st.elements:
            val, y = self.st.opp_best(el, x)
            out.append((val, y))
        return out

    def regret(self, x, responses):
        S, _ = self.st.f_pieces(responses)
        V, lam = _maxmin_duals(S)
        return V - float(np.min(S @ x)), lam

    def improve(self, x, best, lam):
        """One LP step: responses minimising the dual upper bound on the regret."""
        st = self.st
        n = st.game.n
        m = st.game.m
        E = len(st.elements)
        nv = E * n + 2  # y blocks, t, tau'
        c = np.zeros(nv)
        c[-1] = 1.0
        c[-2] = -1.0
        rows, rhs = [], []
        # sum_j lam_j (B_j y_e) <= tau' componentwise
        agg = np.zeros((m, nv))
        j = 0
        for e, el in enumerate(st.elements):
            for B in el.first_pieces:
                agg[:, e * n:(e + 1) * n] += lam[j] * B
                j += 1
        agg[:, -1] = -1.0
        rows.append(agg)
        rhs.append(np.zeros(m))
        # t <= x.B y_e for every piece
        for e, el in enumerate(st.elements):
            for B in el.first_pieces:
                r = np.zeros(nv)
                r[e * n:(e + 1) * n] = -(x @ B)
                r[-2] = 1.0
                rows.append(r[None, :])
                rhs.append([0.0])
            for Q in el.opp_pieces:
                r = np.zeros(nv)
                r[e * n:(e + 1) * n] = -(x @ Q)
                rows.append(r[None, :])
                rhs.append([-(best[e][0] - self.tau)])
        A_eq = np.zeros((E, nv))
        for e in range(E):
            A_eq[e, e * n:(e + 1) * n] = 1.0
        bounds = [(0, None)] * (E * n) + [(None, None), (None, None)]
        res = linprog(c, A_ub=np.vstack(rows), b_ub=np.concatenate([np.ravel(r) for r in rhs]), A_eq=A_eq, b_eq=np.ones(E), bounds=bounds, method="highs")
        if res.status != 0:
            return None
        ys = []
        for e in range(E):
            y = np.maximum(res.x[e * n:(e + 1) * n], 0.0)
            ys.append(y / y.sum())
        return ys

    def favourable(self, x, best):
        """Per element: the response in its polytope maximising player one's payoff.

        Also returns the smallest of those payoffs, an upper bound on
        ``f_R(x)`` over every admissible response map ``R``.
        """
        out, cap = [], math.inf
        for el, (g, y0) in zip(self.st.elements, best):
            A = self.st.opp_rows(el, x)
            G = np.array([x @ B for B in el.first_pieces])
            v, y = lp_max_min(G, A_ub=-A, b_ub=-(g - self.tau) * np.ones(A.shape[0]))
            out.append(y0 if y is None else y)
            if v is not None:
                cap = min(cap, v)
        return out, cap

    def _polytope_lp(self, el, x, g, c):
        """Minimise ``c.y`` over the element's best-response polytope."""
        A = self.st.opp_rows(el, x)
        res = linprog(c, A_ub=-A, b_ub=-(g - self.tau) * np.ones(A.shape[0]), A_eq=np.ones((1, c.size)), b_eq=[1.0], bounds=[(0, None)] * c.size, method="highs")
        return None if res.status != 0 else np.maximum(res.x, 0.0) / np.maximum(res.x, 0.0).sum()

    def centroid(self, x, best):
        """Per element: the average of the polytope's coordinate-extreme vertices."""
        out = []
        n = self.st.game.n
        for el, (g, y0) in zip(self.st.elements, best):
            pts = [y0]
            for k in range(n):
                for sgn in (-1.0, 1.0):
                    y = self._polytope_lp(el, x, g, sgn * np.eye(n)[k])
                    if y is not None:
                        pts.append(y)
            out.append(np.mean(pts, axis=0))
        return out

    def punishing(self, x, best):
        """Per element: the response minimising player one's best pure row."""
        out = []
        m, n = self.st.game.m, self.st.game.n
        for el, (g, y0) in zip(self.st.elements, best):
            Bbar = np.mean(el.first_pieces, axis=0)
            A = self.st.opp_rows(el, x)
            c = np.zeros(n + 1)
            c[-1] = 1.0
            A_ub = np.vstack([np.hstack([Bbar, -np.ones((m, 1))]), np.hstack([-A, np.zeros((A.shape[0], 1))])])
            b_ub = np.concatenate([np.zeros(m), -(g - self.tau) * np.ones(A.shape[0])])
            A_eq = np.hstack([np.ones((1, n)), np.zeros((1, 1))])
            res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=[1.0], bounds=[(0, None)] * n + [(None, None)], method="highs")
            if res.status != 0:
                out.append(y0)
            else:
                y = np.maximum(res.x[:n], 0.0)
                out.append(y / y.sum())
        return out

    def solve(self, x, floor=-math.inf, rounds=25):
        """Smallest regret found at ``x``; candidates whose best possible
        ``f(x)`` is below ``floor`` are rejected without the alternating steps."""
        best = self.best_values(x)
        fav, cap = self.favourable(x, best)
        if cap < floor:
            return math.inf, None
        starts = (
            lambda: [y for _, y in best],
            lambda: fav,
            lambda: self.centroid(x, best),
            lambda: self.punishing(x, best),
        )
        best_D, best_R = math.inf, None
        for make in starts:
            R = make()
            D, lam = self.regret(x, R)
            for _ in range(rounds):
                if D < best_D:
                    best_D, best_R = D, R
                if D <= self.tau:
                    return best_D, best_R
                R2 = self.improve(x, best, lam)
                if R2 is None:
                    break
                D2, lam = self.regret(x, R2)
                if D2 >= D - 1e-12:
                    if D2 < best_D:
                        best_D, best_R = D2, R2
                    break
                R, D = R2, D2
        return best_D, best_R


def simplex_grid(m, resolution):
    """All points of the simplex with coordinates in ``{0, 1/R, ..., 1}``."""
    pts = []
    for comp in itertools.combinations(range(resolution + m - 1), m - 1):
        parts = np.diff(np.array((-1,) + comp + (resolution + m - 1,))) - 1
        pts.append(parts / resolution)
    return pts


def _grid_count(m, R):
    return math.comb(R + m - 1, m - 1)


def _tie_normals(st, x_dim, cap=600):
    """Normals of hyperplanes in x-space on which pure payoffs tie."""
    normals = []

    def add_pairs(mats):
        cols = [M[:, a] for M in mats for a in range(M.shape[1])]
        for a, b in itertools.combinations(range(len(cols)), 2):
            normals.append(cols[a] - cols[b])

    for el in st.elements:
        add_pairs(el.opp_pieces)
        add_pairs(el.first_pieces)
    if not st.game.zero_sum:
        pass  # first-player pieces are shared and already included
    else:
        firsts = [B for el in st.elements for B in el.first_pieces]
        if len(firsts) * st.game.n <= 40:
            add_pairs(firsts)
    out, seen = [], set()
    for v in normals:
        nv = np.linalg.norm(v)
        if nv < 1e-12:
            continue
        v = v / nv
        # a hyperplane and its negation coincide; canonical sign on first nonzero entry
        idx = np.flatnonzero(np.abs(v) > 1e-12)[0]
        if v[idx] < 0:
            v = -v
        key = tuple(np.round(v, 10))
        if key not in seen:
            seen.add(key)
            out.append(v)
        if len(out) >= cap:
            break
    return out


def arrangement_vertices(normals, m, max_systems=300000):
    """Points of the simplex where ``|S| - 1`` tie hyperplanes meet on a face ``S``."""
    pts = [np.eye(m)[i] for i in range(m)]
    H = np.array(normals) if normals else np.zeros((0, m))
    budget = max_systems
    for size in range(2, m + 1):
        for S in itertools.combinations(range(m), size):
            S = list(S)
            sub = H[:, S] if len(H) else np.zeros((0, size))
            keep = np.flatnonzero(np.linalg.norm(sub, axis=1) > 1e-12)
            sub = sub[keep]
            if len(sub) < size - 1:
                continue
            combos = list(itertools.islice(itertools.combinations(range(len(sub)), size - 1), budget))
            budget -= len(combos)
            if not combos:
                continue
            idx = np.array(combos)
            A = np.empty((len(combos), size, size))
            A[:, : size - 1, :] = sub[idx]
            A[:, size - 1, :] = 1.0
            b = np.zeros(size)
            b[-1] = 1.0
            det = np.linalg.det(A)
            ok = np.abs(det) > 1e-12
            if not np.any(ok):
                continue
            sol = np.linalg.solve(A[ok], np.broadcast_to(b, (int(ok.sum()), size))[..., None])[..., 0]
            good = np.all(sol >= -1e-12, axis=1)
            for s in sol[good]:
                x = np.zeros(m)
                x[S] = np.maximum(s, 0.0)
                pts.append(x / x.sum())
            if budget <= 0:
                break
    return pts


def _dedupe(points):
    out, seen = [], set()
    for p in points:
        key = tuple(np.round(p, 10))
        if key not in seen:
            seen.add(key)
            out.append(p)
    return out


@dataclass
class NashResult:
    x_star: np.ndarray
    responses: EnumeratedResponse
    report: EquilibriumReport
    candidates_tried: int


def search_nash_table(game, x_grid_resolution=64, eps=1e-4, max_grid_points=2000, refine=True):
    """Search candidate row strategies for an equilibrium of an enumerable game.

    Candidates are the vertices of the arrangement of pure-payoff tie
    hyperplanes (ordered by support size) followed by a simplex grid; the grid
    resolution is lowered until it has at most ``max_grid_points`` points. At
    each candidate the responses are chosen inside the opponents' best-response
    polytopes to minimise player one's regret; the first candidate whose pair
    passes :func:`verify_nash` at ``eps`` is returned. One zoomed refinement
    pass around the best candidate follows if nothing passes. Raises NotFound.
    """
    T = game.narrow
    if not T.is_enumerated:
        raise InvalidInput("search_nash_table needs an enumerable narrow set")
    elements = list(T.elements)
    st = _Structure(game, elements)
    if not st.piecewise_linear:
        raise InvalidInput("search_nash_table needs piecewise-linear payoff bounds")
    solver = _CandidateSolver(st, eps)
    # any equilibrium value is at least the maximin value
    floor = maximin_value_exact(game)[0] - eps
    m = game.m
    R = int(x_grid_resolution)
    while R > 1 and _grid_count(m, R) > max_grid_points:
        R //= 2
    cands = arrangement_vertices(_tie_normals(st, m), m) + simplex_grid(m, R)
    cands = _dedupe(cands)
    tried = 0
    best = (math.inf, None)

    def attempt(x):
        nonlocal best
        D, resp = solver.solve(x, floor)
        if D < best[0]:
            best = (D, x)
        if D <= eps / 2.0:
            Ry = EnumeratedResponse(game.family, elements, resp)
            rep = verify_nash(game, x, Ry, eps)
            if rep.holds:
                return NashResult(x, Ry, rep, tried)
        return None

    for x in cands:
        tried += 1
        out = attempt(x)
        if out is not None:
            return out
    if refine and best[1] is not None:
        center, h = best[1], 1.0 / R
        for level in range(3):
            h /= 8.0
            steps = np.arange(-8, 9) * h
            local = []
            for d in itertools.product(steps, repeat=m - 1):
                x = center.copy()
                x[:-1] += d
                x[-1] = 1.0 - x[:-1].sum()
                if np.all(x >= -1e-15):
                    local.append(np.maximum(x, 0.0))
            for x in _dedupe(local):
                tried += 1
                out = attempt(x)
                if out is not None:
                    return out
            center = best[1]
    raise NotFound(f"no candidate passed at eps={eps} after {tried} candidates (best regret {best[0]:.3g})")


# ------------------------------------------------------------ values


def value_ordering(game, x_star, Ry, grid_resolution=16):
    """``(V_h, V_n, V_s)`` for an enumerable zero-sum game and an equilibrium ``(x_star, Ry)``.

    ``V_s`` maximises the Stackelberg objective over a grid plus ``x_star``; at
    ``x_star`` the equilibrium responses are admissible Stackelberg responses,
    so ``V_n <= g(x_star)`` holds with the tie-breaking used there.
    """
    if not game.zero_sum:
        raise InvalidInput("value ordering is defined for zero-sum games")
    x_star = check_simplex(x_star, game.m, "x_star")
    V_h, _ = maximin_value_exact(game)
    elements = list(game.narrow.elements)
    st = _Structure(game, elements)
    V_n = st.f_value(x_star, _resolve(Ry, game, elements))
    V_s, _ = stackelberg_value(game, grid_resolution, extra_points=[x_star])
    return float(V_h), float(V_n), float(V_s)


# ------------------------------------------------------------ compact repr


@dataclass
class CompactResponseRepr:
    x_star: np.ndarray
    anchors: list  # (matrix, response) pairs
    f_star: float
    eps: float
    eps_prime: float
    anchor_indices: list = field(default_factory=list)

    def as_dict(self):
        return {
            "x_star": self.x_star.tolist(),
            "anchors": [{"perception": a.tolist(), "response": y.tolist()} for a, y in self.anchors],
            "anchor_indices": list(self.anchor_indices),
            "f_star": self.f_star,
            "eps": self.eps,
            "eps_prime": self.eps_prime,
        }


def characteristic_vertices(pre, y):
    """Vertices of the set of row-payoff vectors ``{u y : u in preimage}``."""
    if isinstance(pre, FinitePreimage):
        return [M @ y for M in pre.matrices]
    if isinstance(pre, BoxPreimage):
        lo, hi = pre.lo @ y, pre.hi @ y
        choices = [(lo[i],) if lo[i] == hi[i] else (lo[i], hi[i]) for i in range(lo.size)]
        return [np.array(c) for c in itertools.product(*choices)]
    raise InvalidInput("compact representation needs finite or box concretization sets")


def caratheodory_reduce(P, alpha, tol=1e-12):
    """Re-express ``sum alpha_i P_i`` using at most ``dim + 1`` points."""
    alpha = np.asarray(alpha, dtype=float).copy()
    idx = np.flatnonzero(alpha > tol)
    P = np.asarray(P, dtype=float)
    d = P.shape[1]
    while idx.size > d + 1:
        M = np.vstack([P[idx].T, np.ones(idx.size)])
        _, _, Vt = np.linalg.svd(M)
        mu = Vt[-1]
        if mu.max() <= tol:
            mu = -mu
        pos = mu > tol
        t = np.min(alpha[idx][pos] / mu[pos])
        alpha[idx] -= t * mu
        alpha[alpha < tol] = 0.0
        idx = np.flatnonzero(alpha > tol)
    return alpha / alpha.sum()


def build_compact_repr(game, x_star, Ry, eps, eps_prime=None):
    """Compress a verified equilibrium response map into at most ``m + 1`` anchors."""
    if eps_prime is None:
        eps_prime = 0.0 if isinstance(game.family, Table) else 1e-6
    T = game.narrow
    if not T.is_enumerated:
        raise InvalidInput("compact representation needs an enumerated narrow set")
    x_star = check_simplex(x_star, game.m, "x_star")
    rep = verify_nash(game, x_star, Ry, eps)
    if not rep.holds:
        raise InvalidInput(f"(x_star, Ry) does not verify at eps={eps}")
    elements = list(T.elements)
    responses = _resolve(Ry, game, elements)
    st = _Structure(game, elements)
    pts, owners, seen = [], [], set()
    for i, (el, y) in enumerate(zip(st.elements, responses)):
        for p in characteristic_vertices(el.first_pre, y):
            key = tuple(np.round(p, 12))
            if key in seen:
                continue
            seen.add(key)
            pts.append(p)
            owners.append(i)
    P = np.array(pts)
    # minimax witness: the hull point with the smallest largest coordinate
    _, alpha = lp_max_min(-P.T)
    alpha = caratheodory_reduce(P, alpha)
    anchor_idx = sorted({owners[j] for j in np.flatnonzero(alpha > 0)})
    anchors = [(elements[i].copy(), responses[i].copy()) for i in anchor_idx]
    f_star = st.f_value(x_star, responses)
    return CompactResponseRepr(x_star, anchors, float(f_star), float(eps), float(eps_prime), anchor_idx)


def eval_compact_repr(game, rep, u):
    """Response for perception ``u``: the stored anchor response, or the oracle's answer."""
    u = np.asarray(u, dtype=np.float64)
    for a, y in rep.anchors:
        if a.shape == u.shape and game.family.same(u, a):
            return y.copy()
    if not game.narrow.contains(u):
        raise InvalidInput("perception is not a member of the narrow set")
    st = _Structure(game, [u])
    el = st.elements[0]
    x = rep.x_star
    if el.opp_pieces is None or el.first_pieces is None:
        raise InvalidInput("oracle needs piecewise-linear bounds")
    g, _ = st.opp_best(el, x)
    G1 = np.array([x @ B for B in el.first_pieces])
    G2 = st.opp_rows(el, x)
    G = np.vstack([G1, G2])
    h = np.concatenate([np.full(len(G1), -rep.f_star), np.full(len(G2), -(g - rep.eps - rep.eps_prime))])
    slack, y = lp_max_min(G, h)
    if y is None or slack < -1e-12:
        raise OracleFailure(f"oracle infeasible (best slack {slack})")
    return y


# ------------------------------------------------------------ reduction


@dataclass
class ReductionMapping:
    k_n: float
    b_n: float
    k_p: float
    b_p: float
    m: int
    family: object = None
    elements: list = None
    stacked: list = None

    def as_dict(self):
        return {"k_n": self.k_n, "b_n": self.b_n, "k_p": self.k_p, "b_p": self.b_p, "m": self.m}


def _affine(lo, hi, a, b, negative=False):
    """Slope/intercept mapping ``[lo, hi]`` onto ``[a, b]`` (reversed when negative)."""
    if hi == lo:
        k = -1.0 if negative else 1.0
        return k, (a + b) / 2.0 - k * lo
    if negative:
        k = -(b - a) / (hi - lo)
        return k, a - k * hi
    k = (b - a) / (hi - lo)
    return k, a - k * lo


def reduce_general_to_zero_sum(game):
    """Table reduction of a general-sum game to a zero-sum game with levels (1, 2).

    The reduced row player has ``2m`` actions; the narrow set of the all-ones
    perception consists of that matrix and one stacked matrix
    ``[1; k_n V + b_n]`` per original narrow-set element ``V``.
    """
    if game.zero_sum or not isinstance(game.family, Table):
        raise InvalidInput("reduction needs a general-sum table game")
    fam, tf = game.family, game.family.table
    m, n = game.shape
    C_u = game.row_preimage.matrices
    C_v = fam.preimage(game.perceived_col, game.c1).matrices
    T = list(game.narrow.elements)
    k_p, b_p = _affine(min(M.min() for M in C_u), max(M.max() for M in C_u), 0.1, 0.9)
    k_n, b_n = _affine(min(M.min() for M in C_v), max(M.max() for M in C_v), 1.1, 1.9, negative=True)
    ones = np.ones((m, n))
    zeros = np.zeros((m, n))

    def top(V):
        return np.vstack([ones, k_n * V + b_n])

    universe, mapping = {}, {}

    def add(uid, M, to2, to1):
        universe[uid] = M
        mapping[(uid, 2)] = to2
        mapping[(uid, 1)] = to1
        universe["neg:" + uid] = -M
        mapping[("neg:" + uid, 2)] = "neg:" + to2
        mapping[("neg:" + uid, 1)] = "neg:" + to1

    add("ubar", np.ones((2 * m, n)), "ubar", "ubar")
    stacked = []
    for V in T:
        vid = tf.id_of(V)
        add(f"top:{vid}", top(V), f"top:{vid}", "ubar")
        stacked.append(top(V))
        for V2 in fam.preimage(V, game.c2).matrices:
            add(f"a:{tf.id_of(V2)}", np.vstack([k_n * V2 + b_n, zeros]), f"top:{vid}", "ubar")
        for U in C_u:
            add(f"b:{tf.id_of(U)}|{vid}", np.vstack([k_p * U + b_p, -(k_n * V + b_n)]), f"top:{vid}", "ubar")
    table = TableFamily(universe=universe, mapping=mapping, level_cap=2)
    report = validate_table_family(table, check_odd=True)
    if not report.valid:
        raise ReductionViolation(f"reduced table invalid: {report.violations[:3]}")
    reduced = GameInstance(Table(table), np.ones((2 * m, n)), 1, 2, zero_sum=True)
    mapping_out = ReductionMapping(k_n, b_n, k_p, b_p, m, fam, T, stacked)
    return reduced, mapping_out


def map_back_equilibrium(mapping, x_bar_star, Ry_bar, tail_tol=1e-6):
    """Equilibrium of the original game from one of the reduced game."""
    x_bar = np.asarray(x_bar_star, dtype=np.float64)
    m = mapping.m
    tail = float(x_bar[m:].sum())
    if tail > tail_tol:
        raise ReductionViolation(f"reduced equilibrium puts mass {tail} on auxiliary rows")
    head = np.maximum(x_bar[:m], 0.0)
    x = head / head.sum()
    responses = [np.asarray(Ry_bar(S), dtype=float) for S in mapping.stacked]
    return x, EnumeratedResponse(mapping.family, mapping.elements, responses)
