"""Payoff perception families, intrinsic capability, concretization sets and
narrow concretization sets.

Capability levels are positive ints or ``math.inf``. Every family object
exposes the same small interface; the module-level functions simply dispatch to
it so callers can write ``perceive(family, u, c)``.
"""

import itertools
import math
from dataclasses import dataclass, field
from decimal import ROUND_DOWN, Decimal

import numpy as np

from .errors import (
    DegenerateTie,
    InvalidInput,
    InvalidPerceived,
    TooLarge,
    UnknownMatrix,
)
from .numerics import as_matrix, canonical_svd, null_space_bases, numerical_rank

INF = math.inf

#: Default cap on the size of an enumerated narrow set.
ENUM_CAP = 10**6

#: Multiplicative shrink applied to open interval ends when sampling.
SHRINK = 1.0 - 1e-9


def check_level(c):
    """Normalise a capability level to an int >= 1 or ``math.inf``."""
    if isinstance(c, str) and c.strip().lower() in ("inf", "infinity"):
        return INF
    if isinstance(c, (bool, np.bool_)):
        raise InvalidInput(f"invalid capability level {c!r}")
    if isinstance(c, (float, np.floating)):
        if math.isinf(c) and c > 0:
            return INF
        if not float(c).is_integer():
            raise InvalidInput(f"capability level must be an integer or inf, got {c!r}")
        c = int(c)
    if not isinstance(c, (int, np.integer)) or int(c) < 1:
        raise InvalidInput(f"capability level must be >= 1 or inf, got {c!r}")
    return int(c)


def format_level(c):
    return "inf" if c == INF else int(c)


def matrix_key(u):
    """Hashable exact key of a matrix (``-0.0`` and ``0.0`` collapse)."""
    u = np.asarray(u, dtype=np.float64) + 0.0
    return (u.shape, u.tobytes())


# ---------------------------------------------------------------- preimages


@dataclass
class BoxPreimage:
    """Per-entry interval preimage; ``*_open`` flags mark unattained endpoints."""

    center: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    lo_open: np.ndarray
    hi_open: np.ndarray

    @property
    def singleton(self):
        return bool(np.all(self.lo == self.hi))

    def inner(self):
        """Endpoints pulled towards the centre on open sides."""
        lo = np.where(self.lo_open, self.center - (self.center - self.lo) * SHRINK, self.lo)
        hi = np.where(self.hi_open, self.center + (self.hi - self.center) * SHRINK, self.hi)
        return lo, hi


@dataclass
class LowRankPreimage:
    """Concretization of a limited-rank perception: ``v`` plus null-space terms
    with singular values below ``sigma`` (``sigma == 0`` means singleton)."""

    center: np.ndarray
    level: float
    sigma: float
    left_null: np.ndarray
    right_null: np.ndarray

    @property
    def singleton(self):
        return self.sigma == 0.0


@dataclass
class FinitePreimage:
    matrices: list

    @property
    def singleton(self):
        return len(self.matrices) == 1


# ---------------------------------------------------------------- families


class PerceptionFamily:
    """Common interface of the perception families."""

    name = "abstract"
    odd = False

    def perceive(self, u, c):
        raise NotImplementedError

    def intrinsic_capability(self, u):
        raise NotImplementedError

    def same(self, a, b):
        return a.shape == b.shape and bool(np.array_equal(a, b))

    def governing_level(self, v, c):
        return max(self.intrinsic_capability(v), check_level(c))

    def contains(self, v, c, u):
        v = self.prepare(v)
        u = self.prepare(u)
        if u.shape != v.shape:
            return False
        return self.same(self.perceive(u, self.governing_level(v, c)), v)

    def prepare(self, u):
        return as_matrix(u, "u")

    def check_perceived(self, v, c):
        """Raise InvalidPerceived unless ``v`` is fixed at its governing level."""
        v = self.prepare(v)
        L = self.governing_level(v, c)
        if not self.same(self.perceive(v, L), v):
            raise InvalidPerceived("matrix is not a fixed point of the perception at its level")
        return v, L

    def preimage(self, v, c):
        raise NotImplementedError

    def sample(self, v, c, n, rng):
        raise NotImplementedError

    def narrow(self, v, c1, c2, cap=ENUM_CAP):
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}()"


def _shrunk_box_sample(pre, rng):
    lo, hi = pre.inner()
    return lo + rng.random(pre.center.shape) * (hi - lo)


class _BoxFamily(PerceptionFamily):
    """Families whose concretization sets are products of intervals."""

    odd = True

    def _pull_inside(self, v, L, u):
        # floating point can push a sampled entry onto an excluded endpoint;
        # halve the offset from the centre until membership holds
        for _ in range(64):
            if self.same(self.perceive(u, L), v):
                return u
            u = v + 0.5 * (u - v)
        return v.copy()

    def sample(self, v, c, n, rng):
        v, L = self.check_perceived(v, c)
        pre = self.preimage(v, c)
        if pre.singleton:
            return [v.copy() for _ in range(n)]
        return [self._pull_inside(v, L, _shrunk_box_sample(pre, rng)) for _ in range(n)]

    def endpoint_fills(self, v, c, x, y):
        """Members of the concretization set approaching the payoff bounds."""
        v, L = self.check_perceived(v, c)
        pre = self.preimage(v, c)
        lo, hi = pre.inner()
        w = np.outer(x, y)
        low = np.where(w > 0, lo, v)
        high = np.where(w > 0, hi, v)
        return [self._pull_inside(v, L, low), self._pull_inside(v, L, high)]


class Masked(_BoxFamily):
    """Keep the ``c`` entries of largest magnitude (row-major tie-break)."""

    name = "masked"

    def perceive(self, u, c):
        u = self.prepare(u)
        c = check_level(c)
        if c == INF or c >= u.size:
            return u.copy()
        flat = u.ravel()
        order = np.argsort(-np.abs(flat), kind="stable")
        out = np.zeros_like(flat)
        keep = order[:c]
        out[keep] = flat[keep]
        return out.reshape(u.shape)

    def intrinsic_capability(self, u):
        return max(1, int(np.count_nonzero(self.prepare(u))))

    def preimage(self, v, c):
        v, L = self.check_perceived(v, c)
        flat = v.ravel()
        nz = np.flatnonzero(flat)
        zeros = np.zeros_like(v, dtype=bool)
        if L >= v.size or nz.size < L:
            return BoxPreimage(v, v.copy(), v.copy(), zeros, zeros.copy())
        theta = float(np.min(np.abs(flat[nz])))
        last = int(nz[np.abs(flat[nz]) == theta].max())
        masked = np.ones(v.size, dtype=bool)
        masked[nz] = False
        # masked entries ranked before the last kept theta-entry must stay strictly below theta
        strict = masked & (np.arange(v.size) < last)
        lo = np.where(masked, -theta, flat).reshape(v.shape)
        hi = np.where(masked, theta, flat).reshape(v.shape)
        strict = strict.reshape(v.shape)
        return BoxPreimage(v, lo, hi, strict, strict.copy())

    def theta(self, v, c):
        pre = self.preimage(v, c)
        return 0.0 if pre.singleton else float(np.max(pre.hi - pre.center))

    def masked_positions(self, v, c):
        pre = self.preimage(v, c)
        return pre.hi != pre.lo

    def narrow(self, v, c1, c2, cap=ENUM_CAP):
        c1, c2 = check_level(c1), check_level(c2)
        v = self.prepare(v)
        c1 = self.governing_level(v, c1)
        if c1 >= c2:
            return NarrowSet.enumerated(self, [self.perceive(v, c2)])
        w = self.perceive(v, c1)

        def contains(u):
            u = self.prepare(u)
            return (
                u.shape == w.shape
                and self.intrinsic_capability(u) <= c2
                and self.same(self.perceive(u, c1), w)
            )

        pre = self.preimage(w, c1)

        def sampler(n, rng):
            if pre.singleton:
                return [w.copy() for _ in range(n)]
            lo, hi = pre.inner()
            free = np.flatnonzero((pre.hi != pre.lo).ravel())
            kmax = int(min(free.size, c2 - c1))
            out = []
            for _ in range(n):
                k = int(rng.integers(0, kmax + 1))
                u = w.copy().ravel()
                pos = rng.choice(free, size=k, replace=False)
                u[pos] = lo.ravel()[pos] + rng.random(k) * (hi.ravel()[pos] - lo.ravel()[pos])
                out.append(u.reshape(w.shape))
            return out

        return NarrowSet.parametric(self, contains, sampler)


def _dec(x):
    return Decimal(repr(float(x)))


def _decimals(d):
    """Number of fractional digits of a Decimal (0 for integers)."""
    exp = d.normalize().as_tuple().exponent
    return max(0, -exp) if isinstance(exp, int) else 0


class Quantized(_BoxFamily):
    """Truncate every entry towards zero to ``c`` decimal digits.

    Floats are read as the shortest decimal that round-trips (``repr``), so
    ``0.29`` truncates to ``0.29`` at two digits rather than to ``0.28``.
    """

    name = "quantized"
    #: digit counts beyond this are treated as not finitely representable
    DIGIT_CAP = 15

    @staticmethod
    def truncate_entry(x, c):
        d = _dec(x)
        if d == 0 or _decimals(d) <= c:
            return float(x) + 0.0
        return float(d.quantize(Decimal(1).scaleb(-c), rounding=ROUND_DOWN)) + 0.0

    def perceive(self, u, c):
        u = self.prepare(u)
        c = check_level(c)
        if c == INF:
            return u.copy()
        out = np.array([self.truncate_entry(x, c) for x in u.ravel()], dtype=np.float64)
        return out.reshape(u.shape)

    def intrinsic_capability(self, u):
        u = self.prepare(u)
        digits = max(_decimals(_dec(x)) for x in u.ravel())
        if digits > self.DIGIT_CAP:
            return INF
        return max(1, digits)

    def preimage(self, v, c):
        v, L = self.check_perceived(v, c)
        if L == INF:
            zeros = np.zeros_like(v, dtype=bool)
            return BoxPreimage(v, v.copy(), v.copy(), zeros, zeros.copy())
        step = Decimal(1).scaleb(-L)
        lo = np.empty_like(v)
        hi = np.empty_like(v)
        for idx, x in np.ndenumerate(v):
            d = _dec(x)
            lo[idx] = float(d - step) if d <= 0 else float(x)
            hi[idx] = float(d + step) if d >= 0 else float(x)
        # the truncation preimage of w > 0 is [w, w + 10^-L): only far ends are open
        return BoxPreimage(v, lo, hi, v <= 0, v >= 0)

    def narrow(self, v, c1, c2, cap=ENUM_CAP):
        c1, c2 = check_level(c1), check_level(c2)
        v = self.prepare(v)
        c1 = self.governing_level(v, c1)
        if c1 >= c2:
            return NarrowSet.enumerated(self, [self.perceive(v, c2)])
        w = self.perceive(v, c1)
        if c2 == INF:

            def contains(u):
                u = self.prepare(u)
                return u.shape == w.shape and self.same(self.perceive(u, c1), w)

            def sampler(n, rng):
                return self.sample(w, c1, n, rng)

            return NarrowSet.parametric(self, contains, sampler)
        per_entry = 10 ** (c2 - c1)
        counts = [per_entry if x != 0 else 2 * per_entry - 1 for x in w.ravel()]
        total = math.prod(counts)
        if total > cap:
            raise TooLarge(f"narrow set has {total} elements, cap is {cap}")
        step = Decimal(1).scaleb(-c2)
        choices = []
        for x in w.ravel():
            d = _dec(x)
            ks = range(per_entry)
            if x > 0:
                vals = [d + k * step for k in ks]
            elif x < 0:
                vals = [d - k * step for k in reversed(ks)]
            else:
                vals = [-k * step for k in reversed(ks)] + [k * step for k in ks if k > 0]
            choices.append([float(val) + 0.0 for val in vals])
        elements = [np.array(combo).reshape(w.shape) for combo in itertools.product(*choices)]
        return NarrowSet.enumerated(self, elements)


class LimitedRank(PerceptionFamily):
    """Canonical rank-``c`` truncated SVD."""

    name = "limited_rank"
    odd = True

    def __init__(self, tie_tol=1e-10, rank_tol=1e-9):
        self.tie_tol = float(tie_tol)
        self.rank_tol = float(rank_tol)

    def __repr__(self):
        return f"LimitedRank(tie_tol={self.tie_tol!r}, rank_tol={self.rank_tol!r})"

    def same(self, a, b):
        if a.shape != b.shape:
            return False
        return float(np.linalg.norm(a - b)) <= 1e-9 * max(1.0, float(np.linalg.norm(b)))

    def perceive(self, u, c):
        u = self.prepare(u)
        c = check_level(c)
        m, n = u.shape
        if c == INF or c >= min(m, n):
            return u.copy()
        f = canonical_svd(u)
        s = f.sigma
        if s[c] <= self.rank_tol * s[0]:
            return u.copy()
        if s[c - 1] - s[c] < self.tie_tol * max(1.0, s[0]):
            raise DegenerateTie(
                f"singular values {s[c - 1]!r} and {s[c]!r} are tied at the rank-{c} cut"
            )
        return (f.U[:, :c] * s[:c]) @ f.V[:, :c].T

    def rank(self, u):
        return numerical_rank(np.linalg.svd(self.prepare(u), compute_uv=False), self.rank_tol)

    def intrinsic_capability(self, u):
        return max(1, self.rank(u))

    def preimage(self, v, c):
        v, L = self.check_perceived(v, c)
        m, n = v.shape
        r = self.rank(v)
        if L == INF or L >= min(m, n) or r < L:
            return LowRankPreimage(v, L, 0.0, np.zeros((m, 0)), np.zeros((n, 0)))
        sigma = float(np.linalg.svd(v, compute_uv=False)[r - 1])
        right, left = null_space_bases(v, self.rank_tol)
        return LowRankPreimage(v, L, sigma, left, right)

    def _perturb(self, pre, k, rng):
        """``v`` plus ``k`` random null-space directions with small singular values."""
        v = pre.center
        if k == 0:
            return v.copy()
        P, _ = np.linalg.qr(rng.standard_normal((pre.left_null.shape[1], k)))
        Q, _ = np.linalg.qr(rng.standard_normal((pre.right_null.shape[1], k)))
        s = rng.random(k) * pre.sigma * SHRINK
        return v + pre.left_null @ (P * s) @ (pre.right_null @ Q).T

    def sample(self, v, c, n, rng):
        v, _ = self.check_perceived(v, c)
        pre = self.preimage(v, c)
        if pre.singleton:
            return [v.copy() for _ in range(n)]
        kmax = min(pre.left_null.shape[1], pre.right_null.shape[1])
        return [self._perturb(pre, int(rng.integers(1, kmax + 1)), rng) for _ in range(n)]

    def narrow(self, v, c1, c2, cap=ENUM_CAP):
        c1, c2 = check_level(c1), check_level(c2)
        v = self.prepare(v)
        c1 = self.governing_level(v, c1)
        if c1 >= c2:
            return NarrowSet.enumerated(self, [self.perceive(v, c2)])
        w = self.perceive(v, c1)

        def contains(u):
            u = self.prepare(u)
            return (
                u.shape == w.shape
                and self.intrinsic_capability(u) <= c2
                and self.same(self.perceive(u, c1), w)
            )

        pre = self.preimage(w, c1)

        def sampler(n, rng):
            if pre.singleton:
                return [w.copy() for _ in range(n)]
            kmax = int(min(pre.left_null.shape[1], pre.right_null.shape[1], c2 - c1))
            return [self._perturb(pre, int(rng.integers(0, kmax + 1)), rng) for _ in range(n)]

        return NarrowSet.parametric(self, contains, sampler)


@dataclass
class TableFamily:
    """A finite universe of payoff matrices with a level map.

    ``universe`` maps ids to matrices (insertion order is the canonical order);
    ``mapping`` maps ``(id, level)`` to an id for levels ``1..level_cap``.
    Levels above ``level_cap`` behave like ``level_cap``; ``inf`` is identity.
    """

    universe: dict
    mapping: dict
    level_cap: int
    _index: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.universe = {str(k): as_matrix(a, f"universe[{k}]") for k, a in self.universe.items()}
        self.mapping = {(str(a), int(lvl)): str(b) for (a, lvl), b in self.mapping.items()}
        self.level_cap = check_level(self.level_cap)
        if self.level_cap == INF:
            raise InvalidInput("level_cap must be finite")
        self._index = {}
        for k, a in self.universe.items():
            self._index.setdefault(matrix_key(a), k)

    @property
    def ids(self):
        return list(self.universe)

    def id_of(self, u):
        key = matrix_key(u)
        if key not in self._index:
            raise UnknownMatrix("matrix is not in the table universe")
        return self._index[key]

    def step(self, uid, c):
        c = check_level(c)
        if c == INF:
            return uid
        try:
            return self.mapping[(uid, min(c, self.level_cap))]
        except KeyError:
            raise InvalidInput(f"table map is not total at ({uid}, {min(c, self.level_cap)})") from None


class Table(PerceptionFamily):
    """Perception given by a finite lookup table."""

    name = "table"

    def __init__(self, table):
        self.table = table
        self.odd = not table_oddness_violations(table)

    def __repr__(self):
        return f"Table(|universe|={len(self.table.universe)}, level_cap={self.table.level_cap})"

    def perceive(self, u, c):
        u = self.prepare(u)
        uid = self.table.id_of(u)
        return self.table.universe[self.table.step(uid, c)].copy()

    def intrinsic_capability_id(self, uid):
        for lvl in range(1, self.table.level_cap + 1):
            if self.table.mapping.get((uid, lvl)) == uid:
                return lvl
        return INF

    def intrinsic_capability(self, u):
        return self.intrinsic_capability_id(self.table.id_of(self.prepare(u)))

    def inverse_ids(self, v, c):
        v = self.prepare(v)
        L = self.governing_level(v, c)
        vid = self.table.id_of(v)
        return [uid for uid in self.table.ids if self.table.step(uid, L) == vid]

    def preimage(self, v, c):
        v, _ = self.check_perceived(v, c)
        return FinitePreimage([self.table.universe[k] for k in self.inverse_ids(v, c)])

    def sample(self, v, c, n, rng):
        mats = self.preimage(v, c).matrices
        if len(mats) == 1:
            return [mats[0].copy() for _ in range(n)]
        return [mats[int(i)].copy() for i in rng.integers(0, len(mats), size=n)]

    def narrow(self, v, c1, c2, cap=ENUM_CAP):
        c1, c2 = check_level(c1), check_level(c2)
        v = self.prepare(v)
        c1 = self.governing_level(v, c1)
        if c1 >= c2:
            return NarrowSet.enumerated(self, [self.perceive(v, c2)])
        lo = min(c1, c2)
        target = self.table.step(self.table.id_of(v), lo)
        ids = [
            uid
            for uid in self.table.ids
            if self.intrinsic_capability_id(uid) <= c2 and self.table.step(uid, lo) == target
        ]
        if len(ids) > cap:
            raise TooLarge(f"narrow set has {len(ids)} elements, cap is {cap}")
        return NarrowSet.enumerated(self, [self.table.universe[k].copy() for k in ids])


# ---------------------------------------------------------------- narrow set


@dataclass
class NarrowSet:
    """Either an explicit element list or a membership test plus sampler."""

    family: PerceptionFamily
    elements: list = None
    _contains: object = None
    _sampler: object = None

    @classmethod
    def enumerated(cls, family, elements):
        return cls(family=family, elements=list(elements))

    @classmethod
    def parametric(cls, family, contains, sampler):
        return cls(family=family, _contains=contains, _sampler=sampler)

    @property
    def is_enumerated(self):
        return self.elements is not None

    def __len__(self):
        if not self.is_enumerated:
            raise TypeError("parametric narrow set has no length")
        return len(self.elements)

    def __iter__(self):
        if not self.is_enumerated:
            raise TypeError("parametric narrow set is not iterable; use sample()")
        return iter(self.elements)

    def contains(self, u):
        u = np.asarray(u, dtype=np.float64)
        if self.is_enumerated:
            return any(self.family.same(u, e) for e in self.elements if e.shape == u.shape)
        return bool(self._contains(u))

    def index(self, u):
        """Position of ``u`` in an enumerated set, or ``None``."""
        u = np.asarray(u, dtype=np.float64)
        for i, e in enumerate(self.elements):
            if e.shape == u.shape and self.family.same(u, e):
                return i
        return None

    def sample(self, n, seed=0):
        rng = np.random.default_rng(seed)
        if self.is_enumerated:
            return [self.elements[int(i)].copy() for i in rng.integers(0, len(self.elements), size=n)]
        return self._sampler(n, rng)


# ---------------------------------------------------------------- validation


def check_axioms(family, shape, n_trials=200, seed=0, max_level=6, matrices=(), atol=1e-9):
    """Randomised check of the perception axioms for a parametric family.

    Tests path independence, idempotence, identity at ``inf`` and (for odd
    families) oddness on ``matrices`` plus ``n_trials`` random matrices of
    ``shape``. Comparisons use ``family.same``, which is exact for box
    families and Frobenius-tolerant for limited rank. Inputs whose truncation
    is numerically tied are skipped and counted. Returns
    ``(violations, checked, skipped)``.
    """
    rng = np.random.default_rng(seed)
    cases = [np.asarray(u, dtype=np.float64) for u in matrices]
    for _ in range(n_trials):
        cases.append(np.round(rng.uniform(-1, 1, size=shape), int(rng.integers(1, 5))))
    violations, checked, skipped = [], 0, 0
    for i, u in enumerate(cases):
        a, b = (int(t) for t in rng.integers(1, max_level + 1, size=2))
        try:
            fa = family.perceive(u, a)
            pairs = [
                ("path_independence", family.perceive(fa, b), family.perceive(u, min(a, b))),
                ("idempotence", family.perceive(fa, a), fa),
                ("identity_at_inf", family.perceive(u, INF), u),
            ]
            if getattr(family, "odd", True):
                pairs.append(("oddness", family.perceive(-u, a), -fa))
        except DegenerateTie:
            skipped += 1
            continue
        checked += 1
        for name, lhs, rhs in pairs:
            if not family.same(lhs, rhs):
                violations.append((name, i, a, b))
    return violations, checked, skipped




@dataclass
class TableValidationReport:
    valid: bool
    violations: list


def validate_table_family(table, check_odd=False):
    """Exhaustively check totality, path independence and cap fixed points.

    Every violation is reported as a tuple whose first element names the rule.
    With ``check_odd`` the oddness violations are appended as well.
    """
    violations = []
    ids = table.ids
    shapes = {a.shape for a in table.universe.values()}
    if len(shapes) > 1:
        violations.append(("shape", sorted(shapes)))
    seen = {}
    for k, a in table.universe.items():
        key = matrix_key(a)
        if key in seen:
            violations.append(("duplicate_matrix", seen[key], k))
        seen.setdefault(key, k)
    cap = table.level_cap
    total = True
    for uid in ids:
        for lvl in range(1, cap + 1):
            tgt = table.mapping.get((uid, lvl))
            if tgt is None:
                violations.append(("totality", uid, lvl))
                total = False
            elif tgt not in table.universe:
                violations.append(("unknown_target", uid, lvl, tgt))
                total = False
    for (uid, lvl) in table.mapping:
        if uid not in table.universe or not 1 <= lvl <= cap:
            violations.append(("stray_entry", uid, lvl))
    if total:
        for uid in ids:
            for a in range(1, cap + 1):
                for b in range(1, cap + 1):
                    got = table.mapping[(table.mapping[(uid, a)], b)]
                    want = table.mapping[(uid, min(a, b))]
                    if got != want:
                        violations.append(("path_independence", uid, a, b, got, want))
            fixed = any(table.mapping[(uid, lvl)] == uid for lvl in range(1, cap + 1))
            if fixed and table.mapping[(uid, cap)] != uid:
                violations.append(("cap_fixed_point", uid))
    if check_odd:
        violations.extend(table_oddness_violations(table))
    return TableValidationReport(valid=not violations, violations=violations)


def table_oddness_violations(table):
    """Violations of ``F(-u, c) = -F(u, c)`` over the whole universe."""
    out = []
    for uid, a in table.universe.items():
        neg = table._index.get(matrix_key(-a))
        if neg is None:
            out.append(("odd_missing_negation", uid))
            continue
        for lvl in range(1, table.level_cap + 1):
            fu = table.mapping.get((uid, lvl))
            fn = table.mapping.get((neg, lvl))
            if fu is None or fn is None:
                continue
            if not np.array_equal(table.universe[fn], -table.universe[fu]):
                out.append(("odd_map", uid, lvl))
    return out


# ---------------------------------------------------------------- functional API


def perceive(family, u, c):
    """Perceived payoff matrix ``F(u, c)``."""
    return family.perceive(u, c)


def intrinsic_capability(family, u):
    """Smallest level at which ``u`` is perceived exactly."""
    return family.intrinsic_capability(u)


def concretization_contains(family, v, c, u):
    """Whether ``u`` lies in the concretization set of ``v`` at level ``c``."""
    return family.contains(v, c, u)


def sample_concretization(family, v, c, n, seed=0):
    """``n`` seeded samples from the concretization set of ``v`` at level ``c``."""
    return family.sample(v, check_level(c), int(n), np.random.default_rng(seed))


def narrow_set(family, v, c1, c2, cap=ENUM_CAP):
    """Narrow concretization set ``N(v, c1, c2)``."""
    return family.narrow(v, c1, c2, cap=cap)


def preimage(family, v, c):
    """Structured description of the concretization set of ``v`` at level ``c``."""
    return family.preimage(v, check_level(c))
