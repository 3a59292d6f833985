import numpy as np
import pytest

import oracles
from olpgame.bounds import (
    bounds_sampling_oracle,
    expected_payoff,
    extremal_concretization_limited_rank,
    payoff_bounds,
    uncertainty_limited_rank,
)
from olpgame.errors import DegenerateDirection, InvalidInput, InvalidPerturbation
from olpgame.perception import LimitedRank, Masked, Quantized, Table, TableFamily

M, Q, L = Masked(), Quantized(), LimitedRank()
HALF = np.array([0.5, 0.5])


def test_expected_payoff_examples():
    assert expected_payoff(np.eye(2), [1, 0], [1, 0]) == 1.0
    u = np.arange(6.0).reshape(2, 3)
    assert expected_payoff(u, [0, 1], [0, 0, 1]) == u[1, 2]
    assert expected_payoff([[1, -1], [-1, 1]], HALF, HALF) == 0.0


def test_bounds_examples():
    b = payoff_bounds(L, [[2, 0], [0, 0]], 1, HALF, HALF)
    assert (b.lower, b.upper) == pytest.approx((0.0, 1.0), abs=1e-12)
    A = np.array([[2.0, 1.0], [0.5, 3.0]])
    b = payoff_bounds(L, A, 2, HALF, HALF)
    assert b.lower == b.upper == pytest.approx(HALF @ A @ HALF)
    b = payoff_bounds(Q, [[0.5, -0.5], [-0.5, 0.5]], 1, HALF, HALF)
    assert (b.lower, b.upper) == pytest.approx((-0.05, 0.05), abs=1e-12)
    b = payoff_bounds(M, [[3, 0], [2, 0]], 2, HALF, HALF)
    assert (b.lower, b.upper) == pytest.approx((0.25, 2.25), abs=1e-12)


def test_uncertainty_examples():
    assert uncertainty_limited_rank(np.diag([2.0, 1.0]), 2, HALF, HALF) == 0.0
    assert uncertainty_limited_rank([[2, 0], [0, 0]], 1, HALF, HALF) == pytest.approx(0.5)
    # x has no left-null component
    assert uncertainty_limited_rank([[2, 0], [0, 0]], 1, [1, 0], HALF) == 0.0


def test_extremal_examples():
    A = np.array([[2.0, 0.0], [0.0, 0.0]])
    Aq = extremal_concretization_limited_rank(A, 1, HALF, HALF, 0.0)
    np.testing.assert_allclose(L.perceive(Aq, 1), A, atol=1e-12)
    eps = 1e-9
    for q in (2 * (1 - eps), -2 * (1 - eps)):
        Aq = extremal_concretization_limited_rank(A, 1, HALF, HALF, q)
        assert HALF @ Aq @ HALF == pytest.approx(0.5 + np.sign(q) * 0.5 * (1 - eps), abs=1e-12)
        np.testing.assert_allclose(L.perceive(Aq, 1), A, atol=1e-9)


def test_extremal_errors():
    A = np.array([[2.0, 0.0], [0.0, 0.0]])
    with pytest.raises(InvalidPerturbation):
        extremal_concretization_limited_rank(A, 1, HALF, HALF, 2.0)
    with pytest.raises(InvalidInput):
        extremal_concretization_limited_rank(A, 2, HALF, HALF, 0.1)
    with pytest.raises(DegenerateDirection):
        extremal_concretization_limited_rank(A, 1, [1, 0], HALF, 0.1)


def test_box_bounds_match_vertex_enumeration(rng):
    for _ in range(40):
        u = np.round(rng.normal(size=(2, 3)), 3)
        c = int(rng.integers(1, 4))
        x, y = rng.dirichlet(np.ones(2)), rng.dirichlet(np.ones(3))
        v = Q.perceive(u, c)
        lo = np.empty_like(v)
        hi = np.empty_like(v)
        for i in range(v.size):
            lo.flat[i], hi.flat[i] = oracles.quantized_entry_interval(repr(float(v.flat[i])), c)
        ref = oracles.bilinear_box_extremes(lo, hi, x, y)
        b = payoff_bounds(Q, v, c, x, y)
        assert (b.lower, b.upper) == pytest.approx(ref, abs=1e-12)


def test_limited_rank_bounds_match_construction(rng):
    for _ in range(20):
        A = rng.normal(size=(3, 3))
        v = L.perceive(A, 1)
        x, y = rng.dirichlet(np.ones(3)), rng.dirichlet(np.ones(3))
        lo, hi = oracles.lowrank_bounds_by_sampling(v, 1, x, y, 200, rng)
        b = payoff_bounds(L, v, 1, x, y)
        assert b.lower <= lo + 1e-9 and hi <= b.upper + 1e-9
        assert abs(lo - b.lower) < 1e-6 * max(1, abs(b.lower)) and abs(hi - b.upper) < 1e-6 * max(1, abs(b.upper))


def test_sampling_oracle_examples():
    est = bounds_sampling_oracle(Q, [[0.5, -0.5], [-0.5, 0.5]], 1, HALF, HALF, 10**4, seed=0)
    assert (est.lower, est.upper) == pytest.approx((-0.05, 0.05), abs=1e-3)
    est = bounds_sampling_oracle(L, [[2, 0], [0, 0]], 1, HALF, HALF, 100, seed=0)
    assert (est.lower, est.upper) == pytest.approx((0.0, 1.0), abs=1e-6)
    est = bounds_sampling_oracle(M, [[3, 0], [2, 0]], 2, HALF, HALF, 100, seed=0)
    assert (est.lower, est.upper) == pytest.approx((0.25, 2.25), abs=1e-6)


def test_table_bounds_exact():
    tf = TableFamily({"a": [[1.0, 0.0]], "b": [[0.0, 3.0]]}, {("a", 1): "a", ("b", 1): "a"}, 1)
    T = Table(tf)
    b = payoff_bounds(T, [[1.0, 0.0]], 1, [1.0], HALF)
    assert (b.lower, b.upper) == (0.5, 1.5)
    assert bounds_sampling_oracle(T, [[1.0, 0.0]], 1, [1.0], HALF, 5) == b
