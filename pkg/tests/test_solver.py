import numpy as np
import pytest

import oracles
from olpgame.bounds import payoff_bounds
from olpgame.errors import InvalidInput
from olpgame.numerics import zero_sum_value
from olpgame.perception import INF, LimitedRank, Masked, Quantized
from olpgame.solver import (
    GameInstance,
    attainability_basis,
    best_response_lower,
    best_response_upper,
    check_constant_gap,
    check_narrowly_reversible,
    make_game,
    maximin_objective,
    solve_maximin,
    stackelberg_gap_probe,
)

M, Q, L = Masked(), Quantized(), LimitedRank()
MP = np.array([[1.0, -1.0], [-1.0, 1.0]])
QMP = 0.5 * MP
HALF = np.array([0.5, 0.5])


def test_objective_at_full_capability(rng):
    u = rng.normal(size=(3, 4))
    g = GameInstance(M, u, INF, INF)
    for _ in range(5):
        x = rng.dirichlet(np.ones(3))
        val, _ = maximin_objective(g, x)
        assert val == pytest.approx((x @ u).min(), abs=1e-14)


def test_objective_quantized_example():
    g = GameInstance(Q, QMP, 1, 2)
    assert maximin_objective(g, HALF)[0] == pytest.approx(-0.05, abs=1e-12)


def test_objective_rejects_non_simplex():
    g = GameInstance(Q, QMP, 1, 2)
    with pytest.raises(InvalidInput):
        maximin_objective(g, [0.7, 0.7])


def test_solve_examples():
    res = solve_maximin(GameInstance(M, MP, INF, INF))
    assert abs(res.value) <= 1e-4
    np.testing.assert_allclose(res.x_star, HALF, atol=1e-3)
    res = solve_maximin(GameInstance(Q, QMP, 1, 2))
    assert res.value == pytest.approx(-0.05, abs=1e-4)
    g = GameInstance(Q, [[0.5, -0.3, 0.2]], 1, 2)
    res = solve_maximin(g)
    np.testing.assert_array_equal(res.x_star, [1.0])
    lows = [payoff_bounds(Q, g.perceived_row, 1, [1.0], np.eye(3)[k]).lower for k in range(3)]
    assert res.value == pytest.approx(min(lows))


def test_solve_matches_grid_oracle(rng):
    for fam in (M, Q, L):
        for _ in range(3):
            u = fam.perceive(np.round(rng.normal(size=(3, 3)), 3), 2)
            g = GameInstance(fam, u, 2, 3)
            res = solve_maximin(g, tol=1e-7)
            ref, _ = oracles.grid_max(lambda x: maximin_objective(g, x)[0], 3, 60)
            assert res.value >= ref - 1e-9
            assert res.certified_gap >= -1e-12


def test_degenerates_to_zero_sum_value(rng):
    for _ in range(10):
        u = rng.uniform(-1, 1, size=(3, 3))
        res = solve_maximin(GameInstance(M, u, INF, INF), tol=1e-6)
        ref = zero_sum_value(u, tol=1e-6)[0]
        assert abs(res.value - ref) <= 2e-6


def test_concavity_of_objective(rng):
    for fam in (M, Q, L):
        u = fam.perceive(np.round(rng.normal(size=(3, 3)), 3), 1)
        g = GameInstance(fam, u, 1, 2)
        for _ in range(100):
            x1, x2 = rng.dirichlet(np.ones(3), size=2)
            lam = rng.uniform()
            lhs = maximin_objective(g, lam * x1 + (1 - lam) * x2)[0]
            rhs = lam * maximin_objective(g, x1)[0] + (1 - lam) * maximin_objective(g, x2)[0]
            assert lhs >= rhs - 1e-9


def test_pure_columns_suffice(rng):
    # the minimum of the lower bound over mixed y is reached at a pure column
    for fam in (M, Q, L):
        u = fam.perceive(np.round(rng.normal(size=(2, 3)), 3), 1)
        g = GameInstance(fam, u, 1, 2)
        x = rng.dirichlet(np.ones(2))
        pure = maximin_objective(g, x)[0]
        ys = rng.dirichlet(np.ones(3), size=500)
        mixed = min(payoff_bounds(fam, u, 1, x, y).lower for y in ys)
        assert mixed >= pure - 1e-12


def _grid_best(fam, v, c, x, n, lower):
    R = 400
    vals = []
    for y in oracles.simplex_grid(n, R):
        b = payoff_bounds(fam, v, c, x, y)
        vals.append(b.lower if lower else -b.upper)
    return max(vals) if lower else -max(vals)


def test_best_response_zero_uncertainty(rng):
    u = rng.normal(size=(3, 4))
    g = GameInstance(M, u, INF, INF)
    x = rng.dirichlet(np.ones(3))
    assert np.argmax(best_response_upper(g, u, INF, x)) == np.argmin(x @ u)
    assert np.argmax(best_response_lower(g, u, INF, x)) == np.argmax(x @ u)


def test_best_response_quantized_against_grid(rng):
    for _ in range(5):
        v = Q.perceive(np.round(rng.uniform(-1, 1, size=(2, 2)), 3), 1)
        g = GameInstance(Q, v, 1, 1)
        x = rng.dirichlet(np.ones(2))
        y = best_response_upper(g, v, 1, x)
        assert payoff_bounds(Q, v, 1, x, y).upper <= _grid_best(Q, v, 1, x, 2, False) + 1e-12
        y = best_response_lower(g, v, 1, x)
        assert payoff_bounds(Q, v, 1, x, y).lower >= _grid_best(Q, v, 1, x, 2, True) - 1e-12


def test_best_response_limited_rank_against_grid():
    v = np.array([[2.0, 0.0], [0.0, 0.0]])
    g = GameInstance(L, v, 1, 1)
    y = best_response_upper(g, v, 1, HALF)
    assert payoff_bounds(L, v, 1, HALF, y).upper == pytest.approx(_grid_best(L, v, 1, HALF, 2, False), abs=1e-3)
    y = best_response_lower(g, v, 1, HALF)
    assert payoff_bounds(L, v, 1, HALF, y).lower == pytest.approx(_grid_best(L, v, 1, HALF, 2, True), abs=1e-3)


def test_best_response_all_columns_tie():
    v = np.array([[1.0, 1.0], [1.0, 1.0]])
    g = GameInstance(M, v, INF, INF)
    y = best_response_lower(g, v, INF, HALF)
    assert payoff_bounds(M, v, INF, HALF, y).lower == 1.0


def test_constant_gap_verdicts():
    rep = check_constant_gap(Q, 2, n_trials=100, seed=0)
    assert rep.verdict == "holds"
    assert all("zero_entry" in str(w) or "gap" in w for w in rep.witnesses)
    assert check_constant_gap(M, 2, n_trials=50, seed=0).verdict == "fails"
    rep = check_constant_gap(L, 1, n_trials=50, seed=0)
    assert rep.verdict == "fails" and rep.witnesses


def test_narrowly_reversible_verdicts(rng):
    for _ in range(20):
        u = rng.normal(size=(3, 1)) @ rng.normal(size=(1, 3))
        rep = check_narrowly_reversible(GameInstance(L, u, 1, 2), n_x_samples=5, seed=0)
        assert rep.ok
    v = np.array([[3.0, 0.0, 1.0], [2.0, 0.0, 0.0]])
    rep = check_narrowly_reversible(GameInstance(M, v, 3, 5), n_x_samples=5, seed=0)
    assert rep.ok
    rep = check_narrowly_reversible(GameInstance(M, v, 3, 3), n_x_samples=3, seed=0)
    assert rep.ok and rep.notes


def test_probe_examples():
    g = GameInstance(Q, [[0.52, -0.37], [-0.45, 0.61]], 2, 3)
    x = solve_maximin(g).x_star
    p = stackelberg_gap_probe(g, x, n_samples=100, seed=0)
    assert p.h1 <= p.g_lower_est + 1e-9
    assert p.g_lower_est - p.h1 <= 1e-4
    u = np.array([[1.0, 2.0, 0.5], [2.0, 4.0, 1.0], [-1.0, -2.0, -0.5]])
    g = GameInstance(L, u, 1, 2)
    x = solve_maximin(g, tol=1e-8).x_star
    p = stackelberg_gap_probe(g, x, n_samples=100, seed=0)
    assert p.g_lower_est - p.h1 <= 1e-4
    g = GameInstance(M, MP, 4, 4)
    p = stackelberg_gap_probe(g, HALF)
    assert p.g_lower_est == pytest.approx(p.h1)


def test_player_swap():
    g = make_game(Q, [[0.5, -0.5], [-0.5, 0.5]], 3, 1)
    assert g.swapped and g.c1 <= g.c2


def test_attainability_basis():
    assert "constant-gap" in attainability_basis(GameInstance(Q, QMP, 1, 2))
    assert attainability_basis(GameInstance(Q, [[0.5, 0.0]], 1, 2)) is None
    assert "narrowly reversible" in attainability_basis(GameInstance(L, [[2.0, 0.0], [0.0, 0.0]], 1, 2))
    v = np.array([[3.0, 0.0, 1.0], [2.0, 0.0, 0.0]])
    assert attainability_basis(GameInstance(M, v, 3, 5)) is not None
    assert attainability_basis(GameInstance(M, v, 3, 4)) is None
