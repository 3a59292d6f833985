import numpy as np
import pytest

import oracles
from olpgame.equilibrium import (
    CompactResponse,
    EnumeratedResponse,
    build_compact_repr,
    eval_compact_repr,
    map_back_equilibrium,
    reduce_general_to_zero_sum,
    search_nash_table,
    value_ordering,
    verify_nash,
)
from olpgame.errors import InvalidInput, InvalidResponseFunction, ReductionViolation
from olpgame.instances import (
    extend_response,
    general_sum_table_game,
    hand_built_zero_sum_games,
    random_general_sum_table_game,
    with_payoff_duplicates,
    zero_sum_table_game,
)
from olpgame.perception import INF, Masked, Quantized, validate_table_family
from olpgame.solver import GameInstance, solve_maximin

MP = np.array([[1.0, -1.0], [-1.0, 1.0]])
HALF = np.array([0.5, 0.5])
GAMES = hand_built_zero_sum_games()


def _enumerated(game, ys):
    return EnumeratedResponse(game.family, list(game.narrow.elements), ys)


def test_pennies_deviations_zero():
    g = GameInstance(Masked(), MP, INF, INF)
    rep = verify_nash(g, HALF, _enumerated(g, [HALF]), eps=0.0)
    assert rep.holds
    assert rep.max_deviation_p1 <= 1e-12 and rep.max_deviation_p2 <= 1e-12


def test_corrupted_response_names_witness():
    g = GAMES["pennies_hidden"]
    res = search_nash_table(g, eps=1e-4)
    elements = res.responses.elements
    bad = [y.copy() for y in res.responses.responses]
    # replace one response by the opponent's worst column (largest row payoff)
    k = 1
    cols = res.x_star @ elements[k]
    bad[k] = np.eye(2)[int(np.argmax(cols))]
    rep = verify_nash(g, res.x_star, EnumeratedResponse(g.family, elements, bad), eps=1e-4)
    assert not rep.holds
    assert rep.worst_element == k


def test_domain_mismatch():
    g = GAMES["pennies_hidden"]
    Ry = EnumeratedResponse(g.family, [g.perceived_row], [HALF])
    with pytest.raises(InvalidResponseFunction):
        verify_nash(g, HALF, Ry)


def test_equal_capabilities_recover_classical_nash():
    base = GAMES["two_by_three"]
    A = base.perceived_row
    g = GameInstance(base.family, A, 2, 2, zero_sum=True)
    assert len(g.narrow.elements) == 1
    res = search_nash_table(g, eps=1e-4)
    value, _ = oracles.game_value_lp(A)
    assert (res.x_star @ A).min() >= value - 1e-4


def test_coinciding_perceptions():
    # universe {A, -A}: both levels see A, so there is no uncertainty
    g = GAMES["pennies_exact"]
    assert len(g.family.table.universe) == 2
    res = search_nash_table(g, eps=1e-4)
    np.testing.assert_allclose(res.x_star, HALF, atol=1e-4)
    np.testing.assert_allclose(res.responses.responses[0], HALF, atol=1e-4)


@pytest.mark.parametrize("name", sorted(GAMES))
def test_hand_built_search_and_ordering(name):
    g = GAMES[name]
    res = search_nash_table(g, eps=1e-4)
    assert res.report.holds
    assert verify_nash(g, res.x_star, res.responses, eps=1e-4).holds
    V_h, V_n, V_s = value_ordering(g, res.x_star, res.responses)
    assert V_h <= V_n + 1e-9 and V_n <= V_s + 1e-9


def test_quantized_instance_agrees_with_maximin():
    g = GameInstance(Quantized(), [[0.5, -0.3]], 1, 2)
    assert len(g.narrow.elements) == 100
    res = search_nash_table(g, eps=1e-6)
    assert verify_nash(g, res.x_star, res.responses, eps=1e-6).holds
    _, V_n, _ = value_ordering(g, res.x_star, res.responses)
    assert V_n == pytest.approx(solve_maximin(g).value, abs=1e-6)


@pytest.mark.parametrize("name", sorted(GAMES))
def test_compact_repr_on_tables(name):
    g = GAMES[name]
    res = search_nash_table(g, eps=1e-4)
    rep = build_compact_repr(g, res.x_star, res.responses, 1e-4)
    assert rep.eps_prime == 0.0
    assert 1 <= len(rep.anchors) <= g.m + 1
    for a, y in rep.anchors:
        assert g.narrow.contains(a)
        np.testing.assert_array_equal(eval_compact_repr(g, rep, a), res.responses(a))
    assert verify_nash(g, res.x_star, CompactResponse(g, rep), 1e-4 + rep.eps_prime).holds


def test_singleton_narrow_set_one_anchor():
    g = GAMES["pennies_exact"]
    res = search_nash_table(g, eps=1e-4)
    assert len(build_compact_repr(g, res.x_star, res.responses, 1e-4).anchors) == 1


def test_compact_repr_quantized():
    g = GameInstance(Quantized(), [[0.5, -0.3]], 1, 2)
    res = search_nash_table(g, eps=1e-6)
    rep = build_compact_repr(g, res.x_star, res.responses, 1e-6)
    assert rep.eps_prime == 1e-6 and len(rep.anchors) <= 2
    assert verify_nash(g, res.x_star, CompactResponse(g, rep), 1e-6 + 1e-6).holds
    with pytest.raises(InvalidInput):
        eval_compact_repr(g, rep, np.array([[0.7, 0.7]]))


def test_duplicates_keep_anchor_count():
    g = GAMES["two_by_three"]
    res = search_nash_table(g, eps=1e-4)
    n0 = len(build_compact_repr(g, res.x_star, res.responses, 1e-4).anchors)
    dup, originals = with_payoff_duplicates(g)
    assert len(dup.narrow.elements) == 2 * len(g.narrow.elements)
    Ry = extend_response(res.responses, dup, originals)
    assert len(build_compact_repr(dup, res.x_star, Ry, 1e-4).anchors) == n0


def test_unverified_pair_rejected():
    g = GAMES["pennies_hidden"]
    Ry = _enumerated(g, [np.array([1.0, 0.0])] * len(g.narrow.elements))
    with pytest.raises(InvalidInput):
        build_compact_repr(g, np.array([1.0, 0.0]), Ry, 1e-4)


def _round_trip(g):
    reduced, mapping = reduce_general_to_zero_sum(g)
    assert validate_table_family(reduced.family.table, check_odd=True).valid
    res = search_nash_table(reduced, eps=1e-5)
    assert res.x_star[mapping.m:].sum() <= 1e-9
    x, Ry = map_back_equilibrium(mapping, res.x_star, res.responses)
    return reduced, mapping, verify_nash(g, x, Ry, eps=1e-4)


def test_reduction_singleton_narrow_set():
    u1 = np.array([[0.3, -0.2], [-0.1, 0.4]])
    v1 = np.array([[-0.3, 0.2], [0.1, -0.4]])
    g = general_sum_table_game(u1, [], v1, [v1])
    assert len(g.narrow.elements) == 1
    reduced, _, rep = _round_trip(g)
    assert len(reduced.narrow.elements) == 2
    assert rep.holds


def test_reduction_near_identity():
    u1 = np.array([[0.1, 0.9], [0.9, 0.1]])
    v1 = np.array([[1.9, 1.1], [1.1, 1.9]])
    g = general_sum_table_game(u1, [], v1, [v1])
    _, mapping = reduce_general_to_zero_sum(g)
    assert mapping.k_p == pytest.approx(1.0) and mapping.b_p == pytest.approx(0.0)
    assert mapping.k_n == pytest.approx(-1.0) and mapping.b_n == pytest.approx(3.0)


@pytest.mark.parametrize("seed", range(3))
def test_reduction_round_trip(seed):
    _, _, rep = _round_trip(random_general_sum_table_game(seed))
    assert rep.holds


def test_map_back_guards():
    g = random_general_sum_table_game(0)
    _, mapping = reduce_general_to_zero_sum(g)
    always = lambda S: HALF
    x, Ry = map_back_equilibrium(mapping, [0.5, 0.5, 0.0, 0.0], always)
    np.testing.assert_allclose(x, HALF)
    assert len(Ry.elements) == len(g.narrow.elements)
    with pytest.raises(ReductionViolation):
        map_back_equilibrium(mapping, [0.45, 0.45, 0.1, 0.0], always)


def test_reduction_rejects_zero_sum():
    with pytest.raises(InvalidInput):
        reduce_general_to_zero_sum(GAMES["pennies_exact"])


def test_small_table_builder():
    g = zero_sum_table_game(MP, [MP * 0.5])
    assert len(g.narrow.elements) == 2
