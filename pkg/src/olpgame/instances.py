"""Builders for small table games used by fixtures, tests and examples."""

import numpy as np

from .perception import Table, TableFamily, matrix_key
from .solver import GameInstance


def _add(universe, mapping, uid, M, lvl1, lvl2, odd=True):
    universe[uid] = np.asarray(M, dtype=np.float64)
    mapping[(uid, 1)] = lvl1
    mapping[(uid, 2)] = lvl2
    if odd:
        universe["-" + uid] = -universe[uid]
        mapping[("-" + uid, 1)] = "-" + lvl1
        mapping[("-" + uid, 2)] = "-" + lvl2


def zero_sum_table_game(u1, perceptions, concretizations=None, odd=True):
    """Zero-sum table game at levels (1, 2) with a hand-picked narrow set.

    ``u1`` is the level-1 view. ``perceptions`` are the level-2 views the
    opponent may hold; ``concretizations[i]`` lists extra true matrices that
    the opponent perceives as ``perceptions[i]`` (so its upper/lower bounds
    range over them). The narrow set is ``{u1} + perceptions``.
    """
    concretizations = concretizations or [[] for _ in perceptions]
    universe, mapping = {}, {}
    _add(universe, mapping, "u1", u1, "u1", "u1", odd)
    for i, (V, extra) in enumerate(zip(perceptions, concretizations)):
        _add(universe, mapping, f"v{i}", V, "u1", f"v{i}", odd)
        for j, W in enumerate(extra):
            _add(universe, mapping, f"v{i}w{j}", W, "u1", f"v{i}", odd)
    fam = Table(TableFamily(universe, mapping, 2))
    return GameInstance(fam, u1, 1, 2, zero_sum=True)


def general_sum_table_game(u1, row_concretizations, v1, perceptions, concretizations=None):
    """General-sum table game at levels (1, 2).

    The row player's level-1 view ``u1`` conceals ``row_concretizations``; the
    column player's payoff is seen as ``v1`` at level 1 and as one of
    ``perceptions`` at level 2, each concealing its ``concretizations``.
    """
    concretizations = concretizations or [[] for _ in perceptions]
    universe, mapping = {}, {}
    _add(universe, mapping, "u1", u1, "u1", "u1")
    for j, U in enumerate(row_concretizations):
        _add(universe, mapping, f"u1c{j}", U, "u1", f"u1c{j}")
    _add(universe, mapping, "v1", v1, "v1", "v1")
    for i, (V, extra) in enumerate(zip(perceptions, concretizations)):
        _add(universe, mapping, f"t{i}", V, "v1", f"t{i}")
        for j, W in enumerate(extra):
            _add(universe, mapping, f"t{i}w{j}", W, "v1", f"t{i}")
    fam = Table(TableFamily(universe, mapping, 2))
    return GameInstance(fam, u1, 1, 2, zero_sum=False, perceived_col=v1)


def random_general_sum_table_game(seed, m=2, n=2):
    """Tiny random general-sum instance: two row concretizations, three narrow-set elements."""
    rng = np.random.default_rng(seed)
    r = lambda: np.round(rng.uniform(-1, 1, size=(m, n)), 3)
    u1, v1 = r(), r()
    return general_sum_table_game(u1, [r()], v1, [r(), r()])


def hand_built_zero_sum_games():
    """Five small zero-sum table instances with narrow sets of size 1 to 5."""
    mp = np.array([[1.0, -1.0], [-1.0, 1.0]])
    games = {}
    games["pennies_exact"] = zero_sum_table_game(mp, [])
    games["pennies_hidden"] = zero_sum_table_game(
        mp,
        [np.array([[1.0, -0.5], [-1.0, 0.5]]), np.array([[0.5, -1.0], [-0.5, 1.0]])],
        [[np.array([[1.2, -0.5], [-0.8, 0.5]])], []],
    )
    rps = np.array([[0.0, -1.0, 1.0], [1.0, 0.0, -1.0], [-1.0, 1.0, 0.0]])
    games["rps_variants"] = zero_sum_table_game(
        rps,
        [rps + np.array([[0.1, 0, 0], [0, 0.1, 0], [0, 0, 0.1]]), rps * 1.5],
        [[], [rps * 1.25]],
    )
    A = np.array([[2.0, -1.0, 0.5], [-0.5, 1.0, 0.0]])
    games["two_by_three"] = zero_sum_table_game(
        A,
        [A + 0.3, A - 0.2, A[:, ::-1].copy(), A * 0.5],
        [[A + 0.4], [], [], [A * 0.25]],
    )
    B = np.array([[1.0, 0.2, -0.4], [0.0, -0.6, 0.8], [-0.3, 0.7, 0.1]])
    games["three_by_three"] = zero_sum_table_game(
        B,
        [B + 0.05 * np.arange(9).reshape(3, 3), B.T.copy(), B - 0.1, -B[::-1].copy(), B * 1.1],
        [[], [B.T + 0.1], [], [], []],
    )
    return games


def with_payoff_duplicates(game, beta=0.7071):
    """Zero-sum table game whose narrow set gains a shifted copy of every element.

    The copy of ``e`` is ``e + beta`` with the same shift applied to its
    concretizations. Opponent best responses are unchanged by a constant
    shift and player one's lower bounds only grow, so the copies add nothing
    to the equilibrium structure. Returns the new game and a map from each
    copy's matrix key to its original.
    """
    tf = game.family.table
    base = tf.id_of(game.perceived_row)
    universe = dict(tf.universe)
    mapping = dict(tf.mapping)
    originals = {}
    for e in game.narrow.elements:
        eid = tf.id_of(e)
        members = [eid] + [w for w in tf.ids if w != eid and tf.mapping.get((w, 2)) == eid]
        for sign, prefix in ((1.0, ""), (-1.0, "-")):
            b = base if sign > 0 else tf.id_of(-tf.universe[base])
            for w in members:
                src = w if sign > 0 else tf.id_of(-tf.universe[w])
                nid = f"{prefix}dup:{w}"
                universe[nid] = tf.universe[src] + sign * beta
                mapping[(nid, 1)] = b
                mapping[(nid, 2)] = f"{prefix}dup:{eid}"
        originals[matrix_key(e + beta)] = e
    fam = Table(TableFamily(universe, mapping, tf.level_cap))
    dup = GameInstance(fam, game.perceived_row, game.c1, game.c2, zero_sum=True)
    return dup, originals


def extend_response(Ry, game, originals):
    """Response map over ``game``'s narrow set that copies answers from originals."""
    from .equilibrium import EnumeratedResponse

    elements = list(game.narrow.elements)
    responses = []
    for e in elements:
        y = Ry.lookup(e)
        responses.append(Ry(originals[matrix_key(e)]) if y is None else y)
    return EnumeratedResponse(game.family, elements, responses)
