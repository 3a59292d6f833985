import numpy as np
import pytest

import oracles
from olpgame.errors import DegenerateTie, InvalidInput, TooLarge, UnknownMatrix
from olpgame.perception import (
    INF,
    LimitedRank,
    Masked,
    Quantized,
    Table,
    TableFamily,
    check_axioms,
    concretization_contains,
    intrinsic_capability,
    narrow_set,
    perceive,
    sample_concretization,
    validate_table_family,
)

M, Q, L = Masked(), Quantized(), LimitedRank()


def test_perceive_examples():
    np.testing.assert_array_equal(perceive(M, [[3, -1], [2, 0.5]], 2), [[3, 0], [2, 0]])
    np.testing.assert_array_equal(perceive(M, [[1, 1], [0, 0]], 1), [[1, 0], [0, 0]])
    assert perceive(Q, [[1.2345]], 2)[0, 0] == 1.23
    assert perceive(Q, [[-1.2399]], 2)[0, 0] == -1.23
    np.testing.assert_allclose(perceive(L, np.diag([3.0, 1.0]), 1), [[3, 0], [0, 0]], atol=1e-15)


def test_masked_matches_scan_oracle(rng):
    for _ in range(100):
        u = np.round(rng.normal(size=(3, 3)), 1)
        c = int(rng.integers(1, 10))
        np.testing.assert_array_equal(M.perceive(u, c), oracles.masked_top(u, c))


def test_quantized_matches_rational_truncation(rng):
    from fractions import Fraction

    for _ in range(200):
        x = float(np.round(rng.uniform(-9, 9), int(rng.integers(0, 6))))
        c = int(rng.integers(0, 5)) + 1
        assert Q.perceive([[x]], c)[0, 0] == float(oracles.truncate_fraction(Fraction(repr(x)), c))


def test_limited_rank_matches_eigen_oracle(rng):
    for _ in range(50):
        A = rng.normal(size=(3, 4))
        np.testing.assert_allclose(L.perceive(A, 2), oracles.truncated_svd(A, 2), atol=1e-10)


def test_limited_rank_tie_raises():
    with pytest.raises(DegenerateTie):
        L.perceive(np.eye(2), 1)


def test_intrinsic_capability_examples():
    assert intrinsic_capability(M, [[3, 0], [2, 0]]) == 2
    assert intrinsic_capability(L, [[1, 1], [1, 1]]) == 1
    assert intrinsic_capability(Q, [[0.25]]) == 2


def test_level_validation():
    with pytest.raises(InvalidInput):
        M.perceive([[1.0]], 0)
    with pytest.raises(InvalidInput):
        M.perceive([[1.0]], 1.5)
    assert np.array_equal(M.perceive([[1.0, 2.0]], INF), [[1.0, 2.0]])


def test_contains_examples():
    v = [[3, 0], [2, 0]]
    assert concretization_contains(M, v, 2, v)
    assert concretization_contains(M, v, 2, [[3, -1.5], [2, 0.5]])
    # tie at |2| with the earlier row-major entry kept instead
    assert not concretization_contains(M, v, 2, [[3, 2.0], [2, 0]])


def test_contains_self_for_every_family(rng):
    for fam in (M, Q, L):
        for _ in range(10):
            v = np.round(rng.normal(size=(2, 3)), 2)
            for c in (1, 2, 4):
                assert concretization_contains(fam, v, c, v)


def test_information_loss(rng):
    for fam in (M, Q):
        for _ in range(50):
            u = np.round(rng.normal(size=(3, 3)), 4)
            for c in range(1, 6):
                if not np.array_equal(fam.perceive(u, c), u):
                    assert all(not np.array_equal(fam.perceive(u, k), u) for k in range(1, c))


def test_nesting(rng):
    for fam, shape in ((M, (3, 3)), (Q, (2, 2)), (L, (3, 3))):
        for _ in range(10):
            u = rng.normal(size=shape)
            c = int(rng.integers(1, 3))
            v, w = fam.perceive(u, c + 1), fam.perceive(u, c)
            for s in sample_concretization(fam, v, c + 1, 20, seed=int(rng.integers(1 << 30))):
                assert concretization_contains(fam, w, c, s)


def test_samples_round_trip(rng):
    for s in sample_concretization(Q, [[0.5]], 1, 50, seed=1):
        assert 0.5 <= s[0, 0] < 0.6
    for s in sample_concretization(L, [[2, 0], [0, 0]], 1, 50, seed=1):
        np.testing.assert_allclose(L.perceive(s, 1), [[2, 0], [0, 0]], atol=1e-9)
    v = np.array([[3.0, 0.0, 0.0], [0.0, -2.0, 0.0]])
    for s in sample_concretization(M, v, 2, 50, seed=2):
        np.testing.assert_array_equal(M.perceive(s, 2), v)


def test_narrow_examples():
    for fam, v in ((M, [[3.0, 0.0]]), (Q, [[0.5]]), (L, [[2.0, 0.0], [0.0, 0.0]])):
        T = narrow_set(fam, v, 1, 1)
        assert T.is_enumerated and len(T) == 1
    T = narrow_set(Q, [[0.5]], 1, 2)
    got = sorted(e[0, 0] for e in T)
    assert got == oracles.quantized_refinements(0.5, 1, 2)
    assert got == pytest.approx([0.5 + k / 100 for k in range(10)])


def test_narrow_sizes_match_rational_enumeration():
    T = narrow_set(Q, [[0.5, -0.3]], 1, 2)
    ref = len(oracles.quantized_refinements(0.5, 1, 2)) * len(oracles.quantized_refinements(-0.3, 1, 2))
    assert len(T) == ref == 100
    # a zero entry refines on both sides
    assert len(narrow_set(Q, [[0.0]], 1, 2)) == len(oracles.quantized_refinements(0.0, 1, 2)) == 19


def test_narrow_too_large():
    with pytest.raises(TooLarge):
        narrow_set(Q, np.full((3, 3), 0.5), 1, 3, cap=1000)


def test_masked_narrow_membership_of_column_fill():
    v = np.array([[3.0, 0.0], [2.0, 0.0]])
    T = narrow_set(M, v, 2, 3)
    fill = v.copy()
    fill[0, 1] = -2.0 * (1 - 1e-9)
    assert T.contains(fill)
    assert not T.contains(np.array([[3.0, 2.5], [2.0, 0.0]]))


def test_check_axioms_parametric_families():
    for fam in (M, Q, L):
        viol, checked, skipped = check_axioms(fam, (3, 3), n_trials=60, seed=4)
        assert viol == [] and checked + skipped == 60


def _two_level_table():
    universe = {"a": [[1.0]], "b": [[2.0]], "c": [[3.0]]}
    mapping = {("a", 1): "a", ("b", 1): "a", ("c", 1): "a", ("a", 2): "a", ("b", 2): "b", ("c", 2): "b"}
    return TableFamily(universe, mapping, 2)


def test_table_perception_and_validation():
    tf = _two_level_table()
    assert validate_table_family(tf).valid
    T = Table(tf)
    assert T.perceive([[3.0]], 2)[0, 0] == 2.0 and T.perceive([[3.0]], 5)[0, 0] == 2.0
    assert T.perceive([[3.0]], INF)[0, 0] == 3.0
    assert T.intrinsic_capability([[1.0]]) == 1 and T.intrinsic_capability([[3.0]]) == INF
    pre = T.preimage(np.array([[2.0]]), 2)
    assert sorted(float(m[0, 0]) for m in pre.matrices) == [2.0, 3.0]
    with pytest.raises(UnknownMatrix):
        T.perceive([[7.0]], 1)


def test_table_identity_is_valid():
    universe = {"a": [[1.0]], "b": [[2.0]]}
    mapping = {(k, lvl): k for k in universe for lvl in (1, 2)}
    assert validate_table_family(TableFamily(universe, mapping, 2)).valid


def test_table_violation_names_triple():
    tf = _two_level_table()
    tf.mapping[("c", 1)] = "c"
    rep = validate_table_family(tf)
    assert not rep.valid
    assert any(v[0] == "path_independence" and v[1] == "c" for v in rep.violations)
