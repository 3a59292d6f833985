import json
import math

import numpy as np
import pytest

from conftest import GAMES
from olpgame.errors import GameFileError
from olpgame.gamefile import dumps, format_float, game_doc, load_game, parse_game
from olpgame.instances import hand_built_zero_sum_games
from olpgame.perception import INF, LimitedRank, Table


def test_shipped_games_parse():
    for path in GAMES.glob("*.json"):
        load_game(path)


def test_infinite_capabilities():
    g = load_game(GAMES / "matching_pennies.json")
    assert g.c1 == INF and g.c2 == INF


def test_limited_rank_tolerances():
    g = load_game(GAMES / "limited_rank.json")
    assert isinstance(g.family, LimitedRank) and g.family.tie_tol == 1e-10


def test_nested_list_matrices():
    doc = {"family": "masked", "zero_sum": True, "capabilities": [4, "inf"], "perceived_row": [[1, -1], [-1, 1]]}
    g = parse_game(json.dumps(doc))
    np.testing.assert_array_equal(g.perceived_row, [[1, -1], [-1, 1]])


def test_finer_perception_read_at_governing_level():
    # a matrix finer than c1 is read at its intrinsic level, so its box is narrower
    doc = {"family": "quantized", "zero_sum": True, "capabilities": [1, 2], "perceived_row": [[0.55]]}
    g = parse_game(json.dumps(doc))
    assert g.family.governing_level(g.perceived_row, g.c1) == 2
    assert len(g.narrow.elements) == 1


def test_table_b_entries_rejected():
    doc = json.loads((GAMES / "table_zero_sum.json").read_text())
    doc["universe"][0]["B"] = doc["universe"][0]["A"]
    with pytest.raises(GameFileError, match=r"\$\.universe\[0\]\.B"):
        parse_game(json.dumps(doc))


def test_table_unknown_id():
    doc = json.loads((GAMES / "table_zero_sum.json").read_text())
    doc["map"][0]["to"] = "nowhere"
    with pytest.raises(GameFileError, match=r"\$\.map\[0\]\.to"):
        parse_game(json.dumps(doc))


def test_table_round_trip():
    for g in hand_built_zero_sum_games().values():
        g2 = parse_game(dumps(game_doc(g)))
        assert isinstance(g2.family, Table)
        assert len(g2.narrow.elements) == len(g.narrow.elements)
        np.testing.assert_array_equal(g2.perceived_row, g.perceived_row)


def test_float_formatting():
    assert format_float(1.0) == "1.0"
    assert format_float(0.1) == "0.10000000000000001"
    assert format_float(-2.5e-20) == "-2.4999999999999999e-20"
    assert dumps({"a": math.inf, "b": [1, 2.0]}) == '{\n  "a": "inf",\n  "b": [1, 2.0]\n}\n'
