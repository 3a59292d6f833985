"""Regenerate the table fixtures from the instance builders."""

from pathlib import Path

from olpgame.gamefile import dumps, game_doc
from olpgame.instances import hand_built_zero_sum_games, random_general_sum_table_game

here = Path(__file__).parent
(here / "table_zero_sum.json").write_text(dumps(game_doc(hand_built_zero_sum_games()["pennies_hidden"])))
(here / "table_general_sum.json").write_text(dumps(game_doc(random_general_sum_table_game(1))))
