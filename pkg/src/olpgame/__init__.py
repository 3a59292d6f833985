"""Limited-perception games: perception families, payoff bounds, maximin
solving, equilibrium verification and search, and a command-line front end."""

from .bounds import PayoffBounds, payoff_bounds
from .equilibrium import (
    CompactResponseRepr,
    EnumeratedResponse,
    EquilibriumReport,
    build_compact_repr,
    eval_compact_repr,
    map_back_equilibrium,
    reduce_general_to_zero_sum,
    search_nash_table,
    verify_nash,
)
from .perception import INF, LimitedRank, Masked, Quantized, Table, TableFamily
from .solver import GameInstance, make_game, maximin_objective, solve_maximin

__all__ = [
    "INF",
    "CompactResponseRepr",
    "EnumeratedResponse",
    "EquilibriumReport",
    "GameInstance",
    "LimitedRank",
    "Masked",
    "PayoffBounds",
    "Quantized",
    "Table",
    "TableFamily",
    "build_compact_repr",
    "eval_compact_repr",
    "make_game",
    "map_back_equilibrium",
    "maximin_objective",
    "payoff_bounds",
    "reduce_general_to_zero_sum",
    "search_nash_table",
    "solve_maximin",
    "verify_nash",
]
