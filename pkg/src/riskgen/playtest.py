"""Agent-vs-agent match execution with per-turn logging.

One playtest is a batch of matches on a fixed map and rule set; the records
it produces feed every quality criterion. Match seeds are derived from the
batch seed and the match index, so batches reproduce exactly and matches can
be distributed across workers without changing any result.
"""

from __future__ import annotations

from riskgen.agent import AgentPolicy
from riskgen.engine import DEFAULT_TURN_CAP, GameParams, apply_move, is_terminal, new_game
from riskgen.mapmodel import MapGraph
from riskgen.metrics import (
    DEFAULT_WEIGHTS,
    HeuristicWeights,
    MatchRecord,
    TurnLog,
    heuristic,
    move_components,
)

__all__ = ["play_match", "run_playtest"]

_SHARED_POLICY = AgentPolicy()


def play_match(
    game_map: MapGraph,
    params: GameParams,
    seed,
    turn_cap: int = DEFAULT_TURN_CAP,
    weights: HeuristicWeights = DEFAULT_WEIGHTS,
    policies=None,
) -> MatchRecord:
    """Play one agent-vs-agent match and return its record.

    Every started player-turn is logged, including a final turn cut short by
    victory, so a capped match logs exactly `turn_cap` turns.
    """
    if policies is None:
        policies = (_SHARED_POLICY, _SHARED_POLICY)
    state = new_game(game_map, params, seed, pickers=policies, max_turns=turn_cap)
    t_total = game_map.territory_count
    turns: list[TurnLog] = []
    prev_leader = 0

    result = is_terminal(state)
    while result is None:
        player = state.current_player
        moves_open = sum(move_components(state, player))
        while state.current_player == player:
            apply_move(state, policies[player - 1].choose_move(state))
            if state.owned_count[player] == t_total:
                break
        h = (heuristic(state, 1, weights), heuristic(state, 2, weights))
        if h[0] > h[1]:
            leader = 1
        elif h[1] > h[0]:
            leader = 2
        else:
            leader = prev_leader
        turns.append(TurnLog(len(turns), h, moves_open, leader))
        prev_leader = leader
        result = is_terminal(state)

    return MatchRecord(tuple(turns), result)


def run_playtest(
    game_map: MapGraph,
    params: GameParams,
    matches: int,
    seed,
    turn_cap: int = DEFAULT_TURN_CAP,
    weights: HeuristicWeights = DEFAULT_WEIGHTS,
    policies=None,
) -> list[MatchRecord]:
    """Play `matches` seeded matches and return their records."""
    return [
        play_match(game_map, params, f"{seed}:{j}", turn_cap, weights, policies)
        for j in range(matches)
    ]
