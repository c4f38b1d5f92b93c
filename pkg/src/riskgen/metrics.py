"""Per-turn heuristic, the seven quality criteria, and the distance fitness.

All criteria map a batch of match records to [0, 1]. Endgame criteria
(completion, duration, advantage) use match outcomes; turn criteria
(branching, drama, killer, lead) use the per-turn logs and are computed over
decisive matches only, since they compare the eventual winner and loser.
Fitness is the L1 distance of the criteria vector from the target vector and
is minimized.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import NamedTuple

__all__ = [
    "HeuristicWeights",
    "DEFAULT_WEIGHTS",
    "DEFAULT_D_PREF",
    "TurnLog",
    "MatchRecord",
    "CriteriaVector",
    "OptimalTargets",
    "DEFAULT_TARGETS",
    "heuristic",
    "move_components",
    "completion",
    "duration",
    "advantage",
    "branching_factor",
    "drama",
    "killer_moves",
    "lead_change",
    "criteria_from_records",
    "fitness",
    "criteria_to_json",
    "save_records",
    "load_records",
]

DEFAULT_D_PREF = 24


class HeuristicWeights(NamedTuple):
    """Relative weight of territory share vs troop share; must sum to 1 so
    the heuristic stays in [0, 1]."""

    w_terr: float = 0.5
    w_unit: float = 0.5


DEFAULT_WEIGHTS = HeuristicWeights()


@dataclass(frozen=True)
class TurnLog:
    """One player-turn: position values at turn end, move count at turn start.

    `h` holds the heuristic for players 1 and 2; `move_count` is the acting
    player's M_add + M_attack + M_fort before it moved; `leader` is the
    heuristic leader after the turn (ties keep the previous leader, 0 while
    nobody has led).
    """

    turn_index: int
    h: tuple[float, float]
    move_count: int
    leader: int


@dataclass(frozen=True)
class MatchRecord:
    """Per-turn logs plus the outcome of one match (0 = draw)."""

    turns: tuple[TurnLog, ...]
    result: int

    @property
    def duration(self) -> int:
        return len(self.turns)


class CriteriaVector(NamedTuple):
    completion: float
    duration: float
    advantage: float
    branching: float
    drama: float
    killer: float
    lead: float


class OptimalTargets(NamedTuple):
    completion: float = 1.0
    duration: float = 0.0
    advantage: float = 0.0
    branching: float = 0.5
    drama: float = 0.5
    killer: float = 0.5
    lead: float = 0.5


DEFAULT_TARGETS = OptimalTargets()


def heuristic(state, player: int, weights: HeuristicWeights = DEFAULT_WEIGHTS) -> float:
    """Territory share times w_terr plus troop share times w_unit."""
    t_total = state.map.territory_count
    u_total = sum(state.troops)
    t_p = state.owned_count[player]
    u_p = 0
    owner = state.owner
    troops = state.troops
    for t in range(t_total):
        if owner[t] == player:
            u_p += troops[t]
    return (t_p / t_total) * weights.w_terr + (u_p / u_total) * weights.w_unit


def move_components(state, player: int, pool: int | None = None) -> tuple[int, int, int]:
    """(M_add, M_attack, M_fort) for a player at turn start.

    M_add multiplies the reinforcement pool by the territory count; M_attack
    counts enemy neighbors times capped spare troops; M_fort counts friendly
    neighbors times spare troops. `pool` defaults to the state's current
    reinforcement pool, which is only meaningful for the player to move.
    """
    if pool is None:
        pool = state.pool
    owner = state.owner
    troops = state.troops
    adj = state.adj
    t_p = 0
    m_attack = 0
    m_fort = 0
    for src in range(state.map.territory_count):
        if owner[src] != player:
            continue
        t_p += 1
        spare = troops[src] - 1
        if spare <= 0:
            continue
        foes = 0
        friends = 0
        for dst in adj[src]:
            if owner[dst] == player:
                friends += 1
            else:
                foes += 1
        m_attack += foes * min(3, spare)
        m_fort += friends * spare
    return pool * t_p, m_attack, m_fort


def _decisive(records) -> list[MatchRecord]:
    return [r for r in records if r.result != 0]


def completion(records) -> float:
    """Fraction of matches that produced a winner."""
    return len(_decisive(records)) / len(records)


def duration(records, d_pref: int = DEFAULT_D_PREF) -> float:
    """Mean relative deviation of match length from the preferred length.

    Each match contributes |d_pref - D| / d_pref, clamped to 1 so the
    criterion stays in range even under turn caps beyond twice d_pref.
    """
    total = 0.0
    for r in records:
        total += min(1.0, abs(d_pref - r.duration) / d_pref)
    return total / len(records)


def advantage(records) -> float:
    """First-player imbalance: 0 for an even win split, 1 for a sweep."""
    wins_1 = sum(1 for r in records if r.result == 1)
    wins_2 = sum(1 for r in records if r.result == 2)
    half = (wins_1 + wins_2) / 2
    if half == 0:
        return 0.0
    return abs(wins_1 - half) / half


def branching_factor(records) -> float:
    """Per-match mean moves per turn, squashed by min(1, log10(mean + 1) / 2).

    Saturates at 1 once a match averages 99 or more available moves.
    """
    total = 0.0
    for r in records:
        mean_moves = sum(t.move_count for t in r.turns) / len(r.turns)
        total += min(1.0, math.log10(mean_moves + 1.0) / 2.0)
    return total / len(records)


def drama(records) -> float:
    """Mean square-root deficit of the eventual winner over the turns it
    trailed; 0 for a match the winner led throughout. Decisive matches only."""
    decisive = _decisive(records)
    if not decisive:
        return 0.0
    total = 0.0
    for r in decisive:
        w = r.result - 1
        l = 1 - w
        deficits = [math.sqrt(t.h[l] - t.h[w]) for t in r.turns if t.h[w] < t.h[l]]
        if deficits:
            total += sum(deficits) / len(deficits)
    return total / len(decisive)


def killer_moves(records) -> float:
    """Largest single-turn jump of the winner-minus-loser evaluation,
    clamped to [0, 1] and averaged over decisive matches."""
    decisive = _decisive(records)
    if not decisive:
        return 0.0
    total = 0.0
    for r in decisive:
        w = r.result - 1
        l = 1 - w
        diffs = [t.h[w] - t.h[l] for t in r.turns]
        if len(diffs) >= 2:
            swing = max(diffs[i] - diffs[i - 1] for i in range(1, len(diffs)))
            total += min(1.0, max(0.0, swing))
    return total / len(decisive)


def lead_change(records) -> float:
    """Fraction of consecutive turn pairs whose heuristic leader differs,
    averaged over decisive matches. Single-turn matches contribute 0."""
    decisive = _decisive(records)
    if not decisive:
        return 0.0
    total = 0.0
    for r in decisive:
        leaders = [t.leader for t in r.turns]
        if len(leaders) >= 2:
            changes = sum(
                1
                for i in range(1, len(leaders))
                if leaders[i] != leaders[i - 1] and leaders[i - 1] != 0
            )
            total += changes / (len(leaders) - 1)
    return total / len(decisive)


def criteria_from_records(records, d_pref: int = DEFAULT_D_PREF) -> CriteriaVector:
    """All seven criteria for one playtest batch."""
    if not records:
        raise ValueError("criteria need at least one match record")
    return CriteriaVector(
        completion=completion(records),
        duration=duration(records, d_pref),
        advantage=advantage(records),
        branching=branching_factor(records),
        drama=drama(records),
        killer=killer_moves(records),
        lead=lead_change(records),
    )


def fitness(criteria: CriteriaVector, targets: OptimalTargets = DEFAULT_TARGETS) -> float:
    """L1 distance from the target vector; lower is better."""
    return sum(abs(v - o) for v, o in zip(criteria, targets))


def criteria_to_json(criteria: CriteriaVector, targets: OptimalTargets = DEFAULT_TARGETS) -> dict:
    obj = dict(criteria._asdict())
    obj["fitness"] = fitness(criteria, targets)
    return obj


def _record_to_obj(record: MatchRecord) -> dict:
    return {
        "result": record.result,
        "turns": [
            {"t": t.turn_index, "h": list(t.h), "moves": t.move_count, "leader": t.leader}
            for t in record.turns
        ],
    }


def _record_from_obj(obj: dict) -> MatchRecord:
    turns = tuple(
        TurnLog(t["t"], (t["h"][0], t["h"][1]), t["moves"], t["leader"]) for t in obj["turns"]
    )
    return MatchRecord(turns, obj["result"])


def save_records(records, stream) -> None:
    """Write match records as JSON lines to a text stream."""
    for r in records:
        stream.write(json.dumps(_record_to_obj(r), separators=(",", ":")) + "\n")


def load_records(stream) -> list[MatchRecord]:
    """Read match records from a JSON-lines text stream."""
    return [_record_from_obj(json.loads(line)) for line in stream if line.strip()]
