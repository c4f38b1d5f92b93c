"""The fast rule-based player used for every playtest.

Strategy, in one breath: grab and reinforce the most valuable attainable
continent, trade cards early when a traded territory is owned (always at five
cards), attack only with strict numerical advantage using maximum dice, and
make one fortify move per turn from a safe territory toward the weakest
frontline territory.

Every decision is deterministic: ties fall to the lowest territory id. The
policy keeps no per-match state, so one instance can serve any number of
concurrent matches.
"""

from __future__ import annotations

import random
from itertools import combinations

from riskgen.engine import (
    END_ATTACK,
    END_TURN,
    MAX_HAND,
    Attack,
    Fortify,
    GameState,
    Phase,
    Place,
    Trade,
    _valid_set,
)

__all__ = ["AgentPolicy"]


class AgentPolicy:
    """Rule-based move source for one player side."""

    def __init__(self, tie_break_seed=None):
        # Reserved for tie breaking; lowest-id rules currently leave no ties.
        self.tie_break_rng = random.Random(tie_break_seed)

    def choose_initial_territory(self, state: GameState, player: int) -> int:
        """Pick an unowned territory during the alternating-pick setup.

        Prefers continents the player can still fully own (no enemy presence),
        scored by bonus per territory; falls back to the highest raw bonus.
        """
        owner = state.owner
        best_ratio = None
        candidates: list[int] = []
        for cont in state.map.continents:
            free = [t for t in cont.territories if owner[t] == 0]
            if not free:
                continue
            if any(owner[t] not in (0, player) for t in cont.territories):
                continue
            ratio = cont.bonus / len(cont.territories)
            if best_ratio is None or ratio > best_ratio:
                best_ratio = ratio
                candidates = free
            elif ratio == best_ratio:
                candidates = candidates + free
        if candidates:
            return min(candidates)

        best_bonus = None
        for cont in state.map.continents:
            free = [t for t in cont.territories if owner[t] == 0]
            if not free:
                continue
            if best_bonus is None or cont.bonus > best_bonus:
                best_bonus = cont.bonus
                candidates = free
            elif cont.bonus == best_bonus:
                candidates = candidates + free
        if candidates:
            return min(candidates)
        return min(t for t in range(state.map.territory_count) if owner[t] == 0)

    def choose_initial_placement(self, state: GameState, player: int) -> int:
        """Drop one starting troop on an owned territory."""
        return self._placement_territory(state, player)

    def choose_move(self, state: GameState):
        """Return a legal move for the current player in the current phase."""
        p = state.current_player
        if state.phase is Phase.REINFORCE:
            hand = state.hands[p]
            if len(hand) >= 3:
                move = self._trade_move(state, p, hand)
                if move is not None:
                    return move
            return Place(self._placement_territory(state, p), 1)
        if state.phase is Phase.ATTACK:
            return self._attack_move(state, p)
        return self._fortify_move(state, p)

    def _trade_move(self, state: GameState, player: int, hand):
        """Trade when a set's territory is owned; always at a full hand."""
        owner = state.owner
        sets = [c for c in combinations(sorted(hand), 3) if _valid_set(c)]
        if not sets:
            return None
        for cards in sets:
            if any(owner[c.territory] == player for c in cards):
                return Trade(cards)
        if len(hand) >= MAX_HAND:
            return Trade(sets[0])
        return None

    def _placement_territory(self, state: GameState, player: int) -> int:
        """Owned territory to reinforce: within the best incomplete continent
        the player has a foothold in, preferring enemy-bordering territories
        with the fewest troops."""
        owner = state.owner
        troops = state.troops
        adj = state.adj

        best_ratio = None
        candidates: list[int] = []
        for cont in state.map.continents:
            mine = [t for t in cont.territories if owner[t] == player]
            if not mine or len(mine) == len(cont.territories):
                continue
            ratio = cont.bonus / len(cont.territories)
            if best_ratio is None or ratio > best_ratio:
                best_ratio = ratio
                candidates = mine
            elif ratio == best_ratio:
                candidates = candidates + mine
        if not candidates:
            candidates = [t for t in range(state.map.territory_count) if owner[t] == player]

        bordering = [
            t
            for t in candidates
            if any(owner[n] not in (0, player) for n in adj[t])
        ]
        pool = bordering or candidates
        return min(pool, key=lambda t: (troops[t], t))

    def _attack_move(self, state: GameState, player: int):
        """Attack with the largest strict troop surplus, maximum dice."""
        owner = state.owner
        troops = state.troops
        adj = state.adj
        best = None
        for src in range(state.map.territory_count):
            if owner[src] != player:
                continue
            spare = troops[src] - 1
            if spare < 1:
                continue
            for dst in adj[src]:
                if owner[dst] != player and spare > troops[dst]:
                    key = (troops[dst] - spare, src, dst)
                    if best is None or key < best:
                        best = key
        if best is None:
            return END_ATTACK
        _, src, dst = best
        return Attack(src, dst, min(3, troops[src] - 1))

    def _fortify_move(self, state: GameState, player: int):
        """Move all spare troops from one safe territory to the adjacent
        frontline territory with the fewest troops."""
        owner = state.owner
        troops = state.troops
        adj = state.adj
        t_total = state.map.territory_count

        frontline = [False] * t_total
        for t in range(t_total):
            if owner[t] == player:
                for n in adj[t]:
                    if owner[n] not in (0, player):
                        frontline[t] = True
                        break

        best = None
        for src in range(t_total):
            if owner[src] != player or frontline[src] or troops[src] < 2:
                continue
            for dst in adj[src]:
                if owner[dst] == player and frontline[dst]:
                    key = (troops[dst], -troops[src], src, dst)
                    if best is None or key < best:
                        best = key
        if best is None:
            return END_TURN
        _, neg_src_troops, src, dst = best
        return Fortify(src, dst, troops[src] - 1)
