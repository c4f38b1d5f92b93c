"""Two-player simplified Risk match engine.

Players are 1 and 2. A turn is one player's full reinforce/attack/fortify
sequence; `turn_index` counts those single-player turns. A fortify move ends
the turn (one fortification per turn), as does an explicit end-turn move.

A GameState is mutable and confined to one match executor; distinct matches
with distinct RNG streams are fully independent.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import NamedTuple

from riskgen.mapmodel import MapGraph

__all__ = [
    "RuleError",
    "Phase",
    "GameParams",
    "Card",
    "Place",
    "Trade",
    "Attack",
    "EndAttack",
    "Fortify",
    "EndTurn",
    "END_ATTACK",
    "END_TURN",
    "BattleResult",
    "GameState",
    "DRAW",
    "DEFAULT_TURN_CAP",
    "new_game",
    "reinforcement_count",
    "legal_moves",
    "resolve_battle",
    "trade_value",
    "trade",
    "apply_move",
    "is_terminal",
]

DEFAULT_TURN_CAP = 48
MAX_HAND = 5
CARD_SYMBOLS = "ABC"
CARD_TERRITORY_BONUS = 2
_TRADE_SCHEDULE = (4, 6, 8, 10, 12, 15)


class RuleError(ValueError):
    """An action that violates the match rules."""


class Phase(Enum):
    REINFORCE = "reinforce"
    ATTACK = "attack"
    FORTIFY = "fortify"


@dataclass(frozen=True)
class GameParams:
    """The four evolvable rule attributes.

    Defaults are the original Risk settings: chosen starting territories,
    two defensive dice, all-but-one troops moved on conquest, bonus factor 3.
    """

    random_distribution: bool = False
    defensive_dice: int = 2
    move_max_on_conquest: bool = True
    bonus_factor: int = 3

    def __post_init__(self):
        if self.defensive_dice not in (2, 3):
            raise RuleError(f"defensive_dice must be 2 or 3, got {self.defensive_dice}")
        if self.bonus_factor not in (1, 2, 3, 4):
            raise RuleError(f"bonus_factor must be in 1..4, got {self.bonus_factor}")

    def to_json(self) -> dict:
        return {
            "random_distribution": self.random_distribution,
            "defensive_dice": self.defensive_dice,
            "move_max_on_conquest": self.move_max_on_conquest,
            "bonus_factor": self.bonus_factor,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "GameParams":
        return cls(
            random_distribution=bool(obj["random_distribution"]),
            defensive_dice=int(obj["defensive_dice"]),
            move_max_on_conquest=bool(obj["move_max_on_conquest"]),
            bonus_factor=int(obj["bonus_factor"]),
        )


class Card(NamedTuple):
    territory: int
    symbol: str


class Place(NamedTuple):
    territory: int
    count: int


class Trade(NamedTuple):
    cards: tuple[Card, Card, Card]


class Attack(NamedTuple):
    source: int
    target: int
    dice: int


class EndAttack(NamedTuple):
    pass


class Fortify(NamedTuple):
    source: int
    target: int
    count: int


class EndTurn(NamedTuple):
    pass


END_ATTACK = EndAttack()
END_TURN = EndTurn()


class BattleResult(NamedTuple):
    attacker_losses: int
    defender_losses: int
    conquered: bool


DRAW = 0


def _valid_set(cards) -> bool:
    if len(cards) != 3:
        return False
    symbols = {c.symbol for c in cards}
    return len(symbols) == 1 or len(symbols) == 3


class GameState:
    """Full state of one match in progress."""

    __slots__ = (
        "map",
        "params",
        "adj",
        "owner",
        "troops",
        "owned_count",
        "hands",
        "deck",
        "discard",
        "phase",
        "current_player",
        "turn_index",
        "conquered_this_turn",
        "trades_done",
        "pool",
        "max_turns",
        "rng",
    )

    def __init__(self, game_map: MapGraph, params: GameParams, rng: random.Random, max_turns: int):
        t = game_map.territory_count
        self.map = game_map
        self.params = params
        self.adj = game_map.neighbors()
        self.owner = [0] * t
        self.troops = [0] * t
        self.owned_count = [0, 0, 0]
        self.hands = [None, [], []]
        self.deck = []
        self.discard = []
        self.phase = Phase.REINFORCE
        self.current_player = 1
        self.turn_index = 0
        self.conquered_this_turn = False
        self.trades_done = 0
        self.pool = 0
        self.max_turns = max_turns
        self.rng = rng

    def snapshot(self) -> tuple:
        """Hashable fingerprint of everything that defines the position."""
        return (
            tuple(self.owner),
            tuple(self.troops),
            tuple(tuple(sorted(h)) for h in self.hands[1:]),
            tuple(self.deck),
            tuple(self.discard),
            self.phase,
            self.current_player,
            self.turn_index,
            self.conquered_this_turn,
            self.trades_done,
            self.pool,
        )


def _unowned(state: GameState) -> list[int]:
    return [t for t in range(state.map.territory_count) if state.owner[t] == 0]


def _owned_by(state: GameState, player: int) -> list[int]:
    return [t for t in range(state.map.territory_count) if state.owner[t] == player]


def new_game(
    game_map: MapGraph,
    params: GameParams,
    seed,
    pickers=None,
    max_turns: int = DEFAULT_TURN_CAP,
) -> GameState:
    """Set up a match: deal territories, place initial troops, build the deck.

    `pickers`, when given, is a pair of policies for players 1 and 2 with
    `choose_initial_territory(state, player)` (used for the alternating-pick
    deal) and `choose_initial_placement(state, player)` (used to drop the
    remaining starting troops one at a time). Without pickers both steps fall
    back to the seeded RNG. Player 1 always picks/places first, so on odd
    territory counts player 1 owns one extra territory.

    Each player's total starting troops (counting the single troop put on
    every owned territory) is max(owned territories, ceil(0.75 * T)).
    """
    rng = random.Random(seed)
    state = GameState(game_map, params, rng, max_turns)
    t_total = game_map.territory_count

    if params.random_distribution:
        order = list(range(t_total))
        rng.shuffle(order)
        for i, t in enumerate(order):
            p = 1 if i % 2 == 0 else 2
            state.owner[t] = p
            state.owned_count[p] += 1
    else:
        for i in range(t_total):
            p = 1 if i % 2 == 0 else 2
            if pickers is not None:
                t = pickers[p - 1].choose_initial_territory(state, p)
                if state.owner[t] != 0:
                    raise RuleError(f"picker chose already-owned territory {t}")
            else:
                t = rng.choice(_unowned(state))
            state.owner[t] = p
            state.owned_count[p] += 1

    for t in range(t_total):
        state.troops[t] = 1

    target = (3 * t_total + 3) // 4  # ceil(0.75 * T)
    remaining = [0, 0, 0]
    for p in (1, 2):
        remaining[p] = max(state.owned_count[p], target) - state.owned_count[p]
    while remaining[1] or remaining[2]:
        for p in (1, 2):
            if remaining[p]:
                if pickers is not None:
                    t = pickers[p - 1].choose_initial_placement(state, p)
                    if state.owner[t] != p:
                        raise RuleError(f"picker placed on unowned territory {t}")
                else:
                    t = rng.choice(_owned_by(state, p))
                state.troops[t] += 1
                remaining[p] -= 1

    state.deck = [Card(t, CARD_SYMBOLS[t % 3]) for t in range(t_total)]
    rng.shuffle(state.deck)

    state.pool = reinforcement_count(state, 1)
    return state


def reinforcement_count(state: GameState, player: int) -> int:
    """Troops received at turn start: max(3, T_p // factor) plus bonuses of
    continents fully owned by the player."""
    total = max(3, state.owned_count[player] // state.params.bonus_factor)
    owner = state.owner
    for cont in state.map.continents:
        for t in cont.territories:
            if owner[t] != player:
                break
        else:
            total += cont.bonus
    return total


def legal_moves(state: GameState) -> list:
    """Every move the current player may make in the current phase."""
    p = state.current_player
    moves = []
    if state.phase is Phase.REINFORCE:
        hand = state.hands[p]
        trades = [Trade(c) for c in combinations(sorted(hand), 3) if _valid_set(c)]
        if len(hand) >= MAX_HAND:
            return trades
        moves.extend(trades)
        for t in range(state.map.territory_count):
            if state.owner[t] == p:
                moves.extend(Place(t, c) for c in range(1, state.pool + 1))
    elif state.phase is Phase.ATTACK:
        for src in range(state.map.territory_count):
            if state.owner[src] == p and state.troops[src] >= 2:
                max_dice = min(3, state.troops[src] - 1)
                for dst in state.adj[src]:
                    if state.owner[dst] != p:
                        moves.extend(Attack(src, dst, d) for d in range(1, max_dice + 1))
        moves.append(END_ATTACK)
    else:
        for src in range(state.map.territory_count):
            if state.owner[src] == p and state.troops[src] >= 2:
                for dst in state.adj[src]:
                    if state.owner[dst] == p:
                        moves.extend(Fortify(src, dst, c) for c in range(1, state.troops[src]))
        moves.append(END_TURN)
    return moves


def resolve_battle(
    attacker_dice: int,
    defender_dice: int,
    attacker_troops: int,
    defender_troops: int,
    rng: random.Random,
) -> BattleResult:
    """Roll one battle. Both sides' dice are sorted descending and compared
    pairwise over min(attacker_dice, defender_dice) pairs; draws favor the
    defender."""
    if not 1 <= attacker_dice <= min(3, attacker_troops - 1):
        raise RuleError(
            f"attacker_dice {attacker_dice} invalid for {attacker_troops} attacking troops"
        )
    if not 1 <= defender_dice <= min(3, defender_troops):
        raise RuleError(
            f"defender_dice {defender_dice} invalid for {defender_troops} defending troops"
        )
    att = sorted((rng.randint(1, 6) for _ in range(attacker_dice)), reverse=True)
    dfn = sorted((rng.randint(1, 6) for _ in range(defender_dice)), reverse=True)
    attacker_losses = 0
    for a, d in zip(att, dfn):
        if a <= d:
            attacker_losses += 1
    defender_losses = min(attacker_dice, defender_dice) - attacker_losses
    return BattleResult(attacker_losses, defender_losses, defender_troops - defender_losses == 0)


def trade_value(state: GameState) -> int:
    """Troops awarded for the next card set: 4,6,8,10,12,15 then +5 each."""
    n = state.trades_done
    if n < len(_TRADE_SCHEDULE):
        return _TRADE_SCHEDULE[n]
    return _TRADE_SCHEDULE[-1] + 5 * (n - len(_TRADE_SCHEDULE) + 1)


def trade(state: GameState, cards) -> GameState:
    """Exchange a matching card set for pool troops.

    If the trader owns any traded card's territory, that territory (lowest id
    if several) gets 2 extra troops immediately, once per trade. Traded cards
    go to the discard pile and re-enter the deck when it runs dry.
    """
    p = state.current_player
    hand = state.hands[p]
    cards = tuple(cards)
    if len(cards) != 3 or len(set(cards)) != 3:
        raise RuleError("a trade needs three distinct cards")
    if any(c not in hand for c in cards):
        raise RuleError("traded cards must come from the current player's hand")
    if not _valid_set(cards):
        raise RuleError("cards must share a symbol or carry all three symbols")
    state.pool += trade_value(state)
    state.trades_done += 1
    owned = [c.territory for c in cards if state.owner[c.territory] == p]
    if owned:
        state.troops[min(owned)] += CARD_TERRITORY_BONUS
    for c in cards:
        hand.remove(c)
    state.discard.extend(cards)
    return state


def _draw_card(state: GameState):
    if not state.deck:
        if not state.discard:
            return None  # every card is in a hand; possible on tiny maps
        state.deck = state.discard
        state.discard = []
        state.rng.shuffle(state.deck)
    return state.deck.pop()


def _end_turn(state: GameState) -> None:
    p = state.current_player
    if state.conquered_this_turn:
        card = _draw_card(state)
        if card is not None:
            state.hands[p].append(card)
        state.conquered_this_turn = False
    state.turn_index += 1
    nxt = 3 - p
    state.current_player = nxt
    state.phase = Phase.REINFORCE
    state.pool = reinforcement_count(state, nxt) if state.owned_count[nxt] else 0


def apply_move(state: GameState, move) -> GameState:
    """Apply one move, mutating and returning the state.

    Raises RuleError naming the violated constraint for illegal moves. A
    Fortify or EndTurn move closes the turn: the player draws a card if it
    conquered this turn, then play passes to the opponent.
    """
    p = state.current_player
    if isinstance(move, Place):
        if state.phase is not Phase.REINFORCE:
            raise RuleError("troop placement outside the reinforce phase")
        if len(state.hands[p]) >= MAX_HAND:
            raise RuleError(f"a trade is mandatory with {MAX_HAND} cards in hand")
        t, count = move
        if not 0 <= t < state.map.territory_count or state.owner[t] != p:
            raise RuleError(f"territory {t} is not owned by player {p}")
        if not 1 <= count <= state.pool:
            raise RuleError(f"cannot place {count} troops with a pool of {state.pool}")
        state.troops[t] += count
        state.pool -= count
        if state.pool == 0:
            state.phase = Phase.ATTACK
    elif isinstance(move, Attack):
        if state.phase is not Phase.ATTACK:
            raise RuleError("attack outside the attack phase")
        src, dst, dice = move
        if not 0 <= src < state.map.territory_count or state.owner[src] != p:
            raise RuleError(f"attack source {src} is not owned by player {p}")
        if not 0 <= dst < state.map.territory_count or state.owner[dst] == p:
            raise RuleError(f"attack target {dst} is not an enemy territory")
        if dst not in state.adj[src]:
            raise RuleError(f"territories {src} and {dst} are not adjacent")
        if not 1 <= dice <= min(3, state.troops[src] - 1):
            raise RuleError(f"{dice} attacker dice exceed troops in territory {src}")
        defender_dice = min(state.params.defensive_dice, state.troops[dst])
        result = resolve_battle(dice, defender_dice, state.troops[src], state.troops[dst], state.rng)
        state.troops[src] -= result.attacker_losses
        state.troops[dst] -= result.defender_losses
        if result.conquered:
            state.owned_count[state.owner[dst]] -= 1
            state.owned_count[p] += 1
            state.owner[dst] = p
            if state.params.move_max_on_conquest:
                moved = state.troops[src] - 1
            else:
                # a conquering battle costs the attacker nothing, so the
                # surviving dice count equals the dice rolled
                moved = min(max(1, dice - result.attacker_losses), state.troops[src] - 1)
            state.troops[src] -= moved
            state.troops[dst] = moved
            state.conquered_this_turn = True
    elif isinstance(move, EndAttack):
        if state.phase is not Phase.ATTACK:
            raise RuleError("cannot end the attack phase now")
        state.phase = Phase.FORTIFY
    elif isinstance(move, Fortify):
        if state.phase is not Phase.FORTIFY:
            raise RuleError("fortify outside the fortify phase")
        src, dst, count = move
        if not 0 <= src < state.map.territory_count or state.owner[src] != p:
            raise RuleError(f"fortify source {src} is not owned by player {p}")
        if not 0 <= dst < state.map.territory_count or state.owner[dst] != p:
            raise RuleError(f"fortify target {dst} is not owned by player {p}")
        if dst not in state.adj[src]:
            raise RuleError(f"territories {src} and {dst} are not adjacent")
        if not 1 <= count <= state.troops[src] - 1:
            raise RuleError(f"cannot move {count} troops out of territory {src}")
        state.troops[src] -= count
        state.troops[dst] += count
        _end_turn(state)
    elif isinstance(move, EndTurn):
        if state.phase is not Phase.FORTIFY:
            raise RuleError("cannot end the turn before the fortify phase")
        _end_turn(state)
    elif isinstance(move, Trade):
        if state.phase is not Phase.REINFORCE:
            raise RuleError("trade outside the reinforce phase")
        trade(state, move.cards)
    else:
        raise RuleError(f"unknown move {move!r}")
    return state


def is_terminal(state: GameState):
    """Winner (1 or 2) if one player owns everything, DRAW (0) once the turn
    cap is reached, None while the match is live. Test against None: DRAW is
    falsy."""
    if state.owned_count[1] == state.map.territory_count:
        return 1
    if state.owned_count[2] == state.map.territory_count:
        return 2
    if state.turn_index >= state.max_turns:
        return DRAW
    return None
