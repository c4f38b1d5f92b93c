"""Experiment orchestration: evolve runs, standalone playtests, hyperparameter
sweeps, final-population map analysis, and interactive matches.

Every artifact these commands write (maps, game definitions, configs, stats)
round-trips through the corresponding loader, and reruns with the same seed
produce byte-identical CSV output.
"""

from __future__ import annotations

import csv
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from riskgen.agent import AgentPolicy
from riskgen.engine import (
    DEFAULT_TURN_CAP,
    GameParams,
    apply_move,
    is_terminal,
    legal_moves,
    new_game,
)
from riskgen.evolution import EvolutionRun, GAConfig, GenerationStats, Individual
from riskgen.evolution import run as run_evolution
from riskgen.mapmodel import MapGraph, are_isomorphic, export_dot, load_map, save_map
from riskgen.metrics import DEFAULT_D_PREF, criteria_from_records, criteria_to_json
from riskgen.playtest import run_playtest

__all__ = [
    "SweepGrid",
    "RunResult",
    "load_game",
    "save_game",
    "cmd_evolve",
    "cmd_playtest",
    "cmd_sweep",
    "cmd_map_stats",
    "cmd_play",
]


def load_game(source) -> tuple[GameParams, MapGraph]:
    """Parse a game definition: {"params": {...}, "map": {...}}."""
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    obj = json.loads(source)
    params = GameParams.from_json(obj["params"])
    game_map = load_map(json.dumps(obj["map"]))
    return params, game_map


def save_game(params: GameParams, game_map: MapGraph) -> bytes:
    obj = {
        "params": params.to_json(),
        "map": json.loads(save_map(game_map).decode("utf-8")),
    }
    return (json.dumps(obj, indent=2) + "\n").encode("utf-8")


@dataclass(frozen=True)
class SweepGrid:
    """Hyperparameter grid. `tournament=None` derives the entrant counts from
    each offspring size: 2 up to half the population, in steps of 2."""

    generations: tuple[int, ...]
    offspring: tuple[int, ...]
    tournament: tuple[int, ...] | None
    mutation: tuple[float, ...]
    runs_per_cell: int = 1
    matches_per_eval: int = 100
    turn_cap: int = DEFAULT_TURN_CAP
    d_pref: int = DEFAULT_D_PREF

    @classmethod
    def paper_grid(cls) -> "SweepGrid":
        return cls(
            generations=tuple(range(10, 191, 20)),
            offspring=tuple(range(5, 51, 5)),
            tournament=None,
            mutation=(0.1, 0.2, 0.4, 0.6, 0.8),
        )

    @classmethod
    def from_json(cls, obj: dict) -> "SweepGrid":
        return cls(
            generations=tuple(obj["generations"]),
            offspring=tuple(obj["offspring"]),
            tournament=tuple(obj["tournament"]) if obj.get("tournament") else None,
            mutation=tuple(obj["mutation"]),
            runs_per_cell=int(obj.get("runs_per_cell", 1)),
            matches_per_eval=int(obj.get("matches_per_eval", 100)),
            turn_cap=int(obj.get("turn_cap", DEFAULT_TURN_CAP)),
            d_pref=int(obj.get("d_pref", DEFAULT_D_PREF)),
        )

    def tournament_sizes(self, offspring_size: int) -> tuple[int, ...]:
        if self.tournament is not None:
            return self.tournament
        return tuple(range(2, offspring_size // 2 + 1, 2))

    def cells(self):
        """All (generations, offspring, tournament, mutation) combinations."""
        for gens in self.generations:
            for off in self.offspring:
                for k in self.tournament_sizes(off):
                    for rate in self.mutation:
                        yield gens, off, k, rate

    def cell_count(self) -> int:
        return sum(1 for _ in self.cells())


@dataclass(frozen=True)
class RunResult:
    config: GAConfig
    best_fitness: float
    best: Individual
    wall_time: float
    history: tuple[GenerationStats, ...]


def _write_stats_csv(path: Path, history) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(
            [
                "generation",
                "best_fitness",
                "mean_fitness",
                "best_map_territories",
                "best_random_distribution",
                "best_defensive_dice",
                "best_move_max_on_conquest",
                "best_bonus_factor",
            ]
        )
        for stats in history:
            p = stats.best.params
            writer.writerow(
                [
                    stats.generation,
                    stats.best_fitness,
                    stats.mean_fitness,
                    stats.best.map.territory_count,
                    p.random_distribution,
                    p.defensive_dice,
                    p.move_max_on_conquest,
                    p.bonus_factor,
                ]
            )


def _population_to_json(population) -> dict:
    return {
        "individuals": [
            {
                "params": ind.params.to_json(),
                "map": json.loads(save_map(ind.map).decode("utf-8")),
                "criteria": criteria_to_json(ind.criteria) if ind.criteria else None,
            }
            for ind in population
        ]
    }


def cmd_evolve(config, out_dir, seed=None) -> RunResult:
    """Run the genetic algorithm and write the result files.

    `config` is a GAConfig or a path to its JSON form; `seed` overrides the
    config's master seed. Writes run.json, stats.csv, best.json, best.dot,
    and population_final.json under `out_dir`.
    """
    if not isinstance(config, GAConfig):
        with open(config) as f:
            config = GAConfig.from_json(json.load(f))
    if seed is not None:
        config = GAConfig.from_json({**config.to_json(), "master_seed": seed})
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    started = time.perf_counter()
    outcome: EvolutionRun = run_evolution(config)
    wall = time.perf_counter() - started

    _write_stats_csv(out / "stats.csv", outcome.history)
    (out / "best.json").write_bytes(save_game(outcome.best.params, outcome.best.map))
    (out / "best.dot").write_text(export_dot(outcome.best.map))
    with open(out / "population_final.json", "w") as f:
        json.dump(_population_to_json(outcome.final_population), f, indent=2)
        f.write("\n")
    run_info = {
        "config": config.to_json(),
        "best_fitness": outcome.best.fitness,
        "best_criteria": criteria_to_json(outcome.best.criteria),
        "wall_time_s": wall,
    }
    with open(out / "run.json", "w") as f:
        json.dump(run_info, f, indent=2)
        f.write("\n")

    return RunResult(config, outcome.best.fitness, outcome.best, wall, outcome.history)


def cmd_playtest(
    game,
    matches: int = 100,
    seed=0,
    turn_cap: int = DEFAULT_TURN_CAP,
    d_pref: int = DEFAULT_D_PREF,
    out_path=None,
) -> dict:
    """Play a match batch for one game definition and return criteria JSON.

    `game` is a (params, map) pair or a path to a game-definition file.
    """
    if isinstance(game, tuple):
        params, game_map = game
    else:
        with open(game, "rb") as f:
            params, game_map = load_game(f)
    records = run_playtest(game_map, params, matches, seed, turn_cap=turn_cap)
    result = criteria_to_json(criteria_from_records(records, d_pref))
    if out_path is not None:
        with open(out_path, "w") as f:
            json.dump(result, f, indent=2)
            f.write("\n")
    return result


def cmd_sweep(grid, out_dir, seed=0) -> list[dict]:
    """Run every grid cell and rank results by final best fitness ascending.

    Writes sweep.csv under `out_dir` and returns the ranked rows. Each
    cell-run's master seed derives from (seed, cell index, run index).
    """
    if not isinstance(grid, SweepGrid):
        with open(grid) as f:
            grid = SweepGrid.from_json(json.load(f))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    rows = []
    for cell_index, (gens, off, k, rate) in enumerate(grid.cells()):
        for run_index in range(grid.runs_per_cell):
            config = GAConfig(
                generations=gens,
                offspring_size=off,
                tournament_k=k,
                mutation_rate=rate,
                matches_per_eval=grid.matches_per_eval,
                turn_cap=grid.turn_cap,
                d_pref=grid.d_pref,
                master_seed=f"{seed}:c{cell_index}:r{run_index}",
            )
            outcome = run_evolution(config)
            rows.append(
                {
                    "best_fitness": outcome.best.fitness,
                    "generations": gens,
                    "offspring_size": off,
                    "tournament_k": k,
                    "mutation_rate": rate,
                    "run_index": run_index,
                    "master_seed": config.master_seed,
                }
            )

    rows.sort(key=lambda r: r["best_fitness"])
    with open(out / "sweep.csv", "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(
            [
                "rank",
                "best_fitness",
                "generations",
                "offspring_size",
                "tournament_k",
                "mutation_rate",
                "run_index",
                "master_seed",
            ]
        )
        for rank, row in enumerate(rows, start=1):
            writer.writerow([rank] + list(row.values()))
    return rows


def cmd_map_stats(run_dir) -> dict:
    """Isomorphism classes and territory statistics of a run's final
    population (read from population_final.json)."""
    with open(Path(run_dir) / "population_final.json") as f:
        obj = json.load(f)
    maps = [load_map(json.dumps(ind["map"])) for ind in obj["individuals"]]
    if not maps:
        raise ValueError("final population is empty")

    classes: list[dict] = []
    for index, m in enumerate(maps):
        for cls in classes:
            if are_isomorphic(maps[cls["members"][0]], m):
                cls["members"].append(index)
                break
        else:
            classes.append({"territories": m.territory_count, "members": [index]})
    for cls in classes:
        cls["size"] = len(cls["members"])
    classes.sort(key=lambda c: (-c["size"], c["territories"]))

    counts = [m.territory_count for m in maps]
    dominant_share = classes[0]["size"] / len(maps)
    return {
        "individuals": len(maps),
        "class_count": len(classes),
        "classes": classes,
        "territory_counts": {
            "min": min(counts),
            "max": max(counts),
            "mean": sum(counts) / len(counts),
        },
        "dominant_class_share": dominant_share,
        "single_class": len(classes) == 1,
    }


def _describe_move(move, state) -> str:
    kind = type(move).__name__
    if kind == "Place":
        return f"place {move.count} troops on territory {move.territory}"
    if kind == "Trade":
        cards = ", ".join(f"{c.territory}{c.symbol}" for c in move.cards)
        return f"trade cards [{cards}]"
    if kind == "Attack":
        return (
            f"attack {move.target} ({state.troops[move.target]}) from "
            f"{move.source} ({state.troops[move.source]}) with {move.dice} dice"
        )
    if kind == "Fortify":
        return f"fortify {move.target} with {move.count} troops from {move.source}"
    if kind == "EndAttack":
        return "end attack phase"
    return "end turn"


def _show_state(state, human: int, out) -> None:
    out.write(
        f"\nturn {state.turn_index} | player {state.current_player} to move "
        f"| phase {state.phase.value} | pool {state.pool}\n"
    )
    for cont in state.map.continents:
        cells = []
        for t in cont.territories:
            tag = "you" if state.owner[t] == human else "foe"
            cells.append(f"{t}:{tag}({state.troops[t]})")
        out.write(f"  {cont.name} (+{cont.bonus}): {'  '.join(cells)}\n")
    hand = state.hands[human]
    if hand:
        out.write(f"  your cards: {', '.join(f'{c.territory}{c.symbol}' for c in sorted(hand))}\n")


def cmd_play(
    game,
    seed=0,
    human_player: int = 1,
    turn_cap: int = DEFAULT_TURN_CAP,
    in_stream=None,
    out_stream=None,
):
    """Interactive match: the human picks numbered legal moves, the agent
    plays the other side. Returns the result, or None if aborted (quit/EOF).

    Setup (territory pick and initial placement) is delegated to the agent
    policy for both sides; human control starts with the first turn.
    """
    if isinstance(game, tuple):
        params, game_map = game
    else:
        with open(game, "rb") as f:
            params, game_map = load_game(f)
    stdin = in_stream if in_stream is not None else sys.stdin
    out = out_stream if out_stream is not None else sys.stdout

    agent = AgentPolicy()
    state = new_game(game_map, params, seed, pickers=(agent, agent), max_turns=turn_cap)
    out.write(
        f"playing {game_map.name!r} as player {human_player} "
        f"(enter a move number, or 'quit')\n"
    )

    while (result := is_terminal(state)) is None:
        if state.current_player != human_player:
            move = agent.choose_move(state)
            out.write(f"opponent: {_describe_move(move, state)}\n")
            apply_move(state, move)
            continue
        _show_state(state, human_player, out)
        moves = legal_moves(state)
        for i, move in enumerate(moves):
            out.write(f"  [{i}] {_describe_move(move, state)}\n")
        while True:
            out.write("move> ")
            out.flush()
            line = stdin.readline()
            if not line:
                out.write("\nend of input, aborting match\n")
                return None
            line = line.strip()
            if line.lower() in ("q", "quit", "exit"):
                out.write("match aborted\n")
                return None
            try:
                choice = int(line)
            except ValueError:
                out.write(f"not a move number: {line!r}\n")
                continue
            if not 0 <= choice < len(moves):
                out.write(f"move number out of range: {choice}\n")
                continue
            apply_move(state, moves[choice])
            break

    if result == 0:
        out.write(f"draw after {state.turn_index} turns\n")
    elif result == human_player:
        out.write("you win: every territory is yours\n")
    else:
        out.write(f"player {result} wins\n")
    return result
