"""Generational genetic algorithm over rule attributes and continent maps.

A genome is four rule attributes plus a map. Attributes cross over through a
half-and-half mask and mutate independently; maps cross over by combining
continent subsets from both parents (bridged back into one planar component)
and mutate through five local graph operations with rollback on invalidity.
Selection is by k-tournament, replacement is full with a single elite that is
re-evaluated each generation.

Evaluation seeds derive from (master seed, generation, slot, match index), so
runs reproduce bit-for-bit and per-individual evaluations are independent.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from riskgen.engine import DEFAULT_TURN_CAP, GameParams
from riskgen.mapmodel import Continent, MapGraph, is_planar, structurally_equal, validate_map
from riskgen.metrics import DEFAULT_D_PREF, CriteriaVector, criteria_from_records, fitness
from riskgen.playtest import run_playtest

__all__ = [
    "Individual",
    "GAConfig",
    "GenerationStats",
    "EvolutionRun",
    "init_population",
    "evaluate",
    "select_parents",
    "crossover",
    "crossover_maps",
    "mutate",
    "step_generation",
    "run",
]

_ATTRIBUTE_COUNT = 4
_BONUS_FACTORS = (1, 2, 3, 4)
_MAP_OPS = ("add_edge", "remove_edge", "move_territory", "swap_bonus", "adjust_bonus")
_MUTATION_RETRIES = 10


@dataclass
class Individual:
    """One genome plus its latest evaluation (criteria and fitness together)."""

    params: GameParams
    map: MapGraph
    criteria: CriteriaVector | None = None
    fitness: float | None = None


@dataclass(frozen=True)
class GAConfig:
    generations: int
    offspring_size: int
    tournament_k: int
    mutation_rate: float
    matches_per_eval: int = 100
    turn_cap: int = DEFAULT_TURN_CAP
    d_pref: int = DEFAULT_D_PREF
    master_seed: int | str = 0

    def __post_init__(self):
        if self.generations < 1:
            raise ValueError(f"generations must be >= 1, got {self.generations}")
        if self.offspring_size < 2 or self.offspring_size % 2:
            raise ValueError(f"offspring_size must be an even integer >= 2, got {self.offspring_size}")
        if not 2 <= self.tournament_k <= self.offspring_size:
            raise ValueError(
                f"tournament_k must be in 2..offspring_size, got {self.tournament_k}"
            )
        if not 0.0 <= self.mutation_rate <= 1.0:
            raise ValueError(f"mutation_rate must be in [0, 1], got {self.mutation_rate}")
        if self.matches_per_eval < 1:
            raise ValueError(f"matches_per_eval must be >= 1, got {self.matches_per_eval}")
        if self.turn_cap < 1:
            raise ValueError(f"turn_cap must be >= 1, got {self.turn_cap}")

    def to_json(self) -> dict:
        return {
            "generations": self.generations,
            "offspring_size": self.offspring_size,
            "tournament_k": self.tournament_k,
            "mutation_rate": self.mutation_rate,
            "matches_per_eval": self.matches_per_eval,
            "turn_cap": self.turn_cap,
            "d_pref": self.d_pref,
            "master_seed": self.master_seed,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "GAConfig":
        known = {f: obj[f] for f in cls.__dataclass_fields__ if f in obj}
        unknown = set(obj) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        return cls(**known)


@dataclass(frozen=True)
class GenerationStats:
    generation: int
    best_fitness: float
    mean_fitness: float
    best: Individual
    criteria: tuple[CriteriaVector, ...]


@dataclass(frozen=True)
class EvolutionRun:
    history: tuple[GenerationStats, ...]
    best: Individual
    final_population: tuple[Individual, ...] = field(repr=False, default=())


def _random_params(rng: random.Random) -> GameParams:
    return GameParams(
        random_distribution=rng.random() < 0.5,
        defensive_dice=rng.choice((2, 3)),
        move_max_on_conquest=rng.random() < 0.5,
        bonus_factor=rng.choice(_BONUS_FACTORS),
    )


def init_population(config: GAConfig, seeds, rng: random.Random) -> list[Individual]:
    """Uniformly random attributes, maps drawn uniformly from the seed maps.

    Maps are immutable values, so seed instances are shared rather than
    copied; variation operators always build new maps.
    """
    return [
        Individual(_random_params(rng), seeds[rng.randrange(len(seeds))])
        for _ in range(config.offspring_size)
    ]


def evaluate(individual: Individual, config: GAConfig, seed_tag="eval") -> Individual:
    """Run the playtest batch for one genome and store criteria and fitness."""
    records = run_playtest(
        individual.map,
        individual.params,
        config.matches_per_eval,
        f"{config.master_seed}:{seed_tag}",
        turn_cap=config.turn_cap,
    )
    individual.criteria = criteria_from_records(records, config.d_pref)
    individual.fitness = fitness(individual.criteria)
    return individual


def select_parents(population, k: int, rng: random.Random):
    """k-tournament: draw k distinct entrants, return the two fittest
    (lowest fitness; ties fall to the earlier population slot)."""
    if k > len(population):
        raise ValueError(f"tournament size {k} exceeds population size {len(population)}")
    if k < 2:
        raise ValueError("tournament needs at least two entrants")
    entrants = rng.sample(range(len(population)), k)
    entrants.sort(key=lambda i: (population[i].fitness, i))
    return population[entrants[0]], population[entrants[1]]


def _attribute_values(params: GameParams) -> list:
    return [
        params.random_distribution,
        params.defensive_dice,
        params.move_max_on_conquest,
        params.bonus_factor,
    ]


def _params_from_values(vals) -> GameParams:
    return GameParams(
        random_distribution=vals[0],
        defensive_dice=vals[1],
        move_max_on_conquest=vals[2],
        bonus_factor=vals[3],
    )


def crossover(parent_a: Individual, parent_b: Individual, rng: random.Random):
    """Produce two children: complementary half-mask attribute mixes, each
    with an independently drawn map crossover."""
    mask = set(rng.sample(range(_ATTRIBUTE_COUNT), _ATTRIBUTE_COUNT // 2))
    vals_a = _attribute_values(parent_a.params)
    vals_b = _attribute_values(parent_b.params)
    child_a_vals = [vals_a[i] if i in mask else vals_b[i] for i in range(_ATTRIBUTE_COUNT)]
    child_b_vals = [vals_b[i] if i in mask else vals_a[i] for i in range(_ATTRIBUTE_COUNT)]
    child_a = Individual(_params_from_values(child_a_vals), crossover_maps(parent_a.map, parent_b.map, rng))
    child_b = Individual(_params_from_values(child_b_vals), crossover_maps(parent_a.map, parent_b.map, rng))
    return child_a, child_b


def crossover_maps(map_a: MapGraph, map_b: MapGraph, rng: random.Random) -> MapGraph:
    """Combine a nonempty continent subset from each parent into a new map.

    Selected continents keep their internal structure, bonuses, and any edges
    among themselves within one parent; bridge edges then reconnect the
    pieces. Combining a map with a structurally equal one is a no-op, which
    keeps uniform-map populations closed under crossover.
    """
    if structurally_equal(map_a, map_b):
        return map_a

    while True:
        sel_a = [c for c in map_a.continents if rng.random() < 0.5]
        sel_b = [c for c in map_b.continents if rng.random() < 0.5]
        if sel_a and sel_b:
            break

    continents: list[Continent] = []
    edges: list[tuple[int, int]] = []
    next_id = 0
    for parent, selected in ((map_a, sel_a), (map_b, sel_b)):
        kept = set()
        for cont in selected:
            kept.update(cont.territories)
        id_map = {}
        for t in sorted(kept):
            id_map[t] = next_id
            next_id += 1
        for cont in selected:
            continents.append(
                Continent(cont.name, cont.bonus, tuple(id_map[t] for t in cont.territories))
            )
        for u, v in parent.edges:
            if u in kept and v in kept:
                edges.append((id_map[u], id_map[v]))

    edges = _bridge_components(next_id, edges)
    return MapGraph("evolved", next_id, tuple(edges), tuple(continents))


def _bridge_components(t_count: int, edges) -> list[tuple[int, int]]:
    """Add edges until the graph is one component, keeping it planar.

    Each round joins the id-closest pair of territories lying in different
    components. A new edge between two components of a planar graph cannot
    break planarity, but the check stays as a guard.
    """
    parent = list(range(t_count))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    edges = list(edges)
    for u, v in edges:
        parent[find(u)] = find(v)

    while True:
        roots = {find(t) for t in range(t_count)}
        if len(roots) <= 1:
            return edges
        candidates = sorted(
            ((v - u, u, v) for u in range(t_count) for v in range(u + 1, t_count)
             if find(u) != find(v)),
        )
        for _, u, v in candidates:
            trial = edges + [(u, v)]
            if is_planar(MapGraph("", t_count, tuple(trial), ())):
                edges = trial
                parent[find(u)] = find(v)
                break
        else:
            raise AssertionError("no planarity-preserving bridge found")


def mutate(individual: Individual, rate: float, rng: random.Random) -> Individual:
    """Each attribute re-draws or flips independently with probability
    `rate`; with probability `rate` one map operation is attempted."""
    vals = _attribute_values(individual.params)
    if rng.random() < rate:
        vals[0] = not vals[0]
    if rng.random() < rate:
        vals[1] = 5 - vals[1]
    if rng.random() < rate:
        vals[2] = not vals[2]
    if rng.random() < rate:
        vals[3] = rng.choice(_BONUS_FACTORS)
    new_map = individual.map
    if rng.random() < rate:
        new_map = _mutate_map(new_map, rng)
    return Individual(_params_from_values(vals), new_map)


def _mutate_map(m: MapGraph, rng: random.Random) -> MapGraph:
    """One operation drawn uniformly; invalid results roll back, with fresh
    draws up to the retry budget, after which the map is left unchanged."""
    for _ in range(_MUTATION_RETRIES):
        op = rng.choice(_MAP_OPS)
        candidate = _apply_map_op(m, op, rng)
        if candidate is None:
            continue
        if validate_map(candidate).valid:
            return candidate
    return m


def _apply_map_op(m: MapGraph, op: str, rng: random.Random) -> MapGraph | None:
    t_count = m.territory_count
    if op == "add_edge":
        present = set(m.edges)
        absent = [
            (u, v)
            for u in range(t_count)
            for v in range(u + 1, t_count)
            if (u, v) not in present
        ]
        if not absent:
            return None
        new_edge = absent[rng.randrange(len(absent))]
        return MapGraph(m.name, t_count, m.edges + (new_edge,), m.continents)
    if op == "remove_edge":
        if not m.edges:
            return None
        drop = rng.randrange(len(m.edges))
        return MapGraph(m.name, t_count, m.edges[:drop] + m.edges[drop + 1 :], m.continents)
    if op == "move_territory":
        if len(m.continents) < 2:
            return None
        t = rng.randrange(t_count)
        source = m.continent_index()[t]
        if source < 0:
            return None
        target = rng.choice([i for i in range(len(m.continents)) if i != source])
        conts = list(m.continents)
        src = conts[source]
        conts[source] = Continent(src.name, src.bonus, tuple(x for x in src.territories if x != t))
        dst = conts[target]
        conts[target] = Continent(dst.name, dst.bonus, dst.territories + (t,))
        return MapGraph(m.name, t_count, m.edges, tuple(conts))
    if op == "swap_bonus":
        if len(m.continents) < 2:
            return None
        i, j = rng.sample(range(len(m.continents)), 2)
        conts = list(m.continents)
        a, b = conts[i], conts[j]
        conts[i] = Continent(a.name, b.bonus, a.territories)
        conts[j] = Continent(b.name, a.bonus, b.territories)
        return MapGraph(m.name, t_count, m.edges, tuple(conts))
    if op == "adjust_bonus":
        if not m.continents:
            return None
        i = rng.randrange(len(m.continents))
        delta = rng.choice((-1, 1))
        cont = m.continents[i]
        if cont.bonus + delta < 0:
            return None
        conts = list(m.continents)
        conts[i] = Continent(cont.name, cont.bonus + delta, cont.territories)
        return MapGraph(m.name, t_count, m.edges, tuple(conts))
    raise ValueError(f"unknown map operation {op!r}")


def _best_index(population) -> int:
    return min(range(len(population)), key=lambda i: (population[i].fitness, i))


def step_generation(population, config: GAConfig, rng: random.Random, generation: int = 0):
    """Build and evaluate the next population: one unchanged elite genome plus
    offspring from repeated tournament selection, crossover, and mutation."""
    elite_source = population[_best_index(population)]
    new_population = [Individual(elite_source.params, elite_source.map)]
    while len(new_population) < config.offspring_size:
        parent_a, parent_b = select_parents(population, config.tournament_k, rng)
        for child in crossover(parent_a, parent_b, rng):
            if len(new_population) < config.offspring_size:
                new_population.append(mutate(child, config.mutation_rate, rng))

    for slot, individual in enumerate(new_population):
        evaluate(individual, config, f"g{generation}:s{slot}")

    best = new_population[_best_index(new_population)]
    stats = GenerationStats(
        generation=generation,
        best_fitness=best.fitness,
        mean_fitness=sum(i.fitness for i in new_population) / len(new_population),
        best=Individual(best.params, best.map, best.criteria, best.fitness),
        criteria=tuple(i.criteria for i in new_population),
    )
    return new_population, stats


def run(config: GAConfig, seeds=None) -> EvolutionRun:
    """Full deterministic run: initialize, evaluate, then step through the
    configured number of generations."""
    if seeds is None:
        from riskgen.mapmodel import seed_maps

        seeds = seed_maps()
    rng = random.Random(f"{config.master_seed}:ga")
    population = init_population(config, seeds, rng)
    for slot, individual in enumerate(population):
        evaluate(individual, config, f"g0:s{slot}")

    history = []
    for generation in range(1, config.generations + 1):
        population, stats = step_generation(population, config, rng, generation)
        history.append(stats)

    best = population[_best_index(population)]
    return EvolutionRun(tuple(history), best, tuple(population))
