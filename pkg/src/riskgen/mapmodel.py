"""Territory maps for two-player conquest matches.

A map is a connected planar graph of territories partitioned into continents,
each continent carrying a troop bonus. Maps are one half of the evolvable
genome, so everything in this module treats them as immutable values: all
operations are pure functions and safe to call from parallel workers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import networkx as nx

__all__ = [
    "Continent",
    "MapGraph",
    "ValidationReport",
    "MapStructureError",
    "MapValidationError",
    "validate_map",
    "is_planar",
    "are_isomorphic",
    "structurally_equal",
    "load_map",
    "save_map",
    "export_dot",
    "seed_maps",
]


class MapStructureError(ValueError):
    """Malformed map data: dangling ids, self-loops, duplicate edges."""


class MapValidationError(ValueError):
    """A structurally sound map that violates a map invariant."""

    def __init__(self, report: "ValidationReport"):
        super().__init__("; ".join(report.messages) or "invalid map")
        self.report = report


@dataclass(frozen=True)
class Continent:
    """A named territory group whose full ownership grants bonus troops."""

    name: str
    bonus: int
    territories: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "territories", tuple(sorted(self.territories)))


@dataclass(frozen=True)
class MapGraph:
    """Undirected territory graph with a continent partition.

    Territory ids are dense ``0..territory_count-1``. Edges are stored
    canonically: each pair sorted ascending, pairs sorted lexicographically,
    duplicates collapsed. Two equal maps therefore serialize identically.
    """

    name: str
    territory_count: int
    edges: tuple[tuple[int, int], ...]
    continents: tuple[Continent, ...]

    def __post_init__(self):
        canon = sorted({(u, v) if u <= v else (v, u) for u, v in self.edges})
        object.__setattr__(self, "edges", tuple(canon))
        object.__setattr__(self, "continents", tuple(self.continents))

    def neighbors(self) -> tuple[tuple[int, ...], ...]:
        """Adjacency lists indexed by territory id."""
        adj: list[list[int]] = [[] for _ in range(self.territory_count)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return tuple(tuple(sorted(ns)) for ns in adj)

    def continent_index(self) -> tuple[int, ...]:
        """Continent position per territory; -1 for uncovered territories."""
        idx = [-1] * self.territory_count
        for ci, cont in enumerate(self.continents):
            for t in cont.territories:
                if 0 <= t < self.territory_count:
                    idx[t] = ci
        return tuple(idx)


@dataclass(frozen=True)
class ValidationReport:
    planar: bool
    connected: bool
    partition_ok: bool
    messages: tuple[str, ...] = ()

    @property
    def valid(self) -> bool:
        return self.planar and self.connected and self.partition_ok


def _graph(m: MapGraph) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(range(m.territory_count))
    g.add_edges_from(m.edges)
    return g


def _structural_errors(m: MapGraph) -> list[str]:
    errs = []
    if m.territory_count < 2:
        errs.append(f"territory_count {m.territory_count} < 2")
    for u, v in m.edges:
        if u == v:
            errs.append(f"self-loop at {u}")
        for t in (u, v):
            if not 0 <= t < m.territory_count:
                errs.append(f"edge ({u}, {v}) references unknown territory {t}")
    for cont in m.continents:
        if cont.bonus < 0:
            errs.append(f"continent {cont.name!r} has negative bonus {cont.bonus}")
        for t in cont.territories:
            if not 0 <= t < m.territory_count:
                errs.append(f"continent {cont.name!r} references unknown territory {t}")
    return errs


def validate_map(m: MapGraph) -> ValidationReport:
    """Check the three map invariants: planarity, connectivity, partition.

    Raises MapStructureError for malformed input (ids out of range,
    self-loops, negative bonuses); those are bugs in the producer, not
    properties of a candidate map.
    """
    errs = _structural_errors(m)
    if errs:
        raise MapStructureError("; ".join(errs))

    messages = []
    planar = is_planar(m)
    if not planar:
        messages.append("graph admits no planar embedding")
    connected = nx.is_connected(_graph(m))
    if not connected:
        messages.append("graph is not connected")

    counts = [0] * m.territory_count
    partition_ok = True
    for cont in m.continents:
        if not cont.territories:
            partition_ok = False
            messages.append(f"continent {cont.name!r} is empty")
        for t in cont.territories:
            counts[t] += 1
    uncovered = [t for t, c in enumerate(counts) if c == 0]
    shared = [t for t, c in enumerate(counts) if c > 1]
    if uncovered:
        partition_ok = False
        messages.append(f"territories in no continent: {uncovered}")
    if shared:
        partition_ok = False
        messages.append(f"territories in several continents: {shared}")

    return ValidationReport(planar, connected, partition_ok, tuple(messages))


def is_planar(m: MapGraph) -> bool:
    """Planarity via the left-right test (networkx implementation)."""
    ok, _ = nx.check_planarity(_graph(m))
    return ok


def are_isomorphic(a: MapGraph, b: MapGraph) -> bool:
    """Isomorphism of the bare territory graphs (VF2).

    Continent membership and bonuses are deliberately ignored; map-domination
    analyses compare graph shape only.
    """
    return nx.is_isomorphic(_graph(a), _graph(b))


def structurally_equal(a: MapGraph, b: MapGraph) -> bool:
    """Exact equality of edges and continent partition, ignoring labels."""
    return (
        a.territory_count == b.territory_count
        and a.edges == b.edges
        and sorted((c.bonus, c.territories) for c in a.continents)
        == sorted((c.bonus, c.territories) for c in b.continents)
    )


def save_map(m: MapGraph) -> bytes:
    """Serialize to the canonical map JSON (stable byte-for-byte)."""
    obj = {
        "name": m.name,
        "territories": m.territory_count,
        "edges": [[u, v] for u, v in m.edges],
        "continents": [
            {"name": c.name, "bonus": c.bonus, "territories": list(c.territories)}
            for c in m.continents
        ],
    }
    return (json.dumps(obj, indent=2) + "\n").encode("utf-8")


def load_map(source, require_valid: bool = True) -> MapGraph:
    """Parse and validate map JSON from bytes, str, or a binary file.

    Raises MapStructureError for malformed data, MapValidationError (with the
    report attached) for well-formed maps that fail validation. Pass
    `require_valid=False` to get the parsed map regardless, e.g. to report on
    a candidate file.
    """
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    obj = json.loads(source)

    errs = []
    if not isinstance(obj.get("territories"), int):
        raise MapStructureError("field 'territories' must be an integer count")
    raw_edges = obj.get("edges", [])
    edges = []
    for e in raw_edges:
        if not (isinstance(e, list) and len(e) == 2 and all(isinstance(x, int) for x in e)):
            raise MapStructureError(f"edge {e!r} is not a pair of territory ids")
        edges.append((e[0], e[1]))
    seen = set()
    for u, v in edges:
        key = (min(u, v), max(u, v))
        if key in seen:
            errs.append(f"duplicate edge {list(key)}")
        seen.add(key)
    continents = []
    for c in obj.get("continents", []):
        continents.append(
            Continent(str(c["name"]), int(c["bonus"]), tuple(int(t) for t in c["territories"]))
        )
    if errs:
        raise MapStructureError("; ".join(errs))

    m = MapGraph(str(obj.get("name", "")), obj["territories"], tuple(edges), tuple(continents))
    if require_valid:
        report = validate_map(m)
        if not report.valid:
            raise MapValidationError(report)
    else:
        _structural = _structural_errors(m)
        if _structural:
            raise MapStructureError("; ".join(_structural))
    return m


_OWNER_FILL = {1: "lightskyblue", 2: "salmon"}
_CONTINENT_COLORS = (
    "blue", "red3", "green4", "darkorange", "purple", "saddlebrown", "cyan4", "magenta3",
)


def export_dot(m: MapGraph, owners=None, troops=None) -> str:
    """Render the map as DOT text: continents as clusters, owner as fill.

    Nodes are labeled ``id(troops)`` when troop counts are given, plain ``id``
    otherwise. Output is deterministic for identical input.
    """

    def node_line(t: int, indent: str) -> str:
        label = f"{t}({troops[t]})" if troops is not None else str(t)
        fill = _OWNER_FILL.get(owners[t], "white") if owners is not None else "white"
        return f'{indent}{t} [label="{label}", fillcolor={fill}];'

    lines = [f'graph "{m.name}" {{']
    lines.append("  node [shape=circle, style=filled, fillcolor=white];")
    covered = set()
    for ci, cont in enumerate(m.continents):
        color = _CONTINENT_COLORS[ci % len(_CONTINENT_COLORS)]
        lines.append(f"  subgraph cluster_{ci} {{")
        lines.append(f'    label="{cont.name} (+{cont.bonus})";')
        lines.append(f"    color={color};")
        for t in cont.territories:
            lines.append(node_line(t, "    "))
            covered.add(t)
        lines.append("  }")
    for t in range(m.territory_count):
        if t not in covered:
            lines.append(node_line(t, "  "))
    for u, v in m.edges:
        lines.append(f"  {u} -- {v};")
    lines.append("}")
    return "\n".join(lines) + "\n"


_SEED_FILES = (
    "classic.json",
    "meridian.json",
    "archipelago.json",
    "lattice.json",
    "highland.json",
    "skirmish9.json",
    "crossing11.json",
    "ridge15.json",
    "delta13.json",
    "frontier17.json",
)


@lru_cache(maxsize=1)
def _seed_maps() -> tuple[MapGraph, ...]:
    maps = []
    root = resources.files("riskgen") / "data" / "maps"
    for fname in _SEED_FILES:
        maps.append(load_map((root / fname).read_bytes()))
    return tuple(maps)


def seed_maps() -> list[MapGraph]:
    """The ten shipped starting maps.

    Index 0 is the classic 42-territory board; indices 1-4 are synthetic
    42-territory/6-continent boards standing in for the unpublished licensed
    variants; indices 5-9 are small boards of 9, 11, 15, 13, and 17
    territories.
    """
    return list(_seed_maps())
