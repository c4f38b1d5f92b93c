"""Command line interface.

Subcommands: evolve, playtest, sweep, map-stats, play, export-dot, validate,
isomorphic. Exit code 0 on success, 1 for a failed check (invalid map,
aborted match), 2 for bad input or usage.
"""

from __future__ import annotations

import argparse
import json
import sys

from riskgen import harness, mapmodel

__all__ = ["main"]


def _cmd_evolve(args) -> int:
    result = harness.cmd_evolve(args.config, args.out, seed=args.seed)
    print(
        f"best fitness {result.best_fitness:.4f} "
        f"({result.best.map.territory_count} territories) "
        f"after {result.config.generations} generations; results in {args.out}"
    )
    return 0


def _cmd_playtest(args) -> int:
    result = harness.cmd_playtest(
        args.game,
        matches=args.matches,
        seed=args.seed,
        turn_cap=args.turn_cap,
        d_pref=args.d_pref,
        out_path=args.out,
    )
    print(json.dumps(result, indent=2))
    return 0


def _cmd_sweep(args) -> int:
    rows = harness.cmd_sweep(args.grid, args.out, seed=args.seed)
    print(f"{len(rows)} runs ranked in {args.out}/sweep.csv; best:")
    for row in rows[: args.show]:
        print(
            f"  fitness {row['best_fitness']:.4f}  gens {row['generations']}"
            f"  offspring {row['offspring_size']}  tournament {row['tournament_k']}"
            f"  mutation {row['mutation_rate']}"
        )
    return 0


def _cmd_map_stats(args) -> int:
    print(json.dumps(harness.cmd_map_stats(args.run), indent=2))
    return 0


def _cmd_play(args) -> int:
    result = harness.cmd_play(
        args.game, seed=args.seed, human_player=args.side, turn_cap=args.turn_cap
    )
    return 0 if result is not None else 1


def _cmd_export_dot(args) -> int:
    with open(args.map, "rb") as f:
        m = mapmodel.load_map(f)
    text = mapmodel.export_dot(m)
    if args.out:
        with open(args.out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_validate(args) -> int:
    with open(args.map, "rb") as f:
        m = mapmodel.load_map(f, require_valid=False)
    report = mapmodel.validate_map(m)
    print(
        json.dumps(
            {
                "planar": report.planar,
                "connected": report.connected,
                "partition_ok": report.partition_ok,
                "valid": report.valid,
                "messages": list(report.messages),
            },
            indent=2,
        )
    )
    return 0 if report.valid else 1


def _cmd_isomorphic(args) -> int:
    with open(args.a, "rb") as f:
        map_a = mapmodel.load_map(f)
    with open(args.b, "rb") as f:
        map_b = mapmodel.load_map(f)
    result = mapmodel.are_isomorphic(map_a, map_b)
    print(json.dumps({"isomorphic": result}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="riskgen",
        description="Evolve, playtest, and inspect two-player Risk variants.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evolve", help="run the genetic algorithm")
    p.add_argument("--config", required=True, help="GAConfig JSON file")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", default=None, help="override the config's master seed")
    p.set_defaults(func=_cmd_evolve)

    p = sub.add_parser("playtest", help="evaluate one game definition")
    p.add_argument("--game", required=True, help="game definition JSON file")
    p.add_argument("--matches", type=int, default=100)
    p.add_argument("--turn-cap", type=int, default=48, dest="turn_cap")
    p.add_argument("--d-pref", type=int, default=24, dest="d_pref")
    p.add_argument("--seed", default=0)
    p.add_argument("--out", default=None, help="also write criteria JSON here")
    p.set_defaults(func=_cmd_playtest)

    p = sub.add_parser("sweep", help="run a hyperparameter grid")
    p.add_argument("--grid", required=True, help="SweepGrid JSON file")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", default=0)
    p.add_argument("--show", type=int, default=5, help="ranked rows to print")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("map-stats", help="analyze a run's final population")
    p.add_argument("--run", required=True, help="directory written by evolve")
    p.set_defaults(func=_cmd_map_stats)

    p = sub.add_parser("play", help="play a match against the agent")
    p.add_argument("--game", required=True, help="game definition JSON file")
    p.add_argument("--as", dest="side", type=int, choices=(1, 2), default=1)
    p.add_argument("--seed", default=0)
    p.add_argument("--turn-cap", type=int, default=48, dest="turn_cap")
    p.set_defaults(func=_cmd_play)

    p = sub.add_parser("export-dot", help="render a map file as DOT")
    p.add_argument("--map", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_export_dot)

    p = sub.add_parser("validate", help="check a map file's invariants")
    p.add_argument("--map", required=True)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("isomorphic", help="compare two map files' graphs")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.set_defaults(func=_cmd_isomorphic)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
