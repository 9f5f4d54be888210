"""Command-line entry point: ``zswarm run | verify | replay``.

Exit codes: 0 success, 1 verification or replay mismatch, 2 configuration
or guard error, 3 tick budget exhausted, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .config import load_config
from .core import MUTATIONS, ROBOT_TRANSITIONS
from .errors import BoundError, ConfigError
from .sim import SimConfig, run
from .trace import TraceFormatError, read_trace, trace_lines, write_trace
from .verify import (
    check_invariants,
    enumerate_fsm,
    restart_cycle_nodes,
    verify_sim_branching,
)
from .world import WorldBounds

_verbose = False


def _diag(fmt, *args) -> None:
    sys.stderr.write("zswarm: " + (fmt % args if args else fmt) + "\n")


def _info(fmt, *args) -> None:
    if _verbose:
        _diag(fmt, *args)

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_CONFIG = 2
EXIT_BUDGET = 3
EXIT_IO = 4


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, separators=(",", ":")) + "\n")


def _load(args) -> SimConfig:
    return load_config(args.config, args.overrides)


def cmd_run(args) -> int:
    try:
        config = _load(args)
        summary = run(config)
    except OSError as exc:
        _diag("cannot read config: %s", exc)
        return EXIT_IO
    except ConfigError as exc:
        _diag("configuration error: %s", exc)
        return EXIT_CONFIG
    if args.trace_out:
        try:
            with open(args.trace_out, "w", encoding="utf-8", newline="\n") as fh:
                write_trace(fh, config, summary.events)
        except OSError as exc:
            _diag("cannot write trace: %s", exc)
            return EXIT_IO
    _emit(summary.as_dict())
    return EXIT_BUDGET if summary.exceeded else EXIT_OK


def _default_spatial_suite() -> list[tuple[str, SimConfig]]:
    grid3 = WorldBounds(0, 2, 0, 2, 0, 0)
    grid2 = WorldBounds(0, 1, 0, 1, 0, 0)
    base = dict(rng_seed=0, max_ticks=1)
    return [
        ("2x2-single-seed", SimConfig(p=1, q=1, num_robots=1, bounds=grid2, **base)),
        ("3x3-two-robots", SimConfig(p=1, q=2, num_robots=2, bounds=grid3, **base)),
        ("3x3-faults", SimConfig(p=1, q=2, num_robots=2, bounds=grid3, fault_probability=0.5, **base)),
        ("3x3-faults-restart", SimConfig(p=1, q=2, num_robots=2, bounds=grid3, fault_probability=0.5,
                                         restart_after_fault=True, **base)),
    ]


def cmd_verify(args) -> int:
    table = MUTATIONS[args.mutation] if args.mutation else ROBOT_TRANSITIONS
    try:
        if args.config:
            config = _load(args)
            fsm_sizes = [config.num_robots]
            spatial = [("config", config)]
        else:
            fsm_sizes = [1, 2, 3]
            spatial = _default_spatial_suite()
        relations = [(f"fsm-{n}", enumerate_fsm(n, args.depth, table=table)) for n in fsm_sizes]
        explorations = [(name, verify_sim_branching(c, args.sim_depth)) for name, c in spatial]
    except OSError as exc:
        _diag("cannot read config: %s", exc)
        return EXIT_IO
    except (ConfigError, BoundError) as exc:
        _diag("guard violation: %s", exc)
        return EXIT_CONFIG

    total = 0
    for name, relation in relations:
        found = check_invariants(relation)
        total += len(found)
        for v in found:
            _emit({"suite": name, **v.as_record()})
        _info("%s: %d states, %d edges, %d violations, %d restart-cycle nodes%s",
                 name, len(relation.nodes), len(relation.edges), len(found),
                 len(restart_cycle_nodes(relation)), " (truncated)" if relation.truncated else "")
    for name, result in explorations:
        total += len(result.violations)
        for v in result.violations:
            _emit({"suite": name, **v.as_record()})
        leaves = {k.value: n for k, n in sorted(result.leaves.items(), key=lambda kv: kv[0].value)}
        _info("%s: %d states, %d edges, leaves %s, %d violations%s", name, result.states,
                 result.edges, leaves, len(result.violations), " (truncated)" if result.truncated else "")
    _emit({"violations": total})
    return EXIT_OK if total == 0 else EXIT_MISMATCH


def cmd_replay(args) -> int:
    try:
        with open(args.trace, encoding="utf-8") as fh:
            config, recorded = read_trace(fh)
    except OSError as exc:
        _diag("cannot read trace: %s", exc)
        return EXIT_IO
    except TraceFormatError as exc:
        _diag("malformed trace: %s", exc)
        return EXIT_CONFIG
    try:
        summary = run(config)
    except ConfigError as exc:
        _diag("trace config cannot be run: %s", exc)
        return EXIT_CONFIG
    fresh = trace_lines(config, summary.events)[1:]
    for i, (want, got) in enumerate(zip(fresh, recorded)):
        if want != got:
            return _diverged(i + 2, got, want)
    if len(fresh) != len(recorded):
        return _diverged(min(len(fresh), len(recorded)) + 2, None, None)
    _emit({"match": True, "events": len(recorded)})
    return EXIT_OK


def _diverged(lineno, got, want) -> int:
    _diag("trace diverges at line %d", lineno)
    if got is not None:
        _diag("  recorded: %s", got)
        _diag("  replayed: %s", want)
    _emit({"match": False, "line": lineno})
    return EXIT_MISMATCH


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zswarm", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def overrides(p):
        p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                       help="override one config key (repeatable)")

    p_run = sub.add_parser("run", help="run one simulation")
    p_run.add_argument("config", help="flat key = value config file")
    p_run.add_argument("--trace-out", metavar="PATH", help="write the event trace here")
    overrides(p_run)
    p_run.set_defaults(func=cmd_run)

    p_verify = sub.add_parser("verify", help="exhaustively check the transition rules")
    p_verify.add_argument("config", nargs="?", help="verify this (tiny) config instead of the default suite")
    p_verify.add_argument("--depth", type=int, default=12, help="FSM search depth (default 12)")
    p_verify.add_argument("--sim-depth", type=int, default=64, help="spatial search depth (default 64)")
    p_verify.add_argument("--mutation", choices=sorted(MUTATIONS), help="verify a corrupted transition table")
    overrides(p_verify)
    p_verify.set_defaults(func=cmd_verify)

    p_replay = sub.add_parser("replay", help="re-run a trace and compare event by event")
    p_replay.add_argument("trace")
    p_replay.set_defaults(func=cmd_replay)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    global _verbose
    _verbose = args.verbose
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
