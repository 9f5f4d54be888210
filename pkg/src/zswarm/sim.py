"""Discrete-time lattice simulator for swarm shape formation.

All randomness goes through a :class:`Chooser`.  The default
:class:`RandomChooser` draws from a seeded ``random.Random``; the verifier
swaps in a scripted chooser to enumerate every choice instead.
"""

from __future__ import annotations

import copy
import enum
import random
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Protocol

from .core import (
    Report,
    RobotRecord,
    RobotState,
    ShapeRecord,
    ShapeState,
    join_shape,
    robot_joins,
    shape_init,
    start_move,
    fault_occur,
    swarm_join_check,
)
from .errors import ConfigError, ConstructionError, UsageError
from .world import (
    DEFAULT_BOUNDS,
    Location,
    ShapeSpec,
    WorldBounds,
    make_shape_spec,
    neighbor_list,
    seed_cells,
)

_STATIONARY = RobotState.STATIONARY
_MOVING = RobotState.UNLOCALIZE
_LOCALIZED = RobotState.LOCALIZE


class TerminationKind(enum.Enum):
    COMPLETE_ALL_LOCALIZED = "CompleteAllLocalized"
    STALLED_INCOMPLETE = "StalledIncomplete"
    COMPLETE_WITH_MOVERS = "CompleteWithMovers"

    def __str__(self):
        return self.value


MAX_TICKS_EXCEEDED = "MaxTicksExceeded"


class EventKind(enum.Enum):
    START_MOVE = "StartMove"
    STEP = "Step"
    FAULT = "Fault"
    JOIN = "Join"
    SHAPE_PARTIAL = "ShapePartial"
    SHAPE_COMPLETE = "ShapeComplete"
    TERMINATED = "Terminated"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class TraceEvent:
    tick: int
    kind: EventKind
    robot_id: int | None = None
    report: Report = Report.SUCCESS
    location: Location | None = None
    termination: TerminationKind | None = None


@dataclass(frozen=True)
class SimConfig:
    p: int
    q: int
    num_robots: int
    rng_seed: int
    max_ticks: int
    bounds: WorldBounds = DEFAULT_BOUNDS
    anchor: Location = Location(0, 0, 0)
    num_seeds: int = 1
    fault_probability: float = 0.0
    restart_after_fault: bool = False
    seal_guard: bool = True

    def __post_init__(self):
        def need_int(key, value, lo, hi=None):
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f"{key}: expected an integer, got {value!r}", key)
            if value < lo or (hi is not None and value > hi):
                rng = f"[{lo}, {hi}]" if hi is not None else f">= {lo}"
                raise ConfigError(f"{key}: {value} not in {rng}", key)

        need_int("numRobots", self.num_robots, 1)
        need_int("numSeeds", self.num_seeds, 1)
        need_int("rngSeed", self.rng_seed, 0, 2**64 - 1)
        need_int("maxTicks", self.max_ticks, 1)
        if isinstance(self.fault_probability, bool) or not isinstance(self.fault_probability, (int, float)):
            raise ConfigError(f"faultProbability: expected a number, got {self.fault_probability!r}",
                              "faultProbability")
        if not 0 <= self.fault_probability <= 1:
            raise ConfigError(f"faultProbability: {self.fault_probability} not in [0, 1]",
                              "faultProbability")
        for key, flag in (("restartAfterFault", self.restart_after_fault),
                          ("sealGuard", self.seal_guard)):
            if not isinstance(flag, bool):
                raise ConfigError(f"{key}: expected a boolean, got {flag!r}", key)
        try:
            spec = self.shape_spec
        except ConstructionError as exc:
            raise ConfigError(f"shape: {exc}", "shape") from None
        if self.num_seeds > spec.dimension:
            raise ConfigError(
                f"numSeeds: {self.num_seeds} exceeds shape dimension {spec.dimension}", "numSeeds")
        if self.num_seeds > self.num_robots:
            raise ConfigError(
                f"numSeeds: {self.num_seeds} exceeds numRobots {self.num_robots}", "numSeeds")

    @cached_property
    def shape_spec(self) -> ShapeSpec:
        return make_shape_spec(self.p, self.q, self.anchor, self.bounds)


class Chooser(Protocol):
    def bernoulli(self, p: float) -> bool: ...

    def pick(self, n: int) -> int: ...


class RandomChooser:
    """Seeded source of the simulator's random decisions."""

    def __init__(self, seed: int):
        self._rng = random.Random(seed)

    def bernoulli(self, p):
        if p <= 0:
            return False
        if p >= 1:
            return True
        return self._rng.random() < p

    def pick(self, n):
        return self._rng.randrange(n)


@dataclass
class SimState:
    config: SimConfig
    tick: int
    robots: list[RobotRecord]
    shape: ShapeRecord
    occupancy: dict[Location, int]
    rng: Chooser
    seeds: frozenset[int] = frozenset()
    terminated: TerminationKind | None = None

    def copy(self) -> SimState:
        return SimState(self.config, self.tick, list(self.robots), self.shape,
                        dict(self.occupancy), copy.deepcopy(self.rng), self.seeds, self.terminated)

    def target_occupancy(self) -> dict[Location, int | None]:
        return {cell: self.occupancy.get(cell) for cell in self.shape.spec.cells}


def init_sim(config: SimConfig, chooser: Chooser | None = None) -> SimState:
    """Place seeds on their target cells and scatter the rest at random.

    Seeds take ids ``0 .. numSeeds-1`` and start localized; every other
    robot starts stationary on a distinct free cell of the ``z = 0`` plane.
    """
    rng = chooser if chooser is not None else RandomChooser(config.rng_seed)
    spec = config.shape_spec
    plane = config.bounds.plane_cells(0)
    if config.num_robots > len(plane):
        raise ConfigError(
            f"numRobots: {config.num_robots} robots exceed {len(plane)} free cells", "numRobots")

    robots: list[RobotRecord] = []
    occupancy: dict[Location, int] = {}
    shape = shape_init(spec)
    for rid, cell in enumerate(seed_cells(spec, config.num_seeds)):
        robots.append(RobotRecord(rid, _LOCALIZED, cell))
        occupancy[cell] = rid
        shape, _ = robot_joins(shape, rid)
    shape, _ = swarm_join_check(shape, {c: occupancy.get(c) for c in spec.cells})

    free = [cell for cell in plane if cell not in occupancy]
    for rid in range(config.num_seeds, config.num_robots):
        cell = free.pop(rng.pick(len(free)))
        robots.append(RobotRecord(rid, _STATIONARY, cell))
        occupancy[cell] = rid

    return SimState(config, 0, robots, shape, occupancy, rng,
                    seeds=frozenset(range(config.num_seeds)))


def check_termination(state: SimState) -> TerminationKind | None:
    """Which of the three stopping conditions holds, if any.

    With restart-after-fault enabled a stationary robot is still a pending
    mover, so the stalled condition cannot fire.
    """
    restart = state.config.restart_after_fault
    movers = any(
        r.state is _MOVING or (restart and r.state is _STATIONARY) for r in state.robots
    )
    complete = state.shape.state is ShapeState.COMPLETE
    if complete:
        return TerminationKind.COMPLETE_WITH_MOVERS if movers else TerminationKind.COMPLETE_ALL_LOCALIZED
    if not movers:
        return TerminationKind.STALLED_INCOMPLETE
    return None


@lru_cache(maxsize=None)
def _moves(loc: Location, bounds: WorldBounds) -> tuple[Location, ...]:
    return tuple(neighbor_list(loc, bounds))


def _filled(state: SimState, cell: Location) -> bool:
    rid = state.occupancy.get(cell)
    return rid is not None and state.robots[rid].state is _LOCALIZED


def seals_cell(state: SimState, candidate: Location) -> bool:
    """Would localizing a robot on ``candidate`` wall in an unfilled target cell?

    A target cell is reachable while it connects, through unfilled target
    cells, to some cell outside the shape.  Localized robots never move
    again, so a cell that loses this connection can never be filled.
    """
    spec, bounds = state.shape.spec, state.config.bounds
    open_cells = {c for c in spec.cells if c != candidate and not _filled(state, c)}
    frontier = [
        c for c in open_cells
        if any(nb not in spec.cell_set for nb in _moves(c, bounds))
    ]
    reached = set(frontier)
    while frontier:
        cell = frontier.pop()
        for nb in _moves(cell, bounds):
            if nb in open_cells and nb not in reached:
                reached.add(nb)
                frontier.append(nb)
    return reached != open_cells


def join_eligible(state: SimState, robot: RobotRecord) -> bool:
    """Robot stands on a target cell next to a localized robot (and, with the
    seal guard on, joining there keeps every unfilled cell reachable)."""
    if robot.location not in state.shape.spec.cell_set:
        return False
    if not any(_filled(state, nb) for nb in _moves(robot.location, state.config.bounds)):
        return False
    return not (state.config.seal_guard and seals_cell(state, robot.location))


def advance(state: SimState, chooser: Chooser | None = None) -> list[TraceEvent]:
    """Run one tick in place and return its events.

    Tick 0 starts every stationary robot.  Later ticks sweep moving robots
    in id order: fault, else join if eligible, else one random step.
    """
    if state.terminated is not None:
        raise UsageError(f"run already terminated ({state.terminated}) at tick {state.tick - 1}")
    rng = chooser if chooser is not None else state.rng
    config = state.config
    robots, occupancy = state.robots, state.occupancy
    t = state.tick
    events: list[TraceEvent] = []

    for rid in range(len(robots)):
        robot = robots[rid]
        if robot.state is _STATIONARY:
            if t == 0 or config.restart_after_fault:
                robot, report = start_move(robot)
                robots[rid] = robot
                events.append(TraceEvent(t, EventKind.START_MOVE, rid, report, robot.location))
            continue
        if t == 0 or robot.state is not _MOVING:
            continue

        if rng.bernoulli(config.fault_probability):
            robot, report = fault_occur(robot)
            robots[rid] = robot
            events.append(TraceEvent(t, EventKind.FAULT, rid, report, robot.location))
        elif join_eligible(state, robot):
            robot, report = join_shape(robot)
            robots[rid] = robot
            events.append(TraceEvent(t, EventKind.JOIN, rid, report, robot.location))
            shape, report = robot_joins(state.shape, rid)
            events.append(TraceEvent(t, EventKind.SHAPE_PARTIAL, rid, report, robot.location))
            before = shape.state
            shape, report = swarm_join_check(shape, state.target_occupancy())
            if shape.state is not before:
                events.append(TraceEvent(t, EventKind.SHAPE_COMPLETE, rid, report, robot.location))
            state.shape = shape
        else:
            options = _moves(robot.location, config.bounds)
            dest = options[rng.pick(len(options))]
            if dest not in occupancy:
                del occupancy[robot.location]
                occupancy[dest] = rid
                robot = RobotRecord(rid, robot.state, dest)
                robots[rid] = robot
            events.append(TraceEvent(t, EventKind.STEP, rid, Report.SUCCESS, robot.location))

    state.tick = t + 1
    kind = check_termination(state)
    if kind is not None:
        state.terminated = kind
        events.append(TraceEvent(t, EventKind.TERMINATED, termination=kind))
    return events


def tick(state: SimState, chooser: Chooser | None = None) -> tuple[SimState, list[TraceEvent]]:
    """Pure variant of :func:`advance`: the input state is left untouched."""
    new = state.copy()
    events = advance(new, chooser)
    return new, events


@dataclass
class RunSummary:
    termination: TerminationKind | None
    final_tick: int
    report_counts: Counter = field(default_factory=Counter)
    events: list[TraceEvent] = field(default_factory=list)
    final_state: SimState | None = None

    @property
    def exceeded(self) -> bool:
        return self.termination is None

    @property
    def outcome(self) -> str:
        return MAX_TICKS_EXCEEDED if self.termination is None else self.termination.value

    def as_dict(self) -> dict:
        return {
            "outcome": self.outcome,
            "finalTick": self.final_tick,
            "reports": {r.value: self.report_counts.get(r.value, 0) for r in Report},
            "events": len(self.events),
        }


def run(config: SimConfig) -> RunSummary:
    state = init_sim(config)
    events: list[TraceEvent] = []
    while state.tick < config.max_ticks and state.terminated is None:
        events.extend(advance(state))
    counts = Counter(e.report.value for e in events if e.kind is not EventKind.TERMINATED)
    return RunSummary(state.terminated, state.tick - 1, counts, events, state)
