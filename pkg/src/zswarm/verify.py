"""Exhaustive checking of the transition rules on small swarms.

Two explorations are provided:

* :func:`enumerate_fsm` walks the abstract product of robot and shape
  states (no geometry) breadth-first and returns the transition relation.
* :func:`verify_sim_branching` drives the real simulator with every
  possible random choice and checks the engine invariants on each step.

Both report problems as :class:`Violation` values, never as exceptions.
"""

from __future__ import annotations

import enum
import json
from collections import Counter, defaultdict, deque
from collections.abc import Callable, Iterable, Iterator
from dataclasses import dataclass, field

from .core import (
    LEGAL_OP_PAIRS,
    LEGAL_ROBOT_PAIRS,
    ROBOT_TRANSITIONS,
    Report,
    RobotOp,
    RobotRecord,
    RobotState,
    RobotTable,
    ShapeRecord,
    ShapeState,
    apply_robot_op,
    robot_joins,
    swarm_join_check,
)
from .errors import BoundError
from .sim import (
    EventKind,
    SimConfig,
    SimState,
    TerminationKind,
    TraceEvent,
    check_termination,
    init_sim,
    tick,
)
from .world import Location, WorldBounds, make_shape_spec

MAX_FSM_ROBOTS = 4
MAX_SIM_ROBOTS = 3
MAX_SIM_EXTENT = 4

ROBOT_JOINS = "robot_joins"
SWARM_JOIN_CHECK = "swarm_join_check"
SHAPE_OPS = (ROBOT_JOINS, SWARM_JOIN_CHECK)


class ViolationKind(enum.Enum):
    ILLEGAL_TRANSITION = "IllegalTransition"
    NON_MONOTONE_SHAPE = "NonMonotoneShape"
    REPORT_MISMATCH = "ReportMismatch"
    INCONSISTENT_MEMBERSHIP = "InconsistentMembership"
    UNREACHABLE_TERMINATION = "UnreachableTermination"
    # spatial engine invariants
    OCCUPANCY_UNSOUND = "OccupancyUnsound"
    LOCALIZED_MOVED = "LocalizedMoved"
    DISCONNECTED_SHAPE = "DisconnectedShape"
    TERMINATION_MISMATCH = "TerminationMismatch"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class JointState:
    robot_states: tuple[RobotState, ...]
    shape_state: ShapeState
    members: frozenset[int] = frozenset()

    @property
    def member_count(self) -> int:
        return len(self.members)

    @classmethod
    def initial(cls, num_robots: int) -> JointState:
        return cls((RobotState.STATIONARY,) * num_robots, ShapeState.EMPTY)

    def as_dict(self) -> dict:
        return {
            "robots": [s.value for s in self.robot_states],
            "shape": str(self.shape_state),
            "members": sorted(self.members),
        }


# (operation name, robot index); shape operations still name the robot they act for,
# except the completion check which takes None.
Event = tuple[str, "int | None"]


@dataclass(frozen=True)
class Edge:
    src: JointState
    event: Event
    dst: JointState
    report: Report


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    detail: str
    # alternating path: ((None, s0), (event1, s1), ...); sim witnesses hold choice scripts
    witness: tuple = ()

    def as_record(self) -> dict:
        return {"kind": self.kind.value, "detail": self.detail, "witness": _witness_json(self.witness)}

    def to_line(self) -> str:
        return json.dumps(self.as_record(), separators=(",", ":"))


def _witness_json(witness):
    out = []
    for step in witness:
        if isinstance(step, tuple) and len(step) == 2 and isinstance(step[1], JointState):
            event, state = step
            out.append({
                "event": None if event is None else event[0],
                "robotId": None if event is None else event[1],
                "state": state.as_dict(),
            })
        else:
            out.append(list(step))
    return out


# ---------------------------------------------------------------- FSM product


def _fsm_spec(dimension: int):
    bounds = WorldBounds(0, dimension - 1, 0, 0, 0, 0)
    return make_shape_spec(dimension, 1, Location(0, 0, 0), bounds)


class FsmModel:
    """Abstract robot-and-shape product driven by the real core operations."""

    def __init__(self, num_robots: int, dimension: int | None = None, coupled: bool = True,
                 table: RobotTable = ROBOT_TRANSITIONS):
        self.num_robots = num_robots
        self.dimension = num_robots if dimension is None else dimension
        self.coupled = coupled
        self.table = table
        self.spec = _fsm_spec(self.dimension)

    def events(self, state: JointState) -> Iterator[Event]:
        for i in range(self.num_robots):
            for op in RobotOp:
                yield (op.value, i)
        if not self.coupled:
            return
        for i in range(self.num_robots):
            # robot_joins is only defined for a robot that has already localized
            if state.robot_states[i] is RobotState.LOCALIZE:
                yield (ROBOT_JOINS, i)
        yield (SWARM_JOIN_CHECK, None)

    def occupancy(self, members: frozenset[int]) -> dict[Location, int | None]:
        ordered = sorted(members)
        return {
            cell: ordered[i] if i < len(ordered) else None
            for i, cell in enumerate(self.spec.cells)
        }

    def apply(self, state: JointState, event: Event) -> tuple[JointState, Report]:
        name, idx = event
        if name == ROBOT_JOINS or name == SWARM_JOIN_CHECK:
            shape = ShapeRecord(self.spec, state.shape_state, state.members)
            if name == ROBOT_JOINS:
                shape, report = robot_joins(shape, idx)
            else:
                shape, report = swarm_join_check(shape, self.occupancy(shape.members))
            return JointState(state.robot_states, shape.state, shape.members), report
        robot = RobotRecord(idx, state.robot_states[idx], Location(0, 0, 0))
        robot, report = apply_robot_op(robot, RobotOp(name), self.table)
        states = list(state.robot_states)
        states[idx] = robot.state
        return JointState(tuple(states), state.shape_state, state.members), report

    def replay(self, events: Iterable[Event]) -> JointState:
        state = JointState.initial(self.num_robots)
        for event in events:
            state, _ = self.apply(state, event)
        return state


@dataclass
class TransitionRelation:
    initial: JointState
    edges: list[Edge]
    dimension: int
    nodes: set[JointState] = field(default_factory=set)
    depth_limit: int | None = None
    # nodes whose successors were never generated (search bound or end of a trace)
    frontier: set[JointState] = field(default_factory=set)

    def __post_init__(self):
        self.nodes.add(self.initial)
        for e in self.edges:
            self.nodes.add(e.src)
            self.nodes.add(e.dst)

    @property
    def truncated(self) -> bool:
        return bool(self.frontier)

    def path_to(self, target: JointState) -> tuple:
        """Shortest event path from the initial node, as ((event, state), ...)."""
        parents: dict[JointState, tuple[JointState, Event] | None] = {self.initial: None}
        out = defaultdict(list)
        for e in self.edges:
            out[e.src].append(e)
        queue = deque([self.initial])
        while queue and target not in parents:
            node = queue.popleft()
            for e in out[node]:
                if e.dst not in parents:
                    parents[e.dst] = (node, e.event)
                    queue.append(e.dst)
        if target not in parents:
            return ((None, target),)
        steps = []
        node = target
        while parents[node] is not None:
            prev, event = parents[node]
            steps.append((event, node))
            node = prev
        steps.append((None, self.initial))
        return tuple(reversed(steps))


def enumerate_fsm(num_robots: int, depth_limit: int, *, dimension: int | None = None,
                  coupled: bool = True, table: RobotTable = ROBOT_TRANSITIONS,
                  max_states: int = 200_000) -> TransitionRelation:
    """Breadth-first reachable set of the abstract product, up to ``depth_limit`` events.

    Every event is tried in every state, so error outcomes show up as edges
    too.  Nodes first reached at the depth limit are expanded once more to
    find out whether anything new lies beyond; if so they stay in
    ``frontier`` and the relation is marked truncated.
    """
    if not 1 <= num_robots <= MAX_FSM_ROBOTS:
        raise BoundError(f"numRobots={num_robots} outside [1, {MAX_FSM_ROBOTS}]")
    if depth_limit < 1:
        raise BoundError(f"depthLimit={depth_limit} must be at least 1")
    model = FsmModel(num_robots, dimension, coupled, table)
    if model.dimension < 1:
        raise BoundError(f"shape dimension {model.dimension} must be positive")

    start = JointState.initial(num_robots)
    depth = {start: 0}
    edges: list[Edge] = []
    frontier: set[JointState] = set()
    queue = deque([start])
    while queue:
        node = queue.popleft()
        d = depth[node]
        succ = []
        for event in model.events(node):
            dst, report = model.apply(node, event)
            succ.append(Edge(node, event, dst, report))
        if d >= depth_limit:
            if any(e.dst not in depth for e in succ):
                frontier.add(node)
                continue
        edges.extend(succ)
        for e in succ:
            if e.dst not in depth:
                if len(depth) >= max_states:
                    raise BoundError(f"state count exceeds max_states={max_states}")
                depth[e.dst] = d + 1
                queue.append(e.dst)
    return TransitionRelation(start, edges, model.dimension, set(depth), depth_limit, frontier)


def terminal_kind(state: JointState, dimension: int) -> TerminationKind | None:
    movers = RobotState.UNLOCALIZE in state.robot_states
    if state.shape_state is ShapeState.COMPLETE:
        return TerminationKind.COMPLETE_WITH_MOVERS if movers else TerminationKind.COMPLETE_ALL_LOCALIZED
    return None if movers else TerminationKind.STALLED_INCOMPLETE


def _robot_op(event: Event) -> RobotOp | None:
    try:
        return RobotOp(event[0])
    except ValueError:
        return None


def _membership_problems(state: JointState, dimension: int) -> list[str]:
    problems = []
    localized = {i for i, s in enumerate(state.robot_states) if s is RobotState.LOCALIZE}
    if not state.members <= localized:
        problems.append(f"members {sorted(state.members - localized)} are not localized")
    if (state.shape_state is ShapeState.EMPTY) != (not state.members):
        problems.append(f"shape {state.shape_state} with {state.member_count} members")
    if state.shape_state is ShapeState.COMPLETE and state.member_count != dimension:
        problems.append(f"complete shape holds {state.member_count} of {dimension} members")
    if state.member_count > dimension:
        problems.append(f"{state.member_count} members exceed dimension {dimension}")
    return problems


def restart_cycle_nodes(relation: TransitionRelation) -> set[JointState]:
    """Nodes on a start_move / fault_occur loop (informational only)."""
    out = {}
    for e in relation.edges:
        out[(e.src, e.event)] = e.dst
    on_cycle = set()
    for e in relation.edges:
        if e.event[0] == RobotOp.START_MOVE.value and e.dst != e.src:
            back = out.get((e.dst, (RobotOp.FAULT_OCCUR.value, e.event[1])))
            if back == e.src:
                on_cycle.update((e.src, e.dst))
    return on_cycle


def check_invariants(relation: TransitionRelation) -> list[Violation]:
    """Every violated schema invariant in ``relation``; empty when it is clean."""
    violations: list[Violation] = []
    dim = relation.dimension

    def edge_witness(e: Edge):
        return relation.path_to(e.src) + ((e.event, e.dst),)

    for e in relation.edges:
        name, idx = e.event
        op = _robot_op(e.event)
        src, dst = e.src, e.dst
        if op is not None:
            pair = (src.robot_states[idx], dst.robot_states[idx])
            others_same = all(
                a is b for j, (a, b) in enumerate(zip(src.robot_states, dst.robot_states)) if j != idx
            )
            if pair not in LEGAL_ROBOT_PAIRS or pair not in LEGAL_OP_PAIRS[op]:
                violations.append(Violation(
                    ViolationKind.ILLEGAL_TRANSITION,
                    f"{name}({idx}): {pair[0]} -> {pair[1]}", edge_witness(e)))
            elif not others_same or src.shape_state is not dst.shape_state or src.members != dst.members:
                violations.append(Violation(
                    ViolationKind.ILLEGAL_TRANSITION,
                    f"{name}({idx}) changed state outside robot {idx}", edge_witness(e)))
        elif src.robot_states != dst.robot_states:
            violations.append(Violation(
                ViolationKind.ILLEGAL_TRANSITION, f"{name} changed robot states", edge_witness(e)))

        if dst.shape_state < src.shape_state:
            violations.append(Violation(
                ViolationKind.NON_MONOTONE_SHAPE,
                f"{name}: shape {src.shape_state} -> {dst.shape_state}", edge_witness(e)))

        if e.report is not Report.SUCCESS and dst != src:
            violations.append(Violation(
                ViolationKind.REPORT_MISMATCH,
                f"{name}: report {e.report} but state changed", edge_witness(e)))
        elif e.report is Report.SUCCESS and dst == src and name != SWARM_JOIN_CHECK:
            violations.append(Violation(
                ViolationKind.REPORT_MISMATCH,
                f"{name}: success without a state change", edge_witness(e)))

    for node in sorted(relation.nodes, key=_node_order):
        for problem in _membership_problems(node, dim):
            violations.append(Violation(
                ViolationKind.INCONSISTENT_MEMBERSHIP, problem, relation.path_to(node)))

    # Backward reachability of a node satisfying one of the stop predicates.
    preds = defaultdict(set)
    for e in relation.edges:
        preds[e.dst].add(e.src)
    good = {n for n in relation.nodes if terminal_kind(n, dim) is not None}
    good |= relation.frontier  # unexplored: not judged
    stack = list(good)
    while stack:
        node = stack.pop()
        for p in preds[node]:
            if p not in good:
                good.add(p)
                stack.append(p)
    cycles = restart_cycle_nodes(relation)
    for node in sorted(relation.nodes - good - cycles, key=_node_order):
        violations.append(Violation(
            ViolationKind.UNREACHABLE_TERMINATION,
            "no stopping condition reachable", relation.path_to(node)))
    return violations


def _node_order(node: JointState):
    return ([s.value for s in node.robot_states], node.shape_state, sorted(node.members))


def replay_fsm_witness(violation: Violation, num_robots: int, dimension: int | None = None,
                       table: RobotTable = ROBOT_TRANSITIONS) -> JointState:
    """Re-run a witness path through the core operations; returns the final state."""
    model = FsmModel(num_robots, dimension, table=table)
    return model.replay(event for event, _ in violation.witness if event is not None)


def relation_from_trace(config: SimConfig, events: Iterable[TraceEvent]) -> TransitionRelation:
    """Abstract a simulator trace into a path-shaped transition relation.

    Movement steps do not change the abstract state and are dropped.
    """
    n, k = config.num_robots, config.num_seeds
    dim = config.shape_spec.dimension
    shape_state = ShapeState.COMPLETE if k == dim else ShapeState.PARTIAL
    state = JointState(
        (RobotState.LOCALIZE,) * k + (RobotState.STATIONARY,) * (n - k),
        shape_state, frozenset(range(k)))
    initial = state
    op_for = {
        EventKind.START_MOVE: RobotOp.START_MOVE.value,
        EventKind.FAULT: RobotOp.FAULT_OCCUR.value,
        EventKind.JOIN: RobotOp.JOIN_SHAPE.value,
        EventKind.SHAPE_PARTIAL: ROBOT_JOINS,
        EventKind.SHAPE_COMPLETE: SWARM_JOIN_CHECK,
    }
    robot_after = {
        RobotOp.START_MOVE.value: RobotState.UNLOCALIZE,
        RobotOp.FAULT_OCCUR.value: RobotState.STATIONARY,
        RobotOp.JOIN_SHAPE.value: RobotState.LOCALIZE,
    }
    edges = []
    terminated = False
    for ev in events:
        if ev.kind is EventKind.TERMINATED:
            terminated = True
            continue
        name = op_for.get(ev.kind)
        if name is None:
            continue
        rid = ev.robot_id
        states, members, shape = list(state.robot_states), state.members, state.shape_state
        if ev.report is Report.SUCCESS:
            if name in robot_after:
                states[rid] = robot_after[name]
            elif name == ROBOT_JOINS:
                members = members | {rid}
                shape = max(shape, ShapeState.PARTIAL)
            else:
                shape = ShapeState.COMPLETE
        nxt = JointState(tuple(states), shape, members)
        edges.append(Edge(state, (name, None if name == SWARM_JOIN_CHECK else rid), nxt, ev.report))
        state = nxt
    frontier = set() if terminated else {state}
    return TransitionRelation(initial, edges, dim, frontier=frontier)


# ---------------------------------------------------------------- spatial branching


class ScriptedChooser:
    """Chooser that follows a fixed script, then defaults to choice 0.

    Every decision with more than one option is logged in ``trail`` as
    ``(choice, arity)`` so a caller can enumerate the untaken branches.
    """

    def __init__(self, script: Iterable[int] = ()):
        self.script = tuple(script)
        self.trail: list[tuple[int, int]] = []

    def _choose(self, arity: int) -> int:
        pos = len(self.trail)
        choice = self.script[pos] if pos < len(self.script) else 0
        if not 0 <= choice < arity:
            raise ValueError(f"scripted choice {choice} out of range for {arity} options")
        self.trail.append((choice, arity))
        return choice

    def bernoulli(self, p):
        if p <= 0:
            return False
        if p >= 1:
            return True
        return self._choose(2) == 1

    def pick(self, n):
        if n == 1:
            return 0
        return self._choose(n)


def all_outcomes(fn: Callable[[ScriptedChooser], object]) -> Iterator[tuple[tuple[int, ...], object]]:
    """Run ``fn`` once per distinct choice sequence it can make."""
    stack: list[tuple[int, ...]] = [()]
    while stack:
        script = stack.pop()
        chooser = ScriptedChooser(script)
        result = fn(chooser)
        taken = tuple(c for c, _ in chooser.trail)
        for i in range(len(script), len(chooser.trail)):
            choice, arity = chooser.trail[i]
            for alt in range(choice + 1, arity):
                stack.append(taken[:i] + (alt,))
        yield taken, result


def sim_key(state: SimState):
    """State identity for the search; the tick only matters as 'tick 0 done or not'."""
    return (
        state.tick > 0,
        tuple((r.state, r.location) for r in state.robots),
        state.shape.state,
        state.shape.members,
        state.terminated,
    )


def _filled_cells(state: SimState) -> set[Location]:
    return {
        r.location for r in state.robots
        if r.state is RobotState.LOCALIZE and r.location in state.shape.spec.cell_set
    }


def state_problems(state: SimState) -> list[tuple[ViolationKind, str]]:
    """Invariants that must hold at every tick boundary."""
    problems = []
    robots = state.robots
    if [r.id for r in robots] != list(range(state.config.num_robots)):
        problems.append((ViolationKind.OCCUPANCY_UNSOUND, "robot ids changed"))
    expected = {r.location: r.id for r in robots}
    if len(expected) != len(robots):
        problems.append((ViolationKind.OCCUPANCY_UNSOUND, "two robots share a cell"))
    if expected != state.occupancy:
        problems.append((ViolationKind.OCCUPANCY_UNSOUND, "occupancy map disagrees with robots"))
    bounds = state.config.bounds
    if any(not bounds.contains(*r.location) for r in robots):
        problems.append((ViolationKind.OCCUPANCY_UNSOUND, "robot out of bounds"))

    localized = {r.id for r in robots if r.state is RobotState.LOCALIZE}
    shape = state.shape
    if shape.members != localized:
        problems.append((ViolationKind.INCONSISTENT_MEMBERSHIP,
                         f"members {sorted(shape.members)} vs localized {sorted(localized)}"))
    if (shape.state is ShapeState.EMPTY) != (not shape.members):
        problems.append((ViolationKind.INCONSISTENT_MEMBERSHIP, f"{shape.state} with {len(shape.members)} members"))
    filled = _filled_cells(state)
    if shape.state is ShapeState.COMPLETE and filled != shape.spec.cell_set:
        problems.append((ViolationKind.INCONSISTENT_MEMBERSHIP, "complete shape has unfilled cells"))
    if any(robots[m].location not in shape.spec.cell_set for m in shape.members if m < len(robots)):
        problems.append((ViolationKind.INCONSISTENT_MEMBERSHIP, "member outside the target region"))

    seeds = {robots[s].location for s in state.seeds}
    reached = set(seeds & filled)
    stack = list(reached)
    while stack:
        x, y, z = stack.pop()
        for nb in (Location(x + 1, y, z), Location(x - 1, y, z), Location(x, y + 1, z), Location(x, y - 1, z)):
            if nb in filled and nb not in reached:
                reached.add(nb)
                stack.append(nb)
    if reached != filled:
        problems.append((ViolationKind.DISCONNECTED_SHAPE,
                         f"{len(filled - reached)} filled cells not connected to a seed"))
    return problems


def step_problems(before: SimState, after: SimState,
                  events: list[TraceEvent]) -> list[tuple[ViolationKind, str]]:
    """Invariants relating two consecutive tick boundaries."""
    problems = state_problems(after)
    for old, new in zip(before.robots, after.robots):
        if old.state is RobotState.LOCALIZE and (new.state is not RobotState.LOCALIZE or new.location != old.location):
            problems.append((ViolationKind.LOCALIZED_MOVED, f"robot {old.id} left {old.location}"))
        if (old.state, new.state) not in LEGAL_ROBOT_PAIRS:
            problems.append((ViolationKind.ILLEGAL_TRANSITION, f"robot {old.id}: {old.state} -> {new.state}"))
    if after.shape.state < before.shape.state or not before.shape.members <= after.shape.members:
        problems.append((ViolationKind.NON_MONOTONE_SHAPE,
                         f"shape {before.shape.state} -> {after.shape.state}"))
    bad_reports = [e for e in events if e.report is not Report.SUCCESS]
    if bad_reports:
        problems.append((ViolationKind.REPORT_MISMATCH,
                         f"{bad_reports[0].kind} carried report {bad_reports[0].report}"))
    ends = [i for i, e in enumerate(events) if e.kind is EventKind.TERMINATED]
    recomputed = check_termination(after)
    emitted = events[ends[0]].termination if ends else None
    if len(ends) > 1 or (ends and ends[0] != len(events) - 1):
        problems.append((ViolationKind.TERMINATION_MISMATCH, "Terminated is not the single final event"))
    if emitted is not recomputed or after.terminated is not recomputed:
        problems.append((ViolationKind.TERMINATION_MISMATCH,
                         f"emitted {emitted}, recomputed {recomputed}"))
    return problems


@dataclass
class SimExploration:
    """Outcome of :func:`verify_sim_branching`.

    ``violations`` is the list of problems found; ``leaves`` counts the
    distinct terminated states by stopping condition.
    """

    config: SimConfig
    violations: list[Violation]
    leaves: Counter
    states: int
    edges: int
    frontier: int
    parents: dict = field(default_factory=dict, repr=False)

    @property
    def truncated(self) -> bool:
        return self.frontier > 0

    def witness(self, key) -> tuple[tuple[int, ...], ...]:
        """Choice scripts (placement first, then one per tick) leading to ``key``."""
        scripts = []
        while key is not None:
            key, script = self.parents[key]
            scripts.append(script)
        return tuple(reversed(scripts))


def replay_sim_witness(config: SimConfig, witness: Iterable[Iterable[int]]) -> SimState:
    """Drive the real engine through a witness; returns the state it reaches."""
    scripts = list(witness)
    state = init_sim(config, ScriptedChooser(scripts[0]))
    for script in scripts[1:]:
        state, _ = tick(state, ScriptedChooser(script))
    return state


def check_sim_guard(config: SimConfig) -> None:
    bounds = config.bounds
    if bounds.width("x") > MAX_SIM_EXTENT or bounds.width("y") > MAX_SIM_EXTENT:
        raise BoundError(
            f"world {bounds.width('x')}x{bounds.width('y')} exceeds {MAX_SIM_EXTENT}x{MAX_SIM_EXTENT}")
    if config.num_robots > MAX_SIM_ROBOTS:
        raise BoundError(f"numRobots={config.num_robots} exceeds {MAX_SIM_ROBOTS}")


def verify_sim_branching(config: SimConfig, depth_limit: int = 64) -> SimExploration:
    """Explore every placement, fault and movement choice of a tiny world.

    States are deduplicated, so the search is a reachability analysis over
    the finite state graph.  Every explored non-terminated state must be
    able to reach some terminated state; otherwise it is reported as
    ``UnreachableTermination``.
    """
    check_sim_guard(config)
    if depth_limit < 1:
        raise BoundError(f"depthLimit={depth_limit} must be at least 1")

    violations: list[Violation] = []
    parents: dict = {}
    states: dict = {}
    depth: dict = {}
    succ: dict = defaultdict(set)
    leaves: Counter = Counter()
    queue: deque = deque()
    n_edges = 0
    frontier = 0
    result = SimExploration(config, violations, leaves, 0, 0, 0, parents)

    def record(kind, detail, key):
        violations.append(Violation(kind, detail, result.witness(key)))

    for script, state in all_outcomes(lambda ch: init_sim(config, ch)):
        key = sim_key(state)
        if key in states:
            continue
        parents[key] = (None, script)
        states[key] = state
        depth[key] = 0
        queue.append(key)
        for kind, detail in state_problems(state):
            record(kind, detail, key)

    while queue:
        key = queue.popleft()
        state = states[key]
        if state.terminated is not None:
            leaves[state.terminated] += 1
            continue
        if depth[key] >= depth_limit:
            frontier += 1
            continue
        for script, (nxt, events) in all_outcomes(lambda ch: tick(state, ch)):
            n_edges += 1
            nkey = sim_key(nxt)
            succ[key].add(nkey)
            fresh = nkey not in states
            if fresh:
                parents[nkey] = (key, script)
                states[nkey] = nxt
                depth[nkey] = depth[key] + 1
                queue.append(nkey)
            problems = step_problems(state, nxt, events)
            if problems and not fresh:
                # witness must end in this exact edge, so extend the parent path
                base = result.witness(key) + (script,)
                for kind, detail in problems:
                    violations.append(Violation(kind, detail, base))
            else:
                for kind, detail in problems:
                    record(kind, detail, nkey)

    # Liveness over the explored graph.
    preds = defaultdict(set)
    for src, dsts in succ.items():
        for dst in dsts:
            preds[dst].add(src)
    good = {k for k, s in states.items() if s.terminated is not None}
    good |= {k for k in states if depth[k] >= depth_limit and states[k].terminated is None}
    stack = list(good)
    while stack:
        k = stack.pop()
        for p in preds[k]:
            if p not in good:
                good.add(p)
                stack.append(p)
    for k in states:
        if k not in good:
            record(ViolationKind.UNREACHABLE_TERMINATION, "no terminated state reachable", k)

    result.states = len(states)
    result.edges = n_edges
    result.frontier = frontier
    return result
