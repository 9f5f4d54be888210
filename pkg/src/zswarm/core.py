"""Guarded robot and shape transitions.

Every operation here is total: it returns the (possibly unchanged) record
together with a :class:`Report`.  A non-success report always comes with the
input record returned untouched.
"""

from __future__ import annotations

import enum
from collections.abc import Mapping
from dataclasses import dataclass, replace
from types import MappingProxyType

from .errors import ConstructionError
from .world import DEFAULT_BOUNDS, Location, ShapeSpec, WorldBounds, check_location


class RobotState(enum.Enum):
    STATIONARY = "Stationary"
    UNLOCALIZE = "UnLocalize"
    LOCALIZE = "Localize"

    def __str__(self):
        return self.value


@enum.unique
class ShapeState(enum.IntEnum):
    """Ordered Empty < Partial < Complete."""

    EMPTY = 0
    PARTIAL = 1
    COMPLETE = 2

    def __str__(self):
        return self.name.capitalize()


class Report(enum.Enum):
    SUCCESS = "Success"
    ALREADY_MOVING = "AlreadyMoving"
    ALREADY_FAULTED = "AlreadyFaulted"
    ALREADY_JOINED = "AlreadyJoined"
    SHAPE_COMPLETED = "ShapeCompleted"

    def __str__(self):
        return self.value


class RobotOp(enum.Enum):
    START_MOVE = "start_move"
    FAULT_OCCUR = "fault_occur"
    JOIN_SHAPE = "join_shape"

    def __str__(self):
        return self.value


_S, _U, _L = RobotState.STATIONARY, RobotState.UNLOCALIZE, RobotState.LOCALIZE

RobotTable = Mapping[RobotOp, Mapping[RobotState, "tuple[RobotState, Report]"]]


def _freeze(table) -> RobotTable:
    return MappingProxyType({op: MappingProxyType(dict(rows)) for op, rows in table.items()})


# (state after, report) for each (operation, state before).
ROBOT_TRANSITIONS: RobotTable = _freeze({
    RobotOp.START_MOVE: {
        _S: (_U, Report.SUCCESS),
        _U: (_U, Report.ALREADY_MOVING),
        _L: (_L, Report.ALREADY_JOINED),
    },
    RobotOp.FAULT_OCCUR: {
        _U: (_S, Report.SUCCESS),
        _S: (_S, Report.ALREADY_FAULTED),
        _L: (_L, Report.ALREADY_JOINED),
    },
    RobotOp.JOIN_SHAPE: {
        _U: (_L, Report.SUCCESS),
        _L: (_L, Report.ALREADY_JOINED),
        _S: (_S, Report.ALREADY_FAULTED),
    },
})

# Figure-level legality: the only state pairs any robot operation may produce.
LEGAL_ROBOT_PAIRS = frozenset({(_S, _U), (_U, _S), (_U, _L)} | {(s, s) for s in RobotState})

# Per-operation legality, used to label illegal edges precisely.
LEGAL_OP_PAIRS = MappingProxyType({
    RobotOp.START_MOVE: frozenset({(_S, _U)} | {(s, s) for s in RobotState}),
    RobotOp.FAULT_OCCUR: frozenset({(_U, _S)} | {(s, s) for s in RobotState}),
    RobotOp.JOIN_SHAPE: frozenset({(_U, _L)} | {(s, s) for s in RobotState}),
})


def mutate_table(op: RobotOp, before: RobotState, after: RobotState,
                 report: Report = Report.SUCCESS, base: RobotTable = ROBOT_TRANSITIONS) -> RobotTable:
    """Copy of ``base`` with one cell redirected (for mutation testing)."""
    rows = {o: dict(r) for o, r in base.items()}
    rows[op][before] = (after, report)
    return _freeze(rows)


# Each shipped mutation redirects one of the four legal robot edges.
MUTATIONS: Mapping[str, RobotTable] = MappingProxyType({
    "start_move": mutate_table(RobotOp.START_MOVE, _S, _L),
    "fault_occur": mutate_table(RobotOp.FAULT_OCCUR, _U, _L),
    "join_shape": mutate_table(RobotOp.JOIN_SHAPE, _U, _S),
    "absorb": mutate_table(RobotOp.FAULT_OCCUR, _L, _S),
})


@dataclass(frozen=True)
class RobotRecord:
    id: int
    state: RobotState
    location: Location


@dataclass(frozen=True)
class ShapeRecord:
    spec: ShapeSpec
    state: ShapeState
    members: frozenset[int] = frozenset()

    @property
    def is_full(self) -> bool:
        return len(self.members) >= self.spec.dimension


def robot_init(id: int, location: Location, bounds: WorldBounds = DEFAULT_BOUNDS) -> RobotRecord:
    if isinstance(id, bool) or not isinstance(id, int) or id < 0:
        raise ConstructionError(f"robot id must be a non-negative integer, got {id!r}")
    check_location(location, bounds)
    return RobotRecord(id, RobotState.STATIONARY, location)


def apply_robot_op(r: RobotRecord, op: RobotOp,
                   table: RobotTable = ROBOT_TRANSITIONS) -> tuple[RobotRecord, Report]:
    after, report = table[op][r.state]
    if after is r.state:
        return r, report
    return replace(r, state=after), report


def start_move(r: RobotRecord) -> tuple[RobotRecord, Report]:
    return apply_robot_op(r, RobotOp.START_MOVE)


def fault_occur(r: RobotRecord) -> tuple[RobotRecord, Report]:
    return apply_robot_op(r, RobotOp.FAULT_OCCUR)


def join_shape(r: RobotRecord) -> tuple[RobotRecord, Report]:
    """Pure state change for joining; spatial eligibility is checked by the caller."""
    return apply_robot_op(r, RobotOp.JOIN_SHAPE)


def shape_init(spec: ShapeSpec) -> ShapeRecord:
    if not isinstance(spec, ShapeSpec):
        raise ConstructionError(f"expected a ShapeSpec, got {type(spec).__name__}")
    if spec.dimension < 1:
        raise ConstructionError("shape dimension must be positive")
    return ShapeRecord(spec, ShapeState.EMPTY, frozenset())


def robot_joins(s: ShapeRecord, robot_id: int) -> tuple[ShapeRecord, Report]:
    """Register a localized robot as a shape member.

    Checked in order: completed shape, duplicate member, no free slot.
    The first join moves Empty to Partial; later ones keep Partial.
    """
    if s.state is ShapeState.COMPLETE:
        return s, Report.SHAPE_COMPLETED
    if robot_id in s.members:
        return s, Report.ALREADY_JOINED
    if s.is_full:
        # every slot already taken; only the completion check is left to run
        return s, Report.SHAPE_COMPLETED
    return ShapeRecord(s.spec, ShapeState.PARTIAL, s.members | {robot_id}), Report.SUCCESS


def swarm_join_check(s: ShapeRecord,
                     occupancy: Mapping[Location, int | None]) -> tuple[ShapeRecord, Report]:
    """Promote Partial to Complete once every target cell holds a member.

    ``occupancy`` must map exactly the target cells to their occupant ids
    (``None`` for a free cell).  An unfilled shape is not an error: the
    record comes back unchanged with a success report.
    """
    if set(occupancy) != s.spec.cell_set:
        raise ValueError("occupancy must cover exactly the shape's target cells")
    if s.state is ShapeState.COMPLETE:
        return s, Report.SHAPE_COMPLETED
    if s.state is ShapeState.PARTIAL and all(
        occupancy[cell] is not None and occupancy[cell] in s.members for cell in s.spec.cells
    ):
        return ShapeRecord(s.spec, ShapeState.COMPLETE, s.members), Report.SUCCESS
    return s, Report.SUCCESS
