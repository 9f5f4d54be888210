"""Line-delimited JSON trace files.

Line 1 is a header holding the artifact version and the fully resolved
config.  Every following line is one event with the fixed field order
``tick, kind, robotId, report, x, y, z`` (``Terminated`` lines add a final
``termination`` field).
"""

from __future__ import annotations

import json
from collections.abc import Iterable
from typing import TextIO

from . import __version__
from .config import config_from_flat, config_to_flat
from .core import Report
from .errors import ConfigError, SwarmError
from .sim import EventKind, SimConfig, TerminationKind, TraceEvent
from .world import Location

TRACE_FORMAT = "zswarm-trace"
EVENT_FIELDS = ("tick", "kind", "robotId", "report", "x", "y", "z")


class TraceFormatError(SwarmError, ValueError):
    """A trace file does not follow the documented layout."""

    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


def _dumps(obj) -> str:
    return json.dumps(obj, separators=(",", ":"))


def event_record(event: TraceEvent) -> dict:
    loc = event.location
    record = {
        "tick": event.tick,
        "kind": event.kind.value,
        "robotId": event.robot_id,
        "report": event.report.value,
        "x": None if loc is None else loc.x,
        "y": None if loc is None else loc.y,
        "z": None if loc is None else loc.z,
    }
    if event.termination is not None:
        record["termination"] = event.termination.value
    return record


def event_line(event: TraceEvent) -> str:
    return _dumps(event_record(event))


def header_line(config: SimConfig) -> str:
    return _dumps({"format": TRACE_FORMAT, "version": __version__, "config": config_to_flat(config)})


def trace_lines(config: SimConfig, events: Iterable[TraceEvent]) -> list[str]:
    return [header_line(config), *(event_line(e) for e in events)]


def write_trace(fh: TextIO, config: SimConfig, events: Iterable[TraceEvent]) -> None:
    for line in trace_lines(config, events):
        fh.write(line)
        fh.write("\n")


def parse_header(line: str) -> SimConfig:
    try:
        header = json.loads(line)
    except json.JSONDecodeError as exc:
        raise TraceFormatError(f"header is not JSON ({exc.msg})", 1) from None
    if not isinstance(header, dict) or header.get("format") != TRACE_FORMAT:
        raise TraceFormatError("missing trace header", 1)
    if not isinstance(header.get("config"), dict):
        raise TraceFormatError("header has no config object", 1)
    try:
        return config_from_flat(header["config"])
    except ConfigError as exc:
        raise TraceFormatError(f"header config invalid: {exc}", 1) from None


def parse_event(line: str, lineno: int | None = None) -> TraceEvent:
    try:
        rec = json.loads(line)
    except json.JSONDecodeError as exc:
        raise TraceFormatError(f"not JSON ({exc.msg})", lineno) from None
    if not isinstance(rec, dict) or tuple(rec)[: len(EVENT_FIELDS)] != EVENT_FIELDS:
        raise TraceFormatError(f"expected fields {', '.join(EVENT_FIELDS)}", lineno)
    try:
        xyz = (rec["x"], rec["y"], rec["z"])
        return TraceEvent(
            tick=int(rec["tick"]),
            kind=EventKind(rec["kind"]),
            robot_id=rec["robotId"],
            report=Report(rec["report"]),
            location=None if rec["x"] is None else Location(*xyz),
            termination=TerminationKind(rec["termination"]) if "termination" in rec else None,
        )
    except (ValueError, TypeError) as exc:
        raise TraceFormatError(str(exc), lineno) from None


def read_trace(fh: TextIO) -> tuple[SimConfig, list[str]]:
    """Return the embedded config and the raw event lines (validated)."""
    lines = fh.read().splitlines()
    if not lines:
        raise TraceFormatError("empty trace file", 1)
    config = parse_header(lines[0])
    events = lines[1:]
    for lineno, line in enumerate(events, 2):
        parse_event(line, lineno)
    return config, events
