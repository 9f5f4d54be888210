"""Flat dotted-key configuration files.

One ``key = value`` pair per line; ``#`` starts a comment.  Example::

    shape.p = 4
    shape.q = 3
    numRobots = 12
    rngSeed = 42
    maxTicks = 100000
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from pathlib import Path

from .errors import ConfigError, ConstructionError
from .sim import SimConfig
from .world import Location, WorldBounds

REQUIRED = object()


class ConfigParseError(ConfigError):
    """The document itself is malformed (as opposed to holding bad values)."""


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


# key -> (parser, default); order is the canonical serialization order
KEYS: dict[str, tuple] = {
    "bounds.minX": (int, -32),
    "bounds.maxX": (int, 32),
    "bounds.minY": (int, -32),
    "bounds.maxY": (int, 32),
    "bounds.minZ": (int, -32),
    "bounds.maxZ": (int, 32),
    "shape.p": (int, REQUIRED),
    "shape.q": (int, REQUIRED),
    "shape.anchor.x": (int, 0),
    "shape.anchor.y": (int, 0),
    "shape.anchor.z": (int, 0),
    "numRobots": (int, REQUIRED),
    "numSeeds": (int, 1),
    "faultProbability": (float, 0.0),
    "rngSeed": (int, REQUIRED),
    "maxTicks": (int, REQUIRED),
    "restartAfterFault": (_parse_bool, False),
    "sealGuard": (_parse_bool, True),
}


def parse_config_text(text: str, source: str = "<config>") -> dict[str, str]:
    pairs: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key or not value:
            raise ConfigParseError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        if key in pairs:
            raise ConfigParseError(f"{source}:{lineno}: duplicate key {key!r}", key)
        pairs[key] = value
    return pairs


def parse_overrides(items: Iterable[str]) -> dict[str, str]:
    out = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ConfigParseError(f"override must look like key=value, got {item!r}")
        out[key.strip()] = value.strip()
    return out


def config_from_flat(flat: Mapping[str, object]) -> SimConfig:
    """Validate a flat mapping (strings or typed values) into a :class:`SimConfig`."""
    unknown = sorted(set(flat) - set(KEYS))
    if unknown:
        raise ConfigError(f"{unknown[0]}: unknown configuration key", unknown[0])
    values = {}
    for key, (parser, default) in KEYS.items():
        if key not in flat:
            if default is REQUIRED:
                raise ConfigError(f"{key}: required key is missing", key)
            values[key] = default
            continue
        raw = flat[key]
        if isinstance(raw, str):
            try:
                raw = parser(raw)
            except ValueError:
                raise ConfigError(f"{key}: cannot parse {flat[key]!r}", key) from None
        values[key] = raw

    try:
        bounds = WorldBounds(*(values[f"bounds.{m}{a}"] for a in "XYZ" for m in ("min", "max")))
    except (ConstructionError, TypeError) as exc:
        raise ConfigError(f"bounds: {exc}", "bounds") from None
    anchor = Location(values["shape.anchor.x"], values["shape.anchor.y"], values["shape.anchor.z"])
    if anchor.z != 0:
        raise ConfigError("shape.anchor.z: shapes live in the z = 0 plane", "shape.anchor.z")
    return SimConfig(
        p=values["shape.p"],
        q=values["shape.q"],
        num_robots=values["numRobots"],
        rng_seed=values["rngSeed"],
        max_ticks=values["maxTicks"],
        bounds=bounds,
        anchor=anchor,
        num_seeds=values["numSeeds"],
        fault_probability=values["faultProbability"],
        restart_after_fault=values["restartAfterFault"],
        seal_guard=values["sealGuard"],
    )


def config_to_flat(config: SimConfig) -> dict[str, object]:
    b = config.bounds
    return {
        "bounds.minX": b.min_x,
        "bounds.maxX": b.max_x,
        "bounds.minY": b.min_y,
        "bounds.maxY": b.max_y,
        "bounds.minZ": b.min_z,
        "bounds.maxZ": b.max_z,
        "shape.p": config.p,
        "shape.q": config.q,
        "shape.anchor.x": config.anchor.x,
        "shape.anchor.y": config.anchor.y,
        "shape.anchor.z": config.anchor.z,
        "numRobots": config.num_robots,
        "numSeeds": config.num_seeds,
        "faultProbability": float(config.fault_probability),
        "rngSeed": config.rng_seed,
        "maxTicks": config.max_ticks,
        "restartAfterFault": config.restart_after_fault,
        "sealGuard": config.seal_guard,
    }


def load_config(path, overrides: Iterable[str] | Mapping[str, str] = ()) -> SimConfig:
    """Read, merge overrides into, and validate a config file.

    ``OSError`` from reading the file propagates unchanged.
    """
    path = Path(path)
    flat = parse_config_text(path.read_text(), str(path))
    if not isinstance(overrides, Mapping):
        overrides = parse_overrides(overrides)
    flat.update(overrides)
    return config_from_flat(flat)
