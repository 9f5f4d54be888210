"""Bounded lattice world: coordinates, target-shape geometry, adjacency, seeds.

Shapes and motion live in the ``z = 0`` plane; ``z`` is kept on every
coordinate so the three-axis bounds still apply.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ConstructionError

_AXES = ("x", "y", "z")


@dataclass(frozen=True)
class WorldBounds:
    min_x: int = -32
    max_x: int = 32
    min_y: int = -32
    max_y: int = 32
    min_z: int = -32
    max_z: int = 32

    def __post_init__(self):
        for axis in _AXES:
            lo, hi = self.axis(axis)
            if lo > hi:
                raise ConstructionError(f"bounds: min_{axis}={lo} exceeds max_{axis}={hi}")

    def axis(self, name: str) -> tuple[int, int]:
        return getattr(self, f"min_{name}"), getattr(self, f"max_{name}")

    def width(self, name: str) -> int:
        """Number of lattice points along one axis."""
        lo, hi = self.axis(name)
        return hi - lo + 1

    def contains(self, x: int, y: int, z: int) -> bool:
        return (
            self.min_x <= x <= self.max_x
            and self.min_y <= y <= self.max_y
            and self.min_z <= z <= self.max_z
        )

    def plane_cells(self, z: int = 0) -> list[Location]:
        """All cells of one z-plane in ascending (x, y) order."""
        return [
            Location(x, y, z)
            for x in range(self.min_x, self.max_x + 1)
            for y in range(self.min_y, self.max_y + 1)
        ]


DEFAULT_BOUNDS = WorldBounds()


@dataclass(frozen=True, order=True)
class Location:
    """Integer lattice coordinate.

    Instances carry no bounds of their own; build them through
    :func:`make_location` whenever the coordinate comes from outside.
    """

    x: int
    y: int
    z: int = 0

    def __iter__(self):
        yield self.x
        yield self.y
        yield self.z

    def __repr__(self):
        return f"Location({self.x}, {self.y}, {self.z})"


def make_location(x: int, y: int, z: int, bounds: WorldBounds = DEFAULT_BOUNDS) -> Location:
    for axis, value in zip(_AXES, (x, y, z)):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConstructionError(f"{axis} coordinate must be an integer, got {value!r}")
        lo, hi = bounds.axis(axis)
        if not lo <= value <= hi:
            raise ConstructionError(f"{axis} coordinate {value} outside [{lo}, {hi}]")
    return Location(x, y, z)


def check_location(loc: Location, bounds: WorldBounds = DEFAULT_BOUNDS) -> Location:
    """Re-validate an existing location against ``bounds``."""
    return make_location(loc.x, loc.y, loc.z, bounds)


@dataclass(frozen=True)
class ShapeSpec:
    """Target region of ``p * q`` cells.

    ``cells`` is kept in ascending (x, y) order so iteration is deterministic.
    """

    p: int
    q: int
    cells: tuple[Location, ...]
    cell_set: frozenset[Location] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "cell_set", frozenset(self.cells))
        if len(self.cell_set) != len(self.cells):
            raise ConstructionError("shape cells must be distinct")
        if self.dimension < 1:
            raise ConstructionError(f"shape dimension must be positive, got p*q={self.dimension}")
        if len(self.cells) != self.dimension:
            raise ConstructionError(
                f"shape has {len(self.cells)} cells but dimension p*q={self.dimension}"
            )

    @property
    def dimension(self) -> int:
        return self.p * self.q

    def __contains__(self, loc) -> bool:
        return loc in self.cell_set


def make_shape_spec(
    p: int, q: int, anchor: Location = Location(0, 0, 0), bounds: WorldBounds = DEFAULT_BOUNDS
) -> ShapeSpec:
    """Axis-aligned ``p x q`` rectangle whose minimum corner is ``anchor``.

    The rectangle always sits in the ``z = 0`` plane.
    """
    for name, extent in (("p", p), ("q", q)):
        if isinstance(extent, bool) or not isinstance(extent, int):
            raise ConstructionError(f"{name} must be an integer, got {extent!r}")
        if extent < 1:
            raise ConstructionError(f"{name} must be at least 1, got {extent}")
    if p > bounds.width("x"):
        raise ConstructionError(f"p={p} exceeds x-axis capacity {bounds.width('x')}")
    if q > bounds.width("y"):
        raise ConstructionError(f"q={q} exceeds y-axis capacity {bounds.width('y')}")
    # both corners in bounds => every cell in bounds
    make_location(anchor.x, anchor.y, 0, bounds)
    try:
        make_location(anchor.x + p - 1, anchor.y + q - 1, 0, bounds)
    except ConstructionError as exc:
        raise ConstructionError(f"{p}x{q} shape at {anchor} does not fit: {exc}") from None
    cells = tuple(
        Location(anchor.x + i, anchor.y + j, 0) for i in range(p) for j in range(q)
    )
    return ShapeSpec(p, q, cells)


_STEPS = ((1, 0), (-1, 0), (0, 1), (0, -1))


def neighbors(loc: Location, bounds: WorldBounds = DEFAULT_BOUNDS) -> frozenset[Location]:
    """In-bounds 4-neighbourhood of ``loc`` within its own z-plane."""
    return frozenset(neighbor_list(loc, bounds))


def neighbor_list(loc: Location, bounds: WorldBounds = DEFAULT_BOUNDS) -> list[Location]:
    # Sorted so that random choices index a stable sequence.
    out = [
        Location(loc.x + dx, loc.y + dy, loc.z)
        for dx, dy in _STEPS
        if bounds.contains(loc.x + dx, loc.y + dy, loc.z)
    ]
    out.sort()
    return out


def seed_cells(spec: ShapeSpec, k: int) -> list[Location]:
    """The ``k`` target cells nearest the origin.

    Ties on distance are broken by ascending x, then y.
    """
    if not 1 <= k <= spec.dimension:
        raise ConstructionError(f"seed count k={k} outside [1, {spec.dimension}]")
    ranked = sorted(spec.cells, key=lambda c: (c.x * c.x + c.y * c.y + c.z * c.z, c.x, c.y, c.z))
    return ranked[:k]
