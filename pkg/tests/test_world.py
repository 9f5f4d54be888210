import itertools

import pytest
from hypothesis import given, strategies as st

from zswarm.errors import ConstructionError
from zswarm.world import (
    DEFAULT_BOUNDS,
    Location,
    WorldBounds,
    make_location,
    make_shape_spec,
    neighbors,
    seed_cells,
)


class TestLocation:
    def test_origin(self):
        assert make_location(0, 0, 0) == Location(0, 0, 0)

    def test_corners_are_inclusive(self):
        assert make_location(32, -32, 32) == Location(32, -32, 32)
        assert make_location(-32, -32, -32) == Location(-32, -32, -32)

    @pytest.mark.parametrize("xyz, axis", [((-33, 0, 0), "x"), ((0, 33, 0), "y"), ((0, 0, -33), "z")])
    def test_out_of_bounds_names_axis(self, xyz, axis):
        with pytest.raises(ConstructionError, match=f"^{axis} coordinate"):
            make_location(*xyz)

    def test_rejects_non_integers(self):
        with pytest.raises(ConstructionError):
            make_location(0.5, 0, 0)

    @given(st.integers(-100, 100), st.integers(-100, 100), st.integers(-100, 100))
    def test_accepted_iff_in_bounds(self, x, y, z):
        inside = all(-32 <= v <= 32 for v in (x, y, z))
        try:
            make_location(x, y, z)
        except ConstructionError:
            assert not inside
        else:
            assert inside


def test_bounds_reject_inverted_axis():
    with pytest.raises(ConstructionError):
        WorldBounds(min_x=1, max_x=0)


class TestShapeSpec:
    def test_rectangle_cells(self):
        spec = make_shape_spec(4, 3, Location(0, 0, 0))
        assert spec.dimension == 12
        assert len(spec.cells) == 12
        assert set(spec.cells) == {Location(i, j, 0) for i in range(4) for j in range(3)}

    def test_minimal(self):
        spec = make_shape_spec(1, 1, Location(5, 5, 0))
        assert spec.cells == (Location(5, 5, 0),)
        assert spec.dimension == 1

    def test_axis_capacity(self):
        # 65 lattice points from -32 to 32 inclusive, counted directly
        capacity = len(range(DEFAULT_BOUNDS.min_x, DEFAULT_BOUNDS.max_x + 1))
        assert capacity == 65
        assert make_shape_spec(65, 1, Location(-32, 0, 0)).dimension == 65
        with pytest.raises(ConstructionError):
            make_shape_spec(66, 1, Location(-32, 0, 0))

    @pytest.mark.parametrize("p, q", [(0, 5), (5, 0), (-1, 2)])
    def test_degenerate_rejected(self, p, q):
        with pytest.raises(ConstructionError):
            make_shape_spec(p, q)

    def test_overhanging_rectangle_rejected(self):
        with pytest.raises(ConstructionError, match="does not fit"):
            make_shape_spec(4, 4, Location(30, 0, 0))

    @given(st.integers(1, 12), st.integers(1, 12), st.integers(-32, 20), st.integers(-32, 20))
    def test_cell_count_is_product(self, p, q, ax, ay):
        spec = make_shape_spec(p, q, Location(ax, ay, 0))
        assert len(spec.cell_set) == p * q == spec.dimension
        assert all(c.z == 0 for c in spec.cells)


class TestNeighbors:
    def test_interior(self):
        assert neighbors(Location(0, 0, 0)) == {
            Location(1, 0, 0), Location(-1, 0, 0), Location(0, 1, 0), Location(0, -1, 0)}

    def test_corner(self):
        assert neighbors(Location(32, 32, 0)) == {Location(31, 32, 0), Location(32, 31, 0)}

    def test_edge(self):
        assert len(neighbors(Location(32, 0, 0))) == 3

    def test_symmetric_on_small_world(self):
        bounds = WorldBounds(0, 3, 0, 2, 0, 0)
        cells = bounds.plane_cells()
        for a, b in itertools.product(cells, cells):
            assert (b in neighbors(a, bounds)) == (a in neighbors(b, bounds))


class TestSeedCells:
    def test_single_seed_is_origin(self):
        assert seed_cells(make_shape_spec(4, 3), 1) == [Location(0, 0, 0)]

    def test_three_seeds_match_hand_enumeration(self):
        # enumerate the 12 cells independently and sort by (distance^2, x, y)
        cells = [(x, y) for x in range(4) for y in range(3)]
        cells.sort(key=lambda c: (c[0] ** 2 + c[1] ** 2, c[0], c[1]))
        expected = [Location(x, y, 0) for x, y in cells[:3]]
        assert expected == [Location(0, 0, 0), Location(0, 1, 0), Location(1, 0, 0)]
        assert seed_cells(make_shape_spec(4, 3), 3) == expected

    def test_single_cell_shape(self):
        spec = make_shape_spec(1, 1, Location(-7, 3, 0))
        assert seed_cells(spec, 1) == [Location(-7, 3, 0)]

    @pytest.mark.parametrize("k", [0, 13])
    def test_k_out_of_range(self, k):
        with pytest.raises(ConstructionError):
            seed_cells(make_shape_spec(4, 3), k)

    @given(st.integers(1, 6), st.integers(1, 6), st.integers(-10, 10), st.integers(-10, 10))
    def test_prefix_stable(self, p, q, ax, ay):
        spec = make_shape_spec(p, q, Location(ax, ay, 0))
        full = seed_cells(spec, spec.dimension)
        for k in range(1, spec.dimension + 1):
            assert seed_cells(spec, k) == full[:k]
