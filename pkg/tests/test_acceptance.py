"""Project exit criteria, one test each, at their stated limits.

Run alone with ``pytest tests/test_acceptance.py``; a PASS/FAIL line per
criterion is printed in the terminal summary.
"""

import random
from dataclasses import replace

import pytest

from conftest import GRID2, GRID3
from zswarm.cli import main
from zswarm.core import (
    LEGAL_ROBOT_PAIRS,
    MUTATIONS,
    Report,
    RobotOp,
    RobotRecord,
    RobotState,
    ShapeRecord,
    ShapeState,
    apply_robot_op,
    fault_occur,
    join_shape,
    robot_joins,
    shape_init,
    start_move,
    swarm_join_check,
)
from zswarm.sim import SimConfig, TerminationKind, advance, init_sim, run
from zswarm.verify import check_invariants, enumerate_fsm, step_problems, verify_sim_branching
from zswarm.world import Location, WorldBounds, make_shape_spec

pytestmark = pytest.mark.acceptance

S, U, L = RobotState.STATIONARY, RobotState.UNLOCALIZE, RobotState.LOCALIZE
E, P, C = ShapeState.EMPTY, ShapeState.PARTIAL, ShapeState.COMPLETE

# Golden value: terminating tick of the seed-42 formation run.
FORMATION_FINAL_TICK = 50600

ROBOT_MATRIX = {
    # success rows
    (start_move, S): (U, Report.SUCCESS),
    (fault_occur, U): (S, Report.SUCCESS),
    (join_shape, U): (L, Report.SUCCESS),
    # error columns
    (start_move, U): (U, Report.ALREADY_MOVING),
    (fault_occur, S): (S, Report.ALREADY_FAULTED),
    (join_shape, L): (L, Report.ALREADY_JOINED),
    # cells the tables leave open
    (start_move, L): (L, Report.ALREADY_JOINED),
    (fault_occur, L): (L, Report.ALREADY_JOINED),
    (join_shape, S): (S, Report.ALREADY_FAULTED),
}


def shape_cases():
    spec = make_shape_spec(4, 3)

    def occ(n):
        return {c: (i if i < n else None) for i, c in enumerate(spec.cells)}

    def rec(state, members):
        return ShapeRecord(spec, state, frozenset(members))

    return [
        ("join empty", lambda: robot_joins(shape_init(spec), 3), (P, {3}, Report.SUCCESS)),
        ("join partial new", lambda: robot_joins(rec(P, {3}), 5), (P, {3, 5}, Report.SUCCESS)),
        ("join partial duplicate", lambda: robot_joins(rec(P, {3}), 3), (P, {3}, Report.ALREADY_JOINED)),
        ("join complete", lambda: robot_joins(rec(C, range(12)), 9), (C, set(range(12)), Report.SHAPE_COMPLETED)),
        ("join partial no slot", lambda: robot_joins(rec(P, range(12)), 40),
         (P, set(range(12)), Report.SHAPE_COMPLETED)),
        ("check full", lambda: swarm_join_check(rec(P, range(12)), occ(12)), (C, set(range(12)), Report.SUCCESS)),
        ("check 11 of 12", lambda: swarm_join_check(rec(P, range(11)), occ(11)), (P, set(range(11)), Report.SUCCESS)),
        ("check complete", lambda: swarm_join_check(rec(C, range(12)), occ(0)),
         (C, set(range(12)), Report.SHAPE_COMPLETED)),
        ("check empty", lambda: swarm_join_check(shape_init(spec), occ(0)), (E, set(), Report.SUCCESS)),
    ]


def test_1_schema_conformance(criterion):
    with criterion(1, "schema conformance table (9 robot + 9 shape cases)", 1.0):
        assert len(ROBOT_MATRIX) == 9
        for (op, before), expected in ROBOT_MATRIX.items():
            out, report = op(RobotRecord(0, before, Location(0, 0, 0)))
            assert (out.state, report) == expected, (op.__name__, before)
        for name, call, (state, members, report) in shape_cases():
            out, rep = call()
            assert (out.state, set(out.members), rep) == (state, members, report), name


def test_2_fsm_exhaustiveness(criterion):
    with criterion(2, "FSM N=1..3 depth 12 clean; 4 mutations detected", 10.0):
        for n in (1, 2, 3):
            relation = enumerate_fsm(n, 12)
            assert not relation.truncated
            assert check_invariants(relation) == []
        assert len(MUTATIONS) == 4
        for name, table in MUTATIONS.items():
            for n in (1, 2, 3):
                assert len(check_invariants(enumerate_fsm(n, 12, table=table))) >= 1, (name, n)


def test_3_spatial_exhaustiveness(criterion):
    with criterion(3, "spatial branching 3x3 / 2 robots / 1x2 shape", 60.0):
        config = SimConfig(p=1, q=2, num_robots=2, num_seeds=1, rng_seed=0, max_ticks=1, bounds=GRID3)
        clean = verify_sim_branching(config)
        assert clean.violations == []
        assert not clean.truncated
        assert set(clean.leaves) == {TerminationKind.COMPLETE_ALL_LOCALIZED}

        faulty = verify_sim_branching(replace(config, fault_probability=0.5, restart_after_fault=False))
        assert faulty.violations == []
        assert not faulty.truncated
        assert faulty.leaves[TerminationKind.STALLED_INCOMPLETE] >= 1


def test_4_complete_with_movers(criterion):
    with criterion(4, "2 robots, 1 seed, 1x1 shape -> CompleteWithMovers at tick 0", 1.0):
        summary = run(SimConfig(p=1, q=1, num_robots=2, num_seeds=1, rng_seed=0, max_ticks=10))
        assert summary.termination is TerminationKind.COMPLETE_WITH_MOVERS
        assert summary.final_tick == 0


def test_5_end_to_end_formation(criterion):
    with criterion(5, f"12 robots, 4x3, seed 42 -> CompleteAllLocalized at tick {FORMATION_FINAL_TICK}", 5.0):
        config = SimConfig(p=4, q=3, num_robots=12, rng_seed=42, max_ticks=100_000, fault_probability=0.0)
        summary = run(config)
        assert summary.termination is TerminationKind.COMPLETE_ALL_LOCALIZED
        assert summary.final_tick == FORMATION_FINAL_TICK
        final = summary.final_state
        cells = set(final.occupancy)
        assert cells == set(config.shape_spec.cells)
        assert len(cells) == config.p * config.q == 12


def test_6_determinism(criterion, tmp_path):
    with criterion(6, "two cmd_run traces byte-identical; replay exits 0", 5.0):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            "bounds.minX = -8\nbounds.maxX = 8\nbounds.minY = -8\nbounds.maxY = 8\n"
            "shape.p = 3\nshape.q = 2\nnumRobots = 8\nrngSeed = 1234\nmaxTicks = 100000\n"
            "faultProbability = 0.0005\nrestartAfterFault = true\n"
        )
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        assert main(["run", str(cfg), "--trace-out", str(a)]) == 0
        assert main(["run", str(cfg), "--trace-out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
        assert len(a.read_bytes().splitlines()) > 100
        assert main(["replay", str(a)]) == 0


def test_7_invariant_suite(criterion):
    with criterion(7, "10,000 random sequences each: robot, shape and engine invariants", 30.0):
        rng = random.Random(20261016)
        ops = list(RobotOp)

        for _ in range(10_000):
            r = RobotRecord(0, rng.choice(list(RobotState)), Location(0, 0, 0))
            for _ in range(rng.randint(1, 20)):
                op = rng.choice(ops)
                out, report = apply_robot_op(r, op)
                assert (r.state, out.state) in LEGAL_ROBOT_PAIRS
                if r.state is L:
                    assert out.state is L
                if report is not Report.SUCCESS:
                    assert out == r
                r = out

        spec = make_shape_spec(3, 2)
        for _ in range(10_000):
            s = shape_init(spec)
            for _ in range(rng.randint(1, 15)):
                if rng.random() < 0.3:
                    members = sorted(s.members)
                    occ = {c: (members[i] if i < len(members) else None) for i, c in enumerate(spec.cells)}
                    out, report = swarm_join_check(s, occ)
                else:
                    out, report = robot_joins(s, rng.randrange(8))
                assert out.state >= s.state
                assert (out.state is E) == (not out.members)
                if report is not Report.SUCCESS:
                    assert out == s
                s = out

        for _ in range(10_000):
            width = rng.randint(2, 5)
            robots = rng.randint(1, min(6, width * width))
            config = SimConfig(
                p=rng.randint(1, 2), q=rng.randint(1, 2), num_robots=robots, num_seeds=1,
                rng_seed=rng.getrandbits(64), max_ticks=1000,
                fault_probability=rng.choice([0.0, 0.05, 0.3]), restart_after_fault=rng.random() < 0.5,
                bounds=WorldBounds(0, width - 1, 0, width - 1, 0, 0),
            )
            state = init_sim(config)
            for _ in range(rng.randint(1, 12)):
                if state.terminated is not None:
                    break
                before = state.copy()
                events = advance(state)
                assert step_problems(before, state, events) == []
