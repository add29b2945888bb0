import itertools

import pytest

from robosync.algorithms import HALT, AlgorithmSpec, as_controller
from robosync.engine import Adversary, FrameSpec, NONRIGID, RIGID, Scenario, simulate
from robosync.errors import InputError
from robosync.geometry import Point
from robosync.scheduling import Cycle, Schedule, make_fsync_schedule
from robosync.scenarios import greedy_trap_scenario
from robosync.synchronizer import (
    ACCEPT,
    FsmVerdict,
    REJECT,
    SyncColor,
    check_color_lifecycle,
    check_neighbor_phase_lag,
    extract_core,
    greedy_step,
    run_synchronized,
    svp_step,
)

BK, R, B, G, W = SyncColor.BK, SyncColor.R, SyncColor.B, SyncColor.G, SyncColor.W


def test_svp_rows():
    assert svp_step(BK, {BK, B}) == FsmVerdict(R, ACCEPT)
    assert svp_step(BK, {R, W}) == FsmVerdict(W, REJECT)
    assert svp_step(BK, set()) == FsmVerdict(R, ACCEPT)
    assert svp_step(R, {BK, B}) == FsmVerdict(R, REJECT)  # no row matches: hold state
    assert svp_step(R, {R, B, W}) == FsmVerdict(B, REJECT)
    assert svp_step(B, {B, G}) == FsmVerdict(G, REJECT)
    assert svp_step(G, {BK, G}) == FsmVerdict(BK, REJECT)
    assert svp_step(W, {B, W}) == FsmVerdict(BK, REJECT)
    assert svp_step(W, set()) == FsmVerdict(BK, REJECT)


def test_svp_accept_only_from_black():
    for state in SyncColor:
        for size in range(6):
            for combo in itertools.combinations(list(SyncColor), size):
                verdict = svp_step(state, frozenset(combo))
                if verdict.output == ACCEPT:
                    assert state is BK and verdict.next is R


def test_greedy_rule():
    assert greedy_step(BK, {BK}) == FsmVerdict(R, ACCEPT)
    assert greedy_step(BK, {R}).output == REJECT
    assert greedy_step(BK, set()) == FsmVerdict(R, ACCEPT)
    assert greedy_step(R, {BK}).output == REJECT
    assert greedy_step(R, set()) == FsmVerdict(BK, REJECT)  # revert after the move


def test_single_robot_color_wheel():
    scenario = Scenario([Point(0, 0)], [FrameSpec()], 0.1)
    trace = run_synchronized(scenario, AlgorithmSpec(HALT),
                             make_fsync_schedule(9, 1), Adversary(0, RIGID), "svp")
    colors = [r.color_after for r in trace.records[0]]
    assert colors == ["R", "B", "G", "Bk", "R", "B", "G", "Bk", "R"]
    accepted = [r.cycle.j for r in trace.records[0] if r.accepted]
    assert accepted == [1, 5, 9]
    schedule, core = extract_core(trace)
    assert [c.j for c in schedule.robots[0]] == [1, 2, 3]
    assert [r.cycle.o for r in core.records[0]] == [0.0, 4.0, 8.0]
    assert not check_color_lifecycle(trace)


def test_blocked_robot_accepts_nothing():
    # robot 0 turns red and never recomputes; robot 1 keeps seeing red
    scenario = Scenario([Point(0, 0), Point(0.5, 0)], [FrameSpec()] * 2, 0.1)
    schedule = Schedule(n=2, horizon=20.0, robots=[
        [Cycle(0, 1, 0.0, 10.0, 10.5)],
        [Cycle(1, 1, 11.0, 11.25, 11.5), Cycle(1, 2, 13.0, 13.25, 13.5)],
    ])
    trace = run_synchronized(scenario, AlgorithmSpec(HALT), schedule,
                             Adversary(0, RIGID), "svp")
    assert trace.record(0, 1).accepted is True
    assert [r.accepted for r in trace.records[1]] == [False, False]
    _, core = extract_core(trace)
    assert core.records[1] == []
    assert core.footprint(1) == []
    assert core.rest_positions(1) == [Point(0.5, 0)]


def test_new_color_visible_from_move_start():
    scenario = Scenario([Point(0, 0), Point(0.5, 0)], [FrameSpec()] * 2, 0.1)
    schedule = Schedule(n=2, horizon=10.0, robots=[
        [Cycle(0, 1, 0.0, 2.0, 2.5)],
        [Cycle(1, 1, 1.0, 1.25, 1.5), Cycle(1, 2, 2.0, 6.0, 6.5)],
    ])
    trace = run_synchronized(scenario, AlgorithmSpec(HALT), schedule,
                             Adversary(0, RIGID), "svp")
    # at t=1 robot 0 is still black (its move starts at 2); robot 1 accepts
    first = trace.record(1, 1)
    assert first.snapshot_colors == ("Bk", "Bk")
    assert first.accepted is True
    # at t=2 robot 0's red becomes visible exactly at its move start
    second = trace.record(1, 2)
    assert second.snapshot_colors == ("R", "R")
    assert second.accepted is False


def test_greedy_trap_acceptances():
    scenario, schedule, spec = greedy_trap_scenario()
    trace = run_synchronized(scenario, spec, schedule, Adversary(0, RIGID), "greedy")
    assert [trace.record(i, 1).accepted for i in range(4)] == [True] * 4
    # the climber leaves the last robot's range before t=3, so that robot
    # sees an all-black neighbourhood too
    assert trace.record(4, 1).visible_set == {4}


def test_movement_happens_only_in_accepted_cycles():
    from robosync.scenarios import random_vicinity_scenario
    from robosync.scheduling import sample_async_schedule

    scenario, spec = random_vicinity_scenario(6)
    schedule = sample_async_schedule(6, scenario.n, 60.0)
    trace = run_synchronized(scenario, spec, schedule, Adversary(6, "nonrigid"), "svp")
    moved = [rec for row in trace.records for rec in row
             if rec.pos_after_move != rec.pos_at_look]
    assert moved
    assert all(rec.accepted for rec in moved)


def test_extract_core_requires_luminous_trace():
    scenario = Scenario([Point(0, 0)], [FrameSpec()], 0.1)
    plain = simulate(scenario, make_fsync_schedule(1, 1),
                     as_controller(AlgorithmSpec(HALT)), Adversary(0, NONRIGID))
    with pytest.raises(InputError):
        extract_core(plain)


def test_phase_lag_holds_on_clustered_run():
    from robosync.scenarios import random_vicinity_scenario
    from robosync.scheduling import sample_async_schedule

    scenario, spec = random_vicinity_scenario(3)
    schedule = sample_async_schedule(3, scenario.n, 80.0)
    trace = run_synchronized(scenario, spec, schedule, Adversary(3, NONRIGID), "svp")
    assert not check_neighbor_phase_lag(trace)
    assert not check_color_lifecycle(trace)
