import pytest

from conftest import build_trace
from robosync.algorithms import HALT, AlgorithmSpec, as_controller
from robosync.checker import analyze, check_all
from robosync.engine import Adversary, FrameSpec, Scenario, simulate
from robosync.errors import InputError
from robosync.geometry import Point
from robosync.scheduling import is_ssync_normal_form, make_fsync_schedule
from robosync.scenarios import greedy_trap_scenario, necessity_template
from robosync.synchronizer import extract_core, run_synchronized
from robosync.synthesis import (
    NONE_AMONG_CANDIDATES,
    INCONCLUSIVE,
    SIMILAR_FOUND,
    SsyncPlan,
    build_plan,
    candidate_search,
    replay_plan,
    similar,
)


def svp_core(seed=0, horizon=60.0):
    from robosync.scenarios import random_vicinity_scenario
    from robosync.scheduling import sample_async_schedule

    scenario, spec = random_vicinity_scenario(seed)
    schedule = sample_async_schedule(seed, scenario.n, horizon)
    trace = run_synchronized(scenario, spec, schedule,
                             Adversary(seed, "nonrigid"), "svp")
    _, core = extract_core(trace)
    return scenario, core


def test_build_plan_single_robot():
    trace = build_trace([(0, 0)], [[
        {"t": (0.5, 0.75, 1.0), "after": (0.25, 0)},
        {"t": (2.0, 2.25, 2.5), "pos": (0.25, 0), "after": (0.5, 0)},
    ]])
    plan = build_plan(trace, [[(0, 1)], [(0, 2)]])
    assert is_ssync_normal_form(plan.schedule)
    assert [(c.o, c.s, c.f) for c in plan.schedule.robots[0]] == \
           [(0.0, 0.25, 0.75), (1.0, 1.25, 1.75)]
    assert plan.targets == {(0, 1): Point(0.25, 0), (0, 2): Point(0.5, 0)}


def test_build_plan_requires_full_coverage():
    trace = build_trace([(0, 0)], [[{"t": (0.0, 0.25, 0.5)}]])
    with pytest.raises(InputError):
        build_plan(trace, [])


def test_replay_of_halt_plan_is_constant():
    scenario = Scenario([Point(0, 0), Point(0.5, 0)], [FrameSpec()] * 2, 0.1)
    trace = simulate(scenario, make_fsync_schedule(3, 2),
                     as_controller(AlgorithmSpec(HALT)), Adversary(0, "nonrigid"))
    report = check_all(trace)
    assert report.all_pass
    plan = build_plan(trace, report.natural_order)
    replayed = replay_plan(scenario, plan)
    for i in range(2):
        assert all(r.pos_at_look == scenario.initial_positions[i]
                   for r in replayed.records[i])
    assert similar(trace, replayed)


def test_similar_trivial_and_divergent():
    _, core = svp_core(2)
    assert similar(core, core)
    # replaying stay-put targets instead of the recorded ones diverges at the
    # first cycle that actually moved
    orders = check_all(core).natural_order
    plan = build_plan(core, orders)
    frozen = SsyncPlan(plan.order, plan.schedule,
                       {k: core.scenario.initial_positions[k[0]]
                        for k in plan.targets})
    replayed = replay_plan(core.scenario, frozen)
    verdict = similar(core, replayed)
    assert not verdict.ok
    assert verdict.witness["reason"] in ("footprint", "snapshot")


def test_full_pipeline_on_svp_cores():
    for seed in (0, 3, 5):
        scenario, core = svp_core(seed)
        report = check_all(core)
        assert report.all_pass, (seed, report.to_json()["verdicts"])
        plan = build_plan(core, report.natural_order)
        replayed = replay_plan(scenario, plan)
        assert similar(core, replayed)
        # normal-form replays are stationary by construction
        from robosync.checker import check_stationary
        assert check_stationary(replayed).verdict == "pass"
        again = replay_plan(scenario, plan)
        assert again.to_json() == replayed.to_json()


def test_forced_replay_of_inconsistent_core_diverges():
    scenario, schedule, spec = greedy_trap_scenario()
    trace = run_synchronized(scenario, spec, schedule, Adversary(0, "rigid"), "greedy")
    _, core = extract_core(trace)
    analysis = analyze(core)
    plan = build_plan(core, analysis.classes, force=True)
    replayed = replay_plan(scenario, plan)
    verdict = similar(core, replayed)
    assert not verdict.ok
    # the divergence is the fourth robot seeing the unmoved climber
    assert verdict.witness["robot"] == 3 and verdict.witness["reason"] == "snapshot"


def test_candidate_search_outcomes():
    _, core = svp_core(4)
    assert candidate_search(core).verdict == SIMILAR_FOUND

    scenario, schedule, spec = greedy_trap_scenario()
    trap = run_synchronized(scenario, spec, schedule, Adversary(0, "rigid"), "greedy")
    _, trap_core = extract_core(trap)
    assert candidate_search(trap_core).verdict == NONE_AMONG_CANDIDATES

    run = necessity_template("serializability", 0)
    trace = simulate(run.scenario, run.schedule, as_controller(run.algorithm),
                     Adversary(0, run.adversary_mode))
    assert candidate_search(trace).verdict == NONE_AMONG_CANDIDATES

    assert candidate_search(core, order_budget=0).verdict == INCONCLUSIVE


def test_candidate_search_empty_trace():
    empty = build_trace([(0, 0)], [[]])
    assert candidate_search(empty).verdict == SIMILAR_FOUND
