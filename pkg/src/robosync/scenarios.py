"""Built-in configurations: the five-robot greedy trap, hand-built condition
violation templates for the necessity experiments, and samplers for random
clique-cluster scenarios.

Every builder is deterministic; randomized ones take an explicit seed.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .algorithms import HALT, HULL_CONTRACTION, SCRIPTED, AlgorithmSpec, ScriptEntry
from .engine import NONRIGID, RIGID, FrameSpec, Scenario
from .errors import InputError
from .geometry import Point
from .scheduling import Cycle, Schedule

_IDENTITY = FrameSpec(0.0, 1.0)


def _identity_frames(n: int) -> list[FrameSpec]:
    return [_IDENTITY] * n


def _schedule(n: int, horizon: float, cycles: dict[int, list[tuple[float, float, float]]]) -> Schedule:
    robots = [
        [Cycle(i, j + 1, o, s, f) for j, (o, s, f) in enumerate(cycles.get(i, []))]
        for i in range(n)
    ]
    return Schedule(n=n, horizon=horizon, robots=robots)


# -- five-robot greedy trap ---------------------------------------------------

def greedy_trap_scenario() -> tuple[Scenario, Schedule, AlgorithmSpec]:
    """Five robots on a unit L-shape with staggered activations.

    The shared rule moves a robot one three-quarter step up exactly when its
    view is the corner view {origin, up, right}; the first robot matches it,
    leaves the range of the fourth before that robot ever looks, and the
    accepted cycles end up mutually concurrent but observationally asymmetric.
    """
    positions = [Point(0, 0), Point(0, 1), Point(1, 1), Point(1, 0), Point(2, 0)]
    scenario = Scenario(positions, _identity_frames(5), delta=0.25)
    schedule = _schedule(5, 4.0, {
        0: [(0.0, 0.75, 1.0)],
        1: [(0.5, 1.25, 1.5)],
        2: [(1.0, 1.75, 2.0)],
        3: [(1.5, 2.25, 2.5)],
        4: [(3.0, 3.75, 4.0)],
    })
    corner_view = (Point(0, 0), Point(0, 1), Point(1, 0))
    spec = AlgorithmSpec(SCRIPTED, script=(
        ScriptEntry(snapshot=corner_view, route=(Point(0, 0), Point(0, 0.75))),
    ))
    return scenario, schedule, spec


def staggered_round_schedule(n: int, prefix_rounds: int) -> Schedule:
    """`prefix_rounds` fully synchronous rounds, then one staggered round with
    the greedy-trap cycle timing shifted to start at the prefix end."""
    if n != 5:
        raise InputError("the staggered round is built for five robots")
    base = float(prefix_rounds)
    cycles: dict[int, list[tuple[float, float, float]]] = {
        i: [(float(j), j + 0.25, j + 0.75) for j in range(prefix_rounds)]
        for i in range(n)
    }
    stagger = [(0.0, 0.75, 1.0), (0.5, 1.25, 1.5), (1.0, 1.75, 2.0),
               (1.5, 2.25, 2.5), (3.0, 3.75, 4.0)]
    for i, (o, s, f) in enumerate(stagger):
        cycles[i].append((base + o, base + s, base + f))
    return _schedule(n, base + 4.0, cycles)


# -- necessity templates -------------------------------------------------------

@dataclass
class TemplateRun:
    """One necessity-experiment instance: what to simulate and which condition
    the construction is aimed at (None for the clean control arm)."""
    scenario: Scenario
    schedule: Schedule
    algorithm: AlgorithmSpec
    adversary_mode: str
    target: str | None


def _template_control(seed: int) -> TemplateRun:
    # Two distant robots with disjoint cycles; nothing can go wrong.
    scenario = Scenario([Point(0, 0), Point(3, 0)], _identity_frames(2), delta=0.25)
    schedule = _schedule(2, 6.0, {
        0: [(0.0, 0.5, 1.0), (2.0, 2.5, 3.0)],
        1: [(1.25, 1.5, 1.75), (4.0, 4.5, 5.0)],
    })
    return TemplateRun(scenario, schedule, AlgorithmSpec(HALT), RIGID, None)


def _template_stationarity(seed: int) -> TemplateRun:
    # The mover climbs past the observer's range; the observer looks strictly
    # inside the move, so the violation appears whenever the sampled point is
    # still within range.
    scenario = Scenario([Point(0, 0), Point(0.5, 0)], _identity_frames(2), delta=0.25)
    spec = AlgorithmSpec(SCRIPTED, script=(
        ScriptEntry(snapshot=(Point(-0.5, 0), Point(0, 0)),
                    route=(Point(0, 0), Point(0, 1.5))),
    ))
    schedule = _schedule(2, 3.0, {
        0: [(1.0, 2.0, 2.25)],
        1: [(0.0, 0.25, 1.75)],
    })
    return TemplateRun(scenario, schedule, spec, NONRIGID, "stationary")


def _template_pairwise(seed: int) -> TemplateRun:
    # A long pending cycle of robot 0 overlaps both cycles of robot 1; the
    # second overlap is not concurrent whenever robot 1's truncated retreat
    # leaves it still within range.
    scenario = Scenario([Point(0, 0), Point(0.6, 0)], _identity_frames(2), delta=0.25)
    spec = AlgorithmSpec(SCRIPTED, script=(
        # robot 0's initial view: partner 0.6 to the right -> step up
        ScriptEntry(snapshot=(Point(0, 0), Point(0.6, 0)),
                    route=(Point(0, 0), Point(0, 0.75))),
        # robot 1's initial view: partner 0.6 to the left -> retreat right
        ScriptEntry(snapshot=(Point(-0.6, 0), Point(0, 0)),
                    route=(Point(0, 0), Point(0.5, 0))),
    ))
    schedule = _schedule(2, 3.0, {
        0: [(0.0, 2.5, 2.75)],
        1: [(0.125, 0.5, 0.875), (1.125, 2.0, 2.25)],
    })
    return TemplateRun(scenario, schedule, spec, NONRIGID, "pairwise_aligned")


def _template_consistency(seed: int) -> TemplateRun:
    # Non-rigid version of the greedy trap without lights: the first robot's
    # climb always leaves the fourth robot's range, so the concurrency chain
    # carries an asymmetric observation.
    scenario, schedule, spec = greedy_trap_scenario()
    return TemplateRun(scenario, schedule, spec, NONRIGID, "consistent")


def _template_serializability(seed: int) -> TemplateRun:
    # All robots halt; the timing alone yields two concurrency classes that
    # precede each other, so the class graph has a two-cycle.
    positions = [Point(0, 0), Point(0, 1), Point(0.8, 1.4), Point(1.6, 0.85),
                 Point(2, 0), Point(1, 0)]
    scenario = Scenario(positions, _identity_frames(6), delta=0.25)
    schedule = _schedule(6, 43.0, {
        0: [(0.0, 5.0, 5.5), (40.0, 42.0, 42.5)],
        1: [(4.0, 30.0, 30.5)],
        2: [(28.0, 33.0, 33.5)],
        3: [(29.0, 35.0, 35.5)],
        4: [(29.5, 36.0, 36.5)],
        5: [(6.0, 28.0, 28.5), (40.5, 41.0, 41.5)],
    })
    return TemplateRun(scenario, schedule, AlgorithmSpec(HALT), NONRIGID, "serializable")


NECESSITY_TEMPLATES = {
    "control": _template_control,
    "stationarity": _template_stationarity,
    "pairwise-alignment": _template_pairwise,
    "consistency": _template_consistency,
    "serializability": _template_serializability,
}

# maps a template's target to the report field it must fail
TEMPLATE_TARGET_FIELD = {
    "stationary": "stationary",
    "pairwise_aligned": "aligned",
    "consistent": "consistent",
    "serializable": "serializable",
}


def necessity_template(name: str, seed: int) -> TemplateRun:
    try:
        builder = NECESSITY_TEMPLATES[name]
    except KeyError:
        raise InputError(
            f"unknown template {name!r}; choose from {sorted(NECESSITY_TEMPLATES)}")
    return builder(seed)


# -- random clique-cluster scenarios ------------------------------------------

def random_vicinity_scenario(seed: int, n_min: int = 3, n_max: int = 8
                             ) -> tuple[Scenario, AlgorithmSpec]:
    """Random clusters whose visibility graphs are cliques of diameter < 1,
    separated well beyond the range.  Hull contraction on such a scenario
    keeps every robot inside its cluster's initial hull, so all pairwise
    distances stay far from the visibility threshold."""
    rng = random.Random(f"scn:{seed}")
    n = rng.randint(n_min, n_max)
    clusters = 1 if n < 4 or rng.random() < 0.6 else 2
    counts = [n] if clusters == 1 else [n // 2, n - n // 2]
    positions: list[Point] = []
    for m, count in enumerate(counts):
        cx = 4.0 * m + rng.uniform(0, 0.5)
        cy = rng.uniform(0, 0.5)
        placed: list[Point] = []
        while len(placed) < count:
            r = rng.uniform(0, 0.45)
            theta = rng.uniform(0, 2 * math.pi)
            p = Point(cx + r * math.cos(theta), cy + r * math.sin(theta))
            if all((p.x - q.x) ** 2 + (p.y - q.y) ** 2 > 1e-4 for q in placed):
                placed.append(p)
        positions.extend(placed)
    frames = [FrameSpec(rng.uniform(0, 6.28), rng.uniform(0.5, 2.0)) for _ in range(n)]
    scenario = Scenario(positions, frames, delta=0.05)
    spec = AlgorithmSpec(HULL_CONTRACTION, contraction=rng.uniform(0.3, 0.7))
    return scenario, spec


def random_small_inputs(seed: int, max_robots: int = 6
                        ) -> tuple[Scenario, AlgorithmSpec]:
    """Unconstrained small scenario for the relation property suite; positions
    are kept off the visibility threshold so the run cannot degenerate."""
    rng = random.Random(f"small:{seed}")
    n = rng.randint(2, max_robots)
    positions: list[Point] = []
    while len(positions) < n:
        p = Point(rng.uniform(0, 2.5), rng.uniform(0, 2.5))
        sqs = [(p.x - q.x) ** 2 + (p.y - q.y) ** 2 for q in positions]
        if all(sq > 0.0025 and abs(sq - 1.0) > 1e-6 for sq in sqs):
            positions.append(p)
    frames = [FrameSpec(rng.uniform(0, 6.28), rng.uniform(0.5, 2.0)) for _ in range(n)]
    scenario = Scenario(positions, frames, delta=0.1)
    spec = (AlgorithmSpec(HALT) if rng.random() < 0.5
            else AlgorithmSpec(HULL_CONTRACTION, contraction=0.5))
    return scenario, spec


# -- scenario files -------------------------------------------------------------

def bundle_to_json(scenario: Scenario, schedule: Schedule | None = None,
                   algorithm: AlgorithmSpec | None = None,
                   machine: str | None = None,
                   adversary_mode: str | None = None,
                   provenance: str | None = None) -> dict:
    out = {"schema": 1, **scenario.to_json()}
    if schedule is not None:
        out["schedule"] = schedule.to_json()
    if algorithm is not None:
        out["algorithm"] = algorithm.to_json()
    if machine is not None:
        out["machine"] = machine
    if adversary_mode is not None:
        out["adversary_mode"] = adversary_mode
    if provenance is not None:
        out["_provenance"] = provenance
    return out


def bundle_from_json(data: dict) -> dict:
    scenario = Scenario.from_json(data)
    out = {
        "scenario": scenario,
        "schedule": Schedule.from_json(data["schedule"]) if "schedule" in data else None,
        "algorithm": (AlgorithmSpec.from_json(data["algorithm"])
                      if "algorithm" in data else None),
        "machine": data.get("machine"),
        "adversary_mode": data.get("adversary_mode"),
    }
    return out


def _greedy_trap_bundle() -> dict:
    scenario, schedule, spec = greedy_trap_scenario()
    return bundle_to_json(
        scenario, schedule=schedule, algorithm=spec, machine="greedy",
        adversary_mode=RIGID,
        provenance="five robots on a unit L-shape; staggered first cycles; "
                   "the shared rule climbs 3/4 on the corner view")


def _template_bundle(name: str) -> dict:
    run = necessity_template(name, seed=0)
    return bundle_to_json(
        run.scenario, schedule=run.schedule, algorithm=run.algorithm,
        adversary_mode=run.adversary_mode,
        provenance=f"necessity template targeting {run.target or 'nothing (control)'}")


BUILTIN_BUNDLES = {
    "greedy-trap": _greedy_trap_bundle,
    **{f"necessity-{name}": (lambda n=name: _template_bundle(n))
       for name in NECESSITY_TEMPLATES},
}


def builtin_bundle(name: str) -> dict:
    try:
        return BUILTIN_BUNDLES[name]()
    except KeyError:
        raise InputError(f"unknown built-in scenario {name!r}")
