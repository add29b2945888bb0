"""Constructive semi-synchronous replay: turn a class order into a normal-form
schedule, move every robot straight to its recorded destination, and compare
the result with the source trace.

The candidate search enumerates exactly the schedules induced by topological
orders of the class graph; a verdict of none-among-candidates on a violating
trace is the finite-run reflection of the probabilistic nonexistence claims,
not a proof.
"""
from __future__ import annotations

from dataclasses import dataclass

from .checker import (
    CycleId,
    ConcurrencyAnalysis,
    _Budget,
    _find_class_cycle,
    _iter_topological_orders,
    analyze,
)
from .engine import Adversary, Decision, Scenario, Simulation, Trace, RIGID
from .errors import InputError, SimulationError
from .geometry import Point, Route
from .scheduling import Cycle, Schedule

SIMILARITY_EPS = 1e-9


@dataclass
class SsyncPlan:
    """One normal-form round per class; each activated robot moves from its
    recorded Look position to its recorded destination."""
    order: list[list[CycleId]]
    schedule: Schedule
    targets: dict[tuple[int, int], Point]  # (robot, replay cycle index) -> goal

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "order": [[list(c) for c in cls] for cls in self.order],
            "schedule": self.schedule.to_json(),
            "targets": [
                {"robot": i, "j": j, "target": [p.x, p.y]}
                for (i, j), p in sorted(self.targets.items())
            ],
        }


def build_plan(trace: Trace, order: list[list[CycleId]], force: bool = False) -> SsyncPlan:
    """Schedule class k's members at round k.  Callers are expected to have
    verified the five conditions; `force` skips only the coverage refusal so
    negative controls can be replayed."""
    ids = set(trace.cycle_ids())
    listed = [c for cls in order for c in cls]
    if set(listed) != ids or len(listed) != len(ids):
        if not force or not set(listed) <= ids:
            raise InputError("class order does not cover the trace's cycles exactly")
    robots: list[list[Cycle]] = [[] for _ in range(trace.n)]
    targets: dict[tuple[int, int], Point] = {}
    for k, cls in enumerate(order):
        for (i, j) in sorted(cls):
            jnew = len(robots[i]) + 1
            robots[i].append(Cycle(i, jnew, float(k), k + 0.25, k + 0.75))
            targets[(i, jnew)] = trace.record(i, j).pos_after_move
    schedule = Schedule(n=trace.n, horizon=float(len(order)), robots=robots)
    return SsyncPlan(order, schedule, targets)


class _PlanController:
    """Replays recorded destinations exactly, bypassing the local frame."""

    def __init__(self, plan: SsyncPlan, scenario: Scenario):
        self.plan = plan
        self.positions = list(scenario.initial_positions)

    def decide(self, robot, j, snapshot, snapshot_colors, own_color) -> Decision:
        here = self.positions[robot]
        target = self.plan.targets[(robot, j)]
        if target == here:
            route = Route.stay_put(here)
        else:
            route = Route((here, target))
        self.positions[robot] = target
        return Decision(route_local=Route.stay_put(), route_global=route)


def replay_plan(scenario: Scenario, plan: SsyncPlan) -> Trace:
    """Rigid deterministic replay of the plan's schedule."""
    sim = Simulation(scenario, plan.schedule, _PlanController(plan, scenario),
                     Adversary(seed=0, mode=RIGID))
    trace = sim.run()
    trace.kind = "replay"
    return trace


@dataclass
class SimilarityResult:
    ok: bool
    witness: dict | None = None

    def __bool__(self) -> bool:
        return self.ok

    def to_json(self) -> dict:
        return {"similar": self.ok, "witness": self.witness}


def _points_close(a: Point, b: Point, eps: float) -> bool:
    return abs(a.x - b.x) <= eps and abs(a.y - b.y) <= eps


def similar(source: Trace, replayed: Trace, eps: float = SIMILARITY_EPS) -> SimilarityResult:
    """Cycle-for-cycle equality of Look positions and local snapshots.

    This per-index equality implies equality of the footprint and snapshot
    sets and is what the replay construction guarantees."""
    if source.n != replayed.n:
        raise InputError("traces cover different robot counts")
    for i in range(source.n):
        if len(source.records[i]) != len(replayed.records[i]):
            return SimilarityResult(False, {
                "robot": i, "reason": "cycle count",
                "source": len(source.records[i]), "replay": len(replayed.records[i])})
        for j, (ra, rb) in enumerate(zip(source.records[i], replayed.records[i]), start=1):
            if not _points_close(ra.pos_at_look, rb.pos_at_look, eps):
                return SimilarityResult(False, {
                    "robot": i, "j": j, "reason": "footprint",
                    "source": ra.pos_at_look.as_pair(),
                    "replay": rb.pos_at_look.as_pair()})
            pa = sorted(ra.snapshot_local, key=lambda p: (p.x, p.y))
            pb = sorted(rb.snapshot_local, key=lambda p: (p.x, p.y))
            if len(pa) != len(pb) or not all(
                    _points_close(x, y, eps) for x, y in zip(pa, pb)):
                return SimilarityResult(False, {
                    "robot": i, "j": j, "reason": "snapshot",
                    "source": [p.as_pair() for p in pa],
                    "replay": [p.as_pair() for p in pb]})
    return SimilarityResult(True)


SIMILAR_FOUND = "similar-ssync-found"
NONE_AMONG_CANDIDATES = "none-among-candidates"
INCONCLUSIVE = "inconclusive"


@dataclass
class CandidateSearchResult:
    verdict: str
    orders_tried: int
    plan: SsyncPlan | None = None
    replay: Trace | None = None

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "orders_tried": self.orders_tried}


def candidate_search(trace: Trace, analysis: ConcurrencyAnalysis | None = None,
                     order_budget: int = 512,
                     node_budget: int = 10 ** 6) -> CandidateSearchResult:
    """Try every schedule induced by a topological order of the class graph.

    A cyclic class graph admits no candidate at all.  The search replays each
    candidate and keeps the first similar one; running out of budget before
    exhausting the orders is inconclusive, not a negative."""
    analysis = analysis or analyze(trace)
    if analysis.self_loops or _find_class_cycle(
            analysis.num_classes, analysis.successors(True)) is not None:
        return CandidateSearchResult(NONE_AMONG_CANDIDATES, 0)
    tried = 0
    try:
        for order in _iter_topological_orders(
                analysis.num_classes, analysis.successors(True), node_budget):
            if tried >= order_budget:
                return CandidateSearchResult(INCONCLUSIVE, tried)
            tried += 1
            classes = [analysis.classes[k] for k in order]
            try:
                plan = build_plan(trace, classes, force=True)
                replayed = replay_plan(trace.scenario, plan)
            except (InputError, SimulationError):
                continue  # candidate is not realizable; it cannot be similar
            if similar(trace, replayed):
                return CandidateSearchResult(SIMILAR_FOUND, tried, plan, replayed)
    except _Budget:
        return CandidateSearchResult(INCONCLUSIVE, tried)
    return CandidateSearchResult(NONE_AMONG_CANDIDATES, tried)
