"""Snapshot-to-route decision rules and the scenario/run validators that
keep the test algorithms inside the regime where they preserve visibility.

A rule is a pure function of the local snapshot: identical snapshots must
yield identical routes (the robots are anonymous and share the rule).
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .engine import Scenario, Trace
from .errors import InputError
from .geometry import (
    Point,
    Route,
    hull_distance,
    is_visible,
    squared_distance,
)

POINT_MATCH_EPS = 1e-9

HALT = "halt"
HULL_CONTRACTION = "hull_contraction"
SCRIPTED = "scripted"


@dataclass(frozen=True)
class ScriptEntry:
    """Exact-snapshot trigger: when the local snapshot matches `snapshot`
    (unordered, within POINT_MATCH_EPS per point), follow `route`."""
    snapshot: tuple[Point, ...]
    route: tuple[Point, ...]


@dataclass(frozen=True)
class AlgorithmSpec:
    kind: str
    contraction: float = 0.5
    script: tuple[ScriptEntry, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if self.kind not in (HALT, HULL_CONTRACTION, SCRIPTED):
            raise InputError(f"unknown algorithm kind {self.kind!r}")
        if self.kind == HULL_CONTRACTION and not 0.0 < self.contraction < 1.0:
            raise InputError("contraction factor must lie strictly in (0, 1)")

    def to_json(self) -> dict:
        if self.kind == HULL_CONTRACTION:
            return {"kind": self.kind, "lambda": self.contraction}
        if self.kind == SCRIPTED:
            return {"kind": self.kind, "script": [
                {"snapshot": [[p.x, p.y] for p in e.snapshot],
                 "route": [[p.x, p.y] for p in e.route]}
                for e in self.script]}
        return {"kind": self.kind}

    @classmethod
    def from_json(cls, data: dict) -> "AlgorithmSpec":
        kind = data.get("kind")
        if kind == HULL_CONTRACTION:
            return cls(kind, contraction=float(data["lambda"]))
        if kind == SCRIPTED:
            entries = tuple(
                ScriptEntry(
                    snapshot=tuple(Point(float(x), float(y)) for x, y in e["snapshot"]),
                    route=tuple(Point(float(x), float(y)) for x, y in e["route"]),
                )
                for e in data.get("script", []))
            return cls(kind, script=entries)
        if kind == HALT:
            return cls(kind)
        raise InputError(f"unknown algorithm kind {kind!r}")


def _points_match(a: tuple[Point, ...], b: tuple[Point, ...]) -> bool:
    if len(a) != len(b):
        return False
    sa = sorted(a, key=lambda p: (p.x, p.y))
    sb = sorted(b, key=lambda p: (p.x, p.y))
    return all(abs(p.x - q.x) <= POINT_MATCH_EPS and abs(p.y - q.y) <= POINT_MATCH_EPS
               for p, q in zip(sa, sb))


def compute(spec: AlgorithmSpec, snapshot: tuple[Point, ...]) -> Route:
    """Route for one Compute, in the local frame, starting at (0, 0)."""
    if Point(0.0, 0.0) not in snapshot:
        raise InputError("snapshot must contain the observer's origin")
    if spec.kind == HALT:
        return Route.stay_put()
    if spec.kind == HULL_CONTRACTION:
        pts = sorted(snapshot, key=lambda p: (p.x, p.y))
        cx = sum(p.x for p in pts) / len(pts)
        cy = sum(p.y for p in pts) / len(pts)
        target = Point(spec.contraction * cx, spec.contraction * cy)
        if target == Point(0.0, 0.0):
            return Route.stay_put()
        return Route((Point(0.0, 0.0), target))
    for entry in spec.script:
        if _points_match(entry.snapshot, snapshot):
            return Route(entry.route)
    return Route.stay_put()


def as_controller(spec: AlgorithmSpec):
    from .engine import AlgorithmController
    return AlgorithmController(lambda snapshot: compute(spec, snapshot))


@dataclass
class Verdict:
    ok: bool
    reasons: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def visibility_components(positions: list[Point]) -> list[list[int]]:
    """Connected components of the visibility graph, by index."""
    n = len(positions)
    seen = [False] * n
    comps = []
    for start in range(n):
        if seen[start]:
            continue
        stack, comp = [start], []
        seen[start] = True
        while stack:
            a = stack.pop()
            comp.append(a)
            for b in range(n):
                if not seen[b] and is_visible(positions[a], positions[b]):
                    seen[b] = True
                    stack.append(b)
        comps.append(sorted(comp))
    return comps


def validate_vicinity_scenario(scenario: Scenario, spec: AlgorithmSpec | None = None) -> Verdict:
    """A configuration is safe for hull contraction when its visibility graph
    is a disjoint union of cliques of diameter at most 1 whose convex hulls
    are separated by more than the visibility range.

    Under these conditions hulls only shrink, so every robot keeps exactly its
    initial neighbours at all pairs of times.
    """
    if spec is not None and spec.kind not in (HALT, HULL_CONTRACTION):
        raise InputError("vicinity validation applies to halt or hull contraction")
    positions = scenario.initial_positions
    reasons = []
    comps = visibility_components(positions)
    for comp in comps:
        for ai in range(len(comp)):
            for bi in range(ai + 1, len(comp)):
                a, b = comp[ai], comp[bi]
                if squared_distance(positions[a], positions[b]) > 1.0:
                    reasons.append(
                        f"component {comp} is not a clique: robots {a},{b} exceed range")
    for ci in range(len(comps)):
        for cj in range(ci + 1, len(comps)):
            gap = hull_distance([positions[i] for i in comps[ci]],
                                [positions[i] for i in comps[cj]])
            if gap <= 1.0 + POINT_MATCH_EPS:
                reasons.append(
                    f"components {comps[ci]} and {comps[cj]} have hull gap {gap} <= 1")
    return Verdict(not reasons, reasons)


def _initial_edge(scenario: Scenario, a: int, b: int) -> bool:
    return is_visible(scenario.initial_positions[a], scenario.initial_positions[b])


def is_visibility_preserving_run(trace: Trace) -> Verdict:
    """Checks that at every recorded event time, each co-resting pair is
    visible exactly when it was visible initially."""
    reasons = []
    n = trace.n
    for t in trace.event_times():
        at_rest = [trace.rest_position_at(i, t) for i in range(n)]
        for a in range(n):
            if at_rest[a] is None:
                continue
            for b in range(a + 1, n):
                if at_rest[b] is None:
                    continue
                now = is_visible(at_rest[a], at_rest[b])
                if now != _initial_edge(trace.scenario, a, b):
                    reasons.append(
                        f"edge {a}-{b} changed at t={t}: visible={now}")
                    if len(reasons) >= 5:
                        return Verdict(False, reasons)
    return Verdict(not reasons, reasons)


def is_vicinity_preserving_run(trace: Trace) -> Verdict:
    """Stronger cross-time check: every rest position of one robot against
    every rest position of another must match the initial visibility edge."""
    reasons = []
    n = trace.n
    rests = [trace.rest_positions(i) for i in range(n)]
    for a in range(n):
        for b in range(a + 1, n):
            expected = _initial_edge(trace.scenario, a, b)
            for pa in rests[a]:
                for pb in rests[b]:
                    if is_visible(pa, pb) != expected:
                        reasons.append(
                            f"pair {a}-{b}: positions {pa} / {pb} break the initial edge")
                        break
                else:
                    continue
                break
    return Verdict(not reasons, reasons)
