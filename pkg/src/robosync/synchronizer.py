"""The luminous layer: the five-color cycle filter for vicinity-preserving
rules, its greedy cousin, the wrapper that runs either one inside the engine,
and extraction of the accepted-cycle core from a luminous trace.

A machine step consumes the robot's own color plus the set of colors it sees
and returns the next color and an accept/reject verdict.  A rejected cycle
stays put; an accepted cycle runs the wrapped rule on the positions-only
snapshot.  The new color becomes visible at the move start.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .algorithms import AlgorithmSpec, compute
from .engine import Adversary, Decision, Scenario, Simulation, Trace
from .errors import InputError
from .geometry import Point, Route
from .scheduling import Cycle, Schedule


class SyncColor(str, Enum):
    BK = "Bk"
    R = "R"
    B = "B"
    G = "G"
    W = "W"


ACCEPT = "accept"
REJECT = "reject"

SVP = "svp"
GREEDY = "greedy"
MACHINES = (SVP, GREEDY)


@dataclass(frozen=True)
class FsmVerdict:
    next: SyncColor
    output: str


def _colors(values) -> frozenset[SyncColor]:
    return frozenset(SyncColor(v) for v in values)


def svp_step(state: SyncColor, visible: frozenset[SyncColor] | set[SyncColor]) -> FsmVerdict:
    """One transition of the five-color machine.

    Rows, in guard order (an input matching no row holds the state and
    rejects):
      Bk + all-of(Bk,B,W)            -> R  accept
      Bk + some R, all-of(Bk,R,B,W)  -> W  reject
      R  + all-of(R,B,W)             -> B  reject
      B  + all-of(B,G)               -> G  reject
      G  + all-of(Bk,G)              -> Bk reject
      W  + all-of(B,W)               -> Bk reject
    """
    x = frozenset(visible)
    bk, r, b, g, w = SyncColor.BK, SyncColor.R, SyncColor.B, SyncColor.G, SyncColor.W
    if state is bk:
        if x <= {bk, b, w}:
            return FsmVerdict(r, ACCEPT)
        if r in x and x <= {bk, r, b, w}:
            return FsmVerdict(w, REJECT)
    elif state is r and x <= {r, b, w}:
        return FsmVerdict(b, REJECT)
    elif state is b and x <= {b, g}:
        return FsmVerdict(g, REJECT)
    elif state is g and x <= {bk, g}:
        return FsmVerdict(bk, REJECT)
    elif state is w and x <= {b, w}:
        return FsmVerdict(bk, REJECT)
    return FsmVerdict(state, REJECT)


def greedy_step(state: SyncColor, visible: frozenset[SyncColor] | set[SyncColor]) -> FsmVerdict:
    """Accept exactly when everything in sight (self included) is black.

    On acceptance the light turns red for the move; any other Compute turns
    it back to black, the minimal lifecycle that makes the mover's red flag
    visible to anyone who still sees it.
    """
    x = frozenset(visible)
    if state is SyncColor.BK and x <= {SyncColor.BK}:
        return FsmVerdict(SyncColor.R, ACCEPT)
    return FsmVerdict(SyncColor.BK, REJECT)


_STEPS = {SVP: svp_step, GREEDY: greedy_step}


class SynchronizerController:
    """Engine controller: machine verdict first, wrapped rule only on accept."""

    def __init__(self, machine: str, spec: AlgorithmSpec):
        if machine not in _STEPS:
            raise InputError(f"unknown machine {machine!r}")
        self.step = _STEPS[machine]
        self.spec = spec

    def decide(self, robot: int, j: int, snapshot: tuple[Point, ...],
               snapshot_colors: tuple[str, ...] | None, own_color: str | None) -> Decision:
        others = _colors(snapshot_colors[1:]) if snapshot_colors else frozenset()
        verdict = self.step(SyncColor(own_color), others)
        if verdict.output == ACCEPT:
            route = compute(self.spec, snapshot)
        else:
            route = Route.stay_put()
        return Decision(route_local=route,
                        accepted=verdict.output == ACCEPT,
                        color_after=verdict.next.value)


def run_synchronized(scenario: Scenario, spec: AlgorithmSpec, schedule: Schedule,
                     adversary: Adversary, machine: str = SVP) -> Trace:
    """Luminous run: all lights start black, colors recorded per cycle."""
    controller = SynchronizerController(machine, spec)
    sim = Simulation(scenario, schedule, controller, adversary,
                     initial_color=SyncColor.BK.value)
    trace = sim.run()
    trace.machine = machine
    return trace


def extract_core(trace: Trace) -> tuple[Schedule, Trace]:
    """Keep only accepted cycles, re-indexed per robot, and drop the colors.

    Rejected cycles leave no record; their stay-put routes are asserted so the
    footprints of the core agree with the luminous run.
    """
    if trace.kind != "luminous":
        raise InputError("core extraction needs a luminous trace")
    core_records = []
    accepted_rows = []
    for row in trace.records:
        kept = []
        accepted = []
        for rec in row:
            if rec.accepted:
                accepted.append(rec)
            elif rec.pos_after_move != rec.pos_at_look:
                raise InputError(
                    f"rejected cycle {rec.cycle.ident} moved; trace is not a "
                    "synchronizer run")
        core_row = []
        cycles = []
        for k, rec in enumerate(accepted):
            cycle = Cycle(rec.cycle.robot, k + 1, rec.cycle.o, rec.cycle.s, rec.cycle.f)
            cycles.append(cycle)
            core_row.append(type(rec)(
                cycle=cycle,
                pos_at_look=rec.pos_at_look,
                visible_set=rec.visible_set,
                snapshot_local=rec.snapshot_local,
                route_global=rec.route_global,
                z=rec.z,
                pos_after_move=rec.pos_after_move,
                mid_move_samples=rec.mid_move_samples,
            ))
        core_records.append(core_row)
        accepted_rows.append(cycles)
    schedule = Schedule(n=trace.n, horizon=trace.horizon, robots=accepted_rows)
    core = Trace(trace.scenario, trace.horizon, core_records, kind="core")
    return schedule, core


# -- trace-level color invariants -------------------------------------------

_ALLOWED_NEXT = {
    SyncColor.BK: {SyncColor.R, SyncColor.W},
    SyncColor.W: {SyncColor.BK},
    SyncColor.R: {SyncColor.B},
    SyncColor.B: {SyncColor.G},
    SyncColor.G: {SyncColor.BK},
}

_VIRTUAL = {SyncColor.BK: "Y", SyncColor.R: "Y", SyncColor.W: "Y",
            SyncColor.B: "B", SyncColor.G: "G"}


def color_change_sequence(trace: Trace, robot: int) -> list[tuple[float, SyncColor]]:
    """(effective time, new color) for every actual color change."""
    out = []
    current = SyncColor.BK
    for rec in trace.records[robot]:
        after = SyncColor(rec.color_after)
        if after is not current:
            out.append((rec.cycle.s, after))
            current = after
    return out


def check_color_lifecycle(trace: Trace) -> list[str]:
    """Every color change must follow Bk->{R,W}, W->Bk, R->B, B->G, G->Bk,
    and a change to R must coincide with acceptance."""
    problems = []
    for i in range(trace.n):
        current = SyncColor.BK
        for rec in trace.records[i]:
            after = SyncColor(rec.color_after)
            if after is not current and after not in _ALLOWED_NEXT[current]:
                problems.append(f"robot {i} cycle {rec.cycle.j}: {current.value}->{after.value}")
            went_red = current is SyncColor.BK and after is SyncColor.R
            if bool(rec.accepted) != went_red:
                problems.append(
                    f"robot {i} cycle {rec.cycle.j}: accepted={rec.accepted} "
                    f"but transition {current.value}->{after.value}")
            current = after
    return problems


def virtual_phase_at(trace: Trace, robot: int, t: float) -> int:
    """Number of virtual-state changes (Y->B->G->Y...) completed by time t."""
    phase = 0
    virt = "Y"
    for eff, color in color_change_sequence(trace, robot):
        if eff > t:
            break
        v = _VIRTUAL[color]
        if v != virt:
            phase += 1
            virt = v
    return phase


def check_neighbor_phase_lag(trace: Trace) -> list[str]:
    """At each Look, every initial-visibility neighbour's virtual phase must
    be within one of the observer's."""
    problems = []
    initial = trace.scenario.initial_positions
    from .geometry import is_visible
    for i in range(trace.n):
        neighbors = [k for k in range(trace.n)
                     if k != i and is_visible(initial[i], initial[k])]
        for rec in trace.records[i]:
            mine = virtual_phase_at(trace, i, rec.cycle.o)
            for k in neighbors:
                theirs = virtual_phase_at(trace, k, rec.cycle.o)
                if abs(mine - theirs) > 1:
                    problems.append(
                        f"robot {i} at t={rec.cycle.o}: phase {mine} vs neighbour {k} phase {theirs}")
    return problems
