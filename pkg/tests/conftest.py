"""Shared helpers: a direct trace builder for checker-level tests and the
brute-force closure oracle used against the union-find partition."""
from __future__ import annotations

from robosync.engine import CycleRecord, FrameSpec, Scenario, Trace
from robosync.geometry import Point, Route
from robosync.scheduling import Cycle


def build_trace(positions: list[tuple[float, float]],
                rows: list[list[dict]], delta: float = 0.25,
                horizon: float | None = None) -> Trace:
    """Construct a trace from explicit per-cycle records.

    Each entry: {"t": (o, s, f), "sees": {...robot ids...}, "pos": (x, y),
    "after": (x, y)}; "pos" defaults to the robot's previous resting point and
    "after" defaults to "pos" (a stay-put cycle).  Snapshots are synthesized
    from the stated positions so checker-level relations see exactly the
    given visibility data.
    """
    pts = [Point(x, y) for x, y in positions]
    scenario = Scenario(pts, [FrameSpec()] * len(pts), delta)
    records: list[list[CycleRecord]] = []
    top = 0.0
    for i, row in enumerate(rows):
        out = []
        current = pts[i]
        for j, entry in enumerate(row, start=1):
            o, s, f = entry["t"]
            top = max(top, f)
            pos = Point(*entry["pos"]) if "pos" in entry else current
            after = Point(*entry["after"]) if "after" in entry else pos
            sees = frozenset(entry.get("sees", set())) | {i}
            snapshot = tuple(sorted(
                (Point(0.0, 0.0),) + tuple(Point(k * 1.0, 0.0) for k in sees if k != i),
                key=lambda p: (p.x, p.y)))
            route = Route.stay_put(pos) if after == pos else Route((pos, after))
            out.append(CycleRecord(
                cycle=Cycle(i, j, o, s, f),
                pos_at_look=pos,
                visible_set=sees,
                snapshot_local=snapshot,
                route_global=route,
                z=1.0,
                pos_after_move=after,
            ))
            current = after
        records.append(out)
    return Trace(scenario, horizon if horizon is not None else top, records, kind="core")


def closure_partition(trace: Trace) -> list[list[tuple[int, int]]]:
    """Independent oracle: Warshall-style transitive closure of the pairwise
    concurrency matrix, returned in the checker's canonical class order."""
    from robosync.checker import cycles_concurrent

    ids = trace.cycle_ids()
    m = len(ids)
    reach = [[cycles_concurrent(trace, ids[a], ids[b]) for b in range(m)]
             for a in range(m)]
    for k in range(m):
        for a in range(m):
            if reach[a][k]:
                row_k = reach[k]
                row_a = reach[a]
                for b in range(m):
                    if row_k[b]:
                        row_a[b] = True
    seen = set()
    classes = []
    for a in range(m):
        if a in seen:
            continue
        group = [b for b in range(m) if reach[a][b] or a == b]
        seen.update(group)
        classes.append(sorted(ids[b] for b in group))

    def key(cls):
        return min((trace.record(*c).cycle.o, c[0], c[1]) for c in cls)

    return sorted(classes, key=key)
