"""Trace conditions for asynchronous-to-semi-synchronous replay:
stationarity, pairwise alignment, consistency, serializability, naturality.

All checks are pure functions of a recorded trace prefix.  Clauses that
reference a cycle beyond the prefix (a robot's next move start) treat the
missing bound as +infinity; relations that hold only under that assumption
are flagged, and a serializability failure that depends on them is reported
as open-at-horizon rather than a firm violation.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .engine import Trace
from .errors import InputError
from .geometry import squared_distance

CycleId = tuple[int, int]

PASS = "pass"
FAIL = "fail"
OPEN = "open-at-horizon"

NEG_INF = -float("inf")
POS_INF = float("inf")

DEFAULT_NODE_BUDGET = 10 ** 6


# -- primitive accessors -----------------------------------------------------

def _prev_f(trace: Trace, robot: int, j: int) -> float:
    """End of the previous move; -inf for a robot's first cycle."""
    if j <= 1:
        return NEG_INF
    return trace.record(robot, j - 1).cycle.f


def _next_s(trace: Trace, robot: int, j: int) -> float:
    """Start of the next move; +inf past the end of the prefix."""
    if j < len(trace.records[robot]):
        return trace.record(robot, j + 1).cycle.s
    return POS_INF


def _sees(trace: Trace, a: CycleId, other: int) -> bool:
    return other in trace.record(*a).visible_set


# -- pairwise relations ------------------------------------------------------

def cycles_overlap(trace: Trace, a: CycleId, b: CycleId) -> bool:
    """Time intervals intersect and the earlier-Look robot is visible at the
    later Look.  Defined for distinct robots only."""
    if a[0] == b[0]:
        raise InputError("overlap is defined for cycles of distinct robots")
    ca, cb = trace.record(*a).cycle, trace.record(*b).cycle
    if max(ca.o, cb.o) > min(ca.f, cb.f):
        return False
    if ca.o < cb.o:
        return _sees(trace, b, a[0])
    if cb.o < ca.o:
        return _sees(trace, a, b[0])
    return _sees(trace, b, a[0]) or _sees(trace, a, b[0])


def cycles_concurrent(trace: Trace, a: CycleId, b: CycleId) -> bool:
    """Mutual-observation concurrency: same cycle, or each Look falls inside
    the other's pre-move window with the partner visible."""
    if a[0] == b[0]:
        return a[1] == b[1]

    def one_way(x: CycleId, y: CycleId) -> bool:
        cx = trace.record(*x).cycle
        cy = trace.record(*y).cycle
        return (_prev_f(trace, *y) < cx.o <= cy.o
                and cx.o <= cy.o <= cx.s
                and _sees(trace, x, y[0]))

    return one_way(a, b) or one_way(b, a)


def happened_before(trace: Trace, a: CycleId, b: CycleId) -> tuple[bool, bool]:
    """Immediate-precedence relation.  Returns (holds, only_at_horizon):
    the second flag marks a relation that relies on the next move start of
    the earlier robot lying beyond the prefix."""
    (i, j), (i2, j2) = a, b
    ca = trace.record(i, j).cycle
    cb = trace.record(i2, j2).cycle
    if i2 == i:
        return (j2 == j + 1, False)
    case3 = (_sees(trace, a, i2)
             and _prev_f(trace, i2, j2) < ca.o < ca.f < cb.o)
    if case3:
        return (True, False)
    if _sees(trace, b, i) and cb.o > ca.f:
        bound = _next_s(trace, i, j)
        if cb.o <= bound:
            return (True, bound == POS_INF)
    return (False, False)


# -- equivalence classes -----------------------------------------------------

class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def equivalence_classes(trace: Trace) -> list[list[CycleId]]:
    """Connected components of the concurrency relation, ordered by earliest
    Look time (robot index breaking ties)."""
    ids = trace.cycle_ids()
    uf = _UnionFind(ids)
    for x in range(len(ids)):
        for y in range(x + 1, len(ids)):
            if ids[x][0] != ids[y][0] and cycles_concurrent(trace, ids[x], ids[y]):
                uf.union(ids[x], ids[y])
    groups: dict[CycleId, list[CycleId]] = {}
    for c in ids:
        groups.setdefault(uf.find(c), []).append(c)

    def key(cls: list[CycleId]) -> tuple[float, int, int]:
        rec = min((trace.record(*c).cycle.o, c[0], c[1]) for c in cls)
        return rec

    return [sorted(g) for g in sorted(groups.values(), key=key)]


# -- condition checks --------------------------------------------------------

@dataclass
class CheckResult:
    verdict: str
    witnesses: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.verdict == PASS

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "witnesses": self.witnesses}


def check_stationary(trace: Trace) -> CheckResult:
    """No Look may land strictly inside the move window of a visible robot."""
    witnesses = []
    for rec in trace.all_records():
        i, j = rec.cycle.ident
        for i2 in sorted(rec.visible_set - {i}):
            for rec2 in trace.records[i2]:
                if rec2.cycle.s < rec.cycle.o < rec2.cycle.f:
                    witnesses.append({"observer": [i, j],
                                      "mover": list(rec2.cycle.ident)})
    return CheckResult(FAIL if witnesses else PASS, witnesses)


def check_pairwise_aligned(trace: Trace) -> CheckResult:
    """Every overlapping pair must be concurrent."""
    witnesses = []
    ids = trace.cycle_ids()
    for x in range(len(ids)):
        for y in range(x + 1, len(ids)):
            a, b = ids[x], ids[y]
            if a[0] == b[0]:
                continue
            if cycles_overlap(trace, a, b) and not cycles_concurrent(trace, a, b):
                witnesses.append({"pair": [list(a), list(b)]})
    return CheckResult(FAIL if witnesses else PASS, witnesses)


def check_consistent(trace: Trace, classes: list[list[CycleId]] | None = None) -> CheckResult:
    """Within every concurrency class: visibility is symmetric, visible pairs
    are directly concurrent, invisible pairs are separated by more than the
    visibility range at their Looks."""
    classes = classes if classes is not None else equivalence_classes(trace)
    witnesses = []
    for cls in classes:
        for x in range(len(cls)):
            for y in range(x + 1, len(cls)):
                a, b = cls[x], cls[y]
                sees_ab = _sees(trace, a, b[0])
                sees_ba = _sees(trace, b, a[0])
                if sees_ab != sees_ba:
                    witnesses.append({"pair": [list(a), list(b)], "clause": 1})
                    continue
                if sees_ab:
                    if not cycles_concurrent(trace, a, b):
                        witnesses.append({"pair": [list(a), list(b)], "clause": 2})
                else:
                    sq = squared_distance(trace.record(*a).pos_at_look,
                                          trace.record(*b).pos_at_look)
                    if sq <= 1.0:
                        witnesses.append({"pair": [list(a), list(b)], "clause": 3})
    return CheckResult(FAIL if witnesses else PASS, witnesses)


@dataclass
class ConcurrencyAnalysis:
    """Classes of the concurrency closure plus the precedence structure."""
    cycles: list[CycleId]
    classes: list[list[CycleId]]
    class_of: dict[CycleId, int]
    hb_pairs: list[tuple[CycleId, CycleId, bool]]  # (a, b, only_at_horizon)
    class_edges: dict[tuple[int, int], bool]       # edge -> firm?
    self_loops: list[int]

    @property
    def num_classes(self) -> int:
        return len(self.classes)

    def successors(self, include_horizon: bool = True) -> list[set[int]]:
        succ: list[set[int]] = [set() for _ in self.classes]
        for (k, k2), firm in self.class_edges.items():
            if firm or include_horizon:
                succ[k].add(k2)
        return succ


def analyze(trace: Trace) -> ConcurrencyAnalysis:
    ids = trace.cycle_ids()
    classes = equivalence_classes(trace)
    class_of = {c: k for k, cls in enumerate(classes) for c in cls}
    hb_pairs = []
    class_edges: dict[tuple[int, int], bool] = {}
    self_loops: list[int] = []
    for a in ids:
        for b in ids:
            if a == b:
                continue
            holds, horizon_only = happened_before(trace, a, b)
            if not holds:
                continue
            hb_pairs.append((a, b, horizon_only))
            ka, kb = class_of[a], class_of[b]
            if ka == kb:
                if ka not in self_loops:
                    self_loops.append(ka)
                continue
            prev = class_edges.get((ka, kb))
            firm = not horizon_only
            class_edges[(ka, kb)] = firm if prev is None else (prev or firm)
    return ConcurrencyAnalysis(ids, classes, class_of, hb_pairs, class_edges, self_loops)


def _find_class_cycle(num: int, succ: list[set[int]]) -> list[int] | None:
    """Any directed cycle in the class graph, as a list of class indices."""
    color = [0] * num
    stack: list[int] = []

    def dfs(u: int) -> list[int] | None:
        color[u] = 1
        stack.append(u)
        for v in sorted(succ[u]):
            if color[v] == 1:
                return stack[stack.index(v):] + [v]
            if color[v] == 0:
                found = dfs(v)
                if found:
                    return found
        stack.pop()
        color[u] = 2
        return None

    for u in range(num):
        if color[u] == 0:
            found = dfs(u)
            if found:
                return found
    return None


def check_serializable(trace: Trace, analysis: ConcurrencyAnalysis | None = None) -> CheckResult:
    """The class precedence graph must be acyclic.  A cycle that exists only
    thanks to beyond-prefix assumptions is reported open-at-horizon."""
    analysis = analysis or analyze(trace)
    if analysis.self_loops:
        k = analysis.self_loops[0]
        return CheckResult(FAIL, [{"class_cycle": [k, k]}])
    cycle_all = _find_class_cycle(analysis.num_classes, analysis.successors(True))
    if cycle_all is None:
        return CheckResult(PASS)
    cycle_firm = _find_class_cycle(analysis.num_classes, analysis.successors(False))
    if cycle_firm is not None:
        return CheckResult(FAIL, [{"class_cycle": cycle_firm}])
    return CheckResult(OPEN, [{"class_cycle": cycle_all}])


# -- naturality --------------------------------------------------------------

def _iter_topological_orders(num: int, succ: list[set[int]], node_budget: int):
    """Backtracking enumeration of topological orders (canonical index order
    first).  Yields orders; raises _Budget when the node budget runs out."""
    indeg = [0] * num
    for u in range(num):
        for v in succ[u]:
            indeg[v] += 1
    order: list[int] = []
    used = [False] * num
    budget = [node_budget]

    def rec():
        if len(order) == num:
            yield list(order)
            return
        for u in range(num):
            if used[u] or indeg[u] != 0:
                continue
            budget[0] -= 1
            if budget[0] < 0:
                raise _Budget()
            used[u] = True
            order.append(u)
            for v in succ[u]:
                indeg[v] -= 1
            yield from rec()
            for v in succ[u]:
                indeg[v] += 1
            order.pop()
            used[u] = False

    yield from rec()


class _Budget(Exception):
    pass


def _natural_violations(trace: Trace, classes: list[list[CycleId]],
                        order: list[int], first_only: bool = True) -> tuple[list, int]:
    """Violations of the two naturality clauses under a class order, plus the
    number of straddles that fall beyond the prefix and are skipped."""
    pos = {k: p for p, k in enumerate(order)}
    cycle_pos: dict[CycleId, int] = {}
    for k, cls in enumerate(classes):
        for c in cls:
            cycle_pos[c] = pos[k]
    violations = []
    skipped = 0
    for a in cycle_pos:
        k = cycle_pos[a]
        rec = trace.record(*a)
        for i2 in range(trace.n):
            if i2 == a[0]:
                continue
            jprime = None
            for j2 in range(1, len(trace.records[i2]) + 1):
                if cycle_pos[(i2, j2)] > k:
                    jprime = j2
                    break
            if jprime is None:
                skipped += 1  # next activation of i2 lies beyond the horizon
                continue
            if _sees(trace, a, i2):
                if not rec.cycle.o < trace.record(i2, jprime).cycle.o:
                    violations.append({"cycle": list(a), "other": [i2, jprime], "clause": 1})
            else:
                sq = squared_distance(rec.pos_at_look,
                                      trace.record(i2, jprime).pos_at_look)
                if sq <= 1.0:
                    violations.append({"cycle": list(a), "other": [i2, jprime], "clause": 2})
            if violations and first_only:
                return violations, skipped
    return violations, skipped


FOUND = "found"
NONE_FOUND = "none"
INCONCLUSIVE = "inconclusive"


@dataclass
class NaturalSortResult:
    status: str                      # found | none | inconclusive
    order: list[list[CycleId]] | None
    skipped_at_horizon: int = 0
    sample_violation: list | None = None


def find_natural_sort(trace: Trace, analysis: ConcurrencyAnalysis | None = None,
                      node_budget: int = DEFAULT_NODE_BUDGET) -> NaturalSortResult:
    """Search the topological orders of the class graph for one satisfying
    both naturality clauses.  Exhaustion is 'none'; hitting the node budget
    is 'inconclusive' (a satisfying order may exist beyond it)."""
    analysis = analysis or analyze(trace)
    if analysis.self_loops:
        return NaturalSortResult(NONE_FOUND, None)
    succ = analysis.successors(True)
    sample = None
    skipped = 0
    try:
        for order in _iter_topological_orders(analysis.num_classes, succ, node_budget):
            violations, skipped = _natural_violations(trace, analysis.classes, order)
            if not violations:
                return NaturalSortResult(FOUND, [analysis.classes[k] for k in order],
                                         skipped_at_horizon=skipped)
            if sample is None:
                sample = violations
    except _Budget:
        return NaturalSortResult(INCONCLUSIVE, None, sample_violation=sample)
    return NaturalSortResult(NONE_FOUND, None, sample_violation=sample)


# -- propositions and the aggregate report ------------------------------------

def proposition_same_robot(trace: Trace) -> list:
    """Two cycles of one robot are concurrent exactly when they are equal."""
    problems = []
    for row in trace.records:
        for x in range(len(row)):
            for y in range(len(row)):
                a = row[x].cycle.ident
                b = row[y].cycle.ident
                if cycles_concurrent(trace, a, b) != (a == b):
                    problems.append([list(a), list(b)])
    return problems


def proposition_same_robot_classes(analysis: ConcurrencyAnalysis) -> list:
    """No class may join two distinct cycles of one robot (closure level)."""
    problems = []
    for cls in analysis.classes:
        robots = [c[0] for c in cls]
        for robot in set(robots):
            if robots.count(robot) > 1:
                problems.append([list(c) for c in cls if c[0] == robot])
    return problems


def proposition_no_hb_within_class(analysis: ConcurrencyAnalysis) -> list:
    return [[list(a), list(b)] for a, b, _ in analysis.hb_pairs
            if analysis.class_of[a] == analysis.class_of[b]]


def proposition_one_cycle_per_robot(analysis: ConcurrencyAnalysis) -> list:
    problems = []
    for k, cls in enumerate(analysis.classes):
        robots = [c[0] for c in cls]
        if len(robots) != len(set(robots)):
            problems.append(k)
    return problems


@dataclass
class ConditionReport:
    stationary: CheckResult
    aligned: CheckResult
    consistent: CheckResult
    serializable: CheckResult
    natural: CheckResult
    analysis: ConcurrencyAnalysis
    natural_order: list[list[CycleId]] | None
    propositions: dict

    @property
    def all_pass(self) -> bool:
        return all(r.ok for r in (self.stationary, self.aligned, self.consistent,
                                  self.serializable, self.natural))

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "verdicts": {
                "stationary": self.stationary.to_json(),
                "pairwise_aligned": self.aligned.to_json(),
                "consistent": self.consistent.to_json(),
                "serializable": self.serializable.to_json(),
                "natural": self.natural.to_json(),
            },
            "all_pass": self.all_pass,
            "classes": [[list(c) for c in cls] for cls in self.analysis.classes],
            "class_edges": [
                {"from": k, "to": k2, "firm": firm}
                for (k, k2), firm in sorted(self.analysis.class_edges.items())
            ],
            "natural_order": ([[list(c) for c in cls] for cls in self.natural_order]
                              if self.natural_order else None),
            "propositions": self.propositions,
        }


def check_all(trace: Trace, node_budget: int = DEFAULT_NODE_BUDGET) -> ConditionReport:
    """Run the five checks (none short-circuits) and, when the first three
    pass, assert the structural propositions they imply."""
    analysis = analyze(trace)
    stationary = check_stationary(trace)
    aligned = check_pairwise_aligned(trace)
    consistent = check_consistent(trace, analysis.classes)
    serializable = check_serializable(trace, analysis)

    natural_order = None
    if serializable.verdict == FAIL:
        natural = CheckResult(FAIL, [{"reason": "class graph is cyclic"}])
    elif serializable.verdict == OPEN:
        # the only precedence loops rest on beyond-prefix bounds; whether any
        # order exists depends on unmaterialized cycles
        natural = CheckResult(OPEN, [{"reason": "precedence loop open at horizon"}])
    else:
        result = find_natural_sort(trace, analysis, node_budget)
        if result.status == FOUND:
            natural = CheckResult(PASS)
            natural_order = result.order
        elif result.status == INCONCLUSIVE:
            natural = CheckResult(OPEN, [{"reason": "search budget exhausted"}])
        else:
            natural = CheckResult(FAIL, result.sample_violation or [])

    propositions = {}
    if stationary.ok and aligned.ok and consistent.ok:
        propositions["same_robot_concurrency"] = proposition_same_robot(trace)
        propositions["same_robot_distinct_classes"] = \
            proposition_same_robot_classes(analysis)
        propositions["no_hb_within_class"] = proposition_no_hb_within_class(analysis)
        if serializable.ok:
            propositions["one_cycle_per_robot_per_class"] = \
                proposition_one_cycle_per_robot(analysis)

    return ConditionReport(stationary, aligned, consistent, serializable, natural,
                           analysis, natural_order, propositions)
