"""Independent brute-force ground truth: exact rich flow numbers, nowhere-zero
flow existence over the supported groups, and exact chromatic index.

The rich-flow search assigns integer edge values directly with vertex
conservation propagated as soon as only one incident edge is undecided, so it
shares no code path with the constructive synthesis it is used to check.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from . import cotree
from .errors import BudgetExhaustedError, InternalDefectError, PreconditionError
from .flowalg import Flow, GroupTag, is_rich, verify_flow
from .multigraph import Multigraph, is_rich_flow_admissible


@dataclass(frozen=True)
class SearchBudget:
    k_max: int = 16
    node_limit: int = 5_000_000
    time_limit: float = 60.0

    def __post_init__(self) -> None:
        if self.k_max < 2 or self.node_limit <= 0 or self.time_limit <= 0:
            raise PreconditionError("budget fields must be positive (k_max >= 2)")


@dataclass(frozen=True)
class ExactResult:
    value: int | None
    status: str  # "exact" | "exhausted_budget"
    witness: object | None


class _Budget:
    __slots__ = ("nodes", "node_limit", "deadline")

    def __init__(self, budget: SearchBudget) -> None:
        self.nodes = 0
        self.node_limit = budget.node_limit
        self.deadline = time.monotonic() + budget.time_limit

    def tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.node_limit:
            raise BudgetExhaustedError("node limit reached")
        if self.nodes % 1024 == 0 and time.monotonic() > self.deadline:
            raise BudgetExhaustedError("time limit reached")


def _value_order(k: int) -> list[int]:
    out = []
    for a in range(1, k):
        out.extend((a, -a))
    return out


def _rich_flow_search(g: Multigraph, k: int, budget: _Budget) -> list[int] | None:
    """Backtracking over integer edge values in +-{1..k-1} with conservation
    propagation and adjacent-absolute pruning. None means proven infeasible."""
    m = g.edge_count
    n = g.vertex_count
    if m == 0:
        return []
    degsum = [g.degree(e.tail) + g.degree(e.head) for e in g.edges]
    order = sorted(range(m), key=lambda e: (-degsum[e], e))
    adjacent: list[list[int]] = [[] for _ in range(m)]
    for v in range(n):
        inc = g.incident(v)
        for i, e in enumerate(inc):
            for f in inc[i + 1 :]:
                adjacent[e].append(f)
                adjacent[f].append(e)
    vals: list[int | None] = [None] * m
    acc = [0] * n  # signed sum of decided incident values (tail positive)
    undecided = [g.degree(v) for v in range(n)]
    domain = _value_order(k)

    def sign_at(eid: int, v: int) -> int:
        return 1 if g.edge(eid).tail == v else -1

    def place(eid: int, value: int, trail: list[int]) -> bool:
        budget.tick()
        if value == 0 or abs(value) >= k:
            return False
        for f in adjacent[eid]:
            fv = vals[f]
            if fv is not None and abs(fv) == abs(value):
                return False
        vals[eid] = value
        trail.append(eid)
        edge = g.edge(eid)
        for v in edge.ends:
            acc[v] += sign_at(eid, v) * value
            undecided[v] -= 1
        for v in edge.ends:
            if undecided[v] == 0 and acc[v] != 0:
                return False
        for v in edge.ends:
            if undecided[v] == 1:
                forced = next(f for f in g.incident(v) if vals[f] is None)
                need = -acc[v] * sign_at(forced, v)
                if not place(forced, need, trail):
                    return False
        return True

    def undo(trail: list[int], depth: int) -> None:
        while len(trail) > depth:
            eid = trail.pop()
            value = vals[eid]
            vals[eid] = None
            for v in g.edge(eid).ends:
                acc[v] -= sign_at(eid, v) * value
                undecided[v] += 1

    def solve(pos: int) -> bool:
        while pos < m and vals[order[pos]] is not None:
            pos += 1
        if pos == m:
            return True
        eid = order[pos]
        trail: list[int] = []
        for value in domain:
            if place(eid, value, trail):
                if solve(pos + 1):
                    return True
            undo(trail, 0)
        return False

    if solve(0):
        return [v for v in vals]
    return None


def exact_rich_flow_number(g: Multigraph, budget: SearchBudget | None = None) -> ExactResult:
    """Least k admitting a rich k-flow, with a verified witness.

    Inadmissible graphs get an exact empty result (the two admissibility
    obstructions are the only ones); infeasibility of a particular k is
    proved by exhaustion, never assumed.
    """
    budget = budget or SearchBudget()
    if not is_rich_flow_admissible(g).admissible:
        return ExactResult(None, "exact", None)
    state = _Budget(budget)
    for k in range(2, budget.k_max + 1):
        try:
            vals = _rich_flow_search(g, k, state)
        except BudgetExhaustedError:
            return ExactResult(None, "exhausted_budget", None)
        if vals is not None:
            flow = Flow(g, GroupTag.integers(k), tuple(vals))
            if not is_rich(g, flow):
                raise InternalDefectError("search produced a non-rich witness")
            return ExactResult(k, "exact", flow)
    return ExactResult(None, "exhausted_budget", None)


def brute_force_flow(
    g: Multigraph,
    group: GroupTag,
    require_rich: bool = False,
    budget: SearchBudget | None = None,
) -> Flow | None:
    """Some conserved nowhere-zero flow over the group by co-tree enumeration.

    None only when exhaustive search proves non-existence; budget exhaustion
    raises instead of making a false claim. Richness is only meaningful for
    integer groups.
    """
    if require_rich and group.kind != "int":
        raise PreconditionError("richness applies to integer flows only")
    budget = budget or SearchBudget()
    flow = cotree.cotree_flow_search(
        g,
        group,
        require_rich=require_rich,
        node_limit=budget.node_limit,
        deadline=time.monotonic() + budget.time_limit,
    )
    if flow is not None:
        rep = verify_flow(g, flow)
        if not (rep.conserved and rep.nowhere_zero):
            raise InternalDefectError("co-tree search produced an invalid flow")
        if require_rich and not is_rich(g, flow):
            raise InternalDefectError("co-tree search produced a non-rich flow")
    return flow


def chromatic_index(g: Multigraph, budget: SearchBudget | None = None) -> ExactResult:
    """Exact chromatic index by backtracking edge coloring, fewest colors first."""
    budget = budget or SearchBudget()
    m = g.edge_count
    if m == 0:
        return ExactResult(0, "exact", ())
    delta = g.max_degree()
    state = _Budget(budget)
    degsum = [g.degree(e.tail) + g.degree(e.head) for e in g.edges]
    order = sorted(range(m), key=lambda e: (-degsum[e], e))
    shannon = (3 * delta) // 2

    def try_colors(color_count: int) -> tuple[int, ...] | None:
        colors: list[int | None] = [None] * m
        used: list[set[int]] = [set() for _ in range(g.vertex_count)]

        def solve(pos: int, highest: int) -> bool:
            if pos == m:
                return True
            eid = order[pos]
            edge = g.edge(eid)
            limit = min(color_count, highest + 1)
            for c in range(1, limit + 1):
                state.tick()
                if c in used[edge.tail] or c in used[edge.head]:
                    continue
                colors[eid] = c
                used[edge.tail].add(c)
                used[edge.head].add(c)
                if solve(pos + 1, max(highest, c)):
                    return True
                colors[eid] = None
                used[edge.tail].discard(c)
                used[edge.head].discard(c)
            return False

        if solve(0, 0):
            return tuple(colors)
        return None

    for count in range(delta, shannon + 1):
        try:
            coloring = try_colors(count)
        except BudgetExhaustedError:
            return ExactResult(None, "exhausted_budget", None)
        if coloring is not None:
            for v in range(g.vertex_count):
                seen = [coloring[e] for e in g.incident(v)]
                if len(seen) != len(set(seen)):
                    raise InternalDefectError("improper edge coloring produced")
            return ExactResult(count, "exact", coloring)
    raise InternalDefectError("no coloring found within the multigraph upper bound")
