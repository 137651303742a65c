"""Exact enumeration of conserved flows over a spanning-tree/co-tree basis.

Free values on the co-tree edges determine tree-edge values through the
fundamental circuits, so every assignment is conserved by construction. The
search backtracks over co-tree values and prunes as soon as a tree edge whose
contributors are all fixed lands on a forbidden value.
"""

from __future__ import annotations

import time
from collections import deque

from .errors import BudgetExhaustedError
from .flowalg import Flow, GroupTag
from .multigraph import Multigraph


def spanning_forest(g: Multigraph) -> tuple[frozenset[int], list[int]]:
    """(tree edge ids, co-tree edge ids ascending); BFS with lowest ids first."""
    seen = [False] * g.vertex_count
    tree: set[int] = set()
    for root in range(g.vertex_count):
        if seen[root]:
            continue
        seen[root] = True
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for eid in g.incident(v):
                w = g.edge(eid).other_end(v)
                if not seen[w]:
                    seen[w] = True
                    tree.add(eid)
                    queue.append(w)
    co = [e for e in range(g.edge_count) if e not in tree]
    return frozenset(tree), co


def fundamental_circuit_signs(
    g: Multigraph, tree: frozenset[int], co_edge: int
) -> list[tuple[int, int]]:
    """Tree edges of the fundamental circuit of co_edge, each with its sign.

    The circuit is traversed along co_edge's reference orientation; a tree
    edge gets +1 when traversed tail -> head.
    """
    e = g.edge(co_edge)
    parent: dict[int, tuple[int, int]] = {}
    seen = {e.head}
    queue = deque([e.head])
    while queue and e.tail not in seen:
        v = queue.popleft()
        for eid in g.incident(v):
            if eid not in tree:
                continue
            w = g.edge(eid).other_end(v)
            if w not in seen:
                seen.add(w)
                parent[w] = (v, eid)
                queue.append(w)
    out = []
    cur = e.tail
    while cur != e.head:
        pv, pe = parent[cur]
        # Path runs head -> ... -> tail; this step is traversed pv -> cur.
        sign = 1 if g.edge(pe).ends == (pv, cur) else -1
        out.append((pe, sign))
        cur = pv
    out.reverse()
    return out


def cotree_flow_search(
    g: Multigraph,
    group: GroupTag,
    *,
    require_rich: bool = False,
    node_limit: int | None = None,
    deadline: float | None = None,
) -> Flow | None:
    """Some conserved nowhere-zero flow over the group, or None if none exists.

    With require_rich (integer groups only) adjacent edges must also differ in
    absolute value. Raises BudgetExhaustedError when a limit cuts the search
    short, so None always means proven non-existence.
    """
    m = g.edge_count
    if m == 0:
        return Flow(g, group, ())
    tree, co = spanning_forest(g)
    members: dict[int, list[tuple[int, int]]] = {co_e: fundamental_circuit_signs(g, tree, co_e) for co_e in co}
    remaining = {t: 0 for t in tree}
    for co_e in co:
        for t, _ in members[co_e]:
            remaining[t] += 1
    if any(count == 0 for count in remaining.values()):
        return None  # a tree edge in no circuit is a bridge; it would stay zero
    if group.kind == "int":
        domain = []
        for a in range(1, group.bound):
            domain.extend((a, -a))
    else:
        domain = group.nonzero_elements()
    adjacency: list[list[int]] = [[] for _ in range(m)]
    if require_rich:
        if group.kind != "int":
            raise BudgetExhaustedError("richness applies to integer flows only")
        for v in range(g.vertex_count):
            inc = g.incident(v)
            for i, e in enumerate(inc):
                for f in inc[i + 1 :]:
                    adjacency[e].append(f)
                    adjacency[f].append(e)
    tree_val = {t: group.zero() for t in tree}
    finalized: list = [None] * m
    nodes = [0]
    result: list[Flow | None] = [None]

    def value_clashes(eid: int, val) -> bool:
        target = abs(val)
        for other in adjacency[eid]:
            ov = finalized[other]
            if ov is not None and abs(ov) == target:
                return True
        return False

    def assign(idx: int) -> bool:
        if idx == len(co):
            vals = list(finalized)
            result[0] = Flow(g, group, tuple(vals))
            return True
        co_e = co[idx]
        for val in domain:
            nodes[0] += 1
            if node_limit is not None and nodes[0] > node_limit:
                raise BudgetExhaustedError("co-tree search node limit reached")
            if deadline is not None and nodes[0] % 512 == 0 and time.monotonic() > deadline:
                raise BudgetExhaustedError("co-tree search time limit reached")
            if require_rich and value_clashes(co_e, val):
                continue
            finalized[co_e] = val
            touched: list[int] = []
            done: list[int] = []
            ok = True
            for t, sign in members[co_e]:
                delta = val if sign == 1 else group.neg(val)
                tree_val[t] = group.add(tree_val[t], delta)
                remaining[t] -= 1
                touched.append(t)
                if remaining[t] == 0:
                    tv = tree_val[t]
                    if group.is_zero(tv):
                        ok = False
                        break
                    if group.kind == "int" and abs(tv) >= group.bound:
                        ok = False
                        break
                    if require_rich and value_clashes(t, tv):
                        ok = False
                        break
                    finalized[t] = tv
                    done.append(t)
            if ok and assign(idx + 1):
                return True
            for t in done:
                finalized[t] = None
            for t in touched:
                delta = val if members_sign(co_e, t) == 1 else group.neg(val)
                tree_val[t] = group.add(tree_val[t], group.neg(delta))
                remaining[t] += 1
            finalized[co_e] = None
        return False

    sign_lookup = {co_e: dict(members[co_e]) for co_e in co}

    def members_sign(co_e: int, t: int) -> int:
        return sign_lookup[co_e][t]

    if assign(0):
        return result[0]
    return None
