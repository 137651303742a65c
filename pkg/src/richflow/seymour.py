"""Nowhere-zero Z_6 flows and confluence elimination by vertex splitting.

Given a set of adjacent-edge pairs, splitting each pair's anchor vertex off
into a fresh degree-3 vertex yields an auxiliary graph whose nowhere-zero
Z_6 flow, pulled back through the contraction, avoids confluence on every
requested pair: at a degree-3 vertex a confluent pair would force the third
edge to zero.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cotree import cotree_flow_search
from .errors import InternalDefectError, PreconditionError
from .flowalg import (
    AdjacentPair,
    Flow,
    GroupTag,
    pair_relation,
    strongly_intersecting,
    verify_flow,
)
from .multigraph import (
    Multigraph,
    bridges,
    is_connected,
    is_rich_flow_admissible,
)


@dataclass(frozen=True)
class PairSet:
    """Adjacent-edge pairs, each anchored at a chosen shared vertex."""

    pairs: tuple[AdjacentPair, ...]

    def __len__(self) -> int:
        return len(self.pairs)


def validate_pair_set(g: Multigraph, pair_set: PairSet) -> None:
    """Enforce the splitting preconditions; raises PreconditionError."""
    seen: set[frozenset[int]] = set()
    edge_count: dict[int, int] = {}
    for p in pair_set.pairs:
        if p.e == p.f:
            raise PreconditionError("pair with a repeated edge")
        if p.shared_vertex not in g.shared_vertices(p.e, p.f):
            raise PreconditionError(f"pair ({p.e},{p.f}) anchor {p.shared_vertex} is not shared")
        if p.edge_pair in seen:
            raise PreconditionError(f"duplicate pair ({p.e},{p.f})")
        seen.add(p.edge_pair)
        for eid in (p.e, p.f):
            edge_count[eid] = edge_count.get(eid, 0) + 1
            if edge_count[eid] >= 3:
                raise PreconditionError(f"edge {eid} appears in three or more pairs")
    ps = pair_set.pairs
    for i in range(len(ps)):
        for j in range(i + 1, len(ps)):
            if strongly_intersecting(g, ps[i], ps[j]):
                raise PreconditionError(
                    f"pairs ({ps[i].e},{ps[i].f}) and ({ps[j].e},{ps[j].f}) strongly intersect"
                )


@dataclass(frozen=True)
class SplitMap:
    """The auxiliary split graph together with its correspondence to the host."""

    graph_h: Multigraph
    b_vertices: tuple[int, ...]  # per pair, the new degree-3 vertex
    anchor_edges: tuple[int, ...]  # per pair, the H edge a(p) -- b(p)
    # G edge i maps to H edge i by construction; kept implicit.


def build_pair_splitting(g: Multigraph, pair_set: PairSet) -> SplitMap:
    """Split each pair off its anchor vertex into a fresh degree-3 vertex.

    The two pair edges and a new anchor edge meet at b(p); contracting the
    anchor edges gives back exactly the host graph. The result is bridgeless
    whenever the host is rich flow admissible.
    """
    verdict = is_rich_flow_admissible(g)
    if not verdict.admissible:
        raise PreconditionError(f"pair splitting requires an admissible graph: {verdict.describe()}")
    validate_pair_set(g, pair_set)
    n = g.vertex_count
    pairs = pair_set.pairs
    b_of = {i: n + i for i in range(len(pairs))}
    replacement: dict[int, dict[int, int]] = {}  # edge -> {anchor vertex -> b(p)}
    for i, p in enumerate(pairs):
        for eid in (p.e, p.f):
            slot = replacement.setdefault(eid, {})
            if p.shared_vertex in slot:
                raise InternalDefectError("two pairs share an edge at the same anchor")
            slot[p.shared_vertex] = b_of[i]
    h_pairs = []
    for e in g.edges:
        slot = replacement.get(e.id, {})
        h_pairs.append((slot.get(e.tail, e.tail), slot.get(e.head, e.head)))
    for i, p in enumerate(pairs):
        h_pairs.append((p.shared_vertex, b_of[i]))
    h = Multigraph(n + len(pairs), h_pairs)
    for i in range(len(pairs)):
        if h.degree(b_of[i]) != 3:
            raise InternalDefectError(f"split vertex for pair {i} has degree {h.degree(b_of[i])}")
    # Contraction check: mapping every b(p) back to a(p) must restore the host.
    back = {b_of[i]: pairs[i].shared_vertex for i in range(len(pairs))}
    for e in g.edges:
        he = h.edge(e.id)
        restored = (back.get(he.tail, he.tail), back.get(he.head, he.head))
        if restored != e.ends:
            raise InternalDefectError(f"contraction does not restore edge {e.id}")
    if bridges(h):
        raise InternalDefectError("split graph has a bridge despite an admissible host")
    if not is_connected(h):
        raise InternalDefectError("split graph is disconnected")
    return SplitMap(h, tuple(b_of[i] for i in range(len(pairs))), tuple(range(g.edge_count, h.edge_count)))


def nowhere_zero_z6(g: Multigraph) -> Flow:
    """A conserved, nowhere-zero Z_6 flow of a connected bridgeless graph."""
    if not is_connected(g):
        raise PreconditionError("nowhere-zero flow search requires a connected graph")
    br = bridges(g)
    if br:
        raise PreconditionError(f"graph has a bridge (edge {min(br)}); no nowhere-zero flow exists")
    flow = cotree_flow_search(g, GroupTag.z6())
    if flow is None:
        raise InternalDefectError("no nowhere-zero Z6 flow found on a bridgeless graph")
    rep = verify_flow(g, flow)
    if not (rep.conserved and rep.nowhere_zero):
        raise InternalDefectError("Z6 search returned an invalid flow")
    return flow


def flow_avoiding_confluence(g: Multigraph, pair_set: PairSet) -> Flow:
    """A nowhere-zero Z_6 flow on g in which no requested pair is confluent."""
    split = build_pair_splitting(g, pair_set)
    h_flow = nowhere_zero_z6(split.graph_h)
    # G edge i is H edge i with matching orientation sides, so the restriction
    # of the H values is already the contracted flow.
    flow = Flow(g, GroupTag.z6(), h_flow.values[: g.edge_count])
    rep = verify_flow(g, flow)
    if not (rep.conserved and rep.nowhere_zero):
        raise InternalDefectError("contracted flow lost conservation or gained zeros")
    for p in pair_set.pairs:
        if pair_relation(flow, p).confluent:
            raise InternalDefectError(f"pair ({p.e},{p.f}) is still confluent after splitting")
    return flow
