"""Group-valued flows on multigraphs and the algebra over them.

A flow stores one group element per edge, relative to the edge's reference
orientation (tail -> head). Reorienting an edge is the no-op of negating its
stored value, so sums, products and the confluency predicates are all defined
directly on stored values and orientation signs.

Supported value groups: Z_k for odd k >= 3, Z_2, Z_6, Z_k x Z_2, and bounded
integers (values strictly inside (-bound, bound)).
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass

from .errors import GraphInputError, InternalDefectError, PreconditionError
from .multigraph import Circuit, Multigraph, validate_circuit


@dataclass(frozen=True)
class GroupTag:
    kind: str  # "zk" | "z2" | "z6" | "zkxz2" | "int"
    k: int = 0
    bound: int = 0

    def __post_init__(self) -> None:
        if self.kind in ("zk", "zkxz2"):
            if self.k < 3 or self.k % 2 == 0:
                raise PreconditionError(f"{self.kind} requires an odd modulus >= 3, got {self.k}")
        elif self.kind == "int":
            if self.bound < 2:
                raise PreconditionError(f"integer flows need bound >= 2, got {self.bound}")
        elif self.kind not in ("z2", "z6"):
            raise PreconditionError(f"unknown group kind {self.kind!r}")

    @staticmethod
    def zk(k: int) -> "GroupTag":
        return GroupTag("zk", k=k)

    @staticmethod
    def z2() -> "GroupTag":
        return GroupTag("z2")

    @staticmethod
    def z6() -> "GroupTag":
        return GroupTag("z6")

    @staticmethod
    def zkxz2(k: int) -> "GroupTag":
        return GroupTag("zkxz2", k=k)

    @staticmethod
    def integers(bound: int) -> "GroupTag":
        return GroupTag("int", bound=bound)

    @property
    def modulus(self) -> int | None:
        if self.kind == "zk":
            return self.k
        if self.kind == "z2":
            return 2
        if self.kind == "z6":
            return 6
        return None

    def zero(self):
        return (0, 0) if self.kind == "zkxz2" else 0

    def normalize(self, v):
        if self.kind == "zkxz2":
            a, b = v
            return (a % self.k, b % 2)
        if self.kind == "int":
            return int(v)
        return v % self.modulus

    def add(self, a, b):
        if self.kind == "zkxz2":
            return ((a[0] + b[0]) % self.k, (a[1] + b[1]) % 2)
        if self.kind == "int":
            return a + b
        return (a + b) % self.modulus

    def neg(self, a):
        if self.kind == "zkxz2":
            return ((-a[0]) % self.k, a[1] % 2)
        if self.kind == "int":
            return -a
        return (-a) % self.modulus

    def scale(self, c: int, a):
        if self.kind == "zkxz2":
            return ((c * a[0]) % self.k, (c * a[1]) % 2)
        if self.kind == "int":
            return c * a
        return (c * a) % self.modulus

    def is_zero(self, a) -> bool:
        return a == self.zero()

    def nonzero_elements(self):
        """Deterministically ordered nonzero elements of a modular group."""
        if self.kind == "zkxz2":
            return [(a, b) for a in range(self.k) for b in range(2) if (a, b) != (0, 0)]
        if self.kind == "int":
            raise PreconditionError("integer value domain is not finite")
        return list(range(1, self.modulus))


@dataclass(frozen=True)
class Flow:
    """Per-edge group values relative to reference orientations."""

    graph: Multigraph
    group: GroupTag
    values: tuple

    def __post_init__(self) -> None:
        if len(self.values) != self.graph.edge_count:
            raise PreconditionError("one value per edge required")
        norm = tuple(self.group.normalize(v) for v in self.values)
        if self.group.kind == "int":
            for v in norm:
                if abs(v) >= self.group.bound:
                    raise PreconditionError(
                        f"integer flow value {v} violates bound {self.group.bound}"
                    )
        object.__setattr__(self, "values", norm)

    def value(self, e: int):
        return self.values[e]

    def value_into(self, e: int, v: int):
        """The value of edge e when e is oriented into vertex v."""
        edge = self.graph.edge(e)
        if edge.head == v:
            return self.values[e]
        if edge.tail == v:
            return self.group.neg(self.values[e])
        raise PreconditionError(f"vertex {v} is not an endpoint of edge {e}")


def zero_flow(g: Multigraph, group: GroupTag) -> Flow:
    return Flow(g, group, tuple(group.zero() for _ in range(g.edge_count)))


def send_through_circuit(g: Multigraph, circuit: Circuit, a, group: GroupTag) -> Flow:
    """The flow that carries `a` around the directed circuit and 0 elsewhere.

    The circuit's listed order is its traversal direction; an edge traversed
    against its reference orientation stores the negated value.
    """
    if not validate_circuit(g, circuit):
        raise PreconditionError("not a valid circuit of this graph")
    vals = [group.zero()] * g.edge_count
    a = group.normalize(a)
    for pos, eid in enumerate(circuit.edges):
        sign = circuit.traversal_sign(g, pos)
        vals[eid] = a if sign == 1 else group.neg(a)
    return Flow(g, group, tuple(vals))


def linear_combine(terms, bound: int | None = None) -> Flow:
    """Edgewise sum of coefficient-scaled flows over one graph and group.

    All flows must share the graph and the exact group tag. For integer flows
    the result bound defaults to the smallest bound covering the values.
    """
    terms = list(terms)
    if not terms:
        raise PreconditionError("need at least one term")
    g = terms[0][1].graph
    tag = terms[0][1].group
    for _, f in terms:
        if f.graph != g:
            raise PreconditionError("flows over different graphs cannot be combined")
        if tag.kind == "int":
            if f.group.kind != "int":
                raise PreconditionError("cannot mix integer and modular flows")
        elif f.group != tag:
            raise PreconditionError("flows over different groups cannot be combined")
    vals = []
    for e in range(g.edge_count):
        acc = tag.zero()
        for c, f in terms:
            acc = tag.add(acc, tag.scale(c, f.values[e]))
        vals.append(acc)
    if tag.kind == "int":
        need = max((abs(v) for v in vals), default=0) + 1
        out_tag = GroupTag.integers(bound if bound is not None else max(need, 2))
    else:
        if bound is not None:
            raise PreconditionError("bound only applies to integer flows")
        out_tag = tag
    return Flow(g, out_tag, tuple(vals))


def product_flows(f1: Flow, f2: Flow) -> Flow:
    """Edgewise pairing of a Z_k flow with a Z_2 flow into a (Z_k x Z_2) flow."""
    if f1.graph != f2.graph:
        raise PreconditionError("product requires flows on the same graph")
    if f1.group.kind != "zk" or f2.group.kind != "z2":
        raise PreconditionError("product is defined for a zk flow times a z2 flow")
    tag = GroupTag.zkxz2(f1.group.k)
    vals = tuple((a, b) for a, b in zip(f1.values, f2.values))
    return Flow(f1.graph, tag, vals)


def project_flow(f: Flow, coordinate: int) -> Flow:
    """First (Z_k) or second (Z_2) coordinate of a (Z_k x Z_2) flow."""
    if f.group.kind != "zkxz2":
        raise PreconditionError("projection is defined on zkxz2 flows")
    if coordinate == 0:
        return Flow(f.graph, GroupTag.zk(f.group.k), tuple(v[0] for v in f.values))
    if coordinate == 1:
        return Flow(f.graph, GroupTag.z2(), tuple(v[1] for v in f.values))
    raise PreconditionError("coordinate must be 0 or 1")


# ---------------------------------------------------------------------------
# Adjacent pairs, confluency, richness


@dataclass(frozen=True)
class AdjacentPair:
    """Two distinct edges meeting at shared_vertex (their anchor)."""

    e: int
    f: int
    shared_vertex: int

    @property
    def edge_pair(self) -> frozenset[int]:
        return frozenset((self.e, self.f))


def make_adjacent_pair(g: Multigraph, e: int, f: int) -> AdjacentPair:
    """Pair e, f with the lowest shared vertex as anchor."""
    if e == f:
        raise PreconditionError("a pair needs two distinct edges")
    shared = g.shared_vertices(e, f)
    if not shared:
        raise PreconditionError(f"edges {e} and {f} are not adjacent")
    a, b = min(e, f), max(e, f)
    return AdjacentPair(a, b, shared[0])


def adjacent_pairs(g: Multigraph) -> list[AdjacentPair]:
    """All unordered pairs of adjacent edges, anchored at the lowest shared vertex."""
    out = []
    for e in range(g.edge_count):
        for f in range(e + 1, g.edge_count):
            shared = g.shared_vertices(e, f)
            if shared:
                out.append(AdjacentPair(e, f, shared[0]))
    return out


@dataclass(frozen=True)
class PairRelation:
    confluent: bool
    contrafluent: bool


def pair_relation(flow: Flow, pair: AdjacentPair) -> PairRelation:
    """Confluency of an adjacent pair under consistent orientation.

    With both edges oriented into the shared vertex, the pair is confluent
    when the values cancel and contrafluent when they agree; the outcome is
    independent of which shared vertex of a parallel pair is used.
    """
    g = flow.graph
    shared = g.shared_vertices(pair.e, pair.f)
    if pair.shared_vertex not in shared:
        raise PreconditionError("pair anchor is not a shared vertex of its edges")
    w = shared[0]
    in_e = flow.value_into(pair.e, w)
    in_f = flow.value_into(pair.f, w)
    rel = PairRelation(
        confluent=(in_e == flow.group.neg(in_f)),
        contrafluent=(in_e == in_f),
    )
    if len(shared) == 2:
        w2 = shared[1]
        alt = PairRelation(
            confluent=(flow.value_into(pair.e, w2) == flow.group.neg(flow.value_into(pair.f, w2))),
            contrafluent=(flow.value_into(pair.e, w2) == flow.value_into(pair.f, w2)),
        )
        if alt != rel:
            raise InternalDefectError("pair relation differs between shared vertices")
    return rel


def strongly_intersecting(g: Multigraph, p1: AdjacentPair, p2: AdjacentPair) -> bool:
    """Distinct pairs sharing one edge whose union has a vertex of degree three."""
    s1, s2 = p1.edge_pair, p2.edge_pair
    if s1 == s2:
        return False
    if len(s1 & s2) != 1:
        return False
    deg: dict[int, int] = {}
    for eid in s1 | s2:
        for v in g.edge(eid).ends:
            deg[v] = deg.get(v, 0) + 1
    return any(d == 3 for d in deg.values())


@dataclass(frozen=True)
class FlowReport:
    conserved: bool
    nowhere_zero: bool
    violating_vertices: tuple[int, ...]
    zero_edges: tuple[int, ...]


def verify_flow(g: Multigraph, flow: Flow) -> FlowReport:
    """Exact conservation and nowhere-zero checks with violation witnesses."""
    if flow.graph != g:
        raise PreconditionError("flow belongs to a different graph")
    tag = flow.group
    bad_vertices = []
    for v in range(g.vertex_count):
        acc = tag.zero()
        for eid in g.incident(v):
            e = g.edge(eid)
            val = flow.values[eid]
            acc = tag.add(acc, val if e.tail == v else tag.neg(val))
        if not tag.is_zero(acc):
            bad_vertices.append(v)
    zeros = tuple(e for e in range(g.edge_count) if tag.is_zero(flow.values[e]))
    return FlowReport(
        conserved=not bad_vertices,
        nowhere_zero=not zeros,
        violating_vertices=tuple(bad_vertices),
        zero_edges=zeros,
    )


def chain_edges(flow: Flow) -> frozenset[int]:
    """Edges of a (Z_k x Z_2) flow whose value has second coordinate 1."""
    if flow.group.kind != "zkxz2":
        raise PreconditionError("chain edges are defined for zkxz2 flows")
    return frozenset(e for e, v in enumerate(flow.values) if v[1] == 1)


@dataclass(frozen=True)
class RichnessChecks:
    conserved: bool
    nowhere_zero: bool
    adjacent_abs_distinct: bool
    bound_ok: bool

    @property
    def all_ok(self) -> bool:
        return (
            self.conserved and self.nowhere_zero and self.adjacent_abs_distinct and self.bound_ok
        )


def rich_report(g: Multigraph, flow: Flow) -> RichnessChecks:
    if flow.group.kind != "int":
        raise PreconditionError("richness is defined for integer flows")
    rep = verify_flow(g, flow)
    bound_ok = all(abs(v) < flow.group.bound for v in flow.values)
    distinct = True
    for pair in adjacent_pairs(g):
        if abs(flow.values[pair.e]) == abs(flow.values[pair.f]):
            distinct = False
            break
    return RichnessChecks(rep.conserved, rep.nowhere_zero, distinct, bound_ok)


def is_rich(g: Multigraph, flow: Flow) -> bool:
    """Conserved, nowhere-zero, within bound, and adjacent absolute values distinct."""
    return rich_report(g, flow).all_ok


# ---------------------------------------------------------------------------
# Modular-to-integer conversion


def _max_flow(node_count: int, arcs: list[tuple[int, int, int]], s: int, t: int):
    """Edmonds-Karp max flow; returns (value, per-arc flow list)."""
    flows = [0] * len(arcs)
    adj: list[list[int]] = [[] for _ in range(node_count)]
    for i, (u, v, _cap) in enumerate(arcs):
        adj[u].append(i)
        adj[v].append(i)
    total = 0
    while True:
        parent: list[tuple[int, int] | None] = [None] * node_count
        parent[s] = (-1, 0)
        queue = deque([s])
        while queue and parent[t] is None:
            v = queue.popleft()
            for ai in adj[v]:
                u, w, cap = arcs[ai]
                if v == u and flows[ai] < cap and parent[w] is None:
                    parent[w] = (ai, 1)
                    queue.append(w)
                elif v == w and flows[ai] > 0 and parent[u] is None:
                    parent[u] = (ai, -1)
                    queue.append(u)
        if parent[t] is None:
            return total, flows
        push = None
        v = t
        while v != s:
            ai, d = parent[v]
            u, w, cap = arcs[ai]
            room = cap - flows[ai] if d == 1 else flows[ai]
            push = room if push is None else min(push, room)
            v = u if d == 1 else w
        v = t
        while v != s:
            ai, d = parent[v]
            u, w, _cap = arcs[ai]
            flows[ai] += d * push
            v = u if d == 1 else w
        total += push


def modular_to_integer(g: Multigraph, flow: Flow) -> Flow:
    """Lift a conserved modular flow to an integer flow with the same residues.

    Each nonzero value r becomes r or r - k so that conservation holds over
    the integers; the choice vector is a feasible unit-capacity circulation
    solved by max flow. Zero values stay zero and |result| < k everywhere.
    """
    if flow.group.kind not in ("zk", "z2", "z6"):
        raise PreconditionError("conversion expects a single modular group")
    if flow.graph != g:
        raise PreconditionError("flow belongs to a different graph")
    k = flow.group.modulus
    rep = verify_flow(g, flow)
    if not rep.conserved:
        raise PreconditionError("input flow is not conserved")
    r = list(flow.values)
    div = [0] * g.vertex_count
    for e in g.edges:
        div[e.tail] += r[e.id]
        div[e.head] -= r[e.id]
    demands = []
    for v in range(g.vertex_count):
        if div[v] % k != 0:
            raise InternalDefectError("divergence not divisible by the modulus")
        demands.append(div[v] // k)
    # Node layout: 0..n-1 graph vertices, n = source, n+1 = sink.
    s, t = g.vertex_count, g.vertex_count + 1
    arcs: list[tuple[int, int, int]] = []
    arc_of_edge: dict[int, int] = {}
    for e in g.edges:
        if r[e.id] != 0:
            arc_of_edge[e.id] = len(arcs)
            arcs.append((e.tail, e.head, 1))
    need = 0
    for v, d in enumerate(demands):
        if d > 0:
            arcs.append((s, v, d))
            need += d
        elif d < 0:
            arcs.append((v, t, -d))
    value, arc_flow = _max_flow(g.vertex_count + 2, arcs, s, t)
    if value != need:
        raise InternalDefectError("integer lift infeasible; conversion theory violated")
    vals = []
    for e in g.edges:
        if r[e.id] == 0:
            vals.append(0)
        else:
            x = arc_flow[arc_of_edge[e.id]]
            vals.append(r[e.id] - k * x)
    out = Flow(g, GroupTag.integers(k), tuple(vals))
    out_rep = verify_flow(g, out)
    if not out_rep.conserved:
        raise InternalDefectError("integer lift lost conservation")
    for e in range(g.edge_count):
        if (vals[e] - r[e]) % k != 0 or (vals[e] == 0) != (r[e] == 0):
            raise InternalDefectError("integer lift broke residues or zero set")
    return out


# ---------------------------------------------------------------------------
# Certificate files


_GROUP_NAMES = {"int": "int", "zk": "zk", "z2": "z2", "z6": "z6", "zkxz2": "zkxz2"}


def write_flow_json(flow: Flow) -> str:
    g = flow.graph
    payload: dict = {"format": 1, "group": _GROUP_NAMES[flow.group.kind]}
    if flow.group.kind == "int":
        payload["bound"] = flow.group.bound
    else:
        payload["k"] = flow.group.k if flow.group.kind in ("zk", "zkxz2") else flow.group.modulus
    edges = []
    for e in g.edges:
        v = flow.values[e.id]
        value = list(v) if flow.group.kind == "zkxz2" else v
        edges.append({"id": e.id, "tail": e.tail, "head": e.head, "value": value})
    payload["edges"] = edges
    return json.dumps(payload, indent=2) + "\n"


def read_flow_json(text: str, g: Multigraph) -> Flow:
    """Parse a certificate against its graph, normalizing reversed edge rows."""
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphInputError(f"certificate is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict) or payload.get("format") != 1:
        raise GraphInputError("certificate format field must be 1")
    kind = payload.get("group")
    if kind == "int":
        tag = GroupTag.integers(int(payload["bound"]))
    elif kind == "zk":
        tag = GroupTag.zk(int(payload["k"]))
    elif kind == "z2":
        tag = GroupTag.z2()
    elif kind == "z6":
        tag = GroupTag.z6()
    elif kind == "zkxz2":
        tag = GroupTag.zkxz2(int(payload["k"]))
    else:
        raise GraphInputError(f"unknown certificate group {kind!r}")
    rows = payload.get("edges")
    if not isinstance(rows, list) or len(rows) != g.edge_count:
        raise GraphInputError("certificate edge list does not match the graph")
    vals: list = [None] * g.edge_count
    for row in rows:
        eid = int(row["id"])
        if not (0 <= eid < g.edge_count) or vals[eid] is not None:
            raise GraphInputError(f"bad or duplicate edge id {eid} in certificate")
        edge = g.edge(eid)
        tail, head = int(row["tail"]), int(row["head"])
        raw = row["value"]
        value = tuple(raw) if kind == "zkxz2" else raw
        if (tail, head) == edge.ends:
            vals[eid] = value
        elif (head, tail) == edge.ends:
            vals[eid] = tag.neg(tag.normalize(value))
        else:
            raise GraphInputError(f"edge {eid} endpoints do not match the graph")
    return Flow(g, tag, tuple(vals))
