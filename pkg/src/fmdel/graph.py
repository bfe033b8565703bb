"""Simple graphs, boundaried graphs, and the gluing algebra.

Adjacency is stored as one integer bitmask per vertex; vertex ids are dense
0-based integers.  Text formats are 1-based.

A boundaried graph carries an ordered boundary: ``boundary[i]`` is the vertex
labelled ``i + 1``.  Every operation treats that order as significant.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Sequence

from .errors import IncompatibleBoundaries, ParseError


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def bits_to_list(mask: int) -> list[int]:
    return list(iter_bits(mask))


class Graph:
    """Immutable simple undirected graph on vertices ``0..n-1``."""

    __slots__ = ("n", "adj", "_m")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        adj = [0] * n
        for u, v in edges:
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        self.n = n
        self.adj = tuple(adj)
        self._m = None

    @classmethod
    def from_adj(cls, adj: Sequence[int]) -> "Graph":
        g = cls.__new__(cls)
        g.n = len(adj)
        g.adj = tuple(adj)
        g._m = None
        return g

    @property
    def m(self) -> int:
        if self._m is None:
            self._m = sum(a.bit_count() for a in self.adj) // 2
        return self._m

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def edges(self) -> list[tuple[int, int]]:
        out = []
        for u, a in enumerate(self.adj):
            for v in iter_bits(a >> (u + 1)):
                out.append((u, u + 1 + v))
        return out

    def edge_set(self) -> frozenset:
        return frozenset(self.edges())

    def neighbors(self, v: int) -> list[int]:
        return bits_to_list(self.adj[v])

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def degrees(self) -> list[int]:
        return [a.bit_count() for a in self.adj]

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def induced(self, vertices: Sequence[int]) -> "Graph":
        """Subgraph induced by ``vertices``; new id ``i`` is ``vertices[i]``."""
        pos = {v: i for i, v in enumerate(vertices)}
        adj = []
        for v in vertices:
            a = 0
            for u in iter_bits(self.adj[v]):
                j = pos.get(u)
                if j is not None:
                    a |= 1 << j
            adj.append(a)
        return Graph.from_adj(adj)

    def induced_mask(self, mask: int) -> tuple["Graph", list[int]]:
        keep = bits_to_list(mask)
        return self.induced(keep), keep

    def remove_vertices(self, removed: Iterable[int]) -> tuple["Graph", list[int]]:
        """Delete vertices; survivors keep their relative order.

        Returns the new graph and the list mapping new ids to old ids.
        """
        gone = set(removed)
        keep = [v for v in range(self.n) if v not in gone]
        return self.induced(keep), keep

    def with_edges(self, extra: Iterable[tuple[int, int]]) -> "Graph":
        adj = list(self.adj)
        for u, v in extra:
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return Graph.from_adj(adj)

    def without_edges(self, gone: Iterable[tuple[int, int]]) -> "Graph":
        adj = list(self.adj)
        for u, v in gone:
            adj[u] &= ~(1 << v)
            adj[v] &= ~(1 << u)
        return Graph.from_adj(adj)

    def relabel(self, new_of_old: Sequence[int]) -> "Graph":
        """Apply a permutation given as ``new_of_old[old] = new``."""
        adj = [0] * self.n
        for old, a in enumerate(self.adj):
            row = 0
            for u in iter_bits(a):
                row |= 1 << new_of_old[u]
            adj[new_of_old[old]] = row
        return Graph.from_adj(adj)

    def component_masks(self, within: int | None = None) -> list[int]:
        todo = self.full_mask if within is None else within
        comps = []
        while todo:
            seed = todo & -todo
            comp = seed
            frontier = seed
            while frontier:
                nxt = 0
                for v in iter_bits(frontier):
                    nxt |= self.adj[v]
                nxt &= todo & ~comp
                comp |= nxt
                frontier = nxt
            comps.append(comp)
            todo &= ~comp
        return comps

    def is_connected(self) -> bool:
        return self.n <= 1 or len(self.component_masks()) == 1

    def to_networkx(self):
        import networkx as nx

        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges())
        return g

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self.adj == other.adj

    def __hash__(self) -> int:
        return hash(self.adj)

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.edges()})"


class BoundariedGraph:
    """A graph with an ordered boundary; position ``i`` carries label ``i + 1``."""

    __slots__ = ("graph", "boundary", "_canon")

    def __init__(self, graph: Graph, boundary: Sequence[int] = ()):
        boundary = tuple(boundary)
        if len(set(boundary)) != len(boundary):
            raise ValueError(f"boundary has repeated vertices: {boundary}")
        for v in boundary:
            if not 0 <= v < graph.n:
                raise ValueError(f"boundary vertex {v} not in graph (n={graph.n})")
        self.graph = graph
        self.boundary = boundary
        self._canon = None

    @classmethod
    def standard(cls, t: int, n: int, edges: Iterable[tuple[int, int]] = ()) -> "BoundariedGraph":
        """Boundary vertices are ``0..t-1`` in label order."""
        return cls(Graph(n, edges), range(t))

    @property
    def t(self) -> int:
        return len(self.boundary)

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def m(self) -> int:
        return self.graph.m

    @property
    def boundary_mask(self) -> int:
        mask = 0
        for v in self.boundary:
            mask |= 1 << v
        return mask

    def nonboundary(self) -> list[int]:
        bset = set(self.boundary)
        return [v for v in range(self.graph.n) if v not in bset]

    def is_standard(self) -> bool:
        return self.boundary == tuple(range(len(self.boundary)))

    def standardized(self) -> "BoundariedGraph":
        """Relabel so the boundary is ``0..t-1``; interior keeps relative order."""
        if self.is_standard():
            return self
        order = list(self.boundary) + self.nonboundary()
        new_of_old = [0] * self.graph.n
        for new, old in enumerate(order):
            new_of_old[old] = new
        return BoundariedGraph(self.graph.relabel(new_of_old), range(self.t))

    def boundary_graph(self) -> Graph:
        return self.graph.induced(self.boundary)

    def canonical(self) -> tuple[bytes, "BoundariedGraph"]:
        if self._canon is None:
            from .canon import canonicalize

            self._canon = canonicalize(self)
        return self._canon

    def encode(self) -> str:
        """Multi-line text form: ``t n m``, ``B v1..vt``, then ``u v`` lines."""
        lines = [f"{self.t} {self.n} {self.m}", " ".join(["B"] + [str(v + 1) for v in self.boundary])]
        lines.extend(f"{u + 1} {v + 1}" for u, v in self.graph.edges())
        return "\n".join(lines)

    def to_line(self) -> str:
        return ";".join(self.encode().split("\n"))

    @classmethod
    def decode(cls, text: str) -> "BoundariedGraph":
        if "\n" not in text.strip() and ";" in text:
            rows = text.strip().split(";")
        else:
            rows = [r for r in text.strip().splitlines()]
        rows = [r.strip() for r in rows if r.strip() and not r.strip().startswith("c ")]
        if len(rows) < 2:
            raise ParseError("boundaried graph needs a header and a boundary line")
        try:
            t, n, m = (int(x) for x in rows[0].split())
        except ValueError:
            raise ParseError(f"bad header {rows[0]!r}") from None
        btoks = rows[1].split()
        if not btoks or btoks[0] != "B" or len(btoks) != t + 1:
            raise ParseError(f"bad boundary line {rows[1]!r} for t={t}")
        boundary = [int(x) - 1 for x in btoks[1:]]
        if len(rows) - 2 != m:
            raise ParseError(f"expected {m} edge lines, got {len(rows) - 2}")
        edges = []
        for r in rows[2:]:
            parts = r.split()
            if len(parts) != 2:
                raise ParseError(f"bad edge line {r!r}")
            u, v = int(parts[0]) - 1, int(parts[1]) - 1
            if not (0 <= u < n and 0 <= v < n) or u == v:
                raise ParseError(f"edge {r!r} out of range")
            edges.append((u, v))
        try:
            return cls(Graph(n, edges), boundary)
        except ValueError as exc:
            raise ParseError(str(exc)) from None

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BoundariedGraph)
            and self.boundary == other.boundary
            and self.graph == other.graph
        )

    def __hash__(self) -> int:
        return hash((self.boundary, self.graph.adj))

    def __repr__(self) -> str:
        return f"BoundariedGraph(t={self.t}, n={self.n}, boundary={list(self.boundary)}, edges={self.graph.edges()})"


def detail(g: BoundariedGraph) -> int:
    return max(g.m, g.n - g.t)


def compatible(g1: BoundariedGraph, g2: BoundariedGraph) -> bool:
    return _first_mismatch(g1, g2) is None


def _first_mismatch(g1: BoundariedGraph, g2: BoundariedGraph):
    if g1.t != g2.t:
        return ("size", g1.t, g2.t)
    b1, b2 = g1.boundary, g2.boundary
    for i in range(g1.t):
        for j in range(i + 1, g1.t):
            if g1.graph.has_edge(b1[i], b1[j]) != g2.graph.has_edge(b2[i], b2[j]):
                return ("pair", i, j)
    return None


def _glue_parts(g1: BoundariedGraph, g2: BoundariedGraph, strict: bool):
    bad = _first_mismatch(g1, g2)
    if bad is not None:
        if bad[0] == "size":
            raise IncompatibleBoundaries(f"boundary sizes differ: {bad[1]} vs {bad[2]}")
        if strict:
            i, j = bad[1], bad[2]
            raise IncompatibleBoundaries(
                f"boundary pair ({i + 1}, {j + 1}) is adjacent in one graph only"
            )
    n1 = g1.graph.n
    where = {}
    for i, v in enumerate(g2.boundary):
        where[v] = g1.boundary[i]
    nxt = n1
    for v in range(g2.graph.n):
        if v not in where:
            where[v] = nxt
            nxt += 1
    adj = list(g1.graph.adj) + [0] * (nxt - n1)
    for u, v in g2.graph.edges():
        a, b = where[u], where[v]
        adj[a] |= 1 << b
        adj[b] |= 1 << a
    return Graph.from_adj(adj)


def glue(g1: BoundariedGraph, g2: BoundariedGraph, strict: bool = True) -> Graph:
    """Disjoint union with position-wise boundary identification.

    Vertices of ``g1`` keep their ids; interior vertices of ``g2`` follow in
    order.  Parallel edges collapse.  With ``strict`` the boundary-induced
    subgraphs must agree; otherwise their edges are united.
    """
    return _glue_parts(g1, g2, strict)


def glue_boundaried(g1: BoundariedGraph, g2: BoundariedGraph, strict: bool = False) -> BoundariedGraph:
    """Like :func:`glue` but keeps ``g1``'s boundary on the result."""
    return BoundariedGraph(_glue_parts(g1, g2, strict), g1.boundary)


def canonical_form(g: BoundariedGraph, cap: int | None = None) -> bytes:
    from .canon import canonicalize

    if cap is not None:
        return canonicalize(g, cap=cap)[0]
    return g.canonical()[0]


def form_hex(form: bytes) -> str:
    return form.hex()


# -- small named graphs -------------------------------------------------------

def complete(n: int) -> Graph:
    return Graph(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def cycle(n: int) -> Graph:
    if n < 3:
        raise ValueError("cycles need at least 3 vertices")
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def path(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def complete_bipartite(a: int, b: int) -> Graph:
    return Graph(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def star(leaves: int) -> Graph:
    return complete_bipartite(1, leaves)


def empty(n: int) -> Graph:
    return Graph(n)


def petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph(10, outer + spokes + inner)


def disjoint_union(*graphs: Graph) -> Graph:
    adj = []
    offset = 0
    for g in graphs:
        adj.extend(a << offset for a in g.adj)
        offset += g.n
    return Graph.from_adj(adj)
