"""Tree decompositions: PACE I/O, validation, exact and heuristic construction, nice form.

The dynamic program in :mod:`fmdel.solver` runs over nice tree decompositions;
their separators play the role of the boundary of the partial graph below.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

from .errors import BudgetError, ParseError, ValidationError
from .graph import Graph, bits_to_list, iter_bits

EXACT_TW_CAP = 20


@dataclass
class TreeDecomposition:
    bags: list[frozenset]
    edges: list[tuple[int, int]]
    n_vertices: int = 0

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    def neighbors(self) -> list[list[int]]:
        nb = [[] for _ in self.bags]
        for a, b in self.edges:
            nb[a].append(b)
            nb[b].append(a)
        return nb


def _data_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        yield lineno, line.split()


def parse_gr(text: str) -> Graph:
    """Parse a PACE ``.gr`` graph; duplicate edges are dropped with a warning."""
    lines = _data_lines(text)
    header = next(lines, None)
    if header is None:
        raise ParseError("missing 'p tw' header")
    lineno, tok = header
    if len(tok) != 4 or tok[0] != "p" or tok[1] != "tw":
        raise ParseError(f"line {lineno}: bad header {' '.join(tok)!r}")
    try:
        n, m = int(tok[2]), int(tok[3])
    except ValueError:
        raise ParseError(f"line {lineno}: non-integer header fields") from None
    if n < 0 or m < 0:
        raise ParseError(f"line {lineno}: negative header fields")
    seen = set()
    edges = []
    count = 0
    for lineno, tok in lines:
        if len(tok) != 2:
            raise ParseError(f"line {lineno}: expected an edge 'u v'")
        try:
            u, v = int(tok[0]), int(tok[1])
        except ValueError:
            raise ParseError(f"line {lineno}: non-integer vertex id") from None
        if not (1 <= u <= n and 1 <= v <= n):
            raise ParseError(f"line {lineno}: vertex out of range 1..{n}")
        if u == v:
            raise ParseError(f"line {lineno}: loop at vertex {u}")
        count += 1
        e = (min(u, v) - 1, max(u, v) - 1)
        if e in seen:
            warnings.warn(f"line {lineno}: duplicate edge {u} {v} ignored")
            continue
        seen.add(e)
        edges.append(e)
    if count != m:
        raise ParseError(f"header announces {m} edges, found {count}")
    return Graph(n, edges)


def parse_td(text: str) -> TreeDecomposition:
    """Parse a PACE ``.td`` file; bag ids become 0-based node indices."""
    lines = _data_lines(text)
    header = next(lines, None)
    if header is None:
        raise ParseError("missing 's td' header")
    lineno, tok = header
    if len(tok) != 5 or tok[0] != "s" or tok[1] != "td":
        raise ParseError(f"line {lineno}: bad header {' '.join(tok)!r}")
    try:
        nb, size, n = int(tok[2]), int(tok[3]), int(tok[4])
    except ValueError:
        raise ParseError(f"line {lineno}: non-integer header fields") from None
    bags: list = [None] * nb
    edges = []
    for lineno, tok in lines:
        try:
            if tok[0] == "b":
                i = int(tok[1])
                if not 1 <= i <= nb:
                    raise ParseError(f"line {lineno}: bag id {i} out of range")
                verts = [int(x) - 1 for x in tok[2:]]
                if any(not 0 <= v < n for v in verts):
                    raise ParseError(f"line {lineno}: vertex out of range 1..{n}")
                if bags[i - 1] is not None:
                    raise ParseError(f"line {lineno}: bag {i} defined twice")
                bags[i - 1] = frozenset(verts)
            else:
                if len(tok) != 2:
                    raise ParseError(f"line {lineno}: expected a tree edge 'i j'")
                a, b = int(tok[0]), int(tok[1])
                if not (1 <= a <= nb and 1 <= b <= nb):
                    raise ParseError(f"line {lineno}: tree edge {a} {b} out of range")
                edges.append((a - 1, b - 1))
        except ValueError:
            raise ParseError(f"line {lineno}: non-integer field") from None
    missing = [i + 1 for i, b in enumerate(bags) if b is None]
    if missing:
        raise ParseError(f"bags {missing[:5]} not defined")
    td = TreeDecomposition(bags, edges, n)
    if max((len(b) for b in bags), default=0) > size:
        raise ParseError(f"a bag exceeds the announced size {size}")
    problem = _tree_problem(td)
    if problem:
        raise ParseError(problem)
    return td


def _tree_problem(td: TreeDecomposition) -> str | None:
    k = len(td.bags)
    if k == 0:
        return None
    if len(td.edges) != k - 1:
        return f"decomposition tree has {len(td.edges)} edges for {k} bags"
    nb = td.neighbors()
    seen = {0}
    stack = [0]
    while stack:
        x = stack.pop()
        for y in nb[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    if len(seen) != k:
        return "decomposition tree is disconnected"
    return None


def emit_gr(g: Graph) -> str:
    lines = [f"p tw {g.n} {g.m}"]
    lines.extend(f"{u + 1} {v + 1}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def emit_td(td: TreeDecomposition) -> str:
    lines = [f"s td {len(td.bags)} {td.width + 1} {td.n_vertices}"]
    for i, b in enumerate(td.bags):
        lines.append(" ".join(["b", str(i + 1)] + [str(v + 1) for v in sorted(b)]))
    for a, b in td.edges:
        lines.append(f"{a + 1} {b + 1}")
    return "\n".join(lines) + "\n"


@dataclass
class TdReport:
    ok: bool
    width: int
    violations: list[str] = field(default_factory=list)

    def __bool__(self):
        return self.ok


def validate_td(g: Graph, td: TreeDecomposition) -> TdReport:
    """Check vertex coverage, edge coverage and occurrence connectivity.

    Reports the first violation of each kind.
    """
    out = []
    tree = _tree_problem(td)
    if tree:
        out.append(tree)
    covered = set()
    for b in td.bags:
        covered |= b
    missing = [v for v in range(g.n) if v not in covered]
    if missing:
        out.append(f"vertex {missing[0] + 1} is in no bag")
    stray = sorted(v for v in covered if v >= g.n)
    if stray:
        out.append(f"bag vertex {stray[0] + 1} is not in the graph")
    for u, v in g.edges():
        if not any(u in b and v in b for b in td.bags):
            out.append(f"edge {u + 1} {v + 1} is in no bag")
            break
    if not tree:
        nb = td.neighbors()
        for v in range(g.n):
            occ = [i for i, b in enumerate(td.bags) if v in b]
            if len(occ) <= 1:
                continue
            seen = {occ[0]}
            stack = [occ[0]]
            while stack:
                x = stack.pop()
                for y in nb[x]:
                    if y not in seen and v in td.bags[y]:
                        seen.add(y)
                        stack.append(y)
            if len(seen) != len(occ):
                out.append(f"bags containing vertex {v + 1} are not connected in the tree")
                break
    return TdReport(not out, td.width, out)


def trivial_td(g: Graph) -> TreeDecomposition:
    return TreeDecomposition([frozenset(range(g.n))], [], g.n)


# -- elimination orderings -------------------------------------------------------

def td_from_ordering(g: Graph, order: list[int]) -> TreeDecomposition:
    """Decomposition induced by eliminating vertices in ``order``."""
    n = g.n
    if n == 0:
        return TreeDecomposition([frozenset()], [], 0)
    pos = [0] * n
    for i, v in enumerate(order):
        pos[v] = i
    adj = list(g.adj)
    higher = [0] * n
    for v in order:
        nb = adj[v]
        higher[v] = nb
        for u in iter_bits(nb):
            adj[u] |= nb & ~(1 << u)
            adj[u] &= ~(1 << v)
        adj[v] = 0
    bags = [frozenset([v] + bits_to_list(higher[v])) for v in range(n)]
    edges = []
    roots = []
    for v in range(n):
        if higher[v]:
            parent = min(iter_bits(higher[v]), key=lambda u: pos[u])
            edges.append((v, parent))
        else:
            roots.append(v)
    for a, b in zip(roots, roots[1:]):
        edges.append((a, b))
    return TreeDecomposition(bags, edges, n)


def ordering_width(g: Graph, order: list[int]) -> int:
    adj = list(g.adj)
    w = -1
    for v in order:
        nb = adj[v]
        w = max(w, nb.bit_count())
        for u in iter_bits(nb):
            adj[u] |= nb & ~(1 << u)
            adj[u] &= ~(1 << v)
        adj[v] = 0
    return w


def minfill_order(g: Graph) -> list[int]:
    adj = list(g.adj)
    alive = set(range(g.n))
    order = []
    while alive:
        best = None
        for v in sorted(alive):
            nb = bits_to_list(adj[v])
            fill = 0
            for i, a in enumerate(nb):
                fill += len(nb) - 1 - i - (adj[a] & sum(1 << b for b in nb[i + 1:])).bit_count()
            key = (fill, len(nb), v)
            if best is None or key < best[0]:
                best = (key, v)
        v = best[1]
        nb = adj[v]
        for u in iter_bits(nb):
            adj[u] |= nb & ~(1 << u)
            adj[u] &= ~(1 << v)
        adj[v] = 0
        alive.discard(v)
        order.append(v)
    return order


def minfill_td(g: Graph) -> TreeDecomposition:
    return td_from_ordering(g, minfill_order(g))


def _q_size(adj, s_mask: int, v: int) -> int:
    """Vertices outside ``S + v`` adjacent to the component of ``v`` in ``G[S + v]``."""
    inside = s_mask | (1 << v)
    comp = 1 << v
    frontier = comp
    while frontier:
        nxt = 0
        for x in iter_bits(frontier):
            nxt |= adj[x]
        nxt &= s_mask & ~comp
        comp |= nxt
        frontier = nxt
    out = 0
    for x in iter_bits(comp):
        out |= adj[x]
    return (out & ~inside).bit_count()


def exact_tw(g: Graph, cap: int = EXACT_TW_CAP) -> tuple[int, TreeDecomposition]:
    """Optimal width and a witnessing decomposition by DP over eliminated vertex sets."""
    if g.n > cap:
        raise BudgetError(f"exact treewidth limited to {cap} vertices, graph has {g.n}", estimate=g.n)
    if g.n == 0:
        return -1, TreeDecomposition([frozenset()], [], 0)
    ub_order = minfill_order(g)
    ub = ordering_width(g, ub_order)
    adj = g.adj
    full = g.full_mask
    layer = {0: -1}
    parents = [{}]
    for _ in range(g.n):
        nxt = {}
        par = {}
        for s, val in layer.items():
            rest = full & ~s
            for v in iter_bits(rest):
                q = _q_size(adj, s, v)
                nv = val if val > q else q
                if nv >= ub:
                    continue
                key = s | (1 << v)
                old = nxt.get(key)
                if old is None or nv < old:
                    nxt[key] = nv
                    par[key] = (s, v)
        layer = nxt
        parents.append(par)
        if not layer:
            break
    if full in layer:
        order = []
        s = full
        for par in reversed(parents):
            if s == 0:
                break
            prev, v = par[s]
            order.append(v)
            s = prev
        order.reverse()
        return layer[full], td_from_ordering(g, order)
    return ub, td_from_ordering(g, ub_order)


# -- nice decompositions -----------------------------------------------------------

LEAF, INTRODUCE, FORGET, JOIN = "leaf", "introduce", "forget", "join"


@dataclass
class NiceNode:
    kind: str
    bag: frozenset
    vertex: int | None = None
    children: list[int] = field(default_factory=list)


@dataclass
class NiceTreeDecomposition:
    nodes: list[NiceNode]
    root: int
    n_vertices: int = 0

    @property
    def width(self) -> int:
        return max((len(x.bag) for x in self.nodes), default=0) - 1

    def postorder(self) -> list[int]:
        out = []
        stack = [(self.root, False)]
        while stack:
            x, done = stack.pop()
            if done:
                out.append(x)
                continue
            stack.append((x, True))
            for c in reversed(self.nodes[x].children):
                stack.append((c, False))
        return out

    def counts(self) -> dict:
        out = {LEAF: 0, INTRODUCE: 0, FORGET: 0, JOIN: 0}
        for x in self.nodes:
            out[x.kind] += 1
        return out

    def as_td(self) -> TreeDecomposition:
        edges = [(i, c) for i, x in enumerate(self.nodes) for c in x.children]
        return TreeDecomposition([x.bag for x in self.nodes], edges, self.n_vertices)

    def check(self) -> None:
        """Raise :class:`ValidationError` unless every node type invariant holds."""
        if self.nodes[self.root].bag:
            raise ValidationError("root bag is not empty")
        for i, x in enumerate(self.nodes):
            ch = [self.nodes[c] for c in x.children]
            if x.kind == LEAF:
                if ch or x.bag:
                    raise ValidationError(f"leaf {i} has children or a non-empty bag")
            elif x.kind == INTRODUCE:
                if len(ch) != 1 or x.vertex in ch[0].bag or ch[0].bag | {x.vertex} != x.bag:
                    raise ValidationError(f"introduce node {i} is malformed")
            elif x.kind == FORGET:
                if len(ch) != 1 or x.vertex in x.bag or x.bag | {x.vertex} != ch[0].bag:
                    raise ValidationError(f"forget node {i} is malformed")
            elif x.kind == JOIN:
                if len(ch) != 2 or any(c.bag != x.bag for c in ch):
                    raise ValidationError(f"join node {i} is malformed")
            else:
                raise ValidationError(f"unknown node kind {x.kind!r}")


def to_nice(td: TreeDecomposition, root: int = 0) -> NiceTreeDecomposition:
    """Nice form of ``td`` rooted at ``root`` with an empty root bag; width is preserved."""
    problem = _tree_problem(td)
    if problem:
        raise ValidationError(problem)
    nodes: list[NiceNode] = []

    def add(kind, bag, vertex=None, children=()):
        nodes.append(NiceNode(kind, frozenset(bag), vertex, list(children)))
        return len(nodes) - 1

    def chain(top, bag_from, bag_to):
        # forget first so bags never grow beyond the source bags
        cur_bag = set(bag_from)
        for v in sorted(bag_from - bag_to):
            cur_bag.discard(v)
            top = add(FORGET, cur_bag, v, [top])
        for v in sorted(bag_to - bag_from):
            cur_bag.add(v)
            top = add(INTRODUCE, cur_bag, v, [top])
        return top

    nb = td.neighbors()
    if not td.bags:
        r = add(LEAF, ())
        return NiceTreeDecomposition(nodes, r, td.n_vertices)
    parent = {root: None}
    order = [root]
    for x in order:
        for y in nb[x]:
            if y not in parent:
                parent[y] = x
                order.append(y)
    built = {}
    for x in reversed(order):
        bag = td.bags[x]
        kids = [y for y in nb[x] if parent.get(y) == x]
        tops = [chain(built[y], td.bags[y], bag) for y in kids]
        if not tops:
            tops = [chain(add(LEAF, ()), frozenset(), bag)]
        while len(tops) > 1:
            a, b = tops.pop(), tops.pop()
            tops.append(add(JOIN, bag, None, [b, a]))
        built[x] = tops[0]
    r = chain(built[root], td.bags[root], frozenset())
    nice = NiceTreeDecomposition(nodes, r, td.n_vertices)
    return nice
