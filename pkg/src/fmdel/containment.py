"""Minor and topological-minor containment for small patterns.

Two minor deciders live here:

* :func:`has_minor` grows disjoint connected branch sets by backtracking, after
  shrinking the host with reductions that are safe for the given pattern.
* :func:`has_minor_closure` explores every graph reachable by vertex deletion,
  edge deletion and contraction.  It is slow and exists to check the first.

:func:`has_btm` decides boundaried topological-minor containment by placing
the pattern's interior vertices and routing internally disjoint paths.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Sequence

from .canon import canonicalize, graph_form
from .errors import BudgetError, IncompatibleBoundaries, ValidationError
from .graph import BoundariedGraph, Graph, bits_to_list, detail, iter_bits

DEFAULT_PATTERN_CAP = 8
DEFAULT_EXT_DETAIL_CAP = 10


# -- tm-pairs and dissolution -------------------------------------------------

@dataclass
class TmPair:
    """Subgraph ``edges`` of a host with branch vertices ``branch``.

    ``sigma`` maps pattern vertices to branch vertices and ``paths`` maps each
    pattern edge ``(a, b)`` (``a < b``) to its host path, endpoints included.
    """

    edges: list[tuple[int, int]]
    branch: list[int]
    sigma: dict[int, int] = field(default_factory=dict)
    paths: dict[tuple[int, int], list[int]] = field(default_factory=dict)

    def vertices(self) -> list[int]:
        vs = set(self.branch)
        for u, v in self.edges:
            vs.add(u)
            vs.add(v)
        return sorted(vs)

    def to_json(self) -> dict:
        return {
            "branch": [v + 1 for v in self.branch],
            "sigma": {str(k + 1): v + 1 for k, v in self.sigma.items()},
            "paths": [[a + 1, b + 1, [x + 1 for x in p]] for (a, b), p in sorted(self.paths.items())],
        }


def _tm_subgraph(n: int, edges, branch):
    verts = set(branch)
    for u, v in edges:
        verts.add(u)
        verts.add(v)
    order = sorted(verts)
    pos = {v: i for i, v in enumerate(order)}
    local = Graph(len(order), [(pos[u], pos[v]) for u, v in edges])
    return local, order, {pos[v] for v in branch}


def check_tm_pair(m: Graph, branch: Iterable[int]) -> None:
    """Raise :class:`ValidationError` unless ``(m, branch)`` is a valid tm-pair.

    Besides degree two off the branch set, every subdivision vertex must sit on
    a path between two distinct branch vertices.
    """
    tset = set(branch)
    for v in range(m.n):
        if v not in tset and m.degree(v) != 2:
            raise ValidationError(f"vertex {v} is not a branch vertex but has degree {m.degree(v)}")
    off = 0
    for v in range(m.n):
        if v not in tset:
            off |= 1 << v
    for comp in m.component_masks(off):
        ends = set()
        for v in iter_bits(comp):
            for u in iter_bits(m.adj[v]):
                if u in tset:
                    ends.add(u)
        if len(ends) < 2:
            raise ValidationError(
                f"subdivision vertices {bits_to_list(comp)} do not join two distinct branch vertices"
            )


def dissolve(m: Graph, branch: Iterable[int], order: Sequence[int] | None = None) -> Graph:
    """Dissolve every vertex outside ``branch``.

    The result has the branch vertices in ascending order as ``0..|T|-1``.
    ``order`` fixes the dissolution sequence; the outcome never depends on it.
    """
    tset = sorted(set(branch))
    check_tm_pair(m, tset)
    adj = list(m.adj)
    alive = set(range(m.n))
    todo = [v for v in (order if order is not None else range(m.n)) if v not in set(tset)]
    for v in todo:
        nb = bits_to_list(adj[v])
        if len(nb) != 2:
            raise ValidationError(f"vertex {v} lost degree two during dissolution")
        u, w = nb
        bit = 1 << v
        adj[u] &= ~bit
        adj[w] &= ~bit
        adj[u] |= 1 << w
        adj[w] |= 1 << u
        adj[v] = 0
        alive.discard(v)
    keep = [v for v in range(m.n) if v in alive]
    return Graph.from_adj(adj).induced(keep)


# -- minor models --------------------------------------------------------------

@dataclass
class MinorModel:
    """Branch set (host vertex list) per pattern vertex plus one host edge per pattern edge."""

    branch_sets: list[list[int]]
    witnesses: dict[tuple[int, int], tuple[int, int]]

    def validate(self, host: Graph, pattern: Graph) -> None:
        if len(self.branch_sets) != pattern.n:
            raise ValidationError("wrong number of branch sets")
        seen = set()
        for p, bs in enumerate(self.branch_sets):
            if not bs:
                raise ValidationError(f"empty branch set for pattern vertex {p}")
            if seen & set(bs):
                raise ValidationError("branch sets overlap")
            seen |= set(bs)
            mask = 0
            for v in bs:
                mask |= 1 << v
            if len(host.component_masks(mask)) != 1:
                raise ValidationError(f"branch set of pattern vertex {p} is disconnected")
        for a, b in pattern.edges():
            w = self.witnesses.get((a, b))
            if w is None:
                raise ValidationError(f"pattern edge {(a, b)} has no witness")
            x, y = w
            if not host.has_edge(x, y) or x not in self.branch_sets[a] or y not in self.branch_sets[b]:
                raise ValidationError(f"bad witness {w} for pattern edge {(a, b)}")

    def to_json(self) -> dict:
        return {
            "branch_sets": [[v + 1 for v in bs] for bs in self.branch_sets],
            "witnesses": [[a + 1, b + 1, x + 1, y + 1] for (a, b), (x, y) in sorted(self.witnesses.items())],
        }


@dataclass(frozen=True)
class _PatternInfo:
    n: int
    m: int
    isolated: int
    connected: bool
    min_degree: int
    biconnected: bool
    planar: bool
    order: tuple
    earlier: tuple
    later_count: tuple
    has_later: tuple


@lru_cache(maxsize=4096)
def _pattern_info(adj: tuple) -> _PatternInfo:
    p = Graph.from_adj(adj)
    degs = p.degrees()
    core = [v for v in range(p.n) if degs[v] > 0]
    isolated = p.n - len(core)
    core_mask = 0
    for v in core:
        core_mask |= 1 << v
    comps = p.component_masks(core_mask) if core else []
    connected = len(comps) == 1 and isolated == 0
    min_deg = min(degs) if degs else 0
    biconnected = False
    planar = True
    if p.n >= 3 and connected:
        import networkx as nx

        g = p.to_networkx()
        biconnected = nx.is_biconnected(g)
    if p.m >= 9:
        import networkx as nx

        planar = nx.check_planarity(p.to_networkx())[0]
    # placement order: components largest first, BFS from the max-degree vertex
    order = []
    for comp in sorted(comps, key=lambda c: -c.bit_count()):
        verts = bits_to_list(comp)
        start = max(verts, key=lambda v: (degs[v], -v))
        seen = {start}
        queue = [start]
        while queue:
            v = queue.pop(0)
            order.append(v)
            for u in sorted(p.neighbors(v), key=lambda u: (-degs[u], u)):
                if u not in seen:
                    seen.add(u)
                    queue.append(u)
    pos = {v: i for i, v in enumerate(order)}
    earlier = []
    later_count = []
    for i, v in enumerate(order):
        earlier.append(tuple(sorted(pos[u] for u in p.neighbors(v) if pos[u] < i)))
        later_count.append(sum(1 for u in p.neighbors(v) if pos[u] > i))
    has_later = []
    for i in range(len(order)):
        # placed positions j <= i that still have neighbours beyond i
        has_later.append(tuple(j for j in range(i + 1) if any(pos[u] > i for u in p.neighbors(order[j]))))
    return _PatternInfo(
        n=p.n, m=p.m, isolated=isolated, connected=connected, min_degree=min_deg,
        biconnected=biconnected, planar=planar, order=tuple(order), earlier=tuple(earlier),
        later_count=tuple(later_count), has_later=tuple(has_later),
    )


@lru_cache(maxsize=100_000)
def _is_planar_adj(adj: tuple) -> bool:
    g = Graph.from_adj(adj)
    if g.n < 5 or g.m < 9:
        return True
    if g.m > 3 * g.n - 6:
        return False
    import networkx as nx

    return nx.check_planarity(g.to_networkx())[0]


def is_planar(g: Graph) -> bool:
    return _is_planar_adj(g.adj)


def _conn_sets(adj, seed, allowed, max_size):
    """Connected subsets of ``allowed | seed`` that contain ``seed``, each once.

    Yields ``(mask, neighbourhood_mask)``.
    """
    sbit = 1 << seed

    def rec(x, nbr, cand, forbidden, size):
        yield x, nbr
        if size >= max_size:
            return
        while cand:
            low = cand & -cand
            cand ^= low
            v = low.bit_length() - 1
            nx_ = x | low
            av = adj[v]
            yield from rec(nx_, nbr | av, cand | (av & allowed & ~nx_ & ~forbidden), forbidden, size + 1)
            forbidden |= low

    a0 = adj[seed]
    yield from rec(sbit, a0, a0 & allowed & ~sbit, 0, 1)


def _search_model(adj, info: _PatternInfo, candidates: int):
    """Backtracking over branch sets inside ``candidates`` (a host vertex mask)."""
    k = len(info.order)
    total = k + info.isolated
    sets = [0] * k
    nbrs = [0] * k

    def rec(i, free):
        if i == k:
            return free.bit_count() >= info.isolated
        remaining = total - i - 1
        max_size = free.bit_count() - remaining
        if max_size <= 0:
            return False
        req = info.earlier[i]
        later = info.later_count[i]
        if req:
            seeds = nbrs[req[0]] & free
        else:
            seeds = free
        tried = 0
        while seeds:
            low = seeds & -seeds
            seeds ^= low
            s = low.bit_length() - 1
            allowed = free & ~tried & ~low
            tried |= low
            for x, nx_ in _conn_sets(adj, s, allowed, max_size):
                ok = True
                for j in req[1:]:
                    if not nx_ & sets[j]:
                        ok = False
                        break
                if not ok:
                    continue
                newfree = free & ~x
                if later and (nx_ & newfree).bit_count() < later:
                    continue
                sets[i] = x
                nbrs[i] = nx_
                for j in info.has_later[i]:
                    if not nbrs[j] & newfree:
                        ok = False
                        break
                if ok and rec(i + 1, newfree):
                    return True
        sets[i] = 0
        return False

    if rec(0, candidates):
        return list(sets)
    return None


def _peel_and_dissolve(adj, alive, bags, peel, dissolve_deg2):
    changed = True
    while changed:
        changed = False
        for v in bits_to_list(alive):
            if not alive >> v & 1:
                continue
            a = adj[v] & alive
            d = a.bit_count()
            bit = 1 << v
            if peel and d <= 1:
                alive &= ~bit
                for u in iter_bits(a):
                    adj[u] &= ~bit
                changed = True
            elif dissolve_deg2 and d == 2:
                u = (a & -a).bit_length() - 1
                w = (a ^ (1 << u)).bit_length() - 1
                adj[u] = (adj[u] & ~bit) | (1 << w)
                adj[w] = (adj[w] & ~bit) | (1 << u)
                bags[u] |= bags[v]
                alive &= ~bit
                changed = True
    return alive


def _blocks(g: Graph, mask: int) -> list[int]:
    import networkx as nx

    sub = nx.Graph()
    verts = bits_to_list(mask)
    sub.add_nodes_from(verts)
    for v in verts:
        for u in iter_bits(g.adj[v] & mask):
            if u > v:
                sub.add_edge(v, u)
    out = []
    for comp in nx.biconnected_components(sub):
        bm = 0
        for v in comp:
            bm |= 1 << v
        out.append(bm)
    return out


def _minor_pieces(host: Graph, info: _PatternInfo):
    """Yield ``(adjacency, mask, bags)`` host pieces to search independently."""
    adj = list(host.adj)
    bags = [1 << v for v in range(host.n)]
    alive = host.full_mask
    if info.isolated or info.n == 0:
        yield adj, alive, bags
        return
    alive = _peel_and_dissolve(adj, alive, bags, info.min_degree >= 2, info.min_degree >= 3)
    for i in range(host.n):
        adj[i] &= alive
    g = Graph.from_adj([a if alive >> i & 1 else 0 for i, a in enumerate(adj)])
    comps = g.component_masks(alive) if info.connected else [alive]
    for comp in comps:
        pieces = _blocks(g, comp) if info.biconnected else [comp]
        for piece in pieces:
            if piece.bit_count() < info.n:
                continue
            m = sum((g.adj[v] & piece).bit_count() for v in iter_bits(piece)) // 2
            if m < info.m:
                continue
            if not info.planar:
                sub, _ = g.induced_mask(piece)
                if is_planar(sub):
                    continue
            yield [a & piece for a in g.adj], piece, bags


def has_minor(host: Graph, pattern: Graph, witness: bool = False, cap: int = DEFAULT_PATTERN_CAP):
    """Decide whether ``pattern`` is a minor of ``host``.

    With ``witness`` the return value is ``(found, MinorModel | None)``.
    """
    if pattern.n > cap:
        raise BudgetError(f"pattern has {pattern.n} vertices, cap is {cap}", estimate=pattern.n)
    if pattern.n == 0:
        return (True, MinorModel([], {})) if witness else True
    if pattern.n > host.n or pattern.m > host.m:
        return (False, None) if witness else False
    if not witness and pattern.n <= 3 and pattern.m == pattern.n * (pattern.n - 1) // 2:
        if pattern.n <= 2:
            return host.m >= pattern.m
        # K3 minor iff some cycle
        return host.m > host.n - len(host.component_masks())
    info = _pattern_info(pattern.adj)
    for adj, mask, bags in _minor_pieces(host, info):
        sets = _search_model(adj, info, mask)
        if sets is None:
            continue
        if not witness:
            return True
        return True, _expand_model(host, pattern, info, sets, bags, mask)
    return (False, None) if witness else False


def _expand_model(host, pattern, info, sets, bags, mask):
    branch = [None] * pattern.n
    used = 0
    for i, p in enumerate(info.order):
        full = 0
        for v in iter_bits(sets[i]):
            full |= bags[v]
        branch[p] = bits_to_list(full)
        used |= full
    spare = [v for v in range(host.n) if not used >> v & 1]
    for p in range(pattern.n):
        if branch[p] is None:
            branch[p] = [spare.pop(0)]
    witnesses = {}
    for a, b in pattern.edges():
        bset = set(branch[b])
        for x in branch[a]:
            hit = next((y for y in host.neighbors(x) if y in bset), None)
            if hit is not None:
                witnesses[(a, b)] = (x, hit)
                break
    model = MinorModel(branch, witnesses)
    model.validate(host, pattern)
    return model


def contract(g: Graph, u: int, v: int) -> Graph:
    """Contract edge ``uv`` into ``u``; vertex ``v`` disappears."""
    adj = list(g.adj)
    bit_u, bit_v = 1 << u, 1 << v
    merged = (adj[u] | adj[v]) & ~bit_u & ~bit_v
    for x in iter_bits(adj[v]):
        adj[x] &= ~bit_v
        if x != u:
            adj[x] |= bit_u
    adj[u] = merged
    adj[v] = 0
    keep = [x for x in range(g.n) if x != v]
    return Graph.from_adj(adj).induced(keep)


def minor_closure(host: Graph, min_n: int = 0, min_m: int = 0) -> set[bytes]:
    """Canonical forms of all minors of ``host`` with at least ``min_n`` vertices and ``min_m`` edges."""
    seen = set()
    stack = [host]
    while stack:
        g = stack.pop()
        f = graph_form(g, cap=None)
        if f in seen:
            continue
        seen.add(f)
        if g.n - 1 >= min_n:
            for v in range(g.n):
                h, _ = g.remove_vertices([v])
                if h.m >= min_m:
                    stack.append(h)
        if g.m - 1 >= min_m:
            for e in g.edges():
                stack.append(g.without_edges([e]))
            if g.n - 1 >= min_n:
                for u, v in g.edges():
                    h = contract(g, u, v)
                    if h.m >= min_m:
                        stack.append(h)
        elif g.n - 1 >= min_n:
            for u, v in g.edges():
                h = contract(g, u, v)
                if h.m >= min_m:
                    stack.append(h)
    return seen


def has_minor_closure(host: Graph, pattern: Graph) -> bool:
    if pattern.n > host.n or pattern.m > host.m:
        return False
    return graph_form(pattern, cap=None) in minor_closure(host, pattern.n, pattern.m)


# -- boundaried topological minors ----------------------------------------------

def _induced_paths(adj, a, b, avail):
    """Chordless ``a``-``b`` paths with interior in ``avail``; yields (interior mask, vertex list)."""
    if adj[a] >> b & 1:
        yield 0, [a, b]
        return
    bbit = 1 << b
    start = adj[a] & avail

    def rec(v, used, seq, blocked):
        av = adj[v]
        if av & bbit:
            yield used, seq + [b]
            return
        nxt = av & avail & ~used & ~blocked
        while nxt:
            low = nxt & -nxt
            nxt ^= low
            u = low.bit_length() - 1
            yield from rec(u, used | low, seq + [u], blocked | av)

    while start:
        low = start & -start
        start ^= low
        u = low.bit_length() - 1
        yield from rec(u, low, [a, u], adj[a] | (1 << a))


@lru_cache(maxsize=65536)
def _btm_plan(adj: tuple, boundary: tuple):
    p = Graph.from_adj(adj)
    pattern = BoundariedGraph(p, boundary)
    bset = set(pattern.boundary)
    interior = [v for v in range(p.n) if v not in bset]
    isolated = [v for v in interior if p.degree(v) == 0]
    active = [v for v in interior if p.degree(v) > 0]
    placed = set(pattern.boundary)
    order = []
    rest = set(active)
    while rest:
        v = max(rest, key=lambda x: (sum(1 for u in p.neighbors(x) if u in placed), p.degree(x), -x))
        order.append(v)
        placed.add(v)
        rest.discard(v)
    steps = []
    done = set()
    first = []
    for a, b in p.edges():
        if a in bset and b in bset:
            first.append((a, b))
            done.add((a, b))
    steps.append((None, first))
    placed = set(pattern.boundary)
    for v in order:
        placed.add(v)
        es = []
        for u in p.neighbors(v):
            if u in placed:
                e = (min(u, v), max(u, v))
                if e not in done:
                    done.add(e)
                    es.append(e)
        steps.append((v, es))
    return steps, len(isolated), isolated, tuple(p.degrees())


def has_btm(host: BoundariedGraph, pattern: BoundariedGraph, witness: bool = False):
    """Decide ``pattern`` ≼_tm ``host`` with boundaries matched position-wise.

    With ``witness`` the return value is ``(found, TmPair | None)``.
    """
    if host.t != pattern.t:
        raise IncompatibleBoundaries(f"boundary sizes differ: {host.t} vs {pattern.t}")
    g, p = host.graph, pattern.graph
    fail = (False, None) if witness else False
    if p.n - pattern.t > g.n - host.t or p.m > g.m:
        return fail
    steps, n_iso, iso_vertices, pdeg = _btm_plan(p.adj, pattern.boundary)
    adj = g.adj
    hdeg = [a.bit_count() for a in adj]
    phi = {}
    for i, pv in enumerate(pattern.boundary):
        hv = host.boundary[i]
        if pdeg[pv] > hdeg[hv]:
            return fail
        phi[pv] = hv
    interior_host = g.full_mask & ~host.boundary_mask
    routes = {}

    def route_then(step, edges, idx, avail):
        # every routing of ``edges`` is tried before giving up on this placement
        if idx == len(edges):
            return place(step + 1, avail)
        a, b = edges[idx]
        for inner, seq in _induced_paths(adj, phi[a], phi[b], avail):
            routes[(a, b)] = seq
            if route_then(step, edges, idx + 1, avail & ~inner):
                return True
        routes.pop((a, b), None)
        return False

    def place(step, avail):
        if step == len(steps):
            return avail.bit_count() >= n_iso
        v, edges = steps[step]
        if v is None:
            return route_then(step, edges, 0, avail)
        if avail.bit_count() < (len(steps) - step) + n_iso:
            return False
        need = pdeg[v]
        cands = avail
        while cands:
            low = cands & -cands
            cands ^= low
            hv = low.bit_length() - 1
            if hdeg[hv] < need:
                continue
            phi[v] = hv
            if route_then(step, edges, 0, avail & ~low):
                return True
            del phi[v]
        return False

    ok = place(0, interior_host)
    if not ok:
        return fail
    if not witness:
        return True
    return True, _btm_witness(host, pattern, phi, routes, iso_vertices)


def _btm_witness(host, pattern, phi, routes, iso_vertices):
    used = set(phi.values())
    for seq in routes.values():
        used.update(seq)
    spare = [v for v in range(host.n) if v not in used and v not in set(host.boundary)]
    sigma = dict(phi)
    for v in iso_vertices:
        sigma[v] = spare.pop(0)
    edges = set()
    for seq in routes.values():
        for x, y in zip(seq, seq[1:]):
            edges.add((min(x, y), max(x, y)))
    pair = TmPair(sorted(edges), sorted(sigma.values()), sigma, dict(routes))
    validate_btm_witness(host, pattern, pair)
    return pair


def validate_btm_witness(host: BoundariedGraph, pattern: BoundariedGraph, pair: TmPair) -> None:
    g = host.graph
    for u, v in pair.edges:
        if not g.has_edge(u, v):
            raise ValidationError(f"witness edge {(u, v)} not in host")
    for i, b in enumerate(pattern.boundary):
        if pair.sigma[b] != host.boundary[i]:
            raise ValidationError("boundary is not fixed by the witness")
    local, order, tloc = _tm_subgraph(g.n, pair.edges, pair.branch)
    check_tm_pair(local, tloc)
    d = dissolve(local, tloc)
    # d has branch vertices in ascending host order
    branch_sorted = sorted(pair.branch)
    pos = {hv: i for i, hv in enumerate(branch_sorted)}
    inv = {hv: pv for pv, hv in pair.sigma.items()}
    pattern_of = [inv[hv] for hv in branch_sorted]
    for i in range(d.n):
        for j in range(i + 1, d.n):
            if d.has_edge(i, j) != pattern.graph.has_edge(pattern_of[i], pattern_of[j]):
                raise ValidationError("dissolution of the witness is not the pattern")
    if len(pos) != pattern.n:
        raise ValidationError("branch set size differs from pattern order")


def has_tm(host: Graph, pattern: Graph, witness: bool = False):
    return has_btm(BoundariedGraph(host, ()), BoundariedGraph(pattern, ()), witness=witness)


# -- ext ------------------------------------------------------------------------------

def _splits(g: BoundariedGraph):
    """All single vertex splits keeping every new interior vertex at degree >= 3."""
    bset = set(g.boundary)
    out = []
    for v in range(g.n):
        nb = g.graph.neighbors(v)
        d = len(nb)
        if v in bset:
            # v keeps part A, new interior vertex takes part B (|B| >= 2)
            for r in range(2, d + 1):
                for part in combinations(nb, r):
                    out.append((v, part))
        elif d >= 4:
            first = nb[0]
            for r in range(2, d - 1):
                for part in combinations(nb, r):
                    if first in part:
                        continue
                    out.append((v, part))
    for v, part in out:
        adj = list(g.graph.adj) + [0]
        w = g.n
        for x in part:
            adj[v] &= ~(1 << x)
            adj[x] &= ~(1 << v)
            adj[x] |= 1 << w
            adj[w] |= 1 << x
        adj[v] |= 1 << w
        adj[w] |= 1 << v
        yield BoundariedGraph(Graph.from_adj(adj), g.boundary)


def ext(h, cap: int = DEFAULT_EXT_DETAIL_CAP) -> list[BoundariedGraph]:
    """Topological-minor-minimal boundaried graphs that contain ``h`` as a minor.

    Accepts a :class:`Graph` (empty boundary) or a :class:`BoundariedGraph`.
    Results are canonical and sorted by canonical form.
    """
    if isinstance(h, Graph):
        h = BoundariedGraph(h, ())
    dh = detail(h)
    if dh > cap:
        raise BudgetError(f"ext input has detail {dh}, cap is {cap}", estimate=dh)
    bound = 3 * dh
    f0, c0 = canonicalize(h, cap=None)
    found = {f0: c0}
    frontier = [c0]
    while frontier:
        nxt = []
        for g in frontier:
            for s in _splits(g):
                if detail(s) > bound:
                    continue
                f, c = canonicalize(s, cap=None)
                if f not in found:
                    found[f] = c
                    nxt.append(c)
        frontier = nxt
    cands = sorted(found.items())
    keep = []
    for f, c in cands:
        minimal = True
        for f2, c2 in cands:
            if f2 == f or c2.n > c.n or c2.m > c.m:
                continue
            if has_btm(c, c2):
                minimal = False
                break
        if minimal:
            keep.append(c)
    return keep


# -- families -------------------------------------------------------------------------

_K5 = None
_K33 = None


def _kuratowski_forms():
    global _K5, _K33
    if _K5 is None:
        from .graph import complete, complete_bipartite

        _K5 = graph_form(complete(5))
        _K33 = graph_form(complete_bipartite(3, 3))
    return _K5, _K33


def is_F_minor_free(g: Graph, family: Sequence[Graph], cap: int = DEFAULT_PATTERN_CAP) -> bool:
    forms = set()
    for h in family:
        if h.n <= 12:
            forms.add(graph_form(h))
    k5, k33 = _kuratowski_forms()
    wagner = k5 in forms and k33 in forms
    planar = None
    for h in sorted(family, key=lambda x: (x.n, x.m)):
        if h.n > g.n or h.m > g.m:
            continue
        if wagner:
            if planar is None:
                planar = is_planar(g)
            if not planar:
                return False
            if graph_form(h) in (k5, k33):
                continue
        if has_minor(g, h, cap=cap):
            return False
    return True
