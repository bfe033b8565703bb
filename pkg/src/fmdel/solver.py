"""Exact F-M-Deletion over nice tree decompositions.

A DP state at a node is the set of surviving bag vertices together with the
graph left over from everything below the node (deleted vertices removed),
boundaried by the survivors in ascending vertex order.  States with equal
survivors and equivalent graphs are merged, keeping the cheaper one.

Equivalence-preserving shrinking (``compress``) happens in three layers:

* dead states, whose graph already contains a forbidden minor, are dropped;
* trimming removes parts no gluing partner can ever use for a forbidden
  minor (boundary-free components, interior leaves, interior degree-two
  vertices), each rule enabled only when it is safe for every pattern;
* the trimmed graph is keyed by its canonical form.  When its detail is at
  most the folio budget it is already the smallest member of its folio class;
  otherwise a representative table is consulted when the pattern universe is
  small enough, and the graph is kept as is when it is not.

Deletions are charged at Introduce nodes.  Both subtrees of a Join introduce
every bag vertex, so a Join subtracts the bag vertices deleted on both sides.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

from .canon import DEFAULT_CAP, canonicalize
from .containment import is_F_minor_free
from .errors import BudgetError, StateGuardTripped, ValidationError
from .families import default_detail
from .folio import universe_feasible
from .graph import BoundariedGraph, Graph, bits_to_list, detail, glue_boundaried, iter_bits
from .representatives import DEAD, RepresentativeTable, lookup_rep
from .treedecomp import (FORGET, INTRODUCE, JOIN, LEAF, NiceTreeDecomposition, TreeDecomposition,
                         exact_tw, minfill_td, to_nice, validate_td)

DEFAULT_STATE_GUARD = 2_000_000
_MISS = object()
ORACLE_CAP = 16


@dataclass
class SolveOptions:
    compress: bool = True
    detail: int | None = None
    recover: bool = True
    state_guard: int = DEFAULT_STATE_GUARD
    canon_cap: int = DEFAULT_CAP
    precheck: bool = True
    split_components: bool = True
    table: RepresentativeTable | None = None
    cost_offset: int = 0  # fault injection for harness tests; 0 in real runs


@dataclass
class SolveResult:
    opt: int
    deletion_set: list[int] | None
    width: int
    stats: dict = field(default_factory=dict)


@dataclass(frozen=True)
class DPState:
    survivors: tuple
    graph: BoundariedGraph
    cost: int

    @property
    def key(self):
        return self.survivors, self.graph.canonical()[0]


class _Compressor:
    """Per-solve transition caches and the compress step."""

    def __init__(self, family: Sequence[Graph], opts: SolveOptions):
        self.family = list(family)
        self.opts = opts
        self.d = opts.detail if opts.detail is not None else default_detail(self.family)
        connected = all(h.is_connected() for h in self.family)
        mindeg = min(min(h.degrees()) for h in self.family)
        triangle_or_cubic = all(min(h.degrees()) >= 3 or (h.n == 3 and h.m == 3) for h in self.family)
        self.rule_components = opts.compress and connected
        self.rule_leaves = opts.compress and mindeg >= 2
        self.rule_suppress = opts.compress and triangle_or_cubic
        self.cubic = all(min(h.degrees()) >= 3 for h in self.family)
        self.introduce_cache: dict = {}
        self.forget_cache: dict = {}
        self.join_cache: dict = {}
        self.tables: dict = {}
        if opts.table is not None:
            self.tables[opts.table.t] = opts.table
        self.stats = {"compress_calls": 0, "compress_hits": 0, "dead": 0, "trimmed": 0,
                      "table_lookups": 0, "table_inserts": 0, "verbatim": 0}

    # graphs handled here are standard: boundary 0..t-1

    def compress(self, g: BoundariedGraph, check_dead: bool = True):
        """Return the canonical replacement of ``g`` or None when dead."""
        self.stats["compress_calls"] += 1
        if check_dead and not is_F_minor_free(g.graph, self.family):
            self.stats["dead"] += 1
            return None
        if self.opts.compress:
            trimmed = self.trim(g)
            if trimmed.n != g.n or trimmed.m != g.m:
                self.stats["trimmed"] += 1
            g = trimmed
        form, canon = canonicalize(g, cap=self.opts.canon_cap)
        if not self.opts.compress or detail(canon) <= self.d:
            return canon
        if universe_feasible(canon.t, self.d):
            table = self.tables.get(canon.t)
            if table is None:
                table = RepresentativeTable(canon.t, self.d, self.family)
                self.tables[canon.t] = table
            rep, found = lookup_rep(table, canon)
            self.stats["table_lookups"] += 1
            if not found:
                self.stats["table_inserts"] += 1
            if rep is DEAD:
                return None
            return rep
        self.stats["verbatim"] += 1
        return canon

    def trim(self, g: BoundariedGraph) -> BoundariedGraph:
        t = g.t
        adj = list(g.graph.adj)
        n = len(adj)
        bmask = (1 << t) - 1
        alive = (1 << n) - 1
        changed = True
        while changed:
            changed = False
            if self.rule_components:
                for comp in Graph.from_adj([a & alive for a in adj]).component_masks(alive):
                    if not comp & bmask:
                        alive &= ~comp
                        for v in iter_bits(comp):
                            adj[v] = 0
                        changed = True
            for v in range(t, n):
                if not alive >> v & 1:
                    continue
                a = adj[v] & alive
                d = a.bit_count()
                bit = 1 << v
                if self.rule_leaves and d <= 1:
                    alive &= ~bit
                    for u in iter_bits(a):
                        adj[u] &= ~bit
                    adj[v] = 0
                    changed = True
                elif self.rule_suppress and d == 2:
                    u, w = bits_to_list(a)
                    if u < t and w < t:
                        continue
                    adjacent = adj[u] >> w & 1
                    if adjacent and not self.cubic:
                        continue
                    alive &= ~bit
                    adj[u] &= ~bit
                    adj[w] &= ~bit
                    adj[u] |= 1 << w
                    adj[w] |= 1 << u
                    adj[v] = 0
                    changed = True
        if alive == (1 << n) - 1:
            return g
        keep = [v for v in range(n) if alive >> v & 1]
        return BoundariedGraph(Graph.from_adj(adj).induced(keep), range(t))

    # transitions on canonical state graphs

    def introduce(self, g: BoundariedGraph, pos: int, nbr_positions: tuple):
        key = (g.canonical()[0], pos, nbr_positions)
        hit = self.introduce_cache.get(key, _MISS)
        if hit is not _MISS:
            self.stats["compress_hits"] += 1
            return hit
        t = g.t
        n = g.n
        # new vertex goes to boundary position ``pos``; old ids at or after pos shift by one
        new_of_old = [i if i < pos else i + 1 for i in range(n)]
        adj = [0] * (n + 1)
        for u, v in g.graph.edges():
            a, b = new_of_old[u], new_of_old[v]
            adj[a] |= 1 << b
            adj[b] |= 1 << a
        for p in nbr_positions:
            q = p if p < pos else p + 1
            adj[pos] |= 1 << q
            adj[q] |= 1 << pos
        res = self.compress(BoundariedGraph(Graph.from_adj(adj), range(t + 1)))
        self.introduce_cache[key] = res
        return res

    def forget(self, g: BoundariedGraph, pos: int):
        key = (g.canonical()[0], pos)
        hit = self.forget_cache.get(key, _MISS)
        if hit is not _MISS:
            self.stats["compress_hits"] += 1
            return hit
        boundary = [i for i in range(g.t) if i != pos]
        res = self.compress(BoundariedGraph(g.graph, boundary).standardized(), check_dead=False)
        self.forget_cache[key] = res
        return res

    def join(self, g1: BoundariedGraph, g2: BoundariedGraph):
        f1, f2 = g1.canonical()[0], g2.canonical()[0]
        key = (f1, f2) if f1 <= f2 else (f2, f1)
        hit = self.join_cache.get(key, _MISS)
        if hit is not _MISS:
            self.stats["compress_hits"] += 1
            return hit
        res = self.compress(glue_boundaried(g1, g2, strict=False))
        self.join_cache[key] = res
        return res


# -- elementary transitions (public, for tests and the CLI) ----------------------------

def _empty_state_graph() -> BoundariedGraph:
    return canonicalize(BoundariedGraph(Graph(0), ()), cap=None)[1]


def dp_leaf() -> DPState:
    return DPState((), _empty_state_graph(), 0)


def dp_introduce(state: DPState, v: int, nbrs, comp: _Compressor) -> list[DPState]:
    """The delete branch and, unless dead, the keep branch."""
    if v in state.survivors:
        raise ValueError(f"vertex {v} already in the bag")
    out = [DPState(state.survivors, state.graph, state.cost + 1)]
    surv = tuple(sorted(state.survivors + (v,)))
    pos = surv.index(v)
    old_pos = {u: i for i, u in enumerate(state.survivors)}
    nb = tuple(sorted(old_pos[u] for u in nbrs if u in old_pos))
    g = comp.introduce(state.graph, pos, nb)
    if g is not None:
        out.append(DPState(surv, g, state.cost))
    return out


def dp_forget(state: DPState, v: int, comp: _Compressor) -> DPState | None:
    if v not in state.survivors:
        return state
    pos = state.survivors.index(v)
    g = comp.forget(state.graph, pos)
    if g is None:
        return None
    return DPState(tuple(u for u in state.survivors if u != v), g, state.cost)


def dp_join(s1: DPState, s2: DPState, bag_size: int, comp: _Compressor) -> DPState | None:
    if s1.survivors != s2.survivors:
        return None
    g = comp.join(s1.graph, s2.graph)
    if g is None:
        return None
    return DPState(s1.survivors, g, s1.cost + s2.cost - (bag_size - len(s1.survivors)))


def make_compressor(family: Sequence[Graph], opts: SolveOptions | None = None) -> _Compressor:
    return _Compressor(family, opts or SolveOptions())


# -- driver -------------------------------------------------------------------------------

def _decomposition_for(g: Graph) -> TreeDecomposition:
    if g.n <= 20:
        return exact_tw(g)[1]
    return minfill_td(g)


def _restrict_td(td: TreeDecomposition, keep: list[int]) -> TreeDecomposition:
    pos = {v: i for i, v in enumerate(keep)}
    bags = [frozenset(pos[v] for v in b if v in pos) for b in td.bags]
    return TreeDecomposition(bags, list(td.edges), len(keep))


def solve(g: Graph, family: Sequence[Graph], td: TreeDecomposition | NiceTreeDecomposition | None = None,
          opts: SolveOptions | None = None) -> SolveResult:
    """Minimum number of vertex deletions leaving ``g`` free of every minor in ``family``."""
    opts = opts or SolveOptions()
    fam = list(family)
    if not fam or any(h.n == 0 for h in fam):
        raise ValidationError("family must be non-empty and contain no empty graph")
    start = time.perf_counter()
    if td is None:
        td = _decomposition_for(g)
    if isinstance(td, NiceTreeDecomposition):
        nice = td
        plain = td.as_td()
    else:
        plain = td
        nice = None
    rep = validate_td(g, plain)
    if not rep.ok:
        raise ValidationError("invalid tree decomposition: " + "; ".join(rep.violations))
    width = plain.width
    if opts.precheck and is_F_minor_free(g, fam):
        return SolveResult(0, [] if opts.recover else None, width,
                           {"nodes": 0, "states_max": 0, "compress_hits": 0, "table_inserts": 0,
                            "time_ms": _ms(start), "precheck": True})
    comp = _Compressor(fam, opts)
    connected = all(h.is_connected() for h in fam)
    parts = g.component_masks() if (opts.split_components and connected and nice is None) else [g.full_mask]
    total = 0
    deletion: list[int] | None = [] if opts.recover else None
    stats = {"nodes": 0, "states_max": 0, "states_total": 0, "components": len(parts)}
    for part in parts:
        if len(parts) == 1:
            sub, keep, sub_nice = g, list(range(g.n)), nice or to_nice(plain)
        else:
            keep = bits_to_list(part)
            sub = g.induced(keep)
            if opts.precheck and is_F_minor_free(sub, fam):
                continue
            sub_nice = to_nice(_restrict_td(plain, keep))
        opt, dels, st = _run_dp(sub, sub_nice, comp, opts)
        total += opt
        if deletion is not None:
            deletion.extend(keep[v] for v in dels)
        stats["nodes"] += st["nodes"]
        stats["states_total"] += st["states_total"]
        stats["states_max"] = max(stats["states_max"], st["states_max"])
    stats.update(comp.stats)
    stats["table_inserts"] = comp.stats["table_inserts"]
    stats["time_ms"] = _ms(start)
    if deletion is not None:
        deletion.sort()
    return SolveResult(total, deletion, width, stats)


def _ms(start):
    return round((time.perf_counter() - start) * 1000, 3)


def _run_dp(g: Graph, nice: NiceTreeDecomposition, comp: _Compressor, opts: SolveOptions):
    tables: dict = {}
    bps: dict = {}
    states_max = 0
    states_total = 0
    nodes = nice.nodes
    guard = opts.state_guard
    for x in nice.postorder():
        node = nodes[x]
        table: dict = {}

        def put(state: DPState, bp):
            k = (state.survivors, state.graph.canonical()[0])
            old = table.get(k)
            if old is None or state.cost < old[0].cost:
                table[k] = (state, bp)

        if node.kind == LEAF:
            put(dp_leaf(), None)
        elif node.kind == INTRODUCE:
            v = node.vertex
            child = tables.pop(node.children[0])
            nbrs = [u for u in g.neighbors(v) if u in node.bag]
            for ck, (st, _) in child.items():
                outs = dp_introduce(st, v, nbrs, comp)
                dele = outs[0]
                if opts.cost_offset and st.survivors:
                    dele = DPState(dele.survivors, dele.graph, dele.cost + opts.cost_offset)
                put(dele, (ck, True))
                if len(outs) > 1:
                    put(outs[1], (ck, False))
        elif node.kind == FORGET:
            v = node.vertex
            child = tables.pop(node.children[0])
            for ck, (st, _) in child.items():
                res = dp_forget(st, v, comp)
                if res is not None:
                    put(res, ck)
        elif node.kind == JOIN:
            left = tables.pop(node.children[0])
            right = tables.pop(node.children[1])
            by_surv: dict = {}
            for rk, (st, _) in right.items():
                by_surv.setdefault(st.survivors, []).append((rk, st))
            bag_size = len(node.bag)
            for lk, (s1, _) in left.items():
                for rk, s2 in by_surv.get(s1.survivors, ()):
                    res = dp_join(s1, s2, bag_size, comp)
                    if res is not None:
                        put(res, (lk, rk))
        else:
            raise ValidationError(f"unknown node kind {node.kind!r}")
        if len(table) > guard:
            raise StateGuardTripped(
                f"node {x} produced {len(table)} states (guard {guard})",
                stats={"node": x, "states": len(table), "states_max": max(states_max, len(table)),
                       "nodes_done": len(tables), **comp.stats},
            )
        states_max = max(states_max, len(table))
        states_total += len(table)
        tables[x] = table
        if opts.recover:
            bps[x] = {k: bp for k, (_, bp) in table.items()}
    root = tables[nice.root]
    if not root:
        raise ValidationError("no state survived at the root")
    best_key = min(root, key=lambda k: (root[k][0].cost, k))
    opt = root[best_key][0].cost
    dels = _recover(nice, best_key, bps) if opts.recover else []
    return opt, dels, {"nodes": len(nodes), "states_max": states_max, "states_total": states_total}


def _recover(nice: NiceTreeDecomposition, root_key, bps: dict) -> list[int]:
    out = []
    stack = [(nice.root, root_key)]
    while stack:
        x, k = stack.pop()
        node = nice.nodes[x]
        bp = bps[x][k]
        if node.kind == LEAF:
            continue
        if node.kind == INTRODUCE:
            ck, deleted = bp
            if deleted:
                out.append(node.vertex)
            stack.append((node.children[0], ck))
        elif node.kind == FORGET:
            stack.append((node.children[0], bp))
        else:
            lk, rk = bp
            stack.append((node.children[0], lk))
            stack.append((node.children[1], rk))
    return sorted(set(out))


def oracle_solve(g: Graph, family: Sequence[Graph], cap: int = ORACLE_CAP, witness: bool = False):
    """Smallest deletion set by trying all subsets in order of size."""
    if g.n > cap:
        raise BudgetError(f"oracle limited to {cap} vertices, graph has {g.n}", estimate=g.n)
    fam = list(family)
    for k in range(g.n + 1):
        for s in combinations(range(g.n), k):
            rest, _ = g.remove_vertices(s)
            if is_F_minor_free(rest, fam):
                return (k, list(s)) if witness else k
    raise AssertionError("deleting every vertex always works")


def verify_deletion(g: Graph, family: Sequence[Graph], deletion: Sequence[int]) -> bool:
    rest, _ = g.remove_vertices(deletion)
    return is_F_minor_free(rest, list(family))
