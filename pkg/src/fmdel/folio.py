"""Folios: the small boundaried topological minors of a boundaried graph.

The pattern universe for ``(t, d)`` lists every standard boundaried graph with
boundary ``0..t-1`` and detail at most ``d``, one per isomorphism class.  A
folio is the part of that universe a graph contains via :func:`has_btm`.

Patterns are tested in order of size and a pattern is skipped as soon as one
of its one-step reductions is missing, since containment is transitive.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass, field
from math import comb, factorial
from pathlib import Path

from .canon import canonicalize
from .containment import has_btm
from .errors import BudgetError, ParseError
from .graph import BoundariedGraph, Graph, detail, form_hex

UNIVERSE_VERSION = 1
MAX_T = 4
MAX_D = 4
MAX_ESTIMATE = 250_000
CLOSURE_CAP = 200_000
CACHE_ENV = "FMDEL_CACHE_DIR"


def cache_dir() -> Path:
    root = os.environ.get(CACHE_ENV)
    if root:
        return Path(root)
    return Path.home() / ".cache" / "fmdel"


def universe_estimate(t: int, d: int) -> int:
    """Upper estimate of the universe size: labelled edge sets over k!."""
    total = 0.0
    for k in range(d + 1):
        slots = comb(t + k, 2)
        total += sum(comb(slots, j) for j in range(d + 1)) / factorial(k)
    return int(total) + 1


def universe_feasible(t: int, d: int, max_t: int = MAX_T, max_d: int = MAX_D,
                      max_estimate: int = MAX_ESTIMATE) -> bool:
    return t <= max_t and d <= max_d and universe_estimate(t, d) <= max_estimate


@dataclass
class PatternUniverse:
    t: int
    d: int
    patterns: list[BoundariedGraph]
    forms: list[bytes]
    index: dict = field(default_factory=dict)
    _reductions: list | None = None
    _order: list | None = None

    def __post_init__(self):
        if not self.index:
            self.index = {f: i for i, f in enumerate(self.forms)}

    def __len__(self):
        return len(self.patterns)

    def reductions(self) -> list[tuple[int, ...]]:
        """Indices of the one-step reductions of each pattern."""
        if self._reductions is None:
            self._reductions = [
                tuple(sorted({self.index[f] for f in _one_step_forms(p)})) for p in self.patterns
            ]
        return self._reductions

    def order(self) -> list[int]:
        if self._order is None:
            self._order = sorted(range(len(self.patterns)),
                                 key=lambda i: (self.patterns[i].n, self.patterns[i].m, self.forms[i]))
        return self._order

    def encode(self) -> str:
        lines = [f"U {UNIVERSE_VERSION} {self.t} {self.d} {len(self.patterns)}"]
        lines.extend(p.to_line() for p in self.patterns)
        return "\n".join(lines) + "\n"

    @classmethod
    def decode(cls, text: str) -> "PatternUniverse":
        lines = text.splitlines()
        if not lines:
            raise ParseError("empty universe file")
        head = lines[0].split()
        if len(head) != 5 or head[0] != "U":
            raise ParseError(f"bad universe header: {lines[0]!r}")
        version, t, d, count = (int(x) for x in head[1:])
        if version != UNIVERSE_VERSION:
            raise ParseError(f"universe version {version} not supported")
        pats = [BoundariedGraph.decode(line) for line in lines[1:] if line.strip()]
        if len(pats) != count:
            raise ParseError(f"universe lists {len(pats)} patterns, header says {count}")
        forms = []
        canon = []
        for p in pats:
            f, c = canonicalize(p, cap=None)
            forms.append(f)
            canon.append(c)
        return cls(t, d, canon, forms)


def _one_step(g: BoundariedGraph):
    """Delete an edge, delete an isolated interior vertex, or dissolve an interior degree-2 vertex."""
    gr = g.graph
    t = g.t
    for e in gr.edges():
        yield BoundariedGraph(gr.without_edges([e]), range(t))
    for v in range(t, gr.n):
        d = gr.degree(v)
        if d == 0:
            h, _ = gr.remove_vertices([v])
            yield BoundariedGraph(h, range(t))
        elif d == 2:
            yield BoundariedGraph(_dissolve_vertex(gr, v), range(t))


def _dissolve_vertex(gr: Graph, v: int) -> Graph:
    u, w = gr.neighbors(v)
    h = gr if gr.has_edge(u, w) else gr.with_edges([(u, w)])
    out, _ = h.remove_vertices([v])
    return out


def _one_step_forms(g: BoundariedGraph) -> set[bytes]:
    s = g.standardized()
    return {canonicalize(h, cap=None)[0] for h in _one_step(s)}


def _build_universe(t: int, d: int) -> PatternUniverse:
    found = {}
    for k in range(d + 1):
        base = BoundariedGraph.standard(t, t + k)
        f, c = canonicalize(base, cap=None)
        level = {f: c}
        found.update(level)
        for _ in range(d):
            nxt = {}
            for g in level.values():
                gr = g.graph
                for u in range(gr.n):
                    for v in range(u + 1, gr.n):
                        if gr.adj[u] >> v & 1:
                            continue
                        h = BoundariedGraph(gr.with_edges([(u, v)]), range(t))
                        fh, ch = canonicalize(h, cap=None)
                        if fh not in nxt:
                            nxt[fh] = ch
            found.update(nxt)
            level = nxt
    forms = sorted(found)
    return PatternUniverse(t, d, [found[f] for f in forms], forms)


_MEMORY: dict = {}


def pattern_universe(t: int, d: int, use_cache: bool = True, max_t: int = MAX_T, max_d: int = MAX_D,
                     max_estimate: int = MAX_ESTIMATE) -> PatternUniverse:
    """All boundaried graphs on boundary ``[t]`` with detail at most ``d``.

    Raises :class:`BudgetError` with the a-priori estimate when ``(t, d)`` is
    outside the feasibility limits.
    """
    key = (t, d)
    if key in _MEMORY:
        return _MEMORY[key]
    est = universe_estimate(t, d)
    if t > max_t or d > max_d or est > max_estimate:
        raise BudgetError(
            f"pattern universe (t={t}, d={d}) is infeasible: estimated {est} patterns "
            f"(limits t<={max_t}, d<={max_d}, estimate<={max_estimate})",
            estimate=est,
        )
    path = cache_dir() / f"universe_t{t}_d{d}.txt"
    uni = None
    if use_cache and path.exists():
        try:
            uni = PatternUniverse.decode(path.read_text())
            if (uni.t, uni.d) != key:
                uni = None
        except ParseError:
            uni = None
    if uni is None:
        uni = _build_universe(t, d)
        if use_cache:
            try:
                path.parent.mkdir(parents=True, exist_ok=True)
                tmp = path.with_suffix(".tmp")
                tmp.write_text(uni.encode())
                tmp.replace(path)
            except OSError:
                pass
    _MEMORY[key] = uni
    return uni


@dataclass(frozen=True)
class Folio:
    t: int
    d: int
    forms: frozenset

    def __len__(self):
        return len(self.forms)

    def __contains__(self, item):
        if isinstance(item, BoundariedGraph):
            item = canonicalize(item, cap=None)[0]
        return item in self.forms

    def indices(self, universe: PatternUniverse) -> tuple[int, ...]:
        return tuple(sorted(universe.index[f] for f in self.forms))

    def graphs(self) -> list[BoundariedGraph]:
        from .canon import decode_form

        return [decode_form(f) for f in sorted(self.forms)]


@dataclass(frozen=True)
class FolioSignature:
    digest: str
    t: int
    d: int
    indices: tuple = ()

    def __str__(self):
        return self.digest


def folio(g: BoundariedGraph, d: int, universe: PatternUniverse | None = None) -> Folio:
    """The universe members contained in ``g`` as boundaried topological minors."""
    uni = universe or pattern_universe(g.t, d)
    red = uni.reductions()
    present = [False] * len(uni)
    host = g.standardized()
    hn_int = host.n - host.t
    hm = host.m
    for i in uni.order():
        p = uni.patterns[i]
        if p.n - p.t > hn_int or p.m > hm:
            continue
        if not all(present[j] for j in red[i]):
            continue
        if has_btm(host, p):
            present[i] = True
    return Folio(g.t, d, frozenset(uni.forms[i] for i in range(len(uni)) if present[i]))


def folio_closure(g: BoundariedGraph, d: int, cap: int = CLOSURE_CAP) -> Folio:
    """Folio by exhaustive downward closure; a test oracle for :func:`folio`."""
    start_f, start = canonicalize(g, cap=None)
    seen = {start_f}
    stack = [start]
    out = set()
    while stack:
        h = stack.pop()
        hf = canonicalize(h, cap=None)[0]
        if detail(h) <= d:
            out.add(hf)
        for r in _one_step_nonisolated(h):
            f, c = canonicalize(r, cap=None)
            if f not in seen:
                seen.add(f)
                if len(seen) > cap:
                    raise BudgetError(f"closure exceeded {cap} graphs", estimate=len(seen))
                stack.append(c)
    return Folio(g.t, d, frozenset(out))


def _one_step_nonisolated(g: BoundariedGraph):
    # closure moves: any interior vertex may be deleted
    gr = g.graph
    t = g.t
    for e in gr.edges():
        yield BoundariedGraph(gr.without_edges([e]), range(t))
    for v in range(t, gr.n):
        h, _ = gr.remove_vertices([v])
        yield BoundariedGraph(h, range(t))
        if gr.degree(v) == 2:
            yield BoundariedGraph(_dissolve_vertex(gr, v), range(t))


def signature_of(fol: Folio, universe: PatternUniverse | None = None) -> FolioSignature:
    h = hashlib.sha256()
    h.update(f"folio t={fol.t} d={fol.d};".encode())
    for f in sorted(fol.forms):
        h.update(len(f).to_bytes(2, "big"))
        h.update(f)
    idx = fol.indices(universe) if universe is not None else ()
    return FolioSignature(h.hexdigest(), fol.t, fol.d, idx)


def folio_signature(g: BoundariedGraph, d: int, universe: PatternUniverse | None = None) -> FolioSignature:
    uni = universe or pattern_universe(g.t, d)
    return signature_of(folio(g, d, uni), uni)


def describe(fol: Folio) -> list[str]:
    """One encoded line per pattern, sorted by canonical form."""
    return [f"{form_hex(f)} {g.to_line()}" for f, g in zip(sorted(fol.forms), fol.graphs())]
