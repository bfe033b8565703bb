"""Canonical labelling of boundaried graphs.

Boundary vertices keep their positions; only interior vertices are permuted.
Colour refinement on counts of neighbours per cell splits the interior, then
the remaining ties are broken by exhaustive individualisation.  Mutual twins
inside a cell are interchangeable, so only one of them is branched on.

The resulting byte string is ``t``, ``n`` and the adjacency rows under the
canonical order.  Equal bytes means isomorphic with the boundary fixed.
"""

from __future__ import annotations

from functools import lru_cache

from .errors import CanonicalizationTooLarge
from .graph import BoundariedGraph, Graph

DEFAULT_CAP = 12


def _refine(adj, cells):
    while True:
        masks = []
        for cell in cells:
            m = 0
            for v in cell:
                m |= 1 << v
            masks.append(m)
        out = []
        changed = False
        for cell in cells:
            if len(cell) == 1:
                out.append(cell)
                continue
            groups = {}
            for v in cell:
                a = adj[v]
                key = tuple((a & m).bit_count() for m in masks)
                groups.setdefault(key, []).append(v)
            if len(groups) == 1:
                out.append(cell)
            else:
                changed = True
                for key in sorted(groups):
                    out.append(groups[key])
        cells = out
        if not changed:
            return cells


def _twin_heads(adj, cell):
    heads = []
    seen_open = {}
    seen_closed = {}
    for v in cell:
        a = adj[v]
        if a in seen_open:
            continue
        c = a | (1 << v)
        hit = False
        for u, cu in seen_closed.items():
            if cu == c:
                hit = True
                break
        if hit:
            continue
        seen_open[a] = v
        seen_closed[v] = c
        heads.append(v)
    return heads


def _code(adj, order):
    pos = [0] * len(order)
    for i, v in enumerate(order):
        pos[v] = i
    rows = []
    for v in order:
        r = 0
        a = adj[v]
        while a:
            low = a & -a
            r |= 1 << pos[low.bit_length() - 1]
            a ^= low
        rows.append(r)
    return tuple(rows)


def _search(adj, cells, best):
    idx = -1
    for i, cell in enumerate(cells):
        if len(cell) > 1:
            idx = i
            break
    if idx < 0:
        order = [c[0] for c in cells]
        code = _code(adj, order)
        if best[0] is None or code < best[0]:
            best[0] = code
            best[1] = order
        return
    cell = cells[idx]
    for v in _twin_heads(adj, cell):
        rest = [u for u in cell if u != v]
        split = cells[:idx] + [[v], rest] + cells[idx + 1:]
        _search(adj, _refine(adj, split), best)


@lru_cache(maxsize=400_000)
def _canon_standard(adj: tuple, t: int):
    n = len(adj)
    cells = [[i] for i in range(t)]
    if n > t:
        cells.append(list(range(t, n)))
    cells = _refine(adj, cells)
    best = [None, None]
    _search(adj, cells, best)
    code, order = best
    nb = max(1, (n + 7) // 8)
    form = bytes([t, n]) + b"".join(r.to_bytes(nb, "little") for r in code)
    return form, tuple(order), code


def canonicalize(g: BoundariedGraph, cap: int | None = DEFAULT_CAP) -> tuple[bytes, BoundariedGraph]:
    """Return ``(form, h)`` where ``h`` is ``g`` relabelled into canonical order.

    ``h`` is standard: boundary vertices ``0..t-1``, interior after them.
    """
    interior = g.n - g.t
    if cap is not None and interior > cap:
        raise CanonicalizationTooLarge(
            f"canonicalization too large: {interior} interior vertices (cap {cap})",
            estimate=interior,
        )
    s = g.standardized()
    form, order, code = _canon_standard(s.graph.adj, s.t)
    h = BoundariedGraph(Graph.from_adj(code), range(s.t))
    h._canon = (form, h)
    return form, h


def graph_form(g: Graph, cap: int | None = DEFAULT_CAP) -> bytes:
    """Canonical form of an unboundaried graph (boundary of size zero)."""
    return canonicalize(BoundariedGraph(g, ()), cap=cap)[0]


def decode_form(form: bytes) -> BoundariedGraph:
    t, n = form[0], form[1]
    nb = max(1, (n + 7) // 8)
    rows = [int.from_bytes(form[2 + i * nb: 2 + (i + 1) * nb], "little") for i in range(n)]
    return BoundariedGraph(Graph.from_adj(rows), range(t))
