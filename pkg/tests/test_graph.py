from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fmdel.canon import canonicalize, decode_form
from fmdel.errors import CanonicalizationTooLarge, IncompatibleBoundaries, ParseError
from fmdel.graph import (BoundariedGraph, Graph, canonical_form, compatible, complete, detail, glue,
                         glue_boundaried, path, petersen)


def bg(t, n, edges):
    return BoundariedGraph.standard(t, n, edges)


def test_graph_rejects_loops_and_dedupes():
    with pytest.raises(ValueError):
        Graph(2, [(0, 0)])
    g = Graph(3, [(0, 1), (1, 0), (1, 2)])
    assert g.m == 2
    assert g.neighbors(1) == [0, 2]


def test_detail_examples():
    assert detail(bg(3, 3, [])) == 0
    assert detail(bg(2, 2, [(0, 1)])) == 1
    assert detail(bg(2, 3, [(0, 2), (2, 1)])) == 2


def test_compatible_examples():
    e = bg(2, 2, [(0, 1)])
    assert compatible(e, bg(2, 2, [(0, 1)]))
    assert not compatible(e, bg(2, 2, []))
    p = bg(2, 3, [(0, 2), (1, 2)])
    assert compatible(p, p)


def test_glue_examples():
    one = bg(1, 1, [])
    g = glue(one, one)
    assert (g.n, g.m) == (1, 0)
    e = bg(2, 2, [(0, 1)])
    assert glue(e, e).m == 1
    p = bg(2, 3, [(0, 2), (2, 1)])
    c = glue(p, p)
    assert (c.n, c.m) == (4, 4)
    assert all(d == 2 for d in c.degrees())


def test_glue_incompatible_names_pair():
    with pytest.raises(IncompatibleBoundaries, match=r"\(1, 2\)"):
        glue(bg(2, 2, [(0, 1)]), bg(2, 2, []))
    # the lenient mode unites boundary edges
    assert glue(bg(2, 2, [(0, 1)]), bg(2, 2, []), strict=False).m == 1


def test_canonical_form_examples():
    a = BoundariedGraph(Graph(3, [(0, 2), (2, 1)]), [0, 1])
    b = BoundariedGraph(Graph(3, [(1, 0), (0, 2)]), [1, 2])
    assert canonical_form(a) == canonical_form(b)
    assert canonical_form(a) != canonical_form(bg(2, 2, [(0, 1)]))
    # star with center x and leaves b1, b2, b3 (plus two spare interior
    # vertices so that relabelling is not trivial)
    forms = set()
    for center in range(3, 6):
        star = bg(3, 6, [(0, center), (1, center), (2, center)])
        forms.add(canonical_form(star))
    assert len(forms) == 1


def test_canonical_form_boundary_is_ordered():
    a = bg(2, 3, [(0, 2)])
    b = bg(2, 3, [(1, 2)])
    assert canonical_form(a) != canonical_form(b)


def test_canonicalization_cap():
    big = BoundariedGraph(path(14), [])
    with pytest.raises(CanonicalizationTooLarge):
        canonicalize(big, cap=12)
    assert canonicalize(big, cap=None)[0]


def test_form_roundtrip():
    g = bg(2, 5, [(0, 2), (2, 3), (3, 1), (3, 4)])
    f, c = canonicalize(g, cap=None)
    back = decode_form(f)
    assert canonicalize(back, cap=None)[0] == f
    assert back.boundary == (0, 1)


def test_encode_decode_roundtrip():
    g = bg(2, 4, [(0, 2), (2, 3), (3, 1)])
    assert BoundariedGraph.decode(g.encode()) == g
    assert BoundariedGraph.decode(g.to_line()) == g
    with pytest.raises(ParseError):
        BoundariedGraph.decode("2 3 1\nB 1\n1 2")


def _brute_iso(a: BoundariedGraph, b: BoundariedGraph) -> bool:
    if a.n != b.n or a.t != b.t or a.m != b.m:
        return False
    t = a.t
    ea = a.graph.edge_set()
    for perm in itertools.permutations(range(t, a.n)):
        mp = list(range(t)) + list(perm)
        if all(b.graph.has_edge(mp[u], mp[v]) for u, v in ea):
            return True
    return False


def _random_bg(rng, t, k, p):
    n = t + k
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    return bg(t, n, edges)


def test_forms_agree_with_brute_force_isomorphism():
    rng = random.Random(11)
    for _ in range(300):
        t = rng.randint(0, 3)
        k = rng.randint(0, 5)
        a = _random_bg(rng, t, k, 0.4)
        b = _random_bg(rng, t, k, 0.4)
        assert (canonical_form(a) == canonical_form(b)) == _brute_iso(a, b)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 3), st.integers(0, 8), st.integers(0, 2**30), st.floats(0.1, 0.9))
def test_form_invariant_under_interior_relabel(t, k, seed, p):
    rng = random.Random(seed)
    g = _random_bg(rng, t, k, p)
    perm = list(range(t, t + k))
    rng.shuffle(perm)
    mp = list(range(t)) + perm
    h = BoundariedGraph(g.graph.relabel(mp), range(t))
    assert canonical_form(g) == canonical_form(h)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3), st.integers(0, 2**30))
def test_glue_symmetric(t, k1, k2, seed):
    rng = random.Random(seed)
    a = _random_bg(rng, t, k1, 0.5)
    b = _random_bg(rng, t, k2, 0.5)
    ab = glue_boundaried(a, b)
    ba = glue_boundaried(b, a)
    assert canonical_form(ab) == canonical_form(ba)
    assert ab.n == a.n + b.n - t


def test_detail_monotone_under_deletion():
    rng = random.Random(3)
    for _ in range(100):
        g = _random_bg(rng, 2, 4, 0.5)
        d = detail(g)
        for e in g.graph.edges():
            assert detail(BoundariedGraph(g.graph.without_edges([e]), range(2))) <= d
        for v in range(2, g.n):
            h, _ = g.graph.remove_vertices([v])
            assert detail(BoundariedGraph(h, range(2))) <= d


def test_named_graphs():
    assert complete(5).m == 10
    p = petersen()
    assert (p.n, p.m) == (10, 15)
    assert set(p.degrees()) == {3}
