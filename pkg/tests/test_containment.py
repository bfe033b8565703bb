from __future__ import annotations

import itertools
import random

import pytest

from fmdel.canon import canonicalize, graph_form
from fmdel.containment import (TmPair, check_tm_pair, contract, dissolve, ext, has_btm, has_minor,
                               has_minor_closure, has_tm, is_F_minor_free, is_planar, validate_btm_witness)
from fmdel.errors import BudgetError, IncompatibleBoundaries, ValidationError
from fmdel.graph import (BoundariedGraph, Graph, complete, complete_bipartite, cycle, path, petersen,
                         star)
from fmdel.instances import gen_wall


def bg(t, n, edges):
    return BoundariedGraph.standard(t, n, edges)


# -- dissolution ---------------------------------------------------------------

def test_dissolve_path():
    m = path(4)
    d = dissolve(m, [0, 3])
    assert (d.n, d.edges()) == (2, [(0, 1)])


def test_dissolve_triangle_unchanged():
    d = dissolve(complete(3), [0, 1, 2])
    assert graph_form(d) == graph_form(complete(3))


def test_dissolve_six_cycle_all_orders():
    c6 = cycle(6)
    forms = {graph_form(dissolve(c6, [0, 2, 4], order=list(o))) for o in itertools.permutations([1, 3, 5])}
    assert forms == {graph_form(complete(3))}


def test_dissolve_rejects_bad_pairs():
    with pytest.raises(ValidationError):
        dissolve(star(3), [1, 2, 3])  # centre has degree 3 off T
    with pytest.raises(ValidationError):
        check_tm_pair(Graph(4, [(1, 2), (2, 3), (3, 1)]), [0])  # floating cycle


def test_dissolve_order_independent_random():
    rng = random.Random(5)
    for _ in range(100):
        # subdivide a random small pattern, then dissolve in random orders
        k = rng.randint(2, 5)
        pat = [(u, v) for u in range(k) for v in range(u + 1, k) if rng.random() < 0.6]
        edges, n = [], k
        for u, v in pat:
            s = rng.randint(0, 2)
            chain = [u] + list(range(n, n + s)) + [v]
            n += s
            edges.extend(zip(chain, chain[1:]))
        m = Graph(n, edges)
        others = list(range(k, n))
        ref = graph_form(dissolve(m, range(k)))
        for _ in range(3):
            rng.shuffle(others)
            assert graph_form(dissolve(m, range(k), order=others)) == ref
        assert ref == graph_form(Graph(k, pat))


# -- minors -------------------------------------------------------------------------

def test_has_minor_examples():
    assert has_minor(complete(3), complete(3))
    assert not has_minor(path(7), complete(3))
    assert not has_minor(star(6), complete(3))
    ok, model = has_minor(petersen(), complete(5), witness=True)
    assert ok
    model.validate(petersen(), complete(5))
    assert has_minor_closure(petersen(), complete(5))


def test_petersen_not_k6():
    assert not has_minor(petersen(), complete(6))


def test_has_minor_cap():
    with pytest.raises(BudgetError):
        has_minor(complete(9), complete(9))


def test_witness_validates_random():
    rng = random.Random(2)
    pats = [complete(3), complete(4), cycle(4), complete_bipartite(2, 3), path(3)]
    for _ in range(60):
        n = rng.randint(4, 9)
        g = Graph(n, [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.45])
        for h in pats:
            ok, model = has_minor(g, h, witness=True)
            assert ok == has_minor(g, h)
            if ok:
                model.validate(g, h)


def test_contract():
    g = contract(cycle(4), 0, 1)
    assert graph_form(g) == graph_form(complete(3))


def test_is_F_minor_free_examples():
    assert is_F_minor_free(gen_wall(13).graph, [complete(5), complete_bipartite(3, 3)])
    assert not is_F_minor_free(complete(5), [complete(5), complete_bipartite(3, 3)])
    assert is_F_minor_free(star(4), [complete(3)])


def test_planarity():
    assert is_planar(complete(4))
    assert not is_planar(complete_bipartite(3, 3))


# -- boundaried topological minors ---------------------------------------------------

def test_has_btm_examples():
    e = bg(2, 2, [(0, 1)])
    p = bg(2, 3, [(0, 2), (2, 1)])
    assert has_btm(e, e)
    assert has_btm(p, e)
    assert not has_btm(e, p)


def test_has_btm_boundary_mismatch():
    with pytest.raises(IncompatibleBoundaries):
        has_btm(bg(1, 1, []), bg(2, 2, []))


def test_has_btm_boundary_is_labelled():
    host = bg(2, 3, [(0, 2)])
    assert has_btm(host, bg(2, 3, [(0, 2)]))
    assert not has_btm(host, bg(2, 3, [(1, 2)]))


def test_btm_witness_validates():
    host = bg(2, 6, [(0, 2), (2, 3), (3, 1), (2, 4), (4, 5), (5, 3)])
    pat = bg(2, 4, [(0, 2), (2, 3), (3, 1), (2, 3)])
    ok, pair = has_btm(host, pat, witness=True)
    assert ok and isinstance(pair, TmPair)
    validate_btm_witness(host, pat, pair)


def test_tm_versus_minor():
    # K_{1,4} subdivided has a K_{1,4} topological minor; a cubic tree does not
    assert has_tm(star(4), star(4))
    cubic_tree = Graph(6, [(0, 1), (0, 2), (0, 3), (3, 4), (3, 5)])
    assert has_minor(cubic_tree, star(4))
    assert not has_tm(cubic_tree, star(4))


# -- ext ---------------------------------------------------------------------------------

def _form(g):
    return canonicalize(g if isinstance(g, BoundariedGraph) else BoundariedGraph(g, ()), cap=None)[0]


def test_ext_low_degree_patterns_are_their_own():
    assert [_form(x) for x in ext(complete(3))] == [_form(complete(3))]
    assert [_form(x) for x in ext(complete(4))] == [_form(complete(4))]


def test_ext_k5():
    got = {_form(x) for x in ext(complete(5))}
    assert _form(complete(5)) in got
    # split one vertex of K5 into two adjacent vertices taking 2 + 2 of its neighbours
    split = Graph(6, [(a, b) for a in range(1, 5) for b in range(a + 1, 5)]
                  + [(0, 1), (0, 2), (5, 3), (5, 4), (0, 5)])
    assert _form(split) in got
    for x in ext(complete(5)):
        assert max(x.m, x.n) <= 30
        assert has_minor(x.graph, complete(5))


def test_ext_members_are_tm_minimal():
    members = ext(complete_bipartite(1, 4))
    for a in members:
        for b in members:
            if a is not b:
                assert not has_btm(a, b) or _form(a) == _form(b)
