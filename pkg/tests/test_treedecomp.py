from __future__ import annotations

import random
from itertools import permutations

import pytest

from fmdel.errors import BudgetError, ParseError, ValidationError
from fmdel.graph import Graph, complete, cycle, path
from fmdel.instances import gen_grid, gen_partial_ktree
from fmdel.treedecomp import (FORGET, INTRODUCE, JOIN, LEAF, TreeDecomposition, emit_gr, emit_td, exact_tw,
                              minfill_td, ordering_width, parse_gr, parse_td, to_nice, trivial_td, validate_td)


def td(bags, edges, n):
    return TreeDecomposition([frozenset(b) for b in bags], edges, n)


def random_graph(rng, n, p):
    return Graph(n, [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p])


def brute_tw(g: Graph) -> int:
    return min(ordering_width(g, list(o)) for o in permutations(range(g.n)))


# -- PACE I/O ------------------------------------------------------------------------

def test_parse_gr_path():
    g = parse_gr("c comment\np tw 3 2\n1 2\n2 3\n")
    assert g == path(3)


@pytest.mark.parametrize("text", [
    "", "p td 3 2\n", "p tw 3 2\n1 2\n", "p tw 3 1\n1 4\n", "p tw 3 1\n2 2\n", "p tw 3 1\n1 x\n",
])
def test_parse_gr_errors(text):
    with pytest.raises(ParseError):
        parse_gr(text)


def test_parse_gr_duplicate_warns():
    with pytest.warns(UserWarning):
        g = parse_gr("p tw 2 2\n1 2\n2 1\n")
    assert g.m == 1


def test_parse_td_single_bag():
    t = parse_td("s td 1 1 1\nb 1 1\n")
    assert t.width == 0
    assert validate_td(Graph(1), t).ok


@pytest.mark.parametrize("text", [
    "s td 2 1 2\nb 1 1\n",                   # bag 2 missing
    "s td 2 1 2\nb 1 1\nb 2 2\n",            # not connected as a tree
    "s td 1 1 2\nb 1 1 2\n",                 # bag larger than announced
    "s td 1 2 2\nb 1 3\n",                   # vertex out of range
    "s td 3 1 3\nb 1 1\nb 2 2\nb 3 3\n1 2\n2 3\n3 1\n",  # cycle
])
def test_parse_td_errors(text):
    with pytest.raises(ParseError):
        parse_td(text)


def test_roundtrip_io():
    g = gen_grid(3, 3)
    _, d = exact_tw(g)
    assert parse_gr(emit_gr(g)) == g
    back = parse_td(emit_td(d))
    assert back.bags == d.bags and validate_td(g, back).ok


# -- validation --------------------------------------------------------------------------

def test_trivial_is_valid():
    g = complete(5)
    r = validate_td(g, trivial_td(g))
    assert r.ok and r.width == 4


def test_uncovered_edge_named():
    r = validate_td(complete(3), td([{0, 1}, {1, 2}], [(0, 1)], 3))
    assert not r.ok
    assert any("edge 1 3" in v for v in r.violations)


def test_connectivity_violation():
    r = validate_td(path(3), td([{0, 1}, {1, 2}, {0}], [(0, 1), (1, 2)], 3))
    assert not r.ok
    assert any("vertex 1" in v and "connected" in v for v in r.violations)


def test_missing_vertex():
    r = validate_td(path(3), td([{0, 1}], [], 3))
    assert any("vertex 3 is in no bag" in v for v in r.violations)


# -- constructions -----------------------------------------------------------------------

@pytest.mark.parametrize("g,w", [
    (Graph(7, [(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6)]), 1),
    (complete(4), 3),
    (cycle(5), 2),
    (gen_grid(4, 4), 4),
    (Graph(0), -1),
    (Graph(3), 0),
])
def test_exact_tw(g, w):
    width, d = exact_tw(g)
    assert width == w == d.width or (g.n == 0 and width <= 0)
    assert validate_td(g, d).ok


def test_exact_tw_cap():
    with pytest.raises(BudgetError):
        exact_tw(Graph(21))


def test_exact_matches_ordering_bruteforce():
    rng = random.Random(5)
    for _ in range(25):
        g = random_graph(rng, rng.randint(2, 7), rng.random())
        assert exact_tw(g)[0] == brute_tw(g)


@pytest.mark.parametrize("g,w", [
    (Graph(7, [(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6)]), 1),
    (cycle(6), 2),
    (complete(5), 4),
])
def test_minfill_examples(g, w):
    d = minfill_td(g)
    assert d.width == w and validate_td(g, d).ok


def test_nice_single_bag():
    nice = to_nice(td([{0, 1}], [], 2))
    nice.check()
    kinds = [nice.nodes[i].kind for i in nice.postorder()]
    assert kinds == [LEAF, INTRODUCE, INTRODUCE, FORGET, FORGET]
    assert nice.nodes[nice.root].bag == frozenset()


def test_nice_path_has_no_join():
    d = td([{0, 1}, {1, 2}, {2, 3}], [(0, 1), (1, 2)], 4)
    nice = to_nice(d)
    nice.check()
    assert nice.counts()[JOIN] == 0 and nice.width == 1


def test_nice_branching_has_join():
    d = td([{0, 1}, {0, 2}, {0, 3}, {0, 4}], [(0, 1), (0, 2), (0, 3)], 5)
    nice = to_nice(d)
    nice.check()
    assert nice.counts()[JOIN] >= 1 and nice.width == 1
    assert validate_td(Graph(5, [(0, 1), (0, 2), (0, 3), (0, 4)]), nice.as_td()).ok


def test_nice_on_partial_ktrees():
    for seed in range(10):
        g, d = gen_partial_ktree(30, 3, seed=seed)
        nice = to_nice(d)
        nice.check()
        assert nice.width == d.width
        assert validate_td(g, nice.as_td()).ok


def test_random_graphs_property():
    rng = random.Random(11)
    for _ in range(200):
        n = rng.randint(1, 14)
        g = random_graph(rng, n, rng.uniform(0.1, 0.6))
        w, d = exact_tw(g)
        h = minfill_td(g)
        assert validate_td(g, d).ok and validate_td(g, h).ok
        assert w <= h.width
        nice = to_nice(h)
        nice.check()
        assert nice.width == h.width and validate_td(g, nice.as_td()).ok


def test_nice_check_rejects_bad_node():
    nice = to_nice(td([{0, 1}], [], 2))
    nice.nodes[nice.root].bag = frozenset({0})
    with pytest.raises(ValidationError):
        nice.check()
