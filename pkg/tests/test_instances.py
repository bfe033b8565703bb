from __future__ import annotations

import json
import random

import networkx as nx
import pytest

from fmdel.errors import ValidationError
from fmdel.graph import cycle
from fmdel.instances import (check_annulus, check_wall, gen_er, gen_grid, gen_partial_ktree, gen_wall, odd_ceil,
                             railed_annulus, random_instance, sidecar, wall_layers)
from fmdel.treedecomp import exact_tw, validate_td


def test_odd_ceil():
    assert [odd_ceil(p) for p in (0.5, 1, 2, 3, 3.2, 4)] == [1, 1, 3, 3, 5, 5]


@pytest.mark.parametrize("r,bricks,internal,layers", [(3, 4, 0, 1), (5, 16, 4, 2), (7, 36, 16, 3), (13, 144, 100, 6)])
def test_wall_counts(r, bricks, internal, layers):
    w = gen_wall(r)
    assert (w.n_bricks, w.n_internal, len(w.layers)) == (bricks, internal, layers)
    check_wall(w)


def test_subdivision_keeps_counts():
    w, s = gen_wall(5), gen_wall(5, subdivide=1)
    check_wall(s)
    assert (s.n_bricks, s.n_internal, len(s.layers)) == (w.n_bricks, w.n_internal, len(w.layers))
    assert s.graph.m == 2 * w.graph.m
    assert s.graph.n == w.graph.n + w.graph.m
    assert sum(s.original) == w.graph.n


def test_wall_structure():
    w = gen_wall(7)
    layers = wall_layers(w)
    seen = set()
    for c in layers:
        assert not seen & set(c)
        seen |= set(c)
    assert max(w.graph.degrees()) == 3
    assert nx.check_planarity(w.graph.to_networkx())[0]
    assert len(w.central) == 2
    assert set(w.corners) <= set(w.pegs) <= set(w.perimeter)


def test_wall_rejects_bad_height():
    for r in (1, 2, 4):
        with pytest.raises(ValidationError):
            gen_wall(r)


def test_sidecar_is_one_based():
    w = gen_wall(3)
    meta = json.loads(sidecar(w))
    assert meta["bricks"] == 4 and min(meta["perimeter"]) >= 1
    assert meta["n"] == w.graph.n


@pytest.mark.parametrize("x,y", [(3, 8), (5, 8), (3, 16), (3, 20)])
def test_annulus_on_13_wall(x, y):
    w = gen_wall(13)
    ann = railed_annulus(w, x, y)
    assert (ann.x, ann.y) == (x, y)
    pieces = check_annulus(w, ann)
    assert len(pieces) == x * y


def test_annulus_on_subdivided_wall():
    w = gen_wall(11, subdivide=1)
    check_annulus(w, railed_annulus(w, 3, 8))


@pytest.mark.parametrize("x,y,z", [(1, 4, 3), (4, 4, 3), (3, 0, 3), (3, 4, 2)])
def test_annulus_preconditions(x, y, z):
    with pytest.raises(ValidationError):
        railed_annulus(gen_wall(13), x, y, z)


def test_annulus_wall_too_small():
    with pytest.raises(ValidationError):
        railed_annulus(gen_wall(7), 5, 4)


def test_check_annulus_catches_tampering():
    w = gen_wall(13)
    ann = railed_annulus(w, 3, 8)
    ann.paths[1] = ann.paths[0]
    with pytest.raises(ValidationError):
        check_annulus(w, ann)


def test_grid():
    assert gen_grid(1, 1).n == 1
    assert gen_grid(2, 2) == cycle(4) or sorted(gen_grid(2, 2).degrees()) == [2, 2, 2, 2]
    assert exact_tw(gen_grid(4, 4))[0] == 4
    with pytest.raises(ValidationError):
        gen_grid(0, 3)


def test_partial_ktree():
    g, d = gen_partial_ktree(5, 1, seed=0)
    assert g.m <= 4 and d.width == 1
    again, _ = gen_partial_ktree(5, 1, seed=0)
    assert again == g
    for s in range(100):
        g, d = gen_partial_ktree(15, 3, seed=s)
        assert validate_td(g, d).ok and d.width <= 3
    with pytest.raises(ValidationError):
        gen_partial_ktree(3, 3)


def test_er_reproducible():
    assert gen_er(10, 0.3, 7) == gen_er(10, 0.3, 7)
    with pytest.raises(ValidationError):
        gen_er(5, 1.5)


def test_random_instance_mix():
    rng = random.Random(0)
    kinds = set()
    for _ in range(60):
        kind, g, d = random_instance(rng, 10)
        kinds.add(kind)
        assert 3 <= g.n <= 10
        if d is not None:
            assert validate_td(g, d).ok
    assert kinds == {"pkt2", "pkt3", "er"}
