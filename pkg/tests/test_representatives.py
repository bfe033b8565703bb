from __future__ import annotations

import pytest

from fmdel.canon import canonicalize
from fmdel.errors import BudgetError, ParseError
from fmdel.families import resolve
from fmdel.folio import folio_signature
from fmdel.graph import BoundariedGraph, complete, glue
from fmdel.containment import has_minor
from fmdel.representatives import (DEAD, RepresentativeTable, build_rep_table, census_csv, enumerate_boundaried,
                                   fit_envelopes, lookup_rep, partner_bank, probe_equivalence, rep_census,
                                   CensusRow)

K3 = [complete(3)]


def bg(t, n, edges):
    return BoundariedGraph.standard(t, n, edges)


def boundary_path(inner: int) -> BoundariedGraph:
    chain = [0] + list(range(2, 2 + inner)) + [1]
    return bg(2, 2 + inner, list(zip(chain, chain[1:])))


def form(g):
    return canonicalize(g, cap=None)[0]


# -- enumeration -------------------------------------------------------------------

def test_enumerate_examples():
    got = [g for g, _ in enumerate_boundaried(0, 1, 0)]
    assert {form(g) for g in got} == {form(bg(0, 0, [])), form(bg(0, 1, []))}
    got = [g for g, _ in enumerate_boundaried(1, 2, 1)]
    assert {form(g) for g in got} == {form(bg(1, 1, [])), form(bg(1, 2, [])), form(bg(1, 2, [(0, 1)]))}
    tagged = {form(g): dead for g, dead in enumerate_boundaried(2, 2, 1, prune_dead_for=[complete(2)])}
    assert tagged[form(bg(2, 2, [(0, 1)]))] is True
    assert tagged[form(bg(2, 2, []))] is False


def test_enumerate_counts_unlabelled_graphs():
    # graphs on at most 4 vertices: 1 + 1 + 2 + 4 + 11
    assert sum(1 for _ in enumerate_boundaried(0, 4, 6)) == 19


def test_enumerate_budget():
    with pytest.raises(BudgetError):
        list(enumerate_boundaried(3, 12, 30, max_count=1000))


def test_dead_flag_matches_minor_test():
    for g, dead in enumerate_boundaried(1, 5, 6, prune_dead_for=K3):
        assert dead == has_minor(g.graph, complete(3))


# -- tables ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def table_t0():
    return build_rep_table(0, 3, K3, caps=(4, 6), audit=True, partners=20, bank_cap=3).table


def test_table_t0(table_t0):
    assert table_t0.dead_population > 0
    empty = bg(0, 0, [])
    rep, found = lookup_rep(table_t0, empty)
    assert found and form(rep) == form(empty)
    assert lookup_rep(table_t0, bg(0, 3, [(0, 1), (1, 2), (2, 0)]))[0] is DEAD


def test_representatives_are_minimum(table_t0):
    # every enumerated member maps to a rep no larger than itself
    for g, dead in enumerate_boundaried(0, 4, 6, prune_dead_for=K3):
        rep, found = lookup_rep(table_t0, g)
        assert found
        if not dead:
            assert (rep.n, rep.m) <= (g.n, g.m)
            assert folio_signature(rep, 3).digest == folio_signature(g, 3).digest


def test_lookup_online_insert():
    table = RepresentativeTable(2, 3, K3, (2, 1))
    p5 = boundary_path(5)
    rep, found = lookup_rep(table, p5)
    assert not found and table.inserts == 1
    rep2, found2 = lookup_rep(table, boundary_path(3))
    assert found2 and form(rep2) == form(rep)


def test_lookup_long_path_finds_minimal_rep():
    rep = build_rep_table(2, 3, K3, caps=(7, 6), audit=False)
    rep_g, found = lookup_rep(rep.table, boundary_path(5))
    assert found
    assert rep_g.n <= 5
    assert folio_signature(rep_g, 3).digest == folio_signature(boundary_path(5), 3).digest


def test_table_roundtrip(tmp_path, table_t0):
    p = tmp_path / "t.txt"
    table_t0.save(p)
    back = RepresentativeTable.load(p)
    assert back.dumps() == table_t0.dumps()
    with pytest.raises(ParseError):
        RepresentativeTable.loads("R 1 0 3\n")


def test_lookup_stable_across_reload(tmp_path, table_t0):
    g = bg(0, 4, [(0, 1), (1, 2), (2, 3)])
    r1 = lookup_rep(table_t0, g)[0]
    table_t0.save(tmp_path / "t.txt")
    r2 = lookup_rep(RepresentativeTable.load(tmp_path / "t.txt"), g)[0]
    assert form(r1) == form(r2)


# -- probing ------------------------------------------------------------------------------

def test_probe_identical():
    g = boundary_path(2)
    assert not probe_equivalence(g, g, K3).distinguished


def test_probe_distinguishes_edge():
    e, iso = bg(2, 2, [(0, 1)]), bg(2, 2, [])
    v = probe_equivalence(e, iso, K3, bank=[boundary_path(1)])
    assert v.distinguished
    assert has_minor(glue(boundary_path(1), e, strict=False), complete(3))
    assert not has_minor(glue(boundary_path(1), iso, strict=False), complete(3))


def test_probe_paths_exhaustive_bank():
    bank = partner_bank(2, 0, 4, exhaustive=True, m_max=8)
    v = probe_equivalence(boundary_path(3), boundary_path(5), K3, bank=bank)
    assert not v.distinguished and v.tested == len(bank)


def test_dead_is_a_class_invariant():
    # F-minor presence is shared by folio-equal graphs (glue with the bare boundary)
    seen = {}
    for g, dead in enumerate_boundaried(2, 5, 5, prune_dead_for=K3):
        sig = folio_signature(g, 3).digest
        assert seen.setdefault(sig, dead) == dead


# -- census ----------------------------------------------------------------------------------

def test_small_census():
    rep = rep_census([0, 1, 2], 3, K3, audit=True, partners=10, bank_cap=3)
    rows = rep["rows"]
    assert rows[0]["t"] == 0 and rows[0]["classes"] >= 2
    counts = [r["classes"] for r in rows]
    assert counts == sorted(counts)
    assert all(r["violations"] == 0 for r in rows)
    assert "t,classes" in census_csv(rep)


def test_fit_envelopes_linear():
    rows = [CensusRow(t, 2 ** (t + 1), 0, 2 * t + 1, 0, 0) for t in range(4)]
    fit = fit_envelopes(rows)
    assert fit["size_ok"] and abs(fit["size_slope"] - 2) < 1e-9
    assert not fit["size_superlinear"]
    assert fit["count_ok"]


def test_fit_flags_superlinear():
    rows = [CensusRow(t, 2, 0, t * t * t, 0, 0) for t in range(4)]
    fit = fit_envelopes(rows)
    assert fit["size_superlinear"] and not fit["size_ok"]
