"""Representative tables for the folio equivalence, probes, and the census.

A table groups enumerated boundaried graphs by folio signature and keeps, per
class, the member with the fewest vertices (then fewest edges, then smallest
canonical form).  Graphs containing a forbidden minor all fall into one dead
class.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from math import comb, factorial
from pathlib import Path
from typing import Iterator, Sequence

from .canon import canonicalize
from .containment import has_minor, is_F_minor_free
from .errors import BudgetError, DigestCollision, ParseError
from .families import family_names, resolve
from .folio import PatternUniverse, folio, pattern_universe, signature_of
from .graph import BoundariedGraph, Graph, glue, glue_boundaried

TABLE_VERSION = 1
DEAD_SIGNATURE = "dead"
MAX_ENUMERATION = 2_000_000


class _Dead:
    """Sentinel standing for the absorbing class of graphs with a forbidden minor."""

    def __repr__(self):
        return "DEAD"


DEAD = _Dead()


def enumeration_estimate(t: int, n_max: int, m_max: int) -> int:
    total = 0.0
    for n in range(t, n_max + 1):
        slots = comb(n, 2)
        total += sum(comb(slots, j) for j in range(min(m_max, slots) + 1)) / factorial(n - t)
    return int(total) + 1


def enumerate_boundaried(t: int, n_max: int, m_max: int, prune_dead_for: Sequence[Graph] | None = None,
                         max_count: int = MAX_ENUMERATION,
                         extend_dead: bool = True) -> Iterator[tuple[BoundariedGraph, bool]]:
    """Yield ``(graph, dead)`` for every canonical boundaried graph within the caps.

    ``dead`` is always False unless ``prune_dead_for`` is given.  A graph with a
    dead one-edge-smaller parent is dead without a minor test.  With
    ``extend_dead=False`` dead graphs get no children, so only dead graphs
    with at least one live parent are produced; every live graph is still
    reached because all its subgraphs are live.
    """
    est = enumeration_estimate(t, n_max, m_max)
    if est > max_count and (extend_dead or not prune_dead_for):
        raise BudgetError(f"enumeration (t={t}, n<={n_max}, m<={m_max}) estimated at {est} graphs", estimate=est)
    fam = list(prune_dead_for or [])
    for n in range(t, n_max + 1):
        f0, g0 = canonicalize(BoundariedGraph.standard(t, n), cap=None)
        level = {f0: (g0, _dead(g0, fam))}
        for _ in range(m_max + 1):
            for f in sorted(level):
                yield level[f]
            nxt = {}
            for g, dead in level.values():
                if dead and not extend_dead:
                    continue
                gr = g.graph
                for u in range(n):
                    for v in range(u + 1, n):
                        if gr.adj[u] >> v & 1:
                            continue
                        h = BoundariedGraph(gr.with_edges([(u, v)]), range(t))
                        fh, ch = canonicalize(h, cap=None)
                        prev = nxt.get(fh)
                        if prev is None:
                            nxt[fh] = (ch, True if dead else None)
                        elif dead and prev[1] is None:
                            nxt[fh] = (ch, True)
            level = {f: (g, d if d else _dead(g, fam)) for f, (g, d) in nxt.items()}
            if not level:
                break


def _dead(g: BoundariedGraph, fam) -> bool:
    return bool(fam) and not is_F_minor_free(g.graph, fam)


def _rep_key(g: BoundariedGraph):
    return (g.n, g.m, canonicalize(g, cap=None)[0])


@dataclass
class Entry:
    indices: tuple
    rep: BoundariedGraph
    population: int = 1
    max_member: int = 0
    online: bool = False


@dataclass
class RepresentativeTable:
    t: int
    d: int
    family: list
    caps: tuple = (0, 0)
    entries: dict = field(default_factory=dict)
    dead_population: int = 0
    inserts: int = 0
    _universe: PatternUniverse | None = None

    @property
    def names(self) -> list[str]:
        return family_names(self.family)

    def universe(self) -> PatternUniverse:
        if self._universe is None:
            self._universe = pattern_universe(self.t, self.d)
        return self._universe

    def signature(self, g: BoundariedGraph):
        uni = self.universe()
        return signature_of(folio(g, self.d, uni), uni)

    def is_dead(self, g: BoundariedGraph) -> bool:
        return not is_F_minor_free(g.graph, self.family)

    def add_member(self, g: BoundariedGraph, dead: bool | None = None) -> str:
        """Record ``g`` in its class, updating the representative; returns the class key."""
        if dead is None:
            dead = self.is_dead(g)
        if dead:
            self.dead_population += 1
            return DEAD_SIGNATURE
        sig = self.signature(g)
        e = self.entries.get(sig.digest)
        g = canonicalize(g, cap=None)[1]
        if e is None:
            self.entries[sig.digest] = Entry(sig.indices, g, 1, g.n)
        else:
            if e.indices != sig.indices:
                raise DigestCollision(f"digest {sig.digest} shared by different folios")
            e.population += 1
            e.max_member = max(e.max_member, g.n)
            if _rep_key(g) < _rep_key(e.rep):
                e.rep = g
        return sig.digest

    def classes(self) -> int:
        return len(self.entries) + (1 if self.dead_population else 0)

    def max_rep_size(self) -> int:
        return max((e.rep.n for e in self.entries.values()), default=0)

    def max_member_size(self) -> int:
        return max((e.max_member for e in self.entries.values()), default=0)

    # -- persistence ---------------------------------------------------------

    def dumps(self) -> str:
        lines = [f"R {TABLE_VERSION} {self.t} {self.d} F={','.join(self.names)} caps={self.caps[0]},{self.caps[1]}"]
        lines.append(f"{DEAD_SIGNATURE} - - {self.dead_population} 0")
        for sig in sorted(self.entries):
            e = self.entries[sig]
            idx = ",".join(str(i) for i in e.indices) or "-"
            lines.append(f"{sig} {idx} {e.rep.to_line()} {e.population} {e.max_member}")
        return "\n".join(lines) + "\n"

    def save(self, path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def loads(cls, text: str) -> "RepresentativeTable":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ParseError("empty table file")
        head = lines[0].split()
        try:
            if head[0] != "R" or len(head) != 6:
                raise ValueError
            version, t, d = int(head[1]), int(head[2]), int(head[3])
            names = head[4].removeprefix("F=").split(",")
            caps = tuple(int(x) for x in head[5].removeprefix("caps=").split(","))
        except (ValueError, IndexError):
            raise ParseError(f"bad table header {lines[0]!r}") from None
        if version != TABLE_VERSION:
            raise ParseError(f"table version {version} not supported")
        table = cls(t, d, resolve(names), caps)
        for ln in lines[1:]:
            tok = ln.split(" ")
            if len(tok) < 5:
                raise ParseError(f"bad table line {ln!r}")
            sig, idx, pop, mx = tok[0], tok[1], int(tok[-2]), int(tok[-1])
            if sig == DEAD_SIGNATURE:
                table.dead_population = pop
                continue
            rep = BoundariedGraph.decode(" ".join(tok[2:-2]))
            indices = tuple(int(x) for x in idx.split(",")) if idx != "-" else ()
            table.entries[sig] = Entry(indices, canonicalize(rep, cap=None)[1], pop, mx)
        return table

    @classmethod
    def load(cls, path) -> "RepresentativeTable":
        return cls.loads(Path(path).read_text())


def lookup_rep(table: RepresentativeTable, g: BoundariedGraph):
    """Return ``(representative, found)``; unseen classes are inserted with ``g`` itself.

    Dead graphs return ``(DEAD, True)``.
    """
    if g.t != table.t:
        raise ValueError(f"boundary size {g.t} does not match table t={table.t}")
    if table.is_dead(g):
        return DEAD, True
    sig = table.signature(g)
    e = table.entries.get(sig.digest)
    if e is not None:
        if e.indices != sig.indices:
            raise DigestCollision(f"digest {sig.digest} shared by different folios")
        return e.rep, True
    rep = canonicalize(g, cap=None)[1]
    table.entries[sig.digest] = Entry(sig.indices, rep, 1, rep.n, online=True)
    table.inserts += 1
    return rep, False


# -- probing -------------------------------------------------------------------------

@dataclass
class ProbeVerdict:
    distinguished: bool
    partner: BoundariedGraph | None = None
    pattern: Graph | None = None
    tested: int = 0

    def __str__(self):
        if not self.distinguished:
            return f"indistinguishable-at-cap ({self.tested} partners)"
        return f"distinguished by partner {self.partner.to_line()} and pattern with {self.pattern.n} vertices"


def random_partner(t: int, extra_max: int, rng: random.Random) -> BoundariedGraph:
    k = rng.randint(0, extra_max)
    n = t + k
    p = rng.uniform(0.15, 0.6)
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    return BoundariedGraph(Graph(n, edges), range(t))


def partner_bank(t: int, bank_size: int, bank_cap: int, seed: int = 0, exhaustive: bool = False,
                 m_max: int | None = None) -> list[BoundariedGraph]:
    if exhaustive:
        m_cap = m_max if m_max is not None else comb(t + bank_cap, 2)
        return [g for g, _ in enumerate_boundaried(t, t + bank_cap, m_cap)]
    rng = random.Random(seed)
    return [random_partner(t, bank_cap, rng) for _ in range(bank_size)]


def probe_equivalence(g1: BoundariedGraph, g2: BoundariedGraph, family: Sequence[Graph], bank_size: int = 50,
                      bank_cap: int = 5, seed: int = 0, exhaustive: bool = False,
                      bank: list | None = None) -> ProbeVerdict:
    """Look for a gluing partner separating ``g1`` from ``g2`` with respect to ``family``.

    Boundary edges of the two sides are united when gluing.  An at-cap verdict
    is evidence, not proof, of equivalence.
    """
    if g1.t != g2.t:
        raise ValueError("boundary sizes differ")
    partners = bank if bank is not None else partner_bank(g1.t, bank_size, bank_cap, seed, exhaustive)
    tested = 0
    for k in partners:
        a = glue(k, g1, strict=False)
        b = glue(k, g2, strict=False)
        tested += 1
        for h in family:
            if has_minor(a, h) != has_minor(b, h):
                return ProbeVerdict(True, k, h, tested)
    return ProbeVerdict(False, None, None, tested)


# -- building and census --------------------------------------------------------------

@dataclass
class BuildReport:
    table: RepresentativeTable
    members: int = 0
    audited_pairs: int = 0
    violations: list = field(default_factory=list)


def default_caps(t: int, family: Sequence[Graph]) -> tuple[int, int]:
    n_max = t + 5
    return n_max, n_max - 1 if all(_is_triangle(h) for h in family) else n_max + 2


def _is_triangle(h: Graph) -> bool:
    return h.n == 3 and h.m == 3


def build_rep_table(t: int, d: int, family: Sequence[Graph], caps: tuple[int, int] | None = None,
                    audit: bool = True, partners: int = 50, bank_cap: int = 5, seed: int = 0,
                    audit_limit: int | None = None) -> BuildReport:
    """Enumerate within ``caps`` and group by folio signature.

    With ``audit``, every class member is probed against its representative
    (``partners`` random partners, ``bank_cap`` extra vertices each).
    """
    fam = list(family)
    caps = caps or default_caps(t, fam)
    table = RepresentativeTable(t, d, fam, caps)
    table.universe()
    members: dict = {}
    count = 0
    for g, dead in enumerate_boundaried(t, caps[0], caps[1], prune_dead_for=fam, extend_dead=False):
        key = table.add_member(g, dead)
        count += 1
        if audit and key != DEAD_SIGNATURE:
            members.setdefault(key, []).append(g)
    report = BuildReport(table, count)
    if audit:
        bank = partner_bank(t, partners, bank_cap, seed)
        for key in sorted(members):
            rep = table.entries[key].rep
            others = [g for g in members[key] if _rep_key(g) != _rep_key(rep)]
            if audit_limit is not None:
                others = others[:audit_limit]
            for g in others:
                v = probe_equivalence(rep, g, fam, bank=bank)
                report.audited_pairs += 1
                if v.distinguished:
                    report.violations.append((rep, g, v))
    return report


@dataclass
class CensusRow:
    t: int
    classes: int
    live_classes: int
    max_rep: int
    max_member: int
    members: int
    probe_merged: int | None = None
    audited_pairs: int = 0
    violations: int = 0
    n_cap: int = 0
    at_cap: bool = False

    def as_dict(self):
        return dict(self.__dict__)


def probe_merged_count(table: RepresentativeTable, bank: list) -> int:
    """Number of live classes after merging those no partner in ``bank`` separates."""
    seen = set()
    for e in table.entries.values():
        vec = tuple(has_minor(glue(k, e.rep, strict=False), h) for k in bank for h in table.family)
        seen.add(vec)
    return len(seen)


def rep_census(t_values, d: int, family: Sequence[Graph], caps_for=None, audit: bool = True,
               partners: int = 50, bank_cap: int = 5, seed: int = 0, probe_merge: bool = True,
               tables_out: str | None = None, progress=None) -> dict:
    """Build a table per ``t`` and fit the size and count envelopes."""
    fam = list(family)
    rows = []
    for t in t_values:
        caps = caps_for(t) if caps_for else default_caps(t, fam)
        rep = build_rep_table(t, d, fam, caps, audit=audit, partners=partners, bank_cap=bank_cap, seed=seed)
        tab = rep.table
        merged = None
        if probe_merge:
            merged = probe_merged_count(tab, partner_bank(t, partners, bank_cap, seed + 1))
        row = CensusRow(t, tab.classes(), len(tab.entries), tab.max_rep_size(), tab.max_member_size(),
                        rep.members, merged, rep.audited_pairs, len(rep.violations), caps[0],
                        tab.max_rep_size() >= caps[0])
        rows.append(row)
        if tables_out:
            Path(tables_out).mkdir(parents=True, exist_ok=True)
            tab.save(Path(tables_out) / f"table_t{t}_d{d}.txt")
        if progress:
            progress(row)
    return {"d": d, "family": family_names(fam), "rows": [r.as_dict() for r in rows], "fit": fit_envelopes(rows)}


def fit_envelopes(rows: list[CensusRow]) -> dict:
    """Fit the two envelopes on all but the largest ``t`` and check the largest against them.

    Size: ``max_rep <= c*t + c0`` with ``c`` the least-squares slope and
    ``c0`` the smallest intercept keeping every fitted point under the line.
    Count: ``classes <= 2**(c*t*log2(t+2) + b)`` with ``b = log2(classes at t=0)``
    and ``c`` the smallest value covering the fitted points.
    """
    import numpy as np

    rows = sorted(rows, key=lambda r: r.t)
    out: dict = {}
    if len(rows) < 2:
        return out
    fit_rows = rows[:-1] if len(rows) > 2 else rows
    ts = np.array([r.t for r in fit_rows], dtype=float)
    sizes = np.array([r.max_rep for r in fit_rows], dtype=float)
    if len(fit_rows) >= 2 and np.ptp(ts) > 0:
        c = float(np.polyfit(ts, sizes, 1)[0])
    else:
        c = 0.0
    c0 = float(max(sizes - c * ts))
    size_ok = all(r.max_rep <= c * r.t + c0 + 1e-9 for r in rows)
    incr = [b.max_rep - a.max_rep for a, b in zip(rows, rows[1:])]
    superlinear = len(incr) >= 2 and all(y > x for x, y in zip(incr, incr[1:]))
    base = math.log2(rows[0].classes) if rows[0].t == 0 else 0.0
    cc = 0.0
    for r in fit_rows:
        if r.t > 0:
            cc = max(cc, (math.log2(r.classes) - base) / (r.t * math.log2(r.t + 2)))
    count_ok = all(math.log2(r.classes) <= cc * r.t * math.log2(r.t + 2) + base + 1e-9 for r in rows)
    out.update(
        size_slope=c, size_intercept=c0, size_ok=size_ok, size_superlinear=superlinear,
        count_c=cc, count_base=base, count_ok=count_ok,
        fitted_on=[r.t for r in fit_rows], checked=[r.t for r in rows],
    )
    return out


def census_csv(report: dict) -> str:
    cols = ["t", "classes", "live_classes", "max_rep", "max_member", "members", "probe_merged",
            "audited_pairs", "violations", "n_cap", "at_cap"]
    lines = [",".join(cols)]
    for r in report["rows"]:
        lines.append(",".join("" if r[c] is None else str(r[c]) for c in cols))
    return "\n".join(lines) + "\n"


def census_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True)
