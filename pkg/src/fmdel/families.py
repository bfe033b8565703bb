"""Forbidden-minor families: presets, naming, and derived budgets."""

from __future__ import annotations

from pathlib import Path

from .canon import graph_form
from .errors import ParseError, ValidationError
from .graph import BoundariedGraph, Graph, complete, complete_bipartite, cycle, form_hex

NAMED = {
    "K2": lambda: complete(2),
    "K3": lambda: complete(3),
    "K4": lambda: complete(4),
    "K5": lambda: complete(5),
    "K33": lambda: complete_bipartite(3, 3),
    "C4": lambda: cycle(4),
}

PRESETS = {
    "vertex-cover": ["K2"],
    "fvs": ["K3"],
    "planarization": ["K5", "K33"],
    "k4": ["K4"],
    "c4": ["C4"],
}


def pattern(name: str) -> Graph:
    if name in NAMED:
        return NAMED[name]()
    if name.startswith("G") and len(name) > 1:
        from .canon import decode_form

        try:
            return decode_form(bytes.fromhex(name[1:])).graph
        except ValueError:
            raise ParseError(f"bad pattern name {name!r}") from None
    raise ParseError(f"unknown pattern {name!r}")


def pattern_name(g: Graph) -> str:
    """Short name of a pattern, ``K3`` style when it is a named graph."""
    f = graph_form(g, cap=None)
    for name, make in NAMED.items():
        if graph_form(make(), cap=None) == f:
            return name
    return "G" + form_hex(f)


def resolve(spec: str | list) -> list[Graph]:
    """Family from a preset name, a comma-separated pattern list, or a pattern file path."""
    if isinstance(spec, list):
        names = spec
    elif spec in PRESETS:
        names = PRESETS[spec]
    elif Path(spec).is_file():
        return load_family_file(spec)
    else:
        names = [s.strip() for s in spec.split(",") if s.strip()]
    fam = [pattern(n) for n in names]
    check_proper(fam)
    return fam


def load_family_file(path) -> list[Graph]:
    """Patterns in the boundaried-graph encoding with ``t = 0``, separated by blank lines."""
    text = Path(path).read_text()
    fam = []
    for block in text.split("\n\n"):
        if not block.strip():
            continue
        bg = BoundariedGraph.decode(block)
        if bg.t != 0:
            raise ParseError("family patterns must have an empty boundary")
        fam.append(bg.graph)
    check_proper(fam)
    return fam


def check_proper(fam: list[Graph]) -> None:
    if not fam:
        raise ValidationError("family is empty")
    for g in fam:
        if g.n == 0:
            raise ValidationError("family contains the empty graph")


def family_names(fam: list[Graph]) -> list[str]:
    return [pattern_name(g) for g in fam]


def h_of(fam: list[Graph]) -> int:
    return max(max(g.n, g.m) for g in fam)


def default_detail(fam: list[Graph]) -> int:
    return 3 * h_of(fam)
