"""Instance generators: walls, railed annuli, partial k-trees, grids, random graphs.

Walls are built on integer grid coordinates, which also gives a planar
rotation system for free; bricks and layers come from face tracing on it.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field

from .errors import ValidationError
from .graph import Graph
from .treedecomp import TreeDecomposition, validate_td


def odd_ceil(p: float) -> int:
    """Smallest odd integer not smaller than ``p``."""
    k = math.ceil(p)
    return k if k % 2 else k + 1


@dataclass
class Wall:
    graph: Graph
    r: int
    subdivide: int
    pos: list[tuple[float, float]]
    original: list[bool]
    coord: dict  # elementary (x, y) -> vertex id
    perimeter: list[int]
    bricks: list[list[int]]
    internal: list[bool]
    pegs: list[int]
    corners: list[int]
    layers: list[list[int]]
    central: list[int]
    branch: list[int] = field(default_factory=list)

    @property
    def n_bricks(self) -> int:
        return len(self.bricks)

    @property
    def n_internal(self) -> int:
        return sum(self.internal)

    def metadata(self) -> dict:
        return {
            "kind": "wall",
            "r": self.r,
            "subdivide": self.subdivide,
            "n": self.graph.n,
            "m": self.graph.m,
            "bricks": self.n_bricks,
            "internal_bricks": self.n_internal,
            "layers": [[v + 1 for v in c] for c in self.layers],
            "perimeter": [v + 1 for v in self.perimeter],
            "pegs": [v + 1 for v in self.pegs],
            "corners": [v + 1 for v in self.corners],
            "central": [v + 1 for v in self.central],
            "original": [v + 1 for v, o in enumerate(self.original) if o],
        }


# -- faces -------------------------------------------------------------------

def _rotation(adj: list[int], pos, within: int) -> dict:
    rot = {}
    for v in range(len(adj)):
        if not within >> v & 1:
            continue
        x0, y0 = pos[v]
        nb = [u for u in range(len(adj)) if (adj[v] & within) >> u & 1]
        nb.sort(key=lambda u: math.atan2(pos[u][1] - y0, pos[u][0] - x0))
        rot[v] = nb
    return rot


def faces(adj: list[int], pos, within: int | None = None) -> list[list[int]]:
    """Face boundary walks of the straight-line embedding given by ``pos``."""
    if within is None:
        within = (1 << len(adj)) - 1
    rot = _rotation(adj, pos, within)
    where = {v: {u: i for i, u in enumerate(nb)} for v, nb in rot.items()}
    seen = set()
    out = []
    for v, nb in rot.items():
        for u in nb:
            if (v, u) in seen:
                continue
            walk = []
            a, b = v, u
            while (a, b) not in seen:
                seen.add((a, b))
                walk.append(a)
                # turn: the neighbour of b just before a in counterclockwise order
                nbb = rot[b]
                c = nbb[(where[b][a] - 1) % len(nbb)]
                a, b = b, c
            out.append(walk)
    return out


def _area(walk, pos) -> float:
    s = 0.0
    for i, v in enumerate(walk):
        x1, y1 = pos[v]
        x2, y2 = pos[walk[(i + 1) % len(walk)]]
        s += x1 * y2 - x2 * y1
    return s / 2


def _outer_face(adj, pos, within) -> tuple[list[int], list[list[int]]]:
    fs = faces(adj, pos, within)
    outer = max(fs, key=lambda w: abs(_area(w, pos)))
    return outer, [f for f in fs if f is not outer]


def _strip_low_degree(adj, within: int) -> int:
    changed = True
    while changed:
        changed = False
        for v in range(len(adj)):
            if within >> v & 1 and (adj[v] & within).bit_count() <= 1:
                within &= ~(1 << v)
                changed = True
    return within


def _is_cycle(adj, walk) -> bool:
    if len(set(walk)) != len(walk) or len(walk) < 3:
        return False
    return all(adj[walk[i]] >> walk[(i + 1) % len(walk)] & 1 for i in range(len(walk)))


# -- walls -------------------------------------------------------------------

def _elementary(r: int):
    verts = [(x, y) for y in range(1, r + 1) for x in range(1, 2 * r + 1)]
    present = set(verts)
    edges = set()
    for x, y in verts:
        if x < 2 * r:
            edges.add(((x, y), (x + 1, y)))
        if y < r and (x + y) % 2 == 0:
            edges.add(((x, y), (x, y + 1)))
    deg = {v: 0 for v in verts}
    for a, b in edges:
        deg[a] += 1
        deg[b] += 1
    gone = {v for v in verts if deg[v] <= 1}
    present -= gone
    edges = {e for e in edges if e[0] in present and e[1] in present}
    return sorted(present, key=lambda p: (p[1], p[0])), sorted(edges)


def gen_wall(r: int, subdivide: int = 0) -> Wall:
    if not isinstance(r, int) or r < 3 or r % 2 == 0:
        raise ValidationError(f"wall height must be an odd integer >= 3, got {r}")
    if subdivide < 0:
        raise ValidationError("subdivide must be >= 0")
    verts, el_edges = _elementary(r)
    coord = {p: i for i, p in enumerate(verts)}
    pos = [(float(x), float(y)) for x, y in verts]
    original = [True] * len(verts)
    edges = []
    for a, b in el_edges:
        ia, ib = coord[a], coord[b]
        prev = ia
        for s in range(1, subdivide + 1):
            f = s / (subdivide + 1)
            pos.append((a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1])))
            original.append(False)
            cur = len(pos) - 1
            edges.append((prev, cur))
            prev = cur
        edges.append((prev, ib))
    g = Graph(len(pos), edges)
    adj = list(g.adj)
    full = g.full_mask
    perimeter, inner_faces = _outer_face(adj, pos, full)
    bricks = inner_faces
    per_set = set(perimeter)
    internal = [not (set(b) & per_set) for b in bricks]

    el_deg = {}
    for a, b in el_edges:
        el_deg[a] = el_deg.get(a, 0) + 1
        el_deg[b] = el_deg.get(b, 0) + 1
    pegs = sorted(coord[p] for p in verts if el_deg[p] == 2 and coord[p] in per_set)
    corners = [coord[p] for p in [(1, 1), (2, r), (2 * r - 1, 1), (2 * r, r)]]
    branch = sorted(coord[p] for p in verts if el_deg[p] == 3)

    # central vertices: branch vertices still standing once every layer is peeled
    layers, core = _layers(adj, pos, full, (r - 1) // 2)
    central = [v for v in branch if core >> v & 1]
    w = Wall(g, r, subdivide, pos, original, coord, perimeter, bricks, internal, pegs,
             corners, layers, central, branch)
    check_wall(w)
    return w


def _layers(adj, pos, within: int, count: int) -> tuple[list[list[int]], int]:
    """Peel ``count`` perimeters; also returns what the last peel leaves before stripping."""
    out = []
    rest = within
    for _ in range(count):
        cyc, _ = _outer_face(adj, pos, within)
        out.append(cyc)
        rest = within
        for v in cyc:
            rest &= ~(1 << v)
        within = _strip_low_degree(adj, rest)
    return out, rest


def wall_layers(w: Wall) -> list[list[int]]:
    return [list(c) for c in w.layers]


def _peeled(w: Wall, k: int) -> int:
    """Vertex mask of the subwall left after peeling ``k`` layers."""
    adj = w.graph.adj
    within = w.graph.full_mask
    for c in w.layers[:k]:
        for v in c:
            within &= ~(1 << v)
        within = _strip_low_degree(adj, within)
    return within


def check_wall(w: Wall) -> None:
    """Structural invariants; raises ValidationError on the first failure."""
    from .containment import is_planar

    g, r = w.graph, w.r
    adj = g.adj
    if len(w.bricks) != (r - 1) ** 2:
        raise ValidationError(f"brick count {len(w.bricks)} != {(r - 1) ** 2}")
    if sum(w.internal) != (r - 3) ** 2:
        raise ValidationError(f"internal brick count {sum(w.internal)} != {(r - 3) ** 2}")
    if len(w.layers) != (r - 1) // 2:
        raise ValidationError("wrong number of layers")
    if max(g.degrees(), default=0) > 3:
        raise ValidationError("wall has a vertex of degree > 3")
    if not is_planar(g):
        raise ValidationError("wall is not planar")
    for cyc in [w.perimeter, *w.bricks, *w.layers]:
        if not _is_cycle(adj, cyc):
            raise ValidationError("face or layer is not a cycle")
    for b in w.bricks:
        if sum(1 for v in b if w.original[v]) != 6:
            raise ValidationError("brick is not a subdivided hexagon")
    seen = set()
    for c in w.layers:
        if seen & set(c):
            raise ValidationError("layers are not vertex-disjoint")
        seen |= set(c)
    if w.layers[0] != w.perimeter:
        raise ValidationError("first layer is not the perimeter")
    per = set(w.perimeter)
    if not set(w.corners) <= set(w.pegs) <= per:
        raise ValidationError("corners/pegs/perimeter nesting broken")
    if len(w.central) != 2:
        raise ValidationError(f"expected 2 central vertices, got {len(w.central)}")


# -- railed annulus ----------------------------------------------------------

@dataclass
class RailedAnnulus:
    cycles: list[list[int]]
    paths: list[list[int]]
    pieces: dict  # (i, j) -> vertices of C_i ∩ P_j in path order

    @property
    def x(self) -> int:
        return len(self.cycles)

    @property
    def y(self) -> int:
        return len(self.paths)


def _inside(w: Wall, cyc: list[int]) -> int:
    """Vertices strictly inside cycle ``cyc`` of the wall."""
    g = w.graph
    rest = g.full_mask
    for v in cyc:
        rest &= ~(1 << v)
    per = 0
    for v in w.perimeter:
        per |= 1 << v
    inside = 0
    for comp in g.component_masks(rest):
        if not comp & per:
            inside |= comp
    return inside


def _column_walk(w: Wall, start, dy: int, stop: set):
    """Zig-zag column from ``start`` moving vertically by ``dy`` until it meets ``stop``."""
    coord = w.coord
    path = [start]
    x, y = start
    turn = 1
    while coord[(x, y)] not in stop:
        up = (x, y + dy)
        lo = y if dy > 0 else y - 1
        if up in coord and (x + lo) % 2 == 0:
            x, y = up
        else:
            side = (x + turn, y)
            if side not in coord:
                side = (x - turn, y)
            turn = -turn
            if side not in coord or side in path:
                return None
            x, y = side
        path.append((x, y))
    return path


def _row_walk(w: Wall, start, dx: int, stop: set):
    coord = w.coord
    path = [start]
    x, y = start
    while coord[(x, y)] not in stop:
        x += dx
        if (x, y) not in coord:
            return None
        path.append((x, y))
    return path


def _segments(w: Wall, stop: set) -> list[list[list]]:
    """Candidate rails per side of the wall, as elementary-coordinate walks."""
    r = w.r
    coord = w.coord
    bottom = [_column_walk(w, (x, 1), 1, stop) for x in range(1, 2 * r + 1) if (x, 1) in coord]
    top = [_column_walk(w, (x, r), -1, stop) for x in range(2 * r, 0, -1) if (x, r) in coord]
    left = [_row_walk(w, (1 if (1, y) in coord else 2, y), 1, stop) for y in range(r, 0, -1)]
    right = [_row_walk(w, (2 * r if (2 * r, y) in coord else 2 * r - 1, y), -1, stop)
             for y in range(1, r + 1)]
    return [[c for c in side if c] for side in (bottom, right, top, left)]


def _expand(w: Wall, walk: list) -> list[int]:
    """Map an elementary walk to the (possibly subdivided) wall."""
    ids = [w.coord[p] for p in walk]
    if w.subdivide == 0:
        return ids
    out = [ids[0]]
    adj = w.graph.adj
    for a, b in zip(ids, ids[1:]):
        # follow the subdivision path from a to b
        prev, cur = a, None
        for u in w.graph.neighbors(a):
            if u == b or (not w.original[u] and _reaches(w, a, u, b)):
                cur = u
                break
        while cur != b:
            out.append(cur)
            nxt = [u for u in w.graph.neighbors(cur) if u != prev][0]
            prev, cur = cur, nxt
        out.append(b)
    del adj
    return out


def _reaches(w: Wall, a: int, u: int, b: int) -> bool:
    prev, cur = a, u
    while not w.original[cur]:
        prev, cur = cur, [x for x in w.graph.neighbors(cur) if x != prev][0]
    return cur == b


def railed_annulus(w: Wall, x: int, y: int, z: int = 3) -> RailedAnnulus:
    if x < 3 or x % 2 == 0:
        raise ValidationError(f"x must be an odd integer >= 3, got {x}")
    if z < 3 or z % 2 == 0:
        raise ValidationError(f"z must be an odd integer >= 3, got {z}")
    if y < 1:
        raise ValidationError("y must be >= 1")
    need = odd_ceil(2 * x + max(z, y / 4 - 1))
    if w.r < need:
        raise ValidationError(f"wall height {w.r} below the required odd(2x + max(z, y/4 - 1)) = {need}")
    cycles = [list(c) for c in w.layers[:x]]
    inner_cycle = cycles[-1]
    inside = _inside(w, inner_cycle)
    sides = _segments(w, set(inner_cycle))
    chosen: list[list[int]] = []
    used: set = set()
    cursor = [0] * len(sides)
    progress = True
    while len(chosen) < y and progress:
        progress = False
        for s, cands in enumerate(sides):
            if len(chosen) >= y:
                break
            while cursor[s] < len(cands):
                path = _expand(w, cands[cursor[s]])
                cursor[s] += 1
                if (used.isdisjoint(path) and not any(inside >> v & 1 for v in path)
                        and _rail_ok(w, path, cycles)):
                    chosen.append(path)
                    used.update(path)
                    progress = True
                    break
    if len(chosen) < y:
        raise ValidationError(f"found only {len(chosen)} rails, {y} requested")
    ann = RailedAnnulus(cycles, chosen, {})
    ann.pieces = check_annulus(w, ann, z)
    return ann


def _pieces(adj, cyc: list[int], path: list[int]):
    on = set(cyc)
    idx = [i for i, v in enumerate(path) if v in on]
    if not idx:
        return None
    if idx != list(range(idx[0], idx[-1] + 1)):
        return None
    return path[idx[0]: idx[-1] + 1]


def _rail_ok(w: Wall, path, cycles) -> bool:
    return all(_pieces(w.graph.adj, c, path) for c in cycles)


def check_annulus(w: Wall, ann: RailedAnnulus, z: int = 3) -> dict:
    """Audit every railed-annulus invariant; returns the intersection paths."""
    g = w.graph
    adj = g.adj
    cyc_sets = [set(c) for c in ann.cycles]
    for c in ann.cycles:
        if not _is_cycle(adj, c):
            raise ValidationError("annulus cycle is not a cycle")
    for i in range(len(cyc_sets)):
        for j in range(i + 1, len(cyc_sets)):
            if cyc_sets[i] & cyc_sets[j]:
                raise ValidationError("annulus cycles intersect")
    if ann.cycles[0] != w.perimeter:
        raise ValidationError("first cycle is not the perimeter")
    # nesting: each cycle lies strictly inside the previous one
    for i in range(1, len(ann.cycles)):
        ins = _inside(w, ann.cycles[i - 1])
        if any(not ins >> v & 1 for v in ann.cycles[i]):
            raise ValidationError("annulus cycles are not nested")
    inside_last = _inside(w, ann.cycles[-1])
    seen = set()
    pieces = {}
    for j, p in enumerate(ann.paths):
        if len(set(p)) != len(p):
            raise ValidationError("rail repeats a vertex")
        if any(not adj[a] >> b & 1 for a, b in zip(p, p[1:])):
            raise ValidationError("rail is not a path")
        if seen & set(p):
            raise ValidationError("rails intersect")
        seen |= set(p)
        if any(inside_last >> v & 1 for v in p):
            raise ValidationError("rail leaves the annulus")
        for i, c in enumerate(ann.cycles):
            piece = _pieces(adj, c, p)
            if piece is None:
                raise ValidationError(f"C{i + 1} ∩ P{j + 1} is not a non-empty path")
            # consecutive piece vertices must also be adjacent along the cycle
            pieces[(i, j)] = piece
    # central z-subwall sits strictly inside the last cycle
    x = len(ann.cycles)
    sub = _peeled(w, (w.r - z) // 2)
    if (w.r - z) // 2 >= x and sub & ~inside_last:
        raise ValidationError("central subwall is not inside the innermost cycle")
    return pieces


# -- other generators ----------------------------------------------------------

def gen_grid(a: int, b: int) -> Graph:
    if a < 1 or b < 1:
        raise ValidationError("grid sides must be >= 1")
    edges = []
    for i in range(a):
        for j in range(b):
            v = i * b + j
            if j + 1 < b:
                edges.append((v, v + 1))
            if i + 1 < a:
                edges.append((v, v + b))
    return Graph(a * b, edges)


def gen_partial_ktree(n: int, k: int, seed=0, keep: float = 0.7) -> tuple[Graph, TreeDecomposition]:
    """Random k-tree on n vertices with each edge kept with probability ``keep``.

    The decomposition is the natural one with one bag per added vertex.
    """
    if k < 0 or n < k + 1:
        raise ValidationError(f"need n >= k + 1 (n={n}, k={k})")
    if not 0.0 <= keep <= 1.0:
        raise ValidationError("keep must be in [0, 1]")
    rng = random.Random(seed)
    perm = list(range(n))
    rng.shuffle(perm)
    bags = [frozenset(range(k + 1))]
    tedges = []
    edges = {(i, j) for i in range(k + 1) for j in range(i + 1, k + 1)}
    for v in range(k + 1, n):
        b = rng.randrange(len(bags))
        clique = rng.sample(sorted(bags[b]), k)
        for u in clique:
            edges.add((u, v))
        bags.append(frozenset(clique) | {v})
        tedges.append((b, len(bags) - 1))
    kept = [e for e in sorted(edges) if rng.random() < keep]
    g = Graph(n, [(perm[a], perm[b]) for a, b in kept])
    td = TreeDecomposition([frozenset(perm[v] for v in bag) for bag in bags], tedges, n)
    rep = validate_td(g, td)
    if not rep.ok:  # pragma: no cover - construction guarantees validity
        raise ValidationError("; ".join(rep.violations))
    return g, td


def gen_er(n: int, p: float, seed=0) -> Graph:
    if n < 0 or not 0.0 <= p <= 1.0:
        raise ValidationError("bad Erdős–Rényi parameters")
    rng = random.Random(seed)
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p])


def sidecar(w: Wall) -> str:
    return json.dumps(w.metadata(), indent=1)


def random_instance(rng: random.Random, n_max: int, n_min: int = 3):
    """One draw from the test mix: partial 2-tree, partial 3-tree, or Erdős–Rényi.

    Returns ``(kind, graph, decomposition or None)``.
    """
    n = rng.randint(n_min, n_max)
    kind = rng.choice(["pkt2", "pkt3", "er"])
    seed = rng.randrange(1 << 30)
    if kind == "er" or n < 4:
        return "er", gen_er(n, rng.choice([0.25, 0.4, 0.55]), seed), None
    k = 2 if kind == "pkt2" else 3
    g, td = gen_partial_ktree(n, k, seed, keep=rng.choice([0.6, 0.8, 1.0]))
    return kind, g, td
