"""Freeze the downward-closure folios of every small boundaried graph.

For each boundaried graph with ``t <= 2`` and at most ``k`` interior vertices
the set of detail-2 patterns reachable by edge deletion, isolated vertex
deletion and degree-2 dissolution is computed by a shared memoised walk from
the complete graph.  Deleting a vertex is the same as deleting its edges and
then the isolated vertex, so those three moves suffice.

Output starts with one ``# universe <t> <hex,...>`` line per boundary size naming
the pattern behind each bit, followed by ``<form hex> <bits>`` lines.

    python tests/oracles/closure_table.py --k 6 --out tests/data/closure_d2.txt.gz
"""

from __future__ import annotations

import argparse
import gzip
import sys
import time

from fmdel.canon import _canon_standard
from fmdel.folio import pattern_universe

D = 2


def _drop(adj, v):
    low = (1 << v) - 1
    return [(r & low) | ((r >> (v + 1)) << v) for i, r in enumerate(adj) if i != v]


def closure_bits(t: int, k: int, d: int = D) -> dict[bytes, int]:
    uni = pattern_universe(t, d)
    bit_of = {f: 1 << i for i, f in enumerate(uni.forms)}
    memo: dict[bytes, int] = {}

    def walk(adj):
        form, _, code = _canon_standard(tuple(adj), t)
        bits = memo.get(form)
        if bits is not None:
            return bits
        n = len(code)
        m = sum(x.bit_count() for x in code) // 2
        bits = bit_of.get(form, 0) if max(m, n - t) <= d else 0
        for u in range(n):
            row = code[u] >> (u + 1)
            v = u + 1
            while row:
                if row & 1:
                    c = list(code)
                    c[u] &= ~(1 << v)
                    c[v] &= ~(1 << u)
                    bits |= walk(c)
                row >>= 1
                v += 1
        for v in range(t, n):
            deg = code[v].bit_count()
            if deg == 0:
                bits |= walk(_drop(code, v))
            elif deg == 2:
                x = code[v]
                a = (x & -x).bit_length() - 1
                b = (x ^ (1 << a)).bit_length() - 1
                c = list(code)
                c[a] |= 1 << b
                c[b] |= 1 << a
                bits |= walk(_drop(c, v))
        memo[form] = bits
        return bits

    n = t + k
    walk([((1 << n) - 1) & ~(1 << i) for i in range(n)])
    return memo


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k", type=int, default=6)
    ap.add_argument("--out", required=True)
    args = ap.parse_args(argv)
    sys.setrecursionlimit(10_000)
    lines = []
    header = []
    for t in (0, 1, 2):
        header.append(f"# universe {t} " + ",".join(f.hex() for f in pattern_universe(t, D).forms))
        start = time.time()
        memo = closure_bits(t, args.k)
        lines += [f"{f.hex()} {b}" for f, b in memo.items()]
        print(f"t={t}: {len(memo)} graphs in {time.time() - start:.1f}s", file=sys.stderr, flush=True)
    lines.sort()
    with gzip.open(args.out, "wt") as fh:
        fh.write("\n".join(header + lines) + "\n")


if __name__ == "__main__":
    main()
