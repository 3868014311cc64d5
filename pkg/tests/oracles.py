"""Independent brute-force oracles shared by the acceptance and property tests."""
from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations, permutations, product

from stokeskit.functors import VectFunctor, induced, iso_exists
from stokeskit.linalg import QMatrix
from stokeskit.poset import Poset


def sign_changes(q1, q2, r=1e-4, step=1e-3):
    """Grid angles (radians) after which ``Re(q1 - q2)(r e^{i theta})`` changes sign.

    The grid is offset by half a step so it never samples an exact zero.
    """
    n = math.ceil(2 * math.pi / step)
    grid = [(i + 0.5) * 2 * math.pi / n for i in range(n)]
    vals = [(q1.value(r, t) - q2.value(r, t)).real > 0 for t in grid]
    return [grid[i] for i in range(n) if vals[i] != vals[(i + 1) % n]]


def circ(a: float, b: float) -> float:
    d = abs(a - b) % (2 * math.pi)
    return min(d, 2 * math.pi - d)


def posets_up_to_iso(n: int) -> list[Poset]:
    """All posets on ``n`` elements, one per isomorphism class (brute force)."""
    elems = list(range(n))
    pairs = [(a, b) for a in elems for b in elems if a != b]
    seen, out = set(), []
    for mask in range(1 << len(pairs)):
        rel = {pairs[i] for i in range(len(pairs)) if mask >> i & 1}
        if any((b, a) in rel for a, b in rel):
            continue
        if any((a, c) not in rel for a, b in rel for b2, c in rel if b == b2 and a != c):
            continue
        canon = min(tuple(sorted((p[a], p[b]) for a, b in rel)) for p in permutations(elems))
        if canon in seen:
            continue
        seen.add(canon)
        out.append(Poset([f"e{i}" for i in elems], [(f"e{a}", f"e{b}") for a, b in rel]))
    return out


def zero_one_matrices(rows: int, cols: int):
    for bits in product((0, 1), repeat=rows * cols):
        yield QMatrix([[Fraction(bits[i * cols + j]) for j in range(cols)] for i in range(rows)], rows, cols)


def functors_with_dims(p: Poset, dims: dict):
    """Every functor whose cover maps are 0/1 matrices (one per rank pattern of entries)."""
    covers = list(p.covers())
    choices = [list(zero_one_matrices(dims[b], dims[a])) for a, b in covers]
    for combo in product(*choices):
        try:
            yield VectFunctor(p, dims, dict(zip(covers, combo)))
        except ValueError:
            continue


def split_by_search(F: VectFunctor) -> bool:
    """``F`` is split iff ``F ~ i_!(V)`` where ``V`` solves ``dim F(a) = sum_{b <= a} dim V(b)``."""
    p = F.domain
    v = {}
    for a in p.linear_extension():
        v[a] = F.dims[a] - sum(v[b] for b in p.down_set(a) if b != a)
        if v[a] < 0:
            return False
    return iso_exists(induced(p, v), F)
