"""Finite posets, monotone maps, simplicial complexes and finality."""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Callable, Hashable, Iterable, Iterator, Mapping, Sequence

from .linalg import sparse_rank

Label = Hashable

__all__ = [
    "Poset",
    "MonotoneMap",
    "SimplicialComplex",
    "Finality",
    "PosetError",
    "is_final",
    "face_poset",
    "barycentric",
    "is_full",
    "star_neighborhood",
    "reduced_nerve_homology",
    "sort_key",
]


class PosetError(ValueError):
    pass


def sort_key(label) -> tuple:
    """Total order on heterogeneous labels used for deterministic tie-breaking."""
    if isinstance(label, tuple):
        return (1, tuple(sort_key(x) for x in label))
    if isinstance(label, frozenset):
        return (2, tuple(sorted(sort_key(x) for x in label)))
    return (0, str(label))


class Poset:
    """Immutable finite poset.

    ``leq`` is stored as one bitmask per element: bit ``j`` of ``_up[i]`` is set
    iff ``elements[i] <= elements[j]``.  Construction closes the given pairs
    reflexively and transitively (unless ``close=False``, in which case the
    relation must already be transitive) and rejects cycles.
    """

    __slots__ = ("elements", "_index", "_up", "_down", "_covers", "_hash")

    def __init__(self, elements: Iterable[Label], leq: Iterable[tuple[Label, Label]] = (), *, close: bool = True):
        self.elements = tuple(elements)
        self._index = {e: i for i, e in enumerate(self.elements)}
        if len(self._index) != len(self.elements):
            raise PosetError("element labels must be unique")
        n = len(self.elements)
        up = [1 << i for i in range(n)]
        for a, b in leq:
            try:
                up[self._index[a]] |= 1 << self._index[b]
            except KeyError as exc:
                raise PosetError(f"relation mentions unknown element {exc.args[0]!r}") from None
        if close:
            # Warshall on bitsets
            for k in range(n):
                bk = 1 << k
                uk = up[k]
                for i in range(n):
                    if up[i] & bk:
                        up[i] |= uk
        else:
            for i in range(n):
                acc = up[i]
                for j in _bits(up[i]):
                    acc |= up[j]
                if acc != up[i]:
                    raise PosetError(f"relation is not transitive at {self.elements[i]!r}")
        for i in range(n):
            for j in _bits(up[i]):
                if j != i and up[j] >> i & 1:
                    raise PosetError(
                        f"antisymmetry fails: {self.elements[i]!r} <= {self.elements[j]!r} <= {self.elements[i]!r}")
        down = [0] * n
        for i in range(n):
            for j in _bits(up[i]):
                down[j] |= 1 << i
        self._up = tuple(up)
        self._down = tuple(down)
        self._covers = None
        self._hash = None

    # -- basic protocol -------------------------------------------------
    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[Label]:
        return iter(self.elements)

    def __contains__(self, x) -> bool:
        return x in self._index

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poset):
            return NotImplemented
        if set(self.elements) != set(other.elements):
            return False
        return set(self.strict_pairs()) == set(other.strict_pairs())

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((frozenset(self.elements), frozenset(self.strict_pairs())))
        return self._hash

    def __repr__(self) -> str:
        rel = ", ".join(f"{a!r}<{b!r}" for a, b in self.covers())
        return f"Poset({list(self.elements)!r}; {rel})"

    def index(self, x: Label) -> int:
        return self._index[x]

    # -- order queries --------------------------------------------------
    def leq(self, a: Label, b: Label) -> bool:
        return bool(self._up[self._index[a]] >> self._index[b] & 1)

    def lt(self, a: Label, b: Label) -> bool:
        return a != b and self.leq(a, b)

    def comparable(self, a: Label, b: Label) -> bool:
        return self.leq(a, b) or self.leq(b, a)

    def up_set(self, a: Label) -> list[Label]:
        return [self.elements[j] for j in _bits(self._up[self._index[a]])]

    def down_set(self, b: Label) -> list[Label]:
        return [self.elements[j] for j in _bits(self._down[self._index[b]])]

    def strict_pairs(self) -> list[tuple[Label, Label]]:
        return [(self.elements[i], self.elements[j])
                for i in range(len(self)) for j in _bits(self._up[i]) if i != j]

    def covers(self) -> list[tuple[Label, Label]]:
        """Covering relations a < b with nothing strictly between."""
        if self._covers is None:
            out = []
            for i in range(len(self)):
                above = self._up[i] & ~(1 << i)
                for j in _bits(above):
                    between = above & self._down[j] & ~(1 << j)
                    if not between:
                        out.append((self.elements[i], self.elements[j]))
            self._covers = tuple(out)
        return list(self._covers)

    def upper_covers(self, a: Label) -> list[Label]:
        return [y for x, y in self.covers() if x == a]

    def lower_covers(self, b: Label) -> list[Label]:
        return [x for x, y in self.covers() if y == b]

    def minimal(self) -> list[Label]:
        return [e for i, e in enumerate(self.elements) if self._down[i] == 1 << i]

    def maximal(self) -> list[Label]:
        return [e for i, e in enumerate(self.elements) if self._up[i] == 1 << i]

    def minimum(self) -> Label | None:
        m = self.minimal()
        return m[0] if len(m) == 1 and set(self.up_set(m[0])) == set(self.elements) else None

    def maximum(self) -> Label | None:
        m = self.maximal()
        return m[0] if len(m) == 1 and set(self.down_set(m[0])) == set(self.elements) else None

    def is_discrete(self) -> bool:
        return all(u == 1 << i for i, u in enumerate(self._up))

    def is_total(self) -> bool:
        return all(self.comparable(a, b) for a, b in combinations(self.elements, 2))

    def linear_extension(self) -> list[Label]:
        """Deterministic Kahn ordering; ties broken by :func:`sort_key`."""
        indeg = {e: len(self.lower_covers(e)) for e in self.elements}
        heap = [(sort_key(e), i, e) for i, e in enumerate(self.elements) if indeg[e] == 0]
        heapq.heapify(heap)
        out = []
        while heap:
            _, _, e = heapq.heappop(heap)
            out.append(e)
            for f in self.upper_covers(e):
                indeg[f] -= 1
                if indeg[f] == 0:
                    heapq.heappush(heap, (sort_key(f), self._index[f], f))
        return out

    def strict_chains(self, length: int) -> list[tuple[Label, ...]]:
        """All chains a_0 < ... < a_length (``length`` strict steps)."""
        order = self.linear_extension()
        chains = [(e,) for e in order]
        for _ in range(length):
            nxt = []
            for c in chains:
                last = self._index[c[-1]]
                for j in _bits(self._up[last] & ~(1 << last)):
                    nxt.append(c + (self.elements[j],))
            chains = nxt
        return chains

    # -- constructions --------------------------------------------------
    def subposet(self, labels: Iterable[Label]) -> "Poset":
        keep = [e for e in self.elements if e in set(labels)]
        ks = set(keep)
        return Poset(keep, [(a, b) for a, b in self.strict_pairs() if a in ks and b in ks], close=False)

    def relabel(self, f: Callable[[Label], Label] | Mapping) -> "Poset":
        g = f.__getitem__ if isinstance(f, Mapping) else f
        return Poset([g(e) for e in self.elements], [(g(a), g(b)) for a, b in self.strict_pairs()], close=False)

    def discrete(self) -> "Poset":
        return Poset(self.elements)

    def opposite(self) -> "Poset":
        return Poset(self.elements, [(b, a) for a, b in self.strict_pairs()], close=False)

    @classmethod
    def chain(cls, labels: Sequence[Label]) -> "Poset":
        return cls(labels, list(zip(labels, labels[1:])))

    @classmethod
    def antichain(cls, labels: Sequence[Label]) -> "Poset":
        return cls(labels)


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class MonotoneMap:
    """Order-preserving map between finite posets (checked on construction)."""

    __slots__ = ("source", "target", "assignment")

    def __init__(self, source: Poset, target: Poset, assignment: Mapping[Label, Label], check: bool = True):
        self.source = source
        self.target = target
        self.assignment = dict(assignment)
        if check:
            missing = [a for a in source if a not in self.assignment]
            if missing:
                raise PosetError(f"map undefined on {missing!r}")
            for a in source:
                if self.assignment[a] not in target:
                    raise PosetError(f"{a!r} maps to {self.assignment[a]!r}, not in target")
            for a, b in source.covers():
                if not target.leq(self.assignment[a], self.assignment[b]):
                    raise PosetError(f"not monotone: {a!r} <= {b!r} but images are not ordered")

    def __call__(self, a: Label) -> Label:
        return self.assignment[a]

    def __eq__(self, other) -> bool:
        if not isinstance(other, MonotoneMap):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and all(self(a) == other(a) for a in self.source))

    def __repr__(self) -> str:
        return f"MonotoneMap({self.assignment!r})"

    @classmethod
    def identity(cls, p: Poset) -> "MonotoneMap":
        return cls(p, p, {a: a for a in p}, check=False)

    @classmethod
    def inclusion(cls, sub: Poset, ambient: Poset) -> "MonotoneMap":
        return cls(sub, ambient, {a: a for a in sub})

    def then(self, other: "MonotoneMap") -> "MonotoneMap":
        """``other o self``."""
        return MonotoneMap(self.source, other.target, {a: other(self(a)) for a in self.source}, check=False)

    def is_injective(self) -> bool:
        return len(set(self.assignment.values())) == len(self.assignment)

    def is_bijective_on_sets(self) -> bool:
        return self.is_injective() and set(self.assignment.values()) == set(self.target.elements)

    def is_fully_faithful(self) -> bool:
        return self.is_injective() and all(
            self.source.leq(a, b) == self.target.leq(self(a), self(b))
            for a in self.source for b in self.source)


# ---------------------------------------------------------------------------
# simplicial complexes


class SimplicialComplex:
    """Abstract simplicial complex with faces stored as frozensets."""

    def __init__(self, vertices: Iterable[Label], faces: Iterable[Iterable[Label]], *, close: bool = True):
        self.vertices = tuple(vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise PosetError("vertex labels must be unique")
        fs = {frozenset(f) for f in faces if f}
        fs |= {frozenset([v]) for v in self.vertices}
        if close:
            closed = set()
            for f in fs:
                items = sorted(f, key=sort_key)
                for k in range(1, len(items) + 1):
                    closed.update(frozenset(c) for c in combinations(items, k))
            fs = closed
        vs = set(self.vertices)
        for f in fs:
            if not f <= vs:
                raise PosetError(f"face {sorted(f, key=sort_key)!r} uses unknown vertices")
            if len(f) > 1 and any(frozenset(f - {v}) not in fs for v in f):
                raise PosetError(f"face set not closed under subsets at {sorted(f, key=sort_key)!r}")
        self.faces = frozenset(fs)

    def faces_of_dim(self, k: int) -> list[frozenset]:
        return sorted((f for f in self.faces if len(f) == k + 1), key=sort_key)

    @property
    def dimension(self) -> int:
        return max((len(f) for f in self.faces), default=0) - 1

    def subcomplex(self, vertices: Iterable[Label]) -> "SimplicialComplex":
        """Full subcomplex spanned by ``vertices``."""
        vs = frozenset(vertices)
        return SimplicialComplex([v for v in self.vertices if v in vs], [f for f in self.faces if f <= vs])

    def __repr__(self) -> str:
        return f"SimplicialComplex({len(self.vertices)} vertices, {len(self.faces)} faces)"


def face_label(face: Iterable[Label]) -> tuple:
    return tuple(sorted(face, key=sort_key))


def face_poset(k: SimplicialComplex) -> Poset:
    """Faces ordered by inclusion; labels are sorted vertex tuples."""
    faces = sorted(k.faces, key=lambda f: (len(f), sort_key(face_label(f))))
    labels = [face_label(f) for f in faces]
    rel = [(face_label(f), face_label(g)) for f in faces for g in faces
           if len(g) == len(f) + 1 and f < g]
    return Poset(labels, rel)


def barycentric(k: SimplicialComplex) -> SimplicialComplex:
    """Barycentric subdivision: vertices are faces, simplices are flags."""
    fp = face_poset(k)
    top = k.dimension
    flags = []
    for n in range(top + 1):
        flags.extend(fp.strict_chains(n))
    return SimplicialComplex(fp.elements, flags, close=False)


def is_full(s: SimplicialComplex, k: SimplicialComplex) -> bool:
    """Every face of ``k`` meets ``s`` in the empty set or in a face of ``s``."""
    vs = frozenset(s.vertices)
    if not s.faces <= k.faces:
        raise PosetError("s is not a subcomplex of k")
    return all(not (f & vs) or (f & vs) in s.faces for f in k.faces)


def star_neighborhood(s: SimplicialComplex, k: SimplicialComplex) -> Poset:
    """Subposet of the face poset of ``k`` made of faces with a vertex in ``s``."""
    vs = frozenset(s.vertices)
    fp = face_poset(k)
    return fp.subposet([lab for lab in fp if vs & frozenset(lab)])


# ---------------------------------------------------------------------------
# finality


def reduced_nerve_homology(p: Poset, max_degree: int = 3) -> dict[int, int]:
    """Reduced rational homology of the order complex, degrees -1..max_degree."""
    chains = {n: p.strict_chains(n) for n in range(0, max_degree + 2)}
    chains[-1] = [()]
    index = {n: {c: i for i, c in enumerate(cs)} for n, cs in chains.items()}

    def boundary_rank(n: int) -> int:
        # boundary C_n -> C_{n-1}; rows indexed by n-chains
        if n < 0 or not chains.get(n):
            return 0
        rows = []
        for c in chains[n]:
            row = {}
            for i in range(len(c)):
                face = c[:i] + c[i + 1:]
                row[index[n - 1][face]] = Fraction((-1) ** i)
            rows.append(row)
        return sparse_rank(rows)

    ranks = {n: boundary_rank(n) for n in range(0, max_degree + 2)}
    out = {}
    for n in range(-1, max_degree + 1):
        dim = len(chains[n])
        out[n] = dim - ranks.get(n, 0) - ranks.get(n + 1, 0)
    return out


@dataclass(frozen=True)
class Finality:
    final: bool
    certified: bool
    method: str
    failing_at: Label | None = None

    def __bool__(self) -> bool:
        return self.final


def is_final(f: MonotoneMap, max_degree: int = 3) -> Finality:
    """Quillen-style finality test for a map of finite posets.

    For each target element ``i`` the slice ``{j : f(j) <= i}`` must be
    weakly contractible.  A slice with a maximum or a minimum is certified
    contractible; otherwise rational reduced homology of its nerve is checked
    up to ``max_degree`` (weaker than contractibility, reported as such).
    """
    certified = True
    for i in f.target.linear_extension():
        slice_ = [j for j in f.source if f.target.leq(f(j), i)]
        if not slice_:
            return Finality(False, True, "empty-slice", i)
        sub = f.source.subposet(slice_)
        if sub.maximum() is not None or sub.minimum() is not None:
            continue
        h = reduced_nerve_homology(sub, max_degree)
        if any(h.values()):
            return Finality(False, True, "homology", i)
        certified = False
    return Finality(True, certified, "certified" if certified else "homology-checked")
