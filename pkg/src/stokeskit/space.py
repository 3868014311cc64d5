"""Stokes stratified spaces in finite posets, encoded as poset fibrations.

A :class:`StokesSpace` is a base poset together with a fiber poset over each
base element and monotone transition maps along covering relations of the
base.  The total poset (Grothendieck construction) is what functors live on.
"""
from __future__ import annotations

from functools import cached_property
from typing import Callable, Hashable, Iterable, Mapping

from .poset import MonotoneMap, Poset, PosetError

__all__ = [
    "StokesSpace",
    "FiberwiseMap",
    "total_poset",
    "underlying_set",
    "is_level_morphism",
    "fibration_Ip",
]


class StokesSpace:
    """Base poset, fiber posets and transitions on base covering relations.

    Transitions along arbitrary ``x <= y`` are composites of covering
    transitions; independence of the chosen chain is verified exhaustively on
    construction.
    """

    def __init__(self, base: Poset, fibers: Mapping[Hashable, Poset],
                 transitions: Mapping[tuple, Mapping | MonotoneMap], *, meta: Mapping | None = None):
        self.base = base
        self.fibers = {x: fibers[x] for x in base} if set(fibers) >= set(base) else None
        if self.fibers is None:
            missing = [x for x in base if x not in fibers]
            raise PosetError(f"missing fibers over {missing!r}")
        extra = set(fibers) - set(base.elements)
        if extra:
            raise PosetError(f"fibers over unknown base elements {sorted(map(str, extra))}")
        self._cover_maps: dict[tuple, MonotoneMap] = {}
        covers = set(base.covers())
        for key, t in transitions.items():
            if tuple(key) not in covers:
                raise PosetError(f"transition {key!r} is not on a covering relation of the base")
        for x, y in base.covers():
            if (x, y) not in transitions:
                raise PosetError(f"missing transition for covering relation {x!r} -> {y!r}")
            t = transitions[(x, y)]
            if isinstance(t, MonotoneMap):
                if t.source != self.fibers[x] or t.target != self.fibers[y]:
                    raise PosetError(f"transition {x!r}->{y!r} has wrong source or target")
                self._cover_maps[(x, y)] = t
            else:
                self._cover_maps[(x, y)] = MonotoneMap(self.fibers[x], self.fibers[y], t)
        self.meta = dict(meta or {})
        self._transitions: dict[tuple, MonotoneMap] = {}
        self._check_coherence()

    def _check_coherence(self) -> None:
        base = self.base
        for x in base:
            self._transitions[(x, x)] = MonotoneMap.identity(self.fibers[x])
        # process pairs by increasing interval size so composites are known
        pairs = [(x, y) for x, y in base.strict_pairs()]
        pairs.sort(key=lambda xy: len([z for z in base.up_set(xy[0]) if base.leq(z, xy[1])]))
        for x, y in pairs:
            candidates = []
            for z in base.upper_covers(x):
                if base.leq(z, y):
                    first = self._cover_maps[(x, z)]
                    rest = self._transitions[(z, y)]
                    candidates.append((z, first.then(rest)))
            ref_z, ref = candidates[0]
            for z, m in candidates[1:]:
                if m.assignment != ref.assignment:
                    raise PosetError(
                        f"transitions are not coherent from {x!r} to {y!r}: "
                        f"paths through {ref_z!r} and {z!r} disagree")
            self._transitions[(x, y)] = ref

    # ------------------------------------------------------------------
    def transition(self, x, y) -> MonotoneMap:
        try:
            return self._transitions[(x, y)]
        except KeyError:
            raise PosetError(f"{x!r} is not <= {y!r} in the base") from None

    def cover_transitions(self) -> dict[tuple, MonotoneMap]:
        return dict(self._cover_maps)

    def fiber(self, x) -> Poset:
        return self.fibers[x]

    def __repr__(self) -> str:
        return f"StokesSpace(base={len(self.base)} elements, total={len(self.total)} elements)"

    def __eq__(self, other) -> bool:
        if not isinstance(other, StokesSpace):
            return NotImplemented
        return (self.base == other.base and self.fibers == other.fibers
                and all(self._cover_maps[k].assignment == other._cover_maps[k].assignment
                        for k in self._cover_maps))

    __hash__ = None

    @cached_property
    def _total(self) -> tuple[Poset, frozenset]:
        elems = [(x, a) for x in self.base.linear_extension() for a in self.fibers[x]]
        rel = []
        for x, y in self.base.strict_pairs() + [(x, x) for x in self.base]:
            g = self._transitions[(x, y)]
            fy = self.fibers[y]
            for a in self.fibers[x]:
                ga = g(a)
                for b in fy.up_set(ga):
                    if (x, a) != (y, b):
                        rel.append(((x, a), (y, b)))
        total = Poset(elems, rel, close=False)
        cocart = frozenset(((x, a), (y, self._cover_maps[(x, y)](a)))
                           for x, y in self.base.covers() for a in self.fibers[x])
        return total, cocart

    @property
    def total(self) -> Poset:
        return self._total[0]

    @property
    def cocartesian_edges(self) -> frozenset:
        return self._total[1]

    def fiber_elements(self, x) -> list[tuple]:
        return [(x, a) for a in self.fibers[x]]

    def is_discrete(self) -> bool:
        return all(f.is_discrete() for f in self.fibers.values())

    def set_locally_constant(self) -> bool:
        """All transitions are bijections of underlying sets."""
        return all(m.is_bijective_on_sets() for m in self._cover_maps.values())

    def restrict(self, base_elements: Iterable) -> "StokesSpace":
        """Restriction to a subposet of the base (typically an open, i.e. up-closed, set)."""
        keep = set(base_elements)
        sub = self.base.subposet(keep)
        # covering relations of the subposet may be composites in the base
        trans = {(x, y): self._transitions[(x, y)].assignment for x, y in sub.covers()}
        return StokesSpace(sub, {x: self.fibers[x] for x in sub}, trans, meta=self.meta)

    def relabel(self, base_map: Callable | Mapping | None = None,
                fiber_map: Callable | Mapping | None = None) -> "StokesSpace":
        bm = _as_callable(base_map)
        fm = _as_callable(fiber_map)
        base = self.base.relabel(bm)
        fibers = {bm(x): self.fibers[x].relabel(fm) for x in self.base}
        trans = {(bm(x), bm(y)): {fm(a): fm(b) for a, b in m.assignment.items()}
                 for (x, y), m in self._cover_maps.items()}
        return StokesSpace(base, fibers, trans, meta=self.meta)

    @classmethod
    def constant(cls, base: Poset, fiber: Poset) -> "StokesSpace":
        return cls(base, {x: fiber for x in base},
                   {(x, y): {a: a for a in fiber} for x, y in base.covers()})

    @classmethod
    def point(cls, fiber: Poset, label="*") -> "StokesSpace":
        return cls(Poset([label]), {label: fiber}, {})


def _as_callable(m):
    if m is None:
        return lambda z: z
    if isinstance(m, Mapping):
        return lambda z: m.get(z, z)
    return m


def total_poset(s: StokesSpace) -> tuple[Poset, frozenset]:
    """Total poset of the fibration and its cocartesian covering edges."""
    return s.total, s.cocartesian_edges


def underlying_set(s: StokesSpace) -> StokesSpace:
    """Same fibers with trivial orders; transitions unchanged."""
    return StokesSpace(s.base, {x: f.discrete() for x, f in s.fibers.items()},
                       {k: m.assignment for k, m in s.cover_transitions().items()}, meta=s.meta)


class FiberwiseMap:
    """Family of monotone maps ``I_x -> J_x`` commuting with transitions."""

    def __init__(self, source: StokesSpace, target: StokesSpace, maps: Mapping, check: bool = True):
        if source.base != target.base:
            raise PosetError("fiberwise maps need a common base")
        self.source = source
        self.target = target
        self.maps: dict = {}
        for x in source.base:
            m = maps[x]
            if not isinstance(m, MonotoneMap):
                m = MonotoneMap(source.fibers[x], target.fibers[x], m)
            self.maps[x] = m
        if check:
            for x, y in source.base.covers():
                gs = source.transition(x, y)
                gt = target.transition(x, y)
                for a in source.fibers[x]:
                    if self.maps[y](gs(a)) != gt(self.maps[x](a)):
                        raise PosetError(f"fiberwise map does not commute with the transition {x!r}->{y!r} at {a!r}")

    def __call__(self, x, a):
        return self.maps[x](a)

    @cached_property
    def total_map(self) -> MonotoneMap:
        return MonotoneMap(self.source.total, self.target.total,
                           {(x, a): (x, self.maps[x](a)) for x, a in self.source.total}, check=False)

    def then(self, other: "FiberwiseMap") -> "FiberwiseMap":
        return FiberwiseMap(self.source, other.target,
                            {x: self.maps[x].then(other.maps[x]) for x in self.source.base}, check=False)

    @classmethod
    def identity(cls, s: StokesSpace) -> "FiberwiseMap":
        return cls(s, s, {x: MonotoneMap.identity(s.fibers[x]) for x in s.base}, check=False)

    @classmethod
    def to_point(cls, s: StokesSpace, label="*") -> "FiberwiseMap":
        """Structure map to the trivial fibration with one-point fibers."""
        pt = Poset([label])
        target = StokesSpace.constant(s.base, pt)
        return cls(s, target, {x: {a: label for a in s.fibers[x]} for x in s.base}, check=False)


def is_level_morphism(p: FiberwiseMap) -> bool:
    """``p(a) < p(b)`` in ``J_x`` implies ``a < b`` in ``I_x`` for every base element."""
    for x in p.source.base:
        fi, fj = p.source.fibers[x], p.target.fibers[x]
        px = p.maps[x]
        for a in fi:
            for b in fi:
                if fj.lt(px(a), px(b)) and not fi.lt(a, b):
                    return False
    return True


def is_graduation_morphism(p: FiberwiseMap) -> bool:
    """The target's underlying set is locally constant over the base."""
    return p.target.set_locally_constant()


def fibration_Ip(p: FiberwiseMap) -> tuple[StokesSpace, FiberwiseMap]:
    """The fibration ``I_p`` with ``a <=_p a'`` iff ``p(a) = p(a')`` and ``a <= a'``.

    Returns the space and the projection ``I_p -> J^set``.
    """
    src = p.source
    fibers = {}
    for x in src.base:
        f = src.fibers[x]
        px = p.maps[x]
        fibers[x] = Poset(f.elements, [(a, b) for a, b in f.strict_pairs() if px(a) == px(b)], close=False)
    trans = {k: m.assignment for k, m in src.cover_transitions().items()}
    ip = StokesSpace(src.base, fibers, trans, meta=src.meta)
    jset = underlying_set(p.target)
    proj = FiberwiseMap(ip, jset, {x: p.maps[x].assignment for x in src.base})
    return ip, proj
