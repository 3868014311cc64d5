"""Operations on whole Stokes spaces: sections, Stokes loci, level structures,
the level devissage report, elementarity testing and hybrid descent."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .functors import (FunctorError, InconclusiveError, VectFunctor, direct_sum, find_iso, graded, gr_p,
                       hom_dim, induce_from_set, is_split, is_stokes, fiber_restriction, lan, restrict)
from .generators import GenerationError, random_cocartesian, random_stokes, set_components
from .poset import MonotoneMap
from .space import (FiberwiseMap, StokesSpace, fibration_Ip, is_graduation_morphism, is_level_morphism,
                    underlying_set)

__all__ = [
    "CocartesianSection",
    "LevelStructure",
    "DevissageReport",
    "ElementarityVerdict",
    "sections",
    "stokes_locus",
    "devissage_check",
    "corrupt",
    "in_image_of_subfibration",
    "is_elementary",
    "hybrid_descent_check",
    "hybrid_descent_report",
    "restrict_to_open",
]


@dataclass(frozen=True)
class CocartesianSection:
    choice: tuple           # sorted (base element, fiber element) pairs

    def __call__(self, x):
        return dict(self.choice)[x]

    def as_dict(self) -> dict:
        return dict(self.choice)


def _section(space: StokesSpace, choice: dict) -> CocartesianSection:
    return CocartesianSection(tuple((x, choice[x]) for x in space.base.linear_extension()))


def sections(space: StokesSpace) -> list[CocartesianSection]:
    """All cocartesian sections, by backtracking along a linear extension of the base."""
    order = space.base.linear_extension()
    out = []

    def extend(i, choice):
        if i == len(order):
            out.append(_section(space, choice))
            return
        y = order[i]
        lows = space.base.lower_covers(y)
        if not lows:
            for a in space.fibers[y]:
                choice[y] = a
                extend(i + 1, choice)
            del choice[y]
            return
        vals = {space.transition(x, y)(choice[x]) for x in lows}
        if len(vals) == 1:
            choice[y] = vals.pop()
            extend(i + 1, choice)
            del choice[y]

    extend(0, {})
    return out


def stokes_locus(space: StokesSpace, sigma: CocartesianSection, tau: CocartesianSection) -> set:
    """Base elements where the two sections are incomparable.

    The locus is closed (down-closed in the base): comparability at ``x``
    propagates along every transition out of ``x``.
    """
    if sigma == tau:
        raise ValueError("the Stokes locus needs two distinct sections")
    s, t = sigma.as_dict(), tau.as_dict()
    locus = {x for x in space.base if not space.fibers[x].comparable(s[x], t[x])}
    for y in locus:
        for x in space.base.down_set(y):
            assert x in locus, "Stokes locus must be closed under specialization"
    return locus


# ---------------------------------------------------------------------------
# level structures


@dataclass
class LevelStructure:
    """Chain ``I = I^d -> I^{d-1} -> ... -> I^0`` of level graduation morphisms.

    ``maps[k]`` goes from ``spaces[k]`` to ``spaces[k + 1]``; ``spaces[0]`` is
    the finest space and ``spaces[-1]`` has one-point fibers.
    """
    spaces: list
    maps: list
    sequence: tuple = ()

    def __post_init__(self):
        if len(self.maps) != len(self.spaces) - 1:
            raise ValueError("a level structure needs one map between consecutive spaces")
        for k, p in enumerate(self.maps):
            if p.source is not self.spaces[k] or p.target is not self.spaces[k + 1]:
                raise ValueError(f"map {k} does not connect consecutive spaces")
            if not is_level_morphism(p):
                raise ValueError(f"map {k} is not a level morphism")
        for k, s in enumerate(self.spaces):
            if not s.set_locally_constant():
                raise ValueError(f"space {k} does not have a locally constant underlying set")

    def __len__(self) -> int:
        return len(self.maps)


# ---------------------------------------------------------------------------
# devissage


@dataclass
class DevissageReport:
    gr_stokes: bool                 # (i)   Gr_p F is Stokes on I_p
    pushforward_stokes: bool        # (ii)  p_! F is Stokes on J
    square_commutes: bool           # (iii) graded(p_! F) ~ pi_!(Gr_p F)
    detection: bool                 # (iv)  F Stokes <=> (i) and (ii), also on a corruption of F
    input_stokes: bool
    notes: list = field(default_factory=list)

    @property
    def clauses(self) -> dict:
        return {"gr_p_stokes": self.gr_stokes, "pushforward_stokes": self.pushforward_stokes,
                "square_commutes": self.square_commutes, "detection": self.detection}

    @property
    def passed(self) -> bool:
        return all(self.clauses.values())

    def to_json(self) -> dict:
        return {**self.clauses, "input_stokes": self.input_stokes, "passed": self.passed, "notes": list(self.notes)}


def corrupt(F: VectFunctor, space: StokesSpace) -> VectFunctor:
    """``F`` plus a skyscraper at a non-maximal fiber element: never split there."""
    for x in space.base.linear_extension():
        fib = space.fibers[x]
        for c in fib.linear_extension():
            if len(fib.up_set(c)) > 1:
                return direct_sum(F, VectFunctor.skyscraper(space.total, (x, c)))
    raise ValueError("every fiber is discrete; no non-split corruption is available")


def _devissage_parts(space, p, ip, proj, F):
    g = gr_p(F, p)
    pf = lan(p.total_map, F)
    return g, pf, is_stokes(g, ip), is_stokes(pf, p.target)


def devissage_check(space: StokesSpace, p: FiberwiseMap, F: VectFunctor, *, seed: int = 0,
                    check_corruption: bool = True) -> DevissageReport:
    """Evaluate the level devissage square and Stokes detection for ``F`` along ``p``."""
    if p.source is not space and p.source != space:
        raise ValueError("p must start at the given space")
    if not is_level_morphism(p):
        raise ValueError("p is not a level morphism")
    if not is_graduation_morphism(p):
        raise ValueError("p is not a graduation morphism: the target's underlying set is not locally constant")
    notes = []
    ip, proj = fibration_Ip(p)
    g, pf, st_g, st_pf = _devissage_parts(space, p, ip, proj, F)
    left = graded(pf, p.target)
    right = lan(proj.total_map, g)
    try:
        square = find_iso(left, right, seed=seed) is not None
    except InconclusiveError as exc:
        square = False
        notes.append(f"square: {exc}")
    f_stokes = is_stokes(F, space)
    if not f_stokes:
        notes.append("input functor is not Stokes")
    detection = f_stokes == (st_g and st_pf)
    if check_corruption and f_stokes:
        try:
            bad = corrupt(F, space)
        except ValueError as exc:
            notes.append(str(exc))
        else:
            _, _, b_g, b_pf = _devissage_parts(space, p, ip, proj, bad)
            b_st = is_stokes(bad, space)
            detection = detection and not b_st and not (b_g and b_pf)
    return DevissageReport(st_g, st_pf, square, detection, f_stokes, notes)


# ---------------------------------------------------------------------------
# image of a sub-fibration


def in_image_of_subfibration(F: VectFunctor, space: StokesSpace, i: FiberwiseMap | Iterable) -> bool:
    """Whether ``graded(F)`` vanishes outside the image of ``i``.

    ``i`` is a fully faithful fiberwise map into ``space`` or directly a set of
    total elements (its image).
    """
    if isinstance(i, FiberwiseMap):
        if i.target != space:
            raise ValueError("the sub-fibration must map into the given space")
        for x, m in i.maps.items():
            if not m.is_fully_faithful():
                raise ValueError(f"the map is not fully faithful over {x!r}")
        image = {(x, i.maps[x](a)) for x in i.source.base for a in i.source.fibers[x]}
    else:
        image = set(i)
    gr = graded(F, space)
    return all(gr.dims[e] == 0 for e in gr.domain if e not in image)


# ---------------------------------------------------------------------------
# elementarity


@dataclass
class ElementarityVerdict:
    verdict: str                    # elementary-certified | counterexample | inconclusive
    reason: str
    witness: VectFunctor | None = None
    seed: int = 0
    details: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.verdict == "elementary-certified"


def _inclusion_total(space: StokesSpace) -> MonotoneMap:
    iset = underlying_set(space)
    return MonotoneMap(iset.total, space.total, {e: e for e in iset.total}, check=False)


def is_elementary(space: StokesSpace, dim_bound: int = 2, trials: int = 64, seed: int = 0,
                  use_polyhedral: bool = True) -> ElementarityVerdict:
    """Test whether induction from the underlying-set fibration is an equivalence on Stokes functors.

    Certificates: all fibers discrete; the polyhedral criterion (spaces built
    from polyhedral data); an initial base element with a discrete fiber.
    Otherwise full faithfulness is probed on induced generators and essential
    surjectivity on random Stokes functors; without a failure the verdict is
    ``inconclusive``.
    """
    if space.is_discrete():
        return ElementarityVerdict("elementary-certified", "all fibers are discrete", seed=seed)
    if use_polyhedral and "polyhedral" in space.meta:
        from .polyhedral import polyhedral_elementarity_criterion
        crit = polyhedral_elementarity_criterion(space)
        if crit.certified:
            return ElementarityVerdict("elementary-certified", "polyhedral criterion", seed=seed,
                                       details={"criterion": crit.to_json()})
    x0 = space.base.minimum()
    if x0 is not None and space.fibers[x0].is_discrete():
        return ElementarityVerdict(
            "elementary-certified",
            f"base has an initial element {x0!r} with a discrete fiber", seed=seed)
    rng = random.Random(seed)
    iset = underlying_set(space)
    inc = _inclusion_total(space)
    comps = set_components(space)
    roots = sorted(set(comps.values()), key=lambda e: space.total.index(e))
    # full faithfulness on indicator generators
    indicators = []
    for r in roots:
        try:
            g = random_cocartesian(iset, rng, component_dims={s: int(s == r) for s in roots}, attempts=3)
        except GenerationError:
            continue
        indicators.append((r, g))
    induced_cache = {}
    for r, g in indicators:
        induced_cache[r] = lan(inc, g)
    for r, g in indicators:
        for r2, g2 in indicators:
            lo, hi = hom_dim(g, g2), hom_dim(induced_cache[r], induced_cache[r2])
            if lo != hi:
                return ElementarityVerdict(
                    "counterexample",
                    f"full faithfulness fails: dim Hom(i_!G, i_!G') = {hi} but dim Hom(G, G') = {lo} "
                    f"for indicator functors of the components of {r!r} and {r2!r}",
                    witness=induced_cache[r], seed=seed,
                    details={"hom_induced": hi, "hom_set": lo, "components": [repr(r), repr(r2)]})
    inconclusive = 0
    for t in range(trials):
        try:
            F = random_stokes(space, rng, max_dim=dim_bound)
        except GenerationError:
            inconclusive += 1
            continue
        G = graded(F, space)
        try:
            iso = find_iso(induce_from_set(space, G), F, seed=seed + t)
        except InconclusiveError:
            inconclusive += 1
            continue
        if iso is None:
            return ElementarityVerdict(
                "counterexample",
                f"essential surjectivity fails: random Stokes functor (trial {t}) is not induced from its graded",
                witness=F, seed=seed, details={"trial": t})
    return ElementarityVerdict(
        "inconclusive", f"no counterexample in {trials} trials ({inconclusive} inconclusive)", seed=seed,
        details={"trials": trials, "inconclusive_trials": inconclusive})


# ---------------------------------------------------------------------------
# hybrid descent


def restrict_to_open(F: VectFunctor, space: StokesSpace, opens: Iterable) -> tuple[VectFunctor, StokesSpace]:
    sub = space.restrict(opens)
    j = MonotoneMap(sub.total, space.total, {e: e for e in sub.total}, check=False)
    return restrict(j, F), sub


def hybrid_descent_report(space: StokesSpace, cover: Sequence[Iterable], F: VectFunctor) -> dict:
    cover = [set(c) for c in cover]
    if set().union(*cover) != set(space.base.elements):
        raise ValueError("cover does not cover the base")
    for c in cover:
        for x in c:
            if not set(space.base.up_set(x)) <= c:
                raise ValueError("cover elements must be open, i.e. closed upwards in the base")
    local = []
    for c in cover:
        Fc, Sc = restrict_to_open(F, space, c)
        local.append({"open": sorted(map(str, c)), "stokes": is_stokes(Fc, Sc)})
    glob = is_stokes(F, space)
    return {"global_stokes": glob, "local": local,
            "descends": glob == all(l["stokes"] for l in local)}


def hybrid_descent_check(space: StokesSpace, cover: Sequence[Iterable], F: VectFunctor) -> bool:
    """``F`` is Stokes iff its restriction to every open of the cover is Stokes."""
    return hybrid_descent_report(space, cover, F)["descends"]
