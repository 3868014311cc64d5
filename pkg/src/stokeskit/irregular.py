"""Exponential factors on the circle: Stokes directions, the stratified circle
of an irregular class, and its level filtration.

Coefficients are kept in polar form ``modulus * exp(i pi angle)`` with rational
``angle`` so every Stokes direction is an exact rational multiple of pi.
Angles ``theta`` on the (possibly ramified) circle are stored as ``theta / pi``
in ``[0, 2d)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import lcm
from typing import Sequence

from .linalg import parse_q
from .poset import MonotoneMap, Poset
from .space import FiberwiseMap, StokesSpace, is_level_morphism

__all__ = [
    "Term",
    "PuiseuxExponential",
    "IrregularClass",
    "leading_term",
    "stokes_directions",
    "order_sign",
    "circle_space",
    "level_filtration",
    "format_angle",
]


def _mod2(x: Fraction) -> Fraction:
    return x - 2 * (x // 2)


@dataclass(frozen=True)
class Term:
    """``modulus * exp(i pi angle) * z^(-k)``."""
    k: Fraction
    modulus: Fraction
    angle: Fraction

    def __post_init__(self):
        object.__setattr__(self, "k", parse_q(self.k))
        object.__setattr__(self, "modulus", parse_q(self.modulus))
        object.__setattr__(self, "angle", _mod2(parse_q(self.angle)))
        if self.k <= 0:
            raise ValueError("exponents must be positive pole orders")
        if self.modulus <= 0:
            raise ValueError("modulus must be positive")

    def negated(self) -> "Term":
        return Term(self.k, self.modulus, self.angle + 1)

    def to_complex(self) -> complex:
        import cmath
        return self.modulus * cmath.exp(1j * cmath.pi * float(self.angle))


@dataclass(frozen=True)
class PuiseuxExponential:
    """A finite sum of polar terms with pairwise distinct exponents."""
    terms: tuple = ()
    name: str | None = None

    def __post_init__(self):
        terms = tuple(sorted(self.terms, key=lambda t: -t.k))
        ks = [t.k for t in terms]
        if len(set(ks)) != len(ks):
            raise ValueError("repeated exponent: combine terms with equal pole order first")
        object.__setattr__(self, "terms", terms)

    @property
    def ramification(self) -> int:
        return lcm(1, *(t.k.denominator for t in self.terms))

    @property
    def pole_order(self) -> Fraction:
        return self.terms[0].k if self.terms else Fraction(0)

    def key(self) -> tuple:
        return tuple((t.k, t.modulus, t.angle) for t in self.terms)

    def value(self, r: float, theta: float) -> complex:
        """Numerical value at ``z = r exp(i theta)`` (``theta`` in radians, on the cover)."""
        import cmath
        return sum((t.to_complex() * r ** (-float(t.k)) * cmath.exp(-1j * float(t.k) * theta)
                    for t in self.terms), 0j)

    def deck(self) -> "PuiseuxExponential":
        """Effect of going once around the base circle: ``z^(-k) -> exp(-2 pi i k) z^(-k)``."""
        return PuiseuxExponential(tuple(Term(t.k, t.modulus, t.angle - 2 * t.k) for t in self.terms), self.name)

    @classmethod
    def zero(cls, name: str | None = None) -> "PuiseuxExponential":
        return cls((), name)

    @classmethod
    def monomial(cls, k, modulus=1, angle=0, name: str | None = None) -> "PuiseuxExponential":
        return cls((Term(parse_q(k), parse_q(modulus), parse_q(angle)),), name)


class IrregularClass:
    """Pairwise distinct exponentials with labels (``name`` or position)."""

    def __init__(self, exponentials: Sequence[PuiseuxExponential]):
        self.exponentials = tuple(exponentials)
        keys = [q.key() for q in self.exponentials]
        if len(set(keys)) != len(keys):
            raise ValueError("exponentials must be pairwise distinct")
        self.labels = tuple(q.name if q.name is not None else str(i) for i, q in enumerate(self.exponentials))
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("exponential labels must be unique")
        self.ramification = lcm(1, *(q.ramification for q in self.exponentials))
        self._by_label = dict(zip(self.labels, self.exponentials))
        for a, b in combinations(self.labels, 2):
            leading_term(self._by_label[a], self._by_label[b])

    def __len__(self) -> int:
        return len(self.exponentials)

    def __getitem__(self, label: str) -> PuiseuxExponential:
        return self._by_label[label]

    def __repr__(self) -> str:
        return f"IrregularClass({list(self.labels)!r}, d={self.ramification})"

    def pairs(self):
        return list(combinations(self.labels, 2))

    def lead(self, a: str, b: str) -> Term:
        return leading_term(self._by_label[a], self._by_label[b])

    def is_galois_stable(self) -> bool:
        keys = {q.key() for q in self.exponentials}
        return all(q.deck().key() in keys for q in self.exponentials)

    def deck_permutation(self) -> dict:
        by_key = {q.key(): l for l, q in zip(self.labels, self.exponentials)}
        out = {}
        for l, q in zip(self.labels, self.exponentials):
            k = q.deck().key()
            if k not in by_key:
                raise ValueError("irregular class is not stable under the deck transformation")
            out[l] = by_key[k]
        return out


def leading_term(q1: PuiseuxExponential, q2: PuiseuxExponential) -> Term:
    """Leading term of ``q1 - q2``; it must be exactly representable in polar form."""
    a = {t.k: t for t in q1.terms}
    b = {t.k: t for t in q2.terms}
    for k in sorted(set(a) | set(b), reverse=True):
        ta, tb = a.get(k), b.get(k)
        if tb is None:
            return ta
        if ta is None:
            return tb.negated()
        if ta.modulus == tb.modulus and ta.angle == tb.angle:
            continue
        diff = _mod2(ta.angle - tb.angle)
        if diff == 0:
            m = ta.modulus - tb.modulus
            return Term(k, abs(m), ta.angle if m > 0 else ta.angle + 1)
        if diff == 1:
            return Term(k, ta.modulus + tb.modulus, ta.angle)
        raise ValueError(
            f"leading coefficient of the difference at pole order {k} is not a rational-angle polar number")
    raise ValueError("the two exponentials are equal")


def _cos_sign(t: Fraction) -> int:
    """Sign of ``cos(pi t)`` for rational ``t``."""
    u = _mod2(t + Fraction(1, 2))          # cos(pi t) > 0 iff t in (-1/2, 1/2) mod 2
    if u == 0 or u == 1:
        return 0
    return 1 if u < 1 else -1


def order_sign(term: Term, theta: Fraction) -> int:
    """Sign of ``Re(term(r e^{i pi theta}))`` as ``r -> 0``: sign of ``cos(pi (angle - k theta))``."""
    return _cos_sign(term.angle - term.k * theta)


def stokes_directions(q1: PuiseuxExponential, q2: PuiseuxExponential, d: int | None = None) -> list[Fraction]:
    """Angles ``theta / pi`` in ``[0, 2d)`` where ``Re`` of the leading term of ``q1 - q2`` vanishes.

    ``cos(pi (alpha - k theta)) = 0`` gives ``theta = (alpha - 1/2 - m) / k``;
    there are ``2 k d`` of them on the ``d``-fold cover.
    """
    t = leading_term(q1, q2)
    if d is None:
        d = lcm(q1.ramification, q2.ramification)
    out = set()
    top = 2 * d
    # theta = (alpha - 1/2 - m)/k ranges over an arithmetic progression of step 1/k
    start = (t.angle - Fraction(1, 2)) / t.k
    step = 1 / t.k
    x = start - step * ((start // step) + 1)
    while x < top:
        if x >= 0:
            out.add(x)
        x += step
    res = sorted(out)
    assert all(order_sign(t, th) == 0 for th in res)
    return res


def format_angle(t: Fraction) -> str:
    return f"{t}π" if t != 0 else "0"


def _order_at(cls: IrregularClass, theta: Fraction) -> Poset:
    rel = []
    for a, b in cls.pairs():
        s = order_sign(cls.lead(a, b), theta)
        if s < 0:
            rel.append((a, b))
        elif s > 0:
            rel.append((b, a))
    return Poset(cls.labels, rel, close=False)


def circle_space(cls: IrregularClass) -> StokesSpace:
    """Stratified circle (on the ``d``-fold cover) with the fibration of exponentials.

    Base: Stokes directions ``D0, D1, ...`` in increasing angle and arcs ``A0, A1, ...``
    with ``Ai`` between ``Di`` and ``D(i+1)``; each direction lies below its two
    adjacent arcs.  Fibers carry the dominance order at that angle.  Angles are
    recorded in ``meta["angles"]``; for ``d > 1`` the deck rotation is recorded in
    ``meta["deck"]``.
    """
    d = cls.ramification
    dirs = sorted({th for a, b in cls.pairs() for th in stokes_directions(cls[a], cls[b], d)})
    if len(dirs) < 2:
        raise ValueError(
            f"only {len(dirs)} Stokes direction(s): the circle needs at least two marked points "
            "to have a poset as exit-path category; add another exponential or marked point")
    m = len(dirs)
    top = 2 * d
    dl = [f"D{i}" for i in range(m)]
    al = [f"A{i}" for i in range(m)]
    rel = []
    for i in range(m):
        rel.append((dl[i], al[i]))
        rel.append((dl[i], al[i - 1]))
    base = Poset(dl + al, rel)
    angles = {}
    fibers = {}
    for i in range(m):
        angles[dl[i]] = dirs[i]
        nxt = dirs[i + 1] if i + 1 < m else dirs[0] + top
        mid = (dirs[i] + nxt) / 2
        angles[al[i]] = _mod2(mid) if d == 1 else mid - top * (mid // top)
        fibers[dl[i]] = _order_at(cls, dirs[i])
        fibers[al[i]] = _order_at(cls, mid)
        assert fibers[al[i]].is_total(), "arc orders must be total"
    ident = {a: a for a in cls.labels}
    meta = {"irregular_class": cls, "angles": angles, "directions": dl, "arcs": al, "ramification": d}
    if d > 1:
        perm = cls.deck_permutation()
        # rotation by one sheet: theta -> theta + 2
        shift = {}
        for lab, th in angles.items():
            target = th + 2 - top * ((th + 2) // top)
            shift[lab] = next(l for l, t2 in angles.items() if t2 == target and l[0] == lab[0])
        meta["deck"] = {"base": shift, "fiber": perm}
    space = StokesSpace(base, fibers, {c: ident for c in base.covers()}, meta=meta)
    if d > 1:
        _check_deck(space)
    return space


def _check_deck(space: StokesSpace) -> None:
    deck = space.meta["deck"]
    bm, fm = deck["base"], deck["fiber"]
    for x in space.base:
        fx, fy = space.fibers[x], space.fibers[bm[x]]
        for a in fx:
            for b in fx:
                assert fx.leq(a, b) == fy.leq(fm[a], fm[b]), "deck map is not an automorphism"
    for x, y in space.base.covers():
        assert space.base.leq(bm[x], bm[y])


# ---------------------------------------------------------------------------
# level filtration


def _pole(cls: IrregularClass, a: str, b: str) -> Fraction:
    return Fraction(0) if a == b else cls.lead(a, b).k


def level_filtration(cls: IrregularClass, space: StokesSpace | None = None):
    """Level structure ``I -> I/~_{k_1} -> ... -> I/~_{k_max} = point``.

    With ``k_1 < ... < k_max`` the distinct pole orders of pairwise differences,
    ``a ~_k b`` iff the difference has pole order at most ``k``.  On a quotient,
    ``alpha < beta`` iff some (equivalently every) pair of representatives is
    ordered; the independence of representatives is asserted.
    """
    from .stokes_ops import LevelStructure

    if space is None:
        space = circle_space(cls)
    ks = sorted({_pole(cls, a, b) for a, b in cls.pairs()})
    thresholds = [Fraction(0)] + ks
    spaces = [space]
    maps = []
    prev_classes = {a: a for a in cls.labels}
    for kappa in ks:
        blocks = []
        for a in cls.labels:
            for blk in blocks:
                if _pole(cls, a, blk[0]) <= kappa:
                    blk.append(a)
                    break
            else:
                blocks.append([a])
        label = {a: "+".join(blk) for blk in blocks for a in blk}
        names = ["+".join(blk) for blk in blocks]
        fibers = {}
        for x in space.base:
            fx = space.fibers[x]
            rel = set()
            for b1 in blocks:
                for b2 in blocks:
                    if b1 is b2:
                        continue
                    votes = {fx.lt(a, b) for a in b1 for b in b2}
                    if True in votes:
                        assert votes == {True}, "quotient order depends on representatives"
                        rel.add(("+".join(b1), "+".join(b2)))
            fibers[x] = Poset(names, rel)
        ident = {n: n for n in names}
        new = StokesSpace(space.base, fibers, {c: ident for c in space.base.covers()},
                          meta={"irregular_quotient": kappa})
        prev = spaces[-1]
        pmap = {x: {prev_classes_label: label[prev_classes_label.split("+")[0]]
                    for prev_classes_label in prev.fibers[x]} for x in space.base}
        p = FiberwiseMap(prev, new, pmap)
        assert is_level_morphism(p), "quotient map must be a level morphism"
        spaces.append(new)
        maps.append(p)
    sequence = tuple(-k for k in reversed(ks)) + (Fraction(0),)
    return LevelStructure(spaces, maps, sequence)
