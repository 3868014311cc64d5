"""Worked examples: small Stokes spaces and functors used by tests, scripts and the CLI."""
from __future__ import annotations

from fractions import Fraction

from .comparison import from_stokes_matrices
from .irregular import IrregularClass, PuiseuxExponential, circle_space
from .linalg import QMatrix
from .polyhedral import AffineForm, Polyhedron, polyhedral_space
from .poset import Poset
from .space import StokesSpace

P = PuiseuxExponential


def chain_ab() -> Poset:
    return Poset(["a", "b"], [("a", "b")])


def point_chain() -> StokesSpace:
    """The poset ``a < b`` over a point."""
    return StokesSpace.point(chain_ab())


def one_dimensional() -> StokesSpace:
    """Circle with closed stratum ``{1, -1}``, open arcs ``U`` (upper) and ``V`` (lower).

    ``a < b`` over ``U``, ``b < a`` over ``V``, incomparable at ``1`` and ``-1``.
    """
    base = Poset(["1", "-1", "U", "V"], [("1", "U"), ("1", "V"), ("-1", "U"), ("-1", "V")])
    disc = Poset(["a", "b"])
    fibers = {"1": disc, "-1": disc, "U": Poset(["a", "b"], [("a", "b")]), "V": Poset(["a", "b"], [("b", "a")])}
    ident = {"a": "a", "b": "b"}
    return StokesSpace(base, fibers, {c: ident for c in base.covers()})


def one_dimensional_W(sign: int) -> StokesSpace:
    """The open neighbourhood ``W_{+1}`` or ``W_{-1}`` of a closed point."""
    return one_dimensional().restrict(["1" if sign > 0 else "-1", "U", "V"])


def one_dimensional_class() -> IrregularClass:
    """``{a = 0, b = i z^{-1}}``; its circle is isomorphic to :func:`one_dimensional`."""
    return IrregularClass([P.zero("a"), P.monomial(1, 1, Fraction(1, 2), name="b")])


def interval_intro() -> StokesSpace:
    """Interval with one marked point: ``a <= b`` left of it, ``b <= a`` right of it."""
    C = Polyhedron.box([(0, 1)])
    phi = AffineForm((1,), Fraction(-1, 2))
    return polyhedral_space(C, [phi], {"elements": ["a", "b"],
                                       "cells": {"-": [["a", "b"]], "+": [["b", "a"]], "0": []}})


# orders on the open intervals and marked points of the three-element interval,
# listed left to right: (sign string, strict relations)
_THREE = [
    ("----", [("a", "b"), ("b", "c"), ("a", "c")]),
    ("0---", [("a", "c"), ("b", "c")]),                 # C_{a,b}
    ("+---", [("b", "a"), ("a", "c"), ("b", "c")]),
    ("+0--", [("a", "c"), ("b", "c")]),                 # C_{a,b}
    ("++--", [("a", "b"), ("b", "c"), ("a", "c")]),
    ("++0-", [("a", "b"), ("a", "c")]),                 # C_{b,c}
    ("+++-", [("a", "c"), ("c", "b"), ("a", "b")]),
    ("+++0", [("a", "b"), ("c", "b")]),                 # C_{a,c}
    ("++++", [("c", "a"), ("a", "b"), ("c", "b")]),
]


def three_element_interval(shadowed: bool = False) -> StokesSpace:
    """Interval with marked points at 1, 3, 5, 7 (Stokes loci of ``ab, ab, bc, ac``).

    ``shadowed=True`` keeps ``[3/2, 17/2]``, which has one marked point per pair.
    """
    points = [1, 3, 5, 7]
    if shadowed:
        C = Polyhedron.box([(Fraction(3, 2), Fraction(17, 2))])
        forms = [AffineForm((1,), -p) for p in points[1:]]
        cells = {s[1:]: rel for s, rel in _THREE if s[0] == "+"}
    else:
        C = Polyhedron.box([(0, 9)])
        forms = [AffineForm((1,), -p) for p in points]
        cells = dict(_THREE)
    return polyhedral_space(C, forms, {"elements": ["a", "b", "c"],
                                       "cells": {k: [list(r) for r in v] for k, v in cells.items()}})


def square() -> StokesSpace:
    C = Polyhedron.box([(-1, 1), (-1, 1)])
    forms = [AffineForm((1, 0), 0), AffineForm((0, 1), 0)]
    return polyhedral_space(C, forms, {"elements": ["a"], "cells": {}})


def zero_one() -> IrregularClass:
    return IrregularClass([P.zero("0"), P.monomial(1, name="z^-1")])


def two_level() -> IrregularClass:
    return IrregularClass([P.zero("0"), P.monomial(1, name="z^-1"), P.monomial(2, name="z^-2")])


def collinear() -> IrregularClass:
    return IrregularClass([P.zero("0"), P.monomial(1, name="z^-1"), P.monomial(1, 2, name="2z^-1")])


def airy() -> IrregularClass:
    return IrregularClass([P.monomial(Fraction(3, 2), Fraction(2, 3), 0, name="+"),
                           P.monomial(Fraction(3, 2), Fraction(2, 3), 1, name="-")])


def rank11_stokes_functor():
    """``{0, z^-1}`` with dims ``(1, 1)`` and Stokes matrix ``[[1, 1], [0, 1]]`` at ``pi/2``."""
    s = circle_space(zero_one())
    d0, d1 = s.meta["directions"]
    stokes = {d0: QMatrix([[1, 1], [0, 1]]), d1: QMatrix.identity(2)}
    return s, from_stokes_matrices(s, {"0": 1, "z^-1": 1}, stokes)


SPACES = {
    "point_chain": point_chain,
    "one_dimensional": one_dimensional,
    "one_dimensional_W1": lambda: one_dimensional_W(1),
    "one_dimensional_W-1": lambda: one_dimensional_W(-1),
    "interval_intro": interval_intro,
    "three_element_interval": three_element_interval,
    "three_element_interval_shadowed": lambda: three_element_interval(True),
    "square": square,
}

CLASSES = {
    "zero_one": zero_one,
    "two_level": two_level,
    "collinear": collinear,
    "airy": airy,
    "one_dimensional_class": one_dimensional_class,
}
