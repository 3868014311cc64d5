import cmath
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from stokeskit import corpus
from stokeskit.generators import random_irregular_class
from stokeskit.irregular import (IrregularClass, PuiseuxExponential as P, Term, circle_space, leading_term,
                                 level_filtration, order_sign, stokes_directions)
from stokeskit.space import is_level_morphism

seeds = st.integers(0, 10 ** 6)


def sign_changes(q1, q2, r=1e-4, step=1e-3):
    """Numeric oracle: grid angles (radians) where ``Re(q1 - q2)`` changes sign."""
    n = math.ceil(2 * math.pi / step)
    grid = [(i + 0.5) * 2 * math.pi / n for i in range(n)]      # offset: never sample an exact zero
    vals = [(q1.value(r, t) - q2.value(r, t)).real > 0 for t in grid]
    return [grid[i] for i in range(n) if vals[i] != vals[(i + 1) % n]]


def circ(a, b):
    d = abs(a - b) % (2 * math.pi)
    return min(d, 2 * math.pi - d)


def test_zero_one_directions():
    c = corpus.zero_one()
    assert stokes_directions(c["0"], c["z^-1"]) == [Fraction(1, 2), Fraction(3, 2)]


@given(st.integers(1, 5), st.integers(0, 7))
def test_direction_count(k, a):
    q = P.monomial(k, 1, Fraction(a, 4))
    assert len(stokes_directions(P.zero(), q)) == 2 * k


@given(st.integers(1, 3), st.integers(1, 20), st.integers(0, 7))
def test_positive_scaling_keeps_directions(k, lam, a):
    q = P.monomial(k, 1, Fraction(a, 4))
    assert stokes_directions(P.zero(), q) == stokes_directions(P.zero(), P.monomial(k, lam, Fraction(a, 4)))


@pytest.mark.parametrize("seed", range(5))
def test_directions_match_sampling(seed):
    cls = random_irregular_class(random.Random(seed))
    for a, b in cls.pairs():
        exact = [float(t) * math.pi for t in stokes_directions(cls[a], cls[b])]
        numeric = sign_changes(cls[a], cls[b])
        assert len(numeric) == len(exact)
        for t in exact:
            assert min(circ(t, s) for s in numeric) <= 1e-3


def test_order_sign_matches_numerics():
    t = Term(2, 1, Fraction(1, 3))
    for i in range(24):
        th = Fraction(i, 12) + Fraction(1, 48)
        z = 1e-3 * cmath.exp(1j * math.pi * float(th))
        val = (t.to_complex() * z ** -2).real
        assert order_sign(t, th) == (1 if val > 0 else -1)


def test_collinear_and_airy():
    s = circle_space(corpus.collinear())
    assert len(s.meta["directions"]) == 2
    s = circle_space(corpus.airy())
    assert s.meta["ramification"] == 2
    assert [s.meta["angles"][d] for d in s.meta["directions"]] == [Fraction(n, 3) for n in (1, 3, 5, 7, 9, 11)]
    assert s.meta["deck"]["fiber"] == {"+": "-", "-": "+"}


def test_circle_structure():
    s = circle_space(corpus.zero_one())
    assert len(s.base) == 4
    assert all(s.fibers[d].is_discrete() for d in s.meta["directions"])
    assert all(s.fibers[a].is_total() for a in s.meta["arcs"])
    f = corpus.one_dimensional_class()
    assert len(circle_space(f).total.covers()) == len(corpus.one_dimensional().total.covers())


def test_errors():
    with pytest.raises(ValueError):
        circle_space(IrregularClass([P.zero()]))
    with pytest.raises(ValueError):
        IrregularClass([P.zero(), P.monomial(1, 1, 0), P.monomial(1, 1, Fraction(1, 3))])
    with pytest.raises(ValueError):
        IrregularClass([P.zero("a"), P.zero("b")])
    with pytest.raises(ValueError):
        Term(0, 1, 0)
    with pytest.raises(ValueError):
        leading_term(P.zero(), P.zero())


def test_leading_term_cancellation():
    q1 = P((Term(2, 1, 0), Term(1, 3, Fraction(1, 2))))
    q2 = P((Term(2, 1, 0), Term(1, 1, Fraction(1, 2))))
    assert leading_term(q1, q2) == Term(1, 2, Fraction(1, 2))
    assert leading_term(q2, q1) == Term(1, 2, Fraction(3, 2))


def test_level_filtration_two_level():
    ls = level_filtration(corpus.two_level())
    assert ls.sequence == (-2, -1, 0)
    labels = [sorted(next(iter(s.fibers.values())).elements) for s in ls.spaces]
    assert labels == [["0", "z^-1", "z^-2"], ["0+z^-1", "z^-2"], ["0+z^-1+z^-2"]]
    assert all(is_level_morphism(p) for p in ls.maps)


@given(seeds)
def test_level_filtration_random(seed):
    cls = random_irregular_class(random.Random(seed))
    ls = level_filtration(cls)
    assert all(is_level_morphism(p) for p in ls.maps)
    assert len(next(iter(ls.spaces[-1].fibers.values()))) == 1
