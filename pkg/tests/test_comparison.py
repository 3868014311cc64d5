import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from stokeskit import corpus
from stokeskit.comparison import (common_grading, from_stokes_matrices, local_system_monodromy, monodromy,
                                  random_stokes_data, to_stokes_matrices, underlying_local_system)
from stokeskit.functors import graded, induce_from_set, is_stokes, iso_exists
from stokeskit.generators import random_irregular_class
from stokeskit.irregular import IrregularClass, PuiseuxExponential as P, circle_space
from stokeskit.linalg import QMatrix

seeds = st.integers(0, 10 ** 6)
CLASSES = [corpus.zero_one, corpus.two_level, corpus.collinear, corpus.one_dimensional_class]


def _space(seed):
    rng = random.Random(seed)
    return circle_space(CLASSES[seed % len(CLASSES)]()), rng


@settings(max_examples=25)
@given(seeds)
def test_round_trip(seed):
    s, rng = _space(seed)
    data = random_stokes_data(s, rng)
    F = data.functor()
    assert is_stokes(F, s)
    back = to_stokes_matrices(F, s)
    assert iso_exists(back.functor(), F)


@settings(max_examples=25)
@given(seeds)
def test_monodromy_formula(seed):
    s, rng = _space(seed)
    data = random_stokes_data(s, rng)
    L = underlying_local_system(data.functor(), s)
    assert local_system_monodromy(L, s) == monodromy(data)


def test_identity_matrices_give_induced_functor():
    s = circle_space(corpus.two_level())
    dirs = s.meta["directions"]
    dims = {"0": 1, "z^-1": 2, "z^-2": 1}
    F = from_stokes_matrices(s, dims, {d: QMatrix.identity(4) for d in dirs})
    assert iso_exists(induce_from_set(s, graded(F, s)), F)


def test_rank11_not_induced():
    s, F = corpus.rank11_stokes_functor()
    assert is_stokes(F, s)
    assert not iso_exists(induce_from_set(s, graded(F, s)), F)
    data = to_stokes_matrices(F, s)
    assert data.stokes[s.meta["directions"][0]] == QMatrix([[1, 1], [0, 1]])


def test_invalid_stokes_data():
    s = circle_space(corpus.zero_one())
    d0, d1 = s.meta["directions"]
    with pytest.raises(ValueError):
        from_stokes_matrices(s, {"0": 1, "z^-1": 1}, {d0: QMatrix([[2, 0], [0, 1]]), d1: QMatrix.identity(2)})
    with pytest.raises(ValueError):   # wrong triangle
        from_stokes_matrices(s, {"0": 1, "z^-1": 1}, {d0: QMatrix([[1, 0], [1, 1]]), d1: QMatrix.identity(2)})
    with pytest.raises(ValueError):
        from_stokes_matrices(s, {"0": 1, "z^-1": 1}, {d0: QMatrix.identity(2)})
    with pytest.raises(ValueError):
        from_stokes_matrices(s, {"0": 1, "z^-1": 1}, {d0: QMatrix.identity(2), d1: QMatrix.identity(2)},
                             QMatrix([[1, 1], [0, 1]]))


def test_ramified_class_rejected():
    s = circle_space(corpus.airy())
    with pytest.raises(ValueError):
        from_stokes_matrices(s, {"+": 1, "-": 1}, {d: QMatrix.identity(2) for d in s.meta["directions"]})


def test_common_grading_examples():
    e1, e2 = QMatrix([[1], [0]]), QMatrix([[0], [1]])
    V = QMatrix.identity(2)
    g = common_grading(2, ["a", "b"], {"a": e1, "b": V}, ["b", "a"], {"b": e2, "a": V})
    assert g is not None
    assert g["a"].rank() == 1 and QMatrix.hstack([g["a"], e1], rows=2).rank() == 1
    assert g["b"].rank() == 1 and QMatrix.hstack([g["b"], e2], rows=2).rank() == 1
    assert common_grading(2, ["a", "b"], {"a": e1, "b": V}, ["a", "b"], {"a": V, "b": V}) is None
    # equal filtrations: the grading is an associated graded
    f = {"a": e1, "b": V}
    g = common_grading(2, ["a", "b"], f, ["a", "b"], f)
    assert [g[q].cols for q in "ab"] == [1, 1]
    with pytest.raises(ValueError):
        common_grading(2, ["a", "b"], {"a": QMatrix([[1, 1], [0, 0]]), "b": V}, ["a", "b"], f)
    with pytest.raises(ValueError):
        common_grading(2, ["a", "b"], {"a": e1, "b": e2}, ["a", "b"], f)


@given(seeds)
def test_common_grading_from_a_known_grading(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 4)
    labels = ["p", "q", "r"]
    owner = [rng.choice(labels) for _ in range(n)]
    while True:
        B = QMatrix([[Fraction(rng.randint(-2, 2)) for _ in range(n)] for _ in range(n)], n, n)
        if B.is_invertible():
            break
    o1 = labels[:]
    o2 = labels[:]
    rng.shuffle(o1)
    rng.shuffle(o2)

    def filt(order):
        out = {}
        for i, q in enumerate(order):
            cols = [B.column(j) for j in range(n) if owner[j] in order[:i + 1]]
            out[q] = QMatrix.from_columns(cols, n) if cols else QMatrix.zeros(n, 0)
        return out

    g = common_grading(n, o1, filt(o1), o2, filt(o2))
    assert g is not None
    assert [g[q].cols for q in labels] == [owner.count(q) for q in labels]
