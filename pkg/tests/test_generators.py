import random

from hypothesis import given, strategies as st

from stokeskit.corpus import one_dimensional, point_chain
from stokeskit.functors import graded, induce_from_set, is_cocartesian, is_stokes, iso_exists
from stokeskit.generators import (random_cocartesian, random_functor, random_level_map, random_poset, random_stokes,
                                  set_components)
from stokeskit.irregular import circle_space
from stokeskit import corpus

seeds = st.integers(0, 10 ** 6)


@given(seeds, st.integers(1, 6))
def test_random_functor_has_requested_dims(seed, n):
    rng = random.Random(seed)
    p = random_poset(rng, n)
    dims = {a: rng.randint(0, 3) for a in p}
    assert random_functor(p, dims, rng).dims == dims


@given(seeds, st.integers(1, 6))
def test_random_level_map_is_monotone(seed, n):
    rng = random.Random(seed)
    p = random_poset(rng, n)
    f = random_level_map(p, rng)
    for a, b in p.strict_pairs():
        assert f.target.leq(f(a), f(b))
    for a in p:
        for b in p:
            if f.target.lt(f(a), f(b)):
                assert p.lt(a, b)


def test_set_components_of_circle():
    s = one_dimensional()
    comps = set_components(s)
    assert len(set(comps.values())) == 2


@given(seeds)
def test_random_stokes_is_stokes(seed):
    s = one_dimensional()
    F = random_stokes(s, random.Random(seed), max_dim=2)
    assert is_stokes(F, s)


@given(seeds)
def test_arbitrary_cocartesian_is_cocartesian(seed):
    s = point_chain()
    F = random_cocartesian(s, random.Random(seed), max_dim=2, mode="arbitrary")
    assert is_cocartesian(F, s)


@given(seeds)
def test_generation_is_deterministic(seed):
    s = circle_space(corpus.two_level())
    a = random_stokes(s, random.Random(seed), max_dim=1)
    b = random_stokes(s, random.Random(seed), max_dim=1)
    assert a == b


def test_circle_generates_non_induced_functors():
    s = one_dimensional()
    rng = random.Random(0)
    found = False
    for _ in range(30):
        F = random_stokes(s, rng, max_dim=1)
        if not iso_exists(induce_from_set(s, graded(F, s)), F):
            found = True
            break
    assert found
