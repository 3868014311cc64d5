import random

import pytest
from hypothesis import given, strategies as st

from stokeskit.corpus import one_dimensional
from stokeskit.generators import point_level_map, random_level_map, random_poset
from stokeskit.poset import MonotoneMap, Poset, PosetError
from stokeskit.space import (FiberwiseMap, StokesSpace, fibration_Ip, is_graduation_morphism, is_level_morphism,
                             underlying_set)

seeds = st.integers(0, 10 ** 6)


def test_incoherent_transitions_rejected():
    base = Poset(["x", "y", "z", "w"], [("x", "y"), ("x", "z"), ("y", "w"), ("z", "w")])
    f = Poset(["a", "b"])
    ident = {"a": "a", "b": "b"}
    swap = {"a": "b", "b": "a"}
    trans = {("x", "y"): ident, ("x", "z"): swap, ("y", "w"): ident, ("z", "w"): ident}
    with pytest.raises(PosetError):
        StokesSpace(base, {v: f for v in base}, trans)


def test_non_monotone_transition_rejected():
    base = Poset.chain(["x", "y"])
    with pytest.raises(PosetError):
        StokesSpace(base, {"x": Poset.chain(["a", "b"]), "y": Poset.chain(["b", "a"])},
                    {("x", "y"): {"a": "a", "b": "b"}})


def test_cocartesian_edges_factor_every_relation():
    s = one_dimensional()
    t = s.total
    edges = set(s.cocartesian_edges)
    for (x, a), (y, b) in t.strict_pairs():
        c = s.transition(x, y)(a)
        assert ((x, a), (y, c)) in edges or x == y
        assert s.fibers[y].leq(c, b)


def test_underlying_set_and_restrict():
    s = one_dimensional()
    u = underlying_set(s)
    assert u.is_discrete() and u.set_locally_constant()
    w = s.restrict(["1", "U", "V"])
    assert len(w.total) == 6 and w.base.minimum() == "1"


def test_Ip_example():
    i = Poset.chain(["a", "b", "c"])
    j = Poset.chain(["0", "1"])
    p = point_level_map(MonotoneMap(i, j, {"a": "0", "b": "0", "c": "1"}))
    ip, proj = fibration_Ip(p)
    fib = ip.fibers["*"]
    assert set(fib.strict_pairs()) == {("a", "b")}


def test_Ip_identity_is_underlying_set():
    s = one_dimensional()
    ip, _ = fibration_Ip(FiberwiseMap.identity(s))
    assert ip.is_discrete()
    assert set(ip.total) == set(underlying_set(s).total)


@given(seeds, st.integers(1, 6))
def test_Ip_forgets_to_underlying_set(seed, n):
    rng = random.Random(seed)
    p = point_level_map(random_level_map(random_poset(rng, n), rng))
    ip, _ = fibration_Ip(p)
    assert set(ip.total) == set(underlying_set(p.source).total)


@given(seeds, st.integers(1, 6))
def test_level_morphisms(seed, n):
    rng = random.Random(seed)
    poset = random_poset(rng, n)
    f = random_level_map(poset, rng)
    p = point_level_map(f)
    assert is_level_morphism(p)
    assert is_level_morphism(FiberwiseMap.identity(p.source))
    q = point_level_map(random_level_map(f.target, rng))
    assert is_level_morphism(p.then(q))
    assert is_graduation_morphism(p)


def test_non_level_morphism():
    i = Poset.antichain(["a", "b"])
    j = Poset.chain(["0", "1"])
    p = point_level_map(MonotoneMap(i, j, {"a": "0", "b": "1"}))
    assert not is_level_morphism(p)
