import random
from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from stokeskit.corpus import one_dimensional
from stokeskit.generators import random_poset
from stokeskit.poset import (MonotoneMap, Poset, PosetError, SimplicialComplex, barycentric, face_poset, is_final,
                             is_full, reduced_nerve_homology, star_neighborhood)

seeds = st.integers(0, 10 ** 6)


def test_closure_and_covers():
    p = Poset(["a", "b", "c"], [("a", "b"), ("b", "c")])
    assert p.leq("a", "c")
    assert p.covers() == [("a", "b"), ("b", "c")]
    assert p.minimum() == "a" and p.maximum() == "c"
    assert p.is_total()


def test_antisymmetry_violation_rejected():
    with pytest.raises(PosetError):
        Poset(["a", "b"], [("a", "b"), ("b", "a")])


def test_unclosed_relation_rejected_without_closure():
    with pytest.raises(PosetError):
        Poset(["a", "b", "c"], [("a", "b"), ("b", "c")], close=False)


@given(seeds, st.integers(1, 7))
def test_linear_extension_is_monotone(seed, n):
    p = random_poset(random.Random(seed), n)
    ext = p.linear_extension()
    pos = {a: i for i, a in enumerate(ext)}
    assert sorted(ext, key=p.index) == list(p.elements)
    assert all(pos[a] < pos[b] for a, b in p.strict_pairs())


@given(seeds, st.integers(1, 7))
def test_covers_generate_order(seed, n):
    p = random_poset(random.Random(seed), n)
    q = Poset(p.elements, p.covers())
    assert set(q.strict_pairs()) == set(p.strict_pairs())


@given(seeds, st.integers(1, 6))
def test_strict_chains_are_chains(seed, n):
    p = random_poset(random.Random(seed), n)
    for k in range(3):
        for c in p.strict_chains(k):
            assert len(c) == k + 1
            assert all(p.lt(a, b) for a, b in zip(c, c[1:]))
    assert len(p.strict_chains(1)) == len(p.strict_pairs())


def test_one_dimensional_total_poset():
    s = one_dimensional()
    t = s.total
    assert len(t) == 8
    # 12 relations across fibers, 2 inside the open fibers
    cross = [(e, f) for e, f in t.strict_pairs() if e[0] != f[0]]
    assert len(cross) == 12
    assert len(t.strict_pairs()) == 14
    assert len(t.covers()) == 10
    assert len(s.cocartesian_edges) == 8


def test_monotone_map_checks():
    p = Poset.chain(["a", "b"])
    q = Poset.antichain(["x", "y"])
    with pytest.raises(PosetError):
        MonotoneMap(p, q, {"a": "x", "b": "y"})
    f = MonotoneMap(q, p, {"x": "a", "y": "b"})
    assert f.is_bijective_on_sets() and not f.is_fully_faithful()


def test_face_poset_edge():
    k = SimplicialComplex(["v", "w"], [("v", "w")])
    fp = face_poset(k)
    assert len(fp) == 3 and len(fp.strict_pairs()) == 2


def test_barycentric_triangle_counts():
    k = SimplicialComplex([0, 1, 2], [(0, 1, 2)])
    b = barycentric(k)
    assert len(b.faces_of_dim(0)) == 7
    assert len(b.faces_of_dim(1)) == 12
    assert len(b.faces_of_dim(2)) == 6


def test_reduced_homology_of_circle_nerve():
    circle = Poset(["1", "-1", "U", "V"], [("1", "U"), ("1", "V"), ("-1", "U"), ("-1", "V")])
    h = reduced_nerve_homology(circle, 2)
    assert h[0] == 0 and h[1] == 1
    assert not any(reduced_nerve_homology(Poset.chain(["a", "b", "c"]), 2).values())


def test_is_final_examples():
    p = Poset.chain(["a", "b"])
    assert is_final(MonotoneMap.identity(p)).final
    q = Poset.antichain(["x", "y"])
    one = Poset(["x"])
    f = MonotoneMap.inclusion(one, q)
    res = is_final(f)
    assert not res.final and res.method == "empty-slice"


def _full_subcomplex_finality(k: SimplicialComplex, verts):
    s = k.subcomplex(verts)
    assert is_full(s, k)
    gs = star_neighborhood(s, k)
    fs = face_poset(s)
    return is_final(MonotoneMap.inclusion(fs, gs))


def test_two_triangles_shared_edge_final():
    k = SimplicialComplex([0, 1, 2, 3], [(0, 1, 2), (1, 2, 3)])
    res = _full_subcomplex_finality(k, [1, 2])
    assert res.final and res.certified


@given(seeds)
def test_full_subcomplexes_after_subdivision_are_final(seed):
    rng = random.Random(seed)
    n = rng.randint(3, 5)
    faces = [tuple(rng.sample(range(n), rng.randint(1, 3))) for _ in range(rng.randint(1, 4))]
    k = barycentric(SimplicialComplex(range(n), faces))
    verts = list(k.vertices)
    chosen = rng.sample(verts, rng.randint(1, len(verts)))
    # the full subcomplex spanned by the chosen vertices
    s = SimplicialComplex(chosen, [f for f in k.faces if f <= frozenset(chosen)])
    assert is_full(s, k)
    res = is_final(MonotoneMap.inclusion(face_poset(s), star_neighborhood(s, k)))
    assert res.final
