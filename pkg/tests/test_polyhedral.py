from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, strategies as st

from stokeskit import corpus
from stokeskit.polyhedral import (AffineForm, Polyhedron, feasible, polyhedral_elementarity_criterion,
                                  polyhedral_space, realized_sign_vectors)
from stokeskit.poset import PosetError

small = st.integers(-3, 3)
forms2 = st.tuples(small, small, small).filter(lambda t: t[0] or t[1])
rels = st.sampled_from([">=", ">", "=", "<", "<="])

GRID = [Fraction(i, 4) for i in range(-24, 25)]


def _holds(v, rel):
    return {">=": v >= 0, ">": v > 0, "=": v == 0, "<": v < 0, "<=": v <= 0}[rel]


def _vertex_oracle(cons):
    """Exact feasibility of a bounded 2-d system of non-strict constraints: try every vertex."""
    lines = [(f.coeffs, f.const) for f, _ in cons]
    for (a1, c1), (a2, c2) in product(lines, repeat=2):
        det = a1[0] * a2[1] - a1[1] * a2[0]
        if det == 0:
            continue
        x = (-c1 * a2[1] + c2 * a1[1]) / det
        y = (-a1[0] * c2 + a2[0] * c1) / det
        if all(_holds(f((x, y)), r) for f, r in cons):
            return True
    return False


@given(st.lists(st.tuples(forms2, st.sampled_from([">=", "=", "<="])), min_size=1, max_size=4))
def test_feasible_against_vertex_oracle(cons):
    cons = [(AffineForm((a, b), c), r) for (a, b, c), r in cons]
    box = [(AffineForm((1, 0), 5), ">="), (AffineForm((-1, 0), 5), ">="),
           (AffineForm((0, 1), 5), ">="), (AffineForm((0, -1), 5), ">=")]
    assert feasible(2, cons + box) == _vertex_oracle(cons + box)


@given(st.lists(st.tuples(forms2, rels), min_size=1, max_size=4))
def test_feasible_never_misses_a_grid_point(cons):
    cons = [(AffineForm((a, b), c), r) for (a, b, c), r in cons]
    if any(all(_holds(f((x, y)), r) for f, r in cons) for x in GRID for y in GRID):
        assert feasible(2, cons)


def test_feasible_simple_cases():
    x = AffineForm((1,), 0)
    assert feasible(1, [(x, ">"), (x.scaled(-1), ">=")]) is False
    assert feasible(1, [(x, ">="), (x, "<=")]) is True
    assert feasible(1, [(x, ">"), (AffineForm((1,), -1), "<")]) is True
    assert feasible(1, [(x, ">"), (AffineForm((1,), 0), "<")]) is False
    with pytest.raises(ValueError):
        feasible(1, [(x, "!")])


def test_interval_cells():
    C = Polyhedron.box([(0, 1)])
    assert realized_sign_vectors(C, [AffineForm((1,), Fraction(-1, 2))]) == ["+", "-", "0"]
    assert realized_sign_vectors(C, [AffineForm((1,), 5)]) == ["+"]


def test_square_has_nine_cells():
    s = corpus.square()
    assert len(s.base) == 9
    assert len(s.base.maximal()) == 4
    assert s.base.minimal() == ["00"]


def test_criterion_examples():
    r = polyhedral_elementarity_criterion(corpus.three_element_interval(True))
    assert r.certified
    r = polyhedral_elementarity_criterion(corpus.three_element_interval())
    assert not r.certified
    assert set(r.failing_pair) == {"a", "b"} and len(r.locus) == 2
    assert polyhedral_elementarity_criterion(corpus.interval_intro()).certified
    assert polyhedral_elementarity_criterion(corpus.square()).certified


@given(st.integers(1, 9))
def test_criterion_invariant_under_positive_scaling(s):
    base = corpus.three_element_interval(True)
    meta = base.meta["polyhedral"]
    forms = [f.scaled(s) for f in meta["forms"]]
    cells = {c: list(base.fibers[c].strict_pairs()) for c in base.base if c in base.base.maximal()}
    scaled = polyhedral_space(meta["polyhedron"], forms, {"elements": ["a", "b", "c"], "cells": cells})
    assert scaled.base == base.base
    assert polyhedral_elementarity_criterion(scaled).certified


def test_polyhedral_errors():
    with pytest.raises(ValueError):
        Polyhedron.box([(1, 0)])
    C = Polyhedron.box([(0, 1)])
    phi = AffineForm((1,), Fraction(-1, 2))
    with pytest.raises(ValueError):
        polyhedral_space(C, [phi], {"elements": ["a"], "cells": {"00": []}})
    with pytest.raises(PosetError):
        polyhedral_space(C, [phi], {"elements": ["a", "b"], "cells": {"0": [["a", "b"]], "+": [["b", "a"]]}})
    with pytest.raises(ValueError):
        AffineForm((0,), 1)
    with pytest.raises(ValueError):
        polyhedral_elementarity_criterion(corpus.point_chain())
