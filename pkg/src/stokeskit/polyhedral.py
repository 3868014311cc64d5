"""Polyhedral Stokes spaces and their elementarity criterion.

A polyhedron ``C = {phi >= 0}`` is cut by finitely many affine forms; strata
are the realized sign vectors.  Realizability is decided exactly by
Fourier-Motzkin elimination with strict-inequality tracking.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Sequence

from .linalg import parse_q
from .poset import Poset, PosetError
from .space import StokesSpace

__all__ = [
    "AffineForm",
    "Polyhedron",
    "feasible",
    "realized_sign_vectors",
    "sign_poset",
    "polyhedral_space",
    "CriterionResult",
    "polyhedral_elementarity_criterion",
]

SIGNS = "-0+"


@dataclass(frozen=True)
class AffineForm:
    """``x -> coeffs . x + const``."""
    coeffs: tuple
    const: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(parse_q(c) for c in self.coeffs))
        object.__setattr__(self, "const", parse_q(self.const))
        if not any(self.coeffs):
            raise ValueError("affine form has no linear part")

    @property
    def n(self) -> int:
        return len(self.coeffs)

    def __call__(self, point: Sequence) -> Fraction:
        return sum((c * parse_q(x) for c, x in zip(self.coeffs, point)), self.const)

    def scaled(self, s) -> "AffineForm":
        s = parse_q(s)
        return AffineForm(tuple(c * s for c in self.coeffs), self.const * s)

    def negated(self) -> "AffineForm":
        return self.scaled(-1)


@dataclass(frozen=True)
class Polyhedron:
    """``{x in R^n : phi(x) >= 0 for all halfspaces}``; must be nonempty."""
    n: int
    halfspaces: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "halfspaces", tuple(self.halfspaces))
        for h in self.halfspaces:
            if h.n != self.n:
                raise ValueError("halfspace dimension mismatch")
        if not feasible(self.n, [(h, ">=") for h in self.halfspaces]):
            raise ValueError("polyhedron is empty")

    @classmethod
    def box(cls, bounds: Sequence[tuple]) -> "Polyhedron":
        n = len(bounds)
        hs = []
        for i, (lo, hi) in enumerate(bounds):
            e = [Fraction(0)] * n
            e[i] = Fraction(1)
            hs.append(AffineForm(tuple(e), -parse_q(lo)))
            hs.append(AffineForm(tuple(-x for x in e), parse_q(hi)))
        return cls(n, tuple(hs))


# ---------------------------------------------------------------------------
# Fourier-Motzkin


def _normalize(coeffs: tuple, const: Fraction, strict: bool) -> tuple:
    m = max((abs(c) for c in coeffs), default=Fraction(0))
    if m == 0:
        m = abs(const) or Fraction(1)
    return tuple(c / m for c in coeffs), const / m, strict


def feasible(n: int, constraints: Sequence[tuple]) -> bool:
    """Exact feasibility of ``phi rel 0`` with ``rel`` in ``>=, >, =, <, <=``."""
    rows = set()
    for form, rel in constraints:
        a, b = form.coeffs, form.const
        if rel in (">=", "="):
            rows.add(_normalize(a, b, False))
        if rel in ("<=", "="):
            rows.add(_normalize(tuple(-x for x in a), -b, False))
        if rel == ">":
            rows.add(_normalize(a, b, True))
        if rel == "<":
            rows.add(_normalize(tuple(-x for x in a), -b, True))
        if rel not in (">=", ">", "=", "<", "<="):
            raise ValueError(f"unknown relation {rel!r}")
    for k in range(n):
        pos, neg, rest = [], [], set()
        for r in rows:
            c = r[0][k]
            if c > 0:
                pos.append(r)
            elif c < 0:
                neg.append(r)
            else:
                rest.add(r)
        for (ap, bp, sp) in pos:
            for (aq, bq, sq) in neg:
                fp, fq = 1 / ap[k], -1 / aq[k]
                a = tuple(fp * x + fq * y for x, y in zip(ap, aq))
                rest.add(_normalize(a, fp * bp + fq * bq, sp or sq))
        rows = rest
        for a, b, s in rows:
            if not any(a) and (b < 0 or (s and b == 0)):
                return False
    for a, b, s in rows:
        if b < 0 or (s and b == 0):
            return False
    return True


def _sign_rel(s: str) -> str:
    return {"+": ">", "-": "<", "0": "="}[s]


def realized_sign_vectors(C: Polyhedron, forms: Sequence[AffineForm]) -> list[str]:
    """Sign vectors of ``forms`` realized on ``C`` (branch and prune)."""
    base = [(h, ">=") for h in C.halfspaces]
    out = []

    def grow(prefix: str, cons: list):
        if len(prefix) == len(forms):
            out.append(prefix)
            return
        phi = forms[len(prefix)]
        for s in "0-+":
            c = cons + [(phi, _sign_rel(s))]
            if feasible(C.n, c):
                grow(prefix + s, c)

    grow("", base)
    return sorted(out)


def sign_poset(signs: Sequence[str]) -> Poset:
    """``sigma <= tau`` iff each entry of ``sigma`` is 0 or equals that of ``tau``."""
    rel = [(s, t) for s in signs for t in signs
           if s != t and all(a == "0" or a == b for a, b in zip(s, t))]
    return Poset(list(signs), rel)


def polyhedral_space(C: Polyhedron, forms: Sequence[AffineForm], fiber: Mapping) -> StokesSpace:
    """Stokes space over the realized strata of ``(C, forms)``.

    ``fiber = {"elements": [...], "cells": {sign string: [[a, b], ...]}}`` lists
    strict relations per cell.  A cell without data gets the intersection of
    the orders on the specified cells above it (the trivial order if none).
    Transitions are identities of the common underlying set.
    """
    forms = list(forms)
    for f in forms:
        if f.n != C.n:
            raise ValueError("form dimension mismatch")
    signs = realized_sign_vectors(C, forms)
    base = sign_poset(signs)
    elements = list(fiber["elements"])
    given = {}
    for cell, rels in dict(fiber.get("cells", {})).items():
        if cell not in base:
            raise ValueError(f"requested cell {cell!r} is not realized")
        given[cell] = Poset(elements, [tuple(r) for r in rels])
    fibers = {}
    for s in base:
        if s in given:
            fibers[s] = given[s]
            continue
        above = [given[t] for t in base.up_set(s) if t in given]
        if above:
            pairs = [(a, b) for a, b in above[0].strict_pairs() if all(p.lt(a, b) for p in above[1:])]
            fibers[s] = Poset(elements, pairs)
        else:
            fibers[s] = Poset(elements)
    for s in base:
        for t in base.up_set(s):
            for a, b in fibers[s].strict_pairs():
                if not fibers[t].lt(a, b):
                    raise PosetError(f"order data inconsistent with specialization: {a}<{b} at {s} but not at {t}")
    ident = {a: a for a in elements}
    meta = {"polyhedral": {"polyhedron": C, "forms": tuple(forms), "signs": tuple(signs)}}
    return StokesSpace(base, fibers, {c: ident for c in base.covers()}, meta=meta)


# ---------------------------------------------------------------------------
# elementarity criterion


@dataclass
class CriterionResult:
    certified: bool
    failing_pair: tuple | None = None
    reason: str = ""
    locus: tuple = ()
    witnesses: dict = field(default_factory=dict)   # pair -> index of the separating form

    def __bool__(self) -> bool:
        return self.certified

    def to_json(self) -> dict:
        return {"certified": self.certified,
                "failing_pair": list(self.failing_pair) if self.failing_pair else None,
                "reason": self.reason, "locus": list(self.locus),
                "witnesses": {f"{a},{b}": i for (a, b), i in self.witnesses.items()}}


def polyhedral_elementarity_criterion(space: StokesSpace) -> CriterionResult:
    """For every pair of global sections ``a, b`` look for a form ``phi`` with

    1. the Stokes locus of ``{a, b}`` equal to the cells on ``phi = 0``;
    2. both open sides ``phi > 0`` and ``phi < 0`` realized (each is convex,
       hence connected);
    3. ``a < b`` on one side and ``b < a`` on the other.
    """
    meta = space.meta.get("polyhedral")
    if meta is None:
        raise ValueError("space was not built from polyhedral data")
    if not space.set_locally_constant():
        raise ValueError("the underlying set must be locally constant")
    forms = meta["forms"]
    base = space.base
    cells = list(base)
    elements = sorted(next(iter(space.fibers.values())).elements, key=str)
    witnesses = {}
    for a, b in combinations(elements, 2):
        locus = tuple(sorted(s for s in cells if not space.fibers[s].comparable(a, b)))
        if not locus:
            return CriterionResult(False, (a, b), "empty Stokes locus: the pair is comparable everywhere",
                                   locus, witnesses)
        found = None
        for i in range(len(forms)):
            zero = tuple(sorted(s for s in cells if s[i] == "0"))
            if zero != locus:
                continue
            plus = [s for s in cells if s[i] == "+"]
            minus = [s for s in cells if s[i] == "-"]
            if not plus or not minus:
                continue
            for lo, hi in ((a, b), (b, a)):
                if all(space.fibers[s].lt(lo, hi) for s in plus) and all(space.fibers[s].lt(hi, lo) for s in minus):
                    found = i
                    break
            if found is not None:
                break
        if found is None:
            n = len(locus)
            reason = (f"Stokes locus of {{{a},{b}}} consists of {n} cell{'s' if n != 1 else ''} "
                      f"and is not the trace of a single separating hyperplane")
            return CriterionResult(False, (a, b), reason, locus, witnesses)
        witnesses[(a, b)] = found
    return CriterionResult(True, None, "every pair is separated by a hyperplane", (), witnesses)
