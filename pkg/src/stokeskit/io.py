"""JSON encodings.

* Poset: ``{"elements": [...], "leq": [[a, b], ...]}`` (generating relations) or
  ``{"simplices": [[v, ...], ...]}`` for the face poset of a simplicial complex.
* StokesSpace: ``{"base": Poset, "fibers": {x: Poset}, "transitions": {"x->y": {a: b}}}``;
  a bare Poset is read as a space over a point; ``{"local_system": Poset}`` gives
  singleton fibers; polyhedral data ``{"n", "halfspaces", "forms", "fiber"}`` and
  irregular classes ``{"ramification", "exponentials"}`` are also accepted.
* VectFunctor: ``{"dims": {e: n}, "maps": {"e->f": [["p/q", ...], ...]}}``; over a
  space, elements of the total poset are written ``"x/a"`` (or just ``a`` over a
  point, just ``x`` for singleton fibers).  Stokes data over an irregular class:
  ``{"stokes": {"dims": {q: n}, "matrices": {"D0": M}, "formal_monodromy": M}}``.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .functors import VectFunctor
from .irregular import IrregularClass, PuiseuxExponential, Term, circle_space
from .linalg import QMatrix, format_q, parse_q
from .polyhedral import AffineForm, Polyhedron, polyhedral_space
from .poset import Poset, face_poset, SimplicialComplex
from .space import StokesSpace

__all__ = [
    "SchemaError", "load_json", "poset_from_json", "poset_to_json", "space_from_json", "space_to_json",
    "total_to_json", "functor_from_json", "functor_to_json", "irregular_from_json", "irregular_to_json",
    "affine_from_json", "affine_to_json", "polyhedral_from_json", "polyhedral_to_json", "matrix_from_json", "matrix_to_json",
    "encode_element",
]


class SchemaError(ValueError):
    def __init__(self, path: str, msg: str):
        super().__init__(f"{path or '$'}: {msg}")
        self.path = path


def load_json(path) -> Any:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"{path}:{e.lineno}:{e.colno}", e.msg) from None


def _need(d, key, path, kind=None):
    if not isinstance(d, dict):
        raise SchemaError(path, "expected an object")
    if key not in d:
        raise SchemaError(path, f"missing key {key!r}")
    v = d[key]
    if kind is not None and not isinstance(v, kind):
        raise SchemaError(f"{path}.{key}", f"expected {kind.__name__ if isinstance(kind, type) else kind}")
    return v


def _label(x):
    return tuple(_label(y) for y in x) if isinstance(x, list) else x


def _jsonable(x):
    return [_jsonable(y) for y in x] if isinstance(x, tuple) else x


def _q(v, path):
    try:
        return parse_q(v)
    except (ValueError, TypeError, ZeroDivisionError):
        raise SchemaError(path, f"not a rational number: {v!r}") from None


# ---------------------------------------------------------------------------
# matrices and posets


def matrix_from_json(data, path="$", rows=None, cols=None) -> QMatrix:
    if not isinstance(data, list) or not all(isinstance(r, list) for r in data):
        raise SchemaError(path, "matrix must be a list of rows")
    body = [[_q(v, f"{path}[{i}][{j}]") for j, v in enumerate(r)] for i, r in enumerate(data)]
    if len({len(r) for r in body}) > 1:
        raise SchemaError(path, "ragged matrix")
    r = len(body) if rows is None else rows
    c = (len(body[0]) if body else 0) if cols is None else cols
    if len(body) != r or (body and len(body[0]) != c):
        raise SchemaError(path, f"expected a {r}x{c} matrix")
    return QMatrix(body, r, c)


def matrix_to_json(m: QMatrix) -> list:
    return [[format_q(x) for x in row] for row in m.tolist()]


def poset_from_json(data, path="$") -> Poset:
    if isinstance(data, dict) and "simplices" in data:
        simp = _need(data, "simplices", path, list)
        faces = [tuple(_label(v) for v in f) for f in simp]
        verts = sorted({v for f in faces for v in f}, key=str)
        return face_poset(SimplicialComplex(verts, faces))
    elems = [_label(e) for e in _need(data, "elements", path, list)]
    if len(set(elems)) != len(elems):
        raise SchemaError(f"{path}.elements", "duplicate elements")
    rel = []
    for i, pair in enumerate(data.get("leq", [])):
        if not isinstance(pair, list) or len(pair) != 2:
            raise SchemaError(f"{path}.leq[{i}]", "relation must be a pair [a, b]")
        a, b = _label(pair[0]), _label(pair[1])
        for v in (a, b):
            if v not in elems:
                raise SchemaError(f"{path}.leq[{i}]", f"unknown element {v!r}")
        rel.append((a, b))
    try:
        return Poset(elems, rel)
    except ValueError as e:
        raise SchemaError(f"{path}.leq", str(e)) from None


def poset_to_json(p: Poset) -> dict:
    return {"elements": [_jsonable(e) for e in p.elements], "leq": [[_jsonable(a), _jsonable(b)] for a, b in p.covers()]}


# ---------------------------------------------------------------------------
# irregular classes and polyhedral data


def irregular_from_json(data, path="$") -> IrregularClass:
    exps = []
    for i, e in enumerate(_need(data, "exponentials", path, list)):
        p = f"{path}.exponentials[{i}]"
        terms = []
        for j, t in enumerate(_need(e, "terms", p, list)):
            tp = f"{p}.terms[{j}]"
            try:
                terms.append(Term(_q(_need(t, "k", tp), tp + ".k"), _q(_need(t, "modulus", tp), tp + ".modulus"),
                                  _q(_need(t, "angle_pi", tp), tp + ".angle_pi")))
            except ValueError as err:
                if isinstance(err, SchemaError):
                    raise
                raise SchemaError(tp, str(err)) from None
        try:
            exps.append(PuiseuxExponential(tuple(terms), e.get("name")))
        except ValueError as err:
            raise SchemaError(p, str(err)) from None
    try:
        cls = IrregularClass(exps)
    except ValueError as err:
        raise SchemaError(path, str(err)) from None
    d = data.get("ramification")
    if d is not None and int(d) % cls.ramification != 0:
        raise SchemaError(f"{path}.ramification", f"declared ramification {d} is not a multiple of {cls.ramification}")
    return cls


def irregular_to_json(cls: IrregularClass) -> dict:
    return {"ramification": cls.ramification,
            "exponentials": [{"name": l, "terms": [{"k": format_q(t.k), "modulus": format_q(t.modulus),
                                                    "angle_pi": format_q(t.angle)} for t in q.terms]}
                             for l, q in zip(cls.labels, cls.exponentials)]}


def affine_from_json(data, path="$") -> AffineForm:
    coeffs = [_q(c, f"{path}.coeffs[{i}]") for i, c in enumerate(_need(data, "coeffs", path, list))]
    try:
        return AffineForm(tuple(coeffs), _q(data.get("const", 0), f"{path}.const"))
    except ValueError as e:
        raise SchemaError(path, str(e)) from None


def affine_to_json(f: AffineForm) -> dict:
    return {"coeffs": [format_q(c) for c in f.coeffs], "const": format_q(f.const)}


def polyhedral_from_json(data, path="$") -> StokesSpace:
    n = _need(data, "n", path, int)
    hs = [affine_from_json(h, f"{path}.halfspaces[{i}]") for i, h in enumerate(data.get("halfspaces", []))]
    forms = [affine_from_json(h, f"{path}.forms[{i}]") for i, h in enumerate(_need(data, "forms", path, list))]
    try:
        C = Polyhedron(n, tuple(hs))
        return polyhedral_space(C, forms, _need(data, "fiber", path, dict))
    except ValueError as e:
        raise SchemaError(path, str(e)) from None


def polyhedral_to_json(s: StokesSpace) -> dict:
    """Polyhedral input format with the order on every realized cell spelled out."""
    meta = s.meta.get("polyhedral")
    if meta is None:
        raise ValueError("space was not built from polyhedral data")
    C = meta["polyhedron"]
    elements = list(next(iter(s.fibers.values())).elements)
    return {"n": C.n, "halfspaces": [affine_to_json(h) for h in C.halfspaces],
            "forms": [affine_to_json(f) for f in meta["forms"]],
            "fiber": {"elements": elements,
                      "cells": {c: [list(r) for r in s.fibers[c].strict_pairs()] for c in meta["signs"]}}}


# ---------------------------------------------------------------------------
# spaces


def space_from_json(data, path="$") -> StokesSpace:
    if not isinstance(data, dict):
        raise SchemaError(path, "expected an object")
    try:
        if "exponentials" in data:
            return circle_space(irregular_from_json(data, path))
        if "forms" in data:
            return polyhedral_from_json(data, path)
        if "local_system" in data:
            return StokesSpace.constant(poset_from_json(data["local_system"], path + ".local_system"), Poset(["*"]))
        if "elements" in data or "simplices" in data:
            return StokesSpace.point(poset_from_json(data, path))
        base = poset_from_json(_need(data, "base", path, dict), path + ".base")
        fibers_raw = _need(data, "fibers", path, dict)
        fibers = {}
        for x in base:
            key = x if isinstance(x, str) else json.dumps(_jsonable(x))
            if key not in fibers_raw:
                raise SchemaError(f"{path}.fibers", f"missing fiber over {x!r}")
            fibers[x] = poset_from_json(fibers_raw[key], f"{path}.fibers.{key}")
            if not len(fibers[x]):
                raise SchemaError(f"{path}.fibers.{key}", "empty fiber")
        trans = {}
        raw = data.get("transitions", {})
        for x, y in base.covers():
            key = f"{x}->{y}"
            if key in raw:
                trans[(x, y)] = {_label(k) if not isinstance(k, str) else k: _label(v) for k, v in raw[key].items()}
            elif len(fibers[y]) == 1:
                (t,) = fibers[y].elements
                trans[(x, y)] = {a: t for a in fibers[x]}
            elif set(fibers[x]) == set(fibers[y]):
                trans[(x, y)] = {a: a for a in fibers[x]}
            else:
                raise SchemaError(f"{path}.transitions", f"missing transition {key}")
        return StokesSpace(base, fibers, trans)
    except SchemaError:
        raise
    except ValueError as e:
        raise SchemaError(path, str(e)) from None


def space_to_json(s: StokesSpace) -> dict:
    def key(x):
        return x if isinstance(x, str) else json.dumps(_jsonable(x))
    return {"base": poset_to_json(s.base),
            "fibers": {key(x): poset_to_json(s.fibers[x]) for x in s.base},
            "transitions": {f"{x}->{y}": {str(a): _jsonable(b) for a, b in g.assignment.items()}
                            for (x, y), g in s.cover_transitions().items()}}


def encode_element(e, space: StokesSpace | None = None) -> str:
    if space is None:
        return str(e)
    x, a = e
    return f"{x}/{a}"


def _decoder(domain: Poset, space: StokesSpace | None):
    table = {}
    if space is None:
        for e in domain:
            table[str(e)] = e
        return table
    point = len(space.base) == 1
    singleton = all(len(space.fibers[x]) == 1 for x in space.base)
    for e in domain:
        x, a = e
        table[f"{x}/{a}"] = e
        if point:
            table.setdefault(str(a), e)
        if singleton:
            table.setdefault(str(x), e)
    return table


def total_to_json(s: StokesSpace) -> dict:
    return {"elements": [encode_element(e, s) for e in s.total],
            "covers": [[encode_element(a, s), encode_element(b, s)] for a, b in s.total.covers()],
            "cocartesian_edges": [[encode_element(a, s), encode_element(b, s)] for a, b in s.cocartesian_edges]}


def functor_from_json(data, domain: Poset | None = None, space: StokesSpace | None = None, path="$") -> VectFunctor:
    if space is not None:
        domain = space.total
    if domain is None:
        raise ValueError("need a domain or a space")
    if isinstance(data, dict) and "stokes" in data:
        from .comparison import from_stokes_matrices
        if space is None or "irregular_class" not in space.meta:
            raise SchemaError(path, "Stokes matrix data needs an irregular class as space")
        sd = data["stokes"]
        dims = {k: int(v) for k, v in _need(sd, "dims", path + ".stokes", dict).items()}
        n = sum(dims.values())
        mats = {k: matrix_from_json(v, f"{path}.stokes.matrices.{k}", n, n)
                for k, v in _need(sd, "matrices", path + ".stokes", dict).items()}
        h = sd.get("formal_monodromy")
        h = matrix_from_json(h, f"{path}.stokes.formal_monodromy", n, n) if h is not None else None
        try:
            return from_stokes_matrices(space, dims, mats, h)
        except ValueError as e:
            raise SchemaError(path + ".stokes", str(e)) from None
    table = _decoder(domain, space)

    def dec(s, p):
        if s not in table:
            raise SchemaError(p, f"unknown element {s!r}")
        return table[s]

    dims_raw = _need(data, "dims", path, dict)
    dims = {dec(k, f"{path}.dims"): int(v) for k, v in dims_raw.items()}
    maps = {}
    for k, v in data.get("maps", {}).items():
        p = f"{path}.maps.{k}"
        if "->" not in k:
            raise SchemaError(p, "map keys look like 'a->b'")
        s, t = k.split("->", 1)
        a, b = dec(s, p), dec(t, p)
        if (a, b) not in set(domain.covers()):
            raise SchemaError(p, "maps must be given on covering relations")
        maps[(a, b)] = matrix_from_json(v, p, dims.get(b, 0), dims.get(a, 0))
    try:
        return VectFunctor(domain, dims, maps)
    except ValueError as e:
        raise SchemaError(path, str(e)) from None


def functor_to_json(F: VectFunctor, space: StokesSpace | None = None) -> dict:
    enc = (lambda e: encode_element(e, space))
    return {"dims": {enc(e): F.dims[e] for e in F.domain},
            "maps": {f"{enc(a)}->{enc(b)}": matrix_to_json(m) for (a, b), m in F.cover_maps.items()
                     if m.rows and m.cols}}
