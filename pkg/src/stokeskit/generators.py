"""Seeded random generators for posets, functors and Stokes functors."""
from __future__ import annotations

import random
from fractions import Fraction
from typing import Mapping

from .functors import FunctorError, KanExtension, VectFunctor, hom_space, induced
from .linalg import QMatrix, sparse_kernel, sparse_solve
from .poset import MonotoneMap, Poset
from .space import FiberwiseMap, StokesSpace


class GenerationError(RuntimeError):
    pass


def _entry(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-3, 3))


def random_poset(rng: random.Random, n: int, p: float = 0.4, prefix: str = "e") -> Poset:
    """Random poset on ``n`` labelled elements (transitive closure of a random DAG)."""
    labels = [f"{prefix}{i}" for i in range(n)]
    rel = [(labels[i], labels[j]) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    return Poset(labels, rel)


def random_dims(rng: random.Random, elements, max_dim: int) -> dict:
    return {a: rng.randint(0, max_dim) for a in elements}


def random_functor(poset: Poset, dims: Mapping, rng: random.Random) -> VectFunctor:
    """A random functor with prescribed dimensions.

    Elements are visited along a linear extension; the maps into the current
    element from its lower covers must satisfy linear equations (agreement of
    composites), and a random solution is picked.
    """
    dims = {a: int(dims.get(a, 0)) for a in poset}
    covers: dict = {}
    comp: dict = {}
    for e in poset.linear_extension():
        comp[(e, e)] = QMatrix.identity(dims[e])
        lows = poset.lower_covers(e)
        de = dims[e]
        offs, n = {}, 0
        for c in lows:
            offs[c] = n
            n += de * dims[c]
        rows = []
        below = [a for a in poset.down_set(e) if a != e]
        for a in below:
            via = [c for c in lows if poset.leq(a, c)]
            ref = via[0]
            for c in via[1:]:
                # M_{c,e} comp(a,c) - M_{ref,e} comp(a,ref) = 0
                for i in range(de):
                    for j in range(dims[a]):
                        row: dict = {}
                        for cc, sgn in ((c, 1), (ref, -1)):
                            m = comp[(a, cc)]
                            for k in range(dims[cc]):
                                if m[k, j]:
                                    idx = offs[cc] + i * dims[cc] + k
                                    row[idx] = row.get(idx, 0) + sgn * m[k, j]
                        row = {k: v for k, v in row.items() if v}
                        if row:
                            rows.append(row)
        basis = sparse_kernel(rows, n)
        v = [Fraction(0)] * n
        for b in basis:
            c = _entry(rng)
            if c:
                v = [x + c * y for x, y in zip(v, b)]
        for c in lows:
            o = offs[c]
            covers[(c, e)] = QMatrix([[v[o + i * dims[c] + k] for k in range(dims[c])] for i in range(de)],
                                     de, dims[c])
        for a in below:
            c = next(c for c in lows if poset.leq(a, c))
            comp[(a, e)] = covers[(c, e)] @ comp[(a, c)]
    return VectFunctor(poset, dims, covers)


def random_split(poset: Poset, rng: random.Random, max_dim: int = 2) -> tuple[VectFunctor, dict]:
    """``i_!(V)`` for random ``V``; returns the functor and ``V``."""
    v = random_dims(rng, poset, max_dim)
    return induced(poset, v), v


def random_level_map(poset: Poset, rng: random.Random, attempts: int = 200) -> MonotoneMap:
    """Random level map ``p`` out of ``poset``.

    A random labelling is turned into a target poset where ``alpha < beta`` iff
    every element labelled ``alpha`` lies strictly below every element labelled
    ``beta``; labellings that are not monotone for this order are rejected.
    """
    elems = list(poset)
    for _ in range(attempts):
        k = rng.randint(1, len(elems))
        lab = {a: f"L{rng.randrange(k)}" for a in elems}
        blocks: dict = {}
        for a, l in lab.items():
            blocks.setdefault(l, []).append(a)
        names = sorted(blocks)
        rel = [(s, t) for s in names for t in names if s != t
               and all(poset.lt(a, b) for a in blocks[s] for b in blocks[t])]
        target = Poset(names, rel)
        if all(target.leq(lab[a], lab[b]) for a, b in poset.covers()):
            return MonotoneMap(poset, target, lab)
    ident = {a: f"L{i}" for i, a in enumerate(elems)}
    return MonotoneMap(poset, poset.relabel(ident), ident)


def point_level_map(f: MonotoneMap, label="*") -> FiberwiseMap:
    """View a map of posets as a fiberwise map over the one-point base."""
    s = StokesSpace.point(f.source, label)
    t = StokesSpace.point(f.target, label)
    return FiberwiseMap(s, t, {label: f})


# ---------------------------------------------------------------------------
# cocartesian and Stokes functors


def set_components(space: StokesSpace) -> dict:
    """Connected components of the total poset of the underlying-set fibration."""
    parent = {e: e for e in space.total}

    def find(e):
        while parent[e] != e:
            parent[e] = parent[parent[e]]
            e = parent[e]
        return e

    for e, e2 in space.cocartesian_edges:
        r1, r2 = find(e), find(e2)
        if r1 != r2:
            parent[r1] = r2
    return {e: find(e) for e in space.total}


def random_cocartesian(space: StokesSpace, rng: random.Random, max_dim: int = 2, mode: str = "split",
                       component_dims: Mapping | None = None, attempts: int = 20) -> VectFunctor:
    """Random cocartesian functor on the total poset of ``space``.

    On minimal base elements the fiber functor is ``i_!(V)`` (mode ``"split"``,
    producing Stokes functors) or a random functor of the same dimensions (mode
    ``"arbitrary"``); ``V`` is constant on connected components of the
    underlying-set fibration.  Each further fiber is induced from its first
    lower cover and glued to the others by random isomorphisms compatible with
    everything built so far.
    """
    if mode not in ("split", "arbitrary"):
        raise ValueError(f"unknown mode {mode!r}")
    comps = set_components(space)
    roots = sorted(set(comps.values()), key=lambda e: space.total.index(e))
    for _ in range(attempts):
        if component_dims is None:
            cd = {r: rng.randint(0, max_dim) for r in roots}
        else:
            cd = {r: component_dims[r] for r in roots}
        out = _try_cocartesian(space, rng, {e: cd[comps[e]] for e in space.total}, mode)
        if out is not None:
            return out
    raise GenerationError(f"could not glue a cocartesian functor in {attempts} attempts")


def _try_cocartesian(space: StokesSpace, rng: random.Random, vdims: dict, mode: str) -> VectFunctor | None:
    base = space.base
    fibers: dict = {}           # x -> VectFunctor on I_x
    cross: dict = {}            # (z, x) -> {c: matrix F(z,c) -> F(x, gamma c)}
    cover_maps: dict = {}       # covering relations of the total poset
    for y in base.linear_extension():
        fy_poset = space.fibers[y]
        lows = base.lower_covers(y)
        if not lows:
            v = {a: vdims[(y, a)] for a in fy_poset}
            if mode == "split":
                fy = induced(fy_poset, v)
            else:
                fy = random_functor(fy_poset, induced(fy_poset, v).dims, rng)
            fibers[y] = fy
        else:
            kans = [KanExtension(space.transition(x, y), fibers[x]) for x in lows]
            fy = kans[0].functor
            fibers[y] = fy
            units = [k.unit() for k in kans]
            phis = _glue(space, y, lows, kans, units, cross, fy, rng)
            if phis is None:
                return None
            for x, u, phi in zip(lows, units, phis):
                g = space.transition(x, y)
                for a in space.fibers[x]:
                    cover_maps[((x, a), (y, g(a)))] = phi(g(a)) @ u(a)
        for (a, b), m in fy.cover_maps.items():
            cover_maps[((y, a), (y, b))] = m
        # composites of cross edges into y
        cross[(y, y)] = {c: QMatrix.identity(fy.dims[c]) for c in fy_poset}
        for z in base.down_set(y):
            if z == y:
                continue
            x = next(x for x in lows if base.leq(z, x))
            gzx = space.transition(z, x)
            gxy = space.transition(x, y)
            cross[(z, y)] = {c: cover_maps[((x, gzx(c)), (y, gxy(gzx(c))))] @ cross[(z, x)][c]
                             for c in space.fibers[z]}
    dims = {(x, a): fibers[x].dims[a] for x in base for a in space.fibers[x]}
    try:
        return VectFunctor(space.total, dims, cover_maps)
    except FunctorError:
        return None


def _glue(space, y, lows, kans, units, cross, fy, rng):
    """Random isomorphisms ``phi_i: gamma_!F_{x_i} -> F_y`` (``phi_0 = id``) agreeing on all paths."""
    base = space.base
    ident = {b: QMatrix.identity(fy.dims[b]) for b in space.fibers[y]}
    if len(lows) == 1:
        return [lambda b: ident[b]]
    bases = []
    for k in kans[1:]:
        if k.functor.dims != fy.dims:
            return None
        h = hom_space(k.functor, fy)
        if not h:
            return None
        bases.append(h)
    offs, n = [], 0
    for h in bases:
        offs.append(n)
        n += len(h)
    rows, rhs = [], []
    for z in base.down_set(y):
        if z == y:
            continue
        via = [i for i, x in enumerate(lows) if base.leq(z, x)]
        if len(via) < 2:
            continue
        gzy = space.transition(z, y)
        for c in space.fibers[z]:
            b = gzy(c)
            paths = {}
            for i in via:
                x = lows[i]
                a = space.transition(z, x)(c)
                paths[i] = units[i](a) @ cross[(z, x)][c]      # F(z,c) -> (gamma_! F_x)(b)
            ref = via[0]
            for i in via[1:]:
                # sum_t coef_{i,t} B_{i,t}(b) P_i  - [phi_ref] P_ref = 0
                lhs_i = [bases[i - 1][t](b) @ paths[i] for t in range(len(bases[i - 1]))]
                if ref == 0:
                    target = paths[0]
                    lhs_r = []
                else:
                    target = None
                    lhs_r = [bases[ref - 1][t](b) @ paths[ref] for t in range(len(bases[ref - 1]))]
                r, cdim = fy.dims[b], paths[i].cols
                for p in range(r):
                    for q in range(cdim):
                        row: dict = {}
                        for t, m in enumerate(lhs_i):
                            if m[p, q]:
                                row[offs[i - 1] + t] = row.get(offs[i - 1] + t, 0) + m[p, q]
                        for t, m in enumerate(lhs_r):
                            if m[p, q]:
                                row[offs[ref - 1] + t] = row.get(offs[ref - 1] + t, 0) - m[p, q]
                        row = {k: v for k, v in row.items() if v}
                        val = target[p, q] if target is not None else Fraction(0)
                        if row or val:
                            rows.append(row)
                            rhs.append(val)
    part = sparse_solve(rows, rhs, n)
    if part is None:
        return None
    kern = sparse_kernel(rows, n)
    for _ in range(8):
        v = list(part)
        for kv in kern:
            c = _entry(rng)
            if c:
                v = [x + c * y for x, y in zip(v, kv)]
        phis = [lambda b: ident[b]]
        ok = True
        for i, h in enumerate(bases):
            comps = {}
            for b in space.fibers[y]:
                m = QMatrix.zeros(fy.dims[b], fy.dims[b])
                for t, phi in enumerate(h):
                    if v[offs[i] + t]:
                        m = m + phi(b).scale(v[offs[i] + t])
                if not m.is_invertible():
                    ok = False
                    break
                comps[b] = m
            if not ok:
                break
            phis.append(comps.__getitem__)
        if ok:
            return phis
    return None


def random_stokes(space: StokesSpace, rng: random.Random, max_dim: int = 2, **kw) -> VectFunctor:
    return random_cocartesian(space, rng, max_dim=max_dim, mode="split", **kw)


def random_irregular_class(rng: random.Random, size: int | None = None, orders=(1, 2, 3)):
    """Unramified class of ``size`` (default 2-3) distinct exponentials with pole orders in ``orders``.

    All terms of a given order share one base angle up to sign, so every
    pairwise leading term is exactly polar.
    """
    from .irregular import IrregularClass, PuiseuxExponential, Term

    size = size or rng.randint(2, 3)
    ks = sorted(rng.sample(list(orders), rng.randint(1, len(orders))))
    base = {k: Fraction(rng.randrange(8), 4) for k in ks}
    seen = set()
    exps = []
    while len(exps) < size:
        coeffs = tuple(rng.randint(-3, 3) for _ in ks)
        if coeffs in seen:
            continue
        seen.add(coeffs)
        terms = tuple(Term(k, abs(c), base[k] + (1 if c < 0 else 0)) for k, c in zip(ks, coeffs) if c)
        exps.append(PuiseuxExponential(terms, name=f"q{len(exps)}"))
    return IrregularClass(exps)
