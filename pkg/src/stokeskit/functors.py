"""Functors from finite posets to finite-dimensional rational vector spaces.

Structure maps are stored on covering relations; composites along arbitrary
``a <= b`` are derived once and cached, and chain independence is verified
on construction.  Everything here lives in the abelian heart: left Kan
extension is the ordinary colimit, graduation is an explicit quotient.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .linalg import (CochainComplex, Cokernel, QMatrix, SparseMatrix, cokernel, sparse_kernel,
                     sparse_rank, sparse_solve)
from .poset import MonotoneMap, Poset
from .space import FiberwiseMap, StokesSpace, fibration_Ip, underlying_set

__all__ = [
    "FunctorError",
    "InconclusiveError",
    "VectFunctor",
    "NatTransformation",
    "KanExtension",
    "Graduation",
    "restrict",
    "lan",
    "induced",
    "induce_from_set",
    "graduation",
    "graded",
    "gr_p",
    "is_split",
    "is_cocartesian",
    "cocartesian_failures",
    "is_stokes",
    "fiber_restriction",
    "hom_space",
    "hom_dim",
    "rhom",
    "ext_dims",
    "find_iso",
    "iso_exists",
    "strip_summand",
    "direct_sum",
]


class FunctorError(ValueError):
    pass


class InconclusiveError(RuntimeError):
    """Raised when a randomized decision procedure could not conclude."""


def _as_matrix(m, rows: int, cols: int) -> QMatrix:
    if isinstance(m, QMatrix):
        if m.shape != (rows, cols):
            raise FunctorError(f"matrix has shape {m.shape}, expected {(rows, cols)}")
        return m
    if rows == 0 or cols == 0:
        return QMatrix.zeros(rows, cols)
    return QMatrix(m, rows, cols)


class VectFunctor:
    """A functor ``domain -> Vect_Q`` given by dimensions and cover matrices.

    ``maps[(a, b)]`` for a covering relation ``a < b`` is a ``dims[b] x dims[a]``
    matrix.  Missing entries are allowed only when one side is zero-dimensional.
    """

    def __init__(self, domain: Poset, dims: Mapping, maps: Mapping | None = None, check: bool = True):
        self.domain = domain
        self.dims = {}
        for a in domain:
            d = int(dims.get(a, 0))
            if d < 0:
                raise FunctorError(f"negative dimension at {a!r}")
            self.dims[a] = d
        unknown = [a for a in dims if a not in domain]
        if unknown:
            raise FunctorError(f"dimensions given for elements outside the domain: {unknown!r}")
        maps = dict(maps or {})
        covers = domain.covers()
        cover_set = set(covers)
        for key in maps:
            if tuple(key) not in cover_set:
                raise FunctorError(f"{key!r} is not a covering relation of the domain")
        self._cover: dict[tuple, QMatrix] = {}
        for a, b in covers:
            r, c = self.dims[b], self.dims[a]
            if (a, b) in maps:
                self._cover[(a, b)] = _as_matrix(maps[(a, b)], r, c)
            elif r == 0 or c == 0:
                self._cover[(a, b)] = QMatrix.zeros(r, c)
            else:
                raise FunctorError(f"missing structure map for covering relation {a!r} -> {b!r}")
        self._comp: dict[tuple, QMatrix] = {}
        self._build(check)

    def _build(self, check: bool) -> None:
        p = self.domain
        comp = self._comp
        for a in reversed(p.linear_extension()):
            comp[(a, a)] = QMatrix.identity(self.dims[a])
            ups = p.upper_covers(a)
            for b in p.up_set(a):
                if b == a:
                    continue
                first = None
                for c in ups:
                    if not p.leq(c, b):
                        continue
                    m = comp[(c, b)] @ self._cover[(a, c)]
                    if first is None:
                        first = m
                        if not check:
                            break
                    elif m != first:
                        raise FunctorError(f"not a functor: composites from {a!r} to {b!r} disagree")
                comp[(a, b)] = first

    # ------------------------------------------------------------------
    def map(self, a, b) -> QMatrix:
        try:
            return self._comp[(a, b)]
        except KeyError:
            raise FunctorError(f"{a!r} is not <= {b!r}") from None

    def dim(self, a) -> int:
        return self.dims[a]

    @property
    def cover_maps(self) -> dict[tuple, QMatrix]:
        return dict(self._cover)

    @property
    def total_dim(self) -> int:
        return sum(self.dims.values())

    def is_zero(self) -> bool:
        return self.total_dim == 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, VectFunctor):
            return NotImplemented
        return self.domain == other.domain and self.dims == other.dims and self._cover == other._cover

    __hash__ = None

    def __repr__(self) -> str:
        nz = {a: d for a, d in self.dims.items() if d}
        return f"VectFunctor(dims={nz!r})"

    # ------------------------------------------------------------------
    @classmethod
    def zero(cls, domain: Poset) -> "VectFunctor":
        return cls(domain, {}, {}, check=False)

    @classmethod
    def constant(cls, domain: Poset, n: int = 1) -> "VectFunctor":
        ident = QMatrix.identity(n)
        return cls(domain, {a: n for a in domain}, {c: ident for c in domain.covers()}, check=False)

    @classmethod
    def skyscraper(cls, domain: Poset, a, n: int = 1) -> "VectFunctor":
        return cls(domain, {a: n}, {}, check=False)

    @classmethod
    def representable(cls, domain: Poset, a) -> "VectFunctor":
        """``P_a``: Q on the up-set of ``a`` with identity maps."""
        return induced(domain, {a: 1})


class NatTransformation:
    """Natural transformation between functors on the same poset."""

    def __init__(self, source: VectFunctor, target: VectFunctor, components: Mapping, check: bool = True):
        if source.domain != target.domain:
            raise FunctorError("natural transformations need a common domain")
        self.source = source
        self.target = target
        self.components = {a: _as_matrix(components.get(a, QMatrix.zeros(target.dims[a], source.dims[a])),
                                         target.dims[a], source.dims[a]) for a in source.domain}
        if check:
            for a, b in source.domain.covers():
                if target.map(a, b) @ self.components[a] != self.components[b] @ source.map(a, b):
                    raise FunctorError(f"naturality fails on {a!r} -> {b!r}")

    def __call__(self, a) -> QMatrix:
        return self.components[a]

    def is_iso(self) -> bool:
        return all(m.rows == m.cols and m.is_invertible() for m in self.components.values())

    def then(self, other: "NatTransformation") -> "NatTransformation":
        return NatTransformation(self.source, other.target,
                                 {a: other(a) @ self(a) for a in self.source.domain}, check=False)

    def inverse(self) -> "NatTransformation":
        return NatTransformation(self.target, self.source,
                                 {a: m.inverse() for a, m in self.components.items()}, check=False)

    def is_zero(self) -> bool:
        return all(m.is_zero() for m in self.components.values())

    @classmethod
    def identity(cls, f: VectFunctor) -> "NatTransformation":
        return cls(f, f, {a: QMatrix.identity(f.dims[a]) for a in f.domain}, check=False)

    @classmethod
    def combination(cls, basis: Sequence["NatTransformation"], coeffs: Sequence) -> "NatTransformation":
        src, tgt = basis[0].source, basis[0].target
        comps = {}
        for a in src.domain:
            m = QMatrix.zeros(tgt.dims[a], src.dims[a])
            for phi, c in zip(basis, coeffs):
                if c:
                    m = m + phi(a).scale(c)
            comps[a] = m
        return cls(src, tgt, comps, check=False)

    def __repr__(self) -> str:
        return f"NatTransformation({len(self.components)} components)"


# ---------------------------------------------------------------------------
# restriction and left Kan extension


def restrict(f: MonotoneMap, F: VectFunctor) -> VectFunctor:
    """Pullback ``f^* F`` along a monotone map into ``F.domain``."""
    if f.target != F.domain:
        raise FunctorError("restriction: map target is not the functor's domain")
    src = f.source
    return VectFunctor(src, {a: F.dims[f(a)] for a in src},
                       {(a, b): F.map(f(a), f(b)) for a, b in src.covers()}, check=False)


@dataclass(frozen=True)
class _Colim:
    diagram: tuple          # source elements p with f(p) <= q, in a fixed order
    offsets: dict
    size: int
    coker: Cokernel         # presentation of the colimit as a quotient of the direct sum


class KanExtension:
    """Heart-level left Kan extension ``f_! G`` with its presentation data.

    ``(f_! G)(q)`` is the colimit of ``G`` over ``{p : f(p) <= q}``: the
    cokernel of the difference map on covering relations of that down-set.
    When the down-set has a maximum the colimit is read off directly.
    """

    def __init__(self, f: MonotoneMap, G: VectFunctor):
        if f.source != G.domain:
            raise FunctorError("Kan extension: map source is not the functor's domain")
        self.f = f
        self.G = G
        src, tgt = f.source, f.target
        order = src.linear_extension()
        self._data: dict = {}
        for q in tgt:
            diagram = tuple(p for p in order if tgt.leq(f(p), q))
            offsets, n = {}, 0
            for p in diagram:
                offsets[p] = n
                n += G.dims[p]
            self._data[q] = _Colim(diagram, offsets, n, self._present(diagram, offsets, n))
        dims = {q: d.coker.dim for q, d in self._data.items()}
        maps = {}
        for q, q2 in tgt.covers():
            a, b = self._data[q], self._data[q2]
            cols = [b.offsets[p] + j for p in a.diagram for j in range(G.dims[p])]
            maps[(q, q2)] = b.coker.projection.submatrix(range(b.coker.dim), cols) @ a.coker.section
        self.functor = VectFunctor(tgt, dims, maps, check=False)

    def _present(self, diagram, offsets, n) -> Cokernel:
        G = self.G
        src = self.f.source
        top = next((m for m in diagram if all(src.leq(p, m) for p in diagram)), None)
        if top is not None:
            d = G.dims[top]
            proj = QMatrix.hstack([G.map(p, top) for p in diagram], rows=d)
            sec_rows = [[Fraction(0)] * d for _ in range(n)]
            for j in range(d):
                sec_rows[offsets[top] + j][j] = Fraction(1)
            return Cokernel(d, proj, QMatrix(sec_rows, n, d))
        inside = set(diagram)
        cols = []
        for p, p2 in src.covers():
            if p in inside and p2 in inside:
                m = G.map(p, p2)
                for j in range(G.dims[p]):
                    v = [Fraction(0)] * n
                    v[offsets[p] + j] = Fraction(-1)
                    for i in range(G.dims[p2]):
                        v[offsets[p2] + i] += m[i, j]
                    cols.append(v)
        rel = QMatrix.from_columns(cols, n) if cols else QMatrix.zeros(n, 0)
        return cokernel(rel)

    def component_into(self, q, h: Callable) -> QMatrix:
        """Map ``(f_! G)(q) -> H(q)`` induced by compatible maps ``h(p) : G(p) -> H(q)``."""
        d = self._data[q]
        blocks = [h(p) for p in d.diagram]
        rows = blocks[0].rows if blocks else 0
        if not blocks:
            return QMatrix.zeros(0, 0)
        return QMatrix.hstack(blocks, rows=rows) @ d.coker.section

    def map_into(self, H: VectFunctor, h: Callable) -> NatTransformation:
        """Natural map ``f_! G -> H`` from ``h(p, q): G(p) -> H(q)`` for ``f(p) <= q``."""
        comps = {}
        for q in self.f.target:
            d = self._data[q]
            if not d.diagram or d.coker.dim == 0:
                comps[q] = QMatrix.zeros(H.dims[q], d.coker.dim)
            else:
                comps[q] = QMatrix.hstack([h(p, q) for p in d.diagram], rows=H.dims[q]) @ d.coker.section
        return NatTransformation(self.functor, H, comps, check=False)

    def unit(self) -> NatTransformation:
        """``G -> f^* f_! G``."""
        pulled = restrict(self.f, self.functor)
        comps = {}
        for p in self.f.source:
            d = self._data[self.f(p)]
            cols = range(d.offsets[p], d.offsets[p] + self.G.dims[p])
            comps[p] = d.coker.projection.submatrix(range(d.coker.dim), cols)
        return NatTransformation(self.G, pulled, comps, check=False)


def lan(f: MonotoneMap, G: VectFunctor) -> VectFunctor:
    """Left Kan extension ``f_! G`` (heart level)."""
    return KanExtension(f, G).functor


def lan_counit(f: MonotoneMap, H: VectFunctor) -> NatTransformation:
    """Counit ``f_! f^* H -> H``."""
    k = KanExtension(f, restrict(f, H))
    return k.map_into(H, lambda p, q: H.map(f(p), q))


def induced(domain: Poset, dims: Mapping) -> VectFunctor:
    """``i_!(V)`` for ``V`` on the underlying set: ``a -> (+)_{b <= a} V_b``.

    Summands are ordered by the linear extension of ``domain`` and structure
    maps are coordinate inclusions.
    """
    order = [b for b in domain.linear_extension() if dims.get(b, 0)]
    layout = {}
    for a in domain:
        offs, n = {}, 0
        for b in order:
            if domain.leq(b, a):
                offs[b] = n
                n += dims[b]
        layout[a] = (offs, n)
    maps = {}
    for a, c in domain.covers():
        (oa, na), (oc, nc) = layout[a], layout[c]
        rows = [[Fraction(0)] * na for _ in range(nc)]
        for b, o in oa.items():
            for j in range(dims[b]):
                rows[oc[b] + j][o + j] = Fraction(1)
        maps[(a, c)] = QMatrix(rows, nc, na)
    return VectFunctor(domain, {a: layout[a][1] for a in domain}, maps, check=False)


def _set_inclusion(space: StokesSpace) -> MonotoneMap:
    iset = underlying_set(space)
    return MonotoneMap(iset.total, space.total, {e: e for e in iset.total}, check=False)


def induce_from_set(space: StokesSpace, G: VectFunctor) -> VectFunctor:
    """``i_{I,!} G`` for ``G`` on the total poset of the underlying-set fibration."""
    return lan(_set_inclusion(space), G)


def direct_sum(*functors: VectFunctor) -> VectFunctor:
    dom = functors[0].domain
    for f in functors[1:]:
        if f.domain != dom:
            raise FunctorError("direct sum needs a common domain")
    dims = {a: sum(f.dims[a] for f in functors) for a in dom}
    maps = {c: QMatrix.block_diag([f.cover_maps[c] for f in functors]) for c in dom.covers()}
    return VectFunctor(dom, dims, maps, check=False)


def fiber_restriction(F: VectFunctor, space: StokesSpace, x) -> VectFunctor:
    """Restriction of a functor on the total poset to the fiber over ``x``."""
    fib = space.fibers[x]
    j = MonotoneMap(fib, space.total, {a: (x, a) for a in fib}, check=False)
    return restrict(j, F)


# ---------------------------------------------------------------------------
# graduation
#
# Gr_p is the cofiber of the induction from the strictly-lower part along the
# graduation diagram; in the heart it is the quotient of F(a) by the images of
# F(a') for a' <= a with p(a') < p(a).


@dataclass
class Graduation:
    functor: VectFunctor
    projections: dict       # element -> (dim Gr x dim F) quotient map
    sections: dict          # element -> (dim F x dim Gr), projection @ section = id


def _quotients(F: VectFunctor, lower: Callable) -> dict:
    out = {}
    dom = F.domain
    for e in dom:
        low = list(lower(e))
        tops = [l for l in low if not any(dom.lt(l, m) for m in low)]
        cols = []
        for l in tops:
            m = F.map(l, e)
            cols.extend(m.column(j) for j in range(m.cols))
        rel = QMatrix.from_columns(cols, F.dims[e]) if cols else QMatrix.zeros(F.dims[e], 0)
        out[e] = (cokernel(rel), low)
    return out


def graduation(F: VectFunctor, p: FiberwiseMap | None = None, space: StokesSpace | None = None) -> Graduation:
    """Graduation of ``F``.

    * no space: ``F`` is a functor on a plain poset; the result lives on the
      discrete poset with ``Gr(a) = F(a) / sum_{a' < a} im F(a' -> a)``;
    * with a space (``p`` defaults to the identity): ``F`` lives on the total
      poset and the result is ``Gr_p F`` on the total poset of ``I_p``.
    """
    if space is None and p is None:
        q = _quotients(F, lambda e: [l for l in F.domain.down_set(e) if l != e])
        disc = F.domain.discrete()
        func = VectFunctor(disc, {e: q[e][0].dim for e in disc}, {}, check=False)
        return Graduation(func, {e: q[e][0].projection for e in disc}, {e: q[e][0].section for e in disc})
    if p is None:
        p = FiberwiseMap.identity(space)
    space = p.source
    if F.domain != space.total:
        raise FunctorError("graduation: functor is not defined on the total poset of the space")
    ip, _ = fibration_Ip(p)

    def lower(e):
        x, a = e
        fx, jx, px = space.fibers[x], p.target.fibers[x], p.maps[x]
        return [(x, b) for b in fx.down_set(a) if b != a and jx.lt(px(b), px(a))]

    q = _quotients(F, lower)
    tot = ip.total
    maps = {}
    for e, e2 in tot.covers():
        ck2 = q[e2][0]
        m = ck2.projection @ F.map(e, e2)
        for l in q[e][1]:
            if not (m @ F.map(l, e)).is_zero():
                raise FunctorError(
                    f"graduation is not functorial along {e!r} -> {e2!r}; "
                    "the map p must be a graduation morphism (locally constant target set)")
        maps[(e, e2)] = m @ q[e][0].section
    func = VectFunctor(tot, {e: q[e][0].dim for e in tot}, maps, check=False)
    return Graduation(func, {e: q[e][0].projection for e in tot}, {e: q[e][0].section for e in tot})


def graded(F: VectFunctor, space: StokesSpace | None = None) -> VectFunctor:
    """Global graduation (along the identity)."""
    return graduation(F, space=space).functor


def gr_p(F: VectFunctor, p: FiberwiseMap) -> VectFunctor:
    return graduation(F, p=p).functor


# ---------------------------------------------------------------------------
# split, cocartesian, Stokes


def is_split(F: VectFunctor) -> tuple[bool, NatTransformation | None]:
    """Split iff ``dim F(a) = sum_{b <= a} dim Gr(b)`` for all ``a``.

    The witness is the projective-cover map ``i_!(Gr F) -> F`` built from the
    coordinate lifts of the graded pieces; it is an isomorphism when split.
    """
    gr = graduation(F)
    g = gr.functor.dims
    dom = F.domain
    for a in dom:
        if F.dims[a] != sum(g[b] for b in dom.down_set(a)):
            return False, None
    ind = induced(dom, g)
    order = [b for b in dom.linear_extension() if g[b]]
    comps = {}
    for a in dom:
        blocks = [F.map(b, a) @ gr.sections[b] for b in order if dom.leq(b, a)]
        comps[a] = QMatrix.hstack(blocks, rows=F.dims[a]) if blocks else QMatrix.zeros(F.dims[a], 0)
    w = NatTransformation(ind, F, comps, check=False)
    assert w.is_iso(), "projective cover map of a dimension-split functor must be invertible"
    return True, w


def _check_on_total(F: VectFunctor, space: StokesSpace) -> None:
    if F.domain != space.total:
        raise FunctorError("functor is not defined on the total poset of the space")


def cocartesian_failures(F: VectFunctor, space: StokesSpace) -> list[tuple]:
    """Triples ``(x, y, b)`` where ``gamma_!(F|I_x)(b) -> F(y, b)`` is not invertible."""
    _check_on_total(F, space)
    bad = []
    for x, y in space.base.covers():
        g = space.transition(x, y)
        k = KanExtension(g, fiber_restriction(F, space, x))
        for b in space.fibers[y]:
            if k.functor.dims[b] != F.dims[(y, b)]:
                bad.append((x, y, b))
                continue
            if F.dims[(y, b)] == 0:
                continue
            m = k.component_into(b, lambda a: F.map((x, a), (y, b)))
            if not m.is_invertible():
                bad.append((x, y, b))
    return bad


def is_cocartesian(F: VectFunctor, space: StokesSpace) -> bool:
    return not cocartesian_failures(F, space)


def is_stokes(F: VectFunctor, space: StokesSpace) -> bool:
    """Cocartesian and split on every fiber."""
    _check_on_total(F, space)
    for x in space.base:
        if not is_split(fiber_restriction(F, space, x))[0]:
            return False
    return is_cocartesian(F, space)


# ---------------------------------------------------------------------------
# Hom and Ext


def _hom_system(F: VectFunctor, G: VectFunctor) -> tuple[list[dict], dict, int]:
    if F.domain != G.domain:
        raise FunctorError("Hom needs a common domain")
    offs, n = {}, 0
    for a in F.domain:
        offs[a] = n
        n += G.dims[a] * F.dims[a]
    rows = []
    for a, b in F.domain.covers():
        fa, fb, ga, gb = F.dims[a], F.dims[b], G.dims[a], G.dims[b]
        if not (fa and gb):
            continue
        gm, fm = G.map(a, b), F.map(a, b)
        for i in range(gb):
            for j in range(fa):
                row: dict[int, Fraction] = {}
                for k in range(ga):
                    c = gm[i, k]
                    if c:
                        row[offs[a] + k * fa + j] = row.get(offs[a] + k * fa + j, 0) + c
                for l in range(fb):
                    c = fm[l, j]
                    if c:
                        idx = offs[b] + i * fb + l
                        row[idx] = row.get(idx, 0) - c
                row = {k: v for k, v in row.items() if v}
                if row:
                    rows.append(row)
    return rows, offs, n


def hom_space(F: VectFunctor, G: VectFunctor) -> list[NatTransformation]:
    """Basis of natural transformations ``F -> G`` (kernel of the naturality constraints)."""
    rows, offs, n = _hom_system(F, G)
    out = []
    for v in sparse_kernel(rows, n):
        comps = {}
        for a in F.domain:
            r, c = G.dims[a], F.dims[a]
            o = offs[a]
            comps[a] = QMatrix([[v[o + i * c + j] for j in range(c)] for i in range(r)], r, c)
        out.append(NatTransformation(F, G, comps, check=False))
    return out


def hom_dim(F: VectFunctor, G: VectFunctor) -> int:
    rows, _, n = _hom_system(F, G)
    return n - sparse_rank(rows)


def rhom(F: VectFunctor, G: VectFunctor, max_degree: int | None = None) -> CochainComplex:
    """Nerve cochain complex computing ``Ext^*(F, G)``.

    ``C^n = (+)`` over strict chains ``a_0 < ... < a_n`` of ``Hom(F(a_0), G(a_n))``
    with the cosimplicial differential: the outer faces act through ``F`` and
    ``G``, the inner faces drop an element of the chain.  With ``max_degree``
    the complex stops at degree ``max_degree + 1`` (cohomology is exact up to
    ``max_degree``).
    """
    if F.domain != G.domain:
        raise FunctorError("rhom needs a common domain")
    dom = F.domain
    top = len(dom) - 1 if max_degree is None else max_degree
    chains, index = [], []
    for n in range(0, top + 2):
        cs = dom.strict_chains(n) if len(dom) else []
        cs = [c for c in cs if F.dims[c[0]] and G.dims[c[-1]]]
        offs, m = {}, 0
        for c in cs:
            offs[c] = m
            m += G.dims[c[-1]] * F.dims[c[0]]
        chains.append(cs)
        index.append((offs, m))
        if not dom.strict_chains(n):
            break
    while len(index) > 1 and index[-1][1] == 0:
        index.pop()
        chains.pop()
    dims = [m for _, m in index]
    diffs = []
    for n in range(len(dims) - 1):
        src_offs, src_dim = index[n]
        tgt_offs, tgt_dim = index[n + 1]
        d = SparseMatrix(tgt_dim, src_dim)
        for c2, o2 in tgt_offs.items():
            a0, an1 = c2[0], c2[-1]
            f0, g1 = F.dims[a0], G.dims[an1]
            # face 0: c(a_1..a_{n+1}) F(a_0 -> a_1)
            face = c2[1:]
            if face in src_offs:
                fm = F.map(a0, c2[1])
                o, w = src_offs[face], F.dims[c2[1]]
                for i in range(g1):
                    for j in range(f0):
                        for l in range(w):
                            if fm[l, j]:
                                d.add(o2 + i * f0 + j, o + i * w + l, fm[l, j])
            # inner faces
            for k in range(1, n + 1):
                face = c2[:k] + c2[k + 1:]
                if face in src_offs:
                    o = src_offs[face]
                    sgn = (-1) ** k
                    for t in range(g1 * f0):
                        d.add(o2 + t, o + t, sgn)
            # face n+1: G(a_n -> a_{n+1}) c(a_0..a_n)
            face = c2[:-1]
            if face in src_offs:
                gm = G.map(c2[-2], an1)
                o, h = src_offs[face], G.dims[c2[-2]]
                sgn = (-1) ** (n + 1)
                for i in range(g1):
                    for j in range(f0):
                        for l in range(h):
                            if gm[i, l]:
                                d.add(o2 + i * f0 + j, o + l * f0 + j, sgn * gm[i, l])
        diffs.append(d)
    return CochainComplex(0, dims, diffs)


def ext_dims(F: VectFunctor, G: VectFunctor) -> dict[int, int]:
    return rhom(F, G).cohomology_dims()


# ---------------------------------------------------------------------------
# isomorphism search


def find_iso(F: VectFunctor, G: VectFunctor, *, seed: int = 0, trials: int = 16,
             bound: int = 6) -> NatTransformation | None:
    """An invertible natural transformation ``F -> G`` or None.

    Seeded random elements of ``Hom(F, G)`` are tried first.  If they all fail,
    exact obstructions are checked (mismatched Hom dimensions); when
    ``dim Hom(F, G) <= bound`` the generic element is analysed symbolically:
    an isomorphism exists iff no component determinant vanishes identically.
    Otherwise :class:`InconclusiveError` is raised.
    """
    if F.domain != G.domain:
        raise FunctorError("isomorphism search needs a common domain")
    if F.dims != G.dims:
        return None
    if F.is_zero():
        return NatTransformation(F, G, {}, check=False)
    basis = hom_space(F, G)
    if not basis:
        return None
    rng = random.Random(seed)
    for _ in range(trials):
        coeffs = [Fraction(rng.randint(-9, 9)) for _ in basis]
        phi = NatTransformation.combination(basis, coeffs)
        if phi.is_iso():
            return phi
    k = len(basis)
    if k != hom_dim(F, F) or k != hom_dim(G, G) or k != hom_dim(G, F):
        return None
    if k <= bound:
        return _symbolic_iso(basis)
    raise InconclusiveError(
        f"no isomorphism found in {trials} random trials (seed {seed}) and dim Hom = {k} exceeds bound {bound}")


def _symbolic_iso(basis: Sequence[NatTransformation]) -> NatTransformation | None:
    import sympy

    ts = sympy.symbols(f"t0:{len(basis)}")
    polys = []
    src = basis[0].source
    for a in src.domain:
        n = src.dims[a]
        if not n:
            continue
        mat = sympy.zeros(n, n)
        for t, phi in zip(ts, basis):
            m = phi(a)
            mat += sympy.Matrix(n, n, lambda i, j: sympy.Rational(m[i, j].numerator, m[i, j].denominator)) * t
        det = sympy.expand(mat.det(method="berkowitz"))
        if det == 0:
            return None
        polys.append(det)
    # choose values one variable at a time so that no determinant becomes zero
    values = []
    for t in ts:
        v = 0
        while True:
            subbed = [sympy.expand(p.subs(t, v)) for p in polys]
            if all(s != 0 for s in subbed):
                polys = subbed
                values.append(Fraction(v))
                break
            v += 1
    phi = NatTransformation.combination(basis, values)
    assert phi.is_iso()
    return phi


def iso_exists(F: VectFunctor, G: VectFunctor, *, seed: int = 0, trials: int = 16, bound: int = 6) -> bool:
    return find_iso(F, G, seed=seed, trials=trials, bound=bound) is not None


# ---------------------------------------------------------------------------
# stripping a graded summand


def strip_summand(F: VectFunctor, part: Iterable, space: StokesSpace | None = None,
                  check_stokes: bool = True) -> VectFunctor:
    """Cokernel of ``i_!(Gr F restricted to part) -> F`` for a natural lift of Gr.

    Without a space ``F`` is a functor on a single poset and any lift of the
    graded pieces is natural.  With a space, ``part`` must be stable under the
    transitions and the lift must commute with the cocartesian edges; the lift
    is found by solving a linear system.
    """
    part = set(part)
    dom = F.domain
    if not part <= set(dom.elements):
        raise FunctorError("part contains elements outside the domain")
    if space is None:
        gr = graduation(F)
        sub = dom.discrete().subposet(part)
        edges = []
    else:
        _check_on_total(F, space)
        for e, e2 in space.cocartesian_edges:
            if e in part and e2 not in part:
                raise FunctorError(f"part is not stable under transitions: {e!r} -> {e2!r}")
        gr = graduation(F, space=space)
        sub = underlying_set(space).total.subposet(part)
        edges = [(e, e2) for e, e2 in sub.covers()]
    g = gr.functor.dims
    # unknown lifts s_e (dim F(e) x g_e): projection @ s_e = id and naturality on edges
    offs, n = {}, 0
    for e in sorted(part, key=lambda z: dom.index(z)):
        offs[e] = n
        n += F.dims[e] * g[e]
    rows, rhs = [], []

    def var(e, i, j):
        return offs[e] + i * g[e] + j

    for e in offs:
        pr = gr.projections[e]
        for r in range(g[e]):
            for j in range(g[e]):
                row = {var(e, i, j): pr[r, i] for i in range(F.dims[e]) if pr[r, i]}
                rows.append(row)
                rhs.append(Fraction(int(r == j)))
    for e, e2 in edges:
        fm = F.map(e, e2)
        gm = gr.functor.map(e, e2) if space is not None else None
        for i in range(F.dims[e2]):
            for j in range(g[e]):
                row: dict[int, Fraction] = {}
                for k in range(F.dims[e]):
                    if fm[i, k]:
                        idx = var(e, k, j)
                        row[idx] = row.get(idx, 0) + fm[i, k]
                for l in range(g[e2]):
                    if gm[l, j]:
                        idx = var(e2, i, l)
                        row[idx] = row.get(idx, 0) - gm[l, j]
                rows.append({k: v for k, v in row.items() if v})
                rhs.append(Fraction(0))
    sol = sparse_solve(rows, rhs, n)
    if sol is None:
        raise FunctorError(
            "no natural section of F -> Gr(F) over the chosen part: the obstruction sits in degree 0 "
            "(the lifts of the graded pieces cannot be chosen compatibly with the transitions)")
    lifts = {}
    for e in offs:
        r, c = F.dims[e], g[e]
        lifts[e] = QMatrix([[sol[var(e, i, j)] for j in range(c)] for i in range(r)], r, c)
    gsub = VectFunctor(sub, {e: g[e] for e in sub},
                       {(e, e2): gr.functor.map(e, e2) for e, e2 in sub.covers()}, check=False)
    inc = MonotoneMap(sub, dom, {e: e for e in sub}, check=False)
    k = KanExtension(inc, gsub)
    tau = k.map_into(F, lambda e, q: F.map(e, q) @ lifts[e])
    cks = {q: cokernel(tau(q)) for q in dom}
    maps = {(q, q2): cks[q2].projection @ F.map(q, q2) @ cks[q].section for q, q2 in dom.covers()}
    out = VectFunctor(dom, {q: cks[q].dim for q in dom}, maps, check=False)
    if check_stokes and space is not None and is_stokes(F, space):
        assert is_stokes(out, space), "stripping a graded summand must preserve the Stokes condition"
    return out
