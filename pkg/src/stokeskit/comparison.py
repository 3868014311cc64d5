"""Stokes matrices versus Stokes functors on the circle.

Conventions (unramified circle with directions ``D0 < ... < D(m-1)`` and arcs
``Ai`` between ``Di`` and ``D(i+1)``): ``V = (+)_q V_q`` in the block order of
the irregular class and

* ``F(x, q) = V_{<=_x q}`` as a coordinate subspace,
* ``F(Di, q) -> F(Ai, q)`` is the inclusion,
* ``F(Di, q) -> F(A(i-1), q)`` is ``S_i`` (``h S_0`` for ``i = 0``),

with ``S_i`` block unipotent, off-diagonal block ``(q'', q')`` allowed only
when ``q'' < q'`` on the arc before ``Di``, and ``h`` block diagonal (formal
monodromy).  Parallel transport from ``A(i-1)`` to ``Ai`` is ``S_i^{-1}``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .functors import FunctorError, VectFunctor, fiber_restriction, graduation, is_split, lan
from .linalg import QMatrix, image, kernel
from .poset import MonotoneMap
from .space import StokesSpace

__all__ = [
    "StokesData",
    "from_stokes_matrices",
    "to_stokes_matrices",
    "random_stokes_data",
    "monodromy",
    "underlying_local_system",
    "local_system_monodromy",
    "common_grading",
]


def _circle(space: StokesSpace) -> tuple[list, list]:
    if "directions" not in space.meta:
        raise ValueError("space is not a stratified circle")
    if space.meta.get("ramification", 1) != 1:
        raise ValueError("Stokes matrices are implemented for unramified classes only")
    return list(space.meta["directions"]), list(space.meta["arcs"])


def _layout(space: StokesSpace, dims: Mapping) -> tuple[list, dict, int]:
    labels = list(space.meta["irregular_class"].labels)
    offs, n = {}, 0
    for q in labels:
        offs[q] = n
        n += int(dims.get(q, 0))
    return labels, offs, n


def _block(m: QMatrix, offs, dims, r, c) -> QMatrix:
    return m.submatrix(range(offs[r], offs[r] + dims[r]), range(offs[c], offs[c] + dims[c]))


def _block_diag_part(m: QMatrix, labels, offs, dims) -> QMatrix:
    return QMatrix.block_diag([_block(m, offs, dims, q, q) for q in labels])


@dataclass
class StokesData:
    space: StokesSpace
    dims: dict              # exponential label -> multiplicity
    stokes: dict            # direction label -> QMatrix
    formal_monodromy: QMatrix

    def functor(self) -> VectFunctor:
        return from_stokes_matrices(self.space, self.dims, self.stokes, self.formal_monodromy)

    def to_json(self) -> dict:
        from .linalg import format_q
        enc = lambda m: [[format_q(x) for x in row] for row in m.tolist()]
        return {"dims": dict(self.dims), "stokes": {k: enc(v) for k, v in self.stokes.items()},
                "formal_monodromy": enc(self.formal_monodromy)}


def _validate(space, dims, stokes, h):
    dirs, arcs = _circle(space)
    labels, offs, n = _layout(space, dims)
    if set(stokes) != set(dirs):
        raise ValueError(f"need one Stokes matrix per direction {dirs}")
    for i, d in enumerate(dirs):
        s = stokes[d]
        if s.shape != (n, n):
            raise ValueError(f"Stokes matrix at {d} must be {n}x{n}")
        before = space.fibers[arcs[i - 1]]
        for r in labels:
            for c in labels:
                if not dims[r] or not dims[c]:
                    continue
                b = _block(s, offs, dims, r, c)
                if r == c:
                    if b != QMatrix.identity(dims[r]):
                        raise ValueError(f"Stokes matrix at {d} is not unipotent on block {r}")
                elif not b.is_zero() and not before.lt(r, c):
                    raise ValueError(f"Stokes matrix at {d} has a forbidden block ({r}, {c})")
    if h.shape != (n, n) or h != _block_diag_part(h, labels, offs, dims) or not h.is_invertible():
        raise ValueError("formal monodromy must be block diagonal and invertible")


def from_stokes_matrices(space: StokesSpace, dims: Mapping, stokes: Mapping,
                         formal_monodromy: QMatrix | None = None) -> VectFunctor:
    """The Stokes functor on ``space.total`` glued from Stokes matrices."""
    dims = {q: int(dims.get(q, 0)) for q in space.meta["irregular_class"].labels}
    dirs, arcs = _circle(space)
    labels, offs, n = _layout(space, dims)
    h = formal_monodromy if formal_monodromy is not None else QMatrix.identity(n)
    _validate(space, dims, stokes, h)
    coords = {}
    for x in space.base:
        fx = space.fibers[x]
        for q in labels:
            coords[(x, q)] = [offs[p] + j for p in labels if fx.leq(p, q) for j in range(dims[p])]

    def sel(rows_of, cols_of, t=None):
        r, c = coords[rows_of], coords[cols_of]
        if t is None:
            return QMatrix([[Fraction(int(a == b)) for b in c] for a in r], len(r), len(c))
        m = t.submatrix(range(n), c)
        rs = set(r)
        for i in range(n):
            if i not in rs and any(m.row(i)):
                raise ValueError("Stokes matrix does not preserve the filtration")
        return m.submatrix(r, range(len(c)))

    maps = {}
    for x in space.base:
        for a, b in space.fibers[x].covers():
            maps[((x, a), (x, b))] = sel((x, b), (x, a))
    for i, d in enumerate(dirs):
        t = h @ stokes[d] if i == 0 else stokes[d]
        for q in labels:
            maps[((d, q), (arcs[i], q))] = sel((arcs[i], q), (d, q))
            maps[((d, q), (arcs[i - 1], q))] = sel((arcs[i - 1], q), (d, q), t)
    return VectFunctor(space.total, {e: len(coords[e]) for e in space.total}, maps)


def _top(space: StokesSpace, arc):
    m = space.fibers[arc].maximum()
    if m is None:
        raise ValueError(f"fiber over {arc} has no maximum")
    return m


def to_stokes_matrices(F: VectFunctor, space: StokesSpace) -> StokesData:
    """Recover normalized Stokes matrices and formal monodromy from a Stokes functor.

    At each direction a splitting is chosen; ``Psi_i^+`` / ``Psi_i^-`` send the
    graded pieces into the top of the following / preceding arc.  The transition
    ``(Psi_i^+)^{-1} Psi_{i+1}^-`` is filtered; its block-diagonal parts are
    gauged away sequentially and the residue is the formal monodromy.
    """
    dirs, arcs = _circle(space)
    labels = list(space.meta["irregular_class"].labels)
    m = len(dirs)
    psi_plus, psi_minus, gdims = [], [], None
    for i, d in enumerate(dirs):
        Fd = fiber_restriction(F, space, d)
        ok, _ = is_split(Fd)
        if not ok:
            raise FunctorError(f"fiber functor over {d} is not split")
        gr = graduation(Fd)
        g = {q: gr.functor.dims[q] for q in labels}
        if gdims is None:
            gdims = g
        elif g != gdims:
            raise FunctorError("graded dimensions vary around the circle; functor is not Stokes")
        for arc, out in ((arcs[i], psi_plus), (arcs[i - 1], psi_minus)):
            top = (arc, _top(space, arc))
            cols = [F.map((d, q), top) @ gr.sections[q] for q in labels if g[q]]
            psi = QMatrix.hstack(cols, rows=F.dims[top])
            if psi.rows != psi.cols or not psi.is_invertible():
                raise FunctorError(f"functor is not cocartesian along {d} -> {arc}")
            out.append(psi)
    labels_, offs, n = _layout(space, gdims)
    T = [psi_plus[i].inverse() @ psi_minus[(i + 1) % m] for i in range(m)]
    g = QMatrix.identity(n)
    stokes = {}
    for i in range(m - 1):
        nxt = _block_diag_part(T[i], labels, offs, gdims).inverse() @ g
        stokes[dirs[i + 1]] = g.inverse() @ T[i] @ nxt
        g = nxt
    last = g.inverse() @ T[m - 1]
    h = _block_diag_part(last, labels, offs, gdims)
    stokes[dirs[0]] = h.inverse() @ last
    _validate(space, gdims, stokes, h)
    return StokesData(space, gdims, stokes, h)


def random_stokes_data(space: StokesSpace, rng: random.Random, dims: Mapping | None = None,
                       max_rank: int = 3, monodromy: bool = True) -> StokesData:
    """Random classical data: ``S_i`` only couples pairs incomparable at ``Di``."""
    dirs, arcs = _circle(space)
    labels = list(space.meta["irregular_class"].labels)
    if dims is None:
        dims = {}
        budget = max_rank
        for q in labels:
            dims[q] = rng.randint(0, min(2, budget))
            budget -= dims[q]
        if not any(dims.values()):
            dims[labels[0]] = 1
    dims = {q: int(dims.get(q, 0)) for q in labels}
    _, offs, n = _layout(space, dims)
    stokes = {}
    for i, d in enumerate(dirs):
        rows = [[Fraction(int(r == c)) for c in range(n)] for r in range(n)]
        before, here = space.fibers[arcs[i - 1]], space.fibers[d]
        for r in labels:
            for c in labels:
                if r != c and before.lt(r, c) and not here.comparable(r, c):
                    for a in range(dims[r]):
                        for b in range(dims[c]):
                            rows[offs[r] + a][offs[c] + b] = Fraction(rng.randint(-3, 3))
        stokes[d] = QMatrix(rows, n, n)
    blocks = []
    for q in labels:
        k = dims[q]
        while True:
            b = QMatrix([[Fraction(rng.randint(-2, 2)) if monodromy else Fraction(int(i == j))
                          for j in range(k)] for i in range(k)], k, k)
            if b.is_invertible():
                break
        blocks.append(b)
    return StokesData(space, dims, stokes, QMatrix.block_diag(blocks))


def monodromy(data: StokesData) -> QMatrix:
    """Monodromy of the underlying local system, based on the last arc.

    ``S_{m-1}^{-1} ... S_1^{-1} (h S_0)^{-1}``.
    """
    dirs, _ = _circle(data.space)
    m = (data.formal_monodromy @ data.stokes[dirs[0]]).inverse()
    for d in dirs[1:]:
        m = data.stokes[d].inverse() @ m
    return m


def underlying_local_system(F: VectFunctor, space: StokesSpace) -> VectFunctor:
    """``p_! F`` on the base, ``p`` the projection of the total poset."""
    p = MonotoneMap(space.total, space.base, {e: e[0] for e in space.total}, check=False)
    return lan(p, F)


def local_system_monodromy(L: VectFunctor, space: StokesSpace) -> QMatrix:
    """Transport once around the circle starting and ending on the last arc."""
    dirs, arcs = _circle(space)
    n = L.dims[arcs[-1]]
    m = QMatrix.identity(n)
    for i, d in enumerate(dirs):
        m = L.map(d, arcs[i]) @ L.map(d, arcs[i - 1]).inverse() @ m
    return m


# ---------------------------------------------------------------------------
# common gradings of two filtrations


def _span(cols: Sequence, n: int) -> QMatrix:
    if not cols:
        return QMatrix.zeros(n, 0)
    basis = image(QMatrix.from_columns(list(cols), n))
    return QMatrix.from_columns(basis, n) if basis else QMatrix.zeros(n, 0)


def _cols(m: QMatrix) -> list:
    return [m.column(j) for j in range(m.cols)]


def _intersect(u: QMatrix, w: QMatrix, n: int) -> QMatrix:
    if u.cols == 0 or w.cols == 0:
        return QMatrix.zeros(n, 0)
    ker = kernel(QMatrix.hstack([u, -w], rows=n))
    return _span([u.apply(v[:u.cols]) for v in ker], n)


def _complement(w: QMatrix, sub: QMatrix, n: int) -> QMatrix:
    cols = _cols(sub)
    r = len(cols)
    out = []
    for c in _cols(w):
        if QMatrix.from_columns(cols + [c], n).rank() > r:
            cols.append(c)
            out.append(c)
            r += 1
    return QMatrix.from_columns(out, n) if out else QMatrix.zeros(n, 0)


def _check_filtration(n: int, order: Sequence, filt: Mapping) -> dict:
    spans = {}
    prev = QMatrix.zeros(n, 0)
    for q in order:
        m = filt[q]
        if m.rows != n:
            raise ValueError("filtration step has the wrong ambient dimension")
        if m.rank() != m.cols:
            raise ValueError(f"filtration step {q!r} is not given by a monomorphism")
        both = QMatrix.hstack([prev, m], rows=n)
        if both.rank() != m.cols:
            raise ValueError(f"filtration is not increasing at {q!r}")
        spans[q] = m
        prev = m
    return spans


def common_grading(n: int, order1: Sequence, filt1: Mapping, order2: Sequence, filt2: Mapping):
    """A grading ``V = (+)_q G_q`` inducing both filtrations, or ``None``.

    ``orderK`` lists the index set in increasing order, ``filtK[q]`` is an
    injective ``n x k`` matrix spanning ``F_{<= q}``.  The candidate
    ``G_q`` is a complement of ``F1_{<q} n F2_{<=q} + F1_{<=q} n F2_{<q}`` in
    ``F1_{<=q} n F2_{<=q}``; it works exactly when some grading does.
    """
    if set(order1) != set(order2):
        raise ValueError("the two filtrations must share their index set")
    f1 = _check_filtration(n, order1, filt1)
    f2 = _check_filtration(n, order2, filt2)
    zero = QMatrix.zeros(n, 0)

    def before(order, f, q):
        i = list(order).index(q)
        return f[order[i - 1]] if i else zero

    g = {}
    for q in order1:
        w = _intersect(f1[q], f2[q], n)
        a = _intersect(before(order1, f1, q), f2[q], n)
        b = _intersect(f1[q], before(order2, f2, q), n)
        g[q] = _complement(w, _span(_cols(a) + _cols(b), n), n)
    for order, f in ((order1, f1), (order2, f2)):
        for i, q in enumerate(order):
            cols = [c for p in order[:i + 1] for c in _cols(g[p])]
            if len(cols) != f[q].cols:
                return None
            if QMatrix.hstack([f[q], QMatrix.from_columns(cols, n) if cols else zero], rows=n).rank() != f[q].cols:
                return None
    return g
