"""Finite-dimensional quiver representations over an exact field, morphisms,
and the homological toolbox: Hom and Ext^1 bases, kernels, cokernels, images,
direct sums, pushouts, short exact sequences, extensions from cocycles, and
projective covers for acyclic quivers.

Ext^1 is computed from the two-term complex

    0 -> Hom(V, W) -> sum_x Hom(V_x, W_x) --d--> sum_a Hom(V_s(a), W_t(a)) -> Ext^1(V, W) -> 0

which is exact because path algebras of quivers are hereditary. The matrix of
d is the same naturality system whose kernel is Hom, so both invariants come
from one elimination.
"""

import itertools
import random

from .errors import (
    ApproxcatError,
    FieldMismatchError,
    IsoInconclusiveError,
    NonAcyclicQuiverError,
    ShapeError,
)
from .fields import FieldSpec
from .matrix import Matrix, block_diag, hstack, vstack
from .quiver import Quiver


class Rep:
    """A representation: a dimension per vertex and a matrix per arrow.

    The matrix for arrow a: s -> t has shape dims[t] x dims[s] and acts on
    column vectors. Missing arrows in the maps argument default to zero.
    """

    __slots__ = ("quiver", "field", "dims", "maps", "_key")

    def __init__(self, quiver: Quiver, field: FieldSpec, dims, maps=None):
        dims = tuple(int(d) for d in dims)
        if len(dims) != quiver.vertex_count:
            raise ShapeError(f"need {quiver.vertex_count} dimensions, got {len(dims)}")
        if any(d < 0 for d in dims):
            raise ShapeError("negative dimension")
        maps = dict(maps or {})
        full = {}
        for a in quiver.arrows:
            m = maps.pop(a.id, None)
            if m is None:
                m = Matrix.zeros(field, dims[a.target], dims[a.source])
            if m.field != field:
                raise FieldMismatchError(f"map {a.id} over {m.field.label}, rep over {field.label}")
            if (m.rows, m.cols) != (dims[a.target], dims[a.source]):
                raise ShapeError(
                    f"map {a.id} is {m.rows}x{m.cols}, expected {dims[a.target]}x{dims[a.source]}"
                )
            full[a.id] = m
        if maps:
            raise ApproxcatError(f"maps for unknown arrows: {sorted(maps)}")
        object.__setattr__(self, "quiver", quiver)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "maps", full)
        object.__setattr__(self, "_key", None)

    def __setattr__(self, name, value):
        raise AttributeError("Rep is immutable")

    @staticmethod
    def zero(quiver: Quiver, field: FieldSpec) -> "Rep":
        return Rep(quiver, field, [0] * quiver.vertex_count)

    @staticmethod
    def simple(quiver: Quiver, field: FieldSpec, vertex: int) -> "Rep":
        dims = [0] * quiver.vertex_count
        dims[vertex] = 1
        return Rep(quiver, field, dims)

    def map(self, aid: str) -> Matrix:
        return self.maps[aid]

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    def is_zero_rep(self) -> bool:
        return self.total_dim == 0

    def __eq__(self, other):
        return (
            isinstance(other, Rep)
            and self.quiver == other.quiver
            and self.field == other.field
            and self.dims == other.dims
            and self.maps == other.maps
        )

    def __hash__(self):
        return hash(self.key())

    def key(self):
        """Hashable structural identity, usable as a memo key."""
        if self._key is None:
            k = (
                self.quiver.key(),
                self.field.label,
                self.dims,
                tuple(self.maps[a.id]._e for a in self.quiver.arrows),
            )
            object.__setattr__(self, "_key", k)
        return self._key

    def __repr__(self):
        return f"Rep(dims={self.dims})"


class RepMorphism:
    """A natural family of linear maps between two representations of the
    same quiver: component(x) has shape target.dims[x] x source.dims[x] and
    target.map(a) @ f_s == f_t @ source.map(a) for every arrow a: s -> t."""

    __slots__ = ("source", "target", "components")

    def __init__(self, source: Rep, target: Rep, components, check: bool = True):
        if source.quiver != target.quiver:
            raise ShapeError("morphism between representations of different quivers")
        if source.field != target.field:
            raise FieldMismatchError("morphism between different fields")
        components = tuple(components)
        if len(components) != source.quiver.vertex_count:
            raise ShapeError("one component per vertex required")
        for x, c in enumerate(components):
            if (c.rows, c.cols) != (target.dims[x], source.dims[x]):
                raise ShapeError(
                    f"component {x} is {c.rows}x{c.cols}, "
                    f"expected {target.dims[x]}x{source.dims[x]}"
                )
            if c.field != source.field:
                raise FieldMismatchError("component over wrong field")
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "components", components)
        if check and not self._is_natural():
            raise ShapeError("components are not natural (do not commute with arrow maps)")

    def __setattr__(self, name, value):
        raise AttributeError("RepMorphism is immutable")

    def _is_natural(self) -> bool:
        for a in self.source.quiver.arrows:
            lhs = self.target.map(a.id) @ self.components[a.source]
            rhs = self.components[a.target] @ self.source.map(a.id)
            if lhs != rhs:
                return False
        return True

    def component(self, x: int) -> Matrix:
        return self.components[x]

    @staticmethod
    def identity(rep: Rep) -> "RepMorphism":
        comps = [Matrix.identity(rep.field, d) for d in rep.dims]
        return RepMorphism(rep, rep, comps, check=False)

    @staticmethod
    def zero(source: Rep, target: Rep) -> "RepMorphism":
        comps = [
            Matrix.zeros(source.field, target.dims[x], source.dims[x])
            for x in range(source.quiver.vertex_count)
        ]
        return RepMorphism(source, target, comps, check=False)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def is_injective(self) -> bool:
        return all(c.rank() == c.cols for c in self.components)

    def is_surjective(self) -> bool:
        return all(c.rank() == c.rows for c in self.components)

    def is_iso(self) -> bool:
        return all(c.is_invertible() for c in self.components)

    def inverse(self) -> "RepMorphism":
        if not self.is_iso():
            raise ApproxcatError("not invertible")
        comps = [c.solve(Matrix.identity(c.field, c.rows)) for c in self.components]
        return RepMorphism(self.target, self.source, comps)

    def __eq__(self, other):
        return (
            isinstance(other, RepMorphism)
            and self.source == other.source
            and self.target == other.target
            and self.components == other.components
        )

    def __hash__(self):
        return hash((self.source.key(), self.target.key(), self.components))

    def __repr__(self):
        return f"RepMorphism({self.source.dims} -> {self.target.dims})"

    def __add__(self, other):
        if self.source != other.source or self.target != other.target:
            raise ShapeError("morphism sum needs equal ends")
        comps = [a + b for a, b in zip(self.components, other.components)]
        return RepMorphism(self.source, self.target, comps, check=False)

    def scale(self, c) -> "RepMorphism":
        return RepMorphism(
            self.source, self.target, [m.scale(c) for m in self.components], check=False
        )


def compose(g: RepMorphism, f: RepMorphism) -> RepMorphism:
    """g after f."""
    if f.target != g.source:
        raise ShapeError("composition mismatch")
    comps = [gc @ fc for gc, fc in zip(g.components, f.components)]
    return RepMorphism(f.source, g.target, comps, check=False)


class ShortExactSeq:
    """A pair (i: X -> Z, p: Z -> Y) intended to be short exact. The
    constructor only checks composability; exactness is the job of
    ses_verify, which certificate code always calls."""

    __slots__ = ("i", "p")

    def __init__(self, i: RepMorphism, p: RepMorphism):
        if i.target != p.source:
            raise ShapeError("middle terms disagree")
        object.__setattr__(self, "i", i)
        object.__setattr__(self, "p", p)

    def __setattr__(self, name, value):
        raise AttributeError("ShortExactSeq is immutable")

    @property
    def sub(self) -> Rep:
        return self.i.source

    @property
    def mid(self) -> Rep:
        return self.i.target

    @property
    def quot(self) -> Rep:
        return self.p.target

    def __eq__(self, other):
        return isinstance(other, ShortExactSeq) and self.i == other.i and self.p == other.p

    def __repr__(self):
        return f"SES({self.sub.dims} -> {self.mid.dims} -> {self.quot.dims})"


class Filtration:
    """A chain 0 = M_0 -> M_1 -> ... -> M_r of injective morphisms, stored
    as the steps M_j -> M_j+1. Factor j is coker(step j) = M_j+1 / M_j."""

    __slots__ = ("steps",)

    def __init__(self, steps):
        steps = tuple(steps)
        if not steps:
            raise ShapeError("filtration needs at least one step")
        if not steps[0].source.is_zero_rep():
            raise ShapeError("filtration must start at the zero representation")
        for j, s in enumerate(steps):
            if not s.is_injective():
                raise ShapeError(f"filtration step {j} is not injective")
            if j and steps[j - 1].target != s.source:
                raise ShapeError(f"filtration steps {j - 1} and {j} do not chain")
        object.__setattr__(self, "steps", steps)

    def __setattr__(self, name, value):
        raise AttributeError("Filtration is immutable")

    @property
    def depth(self) -> int:
        return len(self.steps)

    @property
    def terms(self):
        return (self.steps[0].source,) + tuple(s.target for s in self.steps)

    @property
    def top(self) -> Rep:
        return self.steps[-1].target

    def factor(self, j: int) -> Rep:
        return cokernel(self.steps[j])[0]

    def factors(self):
        return [self.factor(j) for j in range(self.depth)]


# Hom and Ext via the naturality system


def _hom_offsets(v: Rep, w: Rep):
    offs = []
    n = 0
    for x in range(v.quiver.vertex_count):
        offs.append(n)
        n += w.dims[x] * v.dims[x]
    return offs, n


def _hom_system(v: Rep, w: Rep) -> Matrix:
    """Matrix of f |-> (f_t v_a - w_a f_s)_a on the vertexwise hom spaces,
    components vectorized row-major, arrows in quiver order."""
    if v.quiver != w.quiver or v.field != w.field:
        raise FieldMismatchError("hom system needs a common quiver and field")
    F = v.field
    offs, n = _hom_offsets(v, w)
    rows = []
    for a in v.quiver.arrows:
        s, t = a.source, a.target
        va, wa = v.map(a.id), w.map(a.id)
        for i in range(w.dims[t]):
            for j in range(v.dims[s]):
                row = [F.zero] * n
                for k in range(v.dims[t]):
                    c = va.entry(k, j)
                    if c != 0:
                        row[offs[t] + i * v.dims[t] + k] = F.add(
                            row[offs[t] + i * v.dims[t] + k], c
                        )
                for k in range(w.dims[s]):
                    c = wa.entry(i, k)
                    if c != 0:
                        row[offs[s] + k * v.dims[s] + j] = F.sub(
                            row[offs[s] + k * v.dims[s] + j], c
                        )
                rows.append(row)
    if rows:
        return Matrix.from_rows(F, rows)
    return Matrix(F, 0, n)


def _unpack_hom_vector(v: Rep, w: Rep, col: Matrix) -> RepMorphism:
    offs, _ = _hom_offsets(v, w)
    comps = []
    for x in range(v.quiver.vertex_count):
        r, c = w.dims[x], v.dims[x]
        entries = [col.entry(offs[x] + i, 0) for i in range(r * c)]
        comps.append(Matrix(v.field, r, c, entries))
    return RepMorphism(v, w, comps, check=False)


def _vec_morphism(f: RepMorphism) -> Matrix:
    entries = []
    for c in f.components:
        entries.extend(c._e)
    return Matrix(f.source.field, len(entries), 1, entries)


def hom_basis(v: Rep, w: Rep):
    """Deterministic basis of Hom(v, w) as a list of morphisms."""
    ker = _hom_system(v, w).kernel_basis()
    return [_unpack_hom_vector(v, w, ker.take_cols([j])) for j in range(ker.cols)]


def hom_dim(v: Rep, w: Rep) -> int:
    a = _hom_system(v, w)
    return a.cols - a.rank()


def _ext_row_layout(v: Rep, w: Rep):
    """Offsets of the per-arrow blocks inside the cocycle coordinate space."""
    offs = {}
    n = 0
    for a in v.quiver.arrows:
        offs[a.id] = n
        n += w.dims[a.target] * v.dims[a.source]
    return offs, n


def ext1_basis(v: Rep, w: Rep):
    """Basis of Ext^1(v, w) as cocycles: dicts mapping arrow ids to matrices
    g_a of shape w.dims[t] x v.dims[s].

    Representatives are the standard-basis cocycles at the coordinates not
    hit by the coboundary image (the non-pivot coordinates of the reduced
    image span), so the output is canonical.
    """
    F = v.field
    a = _hom_system(v, w)
    _, piv = a.transpose().rref()
    pivot_set = set(piv)
    offs, total = _ext_row_layout(v, w)
    out = []
    for r in range(total):
        if r in pivot_set:
            continue
        blocks = {}
        for arr in v.quiver.arrows:
            rows_, cols_ = w.dims[arr.target], v.dims[arr.source]
            base = offs[arr.id]
            entries = [F.one if base + k == r else F.zero for k in range(rows_ * cols_)]
            blocks[arr.id] = Matrix(F, rows_, cols_, entries)
        out.append(blocks)
    return out


def ext1_dim(v: Rep, w: Rep) -> int:
    a = _hom_system(v, w)
    return a.rows - a.rank()


def euler_form(v: Rep, w: Rep) -> int:
    """sum_x v_x w_x - sum_a v_s(a) w_t(a); equals dim Hom - dim Ext^1."""
    total = sum(vd * wd for vd, wd in zip(v.dims, w.dims))
    for a in v.quiver.arrows:
        total -= v.dims[a.source] * w.dims[a.target]
    return total


def _vec_cocycle(v: Rep, w: Rep, blocks) -> Matrix:
    offs, total = _ext_row_layout(v, w)
    F = v.field
    entries = [F.zero] * total
    for a in v.quiver.arrows:
        m = blocks.get(a.id)
        if m is None:
            continue
        base = offs[a.id]
        for k, val in enumerate(m._e):
            entries[base + k] = val
    return Matrix(F, total, 1, entries)


def cocycles_equivalent(v: Rep, w: Rep, c1, c2) -> bool:
    """Whether two cocycles differ by a coboundary, i.e. define the same
    extension class."""
    diff = _vec_cocycle(v, w, c1) - _vec_cocycle(v, w, c2)
    return _hom_system(v, w).solve(diff) is not None


def extension_from_cocycle(v: Rep, w: Rep, cocycle) -> ShortExactSeq:
    """The extension 0 -> w -> E -> v -> 0 with E_a = [[w_a, g_a], [0, v_a]]
    in the block decomposition E_x = w_x + v_x (sub first). Arrows missing
    from the cocycle contribute a zero block."""
    if v.quiver != w.quiver or v.field != w.field:
        raise FieldMismatchError("extension needs a common quiver and field")
    F = v.field
    q = v.quiver
    dims = [w.dims[x] + v.dims[x] for x in range(q.vertex_count)]
    maps = {}
    for a in q.arrows:
        s, t = a.source, a.target
        g = cocycle.get(a.id)
        if g is None:
            g = Matrix.zeros(F, w.dims[t], v.dims[s])
        if (g.rows, g.cols) != (w.dims[t], v.dims[s]):
            raise ShapeError(f"cocycle block {a.id} has shape {g.rows}x{g.cols}")
        top = hstack([w.map(a.id), g])
        bot = hstack([Matrix.zeros(F, v.dims[t], w.dims[s]), v.map(a.id)])
        maps[a.id] = vstack([top, bot])
    mid = Rep(q, F, dims, maps)
    i_comps = [
        vstack([Matrix.identity(F, w.dims[x]), Matrix.zeros(F, v.dims[x], w.dims[x])])
        for x in range(q.vertex_count)
    ]
    p_comps = [
        hstack([Matrix.zeros(F, v.dims[x], w.dims[x]), Matrix.identity(F, v.dims[x])])
        for x in range(q.vertex_count)
    ]
    i = RepMorphism(w, mid, i_comps)
    p = RepMorphism(mid, v, p_comps)
    return ShortExactSeq(i, p)


def ses_class_cocycle(s: ShortExactSeq):
    """A cocycle representing the class of a verified short exact sequence
    0 -> sub -> mid -> quot -> 0, extracted from vertexwise splittings."""
    F = s.mid.field
    q = s.mid.quiver
    sections = []
    retractions = []
    for x in range(q.vertex_count):
        px = s.p.component(x)
        ix = s.i.component(x)
        sec = px.solve(Matrix.identity(F, px.rows))
        if sec is None:
            raise ApproxcatError("not vertexwise surjective; run ses_verify first")
        ret_t = ix.transpose().solve(Matrix.identity(F, ix.cols))
        if ret_t is None:
            raise ApproxcatError("not vertexwise injective; run ses_verify first")
        sections.append(sec)
        retractions.append(ret_t.transpose())
    blocks = {}
    for a in q.arrows:
        sx, tx = a.source, a.target
        za, va = s.mid.map(a.id), s.quot.map(a.id)
        blocks[a.id] = retractions[tx] @ (za @ sections[sx] - sections[tx] @ va)
    return blocks


# kernels, cokernels, images, sums


def kernel(f: RepMorphism):
    """(K, incl) with incl: K -> source the kernel of f."""
    v = f.source
    q, F = v.quiver, v.field
    bases = [f.component(x).kernel_basis() for x in range(q.vertex_count)]
    dims = [b.cols for b in bases]
    maps = {}
    for a in q.arrows:
        rhs = v.map(a.id) @ bases[a.source]
        ka = bases[a.target].solve(rhs)
        if ka is None:
            raise ApproxcatError("kernel is not arrow-stable; naturality broken")
        maps[a.id] = ka
    k = Rep(q, F, dims, maps)
    incl = RepMorphism(k, v, bases)
    return k, incl


def cokernel(f: RepMorphism):
    """(C, proj) with proj: target -> C the cokernel of f. The projection
    rows are the canonical left-kernel basis of each component, so equal
    inputs give literally equal cokernels."""
    w = f.target
    q, F = w.quiver, w.field
    projs = [f.component(x).transpose().kernel_basis().transpose() for x in range(q.vertex_count)]
    dims = [p.rows for p in projs]
    maps = {}
    for a in q.arrows:
        lhs_t = projs[a.source].transpose()
        rhs_t = (projs[a.target] @ w.map(a.id)).transpose()
        ca_t = lhs_t.solve(rhs_t)
        if ca_t is None:
            raise ApproxcatError("cokernel maps are not induced; naturality broken")
        maps[a.id] = ca_t.transpose()
    c = Rep(q, F, dims, maps)
    proj = RepMorphism(w, c, projs)
    return c, proj


def image(f: RepMorphism):
    """(I, incl, proj): the image of f with incl: I -> target injective and
    proj: source -> I surjective, f == incl after proj."""
    q, F = f.source.quiver, f.source.field
    incls = [f.component(x).image_basis() for x in range(q.vertex_count)]
    dims = [b.cols for b in incls]
    maps = {}
    for a in q.arrows:
        rhs = f.target.map(a.id) @ incls[a.source]
        ia = incls[a.target].solve(rhs)
        if ia is None:
            raise ApproxcatError("image is not arrow-stable; naturality broken")
        maps[a.id] = ia
    im = Rep(q, F, dims, maps)
    incl = RepMorphism(im, f.target, incls)
    projs = [incls[x].solve(f.component(x)) for x in range(q.vertex_count)]
    proj = RepMorphism(f.source, im, projs)
    return im, incl, proj


def direct_sum(reps, quiver: Quiver | None = None, field: FieldSpec | None = None):
    """(S, injections, projections). An empty list needs explicit quiver
    and field and yields the zero representation."""
    reps = list(reps)
    if not reps:
        if quiver is None or field is None:
            raise ShapeError("empty direct sum needs quiver and field")
        return Rep.zero(quiver, field), [], []
    q, F = reps[0].quiver, reps[0].field
    for r in reps[1:]:
        if r.quiver != q or r.field != F:
            raise FieldMismatchError("direct sum needs a common quiver and field")
    dims = [sum(r.dims[x] for r in reps) for x in range(q.vertex_count)]
    maps = {a.id: block_diag(F, [r.map(a.id) for r in reps]) for a in q.arrows}
    s = Rep(q, F, dims, maps)
    injections = []
    projections = []
    offsets = [[0] * len(reps) for _ in range(q.vertex_count)]
    for x in range(q.vertex_count):
        acc = 0
        for i, r in enumerate(reps):
            offsets[x][i] = acc
            acc += r.dims[x]
    for i, r in enumerate(reps):
        inj_comps = []
        proj_comps = []
        for x in range(q.vertex_count):
            n, d, off = dims[x], r.dims[x], offsets[x][i]
            inj = Matrix.zeros(F, n, d).to_lists()
            for j in range(d):
                inj[off + j][j] = F.one
            inj_comps.append(Matrix.from_rows(F, inj) if n else Matrix(F, 0, d))
            proj = Matrix.zeros(F, d, n).to_lists()
            for j in range(d):
                proj[j][off + j] = F.one
            proj_comps.append(Matrix.from_rows(F, proj) if d else Matrix(F, 0, n))
        injections.append(RepMorphism(r, s, inj_comps, check=False))
        projections.append(RepMorphism(s, r, proj_comps, check=False))
    return s, injections, projections


# exactness, splitting, pushout


def ses_verify(s: ShortExactSeq) -> bool:
    """Exactness of 0 -> sub -> mid -> quot -> 0: i injective, p surjective,
    p after i zero, and dims sub + quot = mid vertexwise (which then forces
    im(i) = ker(p))."""
    if not s.i.is_injective():
        return False
    if not s.p.is_surjective():
        return False
    if not compose(s.p, s.i).is_zero():
        return False
    for x in range(s.mid.quiver.vertex_count):
        if s.sub.dims[x] + s.quot.dims[x] != s.mid.dims[x]:
            return False
    return True


def is_split(s: ShortExactSeq):
    """A section sigma: quot -> mid with p sigma = id, or None. Found by
    solving for coefficients over a basis of Hom(quot, mid), so sigma is a
    genuine morphism, not just a vertexwise splitting."""
    basis = hom_basis(s.quot, s.mid)
    idv = _vec_morphism(RepMorphism.identity(s.quot))
    if not basis:
        return None if idv.rows and not idv.is_zero() else RepMorphism.zero(s.quot, s.mid)
    cols = [_vec_morphism(compose(s.p, b)) for b in basis]
    a = hstack(cols)
    sol = a.solve(idv)
    if sol is None:
        return None
    sigma = RepMorphism.zero(s.quot, s.mid)
    for j, b in enumerate(basis):
        c = sol.entry(j, 0)
        if c != 0:
            sigma = sigma + b.scale(c)
    return sigma


def pushout(f: RepMorphism, g: RepMorphism):
    """Pushout of A <-f- K -g-> B: returns (Z, a, b) with a: A -> Z,
    b: B -> Z, a f = b g, computed as the cokernel of (f, -g): K -> A + B."""
    if f.source != g.source:
        raise ShapeError("pushout legs need a common source")
    A, B = f.target, g.target
    s, injs, _ = direct_sum([A, B])
    comps = [
        vstack([f.component(x), g.component(x).scale(-1)])
        for x in range(A.quiver.vertex_count)
    ]
    h = RepMorphism(f.source, s, comps, check=False)
    z, proj = cokernel(h)
    a = compose(proj, injs[0])
    b = compose(proj, injs[1])
    return z, a, b


def factor_through_cokernel(proj: RepMorphism, u: RepMorphism) -> RepMorphism:
    """Given a surjection proj: S -> Z and u: S -> T that kills ker(proj),
    the unique w: Z -> T with w proj = u."""
    comps = []
    for x in range(proj.source.quiver.vertex_count):
        sol_t = proj.component(x).transpose().solve(u.component(x).transpose())
        if sol_t is None:
            raise ApproxcatError("morphism does not kill the kernel of the projection")
        comps.append(sol_t.transpose())
    return RepMorphism(proj.target, u.target, comps)


# projectives (acyclic quivers only)


def projective(quiver: Quiver, field: FieldSpec, vertex: int) -> Rep:
    """The projective at a vertex: basis at x is the set of paths
    vertex -> x, arrows act by appending. Needs an acyclic quiver, otherwise
    there are infinitely many paths."""
    if not quiver.is_acyclic:
        raise NonAcyclicQuiverError("projectives need an acyclic quiver")
    paths = quiver.paths_from(vertex)
    basis = {x: [] for x in range(quiver.vertex_count)}
    for p, end in paths:
        basis[end].append(p)
    index = {x: {p: i for i, p in enumerate(basis[x])} for x in basis}
    dims = [len(basis[x]) for x in range(quiver.vertex_count)]
    maps = {}
    for a in quiver.arrows:
        m = Matrix.zeros(field, dims[a.target], dims[a.source]).to_lists()
        for p in basis[a.source]:
            m[index[a.target][p + (a.id,)]][index[a.source][p]] = field.one
        maps[a.id] = (
            Matrix.from_rows(field, m) if dims[a.target] else Matrix(field, 0, dims[a.source])
        )
    return Rep(quiver, field, dims, maps)


def _path_eval(m: Rep, path) -> Matrix:
    """Compose arrow maps along a path (start vertex inferred by caller)."""
    if not path:
        raise ShapeError("empty path has no anchored evaluation here")
    first = m.quiver.arrow(path[0])
    acc = Matrix.identity(m.field, m.dims[first.source])
    for aid in path:
        acc = m.map(aid) @ acc
    return acc


def projective_epi(m: Rep):
    """(P, pi) with P projective and pi: P -> m surjective. P is the sum
    over vertices i of projective(i)^dims m_i; pi evaluates paths on m."""
    q, F = m.quiver, m.field
    if not q.is_acyclic:
        raise NonAcyclicQuiverError("projective cover needs an acyclic quiver")
    projs = {i: projective(q, F, i) for i in range(q.vertex_count) if m.dims[i]}
    summands = [(i, b) for i in range(q.vertex_count) for b in range(m.dims[i])]
    if not summands:
        z = Rep.zero(q, F)
        return z, RepMorphism.zero(z, m)
    p, _, _ = direct_sum([projs[i] for i, _ in summands])
    path_basis = {}
    for i in projs:
        by_vertex = {x: [] for x in range(q.vertex_count)}
        for pth, end in q.paths_from(i):
            by_vertex[end].append(pth)
        path_basis[i] = by_vertex
    comps = []
    for j in range(q.vertex_count):
        cols = []
        for i, b in summands:
            for pth in path_basis[i][j]:
                if pth:
                    val = _path_eval(m, pth)
                else:
                    val = Matrix.identity(F, m.dims[i])
                cols.append(val.take_cols([b]))
        comps.append(hstack(cols) if cols else Matrix(F, m.dims[j], 0))
    pi = RepMorphism(p, m, comps)
    return p, pi


def yoneda_dim_check(quiver: Quiver, field: FieldSpec, vertex: int, m: Rep) -> bool:
    """dim Hom(P(vertex), m) must equal dims m[vertex]."""
    return hom_dim(projective(quiver, field, vertex), m) == m.dims[vertex]


# subrepresentations


def subrep_stable(rep: Rep, bases) -> bool:
    """Whether per-vertex column spans are closed under the arrow maps."""
    for a in rep.quiver.arrows:
        got = rep.map(a.id) @ bases[a.source]
        if bases[a.target].solve(got) is None:
            return False
    return True


def subrep_from_bases(rep: Rep, bases):
    """(U, incl) for an arrow-stable family of full-column-rank bases."""
    q, F = rep.quiver, rep.field
    dims = [b.cols for b in bases]
    maps = {}
    for a in rep.quiver.arrows:
        ua = bases[a.target].solve(rep.map(a.id) @ bases[a.source])
        if ua is None:
            raise ShapeError("bases are not arrow-stable")
        maps[a.id] = ua
    u = Rep(q, F, dims, maps)
    return u, RepMorphism(u, rep, bases)


def preimage_subrep(f: RepMorphism, incl: RepMorphism):
    """(U, incl') with U = f^-1 of the subrepresentation incl: W0 -> target,
    as a subrepresentation of the source."""
    if incl.target != f.target:
        raise ShapeError("preimage needs a subrepresentation of the target")
    bases = []
    for x in range(f.source.quiver.vertex_count):
        q_x = incl.component(x).transpose().kernel_basis().transpose()
        bases.append((q_x @ f.component(x)).kernel_basis())
    return subrep_from_bases(f.source, bases)


# isomorphism testing


def iso_test(v: Rep, w: Rep):
    """An isomorphism v -> w, or None when provably none exists.

    Procedure: compare dimension vectors; try cheap candidates (structural
    equality, single basis morphisms, a fixed number of seeded random
    combinations); then decide completely, either by enumerating the finite
    hom space (prime field, at most 2^16 elements) or by evaluating the
    product of component determinants on an integer grid large enough to
    detect the zero polynomial (rationals, hom dimension at most 4). Raises
    IsoInconclusiveError when neither complete method is in budget, never
    returning an unsound None.
    """
    if v.quiver != w.quiver or v.field != w.field:
        raise FieldMismatchError("iso_test needs a common quiver and field")
    if v.dims != w.dims:
        return None
    if v.total_dim == 0:
        return RepMorphism.zero(v, w)
    if v == w:
        return RepMorphism.identity(v)
    F = v.field
    basis = hom_basis(v, w)
    h = len(basis)
    if h == 0:
        return None
    for b in basis:
        if b.is_iso():
            return b

    def combo(coeffs):
        m = None
        for c, b in zip(coeffs, basis):
            if c == 0:
                continue
            term = b.scale(c)
            m = term if m is None else m + term
        return m

    rng = random.Random(0xA11CE)
    for _ in range(48):
        if F.kind == "prime_field":
            coeffs = [rng.randrange(F.modulus) for _ in range(h)]
        else:
            coeffs = [rng.randrange(-3, 4) for _ in range(h)]
        m = combo(coeffs)
        if m is not None and m.is_iso():
            return m

    if F.kind == "prime_field":
        if F.modulus ** h <= 2 ** 16:
            for coeffs in itertools.product(range(F.modulus), repeat=h):
                m = combo(coeffs)
                if m is not None and m.is_iso():
                    return m
            return None
        raise IsoInconclusiveError(
            f"hom space of size {F.modulus}^{h} exceeds the exhaustive bound"
        )
    # rationals: det of a coefficient combination is a polynomial of
    # per-variable degree <= total_dim, so vanishing on {0..total_dim}^h
    # means it is identically zero and no combination is invertible
    d = v.total_dim
    if h <= 4 and (d + 1) ** h <= 2 ** 16:
        for coeffs in itertools.product(range(d + 1), repeat=h):
            m = combo(coeffs)
            if m is not None and m.is_iso():
                return m
        return None
    raise IsoInconclusiveError(f"rational iso search infeasible for hom dimension {h}")
