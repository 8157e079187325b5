"""Refutation machinery on the loop-and-exit quiver.

The stage is a quiver with loops alpha1..alphaN at vertex 0 and a single
exit arrow beta from vertex 0 to vertex 1. On it live the two vertex
simples S1 and S2, the module M of dims (1, 1) with zero loop action and
identity exit map, and for each loop index i0 a module W(i0) of dims (2, 1)
whose chosen loop feeds the exit-supported basis vector into the kernel of
the exit map.

Every member of add{S1} * add{M} is surjective along beta, and any morphism
from such a member V into W(i0) must vanish at vertex 1 once the loop i0
acts by zero on V: naturality for the loop pins the vertex-0 image inside
ker W_beta, so the vertex-1 component dies against the surjectivity. Since
Hom(S2, W(i0)) is one-dimensional and nonzero, no morphism S2 -> V can be a
left approximation into the extension category: the nonzero map into W(i0)
is unreachable. refute packages that argument, checked by direct matrix
computation, into a per-candidate witness.

The truncation level N is part of the configuration. A representation
built at level N embeds at any higher level by zero maps on the new loops;
refute escalates by one level, once, when every truncated loop is in use.
"""

import random
from dataclasses import dataclass

from .approx import (
    AddCategory,
    AddEvidence,
    ExtCategory,
    ExtEvidence,
    Evidence,
    factor_through,
    member_add,
    verify_evidence,
)
from .errors import (
    ApproxcatError,
    CertificateError,
    FieldMismatchError,
    NoFreeLoopError,
    ShapeError,
)
from .fields import FieldSpec, PRIME
from .matrix import Matrix
from .quiver import Quiver
from .rep import (
    Rep,
    RepMorphism,
    ShortExactSeq,
    compose,
    ext1_basis,
    extension_from_cocycle,
    hom_basis,
    hom_dim,
)


def _loop_ids(n_loops: int):
    return [f"alpha{i}" for i in range(1, n_loops + 1)]


@dataclass(frozen=True)
class LoopQuiverConfig:
    """Truncation level and scalar field for the loop-and-exit quiver."""

    n_loops: int
    field: FieldSpec

    def __post_init__(self):
        if self.n_loops < 1:
            raise ShapeError("at least one loop is required")

    def quiver(self) -> Quiver:
        arrows = [(a, 0, 0) for a in _loop_ids(self.n_loops)]
        arrows.append(("beta", 0, 1))
        return Quiver(2, arrows)

    def loop_ids(self):
        return _loop_ids(self.n_loops)

    @staticmethod
    def of_rep(rep: Rep) -> "LoopQuiverConfig":
        """The configuration whose quiver carries rep, validated."""
        n = len(rep.quiver.arrows) - 1
        if n < 1:
            raise ShapeError("not a loop-and-exit quiver")
        cfg = LoopQuiverConfig(n, rep.field)
        if cfg.quiver() != rep.quiver:
            raise ShapeError("not a loop-and-exit quiver")
        return cfg


def build_standard(cfg: LoopQuiverConfig):
    """(S1, S2, M): the vertex simples and the dims (1, 1) module with all
    loops acting by zero and the exit arrow by the identity."""
    q = cfg.quiver()
    F = cfg.field
    s1 = Rep.simple(q, F, 0)
    s2 = Rep.simple(q, F, 1)
    maps = {a: Matrix.zeros(F, 1, 1) for a in cfg.loop_ids()}
    maps["beta"] = Matrix.identity(F, 1)
    m = Rep(q, F, [1, 1], maps)
    return s1, s2, m


def build_W(cfg: LoopQuiverConfig, i0: int) -> Rep:
    """dims (2, 1): loop i0 sends e1 to e2, every other loop acts by zero,
    and the exit arrow sends e1 to the basis vector and kills e2."""
    if not 1 <= i0 <= cfg.n_loops:
        raise ShapeError(f"loop index {i0} outside 1..{cfg.n_loops}")
    q = cfg.quiver()
    F = cfg.field
    maps = {a: Matrix.zeros(F, 2, 2) for a in cfg.loop_ids()}
    maps[f"alpha{i0}"] = Matrix(F, 2, 2, [0, 0, 1, 0])
    maps["beta"] = Matrix(F, 1, 2, [1, 0])
    return Rep(q, F, [2, 1], maps)


def standard_handle(cfg: LoopQuiverConfig) -> ExtCategory:
    """add{S1} * add{M} on the configured quiver."""
    s1, _, m = build_standard(cfg)
    return ExtCategory(AddCategory([s1]), AddCategory([m]))


def w_membership(cfg: LoopQuiverConfig, i0: int) -> ExtEvidence:
    """The short exact sequence 0 -> S1 -> W(i0) -> M -> 0, with add
    evidence at both ends: the sub is the second coordinate line at vertex
    0, which every arrow kills."""
    s1, _, m = build_standard(cfg)
    w = build_W(cfg, i0)
    F = cfg.field
    i = RepMorphism(s1, w, [Matrix(F, 2, 1, [0, 1]), Matrix(F, 1, 0)])
    p = RepMorphism(w, m, [Matrix(F, 1, 2, [1, 0]), Matrix.identity(F, 1)])
    sub_ev = member_add(s1, AddCategory([s1]))
    quot_ev = member_add(m, AddCategory([m]))
    if sub_ev is None or quot_ev is None:
        raise ApproxcatError("generators must certify against themselves")
    return ExtEvidence(ShortExactSeq(i, p), sub_ev, quot_ev)


def beta_surjectivity_check(z: Rep, evidence: Evidence) -> bool:
    """Whether the exit map of a certified member covers all of vertex 1.

    The evidence is re-verified first and rejected loudly when it does not
    hold up; on a valid certificate the answer is always True, because both
    S1-powers (nothing at vertex 1) and M-powers (identity exit map) have
    the property and it passes to extensions.
    """
    if evidence is None:
        raise CertificateError("membership evidence is required")
    cfg = LoopQuiverConfig.of_rep(z)
    if not verify_evidence(evidence, z, standard_handle(cfg)):
        raise CertificateError("membership evidence does not verify")
    return z.map("beta").rank() == z.dims[1]


def choose_i0(v: Rep) -> int:
    """The smallest 1-based loop index acting by zero on v."""
    cfg = LoopQuiverConfig.of_rep(v)
    for i, aid in enumerate(cfg.loop_ids(), start=1):
        if v.map(aid).is_zero():
            return i
    raise NoFreeLoopError(
        f"all {cfg.n_loops} truncated loops act nonzero; "
        "re-embed at a higher truncation level"
    )


def embed_rep(rep: Rep, cfg: LoopQuiverConfig) -> Rep:
    """The same representation over the level-cfg quiver; new loops act by
    zero."""
    src = LoopQuiverConfig.of_rep(rep)
    if rep.field != cfg.field:
        raise FieldMismatchError(f"{rep.field.label} vs {cfg.field.label}")
    if src.n_loops > cfg.n_loops:
        raise ShapeError("cannot embed into a smaller truncation")
    known = set(src.loop_ids())
    known.add("beta")
    F = cfg.field
    maps = {}
    for a in cfg.quiver().arrows:
        if a.id in known:
            maps[a.id] = rep.map(a.id)
        else:
            maps[a.id] = Matrix.zeros(F, rep.dims[a.target], rep.dims[a.source])
    return Rep(cfg.quiver(), F, list(rep.dims), maps)


def embed_morphism(f: RepMorphism, cfg: LoopQuiverConfig) -> RepMorphism:
    return RepMorphism(
        embed_rep(f.source, cfg), embed_rep(f.target, cfg), f.components
    )


def embed_evidence(ev: Evidence, cfg: LoopQuiverConfig) -> Evidence:
    """Membership evidence transported to a higher truncation level.

    Zero maps on the new loops keep every naturality square and every
    canonical sum literally intact, so components carry over unchanged.
    """
    if isinstance(ev, AddEvidence):
        return AddEvidence(ev.multiplicities, embed_morphism(ev.iso, cfg))
    return ExtEvidence(
        ShortExactSeq(embed_morphism(ev.ses.i, cfg), embed_morphism(ev.ses.p, cfg)),
        embed_evidence(ev.sub_evidence, cfg),
        embed_evidence(ev.quot_evidence, cfg),
    )


@dataclass(frozen=True)
class RefutationWitness:
    """Proof that a candidate S2 -> V is not a left approximation into
    add{S1} * add{M}: a certified member W = W(i0), the nonzero map
    S2 -> W spanning the one-dimensional hom space, and the vanishing of
    every composite of the candidate with a morphism V -> W. Since
    composition with the candidate is linear, that vanishing puts the
    nonzero map outside its image."""

    candidate: RepMorphism
    i0: int
    w: Rep
    w_evidence: ExtEvidence
    nonzero_target_map: RepMorphism
    vanishing_proof: tuple
    escalated: bool
    config: LoopQuiverConfig

    def verify(self) -> bool:
        cfg = self.config
        try:
            if self.w != build_W(cfg, self.i0):
                return False
        except (ShapeError, ApproxcatError):
            return False
        s1, s2, m = build_standard(cfg)
        if self.candidate.source != s2:
            return False
        try:
            RepMorphism(
                self.candidate.source, self.candidate.target, self.candidate.components
            )
        except (ShapeError, FieldMismatchError):
            return False
        v = self.candidate.target
        if not v.map(f"alpha{self.i0}").is_zero():
            return False
        if not verify_evidence(self.w_evidence, self.w, standard_handle(cfg)):
            return False
        g = self.nonzero_target_map
        if g.source != s2 or g.target != self.w or g.is_zero():
            return False
        try:
            RepMorphism(g.source, g.target, g.components)
        except (ShapeError, FieldMismatchError):
            return False
        if hom_dim(s2, self.w) != 1:
            return False
        basis = hom_basis(v, self.w)
        if len(self.vanishing_proof) != len(basis):
            return False
        for f, c in self.vanishing_proof:
            if f.source != v or f.target != self.w:
                return False
            try:
                RepMorphism(f.source, f.target, f.components)
            except (ShapeError, FieldMismatchError):
                return False
            if not c.is_zero() or not compose(f, self.candidate).is_zero():
                return False
        for f in basis:
            if not compose(f, self.candidate).is_zero():
                return False
        return factor_through(g, self.candidate) is None


def refute(phi: RepMorphism, evidence: Evidence) -> RefutationWitness:
    """A witness that phi: S2 -> V is not a left approximation into
    add{S1} * add{M}, given membership evidence for V.

    Verifies the evidence, picks the smallest loop index acting by zero on
    V (escalating the truncation once when every loop is used), builds W at
    that index, checks by direct computation that every composite of phi
    with a morphism V -> W vanishes, and returns the nonzero map S2 -> W
    the candidate fails to reach.
    """
    cfg = LoopQuiverConfig.of_rep(phi.source)
    s1, s2, m = build_standard(cfg)
    if phi.source != s2:
        raise ShapeError("the candidate must start at the vertex-1 simple")
    if evidence is None:
        raise CertificateError("membership evidence for the target is required")
    v = phi.target
    if not verify_evidence(evidence, v, standard_handle(cfg)):
        raise CertificateError("membership evidence does not verify")
    escalated = False
    try:
        i0 = choose_i0(v)
    except NoFreeLoopError:
        cfg = LoopQuiverConfig(cfg.n_loops + 1, cfg.field)
        phi = embed_morphism(phi, cfg)
        v = phi.target
        evidence = embed_evidence(evidence, cfg)
        if not verify_evidence(evidence, v, standard_handle(cfg)):
            raise CertificateError("re-embedded evidence does not verify")
        s2 = build_standard(cfg)[1]
        escalated = True
        i0 = choose_i0(v)
    w = build_W(cfg, i0)
    proof = []
    for f in hom_basis(v, w):
        c = compose(f, phi)
        if not c.is_zero():
            raise CertificateError(
                "a composite against the candidate does not vanish; "
                "the membership evidence is unsound"
            )
        proof.append((f, c))
    g_basis = hom_basis(s2, w)
    if len(g_basis) != 1 or g_basis[0].is_zero():
        raise ApproxcatError("the hom space into W must be a nonzero line")
    g = g_basis[0]
    if factor_through(g, phi) is not None:
        raise CertificateError("the target map factors; nothing to refute")
    return RefutationWitness(
        candidate=phi,
        i0=i0,
        w=w,
        w_evidence=w_membership(cfg, i0),
        nonzero_target_map=g,
        vanishing_proof=tuple(proof),
        escalated=escalated,
        config=cfg,
    )


def assemble_member(cfg: LoopQuiverConfig, s1_mult: int, m_mult: int, coefficients):
    """(member, evidence): the extension of M^m_mult by S1^s1_mult along the
    cocycle with the given coefficient list over the standard basis of
    Ext1(M^m_mult, S1^s1_mult)."""
    s1, _, m = build_standard(cfg)
    handle = standard_handle(cfg)
    sub, _ = handle.left.canonical_sum((s1_mult,))
    quot, _ = handle.right.canonical_sum((m_mult,))
    basis = ext1_basis(quot, sub)
    if len(coefficients) != len(basis):
        raise ShapeError(f"{len(basis)} cocycle coefficients required")
    F = cfg.field
    cocycle = {}
    for a in cfg.quiver().arrows:
        block = Matrix.zeros(F, sub.dims[a.target], quot.dims[a.source])
        for c, elt in zip(coefficients, basis):
            if c != 0:
                block = block + elt[a.id].scale(F.coerce(c))
        cocycle[a.id] = block
    ses = extension_from_cocycle(quot, sub, cocycle)
    sub_ev = AddEvidence((s1_mult,), RepMorphism.identity(sub))
    quot_ev = AddEvidence((m_mult,), RepMorphism.identity(quot))
    return ses.mid, ExtEvidence(ses, sub_ev, quot_ev)


def sample_members(cfg: LoopQuiverConfig, count: int, max_total_dim: int = 6,
                   seed: int = 0):
    """A deterministic stream of certified members: multiplicities and
    cocycle coefficients are drawn from a seeded generator, one derived
    seed per sample."""
    if cfg.field.kind != PRIME:
        raise ShapeError("sampling needs a prime field")
    p = cfg.field.modulus
    shapes = [
        (a, b)
        for a in range(max_total_dim + 1)
        for b in range(max_total_dim // 2 + 1)
        if a + 2 * b <= max_total_dim
    ]
    s1, _, m = build_standard(cfg)
    handle = standard_handle(cfg)
    out = []
    for idx in range(count):
        rng = random.Random(seed * 1000003 + idx)
        a, b = shapes[rng.randrange(len(shapes))]
        sub, _ = handle.left.canonical_sum((a,))
        quot, _ = handle.right.canonical_sum((b,))
        coeffs = [rng.randrange(p) for _ in range(len(ext1_basis(quot, sub)))]
        out.append(assemble_member(cfg, a, b, coeffs))
    return out


def candidate_maps(v: Rep):
    """Every morphism S2 -> v, the zero map included: all coefficient
    tuples over the hom basis."""
    cfg = LoopQuiverConfig.of_rep(v)
    if cfg.field.kind != PRIME:
        raise ShapeError("candidate sweeps need a prime field")
    s2 = build_standard(cfg)[1]
    basis = hom_basis(s2, v)
    p = cfg.field.modulus
    out = []

    def walk(j, acc):
        if j == len(basis):
            phi = RepMorphism.zero(s2, v)
            for c, b in zip(acc, basis):
                if c != 0:
                    phi = phi + b.scale(cfg.field.coerce(c))
            out.append(phi)
            return
        for c in range(p):
            walk(j + 1, acc + [c])

    walk(0, [])
    return out
