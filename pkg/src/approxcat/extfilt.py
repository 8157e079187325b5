"""Extension categories and filtration categories.

member_ext decides membership in x*y (objects with a subrepresentation in
x whose quotient lies in y) by exhaustive subrepresentation search over a
prime field. member_filt decides membership in F_r(S), the r-fold
extension closure of add(S), by peeling an add(S) bottom layer from m and
recursing on the quotient; the minimal usable depth per representation is
memoized, which is what keeps large exhaustive sweeps affordable.

filt_exchange swaps two adjacent filtration factors when the obstructing
Ext group vanishes, and filt_normalize applies the exchange as a bubble
sort to bring any filtration certificate over an ordered family
(X_1, ..., X_n) with Ext1(X_i, X_j) = 0 for i <= j into the normal form
with at most n layers, each a direct sum of copies of a single X_i.

fr_enumerate builds F_r(S) within a dimension bound bottom-up from
extension cocycles; it is an independent oracle for member_filt.
"""

import itertools
from dataclasses import dataclass
from typing import Optional

from .approx import AddCategory, ExtCategory, ExtEvidence, member_add, verify_evidence
from .errors import (
    ApproxcatError,
    BudgetExceededError,
    CertificateError,
    ExtObstructionError,
    FieldMismatchError,
    HypothesisViolationError,
    RationalFieldUnsupportedError,
    ShapeError,
)
from .fields import PRIME
from .matrix import Matrix, vstack
from .rep import (
    Filtration,
    Rep,
    RepMorphism,
    ShortExactSeq,
    cokernel,
    compose,
    direct_sum,
    ext1_basis,
    ext1_dim,
    extension_from_cocycle,
    factor_through_cokernel,
    image,
    is_split,
    iso_test,
    preimage_subrep,
    ses_verify,
    subrep_from_bases,
)
from .search import (
    Budget,
    SubrepSearch,
    _compositions,
    _require_prime,
    default_budget,
    subspace_table,
)


class OrderedFamily:
    """An ordered list of representations X_1, ..., X_n. The order carries
    the normalization hypothesis Ext1(X_i, X_j) = 0 for i <= j; membership
    tests use the members as a plain generator set."""

    __slots__ = ("members", "quiver", "field")

    def __init__(self, members, quiver=None, field=None):
        members = tuple(members)
        if members:
            quiver = members[0].quiver
            field = members[0].field
            for m in members:
                if m.quiver != quiver or m.field != field:
                    raise FieldMismatchError("family members live over different quivers or fields")
        elif quiver is None or field is None:
            raise ShapeError("an empty family needs an explicit quiver and field")
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "quiver", quiver)
        object.__setattr__(self, "field", field)

    def __setattr__(self, name, value):
        raise AttributeError("OrderedFamily is immutable")

    def __len__(self):
        return len(self.members)

    def __getitem__(self, i):
        return self.members[i]

    def add_handle(self) -> AddCategory:
        return AddCategory(self.members, quiver=self.quiver, field=self.field)

    def key(self):
        return ("family", self.quiver.key(), self.field.label,
                tuple(m.key() for m in self.members))

    def __eq__(self, other):
        return isinstance(other, OrderedFamily) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"OrderedFamily({[m.dims for m in self.members]})"


def _as_family(s) -> OrderedFamily:
    if isinstance(s, OrderedFamily):
        return s
    if isinstance(s, AddCategory):
        return OrderedFamily(s.generators, quiver=s.quiver, field=s.field)
    return OrderedFamily(s)


@dataclass(frozen=True)
class FiltrationCertificate:
    """A filtration of member together with per-factor evidence that each
    cokernel of consecutive steps lies in add of the family."""

    filtration: Filtration
    member: Rep
    family: OrderedFamily
    factor_assignments: tuple

    @property
    def depth(self) -> int:
        return self.filtration.depth

    def verify(self) -> bool:
        filt = self.filtration
        try:
            Filtration(filt.steps)
        except (ShapeError, FieldMismatchError):
            return False
        if filt.top != self.member:
            return False
        if len(self.factor_assignments) != filt.depth:
            return False
        handle = self.family.add_handle()
        for j, ev in enumerate(self.factor_assignments):
            if not verify_evidence(ev, filt.factor(j), handle):
                return False
        return True


# membership in x*y


def _member_handle(rep: Rep, handle, budget: Budget):
    if isinstance(handle, AddCategory):
        return member_add(rep, handle)
    if isinstance(handle, ExtCategory):
        return member_ext(rep, handle.left, handle.right, budget)
    raise ShapeError(f"not a subcategory handle: {handle!r}")


def member_ext(z: Rep, x, y, budget: Budget | None = None) -> Optional[ExtEvidence]:
    """Evidence that z has a subrepresentation in x with quotient in y, or
    None after exhausting every arrow-stable subrepresentation.

    Only prime fields are supported: absence is an exhaustiveness claim.
    """
    budget = budget or default_budget()
    search = SubrepSearch(z, budget)
    for combo in search.tuples():
        sub, incl = search.build(combo)
        sub_ev = _member_handle(sub, x, budget)
        if sub_ev is None:
            continue
        quot, proj = cokernel(incl)
        quot_ev = _member_handle(quot, y, budget)
        if quot_ev is None:
            continue
        return ExtEvidence(ShortExactSeq(incl, proj), sub_ev, quot_ev)
    return None


# membership in F_r(S)


_semis_cache: dict = {}


def _handle_semisimple(handle: AddCategory) -> bool:
    """Whether every generator carries only zero arrow maps. For such a
    family, membership in add is a dimension count: representations with
    zero maps are classified by their dimension vectors."""
    key = handle.key()
    got = _semis_cache.get(key)
    if got is None:
        got = all(
            g.map(a.id).is_zero() for g in handle.generators for a in handle.quiver.arrows
        )
        _semis_cache[key] = got
    return got


def _dims_feasible(handle: AddCategory, dims) -> bool:
    """Whether dims = sum of c_i * dims(generator i) has a solution in
    non-negative integers."""
    gens = [g.dims for g in handle.generators if g.total_dim > 0]

    def rec(i, remaining):
        if not any(remaining):
            return True
        if i == len(gens):
            return False
        g = gens[i]
        cap = min(
            (remaining[x] // g[x] for x in range(len(remaining)) if g[x]),
            default=0,
        )
        for c in range(cap, -1, -1):
            if rec(i + 1, tuple(remaining[x] - c * g[x] for x in range(len(remaining)))):
                return True
        return False

    return rec(0, tuple(dims))


def _add_decide(m: Rep, handle: AddCategory) -> bool:
    """Membership decision for add(handle) without evidence construction."""
    if _handle_semisimple(handle):
        if not all(m.map(a.id).is_zero() for a in m.quiver.arrows):
            return False
        return _dims_feasible(handle, m.dims)
    return member_add(m, handle) is not None


# minimal filtration depth, memoized per (family, representation):
# the value is (deepest cap tried, minimal depth or None within that cap).
_depth_memo: dict = {}


def _kernel_peel_candidates(m: Rep, handle: AddCategory, budget: Budget):
    """Peel candidates for a semisimple family. A subrepresentation lying in
    add(handle) is exactly a product of per-vertex subspaces of the joint
    kernel of the outgoing maps, so the enumeration walks those kernels
    instead of the full ambient Grassmannians."""
    if m.total_dim > budget.max_total_dim:
        raise BudgetExceededError(
            f"total dimension {m.total_dim} exceeds the budget {budget.max_total_dim}"
        )
    F = m.field
    q = m.quiver
    kernels = []
    for x in range(q.vertex_count):
        outs = [m.map(a.id) for a in q.arrows_from(x)]
        kernels.append(
            vstack(outs).kernel_basis() if outs else Matrix.identity(F, m.dims[x])
        )
    tables = [subspace_table(F, kern.cols) for kern in kernels]
    count = 1
    for t in tables:
        count *= len(t)
    if count > budget.max_subspaces:
        raise BudgetExceededError(
            f"{count} subspace combinations exceed the budget {budget.max_subspaces}"
        )
    by_k = []
    for t in tables:
        groups = {}
        for e in t:
            groups.setdefault(e.k, []).append(e)
        by_k.append(groups)
    caps = [kern.cols for kern in kernels]
    total = m.total_dim
    for want in range(1, sum(caps) + 1):
        if want == total:
            continue
        for shape in _compositions(want, caps):
            if not _dims_feasible(handle, shape):
                continue
            pools = [by_k[x][shape[x]] for x in range(q.vertex_count)]
            for entries in itertools.product(*pools):
                comps = [
                    kernels[x] @ entries[x].basis for x in range(q.vertex_count)
                ]
                maps = {
                    a.id: Matrix.zeros(F, shape[a.target], shape[a.source])
                    for a in q.arrows
                }
                sub = Rep(q, F, list(shape), maps)
                incl = RepMorphism(sub, m, comps, check=False)
                yield entries, sub, incl


def _peel_candidates(m: Rep, handle: AddCategory, budget: Budget):
    """Quotients of m by its proper nonzero add(handle) subrepresentations,
    cheapest subrepresentation first."""
    if _handle_semisimple(handle):
        yield from _kernel_peel_candidates(m, handle, budget)
        return
    search = SubrepSearch(m, budget)
    total = m.total_dim
    for combo in search.tuples():
        k = sum(e.k for e in combo)
        if k == 0 or k == total:
            continue
        sub, incl = search.build(combo)
        if member_add(sub, handle) is None:
            continue
        yield combo, sub, incl


def _min_depth(m: Rep, handle: AddCategory, cap: int, budget: Budget) -> Optional[int]:
    """Minimal r <= cap with m in F_r(add handle), or None. Since the F_r
    form an increasing chain, m is a member of F_r exactly when the minimum
    is at most r."""
    if cap < 1:
        return None
    if _add_decide(m, handle):
        return 1
    if cap <= 1:
        return None
    if m.field.kind != PRIME:
        raise RationalFieldUnsupportedError(
            "membership beyond depth 1 needs an exhaustive subrepresentation "
            "search, which is only available over prime fields"
        )
    key = (handle.key(), m.key())
    got = _depth_memo.get(key)
    if got is not None:
        tried, val = got
        if val is not None:
            return val if val <= cap else None
        if tried >= cap:
            return None
    best = None
    for _, _, incl in _peel_candidates(m, handle, budget):
        quot, _ = cokernel(incl)
        inner = _min_depth(quot, handle, cap - 1 if best is None else best - 2, budget)
        if inner is not None and (best is None or inner + 1 < best):
            best = inner + 1
            if best == 2:
                break
    _depth_memo[key] = (cap, best)
    return best


def member_filt(m: Rep, s, r: int, budget: Budget | None = None) -> Optional[FiltrationCertificate]:
    """A verified filtration of m with at most r layers, each factor a
    member of add(S), or None when no such filtration exists.

    S may be an OrderedFamily, an AddCategory, or a plain generator list.
    """
    if r < 1:
        raise ShapeError("filtration depth must be at least 1")
    family = _as_family(s)
    handle = family.add_handle()
    budget = budget or default_budget()
    if _min_depth(m, handle, r, budget) is None:
        return None
    return _build_filtration(m, family, handle, r, budget)


def _lift_filtration(m: Rep, incl: RepMorphism, proj: RepMorphism,
                     inner: Filtration) -> Filtration:
    """Pull a filtration of quot = m/sub back to one of m: the new bottom
    term is ker(proj) and term j+1 is the preimage of the j-th inner term.

    The composite inner steps are injective, so each inner term maps onto a
    subrepresentation of quot; preimages of a chain form a chain.
    """
    field = m.field
    n = m.quiver.vertex_count
    composites = [None] * (inner.depth + 1)
    composites[inner.depth] = RepMorphism.identity(inner.top)
    for j in range(inner.depth - 1, -1, -1):
        composites[j] = compose(composites[j + 1], inner.steps[j])
    terms = []
    for j in range(inner.depth + 1):
        terms.append(preimage_subrep(proj, composites[j]))
    steps = []
    zero = Rep.zero(m.quiver, field)
    prev_rep, prev_incl = zero, RepMorphism.zero(zero, m)
    for t_rep, t_incl in terms:
        comps = []
        for x in range(n):
            sol = t_incl.component(x).solve(prev_incl.component(x))
            if sol is None:
                raise ApproxcatError("lifted filtration terms do not chain")
            comps.append(sol)
        steps.append(RepMorphism(prev_rep, t_rep, comps))
        prev_rep, prev_incl = t_rep, t_incl
    return Filtration(steps)


def _build_filtration(m: Rep, family: OrderedFamily, handle: AddCategory,
                      r: int, budget: Budget) -> FiltrationCertificate:
    """Certificate construction mirroring the decision order; the caller
    guarantees membership."""
    filt = _build_steps(m, handle, r, budget)
    evidence = []
    for j in range(filt.depth):
        ev = member_add(filt.factor(j), handle)
        if ev is None:
            raise CertificateError("a filtration factor failed add membership")
        evidence.append(ev)
    return FiltrationCertificate(filt, m, family, tuple(evidence))


def _build_steps(m: Rep, handle: AddCategory, r: int, budget: Budget) -> Filtration:
    if _add_decide(m, handle):
        z = Rep.zero(m.quiver, m.field)
        return Filtration([RepMorphism.zero(z, m)])
    for _, _, incl in _peel_candidates(m, handle, budget):
        quot, proj = cokernel(incl)
        if _min_depth(quot, handle, r - 1, budget) is None:
            continue
        inner = _build_steps(quot, handle, r - 1, budget)
        return _lift_filtration(m, incl, proj, inner)
    raise CertificateError("membership decision and construction disagree")


# the factors-exchanging operation


def filt_exchange(f: Filtration, i: int, check: bool = True) -> Filtration:
    """Swap the factors at steps i and i+1 (zero-based): the middle term
    M_{i+1} is replaced so that the new i-th factor is isomorphic to the old
    (i+1)-st and vice versa.

    Requires Ext1(factor(i+1), factor(i)) = 0; then the short exact
    sequence relating the two factors inside M_{i+2}/M_i splits, and the
    replacement term is the preimage of the section's image.
    """
    if i < 0 or i + 1 >= f.depth:
        raise ShapeError(f"no adjacent factor pair at step {i}")
    u = f.steps[i]
    v = f.steps[i + 1]
    a_rep, q_a = cokernel(u)
    c_rep, q_c = cokernel(v)
    if ext1_dim(c_rep, a_rep) != 0:
        raise ExtObstructionError(
            f"Ext1 between the factors at steps {i + 1} and {i} does not vanish"
        )
    b_rep, q_b = cokernel(compose(v, u))
    a_bar = factor_through_cokernel(q_a, compose(q_b, v))
    c_bar = factor_through_cokernel(q_b, q_c)
    ses = ShortExactSeq(a_bar, c_bar)
    if not ses_verify(ses):
        raise ApproxcatError("factor sequence is not exact; filtration is broken")
    sigma = is_split(ses)
    if sigma is None:
        raise ApproxcatError("section missing despite vanishing Ext; this is a bug")
    im_sigma, incl_sigma, _ = image(sigma)
    new_mid, new_incl = preimage_subrep(q_b, incl_sigma)
    lower_comps = []
    vu = compose(v, u)
    for x in range(f.top.quiver.vertex_count):
        sol = new_incl.component(x).solve(vu.component(x))
        if sol is None:
            raise ApproxcatError("replacement term does not contain the lower term")
        lower_comps.append(sol)
    lower = RepMorphism(u.source, new_mid, lower_comps)
    steps = list(f.steps)
    steps[i] = lower
    steps[i + 1] = new_incl
    out = Filtration(steps)
    if check:
        if iso_test(out.factor(i), c_rep) is None or iso_test(out.factor(i + 1), a_rep) is None:
            raise ApproxcatError("exchanged factors are not the swapped originals")
    return out


# normalization to at most n layers


def _check_ext_hypothesis(family: OrderedFamily):
    n = len(family)
    for i in range(n):
        for j in range(i, n):
            if ext1_dim(family[i], family[j]) != 0:
                raise HypothesisViolationError(
                    f"Ext1(X_{i + 1}, X_{j + 1}) does not vanish for this ordering"
                )


def _prefix_subrep(total: Rep, cols):
    """The subrepresentation of a direct sum spanned by the first cols[x]
    coordinates at each vertex (stable: summand maps are block diagonal)."""
    F = total.field
    bases = []
    for x in range(total.quiver.vertex_count):
        d, k = total.dims[x], cols[x]
        entries = [F.one if i == j else F.zero for i in range(d) for j in range(k)]
        bases.append(Matrix(F, d, k, entries))
    return subrep_from_bases(total, bases)


def _refine_layers(filt: Filtration, family: OrderedFamily, handle: AddCategory):
    """Split every filtration layer whose factor mixes several generators
    into consecutive layers, each a sum of copies of one generator. Returns
    the refined filtration and a parallel list of generator indices (None
    for layers with zero factor)."""
    gens = family.members
    steps = []
    indices = []
    for j in range(filt.depth):
        step = filt.steps[j]
        factor, q_j = cokernel(step)
        ev = member_add(factor, handle)
        if ev is None:
            raise CertificateError("input filtration has a factor outside add of the family")
        effective = [
            i for i, c in enumerate(ev.multiplicities) if c > 0 and gens[i].total_dim > 0
        ]
        if len(effective) <= 1:
            steps.append(step)
            indices.append(effective[0] if effective else None)
            continue
        total, layout = handle.canonical_sum(ev.multiplicities)
        psi = compose(ev.iso, q_j)
        boundaries = []
        for t in effective[:-1]:
            cols = []
            for x in range(total.quiver.vertex_count):
                cols.append(sum(gens[i].dims[x] * ev.multiplicities[i] for i in range(t + 1)))
            boundaries.append(cols)
        mids = []
        for cols in boundaries:
            _, incl_pref = _prefix_subrep(total, cols)
            mids.append(preimage_subrep(psi, incl_pref))
        prev_rep, prev_incl = step.source, step
        chain = mids + [(step.target, RepMorphism.identity(step.target))]
        for t, (t_rep, t_incl) in enumerate(chain):
            comps = []
            for x in range(t_rep.quiver.vertex_count):
                sol = t_incl.component(x).solve(prev_incl.component(x))
                if sol is None:
                    raise ApproxcatError("refined filtration terms do not chain")
                comps.append(sol)
            steps.append(RepMorphism(prev_rep, t_rep, comps))
            indices.append(effective[t])
            prev_rep, prev_incl = t_rep, t_incl
    return Filtration(steps), indices


def _drop_zero_layers(filt: Filtration, indices):
    """Merge layers with zero factor into their neighbors by composing
    steps. A filtration of the zero representation keeps one zero layer."""
    segs = []
    start = 0
    for t, idx in enumerate(indices):
        if idx is not None:
            segs.append((start, t + 1, idx))
            start = t + 1
    if not segs:
        segs = [(0, filt.depth, None)]
    elif start < filt.depth:
        s, _, idx = segs[-1]
        segs[-1] = (s, filt.depth, idx)
    steps = []
    out_indices = []
    for s, e, idx in segs:
        comp = filt.steps[s]
        for t in range(s + 1, e):
            comp = compose(filt.steps[t], comp)
        steps.append(comp)
        out_indices.append(idx)
    return Filtration(steps), out_indices


def filt_normalize(cert: FiltrationCertificate, s=None) -> FiltrationCertificate:
    """Normal form of a filtration certificate over an ordered family with
    Ext1(X_i, X_j) = 0 for i <= j: at most one layer per generator, layers
    ordered X_1 first through X_n last, each factor a sum of copies of its
    generator.

    Bubble sort by filt_exchange: every swap moves a lower-indexed factor
    below a higher-indexed one, and the obstruction Ext1(X_lower, X_upper)
    vanishes by the hypothesis; so does Ext1(X_i, X_i), which lets equal
    runs merge into a single layer.
    """
    family = _as_family(s) if s is not None else cert.family
    _check_ext_hypothesis(family)
    handle = family.add_handle()
    filt, indices = _refine_layers(cert.filtration, family, handle)
    filt, indices = _drop_zero_layers(filt, indices)
    changed = True
    while changed:
        changed = False
        for i in range(filt.depth - 1):
            if indices[i + 1] is not None and indices[i] is not None and indices[i] > indices[i + 1]:
                filt = filt_exchange(filt, i)
                indices[i], indices[i + 1] = indices[i + 1], indices[i]
                changed = True
    merged_steps = []
    merged_indices = []
    pos = 0
    while pos < filt.depth:
        end = pos + 1
        while end < filt.depth and indices[end] == indices[pos]:
            end += 1
        comp = filt.steps[pos]
        for t in range(pos + 1, end):
            comp = compose(filt.steps[t], comp)
        merged_steps.append(comp)
        merged_indices.append(indices[pos])
        pos = end
    out = Filtration(merged_steps)
    if out.depth > max(1, len(family)):
        raise ApproxcatError("normalization left more layers than generators; this is a bug")
    evidence = []
    for j in range(out.depth):
        ev = member_add(out.factor(j), handle)
        if ev is None:
            raise CertificateError("a normalized factor failed add membership")
        evidence.append(ev)
    result = FiltrationCertificate(out, cert.member, family, tuple(evidence))
    if not result.verify():
        raise CertificateError("normalized certificate failed verification")
    return result


# independent enumeration of F_r within a dimension bound


def _bound_tuple(dim_bound, quiver):
    if isinstance(dim_bound, int):
        return (dim_bound,) * quiver.vertex_count
    bound = tuple(dim_bound)
    if len(bound) != quiver.vertex_count:
        raise ShapeError("one dimension bound per vertex required")
    return bound


def _iso_insert(groups: dict, rep: Rep) -> bool:
    """Insert rep into the dims-keyed iso-class table; False if an
    isomorphic representative is already present."""
    bucket = groups.setdefault(rep.dims, [])
    for other in bucket:
        if iso_test(other, rep) is not None:
            return False
    bucket.append(rep)
    return True


def fr_enumerate(generators, r: int, dim_bound, budget: Budget | None = None,
                 quiver=None, field=None):
    """All members of F_r(add(generators)) with dims within dim_bound, up
    to isomorphism, sorted by total dimension then structure.

    Level one is the add-closure of the generators within the bound; each
    further level adjoins the middle of every extension class of a previous
    member by an add-closure member. The budget bounds the number of
    middles constructed.
    """
    if r < 1:
        raise ShapeError("level must be at least 1")
    gens = tuple(generators)
    if gens:
        quiver, field = gens[0].quiver, gens[0].field
    elif quiver is None or field is None:
        raise ShapeError("an empty generator set needs an explicit quiver and field")
    _require_prime(field, "fr_enumerate")
    budget = budget or default_budget()
    bound = _bound_tuple(dim_bound, quiver)
    effective = [g for g in gens if g.total_dim > 0]
    groups: dict = {}
    base = []
    built = 0

    def sums(i, dims_left, chosen):
        nonlocal built
        if i == len(effective):
            reps = []
            for gi, c in enumerate(chosen):
                reps.extend([effective[gi]] * c)
            total, _, _ = direct_sum(reps, quiver=quiver, field=field)
            built += 1
            if built > budget.max_subspaces:
                raise _budget_error(built, budget)
            if _iso_insert(groups, total):
                base.append(total)
            return
        g = effective[i]
        cap = min(
            (dims_left[x] // g.dims[x] for x in range(len(bound)) if g.dims[x]),
            default=0,
        )
        for c in range(cap + 1):
            nxt = tuple(dims_left[x] - c * g.dims[x] for x in range(len(bound)))
            sums(i + 1, nxt, chosen + (c,))

    sums(0, bound, ())
    current = list(base)
    scalars = list(field.iter_scalars())
    for _ in range(r - 1):
        added = []
        for quot in current:
            for sub in base:
                if sub.total_dim == 0:
                    continue
                if any(sub.dims[x] + quot.dims[x] > bound[x] for x in range(len(bound))):
                    continue
                basis = ext1_basis(quot, sub)
                for coeffs in itertools.product(scalars, repeat=len(basis)):
                    cocycle = {}
                    for a in quiver.arrows:
                        block = Matrix.zeros(field, sub.dims[a.target], quot.dims[a.source])
                        for cf, bl in zip(coeffs, basis):
                            if cf != 0:
                                block = block + bl[a.id].scale(cf)
                        cocycle[a.id] = block
                    mid = extension_from_cocycle(quot, sub, cocycle).mid
                    built += 1
                    if built > budget.max_subspaces:
                        raise _budget_error(built, budget)
                    if _iso_insert(groups, mid):
                        added.append(mid)
        current = current + added
    current.sort(key=lambda v: (v.total_dim, v.key()))
    return current


def _budget_error(built, budget):
    return BudgetExceededError(
        f"constructed {built} candidates, over the budget {budget.max_subspaces}"
    )
