"""Partial graded derivations and their extension along strong subspaces.

A partial derivation on B is a linear map f : B -> V whose Leibniz lift
x ^ y -> f(x) ^ y + x ^ f(y) sends N(B) into N.  Extending f to a minimal
strong extension A of B goes through the free pseudosolution: A's complement
over B is sent to fresh coordinates and the Leibniz images of N(A) are added
as relations.  Either that algebra has a commuting pair of independent
vectors (Case A, solved inside A + f(B)) or it is amalgamated into the
workspace.
"""

from dataclasses import dataclass, field

import numpy as np

from nilalg.errors import DomainError, InternalInconsistency, PreconditionError
from nilalg.exterior import (
    find_decomposable,
    leibniz_lift,
    pad_wedge,
    total_map,
    unpad_wedge,
    wedge,
    wedge_dim,
    wedge_square,
)
from nilalg.fq_linalg import (
    DEFAULT_ENUM_CAP,
    Subspace,
    as_matrix,
    as_vector,
    complement,
    inverse,
    null_space,
    rows_of,
    solve_left,
)
from nilalg.liealg import GradedAlgebra, check_predimension, rel_predim, relations_of
from nilalg.strong import (
    classify_step,
    is_minimal_extension,
    is_strong,
    minimal_step,
    self_sufficient_closure,
    split_relation,
)

MAX_DEPTH = 16


class PartialDerivation:
    """A linear map on ``domain`` given by the images of its echelon basis."""

    __slots__ = ("alg", "domain", "images")

    def __init__(self, alg, domain, images):
        if domain.n != alg.n or domain.p != alg.p:
            raise DomainError("domain does not live in the algebra's degree-1 part")
        images = as_matrix(images, alg.p, alg.n)
        if images.shape[0] != domain.dim:
            raise DomainError(f"{images.shape[0]} images for a domain of dimension {domain.dim}")
        images.setflags(write=False)
        self.alg = alg
        self.domain = domain
        self.images = images

    @classmethod
    def zero(cls, alg, domain=None):
        domain = Subspace.zero(alg.p, alg.n) if domain is None else domain
        return cls(alg, domain, np.zeros((domain.dim, alg.n), dtype=np.int64))

    @classmethod
    def from_pairs(cls, alg, xs, ys):
        """Build from prescribed values ``x -> y``; the xs may be dependent if consistent."""
        p, n = alg.p, alg.n
        xs = as_matrix(xs, p, n)
        ys = as_matrix(ys, p, n)
        if xs.shape[0] != ys.shape[0]:
            raise DomainError("different numbers of arguments and values")
        if xs.shape[0] == 0:
            return cls.zero(alg)
        rows = Subspace(np.hstack([xs, ys]), p, 2 * n).basis
        lead = rows[:, :n].any(axis=1)
        if (~lead).any():
            raise DomainError("prescribed values are not consistent with a linear map")
        return cls(alg, Subspace(rows[:, :n], p, n), rows[:, n:])

    def __eq__(self, other):
        if not isinstance(other, PartialDerivation):
            return NotImplemented
        return (
            self.alg == other.alg
            and self.domain == other.domain
            and bool(np.array_equal(self.images, other.images))
        )

    def __repr__(self):
        return f"PartialDerivation(dim domain={self.domain.dim}, n={self.alg.n})"

    @property
    def p(self):
        return self.alg.p

    @property
    def is_total(self):
        return self.domain.dim == self.alg.n

    def matrix(self):
        """Total n x n matrix agreeing with f on the domain (zero off the pivots)."""
        return total_map(self.domain, self.images, self.alg.n)

    def apply(self, x):
        x = as_vector(x, self.p, self.alg.n)
        return self.domain.coordinates(x) @ self.images % self.p

    def __call__(self, x):
        return self.apply(x)

    @property
    def image_space(self):
        return Subspace(self.images, self.p, self.alg.n)

    @property
    def span(self):
        """domain + f(domain)."""
        return self.domain + self.image_space

    def lift(self):
        """Leibniz lift on wedge coordinates (meaningful on wedge^2 of the domain)."""
        return leibniz_lift(self.domain, self.images, self.alg.n)

    def apply_wedge(self, w):
        return np.asarray(w, dtype=np.int64) @ self.lift() % self.p

    def rebase(self, alg):
        """The same map viewed in a workspace grown from ``self.alg`` by padding."""
        if alg.n < self.alg.n:
            raise DomainError("cannot rebase onto a smaller ambient")
        if alg is self.alg:
            return self
        dom = self.domain.pad(alg.n)
        img = np.zeros((self.images.shape[0], alg.n), dtype=np.int64)
        img[:, : self.alg.n] = self.images
        return PartialDerivation(alg, dom, img)

    def restrict(self, sub):
        if not sub <= self.domain:
            raise DomainError("restriction to a subspace outside the domain")
        return PartialDerivation(self.alg, sub, rows_of(np.array([self.apply(x) for x in sub.basis]), self.alg.n))

    def __add__(self, other):
        if self.domain != other.domain or self.alg != other.alg:
            raise DomainError("sum of derivations with different domains")
        return PartialDerivation(self.alg, self.domain, (self.images + other.images) % self.p)

    def __neg__(self):
        return PartialDerivation(self.alg, self.domain, (-self.images) % self.p)


@dataclass
class DerivationReport:
    ok: bool
    witness: np.ndarray | None = field(default=None, repr=False)


def validate_derivation(d):
    """Check f(N(B)) inside N on the echelon generators of N(B)."""
    alg = d.alg
    rel = relations_of(alg, d.domain)
    if rel.dim == 0:
        return DerivationReport(True)
    out = alg.relations.reduce(rel.basis @ d.lift() % alg.p)
    bad = np.flatnonzero(out.any(axis=1))
    if bad.size:
        return DerivationReport(False, rel.basis[bad[0]].copy())
    return DerivationReport(True)


class ExtensionProblem:
    """Data (B <= A, f) with f a partial derivation on B and A + f(B) strong."""

    def __init__(self, alg, base, target, f, cap=DEFAULT_ENUM_CAP, check=True):
        self.alg, self.base, self.target, self.f, self.cap = alg, base, target, f, cap
        if f.domain != base:
            raise PreconditionError("derivation domain differs from the problem base")
        if check:
            if not base <= target:
                raise PreconditionError("base is not contained in the target")
            if not validate_derivation(f).ok:
                raise PreconditionError("map on the base is not a partial derivation")
            if not is_strong(alg, base, target, cap=cap):
                raise PreconditionError("base is not strong in the target")
            if not is_strong(alg, target + f.image_space, cap=cap):
                raise PreconditionError("target + f(base) is not strong in the algebra")

    @property
    def k(self):
        return self.target.dim - self.base.dim

    def is_minimal(self):
        return is_minimal_extension(self.alg, self.base, self.target, cap=self.cap)


@dataclass
class Pseudosolution:
    """Free pseudosolution of an extension problem.

    The ambient grows from n to n + k coordinates and the canonical complement
    rows of A over B go to the fresh unit vectors e_n, ..., e_{n+k-1}.
    ``algebra`` is the workspace with the new relations added (a free
    amalgam over A + f(B)); ``local`` carries only N(A + f(B)) + f(N(A)).
    """

    problem: ExtensionProblem
    algebra: GradedAlgebra
    local: GradedAlgebra
    extended_f: PartialDerivation
    new_relations: np.ndarray = field(repr=False)
    base_space: Subspace = field(repr=False)
    space: Subspace = field(repr=False)
    complement: np.ndarray = field(repr=False)

    @property
    def k(self):
        return self.complement.shape[0]

    def over_base(self):
        """The local algebra on A + f(A) in coordinates (basis of A + f(B), fresh)."""
        return self.local.restrict(self.space)


@dataclass(frozen=True)
class CaseA:
    v0: np.ndarray = field(repr=False)
    v1: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class InK:
    pass


def free_pseudosolution(prob):
    alg, p, n = prob.alg, prob.alg.p, prob.alg.n
    base, target, f = prob.base, prob.target, prob.f
    comp = complement(base, target)
    k = comp.shape[0]
    m = n + k
    big = alg.pad(m) if k else alg
    xs = np.zeros((base.dim + k, m), dtype=np.int64)
    ys = np.zeros((base.dim + k, m), dtype=np.int64)
    xs[: base.dim, :n] = base.basis
    xs[base.dim :, :n] = comp
    ys[: base.dim, :n] = f.images
    ys[base.dim :, n:] = np.eye(k, dtype=np.int64)
    ext = PartialDerivation.from_pairs(big, xs, ys)
    rel_a = relations_of(alg, target)
    new = pad_wedge(rel_a.basis, n, m) @ ext.lift() % p if rel_a.dim else np.zeros((0, wedge_dim(m)), dtype=np.int64)
    e_space = (target + f.image_space).pad(m)
    rel_e = relations_of(big, e_space)
    local = GradedAlgebra(p, m, Subspace(np.vstack([rel_e.basis, new]), p, wedge_dim(m)), big.labels)
    algebra = big.with_relations(new) if new.shape[0] else big
    ext = PartialDerivation(algebra, ext.domain, ext.images)
    fresh = np.zeros((k, m), dtype=np.int64)
    fresh[:, n:] = np.eye(k, dtype=np.int64)
    space = e_space.with_vectors(fresh) if k else e_space
    return Pseudosolution(prob, algebra, local, ext, new, e_space, space, comp)


def classify_pseudosolution(ps):
    """CaseA with a commuting independent pair in A + f(A), else InK.

    Only the decomposable scan is needed: every nonzero subspace of a free
    pseudosolution over a class-K base has predimension at least one.
    """
    found = find_decomposable(ps.local.relations, ps.local.n)
    if found is None:
        return InK()
    return CaseA(*found)


def _normalize(v, p):
    lead = int(v[np.flatnonzero(v)[0]])
    return v * pow(lead, p - 2, p) % p


def canonical_witness(ps, witness):
    """Rewrite the witness plane as (phi + x, y) with y in B and x reduced modulo y.

    phi is the fresh unit vector, y has leading coefficient one.
    """
    p, n, m = ps.local.p, ps.problem.alg.n, ps.local.n
    if ps.k != 1:
        raise InternalInconsistency(f"Case A with {ps.k} fresh coordinates; minimality forces one")
    plane = Subspace(np.vstack([witness.v0, witness.v1]), p, m)
    if plane.dim != 2:
        raise InternalInconsistency("witness vectors are dependent")
    fresh = plane.basis[:, n:]
    ker = null_space(fresh.T, p, 2)
    if ker.shape[0] != 1:
        raise InternalInconsistency("witness plane does not meet the fresh coordinates in a line")
    y = _normalize(ker[0] @ plane.basis % p, p)
    row = plane.basis[int(np.flatnonzero(fresh[:, 0])[0])]
    v0 = row * pow(int(row[n]), p - 2, p) % p
    x = Subspace(y[None], p, m).reduce(v0)[:n]
    v0 = np.concatenate([x, [1]])
    return v0, y


def decompose_witness(ps, v0, v1):
    """Solve v0 ^ v1 = f(e) + c, e in N(A), c in N(A + f(B)); least coefficient vector.

    Returns (e, c) in the workspace's wedge coordinates.
    """
    prob = ps.problem
    p, n, m = prob.alg.p, prob.alg.n, ps.local.n
    rel_a = relations_of(prob.alg, prob.target)
    rel_e = relations_of(ps.local, ps.base_space)
    gens = rows_of(np.vstack([ps.new_relations, rel_e.basis]), wedge_dim(m))
    sol, _ = solve_left(gens, wedge(v0, v1, p), p)
    if sol is None:
        raise InternalInconsistency("witness wedge is not in the pseudosolution's relation space")
    t = rel_a.dim
    e = sol[:t] @ rel_a.basis % p if t else np.zeros(wedge_dim(n), dtype=np.int64)
    c = sol[t:] @ rel_e.basis % p if rel_e.dim else np.zeros(wedge_dim(m), dtype=np.int64)
    return e, unpad_wedge(c, m, n)


def solve_case_A(prob, ps, witness):
    """Extension g : A -> A + f(B) with g(a0) = -x read off the canonical witness."""
    alg, p = prob.alg, prob.alg.p
    v0, v1 = canonical_witness(ps, witness)
    n = alg.n
    y = v1[:n]
    if not prob.base.contains(y):
        raise InternalInconsistency("commuting vector without fresh part lies outside the base")
    a0 = ps.complement[0]
    x = v0[:n]
    xs = np.vstack([prob.base.basis, a0])
    ys = np.vstack([prob.f.images, (-x) % p])
    g = PartialDerivation.from_pairs(alg, xs, ys)
    e, c = decompose_witness(ps, v0, v1)
    b0, _ = split_relation(alg, prob.base, a0, e)
    if not np.array_equal(b0, y):
        raise InternalInconsistency("relation does not have the forced shape a0 ^ b0 + d")
    if not np.array_equal(g.apply_wedge(e), (-c) % p):
        raise InternalInconsistency("g(e) differs from -c")
    if not validate_derivation(g).ok:
        raise InternalInconsistency("Case A extension is not a derivation")
    return g


def solve_minimal(ws, f, target, cap=DEFAULT_ENUM_CAP, trace=None):
    """Extend f to a minimal strong extension ``target`` of its domain inside the workspace."""
    alg = ws.algebra
    prob = ExtensionProblem(alg, f.domain, target, f, cap=cap, check=False)
    ps = free_pseudosolution(prob)
    cls = classify_pseudosolution(ps)
    entry = {"domain_dim": f.domain.dim, "target_dim": target.dim, "ambient": alg.n}
    entry["kind"] = classify_step(alg, f.domain, target, cap=cap, check_minimal=False).tag
    if isinstance(cls, CaseA):
        g = solve_case_A(prob, ps, cls)
        entry["case"] = "case-A"
    else:
        base = Subspace(ps.base_space.basis[:, : alg.n], alg.p, alg.n)
        emb = ws.embed_extension(base, ps.over_base(), note="pseudosolution", check=False)
        grown = ws.algebra
        coords = rows_of(np.array([ps.space.coordinates(v) for v in ps.extended_f.images]), ps.space.dim)
        images = emb.apply(coords)
        g = PartialDerivation(grown, ps.extended_f.domain.pad(grown.n), images)
        if not validate_derivation(g).ok:
            raise InternalInconsistency("amalgamated pseudosolution is not a derivation")
        entry["case"] = "amalgam-embed"
    if trace is not None:
        trace.append(entry)
    return g


def _advance(ws, f, goal, cap, trace, depth):
    if depth > MAX_DEPTH:
        raise InternalInconsistency("extension driver exceeded its recursion depth")
    while True:
        alg = ws.algebra
        f = f.rebase(alg)
        goal = goal.pad(alg.n)
        dom = f.domain
        if goal <= dom:
            return f
        closure = self_sufficient_closure(alg, dom + goal, cap=cap)
        step = minimal_step(alg, dom, closure, cap=cap)
        img = f.image_space
        if is_strong(alg, step + img, cap=cap):
            f = solve_minimal(ws, f, step, cap=cap, trace=trace)
            continue
        if rel_predim(alg, step, dom) != 1:
            raise InternalInconsistency("non-strong image over a step of predimension other than one")
        if trace is not None:
            trace.append({"case": "detour", "domain_dim": dom.dim, "target_dim": step.dim, "ambient": alg.n})
        f = _advance(ws, f, dom + img, cap, trace, depth + 1)
        f = _advance(ws, f, step.pad(ws.algebra.n) + img.pad(ws.algebra.n), cap, trace, depth + 1)


def extend_derivation(ws, f, a, cap=DEFAULT_ENUM_CAP, trace=None, check=True):
    """Extend f so that its domain contains ``a``; the workspace may grow.

    The domain of the result is strong in the (grown) workspace, and so is
    domain + image.
    """
    alg = ws.algebra
    f = f.rebase(alg)
    a = as_vector(a, alg.p, alg.n)
    if f.domain.contains(a):
        return f
    if check:
        if not validate_derivation(f).ok:
            raise PreconditionError("input map is not a partial derivation")
        if not is_strong(alg, f.domain, cap=cap):
            raise PreconditionError("domain is not strong in the workspace")
        if not is_strong(alg, f.span, cap=cap):
            raise PreconditionError("domain + image is not strong in the workspace")
    return _advance(ws, f, f.domain.with_vectors(a), cap, trace, 0)


def _lift_constraints(alg, basis_rows, images):
    """Residues modulo N of the Leibniz images of N's generators, flattened."""
    p, n = alg.p, alg.n
    mat = inverse(basis_rows, p) @ images % p
    full = Subspace.full(p, n)
    return alg.relations.reduce(alg.relations.basis @ leibniz_lift(full, mat, n) % p).reshape(-1)


def totalize(f, return_kernel=False):
    """Least total derivation of the algebra extending f, by one linear solve.

    Unknowns are the images of the canonical complement of the domain; the
    constraint is that the Leibniz lift maps N into N.  With
    ``return_kernel`` also return total derivations vanishing on the domain,
    as a list of matrices spanning that space.
    """
    alg, p, n = f.alg, f.p, f.alg.n
    comp = complement(f.domain, Subspace.full(p, n))
    rows = np.vstack([f.domain.basis, comp]).reshape(n, n)
    k = comp.shape[0]
    base = np.zeros((n, n), dtype=np.int64)
    base[: f.domain.dim] = f.images

    def unit(j):
        img = np.zeros((n, n), dtype=np.int64)
        img[f.domain.dim + j // n, j % n] = 1
        return img

    if alg.relations.dim == 0:
        sol = np.zeros(k * n, dtype=np.int64)
        kern = Subspace.full(p, k * n)
    else:
        h0 = _lift_constraints(alg, rows, base)
        hs = np.array([_lift_constraints(alg, rows, unit(j)) for j in range(k * n)]).reshape(k * n, -1)
        sol, kern = solve_left(hs, (-h0) % p, p)
        if sol is None:
            raise PreconditionError("no total derivation of the workspace extends this map")
    images = base.copy()
    images[f.domain.dim :] = sol.reshape(k, n)
    total = PartialDerivation(alg, Subspace.full(p, n), inverse(rows, p) @ images % p)
    if not return_kernel:
        return total
    kernel = []
    for t in kern.basis:
        img = np.zeros((n, n), dtype=np.int64)
        img[f.domain.dim :] = t.reshape(k, n)
        kernel.append(inverse(rows, p) @ img % p)
    return total, kernel


def derivation_space(alg):
    """Basis (as n x n matrices) of all total derivations of the algebra."""
    _, kern = totalize(PartialDerivation.zero(alg), return_kernel=True)
    return kern


# lemma checks on a constructed pseudosolution


def check_indep_wedges(ps, a_prime):
    """f^{-1}(wedge^2(A + f(A'))) meets wedge^2 A exactly in wedge^2 A'."""
    p, m = ps.local.p, ps.local.n
    a_pad = ps.problem.target.pad(m)
    ap = a_prime.pad(m)
    sq = wedge_square(a_pad)
    if sq.dim == 0:
        return True
    lx = sq.basis @ ps.extended_f.lift() % p
    img_ap = Subspace(rows_of(np.array([ps.extended_f.apply(x) for x in ap.basis]), m), p, m)
    target_sq = wedge_square(a_pad + img_ap)
    res = target_sq.reduce(lx)
    combos = null_space(res.T, p, sq.dim)
    pre = Subspace(combos @ sq.basis % p, p, wedge_dim(m)) if combos.shape[0] else Subspace.zero(p, wedge_dim(m))
    return pre == wedge_square(ap)


def check_intersection(ps):
    """N(A + f(B)) equals N(A + f(A)) meet wedge^2(A + f(B))."""
    p, m, n = ps.local.p, ps.local.n, ps.problem.alg.n
    e_small = Subspace(ps.base_space.basis[:, :n], p, n)
    expected = Subspace(pad_wedge(relations_of(ps.problem.alg, e_small).basis, n, m), p, wedge_dim(m))
    return relations_of(ps.local, ps.base_space) == expected and relations_of(ps.algebra, ps.base_space) == expected


def check_dimension_equality(ps, a_prime):
    """f maps a basis of N(A') over N(B) to a basis of N(A + f(A')) over N(A + f(B))."""
    prob = ps.problem
    p, n, m = prob.alg.p, prob.alg.n, ps.local.n
    rel_b = relations_of(prob.alg, prob.base)
    rel_ap = relations_of(prob.alg, a_prime)
    extra = complement(rel_b, rel_ap)
    imgs = pad_wedge(extra, n, m) @ ps.extended_f.lift() % p if extra.shape[0] else np.zeros((0, wedge_dim(m)), dtype=np.int64)
    rel_e = relations_of(ps.local, ps.base_space)
    ap = a_prime.pad(m)
    img_ap = Subspace(rows_of(np.array([ps.extended_f.apply(x) for x in ap.basis]), m), p, m)
    big = ps.problem.target.pad(m) + img_ap
    rel_big = relations_of(ps.local, big)
    spanned = rel_e.with_vectors(imgs) if imgs.shape[0] else rel_e
    free = spanned.dim == rel_e.dim + extra.shape[0]
    deltas = rel_predim(ps.local, big, ps.base_space) == rel_predim(prob.alg, a_prime, prob.base)
    return free and spanned == rel_big and deltas


def check_minimal_strong(ps, minimal=None, cap=DEFAULT_ENUM_CAP):
    """A + f(A) is strong over A + f(B), and minimal when the problem is."""
    if not is_strong(ps.local, ps.base_space, ps.space, cap=cap):
        return False
    if minimal is None:
        minimal = ps.problem.is_minimal()
    if minimal and ps.k:
        return is_minimal_extension(ps.local, ps.base_space, ps.space, cap=cap)
    return True


def check_delta_lower_bound(ps, cap=DEFAULT_ENUM_CAP, prune=True):
    """Every nonzero subspace of A + f(A) has predimension at least one."""
    return check_predimension(ps.local, ps.space, cap=cap, prune=prune).ok

