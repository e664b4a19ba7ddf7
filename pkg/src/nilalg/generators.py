"""Seeded random instances for the property suites and benchmarks.

Every generator takes a ``numpy.random.Generator`` and is deterministic in
it.  Rejection loops are bounded; they raise RuntimeError rather than spin.
"""

import numpy as np

from nilalg.derivation import ExtensionProblem, PartialDerivation
from nilalg.amalgam import Workspace
from nilalg.errors import AmalgamInvalid, EnumerationTooLarge, PreconditionError
from nilalg.exterior import from_terms, induced_map, pad_wedge, pair_arrays, wedge_dim
from nilalg.fq_linalg import DEFAULT_ENUM_CAP, Subspace, complement, null_space, rank, rows_of
from nilalg.io import algebra_to_record
from nilalg.liealg import GradedAlgebra, in_class_K, relations_of
from nilalg.strong import is_strong, minimal_step, self_sufficient_closure

MAX_TRIES = 400


def random_matrix(rng, p, rows, cols):
    return rng.integers(0, p, (rows, cols)).astype(np.int64)


def random_invertible(rng, p, n):
    for _ in range(MAX_TRIES):
        m = random_matrix(rng, p, n, n)
        if rank(m, p) == n:
            return m
    raise RuntimeError("no invertible matrix found")


def random_subspace(rng, p, n, d=None):
    """Row space of a random d x n matrix (so of dimension at most d)."""
    d = rng.integers(0, n + 1) if d is None else d
    return Subspace(random_matrix(rng, p, d, n), p, n)


def random_algebra(rng, p, n, r=None):
    """n generators and the span of r random wedge vectors as relations."""
    m = wedge_dim(n)
    r = rng.integers(0, min(m, 4) + 1) if r is None else r
    return GradedAlgebra(p, n, Subspace(random_matrix(rng, p, r, m), p, m))


def transform(alg, mat):
    """Image of the algebra under the coordinate change x -> x @ mat."""
    p = alg.p
    rel = alg.relations.basis @ induced_map(mat, p) % p
    return GradedAlgebra(p, alg.n, Subspace(rel, p, wedge_dim(alg.n)))


def random_k_algebra(rng, p, n, max_rel=3, cap=DEFAULT_ENUM_CAP):
    """A random member of class K with n generators."""
    m = wedge_dim(n)
    for _ in range(MAX_TRIES):
        r = int(rng.integers(0, min(m, max_rel, max(n - 1, 0)) + 1))
        alg = GradedAlgebra(p, n, Subspace(random_matrix(rng, p, r, m), p, m))
        try:
            if in_class_K(alg, cap=cap).ok:
                return alg
        except EnumerationTooLarge:
            continue
    raise RuntimeError("no class-K algebra found")


def derivation_space(alg, domain):
    """Basis of all partial derivations on ``domain``, as (dim domain, n) image matrices."""
    p, n, s = alg.p, alg.n, domain.dim
    rel = relations_of(alg, domain)
    if rel.dim == 0:
        return [u.reshape(s, n) for u in np.eye(s * n, dtype=np.int64)]
    cols = []
    for u in np.eye(s * n, dtype=np.int64):
        d = PartialDerivation(alg, domain, u.reshape(s, n))
        cols.append(alg.relations.reduce(rel.basis @ d.lift() % p).reshape(-1))
    ker = null_space(np.array(cols).T, p, s * n)
    return [k.reshape(s, n) for k in ker]


def random_derivation(rng, alg, domain, into=None):
    """Random partial derivation on ``domain`` with images in ``into`` (default everywhere)."""
    p, n = alg.p, alg.n
    basis = derivation_space(alg, domain)
    if into is not None:
        basis = _restrict_images(alg, domain, basis, into)
    if not basis:
        return PartialDerivation.zero(alg, domain)
    coef = rng.integers(0, p, len(basis))
    images = sum(int(c) * b for c, b in zip(coef, basis)) % p
    return PartialDerivation(alg, domain, np.asarray(images).reshape(domain.dim, n))


def _restrict_images(alg, domain, basis, into):
    """Combinations of ``basis`` whose images all lie in ``into``."""
    p, n = alg.p, alg.n
    if not basis:
        return []
    # the residues of every image row modulo ``into`` must vanish
    res = np.array([into.reduce(b).reshape(-1) for b in basis])
    ker = null_space(res.T, p, len(basis))
    stack = np.array(basis).reshape(len(basis), -1)
    return [(k @ stack % p).reshape(domain.dim, n) for k in ker]


# extension problems, W = A + X with X free


def random_extension_problem(rng, p=3, max_base=4, max_codim=3, extra=(0, 2), minimal_bias=0.5, cap=DEFAULT_ENUM_CAP):
    """A valid extension problem (W, B <= A, f) with dim B <= max_base, dim A/B <= max_codim.

    A is a class-K algebra on the first coordinates of W and X a block of
    free coordinates; as all relations live in wedge^2 A, A + f(B) is strong
    in W.  With probability ``minimal_bias`` A is cut down to a minimal
    strong extension of B.
    """
    for _ in range(MAX_TRIES):
        na = int(rng.integers(2, max_base + max_codim + 1))
        alg_a = random_k_algebra(rng, p, na, cap=cap)
        seed_dim = int(rng.integers(0, min(max_base, na - 1) + 1))
        base = self_sufficient_closure(alg_a, random_subspace(rng, p, na, seed_dim), cap=cap)
        codim = na - base.dim
        if base.dim > max_base or not 1 <= codim <= max_codim:
            continue
        target = alg_a.full
        if rng.random() < minimal_bias:
            target = minimal_step(alg_a, base, target, cap=cap)
            sub = alg_a.restrict(target)
            base = Subspace(rows_of(np.array([target.coordinates(v) for v in base.basis]), target.dim), p, target.dim)
            alg_a, na = sub, target.dim
        nx = int(rng.integers(extra[0], extra[1] + 1))
        n = na + nx
        alg = GradedAlgebra(p, n, Subspace(pad_wedge(alg_a.relations.basis, na, n), p, wedge_dim(n)))
        base = base.pad(n)
        target = Subspace.full(p, na).pad(n)
        f = random_derivation(rng, alg, base)
        return ExtensionProblem(alg, base, target, f, cap=cap, check=False)
    raise RuntimeError("no extension problem found")


def random_intermediate(rng, prob):
    """B + a random subset of the canonical complement of B in A."""
    comp = complement(prob.base, prob.target)
    keep = comp[rng.random(comp.shape[0]) < 0.5]
    return prob.base.with_vectors(keep) if keep.shape[0] else prob.base


# planted Case-A instances


def planted_case_a(rng, p=3, base_dim=None, extra=(0, 2), conjugate=True):
    """Problem (W, B <= B + <a0>, f) whose free pseudosolution has a commuting pair.

    B is free; the new relation is a0 ^ b0 + c with c outside b0 ^ B, and
    f = lam * id + h where h maps B into <b0> and kills b0.  Then f(b0) is a
    multiple of b0 and f(c) lies in <c> + b0 ^ B, which forces Case A.
    Returns (problem, a0) with everything in the coordinates of W.
    """
    s = int(rng.integers(3, 5)) if base_dim is None else base_dim
    for _ in range(MAX_TRIES):
        nx = int(rng.integers(extra[0], extra[1] + 1))
        n = s + 1 + nx
        a0 = s
        # c: random combination of b_i ^ b_j, with some term avoiding b0
        terms = [(i, j, int(rng.integers(0, p))) for i in range(s) for j in range(i + 1, s)]
        if not any(c for i, j, c in terms if i > 0):
            continue
        e = (from_terms([(0, a0, p - 1)], p, n) + from_terms([t for t in terms if t[2]], p, n)) % p
        alg = GradedAlgebra(p, n, [e])
        lam = int(rng.integers(0, p))
        images = lam * np.eye(s, n, dtype=np.int64)
        images[1:, 0] += rng.integers(0, p, s - 1)
        images %= p
        if conjugate:
            mat = random_invertible(rng, p, n)
            alg = transform(alg, mat)
            base_rows = np.eye(s, n, dtype=np.int64) @ mat % p
            images = images @ mat % p
            a0_vec = np.eye(n, dtype=np.int64)[a0] @ mat % p
        else:
            base_rows = np.eye(s, n, dtype=np.int64)
            a0_vec = np.eye(n, dtype=np.int64)[a0]
        f = PartialDerivation.from_pairs(alg, base_rows, images)
        base = f.domain
        target = base.with_vectors(a0_vec)
        return ExtensionProblem(alg, base, target, f, check=False), a0_vec
    raise RuntimeError("no planted instance found")


# driver scripts


def random_driver_script(rng, p=3, max_start=6, cap=DEFAULT_ENUM_CAP):
    """A workspace, a partial derivation and a requested vector.

    The domain is the closure of a random subspace, and f is 0, lam * id or a
    random derivation of the subalgebra on the domain, so domain + image is
    the domain and is strong.  Returns a JSON-ready problem record with an
    inline workspace script, as read by ``nilalg extend``.
    """
    for _ in range(MAX_TRIES):
        n = int(rng.integers(3, max_start + 1))
        alg = random_k_algebra(rng, p, n, cap=cap)
        steps = [{"base": [], "algebra": algebra_to_record(alg)}]
        if rng.random() < 0.5:
            grown = _grow(rng, alg, cap)
            if grown is not None:
                step, alg = grown
                steps.append(step)
                n = alg.n
        dom = self_sufficient_closure(alg, random_subspace(rng, p, n, int(rng.integers(0, n))), cap=cap)
        if dom.dim == n:
            continue
        kind = int(rng.integers(0, 3))
        if kind == 0:
            images = np.zeros((dom.dim, n), dtype=np.int64)
        elif kind == 1:
            images = int(rng.integers(1, p)) * dom.basis % p
        else:
            images = random_derivation(rng, alg, dom, into=dom).images
        while True:
            a = rng.integers(0, p, n)
            if not dom.contains(a):
                break
        return {
            "workspace": {"p": p, "steps": steps},
            "base": dom.basis.tolist(),
            "target": [a.tolist()],
            "map": [[x.tolist(), y.tolist()] for x, y in zip(dom.basis, images)],
        }
    raise RuntimeError("no driver script found")


def _grow(rng, alg, cap):
    """One replay step: a random extension of a strong subspace, amalgamated in.

    Returns (step record, grown algebra) or None when the draw is unusable.
    """
    p, n = alg.p, alg.n
    base = self_sufficient_closure(alg, random_subspace(rng, p, n, int(rng.integers(0, n))), cap=cap)
    s = base.dim
    m = s + int(rng.integers(1, 3))
    ext = alg.restrict(base).pad(m)
    if rng.random() < 0.7:
        w = random_matrix(rng, p, 1, wedge_dim(m))[0]
        i, j = pair_arrays(m)
        w[j < s] = 0
        ext = ext.with_relations(w[None])
    ws = Workspace(alg, cap=cap)
    try:
        if not is_strong(ext, Subspace.coordinate(p, m, range(s)), cap=cap):
            return None
        ws.embed_extension(base, ext)
    except (AmalgamInvalid, EnumerationTooLarge, PreconditionError):
        return None
    return {"base": base.basis.tolist(), "algebra": algebra_to_record(ext)}, ws.algebra

