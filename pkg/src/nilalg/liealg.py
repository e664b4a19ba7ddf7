"""Finite 2-nilpotent graded Lie algebras presented as V + (wedge^2 V)/N."""

from dataclasses import dataclass, field

import numpy as np

from nilalg import kernels
from nilalg.errors import ContainmentError, DimensionError, EnumerationTooLarge
from nilalg.exterior import find_decomposable, pad_wedge, to_antisym, wedge, wedge_dim, wedge_square
from nilalg.fq_linalg import (
    DEFAULT_ENUM_CAP,
    Subspace,
    as_vector,
    check_field,
    complement,
    intersect,
    inverse,
    null_space,
    rows_of,
    standard_subspaces,
)

_CHUNK = 2048


class GradedAlgebra:
    """The algebra F_p^n + (wedge^2 F_p^n)/N, stored by its presentation (p, n, N)."""

    __slots__ = ("p", "n", "relations", "labels", "_omega")

    def __init__(self, p, n, relations=None, labels=None):
        p = check_field(p)
        m = wedge_dim(n)
        if relations is None:
            relations = Subspace.zero(p, m)
        elif not isinstance(relations, Subspace):
            relations = Subspace(rows_of(relations, m), p, m)
        if relations.n != m or relations.p != p:
            raise DimensionError(f"relation space must live in wedge^2 F_{p}^{n} (dimension {m})")
        if labels is not None:
            labels = tuple(str(s) for s in labels)
            if len(labels) != n:
                raise DimensionError(f"{len(labels)} labels for {n} generators")
        self.p = p
        self.n = n
        self.relations = relations
        self.labels = labels
        self._omega = None

    @classmethod
    def free(cls, p, n, labels=None):
        return cls(p, n, None, labels)

    def __eq__(self, other):
        if not isinstance(other, GradedAlgebra):
            return NotImplemented
        return (self.p, self.n, self.relations) == (other.p, other.n, other.relations)

    def __hash__(self):
        return hash((self.p, self.n, self.relations))

    def __repr__(self):
        return f"GradedAlgebra(p={self.p}, n={self.n}, dim N={self.relations.dim})"

    @property
    def full(self):
        return Subspace.full(self.p, self.n)

    def label(self, i):
        return self.labels[i] if self.labels else f"e{i}"

    def omega(self):
        """Antisymmetric matrices of the echelon basis of N, shape (dim N, n, n)."""
        if self._omega is None:
            om = to_antisym(self.relations.basis, self.n, self.p)
            om.setflags(write=False)
            self._omega = om
        return self._omega

    def pad(self, n_new, labels=None):
        rel = pad_wedge(self.relations.basis, self.n, n_new)
        if labels is None and self.labels is not None:
            labels = self.labels + tuple(f"x{i}" for i in range(self.n, n_new))
        return GradedAlgebra(self.p, n_new, Subspace(rel, self.p, wedge_dim(n_new)), labels)

    def with_relations(self, extra):
        extra = np.asarray(extra, dtype=np.int64)
        extra = extra.reshape(extra.shape[0] if extra.ndim > 1 else 1, wedge_dim(self.n))
        return GradedAlgebra(self.p, self.n, self.relations.with_vectors(extra), self.labels)

    def restrict(self, b):
        """The subalgebra generated by b, in the coordinates of b's echelon basis."""
        rel = relations_of(self, b)
        piv = list(b.pivots)
        om = to_antisym(rel.basis, self.n, self.p)[:, piv][:, :, piv]
        i, j = np.triu_indices(b.dim, 1)
        return GradedAlgebra(self.p, b.dim, Subspace(om[:, i, j], self.p, wedge_dim(b.dim)))


@dataclass(frozen=True)
class BracketValue:
    """Canonical residue of x ^ y modulo the relation space."""

    representative: np.ndarray = field(repr=False)
    relations: Subspace = field(repr=False)

    @property
    def is_zero(self):
        return not self.representative.any()

    def __bool__(self):
        return not self.is_zero

    def __eq__(self, other):
        if not isinstance(other, BracketValue):
            return NotImplemented
        return self.relations == other.relations and np.array_equal(self.representative, other.representative)

    def __hash__(self):
        return hash(self.representative.tobytes())


def reduce_wedge(alg, w):
    return BracketValue(alg.relations.reduce(np.asarray(w, dtype=np.int64) % alg.p), alg.relations)


def bracket(alg, x, y):
    x = as_vector(x, alg.p, alg.n)
    y = as_vector(y, alg.p, alg.n)
    return reduce_wedge(alg, wedge(x, y, alg.p))


def relations_of(alg, b):
    """N(b) = N intersected with wedge^2 b."""
    _check_sub(alg, b)
    if b.dim < 2 or alg.relations.dim == 0:
        return Subspace.zero(alg.p, wedge_dim(alg.n))
    return intersect(alg.relations, wedge_square(b))


def relation_dim(alg, b):
    """dim N(b), via the rank of the contraction of N against the annihilator of b."""
    _check_sub(alg, b)
    dn = alg.relations.dim
    if dn == 0 or b.dim < 2:
        return 0
    if b.dim == alg.n:
        return dn
    ann = null_space(b.basis, alg.p, alg.n)
    x = np.einsum("kij,rj->kir", alg.omega(), ann).reshape(dn, -1)
    return dn - int(kernels.batch_rank(x[None] % alg.p, alg.p)[0])


def support(alg, b=None):
    """Smallest subspace S with N(b) inside wedge^2 S (N itself when b is None)."""
    rel = alg.relations if b is None else relations_of(alg, b)
    if rel.dim == 0:
        return Subspace.zero(alg.p, alg.n)
    om = rows_of(to_antisym(rel.basis, alg.n, alg.p), alg.n)
    return Subspace(om, alg.p, alg.n)


def relevant_ambient(alg, b, a):
    """Shrink a to a subspace a' with b <= a' <= a carrying every relation that matters.

    Any C between b and a can be replaced by C meet (b + support of N(a)) without
    losing relations, so minimal predimensions over b are attained inside the
    fixpoint of a -> a meet (b + support N(a)).
    """
    while True:
        smaller = intersect(a, b + support(alg, a))
        if smaller == a:
            return a
        a = smaller


def predim(alg, b):
    return b.dim - relation_dim(alg, b)


def rel_predim(alg, b, c):
    """delta(b/c) for c contained in b."""
    if not c <= b:
        raise ContainmentError("relative predimension needs c contained in b")
    return (b.dim - c.dim) - (relation_dim(alg, b) - relation_dim(alg, c))


def _check_sub(alg, b):
    if b.p != alg.p or b.n != alg.n:
        raise DimensionError(f"subspace of F_{b.p}^{b.n} used with an algebra on F_{alg.p}^{alg.n}")


class IntermediateTable:
    """Relation dimensions of all subspaces between b and a.

    Intermediate spaces C are indexed by their annihilator inside a/b: in
    coordinates adapted to (b, a), C corresponds to a subspace U of F_p^k
    (k = dim a/b) with dim(C/b) = k - dim U, and dim N(C) = dim N(a) minus the
    rank of the contraction of N(a) by U.
    """

    def __init__(self, alg, b, a, cap=DEFAULT_ENUM_CAP):
        _check_sub(alg, b)
        _check_sub(alg, a)
        if not b <= a:
            raise ContainmentError("base is not contained in the ambient subspace")
        p = alg.p
        self.alg, self.b, self.a = alg, b, a
        self.k = a.dim - b.dim
        if self.k > cap:
            raise EnumerationTooLarge("intermediate subspace enumeration (quotient dim)", self.k, cap)
        t, s = a.dim, b.dim
        piv = list(a.pivots)
        bc = Subspace(b.basis[:, piv], p, t) if s else Subspace.zero(p, t)
        comp = complement(bc, Subspace.full(p, t))
        self.T = np.vstack([bc.basis, comp]).astype(np.int64) % p
        self.rel_a = relations_of(alg, a)
        self.dn_a = self.rel_a.dim
        self.dn_b = relation_dim(alg, b)
        if self.dn_a:
            tinv = inverse(self.T, p)
            om = to_antisym(self.rel_a.basis, alg.n, p)[:, piv][:, :, piv]
            om_y = np.einsum("ai,nab,bj->nij", tinv, om, tinv) % p
            self.wq = np.ascontiguousarray(om_y[:, :, s:])
        else:
            self.wq = None

    def duals(self, qdim):
        return standard_subspaces(self.alg.p, self.k, self.k - qdim)

    def relation_dims(self, qdim):
        """dim N(C) for every C with dim(C/b) == qdim, in ``duals(qdim)`` order."""
        us = self.duals(qdim)
        cnt = us.shape[0]
        if self.dn_a == 0:
            return np.zeros(cnt, dtype=np.int64)
        u = self.k - qdim
        if u == 0:
            return np.full(cnt, self.dn_a, dtype=np.int64)
        out = np.empty(cnt, dtype=np.int64)
        p = self.alg.p
        for start in range(0, cnt, _CHUNK):
            chunk = us[start : start + _CHUNK]
            x = np.einsum("ntk,cuk->cntu", self.wq, chunk) % p
            x = x.reshape(chunk.shape[0], self.dn_a, -1)
            out[start : start + _CHUNK] = self.dn_a - kernels.batch_rank(x, p)
        return out

    def rel_predims(self, qdim):
        """delta(C/b) for every C with dim(C/b) == qdim."""
        return qdim - (self.relation_dims(qdim) - self.dn_b)

    def subspace(self, qdim, index):
        """Materialize the intermediate space with the given dual index."""
        p = self.alg.p
        if qdim == 0:
            return self.b
        u = self.duals(qdim)[index]
        quot = null_space(u, p, self.k) if u.shape[0] else np.eye(self.k, dtype=np.int64)
        s = self.b.dim
        y = np.zeros((quot.shape[0], self.a.dim), dtype=np.int64)
        y[:, s:] = quot
        vecs = y @ self.T % p @ self.a.basis % p
        return self.b.with_vectors(vecs)


class RelationTable:
    """Relative predimensions indexed by relation spaces R with N(b) <= R <= N(a).

    Every C between b and a has delta(C/b) >= delta(C_R/b) for R = N(C) and
    C_R = b + support(R), and C_R carries at least R.  So the value
    dim(C_R/b) - dim(R/N(b)) bounds delta(C_R/b) from above and its minimum
    over R equals the minimum of delta(C/b) over C.  Enumeration runs over
    subspaces of N(a)/N(b), which is usually far smaller than a/b.
    """

    def __init__(self, alg, b, a, cap=DEFAULT_ENUM_CAP):
        _check_sub(alg, b)
        _check_sub(alg, a)
        if not b <= a:
            raise ContainmentError("base is not contained in the ambient subspace")
        self.alg, self.b, self.a = alg, b, a
        rel_b = relations_of(alg, b)
        rel_a = relations_of(alg, a)
        self.dn_b, self.dn_a = rel_b.dim, rel_a.dim
        self.k = self.dn_a - self.dn_b
        if self.k > cap:
            raise EnumerationTooLarge("relation subspace enumeration (quotient dim)", self.k, cap)
        p, n = alg.p, alg.n
        comp = complement(rel_b, rel_a) if self.k else np.zeros((0, wedge_dim(n)), dtype=np.int64)
        self.comp = comp
        self.om = to_antisym(comp, n, p)

    def duals(self, qdim):
        return standard_subspaces(self.alg.p, self.k, qdim)

    def bounds(self, qdim):
        """dim(C_R/b) - qdim for every R with dim(R/N(b)) == qdim, in ``duals(qdim)`` order."""
        p, n = self.alg.p, self.alg.n
        us = self.duals(qdim)
        cnt = us.shape[0]
        if qdim == 0:
            return np.zeros(cnt, dtype=np.int64)
        s = self.b.dim
        out = np.empty(cnt, dtype=np.int64)
        for start in range(0, cnt, _CHUNK):
            chunk = us[start : start + _CHUNK]
            m = np.einsum("cdk,kij->cdij", chunk, self.om).reshape(chunk.shape[0], -1, n) % p
            if s:
                m = np.concatenate([np.broadcast_to(self.b.basis, (chunk.shape[0], s, n)), m], axis=1)
            out[start : start + _CHUNK] = kernels.batch_rank(np.ascontiguousarray(m), p) - s
        return out - qdim

    def subspace(self, qdim, index):
        """C_R for the R with the given index."""
        p, n = self.alg.p, self.alg.n
        if qdim == 0:
            return self.b
        rows = self.duals(qdim)[index] @ self.comp % p
        om = rows_of(to_antisym(rows, n, p), n)
        return self.b.with_vectors(om)


@dataclass
class KReport:
    ok: bool
    reason: str | None = None
    witness: object = None
    checked: int = 0


def check_predimension(alg, ambient=None, cap=DEFAULT_ENUM_CAP, prune=True):
    """Check delta(C) >= 1 for every nonzero subspace C of ``ambient``.

    With ``prune`` the search runs over nonzero relation spaces R inside
    N(ambient): a violating C can be shrunk to the support of N(C) without
    raising its predimension, and support(R) carries at least R.  Without
    ``prune`` every nonzero subspace of ``ambient`` is enumerated.
    """
    amb = alg.full if ambient is None else ambient
    zero = Subspace.zero(alg.p, alg.n)
    if prune:
        table = RelationTable(alg, zero, amb, cap=cap)
        values = table.bounds
    else:
        table = IntermediateTable(alg, zero, amb, cap=cap)
        values = table.rel_predims
    checked = 0
    for k in range(1, table.k + 1):
        deltas = values(k)
        checked += deltas.shape[0]
        bad = np.flatnonzero(deltas < 1)
        if bad.size:
            return KReport(False, "predimension", table.subspace(k, int(bad[0])), checked)
    return KReport(True, None, None, checked)


def in_class_K(alg, cap=DEFAULT_ENUM_CAP, prune=True):
    """Decide membership in class K.

    Condition (1): no nonzero decomposable element in N, by an exhaustive scan.
    Condition (2): every nonzero subspace has predimension >= 1, see
    :func:`check_predimension`.
    """
    found = find_decomposable(alg.relations, alg.n)
    if found is not None:
        return KReport(False, "decomposable", found)
    return check_predimension(alg, None, cap=cap, prune=prune)
