"""Free amalgams over strong subspaces and the growing workspace.

An algebra "over b" has its first s = dim b coordinates identified with the
echelon basis of b; the remaining coordinates are its complement.  The free
amalgam keeps both complements independent and adds no relations beyond
those of the two factors.
"""

import numpy as np

from nilalg.errors import AmalgamInvalid, BudgetExceeded, EnumerationTooLarge, PreconditionError
from nilalg.exterior import find_decomposable, induced_map, pad_wedge, pair_arrays, wedge_dim
from nilalg.fq_linalg import DEFAULT_ENUM_CAP, DEFAULT_P, Subspace, as_matrix, check_field, rows_of
from nilalg.liealg import GradedAlgebra, check_predimension, relations_of
from nilalg.strong import is_strong

DEFAULT_BUDGET = 24


class Embedding:
    """Injective linear map x -> x @ matrix from F_p^source_dim into a workspace."""

    __slots__ = ("matrix", "p")

    def __init__(self, matrix, p):
        self.matrix = as_matrix(matrix, p)
        self.matrix.setflags(write=False)
        self.p = p

    @property
    def source_dim(self):
        return self.matrix.shape[0]

    @property
    def target_dim(self):
        return self.matrix.shape[1]

    def apply(self, x):
        return np.asarray(x, dtype=np.int64) @ self.matrix % self.p

    @property
    def image(self):
        return Subspace(self.matrix, self.p, self.target_dim)

    def wedge_matrix(self):
        return induced_map(self.matrix, self.p)

    def is_injective(self):
        return self.image.dim == self.source_dim

    def is_relation_preserving(self, src, dst):
        """Relations of src map onto exactly the relations of dst inside the image."""
        img = self.apply(np.eye(self.source_dim, dtype=np.int64))
        mapped = Subspace(src.relations.basis @ self.wedge_matrix() % self.p, self.p, wedge_dim(dst.n))
        return mapped == relations_of(dst, Subspace(img, self.p, dst.n))


def _amalgamate(alg1, base, alg2):
    """Amalgamate alg2 (over base) into alg1 along ``base``; returns (alg, emb1, emb2)."""
    p = alg1.p
    s, n1, m2 = base.dim, alg1.n, alg2.n
    if alg2.p != p:
        raise PreconditionError("amalgam of algebras over different fields")
    if m2 < s:
        raise PreconditionError("extension has fewer coordinates than the base")
    n = n1 + m2 - s
    m1 = np.eye(n1, n, dtype=np.int64)
    m2_mat = np.zeros((m2, n), dtype=np.int64)
    m2_mat[:s, :n1] = base.basis
    m2_mat[s:, n1:] = np.eye(m2 - s, dtype=np.int64)
    emb1, emb2 = Embedding(m1, p), Embedding(m2_mat, p)
    # the two factors must induce the same relations on the base
    base2 = Subspace.coordinate(p, m2, range(s))
    seen = relations_of(alg2, base2).basis @ emb2.wedge_matrix() % p
    have = pad_wedge(relations_of(alg1, base).basis, n1, n)
    if Subspace(seen, p, wedge_dim(n)) != Subspace(have, p, wedge_dim(n)):
        raise PreconditionError("the two factors disagree on the relations of the base")
    rel = np.vstack([pad_wedge(alg1.relations.basis, n1, n), alg2.relations.basis @ emb2.wedge_matrix() % p])
    labels = None
    if alg1.labels is not None:
        labels = alg1.labels + tuple(alg2.label(i) for i in range(s, m2))
    alg = GradedAlgebra(p, n, Subspace(rows_of(rel, wedge_dim(n)), p, wedge_dim(n)), labels)
    return alg, emb1, emb2


def _fresh_square_free(alg, old_n):
    """No relation of alg involves e_i ^ e_j with both i, j >= old_n."""
    i, j = pair_arrays(alg.n)
    cols = (i >= old_n) & (j >= old_n)
    return not alg.relations.basis[:, cols].any()


def validate_amalgam(alg, old_n, cap=DEFAULT_ENUM_CAP):
    """Check class K for an amalgam whose first ``old_n`` coordinates form a K-member.

    Condition (1) is an exhaustive decomposable scan.  Condition (2) is
    certified without enumeration when the old part is strong in the amalgam
    and no relation pairs two new coordinates: a subspace meeting the old part
    inherits predimension >= 1, and one missing it carries no relations.
    Otherwise the pruned exhaustive check runs if it fits under the cap.
    Returns a status string for the second condition.
    """
    found = find_decomposable(alg.relations, alg.n)
    if found is not None:
        raise AmalgamInvalid("free amalgam has a commuting independent pair", found)
    old = Subspace.full(alg.p, old_n).pad(alg.n)
    if _fresh_square_free(alg, old_n):
        try:
            if is_strong(alg, old, cap=cap):
                return "certified"
        except EnumerationTooLarge:
            pass
    try:
        report = check_predimension(alg, cap=cap)
    except EnumerationTooLarge:
        return "unverified-above-cap"
    if not report.ok:
        raise AmalgamInvalid("free amalgam has a subspace of predimension < 1", report.witness)
    return "exhaustive"


def free_amalgam(a1, a2, s, cap=DEFAULT_ENUM_CAP, validate=True):
    """Free amalgam of two algebras over a common base on their first s coordinates.

    Coordinates of the result: the base, then a1's complement, then a2's.
    """
    base = Subspace.coordinate(a1.p, a1.n, range(s))
    alg, e1, e2 = _amalgamate(a1, base, a2)
    if validate:
        validate_amalgam(alg, a1.n, cap=cap)
    return alg, e1, e2


class Workspace:
    """A finite class-K algebra that only grows by free amalgams over strong subspaces."""

    def __init__(self, algebra=None, p=DEFAULT_P, budget=DEFAULT_BUDGET, cap=DEFAULT_ENUM_CAP):
        if algebra is None:
            algebra = GradedAlgebra.free(check_field(p), 0)
        self.algebra = algebra
        self.budget = budget
        self.cap = cap
        self.history = []

    @property
    def p(self):
        return self.algebra.p

    @property
    def n(self):
        return self.algebra.n

    def __repr__(self):
        return f"Workspace(n={self.n}, dim N={self.algebra.relations.dim}, steps={len(self.history)})"

    def snapshot(self):
        ws = Workspace(self.algebra, budget=self.budget, cap=self.cap)
        ws.history = list(self.history)
        return ws

    def embed_extension(self, base, ext, note="", check=True):
        """Grow by the free amalgam of ``ext`` (an algebra over ``base``) over ``base``.

        Returns the embedding of ``ext`` into the grown workspace.
        """
        p = self.p
        if not isinstance(base, Subspace):
            base = Subspace(as_matrix(base, p, self.n), p, self.n)
        s = base.dim
        new_n = self.n + ext.n - s
        if new_n > self.budget:
            raise BudgetExceeded(new_n, self.budget)
        if check:
            if not is_strong(self.algebra, base, cap=self.cap):
                raise PreconditionError("base is not strong in the workspace")
            if not is_strong(ext, Subspace.coordinate(p, ext.n, range(s)), cap=self.cap):
                raise PreconditionError("base is not strong in the extension")
        old_n = self.n
        alg, _, emb = _amalgamate(self.algebra, base, ext)
        status = validate_amalgam(alg, old_n, cap=self.cap)
        self.history.append(
            {
                "note": note,
                "base": base.basis.tolist(),
                "ambient_before": old_n,
                "ambient_after": new_n,
                "relations_added": alg.relations.dim - self.algebra.relations.dim,
                "condition2": status,
            }
        )
        self.algebra = alg
        return emb

    @classmethod
    def replay(cls, requests, p=DEFAULT_P, budget=DEFAULT_BUDGET, cap=DEFAULT_ENUM_CAP):
        """Rebuild a workspace from (base vectors, algebra over base) requests."""
        ws = cls(p=p, budget=budget, cap=cap)
        for base, ext in requests:
            ws.embed_extension(as_matrix(base, ws.p, ws.n), ext, note="replay")
        return ws
