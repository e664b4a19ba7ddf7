"""Strongness, self-sufficient closure and towers of minimal strong extensions."""

from dataclasses import dataclass, field

import numpy as np

from nilalg.errors import ClassificationError, ContainmentError, EnumerationTooLarge
from nilalg.exterior import pair_arrays, to_antisym
from nilalg.fq_linalg import DEFAULT_ENUM_CAP, Subspace, complement, inverse
from nilalg.liealg import IntermediateTable, RelationTable, rel_predim, relation_dim, relations_of, relevant_ambient

TRANSCENDENTAL = "transcendental"
ALGEBRAIC = "algebraic"
PREALGEBRAIC = "prealgebraic"


@dataclass(frozen=True)
class ExtensionKind:
    """Type of a minimal strong extension b <= a.

    For algebraic steps ``vector`` is the adjoined a0 and ``relation`` the
    generator e = a0 ^ b0 + c of N(a) over N(b), with ``base_vector`` = b0 and
    ``remainder`` = c in wedge^2 b.
    """

    tag: str
    vector: np.ndarray | None = field(default=None, repr=False, compare=False)
    relation: np.ndarray | None = field(default=None, repr=False, compare=False)
    base_vector: np.ndarray | None = field(default=None, repr=False, compare=False)
    remainder: np.ndarray | None = field(default=None, repr=False, compare=False)


@dataclass
class Tower:
    steps: list
    kinds: list

    def __len__(self):
        return len(self.kinds)


def _ambient(alg, a):
    return alg.full if a is None else a


def _table(alg, b, a, cap):
    """The cheaper of the vector-side and relation-side enumerations of b <= C <= a."""
    k_vec = a.dim - b.dim
    k_rel = relation_dim(alg, a) - relation_dim(alg, b)
    order = (RelationTable, IntermediateTable) if k_rel <= k_vec else (IntermediateTable, RelationTable)
    try:
        return order[0](alg, b, a, cap=cap)
    except EnumerationTooLarge:
        return order[1](alg, b, a, cap=cap)


def _values(table, q):
    if isinstance(table, RelationTable):
        return table.bounds(q)
    return table.rel_predims(q)


def _top(table):
    if isinstance(table, RelationTable):
        return table.k
    return min(table.k, table.dn_a - table.dn_b)


def is_strong(alg, b, a=None, cap=DEFAULT_ENUM_CAP, prune=True):
    """True iff delta(C/b) >= 0 for every b <= C <= a.

    With ``prune`` the search runs inside :func:`relevant_ambient`, over
    whichever of intermediate subspaces or intermediate relation spaces is
    smaller; only quotient dimensions up to dim N(a) - dim N(b) can fail.
    Without ``prune`` every intermediate subspace is examined.
    """
    a = _ambient(alg, a)
    if not b <= a:
        raise ContainmentError("strongness needs b contained in a")
    if prune:
        a = relevant_ambient(alg, b, a)
    if b == a:
        return True
    if prune:
        table = _table(alg, b, a, cap)
        top = _top(table)
    else:
        table = IntermediateTable(alg, b, a, cap=cap)
        top = table.k
    for q in range(1, top + 1):
        if (_values(table, q) < 0).any():
            return False
    return True


def self_sufficient_closure(alg, b, a=None, cap=DEFAULT_ENUM_CAP):
    """Smallest subspace containing b that is strong in a.

    Among all b <= C <= a it is the one of least predimension, ties broken by
    least dimension and then by the echelon basis.
    """
    a = _ambient(alg, a)
    if not b <= a:
        raise ContainmentError("closure needs b contained in a")
    a = relevant_ambient(alg, b, a)
    if b == a:
        return a
    table = _table(alg, b, a, cap)
    # on either side a minimizer at level q has dimension dim b + q + delta
    best, where = None, []
    for q in range(table.k + 1):
        deltas = _values(table, q)
        m = int(deltas.min())
        if best is None or m < best:
            best, where = m, [(q, i) for i in np.flatnonzero(deltas == m)]
    q0 = min(q for q, _ in where)
    cands = {c.key(): c for c in (table.subspace(q, int(i)) for q, i in where if q == q0)}
    return cands[min(cands)]


def strong_intermediates(alg, b, a=None, cap=DEFAULT_ENUM_CAP):
    """Every C with b <= C <= a that is strong in a (exhaustive; small cases)."""
    a = _ambient(alg, a)
    table = IntermediateTable(alg, b, a, cap=cap)
    out = []
    for q in range(table.k + 1):
        for i in range(table.duals(q).shape[0]):
            c = table.subspace(q, i)
            if is_strong(alg, c, a, cap=cap):
                out.append(c)
    return out


def _strong_at(alg, table, q, a, cap):
    """Intermediates with quotient dimension q that are strong in a."""
    deltas = table.rel_predims(q)
    top = rel_predim(alg, a, table.b)
    out = []
    for i in np.flatnonzero(deltas <= top):
        c = table.subspace(q, int(i))
        if deltas[i] == 0 or is_strong(alg, c, a, cap=cap):
            out.append(c)
    return out


def is_minimal_extension(alg, b, a, cap=DEFAULT_ENUM_CAP):
    """b <= a strong and no proper intermediate space strong in a."""
    if b == a or not is_strong(alg, b, a, cap=cap):
        return False
    table = IntermediateTable(alg, b, a, cap=cap)
    return not any(_strong_at(alg, table, q, a, cap) for q in range(1, table.k))


def minimal_step(alg, b, a, cap=DEFAULT_ENUM_CAP):
    """Least (dimension, then echelon basis) proper superset of b strong in a."""
    table = IntermediateTable(alg, b, a, cap=cap)
    for q in range(1, table.k + 1):
        found = _strong_at(alg, table, q, a, cap)
        if found:
            return min(found, key=Subspace.key)
    raise ContainmentError("no strong extension found; is b a proper subspace of a?")


def minimal_tower(alg, b, a=None, cap=DEFAULT_ENUM_CAP):
    a = _ambient(alg, a)
    if not is_strong(alg, b, a, cap=cap):
        raise ClassificationError("minimal_tower needs b strong in a")
    steps, kinds = [b], []
    cur = b
    while cur != a:
        nxt = minimal_step(alg, cur, a, cap=cap)
        kinds.append(classify_step(alg, cur, nxt, cap=cap, check_minimal=False))
        steps.append(nxt)
        cur = nxt
    return Tower(steps, kinds)


def split_relation(alg, b, a0, e):
    """Write e in wedge^2 (b + <a0>) as a0 ^ b0 + c with b0 in b and c in wedge^2 b."""
    p, n = alg.p, alg.n
    w = to_antisym(e, n, p)
    # contraction with a functional vanishing on b and equal to 1 on a0
    phi = complement_functional(b, a0)
    b0 = (-(w @ phi)) % p
    i, j = pair_arrays(n)
    a0b0 = (np.outer(a0, b0) - np.outer(b0, a0))[i, j] % p
    c = (np.asarray(e) - a0b0) % p
    return b0, c


def complement_functional(b, a0):
    """A functional (column) vanishing on b with value 1 on a0."""
    p, n = b.p, b.n
    full = b.with_vectors(a0)
    # solve rows @ phi = (0, ..., 0, 1) on the pivot columns of b + <a0>
    rows = np.vstack([b.basis, np.asarray(a0, dtype=np.int64).reshape(1, -1)]) % p
    piv = list(full.pivots)
    inv = inverse(rows[:, piv], p)
    target = np.zeros(rows.shape[0], dtype=np.int64)
    target[-1] = 1
    phi = np.zeros(n, dtype=np.int64)
    phi[piv] = inv @ target % p
    return phi


def classify_step(alg, b, a, cap=DEFAULT_ENUM_CAP, check_minimal=True):
    if not b <= a or b == a:
        raise ClassificationError("classify_step needs a proper extension b < a")
    if check_minimal and not is_minimal_extension(alg, b, a, cap=cap):
        raise ClassificationError("extension is not a minimal strong extension")
    codim = a.dim - b.dim
    dd = rel_predim(alg, a, b)
    if codim == 1:
        a0 = complement(b, a)[0]
        if dd == 1:
            return ExtensionKind(TRANSCENDENTAL, vector=a0)
        if dd == 0:
            rel_b = relations_of(alg, b)
            extra = complement(rel_b, relations_of(alg, a))
            e = extra[0]
            b0, _ = split_relation(alg, b, a0, e)
            # scale so that b0 has leading coefficient one
            e = e * pow(int(b0[np.flatnonzero(b0)[0]]), alg.p - 2, alg.p) % alg.p
            b0, c = split_relation(alg, b, a0, e)
            return ExtensionKind(ALGEBRAIC, vector=a0, relation=e, base_vector=b0, remainder=c)
    elif dd == 0:
        return ExtensionKind(PREALGEBRAIC)
    raise ClassificationError(
        f"minimal extension of codimension {codim} with predimension increment {dd} is outside the class-K trichotomy"
    )
