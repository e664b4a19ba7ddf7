"""Exact linear algebra over small prime fields.

Vectors are 1-d integer arrays (coordinate rows over a fixed ambient basis),
linear maps act on the right of row vectors: ``x -> x @ M``.  Every
:class:`Subspace` stores its basis in reduced row-echelon form, so equality
and hashing are structural.
"""

from functools import lru_cache
from itertools import combinations, product

import numpy as np

from nilalg import kernels
from nilalg.errors import ContainmentError, DimensionError, EnumerationTooLarge, FieldError

SUPPORTED_PRIMES = (3, 5, 7, 11)
DEFAULT_P = 3
DEFAULT_ENUM_CAP = 6


def check_field(p):
    if not isinstance(p, (int, np.integer)) or int(p) not in SUPPORTED_PRIMES:
        raise FieldError(f"modulus {p!r} is not one of the supported primes {SUPPORTED_PRIMES}")
    return int(p)


def as_vector(x, p, n=None):
    v = np.asarray(x, dtype=np.int64).reshape(-1) % p
    if n is not None and v.shape[0] != n:
        raise DimensionError(f"vector of length {v.shape[0]} in ambient dimension {n}")
    return v


def as_matrix(m, p, ncols=None):
    a = np.asarray(m, dtype=np.int64)
    if a.size == 0:
        cols = ncols if ncols is not None else (a.shape[1] if a.ndim == 2 else 0)
        return np.zeros((0, cols), dtype=np.int64)
    if a.ndim == 1:
        a = a.reshape(1, -1)
    if ncols is not None and a.shape[1] != ncols:
        raise DimensionError(f"matrix with {a.shape[1]} columns in ambient dimension {ncols}")
    return a % p


def rows_of(a, ncols):
    """Reshape to a stack of rows of length ``ncols``; safe when ``ncols`` is 0."""
    a = np.asarray(a, dtype=np.int64)
    if a.ndim >= 2 and a.shape[-1] != ncols:
        raise DimensionError(f"rows of length {a.shape[-1]} in ambient dimension {ncols}")
    count = a.size // ncols if ncols else (a.shape[0] if a.ndim > 1 else 0)
    if count * ncols != a.size:
        raise DimensionError(f"{a.size} entries do not form rows of length {ncols}")
    return a.reshape(count, ncols)


def rref(m, p):
    """Reduced row-echelon form with zero rows stripped."""
    p = check_field(p)
    a = as_matrix(m, p)
    if a.shape[0] == 0:
        return a
    return kernels.rref(a, p)[0]


def rank(m, p):
    a = as_matrix(m, p)
    if a.shape[0] == 0 or a.shape[1] == 0:
        return 0
    return int(kernels.batch_rank(a[None], p)[0])


def inverse(m, p):
    a = as_matrix(m, p)
    k = a.shape[0]
    if a.shape != (k, k):
        raise DimensionError("inverse of a non-square matrix")
    r, piv = kernels.rref(np.hstack([a, np.eye(k, dtype=np.int64)]), p)
    if piv[:k] != tuple(range(k)) or r.shape[0] < k:
        raise ValueError("singular matrix")
    return r[:k, k:].copy()


def null_space(m, p, ncols=None):
    """Rows spanning ``{v : m @ v = 0}``, in reduced echelon form."""
    a = as_matrix(m, p, ncols)
    n = a.shape[1]
    if a.shape[0] == 0:
        return np.eye(n, dtype=np.int64)
    r, piv = kernels.rref(a, p)
    free = [j for j in range(n) if j not in piv]
    out = np.zeros((len(free), n), dtype=np.int64)
    for row, j in enumerate(free):
        out[row, j] = 1
        for i, pc in enumerate(piv):
            out[row, pc] = -r[i, j] % p
    return rref(out, p) if len(free) else out


def solve_left(m, rhs, p):
    """Least solution x of ``x @ m == rhs`` and the solution kernel.

    Returns ``(x, kernel)`` where ``kernel`` is the :class:`Subspace` of
    homogeneous solutions and ``x`` is the lexicographically least solution
    (first coordinate most significant), or ``(None, kernel)`` if the system is
    inconsistent.
    """
    a = as_matrix(m, p)
    rows, cols = a.shape
    rhs = as_vector(rhs, p, cols)
    kern = Subspace(null_space(a.T, p, rows), p, rows) if rows else Subspace.zero(p, 0)
    if rows == 0:
        return (np.zeros(0, dtype=np.int64) if not rhs.any() else None), kern
    aug = np.hstack([a.T, rhs.reshape(-1, 1)])
    r, piv = kernels.rref(aug, p)
    if rows in piv:
        return None, kern
    x = np.zeros(rows, dtype=np.int64)
    for i, j in enumerate(piv):
        x[j] = r[i, -1]
    return kern.reduce(x), kern


def gaussian_binomial(n, k, q):
    """Number of k-dimensional subspaces of F_q^n."""
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def subspace_count(n, q):
    return sum(gaussian_binomial(n, k, q) for k in range(n + 1))


@lru_cache(maxsize=None)
def standard_subspaces(p, k, d):
    """All d-dimensional subspaces of F_p^k as a ``(count, d, k)`` stack of RREF bases.

    Order: pivot sets lexicographically, then free entries in ``itertools.product``
    order (last free position varies fastest).
    """
    mats = []
    for piv in combinations(range(k), d):
        free = [(i, j) for i in range(d) for j in range(piv[i] + 1, k) if j not in piv]
        base = np.zeros((d, k), dtype=np.int64)
        for i, pc in enumerate(piv):
            base[i, pc] = 1
        if not free:
            mats.append(base)
            continue
        vals = np.array(list(product(range(p), repeat=len(free))), dtype=np.int64)
        block = np.repeat(base[None], len(vals), axis=0)
        rows = np.array([f[0] for f in free])
        cols = np.array([f[1] for f in free])
        block[:, rows, cols] = vals
        mats.extend(block)
    if not mats:
        return np.zeros((0, d, k), dtype=np.int64)
    out = np.stack(mats)
    out.setflags(write=False)
    return out


class Subspace:
    """A subspace of F_p^n held by its reduced row-echelon basis."""

    __slots__ = ("p", "n", "basis", "pivots", "_hash")

    def __init__(self, vectors, p, n):
        p = check_field(p)
        a = as_matrix(vectors, p, n)
        if a.shape[0]:
            basis, piv = kernels.rref(a, p)
        else:
            basis, piv = np.zeros((0, n), dtype=np.int64), ()
        self._set(basis, piv, p, n)

    def _set(self, basis, pivots, p, n):
        basis = np.ascontiguousarray(basis, dtype=np.int64)
        basis.setflags(write=False)
        self.p = p
        self.n = n
        self.basis = basis
        self.pivots = tuple(int(c) for c in pivots)
        self._hash = None

    @classmethod
    def _from_rref(cls, basis, pivots, p, n):
        obj = cls.__new__(cls)
        obj._set(basis, pivots, p, n)
        return obj

    @classmethod
    def zero(cls, p, n):
        return cls._from_rref(np.zeros((0, n), dtype=np.int64), (), check_field(p), n)

    @classmethod
    def full(cls, p, n):
        return cls._from_rref(np.eye(n, dtype=np.int64), tuple(range(n)), check_field(p), n)

    @classmethod
    def coordinate(cls, p, n, indices):
        idx = sorted(set(indices))
        basis = np.zeros((len(idx), n), dtype=np.int64)
        for r, i in enumerate(idx):
            basis[r, i] = 1
        return cls._from_rref(basis, idx, check_field(p), n)

    @property
    def dim(self):
        return self.basis.shape[0]

    def __len__(self):
        return self.dim

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return (
            self.p == other.p
            and self.n == other.n
            and self.basis.shape == other.basis.shape
            and bool(np.array_equal(self.basis, other.basis))
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.p, self.n, self.basis.shape, self.basis.tobytes()))
        return self._hash

    def __repr__(self):
        rows = ", ".join(str(list(map(int, r))) for r in self.basis)
        return f"Subspace(p={self.p}, n={self.n}, basis=[{rows}])"

    def key(self):
        """Total order used for deterministic tie-breaking."""
        return (self.dim, tuple(int(v) for v in self.basis.reshape(-1)))

    def _compatible(self, other):
        if self.p != other.p or self.n != other.n:
            raise DimensionError(
                f"incompatible subspaces (p={self.p}, n={self.n}) vs (p={other.p}, n={other.n})"
            )

    def reduce(self, x):
        """Residual of ``x`` (vector or stack of rows) modulo this subspace."""
        x = np.asarray(x, dtype=np.int64) % self.p
        if self.dim == 0:
            return x
        piv = list(self.pivots)
        return (x - x[..., piv] @ self.basis) % self.p

    def contains(self, x):
        x = as_vector(x, self.p, self.n)
        return not self.reduce(x).any()

    def __contains__(self, x):
        return self.contains(x)

    def coordinates(self, x):
        """Coefficients of ``x`` on the echelon basis; raises if ``x`` is outside."""
        x = as_vector(x, self.p, self.n)
        if self.reduce(x).any():
            raise ContainmentError("vector is not in the subspace")
        return x[list(self.pivots)].copy()

    def issubspace(self, other):
        self._compatible(other)
        if self.dim > other.dim:
            return False
        return not other.reduce(self.basis).any()

    def __le__(self, other):
        return self.issubspace(other)

    def __add__(self, other):
        return subspace_sum(self, other)

    def __and__(self, other):
        return intersect(self, other)

    def pad(self, n_new):
        """Re-embed into F_p^{n_new} by zero padding on the right."""
        if n_new < self.n:
            raise DimensionError("cannot shrink the ambient space")
        if n_new == self.n:
            return self
        basis = np.zeros((self.dim, n_new), dtype=np.int64)
        basis[:, : self.n] = self.basis
        return Subspace._from_rref(basis, self.pivots, self.p, n_new)

    def with_vectors(self, vectors):
        extra = as_matrix(vectors, self.p, self.n)
        return Subspace(np.vstack([self.basis, extra]), self.p, self.n)

    def elements(self):
        """Every element, as a ``(p**dim, n)`` array; small subspaces only."""
        coeffs = np.array(list(product(range(self.p), repeat=self.dim)), dtype=np.int64)
        if self.dim == 0:
            return np.zeros((1, self.n), dtype=np.int64)
        return coeffs @ self.basis % self.p


def subspace_sum(u, v):
    u._compatible(v)
    if v.dim == 0 or v <= u:
        return u
    if u.dim == 0:
        return v
    return Subspace(np.vstack([u.basis, v.basis]), u.p, u.n)


def intersect(u, v):
    """Intersection by the Zassenhaus block elimination."""
    u._compatible(v)
    p, n = u.p, u.n
    if u.dim == 0 or v.dim == 0:
        return Subspace.zero(p, n)
    top = np.hstack([u.basis, u.basis])
    bottom = np.hstack([v.basis, np.zeros_like(v.basis)])
    r, _ = kernels.rref(np.vstack([top, bottom]), p)
    rows = r[~r[:, :n].any(axis=1), n:]
    return Subspace(rows, p, n)


def contains(u, x):
    return u.contains(x)


def complement(b, a):
    """Canonical complement rows of ``b`` inside ``a`` (echelon residues of a's basis)."""
    b._compatible(a)
    if not b <= a:
        raise ContainmentError("base is not contained in the ambient subspace")
    res = b.reduce(a.basis)
    res = res[res.any(axis=1)]
    if res.shape[0] == 0:
        return np.zeros((0, a.n), dtype=np.int64)
    return rref(res, a.p)


def enumerate_intermediate(b, a, cap=DEFAULT_ENUM_CAP, dims=None):
    """Yield every subspace C with ``b <= C <= a`` exactly once.

    ``dims`` optionally restricts the quotient dimensions dim(C/b) yielded.
    """
    b._compatible(a)
    if not b <= a:
        raise ContainmentError("base is not contained in the ambient subspace")
    comp = complement(b, a)
    k = comp.shape[0]
    if k > cap:
        raise EnumerationTooLarge("intermediate subspace enumeration (quotient dim)", k, cap)
    wanted = range(k + 1) if dims is None else [d for d in dims if 0 <= d <= k]
    for d in wanted:
        for s in standard_subspaces(b.p, k, d):
            if d == 0:
                yield b
                continue
            yield Subspace(np.vstack([b.basis, s @ comp % b.p]), b.p, b.n)
