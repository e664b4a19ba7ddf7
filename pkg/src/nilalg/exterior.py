"""The exterior square of F_p^n in the basis e_i ^ e_j, i < j.

Pairs are flattened lexicographically: (0,1), (0,2), ..., (0,n-1), (1,2), ...
A wedge vector is a plain integer array of length n(n-1)/2; its associated
antisymmetric matrix W has ``W[i, j] = w_ij`` and ``W[j, i] = -w_ij``.
"""

from functools import lru_cache

import numpy as np

from nilalg import kernels
from nilalg.errors import DimensionError, DomainError, EnumerationTooLarge
from nilalg.fq_linalg import Subspace, as_matrix, as_vector, rows_of, rref, standard_subspaces

DECOMPOSABLE_SCAN_CAP = 10**6
_CHUNK = 4096


def wedge_dim(n):
    return n * (n - 1) // 2


@lru_cache(maxsize=None)
def pair_arrays(n):
    i, j = np.triu_indices(n, 1)
    i.setflags(write=False)
    j.setflags(write=False)
    return i, j


def pair_index(i, j, n):
    if not 0 <= i < j < n:
        raise ValueError(f"pair ({i}, {j}) is not an ordered pair below {n}")
    return i * n - i * (i + 1) // 2 + (j - i - 1)


def pairs(n):
    i, j = pair_arrays(n)
    return list(zip(i.tolist(), j.tolist()))


def wedge_rows(xs, ys, p):
    """Row-wise wedge of two ``(k, n)`` stacks."""
    xs = np.asarray(xs, dtype=np.int64)
    ys = np.asarray(ys, dtype=np.int64)
    n = xs.shape[-1]
    i, j = pair_arrays(n)
    return (xs[..., i] * ys[..., j] - xs[..., j] * ys[..., i]) % p


def wedge(x, y, p):
    x = as_vector(x, p)
    y = as_vector(y, p)
    if x.shape != y.shape:
        raise DimensionError("wedge of vectors from different ambients")
    return wedge_rows(x, y, p)


def from_terms(terms, p, n):
    """Wedge vector sum of c * e_i ^ e_j over triples (i, j, c); i > j is allowed."""
    w = np.zeros(wedge_dim(n), dtype=np.int64)
    for i, j, c in terms:
        if i == j:
            continue
        if i > j:
            i, j, c = j, i, -c
        w[pair_index(i, j, n)] += c
    return w % p


def to_terms(w, n):
    i, j = pair_arrays(n)
    w = np.asarray(w)
    return [(int(i[k]), int(j[k]), int(w[k])) for k in np.flatnonzero(w)]


def to_antisym(w, n, p):
    """Antisymmetric matrices for one wedge vector or a stack of them."""
    w = np.asarray(w, dtype=np.int64)
    i, j = pair_arrays(n)
    out = np.zeros(w.shape[:-1] + (n, n), dtype=np.int64)
    out[..., i, j] = w
    out[..., j, i] = -w
    return out % p


def from_antisym(m, p):
    m = np.asarray(m, dtype=np.int64)
    i, j = pair_arrays(m.shape[-1])
    return m[..., i, j] % p


def pad_wedge(w, n, n_new):
    """Re-embed wedge coordinates from F_p^n into F_p^{n_new} (zero padding)."""
    w = np.asarray(w, dtype=np.int64)
    if n_new == n:
        return w.copy()
    i, j = pair_arrays(n)
    idx = i * n_new - i * (i + 1) // 2 + (j - i - 1)
    out = np.zeros(w.shape[:-1] + (wedge_dim(n_new),), dtype=np.int64)
    out[..., idx] = w
    return out


def unpad_wedge(w, n_big, n):
    """Inverse of :func:`pad_wedge`; raises if ``w`` involves coordinates >= n."""
    w = np.asarray(w, dtype=np.int64)
    i, j = pair_arrays(n)
    idx = i * n_big - i * (i + 1) // 2 + (j - i - 1)
    rest = np.ones(w.shape[-1], dtype=bool)
    rest[idx] = False
    if w[..., rest].any():
        raise DimensionError(f"wedge vector is not supported on the first {n} coordinates")
    return w[..., idx].copy()


def wedge_square(b):
    """The subspace of wedges of b, spanned by b_i ^ b_j over its basis."""
    n = b.n
    if b.dim < 2:
        return Subspace.zero(b.p, wedge_dim(n)) if n >= 2 else Subspace.zero(b.p, 0)
    k = b.dim
    ii, jj = np.triu_indices(k, 1)
    return Subspace(wedge_rows(b.basis[ii], b.basis[jj], b.p), b.p, wedge_dim(n))


def induced_map(sigma, p):
    """Matrix of x^y -> sigma(x)^sigma(y) for ``sigma`` of shape (n_in, n_out)."""
    s = as_matrix(sigma, p)
    i, j = pair_arrays(s.shape[0])
    return wedge_rows(s[i], s[j], p)


def total_map(domain, images, n_out=None):
    """A total linear map F_p^n -> F_p^{n_out} agreeing with ``images`` on ``domain``.

    Row ``domain.pivots[r]`` of the result is ``images[r]``; all other rows are
    zero.  For x in the domain, ``x @ F`` equals the value prescribed on the
    echelon basis, because x = x[pivots] @ basis.
    """
    p = domain.p
    images = as_matrix(images, p)
    if images.shape[0] != domain.dim:
        raise DomainError(f"{images.shape[0]} images given for a domain of dimension {domain.dim}")
    n_out = images.shape[1] if n_out is None else n_out
    f = np.zeros((domain.n, n_out), dtype=np.int64)
    if domain.dim:
        f[list(domain.pivots)] = images
    return f


def leibniz_lift(domain, images, n_out=None):
    """Matrix of the derivation x^y -> f(x)^y + x^f(y) on wedge coordinates.

    ``images[r]`` is f applied to the r-th echelon basis vector of ``domain``;
    the images live in F_p^{n_out} with n_out >= domain.n (the domain is
    zero-padded into the target).  The returned matrix is only meaningful on
    the wedge square of the domain, where it does not depend on the basis.
    """
    p, n = domain.p, domain.n
    f = total_map(domain, images, n_out)
    n_out = f.shape[1]
    if n_out < n:
        raise DimensionError("target ambient smaller than the domain ambient")
    emb = np.zeros((n, n_out), dtype=np.int64)
    emb[np.arange(n), np.arange(n)] = 1
    i, j = pair_arrays(n)
    return (wedge_rows(f[i], emb[j], p) + wedge_rows(emb[i], f[j], p)) % p


def symplectic_decomposition(w, n, p):
    """Pairs (x_k, y_k) with w = sum_k x_k ^ y_k and the x's, y's independent.

    Greedy reduction: with c = W[i, j] != 0, the rows W_i / c and W_j give a
    decomposable term, and subtracting it lowers the rank by two.
    """
    w = as_vector(w, p, wedge_dim(n))
    xs, ys = [], []
    while w.any():
        m = to_antisym(w, n, p)
        k = int(np.flatnonzero(w)[0])
        i, j = pair_arrays(n)[0][k], pair_arrays(n)[1][k]
        inv = pow(int(m[i, j]), p - 2, p)
        x, y = m[i] * inv % p, m[j].copy()
        xs.append(x)
        ys.append(y)
        w = (w - wedge(x, y, p)) % p
    return rows_of(xs, n), rows_of(ys, n)


def antisym_rank(w, n, p):
    return int(kernels.batch_rank(to_antisym(w, n, p)[None], p)[0])


def is_decomposable(w, n, p):
    """Nonzero and equal to x ^ y for some vectors x, y."""
    return antisym_rank(w, n, p) == 2


def factor(w, n, p):
    """Return (v, u) with v ^ u == w for a decomposable w."""
    rows = rref(to_antisym(w, n, p), p)
    if rows.shape[0] != 2:
        raise ValueError("wedge vector is not decomposable")
    v, u = rows
    lead = int(np.flatnonzero(w)[0])
    lam = int(wedge(v, u, p)[lead]) * pow(int(w[lead]), p - 2, p) % p
    return v * pow(lam, p - 2, p) % p, u


def find_decomposable(n_sub, n):
    """Linearly independent (v, u) with v ^ u in ``n_sub``, or None.

    Scans the nonzero elements of ``n_sub`` up to scalars (leading coefficient
    one) in a fixed order and tests the rank of each antisymmetric matrix.
    """
    p, d = n_sub.p, n_sub.dim
    if n_sub.n != wedge_dim(n):
        raise DimensionError(f"subspace of a {n_sub.n}-dim space is not in the wedge square of F_p^{n}")
    if d == 0:
        return None
    if p**d > DECOMPOSABLE_SCAN_CAP:
        raise EnumerationTooLarge("decomposable scan (p**dim)", p**d, DECOMPOSABLE_SCAN_CAP)
    points = standard_subspaces(p, d, 1).reshape(-1, d)
    for start in range(0, len(points), _CHUNK):
        combos = points[start : start + _CHUNK] @ n_sub.basis % p
        ranks = kernels.batch_rank(to_antisym(combos, n, p), p)
        hit = np.flatnonzero(ranks == 2)
        if hit.size:
            return factor(combos[hit[0]], n, p)
    return None
