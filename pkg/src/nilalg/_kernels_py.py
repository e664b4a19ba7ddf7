"""Pure numpy kernels; the reference implementation the compiled core must match."""

import numpy as np


def _inverses(p):
    inv = np.zeros(p, dtype=np.int64)
    for x in range(1, p):
        inv[x] = pow(x, p - 2, p)
    return inv


def rref(m, p):
    """Reduced row-echelon form of ``m`` over F_p.

    Returns ``(rows, pivots)`` where ``rows`` holds only the nonzero rows.
    """
    a = np.array(m, dtype=np.int64) % p
    if a.ndim != 2:
        raise ValueError("rref expects a 2-d array")
    nrows, ncols = a.shape
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        k = r + nz[0]
        if k != r:
            a[[r, k]] = a[[k, r]]
        a[r] = a[r] * pow(int(a[r, c]), p - 2, p) % p
        col = a[:, c].copy()
        col[r] = 0
        nzr = np.flatnonzero(col)
        if nzr.size:
            a[nzr] = (a[nzr] - np.outer(col[nzr], a[r])) % p
        pivots.append(c)
        r += 1
    return a[:r].copy(), tuple(pivots)


def batch_rank(mats, p):
    """Rank over F_p of every matrix in a ``(batch, rows, cols)`` stack."""
    a = np.array(mats, dtype=np.int64) % p
    nb, nrows, ncols = a.shape
    rank = np.zeros(nb, dtype=np.int64)
    if nb == 0 or nrows == 0 or ncols == 0:
        return rank
    inv = _inverses(p)
    idx = np.arange(nrows)
    for c in range(ncols):
        mask = (a[:, :, c] != 0) & (idx[None, :] >= rank[:, None])
        has = mask.any(axis=1)
        if not has.any():
            continue
        sel = np.flatnonzero(has)
        piv = mask[sel].argmax(axis=1)
        tgt = rank[sel]
        prow = a[sel, piv].copy()
        a[sel, piv] = a[sel, tgt]
        prow = prow * inv[prow[:, c]][:, None] % p
        a[sel, tgt] = prow
        below = a[sel, :, c] * (idx[None, :] > tgt[:, None])
        a[sel] = (a[sel] - below[:, :, None] * prow[:, None, :]) % p
        rank[sel] += 1
    return rank
