"""The two-sorted cover over a finite workspace.

Sort Q is the algebra itself; sort S is the set of pairs (a, u) of degree-1
vectors with projection (a, u) -> a, translation b * (a, u) = (a, u + b) and
coordinatewise addition.  For W given by sum [x_i, y_i] = 0 the relation
T_W holds of points (x_i, u_i), (y_i, v_i) when both sum [x_i, y_i] and
sum [u_i, y_i] + [x_i, v_i] vanish.  A total graded derivation f gives the
map sigma_f : (a, u) -> (a, u + f(a)) which preserves all of this.
"""

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from nilalg.derivation import PartialDerivation, validate_derivation
from nilalg.errors import DimensionError, DomainError, NotOnW, PreconditionError
from nilalg.exterior import from_terms, symplectic_decomposition, wedge, wedge_dim
from nilalg.fq_linalg import DEFAULT_ENUM_CAP, Subspace, as_vector, null_space, rows_of
from nilalg.liealg import GradedAlgebra, reduce_wedge, relation_dim
from nilalg.strong import is_strong


@dataclass(frozen=True, eq=False)
class CoverPoint:
    a: np.ndarray = field(repr=False)
    u: np.ndarray = field(repr=False)

    def __post_init__(self):
        if np.shape(self.a) != np.shape(self.u):
            raise DimensionError("components of a cover point live in different ambients")

    def __eq__(self, other):
        if not isinstance(other, CoverPoint):
            return NotImplemented
        return bool(np.array_equal(self.a, other.a) and np.array_equal(self.u, other.u))

    def __hash__(self):
        return hash((self.a.tobytes(), self.u.tobytes()))

    def __repr__(self):
        return f"CoverPoint(a={self.a.tolist()}, u={self.u.tolist()})"


def point(a, u, p):
    return CoverPoint(as_vector(a, p), as_vector(u, p))


@dataclass(frozen=True)
class TWSpec:
    """W = {sum_{i<n} [x_i, y_i] = 0}."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("T_W needs at least one pair")


def project(s):
    return s.a


def act(b, s, p):
    return CoverPoint(s.a, (s.u + as_vector(b, p, s.u.shape[0])) % p)


def add(s, t, p):
    return CoverPoint((s.a + t.a) % p, (s.u + t.u) % p)


def _wedge_sum(alg, pairs):
    p = alg.p
    total = np.zeros(wedge_dim(alg.n), dtype=np.int64)
    for x, y in pairs:
        total += wedge(x, y, p)
    return reduce_wedge(alg, total % p)


def tw_conditions(alg, spec, xs, ys):
    """The two residues (sum [x_i, y_i], sum [u_i, y_i] + [x_i, v_i]) modulo N."""
    if len(xs) != spec.n or len(ys) != spec.n:
        raise DimensionError(f"T_W with {spec.n} pairs applied to {len(xs)} and {len(ys)} points")
    first = _wedge_sum(alg, [(x.a, y.a) for x, y in zip(xs, ys)])
    second = _wedge_sum(alg, [(x.u, y.a) for x, y in zip(xs, ys)] + [(x.a, y.u) for x, y in zip(xs, ys)])
    return first, second


def tw_holds(alg, spec, xs, ys):
    first, second = tw_conditions(alg, spec, xs, ys)
    return first.is_zero and second.is_zero


def sigma_f(f, s):
    """(a, u) -> (a, u + f(a)) for a total derivation f."""
    if not f.is_total:
        raise DomainError("sigma_f needs a derivation defined on the whole degree-1 part")
    return CoverPoint(s.a, (s.u + f.apply(s.a)) % f.p)


def killing_derivation(alg, a, bs, e, cap=DEFAULT_ENUM_CAP, check=True):
    """The derivation a -> e, b_i -> 0 on <a, b_1, ..., b_k>."""
    p, n = alg.p, alg.n
    a = as_vector(a, p, n)
    bs = rows_of(bs, n) % p
    e = as_vector(e, p, n)
    xs = np.vstack([a, bs])
    dom = Subspace(xs, p, n)
    if dom.dim != xs.shape[0]:
        raise PreconditionError("a, b_1, ..., b_k are not linearly independent")
    if relation_dim(alg, dom) != 0:
        raise PreconditionError("<a, b_1, ..., b_k> carries relations")
    if check and e.any():
        if dom.contains(e):
            raise PreconditionError("e lies in <a, b_1, ..., b_k>")
        if not is_strong(alg, dom, cap=cap):
            raise PreconditionError("<a, b_1, ..., b_k> is not strong")
        if not is_strong(alg, dom.with_vectors(e), cap=cap):
            raise PreconditionError("<a, b_1, ..., b_k, e> is not strong")
    ys = np.zeros_like(xs)
    ys[0] = e
    f = PartialDerivation.from_pairs(alg, xs, ys)
    if not validate_derivation(f).ok:
        raise PreconditionError("killing map is not a derivation")
    return f


def stabilizer_residual(alg, pts, shifts):
    """[a, e3] + [e1, c] + [e1, e3] + [b, e4] + [e2, d] + [e2, e4] modulo N.

    ``pts`` are four cover points (a, u), (b, v), (c, r), (d, s) with
    [a, c] + [b, d] = 0; the result vanishes iff the shifted projections
    still satisfy that equation.
    """
    p = alg.p
    a, b, c, d = (project(s) for s in pts)
    if not _wedge_sum(alg, [(a, c), (b, d)]).is_zero:
        raise NotOnW("points do not satisfy [a, c] + [b, d] = 0")
    e1, e2, e3, e4 = (as_vector(e, p, alg.n) for e in shifts)
    return _wedge_sum(alg, [(a, e3), (e1, c), (e1, e3), (b, e4), (e2, d), (e2, e4)])


def canonical_w_instance(p=3, block=1, extra=0):
    """Coordinates a, b, c, d, x_1..x_block, t_1..t_extra with N = <a^c + b^d>."""
    n = 4 + block + extra
    labels = ["a", "b", "c", "d"] + [f"x{i + 1}" for i in range(block)] + [f"t{i + 1}" for i in range(extra)]
    rel = from_terms([(0, 2, 1), (1, 3, 1)], p, n)
    return GradedAlgebra(p, n, [rel], labels)


def stabilizer_scan(alg, pts, block):
    """Residuals over every shift tuple with entries in ``block``; returns zero tuples."""
    elems = block.elements()
    zeros = []
    total = 0
    for idx in product(range(len(elems)), repeat=4):
        total += 1
        if stabilizer_residual(alg, pts, [elems[i] for i in idx]).is_zero:
            zeros.append(tuple(elems[i].tolist() for i in idx))
    return total, zeros


def tw_solution_space(alg, xs, ys):
    """Basis of all (u_1..u_n, v_1..v_n) making the second T_W condition vanish.

    Rows are flattened as (u_1, ..., u_n, v_1, ..., v_n).
    """
    p, n = alg.p, alg.n
    k = len(xs)
    images = []
    for slot in range(2 * k):
        for coord in range(n):
            unit = np.zeros(n, dtype=np.int64)
            unit[coord] = 1
            if slot < k:
                w = wedge(unit, ys[slot], p)
            else:
                w = wedge(xs[slot - k], unit, p)
            images.append(alg.relations.reduce(w))
    m = np.array(images, dtype=np.int64).reshape(2 * k * n, -1)
    return null_space(m.T, p, 2 * k * n)


def tw_instances(alg, max_pairs=2, samples=2, off_samples=1, rng=None):
    """T_W instances for n <= max_pairs built from every element of N.

    Each nonzero element w of N with rank <= 2 * max_pairs is split as
    sum x_i ^ y_i (padded with zero pairs); the zero element contributes
    the all-zero projections.  For each projection tuple, ``samples`` random
    (u, v) on T_W and ``off_samples`` random (u, v) are drawn.  Yields
    (spec, xs, ys) with cover points.
    """
    p, n = alg.p, alg.n
    rng = np.random.default_rng(0) if rng is None else rng
    elems = alg.relations.elements()
    for w in elems:
        px, py = symplectic_decomposition(w, n, p)
        if px.shape[0] > max_pairs:
            continue
        for k in range(max(1, px.shape[0]), max_pairs + 1):
            xs = np.zeros((k, n), dtype=np.int64)
            ys = np.zeros((k, n), dtype=np.int64)
            xs[: px.shape[0]] = px
            ys[: py.shape[0]] = py
            sol = tw_solution_space(alg, xs, ys)
            draws = []
            for _ in range(samples):
                coef = rng.integers(0, p, sol.shape[0])
                draws.append(coef @ sol % p if sol.shape[0] else np.zeros(2 * k * n, dtype=np.int64))
            for _ in range(off_samples):
                draws.append(rng.integers(0, p, 2 * k * n))
            for flat in draws:
                yield _instance(xs, ys, flat)
    # random projections, mostly off W
    for k in range(1, max_pairs + 1):
        for _ in range(samples):
            xs = rng.integers(0, p, (k, n))
            ys = rng.integers(0, p, (k, n))
            yield _instance(xs, ys, rng.integers(0, p, 2 * k * n))


def _instance(xs, ys, flat):
    k, n = xs.shape
    uv = np.asarray(flat).reshape(2 * k, n)
    xp = [CoverPoint(xs[i], uv[i]) for i in range(k)]
    yp = [CoverPoint(ys[i], uv[k + i]) for i in range(k)]
    return TWSpec(k), xp, yp


def automorphism_check(alg, f, g=None, max_pairs=2, samples=2, off_samples=1, seed=0):
    """Check sigma_f on T_W instances in both directions, and sigma_f o sigma_g = sigma_{f+g}.

    Returns counts of instances examined and failures.
    """
    rng = np.random.default_rng(seed)
    neg = -f
    checked = preserved = 0
    for spec, xs, ys in tw_instances(alg, max_pairs, samples, off_samples, rng):
        before = tw_holds(alg, spec, xs, ys)
        after = tw_holds(alg, spec, [sigma_f(f, s) for s in xs], [sigma_f(f, s) for s in ys])
        back = tw_holds(alg, spec, [sigma_f(neg, s) for s in xs], [sigma_f(neg, s) for s in ys])
        checked += 1
        preserved += before == after == back
    hom_checked = hom_ok = 0
    if g is not None:
        fg = f + g
        for _ in range(64):
            s = CoverPoint(rng.integers(0, alg.p, alg.n), rng.integers(0, alg.p, alg.n))
            hom_checked += 1
            hom_ok += sigma_f(f, sigma_f(g, s)) == sigma_f(fg, s)
    return {"instances": checked, "preserved": preserved, "homomorphism_points": hom_checked, "homomorphism_ok": hom_ok}


def orbit_images(fs, s):
    """Images of one cover point under several sigma_f."""
    return [sigma_f(f, s) for f in fs]
