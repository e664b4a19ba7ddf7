from itertools import product

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nilalg.errors import ContainmentError, DimensionError, EnumerationTooLarge, FieldError
from nilalg.fq_linalg import (
    Subspace,
    check_field,
    complement,
    enumerate_intermediate,
    gaussian_binomial,
    intersect,
    inverse,
    null_space,
    rank,
    rref,
    solve_left,
    standard_subspaces,
    subspace_count,
)
from oracles import span_dim, span_elements

primes = st.sampled_from([3, 5, 7, 11])


@st.composite
def matrices(draw, p=None, max_rows=5, max_cols=5):
    p = draw(primes) if p is None else p
    r = draw(st.integers(0, max_rows))
    c = draw(st.integers(1, max_cols))
    vals = draw(st.lists(st.integers(0, p - 1), min_size=r * c, max_size=r * c))
    return p, np.array(vals, dtype=np.int64).reshape(r, c)


def test_check_field_rejects_composites_and_two():
    for bad in (2, 4, 9, 13, 3.0):
        with pytest.raises(FieldError):
            check_field(bad)
    assert check_field(np.int64(7)) == 7


@given(matrices())
def test_rref_has_echelon_shape_and_same_row_space(pm):
    p, m = pm
    r = rref(m, p)
    if r.shape[0]:
        piv = [int(np.flatnonzero(row)[0]) for row in r]
        assert piv == sorted(piv) and len(set(piv)) == len(piv)
        for i, c in enumerate(piv):
            assert r[i, c] == 1
            assert np.count_nonzero(r[:, c]) == 1
    if p <= 5 and m.shape[0] <= 4:
        assert span_elements(r, p, m.shape[1]) == span_elements(m, p, m.shape[1])


@given(matrices(p=3, max_rows=4, max_cols=4))
def test_rank_matches_counting_oracle(pm):
    p, m = pm
    assert rank(m, p) == span_dim(m, p, m.shape[1])


@given(matrices())
def test_null_space_is_the_kernel(pm):
    p, m = pm
    ker = null_space(m, p, m.shape[1])
    assert not (m @ ker.T % p).any()
    assert ker.shape[0] + rank(m, p) == m.shape[1]


@given(primes, st.integers(1, 5), st.data())
def test_inverse_roundtrip(p, n, data):
    vals = data.draw(st.lists(st.integers(0, p - 1), min_size=n * n, max_size=n * n))
    m = np.array(vals, dtype=np.int64).reshape(n, n)
    if rank(m, p) < n:
        with pytest.raises(ValueError):
            inverse(m, p)
    else:
        assert np.array_equal(inverse(m, p) @ m % p, np.eye(n, dtype=np.int64))


@given(matrices(p=3, max_rows=3, max_cols=3), st.data())
def test_solve_left_returns_the_least_solution(pm, data):
    p, m = pm
    rows, cols = m.shape
    rhs = np.array(data.draw(st.lists(st.integers(0, p - 1), min_size=cols, max_size=cols)), dtype=np.int64)
    x, kern = solve_left(m, rhs, p)
    sols = [np.array(v) for v in product(range(p), repeat=rows) if np.array_equal(np.array(v, dtype=np.int64) @ m.reshape(rows, cols) % p, rhs)]
    if not sols:
        assert x is None
        return
    assert x is not None
    assert tuple(x) == min(tuple(int(c) for c in s) for s in sols)
    assert p ** kern.dim == len(sols)


@pytest.mark.parametrize("n,k,q,expected", [(4, 2, 3, 130), (6, 3, 3, 33880), (3, 1, 5, 31), (5, 0, 7, 1), (2, 3, 3, 0)])
def test_gaussian_binomial_known_values(n, k, q, expected):
    assert gaussian_binomial(n, k, q) == expected


def test_subspace_count_quotient_six():
    # all subspaces of F_3^6
    assert subspace_count(6, 3) == 56632


@pytest.mark.parametrize("p,k", [(3, 3), (3, 4), (5, 3)])
def test_standard_subspaces_enumerates_each_subspace_once(p, k):
    for d in range(k + 1):
        stack = standard_subspaces(p, k, d)
        assert stack.shape[0] == gaussian_binomial(k, d, p)
        keys = {Subspace(s, p, k).key() for s in stack}
        assert len(keys) == stack.shape[0]
        assert all(Subspace(s, p, k).dim == d for s in stack)


@given(matrices(p=3, max_rows=3, max_cols=4), st.data())
def test_sum_and_intersection_dimension_formula(pm, data):
    p, m = pm
    n = m.shape[1]
    r2 = data.draw(st.integers(0, 3))
    vals = data.draw(st.lists(st.integers(0, p - 1), min_size=r2 * n, max_size=r2 * n))
    u = Subspace(m, p, n)
    v = Subspace(np.array(vals, dtype=np.int64).reshape(r2, n), p, n)
    both = intersect(u, v)
    assert (u + v).dim + both.dim == u.dim + v.dim
    eu, ev = span_elements(u.basis, p, n), span_elements(v.basis, p, n)
    assert span_elements(both.basis, p, n) == eu & ev
    assert both <= u and both <= v and u <= u + v


def test_subspace_equality_is_structural():
    a = Subspace([[1, 1, 0], [0, 1, 1]], 3, 3)
    b = Subspace([[1, 2, 1], [0, 2, 2], [2, 2, 0]], 3, 3)
    assert a == b and hash(a) == hash(b)
    assert a.contains([1, 2, 1]) and not a.contains([1, 0, 0])


def test_coordinates_and_pad():
    s = Subspace([[1, 0, 2], [0, 1, 1]], 3, 3)
    x = np.array([2, 1, 2])
    c = s.coordinates(x)
    assert np.array_equal(c @ s.basis % 3, x)
    with pytest.raises(ContainmentError):
        s.coordinates([0, 0, 1])
    big = s.pad(5)
    assert big.dim == 2 and big.n == 5 and big.contains([2, 1, 2, 0, 0])
    with pytest.raises(DimensionError):
        s.pad(2)


def test_mixed_ambients_raise():
    with pytest.raises(DimensionError):
        Subspace.full(3, 2) + Subspace.full(3, 3)
    with pytest.raises(DimensionError):
        Subspace.full(3, 2) <= Subspace.full(5, 2)


@given(matrices(p=3, max_rows=2, max_cols=4), st.data())
def test_complement_completes_a_basis(pm, data):
    p, m = pm
    n = m.shape[1]
    b = Subspace(m, p, n)
    extra = np.array(data.draw(st.lists(st.integers(0, 2), min_size=2 * n, max_size=2 * n)), dtype=np.int64).reshape(2, n)
    a = b.with_vectors(extra)
    comp = complement(b, a)
    assert comp.shape[0] == a.dim - b.dim
    assert b.with_vectors(comp) == a if comp.shape[0] else b == a
    with pytest.raises(ContainmentError):
        complement(a.with_vectors(np.eye(n, dtype=np.int64)), b) if a.dim < n else complement(Subspace.full(p, n), Subspace.zero(p, n))


def test_enumerate_intermediate_counts_and_cap():
    b = Subspace.coordinate(3, 5, [0])
    a = Subspace.full(3, 5)
    found = list(enumerate_intermediate(b, a))
    assert len(found) == subspace_count(4, 3)
    assert len({c.key() for c in found}) == len(found)
    assert all(b <= c <= a for c in found)
    with pytest.raises(EnumerationTooLarge) as info:
        list(enumerate_intermediate(Subspace.zero(3, 8), Subspace.full(3, 8), cap=6))
    assert info.value.cap == 6 and info.value.required == 8


def test_elements_of_small_subspace():
    s = Subspace([[1, 2, 0]], 5, 3)
    el = s.elements()
    assert el.shape == (5, 3)
    assert {tuple(e) for e in el} == span_elements(s.basis, 5, 3)
