from itertools import product

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nilalg import io
from nilalg.amalgam import Workspace
from nilalg.derivation import (
    CaseA,
    ExtensionProblem,
    InK,
    PartialDerivation,
    canonical_witness,
    check_delta_lower_bound,
    check_dimension_equality,
    check_indep_wedges,
    check_intersection,
    check_minimal_strong,
    classify_pseudosolution,
    decompose_witness,
    derivation_space,
    extend_derivation,
    free_pseudosolution,
    solve_case_A,
    totalize,
    validate_derivation,
)
from nilalg.errors import DomainError, PreconditionError
from nilalg.exterior import from_terms, wedge_dim
from nilalg.fq_linalg import Subspace
from nilalg.generators import (
    planted_case_a,
    random_driver_script,
    random_extension_problem,
    random_intermediate,
    random_k_algebra,
)
from nilalg.liealg import GradedAlgebra, in_class_K
from nilalg.strong import is_strong
from oracles import span_elements, wedge_vec


def oracle_is_derivation(alg, xs, ys):
    """Every element of N inside wedge^2 <xs> is sent into N by the Leibniz rule.

    Elements of wedge^2 <xs> are enumerated as coefficient tuples over the
    pairs x_i ^ x_j, so nothing relies on a basis change.
    """
    p, n = alg.p, alg.n
    m = wedge_dim(n)
    rels = span_elements(alg.relations.basis, p, m) if alg.relations.dim else {(0,) * m}
    k = len(xs)
    idx = [(i, j) for i in range(k) for j in range(i + 1, k)]
    for coef in product(range(p), repeat=len(idx)):
        w = np.zeros(m, dtype=np.int64)
        img = np.zeros(m, dtype=np.int64)
        for c, (i, j) in zip(coef, idx):
            w += c * wedge_vec(xs[i], xs[j], n, p)
            img += c * (wedge_vec(ys[i], xs[j], n, p) + wedge_vec(xs[i], ys[j], n, p))
        if tuple(int(v) for v in w % p) in rels and tuple(int(v) for v in img % p) not in rels:
            return False
    return True


def oracle_total_count(alg):
    """Number of n x n matrices D whose Leibniz lift sends every element of N into N.

    All p^(n*n) matrices are tested at once; lift(e_i ^ e_j) = D_i ^ e_j + e_i ^ D_j.
    """
    p, n = alg.p, alg.n
    m = wedge_dim(n)
    rels = np.array(sorted(span_elements(alg.relations.basis, p, m)), dtype=np.int64)
    codes = rels @ (p ** np.arange(m))
    mats = np.array(list(product(range(p), repeat=n * n)), dtype=np.int64).reshape(-1, n, n)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    ok = np.ones(mats.shape[0], dtype=bool)
    for w in rels:
        img = np.zeros((mats.shape[0], m), dtype=np.int64)
        for c, (i, j) in zip(w, pairs):
            if not c:
                continue
            for col, (k, l) in enumerate(pairs):
                # D_i ^ e_j + e_i ^ D_j at the pair (k, l)
                t = mats[:, i, k] * (l == j) - mats[:, i, l] * (k == j)
                t += (k == i) * mats[:, j, l] - (l == i) * mats[:, j, k]
                img[:, col] += c * t
        ok &= np.isin(img % p @ (p ** np.arange(m)), codes)
    return int(ok.sum())


@st.composite
def partial_maps(draw, max_n=4):
    p = 3
    n = draw(st.integers(2, max_n))
    m = wedge_dim(n)
    r = draw(st.integers(0, min(m, 2)))
    rel = draw(st.lists(st.integers(0, p - 1), min_size=r * m, max_size=r * m))
    alg = GradedAlgebra(p, n, np.array(rel, dtype=np.int64).reshape(r, m))
    k = draw(st.integers(1, min(n, 3)))
    xs = np.array(draw(st.lists(st.integers(0, p - 1), min_size=k * n, max_size=k * n)), dtype=np.int64).reshape(k, n)
    ys = np.array(draw(st.lists(st.integers(0, p - 1), min_size=k * n, max_size=k * n)), dtype=np.int64).reshape(k, n)
    dom = Subspace(xs, p, n)
    if dom.dim == 0:
        return alg, PartialDerivation.zero(alg)
    # reuse the random values on the echelon basis so the map is consistent
    return alg, PartialDerivation(alg, dom, ys[: dom.dim])


@given(partial_maps())
def test_validate_matches_oracle(case):
    alg, f = case
    assert validate_derivation(f).ok == oracle_is_derivation(alg, f.domain.basis, f.images)


@given(partial_maps())
def test_witness_is_a_violated_relation(case):
    alg, f = case
    rep = validate_derivation(f)
    if not rep.ok:
        assert alg.relations.contains(rep.witness)
        assert not alg.relations.contains(f.apply_wedge(rep.witness))


def test_from_pairs_accepts_consistent_dependent_values():
    alg = GradedAlgebra.free(3, 3)
    xs = [[1, 0, 0], [0, 1, 0], [1, 1, 0]]
    ys = [[0, 0, 1], [1, 0, 0], [1, 0, 1]]
    f = PartialDerivation.from_pairs(alg, xs, ys)
    assert f.domain.dim == 2
    for x, y in zip(xs, ys):
        assert f(x).tolist() == y


def test_from_pairs_rejects_inconsistent_values():
    alg = GradedAlgebra.free(3, 3)
    with pytest.raises(DomainError):
        PartialDerivation.from_pairs(alg, [[1, 0, 0], [2, 0, 0]], [[0, 1, 0], [0, 1, 0]])
    with pytest.raises(DomainError):
        PartialDerivation.from_pairs(alg, [[1, 0, 0]], [])


def test_arithmetic_rebase_restrict():
    alg = GradedAlgebra.free(5, 3)
    dom = Subspace.coordinate(5, 3, [0, 1])
    f = PartialDerivation(alg, dom, [[1, 2, 3], [0, 4, 1]])
    g = PartialDerivation(alg, dom, [[4, 3, 2], [1, 1, 4]])
    s = f + g
    x = np.array([2, 3, 0])
    assert s(x).tolist() == ((f(x) + g(x)) % 5).tolist()
    assert (f + (-f)) == PartialDerivation.zero(alg, dom)
    big = alg.pad(5)
    r = f.rebase(big)
    assert r(np.array([2, 3, 0, 0, 0])).tolist() == f(x).tolist() + [0, 0]
    line = Subspace.coordinate(5, 3, [1])
    assert f.restrict(line).images.tolist() == [[0, 4, 1]]
    with pytest.raises(DomainError):
        f.restrict(Subspace.coordinate(5, 3, [2]))
    with pytest.raises(DomainError):
        f + PartialDerivation.zero(alg)


def test_totalize_extends_and_kernel_vanishes():
    rng = np.random.default_rng(5)
    for _ in range(25):
        alg = random_k_algebra(rng, 3, int(rng.integers(2, 6)))
        f = PartialDerivation.zero(alg, Subspace.coordinate(3, alg.n, [0]))
        total, kern = totalize(f, return_kernel=True)
        assert total.is_total and validate_derivation(total).ok
        assert not total(np.eye(alg.n, dtype=np.int64)[0]).any()
        for mat in kern:
            d = PartialDerivation(alg, alg.full, mat)
            assert validate_derivation(d).ok
            assert not d(np.eye(alg.n, dtype=np.int64)[0]).any()


def test_totalize_rejects_non_extendable_map():
    # with e0 ^ e1 in N, e0 -> e2 leaves an e2 ^ e1 term that no choice on e1 cancels
    p, n = 3, 3
    alg = GradedAlgebra(p, n, [from_terms([(0, 1, 1)], p, n)])
    f = PartialDerivation(alg, Subspace.coordinate(p, n, [0]), [[0, 0, 1]])
    assert validate_derivation(f).ok
    with pytest.raises(PreconditionError):
        totalize(f)


@pytest.mark.parametrize("seed", range(8))
def test_derivation_space_dimension_matches_brute_force(seed):
    rng = np.random.default_rng(100 + seed)
    n = 3
    r = int(rng.integers(0, 3))
    alg = GradedAlgebra(3, n, rng.integers(0, 3, (r, wedge_dim(n))))
    assert 3 ** len(derivation_space(alg)) == oracle_total_count(alg)


def test_worked_example_case_a():
    # b0, b1, b2, a with a ^ b0 + b1 ^ b2 in N and f = projection onto b0
    p, n = 3, 4
    e = from_terms([(3, 0, 1), (1, 2, 1)], p, n)
    alg = GradedAlgebra(p, n, [e])
    base = Subspace.coordinate(p, n, range(3))
    f = PartialDerivation(alg, base, [[1, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]])
    prob = ExtensionProblem(alg, base, alg.full, f)
    ps = free_pseudosolution(prob)
    witness = classify_pseudosolution(ps)
    assert isinstance(witness, CaseA)
    v0, v1 = canonical_witness(ps, witness)
    assert v0.tolist() == [0, 0, 0, 1, 1] and v1.tolist() == [1, 0, 0, 0, 0]
    e_found, c = decompose_witness(ps, v0, v1)
    assert e_found.tolist() == e.tolist()
    assert not c.any()
    g = solve_case_A(prob, ps, witness)
    assert g([0, 0, 0, 1]).tolist() == [0, 0, 0, 2]
    assert not g.apply_wedge(e).any()
    assert validate_derivation(g).ok


def test_lemma_checks_on_random_problems():
    rng = np.random.default_rng(2024)
    for _ in range(40):
        prob = random_extension_problem(rng)
        ps = free_pseudosolution(prob)
        a_prime = random_intermediate(rng, prob)
        assert check_indep_wedges(ps, a_prime)
        assert check_intersection(ps)
        assert check_dimension_equality(ps, a_prime)
        assert check_minimal_strong(ps)
        if in_class_K(prob.alg).ok:
            assert check_delta_lower_bound(ps)


def test_pseudosolution_extends_f():
    rng = np.random.default_rng(9)
    for _ in range(20):
        prob = random_extension_problem(rng)
        ps = free_pseudosolution(prob)
        m = ps.local.n
        for x in prob.base.basis:
            xp = np.pad(x, (0, m - prob.alg.n))
            assert ps.extended_f(xp).tolist() == np.pad(prob.f(x), (0, m - prob.alg.n)).tolist()
        assert validate_derivation(ps.extended_f).ok


def test_planted_case_a_instances():
    rng = np.random.default_rng(77)
    for _ in range(30):
        prob, a0 = planted_case_a(rng)
        assert validate_derivation(prob.f).ok
        ps = free_pseudosolution(prob)
        witness = classify_pseudosolution(ps)
        assert isinstance(witness, CaseA)
        g = solve_case_A(prob, ps, witness)
        assert validate_derivation(g).ok
        assert g.domain == prob.target
        assert g.image_space <= prob.target + prob.f.image_space
        for x, y in zip(prob.base.basis, prob.f.images):
            assert g(x).tolist() == y.tolist()


def test_free_base_free_extension_is_in_K():
    alg = GradedAlgebra.free(3, 3)
    base = Subspace.coordinate(3, 3, [0, 1])
    f = PartialDerivation(alg, base, [[0, 1, 0], [0, 0, 0]])
    ps = free_pseudosolution(ExtensionProblem(alg, base, alg.full, f))
    assert isinstance(classify_pseudosolution(ps), InK)
    assert ps.k == 1 and ps.algebra.n == 4


def test_extend_transcendental_zero_map_grows_workspace():
    ws = Workspace(GradedAlgebra.free(3, 3))
    f = PartialDerivation.zero(ws.algebra, Subspace.coordinate(3, 3, [0]))
    trace = []
    g = extend_derivation(ws, f, [0, 1, 0], trace=trace)
    assert g.domain.contains(np.pad([0, 1, 0], (0, ws.n - 3)))
    assert trace[-1]["case"] == "amalgam-embed"
    assert ws.n == 4
    assert validate_derivation(g).ok


def test_extend_inside_domain_is_identity():
    ws = Workspace(GradedAlgebra.free(3, 3))
    f = PartialDerivation(ws.algebra, Subspace.coordinate(3, 3, [0, 1]), [[0, 1, 0], [1, 0, 0]])
    assert extend_derivation(ws, f, [1, 2, 0]) is f
    assert ws.n == 3


def test_extend_preconditions():
    p, n = 3, 3
    alg = GradedAlgebra(p, n, [from_terms([(0, 1, 1)], p, n), from_terms([(0, 2, 1)], p, n)])
    ws = Workspace(alg)
    f = PartialDerivation.zero(alg, Subspace.coordinate(p, n, [1, 2]))
    with pytest.raises(PreconditionError):
        extend_derivation(ws, f, [1, 0, 0])
    with pytest.raises(PreconditionError):
        ExtensionProblem(alg, Subspace.coordinate(p, n, [1, 2]), alg.full, f)


def test_driver_scripts_postconditions():
    rng = np.random.default_rng(31)
    for _ in range(15):
        script = random_driver_script(rng)
        p, requests = io.parse_workspace_script(script["workspace"])
        ws = Workspace.replay(requests, p=p)
        alg = ws.algebra
        base, target, xs, ys = io.parse_problem(script, alg)
        f = PartialDerivation.from_pairs(alg, xs, ys)
        a = target.basis[-1] if not base.contains(target.basis[-1]) else next(v for v in target.basis if not base.contains(v))
        g = extend_derivation(ws, f, a)
        grown = ws.algebra
        assert g.domain.contains(np.pad(a, (0, grown.n - alg.n)))
        assert is_strong(grown, g.domain) and is_strong(grown, g.span)
        assert validate_derivation(g).ok
        for x, y in zip(f.domain.basis, f.images):
            pad = grown.n - alg.n
            assert g(np.pad(x, (0, pad))).tolist() == np.pad(y, (0, pad)).tolist()
