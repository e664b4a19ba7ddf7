"""Seeded end-to-end suites exercising every module at scale.

Each suite returns a :class:`SuiteResult`; ``run_suites`` runs a selection
of them.  The case generators are public so that tests can re-derive the
same instances and cross-check them independently.
"""

import inspect
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from nilalg import io
from nilalg.cover import (
    automorphism_check,
    canonical_w_instance,
    killing_derivation,
    orbit_images,
    point,
    stabilizer_scan,
)
from nilalg.derivation import (
    CaseA,
    ExtensionProblem,
    PartialDerivation,
    check_delta_lower_bound,
    check_dimension_equality,
    check_indep_wedges,
    check_intersection,
    check_minimal_strong,
    classify_pseudosolution,
    free_pseudosolution,
    solve_case_A,
    totalize,
    validate_derivation,
)
from nilalg.errors import EnumerationTooLarge, PreconditionError
from nilalg.exterior import from_terms, to_terms
from nilalg.fq_linalg import DEFAULT_ENUM_CAP, Subspace
from nilalg.generators import (
    planted_case_a,
    random_algebra,
    random_driver_script,
    random_extension_problem,
    random_intermediate,
    random_subspace,
)
from nilalg.liealg import GradedAlgebra, in_class_K, predim
from nilalg.strong import ALGEBRAIC, PREALGEBRAIC, TRANSCENDENTAL, classify_step

DATA = Path(__file__).resolve().parent / "data"


@dataclass
class SuiteResult:
    number: int
    name: str
    passed: bool
    stats: dict = field(default_factory=dict)
    seconds: float = 0.0
    failures: list = field(default_factory=list)

    def line(self):
        detail = ", ".join(f"{k}={v}" for k, v in self.stats.items())
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number}. {self.name} ({detail}; {self.seconds:.2f}s)"


def _timed(number, name, body):
    t0 = time.perf_counter()
    passed, stats, failures = body()
    return SuiteResult(number, name, passed, stats, time.perf_counter() - t0, failures)


# 1. the three example extensions


EXAMPLE_FILES = (
    ("extension_tr.json", TRANSCENDENTAL, 4),
    ("extension_alg.json", ALGEBRAIC, 3),
    ("extension_pr.json", PREALGEBRAIC, 3),
)


def examples_suite(data_dir=DATA, p=3):
    def body():
        failures, kinds = [], []
        for name, tag, full_delta in EXAMPLE_FILES:
            alg, text = io.load_algebra(data_dir / name, p)
            rec = io.loads(text)
            base = Subspace(io.parse_vectors(rec["base"], alg.p, alg.n, name), alg.p, alg.n)
            kind = classify_step(alg, base, alg.full)
            kinds.append(kind.tag)
            if kind.tag != tag:
                failures.append(f"{name}: {kind.tag} instead of {tag}")
            if predim(alg, alg.full) != full_delta or predim(alg, base) != 3:
                failures.append(f"{name}: predimensions {predim(alg, alg.full)}, {predim(alg, base)}")
            if tag == ALGEBRAIC:
                expected = from_terms([(3, 0, 1), (1, 2, 1)], alg.p, alg.n)
                if not np.array_equal(kind.relation, expected):
                    failures.append(f"{name}: relation {to_terms(kind.relation, alg.n)}")
        return not failures, {"kinds": "/".join(kinds)}, failures

    return _timed(1, "example extensions", body)


# 2. submodularity


def submodularity_cases(seed=0, count=10_000, p=3, max_n=6):
    """Yield (algebra, A, B) triples."""
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n = int(rng.integers(1, max_n + 1))
        alg = random_algebra(rng, p, n)
        yield alg, random_subspace(rng, p, n), random_subspace(rng, p, n)


def submodularity_gap(alg, a, b):
    """delta(A/A meet B) - delta(A+B/B); never negative."""
    return predim(alg, a) - predim(alg, a & b) - predim(alg, a + b) + predim(alg, b)


def submodularity_suite(seed=0, count=10_000):
    def body():
        failures = []
        tight = 0
        for k, (alg, a, b) in enumerate(submodularity_cases(seed, count)):
            gap = submodularity_gap(alg, a, b)
            tight += gap == 0
            if gap < 0:
                failures.append(k)
        return not failures, {"triples": count, "violations": len(failures), "equalities": tight}, failures

    return _timed(2, "submodularity", body)


# 3. and 5. free pseudosolution lemmas


def lemma_cases(seed=0, count=500):
    """Yield (problem, pseudosolution, intermediate A') for random valid problems."""
    rng = np.random.default_rng(seed)
    for _ in range(count):
        prob = random_extension_problem(rng, max_base=4, max_codim=3)
        yield prob, free_pseudosolution(prob), random_intermediate(rng, prob)


def lemma_suite(seed=0, count=500, cap=DEFAULT_ENUM_CAP):
    def body():
        failures = []
        minimal = 0
        for k, (prob, ps, a_prime) in enumerate(lemma_cases(seed, count)):
            is_min = prob.is_minimal()
            minimal += is_min
            checks = {
                "indep-wedges": check_indep_wedges(ps, a_prime),
                "intersection": check_intersection(ps),
                "dimension-equality": check_dimension_equality(ps, a_prime),
                "minimal-strong": check_minimal_strong(ps, is_min, cap=cap),
            }
            failures.extend(f"problem {k}: {name}" for name, ok in checks.items() if not ok)
        return not failures, {"problems": count, "minimal": minimal, "failures": len(failures)}, failures

    return _timed(3, "free pseudosolution lemmas", body)


def delta_suite(seed=0, count=500, cap=DEFAULT_ENUM_CAP):
    """Exhaustive delta >= 1 check on pseudosolutions whose base algebra is in K.

    Pseudosolutions whose degree-1 part is within ``cap`` get the full subspace
    enumeration; larger ones get the relation-side enumeration.
    """

    def body():
        failures = []
        exhaustive = relation_side = skipped = 0
        for k, (prob, ps, _) in enumerate(lemma_cases(seed, count)):
            if not in_class_K(prob.alg, cap=cap).ok:
                skipped += 1
                continue
            try:
                if ps.space.dim <= cap:
                    ok = check_delta_lower_bound(ps, cap=cap, prune=False)
                    exhaustive += 1
                else:
                    ok = check_delta_lower_bound(ps, cap=cap)
                    relation_side += 1
            except EnumerationTooLarge:
                skipped += 1
                continue
            if not ok:
                failures.append(f"problem {k}")
        stats = {"exhaustive": exhaustive, "relation_side": relation_side, "skipped": skipped, "failures": len(failures)}
        return not failures, stats, failures

    return _timed(5, "predimension lower bound", body)


# 4. Case A


def worked_case_a(p=3):
    """b0, b1, b2, a with a ^ b0 + b1 ^ b2 = 0, f(b0) = b0 and f(b1) = f(b2) = 0."""
    n = 4
    e = from_terms([(3, 0, 1), (1, 2, 1)], p, n)
    alg = GradedAlgebra(p, n, [e], ["b0", "b1", "b2", "a"])
    base = Subspace.coordinate(p, n, range(3))
    images = np.zeros((3, n), dtype=np.int64)
    images[0, 0] = 1
    f = PartialDerivation(alg, base, images)
    return ExtensionProblem(alg, base, alg.full, f), e


def case_a_suite(seed=0, count=100):
    def body():
        failures = []
        prob, e = worked_case_a()
        ps = free_pseudosolution(prob)
        witness = classify_pseudosolution(ps)
        if not isinstance(witness, CaseA):
            failures.append("worked example: free pseudosolution is in K")
        else:
            g = solve_case_A(prob, ps, witness)
            a = np.eye(4, dtype=np.int64)[3]
            if not np.array_equal(g(a), (-a) % 3) or g.apply_wedge(e).any():
                failures.append("worked example: g(a) != -a or g(e) != 0")
        rng = np.random.default_rng(seed)
        for k in range(count):
            prob, _ = planted_case_a(rng)
            ps = free_pseudosolution(prob)
            witness = classify_pseudosolution(ps)
            if not isinstance(witness, CaseA):
                failures.append(f"instance {k}: no commuting pair")
                continue
            g = solve_case_A(prob, ps, witness)
            if not validate_derivation(g).ok or not g.image_space <= prob.target + prob.f.image_space:
                failures.append(f"instance {k}")
        return not failures, {"instances": count, "failures": len(failures)}, failures

    return _timed(4, "Case A solver", body)


# 6. extension driver through the command line


def driver_scripts(seed=0, count=50):
    rng = np.random.default_rng(seed)
    return [random_driver_script(rng) for _ in range(count)]


def driver_suite(seed=0, count=50, max_ambient=12):
    from nilalg.cli import run

    def body():
        failures = []
        largest = 0
        with tempfile.TemporaryDirectory() as tmp:
            tmp = Path(tmp)
            for k, script in enumerate(driver_scripts(seed, count)):
                src = tmp / f"script_{k}.json"
                src.write_text(io.dumps(script), encoding="utf-8")
                texts = []
                for rep in (tmp / f"r{k}a.json", tmp / f"r{k}b.json"):
                    code = run(["extend", str(src), "--cap-ambient", str(max_ambient), "--report", str(rep)], _Null(), _Null())
                    texts.append(rep.read_text(encoding="utf-8"))
                report = io.loads(texts[0])
                if code != 0:
                    failures.append(f"script {k}: exit code {code}")
                    continue
                largest = max(largest, report["results"]["ambient_after"])
                certs = report["results"]["certificates"]
                if not all(certs.values()):
                    failures.append(f"script {k}: {certs}")
                if texts[0] != texts[1]:
                    failures.append(f"script {k}: replay differs")
        return not failures, {"scripts": count, "largest_ambient": largest, "failures": len(failures)}, failures

    return _timed(6, "extension driver", body)


class _Null:
    def write(self, _):
        return 0

    def flush(self):
        pass


# 7.-9. cover


def killing_family(p=3, shapes=((1, 1), (2, 1)), kernels=((), (0,), (1,), (0, 1), (2,), (0, 3))):
    """Total derivations from killing maps t1 -> e, b -> 0 on canonical W-instances.

    Yields (algebra, derivation, description) for every nonzero e in the
    x-block; the killing map is completed to a total derivation by the least
    solution of the linear Leibniz constraints.
    """
    for block, extra in shapes:
        alg = canonical_w_instance(p, block, extra)
        n = alg.n
        eye = np.eye(n, dtype=np.int64)
        t1 = eye[4 + block]
        xblock = Subspace(eye[4 : 4 + block], p, n)
        for ker in kernels:
            bs = eye[list(ker)].reshape(len(ker), n)
            for e in xblock.elements():
                if not e.any():
                    continue
                try:
                    f = totalize(killing_derivation(alg, t1, bs, e))
                except PreconditionError:
                    continue
                yield alg, f, f"block={block} extra={extra} kill={list(ker)} e={e.tolist()}"


def automorphism_suite(seed=0, minimum=20):
    def body():
        failures = []
        fam = list(killing_family())
        checked = instances = 0
        for k, (alg, f, desc) in enumerate(fam):
            # pair each derivation with the next one on the same algebra for the homomorphism law
            nxt = fam[(k + 1) % len(fam)]
            g = nxt[1] if nxt[0] == alg else f
            rep = automorphism_check(alg, f, g, seed=seed + k)
            checked += 1
            instances += rep["instances"]
            if rep["preserved"] != rep["instances"] or rep["homomorphism_ok"] != rep["homomorphism_points"]:
                failures.append(desc)
        passed = not failures and checked >= minimum
        return passed, {"derivations": checked, "instances": instances, "failures": len(failures)}, failures

    return _timed(7, "cover automorphisms", body)


def orbit_suite(p=3):
    def body():
        alg = canonical_w_instance(p, 2, 1)
        n = alg.n
        eye = np.eye(n, dtype=np.int64)
        t1 = eye[6]
        bs = eye[[0, 1]]
        es = [e for e in Subspace(eye[4:6], p, n).elements() if e.any()]
        fs = [totalize(killing_derivation(alg, t1, bs, e)) for e in es]
        s = point(t1, np.zeros(n, dtype=np.int64), p)
        images = orbit_images(fs, s)
        distinct = len(set(images))
        direct = all(np.array_equal(img.u, (s.u + f(s.a)) % p) for img, f in zip(images, fs))
        k = len(fs)
        return distinct == k == p * p - 1 and direct, {"k": k, "distinct": distinct}, []

    return _timed(8, "orbit probe", body)


def stabilizer_suite(p=3):
    def body():
        alg = canonical_w_instance(p, 1)
        n = alg.n
        eye = np.eye(n, dtype=np.int64)
        pts = [point(eye[i], np.zeros(n, dtype=np.int64), p) for i in range(4)]
        total, zeros = stabilizer_scan(alg, pts, Subspace(eye[4:5], p, n))
        only_zero = zeros == [tuple([0] * n for _ in range(4))]
        return only_zero and total == p**4, {"tuples": total, "zero_residual": len(zeros)}, []

    return _timed(9, "stabilizer scan", body)


SUITES = {
    1: examples_suite,
    2: submodularity_suite,
    3: lemma_suite,
    4: case_a_suite,
    5: delta_suite,
    6: driver_suite,
    7: automorphism_suite,
    8: orbit_suite,
    9: stabilizer_suite,
}


def run_suites(numbers=None, seed=0):
    """Run the given suites (default all); seeded suites get ``seed``."""
    out = []
    for k in sorted(SUITES) if numbers is None else numbers:
        fn = SUITES[k]
        out.append(fn(seed=seed) if "seed" in inspect.signature(fn).parameters else fn())
    return out
