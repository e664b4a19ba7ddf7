"""JSON file formats and canonical serialization.

Indices are 0-based.  An algebra record is::

    {"p": 3, "dim": 4, "labels": ["b0", "b1", "b2", "a0"],
     "relations": [[[0, 3, 2], [1, 2, 1]]]}

where each relation is a list of triples (i, j, c) meaning c * e_i ^ e_j with
i < j.  Written relations are echelon-reduced, so equal algebras serialize to
identical bytes.
"""

import hashlib
import json

import numpy as np

from nilalg.errors import ParseError
from nilalg.exterior import pair_index, to_terms, wedge_dim
from nilalg.fq_linalg import DEFAULT_P, SUPPORTED_PRIMES, Subspace, rows_of
from nilalg.liealg import GradedAlgebra

SCHEMA_VERSION = 1


def dumps(obj):
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(_plain(obj), sort_keys=True, indent=2) + "\n"


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def digest(text):
    return hashlib.sha256(text.encode()).hexdigest()


def loads(text, what="input"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{what}: {exc.msg}", exc.lineno, exc.colno) from None


def read_text(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None


def _need(record, key, where):
    if not isinstance(record, dict):
        raise ParseError(f"{where}: expected an object")
    if key not in record:
        raise ParseError(f"{where}: missing field '{key}'")
    return record[key]


def _int(value, where):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"{where}: expected an integer, got {value!r}")
    return value


def parse_vectors(value, p, n, where):
    if not isinstance(value, list):
        raise ParseError(f"{where}: expected a list of vectors")
    rows = []
    for r, vec in enumerate(value):
        if not isinstance(vec, list) or len(vec) != n:
            raise ParseError(f"{where}[{r}]: expected a vector of length {n}")
        rows.append([_int(c, f"{where}[{r}]") % p for c in vec])
    return np.array(rows, dtype=np.int64).reshape(len(rows), n)


def algebra_from_record(record, where="algebra", default_p=DEFAULT_P):
    if not isinstance(record, dict):
        raise ParseError(f"{where}: expected an object")
    p = _int(record["p"], f"{where}.p") if "p" in record else default_p
    if p not in SUPPORTED_PRIMES:
        raise ParseError(f"{where}.p: {p} is not one of {SUPPORTED_PRIMES}")
    n = _int(_need(record, "dim", where), f"{where}.dim")
    if n < 0:
        raise ParseError(f"{where}.dim: negative dimension")
    labels = record.get("labels")
    if labels is not None and (not isinstance(labels, list) or len(labels) != n):
        raise ParseError(f"{where}.labels: expected {n} labels")
    rels = record.get("relations", [])
    if not isinstance(rels, list):
        raise ParseError(f"{where}.relations: expected a list")
    rows = np.zeros((len(rels), wedge_dim(n)), dtype=np.int64)
    for r, rel in enumerate(rels):
        if not isinstance(rel, list):
            raise ParseError(f"{where}.relations[{r}]: expected a list of triples")
        for t, term in enumerate(rel):
            spot = f"{where}.relations[{r}][{t}]"
            if not isinstance(term, list) or len(term) != 3:
                raise ParseError(f"{spot}: expected a triple [i, j, c]")
            i, j, c = (_int(v, spot) for v in term)
            if not 0 <= i < j < n:
                raise ParseError(f"{spot}: need 0 <= i < j < {n}, got ({i}, {j})")
            rows[r, pair_index(i, j, n)] += c
    return GradedAlgebra(p, n, Subspace(rows % p, p, wedge_dim(n)), labels)


def algebra_to_record(alg):
    rec = {"p": alg.p, "dim": alg.n, "relations": [[list(t) for t in to_terms(w, alg.n)] for w in alg.relations.basis]}
    if alg.labels is not None:
        rec["labels"] = list(alg.labels)
    return rec


def load_algebra(path, default_p=DEFAULT_P):
    text = read_text(path)
    return algebra_from_record(loads(text, path), path, default_p), text


def dump_algebra(alg):
    return dumps(algebra_to_record(alg))


def subspace_record(sub):
    return sub.basis.tolist()


def parse_problem(record, alg, where="problem"):
    """Return (base, target, xs, ys) from a problem record in the coordinates of ``alg``."""
    p, n = alg.p, alg.n
    base = Subspace(parse_vectors(record.get("base", []), p, n, f"{where}.base"), p, n)
    target = Subspace(parse_vectors(record.get("target", []), p, n, f"{where}.target"), p, n) + base
    pairs = record.get("map", [])
    if not isinstance(pairs, list):
        raise ParseError(f"{where}.map: expected a list of [vector, image] pairs")
    xs, ys = [], []
    for k, pair in enumerate(pairs):
        if not isinstance(pair, list) or len(pair) != 2:
            raise ParseError(f"{where}.map[{k}]: expected [vector, image]")
        x, y = parse_vectors(pair, p, n, f"{where}.map[{k}]")
        xs.append(x)
        ys.append(y)
    xs = rows_of(xs, n)
    ys = rows_of(ys, n)
    return base, target, xs, ys


def parse_workspace_script(record, where="workspace", default_p=DEFAULT_P):
    """A replay script: {"p": 3, "steps": [{"base": [...], "algebra": {...}}, ...]}.

    Returns (p, requests) where each request is (base vectors, algebra over base);
    base vectors live in the workspace as it stands before that step.
    """
    if isinstance(record, list):
        record = {"steps": record}
    if not isinstance(record, dict):
        raise ParseError(f"{where}: expected an object")
    p = _int(record.get("p", default_p), f"{where}.p")
    if p not in SUPPORTED_PRIMES:
        raise ParseError(f"{where}.p: {p} is not one of {SUPPORTED_PRIMES}")
    steps = _need(record, "steps", where)
    if not isinstance(steps, list):
        raise ParseError(f"{where}.steps: expected a list")
    requests = []
    n = 0
    for k, step in enumerate(steps):
        spot = f"{where}.steps[{k}]"
        ext = algebra_from_record(_need(step, "algebra", spot), f"{spot}.algebra", p)
        if ext.p != p:
            raise ParseError(f"{spot}.algebra.p: differs from the script's field")
        base = parse_vectors(step.get("base", []), p, n, f"{spot}.base")
        requests.append((base, ext))
        n += ext.n - Subspace(base, p, n).dim
    return p, requests


def parse_experiments(record, where="experiments"):
    if isinstance(record, list):
        record = {"experiments": record}
    exps = _need(record, "experiments", where)
    if not isinstance(exps, list):
        raise ParseError(f"{where}.experiments: expected a list")
    for k, exp in enumerate(exps):
        kind = _need(exp, "kind", f"{where}.experiments[{k}]")
        if kind not in ("automorphism", "orbit", "stabilizer"):
            raise ParseError(f"{where}.experiments[{k}].kind: unknown kind {kind!r}")
    seed = record.get("seed")
    return exps, None if seed is None else _int(seed, f"{where}.seed")
