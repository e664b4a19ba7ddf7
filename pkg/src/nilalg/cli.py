"""Command-line front end.

Three subcommands read JSON inputs and emit a canonical JSON report::

    nilalg check ALGEBRA
    nilalg extend PROBLEM [--workspace SCRIPT]
    nilalg cover EXPERIMENTS [--workspace SCRIPT]
    nilalg acceptance [--suite N ...]

A short summary goes to stdout; ``--report PATH`` writes the full report.
Identical inputs and seed give byte-identical reports (timings are only
included with ``--timing``).
"""

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from nilalg import io
from nilalg.amalgam import DEFAULT_BUDGET, Workspace
from nilalg.cover import (
    automorphism_check,
    canonical_w_instance,
    killing_derivation,
    orbit_images,
    point,
    stabilizer_scan,
)
from nilalg.derivation import PartialDerivation, extend_derivation, totalize, validate_derivation
from nilalg.errors import (
    AmalgamInvalid,
    BudgetExceeded,
    ContainmentError,
    DimensionError,
    DomainError,
    EnumerationTooLarge,
    FieldError,
    NilalgError,
    ParseError,
    PreconditionError,
)
from nilalg.exterior import to_terms
from nilalg.fq_linalg import DEFAULT_ENUM_CAP, DEFAULT_P, Subspace, rows_of
from nilalg.liealg import in_class_K, predim, rel_predim
from nilalg.strong import ALGEBRAIC, is_strong, minimal_tower

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_PARSE = 2
EXIT_PRECONDITION = 3
EXIT_CAP = 4
EXIT_INTERNAL = 5
EXIT_AMALGAM = 6


def exit_code(exc):
    if isinstance(exc, ParseError):
        return EXIT_PARSE
    if isinstance(exc, (EnumerationTooLarge, BudgetExceeded)):
        return EXIT_CAP
    if isinstance(exc, AmalgamInvalid):
        return EXIT_AMALGAM
    if isinstance(exc, (PreconditionError, ContainmentError, DomainError, DimensionError, FieldError)):
        return EXIT_PRECONDITION
    return EXIT_INTERNAL


class Context:
    """Parsed flags plus the input files read so far (for the digest)."""

    def __init__(self, args):
        self.args = args
        self.inputs = {}

    @property
    def p(self):
        return DEFAULT_P if self.args.p is None else self.args.p

    def read(self, path):
        text = io.read_text(path)
        self.inputs[str(path)] = io.digest(text)
        return io.loads(text, str(path))

    def check_p(self, p, where):
        if self.args.p is not None and p != self.args.p:
            raise PreconditionError(f"{where} is over F_{p} but --p {self.args.p} was given")

    def workspace(self):
        """Replay --workspace if given; otherwise None."""
        path = self.args.workspace
        if path is None:
            return None
        return self.replay(self.read(path), str(path))

    def replay(self, record, where):
        p, requests = io.parse_workspace_script(record, where, self.p)
        self.check_p(p, where)
        return Workspace.replay(requests, p=p, budget=self.args.cap_ambient, cap=self.args.cap_enum)


def _vectors(sub):
    return sub.basis.tolist()


def _relation(alg, w):
    return to_terms(w, alg.n)


# check


def cmd_check(ctx):
    path = ctx.args.algebra
    record = ctx.read(path)
    alg = io.algebra_from_record(record, str(path), ctx.p)
    ctx.check_p(alg.p, str(path))
    cap = ctx.args.cap_enum
    rep = in_class_K(alg, cap=cap)
    results = {
        "algebra": io.algebra_to_record(alg),
        "in_K": rep.ok,
        "reason": rep.reason,
        "subspaces_checked": rep.checked,
        "predimension": predim(alg, alg.full),
    }
    if rep.witness is not None:
        wit = rep.witness
        results["witness"] = _vectors(wit) if isinstance(wit, Subspace) else [np.asarray(v).tolist() for v in wit]
    table = []
    named = []
    if "base" in record:
        named.append(("base", record["base"]))
    subs = record.get("subspaces", {})
    if not isinstance(subs, dict):
        raise ParseError(f"{path}.subspaces: expected an object of name -> vectors")
    named.extend(sorted(subs.items()))
    for name, vecs in named:
        sub = Subspace(io.parse_vectors(vecs, alg.p, alg.n, f"{path}.{name}"), alg.p, alg.n)
        table.append({"name": name, "basis": _vectors(sub), "dim": sub.dim, "predimension": predim(alg, sub)})
    results["predimension_table"] = table
    if "base" in record:
        base = Subspace(io.parse_vectors(record["base"], alg.p, alg.n, f"{path}.base"), alg.p, alg.n)
        strong = is_strong(alg, base, cap=cap)
        results["base_strong"] = strong
        if strong:
            tower = minimal_tower(alg, base, cap=cap)
            results["tower"] = [_kind_record(alg, lo, hi, kind) for lo, hi, kind in zip(tower.steps, tower.steps[1:], tower.kinds)]
    ok = rep.ok
    lines = [f"{path}: p={alg.p} dim={alg.n} relations={alg.relations.dim}"]
    lines.append(f"class K: {'yes' if rep.ok else 'no (' + rep.reason + ')'}")
    if rep.witness is not None:
        lines.append(f"witness: {results['witness']}")
    for row in table:
        lines.append(f"predimension({row['name']}) = {row['predimension']}")
    lines.extend(f"step {i + 1}: {s['kind']}" for i, s in enumerate(results.get("tower", [])))
    return ok, results, lines


def _kind_record(alg, lo, hi, kind):
    rec = {"kind": kind.tag, "from_dim": lo.dim, "to_dim": hi.dim, "predimension_increment": rel_predim(alg, hi, lo)}
    if kind.vector is not None:
        rec["vector"] = np.asarray(kind.vector).tolist()
    if kind.tag == ALGEBRAIC:
        rec["relation"] = _relation(alg, kind.relation)
        rec["base_vector"] = np.asarray(kind.base_vector).tolist()
        rec["remainder"] = _relation(alg, kind.remainder)
    return rec


# extend


def cmd_extend(ctx):
    path = ctx.args.problem
    record = ctx.read(path)
    if not isinstance(record, dict):
        raise ParseError(f"{path}: expected an object")
    sources = [ctx.args.workspace is not None, "algebra" in record, "workspace" in record]
    if sum(sources) != 1:
        raise ParseError(f"{path}: give exactly one of an inline algebra, an inline workspace or --workspace")
    if "algebra" in record:
        alg = io.algebra_from_record(record["algebra"], f"{path}.algebra", ctx.p)
        ctx.check_p(alg.p, str(path))
        ws = Workspace(alg, budget=ctx.args.cap_ambient, cap=ctx.args.cap_enum)
        if ws.n > ws.budget:
            raise BudgetExceeded(ws.n, ws.budget)
    elif "workspace" in record:
        ws = ctx.replay(record["workspace"], f"{path}.workspace")
    else:
        ws = ctx.workspace()
    alg = ws.algebra
    cap = ctx.args.cap_enum
    base, target, xs, ys = io.parse_problem(record, alg, str(path))
    f = PartialDerivation.from_pairs(alg, xs, ys)
    if "base" in record and f.domain != base:
        raise PreconditionError("the map is not defined exactly on the base")
    start_n = ws.n
    trace = []
    for v in target.basis:
        f = extend_derivation(ws, f, np.pad(v, (0, ws.n - v.size)), cap=cap, trace=trace)
    g = f
    grown = ws.algebra
    domain_strong = is_strong(grown, g.domain, cap=cap)
    span_strong = is_strong(grown, g.span, cap=cap)
    valid = validate_derivation(g).ok
    target_g = target.pad(grown.n)
    table = [{"vector": v.tolist(), "image": g.apply(v).tolist()} for v in target_g.basis]
    results = {
        "ambient_before": start_n,
        "ambient_after": grown.n,
        "workspace": io.algebra_to_record(grown),
        "workspace_history": ws.history,
        "trace": trace,
        "derivation": {
            "domain": _vectors(g.domain),
            "images": np.asarray(g.images).tolist(),
            "on_target": table,
        },
        "certificates": {
            "is_derivation": valid,
            "domain_strong": domain_strong,
            "domain_plus_image_strong": span_strong,
            "target_in_domain": bool(target_g <= g.domain),
        },
    }
    ok = valid and domain_strong and span_strong and target_g <= g.domain
    lines = [f"{path}: ambient {start_n} -> {grown.n}, {len(trace)} step(s)"]
    lines.extend(f"  {t['case']} ({t.get('kind', '-')}) {t['domain_dim']} -> {t['target_dim']}" for t in trace)
    lines.extend(f"  g({row['vector']}) = {row['image']}" for row in table)
    lines.append(f"derivation: {valid}, domain strong: {domain_strong}, domain + image strong: {span_strong}")
    return ok, results, lines


# cover


def _exp_algebra(ctx, exp, ws, where):
    if "algebra" in exp:
        alg = io.algebra_from_record(exp["algebra"], f"{where}.algebra", ctx.p)
    elif "canonical_w" in exp:
        spec = exp["canonical_w"]
        if not isinstance(spec, dict):
            raise ParseError(f"{where}.canonical_w: expected an object")
        alg = canonical_w_instance(
            ctx.p, io._int(spec.get("block", 1), f"{where}.canonical_w.block"), io._int(spec.get("extra", 0), f"{where}.canonical_w.extra")
        )
    elif ws is not None:
        alg = ws.algebra
    else:
        raise ParseError(f"{where}: no algebra, canonical_w or --workspace given")
    ctx.check_p(alg.p, where)
    return alg


def _total(alg, spec, where):
    """A total derivation from {"map": [[x, y], ...]}, extended by the least solution."""
    spec = spec or {}
    _, _, xs, ys = io.parse_problem({"map": spec.get("map", [])}, alg, where)
    f = PartialDerivation.from_pairs(alg, xs, ys)
    if not validate_derivation(f).ok:
        raise PreconditionError(f"{where}: map is not a partial derivation")
    return totalize(f)


def _automorphism(ctx, alg, exp, seed, where):
    f = _total(alg, exp.get("f"), f"{where}.f")
    g = _total(alg, exp["g"], f"{where}.g") if "g" in exp else None
    out = automorphism_check(
        alg,
        f,
        g,
        max_pairs=io._int(exp.get("max_pairs", 2), where),
        samples=io._int(exp.get("samples", 2), where),
        off_samples=io._int(exp.get("off_samples", 1), where),
        seed=seed,
    )
    out["ok"] = out["preserved"] == out["instances"] and out["homomorphism_ok"] == out["homomorphism_points"]
    return out, f"{out['preserved']}/{out['instances']} instances preserved, homomorphism {out['homomorphism_ok']}/{out['homomorphism_points']}"


def _orbit(ctx, alg, exp, where):
    p, n = alg.p, alg.n
    a = io.parse_vectors([io._need(exp, "a", where)], p, n, f"{where}.a")[0]
    bs = io.parse_vectors(exp.get("bs", []), p, n, f"{where}.bs")
    if "es" in exp:
        es = io.parse_vectors(exp["es"], p, n, f"{where}.es")
    else:
        block = Subspace(io.parse_vectors(io._need(exp, "block", where), p, n, f"{where}.block"), p, n)
        es = rows_of(np.array([e for e in block.elements() if e.any()]), n)
    pt = io._need(exp, "point", where)
    s = point(*io.parse_vectors([io._need(pt, "a", where), io._need(pt, "u", where)], p, n, f"{where}.point"), p)
    fs = [totalize(killing_derivation(alg, a, bs, e, cap=ctx.args.cap_enum)) for e in es]
    images = orbit_images(fs, s)
    direct = all(img.a.tolist() == s.a.tolist() and img.u.tolist() == ((s.u + f.apply(s.a)) % p).tolist() for img, f in zip(images, fs))
    distinct = len(set(images))
    out = {
        "k": len(fs),
        "distinct": distinct,
        "images": [{"a": img.a.tolist(), "u": img.u.tolist()} for img in images],
        "direct_evaluation_agrees": direct,
        "ok": distinct == len(fs) and direct,
    }
    return out, f"{distinct} distinct images from {len(fs)} derivations"


def _stabilizer(ctx, alg, exp, where):
    p, n = alg.p, alg.n
    pts = io._need(exp, "points", where)
    if not isinstance(pts, list) or len(pts) != 4:
        raise ParseError(f"{where}.points: expected four [a, u] pairs")
    cover = [point(*io.parse_vectors(pr, p, n, f"{where}.points[{i}]"), p) for i, pr in enumerate(pts)]
    block = Subspace(io.parse_vectors(io._need(exp, "block", where), p, n, f"{where}.block"), p, n)
    total, zeros = stabilizer_scan(alg, cover, block)
    only_zero = zeros == [tuple([0] * n for _ in range(4))]
    out = {"tuples": total, "zero_residual": len(zeros), "zero_only_at_zero_shift": only_zero, "ok": only_zero}
    return out, f"residual zero on {len(zeros)}/{total} shift tuples"


def cmd_cover(ctx):
    path = ctx.args.experiments
    record = ctx.read(path)
    exps, script_seed = io.parse_experiments(record, str(path))
    ws = ctx.workspace()
    base_seed = ctx.args.seed if script_seed is None else script_seed
    results, lines, ok = [], [], True
    for k, exp in enumerate(exps):
        where = f"{path}.experiments[{k}]"
        alg = _exp_algebra(ctx, exp, ws, where)
        seed = io._int(exp.get("seed", base_seed + k), f"{where}.seed")
        kind = exp["kind"]
        if kind == "automorphism":
            out, line = _automorphism(ctx, alg, exp, seed, where)
        elif kind == "orbit":
            out, line = _orbit(ctx, alg, exp, where)
        else:
            out, line = _stabilizer(ctx, alg, exp, where)
        out.update(kind=kind, seed=seed, name=exp.get("name", f"{kind}-{k}"))
        results.append(out)
        lines.append(f"{out['name']}: {line} [{'ok' if out['ok'] else 'FAILED'}]")
        ok = ok and out["ok"]
    return ok, {"experiments": results}, lines


# acceptance


def cmd_acceptance(ctx):
    from nilalg.suites import SUITES, run_suites

    numbers = ctx.args.suite or sorted(SUITES)
    unknown = [k for k in numbers if k not in SUITES]
    if unknown:
        raise PreconditionError(f"unknown suite number(s) {unknown}; choose from {sorted(SUITES)}")
    results = run_suites(numbers, seed=ctx.args.seed)
    rows = []
    for r in results:
        row = {"number": r.number, "name": r.name, "passed": r.passed, "stats": r.stats, "failures": r.failures[:20]}
        if ctx.args.timing:
            row["seconds"] = round(r.seconds, 3)
        rows.append(row)
    lines = [r.line() if ctx.args.timing else r.line().rsplit("; ", 1)[0] + ")" for r in results]
    return all(r.passed for r in results), {"suites": rows}, lines


COMMANDS = {"check": cmd_check, "extend": cmd_extend, "cover": cmd_cover, "acceptance": cmd_acceptance}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, default=None, help=f"field size for inputs that omit it (default {DEFAULT_P})")
    common.add_argument("--cap-enum", type=int, default=DEFAULT_ENUM_CAP, help="largest quotient dimension enumerated")
    common.add_argument("--cap-ambient", type=int, default=DEFAULT_BUDGET, help="workspace dimension budget")
    common.add_argument("--seed", type=int, default=0, help="sampling seed")
    common.add_argument("--report", type=Path, default=None, help="write the full JSON report here")
    common.add_argument("--timing", action="store_true", help="include wall-clock time in the report")

    parser = argparse.ArgumentParser(prog="nilalg", description="Finite 2-nilpotent graded Lie algebras over F_p.")
    sub = parser.add_subparsers(dest="command", required=True)
    c = sub.add_parser("check", parents=[common], help="class-K membership and predimensions of an algebra file")
    c.add_argument("algebra", type=Path)
    e = sub.add_parser("extend", parents=[common], help="extend a partial derivation to a target subspace")
    e.add_argument("problem", type=Path)
    e.add_argument("--workspace", type=Path, default=None, help="workspace replay script")
    v = sub.add_parser("cover", parents=[common], help="run cover experiments")
    v.add_argument("experiments", type=Path)
    v.add_argument("--workspace", type=Path, default=None, help="workspace replay script")
    s = sub.add_parser("acceptance", parents=[common], help="run the seeded end-to-end suites")
    s.add_argument("--suite", type=int, action="append", help="suite number (repeatable; default all)")
    return parser


def _echo(args):
    keep = {k: v for k, v in vars(args).items() if k not in ("report", "timing")}
    return {k: (str(v) if isinstance(v, Path) else v) for k, v in sorted(keep.items())}


def run(argv=None, out=sys.stdout, err=sys.stderr):
    parser = build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "workspace"):
        args.workspace = None
    ctx = Context(args)
    report = {"schema_version": io.SCHEMA_VERSION, "command": _echo(args), "seed": args.seed}
    t0 = time.perf_counter()
    try:
        if args.p is not None and args.p not in (3, 5, 7, 11):
            raise FieldError(f"--p {args.p} is not one of the supported primes")
        ok, results, lines = COMMANDS[args.command](ctx)
        code = EXIT_OK if ok else EXIT_FAILED
        report.update(status="ok" if ok else "failed", results=results)
    except NilalgError as exc:
        code = exit_code(exc)
        lines = [f"error: {exc}"]
        report.update(status="error", error={"type": type(exc).__name__, "message": str(exc), "exit_code": code})
        if isinstance(exc, ParseError) and exc.line is not None:
            report["error"].update(line=exc.line, column=exc.column)
        if isinstance(exc, AmalgamInvalid) and exc.witness is not None:
            report["error"]["witness"] = io._plain(exc.witness if not isinstance(exc.witness, Subspace) else exc.witness.basis)
    report["inputs"] = ctx.inputs
    if args.timing:
        report["timing_seconds"] = round(time.perf_counter() - t0, 6)
    text = io.dumps(report)
    if args.report is not None:
        args.report.write_text(text, encoding="utf-8")
    stream = out if code in (EXIT_OK, EXIT_FAILED) else err
    for line in lines:
        print(line, file=stream)
    return code


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
