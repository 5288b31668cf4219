"""Command-line front end.

Commands: `prove` a formula (emitting a machine-checkable proof or a
counter-model), `check` a previously emitted proof or model, `crosscheck`
both calculi against the semantic oracle, `gen` seeded random formulas, and
`bench` the benchmark families (plus a batch-kernel backend comparison).

Exit codes: 0 proved / artifact valid / no disagreement; 1 refuted /
artifact invalid / disagreement found; 2 input or usage error.
Environment: DUMMETT_STEP_BUDGET overrides the defensive search budget,
DUMMETT_KERNEL picks the batch backend (numba|python).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Optional

from .crosscheck import crosscheck_exhaustive, crosscheck_samples
from .d1 import (
    SearchBudgetError, decide_d1, expand_d1, inconsistent_d1, select_rule_d1,
)
from .d3 import decide_d3, expand_d3, inconsistent_d3, select_rule_d3
from .formula import (
    Formula, Imp, Or, ParseError, Var, parse, random_formula, render,
    size_of, stats,
)
from .kernel import (
    HAS_NUMBA, decide_batch_d1, decide_batch_d3, enumerate_space,
    godel_valid_space, space_counts,
)
from .proofs import (
    KripkeChain, ProofSchemaError, ProofTree, check_proof, from_json,
    metrics, to_json,
)
from .semantics import F, FL, realizes_set, sf

__all__ = ["main", "nested_imp", "chain_disj", "max_branch_len"]

PROVED, REFUTED, INPUT_ERROR = 0, 1, 2


# ---------------------------------------------------------------------------
# Benchmark families
# ---------------------------------------------------------------------------

def nested_imp(n: int) -> Formula:
    """Left-nested implications ((p1 -> p2) -> p3) -> ... -> p_{n+1}.

    Refutable at every size; each crossing peels one nesting level, which is
    what makes the family a depth stressor.
    """
    if n < 1:
        raise ValueError("nested_imp needs n >= 1")
    f: Formula = Var("p1")
    for i in range(2, n + 2):
        f = Imp(f, Var(f"p{i}"))
    return f


def chain_disj(n: int) -> Formula:
    """Disjunction of (pi -> pj) over all ordered pairs i != j of n
    variables; valid over linear orders for every n >= 2 (some two of the
    variables are comparable), with quadratically many disjuncts."""
    if n < 2:
        raise ValueError("chain_disj needs n >= 2")
    names = [Var(f"p{i}") for i in range(1, n + 1)]
    disjuncts = [Imp(names[i], names[j])
                 for i in range(n) for j in range(n) if i != j]
    f: Formula = disjuncts[-1]
    for d in reversed(disjuncts[:-1]):
        f = Or(d, f)
    return f


def max_branch_len(goal: Formula, calculus: str = "d1", *,
                   optimized: bool = False, sixopt: bool = False,
                   node_cap: int = 500_000) -> int:
    """Longest branch, in nodes, of the COMPLETE deduction tree for goal.

    decide_* stops at the first open branch, so its max_depth says nothing
    about tree shape on refutable goals; this walker expands every branch to
    a closed or terminal node instead.  Depth below a node depends only on
    the node, so results are memoized on it — identical nodes recur across
    sibling branches constantly.  The number of DISTINCT nodes can still be
    exponential (wide multi-premise rules over near-disjoint premise sets),
    so the walk refuses past node_cap distinct nodes rather than thrash.
    """
    if calculus == "d1":
        root = frozenset({sf(FL, goal)})

        def children_of(node):
            if inconsistent_d1(node, optimized):
                return ()
            inst = select_rule_d1(node, optimized)
            return () if inst is None else expand_d1(node, inst)
    elif calculus == "d3":
        root = frozenset({sf(F, goal)})

        def children_of(node):
            if inconsistent_d3(node):
                return ()
            inst = select_rule_d3(node, sixopt)
            return () if inst is None else expand_d3(node, inst)
    else:
        raise ValueError(f"unknown calculus {calculus!r}")

    kids: dict = {}
    depth: dict = {}
    work = [(root, False)]
    while work:
        node, ready = work.pop()
        if ready:
            depth[node] = 1 + max((depth[k] for k in kids[node]), default=0)
            continue
        if node in depth:
            continue
        if node not in kids:
            if len(kids) >= node_cap:
                raise SearchBudgetError(
                    f"complete tree has over {node_cap} distinct nodes")
            kids[node] = children_of(node)
        work.append((node, True))
        for k in kids[node]:
            if k not in depth:
                work.append((k, False))
    return depth[root]


# ---------------------------------------------------------------------------
# prove
# ---------------------------------------------------------------------------

def _decide(goal: Formula, calculus: str, optimized: bool, sixopt: bool):
    if calculus == "d1":
        return decide_d1(goal, optimized=optimized)
    return decide_d3(goal, sixopt=sixopt)


def _chain_text(model: KripkeChain) -> str:
    return " | ".join("{" + " ".join(sorted(w)) + "}" for w in model.worlds)


def _report(out, calculus: str, optimized: bool, sixopt: bool,
            elapsed: float) -> dict:
    rep = {
        "verdict": out.verdict,
        "calculus": calculus,
        "flags": {"optimized": optimized, "sixopt": sixopt},
        "elapsed_s": round(elapsed, 6),
    }
    if out.proof is not None:
        m = metrics(out.proof)
        rep["metrics"] = {
            "depth": m.depth, "node_count": m.node_count,
            "max_branching": m.max_branching, "tbar_firings": m.tbar_firings,
        }
    else:
        rep["model_worlds"] = len(out.model)
    return rep


def cmd_prove(args) -> int:
    try:
        goal = parse(args.formula)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return INPUT_ERROR
    if args.optimized and args.calculus != "d1":
        print("--optimized applies to the seven-sign calculus (d1) only",
              file=sys.stderr)
        return INPUT_ERROR
    if args.sixopt and args.calculus != "d3":
        print("--sixopt applies to the two-sign calculus (d3) only",
              file=sys.stderr)
        return INPUT_ERROR
    start = time.perf_counter()
    try:
        out = _decide(goal, args.calculus, args.optimized, args.sixopt)
    except SearchBudgetError as e:
        print(f"internal error: {e}", file=sys.stderr)
        return INPUT_ERROR
    elapsed = time.perf_counter() - start
    rep = _report(out, args.calculus, args.optimized, args.sixopt, elapsed)
    artifact = out.proof if out.proof is not None else out.model
    if args.format == "json":
        envelope = {"report": rep, "artifact": json.loads(to_json(artifact))}
        print(json.dumps(envelope, indent=2))
    else:
        flagtxt = " optimized" if args.optimized else (
            " sixopt" if args.sixopt else "")
        print(f"{out.verdict} calculus={args.calculus}{flagtxt} "
              f"elapsed={elapsed:.4f}s")
        if out.proof is not None:
            m = rep["metrics"]
            print(f"proof: depth={m['depth']} nodes={m['node_count']} "
                  f"max_branching={m['max_branching']} "
                  f"tbar_firings={m['tbar_firings']}")
            print(to_json(out.proof, indent=2))
        else:
            print(f"counter-model ({len(out.model)} worlds): "
                  f"{_chain_text(out.model)}")
            print(to_json(out.model, indent=2))
    return PROVED if out.verdict == "proved" else REFUTED


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------

def _load_artifact(path: str):
    """Accept either a bare artifact or a prove --format json envelope.
    Returns (artifact, flags-from-envelope-or-None)."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise ProofSchemaError(f"not JSON: {e}") from e
    flags = None
    if isinstance(obj, dict) and "artifact" in obj:
        rep = obj.get("report", {})
        if isinstance(rep, dict) and isinstance(rep.get("flags"), dict):
            flags = rep["flags"]
        obj = obj["artifact"]
    return from_json(json.dumps(obj)), flags


def cmd_check(args) -> int:
    if (args.proof is None) == (args.model is None):
        print("check needs exactly one of --proof or --model", file=sys.stderr)
        return INPUT_ERROR
    if args.model is not None and args.goal is None:
        print("--model needs --goal to check against", file=sys.stderr)
        return INPUT_ERROR
    try:
        if args.proof is not None:
            artifact, flags = _load_artifact(args.proof)
            if not isinstance(artifact, ProofTree):
                print("expected a proof, found a model", file=sys.stderr)
                return INPUT_ERROR
            # without a recorded mode, check under the permissive variants
            optimized = True if flags is None else bool(flags.get("optimized"))
            sixopt = True if flags is None else bool(flags.get("sixopt"))
            defect = check_proof(artifact, optimized=optimized, sixopt=sixopt)
            if args.goal is not None:
                goal = parse(args.goal)
                want = frozenset(
                    {sf(FL if artifact.calculus == "d1" else F, goal)})
                if defect is None and artifact.node != want:
                    defect = "proof root is not the refutation goal node"
            if defect is None:
                m = metrics(artifact)
                print(f"proof OK: calculus={artifact.calculus} "
                      f"nodes={m.node_count} depth={m.depth}")
                return PROVED
            print(f"defect: {defect}")
            return REFUTED
        artifact, _ = _load_artifact(args.model)
        if not isinstance(artifact, KripkeChain):
            print("expected a model, found a proof", file=sys.stderr)
            return INPUT_ERROR
        goal = parse(args.goal)
        if realizes_set(artifact, 0, {sf(F, goal)}):
            print(f"model OK: {len(artifact)} worlds refute {render(goal)}")
            return PROVED
        print(f"model does not realize F {render(goal)} at its root")
        return REFUTED
    except (OSError, ProofSchemaError, ParseError) as e:
        print(f"error: {e}", file=sys.stderr)
        return INPUT_ERROR


# ---------------------------------------------------------------------------
# crosscheck / gen
# ---------------------------------------------------------------------------

def cmd_crosscheck(args) -> int:
    try:
        if args.exhaustive:
            report = crosscheck_exhaustive(args.vars, args.max_connectives)
        else:
            report = crosscheck_samples(args.vars, args.max_connectives,
                                        args.samples, args.seed)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return INPUT_ERROR
    mode = "exhaustive" if args.exhaustive else f"seed={args.seed}"
    print(f"crosscheck {mode}: {report.checked} formulas, "
          f"routes={','.join(report.labels)}+oracle, "
          f"elapsed={report.elapsed:.2f}s")
    if report.ok:
        print("all verdicts agree; artifacts check")
        return PROVED
    print(str(report.disagreement))
    return REFUTED


def cmd_gen(args) -> int:
    for i in range(args.count):
        f = random_formula(args.vars, args.max_connectives, seed=args.seed + i)
        print(render(f))
    return PROVED


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------

def _parse_sizes(text: str) -> list:
    out = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    if not out:
        raise ValueError("empty size list")
    return out


def _bench_rows(args):
    sizes = _parse_sizes(args.sizes)
    for n in sizes:
        if args.family == "nested-imp":
            yield n, nested_imp(n)
        elif args.family == "chain-disj":
            yield n, chain_disj(max(2, n))
        else:
            yield n, random_formula(args.vars, n, seed=args.seed)


def cmd_bench(args) -> int:
    if args.compare_backends:
        return _bench_backends(args)
    try:
        rows = list(_bench_rows(args))
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return INPUT_ERROR
    calculi = ("d1", "d3") if args.calculus == "both" else (args.calculus,)
    header = (f"{'size':>4} {'conns':>5} {'calc':>4} {'verdict':>7} "
              f"{'depth':>5} {'expans':>6} {'artifact':>8} {'ms':>8}")
    if args.full_tree:
        header += f" {'branch':>6}"
    print(f"family={args.family}")
    print(header)
    for n, goal in rows:
        for cal in calculi:
            start = time.perf_counter()
            try:
                out = _decide(goal, cal, args.optimized, args.sixopt)
            except SearchBudgetError as e:
                print(f"{n:>4} {stats(goal).connective_count:>5} {cal:>4} "
                      f"budget exceeded: {e}")
                continue
            ms = (time.perf_counter() - start) * 1000
            art = (f"n={metrics(out.proof).node_count}" if out.proof
                   else f"w={len(out.model)}")
            line = (f"{n:>4} {stats(goal).connective_count:>5} {cal:>4} "
                    f"{out.verdict:>7} {out.stats.max_depth:>5} "
                    f"{out.stats.expansions:>6} {art:>8} {ms:>8.2f}")
            if args.full_tree:
                try:
                    branch = max_branch_len(goal, cal,
                                            optimized=args.optimized,
                                            sixopt=args.sixopt)
                    line += f" {branch:>6}"
                except SearchBudgetError:
                    line += f" {'>cap':>6}"
            print(line)
    return PROVED


def _bench_backends(args) -> int:
    nvars = min(args.vars, 2)
    conns = min(int(args.sizes.split(",")[0].split("-")[-1]), 4)
    total = sum(space_counts(nvars, conns))
    print(f"batch backends over all {total} formulas "
          f"({nvars} vars, <= {conns} connectives)")
    space = enumerate_space(nvars, conns)
    start = time.perf_counter()
    gv = godel_valid_space(space)
    print(f"{'goedel oracle':>14} {'-':>7}: {1e3*(time.perf_counter()-start):>9.1f} ms "
          f"({int(gv.sum())} valid)")
    backends = ["python"] + (["numba"] if HAS_NUMBA else [])
    if not HAS_NUMBA:
        print("numba is not importable; timing the python backend only")
    results = {}
    for backend in backends:
        for name, fn, kw in (("d1", decide_batch_d1, {}),
                             ("d1-opt", decide_batch_d1, {"optimized": True}),
                             ("d3", decide_batch_d3, {}),
                             ("d3-sixopt", decide_batch_d3, {"sixopt": True})):
            start = time.perf_counter()
            verdict, _ = fn(space, backend=backend, **kw)
            ms = (time.perf_counter() - start) * 1000
            agree = bool(((verdict == 1) == gv).all())
            results.setdefault(name, {})[backend] = ms
            print(f"{name:>14} {backend:>7}: {ms:>9.1f} ms "
                  f"agree-with-oracle={agree}")
            if not agree:
                return REFUTED
    if HAS_NUMBA:
        for name, times in results.items():
            print(f"{name:>14} speedup: x{times['python'] / times['numba']:.0f}")
    return PROVED


# ---------------------------------------------------------------------------
# argument wiring
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="dummett",
        description="Prove or refute formulas of propositional Dummett "
                    "logic; check the emitted artifacts; cross-validate.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prove", help="decide a formula")
    p.add_argument("formula")
    p.add_argument("--calculus", choices=("d1", "d3"), default="d1")
    p.add_argument("--optimized", action="store_true",
                   help="d1: wider inconsistency check, tighter multi-premise rule")
    p.add_argument("--sixopt", action="store_true",
                   help="d3: promote forced implications with ->-free antecedents")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(fn=cmd_prove)

    p = sub.add_parser("check", help="validate an emitted proof or model")
    p.add_argument("--proof", metavar="FILE")
    p.add_argument("--model", metavar="FILE")
    p.add_argument("--goal", metavar="FORMULA",
                   help="required with --model; with --proof also pins the root")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("crosscheck",
                       help="compare both calculi against the oracle")
    p.add_argument("--vars", type=int, default=3)
    p.add_argument("--max-connectives", type=int, default=8)
    p.add_argument("--samples", type=int, default=5000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--exhaustive", action="store_true",
                   help="sweep every formula instead of sampling")
    p.set_defaults(fn=cmd_crosscheck)

    p = sub.add_parser("gen", help="emit seeded random formulas")
    p.add_argument("--vars", type=int, default=3)
    p.add_argument("--max-connectives", type=int, default=8)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("bench", help="run the benchmark families")
    p.add_argument("--family", choices=("nested-imp", "chain-disj", "random"),
                   default="nested-imp",
                   help="nested-imp peels a nesting level per world crossing;"
                        " chain-disj stresses multi-premise width (sizes past"
                        " 4 get expensive); random sizes by connective count")
    p.add_argument("--sizes", default="1-12",
                   help="comma list and A-B ranges, e.g. 1-8,10,12")
    p.add_argument("--calculus", choices=("d1", "d3", "both"), default="both")
    p.add_argument("--optimized", action="store_true")
    p.add_argument("--sixopt", action="store_true")
    p.add_argument("--vars", type=int, default=3, help="random family only")
    p.add_argument("--seed", type=int, default=42, help="random family only")
    p.add_argument("--full-tree", action="store_true",
                   help="also report the longest branch of the complete tree")
    p.add_argument("--compare-backends", action="store_true",
                   help="time the batch kernels on both backends instead")
    p.set_defaults(fn=cmd_bench)
    return ap


def main(argv: Optional[list] = None) -> int:
    args = _build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
