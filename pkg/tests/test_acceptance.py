"""Acceptance gate: nine system-level criteria, one test per criterion.

Run with -v to get one pass/fail line per criterion.  Thresholds, seeds and
golden constants are frozen here on purpose; loosening them to make a red
line green defeats the point of the gate.

Evidence structure for the exhaustive criterion: the batch kernels decide
the full desk-scale spaces against the vectorized many-valued oracle, and
two bridges tie the kernels to the reference implementations — (a) the
many-valued oracle equals the chain-model oracle exhaustively on the small
space and on a sampled slice of the large one, and (b) the symbolic
procedures equal the kernel verdicts on a sampled slice of every
configuration.  The sampled criterion runs the symbolic procedures directly.
"""

import random
import time
from dataclasses import dataclass, field

import numpy as np
import pytest

from dummett.cli import max_branch_len, nested_imp
from dummett.corpus import PROVED, REFUTED, load_corpus
from dummett.d1 import decide_d1, measure_d1
from dummett.d3 import decide_d3
from dummett.formula import (
    random_formula, size_of, subformulas, variables_of,
)
from dummett.kernel import (
    decide_batch_d1, decide_batch_d3, enumerate_space, formula_of,
    godel_valid_formula, godel_valid_space,
)
from dummett.proofs import check_proof
from dummett.semantics import (
    F, enumerate_chains, oracle_valid, realizes_set, sf,
)

# frozen constants -----------------------------------------------------------

SAMPLED_COUNT = 10_000
SAMPLED_SEED = 271828          # sampled-corpus stream: seeds SEED..SEED+N-1
BRIDGE_SEED = 20260817         # id sampling for the kernel/oracle bridges
REPLAY_SEED = 16180            # instance choice for the soundness replay
REPLAY_COUNT = 1_000
SAT_COST_C = 1.0               # sat steps per branch <= C * size(goal)^2
R2_FLOOR = 0.95                # linear-fit quality floor for the d3 trend

# complete-tree branch lengths on nested-imp, sizes 1..15, frozen 2026-08-17
GOLDEN_D3_BRANCH = [2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16]
GOLDEN_D1_BRANCH = [2, 4, 5, 7, 8, 10, 11, 13, 14, 16, 17, 19, 20, 22, 23]

EXHAUSTIVE_SPACES = ((1, 5), (2, 6))  # (variables, max connectives)

KERNEL_CONFIGS = (
    ("d1", decide_batch_d1, {}),
    ("d1-opt", decide_batch_d1, {"optimized": True}),
    ("d3", decide_batch_d3, {}),
    ("d3-sixopt", decide_batch_d3, {"sixopt": True}),
)

SYMBOLIC_ROUTES = (
    ("d1", "d1", lambda f: decide_d1(f), {}),
    ("d1-opt", "d1", lambda f: decide_d1(f, optimized=True),
     {"optimized": True}),
    ("d3", "d3", lambda f: decide_d3(f), {}),
    ("d3-sixopt", "d3", lambda f: decide_d3(f, sixopt=True),
     {"sixopt": True}),
)


# ---------------------------------------------------------------------------
# shared sweeps
# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def kernel_sweep():
    """Exhaustive desk-scale sweep plus the two bridges (criteria 1 and 3)."""
    start = time.perf_counter()
    rng = np.random.default_rng(BRIDGE_SEED)
    data = {"spaces": {}, "bridge": {}}

    for nvars, conns in EXHAUSTIVE_SPACES:
        space = enumerate_space(nvars, conns)
        gv = godel_valid_space(space)
        per = {"total": space.size, "valid": int(gv.sum())}
        for label, fn, kw in KERNEL_CONFIGS:
            verdict, worlds = fn(space, **kw)
            per[label] = {
                "disagreements": int(((verdict == 1) != gv).sum()),
                "max_refuted_worlds": int(worlds[verdict == 0].max()),
            }
        data["spaces"][(nvars, conns)] = per

        # bridge (b): symbolic == kernel verdicts on a sampled slice, all
        # configs.  World counts are NOT compared one to one: the kernel
        # breaks strategy ties in enumeration order rather than canonical
        # order, so it can walk a different open branch to an equally valid
        # counter-model; only the bound is shared.
        ids = sorted(rng.choice(space.size, size=300, replace=False).tolist())
        sym_mismatch = 0
        bound_violations = 0
        for label, fn, kw in KERNEL_CONFIGS:
            verdict, _ = fn(space, roots=np.array(ids), **kw)
            route = dict((r[0], r) for r in SYMBOLIC_ROUTES)[label]
            for j, i in enumerate(ids):
                out = route[2](formula_of(space, i))
                if (out.verdict == "proved") != bool(verdict[j] == 1):
                    sym_mismatch += 1
                if out.model is not None and label.startswith("d1") \
                        and len(out.model) > nvars + 1:
                    bound_violations += 1
        data["bridge"][(nvars, conns, "symbolic")] = {
            "checked": len(ids) * len(KERNEL_CONFIGS),
            "verdict_mismatch": sym_mismatch,
            "d1_world_bound_violations": bound_violations,
        }

    # bridge (a): many-valued oracle == chain-model oracle
    oracle_mismatch = 0
    oracle_checked = 0
    for nvars, conns in ((1, 5), (2, 3)):
        space = enumerate_space(nvars, conns)
        for i in range(space.size):
            f = formula_of(space, i)
            if godel_valid_formula(f) != (oracle_valid(f) is None):
                oracle_mismatch += 1
            oracle_checked += 1
    big = enumerate_space(2, 6)
    for i in sorted(rng.choice(big.size, size=4000, replace=False).tolist()):
        f = formula_of(big, i)
        if godel_valid_formula(f) != (oracle_valid(f) is None):
            oracle_mismatch += 1
        oracle_checked += 1
    data["bridge"]["oracle"] = {
        "checked": oracle_checked, "mismatch": oracle_mismatch,
    }
    data["elapsed"] = time.perf_counter() - start
    return data


@dataclass
class SampledRuns:
    checked: int = 0
    verdict_mismatches: int = 0
    proof_defects: int = 0
    model_failures: int = 0
    d1_world_bound_violations: int = 0
    measure_violations: int = 0
    subformula_violations: int = 0
    max_depth_over_budget: float = 0.0
    max_sat_ratio: float = 0.0
    instance_pool: list = field(default_factory=list)
    elapsed: float = 0.0


@pytest.fixture(scope="module")
def sampled_runs():
    """One instrumented pass over the sampled corpus (criteria 2-4, 6, 7, 9).

    Every decision of all four configurations is compared with the oracle,
    every artifact is validated, and the expansion hook feeds the
    termination-measure check, the subformula check and the replay pool.
    """
    data = SampledRuns()
    start = time.perf_counter()
    stride_counter = 0

    for i in range(SAMPLED_COUNT):
        goal = random_formula(3, 10, seed=SAMPLED_SEED + i)
        subs = subformulas(goal)
        expected = "proved" if oracle_valid(goal) is None else "refuted"
        nvars = len(variables_of(goal))
        size = size_of(goal)

        def on_expand_d1(node, inst, conclusions):
            nonlocal stride_counter
            parent = measure_d1(node)
            for child in conclusions:
                if not measure_d1(child).precedes(parent):
                    data.measure_violations += 1
                for s in child:
                    if s.formula not in subs:
                        data.subformula_violations += 1
            if stride_counter % 97 == 0:
                data.instance_pool.append((node, inst))
            stride_counter += 1

        def on_expand_d3(node, inst, conclusions):
            for child in conclusions:
                for s in child:
                    if s.formula not in subs:
                        data.subformula_violations += 1

        for label, calculus, _, checkkw in SYMBOLIC_ROUTES:
            if calculus == "d1":
                out = decide_d1(goal, on_expand=on_expand_d1, **checkkw)
            else:
                out = decide_d3(goal, on_expand=on_expand_d3, **checkkw)
            if out.verdict != expected:
                data.verdict_mismatches += 1
                continue
            if out.stats.budget:
                ratio = out.stats.max_depth / out.stats.budget
                data.max_depth_over_budget = max(
                    data.max_depth_over_budget, ratio)
            if out.proof is not None:
                if check_proof(out.proof, calculus, **checkkw) is not None:
                    data.proof_defects += 1
            else:
                if not realizes_set(out.model, 0, [sf(F, goal)]):
                    data.model_failures += 1
                if calculus == "d1" and len(out.model) > nvars + 1:
                    data.d1_world_bound_violations += 1
            if calculus == "d3":
                ratio = out.stats.max_branch_sat_steps / (size * size)
                data.max_sat_ratio = max(data.max_sat_ratio, ratio)
        data.checked += 1

    data.elapsed = time.perf_counter() - start
    return data


# ---------------------------------------------------------------------------
# criteria
# ---------------------------------------------------------------------------

def test_criterion_1_exhaustive_oracle_agreement(kernel_sweep):
    """All formulas over 1 var (<=5 connectives) and 2 vars (<=6), all four
    configurations against the oracle: zero disagreements, under 5 minutes."""
    for key, per in kernel_sweep["spaces"].items():
        for label, _, _ in KERNEL_CONFIGS:
            assert per[label]["disagreements"] == 0, (key, label)
    # the sweep is meaningful only if the bridges hold
    assert kernel_sweep["bridge"]["oracle"]["mismatch"] == 0
    assert kernel_sweep["bridge"]["oracle"]["checked"] >= 17_000
    for key in EXHAUSTIVE_SPACES:
        b = kernel_sweep["bridge"][key + ("symbolic",)]
        assert b["verdict_mismatch"] == 0, key
        assert b["d1_world_bound_violations"] == 0, key
    # scale: both spaces really were swept whole
    assert kernel_sweep["spaces"][(1, 5)]["total"] == 11_497
    assert kernel_sweep["spaces"][(2, 6)]["total"] == 13_008_974
    assert kernel_sweep["elapsed"] < 300.0


def test_criterion_2_sampled_oracle_agreement_and_artifacts(sampled_runs):
    """10,000 seeded formulas, 3 vars, <=10 connectives: identical verdicts
    across both calculi (all configurations) and the oracle; every proof
    replays; every counter-model realizes the goal refutation at its root."""
    assert sampled_runs.checked == SAMPLED_COUNT
    assert sampled_runs.verdict_mismatches == 0
    assert sampled_runs.proof_defects == 0
    assert sampled_runs.model_failures == 0
    assert sampled_runs.elapsed < 600.0


def test_criterion_3_counter_model_world_bound(kernel_sweep, sampled_runs):
    """Every seven-sign counter-model, exhaustive and sampled, has at most
    variables+1 worlds."""
    for (nvars, conns), per in kernel_sweep["spaces"].items():
        for label in ("d1", "d1-opt"):
            assert per[label]["max_refuted_worlds"] <= nvars + 1, \
                ((nvars, conns), label)
    assert sampled_runs.d1_world_bound_violations == 0


def test_criterion_4_termination_measure_strictly_decreases(sampled_runs):
    """The well-founded measure drops on every expansion edge and the
    defensive budget never fires (max observed depth stays under it)."""
    assert sampled_runs.measure_violations == 0
    assert 0.0 < sampled_runs.max_depth_over_budget < 1.0


def test_criterion_5_depth_trend_linear_for_two_sign_calculus():
    """Longest complete-tree branch on nested-imp, sizes 1..15: the two-sign
    calculus fits a linear model with R^2 >= 0.95 and matches its goldens;
    the seven-sign values are recorded goldens (trend informative)."""
    sizes = list(range(1, 16))
    d3 = [max_branch_len(nested_imp(n), "d3") for n in sizes]
    d1 = [max_branch_len(nested_imp(n), "d1") for n in sizes]
    assert d3 == GOLDEN_D3_BRANCH
    assert d1 == GOLDEN_D1_BRANCH
    slope, intercept = np.polyfit(sizes, d3, 1)
    fitted = np.polyval((slope, intercept), sizes)
    ss_res = float(((np.array(d3) - fitted) ** 2).sum())
    ss_tot = float(((np.array(d3) - np.mean(d3)) ** 2).sum())
    assert ss_tot > 0.0
    assert 1.0 - ss_res / ss_tot >= R2_FLOOR
    assert slope > 0.0


def test_criterion_6_subformula_property(sampled_runs):
    """Every formula in every node of every sampled deduction, both calculi,
    is a subformula of the goal."""
    assert sampled_runs.subformula_violations == 0


def test_criterion_7_rule_soundness_replay(sampled_runs):
    """1,000 logged seven-sign rule instances, replayed over every chain with
    <=3 worlds on the instance's variables: a world realizing the premise
    realizes some conclusion — at the same world for the invertible rules, at
    a strictly later world for the multi-premise crossing rule."""
    pool = sampled_runs.instance_pool
    assert len(pool) >= REPLAY_COUNT
    chosen = random.Random(REPLAY_SEED).sample(range(len(pool)), REPLAY_COUNT)
    violations = 0
    for idx in chosen:
        premise, inst = pool[idx]
        names = {v for s in premise for v in variables_of(s.formula)}
        crossing = inst.rule in ("FnTtil", "FnTtil-opt")
        for model in enumerate_chains(names, 3):
            for w in range(len(model)):
                if not realizes_set(model, w, premise):
                    continue
                if crossing:
                    ok = any(realizes_set(model, b, c)
                             for c in inst.conclusions
                             for b in range(w + 1, len(model)))
                else:
                    ok = any(realizes_set(model, w, c)
                             for c in inst.conclusions)
                if not ok:
                    violations += 1
    assert violations == 0


def test_criterion_8_corpus_regression():
    """Every corpus entry reproduces its expected verdict in both calculi;
    the linearity axiom is proved and the classical-only formulas are refuted
    with validated counter-models."""
    entries = {e.name: e for e in load_corpus()}
    for e in entries.values():
        for decide in (decide_d1, decide_d3):
            out = decide(e.formula)
            assert out.verdict == e.expected, (e.name, decide.__name__)
    assert entries["lc-axiom"].expected == PROVED
    for name in ("excluded-middle", "peirce"):
        e = entries[name]
        assert e.expected == REFUTED
        goal = e.formula
        out = decide_d1(goal)
        assert out.model is not None
        assert realizes_set(out.model, 0, [sf(F, goal)])
        assert len(out.model) <= len(variables_of(goal)) + 1


def test_criterion_9_sat_cost_stays_quadratic(sampled_runs):
    """Syntactic-satisfiability steps along any single two-sign branch stay
    under C * size(goal)^2 on the sampled corpus and on the curated corpus."""
    assert 0.0 < sampled_runs.max_sat_ratio <= SAT_COST_C
    for e in load_corpus():
        goal = e.formula
        size = size_of(goal)
        for sixopt in (False, True):
            out = decide_d3(goal, sixopt=sixopt)
            assert out.stats.max_branch_sat_steps <= SAT_COST_C * size * size, \
                (e.name, sixopt)
