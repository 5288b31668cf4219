"""The seven-sign tableau calculus.

Rule inventory: invertible one-conclusion rules T& and Fl->; invertible
branching rules Fl&, T|, Fl|, T-> (three conclusions), F-decide (splits an F
into Fl "fails here, holds from the next world on" vs Fn "still fails at some
later world") and That-decide; and one non-invertible multi-premise rule
FnTtil that consumes ALL Ttil- and Fn-formulas of the node at once, jointly
case-splitting on which of them is the one realized at the next world.  The
optimized variant FnTtil-opt produces logically tighter conclusions (earlier
siblings keep their stronger signs) and unlocks a wider inconsistency check.

The search strategy is deterministic and backtracking-free: inconsistency,
then the first applicable one-conclusion rule, then the first branching rule,
then FnTtil, else the node is terminal.  Terminal nodes witness a refutation;
the chain of node snapshots at each FnTtil crossing (plus the terminal node)
is the counter-model, with world valuations read off the T-signed variables.
"""

from __future__ import annotations

import os
import sys
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from .formula import And, Bot, Formula, Imp, Or, Top, Var, stats
from .proofs import LEAF, ProofTree
from .semantics import (
    F, FL, FN, KripkeChain, SignedFormula, T, THAT, TN, TTIL,
    canonical_sort, sf,
)

__all__ = [
    "RULES_D1", "RuleInstanceD1", "OutcomeD1", "SearchStats",
    "SearchBudgetError", "TerminationMeasure",
    "inconsistent_d1", "instance_d1", "select_rule_d1", "expand_d1",
    "decide_d1", "measure_d1",
]

RULES_D1 = frozenset({
    "T&", "Fl&", "T|", "Fl|", "T->", "Fl->", "F-decide", "That-decide",
    "FnTtil", "FnTtil-opt",
})

_ATOM_TYPES = (Var, Top, Bot)


@dataclass(frozen=True)
class RuleInstanceD1:
    """A rule application: the principal order is significant for the
    multi-premise rules (it fixes which conclusion belongs to which formula).
    """

    rule: str
    principal: tuple
    conclusions: tuple


# ---------------------------------------------------------------------------
# Inconsistency
# ---------------------------------------------------------------------------

def inconsistent_d1(node: frozenset, optimized: bool = False) -> bool:
    """Base: T false; {T A, F A}; {T A, Fl A}; plus the always-unrealizable
    F true / Fl true.  Optimized mode adds the ten extended clashes, whose
    point is closing branches that are doomed a crossing or two later.
    """
    t_set, f_set, fl_set, fn_set, tn_set = set(), set(), set(), set(), set()
    that_imps, til_imps = [], []
    for s in node:
        if s.sign == T:
            t_set.add(s.formula)
        elif s.sign == F:
            f_set.add(s.formula)
        elif s.sign == FL:
            fl_set.add(s.formula)
        elif s.sign == FN:
            fn_set.add(s.formula)
        elif s.sign == TN:
            tn_set.add(s.formula)
        elif s.sign == THAT:
            that_imps.append(s.formula)
        elif s.sign == TTIL:
            til_imps.append(s.formula)
    top, bot = Top(), Bot()
    if bot in t_set or top in f_set or top in fl_set:
        return True
    if t_set & f_set or t_set & fl_set:
        return True
    if not optimized:
        return False
    that_set = set(that_imps)
    til_set = set(til_imps)
    if f_set & that_set or f_set & til_set:
        return True
    if t_set & fn_set or tn_set & fn_set:
        return True
    if fn_set and (bot in tn_set or bot in fl_set):
        return True
    for imp in til_imps:
        if imp.left in t_set or imp.left in tn_set or imp.left in fl_set:
            return True
    for imp in that_imps:
        if imp.left in t_set:
            return True
    return False


# ---------------------------------------------------------------------------
# Rules
# ---------------------------------------------------------------------------

_ALPHA = {(T, And): "T&", (FL, Imp): "Fl->"}
_BETA = {
    (FL, And): "Fl&", (T, Or): "T|", (FL, Or): "Fl|", (T, Imp): "T->",
    (THAT, Imp): "That-decide",
}
_SINGLE_SHAPE = {
    "T&": (T, And), "Fl->": (FL, Imp), "Fl&": (FL, And), "T|": (T, Or),
    "Fl|": (FL, Or), "T->": (T, Imp), "That-decide": (THAT, Imp),
}


def _conclusions_for(node: frozenset, rule: str, principal: tuple) -> tuple:
    rest = node - set(principal)
    if rule not in ("FnTtil", "FnTtil-opt"):
        f = principal[0].formula
        if rule == "T&":
            return (rest | {sf(T, f.left), sf(T, f.right)},)
        if rule == "Fl->":
            return (rest | {sf(T, f.left), sf(FL, f.right)},)
        if rule == "Fl&":
            return (rest | {sf(FL, f.left), sf(TN, f.right)},
                    rest | {sf(T, f.left), sf(FL, f.right)})
        if rule == "T|":
            return (rest | {sf(T, f.left)}, rest | {sf(T, f.right)})
        if rule == "Fl|":
            return (rest | {sf(F, f.left), sf(FL, f.right)},
                    rest | {sf(F, f.right), sf(FL, f.left)})
        if rule == "T->":
            return (rest | {sf(T, f.right)},
                    rest | {sf(FL, f.left), sf(TN, f.right)},
                    rest | {sf(TTIL, f)})
        if rule == "F-decide":
            return (rest | {sf(FL, f)}, rest | {sf(FN, f)})
        # That-decide: the antecedent either never gets forced (Fl A, and then
        # B is forced from the next world on) or fails again later (Ttil).
        return (rest | {sf(FL, f.left), sf(TN, f.right)},
                rest | {sf(TTIL, f)})

    # The multi-premise rule.  The side formulas are projected onto T: Fl and
    # Tn commitments about the current world become plain facts at the next
    # one, while F/That knowledge (none remains under the strategy) is lost.
    core = frozenset(
        sf(T, s.formula) for s in rest if s.sign in (T, FL, TN))
    til = [s.formula for s in principal if s.sign == TTIL]
    fn = [s.formula for s in principal if s.sign == FN]
    n = len(til)
    out = []
    if rule == "FnTtil":
        s_f = frozenset(sf(F, c) for c in fn)
        s_that = frozenset(sf(THAT, imp) for imp in til)
        for j, imp in enumerate(til):
            others = frozenset(sf(THAT, im) for i, im in enumerate(til) if i != j)
            out.append(core | others | {sf(FL, imp.left), sf(TN, imp.right)} | s_f)
        for k, c in enumerate(fn):
            fs = frozenset(sf(F, ci) for i, ci in enumerate(fn) if i != k)
            out.append(core | s_that | fs | {sf(FL, c)})
    else:  # FnTtil-opt: siblings before the chosen one keep their sign
        s_f = frozenset(sf(F, c) for c in fn)
        s_til = frozenset(sf(TTIL, imp) for imp in til)
        for j, imp in enumerate(til):
            keep = frozenset(sf(TTIL, im) for im in til[:j])
            demoted = frozenset(sf(THAT, im) for im in til[j + 1:])
            out.append(core | keep | demoted
                       | {sf(FL, imp.left), sf(TN, imp.right)} | s_f)
        for k, c in enumerate(fn):
            before = frozenset(sf(FN, ci) for ci in fn[:k])
            after = frozenset(sf(F, ci) for ci in fn[k + 1:])
            out.append(core | s_til | before | {sf(FL, c)} | after)
    return tuple(out)


def instance_d1(node: frozenset, rule: str, principal: Iterable[SignedFormula]
                ) -> RuleInstanceD1:
    """Validate a rule application against a node and build its conclusions.

    Raises ValueError when the rule does not apply to the given principal on
    the given node; this is the replay primitive the proof checker relies on.
    """
    principal = tuple(principal)
    if rule not in RULES_D1:
        raise ValueError(f"unknown rule {rule!r} for the seven-sign calculus")
    if not principal:
        raise ValueError(f"rule {rule} needs at least one principal formula")
    missing = [s for s in principal if s not in node]
    if missing:
        raise ValueError(f"principal {missing[0]} is not in the node")
    if rule in ("FnTtil", "FnTtil-opt"):
        til = tuple(s for s in principal if s.sign == TTIL)
        fn = tuple(s for s in principal if s.sign == FN)
        if len(til) + len(fn) != len(principal):
            raise ValueError(f"{rule} only consumes Ttil- and Fn-formulas")
        if principal[:len(til)] != til:
            raise ValueError(f"{rule} lists Ttil principals before Fn ones")
        if len(set(principal)) != len(principal):
            raise ValueError(f"{rule} principal contains duplicates")
        expected = {s for s in node if s.sign in (TTIL, FN)}
        if set(principal) != expected:
            raise ValueError(
                f"{rule} must consume every Ttil- and Fn-formula of the node")
    else:
        if len(principal) != 1:
            raise ValueError(f"rule {rule} takes exactly one principal formula")
        s = principal[0]
        if rule == "F-decide":
            if s.sign != F:
                raise ValueError("F-decide applies to F-signed formulas")
        else:
            want_sign, want_type = _SINGLE_SHAPE[rule]
            if s.sign != want_sign or not isinstance(s.formula, want_type):
                raise ValueError(
                    f"rule {rule} does not apply to {s.sign} "
                    f"{type(s.formula).__name__}")
    return RuleInstanceD1(rule, principal, _conclusions_for(node, rule, principal))


def select_rule_d1(node: frozenset, optimized: bool = False
                   ) -> Optional[RuleInstanceD1]:
    """Strategy order: one-conclusion rules, then branching rules, then the
    multi-premise rule; within a tier the first principal in canonical node
    order wins.  None means the node is terminal.
    """
    ordered = canonical_sort(node)
    for s in ordered:
        rule = _ALPHA.get((s.sign, type(s.formula)))
        if rule is not None:
            return instance_d1(node, rule, (s,))
    for s in ordered:
        rule = "F-decide" if s.sign == F else _BETA.get((s.sign, type(s.formula)))
        if rule is not None:
            return instance_d1(node, rule, (s,))
    joint = tuple(s for s in ordered if s.sign == TTIL) \
        + tuple(s for s in ordered if s.sign == FN)
    if joint:
        rule = "FnTtil-opt" if optimized else "FnTtil"
        return instance_d1(node, rule, joint)
    return None


def expand_d1(node: frozenset, inst: RuleInstanceD1) -> tuple:
    """Conclusions of applying inst to node; defensively revalidates inst."""
    fresh = instance_d1(node, inst.rule, inst.principal)
    if fresh.conclusions != inst.conclusions:
        raise ValueError("rule instance does not match the node it is applied to")
    return fresh.conclusions


# ---------------------------------------------------------------------------
# Termination measure
# ---------------------------------------------------------------------------

_RANK = {T: 3, TN: 3, THAT: 2, F: 2, TTIL: 1, FL: 1, FN: 1}


@dataclass(frozen=True)
class TerminationMeasure:
    """Well-founded progress measure for the search.

    A child measures strictly below its parent when (i) its set of T-signed
    atoms strictly grows, or (ii) atoms are equal and the total connective
    count drops, or (iii) both are equal and the multiset of sign ranks drops
    (sign promotions such as F -> Fl/Fn, T -> Ttil, That -> Ttil).
    """

    t_atoms: frozenset
    connectives: int
    sign_rank: tuple

    def precedes(self, other: "TerminationMeasure") -> bool:
        if self.t_atoms != other.t_atoms:
            return self.t_atoms > other.t_atoms
        if self.connectives != other.connectives:
            return self.connectives < other.connectives
        # ranks are stored sorted descending, so tuple comparison is the
        # multiset ordering
        return self.sign_rank < other.sign_rank

    __lt__ = precedes


def measure_d1(node: frozenset) -> TerminationMeasure:
    return TerminationMeasure(
        t_atoms=frozenset(s.formula for s in node
                          if s.sign == T and isinstance(s.formula, _ATOM_TYPES)),
        connectives=sum(stats(s.formula).connective_count for s in node),
        sign_rank=tuple(sorted((_RANK[s.sign] for s in node), reverse=True)),
    )


# ---------------------------------------------------------------------------
# Decision procedure
# ---------------------------------------------------------------------------

class SearchBudgetError(RuntimeError):
    """The defensive depth budget fired: an internal invariant is broken,
    since termination of the strategy is guaranteed by the measure."""


@dataclass
class SearchStats:
    expansions: int = 0
    max_depth: int = 0
    budget: int = 0


@dataclass(frozen=True)
class OutcomeD1:
    """Either a closed proof tree, or a counter-chain plus the snapshot trace
    (one node per world) it was read off of.
    """

    proof: Optional[ProofTree]
    model: Optional[KripkeChain]
    trace: Optional[tuple]
    stats: SearchStats

    def __post_init__(self):
        if (self.proof is None) == (self.model is None):
            raise ValueError("outcome needs exactly one of proof/model")
        if (self.model is None) != (self.trace is None):
            raise ValueError("model and trace come together")

    @property
    def verdict(self) -> str:
        return "proved" if self.proof is not None else "refuted"


def _depth_budget(goal: Formula) -> int:
    env = os.environ.get("DUMMETT_STEP_BUDGET")
    if env:
        return int(env)
    return 10 * stats(goal).size ** 2


class _Ctx:
    __slots__ = ("optimized", "on_expand", "stats", "calculus")

    def __init__(self, optimized, on_expand, stats_):
        self.optimized = optimized
        self.on_expand = on_expand
        self.stats = stats_


def _search_d1(node: frozenset, depth: int, ctx: _Ctx):
    """Returns (proof, None) when the subtree closes, else (None, trace) where
    trace is the world-snapshot list of the open branch found first."""
    st = ctx.stats
    if depth > st.max_depth:
        st.max_depth = depth
    if depth > st.budget:
        raise SearchBudgetError(
            f"search depth exceeded the defensive budget of {st.budget}")
    if inconsistent_d1(node, ctx.optimized):
        return ProofTree(node, LEAF, (), (), "d1"), None
    inst = select_rule_d1(node, ctx.optimized)
    if inst is None:
        return None, (node,)
    st.expansions += 1
    if ctx.on_expand is not None:
        ctx.on_expand(node, inst, inst.conclusions)
    crossing = inst.rule in ("FnTtil", "FnTtil-opt")
    proofs = []
    for child in inst.conclusions:
        sub, trace = _search_d1(child, depth + 1, ctx)
        if sub is None:
            return None, ((node,) + trace if crossing else trace)
        proofs.append(sub)
    return ProofTree(node, inst.rule, inst.principal, tuple(proofs), "d1"), None


def _valuation(snapshot: frozenset) -> frozenset:
    return frozenset(s.formula.name for s in snapshot
                     if s.sign == T and isinstance(s.formula, Var))


def decide_d1(goal: Formula, optimized: bool = False,
              on_expand: Optional[Callable] = None) -> OutcomeD1:
    """Decide validity of goal; proof on success, counter-chain on failure.

    The counter-chain has at most n+1 worlds for n distinct variables, and its
    root realizes Fl goal (goal fails there and holds at every later world).
    `on_expand(node, inst, conclusions)` is invoked at every rule application,
    for instrumentation.
    """
    st = SearchStats(budget=_depth_budget(goal))
    ctx = _Ctx(optimized, on_expand, st)
    root = frozenset({sf(FL, goal)})
    limit = min(100_000, 4 * st.budget + 1000)
    old_limit = sys.getrecursionlimit()
    if limit > old_limit:
        sys.setrecursionlimit(limit)
    try:
        proof, trace = _search_d1(root, 0, ctx)
    finally:
        if limit > old_limit:
            sys.setrecursionlimit(old_limit)
    if proof is not None:
        return OutcomeD1(proof, None, None, st)
    model = KripkeChain(tuple(_valuation(snap) for snap in trace))
    return OutcomeD1(None, model, trace, st)
