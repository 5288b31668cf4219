"""The two-sign tableau calculus.

Only T and F signs appear in goals; the calculus additionally keeps a private
Tbar mark on implications it has already processed: Tbar(A->B) is a forced
implication parked until its antecedent becomes syntactically satisfied in the
node (the `sat` relation below), at which point the consequent is released.
This keeps branches linear at the cost of the sat bookkeeping.

Strategy order: inconsistency, one-conclusion rules (T&, F|), then — with the
sixopt flag — promotion of forced implications with implication-free
antecedents straight to Tbar, then branching rules (T|, T->1), the
three-conclusion F&, the gated Tbar release, and finally the non-invertible
multi-premise F-> that consumes every F-implication of the node at once.
Worlds of an extracted counter-model are the node snapshots at each F->
application plus the terminal node.
"""

from __future__ import annotations

import os
import sys
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

from .formula import And, Bot, Formula, Imp, Or, Top, Var, stats
from .proofs import LEAF, ProofTree
from .semantics import (
    F, KripkeChain, SignedFormula, T, TBAR, canonical_sort, sf,
)
from .d1 import SearchBudgetError

__all__ = [
    "RULES_D3", "RuleInstanceD3", "OutcomeD3", "SearchStatsD3",
    "SearchBudgetError",
    "sat", "inconsistent_d3", "instance_d3", "select_rule_d3", "expand_d3",
    "decide_d3",
]

RULES_D3 = frozenset({"T&", "F&", "T|", "F|", "T->1", "Tbar", "F->", "T->Tbar"})


@dataclass(frozen=True)
class RuleInstanceD3:
    rule: str
    principal: tuple
    conclusions: tuple


class _Tally:
    """Counts sat invocations (cache hits included)."""

    __slots__ = ("steps",)

    def __init__(self):
        self.steps = 0


def _sat(node: frozenset, f: Formula, cache: dict, tally: Optional[_Tally]) -> bool:
    if tally is not None:
        tally.steps += 1
    hit = cache.get(f)
    if hit is not None:
        return hit
    if SignedFormula(T, f) in node:
        value = True
    elif isinstance(f, Top):
        value = True
    elif isinstance(f, Bot):
        value = False
    elif isinstance(f, Var):
        value = False
    elif isinstance(f, And):
        value = _sat(node, f.left, cache, tally) and _sat(node, f.right, cache, tally)
    elif isinstance(f, Or):
        value = _sat(node, f.left, cache, tally) or _sat(node, f.right, cache, tally)
    else:  # Imp
        if SignedFormula(TBAR, f) in node:
            value = True
        elif SignedFormula(F, f) in node:
            value = False
        else:
            value = (not _sat(node, f.left, cache, tally)
                     or _sat(node, f.right, cache, tally))
    cache[f] = value
    return value


def sat(node: frozenset, f: Formula) -> bool:
    """Syntactic satisfiability of f in the node: f is T- or Tbar-signed, or
    is built up from such formulas (implications additionally require no
    F-signed occurrence of themselves).  Approximates forcing from below."""
    return _sat(node, f, {}, None)


def inconsistent_d3(node: frozenset) -> bool:
    """T false in the node, some {T A, F A} pair, or the unrealizable F true."""
    t_set = {s.formula for s in node if s.sign == T}
    if Bot() in t_set:
        return True
    for s in node:
        if s.sign == F and (s.formula in t_set or isinstance(s.formula, Top)):
            return True
    return False


# ---------------------------------------------------------------------------
# Rules
# ---------------------------------------------------------------------------

_ALPHA = {(T, And): "T&", (F, Or): "F|"}
_BETA = {(T, Or): "T|", (T, Imp): "T->1"}
_SINGLE_SHAPE = {
    "T&": (T, And), "F|": (F, Or), "T|": (T, Or), "T->1": (T, Imp),
    "F&": (F, And), "Tbar": (TBAR, Imp), "T->Tbar": (T, Imp),
}


def _imp_free(f: Formula) -> bool:
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Imp):
            return False
        if isinstance(g, (And, Or)):
            stack.append(g.left)
            stack.append(g.right)
    return True


def _conclusions_for(node: frozenset, rule: str, principal: tuple) -> tuple:
    rest = node - set(principal)
    if rule == "F->":
        core = frozenset(s for s in rest if s.sign in (T, TBAR))
        imps = [s.formula for s in principal]
        out = []
        for j, imp in enumerate(imps):
            keep = frozenset(sf(F, im) for i, im in enumerate(imps) if i != j)
            out.append(core | keep | {sf(T, imp.left), sf(F, imp.right)})
        return tuple(out)
    f = principal[0].formula
    if rule == "T&":
        return (rest | {sf(T, f.left), sf(T, f.right)},)
    if rule == "F|":
        return (rest | {sf(F, f.left), sf(F, f.right)},)
    if rule == "T|":
        return (rest | {sf(T, f.left)}, rest | {sf(T, f.right)})
    if rule == "T->1":
        return (rest | {sf(T, f.right)}, rest | {sf(F, f.left), sf(TBAR, f)})
    if rule == "F&":
        return (rest | {sf(F, f.left), sf(F, f.right)},
                rest | {sf(F, f.left), sf(T, f.right)},
                rest | {sf(T, f.left), sf(F, f.right)})
    if rule == "Tbar":
        return (rest | {sf(T, f.right)},)
    # T->Tbar (sixopt promotion)
    return (rest | {sf(TBAR, f)},)


def instance_d3(node: frozenset, rule: str, principal: Iterable[SignedFormula]
                ) -> RuleInstanceD3:
    """Validate a rule application (including the Tbar gate and the sixopt
    eligibility condition) and build its conclusions."""
    principal = tuple(principal)
    if rule not in RULES_D3:
        raise ValueError(f"unknown rule {rule!r} for the two-sign calculus")
    if not principal:
        raise ValueError(f"rule {rule} needs at least one principal formula")
    missing = [s for s in principal if s not in node]
    if missing:
        raise ValueError(f"principal {missing[0]} is not in the node")
    if rule == "F->":
        if any(s.sign != F or not isinstance(s.formula, Imp) for s in principal):
            raise ValueError("F-> only consumes F-signed implications")
        if len(set(principal)) != len(principal):
            raise ValueError("F-> principal contains duplicates")
        expected = {s for s in node
                    if s.sign == F and isinstance(s.formula, Imp)}
        if set(principal) != expected:
            raise ValueError(
                "F-> must consume every F-signed implication of the node")
    else:
        if len(principal) != 1:
            raise ValueError(f"rule {rule} takes exactly one principal formula")
        s = principal[0]
        want_sign, want_type = _SINGLE_SHAPE[rule]
        if s.sign != want_sign or not isinstance(s.formula, want_type):
            raise ValueError(f"rule {rule} does not apply to {s.sign} "
                             f"{type(s.formula).__name__}")
        if rule == "Tbar" and not sat(node, s.formula.left):
            raise ValueError(
                "Tbar gate is closed: the antecedent is not satisfied")
        if rule == "T->Tbar" and not _imp_free(s.formula.left):
            raise ValueError(
                "T->Tbar requires an implication-free antecedent")
    return RuleInstanceD3(rule, principal, _conclusions_for(node, rule, principal))


def select_rule_d3(node: frozenset, sixopt: bool = False,
                   _tally: Optional[_Tally] = None) -> Optional[RuleInstanceD3]:
    """First applicable rule in strategy order with canonical tie-breaks.
    None means the node is terminal."""
    ordered = canonical_sort(node)
    for s in ordered:
        rule = _ALPHA.get((s.sign, type(s.formula)))
        if rule is not None:
            return instance_d3(node, rule, (s,))
    if sixopt:
        for s in ordered:
            if s.sign == T and isinstance(s.formula, Imp) \
                    and _imp_free(s.formula.left):
                return instance_d3(node, "T->Tbar", (s,))
    for s in ordered:
        rule = _BETA.get((s.sign, type(s.formula)))
        if rule is not None:
            return instance_d3(node, rule, (s,))
    for s in ordered:
        if s.sign == F and isinstance(s.formula, And):
            return instance_d3(node, "F&", (s,))
    cache: dict = {}
    for s in ordered:
        if s.sign == TBAR and _sat(node, s.formula.left, cache, _tally):
            return instance_d3(node, "Tbar", (s,))
    joint = tuple(s for s in ordered
                  if s.sign == F and isinstance(s.formula, Imp))
    if joint:
        return instance_d3(node, "F->", joint)
    return None


def expand_d3(node: frozenset, inst: RuleInstanceD3) -> tuple:
    """Conclusions of applying inst to node; defensively revalidates inst."""
    fresh = instance_d3(node, inst.rule, inst.principal)
    if fresh.conclusions != inst.conclusions:
        raise ValueError("rule instance does not match the node it is applied to")
    return fresh.conclusions


# ---------------------------------------------------------------------------
# Decision procedure
# ---------------------------------------------------------------------------

@dataclass
class SearchStatsD3:
    expansions: int = 0
    max_depth: int = 0
    budget: int = 0
    max_branch_sat_steps: int = 0


@dataclass(frozen=True)
class OutcomeD3:
    proof: Optional[ProofTree]
    model: Optional[KripkeChain]
    trace: Optional[tuple]
    stats: SearchStatsD3

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
    __slots__ = ("sixopt", "on_expand", "stats")

    def __init__(self, sixopt, on_expand, stats_):
        self.sixopt = sixopt
        self.on_expand = on_expand
        self.stats = stats_


def _search_d3(node: frozenset, depth: int, sat_steps: int, ctx: _Ctx):
    st = ctx.stats
    if depth > st.max_depth:
        st.max_depth = depth
    if depth > st.budget:
        raise SearchBudgetError(
            f"search depth exceeded the defensive budget of {st.budget}")
    if inconsistent_d3(node):
        return ProofTree(node, LEAF, (), (), "d3"), None
    tally = _Tally()
    inst = select_rule_d3(node, ctx.sixopt, tally)
    sat_steps += tally.steps
    if sat_steps > st.max_branch_sat_steps:
        st.max_branch_sat_steps = sat_steps
    if inst is None:
        return None, (node,)
    st.expansions += 1
    if ctx.on_expand is not None:
        ctx.on_expand(node, inst, inst.conclusions)
    crossing = inst.rule == "F->"
    proofs = []
    for child in inst.conclusions:
        sub, trace = _search_d3(child, depth + 1, sat_steps, ctx)
        if sub is None:
            return None, ((node,) + trace if crossing else trace)
        proofs.append(sub)
    return ProofTree(node, inst.rule, inst.principal, tuple(proofs), "d3"), None


def _valuation(snapshot: frozenset) -> frozenset:
    return frozenset(s.formula.name for s in snapshot
                     if s.sign == T and isinstance(s.formula, Var))


def decide_d3(goal: Formula, sixopt: bool = False,
              on_expand: Optional[Callable] = None) -> OutcomeD3:
    """Decide validity of goal with the two-sign calculus.

    Returns a proof on success; otherwise a counter-chain whose root realizes
    F goal, plus the snapshot trace it came from.  `on_expand` is invoked as
    in the seven-sign calculus.
    """
    st = SearchStatsD3(budget=_depth_budget(goal))
    ctx = _Ctx(sixopt, on_expand, st)
    root = frozenset({sf(F, goal)})
    limit = min(100_000, 4 * st.budget + 1000)
    old_limit = sys.getrecursionlimit()
    if limit > old_limit:
        sys.setrecursionlimit(limit)
    try:
        proof, trace = _search_d3(root, 0, 0, ctx)
    finally:
        if limit > old_limit:
            sys.setrecursionlimit(old_limit)
    if proof is not None:
        return OutcomeD3(proof, None, None, st)
    model = KripkeChain(tuple(_valuation(snap) for snap in trace))
    return OutcomeD3(None, model, trace, st)
