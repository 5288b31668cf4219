"""Proof trees, independent checking by rule replay, metrics, serialization.

A proof is a rule-labelled tree of signed-formula nodes whose leaves are all
inconsistent sets.  The checker re-derives every step from the recorded
principal formulas via the calculus's own expansion operation, so a proof is
accepted only if it replays exactly; it does not trust the producer.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Union

from .formula import Formula, ParseError, parse, render
from .semantics import (
    D1_SIGNS, D3_SIGNS, KripkeChain, SignedFormula, canonical_sort,
)

__all__ = [
    "LEAF", "ProofTree", "ProofMetrics", "ProofSchemaError",
    "check_proof", "metrics", "to_json", "from_json",
]

Node = frozenset

LEAF = "leaf"


class ProofSchemaError(ValueError):
    """Malformed serialized proof or model."""


@dataclass(frozen=True)
class ProofTree:
    """One deduction node: the signed-formula set, the rule applied to it,
    the principal formulas the rule consumed (in application order, which for
    the multi-premise rules fixes the conclusion order), and the subtrees.

    Closed leaves carry rule == LEAF, an empty principal, and no children.
    """

    node: frozenset
    rule: str
    principal: tuple
    children: tuple
    calculus: str

    def __post_init__(self):
        if self.calculus not in ("d1", "d3"):
            raise ValueError(f"unknown calculus tag {self.calculus!r}")


@dataclass(frozen=True)
class ProofMetrics:
    depth: int
    node_count: int
    max_branching: int
    tbar_firings: int


def metrics(p: ProofTree) -> ProofMetrics:
    """Tree metrics; a single leaf has depth 1 and node_count 1."""
    node_count = 0
    max_branching = 0
    tbar = 0
    depth = 0
    stack = [(p, 1)]
    while stack:
        t, d = stack.pop()
        node_count += 1
        depth = max(depth, d)
        max_branching = max(max_branching, len(t.children))
        if t.rule == "Tbar":
            tbar += 1
        stack.extend((c, d + 1) for c in t.children)
    return ProofMetrics(depth, node_count, max_branching, tbar)


def check_proof(p: ProofTree, calculus: Optional[str] = None, *,
                optimized: bool = False, sixopt: bool = False) -> Optional[str]:
    """Replay every step of the proof; None means valid.

    On failure returns a defect report naming the path of the first bad node.
    `optimized` widens the leaf inconsistency check and admits the optimized
    multi-premise rule (seven-sign calculus); `sixopt` admits the implication
    promotion step (two-sign calculus).
    """
    cal = calculus if calculus is not None else p.calculus
    if cal not in ("d1", "d3"):
        return f"unknown calculus {cal!r}"
    if p.calculus != cal:
        return f"proof is tagged {p.calculus!r} but was checked as {cal!r}"
    allowed = D1_SIGNS if cal == "d1" else D3_SIGNS
    if cal == "d1":   # deferred import: the calculi import ProofTree from here
        from . import d1 as _calc
        inconsistent, instance = (
            lambda n: _calc.inconsistent_d1(n, optimized)), _calc.instance_d1
    else:
        from . import d3 as _calc
        inconsistent, instance = _calc.inconsistent_d3, _calc.instance_d3

    stack = [(p, "root")]
    while stack:
        t, path = stack.pop()
        if t.calculus != cal:
            return f"{path}: subtree tagged {t.calculus!r} inside a {cal} proof"
        for s in t.node:
            if s.sign not in allowed:
                return f"{path}: sign {s.sign} is not part of calculus {cal}"
        if t.rule == LEAF:
            if t.children:
                return f"{path}: leaf has children"
            if t.principal:
                return f"{path}: leaf has principal formulas"
            if not inconsistent(t.node):
                return f"{path}: leaf node is not inconsistent"
            continue
        if cal == "d1" and t.rule == "FnTtil-opt" and not optimized:
            return f"{path}: rule FnTtil-opt requires optimized mode"
        if cal == "d3" and t.rule == "T->Tbar" and not sixopt:
            return f"{path}: rule T->Tbar requires sixopt mode"
        try:
            inst = instance(t.node, t.rule, t.principal)
        except ValueError as e:
            return f"{path}: {e}"
        if tuple(c.node for c in t.children) != inst.conclusions:
            return (f"{path}: children do not match the conclusions of "
                    f"{t.rule} on its principal")
        stack.extend(
            (c, f"{path}.children[{i}]") for i, c in enumerate(t.children))
    return None


# ---------------------------------------------------------------------------
# JSON serialization.
#
# Proof:  {"calculus": "d1"|"d3", "node": [{"sign": "T", "formula": "p -> q"},
#          ...], "rule": "T->", "principal": [...], "children": [...]}
# with subtrees shaped the same minus the calculus tag; leaves use
# "rule": "leaf".  Chain: {"worlds": [{"vars": ["p"]}, ...]}.
# ---------------------------------------------------------------------------

def _signed_to_obj(s: SignedFormula) -> dict:
    return {"sign": s.sign, "formula": render(s.formula)}


def _tree_to_obj(t: ProofTree) -> dict:
    return {
        "node": [_signed_to_obj(s) for s in canonical_sort(t.node)],
        "rule": t.rule,
        "principal": [_signed_to_obj(s) for s in t.principal],
        "children": [_tree_to_obj(c) for c in t.children],
    }


def to_json(x: Union[ProofTree, KripkeChain], indent: Optional[int] = None) -> str:
    sep = (",", ":") if indent is None else None
    if isinstance(x, ProofTree):
        obj = {"calculus": x.calculus}
        obj.update(_tree_to_obj(x))
        return json.dumps(obj, indent=indent, separators=sep)
    if isinstance(x, KripkeChain):
        obj = {"worlds": [{"vars": sorted(w)} for w in x.worlds]}
        return json.dumps(obj, indent=indent, separators=sep)
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _signed_from_obj(obj) -> SignedFormula:
    if not isinstance(obj, dict) or set(obj) != {"sign", "formula"}:
        raise ProofSchemaError(f"bad signed formula entry: {obj!r}")
    return SignedFormula(obj["sign"], parse(obj["formula"]))


def _tree_from_obj(obj, calculus: str) -> ProofTree:
    if not isinstance(obj, dict):
        raise ProofSchemaError("proof node must be an object")
    missing = {"node", "rule", "principal", "children"} - set(obj)
    if missing:
        raise ProofSchemaError(f"proof node missing keys {sorted(missing)}")
    return ProofTree(
        node=frozenset(_signed_from_obj(s) for s in obj["node"]),
        rule=str(obj["rule"]),
        principal=tuple(_signed_from_obj(s) for s in obj["principal"]),
        children=tuple(_tree_from_obj(c, calculus) for c in obj["children"]),
        calculus=calculus,
    )


def from_json(text: str) -> Union[ProofTree, KripkeChain]:
    """Inverse of to_json; raises ProofSchemaError on malformed input."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise ProofSchemaError(f"not JSON: {e}") from e
    try:
        if isinstance(obj, dict) and "worlds" in obj:
            worlds = tuple(frozenset(map(str, w["vars"])) for w in obj["worlds"])
            return KripkeChain(worlds)
        if isinstance(obj, dict) and "calculus" in obj:
            return _tree_from_obj(obj, str(obj["calculus"]))
    except ProofSchemaError:
        raise
    except (KeyError, TypeError, ValueError, ParseError) as e:
        raise ProofSchemaError(str(e)) from e
    raise ProofSchemaError("neither a proof (calculus) nor a chain (worlds)")
