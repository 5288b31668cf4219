"""Formula AST for the propositional language over variables, true, false, &, |, ->.

The surface syntax accepted by :func:`parse` (and emitted by :func:`render`) is

    formula := or
    or      := imp ("|" or)?
    imp     := and ("->" imp)?
    and     := unary ("&" and)?
    unary   := "~" unary | atom
    atom    := ident | "true" | "top" | "false" | "bot" | "(" formula ")"

so `|` binds loosest, then `->` (right-associative), then `&`, then `~`.  That
makes the linearity axiom writable without parentheses: ``p -> q | q -> p`` is
the disjunction of the two implications.  Negation is surface sugar only:
``~A`` parses to ``A -> false`` and the AST has no negation node.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from typing import Iterator, Union

__all__ = [
    "Formula", "Var", "Top", "Bot", "And", "Or", "Imp", "TOP", "BOT",
    "FormulaStats", "ParseError", "parse", "render", "subformulas", "stats",
    "random_formula", "atoms_of", "variables_of",
]


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Bot:
    pass


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Imp:
    left: "Formula"
    right: "Formula"


Formula = Union[Var, Top, Bot, And, Or, Imp]

TOP = Top()
BOT = Bot()

_KEYWORDS = {"true": TOP, "top": TOP, "false": BOT, "bot": BOT}


class ParseError(ValueError):
    """Malformed concrete syntax; `position` is a 0-based offset into the text."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


_TOKEN_RE = re.compile(r"\s*(->|[()&|~]|[A-Za-z_][A-Za-z0-9_]*)")


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            raise ParseError(f"unexpected character {stripped[0]!r}",
                             len(text) - len(stripped))
        tokens.append((m.group(1), m.start(1)))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.index = 0

    def peek(self) -> str | None:
        if self.index < len(self.tokens):
            return self.tokens[self.index][0]
        return None

    def pos(self) -> int:
        if self.index < len(self.tokens):
            return self.tokens[self.index][1]
        return len(self.text)

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", self.pos())
        self.index += 1
        return tok

    def expect(self, tok: str) -> None:
        if self.peek() != tok:
            raise ParseError(f"expected {tok!r}", self.pos())
        self.index += 1

    def formula(self) -> Formula:
        left = self.imp()
        if self.peek() == "|":
            self.take()
            return Or(left, self.formula())
        return left

    def imp(self) -> Formula:
        left = self.conj()
        if self.peek() == "->":
            self.take()
            return Imp(left, self.imp())
        return left

    def conj(self) -> Formula:
        left = self.unary()
        if self.peek() == "&":
            self.take()
            return And(left, self.conj())
        return left

    def unary(self) -> Formula:
        if self.peek() == "~":
            self.take()
            return Imp(self.unary(), BOT)
        return self.atom()

    def atom(self) -> Formula:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", self.pos())
        if tok == "(":
            self.take()
            inner = self.formula()
            self.expect(")")
            return inner
        if tok in _KEYWORDS:
            self.take()
            return _KEYWORDS[tok]
        if re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", tok):
            self.take()
            return Var(tok)
        raise ParseError(f"expected a formula, found {tok!r}", self.pos())


def parse(text: str) -> Formula:
    """Parse concrete syntax into a Formula; raises ParseError with a position."""
    parser = _Parser(text)
    if not parser.tokens:
        raise ParseError("empty input", 0)
    result = parser.formula()
    if parser.peek() is not None:
        raise ParseError(f"trailing input {parser.peek()!r}", parser.pos())
    return result


# Binding strength used by the printer; must mirror the grammar above.
_PREC = {Or: 1, Imp: 2, And: 3}
_OPS = {Or: "|", Imp: "->", And: "&"}


def render(f: Formula) -> str:
    """Minimal-parenthesization concrete syntax; parse(render(f)) == f."""
    if isinstance(f, Var):
        return f.name
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bot):
        return "false"
    prec = _PREC[type(f)]

    def side(child: Formula, is_left: bool) -> str:
        text = render(child)
        if isinstance(child, (Var, Top, Bot)):
            return text
        child_prec = _PREC[type(child)]
        # Every connective chains to the right, so a left child needs parens
        # already at equal precedence, a right child only when looser.
        if child_prec < prec or (is_left and child_prec == prec):
            return f"({text})"
        return text

    return f"{side(f.left, True)} {_OPS[type(f)]} {side(f.right, False)}"


def subformulas(f: Formula) -> frozenset[Formula]:
    """All subtrees of f, f itself included."""
    acc: set[Formula] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if g in acc:
            continue
        acc.add(g)
        if isinstance(g, (And, Or, Imp)):
            stack.append(g.left)
            stack.append(g.right)
    return frozenset(acc)


@dataclass(frozen=True)
class FormulaStats:
    var_count: int           # distinct variables
    connective_count: int    # &, |, -> nodes
    size: int                # total node count, leaves included


def _walk(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        if isinstance(g, (And, Or, Imp)):
            stack.append(g.left)
            stack.append(g.right)


def stats(f: Formula) -> FormulaStats:
    names = set()
    connectives = 0
    size = 0
    for g in _walk(f):
        size += 1
        if isinstance(g, Var):
            names.add(g.name)
        elif isinstance(g, (And, Or, Imp)):
            connectives += 1
    return FormulaStats(len(names), connectives, size)


def size_of(f: Formula) -> int:
    return stats(f).size


def variables_of(f: Formula) -> frozenset[str]:
    return frozenset(g.name for g in _walk(f) if isinstance(g, Var))


def atoms_of(f: Formula) -> frozenset[Formula]:
    """Leaf subformulas: variables and any occurring constants."""
    return frozenset(g for g in _walk(f) if isinstance(g, (Var, Top, Bot)))


_VAR_LETTERS = "pqrstuvwxyz"


def _var_name(i: int) -> str:
    if i < len(_VAR_LETTERS):
        return _VAR_LETTERS[i]
    return f"v{i}"


def random_formula(var_pool: int, max_connectives: int, seed: int) -> Formula:
    """Deterministic random AST with <= max_connectives connectives.

    Leaves are variables from a pool of `var_pool` names, with an occasional
    true/false constant so goals exercising the constants appear in fuzzing.
    Pure function of its arguments: same seed, same formula.
    """
    if var_pool < 1:
        raise ValueError("var_pool must be >= 1")
    if max_connectives < 0:
        raise ValueError("max_connectives must be >= 0")
    rng = random.Random(seed)
    names = [_var_name(i) for i in range(var_pool)]

    def leaf() -> Formula:
        roll = rng.random()
        if roll < 0.08:
            return TOP
        if roll < 0.16:
            return BOT
        return Var(rng.choice(names))

    def build(budget: int) -> Formula:
        if budget == 0 or rng.random() < 0.25:
            return leaf()
        kind = rng.choice((And, Or, Imp))
        left_budget = rng.randint(0, budget - 1)
        return kind(build(left_budget), build(budget - 1 - left_budget))

    return build(max_connectives)
