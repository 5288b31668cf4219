"""Linearly ordered Kripke models, forcing, signed-formula realizability, oracle.

A model here is always a finite chain of worlds with monotone valuations
(`KripkeChain`).  Validity of a formula is forcing at the root; the brute-force
oracle enumerates every monotone chain of at most n+1 worlds over the formula's
n variables, which is complete for this logic (refutable formulas always have a
counter-chain that shallow).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Optional
import random

from .formula import (
    And, Bot, Formula, Imp, Or, Top, Var, render, stats, variables_of,
)

__all__ = [
    "T", "F", "FL", "FN", "TN", "THAT", "TTIL", "TBAR",
    "D1_SIGNS", "D3_SIGNS", "SIGN_ORDER", "SignedFormula", "sf",
    "canonical_key", "canonical_sort",
    "KripkeChain", "chain", "forces", "realizes_d1", "realizes_set",
    "enumerate_chains", "oracle_valid", "random_chain",
]

# Sign tokens (these exact strings are also the JSON encoding).
T = "T"        # known here
F = "F"        # not known here
FL = "Fl"      # last world where not known: F here, T at every later world
FN = "Fn"      # not known at some strictly later world
TN = "Tn"      # known at every strictly later world
THAT = "That"  # implication known here, antecedent not known here
TTIL = "Ttil"  # implication known here, antecedent not known at some later world
TBAR = "Tbar"  # two-sign calculus only: known implication set aside by the search

D1_SIGNS = frozenset({T, F, FL, FN, TN, THAT, TTIL})
D3_SIGNS = frozenset({T, F, TBAR})
_IMP_ONLY_SIGNS = frozenset({THAT, TTIL, TBAR})


@dataclass(frozen=True)
class SignedFormula:
    sign: str
    formula: Formula

    def __post_init__(self):
        if self.sign not in D1_SIGNS and self.sign not in D3_SIGNS:
            raise ValueError(f"unknown sign {self.sign!r}")
        if self.sign in _IMP_ONLY_SIGNS and not isinstance(self.formula, Imp):
            raise ValueError(f"sign {self.sign} may only tag implications")


def sf(sign: str, formula: Formula) -> SignedFormula:
    """Shorthand constructor."""
    return SignedFormula(sign, formula)


# Canonical ordering of signed formulas: used for deterministic rule selection
# and for serializing nodes.  Sign first, then formula size, then the rendered
# string as a total tie-break.
SIGN_ORDER = {T: 0, F: 1, FL: 2, FN: 3, TN: 4, THAT: 5, TTIL: 6, TBAR: 7}


def canonical_key(signed: SignedFormula) -> tuple[int, int, str]:
    return (SIGN_ORDER[signed.sign], stats(signed.formula).size,
            render(signed.formula))


def canonical_sort(node: Iterable[SignedFormula]) -> list[SignedFormula]:
    return sorted(node, key=canonical_key)


@dataclass(frozen=True)
class KripkeChain:
    """Worlds are indices 0..len-1 (0 is the root); valuations are monotone."""

    worlds: tuple[frozenset[str], ...]

    def __post_init__(self):
        if not self.worlds:
            raise ValueError("a chain needs at least one world")
        for i in range(len(self.worlds) - 1):
            if not self.worlds[i] <= self.worlds[i + 1]:
                raise ValueError(
                    f"valuations must be monotone: world {i} is not a subset "
                    f"of world {i + 1}")

    def __len__(self) -> int:
        return len(self.worlds)


def chain(*valuations: Iterable[str]) -> KripkeChain:
    """Test-friendly constructor: chain({'p'}, {'p','q'})."""
    return KripkeChain(tuple(frozenset(v) for v in valuations))


@lru_cache(maxsize=65536)
def _profile(model: KripkeChain, f: Formula) -> tuple[bool, ...]:
    """Forcing value of f at every world, computed bottom-up.

    Implication is evaluated right-to-left: it holds at a world iff it holds at
    the next world and the antecedent-to-consequent step holds locally, which
    is equivalent to the quantifier over all later worlds on a chain.
    """
    n = len(model.worlds)
    if isinstance(f, Var):
        return tuple(f.name in w for w in model.worlds)
    if isinstance(f, Top):
        return (True,) * n
    if isinstance(f, Bot):
        return (False,) * n
    left = _profile(model, f.left)
    right = _profile(model, f.right)
    if isinstance(f, And):
        return tuple(a and b for a, b in zip(left, right))
    if isinstance(f, Or):
        return tuple(a or b for a, b in zip(left, right))
    # Imp
    out = [False] * n
    holds_later = True
    for i in range(n - 1, -1, -1):
        holds_later = holds_later and ((not left[i]) or right[i])
        out[i] = holds_later
    return tuple(out)


def forces(model: KripkeChain, world: int, f: Formula) -> bool:
    """Truth of f at the given world of the chain."""
    return _profile(model, f)[world]


def realizes_d1(model: KripkeChain, world: int, signed: SignedFormula) -> bool:
    """The semantic commitment of a signed formula at a world.

    T = forced; F = not forced; Fn = not forced at some strictly later world;
    Tn = forced at every strictly later world; Fl = F here and Tn;
    Ttil(B->C) = T and Fn B; That(B->C) = T and F B.
    """
    sign, f = signed.sign, signed.formula
    prof = _profile(model, f)
    last = len(model.worlds) - 1
    if sign == T:
        return prof[world]
    if sign == F:
        return not prof[world]
    if sign == FN:
        return any(not prof[b] for b in range(world + 1, last + 1))
    if sign == TN:
        return all(prof[b] for b in range(world + 1, last + 1))
    if sign == FL:
        return (not prof[world]) and all(
            prof[b] for b in range(world + 1, last + 1))
    if sign == TTIL:
        ant = _profile(model, f.left)
        return prof[world] and any(
            not ant[b] for b in range(world + 1, last + 1))
    if sign == THAT:
        ant = _profile(model, f.left)
        return prof[world] and not ant[world]
    raise ValueError(f"not a seven-sign formula: {signed}")


def realizes_set(model: KripkeChain, world: int,
                 node: Iterable[SignedFormula]) -> bool:
    """Conjunction of realizability over the set; Tbar is checked as T."""
    for signed in node:
        if signed.sign == TBAR:
            signed = SignedFormula(T, signed.formula)
        if not realizes_d1(model, world, signed):
            return False
    return True


def enumerate_chains(variables: Iterable[str],
                     max_worlds: int) -> Iterator[KripkeChain]:
    """Every monotone chain with 1..max_worlds worlds over the variables.

    Deterministic order: by world count, then lexicographically by the tuple of
    valuation bitmasks (bit i = i-th variable in sorted order).  Valuations may
    repeat between adjacent worlds.
    """
    if max_worlds < 1:
        raise ValueError("max_worlds must be >= 1")
    names = sorted(set(variables))
    full = (1 << len(names)) - 1
    masks = range(full + 1)

    def to_world(mask: int) -> frozenset[str]:
        return frozenset(n for i, n in enumerate(names) if mask >> i & 1)

    def extend(prefix: tuple[int, ...], remaining: int) -> Iterator[tuple[int, ...]]:
        if remaining == 0:
            yield prefix
            return
        low = prefix[-1] if prefix else 0
        for mask in masks:
            if mask & low == low:
                yield from extend(prefix + (mask,), remaining - 1)

    for k in range(1, max_worlds + 1):
        for seq in extend((), k):
            yield KripkeChain(tuple(to_world(m) for m in seq))


def oracle_valid(f: Formula) -> Optional[KripkeChain]:
    """Brute-force validity check; None means valid.

    Enumerates every chain with at most n+1 worlds (n = distinct variables of
    f) and returns the first chain, in enumeration order, whose root does not
    force f.  The n+1 bound is complete for this logic, so None is a genuine
    validity verdict, not a search timeout.
    """
    names = variables_of(f)
    for model in enumerate_chains(names, len(names) + 1):
        if not forces(model, 0, f):
            return model
    return None


def random_chain(variables: Iterable[str], max_worlds: int,
                 seed: int) -> KripkeChain:
    """Uniformly sloppy random monotone chain, deterministic per seed."""
    rng = random.Random(seed)
    names = sorted(set(variables))
    k = rng.randint(1, max_worlds)
    mask = 0
    seq = []
    for _ in range(k):
        grow = rng.randrange(1 << len(names)) if names else 0
        mask |= grow if rng.random() < 0.7 else 0
        seq.append(frozenset(n for i, n in enumerate(names) if mask >> i & 1))
    return KripkeChain(tuple(seq))
