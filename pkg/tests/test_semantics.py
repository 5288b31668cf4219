"""Kripke chains, forcing, realizability, and the brute-force oracle."""

import pytest

from dummett.formula import Bot, Imp, Top, Var, parse
from dummett.semantics import (
    KripkeChain, chain, enumerate_chains, forces, oracle_valid, random_chain,
    realizes_d1, realizes_set, sf,
)

P, Q = Var("p"), Var("q")


def test_chain_validation():
    with pytest.raises(ValueError):
        KripkeChain(())
    with pytest.raises(ValueError):
        chain({"p"}, set())  # valuation shrinks
    assert len(chain(set(), {"p"}, {"p", "q"})) == 3


def test_forcing_basics():
    m = chain(set(), {"p"})
    assert not forces(m, 0, P) and forces(m, 1, P)
    assert forces(m, 0, Top()) and not forces(m, 0, Bot())
    assert forces(m, 0, parse("p | ~p")) is False
    assert forces(m, 1, parse("p | ~p"))
    # persistence: anything forced at 0 stays forced at 1
    for text in ["~~p", "p -> p", "q -> p"]:
        f = parse(text)
        if forces(m, 0, f):
            assert forces(m, 1, f)


def test_implication_quantifies_over_later_worlds():
    m = chain(set(), {"p"})
    # p->q fails at 0 because world 1 has p without q
    assert not forces(m, 0, Imp(P, Q))
    # but the classical local reading would make it true at 0
    assert not forces(m, 0, P)


def test_double_negation_on_a_chain():
    m = chain(set(), {"p"})
    assert forces(m, 0, parse("~~p"))
    assert not forces(m, 0, parse("~~p -> p"))


def test_realizes_d1_clauses():
    m = chain(set(), {"p"})
    assert realizes_d1(m, 0, sf("F", P))
    assert realizes_d1(m, 0, sf("Fl", P))      # fails now, holds at all later
    assert realizes_d1(m, 0, sf("Tn", P))
    assert not realizes_d1(m, 0, sf("Fn", P))
    assert realizes_d1(m, 1, sf("T", P))
    # at the last world Tn is vacuous and Fn unrealizable
    assert realizes_d1(m, 1, sf("Tn", Q))
    assert not realizes_d1(m, 1, sf("Fn", Top()))
    # Fl false/true split: Fl q at 0 fails since q never appears
    assert not realizes_d1(m, 0, sf("Fl", Q))


def test_realizes_implication_signs():
    ipq = Imp(P, Q)
    m = chain({"q"}, {"p", "q"})
    assert realizes_d1(m, 0, sf("T", ipq))
    assert realizes_d1(m, 0, sf("That", ipq))   # antecedent not yet forced
    assert not realizes_d1(m, 0, sf("Ttil", ipq))  # p holds at every later world
    m2 = chain(set(), set(), {"p"})
    impbot = Imp(P, Bot())
    assert realizes_d1(m2, 0, sf("Ttil", impbot)) is False  # ~p fails: p at 2
    assert realizes_d1(m2, 0, sf("F", impbot))


def test_realizes_set_conjunction_and_tbar():
    ipq = Imp(P, Q)
    m = chain({"q"}, {"p", "q"})
    assert realizes_set(m, 0, [sf("Tbar", ipq), sf("T", Q)])
    assert not realizes_set(m, 0, [sf("Tbar", ipq), sf("T", P)])
    assert realizes_set(m, 0, [])


def test_signed_formula_shape_errors():
    for sign in ("That", "Ttil", "Tbar"):
        with pytest.raises(ValueError):
            sf(sign, P)
    with pytest.raises(ValueError):
        sf("Txx", P)


def test_enumerate_chains_counts():
    assert sum(1 for _ in enumerate_chains({"p"}, 2)) == 5
    assert sum(1 for _ in enumerate_chains(set(), 2)) == 2
    assert sum(1 for _ in enumerate_chains({"p", "q", "r"}, 4)) == 8 + 27 + 64 + 125


def test_enumerate_chains_order_and_monotonicity():
    got = list(enumerate_chains({"p"}, 2))
    expect = [
        chain(set()), chain({"p"}),
        chain(set(), set()), chain(set(), {"p"}), chain({"p"}, {"p"}),
    ]
    assert got == expect
    for m in enumerate_chains({"p", "q"}, 3):
        for i in range(len(m) - 1):
            assert m.worlds[i] <= m.worlds[i + 1]


@pytest.mark.parametrize("text", [
    "p -> p", "(p -> q) | (q -> p)", "false -> p", "p -> true",
    "p & q -> p", "p -> p | q", "~~(p | ~p)",
    "(p -> q) -> ((q -> r) -> (p -> r))",
])
def test_oracle_accepts_valid(text):
    assert oracle_valid(parse(text)) is None


@pytest.mark.parametrize("text,worlds", [
    ("p | ~p", 2),
    ("~~p -> p", 2),
    ("((p -> q) -> p) -> p", 2),
    ("false", 1),
    ("p", 1),
])
def test_oracle_counter_chains(text, worlds):
    f = parse(text)
    m = oracle_valid(f)
    assert m is not None and len(m) <= worlds
    assert not forces(m, 0, f)


def test_oracle_returns_first_chain_in_order():
    # for a plain variable the very first enumerated chain (one empty world)
    # is already a counter-model
    assert oracle_valid(P) == chain(set())
    assert oracle_valid(parse("p | ~p")) == chain(set(), {"p"})


def test_random_chain_is_deterministic_and_monotone():
    for seed in range(50):
        m = random_chain({"p", "q"}, 5, seed)
        assert m == random_chain({"p", "q"}, 5, seed)
        for i in range(len(m) - 1):
            assert m.worlds[i] <= m.worlds[i + 1]
