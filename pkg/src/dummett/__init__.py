"""Decision procedures for propositional Dummett logic (Goedel-Dummett logic).

Two terminating signed-tableau calculi — a seven-sign calculus and a leaner
two-sign calculus — plus a brute-force Kripke-chain oracle they are
cross-validated against.  Every PROVED answer comes with a machine-checkable
proof tree and every REFUTED answer with a linearly ordered counter-model.
"""

from .formula import (
    And, Bot, Formula, FormulaStats, Imp, Or, ParseError, Top, Var,
    parse, random_formula, render, stats, subformulas,
)
from .semantics import (
    KripkeChain, SignedFormula, enumerate_chains, forces, oracle_valid,
    realizes_d1, realizes_set,
)

__version__ = "0.1.0"
