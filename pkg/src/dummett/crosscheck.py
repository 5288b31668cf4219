"""Cross-validation harness.

Runs every decision route — the seven-sign calculus (plain and optimized),
the two-sign calculus (plain and with the promotion step), and the
brute-force semantic oracle — over a stream of formulas and demands that all
five verdicts coincide, that every emitted proof replays under check_proof,
and that every counter-model realizes the refuted goal at its root.

A disagreement is minimized greedily (subtrees replaced by their children or
by a constant while the problem persists) before being reported, so a
failure points at a small witness.  The `routes` parameter exists to inject
broken deciders in the harness's own tests.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

from .d1 import decide_d1
from .d3 import decide_d3
from .formula import (
    And, BOT, Formula, Imp, Or, TOP, random_formula, render, size_of,
    variables_of,
)
from .kernel import enumerate_space, formula_of, space_counts
from .proofs import check_proof
from .semantics import F, oracle_valid, realizes_set, sf

__all__ = [
    "Route", "Disagreement", "CrosscheckReport", "default_routes",
    "check_formula", "shrink", "crosscheck_samples", "crosscheck_exhaustive",
]

_EXHAUSTIVE_CAP = 2_000_000  # formulas; keeps --exhaustive desk-scale


@dataclass(frozen=True)
class Route:
    """One decision procedure under test: label, calculus tag, decide
    callable, and the mode flags its proofs must be checked under."""

    label: str
    calculus: str
    decide: Callable
    optimized: bool = False
    sixopt: bool = False


def default_routes() -> tuple:
    return (
        Route("d1", "d1", lambda f: decide_d1(f)),
        Route("d1-opt", "d1", lambda f: decide_d1(f, optimized=True),
              optimized=True),
        Route("d3", "d3", lambda f: decide_d3(f)),
        Route("d3-sixopt", "d3", lambda f: decide_d3(f, sixopt=True),
              sixopt=True),
    )


@dataclass(frozen=True)
class Disagreement:
    formula: Formula
    problems: tuple  # strings, e.g. "d3: verdict proved, oracle says refuted"

    def __str__(self):
        lines = [f"witness: {render(self.formula)}"]
        lines += [f"  - {p}" for p in self.problems]
        return "\n".join(lines)


@dataclass
class CrosscheckReport:
    checked: int = 0
    elapsed: float = 0.0
    disagreement: Optional[Disagreement] = None
    labels: tuple = ()

    @property
    def ok(self) -> bool:
        return self.disagreement is None


def check_formula(f: Formula, routes: Optional[Sequence[Route]] = None) -> list:
    """All problems the routes exhibit on f (empty means agreement)."""
    routes = default_routes() if routes is None else routes
    problems = []
    counter = oracle_valid(f)
    oracle_verdict = "proved" if counter is None else "refuted"
    for route in routes:
        out = route.decide(f)
        if out.verdict != oracle_verdict:
            problems.append(f"{route.label}: verdict {out.verdict}, "
                            f"oracle says {oracle_verdict}")
            continue
        if out.proof is not None:
            defect = check_proof(out.proof, route.calculus,
                                 optimized=route.optimized,
                                 sixopt=route.sixopt)
            if defect is not None:
                problems.append(f"{route.label}: proof defect: {defect}")
        else:
            if not realizes_set(out.model, 0, {sf(F, f)}):
                problems.append(f"{route.label}: counter-model does not "
                                f"realize the refuted goal at its root")
            if route.calculus == "d1" \
                    and len(out.model) > len(variables_of(f)) + 1:
                problems.append(f"{route.label}: counter-model has "
                                f"{len(out.model)} worlds, over the "
                                f"variables+1 bound")
    return problems


def shrink(f: Formula, still_failing: Callable[[Formula], bool]) -> Formula:
    """Greedy minimization: repeatedly replace some subtree by one of its
    children or by a constant, as long as the failure persists."""

    def variants(g: Formula):
        if not isinstance(g, (And, Or, Imp)):
            return
        yield g.left
        yield g.right
        yield TOP
        yield BOT
        for sub in variants(g.left):
            yield type(g)(sub, g.right)
        for sub in variants(g.right):
            yield type(g)(g.left, sub)

    shrunk = True
    while shrunk:
        shrunk = False
        for candidate in variants(f):
            if size_of(candidate) < size_of(f) and still_failing(candidate):
                f = candidate
                shrunk = True
                break
    return f


def _run(stream: Iterable[Formula],
         routes: Optional[Sequence[Route]]) -> CrosscheckReport:
    routes_t = default_routes() if routes is None else tuple(routes)
    report = CrosscheckReport(labels=tuple(r.label for r in routes_t))
    start = time.perf_counter()
    for f in stream:
        problems = check_formula(f, routes_t)
        report.checked += 1
        if problems:
            small = shrink(f, lambda g: bool(check_formula(g, routes_t)))
            report.disagreement = Disagreement(
                small, tuple(check_formula(small, routes_t)))
            break
    report.elapsed = time.perf_counter() - start
    return report


def crosscheck_samples(var_pool: int, max_connectives: int, samples: int,
                       seed: int,
                       routes: Optional[Sequence[Route]] = None
                       ) -> CrosscheckReport:
    """Seeded random formulas (constants included); bit-reproducible."""
    stream = (random_formula(var_pool, max_connectives, seed=seed + i)
              for i in range(samples))
    return _run(stream, routes)


def crosscheck_exhaustive(nvars: int, max_connectives: int,
                          routes: Optional[Sequence[Route]] = None
                          ) -> CrosscheckReport:
    """Every formula over the variable pool up to the connective bound
    (variable leaves only), in enumeration order."""
    total = sum(space_counts(nvars, max_connectives))
    if total > _EXHAUSTIVE_CAP:
        raise ValueError(
            f"exhaustive space has {total} formulas; cap is {_EXHAUSTIVE_CAP}")
    space = enumerate_space(nvars, max_connectives)
    stream = (formula_of(space, i) for i in range(space.size))
    return _run(stream, routes)
