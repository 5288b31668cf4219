"""Bulk enumeration and batch decision kernels.

The symbolic modules are the reference implementation; this module makes
exhaustive sweeps affordable.  All formulas over a fixed variable pool up to
a connective bound are enumerated into one shared DAG (each structurally
distinct formula gets exactly one id, children always precede parents), and
three batch passes run directly over it:

* a vectorized many-valued validity oracle (`godel_valid_space`), evaluating
  every formula under every assignment into the finite Goedel chain of
  ``nvars + 2`` truth values — which decides validity over linearly ordered
  models for formulas with ``nvars`` variables;
* batch re-implementations of both tableau deciders (`decide_batch_d1`,
  `decide_batch_d3`) as iterative bitmask kernels over the ids of the at
  most ~20 subformulas of each root.

The batch deciders are compiled with numba when it is importable; the
``DUMMETT_KERNEL`` environment variable (or the `backend=` argument) forces
``numba`` or ``python``.  Both backends run the same source.  Within a
strategy tier the kernels break ties by subformula id rather than by the
symbolic canonical order; the two orders can pick different (equally valid)
principal formulas, so kernels reproduce verdicts and world-count bounds,
not proof objects.

Kernel spaces are constant-free: leaves are variables.  Scalar helpers
(`godel_value`, `godel_valid_formula`) accept arbitrary formulas including
constants.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from itertools import product
from typing import Optional

import numpy as np

from .d1 import SearchBudgetError
from .formula import And, Bot, Formula, Imp, Or, Top, Var, _var_name, variables_of

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is an install-time choice
    njit = None
    HAS_NUMBA = False

__all__ = [
    "HAS_NUMBA", "OP_LEAF", "OP_AND", "OP_OR", "OP_IMP",
    "FormulaSpace", "enumerate_space", "space_counts", "formula_of",
    "godel_value", "godel_valid_formula", "godel_valid_space",
    "decide_batch_d1", "decide_batch_d3", "resolve_backend",
]

OP_LEAF, OP_AND, OP_OR, OP_IMP = 0, 1, 2, 3

_MAX_VARS = 6  # varmask is a uint8; more than enough for sweep work


# ---------------------------------------------------------------------------
# The shared formula DAG
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FormulaSpace:
    """Every formula over `nvars` variables with at most `max_connectives`
    connectives, as parallel arrays indexed by formula id.

    Ids are grouped into blocks by connective count (`block_start`), so any
    child id is strictly smaller than its parent's.  For leaves `left` holds
    the variable index and `right` is -1.
    """

    nvars: int
    max_connectives: int
    op: np.ndarray           # uint8 opcode
    left: np.ndarray         # int32 child id / var index
    right: np.ndarray        # int32 child id / -1
    varmask: np.ndarray      # uint8 bitmask of occurring variables
    tree_size: np.ndarray    # uint8 size counted as a tree (2c + 1)
    ant_impfree: np.ndarray  # uint8, ->-nodes only: antecedent has no ->
    block_start: np.ndarray  # int64, len max_connectives + 2 (fencepost)

    @property
    def size(self) -> int:
        return int(self.op.shape[0])

    def block(self, connectives: int) -> slice:
        return slice(int(self.block_start[connectives]),
                     int(self.block_start[connectives + 1]))


def space_counts(nvars: int, max_connectives: int) -> list:
    """Formula count per connective count (independent of the enumeration)."""
    counts = [nvars]
    for c in range(1, max_connectives + 1):
        counts.append(3 * sum(counts[a] * counts[c - 1 - a] for a in range(c)))
    return counts


def enumerate_space(nvars: int, max_connectives: int) -> FormulaSpace:
    """Build the DAG blockwise.

    Within a block the order is: left-subtree connective count ascending,
    then operator (&, |, ->), then left id, then right id — deterministic,
    so ids are stable across runs.
    """
    if not 1 <= nvars <= _MAX_VARS:
        raise ValueError(f"nvars must be in 1..{_MAX_VARS}")
    if max_connectives < 0:
        raise ValueError("max_connectives must be >= 0")
    counts = space_counts(nvars, max_connectives)
    total = sum(counts)
    op = np.empty(total, np.uint8)
    left = np.empty(total, np.int32)
    right = np.empty(total, np.int32)
    block_start = np.zeros(max_connectives + 2, np.int64)
    np.cumsum(counts, out=block_start[1:])

    op[:nvars] = OP_LEAF
    left[:nvars] = np.arange(nvars, dtype=np.int32)
    right[:nvars] = -1
    for c in range(1, max_connectives + 1):
        pos = int(block_start[c])
        for cl in range(c):
            cr = c - 1 - cl
            lids = np.arange(block_start[cl], block_start[cl] + counts[cl],
                             dtype=np.int32)
            rids = np.arange(block_start[cr], block_start[cr] + counts[cr],
                             dtype=np.int32)
            pairs = len(lids) * len(rids)
            if pairs == 0:
                continue
            lrep = np.repeat(lids, len(rids))
            rrep = np.tile(rids, len(lids))
            for code in (OP_AND, OP_OR, OP_IMP):
                op[pos:pos + pairs] = code
                left[pos:pos + pairs] = lrep
                right[pos:pos + pairs] = rrep
                pos += pairs
        assert pos == int(block_start[c + 1])

    varmask = np.empty(total, np.uint8)
    tree_size = np.empty(total, np.uint8)
    hasimp = np.empty(total, bool)
    varmask[:nvars] = np.uint8(1) << np.arange(nvars, dtype=np.uint8)
    tree_size[:nvars] = 1
    hasimp[:nvars] = False
    for c in range(1, max_connectives + 1):
        blk = slice(int(block_start[c]), int(block_start[c + 1]))
        l, r = left[blk], right[blk]
        varmask[blk] = varmask[l] | varmask[r]
        tree_size[blk] = tree_size[l] + tree_size[r] + 1
        hasimp[blk] = (op[blk] == OP_IMP) | hasimp[l] | hasimp[r]
    ant_impfree = ((op == OP_IMP) & ~hasimp[np.maximum(left, 0)]).astype(np.uint8)
    return FormulaSpace(nvars, max_connectives, op, left, right, varmask,
                        tree_size, ant_impfree, block_start)


def formula_of(space: FormulaSpace, idx: int) -> Formula:
    """Reconstruct the AST for a formula id."""
    code = int(space.op[idx])
    if code == OP_LEAF:
        return Var(_var_name(int(space.left[idx])))
    lhs = formula_of(space, int(space.left[idx]))
    rhs = formula_of(space, int(space.right[idx]))
    return {OP_AND: And, OP_OR: Or, OP_IMP: Imp}[code](lhs, rhs)


# ---------------------------------------------------------------------------
# Many-valued validity oracle
# ---------------------------------------------------------------------------
#
# Truth values are 0..k with 0 = true and larger = "becomes true later";
# conjunction is max, disjunction min, and an implication is 0 when the
# antecedent's value is >= the consequent's, else the consequent's value.
# A formula with n variables is valid over linearly ordered models iff it
# evaluates to 0 under every assignment into 0..n+1 (worlds of a minimal
# counter-chain correspond to distinct truth values).

def godel_value(f: Formula, assignment: dict, k: int) -> int:
    """Truth value of f (0 = true, k = never) under a variable assignment."""
    if isinstance(f, Var):
        return assignment[f.name]
    if isinstance(f, Top):
        return 0
    if isinstance(f, Bot):
        return k
    a = godel_value(f.left, assignment, k)
    b = godel_value(f.right, assignment, k)
    if isinstance(f, And):
        return max(a, b)
    if isinstance(f, Or):
        return min(a, b)
    return 0 if a >= b else b


def godel_valid_formula(f: Formula, k: Optional[int] = None) -> bool:
    """Scalar counterpart of godel_valid_space; accepts constants too."""
    names = sorted(variables_of(f))
    if k is None:
        k = len(names) + 1
    return all(
        godel_value(f, dict(zip(names, values)), k) == 0
        for values in product(range(k + 1), repeat=len(names)))


def godel_valid_space(space: FormulaSpace) -> np.ndarray:
    """Boolean verdict per formula id, vectorized over the whole DAG."""
    k = space.nvars + 1
    valid = np.ones(space.size, bool)
    val = np.empty(space.size, np.int8)
    for values in product(range(k + 1), repeat=space.nvars):
        val[:space.nvars] = values
        for c in range(1, space.max_connectives + 1):
            blk = space.block(c)
            a = val[space.left[blk]]
            b = val[space.right[blk]]
            code = space.op[blk]
            val[blk] = np.where(
                code == OP_AND, np.maximum(a, b),
                np.where(code == OP_OR, np.minimum(a, b),
                         np.where(a >= b, 0, b)))
        valid &= val == 0
    return valid


# ---------------------------------------------------------------------------
# Batch tableau kernels
# ---------------------------------------------------------------------------
#
# One node = a few int64 bitmasks over the local subformula ids of the root
# (seven planes for the seven-sign calculus, three for the two-sign one).
# The search is an explicit DFS with preallocated stacks; refuted roots also
# report the number of worlds of the counter-chain traced out (multi-premise
# crossings + 1).  Verdicts: 1 proved, 0 refuted, -1 budget/capacity error
# (never expected; the wrappers raise on it).

_LOCAL_CAP = 60      # bits per mask; subformulas of a root (<= 2c+1 anyway)
_STACK_CAP = 262144  # DFS slots; bounded by depth budget * branching


def _tz(x):
    """Index of the lowest set bit (x must be nonzero)."""
    n = 0
    while (x >> n) & 1 == 0:
        n += 1
    return n


if HAS_NUMBA:
    # shared by both backends; the interpreter can call the compiled helper
    _tz = njit(cache=True)(_tz)


def _batch_d1(op, left, right, tree_size, roots, optimized,
              out_verdict, out_worlds):
    n_err = 0
    loc = np.empty(_LOCAL_CAP + 4, np.int64)
    work = np.empty(_LOCAL_CAP + 4, np.int64)
    lop = np.empty(_LOCAL_CAP, np.int64)
    ll = np.empty(_LOCAL_CAP, np.int64)
    lr = np.empty(_LOCAL_CAP, np.int64)
    # stack planes: T, F, Fl, Fn, Tn, That, Ttil + depth + crossings
    smT = np.empty(_STACK_CAP, np.int64)
    smF = np.empty(_STACK_CAP, np.int64)
    smFl = np.empty(_STACK_CAP, np.int64)
    smFn = np.empty(_STACK_CAP, np.int64)
    smTn = np.empty(_STACK_CAP, np.int64)
    smTh = np.empty(_STACK_CAP, np.int64)
    smTl = np.empty(_STACK_CAP, np.int64)
    sdep = np.empty(_STACK_CAP, np.int64)
    scro = np.empty(_STACK_CAP, np.int64)

    for ridx in range(roots.shape[0]):
        root = roots[ridx]
        # --- collect, sort, and index the subformula closure ---
        nl = 0
        wp = 1
        work[0] = root
        ok = True
        while wp > 0:
            wp -= 1
            g = work[wp]
            seen = False
            for i in range(nl):
                if loc[i] == g:
                    seen = True
                    break
            if seen:
                continue
            if nl >= _LOCAL_CAP:
                ok = False
                break
            loc[nl] = g
            nl += 1
            if op[g] != 0:
                work[wp] = left[g]
                work[wp + 1] = right[g]
                wp += 2
        if not ok:
            out_verdict[ridx] = -1
            n_err += 1
            continue
        for i in range(1, nl):  # insertion sort: ids ascending
            key = loc[i]
            j = i - 1
            while j >= 0 and loc[j] > key:
                loc[j + 1] = loc[j]
                j -= 1
            loc[j + 1] = key
        for i in range(nl):
            g = loc[i]
            lop[i] = op[g]
            if op[g] == 0:
                ll[i] = -1
                lr[i] = -1
            else:
                for j in range(nl):
                    if loc[j] == left[g]:
                        ll[i] = j
                    if loc[j] == right[g]:
                        lr[i] = j
        rix = nl - 1  # children precede parents, so the root has the max id
        ts = np.int64(tree_size[root])
        budget = 10 * ts * ts

        # --- DFS ---
        verdict = np.int8(1)
        worlds = np.int16(0)
        sp = 0
        smT[0] = 0
        smF[0] = 0
        smFl[0] = np.int64(1) << rix
        smFn[0] = 0
        smTn[0] = 0
        smTh[0] = 0
        smTl[0] = 0
        sdep[0] = 1
        scro[0] = 0
        sp = 1
        while sp > 0:
            sp -= 1
            mT = smT[sp]
            mF = smF[sp]
            mFl = smFl[sp]
            mFn = smFn[sp]
            mTn = smTn[sp]
            mTh = smTh[sp]
            mTl = smTl[sp]
            depth = sdep[sp]
            cross = scro[sp]
            if depth > budget or sp > _STACK_CAP - 2 * _LOCAL_CAP:
                verdict = np.int8(-1)
                break

            # inconsistency
            closed = (mT & mF) | (mT & mFl)
            if closed == 0 and optimized != 0:
                closed = (mF & mTh) | (mF & mTl) | (mT & mFn) | (mTn & mFn)
                if closed == 0:
                    rest = mTl
                    while rest != 0:
                        i = _tz(rest)
                        rest &= rest - 1
                        if ((mT | mTn | mFl) >> ll[i]) & 1:
                            closed = 1
                            break
                if closed == 0:
                    rest = mTh
                    while rest != 0:
                        i = _tz(rest)
                        rest &= rest - 1
                        if (mT >> ll[i]) & 1:
                            closed = 1
                            break
            if closed != 0:
                continue

            # alpha: T& then Fl->
            pi = -1
            cand = 0
            for i in range(nl):
                b = np.int64(1) << i
                if (mT & b) != 0 and lop[i] == 1:
                    pi = i
                    cand = 1
                    break
            if pi < 0:
                for i in range(nl):
                    b = np.int64(1) << i
                    if (mFl & b) != 0 and lop[i] == 3:
                        pi = i
                        cand = 2
                        break
            if pi >= 0:
                b = np.int64(1) << pi
                bl = np.int64(1) << ll[pi]
                br = np.int64(1) << lr[pi]
                if cand == 1:
                    smT[sp] = (mT & ~b) | bl | br
                    smF[sp] = mF
                    smFl[sp] = mFl
                else:
                    smT[sp] = mT | bl
                    smF[sp] = mF
                    smFl[sp] = (mFl & ~b) | br
                smFn[sp] = mFn
                smTn[sp] = mTn
                smTh[sp] = mTh
                smTl[sp] = mTl
                sdep[sp] = depth + 1
                scro[sp] = cross
                sp += 1
                continue

            # beta, in sign-tier order: T (| and ->), F (any), Fl (& and |),
            # then That
            pi = -1
            for i in range(nl):
                b = np.int64(1) << i
                if (mT & b) != 0 and (lop[i] == 2 or lop[i] == 3):
                    pi = i
                    cand = 3 if lop[i] == 2 else 4
                    break
            if pi < 0 and mF != 0:
                pi = _tz(mF)
                cand = 5
            if pi < 0:
                for i in range(nl):
                    b = np.int64(1) << i
                    if (mFl & b) != 0 and (lop[i] == 1 or lop[i] == 2):
                        pi = i
                        cand = 6 if lop[i] == 1 else 7
                        break
            if pi < 0 and mTh != 0:
                pi = _tz(mTh)
                cand = 8
            if pi >= 0:
                b = np.int64(1) << pi
                bl = np.int64(1) << ll[pi] if lop[pi] != 0 else np.int64(0)
                br = np.int64(1) << lr[pi] if lop[pi] != 0 else np.int64(0)
                if cand == 3:  # T|
                    for arm in range(2):
                        smT[sp] = (mT & ~b) | (bl if arm == 0 else br)
                        smF[sp] = mF
                        smFl[sp] = mFl
                        smFn[sp] = mFn
                        smTn[sp] = mTn
                        smTh[sp] = mTh
                        smTl[sp] = mTl
                        sdep[sp] = depth + 1
                        scro[sp] = cross
                        sp += 1
                elif cand == 4:  # T->
                    smT[sp] = (mT & ~b) | br
                    smF[sp] = mF
                    smFl[sp] = mFl
                    smFn[sp] = mFn
                    smTn[sp] = mTn
                    smTh[sp] = mTh
                    smTl[sp] = mTl
                    sdep[sp] = depth + 1
                    scro[sp] = cross
                    sp += 1
                    smT[sp] = mT & ~b
                    smF[sp] = mF
                    smFl[sp] = mFl | bl
                    smFn[sp] = mFn
                    smTn[sp] = mTn | br
                    smTh[sp] = mTh
                    smTl[sp] = mTl
                    sdep[sp] = depth + 1
                    scro[sp] = cross
                    sp += 1
                    smT[sp] = mT & ~b
                    smF[sp] = mF
                    smFl[sp] = mFl
                    smFn[sp] = mFn
                    smTn[sp] = mTn
                    smTh[sp] = mTh
                    smTl[sp] = mTl | b
                    sdep[sp] = depth + 1
                    scro[sp] = cross
                    sp += 1
                elif cand == 5:  # F-decide
                    smT[sp] = mT
                    smF[sp] = mF & ~b
                    smFl[sp] = mFl | b
                    smFn[sp] = mFn
                    smTn[sp] = mTn
                    smTh[sp] = mTh
                    smTl[sp] = mTl
                    sdep[sp] = depth + 1
                    scro[sp] = cross
                    sp += 1
                    smT[sp] = mT
                    smF[sp] = mF & ~b
                    smFl[sp] = mFl
                    smFn[sp] = mFn | b
                    smTn[sp] = mTn
                    smTh[sp] = mTh
                    smTl[sp] = mTl
                    sdep[sp] = depth + 1
                    scro[sp] = cross
                    sp += 1
                elif cand == 6:  # Fl&
                    smT[sp] = mT
                    smF[sp] = mF
                    smFl[sp] = (mFl & ~b) | bl
                    smFn[sp] = mFn
                    smTn[sp] = mTn | br
                    smTh[sp] = mTh
                    smTl[sp] = mTl
                    sdep[sp] = depth + 1
                    scro[sp] = cross
                    sp += 1
                    smT[sp] = mT | bl
                    smF[sp] = mF
                    smFl[sp] = (mFl & ~b) | br
                    smFn[sp] = mFn
                    smTn[sp] = mTn
                    smTh[sp] = mTh
                    smTl[sp] = mTl
                    sdep[sp] = depth + 1
                    scro[sp] = cross
                    sp += 1
                elif cand == 7:  # Fl|
                    smT[sp] = mT
                    smF[sp] = mF | bl
                    smFl[sp] = (mFl & ~b) | br
                    smFn[sp] = mFn
                    smTn[sp] = mTn
                    smTh[sp] = mTh
                    smTl[sp] = mTl
                    sdep[sp] = depth + 1
                    scro[sp] = cross
                    sp += 1
                    smT[sp] = mT
                    smF[sp] = mF | br
                    smFl[sp] = (mFl & ~b) | bl
                    smFn[sp] = mFn
                    smTn[sp] = mTn
                    smTh[sp] = mTh
                    smTl[sp] = mTl
                    sdep[sp] = depth + 1
                    scro[sp] = cross
                    sp += 1
                else:  # That-decide
                    smT[sp] = mT
                    smF[sp] = mF
                    smFl[sp] = mFl | bl
                    smFn[sp] = mFn
                    smTn[sp] = mTn | br
                    smTh[sp] = mTh & ~b
                    smTl[sp] = mTl
                    sdep[sp] = depth + 1
                    scro[sp] = cross
                    sp += 1
                    smT[sp] = mT
                    smF[sp] = mF
                    smFl[sp] = mFl
                    smFn[sp] = mFn
                    smTn[sp] = mTn
                    smTh[sp] = mTh & ~b
                    smTl[sp] = mTl | b
                    sdep[sp] = depth + 1
                    scro[sp] = cross
                    sp += 1
                continue

            # the multi-premise crossing rule
            if (mTl | mFn) != 0:
                core = mT | mFl | mTn  # prior commitments become plain facts
                rest = mTl
                while rest != 0:
                    j = _tz(rest)
                    rest &= rest - 1
                    bj = np.int64(1) << j
                    smT[sp] = core
                    smF[sp] = mFn
                    smFl[sp] = np.int64(1) << ll[j]
                    smFn[sp] = 0
                    smTn[sp] = np.int64(1) << lr[j]
                    if optimized != 0:
                        smTl[sp] = mTl & (bj - 1)
                        smTh[sp] = mTl & ~((bj << 1) - 1)
                    else:
                        smTl[sp] = 0
                        smTh[sp] = mTl & ~bj
                    sdep[sp] = depth + 1
                    scro[sp] = cross + 1
                    sp += 1
                rest = mFn
                while rest != 0:
                    k = _tz(rest)
                    rest &= rest - 1
                    bk = np.int64(1) << k
                    smT[sp] = core
                    smFl[sp] = bk
                    smTn[sp] = 0
                    if optimized != 0:
                        smTl[sp] = mTl
                        smTh[sp] = 0
                        smFn[sp] = mFn & (bk - 1)
                        smF[sp] = mFn & ~((bk << 1) - 1)
                    else:
                        smTl[sp] = 0
                        smTh[sp] = mTl
                        smFn[sp] = 0
                        smF[sp] = mFn & ~bk
                    sdep[sp] = depth + 1
                    scro[sp] = cross + 1
                    sp += 1
                continue

            # terminal: this branch stays open, the root is refutable
            verdict = np.int8(0)
            worlds = np.int16(cross + 1)
            break

        out_verdict[ridx] = verdict
        out_worlds[ridx] = worlds
        if verdict < 0:
            n_err += 1
    return n_err


def _batch_d3(op, left, right, tree_size, ant_impfree, roots, sixopt,
              out_verdict, out_worlds):
    n_err = 0
    loc = np.empty(_LOCAL_CAP + 4, np.int64)
    work = np.empty(_LOCAL_CAP + 4, np.int64)
    lop = np.empty(_LOCAL_CAP, np.int64)
    ll = np.empty(_LOCAL_CAP, np.int64)
    lr = np.empty(_LOCAL_CAP, np.int64)
    antfree = np.empty(_LOCAL_CAP, np.int64)
    satv = np.empty(_LOCAL_CAP, np.int64)
    smT = np.empty(_STACK_CAP, np.int64)
    smF = np.empty(_STACK_CAP, np.int64)
    smB = np.empty(_STACK_CAP, np.int64)  # Tbar plane
    sdep = np.empty(_STACK_CAP, np.int64)
    scro = np.empty(_STACK_CAP, np.int64)

    for ridx in range(roots.shape[0]):
        root = roots[ridx]
        nl = 0
        wp = 1
        work[0] = root
        ok = True
        while wp > 0:
            wp -= 1
            g = work[wp]
            seen = False
            for i in range(nl):
                if loc[i] == g:
                    seen = True
                    break
            if seen:
                continue
            if nl >= _LOCAL_CAP:
                ok = False
                break
            loc[nl] = g
            nl += 1
            if op[g] != 0:
                work[wp] = left[g]
                work[wp + 1] = right[g]
                wp += 2
        if not ok:
            out_verdict[ridx] = -1
            n_err += 1
            continue
        for i in range(1, nl):
            key = loc[i]
            j = i - 1
            while j >= 0 and loc[j] > key:
                loc[j + 1] = loc[j]
                j -= 1
            loc[j + 1] = key
        for i in range(nl):
            g = loc[i]
            lop[i] = op[g]
            antfree[i] = ant_impfree[g]
            if op[g] == 0:
                ll[i] = -1
                lr[i] = -1
            else:
                for j in range(nl):
                    if loc[j] == left[g]:
                        ll[i] = j
                    if loc[j] == right[g]:
                        lr[i] = j
        rix = nl - 1
        ts = np.int64(tree_size[root])
        budget = 10 * ts * ts

        verdict = np.int8(1)
        worlds = np.int16(0)
        smT[0] = 0
        smF[0] = np.int64(1) << rix
        smB[0] = 0
        sdep[0] = 1
        scro[0] = 0
        sp = 1
        while sp > 0:
            sp -= 1
            mT = smT[sp]
            mF = smF[sp]
            mB = smB[sp]
            depth = sdep[sp]
            cross = scro[sp]
            if depth > budget or sp > _STACK_CAP - 2 * _LOCAL_CAP:
                verdict = np.int8(-1)
                break
            if (mT & mF) != 0:
                continue

            # alpha: T& then F|
            pi = -1
            cand = 0
            for i in range(nl):
                b = np.int64(1) << i
                if (mT & b) != 0 and lop[i] == 1:
                    pi = i
                    cand = 1
                    break
            if pi < 0:
                for i in range(nl):
                    b = np.int64(1) << i
                    if (mF & b) != 0 and lop[i] == 2:
                        pi = i
                        cand = 2
                        break
            if pi >= 0:
                b = np.int64(1) << pi
                bl = np.int64(1) << ll[pi]
                br = np.int64(1) << lr[pi]
                if cand == 1:
                    smT[sp] = (mT & ~b) | bl | br
                    smF[sp] = mF
                else:
                    smT[sp] = mT
                    smF[sp] = (mF & ~b) | bl | br
                smB[sp] = mB
                sdep[sp] = depth + 1
                scro[sp] = cross
                sp += 1
                continue

            # sixopt promotion: forced -> with an ->-free antecedent
            if sixopt != 0:
                pi = -1
                for i in range(nl):
                    b = np.int64(1) << i
                    if (mT & b) != 0 and lop[i] == 3 and antfree[i] != 0:
                        pi = i
                        break
                if pi >= 0:
                    b = np.int64(1) << pi
                    smT[sp] = mT & ~b
                    smF[sp] = mF
                    smB[sp] = mB | b
                    sdep[sp] = depth + 1
                    scro[sp] = cross
                    sp += 1
                    continue

            # beta: T| and T->1 in id order
            pi = -1
            for i in range(nl):
                b = np.int64(1) << i
                if (mT & b) != 0 and (lop[i] == 2 or lop[i] == 3):
                    pi = i
                    cand = 3 if lop[i] == 2 else 4
                    break
            if pi >= 0:
                b = np.int64(1) << pi
                bl = np.int64(1) << ll[pi]
                br = np.int64(1) << lr[pi]
                if cand == 3:
                    for arm in range(2):
                        smT[sp] = (mT & ~b) | (bl if arm == 0 else br)
                        smF[sp] = mF
                        smB[sp] = mB
                        sdep[sp] = depth + 1
                        scro[sp] = cross
                        sp += 1
                else:
                    smT[sp] = (mT & ~b) | br
                    smF[sp] = mF
                    smB[sp] = mB
                    sdep[sp] = depth + 1
                    scro[sp] = cross
                    sp += 1
                    smT[sp] = mT & ~b
                    smF[sp] = mF | bl
                    smB[sp] = mB | b
                    sdep[sp] = depth + 1
                    scro[sp] = cross
                    sp += 1
                continue

            # F&: three-way split
            pi = -1
            for i in range(nl):
                b = np.int64(1) << i
                if (mF & b) != 0 and lop[i] == 1:
                    pi = i
                    break
            if pi >= 0:
                b = np.int64(1) << pi
                bl = np.int64(1) << ll[pi]
                br = np.int64(1) << lr[pi]
                smT[sp] = mT
                smF[sp] = (mF & ~b) | bl | br
                smB[sp] = mB
                sdep[sp] = depth + 1
                scro[sp] = cross
                sp += 1
                smT[sp] = mT | br
                smF[sp] = (mF & ~b) | bl
                smB[sp] = mB
                sdep[sp] = depth + 1
                scro[sp] = cross
                sp += 1
                smT[sp] = mT | bl
                smF[sp] = (mF & ~b) | br
                smB[sp] = mB
                sdep[sp] = depth + 1
                scro[sp] = cross
                sp += 1
                continue

            # gated release of a parked implication: needs the node to
            # syntactically satisfy its antecedent
            if mB != 0:
                for i in range(nl):
                    if (mT >> i) & 1:
                        satv[i] = 1
                    elif lop[i] == 0:
                        satv[i] = 0
                    elif lop[i] == 1:
                        satv[i] = satv[ll[i]] & satv[lr[i]]
                    elif lop[i] == 2:
                        satv[i] = satv[ll[i]] | satv[lr[i]]
                    elif (mB >> i) & 1:
                        satv[i] = 1
                    elif (mF >> i) & 1:
                        satv[i] = 0
                    else:
                        satv[i] = (1 - satv[ll[i]]) | satv[lr[i]]
                pi = -1
                rest = mB
                while rest != 0:
                    i = _tz(rest)
                    rest &= rest - 1
                    if satv[ll[i]] != 0:
                        pi = i
                        break
                if pi >= 0:
                    b = np.int64(1) << pi
                    smT[sp] = mT | (np.int64(1) << lr[pi])
                    smF[sp] = mF
                    smB[sp] = mB & ~b
                    sdep[sp] = depth + 1
                    scro[sp] = cross
                    sp += 1
                    continue

            # the multi-premise crossing rule: all F-implications at once
            fimps = np.int64(0)
            for i in range(nl):
                if ((mF >> i) & 1) != 0 and lop[i] == 3:
                    fimps |= np.int64(1) << i
            if fimps != 0:
                rest = fimps
                while rest != 0:
                    j = _tz(rest)
                    rest &= rest - 1
                    bj = np.int64(1) << j
                    smT[sp] = mT | (np.int64(1) << ll[j])
                    smF[sp] = (fimps & ~bj) | (np.int64(1) << lr[j])
                    smB[sp] = mB
                    sdep[sp] = depth + 1
                    scro[sp] = cross + 1
                    sp += 1
                continue

            verdict = np.int8(0)
            worlds = np.int16(cross + 1)
            break

        out_verdict[ridx] = verdict
        out_worlds[ridx] = worlds
        if verdict < 0:
            n_err += 1
    return n_err


# ---------------------------------------------------------------------------
# Backend selection and wrappers
# ---------------------------------------------------------------------------

_PY_IMPLS = {"d1": _batch_d1, "d3": _batch_d3}
_NB_IMPLS: dict = {}


def resolve_backend(backend: Optional[str] = None) -> str:
    """Effective batch backend: the argument, else $DUMMETT_KERNEL, else
    numba when available."""
    choice = backend or os.environ.get("DUMMETT_KERNEL", "").strip() or None
    if choice is None:
        return "numba" if HAS_NUMBA else "python"
    if choice not in ("numba", "python"):
        raise ValueError(f"unknown kernel backend {choice!r}")
    if choice == "numba" and not HAS_NUMBA:
        raise RuntimeError("the numba backend was requested but numba is "
                           "not importable")
    return choice


def _impl(name: str, backend: str):
    if backend == "python":
        return _PY_IMPLS[name]
    if name not in _NB_IMPLS:
        _NB_IMPLS[name] = njit(cache=True)(_PY_IMPLS[name])
    return _NB_IMPLS[name]


def _run_batch(name, space, roots, flag, backend):
    fn = _impl(name, resolve_backend(backend))
    if roots is None:
        roots = np.arange(space.size, dtype=np.int64)
    else:
        roots = np.ascontiguousarray(roots, dtype=np.int64)
    verdict = np.empty(roots.shape[0], np.int8)
    worlds = np.zeros(roots.shape[0], np.int16)
    if name == "d1":
        n_err = fn(space.op, space.left, space.right, space.tree_size,
                   roots, 1 if flag else 0, verdict, worlds)
    else:
        n_err = fn(space.op, space.left, space.right, space.tree_size,
                   space.ant_impfree, roots, 1 if flag else 0, verdict, worlds)
    if n_err:
        raise SearchBudgetError(
            f"batch kernel hit its budget/capacity on {n_err} roots")
    return verdict, worlds


def decide_batch_d1(space: FormulaSpace, roots=None, *,
                    optimized: bool = False, backend: Optional[str] = None):
    """Seven-sign verdicts (1 proved / 0 refuted) and counter-chain world
    counts for a batch of formula ids; `roots=None` sweeps the whole space."""
    return _run_batch("d1", space, roots, optimized, backend)


def decide_batch_d3(space: FormulaSpace, roots=None, *,
                    sixopt: bool = False, backend: Optional[str] = None):
    """Two-sign verdicts and world counts, batch analogue of decide_d3."""
    return _run_batch("d3", space, roots, sixopt, backend)
