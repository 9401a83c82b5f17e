"""Seeded generators for probe corpora (K1 programs, terms, 0/1-sequences)."""

from __future__ import annotations

import random
from typing import List, Sequence

from .k1 import (
    DIVERGE_CODE, K_CODE, S_CODE, Apply, ConstNat, Fst, IfZero, Input, PairNat, Pred, Prog,
    Smn, Snd, Succ, encode,
)
from .k2 import EventuallyPeriodic
from .terms import App, Const, Term, Var

_CALLEES = (K_CODE, S_CODE, DIVERGE_CODE, encode(Succ(Input())))


def random_program(rng: random.Random, depth: int = 4) -> Prog:
    """Small programs; every ``Apply`` calls a fixed, known-terminating callee
    or the diverger, so runs settle quickly."""
    if depth == 0 or rng.random() < 0.3:
        return rng.choice([Input(), ConstNat(rng.randrange(5))])
    t = rng.randrange(8)
    sub = lambda: random_program(rng, depth - 1)  # noqa: E731
    if t == 0:
        return Succ(sub())
    if t == 1:
        return Pred(sub())
    if t == 2:
        return PairNat(sub(), sub())
    if t == 3:
        return Fst(sub())
    if t == 4:
        return Snd(sub())
    if t == 5:
        return IfZero(sub(), sub(), sub())
    if t == 6:
        return Apply(ConstNat(rng.choice(_CALLEES)), sub())
    return Smn(sub(), sub())


def k1_pool(lib, rng: random.Random, extra_programs: int = 8) -> List[int]:
    """Arguments for K1 probes: combinators, booleans, numerals, programs."""
    pool = [lib.k, lib.s, lib.i, lib.true, lib.false, DIVERGE_CODE]
    pool += [lib.numeral(n) for n in range(4)]
    pool += [rng.randrange(300) for _ in range(4)]
    pool += [encode(random_program(rng)) for _ in range(extra_programs)]
    return pool


def random_term(rng: random.Random, atoms: Sequence, size: int, var: str = "x") -> Term:
    """A random application tree with ``size`` leaves over ``atoms`` and ``var``;
    the variable occurs at least once."""
    leaves = [Var(var)] + [Const(rng.choice(atoms)) if rng.random() < 0.6 else Var(var)
                           for _ in range(size - 1)]
    rng.shuffle(leaves)
    while len(leaves) > 1:
        i = rng.randrange(len(leaves) - 1)
        leaves[i:i + 2] = [App(leaves[i], leaves[i + 1])]
    return leaves[0]


def random_sequence(rng: random.Random, max_head: int = 8, max_period: int = 3) -> EventuallyPeriodic:
    head = tuple(rng.randrange(2) for _ in range(rng.randrange(max_head + 1)))
    period = tuple(rng.randrange(2) for _ in range(1, rng.randrange(1, max_period + 1) + 1))
    return EventuallyPeriodic(head, period)
