"""Kleene's first model: a small self-interpreting program language over ω.

Programs are trees over ``Input``, constants, successor/predecessor, Cantor
pairs, a zero test, ``Apply`` (run a code on an argument) and ``Smn``
(specialise a code to a constant first argument).  ``n·m`` runs the program
coded by ``n`` on ``m``.

Gödel numbers are prefix serialisations: a tag byte per node, constants as a
length-prefixed big-endian field, the whole thing behind a ``0x01`` sentinel
byte.  Embedding a code as a constant costs its byte length plus a few bytes,
so codes built by nesting (as every λ*-term does) grow additively.  Every
natural decodes; anything malformed decodes to ``Diverge``.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import lru_cache

from . import sexpr
from .coding import pair, unpair
from .fuel import (Budget, Defined, Diverged, EvalOutcome, FuelExhausted, OutOfFuel,
                   ProvenDivergent, run_budgeted)
from .kernel import Model

INPUT, CONST, SUCC, PRED, PAIR, FST, SND, IFZ, APPLY, SMN, DIVERGE = range(11)
_ARITY = {INPUT: 0, CONST: 0, SUCC: 1, PRED: 1, PAIR: 2, FST: 1, SND: 1,
          IFZ: 3, APPLY: 2, SMN: 2, DIVERGE: 0}
_NAMES = {INPUT: "input", CONST: "const", SUCC: "succ", PRED: "pred", PAIR: "pair",
          FST: "fst", SND: "snd", IFZ: "ifz", APPLY: "apply", SMN: "smn", DIVERGE: "diverge"}
_BY_NAME = {v: k for k, v in _NAMES.items()}


class Prog:
    __slots__ = ()
    tag: int = -1

    def children(self):
        return ()


@dataclass(frozen=True)
class Input(Prog):
    tag = INPUT


@dataclass(frozen=True)
class ConstNat(Prog):
    n: int
    tag = CONST


@dataclass(frozen=True)
class Succ(Prog):
    e: Prog
    tag = SUCC

    def children(self):
        return (self.e,)


@dataclass(frozen=True)
class Pred(Prog):
    e: Prog
    tag = PRED

    def children(self):
        return (self.e,)


@dataclass(frozen=True)
class PairNat(Prog):
    left: Prog
    right: Prog
    tag = PAIR

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Fst(Prog):
    e: Prog
    tag = FST

    def children(self):
        return (self.e,)


@dataclass(frozen=True)
class Snd(Prog):
    e: Prog
    tag = SND

    def children(self):
        return (self.e,)


@dataclass(frozen=True)
class IfZero(Prog):
    guard: Prog
    then: Prog
    other: Prog
    tag = IFZ

    def children(self):
        return (self.guard, self.then, self.other)


@dataclass(frozen=True)
class Apply(Prog):
    fn: Prog
    arg: Prog
    tag = APPLY

    def children(self):
        return (self.fn, self.arg)


@dataclass(frozen=True)
class Smn(Prog):
    fn: Prog
    arg: Prog
    tag = SMN

    def children(self):
        return (self.fn, self.arg)


@dataclass(frozen=True)
class Diverge(Prog):
    tag = DIVERGE


_CTORS = {INPUT: Input, CONST: ConstNat, SUCC: Succ, PRED: Pred, PAIR: PairNat, FST: Fst,
          SND: Snd, IFZ: IfZero, APPLY: Apply, SMN: Smn, DIVERGE: Diverge}


# -- Gödel coding --------------------------------------------------------------


def _varint(n: int, out: bytearray) -> None:
    while True:
        low = n & 0x7F
        n >>= 7
        if n:
            out.append(low | 0x80)
        else:
            out.append(low)
            return


def encode(prog: Prog) -> int:
    out = bytearray(b"\x01")
    stack = [prog]
    while stack:
        node = stack.pop()
        out.append(node.tag)
        if node.tag == CONST:
            n = node.n
            if n < 0:
                raise ValueError("constants are naturals")
            width = (n.bit_length() + 7) // 8
            _varint(width, out)
            if width:
                out += n.to_bytes(width, "big")
        else:
            stack.extend(reversed(node.children()))
    return int.from_bytes(out, "big")


class _Malformed(Exception):
    pass


def _parse(data: bytes) -> Prog:
    pos = 1
    end = len(data)
    # frames: [tag, remaining, collected]
    frames = [[None, 1, []]]
    while True:
        top = frames[-1]
        if top[1] == 0:
            if len(frames) == 1:
                break
            frames.pop()
            frames[-1][2].append(_CTORS[top[0]](*top[2]))
            frames[-1][1] -= 1
            continue
        if pos >= end:
            raise _Malformed()
        tag = data[pos]
        pos += 1
        if tag > DIVERGE:
            raise _Malformed()
        if tag == CONST:
            width, shift = 0, 0
            while True:
                if pos >= end:
                    raise _Malformed()
                byte = data[pos]
                pos += 1
                width |= (byte & 0x7F) << shift
                shift += 7
                if not byte & 0x80:
                    if byte == 0 and shift > 7:
                        raise _Malformed()  # non-minimal varint
                    break
            if pos + width > end:
                raise _Malformed()
            if width and data[pos] == 0:
                raise _Malformed()  # leading zero byte
            n = int.from_bytes(data[pos:pos + width], "big")
            pos += width
            top[2].append(ConstNat(n))
            top[1] -= 1
        elif _ARITY[tag] == 0:
            top[2].append(_CTORS[tag]())
            top[1] -= 1
        else:
            frames.append([tag, _ARITY[tag], []])
    if pos != end:
        raise _Malformed()
    return frames[0][2][0]


@lru_cache(maxsize=8192)
def decode(code: int) -> Prog:
    """Total decoding; malformed numbers denote ``Diverge``."""
    if code <= 0:
        return Diverge()
    data = code.to_bytes((code.bit_length() + 7) // 8, "big")
    if data[0] != 1 or len(data) < 2:
        return Diverge()
    try:
        return _parse(data)
    except _Malformed:
        return Diverge()


def well_formed(code: int) -> bool:
    return encode(decode(code)) == code


# -- interpreter -------------------------------------------------------------------

# continuation frame kinds
(_K_SUCC, _K_PRED, _K_FST, _K_SND, _K_PAIR1, _K_PAIR2, _K_IF, _K_APP1, _K_APP2, _K_SMN1, _K_SMN2,
 _K_MEMO) = range(12)
_UNARY = {SUCC: _K_SUCC, PRED: _K_PRED, FST: _K_FST, SND: _K_SND}

# Finished sub-runs of Apply, keyed by (code, argument): (value or None, fuel
# used, divergence reason or None).  A hit charges exactly the recorded fuel,
# so outcomes and fuel accounting are the same as re-running.
_MEMO: dict = {}
# Sub-runs that ran out of fuel: (code, argument) -> a lower bound on their cost.
_LOWER: dict = {}
_MEMO_LIMIT = 1 << 19
MEMO_ENABLED = True


def clear_memo() -> None:
    _MEMO.clear()
    _LOWER.clear()


def execute(prog: Prog, x: int, budget: Budget) -> int:
    """Run ``prog`` on ``x``; one fuel unit per machine step.

    Explicit continuation stack, so deep recursion never touches the Python
    stack.  Raises ``Diverged`` on ``Diverge``.
    """
    stack = []
    try:
        return _machine(prog, x, budget, stack)
    except Diverged as exc:
        if MEMO_ENABLED:
            for frame in stack:
                if frame[0] == _K_MEMO:
                    _remember(frame[1], None, budget.spent - frame[2], exc.reason)
        raise
    except OutOfFuel:
        if MEMO_ENABLED:
            if len(_LOWER) >= _MEMO_LIMIT:
                _LOWER.clear()
            for frame in stack:
                if frame[0] == _K_MEMO:
                    bound = budget.limit - frame[2]
                    if _LOWER.get(frame[1], -1) < bound:
                        _LOWER[frame[1]] = bound
        raise


def _remember(key, val, cost, reason):
    if len(_MEMO) >= _MEMO_LIMIT:
        _MEMO.clear()
    _MEMO[key] = (val, cost, reason)


def _machine(prog: Prog, x: int, budget: Budget, stack: list) -> int:
    node, inp = prog, x
    evaluating = True
    val = 0
    charge = budget.charge
    memo = _MEMO if MEMO_ENABLED else None
    while True:
        charge()
        if evaluating:
            tag = node.tag
            if tag == INPUT:
                val, evaluating = inp, False
            elif tag == CONST:
                val, evaluating = node.n, False
            elif tag in _UNARY:
                stack.append((_UNARY[tag],))
                node = node.e
            elif tag == PAIR:
                stack.append((_K_PAIR1, node.right, inp))
                node = node.left
            elif tag == IFZ:
                stack.append((_K_IF, node.then, node.other, inp))
                node = node.guard
            elif tag == APPLY:
                stack.append((_K_APP1, node.arg, inp))
                node = node.fn
            elif tag == SMN:
                stack.append((_K_SMN1, node.arg, inp))
                node = node.fn
            else:
                raise Diverged("diverge")
            continue
        if not stack:
            return val
        frame = stack.pop()
        kind = frame[0]
        while kind == _K_MEMO:
            # costs exclude this iteration's charge, which the caller pays anyway
            if len(memo) >= _MEMO_LIMIT:
                memo.clear()
            memo[frame[1]] = (val, budget.spent - frame[2] - 1, None)
            if not stack:
                return val
            frame = stack.pop()
            kind = frame[0]
        if kind == _K_SUCC:
            val += 1
        elif kind == _K_PRED:
            val = val - 1 if val else 0
        elif kind == _K_FST:
            val = unpair(val)[0]
        elif kind == _K_SND:
            val = unpair(val)[1]
        elif kind == _K_PAIR1:
            stack.append((_K_PAIR2, val))
            node, inp, evaluating = frame[1], frame[2], True
        elif kind == _K_PAIR2:
            val = pair(frame[1], val)
        elif kind == _K_IF:
            node = frame[1] if val == 0 else frame[2]
            inp, evaluating = frame[3], True
        elif kind == _K_APP1:
            stack.append((_K_APP2, val))
            node, inp, evaluating = frame[1], frame[2], True
        elif kind == _K_APP2:
            code = frame[1]
            if memo is not None:
                key = (code, val)
                hit = memo.get(key)
                if hit is not None:
                    charge(hit[1])
                    if hit[2] is not None:
                        raise Diverged(hit[2])
                    val = hit[0]
                    continue
                bound = _LOWER.get(key)
                if bound is not None and budget.spent + bound + 1 > budget.limit:
                    charge(budget.limit - budget.spent + 1)
                # a call in tail position of a memoised call shares its result
                if not stack or stack[-1][0] != _K_MEMO:
                    stack.append((_K_MEMO, key, budget.spent))
            node, inp, evaluating = decode(code), val, True
        elif kind == _K_SMN1:
            stack.append((_K_SMN2, val))
            node, inp, evaluating = frame[1], frame[2], True
        else:
            val = smn(frame[1], val)


def run_cost(code: int, x: int, fuel: int):
    """``(outcome, fuel spent)``; the spent count is exact when Defined."""
    budget = Budget(fuel)
    try:
        val = execute(decode(code), x, budget)
    except Diverged as exc:
        return ProvenDivergent(exc.reason), budget.spent
    except OutOfFuel:
        return FuelExhausted(budget.spent), budget.spent
    return Defined(val), budget.spent


def run(code: int, x: int, fuel: int) -> EvalOutcome:
    return run_budgeted(lambda b: execute(decode(code), x, b), fuel)


def run_program(prog: Prog, x: int, fuel: int) -> EvalOutcome:
    return run_budgeted(lambda b: execute(prog, x, b), fuel)


def run2(code: int, a: int, x: int, fuel: int) -> EvalOutcome:
    """Two-argument convention: the input is the Cantor pair ⟨a, x⟩."""
    return run(code, pair(a, x), fuel)


def smn(code: int, a: int) -> int:
    """A code for ``x ↦ run2(code, a, x)``; pure syntax, injective in ``a``."""
    return encode(Apply(ConstNat(code), PairNat(ConstNat(a), Input())))


# -- combinators ---------------------------------------------------------------------

_FST_CODE = encode(Fst(Input()))
# input ⟨a, ⟨b, c⟩⟩  ->  a c (b c)
_S_BODY = encode(Apply(
    Apply(Fst(Input()), Snd(Snd(Input()))),
    Apply(Fst(Snd(Input())), Snd(Snd(Input()))),
))
# input ⟨a, b⟩  ->  smn(smn(S_BODY, a), b)
_S_MID = encode(Smn(Smn(ConstNat(_S_BODY), Fst(Input())), Snd(Input())))

K_CODE = encode(Smn(ConstNat(_FST_CODE), Input()))
S_CODE = encode(Smn(ConstNat(_S_MID), Input()))
DIVERGE_CODE = encode(Diverge())


def k_code() -> int:
    return K_CODE


def s_code() -> int:
    return S_CODE


# -- model ------------------------------------------------------------------------------


class K1Model(Model):
    name = "k1"

    def __init__(self):
        super().__init__()
        self.constants = {"k": K_CODE, "s": S_CODE, "diverge": DIVERGE_CODE}

    def apply_raw(self, a, b, budget):
        return execute(decode(a), b, budget)

    def divergent_pair(self):
        return DIVERGE_CODE, DIVERGE_CODE

    def describe(self, a):
        return describe_code(a)


def describe_code(a: int):
    if a.bit_length() <= 63:
        return a
    raw = a.to_bytes((a.bit_length() + 7) // 8, "big")
    return f"k1:{hashlib.sha256(raw).hexdigest()[:16]}/{len(raw)}B"


# -- precompleteness -----------------------------------------------------------------


def precomplete_totalizer(b: int) -> int:
    """Total ``f`` with ``f·a`` coding ``x ↦ (b·a)·x``.

    ``f·a`` is always a code, even where ``b·a`` is undefined; in that case
    the coded function is the empty one.
    """
    body = encode(Apply(Apply(ConstNat(b), Fst(Input())), Snd(Input())))
    return encode(Smn(ConstNat(body), Input()))


@dataclass(frozen=True)
class NumberingKernel:
    """Equivalence induced by a numbering, decided on probes only."""

    name: str
    is_identity: bool

    def eq(self, model, a, b, probes=(), fuel: int = 10_000) -> bool:
        if self.is_identity:
            return model.same(a, b)
        return all(model.apply(a, x, fuel) == model.apply(b, x, fuel) for x in probes)


IDENTITY_KERNEL = NumberingKernel("identity", True)
FUNCTION_KERNEL = NumberingKernel("same-pc-function", False)


# -- code-inspection deciders -----------------------------------------------------------

_EQ_CACHE: dict = {}


def equality_program(target: int) -> Prog:
    """Program returning 1 if its input equals ``target``, else 0.

    Cantor pairing is a bijection, so ``x = target`` iff both components
    agree; the comparison recurses on components until they are 0 or 1.
    """
    if target in _EQ_CACHE:
        return _EQ_CACHE[target]
    if target == 0:
        prog = IfZero(Input(), ConstNat(1), ConstNat(0))
    elif target == 1:
        prog = IfZero(Input(), ConstNat(0), IfZero(Pred(Input()), ConstNat(1), ConstNat(0)))
    else:
        a, b = unpair(target)
        left = encode(equality_program(a))
        right = encode(equality_program(b))
        prog = IfZero(Apply(ConstNat(left), Fst(Input())), ConstNat(0),
                      Apply(ConstNat(right), Snd(Input())))
    if target.bit_length() < 4096:
        _EQ_CACHE[target] = prog
    return prog


def equality_decider(target: int, yes: int, no: int) -> int:
    """Code of ``x ↦ yes if x == target else no`` (total)."""
    test = encode(equality_program(target))
    return encode(IfZero(Apply(ConstNat(test), Input()), ConstNat(no), ConstNat(yes)))


# -- program text ------------------------------------------------------------------------


def parse_program(text: str) -> Prog:
    return _prog_from(sexpr.read(text))


def _prog_from(node) -> Prog:
    if node == "input":
        return Input()
    if isinstance(node, list) and node and node[0] in _BY_NAME:
        tag = _BY_NAME[node[0]]
        args = node[1:]
        if tag == CONST:
            if len(args) != 1 or not isinstance(args[0], int):
                raise sexpr.SexprError("const takes one natural")
            return ConstNat(args[0])
        if tag in (INPUT, DIVERGE):
            if args:
                raise sexpr.SexprError(f"{node[0]} takes no arguments")
            return _CTORS[tag]()
        if len(args) != _ARITY[tag]:
            raise sexpr.SexprError(f"{node[0]} takes {_ARITY[tag]} arguments")
        return _CTORS[tag](*[_prog_from(a) for a in args])
    raise sexpr.SexprError(f"unknown program form {sexpr.write(node) if isinstance(node, list) else node}")


def format_program(prog: Prog) -> str:
    if prog.tag == INPUT:
        return "input"
    if prog.tag == CONST:
        return f"(const {prog.n})"
    if prog.tag == DIVERGE:
        return "(diverge)"
    return "(" + " ".join([_NAMES[prog.tag]] + [format_program(c) for c in prog.children()]) + ")"
