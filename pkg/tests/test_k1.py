import random

import pytest
from hypothesis import given, settings, strategies as st

from pcalab import k1
from pcalab.coding import pair, unpair
from pcalab.fuel import Defined, FuelExhausted, ProvenDivergent
from pcalab.gen import random_program
from pcalab.k1 import (DIVERGE_CODE, K_CODE, S_CODE, Apply, ConstNat, Diverge, Fst, IfZero, Input,
                       K1Model, PairNat, Pred, Snd, Succ, decode, encode, equality_decider,
                       format_program, parse_program, run, run2, run_cost, smn, well_formed)


class _Stuck(Exception):
    pass


class _Bottom(Exception):
    pass


def reference(prog, x, depth=0):
    """Plain recursive semantics, no memo, no continuation stack."""
    if depth > 60:
        raise _Stuck
    t = prog.tag
    if t == k1.INPUT:
        return x
    if t == k1.CONST:
        return prog.n
    if t == k1.SUCC:
        return reference(prog.e, x, depth) + 1
    if t == k1.PRED:
        return max(reference(prog.e, x, depth) - 1, 0)
    if t == k1.PAIR:
        return pair(reference(prog.left, x, depth), reference(prog.right, x, depth))
    if t == k1.FST:
        return unpair(reference(prog.e, x, depth))[0]
    if t == k1.SND:
        return unpair(reference(prog.e, x, depth))[1]
    if t == k1.IFZ:
        g = reference(prog.guard, x, depth)
        return reference(prog.then if g == 0 else prog.other, x, depth)
    if t == k1.APPLY:
        c = reference(prog.fn, x, depth)
        v = reference(prog.arg, x, depth)
        return reference(decode(c), v, depth + 1)
    if t == k1.SMN:
        return smn(reference(prog.fn, x, depth), reference(prog.arg, x, depth))
    raise _Bottom


def programs():
    return st.builds(lambda seed, d: random_program(random.Random(seed), d),
                     st.integers(0, 2**32), st.integers(0, 5))


@given(programs())
def test_encode_decode_roundtrip(prog):
    code = encode(prog)
    assert decode(code) == prog
    assert well_formed(code)


@given(st.integers(min_value=0, max_value=5000))
def test_every_natural_decodes(n):
    prog = decode(n)
    if not well_formed(n):
        assert prog == Diverge()


def test_small_codes_are_malformed():
    assert all(decode(n) == Diverge() for n in range(256))


@settings(max_examples=300, deadline=None)
@given(programs(), st.integers(0, 60))
def test_machine_agrees_with_reference(prog, x):
    try:
        want = Defined(reference(prog, x))
    except _Bottom:
        want = "bottom"
    except _Stuck:
        return
    got = k1.run_program(prog, x, 200_000)
    if want == "bottom":
        assert isinstance(got, ProvenDivergent)
    else:
        assert got == want


def test_fixed_programs():
    double = Apply(ConstNat(encode(Succ(Succ(Input())))), Input())
    assert k1.run_program(double, 3, 100) == Defined(5)
    assert k1.run_program(Pred(ConstNat(0)), 9, 100) == Defined(0)
    assert k1.run_program(Fst(PairNat(ConstNat(4), Input())), 9, 100) == Defined(4)
    assert k1.run_program(IfZero(Input(), ConstNat(1), Diverge()), 0, 100) == Defined(1)
    assert isinstance(k1.run_program(IfZero(Input(), ConstNat(1), Diverge()), 2, 100), ProvenDivergent)


def test_fuel_exhaustion_and_cost():
    loop_body = encode(Apply(Fst(Input()), Input()))
    out = run(encode(Apply(ConstNat(loop_body), PairNat(ConstNat(loop_body), Input()))), 0, 500)
    assert isinstance(out, FuelExhausted)
    out, spent = run_cost(encode(Succ(Input())), 1, 50)
    # one unit per machine iteration: succ, input, the successor frame, the final return
    assert out == Defined(2) and spent == 4
    out, spent = run_cost(encode(Succ(Input())), 1, 2)
    assert isinstance(out, FuelExhausted)


def test_kleene_k_and_s_codes():
    m = K1Model()
    for a in (0, 5, K_CODE, S_CODE):
        for b in (0, 7, DIVERGE_CODE):
            ka = m.apply(K_CODE, a, 10_000)
            assert m.apply(ka.value, b, 10_000) == Defined(a)
    succ = encode(Succ(Input()))
    const3 = encode(ConstNat(3))
    # s a b c = a c (b c) with a = k-style code that ignores, b = succ
    sab = m.apply(m.apply(S_CODE, K_CODE, 10_000).value, succ, 10_000)
    assert m.apply(sab.value, 4, 100_000) == m.apply(m.apply(K_CODE, 4, 100).value, 5, 100)
    assert isinstance(m.apply(DIVERGE_CODE, const3, 100), ProvenDivergent)


def test_smn_is_injective_and_correct():
    add_pair = encode(PairNat(Fst(Input()), Succ(Snd(Input()))))
    assert run(smn(add_pair, 4), 7, 1000) == Defined(pair(4, 8))
    assert run2(add_pair, 4, 7, 1000) == Defined(pair(4, 8))
    assert len({smn(add_pair, a) for a in range(50)}) == 50


@pytest.mark.parametrize("target", [0, 1, 2, 17, K_CODE, 123456789])
def test_equality_decider(target):
    dec = equality_decider(target, 11, 22)
    probes = [0, 1, 2, 3, 17, target, target + 1, K_CODE, S_CODE]
    for p in probes:
        assert run(dec, p, 1_000_000) == Defined(11 if p == target else 22)


@given(programs())
def test_program_text_roundtrip(prog):
    assert parse_program(format_program(prog)) == prog


def test_program_text_errors():
    from pcalab.sexpr import SexprError

    for bad in ["(succ)", "(const x)", "(pair input)", "(nope input)", "(diverge input)"]:
        with pytest.raises(SexprError):
            parse_program(bad)


def test_describe_code_hashes_big_codes():
    assert k1.describe_code(12) == 12
    assert str(k1.describe_code(S_CODE)).startswith("k1:")


def _recursive_programs():
    from pcalab.friedberg import PRELUDE

    return [encode(p) for _, p in PRELUDE]


@pytest.mark.parametrize("code", _recursive_programs())
def test_memo_is_fuel_exact(code):
    """Memoised and plain runs agree on outcome and fuel, including exhausted sub-runs."""
    for x in (0, 3, 9, 25):
        for fuel in (5, 40, 41, 200, 1000):
            k1.MEMO_ENABLED = True
            try:
                warm = [run_cost(code, x, f) for f in (fuel, fuel // 2 + 1, 2 * fuel)]
                k1.MEMO_ENABLED = False
                cold = [run_cost(code, x, f) for f in (fuel, fuel // 2 + 1, 2 * fuel)]
            finally:
                k1.MEMO_ENABLED = True
            assert warm == cold


@settings(max_examples=200, deadline=None)
@given(programs(), st.integers(0, 40), st.sampled_from([3, 20, 150, 2000]))
def test_memo_matches_plain_runs(prog, x, fuel):
    code = encode(prog)
    with_memo = run_cost(code, x, fuel), run_cost(code, x, fuel)
    k1.MEMO_ENABLED = False
    try:
        plain = run_cost(code, x, fuel)
    finally:
        k1.MEMO_ENABLED = True
    assert with_memo == (plain, plain)


def test_totalizer_is_total():
    from pcalab.k1 import precomplete_totalizer

    b = encode(IfZero(Input(), ConstNat(encode(Succ(Input()))), Diverge()))
    f = precomplete_totalizer(b)
    fa0 = run(f, 0, 1000)
    fa1 = run(f, 1, 1000)
    assert isinstance(fa0, Defined) and isinstance(fa1, Defined)
    assert run(fa0.value, 4, 10_000) == Defined(5)  # b·0 is the successor code
    assert isinstance(run(fa1.value, 4, 10_000), ProvenDivergent)  # b·1 undefined
