"""Bracket abstraction, checked against a symbolic k/s rewriter."""

import pytest
from hypothesis import given, settings, strategies as st

from pcalab.sexpr import SexprError
from pcalab.terms import (I, K, S, App, Const, Lam, Var, app, combinator_str, compile_term,
                          format_term, free_vars, has_binder, is_value, lam, lambda_star,
                          parse_term, size, substitute)


def rewrite(t, limit=2000):
    """Normalise with ``k a b -> a`` and ``s a b c -> a c (b c)``; None past the limit.

    Leftmost-outermost, fully symbolic: an independent reference for λ*.
    """
    steps = [0]

    def head_step(u):
        head, args = _spine(u)
        if head == K and len(args) >= 2:
            return app(args[0], *args[2:])
        if head == S and len(args) >= 3:
            a, b, c = args[:3]
            return app(App(App(a, c), App(b, c)), *args[3:])
        return None

    def norm(u):
        while True:
            steps[0] += 1
            if steps[0] > limit:
                raise OverflowError
            nxt = head_step(u)
            if nxt is None:
                break
            u = nxt
        head, args = _spine(u)
        return app(head, *[norm(a) for a in args])

    try:
        return norm(t)
    except (OverflowError, RecursionError):
        return None


def _spine(t):
    args = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fn
    return t, args[::-1]


atoms = st.sampled_from([K, S, Const("p"), Const("q")])


def terms_with(var="x"):
    leaf = st.one_of(atoms, st.just(Var(var)))
    return st.recursive(leaf, lambda kids: st.builds(App, kids, kids), max_leaves=7)


def test_identity_and_constant_rules():
    assert lambda_star("x", Var("x")) == I
    assert lambda_star("x", Const("p")) == App(K, Const("p"))
    assert lambda_star("x", app(K, Const("p"))) == App(K, app(K, Const("p")))


def test_non_value_applications_are_delayed():
    # p q is not a value, so it is not frozen under k
    assert lambda_star("x", app(Const("p"), Const("q"))) == app(S, App(K, Const("p")), App(K, Const("q")))


def test_swap_combinator_by_hand():
    # λ*y.yx = s i (k x); then abstracting x gives s(k(si))(s(kk)i)
    t = compile_term(lam("x y", app(Var("y"), Var("x"))))
    assert combinator_str(t) == "s(k(si))(s(kk)i)"


def test_compile_removes_binders():
    t = compile_term(lam("x y z", app(Var("x"), Var("z"), app(Var("y"), Var("z")))))
    assert not has_binder(t)
    assert free_vars(t) == frozenset()


def test_lambda_star_rejects_binders():
    with pytest.raises(ValueError):
        lambda_star("x", Lam("y", Var("y")))


@settings(max_examples=200, deadline=None)
@given(terms_with(), st.sampled_from([K, S, Const("p"), app(K, Const("q"))]))
def test_abstraction_then_application_matches_substitution(t, a):
    abstracted = lambda_star("x", t)
    assert "x" not in free_vars(abstracted)
    lhs = rewrite(App(abstracted, a))
    rhs = rewrite(substitute(t, "x", a))
    if lhs is not None and rhs is not None:
        assert lhs == rhs


@given(terms_with())
def test_abstraction_is_a_value(t):
    # (λ*x.t)↓ in every pca: the result is built from k, s and values only
    assert is_value(lambda_star("x", t))


@given(terms_with())
def test_format_parse_roundtrip(t):
    assert parse_term(format_term(t)) == t


def test_parse_lam_and_errors():
    t = parse_term("(lam x (app (var x) (const k)))")
    assert t == Lam("x", app(Var("x"), K))
    for bad in ["(app (var x))", "(foo)", "(const k", "()"]:
        with pytest.raises(SexprError):
            parse_term(bad)


def test_size_counts_leaves():
    assert size(app(K, Var("x"), S)) == 3
