import pytest

from pcalab.finite import ONE_POINT, FiniteTableModel
from pcalab.fuel import Defined, ProvenDivergent
from pcalab.k1 import DIVERGE_CODE, K1Model
from pcalab.kernel import (DivergerError, StdLibError, converters_roundtrip, diverger, fixpoint,
                           observational_eq, stdlib)
from pcalab.terms import Const, Var, app, lam


def test_numerals_are_curry_style(lib):
    m = lib.model
    assert lib.numeral(0) == lib.i
    for n in range(1, 5):
        assert lib.ap(lib.numeral(n), lib.proj(2, 1)) == lib.false
        assert lib.ap(lib.numeral(n), lib.proj(2, 2)) == lib.numeral(n - 1)
    assert lib.numeral_index(lib.numeral(3)) == 3
    assert lib.numeral_index(lib.k) is None
    assert m.same(lib.numeral(2), lib.numeral(2))


def test_booleans_and_cases(lib):
    a, b = lib.numeral(1), lib.numeral(2)
    assert lib.ap(lib.ifthenelse, lib.true, a, b) == a
    assert lib.ap(lib.ifthenelse, lib.false, a, b) == b
    assert lib.ap(lib.zero, lib.numeral(0)) == lib.true
    assert lib.ap(lib.zero, lib.numeral(3)) == lib.false
    assert converters_roundtrip(lib) == (lib.to_num, lib.to_bool)


def test_cond_evaluates_only_the_chosen_branch(lib):
    test = app(Const(lib.zero), Var("y"))
    body = lib.cond(test, Const(lib.numeral(1)), app(Const(lib.h), Var("y")))
    f = lib.build(lam("y", body))
    assert lib.model.apply(f, lib.numeral(0), 10**5) == Defined(lib.numeral(1))
    assert isinstance(lib.model.apply(f, lib.numeral(1), 10**5), ProvenDivergent)


def test_diverger_diverges_everywhere(lib):
    for a in (lib.k, lib.s, lib.numeral(2), 0, 12345):
        assert isinstance(lib.model.apply(lib.h, a, 10**5), ProvenDivergent)
    with pytest.raises(DivergerError):
        diverger(lib, lib.k, lib.k)


def test_fixpoint_satisfies_recursion_equation(lib):
    f = lib.build(lam("x y", app(Const(lib.pair_maker(2)), Var("y"), Var("x"))))
    e = fixpoint(lib, f)
    for n in range(4):
        y = lib.numeral(n)
        fe = lib.ap(f, e)
        assert lib.model.apply(e, y, 10**6) == lib.model.apply(fe, y, 10**6)


def test_projection_bounds(lib):
    with pytest.raises(ValueError):
        lib.proj(2, 3)


def test_build_reports_failure(lib):
    with pytest.raises(StdLibError):
        lib.build(app(Const(DIVERGE_CODE), Const(0)))


def test_observational_eq_never_claims_equality(lib):
    m = lib.model
    assert observational_eq(m, lib.i, lib.i, [lib.k, lib.s], 1000) == "agree-on-probes"
    assert observational_eq(m, lib.i, lib.true, [lib.k], 1000).startswith("distinguished")


def test_one_point_algebra_is_a_pca():
    lib = stdlib(FiniteTableModel(ONE_POINT), fuel=100)
    # everything collapses: true = false, which is why nontrivial pcas are infinite
    assert lib.true == lib.false == lib.i == 0
    assert lib.h is None


def test_k1_smoke_check_rejects_broken_model():
    class Broken(K1Model):
        def __init__(self):
            super().__init__()
            self.constants["k"] = DIVERGE_CODE

    with pytest.raises(StdLibError):
        stdlib(Broken())
