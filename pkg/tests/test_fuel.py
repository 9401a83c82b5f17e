import pytest

from pcalab.fuel import (Budget, Defined, Diverged, FuelExhausted, OutOfFuel, ProvenDivergent,
                         outcome_json, run_budgeted, same_outcome)


def test_budget_charges_until_limit():
    b = Budget(3)
    b.charge()
    b.charge(2)
    assert b.remaining == 0
    with pytest.raises(OutOfFuel):
        b.charge()
    assert b.spent == 3


def test_negative_fuel_rejected():
    with pytest.raises(ValueError):
        Budget(-1)


def test_run_budgeted_folds_signals():
    assert run_budgeted(lambda b: 4, 1) == Defined(4)

    def boom(b):
        raise Diverged("nope")

    assert run_budgeted(boom, 5) == ProvenDivergent("nope")

    def spin(b):
        while True:
            b.charge()

    assert run_budgeted(spin, 7) == FuelExhausted(7)


def test_same_outcome_is_kleene_equality_on_settled_results():
    assert same_outcome(Defined(1), Defined(1))
    assert not same_outcome(Defined(1), Defined(2))
    assert same_outcome(ProvenDivergent("a"), ProvenDivergent("b"))
    assert not same_outcome(FuelExhausted(3), FuelExhausted(3))
    assert not same_outcome(Defined(1), ProvenDivergent())
    assert same_outcome(Defined("x"), Defined("X"), eq=lambda a, b: a.lower() == b.lower())


def test_outcome_json_shapes():
    assert outcome_json(Defined(3), describe=lambda v: v) == {"outcome": "defined", "value": 3}
    assert outcome_json(ProvenDivergent("r")) == {"outcome": "divergent", "reason": "r"}
    assert outcome_json(FuelExhausted(9)) == {"outcome": "exhausted", "spent": 9}
