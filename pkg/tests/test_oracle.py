import pytest

from pcalab import oracle as O
from pcalab.acceptance import scripted_plans, table_oracles, _plan_result
from pcalab.fuel import Defined, FuelExhausted, ProvenDivergent

FUEL = 200_000
SUCC = O.OracleFn({n: n + 1 for n in range(30)}, 0)


@pytest.mark.parametrize("index", range(10))
def test_scripted_plans_follow_the_protocol(lib, index):
    plan = scripted_plans(lib)[index]
    machine = O.query_machine(lib, plan)
    for f in table_oracles():
        for b in (0, 3, 9):
            out, tr = O.oracle_apply(lib, f, machine, b, FUEL)
            assert O.replay(lib, f, machine, b, tr, FUEL) == []
            want = _plan_result(plan, f, b)
            if want is None:
                assert not isinstance(out, Defined)
            else:
                assert out == Defined(want)
                assert tr.answers == [f(q) for q in tr.queries]


def test_history_has_length_header(lib):
    h = O.history(lib, 5, [7, 8])
    assert lib.ap(h, lib.proj(4, 1)) == lib.numeral(2)
    assert lib.ap(h, lib.proj(4, 2)) == 5
    assert lib.ap(h, lib.proj(4, 4)) == 8


def test_representer(lib):
    r = O.representer(lib)
    for f in table_oracles():
        for b, v in f.table.items():
            assert O.oracle_apply(lib, f, r, b, FUEL)[0] == Defined(v)


def test_chained_queries(lib):
    plan = O.Plan((("ask", "input"), ("ask", ("answer", 0)), ("return", ("answer", 1))))
    out, tr = O.oracle_apply(lib, SUCC, O.query_machine(lib, plan), 4, FUEL)
    assert out == Defined(6)
    assert tr.queries == [4, 5] and tr.answers == [5, 6]
    assert len(tr.rounds) == 3


def test_malformed_replies_are_invalid(lib):
    for machine in (lib.i, lib.k):
        out, tr = O.oracle_apply(lib, SUCC, machine, 5, FUEL)
        assert out == ProvenDivergent("invalid-reply")
        assert tr.failure == "invalid-reply"
        assert O.replay(lib, SUCC, machine, 5, tr, FUEL) == []


def test_divergent_machine(lib):
    out, tr = O.oracle_apply(lib, SUCC, lib.h, 1, FUEL)
    assert isinstance(out, ProvenDivergent) and tr.failure == "divergent"


def test_exhaustion_is_reported(lib):
    machine = O.query_machine(lib, O.Plan((("ask", "input"), ("return", ("answer", 0)))))
    out, tr = O.oracle_apply(lib, SUCC, machine, 2, 3)
    assert isinstance(out, FuelExhausted) and tr.failure == "exhausted"


def test_replay_detects_tampering(lib):
    machine = O.query_machine(lib, O.Plan((("ask", "input"), ("return", ("answer", 0)))))
    out, tr = O.oracle_apply(lib, SUCC, machine, 2, FUEL)
    tr.answers[0] = 99
    assert O.replay(lib, SUCC, machine, 2, tr, FUEL)


def test_plan_validation(lib):
    with pytest.raises(O.PlanError):
        O.query_machine(lib, O.Plan((("return", ("answer", 0)),)))
    with pytest.raises(O.PlanError):
        O.query_machine(lib, O.Plan((("shout", "input"),)))
    with pytest.raises(O.PlanError):
        O.query_machine(lib, O.Plan((("ask", "input"),) * 9))
    with pytest.raises(O.PlanError):
        O.Plan.from_json({"rounds": [{"ask": "everything"}]})


def test_plan_from_json():
    plan = O.Plan.from_json({"rounds": [{"ask": "input"}, {"return": {"answer": 0}}]})
    assert plan.steps == (("ask", "input"), ("return", ("answer", 0)))


def test_oracle_model_application(lib):
    m = O.OracleModel(lib, SUCC)
    r = O.representer(lib)
    assert m.apply(r, 7, FUEL) == Defined(8)
    assert isinstance(m.apply(lib.i, 7, FUEL), ProvenDivergent)
    assert m.divergent_pair() == (lib.h, lib.h)


def test_oracle_from_json():
    f = O.OracleFn.from_json({"table": {"3": 4}, "default": 1})
    assert f(3) == 4 and f(0) == 1
