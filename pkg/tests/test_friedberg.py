import copy
import json

import pytest
from hypothesis import given, strategies as st

from pcalab import friedberg as F
from pcalab.coding import unpair
from pcalab.fuel import Defined, FuelExhausted, ProvenDivergent
from pcalab.k1 import encode, run

STAGES = 3000


@pytest.fixture(scope="module")
def con():
    c = F.Construction()
    c.state.trace = []
    c.state.advance_to(STAGES)
    return c


def released_for(state, e):
    return [r for r in state.releases if r.e == e]


def test_initial_state():
    st0 = F.init_state()
    assert st0.stage == 0 and not st0.followers and not st0.releases
    c = F.Construction(st0)
    assert c.psi(2 * 7 + 1, 99, 0) == Defined(7)
    assert isinstance(c.psi(0, 3, 10**6), FuelExhausted)
    assert isinstance(c.psi(0, 3, 10, facts=True), ProvenDivergent)
    assert st0.stage == 0  # odd and zero codes cost no simulation


def test_constant_function_is_released_by_rule_three(con):
    zero = F.PRELUDE_NAMES["zero"]
    rel = released_for(con.state, zero)
    assert rel and rel[0].rule == 3
    assert unpair(rel[0].appointed)[0] == zero  # appointed at a stage of the form <e, t>


def test_duplicate_index_is_released_by_rule_one(con):
    dup = F.PRELUDE_NAMES["identity-again"]
    rel = released_for(con.state, dup)
    assert rel and all(r.rule == 1 for r in rel)
    assert dup not in con.state.followers


def test_minimal_total_indices_keep_their_followers(con):
    for name in ("identity", "successor", "double-plus-one", "double"):
        e = F.PRELUDE_NAMES[name]
        assert e in con.state.followers, name
        assert not released_for(con.state, e)


def test_quiet_stage_only_refreshes_copies():
    state = F.init_state(trace=True).run(200)
    for s in range(201, 400):
        e, _ = unpair(s)
        before = dict(state.followers)
        state.step()
        ev = state.trace[-1]
        if not ev["releases"] and not ev["appointments"]:
            assert state.followers == before
            assert {c["code"] for c in ev["copies"]} == set(before.values())
            return
    pytest.fail("no quiet stage found")


def test_tracks_match_direct_recomputation(con):
    for e in (1, 3, 7, 9, 11):
        tr = con.state.phi.track(e)
        for s in (10, 57, 300):
            table = {m: v for m, v in tr.approx.items() if tr.born[m] <= s}
            assert table == F.phi_stage_direct(e, s), (e, s)


def test_invariants_hold(con):
    report = F.check_invariants(con.state, deep=True)
    assert report["ok"], report["violations"]
    assert report["released"] > 100


def test_injected_duplicate_is_flagged(con):
    state = copy.deepcopy(con.state)
    x, y = sorted(state.frozen)[:2]
    state.frozen[y] = dict(state.frozen[x])
    report = F.check_invariants(state, deep=False)
    names = {v["invariant"] for v in report["violations"]}
    assert "repetition among released" in names


def test_injected_constant_is_flagged(con):
    state = copy.deepcopy(con.state)
    x = sorted(state.frozen)[0]
    state.frozen[x] = {0: (4, 1), 1: (4, 1)}
    names = {v["invariant"] for v in F.check_invariants(state, deep=False)["violations"]}
    assert "released function is constant or too small" in names


def test_small_indices_all_get_followers(con):
    held = set(con.state.followers) | {r.e for r in con.state.releases}
    for e in range(11):
        if con.state.phi.track(e).nonempty(STAGES):
            assert e in held, F.phi_name(e)
    assert 0 not in held  # the empty program never qualifies


def test_no_repetitions_among_final_entries(con):
    tables = [tuple(sorted(con.state._frozen_fn[x].items())) for x in con.state.frozen]
    assert len(tables) == len(set(tables))


def test_follower_copies_its_function(con):
    x = con.state.followers[F.PRELUDE_NAMES["successor"]]
    code = encode(F.phi_program(F.PRELUDE_NAMES["successor"]))
    for m in range(0, 200, 7):
        assert con.psi(x, m, STAGES) == run(code, m, 10_000)


def test_released_codes_are_final(con):
    x = sorted(con.state.frozen)[0]
    fn = con.state._frozen_fn[x]
    missing = next(m for m in range(10**6) if m not in fn)
    assert isinstance(con.psi(x, missing, STAGES, facts=True), ProvenDivergent)
    assert isinstance(con.psi(x, missing, STAGES), ProvenDivergent)
    m0 = min(fn)
    assert con.psi(x, m0, STAGES) == Defined(fn[m0])


def test_answers_depend_only_on_the_stage_bound(con):
    fresh = F.Construction()
    for x in sorted(con.state.used)[:12]:
        for m in (0, 1, 5, 20):
            assert fresh.psi(x, m, 400) == con.psi(x, m, 400), (x, m)


def test_runs_are_reproducible():
    a = F.run(600).snapshot()
    b = F.run(600).snapshot()
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_single_appointment_and_even_codes(con):
    used = con.state.used
    assert len(used) == len(set(used))
    assert all(x % 2 == 0 and x > 0 for x in used)
    assert used == [2 * (i + 1) for i in range(len(used))]


def test_snapshot_check_roundtrip(con):
    snap = json.loads(json.dumps(con.state.snapshot()))
    assert F.check_snapshot(snap, deep=False)["ok"]
    bad = copy.deepcopy(snap)
    bad["released"][1]["function"] = bad["released"][0]["function"]
    assert not F.check_snapshot(bad, deep=False)["ok"]
    bad = copy.deepcopy(snap)
    bad["used"].append(3)
    assert not F.check_snapshot(bad, deep=False)["ok"]


def test_trace_records_rules(con):
    rules = {r["rule"] for ev in con.state.trace for r in ev["releases"]}
    assert rules <= {1, 2, 3} and {1, 3} <= rules
    lines = list(F.trace_lines(con.state))
    assert json.loads(lines[0])["stage"] == 1


def test_find_k(con):
    k = F.find_k_code(STAGES, construction=con)
    assert k["verified"] and not k["released"] and k["code"] % 2 == 0
    assert con.psi(k["code"], 5, STAGES) == Defined(11)
    assert con.psi(11, 42, STAGES) == Defined(5)


def test_find_k_needs_enough_stages():
    with pytest.raises(F.NoStableFollower):
        F.find_k_code(5)


@pytest.mark.parametrize("sigma", [1, 3, 99])
def test_odd_sigma_fails_the_s_law(con, sigma):
    w = F.refute_s_candidate(sigma, STAGES, construction=con)
    assert w.notes["phase"] == 1 and w.conclusive and w.replay()
    assert w.kind == "s-candidate"


def test_k_is_not_s(con):
    k = F.find_k_code(STAGES, construction=con)["code"]
    w = F.refute_s_candidate(k, STAGES, construction=con)
    assert w.notes["phase"] == 1 and "sides differ" in w.clause
    a, b, c = w.elements["triple"]
    # k a b c = a c, which differs from a c (b c) on the reported triple
    lhs, rhs = w.notes["lhs"], w.notes["rhs"]
    assert lhs == con.psi(a, c, STAGES) and lhs != rhs
    assert w.replay()


def test_zero_sigma_is_undefined(con):
    w = F.refute_s_candidate(0, STAGES, construction=con)
    assert w.clause.startswith("s a b defined")


def test_shipped_candidates_are_all_refuted(con):
    k = F.find_k_code(STAGES, construction=con)["code"]
    cands = F.s_candidates(con.state, k)
    assert len(cands) == 50 + 2 + 20
    for sigma in cands:
        w = F.refute_s_candidate(sigma, STAGES, k_code=k, construction=con)
        assert w.notes["phase"] == 1 and w.conclusive, sigma


maps = st.dictionaries(st.integers(0, 6), st.integers(0, 2), max_size=5)


@given(maps, st.lists(maps, max_size=4))
def test_incompatible_extension(base, others):
    f = F.incompatible_extension(base, others)
    assert all(f[m] == v for m, v in base.items())
    assert len(set(f.values())) >= 2
    for g in others:
        if g:
            assert f != g
            compatible = all(f[m] == v for m, v in g.items() if m in f)
            if compatible:
                # only possible when g's whole domain was already inside ours
                assert set(g) <= set(f)
