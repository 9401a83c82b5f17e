"""Oracle application: ``a ·_f b`` as a query/answer dialogue.

Round ``i`` applies ``a`` to the history ``⟨ī, b, f(e₀), …, f(e_{i−1})⟩``.
A reply ``⟨false, e⟩`` asks the oracle about ``e``; ``⟨true, c⟩`` ends the
dialogue with result ``c``.  The numeral ``ī`` at the head lets a machine
tell rounds apart, since it cannot measure the arity of a tuple.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, List, Mapping, Optional, Sequence, Tuple, Union

from .fuel import Budget, Defined, Diverged, FuelExhausted, OutOfFuel, ProvenDivergent
from .kernel import Model, StdLib
from .terms import Const, Term, Var, app, lam

MAX_DEPTH = 8


@dataclass(frozen=True)
class OracleFn:
    """A total oracle: lookup table with a default."""

    table: Mapping[Any, Any]
    default: Any

    def __call__(self, e):
        return self.table.get(e, self.default)

    @classmethod
    def from_json(cls, doc: dict) -> "OracleFn":
        table = {int(k): int(v) for k, v in doc.get("table", {}).items()}
        return cls(table, int(doc.get("default", 0)))


@dataclass
class Round:
    history: Any
    reply: Any  # element, or an outcome when the round failed


@dataclass
class DialogueTranscript:
    queries: List[Any] = field(default_factory=list)
    answers: List[Any] = field(default_factory=list)
    rounds: List[Round] = field(default_factory=list)
    result: Any = None
    failure: Optional[str] = None

    def to_json(self, describe=repr) -> dict:
        return {
            "queries": [describe(q) for q in self.queries],
            "answers": [describe(a) for a in self.answers],
            "rounds": [
                {"round": i, "reply": describe(r.reply) if not _is_outcome(r.reply) else str(r.reply)}
                for i, r in enumerate(self.rounds)
            ],
            "result": None if self.result is None else describe(self.result),
            "failure": self.failure,
        }


def _is_outcome(v) -> bool:
    return isinstance(v, (Defined, ProvenDivergent, FuelExhausted))


def history(lib: StdLib, b, answers: Sequence) -> Any:
    return lib.tuple(lib.numeral(len(answers)), b, *answers)


def _split_reply(lib: StdLib, reply, budget: Budget):
    """``(tag, payload)`` if ``reply`` is literally ``⟨true|false, payload⟩``."""
    m = lib.model
    try:
        tag = m.apply_raw(reply, lib.proj(2, 1), budget)
        payload = m.apply_raw(reply, lib.proj(2, 2), budget)
    except Diverged:
        return None
    if not (m.same(tag, lib.true) or m.same(tag, lib.false)):
        return None
    if not m.same(lib.tuple(tag, payload), reply):
        return None
    return m.same(tag, lib.true), payload


def _dialogue(lib: StdLib, f: OracleFn, a, b, budget: Budget, tr: DialogueTranscript):
    m = lib.model
    while True:
        budget.charge()
        hist = history(lib, b, tr.answers)
        try:
            reply = m.apply_raw(a, hist, budget)
        except Diverged as exc:
            tr.rounds.append(Round(hist, ProvenDivergent(exc.reason)))
            tr.failure = "divergent"
            raise
        tr.rounds.append(Round(hist, reply))
        split = _split_reply(lib, reply, budget)
        if split is None:
            tr.failure = "invalid-reply"
            raise InvalidReply(len(tr.rounds) - 1)
        done, payload = split
        if done:
            tr.result = payload
            return payload
        tr.queries.append(payload)
        tr.answers.append(f(payload))


class InvalidReply(Diverged):
    def __init__(self, round_index: int):
        super().__init__(f"reply in round {round_index} is not a tagged pair")
        self.round_index = round_index


def oracle_apply(lib: StdLib, f: OracleFn, a, b, fuel: int):
    """Run the dialogue; returns ``(outcome, transcript)``.

    An ill-formed reply is reported as ProvenDivergent with reason
    ``invalid-reply``; ``transcript.failure`` says which case occurred.
    """
    tr = DialogueTranscript()
    budget = Budget(fuel)
    try:
        out = Defined(_dialogue(lib, f, a, b, budget, tr))
    except InvalidReply:
        out = ProvenDivergent("invalid-reply")
    except Diverged as exc:
        out = ProvenDivergent(exc.reason)
    except OutOfFuel:
        tr.failure = tr.failure or "exhausted"
        out = FuelExhausted(budget.spent)
    return out, tr


def replay(lib: StdLib, f: OracleFn, a, b, tr: DialogueTranscript, fuel: int) -> List[str]:
    """Check a transcript clause by clause against the bare model.

    Returns the list of violations; empty means the transcript conforms.
    """
    m = lib.model
    problems = []
    if len(tr.answers) != len(tr.queries):
        problems.append("answer and query counts differ")
    for i, (q, ans) in enumerate(zip(tr.queries, tr.answers)):
        if not m.same(f(q), ans):
            problems.append(f"answer {i} is not f(query {i})")
    for i, rnd in enumerate(tr.rounds):
        hist = history(lib, b, tr.answers[:i])
        if not m.same(hist, rnd.history):
            problems.append(f"round {i}: history mismatch")
        out = m.apply(a, hist, fuel)
        if _is_outcome(rnd.reply):
            if type(out) is not type(rnd.reply):
                problems.append(f"round {i}: failure not reproduced")
            continue
        if not (isinstance(out, Defined) and m.same(out.value, rnd.reply)):
            problems.append(f"round {i}: reply not reproduced")
            continue
        last = i == len(tr.rounds) - 1
        if i < len(tr.queries):
            if not m.same(rnd.reply, lib.tuple(lib.false, tr.queries[i])):
                problems.append(f"round {i}: expected ⟨false, e_{i}⟩")
        elif not last:
            problems.append(f"round {i}: unexpected extra round")
        elif tr.result is not None:
            if not m.same(rnd.reply, lib.tuple(lib.true, tr.result)):
                problems.append(f"round {i}: expected ⟨true, c⟩")
        elif tr.failure not in ("invalid-reply", "exhausted"):
            problems.append(f"round {i}: final reply neither answer nor failure")
    return problems


# -- dialogue machines from plans -----------------------------------------------------

Expr = Union[str, Tuple[str, Any]]


class PlanError(ValueError):
    pass


@dataclass(frozen=True)
class Plan:
    """Round-by-round strategy: each step is ``("ask", expr)`` or
    ``("return", expr)``; expressions are ``"input"``, ``("answer", j)`` or
    ``("const", element)``.  Past the last step the machine diverges."""

    steps: Tuple[Tuple[str, Expr], ...]

    @classmethod
    def from_json(cls, doc) -> "Plan":
        steps = []
        for step in doc["rounds"] if isinstance(doc, dict) else doc:
            (verb, expr), = step.items()
            steps.append((verb, _expr_from_json(expr)))
        return cls(tuple(steps))


def _expr_from_json(e) -> Expr:
    if e == "input":
        return "input"
    if isinstance(e, dict) and len(e) == 1:
        (key, val), = e.items()
        if key in ("answer", "const", "numeral"):
            return (key, int(val))
    raise PlanError(f"bad plan expression {e!r}")


def _expr_term(lib: StdLib, expr: Expr, rnd: int) -> Term:
    if expr == "input":
        return Var("b")
    kind, val = expr
    if kind == "answer":
        if not 0 <= val < rnd:
            raise PlanError(f"round {rnd} refers to answer {val}, not yet available")
        return Var(f"a{val}")
    if kind == "numeral":
        return Const(lib.numeral(val))
    return Const(val)


def query_machine(lib: StdLib, plan: Plan, max_depth: int = MAX_DEPTH):
    """Compile a plan into an element.

    The machine applies the history to a dispatcher; the dispatcher reads
    the round numeral and returns the curried reply function for that round.
    """
    if len(plan.steps) > max_depth:
        raise PlanError(f"plan depth {len(plan.steps)} exceeds {max_depth}")
    pair = Const(lib.pair_maker(2))
    responders = []
    for r, (verb, expr) in enumerate(plan.steps):
        if verb not in ("ask", "return"):
            raise PlanError(f"unknown plan step {verb!r}")
        tag = Const(lib.false if verb == "ask" else lib.true)
        body = app(pair, tag, _expr_term(lib, expr, r))
        names = " ".join(["b"] + [f"a{j}" for j in range(r)])
        responders.append(lib.build(lam(names, body), f"round {r} responder"))

    zero, pred = Const(lib.zero), Const(lib.proj(2, 2))

    def select(u: Term, r: int) -> Term:
        if r == len(responders):
            return Const(lib.h) if lib.h is not None else Const(lib.i)
        return lib.cond(app(zero, u), Const(responders[r]), select(app(u, pred), r + 1))

    dispatch = lib.build(lam("u", select(Var("u"), 0)), "dispatcher")
    return lib.build(lam("x", app(Var("x"), Const(dispatch))), "query machine")


def representer(lib: StdLib):
    """``r ·_f b = f(b)``."""
    return query_machine(lib, Plan((("ask", "input"), ("return", ("answer", 0)))))


class OracleModel(Model):
    """``A[f]`` as an applicative structure over the base elements."""

    def __init__(self, lib: StdLib, f: OracleFn):
        super().__init__()
        self.lib = lib
        self.f = f
        self.name = f"{lib.model.name}[f]"

    def apply_raw(self, a, b, budget):
        tr = DialogueTranscript()
        try:
            return _dialogue(self.lib, self.f, a, b, budget, tr)
        except InvalidReply as exc:
            raise Diverged("invalid-reply") from exc

    def same(self, a, b):
        return self.lib.model.same(a, b)

    def describe(self, a):
        return self.lib.model.describe(a)

    def divergent_pair(self):
        h = self.lib.h
        return None if h is None else (h, h)
