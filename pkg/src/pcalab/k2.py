"""A desk-scale Kleene second model.

Elements are total functions ω→ω given by finite descriptions.  Application
follows the usual coding: coordinate ``n`` of ``α·β`` is ``α(⟨n, β̄k⟩) − 1``
for the least prefix length ``k`` at which that value is positive.  Every
β-value consulted is logged, which is what makes the continuity argument
against a decider for ``{0̄}`` mechanical.

Only application is provided; this is a partial applicative structure.
"""

from __future__ import annotations

import re

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

from .coding import pair, query_decode, seq_code
from .fuel import Budget, Defined, Diverged, FuelExhausted, OutOfFuel, ProvenDivergent
from .kernel import Model
from .witness import Witness

REJECT = object()
DEFAULT_COORDS = 16


class K2Element:
    name = "element"

    def value(self, m: int) -> int:
        raise NotImplementedError

    def __call__(self, m: int) -> int:
        return self.value(m)

    def prefix(self, n: int) -> Tuple[int, ...]:
        return tuple(self.value(i) for i in range(n))


@dataclass(frozen=True, eq=True)
class EventuallyPeriodic(K2Element):
    """``head`` followed by ``period`` repeated forever."""

    head: Tuple[int, ...] = ()
    period: Tuple[int, ...] = (0,)

    def __post_init__(self):
        if not self.period:
            raise ValueError("period word must be non-empty")
        if any(v < 0 for v in self.head + self.period):
            raise ValueError("values must be naturals")

    def value(self, m: int) -> int:
        if m < len(self.head):
            return self.head[m]
        return self.period[(m - len(self.head)) % len(self.period)]

    @property
    def name(self):
        return f"{''.join(map(str, self.head))}({''.join(map(str, self.period))})^w"

    def normal(self) -> "EventuallyPeriodic":
        """Shortest equivalent description, so that equality is syntactic."""
        head, period = list(self.head), list(self.period)
        for p in range(1, len(period) + 1):
            if len(period) % p == 0 and period == period[:p] * (len(period) // p):
                period = period[:p]
                break
        while head and head[-1] == period[-1]:
            head.pop()
            period = [period[-1]] + period[:-1]
        return EventuallyPeriodic(tuple(head), tuple(period))


def zeros() -> EventuallyPeriodic:
    return EventuallyPeriodic((), (0,))


def ones() -> EventuallyPeriodic:
    return EventuallyPeriodic((), (1,))


def flip_at(p: int) -> EventuallyPeriodic:
    """``0^p 1 0^ω``."""
    return EventuallyPeriodic((0,) * p + (1,), (0,))


class PrefixRule(K2Element):
    """A functional given by a rule on (output coordinate, input prefix).

    The rule returns an answer, ``None`` to ask for more input, or
    :data:`REJECT` to refuse for good.  As a coding real it is
    ``m ↦ answer + 1`` and ``0`` otherwise.
    """

    def __init__(self, rule: Callable[[int, tuple], object], name: str, check: bool = True):
        self.rule = rule
        self.name = name
        if check:
            bad = monotonicity_violation(self)
            if bad is not None:
                raise ValueError(f"rule {name} is not monotone: {bad}")

    def value(self, m: int) -> int:
        n, seq = query_decode(m)
        r = self.rule(n, seq)
        if r is None or r is REJECT:
            return 0
        return r + 1

    def __repr__(self):
        return f"PrefixRule({self.name})"


def monotonicity_violation(rule: PrefixRule, max_len: int = 6, coords: int = 4):
    """Sampled check: an answer on a 0/1 prefix persists on every extension."""
    for n in range(coords):
        seqs = [()]
        for _ in range(max_len):
            nxt = []
            for seq in seqs:
                r = rule.rule(n, seq)
                for bit in (0, 1):
                    ext = seq + (bit,)
                    if r is not None and rule.rule(n, ext) != r:
                        return (n, seq, ext)
                    nxt.append(ext)
            seqs = nxt
    return None


@dataclass
class Applied(K2Element):
    """The lazily evaluated real ``α·β``; coordinates are memoised."""

    alpha: K2Element
    beta: K2Element
    coord_fuel: int = 10_000
    memo: Dict[int, int] = field(default_factory=dict)

    def value(self, m: int) -> int:
        if m not in self.memo:
            v, _ = coordinate(self.alpha, self.beta, m, Budget(self.coord_fuel))
            self.memo[m] = v
        return self.memo[m]

    @property
    def name(self):
        return f"({getattr(self.alpha, 'name', '?')}·{getattr(self.beta, 'name', '?')})"


def coordinate(alpha: K2Element, beta: K2Element, n: int, budget: Budget):
    """Coordinate ``n`` of ``α·β`` and the input prefix length it consulted.

    One unit of fuel per α-query, plus one per 64-bit word of the query
    code when α is a plain sequence (those codes double in size per input
    position read, so a flat charge would not bound the work).
    """
    seq: List[int] = []
    prefix = seq_code(())
    while True:
        budget.charge()
        if isinstance(alpha, PrefixRule):
            r = alpha.rule(n, tuple(seq))
            if r is REJECT:
                raise Diverged(f"rejected at coordinate {n} after reading {len(seq)}")
            if r is not None:
                return r, len(seq)
        else:
            budget.charge(prefix.bit_length() >> 6)
            v = alpha.value(pair(n, prefix))
            if v > 0:
                return v - 1, len(seq)
        seq.append(beta.value(len(seq)))
        if not isinstance(alpha, PrefixRule):
            prefix = 1 + pair(prefix, seq[-1])


@dataclass
class K2Result:
    outcome: object
    values: List[int]
    consulted: List[int]  # per defined coordinate, input prefix length read
    queried: int  # number of distinct input positions read overall

    def to_json(self) -> dict:
        out = self.outcome
        kind = {Defined: "defined", ProvenDivergent: "divergent", FuelExhausted: "exhausted"}[type(out)]
        return {"outcome": kind, "values": self.values, "consulted": self.consulted,
                "queried": self.queried}


def k2_apply(alpha: K2Element, beta: K2Element, fuel: int, coords: int = DEFAULT_COORDS,
             budget: Optional[Budget] = None) -> K2Result:
    """Evaluate the first ``coords`` coordinates of ``α·β`` under one budget.

    Stops at the first coordinate that is rejected or runs out of fuel.
    """
    budget = budget or Budget(fuel)
    values: List[int] = []
    consulted: List[int] = []
    queried = 0
    for n in range(coords):
        try:
            v, k = coordinate(alpha, beta, n, budget)
        except Diverged as exc:
            queried = max(queried, _rejected_at(alpha, beta, n))
            return K2Result(ProvenDivergent(exc.reason), values, consulted, queried)
        except OutOfFuel:
            return K2Result(FuelExhausted(budget.spent), values, consulted, queried)
        values.append(v)
        consulted.append(k)
        queried = max(queried, k)
    return K2Result(Defined(Applied(alpha, beta)), values, consulted, queried)


def _rejected_at(alpha, beta, n) -> int:
    seq: List[int] = []
    while alpha.rule(n, tuple(seq)) is not REJECT:
        seq.append(beta.value(len(seq)))
    return len(seq)


class K2Model(Model):
    """K2 as a pas: an application counts as Defined once its first
    ``coords`` coordinates are."""

    name = "k2"

    def __init__(self, coords: int = DEFAULT_COORDS):
        super().__init__()
        self.coords = coords

    def apply_raw(self, a, b, budget):
        res = k2_apply(a, b, budget.remaining, self.coords, budget=budget)
        out = res.outcome
        if isinstance(out, FuelExhausted):
            raise OutOfFuel()
        if isinstance(out, ProvenDivergent):
            raise Diverged(out.reason)
        return out.value

    def describe(self, a):
        return getattr(a, "name", repr(a))


# -- the two functionals ------------------------------------------------------------


def _alpha_rule(n, x):
    # copy while the input is all zeros; a 1 seen before answering is fatal
    if any(x[: n + 1]):
        return REJECT
    return 0 if len(x) > n else None


def _beta_rule(n, x):
    if len(x) > n and any(x):
        return 1
    return None


def make_counterexample_pair():
    """α̂ copies an all-zero input and rejects on the first 1; β̂ outputs
    ones once it has seen a 1.  Their domains on 0/1-sequences are {0̄} and
    its complement."""
    return PrefixRule(_alpha_rule, "alpha-hat"), PrefixRule(_beta_rule, "beta-hat")


BUILTINS = dict(zip(("alpha-hat", "beta-hat"), make_counterexample_pair()))


# -- continuity refuter -------------------------------------------------------------


class NotADecider(ValueError):
    pass


def refute_continuous_decider(gamma: K2Element, true_real: K2Element = None,
                              false_real: K2Element = None, fuel: int = 10_000,
                              search: int = 64) -> Witness:
    """Find an input on which ``gamma`` misclassifies membership in ``{0̄}``.

    ``gamma·0̄`` must settle a coordinate where the truth values differ after
    reading a finite prefix ``0^p``.  If it answers "member", the input
    ``0^p 1 0^ω`` shares that prefix, gets the same answer, and is not a
    member.  If it answers "non-member", it is already wrong on ``0̄``.
    """
    true_real = true_real or ones()
    false_real = false_real or zeros()
    j = next((i for i in range(search) if true_real(i) != false_real(i)), None)
    if j is None:
        raise ValueError("true and false reals agree on every checked coordinate")
    zero = zeros()
    w = Witness("continuous-decider", elements={"gamma": getattr(gamma, "name", repr(gamma)),
                                                "coordinate": j})

    def at(x):
        def redo():
            try:
                return coordinate(gamma, x, j, Budget(fuel))
            except Diverged as exc:
                return ProvenDivergent(exc.reason)
            except OutOfFuel:
                return FuelExhausted(fuel)
        return redo

    first = w.record(f"gamma·0̄ at coordinate {j}", fuel, at(zero))
    if not isinstance(first, tuple):
        w.kind = "invalid-candidate"
        w.clause = "gamma must be total on 0/1-sequences"
        w.notes["result"] = first
        return w
    v, p = first
    w.notes["prefix_read"] = p
    if v == true_real(j):
        x = flip_at(p)
        second = w.record(f"gamma·{x.name} at coordinate {j}", fuel, at(x))
        w.elements["input"] = x.name
        w.notes["input_member"] = False
        if isinstance(second, tuple) and second[0] == v:
            w.clause = "gamma answers 'member' on a sequence that is not 0̄"
        else:
            # unreachable for a genuine functional: same prefix, same answer
            w.kind = "invalid-candidate"
            w.clause = "gamma is not continuous on the logged prefix"
        return w
    if v == false_real(j):
        w.elements["input"] = zero.name
        w.notes["input_member"] = True
        w.clause = "gamma answers 'non-member' on 0̄"
        return w
    w.kind = "invalid-candidate"
    w.clause = "not a decider: answer matches neither truth value"
    return w


def decider_candidates(true_real=None, false_real=None):
    """The shipped family of would-be deciders for ``{0̄}``."""
    t = true_real or ones()
    f = false_real or zeros()

    def reading(k, choose):
        return lambda n, x: choose(n, x[:k]) if len(x) >= k else None

    def all_zero(n, x):
        return t(n) if not any(x) else f(n)

    return [
        PrefixRule(reading(1, lambda n, x: t(n)), "const-true"),
        PrefixRule(reading(1, lambda n, x: f(n)), "const-false"),
        PrefixRule(reading(5, all_zero), "zeros-in-first-5"),
        PrefixRule(reading(1, all_zero), "first-bit"),
        PrefixRule(lambda n, x: all_zero(n, x[: n + 3]) if len(x) >= n + 3 else None,
                   "zeros-in-first-n+3"),
    ]


_NAME = re.compile(r"([0-9]*)\(([0-9]+)\)\^w")


def parse_element(spec) -> K2Element:
    """Element specs: a builtin name, a digit sequence name such as
    ``"0001(0)^w"``, or a JSON object
    ``{"head": [...], "period": [...], "exceptions": {"pos": val}}``."""
    if isinstance(spec, str):
        if spec in BUILTINS:
            return BUILTINS[spec]
        if spec == "zeros":
            return zeros()
        if spec == "ones":
            return ones()
        m = _NAME.fullmatch(spec)
        if m:
            return EventuallyPeriodic(tuple(map(int, m[1])), tuple(map(int, m[2])))
        raise ValueError(f"unknown K2 element {spec!r}")
    if isinstance(spec, dict):
        if "builtin" in spec:
            return parse_element(spec["builtin"])
        base = EventuallyPeriodic(tuple(spec.get("head", ())), tuple(spec.get("period", (0,))))
        exceptions = {int(k): int(v) for k, v in (spec.get("exceptions") or {}).items()}
        if not exceptions:
            return base
        head = list(base.prefix(max(len(base.head), max(exceptions) + 1)))
        for pos, val in exceptions.items():
            head[pos] = val
        # keep the periodic tail aligned with the original phase
        shift = len(head) - len(base.head)
        p = len(base.period)
        period = tuple(base.period[(shift + i) % p] for i in range(p))
        return EventuallyPeriodic(tuple(head), period)
    raise ValueError(f"malformed K2 element {spec!r}")
