"""Step budgets and three-valued evaluation outcomes.

Every application in this package runs against a :class:`Budget`.  Work is
charged one unit at a time; running past the limit raises :class:`OutOfFuel`.
A model that can *prove* an application undefined raises :class:`Diverged`.
Public entry points convert both signals into an :data:`EvalOutcome`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Union


class OutOfFuel(Exception):
    """Raised when a budget runs dry."""


class Diverged(Exception):
    """Raised when an application is provably undefined."""

    def __init__(self, reason: str = "diverge"):
        super().__init__(reason)
        self.reason = reason


class Budget:
    __slots__ = ("limit", "spent")

    def __init__(self, limit: int):
        if limit < 0:
            raise ValueError("fuel must be non-negative")
        self.limit = limit
        self.spent = 0

    def charge(self, n: int = 1) -> None:
        self.spent += n
        if self.spent > self.limit:
            self.spent = self.limit
            raise OutOfFuel()

    @property
    def remaining(self) -> int:
        return self.limit - self.spent

    def __repr__(self):
        return f"Budget({self.spent}/{self.limit})"


@dataclass(frozen=True)
class Defined:
    value: Any

    kind = "defined"


@dataclass(frozen=True)
class ProvenDivergent:
    reason: str = "diverge"

    kind = "divergent"


@dataclass(frozen=True)
class FuelExhausted:
    spent: int

    kind = "exhausted"


EvalOutcome = Union[Defined, ProvenDivergent, FuelExhausted]


def run_budgeted(fn: Callable[[Budget], Any], fuel: int) -> EvalOutcome:
    """Run ``fn(budget)`` and fold its signals into an outcome."""
    budget = Budget(fuel)
    try:
        return Defined(fn(budget))
    except Diverged as exc:
        return ProvenDivergent(exc.reason)
    except OutOfFuel:
        return FuelExhausted(budget.limit)


def same_outcome(x: EvalOutcome, y: EvalOutcome, eq=None) -> bool:
    """Kleene equality on settled outcomes.

    Both divergent, or both defined with equal values.  Anything involving
    an exhausted budget is *not* settled and compares False.
    """
    if isinstance(x, Defined) and isinstance(y, Defined):
        return eq(x.value, y.value) if eq else x.value == y.value
    return isinstance(x, ProvenDivergent) and isinstance(y, ProvenDivergent)


def outcome_json(outcome: EvalOutcome, describe=repr) -> dict:
    if isinstance(outcome, Defined):
        return {"outcome": "defined", "value": describe(outcome.value)}
    if isinstance(outcome, ProvenDivergent):
        return {"outcome": "divergent", "reason": outcome.reason}
    return {"outcome": "exhausted", "spent": outcome.spent}
