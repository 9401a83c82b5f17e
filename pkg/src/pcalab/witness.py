"""Replayable refutation records.

A refuter never argues that a candidate *cannot* exist; it takes the
candidate it was handed and returns the concrete computations showing it is
wrong.  Each recorded step keeps a closure that redoes the computation, so
:meth:`Witness.replay` can check the record against a fresh evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List

from .fuel import EvalOutcome, outcome_json

KINDS = (
    "halting-decider",
    "separator",
    "total-extension",
    "precomplete-1-1",
    "continuous-decider",
    "s-candidate",
    "invalid-candidate",
)


@dataclass
class Step:
    label: str
    fuel: int
    outcome: Any
    redo: Callable[[], Any] = field(repr=False, compare=False)


@dataclass
class Witness:
    kind: str
    clause: str = ""
    elements: Dict[str, Any] = field(default_factory=dict)
    steps: List[Step] = field(default_factory=list)
    notes: Dict[str, Any] = field(default_factory=dict)
    conclusive: bool = True

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown witness kind {self.kind!r}")

    def record(self, label: str, fuel: int, redo: Callable[[], Any]):
        out = redo()
        self.steps.append(Step(label, fuel, out, redo))
        return out

    def replay(self) -> bool:
        return all(step.redo() == step.outcome for step in self.steps)

    def to_json(self, describe=repr) -> dict:
        def enc(v):
            if is_outcome(v):
                return outcome_json(v, describe)
            if v is None or isinstance(v, (bool, str)):
                return v
            if isinstance(v, (tuple, list)):
                return [enc(x) for x in v]
            if isinstance(v, dict):
                return {str(k): enc(x) for k, x in v.items()}
            return describe(v)

        return {
            "kind": self.kind,
            "clause": self.clause,
            "conclusive": self.conclusive,
            "elements": {k: enc(v) for k, v in self.elements.items()},
            "transcript": [
                {"label": s.label, "fuel": s.fuel, "result": enc(s.outcome)} for s in self.steps
            ],
            "notes": {k: enc(v) for k, v in self.notes.items()},
        }


def is_outcome(v) -> bool:
    return isinstance(v, EvalOutcome.__args__)
