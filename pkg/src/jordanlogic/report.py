"""Verdicts of sampling-based checks."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

import numpy as np

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"


def jsonable(obj: Any) -> Any:
    """Convert numpy containers and scalars into plain JSON types."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if hasattr(obj, "to_json"):
        return jsonable(obj.to_json())
    return obj


@dataclass
class CheckReport:
    """Outcome of a check.

    ``pass`` means no counterexample was found in ``trials`` samples. A failed
    report carries a ``witness`` holding the seed, trial index and serialized
    inputs, so the failing trial can be replayed.
    """

    property: str
    verdict: str
    trials: int
    worst_residual: float = 0.0
    witness: dict | None = None
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.verdict not in (PASS, FAIL, INCONCLUSIVE):
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if self.verdict == FAIL and not self.witness:
            raise ValueError("a failed check must carry a witness")

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def to_json(self) -> dict:
        return jsonable(
            {
                "property": self.property,
                "verdict": self.verdict,
                "trials": self.trials,
                "worst_residual": float(self.worst_residual),
                "witness": self.witness,
                "details": self.details,
            }
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def combine_verdicts(reports) -> str:
    verdicts = [r.verdict for r in reports]
    if FAIL in verdicts:
        return FAIL
    if INCONCLUSIVE in verdicts or not verdicts:
        return INCONCLUSIVE
    return PASS
