"""Uniform carrier for inequality checks."""

from __future__ import annotations

from dataclasses import dataclass

REPORT_TOL = 1e-12


@dataclass(frozen=True)
class BoundReport:
    """Outcome of checking ``lhs <= rhs`` (with a fixed additive tolerance)."""

    lhs: float
    rhs: float
    context: str = ""

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs + REPORT_TOL

    def as_dict(self) -> dict:
        return {
            "lhs": self.lhs,
            "rhs": self.rhs,
            "holds": self.holds,
            "context": self.context,
        }
