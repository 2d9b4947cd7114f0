"""Outcome records for series comparisons."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

SCHEMA_VERSION = 1


def format_exponent(e: Fraction) -> str:
    return f"{e.numerator}/{e.denominator}"


@dataclass(frozen=True)
class Mismatch:
    exponent: Fraction
    lhs: int
    rhs: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "exponent": format_exponent(self.exponent),
            "lhs": str(self.lhs),
            "rhs": str(self.rhs),
        }


@dataclass(frozen=True)
class VerificationReport:
    """Result of checking two series (or two count tables) up to ``order``.

    ``passed`` is False exactly when ``mismatch`` is set.
    """

    order: Fraction
    passed: bool
    mismatch: Mismatch | None = None
    name: str = ""
    params: dict[str, int] = field(default_factory=dict)
    elapsed_ms: float = 0.0
    note: str = ""

    def __post_init__(self) -> None:
        if self.passed == (self.mismatch is not None):
            raise ValueError("a report fails exactly when it carries a mismatch")

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self, timing: bool = True) -> dict[str, Any]:
        out: dict[str, Any] = {
            "schema": SCHEMA_VERSION,
            "name": self.name,
            "params": dict(sorted(self.params.items())),
            "order": format_exponent(Fraction(self.order)),
            "status": self.status,
            "mismatch": self.mismatch.to_dict() if self.mismatch else None,
        }
        if self.note:
            out["note"] = self.note
        if timing:
            out["elapsed_ms"] = round(self.elapsed_ms, 3)
        return out

    def summary(self, timing: bool = True) -> str:
        params = ",".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        head = f"{self.status.upper():4} {self.name}"
        if params:
            head += f"({params})"
        head += f" order={format_exponent(Fraction(self.order))}"
        if self.mismatch:
            m = self.mismatch
            head += (
                f" first mismatch at q^{format_exponent(m.exponent)}:"
                f" lhs={m.lhs} rhs={m.rhs}"
            )
        if self.note:
            head += f" [{self.note}]"
        if timing:
            head += f" ({self.elapsed_ms:.1f} ms)"
        return head
