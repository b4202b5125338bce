"""Uniform pass/fail reporting for all checkers.

A failing report always carries a witness; a passing one never does.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class CheckReport:
    name: str
    ok: bool
    witness: dict[str, Any] | None = None
    details: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not self.ok and self.witness is None:
            raise ValueError("failing report requires a witness")
        if self.ok and self.witness is not None:
            raise ValueError("passing report must not carry a witness")

    def __bool__(self) -> bool:
        return self.ok


def passed(name: str, **details: Any) -> CheckReport:
    return CheckReport(name, True, None, dict(details))


def failed(name: str, witness: dict[str, Any], **details: Any) -> CheckReport:
    return CheckReport(name, False, witness, dict(details))
