"""Uniform pass/fail record shared by the exact and numeric checks."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class CheckReport:
    name: str
    passed: bool
    details: dict = field(default_factory=dict)
    failures: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"name": self.name, "status": "pass" if self.passed else "fail", **self.details,
                "failures": self.failures}
