"""Uniform pass/fail reporting for the verification suites."""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass(frozen=True)
class ReportItem:
    check: str
    instance: str
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "instance": self.instance,
            "pass": self.passed,
            "detail": self.detail,
        }


@dataclass
class Report:
    items: list[ReportItem] = field(default_factory=list)

    def add(self, check: str, instance: str, passed: bool, detail: str = "") -> None:
        self.items.append(ReportItem(check, instance, bool(passed), detail))

    def extend(self, other: "Report") -> None:
        self.items.extend(other.items)

    @property
    def ok(self) -> bool:
        return all(item.passed for item in self.items)

    def failures(self) -> list[ReportItem]:
        return [item for item in self.items if not item.passed]

    def to_json(self) -> str:
        return json.dumps([item.to_dict() for item in self.items], indent=2)

    def summary(self) -> str:
        bad = len(self.failures())
        return f"{len(self.items) - bad}/{len(self.items)} checks passed"
