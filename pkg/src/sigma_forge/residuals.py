"""Residual reports for symbolic identity suites."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class ResidualEntry:
    identity: str
    component: str
    expression: str
    zero: bool

    def to_json(self) -> dict:
        return {
            "identity": self.identity,
            "component": self.component,
            "expression": self.expression,
            "zero": self.zero,
        }


@dataclass(frozen=True)
class ResidualReport:
    name: str
    entries: tuple[ResidualEntry, ...]

    @property
    def all_zero(self) -> bool:
        return all(e.zero for e in self.entries)

    def failures(self) -> tuple[ResidualEntry, ...]:
        return tuple(e for e in self.entries if not e.zero)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "all_zero": self.all_zero,
            "entries": [e.to_json() for e in self.entries],
        }
