"""Structured pass/fail results for identity checks."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class CheckReport:
    """Outcome of one identity check.

    `residual` holds the canonical text of the nonzero difference when the
    check fails, so a failure is reproducible evidence rather than a bare
    boolean.  `witnesses` optionally records sample points (for point-based
    oracles).
    """

    name: str
    passed: bool
    residual: str | None = None
    witnesses: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.passed and self.residual is not None:
            raise ValueError("a passing check cannot carry a residual")

    def __bool__(self) -> bool:
        return self.passed


def passed(name: str) -> CheckReport:
    return CheckReport(name, True)


def failed(name: str, residual: str, witnesses: tuple = ()) -> CheckReport:
    return CheckReport(name, False, residual, witnesses)


def all_passed(reports) -> bool:
    return all(r.passed for r in reports)
