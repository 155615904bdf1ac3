"""Validation reports with concrete witnesses."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class Violation:
    check: str
    message: str
    witness: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {"check": self.check, "message": self.message, "witness": _plain(self.witness)}


@dataclass
class Report:
    """Outcome of a check: a list of violations plus free-form info.

    ``ok`` is true exactly when no violation was recorded.
    """

    subject: str
    violations: list[Violation] = field(default_factory=list)
    info: dict[str, Any] = field(default_factory=dict)
    value: Any = None

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def fail(self, check: str, message: str, **witness: Any) -> None:
        self.violations.append(Violation(check, message, witness))

    def absorb(self, other: Report, prefix: str = "") -> None:
        for v in other.violations:
            name = f"{prefix}{v.check}" if prefix else v.check
            self.violations.append(Violation(name, v.message, dict(v.witness)))

    def first(self, check: str | None = None) -> Violation | None:
        for v in self.violations:
            if check is None or v.check == check or v.check.endswith("." + check):
                return v
        return None

    def to_dict(self) -> dict[str, Any]:
        return {
            "subject": self.subject,
            "ok": self.ok,
            "violations": [v.to_dict() for v in self.violations],
            "info": _plain(self.info),
        }

    def render(self) -> str:
        lines = [f"{self.subject}: {'OK' if self.ok else 'FAILED'}"]
        for key, val in self.info.items():
            lines.append(f"  {key}: {_plain(val)}")
        for v in self.violations:
            lines.append(f"  [{v.check}] {v.message}")
            for key, val in v.witness.items():
                lines.append(f"      {key} = {_plain(val)}")
        return "\n".join(lines)


def _plain(obj: Any) -> Any:
    """Convert numpy scalars, tuples and sets into JSON-friendly values."""
    import numpy as np

    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted((_plain(v) for v in obj), key=str)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, Report):
        return obj.to_dict()
    return obj
