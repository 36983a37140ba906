"""Exception hierarchy shared across the package."""

from __future__ import annotations


class ClockDistillError(Exception):
    """Base class for all package errors."""


class RecordInvalid(ClockDistillError):
    """A record failed validation; ``violations`` lists every broken invariant."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(f"{v.path}: {v.kind} ({v.message})" for v in self.violations)
        super().__init__(lines or "invalid record")

    @property
    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}


class ProfileError(ClockDistillError, ValueError):
    pass


class NonPositiveDimension(ClockDistillError, ValueError):
    pass


class NonPositiveScale(ClockDistillError, ValueError):
    pass


class NoQuarterCandidate(ClockDistillError, LookupError):
    pass


class NoTimeCandidate(ClockDistillError, LookupError):
    pass


class EmptyInput(ClockDistillError, ValueError):
    pass


class EmptyEvalSet(ClockDistillError, ValueError):
    pass


class DegenerateHistogram(ClockDistillError, ValueError):
    pass


class SchemaError(ClockDistillError):
    """Malformed input line. ``line`` is 1-based, ``path`` a dotted field path."""

    def __init__(self, message: str, line: int | None = None, path: str = ""):
        self.line = line
        self.path = path
        where = []
        if line is not None:
            where.append(f"line {line}")
        if path:
            where.append(path)
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class InfeasibleConfiguration(ClockDistillError):
    pass
