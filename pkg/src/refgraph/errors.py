"""Exception hierarchy and the diagnostics collector shared by all stages."""

from __future__ import annotations

from collections import Counter


class RefGraphError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(RefGraphError):
    """A config file, profile, or CLI argument is malformed or missing."""


class DiscoveryError(RefGraphError):
    """Source discovery failed: missing root or unreadable directory entry."""


class ParseFailure(RefGraphError):
    """A source file could not be parsed, even with block-level recovery."""

    def __init__(self, path: str, line: int, col: int, message: str) -> None:
        super().__init__(f"{path}:{line}:{col}: {message}")
        self.path = path
        self.line = line
        self.col = col


class CsvFormatError(RefGraphError):
    """An edge CSV row does not follow the interchange schema."""


class SuiteError(RefGraphError):
    """A ground-truth suite manifest is invalid."""


class ComparisonError(RefGraphError):
    """A multi-tool comparison cannot be carried out as configured."""


class FixpointBudgetError(RefGraphError):
    """Propagation failed to converge within the iteration budget.

    Monotone set-union propagation always converges, so hitting this
    indicates a bug (or an absurdly small budget), not a property of the
    analyzed program.
    """


class CyclicHierarchyError(RefGraphError):
    """Class hierarchy contains an inheritance cycle."""


class InconsistentHierarchyError(RefGraphError):
    """C3 merge failed: no valid linearization exists."""

    def __init__(self, cls: str, candidates: tuple[str, ...]) -> None:
        super().__init__(
            f"cannot linearize {cls}: conflicting precedence among "
            f"{', '.join(candidates)}"
        )
        self.cls = cls
        self.candidates = candidates


class Diagnostics:
    """Accumulates non-fatal warnings and counters during a pipeline run."""

    def __init__(self) -> None:
        self.messages: list[str] = []
        self.counters: Counter[str] = Counter()

    def warn(self, message: str, counter: str | None = None) -> None:
        self.messages.append(message)
        if counter is not None:
            self.counters[counter] += 1

    def count(self, counter: str, n: int = 1) -> None:
        self.counters[counter] += n

    def __bool__(self) -> bool:
        return bool(self.messages) or bool(self.counters)
