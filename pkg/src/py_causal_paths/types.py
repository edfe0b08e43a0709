import time
import typing
from typing import Optional, Type, List, Any

import attr


class CausalPathsError(Exception):
    exit_code: int = 2


class UsageError(CausalPathsError):
    exit_code = 1


class DataError(CausalPathsError):
    exit_code = 2


class ParseError(DataError):
    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class ValidationError(DataError):
    pass


class OrderViolationError(DataError):
    def __init__(self, index: int, timestamp: int, previous: int):
        self.index = index
        self.timestamp = timestamp
        self.previous = previous
        super().__init__(
            f"link {index} has timestamp {timestamp} after a link with timestamp {previous}; "
            f"input must be chronologically ordered"
        )


class LoadError(DataError):
    pass


class ConfigurationError(DataError):
    pass


class UnknownFieldType(ConfigurationError):
    pass


class NonConvergenceError(DataError):
    def __init__(self, iterations: int, last_estimate: float):
        self.iterations = iterations
        self.last_estimate = last_estimate
        super().__init__(f"power iteration did not converge after {iterations} iterations (last estimate {last_estimate!r})")


class InsufficientPointsError(DataError):
    pass


class EnumerationCapExceeded(CausalPathsError):
    exit_code = 3

    def __init__(self, what: str, cap: int):
        self.cap = cap
        super().__init__(f"refusing to enumerate more than {cap} {what}")


class CountOverflowError(CausalPathsError):
    exit_code = 4


class BudgetExceeded(CausalPathsError):
    def __init__(self, budget: float):
        self.budget = budget
        super().__init__(f"time budget of {budget:.3f}s exceeded")


@attr.s
class Deadline:
    """Wall-clock budget shared by the long-running counters; None means unbounded."""
    budget: Optional[float] = attr.ib(default=None)
    _end: Optional[float] = attr.ib(default=None, init=False)

    def __attrs_post_init__(self):
        if self.budget is not None:
            self._end = time.perf_counter() + self.budget

    def check(self) -> None:
        if self._end is not None and time.perf_counter() > self._end:
            raise BudgetExceeded(self.budget)  # type: ignore[arg-type]


@attr.s
class FieldDefinition:
    name: str = attr.ib()
    type: Type = attr.ib()
    origin: Optional[Type] = attr.ib()
    args: Optional[List[Type]] = attr.ib()
    default_value: Optional[Any] = attr.ib(default=None)

    @classmethod
    def create(cls, name: str, field_type: typing.Type, default_value: Optional[Any] = None) -> "FieldDefinition":
        return cls(
            name=name,
            type=field_type,
            origin=getattr(field_type, "__origin__", None),
            args=getattr(field_type, "__args__", []),
            default_value=default_value
        )
