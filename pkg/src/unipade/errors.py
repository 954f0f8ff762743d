"""Exception hierarchy shared by every module."""

from __future__ import annotations


class UnipadeError(Exception):
    """Base class for all library errors."""


class PoleAtPoint(UnipadeError):
    """A rational function was evaluated at (or numerically at) a pole."""


class TruncationExceeded(UnipadeError):
    """A coefficient beyond the stored window of a series was requested."""


class NotInDpq(UnipadeError):
    """The Hankel test failed: no unique Pade approximant of this order."""

    def __init__(self, message: str, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics


class OrderTooLarge(UnipadeError):
    pass


class EmptyShape(UnipadeError):
    pass


class PoleOnSet(UnipadeError):
    """A function evaluated over a compact set hit a pole on the grid."""


class OrderViolation(UnipadeError):
    """The (p, q) order does not satisfy the constructor's inequalities."""


class HypothesisViolation(UnipadeError):
    """An analytic hypothesis of a constructor is not met by its inputs."""


class SearchExhausted(UnipadeError):
    pass


class DegenerateInterpolation(UnipadeError):
    pass


class NoSafeD(UnipadeError):
    pass


class DegreeCapExceeded(UnipadeError):
    pass


class TaskInfeasible(UnipadeError):
    def __init__(self, message: str, task_index: int | None = None):
        super().__init__(message)
        self.task_index = task_index


class ScheduleIncompatible(UnipadeError):
    pass


class CorruptTranscript(UnipadeError):
    pass
