"""Exception hierarchy and the divergence sentinel shared by every module."""

from __future__ import annotations

DIVERGENCE_SENTINEL = 1e308


class NevlabError(Exception):
    """Base class for library errors."""


class DomainError(NevlabError, ValueError):
    """Evaluation point outside the open upper half-plane."""


class SingularityError(NevlabError, ZeroDivisionError):
    """A Moebius denominator (or similar) vanished."""


class NumericError(NevlabError, ArithmeticError):
    """Numerical procedure failed to converge; carries the partial estimate."""

    def __init__(self, message: str, partial: float | None = None, error: float | None = None):
        super().__init__(message)
        self.partial = partial
        self.error = error


class PreconditionError(NevlabError, ValueError):
    """A hypothesis required by a verdict does not hold.

    ``hypothesis`` names the violated condition, e.g. ``"lambda is O(t)"``.
    """

    def __init__(self, message: str, hypothesis: str | None = None):
        super().__init__(message)
        self.hypothesis = hypothesis


class UnsupportedError(NevlabError, NotImplementedError):
    """The requested operation has no constructive implementation for this input."""


class ClassificationError(NevlabError, ValueError):
    """The spectral class of a boundary point does not meet an operation's precondition."""


class DivergentValue(float):
    """Float-valued divergence marker (``+-1e308``) that remembers why it diverged.

    Sweeps keep going past divergent points; callers test with :func:`is_divergent`.
    """

    reason: str

    def __new__(cls, sign: float = 1.0, reason: str = ""):
        obj = super().__new__(cls, DIVERGENCE_SENTINEL if sign >= 0 else -DIVERGENCE_SENTINEL)
        obj.reason = reason
        return obj

    def __repr__(self) -> str:
        sign = "+" if self > 0 else "-"
        return f"DivergentValue({sign}, {self.reason!r})"

    def __reduce__(self):
        return (DivergentValue, (1.0 if self > 0 else -1.0, self.reason))


def is_divergent(x) -> bool:
    try:
        return abs(float(x)) >= DIVERGENCE_SENTINEL
    except (TypeError, ValueError):
        return False
