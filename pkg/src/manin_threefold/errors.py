"""Exception types shared across the package.

The CLI maps these onto process exit codes, so keep the hierarchy flat.
"""

from __future__ import annotations


class InvariantError(ValueError):
    """An input violates a documented domain invariant."""


class CostCapExceeded(RuntimeError):
    """A requested computation is larger than the configured cost cap."""


class QuadratureError(RuntimeError):
    """Numerical integration failed to reach the requested tolerance.

    ``partial`` carries the best value obtained before giving up.
    """

    def __init__(self, message: str, partial: float | None = None):
        super().__init__(message)
        self.partial = partial


INT64_MAX = 2**63 - 1


def check_int64(value: int, what: str = "value") -> int:
    """Raise ``OverflowError`` if ``value`` would not fit in a signed 64-bit slot."""
    if abs(value) > INT64_MAX:
        raise OverflowError(f"{what}={value} exceeds the signed 64-bit range")
    return value
