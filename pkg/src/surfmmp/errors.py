"""Exception hierarchy shared across the package.

Two failure families matter to callers: bad input (rejected arguments,
malformed documents, refused operations) and internal contradictions
(a verified hypothesis led to a conclusion the theory forbids, which
means a bug or an inconsistent model). The CLI maps the former to exit
code 2 and the latter to exit code 3.
"""

from __future__ import annotations


class SurfmmpError(Exception):
    """Base class for all package errors."""


class InputError(SurfmmpError):
    """Invalid argument, malformed structure or unmet precondition."""


class ParseError(InputError):
    """Document rejected while parsing; carries a field path."""

    def __init__(self, message: str, path: str = "") -> None:
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class ContractionRefused(InputError):
    """Requested contraction violates its numerical preconditions."""


class BasisInsufficiency(InputError):
    """Declared divisor basis cannot separate the given curve classes."""


class InvariantViolation(SurfmmpError):
    """A certified hypothesis produced a forbidden conclusion."""
