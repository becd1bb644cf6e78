"""Exception types raised by the constructions.

Every certificate or invariant failure derives from :class:`ConstructionError`
and carries the offending exact value in ``value`` so that callers (and the
CLI) can print a counterexample.
"""

from __future__ import annotations


class ConstructionError(Exception):
    def __init__(self, message: str, value=None):
        super().__init__(message)
        self.value = value


class CertificateViolation(ConstructionError):
    """A supplied certificate (coverage, divergence, modulus, ...) is false."""


class InjectivityError(CertificateViolation):
    pass


class ModulusViolation(CertificateViolation):
    pass


class SeparationViolation(CertificateViolation):
    pass


class PseudoboundednessViolation(CertificateViolation):
    pass


class TailViolation(CertificateViolation):
    pass


class MembershipViolation(CertificateViolation):
    pass


class NotFound(ConstructionError):
    pass


class BracketingError(ValueError):
    """Index map is not a valid bracketing (f(1) != 1 or not increasing)."""


class OverlapError(ValueError):
    pass


class BudgetExceeded(ConstructionError):
    """A lazy construction needed more positions than its configured budget."""
