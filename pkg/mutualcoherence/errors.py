"""Exceptions raised by the package.

Each exception carries the process exit code used by the command-line front end.
"""
from typing import ClassVar

from .config import DIAGNOSTIC_PREFIX


class CoherenceError(Exception):
    """Base class of all package errors."""

    exit_code: ClassVar[int] = 2

    @property
    def diagnostic(self) -> str:
        """Return the single-line machine-readable diagnostic for this error."""
        message = " ".join(str(self).split())
        return f"{DIAGNOSTIC_PREFIX}:{self.__class__.__name__}: {message}"


# Linear algebra
class NonDiagonalizable(CoherenceError, ArithmeticError):
    """The eigenvector matrix is singular or too ill-conditioned. Perturb the parameters."""


class DimensionTooLarge(CoherenceError, ValueError):
    """A matrix exceeds the supported dimension."""


class DimensionMismatch(CoherenceError, ValueError):
    """Matrix operands have incompatible shapes."""


# Gaussian engine
class UnstableSystem(CoherenceError, ArithmeticError):
    """The drift matrix has an eigenvalue without a positive real part, so no stationary state exists."""


class UnsupportedAnomalousCoupling(CoherenceError, ValueError):
    """A parametric coupling that creates pairs of quanta was requested."""


class NotNormallyOrdered(CoherenceError, ValueError):
    """A daggered field event appears to the right of an undaggered one."""


class TooManyEvents(CoherenceError, ValueError):
    """A correlator has more field events than can be expanded."""


class ZeroDenominator(CoherenceError, ArithmeticError):
    """A normalization occupation vanishes."""


# Detection combinatorics
class InvalidRankPermutation(CoherenceError, ValueError):
    """Detector gate ranks are not a permutation of 1..N+M."""


class TermCountOverflow(CoherenceError, OverflowError):
    """The number of detectors is too large for the amplitude term count."""


class UnsupportedDetectorCount(CoherenceError, ValueError):
    """The plan has more Schrodinger detectors than the exchange combinatorics covers."""


class StringTooLong(CoherenceError, ValueError):
    """A fermionic operator string is too long to contract."""


# Fock oracle
class CutoffTooSmall(CoherenceError, ArithmeticError):
    """The Fock-space truncation holds too much population at its edge."""


class NotConverged(CoherenceError, ArithmeticError):
    """The steady-state propagation did not converge within the allotted time."""


class UnsupportedSpec(CoherenceError, ValueError):
    """The oracle cannot evaluate the given system or correlator."""


# CLI
class ConfigError(CoherenceError, ValueError):
    """The run configuration is invalid."""


class ToleranceExceeded(CoherenceError):
    """Gaussian-engine and oracle values disagree beyond the allowed tolerance."""

    exit_code = 1

    def __init__(self, message: str, report: str = ""):
        super().__init__(message)
        self.report = report  # Comparison table written to the output before the diagnostic.


class OutputError(CoherenceError):
    """An output file could not be written."""

    exit_code = 3
