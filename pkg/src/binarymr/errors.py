"""Exception types raised across the toolkit.

Errors fall into three groups, which the command-line interface maps to
exit codes: data problems (malformed or unusable input), estimation
problems (the numbers make the requested computation impossible), and
misuse of an operation's contract.
"""

from __future__ import annotations


class BinaryMRError(Exception):
    """Base class for all errors raised by this package."""


class DataError(BinaryMRError):
    """Input data are malformed, inconsistent, or unusable."""


class ParseError(DataError):
    """A summary-statistics file could not be parsed.

    Carries the 1-based line number where parsing failed.
    """

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class EmptyDataset(DataError):
    """A dataset contains no variants."""


class DuplicateVariantId(DataError):
    """The same variant identifier appears more than once."""


class TooFewVariants(DataError):
    """The dataset has fewer variants than the estimator requires."""


class EmptyStratum(DataError):
    """An instrument stratum contains no observations."""


class EmptyInstrumentGroup(DataError):
    """One of the instrument groups is empty in individual-level data."""


class EstimationError(BinaryMRError):
    """The requested estimate cannot be computed from these values."""


class ZeroExposureAssociation(EstimationError):
    """A variant-exposure association is exactly zero, so no ratio exists."""


class DegenerateDesign(EstimationError):
    """The regression design is collinear (no slope is identifiable)."""


class NoGeneticVariation(EstimationError):
    """The instrument takes a single value in the sample."""


class NoFirstStage(EstimationError):
    """The instrument-exposure regression slope is exactly zero."""


class NoCompliers(EstimationError):
    """No individual in the ledger is a complier."""


class WrongScale(BinaryMRError):
    """An estimate was combined with an incompatible exposure scale."""


class PreconditionViolated(BinaryMRError):
    """An operation was invoked outside its stated precondition."""


class WeakInstrumentWarning(UserWarning):
    """Instrument-exposure association is weak (|beta| / se below 2).

    Reporting aid only; estimates are never altered.
    """
