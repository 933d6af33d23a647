"""Exception hierarchy shared across the toolkit.

Every error raised on a bad input or a bad state derives from
:class:`HvacFddError`; callers (CLI, HTTP API) map subclasses onto exit
codes / HTTP statuses without string matching.
"""


class HvacFddError(Exception):
    """Base class for all toolkit errors."""


class DataError(HvacFddError):
    """Invalid data or configuration supplied by the caller."""


class InternalError(HvacFddError):
    """Invariant violation inside the toolkit (a bug, not a user error)."""


# dataset_io
class UnknownChannel(DataError):
    pass


class NonMonotonicTimestamps(DataError):
    pass


class EmptyFile(DataError):
    pass


class IrregularCadence(DataError):
    pass


class IoFailure(DataError):
    pass


# preprocessing
class MissingChannel(DataError):
    pass


class TooFewRows(DataError):
    pass


class AllColumnsDegenerate(DataError):
    pass


# pca
class NumericalFailure(InternalError):
    pass


class InvalidK(DataError):
    pass


class SchemaMismatch(DataError):
    pass


# optics
class EmptyInput(DataError):
    pass


class MissingValues(DataError):
    pass


class KTooLarge(DataError):
    pass


class CurveTooShort(DataError):
    pass


class NonPositiveThreshold(DataError):
    pass


# evaluation
class AllNoise(DataError):
    """No non-noise cluster exists, so no cluster can be called normal."""


class DegenerateLabels(DataError):
    pass


class LengthMismatch(DataError):
    pass


class EmptyCounts(DataError):
    pass


# pipeline / store
class UnknownRun(DataError):
    pass


class RunNotReady(DataError):
    """Requested a result artifact from a run that has not produced it yet."""


class InvalidConfig(DataError):
    pass
