"""Exception types shared across the pipeline.

Every error raised on purpose by this package derives from PipelineError so
callers can catch one base class at process boundaries.  The concrete types
map onto distinct failure situations: bad input data, missing prerequisite
artifacts, network trouble, and numeric misuse.
"""


class PipelineError(Exception):
    """Base class for all package-specific errors."""


class MalformedRecord(PipelineError):
    """An input line or record could not be parsed into the expected shape."""


class DuplicateId(PipelineError):
    """Two records in one corpus share the same id."""


class UnknownLabel(PipelineError):
    """A leaning label string is not one of the recognised values."""


class UnknownParty(PipelineError):
    """A debate speech names a party outside the recognised set."""


class TooFewDomains(PipelineError):
    """The corpus has too few distinct outlet domains to build a media split."""


class EmptyCorpus(PipelineError):
    """An operation requires at least one article but the corpus is empty."""


class EmptyTestSet(PipelineError):
    """Evaluation was asked to score an empty collection of articles."""


class CacheMiss(PipelineError):
    """A knowledge-cache lookup found no entry for the requested key."""


class NetworkError(PipelineError):
    """A remote request failed after the configured number of retries."""


class PageGone(PipelineError):
    """A remote page existed at mapping time but is no longer retrievable."""


class ResourceMissing(PipelineError):
    """A prerequisite artifact (cache, embedding file, checkpoint) is absent."""

    def __init__(self, message: str, remedy: str | None = None):
        super().__init__(message)
        self.remedy = remedy


class NonFiniteLoss(PipelineError):
    """Training produced a NaN or infinite loss value."""


class DimensionMismatch(PipelineError):
    """A vector or matrix does not have the expected dimensionality."""


class BetaOutOfRange(PipelineError):
    """The knowledge trade-off weight lies outside the closed interval [0, 1]."""


class BackboneLoadError(PipelineError):
    """A pretrained text backbone could not be loaded."""
