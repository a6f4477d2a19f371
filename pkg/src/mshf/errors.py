"""Exception types shared across the fitting pipeline."""


class MshfError(Exception):
    """Base class for all errors raised by this package."""


class DegenerateSubset(MshfError):
    """A minimal subset cannot determine a model (rank-deficient system)."""


class InsufficientData(MshfError):
    """Fewer observations than the minimal subset size."""


class TooManyDegenerate(MshfError):
    """More than half of the sampled minimal subsets were degenerate."""


class DivergedScale(MshfError):
    """The scale iteration's inlier count fell to K or below."""


class EmptyHypergraph(MshfError):
    """Every hypothesis was dropped during hypergraph construction."""


class LengthMismatch(MshfError):
    """Label sequences of unequal length."""


class UnknownTemplate(MshfError):
    """Unrecognized synthetic scene template name."""


class FileFormatError(MshfError):
    """A data, config or result file could not be parsed."""


class PipelineStageError(MshfError):
    """Failure wrapped with the name of the pipeline stage that raised it."""

    def __init__(self, stage, cause):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
