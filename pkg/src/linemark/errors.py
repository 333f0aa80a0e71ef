"""Exception hierarchy shared across the package.

Everything raised on bad user input derives from ``LinemarkError`` so the
CLI can map it to a validation exit code; anything else is treated as a
runtime failure.
"""


class LinemarkError(Exception):
    """Base class for errors caused by invalid input or configuration."""


class MissingDirectoryError(LinemarkError):
    """The requested frame directory does not exist."""


class NoFramesError(LinemarkError):
    """A frame directory contains no files matching the naming convention."""


class SequenceLayoutError(LinemarkError):
    """Frame indices are not contiguous from zero."""


class DimensionMismatchError(LinemarkError):
    """Frames within one sequence disagree on width/height."""


class FrameDecodeError(LinemarkError):
    """An image file exists but cannot be decoded."""


class RoiValidationError(LinemarkError):
    """A region of interest violates its invariants."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class SingularHomographyError(LinemarkError):
    """The four point correspondences do not determine a projective map."""


class PointAtInfinityError(LinemarkError):
    """A projective mapping sent the point to infinity (vanishing denominator)."""


class OutlineError(LinemarkError):
    """A contour outline polygon is degenerate or out of bounds."""


class StageError(LinemarkError):
    """A pipeline stage failed; carries the stage name for diagnostics."""

    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage '{stage}' failed: {cause}")
