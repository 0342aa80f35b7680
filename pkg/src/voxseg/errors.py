"""Exception types raised across the package.

Every error carries enough context in its message to be reported
machine-readably (the CLI serializes ``type`` + ``message`` to stderr).
"""


class VoxsegError(Exception):
    """Base class for all errors raised by this package."""


# --- NRRD parsing / writing ---------------------------------------------


class NrrdError(VoxsegError):
    pass


class BadMagic(NrrdError):
    pass


class MissingField(NrrdError):
    def __init__(self, field: str):
        super().__init__(f"missing required header field: {field}")
        self.field = field


class UnsupportedValue(NrrdError):
    def __init__(self, field: str, value: str):
        super().__init__(f"unsupported value for {field!r}: {value!r}")
        self.field = field
        self.value = value


class PayloadLengthMismatch(NrrdError):
    def __init__(self, expected: int, actual: int):
        super().__init__(f"payload length {actual} != expected {expected} bytes")
        self.expected = expected
        self.actual = actual


# --- grids and slicing ---------------------------------------------------


class IndexOutOfRange(VoxsegError):
    pass


class NonPositiveWindow(VoxsegError):
    pass


# --- seeds / automaton ----------------------------------------------------


class OutOfRange(VoxsegError):
    pass


class ConflictingSeed(VoxsegError):
    def __init__(self, coordinate):
        super().__init__(f"voxel {tuple(coordinate)} painted with both labels")
        self.coordinate = tuple(coordinate)


class EmptyForeground(VoxsegError):
    pass


# --- contour rasterization ------------------------------------------------


class DegeneratePolygon(VoxsegError):
    pass


# --- mask metrics ----------------------------------------------------------


class DimsMismatch(VoxsegError):
    pass


class BothEmpty(VoxsegError):
    pass


class EmptyMask(VoxsegError):
    pass


# --- statistics -------------------------------------------------------------


class TooFewValues(VoxsegError):
    pass


class LengthMismatch(VoxsegError):
    pass


class ZeroVariance(VoxsegError):
    pass


class DegenerateX(VoxsegError):
    pass


class Empty(VoxsegError):
    pass


# --- batch pipeline ---------------------------------------------------------


class TooFewCases(VoxsegError):
    pass


class CaseError(VoxsegError):
    """A case failed inside a batch run; wraps the underlying error."""

    def __init__(self, case_id: str, cause: Exception):
        super().__init__(f"case {case_id!r} failed: {cause}")
        self.case_id = case_id
        self.cause = cause
