"""Exception types raised across the toolkit.

Every error derives from :class:`FairboundError` so callers (and the CLI)
can catch the whole family in one place.
"""


class FairboundError(Exception):
    """Base class for all toolkit errors."""


class DataError(FairboundError):
    """Malformed or unusable input data."""


class MissingColumn(DataError):
    def __init__(self, name):
        super().__init__(f"MissingColumn({name!r})")
        self.name = name


class BadLabel(DataError):
    def __init__(self, row, value):
        super().__init__(f"BadLabel(row={row}, value={value!r})")
        self.row = row
        self.value = value


class RaggedRow(DataError):
    def __init__(self, row):
        super().__init__(f"RaggedRow(row={row})")
        self.row = row


class NonFiniteValue(DataError):
    def __init__(self, row, column):
        super().__init__(f"NonFiniteValue(row={row}, column={column!r})")
        self.row = row
        self.column = column


class BadScore(DataError):
    def __init__(self, row, value):
        super().__init__(f"BadScore(row={row}, value={value!r}): score must lie in [0, 1]")
        self.row = row
        self.value = value


class EmptyFile(DataError):
    def __init__(self, path=""):
        super().__init__(f"EmptyFile({path})" if path else "EmptyFile")


class UnknownGroup(DataError):
    def __init__(self, group):
        super().__init__(f"UnknownGroup({group!r})")
        self.group = group


class EmptyGroup(DataError):
    def __init__(self, group):
        super().__init__(f"EmptyGroup({group!r})")
        self.group = group


class EmptySlice(DataError):
    pass


class DegenerateSlice(DataError):
    """AUC requested on a slice holding a single class."""


class MissingScore(DataError):
    def __init__(self, row):
        super().__init__(f"MissingScore(row={row})")
        self.row = row


class NoFeatures(DataError):
    pass


class FewerThanTwoGroups(DataError):
    pass


class DimensionMismatch(FairboundError):
    pass


class NonPSDCovariance(FairboundError):
    pass


class MissingConditional(FairboundError):
    def __init__(self, group, sign):
        super().__init__(f"MissingConditional(group={group!r}, sign={sign!r})")
        self.group = group
        self.sign = sign


class BadM(FairboundError):
    pass


class OutOfRange(FairboundError):
    pass


class InvalidParams(FairboundError):
    def __init__(self, field, message=""):
        text = f"InvalidParams({field})"
        if message:
            text += f": {message}"
        super().__init__(text)
        self.field = field


class SampleTooSmall(InvalidParams):
    def __init__(self, m, d_vc):
        super().__init__("m", f"SampleTooSmall: m={m} < d_vc={d_vc}")


class SingleClass(DataError):
    pass


class NonConvergent(FairboundError):
    pass


class EmptyClass(FairboundError):
    pass


class NonPSD(FairboundError):
    """A generator covariance is not positive semi-definite."""


class BadWeights(FairboundError):
    pass


class DegenerateExcess(FairboundError):
    """Every excess-risk observation is zero; no rate can be fitted."""
