"""Exception hierarchy shared across the pipeline.

Everything raised on bad input derives from DataError so the CLI can map it
to a single exit code.
"""


class EmokinError(Exception):
    pass


class DataError(EmokinError):
    """Invalid or inconsistent input data."""


class ParseError(DataError):
    """A file could not be parsed (message carries the line number)."""


class SchemaError(DataError):
    """A parsed record is missing or violates a required field."""


class DegenerateFrame(DataError):
    """A frame with coincident shoulders, unusable for normalization."""


class TooShort(DataError):
    """Clip or segment has too few frames for the requested operation."""


class NotUniform(DataError):
    """Operation requires a uniformly resampled clip."""


class InvalidSpec(DataError):
    """Bad parameter combination in a config object."""


class EmptyDataset(DataError):
    pass


class EmptyClass(DataError):
    pass


class SingleSubject(DataError):
    pass


class UnknownFeature(DataError):
    pass


class IncompleteFeatureSet(DataError):
    pass


class SingleClassInput(DataError):
    pass


class NonFinite(DataError):
    pass


class InsufficientClassData(DataError):
    pass


class VersionMismatch(DataError):
    pass


class DimensionMismatch(DataError):
    pass
