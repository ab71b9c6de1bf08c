"""Exception hierarchy.

Everything raised on purpose by this package derives from ``FlexKnnError``.
``DataError`` marks problems with input data (files, shapes, values) as
opposed to programming or configuration errors; the command line maps it to
exit status 2.
"""


class FlexKnnError(Exception):
    pass


class DataError(FlexKnnError):
    pass


class EmptyDatasetError(DataError):
    pass


class DimensionMismatchError(DataError, ValueError):
    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class NonFiniteValueError(DataError, ValueError):
    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class KExceedsNError(FlexKnnError, ValueError):
    pass


class EmptyNeighborSetError(FlexKnnError, ValueError):
    pass


class NoEstimableClassError(FlexKnnError, ValueError):
    pass


class EmptyTestSetError(DataError):
    pass


class EmptyGridError(FlexKnnError, ValueError):
    pass


class UnknownHeldOutClassError(FlexKnnError, KeyError):
    pass


class AllClassesHeldOutError(FlexKnnError, ValueError):
    pass


class InvalidSpecError(FlexKnnError, ValueError):
    pass


class CsvFormatError(DataError):
    """A dataset file could not be parsed.

    ``line`` is 1-based and counts the header as line 1.
    """

    def __init__(self, message, line=None, column=None, path=None):
        self.line = line
        self.column = column
        self.path = path
        super().__init__(message)

    def __str__(self):
        where = []
        if self.path is not None:
            where.append(str(self.path))
        if self.line is not None:
            where.append(f"line {self.line}")
        if self.column is not None:
            where.append(f"column {self.column}")
        prefix = ":".join(where)
        msg = super().__str__()
        return f"{prefix}: {msg}" if prefix else msg


class MalformedHeaderError(CsvFormatError):
    pass


class RaggedRowError(CsvFormatError):
    pass


class NonNumericFeatureError(CsvFormatError):
    pass


class MissingLabelError(CsvFormatError):
    pass
