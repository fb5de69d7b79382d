"""Exception hierarchy.

Structural problems with input files raise :class:`CorpusError` (CLI exit 1);
computations that are undefined on the data raise :class:`ComputationError`
(CLI exit 3). Missing files surface as the builtin ``FileNotFoundError``.
"""


class TsRatioError(Exception):
    pass


class CorpusError(TsRatioError, ValueError):
    """Malformed or inconsistent input data."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)


class DuplicateKeyError(CorpusError):
    pass


class UnknownReferenceError(CorpusError):
    pass


class ComputationError(TsRatioError, ValueError):
    """A statistic or score is undefined for the given data."""


class NotActiveError(ComputationError):
    pass


class MissingBaselineError(ComputationError):
    pass
