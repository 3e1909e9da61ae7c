class NumericalError(RuntimeError):
    """A computation could not produce a meaningful number."""


class DegenerateLikelihoodError(NumericalError):
    pass


class DegenerateInformationError(NumericalError):
    pass


class NonConvergenceError(NumericalError):
    pass


class FormatError(ValueError):
    """Malformed input file. Carries the 1-based line and column."""

    def __init__(self, message, path=None, line=None, column=None):
        self.path = path
        self.line = line
        self.column = column
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        prefix = ":".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)
