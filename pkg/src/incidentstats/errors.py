"""Exception hierarchy shared by the pipeline stages."""


class IncidentStatsError(Exception):
    """Base class for all package errors."""


class SchemaError(IncidentStatsError):
    """A CSV table is missing a mandatory column."""


class DataError(IncidentStatsError):
    """Input data cannot support the requested computation."""


class FormulaError(IncidentStatsError):
    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class RankDeficientError(DataError):
    def __init__(self, columns):
        self.columns = list(columns)
        super().__init__("design matrix is rank deficient; collinear columns: "
                         + ", ".join(self.columns))


class ConvergenceError(IncidentStatsError):
    """An iterative fitter failed to converge; `best` holds the last iterate."""

    def __init__(self, message, best=None):
        self.best = best
        super().__init__(message)
