"""Exception types shared across the package."""


class SingularMatrixError(ValueError):
    """A covariance or second-moment matrix failed the eigenvalue floor.

    Raised instead of silently regularizing: a singular instrument moment
    matrix is a data problem (collinear instruments, degenerate errors) that
    the caller has to resolve.
    """


class DegenerateErrors(ValueError):
    """The forecast errors carry no dispersion (zero MAD or zero variance).

    Every bandwidth and every test statistic is meaningless in this case, so
    it is surfaced as an error rather than floored away.
    """


class MissingColumnError(ValueError):
    """A required column is absent from an input CSV."""

    def __init__(self, column: str):
        self.column = column
        super().__init__(f"required column {column!r} not found in input header")
