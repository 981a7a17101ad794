"""Error hierarchy shared by services and the command line.

Every error carries the process exit code the CLI reports for it.
"""
from typing import Optional


class RelaxMatchError(Exception):
    exit_code: int = 1

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


# Invalid input (exit 2)

class InvalidInputError(RelaxMatchError):
    exit_code = 2


class DimensionMismatchError(InvalidInputError):
    pass


class AsymmetricInputError(InvalidInputError):
    pass


class GraphFormatError(InvalidInputError):
    pass


class OracleLimitError(InvalidInputError):
    def __init__(self, n: int, limit: int):
        super().__init__(
            f"oracle refuses n={n}: exhaustive search is limited to n <= {limit} "
            f"(raise oracle_limit to override)"
        )
        self.n = n
        self.limit = limit


class DomainError(InvalidInputError):
    pass


class InfeasibleInstanceError(InvalidInputError):
    pass


# Numerical failure (exit 3)

class NumericalError(RelaxMatchError):
    exit_code = 3


class EigenConvergenceError(NumericalError):
    def __init__(self, sweeps: int, residual: float):
        super().__init__(
            f"Jacobi eigensolver did not converge after {sweeps} sweeps "
            f"(off-diagonal residual {residual:.3e})"
        )
        self.sweeps = sweeps
        self.residual = residual


class InfeasibleRowError(NumericalError):
    def __init__(self, row: int, rhs: float):
        super().__init__(
            f"row {row} of the relaxed system is infeasible: every coordinate carrying "
            f"the constraint is masked but the right-hand side is {rhs:.3e}"
        )
        self.row = row
        self.rhs = rhs


class SingularSystemError(NumericalError):
    pass


class SeedGenerationError(NumericalError):
    def __init__(self, detail: str, invariant: Optional[tuple] = None):
        super().__init__(detail)
        self.invariant = invariant


class ResampleLimitError(NumericalError):
    pass
