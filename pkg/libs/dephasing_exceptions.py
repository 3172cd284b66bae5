"""
Custom Exceptions for the dephasing simulator

Every error carries a short code, a human-readable message and the process
exit status the CLI reports for it.
"""

from typing import Optional


class DephasingError(Exception):
    """Base class for all simulator errors"""

    exit_code: int = 1

    def __init__(self, code: str, message: str):
        """
        Initialize simulator error

        Args:
            code: Error code (BAD_CONFIG, BAD_DOMAIN, BRANCH_IMPOSSIBLE, QUAD_FAILED, ...)
            message: Human-readable error message
        """
        self.code = code
        self.message = message
        super().__init__(f"{code}: {message}")


class ConfigurationError(DephasingError):
    """Bad flags, config file, state file, profile or catalog name"""

    exit_code = 2


class DomainError(DephasingError):
    """Argument outside the domain of an operation"""

    exit_code = 2


class ImpossibleBranchError(DephasingError):
    """
    Projection onto a branch with (numerically) zero probability

    No renormalized post-measurement state exists for such a branch.
    """

    exit_code = 3

    def __init__(self, qubit: int, probability: float, label: Optional[str] = None):
        """
        Initialize impossible branch error

        Args:
            qubit: Register position (1-based) that was measured
            probability: Branch probability that fell below threshold
            label: Optional physical qubit label for the message
        """
        self.qubit = qubit
        self.probability = probability
        where = label if label is not None else f"position {qubit}"
        super().__init__(
            "BRANCH_IMPOSSIBLE",
            f"projection of qubit {where} has probability {probability:.3e}",
        )


class NumericalError(DephasingError):
    """Numerical failure in an evaluation"""

    exit_code = 4


class QuadratureError(NumericalError):
    """Adaptive quadrature did not reach the requested tolerance"""

    def __init__(self, quantity: str, t: float, abserr: float, diagnostic: str):
        """
        Initialize quadrature error

        Args:
            quantity: Which decoherence function was integrated (gamma, theta)
            t: Evaluation time
            abserr: Achieved absolute error estimate
            diagnostic: Message reported by the integrator
        """
        self.quantity = quantity
        self.t = t
        self.abserr = abserr
        self.diagnostic = diagnostic
        super().__init__(
            "QUAD_FAILED",
            f"{quantity}_quad(t={t!r}) reached abserr={abserr:.3e}: {diagnostic.strip()}",
        )
