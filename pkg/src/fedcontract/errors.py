"""Exception types shared across the package."""


class FedContractError(Exception):
    """Base class for package-specific errors."""


class InfeasibleTimeError(FedContractError):
    """A contract item cannot finish a global iteration before the deadline."""


class BudgetInfeasibleError(FedContractError):
    """No deadline-feasible menu fits inside the total reward budget."""


class ConvergenceError(FedContractError):
    """An iterative solve exhausted its iteration limit."""

    def __init__(self, message: str, residual: float | None = None):
        if residual is not None:
            message = f"{message} (residual={residual:.3e})"
        super().__init__(message)
        self.residual = residual


class DegenerateMarketError(FedContractError):
    """No posted price induces any data owner to participate."""


class ConfigError(FedContractError):
    """A scenario configuration is malformed or violates an invariant."""
