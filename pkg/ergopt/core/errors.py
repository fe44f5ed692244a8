"""Exception hierarchy for ergopt.

Errors are grouped by the CLI exit class they map to:
- SpecError (exit 2): malformed systems, words and potentials
- FeasibilityError (exit 3): constraints with no admissible measure
- NumericalError (exit 4): solver, budget and cross-check failures
"""
from typing import Any, Dict, Optional, Tuple


class ErgoptError(Exception):
    """Base class for all ergopt errors."""

    exit_code = 1

    def __init__(self, message: str, **context: Any):
        super().__init__(message)
        self.message = message
        self.context: Dict[str, Any] = context

    def to_dict(self) -> Dict[str, Any]:
        return {
            "error": type(self).__name__,
            "message": self.message,
            "context": {k: str(v) for k, v in sorted(self.context.items())},
        }


class SpecError(ErgoptError):
    exit_code = 2


class FeasibilityError(ErgoptError):
    exit_code = 3


class NumericalError(ErgoptError):
    exit_code = 4


class InvalidParameter(SpecError, ValueError):
    """A caller-supplied size, depth or count outside its allowed range."""


# symbolic-core


class EmptyAlphabet(SpecError):
    def __init__(self, message: str = "alphabet is empty or has no allowed transitions"):
        super().__init__(message)


class StrandedSymbol(SpecError):
    def __init__(self, symbol: int, direction: str):
        super().__init__(
            f"symbol {symbol} has no {direction} allowed transition", symbol=symbol, direction=direction
        )
        self.symbol = symbol


class InvalidWord(SpecError):
    pass


class WordTooShort(SpecError):
    def __init__(self, length: int, required: int):
        super().__init__(
            f"word of length {length} is shorter than potential range {required}",
            length=length,
            required=required,
        )


class BudgetExceeded(NumericalError):
    pass


# potentials


class IncompleteWeightTable(SpecError):
    pass


class PotentialMismatch(SpecError):
    pass


class SingularMatrix(SpecError):
    pass


class NoApproximantAvailable(FeasibilityError):
    pass


class MaxEffortExceeded(NumericalError):
    def __init__(self, message: str, best: Optional[Any] = None):
        super().__init__(message, best=best)
        self.best = best


class DenominatorViolated(FeasibilityError):
    pass


# measure-polytope / optimizers


class Infeasible(FeasibilityError):
    def __init__(self, message: str, feasible_interval: Optional[Tuple[Any, Any]] = None):
        super().__init__(message, feasible_interval=feasible_interval)
        self.feasible_interval = feasible_interval


class NumericallyUnstable(NumericalError):
    pass


class CrossCheckFailed(NumericalError):
    pass


class UnimodalityViolation(NumericalError):
    def __init__(self, triple: Tuple[Any, Any, Any], values: Tuple[Any, Any, Any]):
        super().__init__(
            f"conditional spectrum not unimodal at alphas {triple}: values {values}",
            triple=triple,
            values=values,
        )
        self.triple = triple
        self.values = values


# orbit-analysis / suspension


class HorizonTooLarge(NumericalError):
    pass


class NotMixing(FeasibilityError):
    pass


class TargetsIndistinguishable(FeasibilityError):
    pass


class HypothesisFails(FeasibilityError):
    pass


# configuration and system specs


class ConfigValidationError(SpecError):
    """Configuration validation error"""


class SystemSpecError(SpecError):
    pass
