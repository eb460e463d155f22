"""Exception hierarchy shared by the library and the command line.

Every error carries a human-readable ``detail`` and the process exit status
the CLI returns for it.
"""

from typing import Any, Dict, Optional


class MinerError(Exception):
    """Base class for all errors raised by civicminer."""

    exit_code: int = 2

    def __init__(self, detail: str, context: Optional[Dict[str, Any]] = None):
        super().__init__(detail)
        self.detail = detail
        self.context = context or {}


class UsageError(MinerError):
    """Invalid flags or parameter values supplied by the caller."""

    exit_code = 1


class DataError(MinerError, ValueError):
    """Malformed input data or a measure that is undefined for its input."""

    exit_code = 2


class BudgetExceededError(MinerError):
    """Pair enumeration would exceed the configured pair budget."""

    exit_code = 3

    def __init__(self, transaction_id: str, budget: int, enumerated: int, unit: str = "pairs"):
        super().__init__(
            f"pair budget of {budget} exceeded at transaction '{transaction_id}' "
            f"({enumerated} {unit} enumerated)",
            context={"transaction_id": transaction_id, "budget": budget, "enumerated": enumerated, "unit": unit},
        )
        self.transaction_id = transaction_id
        self.budget = budget
        self.enumerated = enumerated
