"""Failure tracking for mining runs.

Failures are always logged at ERROR on the module logger. When a log directory
is configured each failure is also appended as one JSON record to
``<LOG_DIR>/failures.log`` so batch runs over many datasets can be audited.
"""

import json
import logging
import os
from datetime import datetime
from logging.handlers import TimedRotatingFileHandler
from pathlib import Path
from typing import Any, Dict, Optional

from .config import settings
from .errors import BudgetExceededError, MinerError

logger = logging.getLogger(__name__)


class FailureTracker:
    """Centralized failure tracking system."""

    def __init__(self, log_dir: Optional[str] = None):
        self.log_dir = log_dir if log_dir is not None else settings.LOG_DIR
        self.failure_logger = logging.getLogger("civicminer.failures")
        self.failure_logger.setLevel(logging.ERROR)
        self.failures_log_path: Optional[Path] = None

        if self.log_dir:
            self.failures_log_path = Path(self.log_dir) / "failures.log"
            self.failures_log_path.parent.mkdir(parents=True, exist_ok=True)
            target = os.path.abspath(self.failures_log_path)
            current = [h for h in self.failure_logger.handlers if isinstance(h, logging.FileHandler)]
            if not any(h.baseFilename == target for h in current):
                # A tracker for another directory hands the logger over
                for stale in current:
                    self.failure_logger.removeHandler(stale)
                    stale.close()
                handler = TimedRotatingFileHandler(
                    filename=target,
                    when="midnight",
                    interval=1,
                    backupCount=30,
                    utc=settings.LOG_USE_UTC,
                    encoding="utf-8",
                )
                handler.setLevel(logging.ERROR)
                handler.setFormatter(logging.Formatter("%(message)s"))
                self.failure_logger.addHandler(handler)
                # Records go to the file only; the main log gets its own line below
                self.failure_logger.propagate = False

    def track_failure(
        self,
        operation: str,
        error: Exception,
        additional_context: Optional[Dict[str, Any]] = None,
    ) -> Dict[str, Any]:
        """Track a failure with detailed context.

        Args:
            operation: The operation that failed (e.g. "mine", "load_dataset")
            error: The exception that occurred
            additional_context: Additional context information

        Returns:
            The failure record that was written.
        """
        failure_data: Dict[str, Any] = {
            "operation": operation,
            "error_type": type(error).__name__,
            "error_message": str(error),
            "timestamp": datetime.now().isoformat(timespec="seconds"),
        }
        if isinstance(error, MinerError):
            failure_data["exit_code"] = error.exit_code
            if error.context:
                failure_data["context"] = dict(error.context)
        if additional_context:
            failure_data.setdefault("context", {}).update(additional_context)

        if self.failures_log_path is not None:
            self.failure_logger.error(json.dumps(failure_data, default=str))

        logger.error(f"FAILURE_TRACKED: {operation} failed: {error}")
        return failure_data

    def track_budget_failure(self, dataset: str, error: BudgetExceededError) -> Dict[str, Any]:
        """Track a mining run stopped by the pair budget."""
        return self.track_failure(
            operation="mine",
            error=error,
            additional_context={"dataset": dataset},
        )
