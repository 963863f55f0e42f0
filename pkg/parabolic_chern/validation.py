"""Validation results for scenario data.

Errors stop a computation; warnings (identity-defaulted permutations and the
like) are carried into every report.
"""

import logging
from dataclasses import dataclass, field
from typing import List

logger = logging.getLogger(__name__)


@dataclass
class ValidationResult:
    """Results of scenario validation."""
    warnings: List[str] = field(default_factory=list)
    errors: List[str] = field(default_factory=list)

    @property
    def is_valid(self) -> bool:
        """Check if validation passed without errors."""
        return len(self.errors) == 0

    @property
    def has_warnings(self) -> bool:
        """Check if validation has warnings."""
        return len(self.warnings) > 0


class ScenarioValidator:
    """Logs validation results for a named scenario."""

    def log_validation_results(self, validation_result: ValidationResult, scenario_name: str) -> None:
        """Write validation results to the log.

        Args:
            validation_result: Result to report
            scenario_name: Name shown in the messages
        """
        if validation_result.errors:
            logger.error(f"Scenario '{scenario_name}' failed validation:")
            for error in validation_result.errors:
                logger.error(f"  - {error}")

        if validation_result.warnings:
            logger.warning(f"Scenario '{scenario_name}' validation warnings:")
            for warning in validation_result.warnings:
                logger.warning(f"  - {warning}")

        if validation_result.is_valid and not validation_result.has_warnings:
            logger.info(f"Scenario '{scenario_name}' validation: no issues")
