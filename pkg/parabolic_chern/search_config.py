"""Search and run configuration resolved from command line arguments."""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional

logger = logging.getLogger(__name__)

OUTPUT_FORMATS = ("table", "machine")


@dataclass
class SearchConfig:
    """Knobs for the rank-2 minimizer and the invariant suite."""
    cap: Optional[int] = None
    prune: bool = True
    point: Optional[str] = None
    seed: int = 0
    trials: int = 20
    output_format: str = "table"

    def __post_init__(self):
        if self.cap is not None and self.cap < 0:
            raise ValueError(f"enumeration cap must be non-negative, got {self.cap}")
        if self.trials < 1:
            raise ValueError(f"trials must be positive, got {self.trials}")
        if self.output_format not in OUTPUT_FORMATS:
            raise ValueError(f"unknown output format {self.output_format!r}")

    @classmethod
    def from_args(cls, args) -> 'SearchConfig':
        """Create SearchConfig from command line arguments.

        Args:
            args: Parsed command line arguments

        Returns:
            SearchConfig instance with resolved values
        """
        config = cls(
            cap=cls._resolve('cap', getattr(args, 'cap', None), None),
            prune=not cls._resolve('no_prune', getattr(args, 'no_prune', None), False),
            point=cls._resolve('point', getattr(args, 'point', None), None),
            seed=cls._resolve('seed', getattr(args, 'seed', None), 0),
            trials=cls._resolve('trials', getattr(args, 'trials', None), 20),
            output_format=cls._resolve('format', getattr(args, 'format', None), "table"),
        )

        logger.debug("Search configuration resolved:")
        for key, value in config.get_config_summary().items():
            logger.debug(f"  {key}: {value}")

        return config

    @staticmethod
    def _resolve(name: str, cli_value: Any, default_value: Any) -> Any:
        """Resolve a knob using priority: CLI > Default.

        Args:
            name: Knob name (for logging)
            cli_value: Value from CLI argument (None when not given)
            default_value: Default value

        Returns:
            Resolved value
        """
        if cli_value is not None:
            logger.debug(f"{name} from CLI: {cli_value}")
            return cli_value

        logger.debug(f"{name} using default: {default_value}")
        return default_value

    def resolve_cap(self, kappa: int) -> int:
        """Enumeration cap on mu_g for a point with kappa incident components."""
        if self.cap is not None:
            return self.cap
        return max(kappa, 1)

    def get_config_summary(self) -> Dict[str, Any]:
        """Get configuration summary for display.

        Returns:
            Dictionary with configuration details
        """
        return {
            "Enumeration Cap": self.cap if self.cap is not None else "max(kappa, 1)",
            "Pruning": "on" if self.prune else "off",
            "Point": self.point if self.point else "all",
            "Seed": self.seed,
            "Trials": self.trials,
            "Format": self.output_format,
        }
