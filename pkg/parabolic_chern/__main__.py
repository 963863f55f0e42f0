"""Main CLI entry point for the parabolic Chern invariant tool."""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from .chern import global_invariants, validate_bundle
from .errors import CheckFailure, InvariantViolation, ParabolicChernError
from .invariants import InvariantSuite
from .localize import (assemble_blown_up, decomposition_check, delta_par_loc,
                       pullback_extension)
from .logging_system import setup_logger
from .minimize import global_minimum, minimize
from .report import Report, ReportRenderer
from .scenario import ScenarioFile
from .search_config import OUTPUT_FORMATS, SearchConfig
from .validation import ScenarioValidator

logger = logging.getLogger(__name__)


class ChernApp:
    """Command orchestrator: load a scenario, run one command, report."""

    def __init__(self, args: argparse.Namespace):
        """Initialize the application with CLI arguments.

        Args:
            args: Parsed command line arguments
        """
        self.args = args
        log_dir = Path(args.log_dir) if getattr(args, "log_dir", None) else None
        self.chern_logger = setup_logger(log_dir=log_dir, verbose=getattr(args, "verbose", False))
        self.renderer = ReportRenderer(self.chern_logger)
        self.validator = ScenarioValidator()
        self.config: Optional[SearchConfig] = None
        self.scenario: Optional[ScenarioFile] = None

    def run(self) -> int:
        """Run the selected command.

        Returns:
            Exit code (0 success, 2 parse, 3 data invariant, 4 rank, 5 check failure, 1 unexpected)
        """
        try:
            self.config = SearchConfig.from_args(self.args)
        except ValueError as e:
            self.chern_logger.print_error(f"Invalid option: {e}")
            return 2

        try:
            self.scenario = ScenarioFile.load(Path(self.args.file))
            pairwise = self.scenario.surface.pairwise_surface()
            self.validator.log_validation_results(
                validate_bundle(self.scenario.bundle, pairwise), self.scenario.name
            )

            handlers = {
                "delta": self.cmd_delta,
                "decompose": self.cmd_decompose,
                "minimize": self.cmd_minimize,
                "check": self.cmd_check,
            }
            report = handlers[self.args.command]()
            self.renderer.render(report, self.config.output_format)
            return self._exit_code(report)

        except ParabolicChernError as e:
            self.chern_logger.print_error(str(e), e)
            return e.exit_code
        except Exception as e:
            self.chern_logger.print_error(f"Unexpected error: {str(e)}", e)
            logger.debug("Unexpected error", exc_info=True)
            return 1

    def _exit_code(self, report: Report) -> int:
        if report.passed:
            return 0
        if report.command == "minimize":
            return InvariantViolation.exit_code
        return CheckFailure.exit_code

    def _report(self, command: str, results, warnings=None, passed: bool = True) -> Report:
        return Report(
            command=command,
            input=self.scenario.to_dict(),
            results=results,
            warnings=list(warnings or []),
            passed=passed,
            scenario_name=self.scenario.name,
        )

    def cmd_delta(self) -> Report:
        """Global invariants of the base bundle, pullback local terms and, with extensions, E."""
        scenario = self.scenario
        base = global_invariants(scenario.bundle, scenario.surface.pairwise_surface())
        results = {
            "base": base.to_dict(),
            "local": {
                point.name: delta_par_loc(pullback_extension(point, scenario.bundle.rank),
                                          scenario.bundle, scenario.surface).to_dict()
                for point in scenario.surface.multiple_points
            },
        }
        extensions = scenario.point_extensions()
        if extensions is not None or scenario.declared_ch2 is not None:
            if extensions is None:
                extensions = {point.name: pullback_extension(point, scenario.bundle.rank)
                              for point in scenario.surface.multiple_points}
            blown_up, bundle = assemble_blown_up(scenario.surface, scenario.bundle,
                                                 extensions, scenario.declared_ch2)
            results["blown_up"] = global_invariants(bundle, blown_up.surface).to_dict()
        return self._report("delta", results, base.warnings)

    def cmd_decompose(self) -> Report:
        """Both sides of the decomposition with the per-point local terms."""
        scenario = self.scenario
        report = decomposition_check(scenario.surface, scenario.bundle,
                                     scenario.point_extensions(), scenario.declared_ch2)
        return self._report("decompose", report.to_dict(), report.warnings, report.passed)

    def cmd_minimize(self) -> Report:
        """Rank-2 minimization at one point or at every multiple point."""
        scenario = self.scenario
        if self.config.point is not None:
            point_report = minimize(scenario.surface, scenario.bundle, self.config.point, self.config)
            return self._report("minimize", {"points": {self.config.point: point_report.to_dict()}})

        result = global_minimum(scenario.surface, scenario.bundle, self.config, scenario.stable_restriction)
        warnings = []
        if result.bogomolov_ok is False:
            warnings.append(
                f"[bogomolov] minimal discriminant {result.value} is negative although the scenario "
                f"declares a stable restriction"
            )
        return self._report("minimize", result.to_dict(), warnings, result.bogomolov_ok is not False)

    def cmd_check(self) -> Report:
        """Run the invariant suite with the configured seed."""
        progress = self.chern_logger.create_simple_progress_bar(7, "Checking identities")
        try:
            outcomes = InvariantSuite(self.config, on_trial=lambda: progress.update(1)).run(self.scenario)
        finally:
            progress.close()
        passed = all(outcome.passed for outcome in outcomes)
        results = {
            "seed": self.config.seed,
            "trials": self.config.trials,
            "checks": {outcome.name: outcome.to_dict() for outcome in outcomes},
            "passed": passed,
        }
        return self._report("check", results, passed=passed)


def create_parser() -> argparse.ArgumentParser:
    """Create command line argument parser.

    Returns:
        Configured ArgumentParser
    """
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", type=str, help="Scenario file (JSON)")
    common.add_argument(
        "--format",
        choices=OUTPUT_FORMATS,
        help="Output format (default: table)"
    )
    common.add_argument(
        "--verbose", "-v",
        action="store_true",
        help="Enable debug logging"
    )
    common.add_argument(
        "--log-dir",
        type=str,
        help="Directory for a detailed log file"
    )

    parser = argparse.ArgumentParser(
        prog="parabolic_chern",
        description="Exact parabolic Chern invariants on surfaces blown up at multiple points",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python -m parabolic_chern delta scenarios/split_o_o1.json
  python -m parabolic_chern decompose scenarios/triple_point.json --format machine
  python -m parabolic_chern minimize scenarios/two_points.json --point P --cap 6 --no-prune
  python -m parabolic_chern check scenarios/triple_point.json --seed 7 --trials 50
        """
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    subparsers.add_parser("delta", parents=[common], help="Global invariants")
    subparsers.add_parser("decompose", parents=[common], help="Local-global decomposition")

    minimize_parser = subparsers.add_parser("minimize", parents=[common], help="Rank-2 minimization")
    minimize_parser.add_argument("--point", type=str, help="Only this multiple point")
    minimize_parser.add_argument("--cap", type=int, help="Cap on mu_g (default: max(kappa, 1))")
    minimize_parser.add_argument("--no-prune", action="store_true", default=None,
                                 help="Disable bound pruning")

    check_parser = subparsers.add_parser("check", parents=[common], help="Invariant suite")
    check_parser.add_argument("--seed", type=int, help="Random seed (default: 0)")
    check_parser.add_argument("--trials", type=int, help="Random trials per check (default: 20)")
    check_parser.add_argument("--cap", type=int, help="Cap on mu_g for the minimizer check")

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point.

    Args:
        argv: Arguments (defaults to sys.argv[1:])

    Returns:
        Exit code
    """
    parser = create_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0

    app = ChernApp(args)
    return app.run()


if __name__ == "__main__":
    sys.exit(main())
