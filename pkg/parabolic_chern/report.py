"""Command reports: deterministic JSON and rich tables."""

import json
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List

from .logging_system import ChernLogger

logger = logging.getLogger(__name__)


@dataclass
class Report:
    """Output of one command.

    Attributes:
        command: Command name
        input: Echo of the scenario in canonical form
        results: Command specific results (rationals as strings)
        warnings: Non-fatal findings
        passed: Overall status for commands that check something
        scenario_name: Label for the table header (not part of the machine output)
    """
    command: str
    input: Dict[str, Any]
    results: Dict[str, Any]
    warnings: List[str] = field(default_factory=list)
    passed: bool = True
    scenario_name: str = "scenario"

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization."""
        return {
            "command": self.command,
            "input": self.input,
            "results": self.results,
            "warnings": list(self.warnings),
            "status": "PASS" if self.passed else "FAIL",
        }

    def to_json(self) -> str:
        """Canonical machine-readable form."""
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def lookup(data: Dict[str, Any], dotted: str) -> Any:
    """Follow a dotted path such as "results.base.delta_par" into nested dictionaries."""
    value: Any = data
    for key in dotted.split("."):
        value = value[key]
    return value


def _format_class(coefficients: Dict[str, str]) -> str:
    terms = [f"{value} {name}" for name, value in coefficients.items() if value != "0"]
    return " + ".join(terms) if terms else "0"


class ReportRenderer:
    """Renders reports as tables or machine output through a ChernLogger."""

    def __init__(self, chern_logger: ChernLogger):
        self.out = chern_logger

    def render(self, report: Report, output_format: str) -> None:
        """Write a report in the requested format."""
        if output_format == "machine":
            self.out.print_machine(report.to_json())
            return

        titles = {
            "delta": "Parabolic Chern invariants",
            "decompose": "Local-global decomposition",
            "minimize": "Minimal local contributions",
            "check": "Invariant suite",
        }
        self.out.print_header(titles.get(report.command, report.command), report.scenario_name)
        getattr(self, f"_render_{report.command}")(report.results)
        for warning in report.warnings:
            self.out.print_warning(warning)

    def _render_global(self, title: str, data: Dict[str, Any]) -> None:
        rows = {
            "ch1^Par": _format_class(data["ch1_par"]),
            "ch2^Par": data["ch2_par"],
            "Delta^Vb": data["delta_vb"],
            "Delta^Par": data["delta_par"],
            "Delta^Par (characters)": data["delta_par_characters"],
        }
        if "delta_par_rank2" in data:
            rows["Delta^Par (rank 2)"] = data["delta_par_rank2"]
        self.out.print_summary(rows, title=title)

    def _render_delta(self, results: Dict[str, Any]) -> None:
        self._render_global("Base surface", results["base"])
        if results["local"]:
            self.out.print_table(
                "Pullback local terms",
                ["Point", "Delta^Par_loc"],
                [[name, term["value"]] for name, term in results["local"].items()],
            )
        if "blown_up" in results:
            self._render_global("Blown-up surface", results["blown_up"])

    def _render_decompose(self, results: Dict[str, Any]) -> None:
        self.out.print_summary({
            "Delta^Par(E)": results["left"],
            "Delta^Par(base) + sum local": results["right"],
            "Delta^Par(base)": results["global"],
            "Delta^Par(pullback) + sum relative": results["alternate_right"],
            "Delta^Vb(E)": results["delta_vb_left"],
            "Delta^Vb(base) + sum local": results["delta_vb_right"],
        }, title="Both sides")
        if results["local"]:
            self.out.print_table(
                "Local terms",
                ["Point", "Baseline", "Relative", "Delta^Par_loc", "Delta^Vb_loc"],
                [[name, term["baseline"], term["relative"], term["value"], term["delta_vb_loc"]]
                 for name, term in results["local"].items()],
            )
        if results["status"] == "PASS":
            self.out.print_success(f"decomposition holds ({results['left']})")
        else:
            self.out.print_failure(f"discrepancy {results['discrepancy']}")

    def _render_minimize(self, results: Dict[str, Any]) -> None:
        for name, point in results["points"].items():
            self.out.print_summary({
                "kappa": point["kappa"],
                "betas": ", ".join(point["betas"]),
                "Baseline": point["baseline"],
                "Minimum (relative)": point["minimum_relative"],
                "Delta^Par_loc(E^min)": point["local_minimum"],
                "Cap / g used": f"{point['cap']} / {point['g_max_used']}",
                "Pruned g levels / sequences": f"{point['pruned']['g_levels']} / {point['pruned']['sequences']}",
                "Candidates": point["evaluated"],
                "Certificates": "ok" if point["panov_ok"] and point["stationarity_ok"] and point["bound_ok"] else "FAILED",
            }, title=f"Point {name}")
            self.out.print_table(
                f"Argmin at {name}",
                ["g", "mu", "deg^delta_loc", "deg^delta F0", "tau", "beta0"],
                [[c["g"], c["mu_seq"], c["deg_delta_loc"], c["f0_deg_delta"], c["taus"], c["beta0"]]
                 for c in point["argmin"]],
            )
        if "delta_par_min" in results:
            self.out.print_summary({
                "Delta^Par(base)": results["delta_par_global"],
                "Delta^Par_min": results["delta_par_min"],
            }, title="Minimal discriminant")
            if results["bogomolov_ok"] is False:
                self.out.print_failure("negative minimum for a bundle declared to have stable restriction")

    def _render_check(self, results: Dict[str, Any]) -> None:
        self.out.print_table(
            f"Seed {results['seed']}, {results['trials']} random trials per check",
            ["Check", "Status", "Trials", "Detail"],
            [[name, outcome["status"], outcome["trials"], outcome["detail"]]
             for name, outcome in results["checks"].items()],
        )
        if results["passed"]:
            self.out.print_success("all identities hold")
        else:
            self.out.print_failure("at least one identity failed")
