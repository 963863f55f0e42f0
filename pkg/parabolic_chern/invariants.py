"""Exact identity checks run by the ``check`` command.

Each check runs on the loaded scenario and on seeded random scenarios. Exact
arithmetic means a check either holds with equality or fails; there is no
tolerance.
"""

import logging
import random
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional

from .chern import (ParabolicBundle, bundle_delta_vb, delta_par,
                    delta_par_from_characters, delta_par_rank2,
                    tensor_line_bundle)
from .elemtrans import (SplittingType, deg_delta_steps, local_vb_lower_bound,
                        rank2_chain_record, rank2_tau_bits, reduce_to_pure,
                        telescoped_delta_vb, update_filtration_degrees)
from .errors import InvariantViolation, ParabolicChernError
from .localize import assemble_blown_up, decomposition_check
from .minimize import incident_betas, minimize_point
from .parastruct import shift_weights
from .sampling import (random_bundle, random_fraction, random_line_bundle,
                       random_point_extension, random_rank2_extension_scenario,
                       random_scenario, random_surface)
from .scenario import ScenarioFile
from .search_config import SearchConfig
from .surface import DivisorSurface

logger = logging.getLogger(__name__)

MAX_CHAIN_MU = 6


@dataclass
class CheckOutcome:
    """Result of one identity check."""
    name: str
    passed: bool
    trials: int
    detail: str = ""

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization."""
        return {
            "status": "PASS" if self.passed else "FAIL",
            "trials": self.trials,
            "detail": self.detail,
        }


class InvariantSuite:
    """Runs every identity check on a scenario and on seeded random data."""

    def __init__(self, config: SearchConfig, on_trial: Optional[Callable[[], None]] = None):
        """Initialize the suite.

        Args:
            config: Seed and number of random trials per check
            on_trial: Called once per finished check (progress reporting)
        """
        self.config = config
        self.on_trial = on_trial

    def _rng(self, salt: int) -> random.Random:
        return random.Random(self.config.seed * 1009 + salt)

    def _seeds(self, salt: int) -> List[int]:
        rng = self._rng(salt)
        return [rng.randrange(2 ** 31) for _ in range(self.config.trials)]

    def _bundles(self, scenario: ScenarioFile, salt: int, rank: Optional[int] = None):
        """The scenario's own bundle followed by random ones."""
        yield scenario.surface, scenario.bundle
        for seed in self._seeds(salt):
            yield random_scenario(seed, rank)

    def run(self, scenario: ScenarioFile) -> List[CheckOutcome]:
        """Run every check.

        Returns:
            One CheckOutcome per check, in a fixed order
        """
        checks = [
            ("tensor_invariance", self.check_tensor_invariance),
            ("alpha_tot_invariance", self.check_alpha_tot),
            ("dual_path", self.check_dual_path),
            ("decomposition", self.check_decomposition),
            ("chain_telescoping", self.check_chains),
            ("deg_loc_reconstruction", self.check_deg_loc),
            ("minimizer_oracle", self.check_minimizer),
        ]
        outcomes = []
        for name, check in checks:
            try:
                outcome = check(scenario)
            except ParabolicChernError as e:
                outcome = CheckOutcome(name, False, 0, str(e))
            outcomes.append(outcome)
            if outcome.passed:
                logger.info(f"{name}: PASS ({outcome.trials} trials)")
            else:
                logger.error(f"{name}: FAIL ({outcome.detail})")
            if self.on_trial is not None:
                self.on_trial()
        return outcomes

    def check_tensor_invariance(self, scenario: ScenarioFile) -> CheckOutcome:
        """Both discriminants are unchanged by tensoring with a line bundle."""
        rng = self._rng(1)
        trials = 0
        for surface, bundle in self._bundles(scenario, 1):
            pairwise = surface.pairwise_surface()
            for _ in range(3):
                line = random_line_bundle(rng, surface.chow)
                twisted = tensor_line_bundle(bundle, line, pairwise)
                trials += 1
                before = (bundle_delta_vb(bundle, pairwise), delta_par(bundle, pairwise))
                after = (bundle_delta_vb(twisted, pairwise), delta_par(twisted, pairwise))
                if before != after:
                    return CheckOutcome("tensor_invariance", False, trials,
                                        f"{before} became {after} after twisting by {line.to_dict()}")
        return CheckOutcome("tensor_invariance", True, trials)

    def check_alpha_tot(self, scenario: ScenarioFile) -> CheckOutcome:
        """Uniform weight shifts on a component leave Delta^Par unchanged on both paths."""
        rng = self._rng(2)
        trials = 0
        for surface, bundle in self._bundles(scenario, 2):
            pairwise = surface.pairwise_surface()
            flags = {}
            for name, flag in bundle.flags.items():
                low, high = -1 - flag.weights[0], -flag.weights[-1]
                flags[name] = shift_weights(flag, random_fraction(rng, low, high))
            shifted = bundle.with_flags(flags)
            trials += 1
            expected = delta_par(bundle, pairwise)
            values = (delta_par(shifted, pairwise), delta_par_from_characters(shifted, pairwise))
            if values != (expected, expected):
                return CheckOutcome("alpha_tot_invariance", False, trials,
                                    f"Delta^Par {expected} became {values} after a uniform shift")
        return CheckOutcome("alpha_tot_invariance", True, trials)

    def check_dual_path(self, scenario: ScenarioFile) -> CheckOutcome:
        """Trace-free formula, character formula and the rank-2 formula agree."""
        trials = 0
        for surface, bundle in self._bundles(scenario, 3):
            pairwise = surface.pairwise_surface()
            trials += 1
            detail = _dual_path_mismatch(bundle, pairwise)
            if detail:
                return CheckOutcome("dual_path", False, trials, detail)
        return CheckOutcome("dual_path", True, trials)

    def check_decomposition(self, scenario: ScenarioFile) -> CheckOutcome:
        """Both sides of the decomposition agree on the scenario and on random extensions."""
        trials = 1
        report = decomposition_check(scenario.surface, scenario.bundle,
                                     scenario.point_extensions(), scenario.declared_ch2)
        if not report.passed:
            return CheckOutcome("decomposition", False, trials,
                                f"scenario: left {report.left}, right {report.right}")

        for seed in self._seeds(4):
            surface, bundle, _, extensions = random_rank2_extension_scenario(seed)
            trials += 1
            report = decomposition_check(surface, bundle, extensions)
            if not report.passed:
                return CheckOutcome("decomposition", False, trials,
                                    f"rank-2 seed {seed}: discrepancy {report.discrepancy}")

        for seed in self._seeds(5):
            rng = random.Random(seed)
            surface = random_surface(rng, points=rng.randint(1, 2))
            bundle = random_bundle(rng, surface)
            extensions = {point.name: random_point_extension(rng, point, bundle.rank)
                          for point in surface.multiple_points}
            trials += 1
            report = decomposition_check(surface, bundle, extensions)
            if not report.passed:
                return CheckOutcome("decomposition", False, trials,
                                    f"rank-{bundle.rank} seed {seed}: discrepancy {report.discrepancy}")
        return CheckOutcome("decomposition", True, trials)

    def check_chains(self, scenario: ScenarioFile) -> CheckOutcome:
        """Chain bookkeeping: telescoping, the oracle, local BG and the lower bound."""
        trials = 0
        sources = [SplittingType.from_pair(0, mu) for mu in range(MAX_CHAIN_MU + 1)]
        sources += [SplittingType.from_twists(twists) for twists in ((0, 1, 3), (-1, 0, 0, 2), (0, 0, 4))]
        for source in sources:
            for record in reduce_to_pure(source):
                trials += 1
                values = {record.telescoped, record.delta_vb_loc}
                if record.rank == 2:
                    values.add(telescoped_delta_vb(record.mu_seq))
                if len(values) != 1 or record.oracle_chern() != record.chern:
                    return CheckOutcome("chain_telescoping", False, trials,
                                        f"{source} along {list(record.mu_seq)}: {sorted(values)}")
                value = values.pop()
                if value < 0 or (value == 0) != (record.g == 0):
                    return CheckOutcome("chain_telescoping", False, trials,
                                        f"local BG fails for {source}: {value}")
                if record.rank == 2 and value < local_vb_lower_bound(record.g, record.mu):
                    return CheckOutcome("chain_telescoping", False, trials,
                                        f"lower bound fails for {source} along {list(record.mu_seq)}")
        return CheckOutcome("chain_telescoping", True, trials)

    def check_deg_loc(self, scenario: ScenarioFile) -> CheckOutcome:
        """Local degrees from incidence bits match the candidates and rebuild the global flags."""
        trials = 0
        for seed in self._seeds(6):
            rng = random.Random(seed)
            surface, bundle, candidates, extensions = random_rank2_extension_scenario(seed)
            _, blown = assemble_blown_up(surface, bundle, extensions)
            for point in surface.multiple_points:
                candidate = candidates[point.name]
                record = rank2_chain_record(point.name, candidate.mu_seq)
                bits = {}
                for name, d in zip(point.components, candidate.deg_delta_loc):
                    ones = (candidate.g + d) // 2
                    taus = [1] * ones + [0] * (candidate.g - ones)
                    rng.shuffle(taus)
                    if any(abs(step) != 1 for step in deg_delta_steps(taus)):
                        return CheckOutcome("deg_loc_reconstruction", False, trials, "step change is not +-1")
                    bits[name] = rank2_tau_bits(taus)
                degrees = update_filtration_degrees(record, bits)
                trials += 1
                for name, d in zip(point.components, candidate.deg_delta_loc):
                    if degrees.of(name) != extensions[point.name].degrees.of(name) or abs(d) > candidate.g:
                        return CheckOutcome("deg_loc_reconstruction", False, trials,
                                            f"seed {seed}: {name} at {point.name} gives {degrees.of(name)}")
            for name, flag in bundle.flags.items():
                expected = list(flag.gr_degrees)
                for point in surface.multiple_points:
                    if name in point.components:
                        local = extensions[point.name].degrees.of(name)
                        expected = [e + d for e, d in zip(expected, local)]
                if list(blown.flags[name].gr_degrees) != expected:
                    return CheckOutcome("deg_loc_reconstruction", False, trials,
                                        f"seed {seed}: flag on {name} not rebuilt from local degrees")
        return CheckOutcome("deg_loc_reconstruction", True, trials)

    def check_minimizer(self, scenario: ScenarioFile) -> CheckOutcome:
        """Pruned and unpruned searches agree at every multiple point of a rank-2 scenario."""
        if scenario.bundle.rank != 2:
            return CheckOutcome("minimizer_oracle", True, 0, "not rank 2")
        trials = 0
        skipped = []
        for point in scenario.surface.multiple_points:
            try:
                betas = incident_betas(scenario.bundle, point)
            except InvariantViolation as e:
                logger.warning(f"Minimizer check skips {point.name}: {e}")
                skipped.append(point.name)
                continue
            pruned = minimize_point(betas, SearchConfig(cap=self.config.cap), point.name)
            full = minimize_point(betas, SearchConfig(cap=self.config.cap, prune=False), point.name)
            trials += 1
            if (pruned.minimum, pruned.argmin) != (full.minimum, full.argmin):
                return CheckOutcome("minimizer_oracle", False, trials,
                                    f"{point.name}: pruned {pruned.minimum}, unpruned {full.minimum}")
            if not pruned.certified:
                return CheckOutcome("minimizer_oracle", False, trials, f"{point.name}: certificates fail")
        detail = f"skipped {', '.join(skipped)} (beta = 1/2)" if skipped else ""
        return CheckOutcome("minimizer_oracle", True, trials, detail)


def _dual_path_mismatch(bundle: ParabolicBundle, surface: DivisorSurface) -> str:
    values = [delta_par(bundle, surface), delta_par_from_characters(bundle, surface)]
    if bundle.rank == 2:
        values.append(delta_par_rank2(bundle, surface))
    if len(set(values)) != 1:
        return f"paths disagree: {[str(v) for v in values]}"
    return ""
