"""Rank-2 minimization of the local parabolic term at an exceptional divisor.

A candidate extension is numerical: the mu sequence of its elementary chain,
deg^delta_loc on each incident component, deg^delta of the exceptional flag,
the incidence signs and the exceptional weight beta0. Values are relative to the
pullback, whose candidate has value 0.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .chern import ParabolicBundle
from .elemtrans import rank2_chain_chern, rank2_mu_sequences, telescoped_delta_vb
from .errors import CheckFailure, InvariantViolation, UnsupportedRankError
from .localize import (ExceptionalFlag, LocalDegrees, PointExtension,
                       delta_par_global, delta_par_loc, delta_par_loc_diff_rank2,
                       pullback_extension)
from .parastruct import HALF, QUARTER, FlagData, Rank2Flag
from .search_config import SearchConfig
from .surface import MultiplePoint, SurfaceScenario

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExtensionCandidate:
    """Numerical data of one rank-2 extension across an exceptional divisor.

    Attributes:
        mu_seq: mu(E(1)) < ... < mu(E(g))
        deg_delta_loc: deg^delta_loc per incident component, in incidence order
        f0_deg_delta: deg^delta(E_P, F0)
        taus: Incidence signs per incident component
        beta0: Exceptional weight in [0, 1/2); the search stays in [0, 1/4]
    """
    mu_seq: Tuple[int, ...]
    deg_delta_loc: Tuple[int, ...]
    f0_deg_delta: int
    taus: Tuple[int, ...]
    beta0: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "mu_seq", tuple(self.mu_seq))
        object.__setattr__(self, "deg_delta_loc", tuple(self.deg_delta_loc))
        object.__setattr__(self, "taus", tuple(self.taus))
        object.__setattr__(self, "beta0", Fraction(self.beta0))

    @property
    def g(self) -> int:
        return len(self.mu_seq)

    @property
    def mu(self) -> int:
        return self.mu_seq[-1] if self.mu_seq else 0

    @property
    def delta_vb_loc(self) -> Fraction:
        return telescoped_delta_vb(self.mu_seq)

    @property
    def exceptional_flag(self) -> ExceptionalFlag:
        return ExceptionalFlag(self.beta0, self.f0_deg_delta, self.taus)

    def validate_record(self, kappa: int) -> None:
        """Check the invariants every declared extension record satisfies.

        Raises:
            InvariantViolation: On the first violated condition
        """
        previous = 0
        for mu in self.mu_seq:
            if mu <= previous or (mu - previous) % 2 == 0:
                raise InvariantViolation("mu-sequence", f"mu sequence {list(self.mu_seq)} needs odd increasing gaps")
            previous = mu
        if len(self.deg_delta_loc) != kappa or len(self.taus) != kappa:
            raise InvariantViolation(
                "complete-local-record",
                f"{kappa} incident components, {len(self.deg_delta_loc)} degrees, {len(self.taus)} signs"
            )
        for d in self.deg_delta_loc:
            if abs(d) > self.g or (d - self.g) % 2:
                raise InvariantViolation("deg-delta-loc-range", f"deg^delta_loc {d} impossible after {self.g} steps")
        self.exceptional_flag.check_splitting(self.mu)

    def validate(self, kappa: int, cap: Optional[int] = None) -> None:
        """Check the record and the limits of the search space.

        The search only visits beta0 <= 1/4 and deg^delta(E_P, F0) <= mu.

        Raises:
            InvariantViolation: On the first violated condition
        """
        self.validate_record(kappa)
        if cap is not None and self.mu > cap:
            raise InvariantViolation("enumeration-cap", f"mu = {self.mu} above the cap {cap}")
        if self.f0_deg_delta > self.mu:
            raise InvariantViolation(
                "exceptional-flag-cap",
                f"deg^delta(E_P, F0) = {self.f0_deg_delta} above the searched maximum mu = {self.mu}"
            )
        if self.beta0 > QUARTER:
            raise InvariantViolation("beta0-range", f"beta0 {self.beta0} outside the searched range [0, 1/4]")

    def canonical(self, betas: Sequence[Fraction]) -> "ExtensionCandidate":
        """Collapse choices that a zero weight makes irrelevant."""
        f0, taus = self.f0_deg_delta, list(self.taus)
        degrees = list(self.deg_delta_loc)
        if self.beta0 == 0:
            f0 = -self.mu
            taus = [1] * len(taus)
        for index, beta in enumerate(betas):
            if beta == 0:
                degrees[index] = -self.g
                taus[index] = 1
        return ExtensionCandidate(self.mu_seq, tuple(degrees), f0, tuple(taus), self.beta0)

    def sort_key(self) -> Tuple:
        return (self.g, self.mu_seq, self.deg_delta_loc, self.f0_deg_delta, self.taus, self.beta0)

    def to_point_extension(self, point: MultiplePoint) -> PointExtension:
        """Full local record of the candidate, with E(0) the pullback itself.

        The exceptional weights are centered at -1/4, or at -1/2 when beta0 > 1/4,
        so that they stay in [-1, 0].
        """
        g = self.g
        degrees = LocalDegrees(point.name, {
            name: ((g - d) // 2, (g + d) // 2)
            for name, d in zip(point.components, self.deg_delta_loc)
        })
        sub_degree = (-g - self.f0_deg_delta) // 2
        center = -QUARTER if self.beta0 <= QUARTER else -HALF
        flag = FlagData(
            rank=2,
            weights=(center - self.beta0, center + self.beta0),
            gr_degrees=(sub_degree, -g - sub_degree),
        )
        permutations = {
            name: (1, 2) if tau == 1 else (2, 1)
            for name, tau in zip(point.components, self.taus)
        }
        return PointExtension(
            point=point.name,
            chern=rank2_chain_chern(point.name, self.mu_seq),
            degrees=degrees,
            flag=flag,
            permutations=permutations,
        )

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization."""
        return {
            "g": self.g,
            "mu_seq": list(self.mu_seq),
            "deg_delta_loc": list(self.deg_delta_loc),
            "f0_deg_delta": self.f0_deg_delta,
            "taus": list(self.taus),
            "beta0": str(self.beta0),
        }


def candidate_value(candidate: ExtensionCandidate, betas: Sequence[Fraction]) -> Fraction:
    """Local parabolic term of a candidate relative to the pullback."""
    candidate.validate_record(len(betas))
    return delta_par_loc_diff_rank2(
        candidate.delta_vb_loc, candidate.exceptional_flag, candidate.deg_delta_loc, betas
    )


def optimal_beta0(f0_deg_delta: int, taus: Sequence[int],
                  betas: Sequence[Fraction]) -> Tuple[Fraction, Fraction]:
    """Minimize beta0^2 + beta0 (f0 - 2 sum tau_i beta_i) over [0, 1/4].

    Returns:
        (beta0*, value of the beta0 terms at beta0*)
    """
    slope = f0_deg_delta - 2 * sum((tau * beta for tau, beta in zip(taus, betas)), Fraction(0))
    beta0 = min(max(-slope / 2, Fraction(0)), QUARTER)
    return beta0, beta0 * beta0 + beta0 * slope


def stationarity_residual(candidate: ExtensionCandidate, betas: Sequence[Fraction]) -> Fraction:
    """deg^delta(E_P, F0) + 2 beta0 - 2 sum tau_i beta_i; zero at interior optima."""
    weighted = sum((tau * beta for tau, beta in zip(candidate.taus, betas)), Fraction(0))
    return candidate.f0_deg_delta + 2 * candidate.beta0 - 2 * weighted


def pruning_bound(g: int, kappa: int) -> Fraction:
    """Lower bound (g^2 - 2g)/4 - (g+1) kappa / 2 on every candidate with g steps."""
    return Fraction(g * g - 2 * g, 4) - Fraction((g + 1) * kappa, 2)


@dataclass
class MinimizationReport:
    """Result of the search at one multiple point."""
    point: str
    kappa: int
    betas: Tuple[Fraction, ...]
    baseline: Fraction
    minimum: Fraction
    argmin: List[ExtensionCandidate]
    cap: int
    g_max_used: int
    prune: bool
    pruned_g_levels: int = 0
    pruned_sequences: int = 0
    evaluated: int = 0
    panov_ok: bool = True
    stationarity_ok: bool = True
    bound_ok: bool = True

    @property
    def local_minimum(self) -> Fraction:
        """Minimal local parabolic term (baseline plus relative minimum)."""
        return self.baseline + self.minimum

    @property
    def certified(self) -> bool:
        return self.panov_ok and self.stationarity_ok and self.bound_ok

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization."""
        return {
            "point": self.point,
            "kappa": self.kappa,
            "betas": [str(beta) for beta in self.betas],
            "baseline": str(self.baseline),
            "minimum_relative": str(self.minimum),
            "local_minimum": str(self.local_minimum),
            "argmin": [candidate.to_dict() for candidate in self.argmin],
            "cap": self.cap,
            "g_max_used": self.g_max_used,
            "prune": self.prune,
            "pruned": {"g_levels": self.pruned_g_levels, "sequences": self.pruned_sequences},
            "evaluated": self.evaluated,
            "panov_ok": self.panov_ok,
            "stationarity_ok": self.stationarity_ok,
            "bound_ok": self.bound_ok,
        }


def minimize_point(betas: Sequence[Fraction], config: SearchConfig,
                   point: str = "P", baseline: Fraction = Fraction(0)) -> MinimizationReport:
    """Exhaustive search with bound pruning over the rank-2 candidate space.

    Args:
        betas: beta_i of the incident components, in incidence order
        config: Enumeration cap and pruning switch
        point: Name used in the report
        baseline: Local term of the pullback, carried into the report

    Returns:
        MinimizationReport with every argmin in canonical lexicographic order

    Raises:
        InvariantViolation: If there are no incident components
    """
    betas = tuple(Fraction(beta) for beta in betas)
    kappa = len(betas)
    if kappa == 0:
        raise InvariantViolation("incident-components", f"no component passes through {point!r}")
    cap = config.resolve_cap(kappa)
    beta_sum = sum(betas, Fraction(0))
    tau_patterns = list(product((1, -1), repeat=kappa))
    beta0_terms: Dict[Tuple[int, Tuple[int, ...]], Tuple[Fraction, Fraction]] = {}

    best: Optional[Fraction] = None
    winners: List[ExtensionCandidate] = []
    report = MinimizationReport(
        point=point, kappa=kappa, betas=betas, baseline=baseline, minimum=Fraction(0),
        argmin=[], cap=cap, g_max_used=0, prune=config.prune,
    )

    for g in range(cap + 1):
        if config.prune and best is not None and pruning_bound(g, kappa) > best:
            report.pruned_g_levels += 1
            logger.debug(f"{point}: g = {g} pruned, bound {pruning_bound(g, kappa)} > {best}")
            if g >= 1 + kappa:
                report.pruned_g_levels += cap - g
                break
            continue
        report.g_max_used = g

        d_range = range(-g, g + 1, 2)
        d_grid = [(d, sum((beta * x for beta, x in zip(betas, d)), Fraction(0)))
                  for d in product(d_range, repeat=kappa)]

        for mu_seq in rank2_mu_sequences(g, cap):
            mu = mu_seq[-1] if mu_seq else 0
            vb = telescoped_delta_vb(mu_seq)
            if config.prune and best is not None and vb - Fraction(mu, 4) - g * beta_sum - beta_sum / 2 > best:
                report.pruned_sequences += 1
                continue
            for f0 in range(-mu, mu + 1, 2):
                for taus in tau_patterns:
                    key = (f0, taus)
                    if key not in beta0_terms:
                        beta0_terms[key] = optimal_beta0(f0, taus, betas)
                    beta0, beta0_part = beta0_terms[key]
                    for degrees, degree_part in d_grid:
                        report.evaluated += 1
                        value = vb + degree_part + beta0_part
                        if best is not None and value > best:
                            continue
                        candidate = ExtensionCandidate(mu_seq, degrees, f0, taus, beta0)
                        if best is None or value < best:
                            best = value
                            winners = [candidate]
                        else:
                            winners.append(candidate)

    unique = {candidate.canonical(betas) for candidate in winners}
    report.argmin = sorted(unique, key=ExtensionCandidate.sort_key)
    report.minimum = best if best is not None else Fraction(0)

    for candidate in report.argmin:
        candidate.validate(kappa, cap)
        if candidate.mu > kappa:
            report.panov_ok = False
        if 0 < candidate.beta0 < QUARTER and stationarity_residual(candidate, betas) != 0:
            report.stationarity_ok = False
        if report.minimum < pruning_bound(candidate.g, kappa):
            report.bound_ok = False

    logger.info(
        f"{point}: minimum {report.minimum} relative to the pullback over g <= {report.g_max_used}, "
        f"{len(report.argmin)} argmin(s), {report.evaluated} candidates evaluated"
    )
    return report


def incident_betas(bundle: ParabolicBundle, point: MultiplePoint) -> Tuple[Fraction, ...]:
    """beta_i of the rank-2 flags on the components through a point.

    Raises:
        InvariantViolation: If a flag has beta = 1/2, outside the search range [0, 1/2)
    """
    betas = []
    for name in point.components:
        flag = bundle.flags[name]
        beta = (flag.weights[1] - flag.weights[0]) / 2
        if beta >= HALF:
            raise InvariantViolation(
                "rank2-beta-range",
                f"component {name!r} through {point.name!r} has beta {beta}; "
                f"the minimizer needs beta in [0, 1/2)"
            )
        betas.append(Rank2Flag.from_flag(flag).beta)
    return tuple(betas)


def minimize(scenario: SurfaceScenario, bundle: ParabolicBundle, point: str,
             config: SearchConfig) -> MinimizationReport:
    """Minimize the local parabolic term at one multiple point of a scenario.

    Every argmin is turned into a full local record and re-evaluated with the
    general local formula.

    Raises:
        UnsupportedRankError: If the bundle is not of rank 2
        CheckFailure: If the general formula disagrees with the candidate value
    """
    if bundle.rank != 2:
        raise UnsupportedRankError("minimize", bundle.rank)
    multiple_point = scenario.multiple_point(point)
    baseline = delta_par_loc(pullback_extension(multiple_point, 2), bundle, scenario).baseline
    report = minimize_point(incident_betas(bundle, multiple_point), config, point, baseline)

    for candidate in report.argmin:
        local = delta_par_loc(candidate.to_point_extension(multiple_point), bundle, scenario)
        if local.relative != report.minimum:
            raise CheckFailure(
                f"argmin {candidate.to_dict()} at {point!r}: local formula gives {local.relative}, "
                f"search gives {report.minimum}"
            )
    return report


@dataclass
class GlobalMinimum:
    """Minimal discriminant over all extensions across every exceptional divisor."""
    global_term: Fraction
    reports: Dict[str, MinimizationReport]
    stable_restriction: bool = False
    warnings: List[str] = field(default_factory=list)

    @property
    def value(self) -> Fraction:
        return self.global_term + sum((report.local_minimum for report in self.reports.values()), Fraction(0))

    @property
    def bogomolov_ok(self) -> Optional[bool]:
        """Whether the minimum is nonnegative; None when stability is not asserted."""
        if not self.stable_restriction:
            return None
        return self.value >= 0

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization."""
        return {
            "delta_par_global": str(self.global_term),
            "delta_par_min": str(self.value),
            "points": {name: report.to_dict() for name, report in self.reports.items()},
            "stable_restriction": self.stable_restriction,
            "bogomolov_ok": self.bogomolov_ok,
        }


def global_minimum(scenario: SurfaceScenario, bundle: ParabolicBundle, config: SearchConfig,
                   stable_restriction: bool = False) -> GlobalMinimum:
    """Sum the global term and the independent per-point minima.

    Raises:
        UnsupportedRankError: If the bundle is not of rank 2
    """
    if bundle.rank != 2:
        raise UnsupportedRankError("global_minimum", bundle.rank)
    names = [point.name for point in scenario.multiple_points]
    reports = {name: minimize(scenario, bundle, name, config) for name in names}
    result = GlobalMinimum(
        global_term=delta_par_global(bundle, scenario),
        reports=reports,
        stable_restriction=stable_restriction,
    )
    if result.bogomolov_ok is False:
        logger.warning(f"Minimal discriminant {result.value} is negative for a bundle declared stable")
    return result
