"""Tests for the rank-2 local minimizer."""

import random
from fractions import Fraction
from itertools import product
from pathlib import Path

import pytest

from parabolic_chern.chern import delta_par
from parabolic_chern.elemtrans import rank2_mu_sequences
from parabolic_chern.errors import InvariantViolation, UnsupportedRankError
from parabolic_chern.localize import assemble_blown_up, delta_par_global
from parabolic_chern.minimize import (ExtensionCandidate, candidate_value,
                                      global_minimum, incident_betas,
                                      minimize, minimize_point,
                                      optimal_beta0, pruning_bound,
                                      stationarity_residual)
from parabolic_chern.parastruct import FlagData
from parabolic_chern.sampling import (random_bundle, random_scenario,
                                      random_surface)
from parabolic_chern.scenario import ScenarioFile
from parabolic_chern.search_config import SearchConfig
from parabolic_chern.surface import MultiplePoint

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"
QUARTER = Fraction(1, 4)


def enumerate_candidates(betas, cap):
    """Every candidate up to mu = cap with its optimal beta0, ties collapsed."""
    found = set()
    for g in range(cap + 1):
        for mu_seq in rank2_mu_sequences(g, cap):
            mu = mu_seq[-1] if mu_seq else 0
            for f0 in range(-mu, mu + 1, 2):
                for taus in product((1, -1), repeat=len(betas)):
                    beta0, _ = optimal_beta0(f0, taus, betas)
                    for degrees in product(range(-g, g + 1, 2), repeat=len(betas)):
                        found.add(ExtensionCandidate(mu_seq, degrees, f0, taus, beta0).canonical(betas))
    return sorted(found, key=ExtensionCandidate.sort_key)


@pytest.fixture
def split_scenario():
    """O + O(1) on the plane with three quarter-weight lines through P."""
    return ScenarioFile.load(SCENARIOS / "split_o_o1.json")


class TestCandidateValue:
    """Test the relative local term of a candidate."""

    def test_pullback_is_zero(self):
        """The empty chain with beta0 = 0 is the reference."""
        candidate = ExtensionCandidate((), (0, 0, 0), 0, (1, 1, 1))
        assert candidate_value(candidate, [QUARTER] * 3) == 0

    def test_one_step_zero_weights(self):
        """With every beta_i = 0 only Delta^Vb_loc and the beta0 terms remain."""
        candidate = ExtensionCandidate((1,), (-1, -1, -1), -1, (1, 1, 1), QUARTER)
        assert candidate_value(candidate, [0, 0, 0]) == Fraction(1, 16)

    def test_quarter_weights(self):
        """The scenario extension of O + O(1) sits 1/16 below the pullback."""
        candidate = ExtensionCandidate((1,), (1, -1, 1), -1, (1, 1, 1), QUARTER)
        assert candidate_value(candidate, [QUARTER] * 3) == Fraction(-1, 16)

    def test_against_formula(self):
        """Every term of the closed form is present."""
        betas = [Fraction(1, 8), Fraction(3, 8)]
        candidate = ExtensionCandidate((1, 2), (0, -2), 0, (1, -1), Fraction(1, 5))
        expected = (Fraction(1) + Fraction(-6, 8) + Fraction(1, 25)
                    - 2 * Fraction(1, 5) * (Fraction(1, 8) - Fraction(3, 8)))
        assert candidate_value(candidate, betas) == expected

    @pytest.mark.parametrize("candidate, invariant", [
        (ExtensionCandidate((2,), (0, 0), 0, (1, 1)), "mu-sequence"),
        (ExtensionCandidate((1,), (1,), 1, (1,)), "complete-local-record"),
        (ExtensionCandidate((1,), (0, 1), 1, (1, 1)), "deg-delta-loc-range"),
        (ExtensionCandidate((1,), (1, 1), -3, (1, 1)), "exceptional-flag-degree"),
        (ExtensionCandidate((1,), (1, 1), 0, (1, 1)), "exceptional-flag-parity"),
        (ExtensionCandidate((1,), (1, 1), 3, (1, 1)), "exceptional-flag-cap"),
        (ExtensionCandidate((1,), (1, 1), 1, (1, 1), Fraction(1, 3)), "beta0-range"),
        (ExtensionCandidate((1,), (1, 1), 1, (1, 2)), "tau-sign"),
    ])
    def test_invalid(self, candidate, invariant):
        """Out-of-range candidates are refused with the invariant name."""
        with pytest.raises(InvariantViolation) as exc_info:
            candidate.validate(2)
        assert exc_info.value.invariant == invariant

    def test_cap(self):
        """mu above the cap is outside the search space."""
        with pytest.raises(InvariantViolation, match="enumeration-cap"):
            ExtensionCandidate((1, 4), (0, 0), 0, (1, 1)).validate(2, cap=3)

    @pytest.mark.parametrize("candidate", [
        ExtensionCandidate((1,), (1, 1), 3, (1, 1)),
        ExtensionCandidate((1,), (1, 1), 1, (1, 1), Fraction(3, 8)),
    ])
    def test_record_beyond_search_range(self, candidate):
        """Records outside the searched range are valid extension data."""
        candidate.validate_record(2)
        with pytest.raises(InvariantViolation):
            candidate.validate(2)

    def test_value_above_quarter(self):
        """beta0 = 3/8 evaluates with the same closed form."""
        candidate = ExtensionCandidate((1,), (1, -1, 1), -1, (1, 1, 1), Fraction(3, 8))
        assert candidate_value(candidate, [QUARTER] * 3) == Fraction(-19, 64)

    @pytest.mark.parametrize("beta0, weights", [
        (QUARTER, (Fraction(-1, 2), Fraction(0))),
        (Fraction(3, 8), (Fraction(-7, 8), Fraction(-1, 8))),
    ])
    def test_exceptional_weights(self, beta0, weights):
        """Exceptional weights stay in [-1, 0] with spread 2 beta0."""
        point = MultiplePoint("P", ("D1", "D2", "D3"))
        candidate = ExtensionCandidate((1,), (1, -1, 1), -1, (1, 1, 1), beta0)
        assert candidate.to_point_extension(point).flag.weights == weights


class TestOptimalBeta0:
    """Test the closed-form exceptional weight."""

    @pytest.mark.parametrize("f0, taus, betas, expected", [
        (0, (1,), (0,), (0, 0)),
        (-1, (1,), (0,), (QUARTER, Fraction(-3, 16))),
        (-1, (1,), (QUARTER,), (QUARTER, Fraction(-5, 16))),
        (0, (1,), (Fraction(1, 8),), (Fraction(1, 8), Fraction(-1, 64))),
        (1, (-1,), (QUARTER,), (0, 0)),
    ])
    def test_values(self, f0, taus, betas, expected):
        """Clamped vertex of the parabola."""
        assert optimal_beta0(f0, taus, [Fraction(b) for b in betas]) == expected

    def test_interior_optimum_is_stationary(self):
        """An interior beta0* zeroes the stationarity residual."""
        betas = [Fraction(1, 8)]
        beta0, _ = optimal_beta0(0, (1,), betas)
        candidate = ExtensionCandidate((), (0,), 0, (1,), beta0)
        assert stationarity_residual(candidate, betas) == 0


class TestPruningBound:
    """Test the lower bound used for pruning."""

    def test_value(self):
        """(81 - 18)/4 - 10 * 3/2 = 3/4."""
        assert pruning_bound(9, 3) == Fraction(3, 4)

    def test_first_positive_level(self):
        """For kappa = 3 the bound first becomes positive at g = 9."""
        assert next(g for g in range(50) if pruning_bound(g, 3) > 0) == 9

    def test_bounds_every_candidate(self):
        """No candidate with g steps goes below the bound."""
        betas = [QUARTER, Fraction(1, 8)]
        report = minimize_point(betas, SearchConfig(cap=4, prune=False))
        for candidate in report.argmin:
            assert candidate_value(candidate, betas) >= pruning_bound(candidate.g, 2)
        assert report.bound_ok


class TestMinimizePoint:
    """Test the exhaustive search at one point."""

    def test_zero_weights(self):
        """All beta_i = 0 gives minimum 0 at the pullback only."""
        report = minimize_point([0, 0, 0], SearchConfig(cap=4))
        assert report.minimum == 0
        assert report.argmin == [ExtensionCandidate((), (0, 0, 0), 0, (1, 1, 1))]

    def test_quarter_weights(self):
        """Three quarter-weight lines: two steps and beta0 = 1/4."""
        report = minimize_point([QUARTER] * 3, SearchConfig())
        assert report.cap == 3
        assert report.minimum == Fraction(-21, 16)
        assert report.argmin == [ExtensionCandidate((1, 2), (-2, -2, -2), -2, (1, 1, 1), QUARTER)]
        assert report.certified

    @pytest.mark.parametrize("betas", [
        (QUARTER, Fraction(1, 8)),
        (Fraction(0), Fraction(3, 8)),
        (Fraction(1, 3), Fraction(1, 3)),
    ])
    def test_pruning_is_exact(self, betas):
        """Pruned and unpruned searches find the same minimum and argmin."""
        pruned = minimize_point(betas, SearchConfig(cap=5))
        full = minimize_point(betas, SearchConfig(cap=5, prune=False))
        assert (pruned.minimum, pruned.argmin) == (full.minimum, full.argmin)
        assert pruned.evaluated <= full.evaluated

    @pytest.mark.parametrize("betas", [
        (QUARTER, QUARTER, QUARTER),
        (Fraction(0), Fraction(1, 8), QUARTER),
    ])
    def test_pruning_is_exact_three_lines(self, betas):
        """kappa = 3 up to mu = 8: pruning never changes the result."""
        pruned = minimize_point(betas, SearchConfig(cap=8))
        full = minimize_point(betas, SearchConfig(cap=8, prune=False))
        assert (pruned.minimum, pruned.argmin) == (full.minimum, full.argmin)

    def test_short_chains_suffice_above_kappa(self):
        """With the cap at 8 every argmin still has mu <= kappa = 3."""
        wide = minimize_point([QUARTER] * 3, SearchConfig(cap=8))
        narrow = minimize_point([QUARTER] * 3, SearchConfig())
        assert wide.cap == 8
        assert (wide.minimum, wide.argmin) == (narrow.minimum, narrow.argmin)
        assert all(candidate.g <= 3 and candidate.mu <= 3 for candidate in wide.argmin)
        assert wide.panov_ok

    def test_argmin_sorted(self):
        """Ties are listed in lexicographic order."""
        report = minimize_point([0, QUARTER], SearchConfig(cap=3))
        keys = [candidate.sort_key() for candidate in report.argmin]
        assert keys == sorted(keys)

    def test_no_components(self):
        """A point needs at least one incident component."""
        with pytest.raises(InvariantViolation, match="incident-components"):
            minimize_point([], SearchConfig())

    def test_to_dict(self):
        """Rationals are serialized as strings."""
        data = minimize_point([QUARTER] * 3, SearchConfig(), point="P", baseline=Fraction(9, 16)).to_dict()
        assert data["minimum_relative"] == "-21/16"
        assert data["local_minimum"] == "-3/4"
        assert data["argmin"][0]["beta0"] == "1/4"


class TestMinimizeScenario:
    """Test minimization on full scenarios."""

    def test_split(self, split_scenario):
        """The general local formula reproduces the search minimum."""
        report = minimize(split_scenario.surface, split_scenario.bundle, "P", SearchConfig())
        assert report.baseline == Fraction(9, 16)
        assert report.local_minimum == Fraction(-3, 4)

    def test_triple_point(self):
        """Mixed weights at a triple point."""
        scenario = ScenarioFile.load(SCENARIOS / "triple_point.json")
        report = minimize(scenario.surface, scenario.bundle, "P", SearchConfig())
        assert report.minimum == Fraction(-1, 2)
        assert report.local_minimum == Fraction(-31, 64)

    def test_global(self, split_scenario):
        """Global term plus the local minima."""
        result = global_minimum(split_scenario.surface, split_scenario.bundle, SearchConfig())
        assert result.global_term == Fraction(7, 16)
        assert result.value == Fraction(-5, 16)
        assert result.bogomolov_ok is None
        assert global_minimum(split_scenario.surface, split_scenario.bundle, SearchConfig(),
                              stable_restriction=True).bogomolov_ok is False

    def test_two_points_joint_enumeration(self):
        """Jointly chosen extensions at P and Q reach exactly the sum of the per-point minima."""
        scenario = ScenarioFile.load(SCENARIOS / "two_points.json")
        surface, bundle = scenario.surface, scenario.bundle
        config = SearchConfig(cap=1)
        choices = {
            point.name: [candidate.to_point_extension(point)
                         for candidate in enumerate_candidates(incident_betas(bundle, point), config.cap)]
            for point in surface.multiple_points
        }
        values = []
        for at_p, at_q in product(choices["P"], choices["Q"]):
            blown_up, blown_bundle = assemble_blown_up(surface, bundle, {"P": at_p, "Q": at_q})
            values.append(delta_par(blown_bundle, blown_up.surface))
        assert min(values) == global_minimum(surface, bundle, config).value

    def test_half_beta_is_outside_the_search(self, split_scenario):
        """Weights (-1, 0) on an incident line are refused by the minimizer."""
        bundle = split_scenario.bundle
        flags = dict(bundle.flags)
        flags["D1"] = FlagData(2, (Fraction(-1), Fraction(0)), (0, 0))
        point = split_scenario.surface.multiple_point("P")
        with pytest.raises(InvariantViolation, match="rank2-beta-range"):
            incident_betas(bundle.with_flags(flags), point)

    def test_no_points(self):
        """Without multiple points the minimum is the global term."""
        rng = random.Random(5)
        surface = random_surface(rng, points=0)
        bundle = random_bundle(rng, surface, rank=2)
        result = global_minimum(surface, bundle, SearchConfig())
        assert result.reports == {}
        assert result.value == delta_par_global(bundle, surface)

    def test_rank_must_be_two(self):
        """Rank 1 and 3 are refused."""
        for rank in (1, 3):
            surface, bundle = random_scenario(11, rank=rank)
            with pytest.raises(UnsupportedRankError):
                global_minimum(surface, bundle, SearchConfig())
