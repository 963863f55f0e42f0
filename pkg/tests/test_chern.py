"""Tests for global parabolic Chern invariants."""

import random
from fractions import Fraction

import pytest

from parabolic_chern.chern import (ParabolicBundle, bundle_delta_vb, ch1_par,
                                   ch2_par, delta_par,
                                   delta_par_from_characters, delta_par_rank2,
                                   delta_vb, global_invariants,
                                   missing_permutations, require_valid,
                                   tensor_line_bundle, validate_bundle)
from parabolic_chern.errors import InvariantViolation, UnsupportedRankError
from parabolic_chern.parastruct import (CrossingPermutation, FlagData,
                                        shift_weights)
from parabolic_chern.sampling import (random_fraction, random_line_bundle,
                                      random_scenario)
from parabolic_chern.surface import ChowModel, Crossing, DivisorSurface

SEEDS = range(100)


def flag(weights, degrees):
    return FlagData(len(weights), tuple(Fraction(w) for w in weights), tuple(degrees))


@pytest.fixture
def plane():
    """Projective plane."""
    return ChowModel(("H",), ((1,),))


@pytest.fixture
def two_lines(plane):
    """Two lines crossing once."""
    h = plane.basis_class("H")
    return DivisorSurface(plane, {"L1": h, "L2": h}, (Crossing("x", ("L1", "L2")),))


@pytest.fixture
def one_line(plane):
    """A single line."""
    return DivisorSurface(plane, {"D": plane.basis_class("H")})


class TestDeltaVb:
    """Test the vector bundle discriminant."""

    def test_zero(self):
        """ch1^2 = 0 and ch2 = 0 give 0."""
        assert delta_vb(Fraction(0), Fraction(0), 2) == 0

    def test_arithmetic(self):
        """r = 2, ch1^2 = 4, ch2 = 3/2."""
        assert delta_vb(Fraction(4), Fraction(3, 2), 2) == Fraction(-1, 2)

    def test_matches_c2_form(self):
        """Delta = c2 - (r-1)/(2r) c1^2 when ch2 = c1^2/2 - c2."""
        c1_sq, c2, r = Fraction(5), Fraction(7, 3), 3
        assert delta_vb(c1_sq, c1_sq / 2 - c2, r) == c2 - Fraction(r - 1, 2 * r) * c1_sq

    def test_nonpositive_rank(self):
        """r <= 0 is refused."""
        with pytest.raises(InvariantViolation, match="positive-rank"):
            delta_vb(Fraction(1), Fraction(0), 0)


class TestCharacters:
    """Test ch1^Par and ch2^Par."""

    def test_zero_weights(self, plane, one_line):
        """Zero weights leave the characters alone."""
        bundle = ParabolicBundle(2, plane.divisor({"H": 1}), Fraction(-3), {"D": flag((0, 0), (0, 1))})
        assert ch1_par(bundle, one_line) == bundle.ch1
        assert ch2_par(bundle, one_line) == bundle.ch2

    def test_half_weights_add_the_component(self, plane, one_line):
        """Weights (-1/2, -1/2) give ch1^Par = ch1 + [D]."""
        bundle = ParabolicBundle(2, plane.zero(), Fraction(0), {"D": flag(("-1/2", "-1/2"), (0, 0))})
        assert ch1_par(bundle, one_line) == plane.basis_class("H")

    def test_uniform_shift_moves_ch1_par(self, plane, one_line):
        """Shifting the weights on D by c changes ch1^Par by -r c [D]."""
        bundle = ParabolicBundle(2, plane.zero(), Fraction(0), {"D": flag(("-3/4", "-1/4"), (0, 0))})
        c = Fraction(1, 8)
        shifted = bundle.with_flags({"D": shift_weights(bundle.flags["D"], c)})
        difference = ch1_par(shifted, one_line) - ch1_par(bundle, one_line)
        assert difference == plane.basis_class("H") * (-2 * c)

    def test_rank1_crossing_terms(self, plane, two_lines):
        """Rank 1 on two crossing lines: every correction term by hand."""
        bundle = ParabolicBundle(1, plane.divisor({"H": 1}), Fraction(1, 2), {
            "L1": flag(("-1/3",), (1,)),
            "L2": flag(("-1/2",), (1,)),
        })
        expected = (Fraction(1, 2) + Fraction(1, 3) + Fraction(1, 2)
                    + Fraction(1, 18) + Fraction(1, 8) + Fraction(1, 6))
        assert ch2_par(bundle, two_lines) == expected
        assert ch1_par(bundle, two_lines) == plane.divisor({"H": Fraction(11, 6)})

    def test_rank1_discriminant_vanishes(self, plane, two_lines):
        """A parabolic line bundle has zero discriminant on both paths."""
        bundle = ParabolicBundle(1, plane.divisor({"H": 1}), Fraction(1, 2), {
            "L1": flag(("-1/3",), (1,)),
            "L2": flag(("-1/2",), (1,)),
        })
        assert delta_par(bundle, two_lines) == 0
        assert delta_par_from_characters(bundle, two_lines) == 0


class TestDeltaPar:
    """Test the parabolic discriminant."""

    def test_zero_betas(self, plane, one_line):
        """All beta zero gives Delta^Vb."""
        bundle = ParabolicBundle(2, plane.divisor({"H": 1}), Fraction(-1), {"D": flag(("-1/2", "-1/2"), (0, 1))})
        assert delta_par(bundle, one_line) == bundle_delta_vb(bundle, one_line)

    def test_quarter_beta_on_a_line(self, plane, one_line):
        """beta = 1/4, deg^delta = 0, [D]^2 = 1 lowers Delta by 1/16."""
        bundle = ParabolicBundle(2, plane.divisor({"H": 2}), Fraction(0), {"D": flag(("-3/4", "-1/4"), (1, 1))})
        expected = bundle_delta_vb(bundle, one_line) - Fraction(1, 16)
        assert delta_par(bundle, one_line) == expected
        assert delta_par_rank2(bundle, one_line) == expected

    def test_rank2_negative_curve(self):
        """beta = 1/4, deg^delta = -2, [D]^2 = -1."""
        chow = ChowModel(("E",), ((-1,),))
        surface = DivisorSurface(chow, {"D": chow.basis_class("E")})
        bundle = ParabolicBundle(2, chow.zero(), Fraction(0), {"D": flag(("-3/4", "-1/4"), (1, -1))})
        assert delta_par_rank2(bundle, surface) == Fraction(-1, 2) + Fraction(1, 16)
        assert delta_par(bundle, surface) == Fraction(-7, 16)

    def test_full_spread_weights(self, plane, one_line):
        """Weights (-1, 0) give beta = 1/2, which both formulas accept."""
        bundle = ParabolicBundle(2, plane.zero(), Fraction(0), {"D": flag((-1, 0), (-1, 1))})
        assert delta_par(bundle, one_line) == Fraction(3, 4)
        assert delta_par_rank2(bundle, one_line) == delta_par(bundle, one_line)
        data = global_invariants(bundle, one_line).to_dict()
        assert data["delta_par_rank2"] == "3/4"
        assert data["paths_agree"] is True

    def test_full_spread_weights_at_a_crossing(self, plane, two_lines):
        """beta = 1/2 on both lines of a crossing."""
        flags = {"L1": flag((-1, 0), (0, 0)), "L2": flag((-1, 0), (0, 0))}
        bundle = ParabolicBundle(2, plane.zero(), Fraction(0), flags)
        assert delta_par(bundle, two_lines) == -1
        assert delta_par_rank2(bundle, two_lines) == -1

    def test_rank2_formula_refuses_other_ranks(self, plane, one_line):
        """The rank-2 formula needs rank 2."""
        bundle = ParabolicBundle(1, plane.zero(), Fraction(0), {"D": flag((0,), (0,))})
        with pytest.raises(UnsupportedRankError):
            delta_par_rank2(bundle, one_line)

    def test_transposition_changes_sign_of_crossing_term(self, plane, two_lines):
        """Swapping the flags at the crossing flips the crossing contribution."""
        flags = {"L1": flag(("-3/4", "-1/4"), (0, 0)), "L2": flag(("-5/8", "-3/8"), (0, 0))}
        same = ParabolicBundle(2, plane.zero(), Fraction(0), flags)
        swapped = ParabolicBundle(2, plane.zero(), Fraction(0), flags,
                                  (CrossingPermutation("x", "L1", "L2", (2, 1)),))
        crossing = 2 * Fraction(1, 4) * Fraction(1, 8)
        assert delta_par(swapped, two_lines) - delta_par(same, two_lines) == 2 * crossing


class TestBundleValidation:
    """Test bundle validation against a surface."""

    def test_missing_permutation_warns(self, plane, two_lines):
        """An omitted crossing permutation defaults to identity with a warning."""
        bundle = ParabolicBundle(2, plane.zero(), Fraction(0), {
            "L1": flag((0, 0), (0, 0)), "L2": flag((0, 0), (0, 0)),
        })
        result = validate_bundle(bundle, two_lines)
        assert result.is_valid
        assert missing_permutations(bundle, two_lines) == ["x (L1, L2)"]
        assert any("identity permutation assumed" in w for w in result.warnings)

    def test_degree_sum_mismatch(self, plane, one_line):
        """Graded degrees must sum to ch1.[D]."""
        bundle = ParabolicBundle(2, plane.divisor({"H": 1}), Fraction(0), {"D": flag((0, 0), (0, 0))})
        with pytest.raises(InvariantViolation, match="gr-degree-sum"):
            require_valid(bundle, one_line)

    def test_missing_flag(self, plane, two_lines):
        """Every component carries a flag."""
        bundle = ParabolicBundle(2, plane.zero(), Fraction(0), {"L1": flag((0, 0), (0, 0))})
        assert any(error.startswith("flag-per-component") for error in validate_bundle(bundle, two_lines).errors)

    def test_flag_rank_mismatch(self, plane):
        """Flags have the bundle's rank."""
        with pytest.raises(InvariantViolation, match="flag-rank"):
            ParabolicBundle(2, plane.zero(), Fraction(0), {"D": flag((0,), (0,))})

    def test_inconsistent_inverse_permutations(self, plane):
        """A pair and its reverse must carry inverse permutations."""
        bundle = ParabolicBundle(3, plane.zero(), Fraction(0), {}, (
            CrossingPermutation("x", "L1", "L2", (2, 3, 1)),
            CrossingPermutation("x", "L2", "L1", (2, 3, 1)),
        ))
        with pytest.raises(InvariantViolation, match="inverse-permutations"):
            bundle.permutation("x", "L1", "L2")

    def test_global_invariants_report(self, plane, one_line):
        """Rank 2 reports carry the rank-2 path, and the paths agree."""
        bundle = ParabolicBundle(2, plane.divisor({"H": 2}), Fraction(0), {"D": flag(("-3/4", "-1/4"), (1, 1))})
        data = global_invariants(bundle, one_line).to_dict()
        assert data["paths_agree"] is True
        assert data["delta_par_rank2"] == data["delta_par"]


class TestTensorLineBundle:
    """Test twisting by line bundles."""

    def test_zero_line_bundle(self, plane, one_line):
        """Twisting by O is the identity."""
        bundle = ParabolicBundle(2, plane.divisor({"H": 1}), Fraction(-1), {"D": flag(("-3/4", "-1/4"), (0, 1))})
        assert tensor_line_bundle(bundle, plane.zero(), one_line) == bundle

    def test_non_integral_refused(self, plane, one_line):
        """Only integral classes are line bundles."""
        bundle = ParabolicBundle(2, plane.zero(), Fraction(0), {"D": flag((0, 0), (0, 0))})
        with pytest.raises(InvariantViolation, match="integral-line-bundle"):
            tensor_line_bundle(bundle, plane.divisor({"H": Fraction(1, 2)}), one_line)

    def test_degrees_follow_the_twist(self, plane, one_line):
        """Each graded degree moves by L.[D]."""
        bundle = ParabolicBundle(2, plane.divisor({"H": 1}), Fraction(-1), {"D": flag(("-3/4", "-1/4"), (0, 1))})
        twisted = tensor_line_bundle(bundle, plane.divisor({"H": 2}), one_line)
        assert twisted.flags["D"].gr_degrees == (2, 3)
        assert twisted.ch1 == plane.divisor({"H": 5})
        require_valid(twisted, one_line)


class TestRandomizedIdentities:
    """Exact identities on seeded random scenarios of rank 1 to 3."""

    @pytest.mark.parametrize("seed", SEEDS)
    def test_tensor_invariance(self, seed):
        """Delta^Vb and Delta^Par are unchanged by a twist."""
        scenario, bundle = random_scenario(seed)
        surface = scenario.pairwise_surface()
        line = random_line_bundle(random.Random(seed), scenario.chow)
        twisted = tensor_line_bundle(bundle, line, surface)
        assert bundle_delta_vb(twisted, surface) == bundle_delta_vb(bundle, surface)
        assert delta_par(twisted, surface) == delta_par(bundle, surface)

    @pytest.mark.parametrize("seed", SEEDS)
    def test_alpha_tot_cancellation(self, seed):
        """Uniform shifts of the weights on each component leave Delta^Par unchanged."""
        scenario, bundle = random_scenario(seed)
        surface = scenario.pairwise_surface()
        rng = random.Random(seed + 7919)
        flags = {
            name: shift_weights(f, random_fraction(rng, -1 - f.weights[0], -f.weights[-1]))
            for name, f in bundle.flags.items()
        }
        shifted = bundle.with_flags(flags)
        assert delta_par(shifted, surface) == delta_par(bundle, surface)
        assert delta_par_from_characters(shifted, surface) == delta_par(bundle, surface)

    @pytest.mark.parametrize("seed", SEEDS)
    def test_dual_path(self, seed):
        """The trace-free formula and the character formula agree."""
        scenario, bundle = random_scenario(seed)
        surface = scenario.pairwise_surface()
        assert delta_par(bundle, surface) == delta_par_from_characters(bundle, surface)

    @pytest.mark.parametrize("seed", SEEDS)
    def test_rank2_formula_agrees(self, seed):
        """The rank-2 formula agrees with the general one."""
        scenario, bundle = random_scenario(seed, rank=2)
        surface = scenario.pairwise_surface()
        assert delta_par_rank2(bundle, surface) == delta_par(bundle, surface)
