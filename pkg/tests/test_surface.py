"""Tests for divisor classes, the intersection pairing and blow-ups."""

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis.strategies import fractions, lists

from parabolic_chern.errors import InvariantViolation
from parabolic_chern.surface import (BlowUp, ChowModel, Crossing, DivisorClass,
                                     MultiplePoint, SurfaceScenario, blow_up,
                                     pair)


@pytest.fixture
def plane():
    """Projective plane: one class H with H^2 = 1."""
    return ChowModel(("H",), ((1,),))


@pytest.fixture
def quadric():
    """P1 x P1 with classes A, B, A.B = 1."""
    return ChowModel(("A", "B"), ((0, 1), (1, 0)))


@pytest.fixture
def triple_point(plane):
    """Three lines through P plus a fourth line in general position."""
    h = plane.basis_class("H")
    components = {"D1": h, "D2": h, "D3": h, "D4": h}
    crossings = (
        Crossing("y14", ("D1", "D4")),
        Crossing("y24", ("D2", "D4")),
        Crossing("y34", ("D3", "D4")),
    )
    return SurfaceScenario(plane, components, crossings, (MultiplePoint("P", ("D1", "D2", "D3")),))


def two_coefficients():
    return lists(fractions(max_denominator=20), min_size=2, max_size=2)


class TestChowModel:
    """Test ChowModel validation."""

    def test_rejects_asymmetric_matrix(self):
        """An asymmetric intersection matrix violates symmetry."""
        with pytest.raises(InvariantViolation, match="symmetric-intersection-matrix"):
            ChowModel(("A", "B"), ((0, 1), (2, 0)))

    def test_rejects_rational_entries(self):
        """Pairings of divisors on a smooth surface are integers."""
        with pytest.raises(InvariantViolation, match="integral-intersection-matrix"):
            ChowModel(("A",), ((Fraction(1, 2),),))

    def test_rejects_bad_exceptional_class(self):
        """An exceptional class must square to -1 and be orthogonal to the rest."""
        with pytest.raises(InvariantViolation, match="exceptional-class"):
            ChowModel(("H", "E"), ((1, 1), (1, -1)), (False, True))

    def test_rejects_duplicate_names(self):
        """Basis names are distinct."""
        with pytest.raises(InvariantViolation, match="distinct-basis-names"):
            ChowModel(("H", "H"), ((1, 0), (0, 1)))

    def test_divisor_from_mapping(self, quadric):
        """Missing names get coefficient zero."""
        cls = quadric.divisor({"B": 3})
        assert cls.coefficients == (Fraction(0), Fraction(3))


class TestPair:
    """Test the intersection pairing."""

    @given(two_coefficients(), two_coefficients(), two_coefficients(), fractions(max_denominator=20))
    def test_bilinear_and_symmetric(self, a, b, c, scalar):
        """pair is symmetric and linear in each argument."""
        chow = ChowModel(("A", "B"), ((2, 1), (1, -3)))
        x = DivisorClass(chow.basis_names, a)
        y = DivisorClass(chow.basis_names, b)
        z = DivisorClass(chow.basis_names, c)
        assert pair(x, y, chow) == pair(y, x, chow)
        assert pair(x + z, y, chow) == pair(x, y, chow) + pair(z, y, chow)
        assert pair(x * scalar, y, chow) == scalar * pair(x, y, chow)

    def test_zero_pairs_to_zero(self, quadric):
        """pair(a, 0) = 0."""
        a = quadric.divisor({"A": 2, "B": 5})
        assert pair(a, quadric.zero(), quadric) == 0

    def test_basis_mismatch(self, plane, quadric):
        """Classes over another basis are refused."""
        with pytest.raises(InvariantViolation, match="basis-match"):
            pair(plane.basis_class("H"), plane.basis_class("H"), quadric)

    def test_integral_classes_pair_to_integers(self, quadric):
        """Integral classes give integral pairings."""
        a = quadric.divisor({"A": 2, "B": -1})
        b = quadric.divisor({"A": 3, "B": 4})
        assert pair(a, b, quadric) == 5
        assert pair(a, b, quadric).denominator == 1


class TestSurfaceScenario:
    """Test scenario validation."""

    def test_valid_triple_point(self, triple_point):
        """The triple point scenario validates."""
        assert triple_point.multiple_point("P").kappa == 3

    def test_multiple_point_needs_three_components(self):
        """Two components do not make a multiple point."""
        with pytest.raises(InvariantViolation, match="multiple-point-size"):
            MultiplePoint("P", ("D1", "D2"))

    def test_repeated_incident_component(self):
        """Incident components are pairwise distinct."""
        with pytest.raises(InvariantViolation, match="distinct-incident-components"):
            MultiplePoint("P", ("D1", "D1", "D2"))

    def test_duplicate_point_names(self, plane):
        """A crossing and a multiple point cannot share a name."""
        h = plane.basis_class("H")
        components = {"D1": h, "D2": h, "D3": h, "D4": h}
        crossings = (Crossing("P", ("D1", "D4")), Crossing("y24", ("D2", "D4")), Crossing("y34", ("D3", "D4")))
        with pytest.raises(InvariantViolation, match="distinct-point-names"):
            SurfaceScenario(plane, components, crossings, (MultiplePoint("P", ("D1", "D2", "D3")),))

    def test_undeclared_component(self, plane):
        """Points may only reference declared components."""
        h = plane.basis_class("H")
        with pytest.raises(InvariantViolation, match="declared-components"):
            SurfaceScenario(plane, {"D1": h}, (Crossing("y", ("D1", "D9")),))

    def test_crossing_count_must_match_pairing(self, plane):
        """Two lines meet once; a missing crossing is an error."""
        h = plane.basis_class("H")
        with pytest.raises(InvariantViolation, match="crossing-count"):
            SurfaceScenario(plane, {"D1": h, "D2": h})

    def test_base_with_exceptional_class_rejected(self):
        """Only one round of blow-ups is modelled."""
        chow = ChowModel(("H", "E"), ((1, 0), (0, -1)), (False, True))
        with pytest.raises(InvariantViolation, match="single-blow-up"):
            SurfaceScenario(chow, {})

    def test_pairwise_surface_reads_points_as_crossings(self, triple_point):
        """Each incident pair at P becomes a crossing named P."""
        surface = triple_point.pairwise_surface()
        at_p = [crossing for crossing in surface.crossings if crossing.name == "P"]
        assert len(at_p) == 3
        assert len(surface.crossings) == 6


class TestBlowUp:
    """Test the blow-up at multiple points."""

    def test_exceptional_class_properties(self, triple_point):
        """P^2 = -1 and P is orthogonal to every pullback."""
        blown = blow_up(triple_point)
        p = blown.exceptional["P"]
        h = blown.pullback(triple_point.chow.basis_class("H"))
        assert pair(p, p, blown.chow) == -1
        assert pair(p, h, blown.chow) == 0

    def test_pullback_preserves_pairing(self, triple_point):
        """pair(phi*A, phi*B) = A.B."""
        blown = blow_up(triple_point)
        a = triple_point.chow.divisor({"H": 2})
        b = triple_point.chow.divisor({"H": -3})
        assert pair(blown.pullback(a), blown.pullback(b), blown.chow) == pair(a, b, triple_point.chow)

    def test_strict_transforms(self, triple_point):
        """Incident strict transforms lose one per point; others are pullbacks."""
        blown = blow_up(triple_point)
        chow = blown.chow
        p = blown.exceptional["P"]
        for name in ("D1", "D2", "D3"):
            strict = blown.strict_transforms[name]
            assert pair(strict, strict, chow) == 0
            assert pair(strict, p, chow) == 1
        d4 = blown.strict_transforms["D4"]
        assert pair(d4, d4, chow) == 1
        assert pair(d4, p, chow) == 0
        assert pair(blown.strict_transforms["D1"], blown.strict_transforms["D2"], chow) == 0
        assert pair(blown.strict_transforms["D1"], d4, chow) == 1

    def test_two_points_on_one_component(self, plane):
        """A conic through two blown-up points drops from 4 to 2."""
        h = plane.basis_class("H")
        components = {"C": h * 2, "L1": h, "L2": h, "L3": h, "L4": h}
        crossings = (
            Crossing("c1", ("C", "L1")), Crossing("c2", ("C", "L2")),
            Crossing("c3", ("C", "L3")), Crossing("c4", ("C", "L4")),
            Crossing("x13", ("L1", "L3")), Crossing("x14", ("L1", "L4")),
            Crossing("x23", ("L2", "L3")), Crossing("x24", ("L2", "L4")),
        )
        points = (MultiplePoint("P", ("C", "L1", "L2")), MultiplePoint("Q", ("C", "L3", "L4")))
        scenario = SurfaceScenario(plane, components, crossings, points)
        blown = blow_up(scenario)
        conic = blown.strict_transforms["C"]
        assert pair(conic, conic, blown.chow) == 2

    def test_no_multiple_points(self, plane):
        """Without multiple points the model and classes are unchanged."""
        h = plane.basis_class("H")
        scenario = SurfaceScenario(plane, {"L1": h, "L2": h}, (Crossing("x", ("L1", "L2")),))
        blown = blow_up(scenario)
        assert blown.chow.basis_names == plane.basis_names
        assert blown.strict_transforms["L1"] == h

    def test_surface_has_incidence_crossings(self, triple_point):
        """The divisor on the blow-up has one crossing per incidence."""
        surface = blow_up(triple_point).surface
        names = {crossing.name for crossing in surface.crossings}
        assert {BlowUp.incidence_name("P", name) for name in ("D1", "D2", "D3")} <= names
        assert "P" in surface.components
