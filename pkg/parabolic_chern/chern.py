"""Global parabolic Chern invariants of full-flag parabolic bundles."""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Mapping, Optional, Tuple

from .errors import InvariantViolation, UnsupportedRankError
from .parastruct import (CrossingPermutation, FlagData, identity_permutation,
                         normalize, tau_sign)
from .surface import DivisorClass, DivisorSurface, pair
from .validation import ValidationResult

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ParabolicBundle:
    """Numerical data of a parabolic bundle with full flags.

    Attributes:
        rank: Rank r >= 1
        ch1: First Chern character
        ch2: Degree of the second Chern character
        flags: Component name to flag data
        crossings: Flag comparisons at crossing points; missing ones default to identity
    """
    rank: int
    ch1: DivisorClass
    ch2: Fraction
    flags: Mapping[str, FlagData]
    crossings: Tuple[CrossingPermutation, ...] = ()

    def __post_init__(self):
        if self.rank < 1:
            raise InvariantViolation("positive-rank", f"bundle rank must be positive, got {self.rank}")
        object.__setattr__(self, "ch2", Fraction(self.ch2))
        object.__setattr__(self, "crossings", tuple(self.crossings))
        for name, flag in self.flags.items():
            if flag.rank != self.rank:
                raise InvariantViolation(
                    "flag-rank",
                    f"flag on {name!r} has rank {flag.rank}, bundle has rank {self.rank}"
                )
        for perm in self.crossings:
            if perm.rank != self.rank:
                raise InvariantViolation(
                    "permutation-rank",
                    f"permutation at {perm.point!r} acts on {perm.rank} indices, bundle has rank {self.rank}"
                )

    @cached_property
    def _permutation_index(self) -> Dict[Tuple[str, str, str], CrossingPermutation]:
        index: Dict[Tuple[str, str, str], CrossingPermutation] = {}
        for perm in self.crossings:
            key = (perm.point, perm.first, perm.second)
            reverse_key = (perm.point, perm.second, perm.first)
            if key in index and index[key].sigma != perm.sigma:
                raise InvariantViolation(
                    "inverse-permutations",
                    f"conflicting permutations at {perm.point!r} for ({perm.first}, {perm.second})"
                )
            inverse = perm.inverse()
            if reverse_key in index and index[reverse_key].sigma != inverse.sigma:
                raise InvariantViolation(
                    "inverse-permutations",
                    f"permutations at {perm.point!r} for ({perm.first}, {perm.second}) "
                    f"and its reverse are not inverse"
                )
            index[key] = perm
            index[reverse_key] = inverse
        return index

    def has_permutation(self, point: str, i: str, j: str) -> bool:
        """Whether a permutation was supplied for the point and pair."""
        return (point, i, j) in self._permutation_index

    def permutation(self, point: str, i: str, j: str) -> CrossingPermutation:
        """Permutation comparing the flag on i with the flag on j at a point.

        Identity when none was supplied.
        """
        perm = self._permutation_index.get((point, i, j))
        if perm is None:
            return identity_permutation(point, i, j, self.rank)
        return perm

    def with_flags(self, flags: Mapping[str, FlagData]) -> "ParabolicBundle":
        """Same bundle with other flags."""
        return ParabolicBundle(self.rank, self.ch1, self.ch2, dict(flags), self.crossings)


def missing_permutations(bundle: ParabolicBundle, surface: DivisorSurface) -> List[str]:
    """Crossings of the surface for which the identity permutation is assumed."""
    if bundle.rank == 1:
        return []
    missing = []
    for crossing in surface.crossings:
        i, j = crossing.components
        if not bundle.has_permutation(crossing.name, i, j):
            missing.append(f"{crossing.name} ({i}, {j})")
    return missing


def validate_bundle(bundle: ParabolicBundle, surface: DivisorSurface) -> ValidationResult:
    """Check a bundle against the surface it lives on.

    Args:
        bundle: Bundle to check
        surface: Normal crossings divisor the flags are attached to

    Returns:
        ValidationResult with errors for broken invariants and warnings for
        identity-defaulted permutations
    """
    result = ValidationResult()
    if bundle.ch1.basis_names != surface.chow.basis_names:
        result.errors.append("basis-match: ch1 is not over the surface basis")
        return result

    for name in surface.component_names:
        flag = bundle.flags.get(name)
        if flag is None:
            result.errors.append(f"flag-per-component: component {name!r} carries no flag")
            continue
        expected = pair(bundle.ch1, surface.components[name], surface.chow)
        if flag.total_degree != expected:
            result.errors.append(
                f"gr-degree-sum: graded degrees on {name!r} sum to {flag.total_degree}, "
                f"but ch1.[{name}] = {expected}"
            )
    for name in bundle.flags:
        if name not in surface.components:
            result.errors.append(f"declared-components: flag on undeclared component {name!r}")

    known_points = {(crossing.name, frozenset(crossing.components)) for crossing in surface.crossings}
    for perm in bundle.crossings:
        if (perm.point, frozenset((perm.first, perm.second))) not in known_points:
            result.errors.append(
                f"declared-points: permutation at {perm.point!r} for ({perm.first}, {perm.second}) "
                f"matches no crossing"
            )

    for entry in missing_permutations(bundle, surface):
        result.warnings.append(f"identity permutation assumed at {entry}")
    return result


def require_valid(bundle: ParabolicBundle, surface: DivisorSurface) -> ValidationResult:
    """Validate and raise on the first error.

    Raises:
        InvariantViolation: Naming the first violated invariant
    """
    result = validate_bundle(bundle, surface)
    if not result.is_valid:
        invariant, _, message = result.errors[0].partition(": ")
        raise InvariantViolation(invariant, message)
    return result


def ch1_par(bundle: ParabolicBundle, surface: DivisorSurface) -> DivisorClass:
    """ch1^Vb - sum_i alpha_tot(D_i) [D_i]."""
    result = bundle.ch1
    for name in surface.component_names:
        alpha_tot = normalize(bundle.flags[name]).alpha_tot
        if alpha_tot:
            result = result - surface.components[name] * alpha_tot
    return result


def _ordered_crossing_terms(surface: DivisorSurface):
    """Yield (point, i, j) for every crossing in both orders."""
    for crossing in surface.crossings:
        i, j = crossing.components
        yield crossing.name, i, j
        yield crossing.name, j, i


def ch2_par(bundle: ParabolicBundle, surface: DivisorSurface) -> Fraction:
    """Second parabolic Chern character.

    ch2 - sum alpha deg Gr + 1/2 sum alpha^2 [D]^2
    + 1/2 sum over ordered crossing pairs of alpha_ik alpha_j,sigma(k).
    """
    value = bundle.ch2
    for name in surface.component_names:
        flag = bundle.flags[name]
        square = surface.self_intersection(name)
        for alpha, degree in zip(flag.weights, flag.gr_degrees):
            value -= alpha * degree
            value += alpha * alpha * square / 2
    for point, i, j in _ordered_crossing_terms(surface):
        perm = bundle.permutation(point, i, j)
        weights_i = bundle.flags[i].weights
        weights_j = bundle.flags[j].weights
        value += sum(weights_i[k] * weights_j[perm.image(k)] for k in range(bundle.rank)) / 2
    return value


def delta_vb(ch1_sq: Fraction, ch2: Fraction, r: int) -> Fraction:
    """Discriminant (1/2r) ch1^2 - ch2.

    Raises:
        InvariantViolation: If r is not positive
    """
    if r <= 0:
        raise InvariantViolation("positive-rank", f"rank must be positive, got {r}")
    return Fraction(ch1_sq) / (2 * r) - Fraction(ch2)


def bundle_delta_vb(bundle: ParabolicBundle, surface: DivisorSurface) -> Fraction:
    """Discriminant of the underlying vector bundle."""
    return delta_vb(pair(bundle.ch1, bundle.ch1, surface.chow), bundle.ch2, bundle.rank)


def delta_par(bundle: ParabolicBundle, surface: DivisorSurface) -> Fraction:
    """Parabolic discriminant in trace-free form.

    Delta^Vb + sum beta deg Gr - 1/2 sum beta^2 [D]^2
    - 1/2 sum over ordered crossing pairs of beta_ik beta_j,sigma(k).
    """
    value = bundle_delta_vb(bundle, surface)
    betas = {name: normalize(bundle.flags[name]).betas for name in surface.component_names}
    for name in surface.component_names:
        square = surface.self_intersection(name)
        for beta, degree in zip(betas[name], bundle.flags[name].gr_degrees):
            value += beta * degree
            value -= beta * beta * square / 2
    for point, i, j in _ordered_crossing_terms(surface):
        perm = bundle.permutation(point, i, j)
        value -= sum(betas[i][k] * betas[j][perm.image(k)] for k in range(bundle.rank)) / 2
    return value


def delta_par_from_characters(bundle: ParabolicBundle, surface: DivisorSurface) -> Fraction:
    """Parabolic discriminant through ch1^Par and ch2^Par."""
    first = ch1_par(bundle, surface)
    return delta_vb(pair(first, first, surface.chow), ch2_par(bundle, surface), bundle.rank)


def delta_par_rank2(bundle: ParabolicBundle, surface: DivisorSurface) -> Fraction:
    """Rank-2 parabolic discriminant.

    Delta^Vb + sum beta_i deg^delta - sum beta_i^2 [D_i]^2
    - sum over ordered pairs and crossings of tau beta_i beta_j,
    with beta_i in [0, 1/2] read from the weights of each flag.

    Raises:
        UnsupportedRankError: If the bundle is not of rank 2
    """
    if bundle.rank != 2:
        raise UnsupportedRankError("delta_par_rank2", bundle.rank)
    value = bundle_delta_vb(bundle, surface)
    betas: Dict[str, Fraction] = {}
    for name in surface.component_names:
        flag = bundle.flags[name]
        beta = (flag.weights[1] - flag.weights[0]) / 2
        betas[name] = beta
        value += beta * (flag.gr_degrees[1] - flag.gr_degrees[0])
        value -= beta * beta * surface.self_intersection(name)
    for point, i, j in _ordered_crossing_terms(surface):
        value -= tau_sign(bundle.permutation(point, i, j)) * betas[i] * betas[j]
    return value


def tensor_line_bundle(bundle: ParabolicBundle, line: DivisorClass,
                       surface: DivisorSurface) -> ParabolicBundle:
    """Tensor a parabolic bundle by a line bundle.

    Args:
        bundle: Parabolic bundle
        line: Integral class of the line bundle
        surface: Surface carrying the divisor

    Returns:
        The twisted bundle with the same weights and permutations

    Raises:
        InvariantViolation: If the class is not integral
    """
    if not line.is_integral:
        raise InvariantViolation("integral-line-bundle", f"line bundle class {line.to_dict()} is not integral")
    chow = surface.chow
    rank = bundle.rank
    ch1 = bundle.ch1 + line * rank
    ch2 = bundle.ch2 + pair(bundle.ch1, line, chow) + rank * pair(line, line, chow) / 2
    flags = {}
    for name, flag in bundle.flags.items():
        shift = int(pair(line, surface.components[name], chow)) if name in surface.components else 0
        flags[name] = flag.with_degrees(tuple(d + shift for d in flag.gr_degrees))
    return ParabolicBundle(rank, ch1, ch2, flags, bundle.crossings)


@dataclass
class GlobalInvariants:
    """Every global invariant of one bundle on one surface."""
    ch1_par: DivisorClass
    ch2_par: Fraction
    delta_vb: Fraction
    delta_par: Fraction
    delta_par_characters: Fraction
    delta_par_rank2: Optional[Fraction] = None
    warnings: List[str] = field(default_factory=list)

    @property
    def paths_agree(self) -> bool:
        """Whether every evaluation path gave the same discriminant."""
        values = {self.delta_par, self.delta_par_characters}
        if self.delta_par_rank2 is not None:
            values.add(self.delta_par_rank2)
        return len(values) == 1

    def to_dict(self) -> Dict[str, object]:
        """Convert to dictionary for JSON serialization."""
        data: Dict[str, object] = {
            "ch1_par": self.ch1_par.to_dict(),
            "ch2_par": str(self.ch2_par),
            "delta_vb": str(self.delta_vb),
            "delta_par": str(self.delta_par),
            "delta_par_characters": str(self.delta_par_characters),
            "paths_agree": self.paths_agree,
        }
        if self.delta_par_rank2 is not None:
            data["delta_par_rank2"] = str(self.delta_par_rank2)
        return data


def global_invariants(bundle: ParabolicBundle, surface: DivisorSurface) -> GlobalInvariants:
    """Evaluate every global invariant, validating the bundle first."""
    validation = require_valid(bundle, surface)
    invariants = GlobalInvariants(
        ch1_par=ch1_par(bundle, surface),
        ch2_par=ch2_par(bundle, surface),
        delta_vb=bundle_delta_vb(bundle, surface),
        delta_par=delta_par(bundle, surface),
        delta_par_characters=delta_par_from_characters(bundle, surface),
        delta_par_rank2=delta_par_rank2(bundle, surface) if bundle.rank == 2 else None,
        warnings=list(validation.warnings),
    )
    logger.debug(f"Delta^Par = {invariants.delta_par} (rank {bundle.rank})")
    return invariants
