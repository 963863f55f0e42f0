"""Local contributions at exceptional divisors and the local-global decomposition.

The discriminant of a parabolic bundle E on the blown-up surface splits as the
global term of the base bundle plus one local term per exceptional divisor. A
local term is kept as (baseline, relative): the value for the pullback
extension and the difference of E to it.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

from .chern import (ParabolicBundle, bundle_delta_vb, delta_par,
                    require_valid)
from .errors import InvariantViolation, UnsupportedRankError
from .parastruct import (HALF, CrossingPermutation, FlagData,
                         identity_permutation, normalize)
from .surface import (BlowUp, DivisorClass, MultiplePoint, SurfaceScenario,
                      blow_up)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LocalChernData:
    """Local Chern character at one exceptional divisor P.

    ch1_loc = a [P] and ch2_loc is a rational degree.
    """
    point: str
    a: int
    ch2_loc: Fraction

    def __post_init__(self):
        object.__setattr__(self, "ch2_loc", Fraction(self.ch2_loc))

    @property
    def ch1_loc_square(self) -> Fraction:
        """(a P)^2 = -a^2."""
        return Fraction(-self.a * self.a)

    def add(self, a: int, ch2: Fraction) -> "LocalChernData":
        """Add the Chern character of a sheaf supported on P."""
        return LocalChernData(self.point, self.a + a, self.ch2_loc + ch2)

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization."""
        return {"a": self.a, "ch2_loc": str(self.ch2_loc)}


@dataclass(frozen=True)
class LocalDegrees:
    """deg_loc(Gr(D_i,k;E), P) for every component through P."""
    point: str
    degrees: Mapping[str, Tuple[int, ...]]

    def of(self, component: str) -> Tuple[int, ...]:
        """Local degrees on one incident component."""
        try:
            return self.degrees[component]
        except KeyError:
            raise InvariantViolation(
                "complete-local-record",
                f"no local degrees for {component!r} at {self.point!r}"
            ) from None

    def deg_delta(self, component: str) -> int:
        """Rank-2 shorthand: quotient minus sub."""
        degrees = self.of(component)
        if len(degrees) != 2:
            raise UnsupportedRankError("LocalDegrees.deg_delta", len(degrees))
        return degrees[1] - degrees[0]

    @classmethod
    def constant(cls, point: str, components: Sequence[str], rank: int, m: int = 0) -> "LocalDegrees":
        """Local degrees of the twist of the pullback by m P (m on every piece)."""
        return cls(point, {name: (m,) * rank for name in components})

    def to_dict(self) -> Dict[str, List[int]]:
        """Convert to dictionary for JSON serialization."""
        return {name: list(values) for name, values in self.degrees.items()}


@dataclass(frozen=True)
class ExceptionalFlag:
    """Rank-2 flag F0 on the exceptional divisor and its incidence signs.

    Attributes:
        beta0: Weight beta_0 in [0, 1/2)
        f0_deg_delta: deg^delta(E_P, F0)
        taus: tau(i, P) = +1 / -1 per incident component, in incidence order
    """
    beta0: Fraction
    f0_deg_delta: int
    taus: Tuple[int, ...] = ()

    def __post_init__(self):
        beta0 = Fraction(self.beta0)
        if not 0 <= beta0 < HALF:
            raise InvariantViolation("beta0-range", f"beta0 {beta0} outside [0, 1/2)")
        taus = tuple(self.taus)
        if any(tau not in (1, -1) for tau in taus):
            raise InvariantViolation("tau-sign", f"incidence signs must be +1 or -1, got {list(taus)}")
        object.__setattr__(self, "beta0", beta0)
        object.__setattr__(self, "taus", taus)

    def check_splitting(self, mu: int) -> None:
        """Check deg^delta(E_P, F0) against the splitting type of E|_P.

        Raises:
            InvariantViolation: If it is below -mu or of the wrong parity
        """
        if self.f0_deg_delta < -mu:
            raise InvariantViolation(
                "exceptional-flag-degree",
                f"deg^delta(E_P, F0) = {self.f0_deg_delta} below -mu = {-mu}"
            )
        if (self.f0_deg_delta - mu) % 2:
            raise InvariantViolation(
                "exceptional-flag-parity",
                f"deg^delta(E_P, F0) = {self.f0_deg_delta} has the wrong parity for mu = {mu}"
            )


@dataclass(frozen=True)
class PointExtension:
    """Everything the blown-up bundle carries at one exceptional divisor.

    Attributes:
        point: Name of the multiple point (and of its exceptional divisor)
        chern: Local Chern data
        degrees: Local degrees on the incident strict transforms
        flag: Flag data of E on the exceptional divisor
        permutations: sigma(i, P) per incident component, 1-based
    """
    point: str
    chern: LocalChernData
    degrees: LocalDegrees
    flag: FlagData
    permutations: Mapping[str, Tuple[int, ...]] = field(default_factory=dict)

    def permutation(self, component: str) -> CrossingPermutation:
        """Comparison of the flag on a strict transform with the exceptional flag."""
        name = BlowUp.incidence_name(self.point, component)
        sigma = self.permutations.get(component)
        if sigma is None:
            return identity_permutation(name, component, self.point, self.flag.rank)
        return CrossingPermutation(name, component, self.point, tuple(sigma))

    def validate(self, point: MultiplePoint, rank: int) -> None:
        """Check completeness and internal consistency of the record.

        Raises:
            InvariantViolation: On a missing component, wrong rank or degree mismatch
        """
        if self.flag.rank != rank:
            raise InvariantViolation(
                "flag-rank",
                f"exceptional flag at {self.point!r} has rank {self.flag.rank}, bundle has rank {rank}"
            )
        if self.flag.total_degree != -self.chern.a:
            raise InvariantViolation(
                "local-degree-sum",
                f"exceptional flag degrees at {self.point!r} sum to {self.flag.total_degree}, "
                f"but ch1(E).P = {-self.chern.a}"
            )
        for component in point.components:
            degrees = self.degrees.of(component)
            if len(degrees) != rank:
                raise InvariantViolation(
                    "complete-local-record",
                    f"{len(degrees)} local degrees for {component!r} at {self.point!r}, expected {rank}"
                )
            if sum(degrees) != self.chern.a:
                raise InvariantViolation(
                    "local-degree-sum",
                    f"local degrees on {component!r} at {self.point!r} sum to {sum(degrees)}, "
                    f"but a = {self.chern.a}"
                )
        extra = sorted(set(self.degrees.degrees) - set(point.components))
        if extra:
            raise InvariantViolation(
                "declared-components",
                f"local degrees at {self.point!r} for non-incident components {extra}"
            )


def pullback_extension(point: MultiplePoint, rank: int) -> PointExtension:
    """The pullback of the base bundle with zero weights on the exceptional divisor."""
    return PointExtension(
        point=point.name,
        chern=LocalChernData(point.name, 0, Fraction(0)),
        degrees=LocalDegrees.constant(point.name, point.components, rank),
        flag=FlagData.zero(rank),
        permutations={},
    )


def delta_vb_loc(d: LocalChernData, r: int) -> Fraction:
    """Local discriminant (1/2r)(-a^2) - ch2_loc.

    Raises:
        InvariantViolation: If r is not positive
    """
    if r <= 0:
        raise InvariantViolation("positive-rank", f"rank must be positive, got {r}")
    return d.ch1_loc_square / (2 * r) - d.ch2_loc


def ch_decompose(e_ch1: DivisorClass, e_ch2: Fraction,
                 check_ch1: DivisorClass, check_ch2: Fraction,
                 blown_up: BlowUp,
                 records: Optional[Mapping[str, LocalChernData]] = None) -> List[LocalChernData]:
    """Split ch(E) - ch(pullback of the base bundle) into local pieces.

    Args:
        e_ch1: ch1 of E on the blown-up surface
        e_ch2: ch2 of E
        check_ch1: ch1 of the base bundle
        check_ch2: ch2 of the base bundle
        blown_up: The blow-up
        records: Local Chern data from elementary-transformation chains, per point

    Returns:
        LocalChernData per multiple point, in scenario order

    Raises:
        InvariantViolation: If the ch1 difference is not supported on exceptional
            classes, or the ch2 split is ambiguous or inconsistent
    """
    difference = e_ch1 - blown_up.pullback(check_ch1)
    points = [point.name for point in blown_up.base.multiple_points]
    for name in blown_up.base.chow.basis_names:
        if difference.coefficient(name) != 0:
            raise InvariantViolation(
                "exceptional-support",
                f"ch1(E) - ch1(pullback) has coefficient {difference.coefficient(name)} on base class {name!r}"
            )
    coefficients = {}
    for point in points:
        a = difference.coefficient(point)
        if a.denominator != 1:
            raise InvariantViolation("exceptional-support", f"non-integral coefficient {a} on {point!r}")
        coefficients[point] = int(a)

    ch2_difference = Fraction(e_ch2) - Fraction(check_ch2)
    if records is not None:
        result = []
        for point in points:
            record = records.get(point)
            if record is None:
                raise InvariantViolation("complete-extensions", f"no chain record for {point!r}")
            if record.a != coefficients[point]:
                raise InvariantViolation(
                    "exceptional-support",
                    f"chain record at {point!r} has a = {record.a}, ch1 difference gives {coefficients[point]}"
                )
            result.append(record)
        recorded = sum((record.ch2_loc for record in result), Fraction(0))
        if recorded != ch2_difference:
            raise InvariantViolation(
                "local-ch2-sum",
                f"chain records give ch2_loc total {recorded}, ch2 difference is {ch2_difference}"
            )
        return result

    if not points:
        if ch2_difference != 0:
            raise InvariantViolation("exceptional-support", f"ch2 differs by {ch2_difference} with no exceptional divisor")
        return []
    if len(points) > 1:
        raise InvariantViolation(
            "ambiguous-ch2-split",
            f"ch2 difference over {len(points)} exceptional divisors needs chain records"
        )
    return [LocalChernData(points[0], coefficients[points[0]], ch2_difference)]


def delta_par_global(check_bundle: ParabolicBundle, scenario: SurfaceScenario) -> Fraction:
    """Global term: the base bundle's discriminant with multiple points read pairwise."""
    surface = scenario.pairwise_surface()
    require_valid(check_bundle, surface)
    return delta_par(check_bundle, surface)


@dataclass(frozen=True)
class LocalParabolicInvariant:
    """Local parabolic term at one exceptional divisor.

    Attributes:
        point: Multiple point name
        baseline: Value for the pullback extension
        relative: Difference of the extension to the pullback
        delta_vb_loc: Local discriminant of the underlying bundle
    """
    point: str
    baseline: Fraction
    relative: Fraction
    delta_vb_loc: Fraction

    @property
    def value(self) -> Fraction:
        return self.baseline + self.relative

    def to_dict(self) -> Dict[str, str]:
        """Convert to dictionary for JSON serialization."""
        return {
            "baseline": str(self.baseline),
            "relative": str(self.relative),
            "value": str(self.value),
            "delta_vb_loc": str(self.delta_vb_loc),
        }


def delta_par_loc(extension: PointExtension, check_bundle: ParabolicBundle,
                  scenario: SurfaceScenario) -> LocalParabolicInvariant:
    """Local parabolic term of an extension at one exceptional divisor.

    Args:
        extension: Complete local record at the point
        check_bundle: Base bundle (its flags give the incident betas)
        scenario: Base scenario

    Returns:
        LocalParabolicInvariant with the pullback baseline and the relative part

    Raises:
        InvariantViolation: If the record is incomplete or inconsistent
    """
    point = scenario.multiple_point(extension.point)
    rank = check_bundle.rank
    extension.validate(point, rank)

    incident = point.components
    betas = {name: normalize(check_bundle.flags[name]).betas for name in incident}
    exceptional = normalize(extension.flag).betas
    local_vb = delta_vb_loc(extension.chern, rank)

    relative = local_vb
    relative += sum((b * d for b, d in zip(exceptional, extension.flag.gr_degrees)), Fraction(0))
    relative += sum((b * b for b in exceptional), Fraction(0)) / 2
    for name in incident:
        relative += sum((b * d for b, d in zip(betas[name], extension.degrees.of(name))), Fraction(0))
        perm = extension.permutation(name)
        relative -= sum((betas[name][k] * exceptional[perm.image(k)] for k in range(rank)), Fraction(0))

    baseline = Fraction(0)
    for name in incident:
        baseline += sum((b * b for b in betas[name]), Fraction(0)) / 2
    for i in incident:
        for j in incident:
            if i == j:
                continue
            perm = check_bundle.permutation(point.name, i, j)
            baseline += sum((betas[i][k] * betas[j][perm.image(k)] for k in range(rank)), Fraction(0)) / 2

    logger.debug(f"Local term at {point.name}: baseline {baseline}, relative {relative}")
    return LocalParabolicInvariant(point.name, baseline, relative, local_vb)


def delta_par_loc_diff_rank2(delta_vb_local: Fraction, flag: ExceptionalFlag,
                             deg_delta_loc: Sequence[int], betas: Sequence[Fraction]) -> Fraction:
    """Rank-2 difference of the local term to the pullback.

    Delta^Vb_loc + beta0 deg^delta(E_P, F0) + sum beta_i deg^delta_loc
    + beta0^2 - 2 sum tau_i beta_i beta0.

    Raises:
        InvariantViolation: If the incident lists have different lengths
    """
    if not len(deg_delta_loc) == len(betas) == len(flag.taus):
        raise InvariantViolation(
            "complete-local-record",
            f"{len(betas)} incident betas, {len(deg_delta_loc)} local degrees, {len(flag.taus)} signs"
        )
    beta0 = flag.beta0
    value = Fraction(delta_vb_local) + beta0 * flag.f0_deg_delta + beta0 * beta0
    for beta, d, tau in zip(betas, deg_delta_loc, flag.taus):
        value += beta * d - 2 * tau * beta * beta0
    return value


def assemble_blown_up(scenario: SurfaceScenario, check_bundle: ParabolicBundle,
                      extensions: Mapping[str, PointExtension],
                      declared_ch2: Optional[Fraction] = None) -> Tuple[BlowUp, ParabolicBundle]:
    """Build the parabolic bundle on the blown-up surface from base data and extensions.

    Args:
        scenario: Base scenario
        check_bundle: Base bundle
        extensions: One complete record per multiple point
        declared_ch2: Replaces the assembled ch2 of E when given

    Returns:
        The blow-up and the bundle E on it

    Raises:
        InvariantViolation: If an extension is missing or inconsistent
    """
    blown_up = blow_up(scenario)
    rank = check_bundle.rank
    ch1 = blown_up.pullback(check_bundle.ch1)
    ch2 = check_bundle.ch2
    flags: Dict[str, FlagData] = {}
    for name in scenario.components:
        flags[name] = check_bundle.flags[name]

    crossings: List[CrossingPermutation] = [
        check_bundle.permutation(crossing.name, *crossing.components)
        for crossing in scenario.crossings
    ]

    for point in scenario.multiple_points:
        extension = extensions.get(point.name)
        if extension is None:
            raise InvariantViolation("complete-extensions", f"no extension data at {point.name!r}")
        extension.validate(point, rank)
        ch1 = ch1 + blown_up.exceptional[point.name] * extension.chern.a
        ch2 += extension.chern.ch2_loc
        for name in point.components:
            shifted = tuple(d + e for d, e in zip(flags[name].gr_degrees, extension.degrees.of(name)))
            flags[name] = flags[name].with_degrees(shifted)
            crossings.append(extension.permutation(name))
        flags[point.name] = extension.flag

    if declared_ch2 is not None:
        ch2 = Fraction(declared_ch2)
    return blown_up, ParabolicBundle(rank, ch1, ch2, flags, tuple(crossings))


@dataclass
class DecompositionReport:
    """Both sides of the local-global decomposition."""
    left: Fraction
    global_term: Fraction
    local_terms: Dict[str, LocalParabolicInvariant]
    pullback_term: Fraction
    delta_vb_left: Fraction
    delta_vb_global: Fraction
    warnings: List[str] = field(default_factory=list)

    @property
    def right(self) -> Fraction:
        return self.global_term + sum((term.value for term in self.local_terms.values()), Fraction(0))

    @property
    def alternate_right(self) -> Fraction:
        """Pullback discriminant plus the relative local parts."""
        return self.pullback_term + sum((term.relative for term in self.local_terms.values()), Fraction(0))

    @property
    def delta_vb_right(self) -> Fraction:
        return self.delta_vb_global + sum((term.delta_vb_loc for term in self.local_terms.values()), Fraction(0))

    @property
    def discrepancy(self) -> Fraction:
        return self.left - self.right

    @property
    def passed(self) -> bool:
        return (self.left == self.right == self.alternate_right
                and self.delta_vb_left == self.delta_vb_right)

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization."""
        return {
            "status": "PASS" if self.passed else "FAIL",
            "left": str(self.left),
            "right": str(self.right),
            "discrepancy": str(self.discrepancy),
            "global": str(self.global_term),
            "pullback": str(self.pullback_term),
            "alternate_right": str(self.alternate_right),
            "delta_vb_left": str(self.delta_vb_left),
            "delta_vb_right": str(self.delta_vb_right),
            "local": {name: term.to_dict() for name, term in self.local_terms.items()},
        }


def decomposition_check(scenario: SurfaceScenario, check_bundle: ParabolicBundle,
                        extensions: Optional[Mapping[str, PointExtension]] = None,
                        declared_ch2: Optional[Fraction] = None) -> DecompositionReport:
    """Evaluate both sides of the decomposition independently.

    The left side is the discriminant of E computed on the blown-up surface; the
    right side is the global term plus the local terms.

    Args:
        scenario: Base scenario
        check_bundle: Base bundle
        extensions: Record per multiple point; pullbacks everywhere when None
        declared_ch2: Declared ch2 of E overriding the assembled value

    Returns:
        DecompositionReport

    Raises:
        InvariantViolation: If extension data is incomplete
    """
    rank = check_bundle.rank
    pullbacks = {point.name: pullback_extension(point, rank) for point in scenario.multiple_points}
    if extensions is None:
        extensions = pullbacks
    missing = sorted(set(pullbacks) - set(extensions))
    if missing:
        raise InvariantViolation("complete-extensions", f"no extension data at {missing}")

    pairwise = scenario.pairwise_surface()
    validation = require_valid(check_bundle, pairwise)
    global_term = delta_par(check_bundle, pairwise)

    blown_up, bundle = assemble_blown_up(scenario, check_bundle, extensions, declared_ch2)
    surface = blown_up.surface
    require_valid(bundle, surface)
    left = delta_par(bundle, surface)

    _, pullback_bundle = assemble_blown_up(scenario, check_bundle, pullbacks)
    pullback_term = delta_par(pullback_bundle, surface)

    local_terms = {
        point.name: delta_par_loc(extensions[point.name], check_bundle, scenario)
        for point in scenario.multiple_points
    }
    report = DecompositionReport(
        left=left,
        global_term=global_term,
        local_terms=local_terms,
        pullback_term=pullback_term,
        delta_vb_left=bundle_delta_vb(bundle, surface),
        delta_vb_global=bundle_delta_vb(check_bundle, pairwise),
        warnings=list(validation.warnings),
    )
    if report.passed:
        logger.info(f"Decomposition holds: {left} on both sides")
    else:
        logger.warning(f"Decomposition fails with discrepancy {report.discrepancy}")
    return report
