"""Seeded random scenarios for the invariant suite and the tests.

Surfaces are arrangements of lines in the plane, optionally with one conic
meeting every line in two ordinary crossings. Groups of three or four lines
pass through common multiple points; two points share at most one line.
"""

import logging
import random
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .chern import ParabolicBundle
from .elemtrans import rank2_mu_sequences
from .localize import LocalChernData, LocalDegrees, PointExtension
from .minimize import ExtensionCandidate
from .parastruct import CrossingPermutation, FlagData
from .surface import ChowModel, Crossing, DivisorClass, MultiplePoint, SurfaceScenario, pair

logger = logging.getLogger(__name__)

PLANE = ChowModel(("H",), ((1,),))
DENOMINATORS = (1, 2, 3, 4, 5, 6, 8)


def random_fraction(rng: random.Random, low: Fraction, high: Fraction) -> Fraction:
    """A rational in [low, high] with a small denominator."""
    denominator = rng.choice(DENOMINATORS)
    numerators = range(int(low * denominator) - 1, int(high * denominator) + 2)
    values = [Fraction(n, denominator) for n in numerators if low <= Fraction(n, denominator) <= high]
    return rng.choice(values)


def random_surface(rng: random.Random, points: Optional[int] = None,
                   kappas: Tuple[int, ...] = (3, 4), conic: Optional[bool] = None) -> SurfaceScenario:
    """A line arrangement with multiple points, and possibly a conic.

    Args:
        rng: Random source
        points: Number of multiple points (0 to 3 when None)
        kappas: Allowed numbers of lines through a multiple point
        conic: Whether to add a conic (random when None)
    """
    if points is None:
        points = rng.randint(0, 3)
    if conic is None:
        conic = rng.random() < 0.3

    lines: List[str] = []
    groups: List[List[str]] = []

    def new_line() -> str:
        lines.append(f"L{len(lines) + 1}")
        return lines[-1]

    for index in range(points):
        kappa = rng.choice(kappas)
        group: List[str] = []
        if groups and rng.random() < 0.5:
            shared = rng.choice(groups[rng.randrange(len(groups))])
            group.append(shared)
        while len(group) < kappa:
            group.append(new_line())
        groups.append(group)
    for _ in range(rng.randint(0 if points else 1, 2)):
        new_line()

    components: Dict[str, DivisorClass] = {name: PLANE.basis_class("H") for name in lines}
    multiple_points = [MultiplePoint(f"P{index + 1}", tuple(group)) for index, group in enumerate(groups)]

    crossings: List[Crossing] = []
    for a in range(len(lines)):
        for b in range(a + 1, len(lines)):
            i, j = lines[a], lines[b]
            if not any(i in group and j in group for group in groups):
                crossings.append(Crossing(f"x{len(crossings) + 1}", (i, j)))
    if conic:
        components["C"] = PLANE.basis_class("H") * 2
        for name in lines:
            for _ in range(2):
                crossings.append(Crossing(f"x{len(crossings) + 1}", ("C", name)))

    return SurfaceScenario(PLANE, components, tuple(crossings), tuple(multiple_points))


def random_flag(rng: random.Random, rank: int, total_degree: int) -> FlagData:
    """Nondecreasing weights in [-1, 0] and degrees summing to total_degree."""
    weights = sorted(random_fraction(rng, Fraction(-1), Fraction(0)) for _ in range(rank))
    degrees = [rng.randint(-2, 2) for _ in range(rank - 1)]
    degrees.append(total_degree - sum(degrees))
    return FlagData(rank, tuple(weights), tuple(degrees))


def random_permutation(rng: random.Random, rank: int) -> Tuple[int, ...]:
    sigma = list(range(1, rank + 1))
    rng.shuffle(sigma)
    return tuple(sigma)


def random_bundle(rng: random.Random, scenario: SurfaceScenario, rank: Optional[int] = None) -> ParabolicBundle:
    """A parabolic bundle over the pairwise reading of a scenario.

    Every crossing and every incident pair at a multiple point gets an explicit
    permutation.
    """
    if rank is None:
        rank = rng.randint(1, 3)
    chow = scenario.chow
    ch1 = chow.divisor({name: rng.randint(-2, 2) for name in chow.basis_names})
    ch2 = Fraction(rng.randint(-8, 8), rng.choice((1, 2)))

    flags = {
        name: random_flag(rng, rank, int(pair(ch1, cls, chow)))
        for name, cls in scenario.components.items()
    }
    permutations = [
        CrossingPermutation(crossing.name, *crossing.components, random_permutation(rng, rank))
        for crossing in scenario.pairwise_surface().crossings
    ]
    return ParabolicBundle(rank, ch1, ch2, flags, tuple(permutations))


def random_line_bundle(rng: random.Random, chow: ChowModel) -> DivisorClass:
    """An integral class with small coefficients."""
    return chow.divisor({name: rng.randint(-3, 3) for name in chow.basis_names})


def random_candidate(rng: random.Random, kappa: int, g_max: int = 3) -> ExtensionCandidate:
    """A valid rank-2 extension candidate with at most g_max steps."""
    g = rng.randint(0, g_max)
    sequences = list(rank2_mu_sequences(g, g + 2 * rng.randint(0, 2)))
    mu_seq = rng.choice(sequences)
    mu = mu_seq[-1] if mu_seq else 0
    degrees = tuple(rng.choice(range(-g, g + 1, 2)) for _ in range(kappa))
    f0 = rng.choice(range(-mu, mu + 1, 2))
    taus = tuple(rng.choice((1, -1)) for _ in range(kappa))
    beta0 = random_fraction(rng, Fraction(0), Fraction(1, 4))
    return ExtensionCandidate(mu_seq, degrees, f0, taus, beta0)


def random_rank2_extension_scenario(
        seed: int, g_max: int = 3
) -> Tuple[SurfaceScenario, ParabolicBundle, Dict[str, ExtensionCandidate], Dict[str, PointExtension]]:
    """A rank-2 scenario with one to three multiple points and a candidate at each."""
    rng = random.Random(seed)
    scenario = random_surface(rng, points=rng.randint(1, 3))
    bundle = random_bundle(rng, scenario, rank=2)
    candidates = {point.name: random_candidate(rng, point.kappa, g_max) for point in scenario.multiple_points}
    extensions = {
        point.name: candidates[point.name].to_point_extension(point)
        for point in scenario.multiple_points
    }
    logger.debug(f"Seed {seed}: {len(extensions)} multiple point(s) with random extensions")
    return scenario, bundle, candidates, extensions


def random_scenario(seed: int, rank: Optional[int] = None) -> Tuple[SurfaceScenario, ParabolicBundle]:
    """A random surface and bundle of rank 1 to 3."""
    rng = random.Random(seed)
    scenario = random_surface(rng)
    return scenario, random_bundle(rng, scenario, rank)


def random_point_extension(rng: random.Random, point: MultiplePoint, rank: int) -> PointExtension:
    """Arbitrary consistent local record of any rank (not necessarily realizable)."""
    a = rng.randint(-2, 3)
    degrees = {}
    for name in point.components:
        pieces = [rng.randint(-2, 2) for _ in range(rank - 1)]
        degrees[name] = tuple(pieces + [a - sum(pieces)])
    return PointExtension(
        point=point.name,
        chern=LocalChernData(point.name, a, Fraction(rng.randint(-6, 6), rng.choice((1, 2)))),
        degrees=LocalDegrees(point.name, degrees),
        flag=random_flag(rng, rank, -a),
        permutations={name: random_permutation(rng, rank) for name in point.components},
    )
