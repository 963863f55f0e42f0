"""Numerical shadows of full-flag parabolic structures.

A flag on a component is recorded by its weights and the degrees of its graded
pieces; where two components cross, the two flags are compared through a
permutation of the flag indices.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Any, Tuple, Union

from .errors import InvariantViolation, UnsupportedRankError

logger = logging.getLogger(__name__)

QUARTER = Fraction(1, 4)
HALF = Fraction(1, 2)


@dataclass(frozen=True)
class FlagData:
    """Weights and graded degrees of a complete flag on one component.

    Attributes:
        rank: Rank r of the bundle
        weights: alpha(D,1) <= ... <= alpha(D,r), each in [-1, 0]
        gr_degrees: deg Gr(D,k) for k = 1..r
    """
    rank: int
    weights: Tuple[Fraction, ...]
    gr_degrees: Tuple[int, ...]

    def __post_init__(self):
        if self.rank < 1:
            raise InvariantViolation("positive-rank", f"flag rank must be positive, got {self.rank}")
        weights = tuple(Fraction(w) for w in self.weights)
        degrees = tuple(self.gr_degrees)
        if len(weights) != self.rank or len(degrees) != self.rank:
            raise InvariantViolation(
                "full-flag",
                f"a rank {self.rank} flag needs {self.rank} weights and degrees, "
                f"got {len(weights)} and {len(degrees)}"
            )
        if any(not isinstance(d, int) or isinstance(d, bool) for d in degrees):
            raise InvariantViolation("integral-gr-degrees", f"graded degrees must be integers, got {list(degrees)}")
        for weight in weights:
            if not -1 <= weight <= 0:
                raise InvariantViolation("weight-range", f"weight {weight} outside [-1, 0]")
        if any(later < earlier for earlier, later in zip(weights, weights[1:])):
            raise InvariantViolation("nondecreasing-weights", f"weights {[str(w) for w in weights]} decrease")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "gr_degrees", degrees)

    @property
    def total_degree(self) -> int:
        """Degree of the restricted bundle."""
        return sum(self.gr_degrees)

    def with_degrees(self, gr_degrees: Tuple[int, ...]) -> "FlagData":
        """Same weights, other graded degrees."""
        return FlagData(self.rank, self.weights, tuple(gr_degrees))

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization."""
        return {
            "weights": [str(w) for w in self.weights],
            "gr_degrees": list(self.gr_degrees),
        }

    @classmethod
    def zero(cls, rank: int) -> "FlagData":
        """Zero weights and zero degrees."""
        return cls(rank, (Fraction(0),) * rank, (0,) * rank)


@dataclass(frozen=True)
class NormalizedWeights:
    """Total weight and trace-free weights of a flag."""
    alpha_tot: Fraction
    betas: Tuple[Fraction, ...]

    @property
    def rank(self) -> int:
        return len(self.betas)

    def weights(self) -> Tuple[Fraction, ...]:
        """Reconstruct alpha(D,k) = beta(D,k) + alpha_tot / r."""
        shift = self.alpha_tot / self.rank
        return tuple(beta + shift for beta in self.betas)


def normalize(flag: FlagData) -> NormalizedWeights:
    """Split the weights of a flag into their total and a trace-free part.

    Args:
        flag: Flag to normalize

    Returns:
        NormalizedWeights with sum(betas) == 0
    """
    alpha_tot = sum(flag.weights, Fraction(0))
    mean = alpha_tot / flag.rank
    return NormalizedWeights(alpha_tot=alpha_tot, betas=tuple(w - mean for w in flag.weights))


def shift_weights(flag: FlagData, c: Union[int, Fraction]) -> FlagData:
    """Add the same rational to every weight of a flag.

    Raises:
        InvariantViolation: If a shifted weight leaves [-1, 0]
    """
    return FlagData(flag.rank, tuple(w + c for w in flag.weights), flag.gr_degrees)


@dataclass(frozen=True)
class CrossingPermutation:
    """Comparison of the flags of two components at a crossing point.

    sigma is 1-based: sigma[k-1] is the index on the second component matched with
    index k on the first.
    """
    point: str
    first: str
    second: str
    sigma: Tuple[int, ...]

    def __post_init__(self):
        sigma = tuple(self.sigma)
        if sorted(sigma) != list(range(1, len(sigma) + 1)):
            raise InvariantViolation(
                "bijective-permutation",
                f"permutation at {self.point!r} ({self.first}, {self.second}) is not a bijection: {list(sigma)}"
            )
        object.__setattr__(self, "sigma", sigma)

    @property
    def rank(self) -> int:
        return len(self.sigma)

    @property
    def is_identity(self) -> bool:
        return all(image == index for index, image in enumerate(self.sigma, start=1))

    def image(self, k: int) -> int:
        """0-based image of a 0-based index."""
        return self.sigma[k] - 1

    def inverse(self) -> "CrossingPermutation":
        """The permutation for the reversed pair."""
        inverse = [0] * self.rank
        for index, image in enumerate(self.sigma, start=1):
            inverse[image - 1] = index
        return CrossingPermutation(self.point, self.second, self.first, tuple(inverse))

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization."""
        return {
            "point": self.point,
            "components": [self.first, self.second],
            "sigma": list(self.sigma),
        }


def identity_permutation(point: str, first: str, second: str, rank: int) -> CrossingPermutation:
    """Identity comparison between two flags."""
    return CrossingPermutation(point, first, second, tuple(range(1, rank + 1)))


@dataclass(frozen=True)
class Rank2Flag:
    """A rank-2 flag F in E|_D reduced to beta and degrees.

    Attributes:
        beta: beta_i in [0, 1/2); the weights are -beta and +beta around their mean
        f_degree: deg F
        total_degree: deg E|_D
        self_intersection: [D]^2, needed to follow degrees through a weight shift
    """
    beta: Fraction
    f_degree: int
    total_degree: int
    self_intersection: int = 0

    def __post_init__(self):
        beta = Fraction(self.beta)
        if not 0 <= beta < HALF:
            raise InvariantViolation("rank2-beta-range", f"beta {beta} outside [0, 1/2)")
        object.__setattr__(self, "beta", beta)

    @property
    def deg_delta(self) -> int:
        """deg(E|_D / F) - deg(F)."""
        return self.total_degree - 2 * self.f_degree

    @classmethod
    def from_flag(cls, flag: FlagData, self_intersection: int = 0) -> "Rank2Flag":
        """Read a rank-2 FlagData as beta and degrees.

        Raises:
            UnsupportedRankError: If the flag is not of rank 2
        """
        if flag.rank != 2:
            raise UnsupportedRankError("Rank2Flag.from_flag", flag.rank)
        beta = (flag.weights[1] - flag.weights[0]) / 2
        return cls(
            beta=beta,
            f_degree=flag.gr_degrees[0],
            total_degree=flag.total_degree,
            self_intersection=self_intersection,
        )


def shift_rank2(flag: Rank2Flag, theta: Fraction) -> Rank2Flag:
    """Elementary transformation along D, seen on the rank-2 flag.

    The new sub line is (E|_D / F)(-D) and the new quotient is F. After
    renormalizing, the result is beta -> 1/2 - beta with the degrees above for
    every theta in (0, 1); theta only has to lie in that range.

    Args:
        flag: Rank-2 flag
        theta: Weight shift in (0, 1)

    Returns:
        Flag with beta replaced by 1/2 - beta

    Raises:
        InvariantViolation: If theta is outside (0, 1) or 1/2 - beta leaves [0, 1/2)
    """
    if not isinstance(flag, Rank2Flag):
        raise UnsupportedRankError("shift_rank2", getattr(flag, "rank", None))
    theta = Fraction(theta)
    if not 0 < theta < 1:
        raise InvariantViolation("shift-range", f"theta {theta} outside (0, 1)")
    square = flag.self_intersection
    quotient_degree = flag.total_degree - flag.f_degree
    shifted = Rank2Flag(
        beta=HALF - flag.beta,
        f_degree=quotient_degree - square,
        total_degree=flag.total_degree - square,
        self_intersection=square,
    )
    logger.debug(f"Shifted beta {flag.beta} -> {shifted.beta}, deg_delta {flag.deg_delta} -> {shifted.deg_delta}")
    return shifted


def normalize_to_quarter(flag: Rank2Flag) -> Rank2Flag:
    """Bring beta into [0, 1/4] with at most one shift."""
    if flag.beta <= QUARTER:
        return flag
    return shift_rank2(flag, HALF)


def tau_sign(perm: CrossingPermutation) -> int:
    """+1 when the two rank-2 flags agree at the point, -1 otherwise.

    Raises:
        UnsupportedRankError: If the permutation is not of rank 2
    """
    if perm.rank != 2:
        raise UnsupportedRankError("tau_sign", perm.rank)
    return 1 if perm.is_identity else -1
