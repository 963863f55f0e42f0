"""Splitting types on exceptional lines and elementary transformations.

E|_P on an exceptional divisor P splits as a sum of line bundles O(m_j)^{r_j}.
An elementary transformation along P along the lowest twist lowers the spread
mu = m_max - m_min, so repeated steps reach a pure splitting. Chains are
recorded bottom-up: E(0) is pure and E(g) = E.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from .errors import InvariantViolation
from .localize import LocalChernData, LocalDegrees, delta_vb_loc
from .surface import ChowModel, pair

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)

# Neighbourhood of a single exceptional curve: one class with P^2 = -1.
_EXCEPTIONAL_LINE = ChowModel(("P",), ((-1,),), (True,))


@dataclass(frozen=True)
class SplittingType:
    """Grothendieck splitting type as sorted (twist, multiplicity) parts."""
    parts: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        parts = tuple((int(m), int(r)) for m, r in self.parts)
        if not parts:
            raise InvariantViolation("positive-rank", "a splitting type needs at least one part")
        if any(r < 1 for _, r in parts):
            raise InvariantViolation("positive-multiplicity", f"multiplicities must be positive in {list(parts)}")
        if any(later[0] <= earlier[0] for earlier, later in zip(parts, parts[1:])):
            raise InvariantViolation("increasing-twists", f"twists must strictly increase in {list(parts)}")
        object.__setattr__(self, "parts", parts)

    @property
    def rank(self) -> int:
        return sum(r for _, r in self.parts)

    @property
    def degree(self) -> int:
        return sum(m * r for m, r in self.parts)

    @property
    def min(self) -> int:
        return self.parts[0][0]

    @property
    def max(self) -> int:
        return self.parts[-1][0]

    @property
    def mu(self) -> int:
        return self.max - self.min

    @property
    def is_pure(self) -> bool:
        return len(self.parts) == 1

    def twists(self) -> Tuple[int, ...]:
        """All twists with repetition, ascending."""
        return tuple(m for m, r in self.parts for _ in range(r))

    @classmethod
    def from_twists(cls, twists: Sequence[int]) -> "SplittingType":
        """Build from an unsorted list of twists."""
        counts = Counter(twists)
        return cls(tuple(sorted(counts.items())))

    @classmethod
    def from_pair(cls, m1: int, m2: int) -> "SplittingType":
        """Rank-2 splitting O(m1) + O(m2)."""
        return cls.from_twists((m1, m2))

    def __str__(self) -> str:
        return " + ".join(f"O({m})^{r}" if r > 1 else f"O({m})" for m, r in self.parts)


def ch_exceptional_twist(m: int) -> Tuple[int, Fraction]:
    """Chern character of O_P(m), read off 0 -> O(-(m+1)P) -> O(-mP) -> O_P(m) -> 0.

    Returns:
        (a, ch2) with ch1 = a [P]
    """
    p = _EXCEPTIONAL_LINE.basis_class("P")

    def ch_line(k: int) -> Tuple[Fraction, Fraction]:
        line = p * (-k)
        return line.coefficient("P"), pair(line, line, _EXCEPTIONAL_LINE) / 2

    a_low, ch2_low = ch_line(m + 1)
    a_high, ch2_high = ch_line(m)
    return int(a_high - a_low), ch2_high - ch2_low


@dataclass(frozen=True)
class StepConstraints:
    """Numerical constraints on the splitting type after one elementary step."""
    rank: int
    degree: int
    lower: int
    upper: int
    mu_max: int

    def admits(self, s: SplittingType) -> bool:
        return (s.rank == self.rank and s.degree == self.degree
                and s.min >= self.lower and s.max <= self.upper and s.mu <= self.mu_max)

    def enumerate(self) -> List[SplittingType]:
        """All splitting types meeting the constraints, sorted by twists."""
        found = []
        for twists in combinations_with_replacement(range(self.lower, self.upper + 1), self.rank):
            if sum(twists) != self.degree:
                continue
            candidate = SplittingType.from_twists(twists)
            if self.admits(candidate):
                found.append(candidate)
        return sorted(found, key=lambda s: s.twists())


@dataclass(frozen=True)
class ElementaryStep:
    """One elementary transformation E' = ker(E -> O_P(m1)^{r1}).

    Attributes:
        source: Splitting type of E|_P
        constraints: What E'|_P must satisfy
        ch1_change: Change of the [P] coefficient of ch1 (-r1)
        ch2_change: Change of ch2 (-(m1 + 1/2) r1)
        delta_vb_drop: Decrease of the local discriminant
    """
    source: SplittingType
    constraints: StepConstraints
    ch1_change: int
    ch2_change: Fraction
    delta_vb_drop: Fraction


def elementary_step(s: SplittingType) -> ElementaryStep:
    """Apply one elementary transformation along the lowest twist.

    Raises:
        InvariantViolation: If s is already pure
    """
    if s.is_pure:
        raise InvariantViolation("impure-splitting", f"{s} is pure; no elementary step applies")
    (m1, r1), (m2, _) = s.parts[0], s.parts[1]
    constraints = StepConstraints(
        rank=s.rank,
        degree=s.degree + r1,
        lower=min(m1 + 1, m2),
        upper=max(m1 + 1, s.max),
        mu_max=s.mu - 1,
    )
    drop = sum(((m - m1 - HALF) * r1 * r for m, r in s.parts[1:]), Fraction(0)) / s.rank
    return ElementaryStep(
        source=s,
        constraints=constraints,
        ch1_change=-r1,
        ch2_change=-(m1 + HALF) * r1,
        delta_vb_drop=drop,
    )


@dataclass(frozen=True)
class ChainRecord:
    """A reduction E = E(g) -> ... -> E(0) to pure form, stored bottom-up.

    Attributes:
        point: Exceptional divisor name
        splittings: Splitting types of E(0), ..., E(g)
        chern: Local Chern data of E(g), normalized so that E(0) is the pullback twisted by -k P
        drops: Local discriminant decrease of the step out of E(j), for j = 1..g
        degrees: Local degrees once incidence bits are fixed
        tau_bits: Per component, one bit vector per step
    """
    point: str
    splittings: Tuple[SplittingType, ...]
    chern: LocalChernData
    drops: Tuple[Fraction, ...]
    degrees: Optional[LocalDegrees] = None
    tau_bits: Mapping[str, Tuple[Tuple[int, ...], ...]] = field(default_factory=dict)

    @property
    def g(self) -> int:
        return len(self.splittings) - 1

    @property
    def rank(self) -> int:
        return self.splittings[0].rank

    @property
    def mu_seq(self) -> Tuple[int, ...]:
        return tuple(s.mu for s in self.splittings[1:])

    @property
    def mu(self) -> int:
        return self.splittings[-1].mu

    @property
    def endpoint_twist(self) -> int:
        return self.splittings[0].min

    @property
    def telescoped(self) -> Fraction:
        """Local discriminant as the sum of the per-step drops."""
        return sum(self.drops, Fraction(0))

    @property
    def delta_vb_loc(self) -> Fraction:
        """Local discriminant from the accumulated Chern data."""
        return delta_vb_loc(self.chern, self.rank)

    def oracle_chern(self) -> LocalChernData:
        """Recompute the Chern data from the pure endpoint with ch(O_P(m)) sums."""
        k = self.endpoint_twist
        r = self.rank
        chern = LocalChernData(self.point, -r * k, Fraction(-r * k * k, 2))
        for s in self.splittings[1:]:
            m1, r1 = s.parts[0]
            a, ch2 = ch_exceptional_twist(m1)
            chern = chern.add(a * r1, ch2 * r1)
        return chern

    def to_dict(self) -> Dict[str, object]:
        """Convert to dictionary for JSON serialization."""
        result: Dict[str, object] = {
            "g": self.g,
            "mu_seq": list(self.mu_seq),
            "splittings": [str(s) for s in self.splittings],
            "chern": self.chern.to_dict(),
            "delta_vb_loc": str(self.delta_vb_loc),
        }
        if self.degrees is not None:
            result["deg_loc"] = self.degrees.to_dict()
        return result


def _rank2_successors(s: SplittingType) -> List[SplittingType]:
    step = elementary_step(s)
    return step.constraints.enumerate()


def _greedy_successor(s: SplittingType) -> SplittingType:
    (m1, r1) = s.parts[0]
    successor = SplittingType.from_twists((m1 + 1,) * r1 + s.twists()[r1:])
    if not elementary_step(s).constraints.admits(successor):
        raise InvariantViolation("step-constraints", f"greedy successor {successor} of {s} breaks the constraints")
    return successor


def _record_from_path(point: str, path: Sequence[SplittingType]) -> ChainRecord:
    """Build a record from the forward path E(g) -> ... -> E(0)."""
    endpoint = path[-1]
    if not endpoint.is_pure:
        raise InvariantViolation("pure-endpoint", f"chain ends at {endpoint}, which is not pure")
    r, k = endpoint.rank, endpoint.min
    a, ch2 = -r * k, Fraction(-r * k * k, 2)
    drops: List[Fraction] = []
    for s, successor in zip(path, path[1:]):
        step = elementary_step(s)
        if not step.constraints.admits(successor):
            raise InvariantViolation("step-constraints", f"{successor} cannot follow {s} in a chain")
        # E(j) = E(j-1) undone by one step
        a -= step.ch1_change
        ch2 -= step.ch2_change
        drops.append(step.delta_vb_drop)
    return ChainRecord(
        point=point,
        splittings=tuple(reversed(path)),
        chern=LocalChernData(point, a, ch2),
        drops=tuple(reversed(drops)),
    )


def reduce_to_pure(s: SplittingType, point: str = "P") -> List[ChainRecord]:
    """All chains from s down to a pure splitting.

    Rank 2 chains are enumerated exhaustively over every splitting type the step
    constraints admit. Higher ranks follow a single greedy chain.

    Returns:
        ChainRecords ordered by mu sequence
    """
    if s.rank != 2:
        path = [s]
        while not path[-1].is_pure:
            path.append(_greedy_successor(path[-1]))
        return [_record_from_path(point, path)]

    records: List[ChainRecord] = []

    def walk(path: List[SplittingType]) -> None:
        current = path[-1]
        if current.is_pure:
            records.append(_record_from_path(point, path))
            return
        for successor in _rank2_successors(current):
            walk(path + [successor])

    walk([s])
    records.sort(key=lambda record: record.mu_seq)
    logger.debug(f"{s} reduces to pure along {len(records)} chain(s)")
    return records


def update_filtration_degrees(record: ChainRecord,
                              tau_bits: Mapping[str, Sequence[Sequence[int]]]) -> LocalDegrees:
    """Local degrees of the graded pieces along each incident component.

    Each step adds r1 units of local degree on every incident component; the bit
    vector of a step says which graded pieces take them (1 on the quotient line in
    rank 2).

    Args:
        record: Chain record
        tau_bits: Component name to one bit vector per step j = 1..g

    Returns:
        LocalDegrees of E(g), starting from -k on every piece of the pure endpoint

    Raises:
        InvariantViolation: If a bit pattern has the wrong length or weight
    """
    r = record.rank
    degrees: Dict[str, Tuple[int, ...]] = {}
    for component, steps in tau_bits.items():
        steps = [tuple(bits) for bits in steps]
        if len(steps) != record.g:
            raise InvariantViolation(
                "tau-bit-pattern",
                f"{len(steps)} bit vectors for {component!r}, chain has {record.g} steps"
            )
        current = [-record.endpoint_twist] * r
        for j, bits in enumerate(steps, start=1):
            r1 = record.splittings[j].parts[0][1]
            if len(bits) != r or any(bit not in (0, 1) for bit in bits) or sum(bits) != r1:
                raise InvariantViolation(
                    "tau-bit-pattern",
                    f"step {j} on {component!r} needs {r} bits with {r1} set, got {list(bits)}"
                )
            current = [d + bit for d, bit in zip(current, bits)]
        degrees[component] = tuple(current)
    return LocalDegrees(record.point, degrees)


def rank2_tau_bits(taus: Sequence[int]) -> Tuple[Tuple[int, int], ...]:
    """Rank-2 bit vectors from per-step bits (1 means the quotient line)."""
    return tuple((1 - tau, tau) for tau in taus)


def deg_delta_steps(taus: Sequence[int]) -> List[int]:
    """Per-step change of deg^delta_loc: -1 + 2 tau."""
    return [2 * tau - 1 for tau in taus]


def with_tau_bits(record: ChainRecord, tau_bits: Mapping[str, Sequence[Sequence[int]]]) -> ChainRecord:
    """Attach incidence bits and the resulting local degrees to a record."""
    degrees = update_filtration_degrees(record, tau_bits)
    frozen = {name: tuple(tuple(bits) for bits in steps) for name, steps in tau_bits.items()}
    return ChainRecord(record.point, record.splittings, record.chern, record.drops, degrees, frozen)


def rank2_mu_sequences(g: int, cap: int) -> Iterator[Tuple[int, ...]]:
    """Strictly increasing rank-2 mu sequences of length g with odd gaps and mu_g <= cap."""
    def extend(prefix: Tuple[int, ...]) -> Iterator[Tuple[int, ...]]:
        if len(prefix) == g:
            yield prefix
            return
        last = prefix[-1] if prefix else 0
        remaining = g - len(prefix) - 1
        for mu in range(last + 1, cap - remaining + 1, 2):
            yield from extend(prefix + (mu,))

    yield from extend(())


def rank2_chain_chern(point: str, mu_seq: Sequence[int]) -> LocalChernData:
    """Local Chern data of a rank-2 chain whose pure endpoint is the pullback itself."""
    a, ch2 = 0, Fraction(0)
    previous = 0
    for j, mu in enumerate(mu_seq, start=1):
        if mu <= previous or (mu - previous) % 2 == 0:
            raise InvariantViolation("mu-sequence", f"mu sequence {list(mu_seq)} needs odd increasing gaps")
        previous = mu
        m1 = (-j - mu) // 2
        step_a, step_ch2 = ch_exceptional_twist(m1)
        a += step_a
        ch2 += step_ch2
    return LocalChernData(point, a, ch2)


def rank2_chain_splittings(mu_seq: Sequence[int]) -> Tuple[SplittingType, ...]:
    """Splitting types E(0), ..., E(g) of a rank-2 chain starting at the pullback."""
    splittings = [SplittingType.from_pair(0, 0)]
    for j, mu in enumerate(mu_seq, start=1):
        m1 = (-j - mu) // 2
        splittings.append(SplittingType.from_pair(m1, m1 + mu))
    return tuple(splittings)


def telescoped_delta_vb(mu_seq: Sequence[int]) -> Fraction:
    """Rank-2 local discriminant 1/2 sum (mu_j - 1/2)."""
    return sum((mu - HALF for mu in mu_seq), Fraction(0)) / 2


def local_vb_lower_bound(g: int, mu: int) -> Fraction:
    """Lower bound (g^2 - 2g)/4 + mu/2 on the local discriminant of a chain."""
    return Fraction(g * g - 2 * g, 4) + Fraction(mu, 2)


def rank2_chain_record(point: str, mu_seq: Sequence[int]) -> ChainRecord:
    """Chain record of a rank-2 mu sequence whose pure endpoint is the pullback."""
    splittings = rank2_chain_splittings(mu_seq)
    return _record_from_path(point, list(reversed(splittings)))
