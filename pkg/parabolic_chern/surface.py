"""Divisor classes, intersection pairing and the blow-up at multiple points."""

import logging
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterable, List, Mapping, Tuple, Union

from .errors import InvariantViolation

logger = logging.getLogger(__name__)

Scalar = Union[int, Fraction]


@dataclass(frozen=True)
class ChowModel:
    """Divisor-class group with an integral intersection form.

    Attributes:
        basis_names: Labels of the basis classes
        intersection_matrix: Symmetric integer matrix of pairings
        exceptional_flags: Marks basis classes that are exceptional curves
    """
    basis_names: Tuple[str, ...]
    intersection_matrix: Tuple[Tuple[int, ...], ...]
    exceptional_flags: Tuple[bool, ...] = ()

    def __post_init__(self):
        names = tuple(self.basis_names)
        if len(set(names)) != len(names):
            raise InvariantViolation("distinct-basis-names", f"duplicate basis names in {list(names)}")

        matrix = tuple(tuple(row) for row in self.intersection_matrix)
        size = len(names)
        if len(matrix) != size or any(len(row) != size for row in matrix):
            raise InvariantViolation(
                "square-intersection-matrix",
                f"intersection matrix must be {size}x{size}"
            )
        matrix = tuple(tuple(_integral_entry(entry, names[i], names[j]) for j, entry in enumerate(row))
                       for i, row in enumerate(matrix))
        for i in range(size):
            for j in range(i + 1, size):
                if matrix[i][j] != matrix[j][i]:
                    raise InvariantViolation(
                        "symmetric-intersection-matrix",
                        f"{names[i]}.{names[j]} = {matrix[i][j]} but {names[j]}.{names[i]} = {matrix[j][i]}"
                    )

        flags = tuple(bool(flag) for flag in self.exceptional_flags) or (False,) * size
        if len(flags) != size:
            raise InvariantViolation("exceptional-flags", "one exceptional flag per basis class is required")
        for i, is_exceptional in enumerate(flags):
            if not is_exceptional:
                continue
            if matrix[i][i] != -1:
                raise InvariantViolation("exceptional-class", f"{names[i]} is exceptional but has square {matrix[i][i]}")
            for j in range(size):
                if j != i and matrix[i][j] != 0:
                    raise InvariantViolation(
                        "exceptional-class",
                        f"exceptional {names[i]} pairs to {matrix[i][j]} with {names[j]}"
                    )

        object.__setattr__(self, "basis_names", names)
        object.__setattr__(self, "intersection_matrix", matrix)
        object.__setattr__(self, "exceptional_flags", flags)

    @property
    def dimension(self) -> int:
        """Number of basis classes."""
        return len(self.basis_names)

    @property
    def exceptional_names(self) -> Tuple[str, ...]:
        """Names of the exceptional basis classes."""
        return tuple(name for name, flag in zip(self.basis_names, self.exceptional_flags) if flag)

    def index(self, name: str) -> int:
        """Position of a basis class."""
        try:
            return self.basis_names.index(name)
        except ValueError:
            raise InvariantViolation("declared-basis-class", f"unknown basis class {name!r}") from None

    def zero(self) -> "DivisorClass":
        """The zero class."""
        return DivisorClass(self.basis_names, (Fraction(0),) * self.dimension)

    def basis_class(self, name: str) -> "DivisorClass":
        """The class of a single basis element."""
        coefficients = [Fraction(0)] * self.dimension
        coefficients[self.index(name)] = Fraction(1)
        return DivisorClass(self.basis_names, tuple(coefficients))

    def divisor(self, coefficients: Mapping[str, Scalar]) -> "DivisorClass":
        """Build a class from a name to coefficient mapping (missing names are 0)."""
        values = [Fraction(0)] * self.dimension
        for name, value in coefficients.items():
            values[self.index(name)] = Fraction(value)
        return DivisorClass(self.basis_names, tuple(values))


def _integral_entry(entry, row_name: str, column_name: str) -> int:
    if isinstance(entry, bool):
        raise InvariantViolation("integral-intersection-matrix", f"{row_name}.{column_name} is not an integer")
    if isinstance(entry, int):
        return entry
    if isinstance(entry, Fraction) and entry.denominator == 1:
        return int(entry)
    raise InvariantViolation(
        "integral-intersection-matrix",
        f"{row_name}.{column_name} = {entry!r} is not an integer"
    )


@dataclass(frozen=True)
class DivisorClass:
    """Exact rational coefficient vector over the basis of a ChowModel."""
    basis_names: Tuple[str, ...]
    coefficients: Tuple[Fraction, ...]

    def __post_init__(self):
        names = tuple(self.basis_names)
        values = tuple(Fraction(value) for value in self.coefficients)
        if len(names) != len(values):
            raise InvariantViolation("basis-match", "coefficient vector length differs from the basis")
        object.__setattr__(self, "basis_names", names)
        object.__setattr__(self, "coefficients", values)

    def _check_basis(self, other: "DivisorClass") -> None:
        if self.basis_names != other.basis_names:
            raise InvariantViolation(
                "basis-match",
                f"classes live over different bases {list(self.basis_names)} and {list(other.basis_names)}"
            )

    def __add__(self, other: "DivisorClass") -> "DivisorClass":
        self._check_basis(other)
        return DivisorClass(self.basis_names, tuple(a + b for a, b in zip(self.coefficients, other.coefficients)))

    def __sub__(self, other: "DivisorClass") -> "DivisorClass":
        self._check_basis(other)
        return DivisorClass(self.basis_names, tuple(a - b for a, b in zip(self.coefficients, other.coefficients)))

    def __neg__(self) -> "DivisorClass":
        return DivisorClass(self.basis_names, tuple(-a for a in self.coefficients))

    def __mul__(self, scalar: Scalar) -> "DivisorClass":
        if not isinstance(scalar, (int, Fraction)) or isinstance(scalar, bool):
            return NotImplemented
        return DivisorClass(self.basis_names, tuple(a * scalar for a in self.coefficients))

    __rmul__ = __mul__

    def coefficient(self, name: str) -> Fraction:
        """Coefficient of one basis class."""
        try:
            return self.coefficients[self.basis_names.index(name)]
        except ValueError:
            raise InvariantViolation("declared-basis-class", f"unknown basis class {name!r}") from None

    @property
    def is_integral(self) -> bool:
        """Whether every coefficient is an integer."""
        return all(value.denominator == 1 for value in self.coefficients)

    @property
    def is_zero(self) -> bool:
        """Whether every coefficient vanishes."""
        return all(value == 0 for value in self.coefficients)

    def to_dict(self) -> Dict[str, str]:
        """Convert to a name to "p/q" mapping over the full basis."""
        return {name: str(value) for name, value in zip(self.basis_names, self.coefficients)}


def pair(a: DivisorClass, b: DivisorClass, chow: ChowModel) -> Fraction:
    """Intersection number of two classes.

    Args:
        a: First class
        b: Second class
        chow: Model both classes live over

    Returns:
        Exact degree of a.b

    Raises:
        InvariantViolation: If either class is over another basis
    """
    for cls in (a, b):
        if cls.basis_names != chow.basis_names:
            raise InvariantViolation(
                "basis-match",
                f"class over {list(cls.basis_names)} paired in model over {list(chow.basis_names)}"
            )
    total = Fraction(0)
    for i, a_i in enumerate(a.coefficients):
        if a_i == 0:
            continue
        row = chow.intersection_matrix[i]
        for j, b_j in enumerate(b.coefficients):
            if b_j:
                total += a_i * row[j] * b_j
    return total


@dataclass(frozen=True)
class Crossing:
    """A transverse meeting point of two components."""
    name: str
    components: Tuple[str, str]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if len(self.components) != 2 or self.components[0] == self.components[1]:
            raise InvariantViolation(
                "crossing-components",
                f"crossing {self.name!r} must join two distinct components, got {list(self.components)}"
            )

    def joins(self, i: str, j: str) -> bool:
        """Whether the crossing joins components i and j (in either order)."""
        return set(self.components) == {i, j}

    def other(self, component: str) -> str:
        """The component on the other side of the crossing."""
        first, second = self.components
        return second if component == first else first


@dataclass(frozen=True)
class MultiplePoint:
    """A point where three or more components meet with distinct tangents."""
    name: str
    components: Tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if len(set(self.components)) != len(self.components):
            raise InvariantViolation(
                "distinct-incident-components",
                f"multiple point {self.name!r} lists a component twice: {list(self.components)}"
            )
        if len(self.components) < 3:
            raise InvariantViolation(
                "multiple-point-size",
                f"multiple point {self.name!r} needs at least three components, got {len(self.components)}"
            )

    @property
    def kappa(self) -> int:
        """Number of incident components."""
        return len(self.components)

    def pairs(self) -> List[Tuple[str, str]]:
        """Unordered incident pairs in listing order."""
        return list(combinations(self.components, 2))


@dataclass(frozen=True)
class DivisorSurface:
    """A normal crossings divisor on a smooth surface.

    Attributes:
        chow: Divisor-class model of the surface
        components: Component name to class
        crossings: Every transverse meeting point between two components
    """
    chow: ChowModel
    components: Mapping[str, DivisorClass]
    crossings: Tuple[Crossing, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "crossings", tuple(self.crossings))
        for name, cls in self.components.items():
            if cls.basis_names != self.chow.basis_names:
                raise InvariantViolation("basis-match", f"component {name!r} is not over the surface basis")
        for crossing in self.crossings:
            for component in crossing.components:
                if component not in self.components:
                    raise InvariantViolation(
                        "declared-components",
                        f"crossing {crossing.name!r} references undeclared component {component!r}"
                    )

    @property
    def component_names(self) -> Tuple[str, ...]:
        """Component names in declaration order."""
        return tuple(self.components)

    def self_intersection(self, component: str) -> Fraction:
        """Square of a component class."""
        cls = self.components[component]
        return pair(cls, cls, self.chow)

    def crossings_of(self, component: str) -> List[Crossing]:
        """Crossings lying on a component."""
        return [crossing for crossing in self.crossings if component in crossing.components]


@dataclass(frozen=True)
class SurfaceScenario:
    """Base surface with a divisor whose only non-normal-crossing points are multiple points."""
    chow: ChowModel
    components: Mapping[str, DivisorClass]
    crossings: Tuple[Crossing, ...] = ()
    multiple_points: Tuple[MultiplePoint, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "crossings", tuple(self.crossings))
        object.__setattr__(self, "multiple_points", tuple(self.multiple_points))
        self._validate()

    def _validate(self) -> None:
        if any(self.chow.exceptional_flags):
            raise InvariantViolation(
                "single-blow-up",
                f"base surface already carries exceptional classes {list(self.chow.exceptional_names)}"
            )

        for name, cls in self.components.items():
            if cls.basis_names != self.chow.basis_names:
                raise InvariantViolation("basis-match", f"component {name!r} is not over the base basis")
            if not cls.is_integral:
                raise InvariantViolation("integral-component", f"component {name!r} has a non-integral class")

        point_names = [crossing.name for crossing in self.crossings] + [point.name for point in self.multiple_points]
        duplicates = sorted(name for name, count in Counter(point_names).items() if count > 1)
        if duplicates:
            raise InvariantViolation("distinct-point-names", f"duplicate point names {duplicates}")
        clashes = sorted(set(point_names) & (set(self.components) | set(self.chow.basis_names)))
        if clashes:
            raise InvariantViolation(
                "distinct-point-names",
                f"point names {clashes} clash with component or basis names"
            )

        for crossing in self.crossings:
            self._check_declared(crossing.name, crossing.components)
        for point in self.multiple_points:
            self._check_declared(point.name, point.components)

        for i, j in combinations(self.components, 2):
            expected = pair(self.components[i], self.components[j], self.chow)
            counted = len(self.crossings_between(i, j)) + len(self.multiple_points_between(i, j))
            if expected != counted:
                raise InvariantViolation(
                    "crossing-count",
                    f"{i}.{j} = {expected} but the scenario lists {counted} meeting points"
                )

    def _check_declared(self, point: str, components: Iterable[str]) -> None:
        for component in components:
            if component not in self.components:
                raise InvariantViolation(
                    "declared-components",
                    f"point {point!r} references undeclared component {component!r}"
                )

    def crossings_between(self, i: str, j: str) -> List[Crossing]:
        """Ordinary crossings joining two components."""
        return [crossing for crossing in self.crossings if crossing.joins(i, j)]

    def multiple_points_between(self, i: str, j: str) -> List[MultiplePoint]:
        """Multiple points incident to both components."""
        return [point for point in self.multiple_points if i in point.components and j in point.components]

    def multiple_point(self, name: str) -> MultiplePoint:
        """Look up a multiple point by name."""
        for point in self.multiple_points:
            if point.name == name:
                return point
        raise InvariantViolation("declared-points", f"unknown multiple point {name!r}")

    def pairwise_surface(self) -> DivisorSurface:
        """The divisor on the base surface with multiple points read pairwise.

        Every unordered incident pair at a multiple point becomes a crossing named
        after the point, which is how the global invariant of the base bundle is
        evaluated.
        """
        crossings = list(self.crossings)
        for point in self.multiple_points:
            crossings.extend(Crossing(point.name, pair_) for pair_ in point.pairs())
        return DivisorSurface(self.chow, dict(self.components), tuple(crossings))


@dataclass(frozen=True)
class BlowUp:
    """The blow-up of a scenario at all of its multiple points.

    Attributes:
        base: Scenario on the base surface
        chow: Model of the blown-up surface (base basis followed by exceptional classes)
        strict_transforms: Component name to strict transform class
        exceptional: Multiple point name to exceptional class
    """
    base: SurfaceScenario
    chow: ChowModel
    strict_transforms: Mapping[str, DivisorClass]
    exceptional: Mapping[str, DivisorClass] = field(default_factory=dict)

    def pullback(self, cls: DivisorClass) -> DivisorClass:
        """Pull a base class back to the blown-up surface."""
        if cls.basis_names != self.base.chow.basis_names:
            raise InvariantViolation("basis-match", "pullback of a class not over the base basis")
        padding = (Fraction(0),) * len(self.exceptional)
        return DivisorClass(self.chow.basis_names, cls.coefficients + padding)

    @staticmethod
    def incidence_name(point: str, component: str) -> str:
        """Name of the point where a strict transform meets an exceptional divisor."""
        return f"{point}/{component}"

    @property
    def surface(self) -> DivisorSurface:
        """The normal crossings divisor on the blown-up surface."""
        components: Dict[str, DivisorClass] = dict(self.strict_transforms)
        components.update(self.exceptional)
        crossings = list(self.base.crossings)
        for point in self.base.multiple_points:
            crossings.extend(
                Crossing(self.incidence_name(point.name, component), (component, point.name))
                for component in point.components
            )
        return DivisorSurface(self.chow, components, tuple(crossings))


def blow_up(scenario: SurfaceScenario) -> BlowUp:
    """Blow up every multiple point of a scenario once.

    Args:
        scenario: Valid base scenario

    Returns:
        BlowUp with the extended model, strict transforms and exceptional classes
    """
    base = scenario.chow
    exceptional_names = tuple(point.name for point in scenario.multiple_points)
    size = base.dimension + len(exceptional_names)

    matrix = [list(row) + [0] * len(exceptional_names) for row in base.intersection_matrix]
    for offset in range(len(exceptional_names)):
        row = [0] * size
        row[base.dimension + offset] = -1
        matrix.append(row)

    chow = ChowModel(
        basis_names=base.basis_names + exceptional_names,
        intersection_matrix=tuple(tuple(row) for row in matrix),
        exceptional_flags=(False,) * base.dimension + (True,) * len(exceptional_names),
    )

    exceptional = {name: chow.basis_class(name) for name in exceptional_names}
    padding = (Fraction(0),) * len(exceptional_names)
    strict_transforms: Dict[str, DivisorClass] = {}
    for name, cls in scenario.components.items():
        strict = DivisorClass(chow.basis_names, cls.coefficients + padding)
        for point in scenario.multiple_points:
            if name in point.components:
                strict = strict - exceptional[point.name]
        strict_transforms[name] = strict

    logger.debug(
        f"Blew up {len(exceptional_names)} multiple point(s); "
        f"model has {chow.dimension} basis classes"
    )
    return BlowUp(base=scenario, chow=chow, strict_transforms=strict_transforms, exceptional=exceptional)
