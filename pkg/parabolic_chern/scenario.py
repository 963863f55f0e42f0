"""Scenario files: base surface, parabolic bundle and optional extension data.

Scenarios are JSON. Rationals are integers or "p/q" strings; floats are refused.
"""

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional

from .chern import ParabolicBundle
from .errors import ScenarioParseError, UnsupportedRankError
from .localize import PointExtension, pullback_extension
from .minimize import ExtensionCandidate
from .parastruct import CrossingPermutation, FlagData
from .rationals import to_fraction, to_integer
from .surface import (ChowModel, Crossing, DivisorClass, MultiplePoint,
                      SurfaceScenario)

logger = logging.getLogger(__name__)


def _field(data: Mapping[str, Any], key: str, where: str) -> Any:
    if not isinstance(data, Mapping):
        raise ScenarioParseError(f"{where}: expected an object, got {type(data).__name__}")
    try:
        return data[key]
    except KeyError:
        raise ScenarioParseError(f"{where}: missing key {key!r}") from None


def _mapping(value: Any, where: str) -> Mapping[str, Any]:
    if not isinstance(value, Mapping):
        raise ScenarioParseError(f"{where}: expected an object, got {type(value).__name__}")
    return value


def _list(value: Any, where: str) -> List[Any]:
    if not isinstance(value, list):
        raise ScenarioParseError(f"{where}: expected a list, got {type(value).__name__}")
    return value


def _name(value: Any, where: str) -> str:
    if not isinstance(value, str) or not value:
        raise ScenarioParseError(f"{where}: expected a non-empty name, got {value!r}")
    return value


def _divisor(chow: ChowModel, value: Any, where: str) -> DivisorClass:
    coefficients = {
        _name(name, where): to_fraction(coefficient, f"{where}.{name}")
        for name, coefficient in _mapping(value, where).items()
    }
    return chow.divisor(coefficients)


def parse_surface(data: Mapping[str, Any]) -> SurfaceScenario:
    """Build the base scenario from the "surface" block."""
    basis = [_name(name, "surface.basis") for name in _list(_field(data, "basis", "surface"), "surface.basis")]
    matrix = [
        [to_integer(entry, f"surface.intersection_matrix[{i}]") for entry in _list(row, "surface.intersection_matrix")]
        for i, row in enumerate(_list(_field(data, "intersection_matrix", "surface"), "surface.intersection_matrix"))
    ]
    chow = ChowModel(tuple(basis), tuple(tuple(row) for row in matrix))

    components = {
        _name(name, "surface.components"): _divisor(chow, value, f"surface.components.{name}")
        for name, value in _mapping(_field(data, "components", "surface"), "surface.components").items()
    }
    crossings = []
    for index, entry in enumerate(_list(data.get("crossings", []), "surface.crossings")):
        where = f"surface.crossings[{index}]"
        ends = [_name(c, where) for c in _list(_field(entry, "components", where), where)]
        crossings.append(Crossing(_name(_field(entry, "name", where), where), tuple(ends)))
    points = []
    for index, entry in enumerate(_list(data.get("multiple_points", []), "surface.multiple_points")):
        where = f"surface.multiple_points[{index}]"
        incident = [_name(c, where) for c in _list(_field(entry, "components", where), where)]
        points.append(MultiplePoint(_name(_field(entry, "name", where), where), tuple(incident)))
    return SurfaceScenario(chow, components, tuple(crossings), tuple(points))


def parse_bundle(data: Mapping[str, Any], surface: SurfaceScenario) -> ParabolicBundle:
    """Build the base parabolic bundle from the "bundle" block."""
    rank = to_integer(_field(data, "rank", "bundle"), "bundle.rank")
    ch1 = _divisor(surface.chow, _field(data, "ch1", "bundle"), "bundle.ch1")
    ch2 = to_fraction(_field(data, "ch2", "bundle"), "bundle.ch2")

    flags: Dict[str, FlagData] = {}
    for name, entry in _mapping(data.get("flags", {}), "bundle.flags").items():
        where = f"bundle.flags.{name}"
        weights = tuple(to_fraction(w, f"{where}.weights") for w in _list(_field(entry, "weights", where), where))
        degrees = tuple(to_integer(d, f"{where}.gr_degrees") for d in _list(_field(entry, "gr_degrees", where), where))
        flags[_name(name, where)] = FlagData(rank, weights, degrees)

    permutations = []
    for index, entry in enumerate(_list(data.get("permutations", []), "bundle.permutations")):
        where = f"bundle.permutations[{index}]"
        first, second = _pair_of_names(_field(entry, "components", where), where)
        sigma = tuple(to_integer(k, f"{where}.sigma") for k in _list(_field(entry, "sigma", where), where))
        permutations.append(CrossingPermutation(_name(_field(entry, "point", where), where), first, second, sigma))
    return ParabolicBundle(rank, ch1, ch2, flags, tuple(permutations))


def _pair_of_names(value: Any, where: str):
    names = [_name(n, where) for n in _list(value, where)]
    if len(names) != 2:
        raise ScenarioParseError(f"{where}: expected two component names, got {names}")
    return names[0], names[1]


def parse_extension(data: Mapping[str, Any], point: MultiplePoint, where: str) -> ExtensionCandidate:
    """Read a rank-2 extension record keyed by component name into incidence order."""
    degrees = _mapping(_field(data, "deg_delta_loc", where), f"{where}.deg_delta_loc")
    taus = _mapping(_field(data, "tau", where), f"{where}.tau")
    for label, values in (("deg_delta_loc", degrees), ("tau", taus)):
        if set(values) != set(point.components):
            raise ScenarioParseError(
                f"{where}.{label}: keys {sorted(values)} differ from the incident components "
                f"{sorted(point.components)}"
            )
    candidate = ExtensionCandidate(
        mu_seq=tuple(to_integer(mu, f"{where}.mu_chain") for mu in _list(_field(data, "mu_chain", where), where)),
        deg_delta_loc=tuple(to_integer(degrees[name], f"{where}.deg_delta_loc.{name}") for name in point.components),
        f0_deg_delta=to_integer(_field(data, "f0_deg_delta", where), f"{where}.f0_deg_delta"),
        taus=tuple(to_integer(taus[name], f"{where}.tau.{name}") for name in point.components),
        beta0=to_fraction(data.get("beta0", 0), f"{where}.beta0"),
    )
    candidate.validate_record(point.kappa)
    return candidate


def extension_to_dict(candidate: ExtensionCandidate, point: MultiplePoint) -> Dict[str, Any]:
    """Scenario-file form of a rank-2 extension record."""
    return {
        "mu_chain": list(candidate.mu_seq),
        "deg_delta_loc": dict(zip(point.components, candidate.deg_delta_loc)),
        "f0_deg_delta": candidate.f0_deg_delta,
        "beta0": str(candidate.beta0),
        "tau": dict(zip(point.components, candidate.taus)),
    }


@dataclass
class ScenarioFile:
    """Everything a scenario file declares.

    Attributes:
        surface: Base surface and divisor
        bundle: Base parabolic bundle
        extensions: Rank-2 extension record per multiple point (may be empty)
        declared_ch2: Declared ch2 of the bundle on the blown-up surface
        stable_restriction: Whether the bundle is asserted to have stable restriction
        name: Label for reports
    """
    surface: SurfaceScenario
    bundle: ParabolicBundle
    extensions: Dict[str, ExtensionCandidate] = field(default_factory=dict)
    declared_ch2: Optional[Fraction] = None
    stable_restriction: bool = False
    name: str = "scenario"

    def point_extensions(self) -> Optional[Dict[str, PointExtension]]:
        """Full local records for the declared extensions, None when none are declared.

        Points without a declared record get the pullback.

        Raises:
            UnsupportedRankError: If extensions are declared for a bundle not of rank 2
        """
        if not self.extensions:
            return None
        if self.bundle.rank != 2:
            raise UnsupportedRankError("scenario extensions", self.bundle.rank)
        records = {}
        for point in self.surface.multiple_points:
            candidate = self.extensions.get(point.name)
            if candidate is None:
                records[point.name] = pullback_extension(point, self.bundle.rank)
            else:
                records[point.name] = candidate.to_point_extension(point)
        return records

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization."""
        surface = self.surface
        data: Dict[str, Any] = {
            "surface": {
                "basis": list(surface.chow.basis_names),
                "intersection_matrix": [list(row) for row in surface.chow.intersection_matrix],
                "components": {name: cls.to_dict() for name, cls in surface.components.items()},
                "crossings": [
                    {"name": crossing.name, "components": list(crossing.components)}
                    for crossing in surface.crossings
                ],
                "multiple_points": [
                    {"name": point.name, "components": list(point.components)}
                    for point in surface.multiple_points
                ],
            },
            "bundle": {
                "rank": self.bundle.rank,
                "ch1": self.bundle.ch1.to_dict(),
                "ch2": str(self.bundle.ch2),
                "flags": {name: flag.to_dict() for name, flag in self.bundle.flags.items()},
                "permutations": [perm.to_dict() for perm in self.bundle.crossings],
            },
            "stable_restriction": self.stable_restriction,
        }
        if self.extensions:
            data["extensions"] = {
                point.name: extension_to_dict(self.extensions[point.name], point)
                for point in surface.multiple_points
                if point.name in self.extensions
            }
        if self.declared_ch2 is not None:
            data["blown_up"] = {"ch2": str(self.declared_ch2)}
        return data

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], name: str = "scenario") -> "ScenarioFile":
        """Create instance from dictionary.

        Raises:
            ScenarioParseError: On missing keys, wrong types or bad rationals
            InvariantViolation: On data that parses but breaks an invariant
        """
        data = _mapping(data, "scenario")
        surface = parse_surface(_mapping(_field(data, "surface", "scenario"), "surface"))
        bundle = parse_bundle(_mapping(_field(data, "bundle", "scenario"), "bundle"), surface)

        extensions: Dict[str, ExtensionCandidate] = {}
        for point_name, entry in _mapping(data.get("extensions", {}), "extensions").items():
            if bundle.rank != 2:
                raise UnsupportedRankError("scenario extensions", bundle.rank)
            point = surface.multiple_point(point_name)
            extensions[point_name] = parse_extension(_mapping(entry, f"extensions.{point_name}"),
                                                     point, f"extensions.{point_name}")

        declared_ch2 = None
        if "blown_up" in data:
            blown_up = _mapping(data["blown_up"], "blown_up")
            declared_ch2 = to_fraction(_field(blown_up, "ch2", "blown_up"), "blown_up.ch2")

        stable = data.get("stable_restriction", False)
        if not isinstance(stable, bool):
            raise ScenarioParseError(f"stable_restriction: expected true or false, got {stable!r}")

        return cls(surface, bundle, extensions, declared_ch2, stable, name)

    @classmethod
    def load(cls, path: Path) -> "ScenarioFile":
        """Read a scenario file.

        Raises:
            ScenarioParseError: If the file cannot be read or is not valid JSON
        """
        path = Path(path)
        try:
            with open(path, 'r', encoding='utf-8') as f:
                data = json.load(f)
        except OSError as e:
            raise ScenarioParseError(f"cannot read {path}: {e}") from e
        except json.JSONDecodeError as e:
            raise ScenarioParseError(f"{path}: invalid JSON ({e})") from e

        scenario = cls.from_dict(data, name=path.stem)
        logger.info(
            f"Loaded scenario '{scenario.name}': rank {scenario.bundle.rank}, "
            f"{len(scenario.surface.components)} components, {len(scenario.surface.multiple_points)} multiple points"
        )
        return scenario

    def save(self, path: Path) -> None:
        """Write the scenario in canonical form."""
        path = Path(path)
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(self.to_dict(), f, indent=2, sort_keys=True, ensure_ascii=False)
            f.write("\n")
        logger.debug(f"Saved scenario to {path}")
