"""Scenario files (YAML) and their validation."""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Union

import yaml

from .geometry import Point, ReflectorDims, TargetArea
from .link_budget import LinkBudgetConfig, dbm_to_watts, wavelength_from_frequency


class ScenarioError(ValueError):
    """Malformed or invalid scenario file; ``field`` names the culprit."""

    def __init__(self, message: str, field: Optional[str] = None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


@dataclass(frozen=True)
class ScenarioOptions:
    grid_step_m: float = 1.0
    search_step_m: float = 0.05
    max_reflectors: int = 5
    region_size_m: float = 100.0


@dataclass(frozen=True)
class ScenarioFile:
    carrier_hz: float
    tx_power_dbm: float
    tx: Point
    l1_wavelengths: float
    l2_wavelengths: float
    target: Union[Point, TargetArea]
    options: ScenarioOptions = field(default_factory=ScenarioOptions)
    digest: str = ""

    @property
    def wavelength(self) -> float:
        return wavelength_from_frequency(self.carrier_hz)

    @property
    def dims(self) -> ReflectorDims:
        return ReflectorDims.from_wavelengths(self.l1_wavelengths, self.l2_wavelengths, self.wavelength)

    @property
    def link(self) -> LinkBudgetConfig:
        return LinkBudgetConfig(dbm_to_watts(self.tx_power_dbm), self.dims, self.tx)

    @property
    def is_area(self) -> bool:
        return isinstance(self.target, TargetArea)


def _number(doc: Dict[str, Any], key: str, path: str, default=None, positive=False) -> float:
    if key not in doc or doc[key] is None:
        if default is None:
            raise ScenarioError("missing required value", path)
        return float(default)
    val = doc[key]
    if isinstance(val, str):
        # YAML 1.1 loads exponent literals without a dot (2.4e9) as strings.
        try:
            val = float(val)
        except ValueError:
            pass
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ScenarioError(f"expected a number, got {val!r}", path)
    val = float(val)
    if not math.isfinite(val):
        raise ScenarioError("must be finite", path)
    if positive and val <= 0:
        raise ScenarioError(f"must be positive, got {val}", path)
    return val


def _mapping(doc: Dict[str, Any], key: str, path: str, required=True) -> Dict[str, Any]:
    val = doc.get(key)
    if val is None:
        if required:
            raise ScenarioError("missing required section", path)
        return {}
    if not isinstance(val, dict):
        raise ScenarioError("expected a mapping", path)
    return val


def _point(doc: Dict[str, Any], path: str) -> Point:
    return Point(_number(doc, "x", f"{path}.x"), _number(doc, "y", f"{path}.y"))


def scenario_from_dict(doc: Any, digest: str = "") -> ScenarioFile:
    if not isinstance(doc, dict):
        raise ScenarioError("scenario must be a mapping at the top level")
    carrier = _number(doc, "carrier_hz", "carrier_hz", default=2.4e9, positive=True)
    power = _number(doc, "tx_power_dbm", "tx_power_dbm", default=30.0)
    tx = _point(_mapping(doc, "tx", "tx"), "tx")
    refl = _mapping(doc, "reflector", "reflector", required=False)
    l1 = _number(refl, "l1_wavelengths", "reflector.l1_wavelengths", default=10.0, positive=True)
    l2 = _number(refl, "l2_wavelengths", "reflector.l2_wavelengths", default=5.0, positive=True)

    tgt = _mapping(doc, "target", "target")
    has_point, has_area = "point" in tgt, "area" in tgt
    if has_point == has_area:
        raise ScenarioError("exactly one of 'point' or 'area' is required", "target")
    if has_point:
        target: Union[Point, TargetArea] = _point(_mapping(tgt, "point", "target.point"), "target.point")
    else:
        a = _mapping(tgt, "area", "target.area")
        target = TargetArea(
            Point(_number(a, "cx", "target.area.cx"), _number(a, "cy", "target.area.cy")),
            _number(a, "dx", "target.area.dx", positive=True),
            _number(a, "dy", "target.area.dy", positive=True),
        )

    o = _mapping(doc, "options", "options", required=False)
    defaults = ScenarioOptions()
    max_refl = _number(o, "max_reflectors", "options.max_reflectors", default=defaults.max_reflectors,
                       positive=True)
    if max_refl != int(max_refl):
        raise ScenarioError("must be an integer", "options.max_reflectors")
    region = o.get("region_size_m", defaults.region_size_m)
    if region is None or isinstance(region, bool) or not isinstance(region, (int, float)) or region < 0:
        raise ScenarioError("must be a nonnegative number", "options.region_size_m")
    options = ScenarioOptions(
        grid_step_m=_number(o, "grid_step_m", "options.grid_step_m", default=defaults.grid_step_m, positive=True),
        search_step_m=_number(o, "search_step_m", "options.search_step_m", default=defaults.search_step_m,
                              positive=True),
        max_reflectors=int(max_refl),
        region_size_m=float(region),
    )
    if tx.y >= 0:
        raise ScenarioError("Tx must lie below the reflector axis (y < 0)", "tx.y")
    return ScenarioFile(carrier, power, tx, l1, l2, target, options, digest)


def parse_scenario(path: Union[str, Path]) -> ScenarioFile:
    """Load and validate a YAML scenario; defaults follow the 2.4 GHz setup."""
    raw = Path(path).read_bytes()
    try:
        doc = yaml.safe_load(raw.decode("utf-8"))
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        raise ScenarioError(f"cannot parse {path}{where}: {getattr(exc, 'problem', exc)}") from exc
    return scenario_from_dict(doc, hashlib.sha256(raw).hexdigest()[:16])
