"""Coverage maps, worst-case / CDF statistics and benchmark placements."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import PlannerError
from .fr import (
    balanced_area_rotation,
    fr_area_worst_case,
    optimal_rotation,
    reduced_fr_objective,
    rotation_for_lobe_edge,
    corners_feasible,
)
from .geometry import (
    Point,
    ReflectorDims,
    ReflectorPose,
    TargetArea,
    delta_field,
    eta_field,
    incident_vector,
    projection_delta,
    reflection_field,
    same_side_field,
)
from .link_budget import LinkBudgetConfig, PowerSample, array_factor, path_gain, watts_to_dbm
from .mr import (
    DEFAULT_EXTREMA_STEP,
    DEFAULT_SEARCH_STEP,
    delta_extrema_area,
    has_null,
    left_lobe_endpoint,
    worst_case_array_factor,
)

DBM_FLOOR = -130.0
DEFAULT_FIELD_STEP = 1.0

Target = Union[Point, TargetArea]


@dataclass
class CoverageField:
    """Per-sample receive power and reflection gain over a grid of the area.

    Arrays are flattened row-major with x varying fastest.
    """

    area: TargetArea
    step: float
    x: np.ndarray
    y: np.ndarray
    power: np.ndarray
    gain: np.ndarray
    feasible: np.ndarray

    def __len__(self) -> int:
        return int(self.power.size)

    def samples(self) -> Iterator[PowerSample]:
        for xi, yi, p, ok in zip(self.x, self.y, self.power, self.feasible):
            yield PowerSample(Point(float(xi), float(yi)), float(p), bool(ok))


def to_display_dbm(power_w, floor_dbm: float = DBM_FLOOR):
    """dBm for presentation, clamped at ``floor_dbm`` (zero power included)."""
    p = np.asarray(power_w, dtype=float)
    with np.errstate(divide="ignore"):
        dbm = 10.0 * np.log10(np.where(p > 0, p, 1.0) * 1e3)
    dbm = np.where(p > 0, np.maximum(dbm, floor_dbm), floor_dbm)
    return float(dbm) if dbm.ndim == 0 else dbm


def _field_chunk(cfg: LinkBudgetConfig, poses, gx, gy):
    dims = cfg.dims
    gain_sum = np.zeros(gx.shape)
    power_gain = np.zeros(gx.shape)
    any_feasible = np.zeros(gx.shape, dtype=bool)
    for p in poses:
        _, d_t = incident_vector(cfg.tx, p.x)
        _, _, d_r = reflection_field(p.x, gx, gy)
        af = array_factor(delta_field(cfg.tx, p.x, p.omega, gx, gy), dims.l1_bar)
        ok = same_side_field(cfg.tx, p.x, p.omega, gx, gy)
        sigma = dims.sigma_max * eta_field(p.x, p.omega, gx, gy) * af
        power_gain += np.where(ok, sigma / (d_t**2 * d_r**2), 0.0)
        gain_sum += af
        any_feasible |= ok
    return cfg.power_scale * power_gain, gain_sum, any_feasible


def evaluate_field(
    cfg: LinkBudgetConfig,
    poses: Sequence[ReflectorPose],
    area: TargetArea,
    step: float = DEFAULT_FIELD_STEP,
    threads: int = 1,
) -> CoverageField:
    """Receive power and reflection gain ``sum_m sinc^2`` at every grid sample.

    Rows of the grid may be split over ``threads`` workers; results do not
    depend on the split.
    """
    gx, gy = area.grid(step)
    if not poses:
        z = np.zeros(gx.shape)
        return CoverageField(area, step, gx, gy, z, z.copy(), np.zeros(gx.shape, dtype=bool))
    if threads <= 1 or gx.size < 4096:
        power, gain, ok = _field_chunk(cfg, poses, gx, gy)
    else:
        bounds = np.linspace(0, gx.size, threads + 1).astype(int)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda ab: _field_chunk(cfg, poses, gx[ab[0]:ab[1]], gy[ab[0]:ab[1]]),
                                  zip(bounds[:-1], bounds[1:])))
        power = np.concatenate([p[0] for p in parts])
        gain = np.concatenate([p[1] for p in parts])
        ok = np.concatenate([p[2] for p in parts])
    return CoverageField(area, step, gx, gy, power, gain, ok)


def min_power(field: CoverageField) -> PowerSample:
    if len(field) == 0:
        raise ValueError("empty field")
    i = int(np.argmin(field.power))
    return PowerSample(Point(float(field.x[i]), float(field.y[i])), float(field.power[i]),
                       bool(field.feasible[i]))


def empirical_cdf(field: CoverageField, floor_dbm: float = DBM_FLOOR) -> List[Tuple[float, float]]:
    """Sorted (dBm, i/N) pairs, i = 1..N."""
    if len(field) == 0:
        raise ValueError("empty field")
    dbm = np.sort(to_display_dbm(field.power, floor_dbm))
    n = dbm.size
    return [(float(v), (i + 1) / n) for i, v in enumerate(dbm)]


def median_power(field: CoverageField) -> float:
    return float(np.median(field.power))


def worst_case_power_single(
    cfg: LinkBudgetConfig,
    pose: ReflectorPose,
    area: TargetArea,
    step: float = DEFAULT_FIELD_STEP,
    extrema_step: float = DEFAULT_EXTREMA_STEP,
) -> float:
    """Minimum receive power of one plate over the continuous area.

    If a sinc null falls inside the projection range the projection crosses
    it somewhere in the (connected) area, so the minimum is exactly 0;
    otherwise the grid minimum is returned.
    """
    ext = delta_extrema_area(pose.x, pose.omega, cfg.tx, area, extrema_step)
    if has_null(ext.delta_min, ext.delta_max, cfg.dims.l1_bar):
        return 0.0
    return min_power(evaluate_field(cfg, [pose], area, step)).power


# Benchmarks

SCHEME_KINDS = (
    "fpr",
    "fprr",
    "equal_spacing_mr",
    "equal_spacing_fr",
    "movable_region_mr",
    "movable_region_fr",
)


@dataclass(frozen=True)
class BenchmarkScheme:
    """Benchmark placement rule.

    ``x_fixed`` anchors fpr / fprr / movable_region (default: the Tx x for a
    point target, the Tx-to-area-center midpoint for an area);
    ``region_size`` is the movable-region width S; ``count`` the number of
    equally spaced plates.
    """

    kind: str
    x_fixed: Optional[float] = None
    region_size: Optional[float] = None
    count: Optional[int] = None

    def __post_init__(self):
        if self.kind not in SCHEME_KINDS:
            raise ValueError(f"unknown benchmark scheme {self.kind!r}")
        if self.kind.startswith("movable_region"):
            if self.region_size is None or self.region_size < 0:
                raise ValueError("movable_region schemes need region_size >= 0")
        if self.kind.startswith("equal_spacing"):
            if self.count is None or self.count < 1:
                raise ValueError("equal_spacing schemes need count >= 1")


def _anchor_x(scheme: BenchmarkScheme, tx: Point, target: Target) -> float:
    if scheme.x_fixed is not None:
        return scheme.x_fixed
    if isinstance(target, TargetArea):
        return (tx.x + target.center.x) / 2.0
    return tx.x


def _region_grid(center: float, size: float, step: float) -> np.ndarray:
    # Grid anchored at the region center so larger regions contain smaller ones.
    k = int(math.floor(size / 2.0 / step + 1e-9))
    return center + step * np.arange(-k, k + 1)


def equal_spacing_positions(tx: Point, area: TargetArea, count: int) -> np.ndarray:
    return np.linspace(tx.x, area.x_right, count) if count > 1 else np.array([tx.x])


def _chained_rotations(tx: Point, xs: Sequence[float], area: TargetArea, dims: ReflectorDims) -> List[float]:
    """Lobe-chaining rotations for fixed positions, rightmost plate first.

    Each plate puts its right lobe edge on the current anchor, starting at
    the upper-right corner. Once the lower-left corner is covered (or the
    chain cannot continue) the remaining plates aim at the area center.
    """
    c = dims.half_lobe
    omegas = {}
    anchor: Optional[Point] = area.upper_right
    for x in sorted(xs, reverse=True):
        if anchor is None:
            omegas[x] = optimal_rotation(tx, x, area.center)
            continue
        try:
            w = rotation_for_lobe_edge(tx, x, anchor, c)
            pose = ReflectorPose(x, w)
            if -c <= projection_delta(tx, pose, area.lower_left) <= c:
                anchor = None
            else:
                anchor = left_lobe_endpoint(tx, pose, area, c)
        except PlannerError:
            w = optimal_rotation(tx, x, area.center)
            anchor = None
        omegas[x] = w
    return [omegas[x] for x in xs]


def benchmark_poses(
    scheme: BenchmarkScheme,
    tx: Point,
    dims: ReflectorDims,
    target: Target,
    search_step: float = DEFAULT_SEARCH_STEP,
    grid_step: float = DEFAULT_EXTREMA_STEP,
) -> List[ReflectorPose]:
    kind = scheme.kind
    area = target if isinstance(target, TargetArea) else None

    if kind == "fpr":
        return [ReflectorPose(_anchor_x(scheme, tx, target), 0.0)]
    if kind == "fprr":
        x = _anchor_x(scheme, tx, target)
        w = balanced_area_rotation(tx, x, area, grid_step) if area else optimal_rotation(tx, x, target)
        return [ReflectorPose(x, w)]
    if kind.startswith("equal_spacing"):
        if area is None:
            raise ValueError("equal_spacing schemes need an area target")
        xs = [float(x) for x in equal_spacing_positions(tx, area, scheme.count)]
        if kind == "equal_spacing_mr":
            return [ReflectorPose(x, 0.0) for x in xs]
        return [ReflectorPose(x, w) for x, w in zip(xs, _chained_rotations(tx, xs, area, dims))]

    xs = _region_grid(_anchor_x(scheme, tx, target), scheme.region_size, search_step)
    if kind == "movable_region_mr":
        if area is None:
            vals = [path_gain(tx, ReflectorPose(float(x), 0.0), target, dims) for x in xs]
        else:
            vals = [worst_case_array_factor(float(x), tx, area, dims, grid_step) for x in xs]
        i = int(np.argmax(vals))
        return [ReflectorPose(float(xs[i]), 0.0)]

    if area is None:
        vals = reduced_fr_objective(tx, xs, target)
        x = float(xs[int(np.argmax(vals))])
        return [ReflectorPose(x, optimal_rotation(tx, x, target))]
    best = None
    for x in xs:
        w, val = fr_area_worst_case(tx, float(x), area, dims, grid_step)
        pose = ReflectorPose(float(x), w)
        if corners_feasible(tx, pose, area) and (best is None or val > best[0]):
            best = (val, pose)
    if best is None:
        raise ValueError("no feasible rotation inside the movable region")
    return [best[1]]
