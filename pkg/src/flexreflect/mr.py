"""Movable-reflector (unrotated plate) placement.

Covers the closed-form specular placement, the small-plate cubic, packing of
several plates inside one main lobe, the single-plate area search and the
sequential lobe-chaining planner for area coverage.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional, Tuple

import numpy as np

from .errors import (
    GeometryError,
    NonConvergenceError,
    SpacingInfeasibleError,
    UnhandledGeometryError,
)
from .geometry import (
    Point,
    ReflectorDims,
    ReflectorPose,
    TargetArea,
    delta_field,
    projection_delta,
)
from .link_budget import array_factor
from .roots import find_root, real_cubic_roots

DEFAULT_SEARCH_STEP = 0.05
DEFAULT_EXTREMA_STEP = 0.5
DEFAULT_METRIC_STEP = 1.0

Lobe = Tuple[Optional[Point], Optional[Point]]


@dataclass
class PlacementSolution:
    """Ordered poses plus the worst-case metric the planner optimized.

    ``per_reflector_lobes`` holds, per pose, the (left, right) main-lobe
    anchor locations; either side may be ``None`` when the planner never
    needed it.
    """

    poses: List[ReflectorPose]
    worst_case_metric: float
    per_reflector_lobes: List[Lobe] = field(default_factory=list)


class MainLobeInterval(NamedTuple):
    x_br: float
    x_bl: float


class DeltaExtrema(NamedTuple):
    delta_min: float
    delta_max: float
    r_min: Point
    r_max: Point


def _delta(tx: Point, x: float, r: Point, omega: float = 0.0) -> float:
    return projection_delta(tx, ReflectorPose(x, omega), r)


def specular_placement(tx: Point, r: Point) -> float:
    """Placement where the incidence and reflection angles coincide."""
    if tx.y * r.y <= 0:
        raise GeometryError("Tx and target must both lie strictly on one side of the x-axis")
    denom = tx.y + r.y
    if denom == 0:
        raise GeometryError("degenerate geometry: y_t + y_r = 0")
    return tx.x + tx.y / denom * (r.x - tx.x)


def path_loss_objective(tx: Point, r: Point, x):
    """``d_t^2 d_r^4``, minimised by an electrically small plate."""
    x = np.asarray(x, dtype=float)
    return ((x - tx.x) ** 2 + tx.y**2) * ((r.x - x) ** 2 + r.y**2) ** 2


def small_reflector_cubic(tx: Point, r: Point) -> Tuple[float, float, float, float]:
    ro = r.x**2 + r.y**2
    to = tx.x**2 + tx.y**2
    return (
        3.0,
        -(5.0 * tx.x + 4.0 * r.x),
        ro + 2.0 * to + 6.0 * r.x * tx.x,
        -(ro * tx.x + 2.0 * to * r.x),
    )


def small_reflector_placement(tx: Point, r: Point) -> float:
    """Stationary point of ``d_t^2 d_r^4`` with the smallest objective."""
    roots = real_cubic_roots(*small_reflector_cubic(tx, r))
    return min(roots, key=lambda x: (float(path_loss_objective(tx, r, x)), x))


def main_lobe_interval(tx: Point, r: Point, dims: ReflectorDims) -> MainLobeInterval:
    """Placements putting ``r`` exactly on the right / left main-lobe edge.

    The projection decreases monotonically in x, so the right-edge placement
    (projection = +half_lobe) comes first.
    """
    c = dims.half_lobe
    x0 = specular_placement(tx, r)
    x_br = find_root(lambda x: _delta(tx, x, r) - c, x0 - 1.0, x0, expand=True, what="x_br")
    x_bl = find_root(lambda x: _delta(tx, x, r) + c, x0, x0 + 1.0, expand=True, what="x_bl")
    return MainLobeInterval(x_br, x_bl)


def multi_mr_single_target(
    tx: Point, r: Point, dims: ReflectorDims, m_max: Optional[int] = None
) -> PlacementSolution:
    """Plates spaced by L1 around the specular point, inside the main lobe.

    If more plates fit than ``m_max`` the ones nearest the specular point
    are kept. The metric is the summed path gain ``sum sigma/(d_t^2 d_r^2)``.
    """
    from .link_budget import path_gain

    x_star = specular_placement(tx, r)
    x_br, x_bl = main_lobe_interval(tx, r, dims)
    n_left = math.floor((x_star - x_br) / dims.l1)
    n_right = math.floor((x_bl - x_star) / dims.l1)
    count = n_left + n_right + 1
    xs = [x_star - n_left * dims.l1 + m * dims.l1 for m in range(count)]
    if m_max is not None and count > m_max:
        if m_max < 1:
            raise ValueError("m_max must be at least 1")
        keep = sorted(range(count), key=lambda i: (abs(xs[i] - x_star), xs[i]))[:m_max]
        xs = [xs[i] for i in sorted(keep)]
    poses = [ReflectorPose(x, 0.0) for x in xs]
    metric = sum(path_gain(tx, p, r, dims) for p in poses)
    return PlacementSolution(poses, metric, [(None, None)] * len(poses))


def delta_extrema_area(
    x: float,
    omega: float,
    tx: Point,
    area: TargetArea,
    grid_step: float = DEFAULT_EXTREMA_STEP,
) -> DeltaExtrema:
    """Smallest and largest projection over the area, from boundary samples.

    The plate sits on the x-axis outside the area, so every direction from it
    into the area also meets the boundary; the projection depends on ``r``
    only through that direction, hence the boundary carries both extremes.
    Corners are always sampled.
    """
    gx, gy = area.perimeter(grid_step)
    d = delta_field(tx, x, omega, gx, gy)
    i_min, i_max = int(np.argmin(d)), int(np.argmax(d))
    return DeltaExtrema(
        float(d[i_min]), float(d[i_max]),
        Point(float(gx[i_min]), float(gy[i_min])),
        Point(float(gx[i_max]), float(gy[i_max])),
    )


def has_null(delta_min: float, delta_max: float, l1_bar: float) -> bool:
    """Whether some ``+-z/L1bar`` (z a positive integer) lies in the range."""
    lo, hi = delta_min * l1_bar, delta_max * l1_bar
    k = math.ceil(lo)
    if k == 0:
        k = 1
    return k <= hi


def worst_case_gain(delta_min: float, delta_max: float, l1_bar: float) -> float:
    """Minimum of the array factor over ``[delta_min, delta_max]``."""
    if has_null(delta_min, delta_max, l1_bar):
        return 0.0
    return float(min(array_factor(delta_min, l1_bar), array_factor(delta_max, l1_bar)))


def worst_case_array_factor(
    x: float,
    tx: Point,
    area: TargetArea,
    dims: ReflectorDims,
    grid_step: float = DEFAULT_EXTREMA_STEP,
) -> float:
    ext = delta_extrema_area(x, 0.0, tx, area, grid_step)
    return worst_case_gain(ext.delta_min, ext.delta_max, dims.l1_bar)


def search_grid(lo: float, hi: float, step: float) -> np.ndarray:
    """Inclusive 1-D scan grid from ``lo`` to ``hi``."""
    if step <= 0:
        raise ValueError("search step must be positive")
    n = int(math.floor((hi - lo) / step + 1e-9))
    xs = lo + step * np.arange(n + 1)
    if hi - xs[-1] > 1e-9:
        xs = np.append(xs, hi)
    return xs


def area_search_bounds(tx: Point, area: TargetArea) -> Tuple[float, float]:
    """Specular placements for the lower-left and upper-right corners."""
    return specular_placement(tx, area.lower_left), specular_placement(tx, area.upper_right)


def single_mr_area_placement(
    tx: Point,
    area: TargetArea,
    dims: ReflectorDims,
    search_step: float = DEFAULT_SEARCH_STEP,
    grid_step: float = DEFAULT_EXTREMA_STEP,
) -> PlacementSolution:
    """One plate maximising the worst-case array factor over the area."""
    x_lower, x_upper = area_search_bounds(tx, area)
    if x_lower > x_upper + 1e-12:
        raise NoSearchRegion(x_lower, x_upper)
    best_x, best = x_lower, -1.0
    for x in search_grid(x_lower, max(x_upper, x_lower), search_step):
        val = worst_case_array_factor(float(x), tx, area, dims, grid_step)
        if val > best:
            best_x, best = float(x), val
    return PlacementSolution([ReflectorPose(best_x, 0.0)], best, [(None, None)])


class NoSearchRegion(GeometryError):
    def __init__(self, lo: float, hi: float):
        super().__init__(f"empty search region [{lo:.6g}, {hi:.6g}]")


def reflection_gain_field(
    tx: Point, poses: List[ReflectorPose], dims: ReflectorDims, gx: np.ndarray, gy: np.ndarray
) -> np.ndarray:
    """Summed array factor ``sum_m sinc^2(pi L1bar Delta_m)`` at each location."""
    total = np.zeros_like(np.asarray(gx, dtype=float))
    for p in poses:
        total += array_factor(delta_field(tx, p.x, p.omega, gx, gy), dims.l1_bar)
    return total


def min_reflection_gain(
    tx: Point, poses: List[ReflectorPose], dims: ReflectorDims, area: TargetArea, step: float
) -> float:
    gx, gy = area.grid(step)
    return float(reflection_gain_field(tx, poses, dims, gx, gy).min())


def left_lobe_endpoint(
    tx: Point, pose: ReflectorPose, area: TargetArea, half_lobe: float
) -> Point:
    """Area location on the left main-lobe edge of ``pose``.

    If the upper-left corner is outside the lobe the edge leaves through the
    top edge of the area, otherwise through the left edge. The free
    coordinate is found by bisection on ``Delta = -half_lobe``.
    """
    c = half_lobe

    def dl(r: Point) -> float:
        return projection_delta(tx, pose, r)

    d_ul = dl(area.upper_left)
    d_ll = dl(area.lower_left)
    if d_ul < -c:
        y = area.y_top
        x = find_root(lambda xr: dl(Point(xr, y)) + c, area.x_left, area.x_right,
                      what="left lobe endpoint on the top edge")
        return Point(x, y)
    if d_ll < -c:
        xl = area.x_left
        y = find_root(lambda yr: dl(Point(xl, yr)) + c, area.y_bottom, area.y_top,
                      what="left lobe endpoint on the left edge")
        return Point(xl, y)
    raise UnhandledGeometryError(
        f"left lobe edge of plate at x={pose.x:.6g} does not cross the top or left edge "
        f"(Delta(r_ul)={d_ul:.6g}, Delta(r_ll)={d_ll:.6g}, edge={-c:.6g})"
    )


def iteration_cap(area: TargetArea, dims: ReflectorDims) -> int:
    return max(1, 10 * math.ceil(area.dx / dims.l1))


def sequential_mr_area_placement(
    tx: Point,
    area: TargetArea,
    dims: ReflectorDims,
    metric_step: float = DEFAULT_METRIC_STEP,
    max_iter: Optional[int] = None,
) -> PlacementSolution:
    """Chain main lobes from the upper-right corner until the lower-left is covered.

    Each plate is placed so that its right lobe edge passes through the
    previous plate's left lobe edge point. Raises
    :class:`SpacingInfeasibleError` if two consecutive plates end up closer
    than L1.
    """
    if tx.y >= 0 or area.y_top >= 0:
        raise GeometryError("Tx and target area must lie below the x-axis")
    c = dims.half_lobe
    cap = max_iter if max_iter is not None else iteration_cap(area, dims)
    r_right = area.upper_right
    poses: List[ReflectorPose] = []
    lobes: List[Lobe] = []

    for _ in range(cap):
        x0 = specular_placement(tx, r_right)
        x_m = find_root(lambda x: _delta(tx, x, r_right) - c, x0 - 1.0, x0,
                        expand=True, what="right lobe placement")
        if poses and abs(x_m - poses[-1].x) < dims.l1:
            raise SpacingInfeasibleError(
                f"plate {len(poses) + 1} at x={x_m:.6g} is closer than L1={dims.l1:.6g} "
                f"to plate {len(poses)} at x={poses[-1].x:.6g}"
            )
        pose = ReflectorPose(x_m, 0.0)
        poses.append(pose)
        d_ll = projection_delta(tx, pose, area.lower_left)
        if -c <= d_ll <= c:
            lobes.append((None, r_right))
            metric = min_reflection_gain(tx, poses, dims, area, metric_step)
            return PlacementSolution(poses, metric, lobes)
        r_left = left_lobe_endpoint(tx, pose, area, c)
        lobes.append((r_left, r_right))
        r_right = r_left

    raise NonConvergenceError(f"lower-left corner still uncovered after {cap} plates")
