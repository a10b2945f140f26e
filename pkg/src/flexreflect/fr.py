"""Flexible-reflector (position + rotation) design."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional, Tuple

import numpy as np

from .errors import BlockageError, GeometryError, NoSolutionError, NonConvergenceError
from .geometry import (
    Point,
    ReflectorDims,
    ReflectorPose,
    TargetArea,
    deflection,
    incidence_angles,
    incident_vector,
    projection_delta,
    reflection_vector,
    same_side_field,
)
from .mr import (
    DEFAULT_EXTREMA_STEP,
    DEFAULT_METRIC_STEP,
    DEFAULT_SEARCH_STEP,
    Lobe,
    delta_extrema_area,
    iteration_cap,
    left_lobe_endpoint,
    min_reflection_gain,
    search_grid,
    worst_case_gain,
)
from .roots import find_root

_GRAZING_TOL = 1e-9


class BlockageDistances(NamedTuple):
    d_incident: float
    d_reflect: float
    d_min: float


@dataclass
class FrPlan:
    """Poses of a multi-FR design.

    ``side_markers`` labels each pose ``"seed"``, ``"left"`` or ``"right"``
    relative to the first plate; ``frontiers`` keeps the (x_minus, x_plus)
    candidate pair that was live when the pose was chosen (sequential
    planner only). ``lobe_anchors`` are (left, right) main-lobe edge points.
    """

    poses: List[ReflectorPose]
    worst_case_metric: float
    side_markers: List[str] = field(default_factory=list)
    frontiers: List[Tuple[float, float]] = field(default_factory=list)
    lobe_anchors: List[Lobe] = field(default_factory=list)
    feasibility_violations: int = 0


def _wrap_half_pi(angle: float) -> float:
    """Map an angle onto (-pi/2, pi/2] modulo pi."""
    a = math.fmod(angle, math.pi)
    if a > math.pi / 2:
        a -= math.pi
    elif a <= -math.pi / 2:
        a += math.pi
    return a


def _normal_angle(v: Tuple[float, float]) -> float:
    """Rotation whose edge direction is orthogonal to ``v``."""
    v1, v2 = v
    if math.hypot(v1, v2) < 1e-15:
        raise GeometryError("degenerate direction vector")
    return _wrap_half_pi(math.atan2(-v1, v2))


def optimal_rotation(tx: Point, x: float, r: Point) -> float:
    """Rotation that zeroes the projection, i.e. points the specular
    direction of a plate at ``x`` exactly at ``r``."""
    v = deflection(tx, x, r)
    if math.hypot(*v) < 1e-12:
        raise GeometryError("degenerate deflection vector: a_r == a_t")
    return _normal_angle(v)


def reduced_fr_objective(tx: Point, x, r: Point):
    """``|a_r - a_t|^2 / (4 d_t^2 d_r^2)``; array-friendly in ``x``."""
    xs = np.asarray(x, dtype=float)
    tvx, tvy = xs - tx.x, -tx.y
    d_t = np.hypot(tvx, tvy)
    rvx, rvy = r.x - xs, r.y
    d_r = np.hypot(rvx, rvy)
    dev2 = (rvx / d_r - tvx / d_t) ** 2 + (rvy / d_r - tvy / d_t) ** 2
    out = dev2 / (4.0 * d_t**2 * d_r**2)
    return float(out) if out.ndim == 0 else out


def default_search_interval(tx: Point, x_lo: float, x_hi: float) -> Tuple[float, float]:
    pad = 2.0 * abs(tx.y)
    return min(tx.x, x_lo) - pad, max(tx.x, x_hi) + pad


def _check_interval(interval: Tuple[float, float]) -> None:
    if not interval[0] <= interval[1]:
        raise ValueError(f"empty search interval {interval}")


def fr_single_target(
    tx: Point,
    r: Point,
    search_interval: Optional[Tuple[float, float]] = None,
    search_step: float = DEFAULT_SEARCH_STEP,
) -> ReflectorPose:
    """Best position on a 1-D grid with the plate always rotated optimally."""
    if search_interval is None:
        search_interval = default_search_interval(tx, r.x, r.x)
    _check_interval(search_interval)
    xs = search_grid(search_interval[0], search_interval[1], search_step)
    vals = reduced_fr_objective(tx, xs, r)
    x = float(xs[int(np.argmax(vals))])
    return ReflectorPose(x, optimal_rotation(tx, x, r))


def blockage_min_distance(
    dims: ReflectorDims, theta_t: float, theta_r: float, omega: float
) -> BlockageDistances:
    """Center spacing that keeps a neighbour out of the incident / reflected rays.

    ``d_incident`` protects the incident rays reaching the left end of the
    plate, ``d_reflect`` the reflected rays leaving its right end.
    """
    ct, cr = math.cos(theta_t), math.cos(theta_r)
    if ct <= _GRAZING_TOL or cr <= _GRAZING_TOL or math.cos(omega) <= _GRAZING_TOL:
        raise GeometryError("grazing angle: cosine of incidence, reflection or rotation is ~0")
    half = dims.l1 / 2.0
    d_i = half * (math.cos(omega) - math.tan(theta_t) * math.sin(omega) + 1.0 / ct)
    d_r = half * (math.cos(omega) + math.tan(theta_r) * math.sin(omega) + 1.0 / cr)
    return BlockageDistances(d_i, d_r, max(d_i, d_r))


def pose_blockage_distance(tx: Point, pose: ReflectorPose, r: Point, dims: ReflectorDims) -> float:
    theta_t, theta_r = incidence_angles(tx, pose.x, r)
    return blockage_min_distance(dims, theta_t, theta_r, pose.omega).d_min


def _step_candidate(tx: Point, r: Point, dims: ReflectorDims, x: float, sign: float) -> float:
    """Next candidate one blockage distance away from ``x`` in direction ``sign``.

    The step is widened until it also clears the blockage distance of the new
    candidate itself, so every adjacent pair respects both plates' limits.
    """

    def dist(xx: float) -> float:
        return pose_blockage_distance(tx, ReflectorPose(xx, optimal_rotation(tx, xx, r)), r, dims)

    d_here = dist(x)
    step = d_here
    for _ in range(50):
        nxt = max(d_here, dist(x + sign * step))
        if nxt <= step + 1e-12:
            break
        step = nxt
    return x + sign * step


def multi_fr_single_target(
    tx: Point,
    r: Point,
    dims: ReflectorDims,
    m: int,
    search_interval: Optional[Tuple[float, float]] = None,
    search_step: float = DEFAULT_SEARCH_STEP,
) -> FrPlan:
    """Several optimally rotated plates packed around the single-FR optimum.

    Candidates are generated outward on both sides of the seed position,
    each one blockage distance from its neighbour; the ``m`` candidates with
    the largest reduced objective are kept.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    seed = fr_single_target(tx, r, search_interval, search_step).x
    per_side = math.ceil((m + 1) / 2)
    cands: List[Tuple[float, str]] = [(seed, "seed")]
    for sign, label in ((1.0, "right"), (-1.0, "left")):
        x = seed
        for _ in range(per_side - 1):
            x = _step_candidate(tx, r, dims, x, sign)
            cands.append((x, label))

    scores = [reduced_fr_objective(tx, x, r) for x, _ in cands]
    order = sorted(range(len(cands)), key=lambda i: (-scores[i], cands[i][0]))[:m]
    chosen = sorted((cands[i] for i in order), key=lambda c: c[0])
    poses = [ReflectorPose(x, optimal_rotation(tx, x, r)) for x, _ in chosen]
    _validate_spacing(tx, r, dims, poses)
    metric = dims.sigma_max * sum(scores[i] for i in order)
    return FrPlan(poses, metric, [lab for _, lab in chosen], lobe_anchors=[(None, None)] * len(poses))


def _validate_spacing(tx: Point, r: Point, dims: ReflectorDims, poses: List[ReflectorPose]) -> None:
    for a, b in zip(poses, poses[1:]):
        need = max(pose_blockage_distance(tx, a, r, dims), pose_blockage_distance(tx, b, r, dims))
        if b.x - a.x < need - 1e-9:
            raise BlockageError(
                f"plates at x={a.x:.6g} and x={b.x:.6g} are {b.x - a.x:.6g} apart, need {need:.6g}"
            )


def balanced_area_rotation(
    tx: Point, x: float, area: TargetArea, grid_step: float = DEFAULT_EXTREMA_STEP
) -> float:
    """Rotation giving the two extreme-projection locations equal array factor.

    The extreme locations are taken from the unrotated plate; the rotation
    then makes their projections equal and opposite.
    """
    ext = delta_extrema_area(x, 0.0, tx, area, grid_step)
    (atx, aty), _ = incident_vector(tx, x)
    (m1, m2), _ = reflection_vector(x, ext.r_max)
    (n1, n2), _ = reflection_vector(x, ext.r_min)
    v = (m1 + n1 - 2.0 * atx, m2 + n2 - 2.0 * aty)
    if math.hypot(*v) < 1e-12:
        raise GeometryError("degenerate balancing vector")
    return _normal_angle(v)


def corners_feasible(tx: Point, pose: ReflectorPose, area: TargetArea) -> bool:
    cx = np.array([c.x for c in area.corners()])
    cy = np.array([c.y for c in area.corners()])
    return bool(np.all(same_side_field(tx, pose.x, pose.omega, cx, cy)))


def fr_area_worst_case(
    tx: Point, x: float, area: TargetArea, dims: ReflectorDims, grid_step: float = DEFAULT_EXTREMA_STEP
) -> Tuple[float, float]:
    """(balanced rotation, worst-case array factor over the area) at ``x``."""
    omega = balanced_area_rotation(tx, x, area, grid_step)
    ext = delta_extrema_area(x, omega, tx, area, grid_step)
    return omega, worst_case_gain(ext.delta_min, ext.delta_max, dims.l1_bar)


def single_fr_area(
    tx: Point,
    area: TargetArea,
    dims: ReflectorDims,
    search_interval: Optional[Tuple[float, float]] = None,
    search_step: float = DEFAULT_SEARCH_STEP,
    grid_step: float = DEFAULT_EXTREMA_STEP,
) -> ReflectorPose:
    """Single plate maximising the worst-case array factor over the area.

    Candidates whose balanced rotation leaves any corner on the wrong side
    of the plate are skipped. Worst-case values equal to 1e-12 (all zero on a
    wide area, all one on a point-like one) are broken by the reduced
    objective toward the area center, then by smaller x.
    """
    if search_interval is None:
        search_interval = default_search_interval(tx, area.x_left, area.x_right)
    _check_interval(search_interval)
    best: Optional[Tuple[Tuple[float, float], ReflectorPose]] = None
    for x in search_grid(search_interval[0], search_interval[1], search_step):
        omega = balanced_area_rotation(tx, float(x), area, grid_step)
        pose = ReflectorPose(float(x), omega)
        if not corners_feasible(tx, pose, area):
            continue
        ext = delta_extrema_area(pose.x, omega, tx, area, grid_step)
        gain = worst_case_gain(ext.delta_min, ext.delta_max, dims.l1_bar)
        key = (round(gain, 12), reduced_fr_objective(tx, pose.x, area.center))
        if best is None or key > best[0]:
            best = (key, pose)
    if best is None:
        raise NoSolutionError("no feasible placement in the search interval")
    return best[1]


def path_loss_product(tx: Point, r: Point, x):
    """Concatenated path loss ``d_t^2 d_r^2``."""
    x = np.asarray(x, dtype=float)
    out = ((x - tx.x) ** 2 + tx.y**2) * ((r.x - x) ** 2 + r.y**2)
    return float(out) if out.ndim == 0 else out


def rotation_for_lobe_edge(tx: Point, x: float, r: Point, edge: float) -> float:
    """Rotation putting ``r`` at projection ``edge`` (bisection around the
    zero-projection rotation, where the projection is monotone)."""
    w0 = optimal_rotation(tx, x, r)
    eps = 1e-9
    return find_root(
        lambda w: projection_delta(tx, ReflectorPose(x, w), r) - edge,
        w0 - math.pi / 2 + eps,
        w0 + math.pi / 2 - eps,
        what="lobe-edge rotation",
    )


def sequential_fr_area(
    tx: Point,
    area: TargetArea,
    dims: ReflectorDims,
    search_step: float = DEFAULT_SEARCH_STEP,
    metric_step: float = DEFAULT_METRIC_STEP,
    feasibility_step: float = DEFAULT_METRIC_STEP,
    max_iter: Optional[int] = None,
) -> FrPlan:
    """Sequential placement and rotation chaining main lobes across the area.

    The first plate minimises the path loss to the upper-right corner; every
    plate is rotated so its right lobe edge hits the current anchor, and the
    next plate is taken one blockage distance beyond the left or right
    frontier, whichever has lower path loss to the new anchor.
    """
    if tx.y >= 0 or area.y_top >= 0:
        raise GeometryError("Tx and target area must lie below the x-axis")
    c = dims.half_lobe
    cap = max_iter if max_iter is not None else iteration_cap(area, dims)
    r_right = area.upper_right
    lo, hi = default_search_interval(tx, r_right.x, r_right.x)
    xs = search_grid(lo, hi, search_step)
    x_m = float(xs[int(np.argmin(path_loss_product(tx, r_right, xs)))])
    side = "seed"
    x_minus = x_plus = x_m

    poses: List[ReflectorPose] = []
    markers: List[str] = []
    frontiers: List[Tuple[float, float]] = []
    anchors: List[Lobe] = []
    for _ in range(cap):
        omega = rotation_for_lobe_edge(tx, x_m, r_right, c)
        pose = ReflectorPose(x_m, omega)
        poses.append(pose)
        markers.append(side)
        frontiers.append((x_minus, x_plus))

        d_ll = projection_delta(tx, pose, area.lower_left)
        if -c <= d_ll <= c:
            anchors.append((None, r_right))
            break
        r_left = left_lobe_endpoint(tx, pose, area, c)
        anchors.append((r_left, r_right))

        d = pose_blockage_distance(tx, pose, r_right, dims)
        if side == "seed":
            x_minus, x_plus = x_m - d, x_m + d
        elif side == "left":
            x_minus = x_m - d
        else:
            x_plus = x_m + d
        r_right = r_left
        if path_loss_product(tx, r_right, x_minus) <= path_loss_product(tx, r_right, x_plus):
            x_m, side = x_minus, "left"
        else:
            x_m, side = x_plus, "right"
    else:
        raise NonConvergenceError(f"lower-left corner still uncovered after {cap} plates")

    gx, gy = area.grid(feasibility_step)
    violations = sum(int(np.count_nonzero(~same_side_field(tx, p.x, p.omega, gx, gy))) for p in poses)
    metric = min_reflection_gain(tx, poses, dims, area, metric_step)
    return FrPlan(poses, metric, markers, frontiers, anchors, violations)
