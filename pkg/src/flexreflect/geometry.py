"""Planar reflection geometry.

Everything lives in the z = 0 plane: the Tx, every receive location and every
reflector center have zero z-component, so points are stored as (x, y).
Reflector centers sit on the x-axis at ``(x, 0)``; the Tx and the target
region are below the axis (negative y).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Tuple

import numpy as np

from .errors import GeometryError

Vec2 = Tuple[float, float]

_COINCIDENT_TOL = 1e-12


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise GeometryError(f"non-finite point ({self.x}, {self.y})")

    def __iter__(self) -> Iterator[float]:
        yield self.x
        yield self.y


@dataclass(frozen=True)
class ReflectorPose:
    """Center x-coordinate (on the x-axis) and rotation angle about z."""

    x: float
    omega: float = 0.0


@dataclass(frozen=True)
class ReflectorDims:
    """Plate size; ``l1`` is the edge lying in the rotation plane."""

    l1: float
    l2: float
    wavelength: float

    def __post_init__(self):
        if self.l1 <= 0 or self.l2 <= 0 or self.wavelength <= 0:
            raise ValueError("reflector dimensions and wavelength must be positive")

    @classmethod
    def from_wavelengths(cls, l1_bar: float, l2_bar: float, wavelength: float) -> "ReflectorDims":
        return cls(l1_bar * wavelength, l2_bar * wavelength, wavelength)

    @property
    def l1_bar(self) -> float:
        return self.l1 / self.wavelength

    @property
    def sigma_max(self) -> float:
        return 4.0 * math.pi * self.l1**2 * self.l2**2 / self.wavelength**2

    @property
    def half_lobe(self) -> float:
        """Projection value at the main-lobe edge, 1 / (2 L1/lambda)."""
        return 0.5 / self.l1_bar


@dataclass(frozen=True)
class TargetArea:
    center: Point
    dx: float
    dy: float

    def __post_init__(self):
        if self.dx < 0 or self.dy < 0:
            raise ValueError("area extents must be nonnegative")

    @property
    def x_left(self) -> float:
        return self.center.x - self.dx / 2

    @property
    def x_right(self) -> float:
        return self.center.x + self.dx / 2

    @property
    def y_top(self) -> float:
        return self.center.y + self.dy / 2

    @property
    def y_bottom(self) -> float:
        return self.center.y - self.dy / 2

    @property
    def upper_left(self) -> Point:
        return Point(self.x_left, self.y_top)

    @property
    def lower_left(self) -> Point:
        return Point(self.x_left, self.y_bottom)

    @property
    def upper_right(self) -> Point:
        return Point(self.x_right, self.y_top)

    @property
    def lower_right(self) -> Point:
        return Point(self.x_right, self.y_bottom)

    def corners(self) -> Tuple[Point, Point, Point, Point]:
        return (self.upper_left, self.lower_left, self.upper_right, self.lower_right)

    def grid_axes(self, step: float) -> Tuple[np.ndarray, np.ndarray]:
        """Sample coordinates along x and y; both edges are always included.

        There are ``floor(extent/step) + 1`` samples per axis, spread evenly
        so the last sample lands on the far edge.
        """
        if step <= 0:
            raise ValueError("grid step must be positive")
        nx = int(math.floor(self.dx / step + 1e-9)) + 1
        ny = int(math.floor(self.dy / step + 1e-9)) + 1
        xs = np.linspace(self.x_left, self.x_right, nx) if nx > 1 else np.array([float(self.center.x)])
        ys = np.linspace(self.y_bottom, self.y_top, ny) if ny > 1 else np.array([float(self.center.y)])
        if nx == 1 and self.dx > 0:
            xs = np.array([self.x_left, self.x_right], dtype=float)
        if ny == 1 and self.dy > 0:
            ys = np.array([self.y_bottom, self.y_top], dtype=float)
        return xs, ys

    def perimeter(self, step: float) -> Tuple[np.ndarray, np.ndarray]:
        """Boundary samples of :meth:`grid` (corners included), unordered."""
        xs, ys = self.grid_axes(step)
        bx = np.concatenate([xs, xs, np.full(ys.size, xs[0]), np.full(ys.size, xs[-1])])
        by = np.concatenate([np.full(xs.size, ys[0]), np.full(xs.size, ys[-1]), ys, ys])
        return bx, by

    def grid(self, step: float) -> Tuple[np.ndarray, np.ndarray]:
        """Flattened row-major grid (x varies fastest)."""
        xs, ys = self.grid_axes(step)
        gx, gy = np.meshgrid(xs, ys)
        return gx.ravel(), gy.ravel()


def rotation_basis(omega: float) -> Tuple[Vec2, Vec2]:
    """Edge direction ``u`` and normal ``n`` of a plate rotated by ``omega``."""
    c, s = math.cos(omega), math.sin(omega)
    return (c, s), (-s, c)


def incident_vector(tx: Point, x: float) -> Tuple[Vec2, float]:
    """Unit vector from the Tx to the reflector center, and the distance."""
    vx, vy = x - tx.x, -tx.y
    d = math.hypot(vx, vy)
    if d < _COINCIDENT_TOL:
        raise GeometryError("Tx coincides with the reflector center")
    return (vx / d, vy / d), d


def reflection_vector(x: float, r: Point) -> Tuple[Vec2, float]:
    """Unit vector from the reflector center to ``r``, and the distance."""
    vx, vy = r.x - x, r.y
    d = math.hypot(vx, vy)
    if d < _COINCIDENT_TOL:
        raise GeometryError("receive location coincides with the reflector center")
    return (vx / d, vy / d), d


def deflection(tx: Point, x: float, r: Point) -> Vec2:
    """Deflection vector a_r - a_t at placement ``x``."""
    (tx_, ty_), _ = incident_vector(tx, x)
    (rx_, ry_), _ = reflection_vector(x, r)
    return rx_ - tx_, ry_ - ty_


def projection_delta(tx: Point, pose: ReflectorPose, r: Point) -> float:
    """Projection of the deflection vector onto the plate edge."""
    vx, vy = deflection(tx, pose.x, r)
    return vx * math.cos(pose.omega) + vy * math.sin(pose.omega)


def eta_factor(tx: Point, pose: ReflectorPose, r: Point) -> float:
    """Effective-aperture factor ``(a_r . n)^2``.

    Reduces to ``y_r^2 / d_r^2`` for an unrotated plate and to
    ``cos^2(theta_r - omega)`` in general.
    """
    (ax, ay), _ = reflection_vector(pose.x, r)
    return (-ax * math.sin(pose.omega) + ay * math.cos(pose.omega)) ** 2


def same_side(tx: Point, pose: ReflectorPose, r: Point) -> bool:
    """True when Tx and ``r`` face the same side of the plate (strict)."""
    (tx_, ty_), _ = incident_vector(tx, pose.x)
    (rx_, ry_), _ = reflection_vector(pose.x, r)
    s, c = math.sin(pose.omega), math.cos(pose.omega)
    return (-tx_ * s + ty_ * c) * (-rx_ * s + ry_ * c) < 0


def incidence_angles(tx: Point, x: float, r: Point) -> Tuple[float, float]:
    """Signed incidence / reflection angles measured from the +y normal.

    ``sin(theta_t) = (x - x_t)/d_t`` and ``sin(theta_r) = (x_r - x)/d_r``.
    """
    (atx, aty), _ = incident_vector(tx, x)
    (arx, ary), _ = reflection_vector(x, r)
    return math.atan2(atx, aty), math.atan2(arx, -ary)


# Vectorised forms over many receive locations (rx, ry arrays).

def reflection_field(x: float, rx: np.ndarray, ry: np.ndarray):
    vx = np.asarray(rx, dtype=float) - x
    vy = np.asarray(ry, dtype=float)
    d = np.hypot(vx, vy)
    if np.any(d < _COINCIDENT_TOL):
        raise GeometryError("receive location coincides with the reflector center")
    return vx / d, vy / d, d


def delta_field(tx: Point, x: float, omega: float, rx: np.ndarray, ry: np.ndarray) -> np.ndarray:
    (atx, aty), _ = incident_vector(tx, x)
    arx, ary, _ = reflection_field(x, rx, ry)
    return (arx - atx) * math.cos(omega) + (ary - aty) * math.sin(omega)


def eta_field(x: float, omega: float, rx: np.ndarray, ry: np.ndarray) -> np.ndarray:
    arx, ary, _ = reflection_field(x, rx, ry)
    return (-arx * math.sin(omega) + ary * math.cos(omega)) ** 2


def same_side_field(tx: Point, x: float, omega: float, rx: np.ndarray, ry: np.ndarray) -> np.ndarray:
    (atx, aty), _ = incident_vector(tx, x)
    arx, ary, _ = reflection_field(x, rx, ry)
    s, c = math.sin(omega), math.cos(omega)
    return (-atx * s + aty * c) * (-arx * s + ary * c) < 0
