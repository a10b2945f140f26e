"""Plate RCS, per-path gain and incoherent multi-reflector receive power."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .geometry import (
    Point,
    ReflectorDims,
    ReflectorPose,
    eta_factor,
    incident_vector,
    projection_delta,
    reflection_vector,
    same_side,
)

SPEED_OF_LIGHT = 299_792_458.0

# Below this |x| sin(x)/x is taken from its Taylor series.
_SINC_SERIES_CUTOFF = 1e-6


def normalized_sinc(x):
    """``sin(x)/x`` with the removable singularity at 0 filled in.

    Accepts scalars or arrays.
    """
    xa = np.asarray(x, dtype=float)
    out = np.empty_like(xa)
    small = np.abs(xa) < _SINC_SERIES_CUTOFF
    x2 = xa[small] ** 2
    out[small] = 1.0 - x2 / 6.0 + x2 * x2 / 120.0
    big = ~small
    out[big] = np.sin(xa[big]) / xa[big]
    if out.ndim == 0:
        return float(out)
    return out


def array_factor(delta, l1_bar: float):
    """Main-lobe shaping term ``sinc^2(pi * L1/lambda * delta)``."""
    return normalized_sinc(math.pi * l1_bar * np.asarray(delta, dtype=float)) ** 2


def watts_to_dbm(p: float) -> float:
    if p <= 0:
        raise ValueError(f"power must be positive to express in dBm, got {p}")
    return 10.0 * math.log10(p * 1e3)


def dbm_to_watts(p_dbm: float) -> float:
    return 10.0 ** (p_dbm / 10.0) * 1e-3


def wavelength_from_frequency(carrier_hz: float) -> float:
    if carrier_hz <= 0:
        raise ValueError("carrier frequency must be positive")
    return SPEED_OF_LIGHT / carrier_hz


@dataclass(frozen=True)
class RcsResult:
    sigma: float
    feasible: bool


def rcs(dims: ReflectorDims, tx: Point, pose: ReflectorPose, r: Point) -> RcsResult:
    """Radar cross section of the plate seen from ``r``.

    A pose that puts Tx and ``r`` on opposite faces yields ``sigma = 0`` with
    ``feasible=False`` instead of raising, so area scans can cross the
    feasibility boundary.
    """
    if not same_side(tx, pose, r):
        return RcsResult(0.0, False)
    delta = projection_delta(tx, pose, r)
    sigma = dims.sigma_max * eta_factor(tx, pose, r) * array_factor(delta, dims.l1_bar)
    return RcsResult(float(sigma), True)


def path_gain(tx: Point, pose: ReflectorPose, r: Point, dims: ReflectorDims) -> float:
    """``sigma / (d_t^2 d_r^2)`` for one reflector, in m^-2."""
    res = rcs(dims, tx, pose, r)
    if res.sigma == 0.0:
        return 0.0
    _, d_t = incident_vector(tx, pose.x)
    _, d_r = reflection_vector(pose.x, r)
    return res.sigma / (d_t**2 * d_r**2)


@dataclass(frozen=True)
class LinkBudgetConfig:
    tx_power: float
    dims: ReflectorDims
    tx: Point

    def __post_init__(self):
        if self.tx_power <= 0:
            raise ValueError("transmit power must be positive")

    @property
    def power_scale(self) -> float:
        """``P_t lambda^2 / (4 pi)^3``, the factor in front of the gain sum."""
        return self.tx_power * self.dims.wavelength**2 / (4.0 * math.pi) ** 3


@dataclass(frozen=True)
class PowerSample:
    location: Point
    power: float
    feasible: bool = True

    @property
    def power_dbm(self) -> float:
        return watts_to_dbm(self.power) if self.power > 0 else -math.inf


def receive_power(cfg: LinkBudgetConfig, poses: Sequence[ReflectorPose], r: Point) -> float:
    """Expected receive power (W) with independent random path phases.

    The phase expectation turns the coherent sum into a plain sum of per-path
    powers; infeasible poses contribute nothing.
    """
    if len(poses) == 0:
        raise ValueError("at least one reflector pose is required")
    total = sum(path_gain(cfg.tx, p, r, cfg.dims) for p in poses)
    return cfg.power_scale * total


def monte_carlo_incoherent_power(path_powers: Iterable[float], draws: int, rng: np.random.Generator) -> float:
    """Average of ``|sum sqrt(P_m) exp(j phi_m)|^2`` over uniform phase draws."""
    amp = np.sqrt(np.asarray(list(path_powers), dtype=float))
    phases = rng.uniform(0.0, 2.0 * math.pi, size=(draws, amp.size))
    field = (amp * np.exp(1j * phases)).sum(axis=1)
    return float(np.mean(np.abs(field) ** 2))
