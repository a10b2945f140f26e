"""Bracketed scalar root finding and a closed-form real cubic solver."""

from __future__ import annotations

import math
from typing import Callable, List

import numpy as np
from scipy.optimize import brentq

from .errors import NoSolutionError

XTOL = 1e-13


def find_root(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    *,
    expand: bool = False,
    max_expand: int = 60,
    what: str = "root",
) -> float:
    """Root of ``f`` inside ``[lo, hi]``.

    With ``expand=True`` the bracket is widened geometrically until the ends
    differ in sign. Raises :class:`NoSolutionError` when no sign change is
    found.
    """
    flo, fhi = f(lo), f(hi)
    if expand:
        width = max(hi - lo, 1.0)
        for _ in range(max_expand):
            if flo * fhi <= 0:
                break
            lo -= width
            hi += width
            width *= 2.0
            flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        raise NoSolutionError(f"no sign change while solving for {what} in [{lo:.6g}, {hi:.6g}]")
    return brentq(f, lo, hi, xtol=XTOL, rtol=4 * np.finfo(float).eps, maxiter=500)


def real_cubic_roots(a: float, b: float, c: float, d: float) -> List[float]:
    """Real roots of ``a x^3 + b x^2 + c x + d`` (Cardano / trigonometric form).

    Roots are returned sorted and polished with two Newton steps.
    """
    if a == 0:
        raise ValueError("leading coefficient must be nonzero")
    b, c, d = b / a, c / a, d / a
    shift = b / 3.0
    p = c - b * b / 3.0
    q = 2.0 * b**3 / 27.0 - b * c / 3.0 + d
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3

    if p == 0.0 and q == 0.0:
        ts = [0.0]
    elif disc > 0:
        s = math.sqrt(disc)
        ts = [math.copysign(abs(-q / 2 + s) ** (1 / 3), -q / 2 + s)
              + math.copysign(abs(-q / 2 - s) ** (1 / 3), -q / 2 - s)]
    else:
        m = 2.0 * math.sqrt(-p / 3.0)
        arg = 3.0 * q / (p * m)
        theta = math.acos(max(-1.0, min(1.0, arg))) / 3.0
        ts = [m * math.cos(theta - 2.0 * math.pi * k / 3.0) for k in range(3)]

    roots = []
    for t in ts:
        x = t - shift
        for _ in range(2):
            fx = ((x + b) * x + c) * x + d
            dfx = (3.0 * x + 2.0 * b) * x + c
            if dfx == 0:
                break
            x -= fx / dfx
        roots.append(x)
    return sorted(roots)
