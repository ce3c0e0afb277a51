"""Dormand-Prince 5(4) pair with PI step control for planar systems.

Written out by hand for two components because the orbit loop calls it
millions of times and array overhead dominates at this size.
"""

from __future__ import annotations

import math
from typing import Callable

from .errors import IntegrationError

C2, C3, C4, C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
B1, B3, B4, B5, B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
E1, E3, E4, E5, E6, E7 = (71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200,
                          22 / 525, -1 / 40)

SAFE = 0.9
BETA = 0.04
EXPO = 0.2 - BETA * 0.75
FAC_MIN, FAC_MAX = 0.2, 10.0
MAX_STEPS = 200_000


def dopri5(f: Callable[[float, float], tuple[float, float]], x: float, y: float,
           t_end: float = 1.0, rtol: float = 1e-10, atol: float = 1e-12,
           h0: float | None = None, domain: float = math.inf) -> tuple[float, float, float]:
    """Integrate (x, y)' = f(x, y) over [0, t_end].

    Returns the end point and the last accepted step, which callers pass
    back as ``h0`` when they chain many short integrations.
    """
    t = 0.0
    h = t_end if h0 is None else min(h0, t_end)
    h_min = 1e-14 * t_end
    k1x, k1y = f(x, y)
    facold = 1e-4
    steps = 0
    last_h = h
    while t < t_end:
        if t + h > t_end:
            h = t_end - t
        steps += 1
        if steps > MAX_STEPS:
            raise IntegrationError("too many steps in one unit-time integration")
        k2x, k2y = f(x + h * A21 * k1x, y + h * A21 * k1y)
        k3x, k3y = f(x + h * (A31 * k1x + A32 * k2x), y + h * (A31 * k1y + A32 * k2y))
        k4x, k4y = f(x + h * (A41 * k1x + A42 * k2x + A43 * k3x),
                     y + h * (A41 * k1y + A42 * k2y + A43 * k3y))
        k5x, k5y = f(x + h * (A51 * k1x + A52 * k2x + A53 * k3x + A54 * k4x),
                     y + h * (A51 * k1y + A52 * k2y + A53 * k3y + A54 * k4y))
        k6x, k6y = f(x + h * (A61 * k1x + A62 * k2x + A63 * k3x + A64 * k4x + A65 * k5x),
                     y + h * (A61 * k1y + A62 * k2y + A63 * k3y + A64 * k4y + A65 * k5y))
        xn = x + h * (B1 * k1x + B3 * k3x + B4 * k4x + B5 * k5x + B6 * k6x)
        yn = y + h * (B1 * k1y + B3 * k3y + B4 * k4y + B5 * k5y + B6 * k6y)
        k7x, k7y = f(xn, yn)
        ex = h * (E1 * k1x + E3 * k3x + E4 * k4x + E5 * k5x + E6 * k6x + E7 * k7x)
        ey = h * (E1 * k1y + E3 * k3y + E4 * k4y + E5 * k5y + E6 * k6y + E7 * k7y)
        sx = atol + rtol * max(abs(x), abs(xn))
        sy = atol + rtol * max(abs(y), abs(yn))
        err = math.sqrt(0.5 * ((ex / sx) ** 2 + (ey / sy) ** 2))
        if not math.isfinite(err):
            err = 1e10
        fac11 = err ** EXPO if err > 0 else 0.0
        if err <= 1.0:
            fac = fac11 / facold ** BETA
            fac = max(1 / FAC_MAX, min(1 / FAC_MIN, fac / SAFE))
            facold = max(err, 1e-4)
            t += h
            x, y = xn, yn
            k1x, k1y = k7x, k7y
            last_h = h
            if abs(x) > domain or abs(y) > domain:
                raise IntegrationError("trajectory left the integration domain")
            h = h / fac
        else:
            h = h / min(1 / FAC_MIN, fac11 / SAFE)
        if h < h_min:
            raise IntegrationError("step size underflow")
    return x, y, last_h
