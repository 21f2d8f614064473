"""Bessel functions of the first kind for integer order and real argument.

``bessel_j`` sums the ascending series below ``SERIES_CROSSOVER`` and uses
Miller's normalized backward recurrence above it.  The two asymptotic forms
used when taking the short-time limit are exposed verbatim.
"""
from __future__ import annotations

import cmath
import math

import numpy as np

SERIES_CROSSOVER = 12.0
MAX_ORDER = 10_000

_RESCALE = 1e250


def _check_argument(r: int, x: float) -> None:
    if r < 0 or int(r) != r:
        raise ValueError(f"order must be a non-negative integer, got {r!r}")
    if r > MAX_ORDER:
        raise ValueError(f"order {r} exceeds supported maximum {MAX_ORDER}")
    if not math.isfinite(x):
        raise ValueError(f"argument must be finite, got {x!r}")
    if x < 0:
        raise ValueError(f"argument must be non-negative, got {x!r}")


def _series(r: int, x: float) -> float:
    half = 0.5 * x
    if half == 0.0:
        return 1.0 if r == 0 else 0.0
    term = math.exp(r * math.log(half) - math.lgamma(r + 1))
    total = term
    h2 = half * half
    k = 0
    while True:
        k += 1
        term *= -h2 / (k * (k + r))
        total += term
        if abs(term) <= 1e-17 * abs(total) and k > half:
            return total


def _miller_start(r: int, x: float) -> int:
    # start well above both the order and the turning point x
    top = max(r, int(x)) + 20 + int(2.0 * math.sqrt(max(r, x) + 1.0) * 4)
    return top + (top % 2)


def _miller(r_max: int, x: float) -> np.ndarray:
    """J_0..J_{r_max} at one argument via normalized backward recurrence."""
    start = _miller_start(r_max, x)
    vals = np.zeros(r_max + 1)
    j_next, j_cur = 0.0, 1e-300
    norm = 0.0
    for k in range(start, 0, -1):
        j_prev = (2.0 * k / x) * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        idx = k - 1
        if idx <= r_max:
            vals[idx] = j_cur
        if idx % 2 == 0 and idx > 0:
            norm += 2.0 * j_cur
        if abs(j_cur) > _RESCALE:
            j_next /= _RESCALE
            j_cur /= _RESCALE
            vals /= _RESCALE
            norm /= _RESCALE
    norm += j_cur
    return vals / norm


def bessel_j(r: int, x: float) -> float:
    """J_r(x) for integer ``r >= 0`` and real ``x >= 0``."""
    x = float(x)
    _check_argument(r, x)
    if x == 0.0:
        return 1.0 if r == 0 else 0.0
    if x < SERIES_CROSSOVER:
        return _series(int(r), x)
    return float(_miller(int(r), x)[int(r)])


def bessel_j_orders(r_max: int, x: float) -> np.ndarray:
    """Array ``[J_0(x), ..., J_{r_max}(x)]``.

    On the series branch the top two orders come from the power series and
    the rest follow by downward recurrence, which is stable for J.
    """
    x = float(x)
    _check_argument(r_max, x)
    out = np.zeros(r_max + 1)
    if x == 0.0:
        out[0] = 1.0
        return out
    if x >= SERIES_CROSSOVER:
        return _miller(r_max, x)
    if r_max == 0:
        out[0] = _series(0, x)
        return out
    out[r_max] = _series(r_max, x)
    out[r_max - 1] = _series(r_max - 1, x)
    if out[r_max] == 0.0 or out[r_max - 1] == 0.0:
        # deep underflow at the top; fall back to per-order series
        for r in range(r_max + 1):
            out[r] = _series(r, x)
        return out
    for k in range(r_max - 1, 0, -1):
        out[k - 1] = (2.0 * k / x) * out[k] - out[k + 1]
    return out


def bessel_wave_asymptotic(r: int, x: float) -> complex:
    """One-sided large-argument wave ``i^r exp(-i(x + (r^2 - 1/4)/(2x))) / sqrt(-2 pi i x)``.

    Only ``2 * Re`` of this reproduces J_r(x) at large x.
    """
    if x <= 0:
        raise ValueError("asymptotic form requires x > 0")
    root = math.sqrt(2.0 * math.pi * x) * cmath.exp(-0.25j * math.pi)
    phase = x + (r * r - 0.25) / (2.0 * x)
    return (1j ** r) * cmath.exp(-1j * phase) / root


def bessel_small_x(r: int, x: float) -> float:
    """Leading small-argument term x^r / (2^r r!)."""
    if r == 0:
        return 1.0
    return (0.5 * x) ** r / math.factorial(r)
