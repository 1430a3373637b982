"""Bessel functions of the first kind, integer order.

Small arguments use the ascending power series; everything else uses
Miller's backward recurrence normalised with J0 + 2*sum(J_2k) = 1.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["besselj"]

_SERIES_LIMIT = 1.0
_RESCALE = 1e250


def _series(order: int, x: np.ndarray) -> np.ndarray:
    q = -(0.25 * x * x)
    term = (0.5 * x) ** order / math.factorial(order)
    total = term.copy()
    for k in range(1, 40):
        term = term * q / (k * (k + order))
        total += term
    return total


def _miller(order: int, x: np.ndarray) -> np.ndarray:
    top = max(order, float(np.max(x)))
    start = 2 * int((top + 30 + 3 * math.sqrt(top)) / 2 + 1)
    inv = 2.0 / x
    j_next = np.zeros_like(x)
    j_cur = np.full_like(x, 1e-300)
    wanted = np.zeros_like(x)
    norm = np.zeros_like(x)
    for k in range(start, 0, -1):
        j_prev = k * inv * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        # j_cur now holds the unnormalised J_{k-1}
        if (k - 1) == order:
            wanted = j_cur.copy()
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * j_cur
        big = np.abs(j_cur) > _RESCALE
        if np.any(big):
            scale = np.where(big, 1.0 / _RESCALE, 1.0)
            j_cur *= scale
            j_next *= scale
            wanted *= scale
            norm *= scale
    norm += j_cur
    return wanted / norm


def besselj(order: int, x):
    """J_order(x) for integer ``order >= 0`` and real ``x`` (scalar or array)."""
    if order < 0 or int(order) != order:
        raise ValueError("order must be a non-negative integer")
    order = int(order)
    arr = np.asarray(x, dtype=float)
    sign = np.where(arr < 0, (-1.0) ** order, 1.0)
    ax = np.abs(arr).ravel()
    out = np.empty_like(ax)
    small = ax <= _SERIES_LIMIT
    if np.any(small):
        out[small] = _series(order, ax[small])
    if np.any(~small):
        out[~small] = _miller(order, ax[~small])
    out = out.reshape(arr.shape) * sign
    return float(out) if out.ndim == 0 else out
