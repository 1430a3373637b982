"""Pulse sequences and their filter function.

A sequence of ``n`` instantaneous pi pulses at times ``delta_j * tau``
modulates the bath through

    y_n(x) = 1 + (-1)**(n+1) exp(i x) + 2 sum_j (-1)**j exp(i x delta_j),

with ``x = omega * tau``.  For small ``x`` the terms cancel to many orders
(for UDD, |y_n|**2 ~ x**(2n+2)), so direct summation in double precision
loses every significant digit.  Below ``SERIES_CUTOFF`` the filter is
therefore evaluated from its Taylor series, whose coefficients (moments of
the jump times) are computed exactly in rational arithmetic from the stored
fractions.  Above it the direct sum is accurate.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional

import mpmath
import numpy as np

from .bessel import besselj

__all__ = [
    "Rule",
    "PulseSequence",
    "FilterValue",
    "udd_fractions",
    "cpmg_fractions",
    "explicit",
    "filter",
    "filter_complex",
    "filter_sq",
    "filter_bessel_approx",
    "SERIES_CUTOFF",
]

SERIES_CUTOFF = 8.0
_SERIES_TERMS = 64


class Rule(str, enum.Enum):
    UDD = "udd"
    CPMG = "cpmg"
    EXPLICIT = "explicit"


def _jump_weights(n: int) -> list[int]:
    return [1] + [2 * (-1) ** j for j in range(1, n + 1)] + [(-1) ** (n + 1)]


@dataclass(frozen=True)
class PulseSequence:
    """Pulse times as fractions of the total evolution time.

    Fractions are validated at construction: strictly increasing and
    strictly inside (0, 1).  ``n == 0`` is free evolution.
    """

    fractions: tuple[float, ...]
    rule: Rule = Rule.EXPLICIT

    def __post_init__(self):
        fr = tuple(float(d) for d in self.fractions)
        object.__setattr__(self, "fractions", fr)
        object.__setattr__(self, "rule", Rule(self.rule))
        if any(not (0.0 < d < 1.0) for d in fr):
            raise ValueError("pulse fractions must lie strictly inside (0, 1)")
        if any(b <= a for a, b in zip(fr, fr[1:])):
            raise ValueError("pulse fractions must be strictly increasing")

    @property
    def n(self) -> int:
        return len(self.fractions)

    def __len__(self):
        return len(self.fractions)

    @cached_property
    def array(self) -> np.ndarray:
        arr = np.array(self.fractions, dtype=float)
        arr.flags.writeable = False
        return arr

    @cached_property
    def _times(self) -> np.ndarray:
        return np.concatenate([[0.0], self.array, [1.0]])

    @cached_property
    def _weights(self) -> np.ndarray:
        return np.array(_jump_weights(self.n), dtype=float)

    @cached_property
    def _taylor(self) -> tuple[np.ndarray, np.ndarray]:
        # Exact moments sum_k c_k t_k**m / m!, split into the polynomial
        # coefficients (highest degree first) of Re y and Im y.
        weights = _jump_weights(self.n)
        ratios = [(0, 1), *(d.as_integer_ratio() for d in self.fractions), (1, 1)]
        denom = max(q for _, q in ratios)
        # every denominator is a power of two, so this rescaling is exact
        base = [p * (denom // q) for p, q in ratios]
        powers = [1] * len(base)
        re = np.zeros(_SERIES_TERMS)
        im = np.zeros(_SERIES_TERMS)
        scale = 1
        for m in range(_SERIES_TERMS):
            if m:
                scale *= m * denom
                powers = [p * b for p, b in zip(powers, base)]
            moment = sum(c * p for c, p in zip(weights, powers)) / scale
            sign = -1.0 if (m // 2) % 2 else 1.0
            if m % 2 == 0:
                re[m] = sign * moment
            else:
                im[m] = sign * moment
        return re[::-1].copy(), im[::-1].copy()

    def exact_fractions(self, dps: int) -> list:
        """Fractions as mpmath numbers, regenerated from the rule if possible."""
        with mpmath.workdps(dps):
            n = self.n
            if self.rule is Rule.UDD:
                return [mpmath.sin(mpmath.pi * j / (2 * n + 2)) ** 2 for j in range(1, n + 1)]
            if self.rule is Rule.CPMG:
                return [(j - mpmath.mpf(1) / 2) / n for j in range(1, n + 1)]
            return [mpmath.mpf(d) for d in self.fractions]


@dataclass(frozen=True)
class FilterValue:
    re: float
    im: float

    @property
    def magnitude_sq(self) -> float:
        return self.re * self.re + self.im * self.im

    def __complex__(self):
        return complex(self.re, self.im)


def udd_fractions(n: int) -> PulseSequence:
    """Uhrig sequence: delta_j = sin(pi j / (2n + 2))**2, j = 1..n."""
    if n < 0:
        raise ValueError("pulse count must be non-negative")
    # correctly rounded, so symmetric pulses sit exactly at 1/4, 1/2, 3/4, ...
    with mpmath.workdps(40):
        fracs = tuple(float(mpmath.sin(mpmath.pi * j / (2 * n + 2)) ** 2) for j in range(1, n + 1))
    return PulseSequence(fracs, Rule.UDD)


def cpmg_fractions(n: int) -> PulseSequence:
    """Equidistant sequence: delta_j = (j - 1/2) / n, j = 1..n."""
    if n < 1:
        raise ValueError("CPMG needs at least one pulse")
    return PulseSequence(tuple((j - 0.5) / n for j in range(1, n + 1)), Rule.CPMG)


def explicit(fractions: Iterable[float]) -> PulseSequence:
    return PulseSequence(tuple(fractions), Rule.EXPLICIT)


def filter_complex(seq: PulseSequence, x) -> np.ndarray:
    """y_n(x) as a complex array (vectorised over ``x >= 0``)."""
    x = np.asarray(x, dtype=float)
    flat = x.ravel()
    out = np.empty(flat.shape, dtype=complex)
    low = flat <= SERIES_CUTOFF
    if np.any(low):
        c_re, c_im = seq._taylor
        xl = flat[low]
        out[low] = np.polyval(c_re, xl) + 1j * np.polyval(c_im, xl)
    if np.any(~low):
        theta = flat[~low, None] * seq._times[None, :]
        # exp(i theta) - 1 without cancellation; the weights sum to zero.
        phase = -2.0 * np.sin(0.5 * theta) ** 2 + 1j * np.sin(theta)
        out[~low] = phase @ seq._weights
    return out.reshape(x.shape)


def filter_sq(seq: PulseSequence, x) -> np.ndarray:
    """|y_n(x)|**2, the quantity entering the decoherence integral."""
    y = filter_complex(seq, x)
    return y.real * y.real + y.imag * y.imag


def filter(seq: PulseSequence, x: float, dps: Optional[int] = None) -> FilterValue:
    """Filter value at a single ``x``.

    With ``dps`` set, the sum is carried out in mpmath at that many decimal
    digits using pulse fractions regenerated at the same precision, which
    resolves the deep low-frequency suppression of long UDD sequences.
    """
    if x < 0:
        raise ValueError("x must be non-negative")
    if dps is None:
        y = complex(filter_complex(seq, float(x)))
        return FilterValue(y.real, y.imag)
    with mpmath.workdps(dps):
        times = [mpmath.mpf(0), *seq.exact_fractions(dps), mpmath.mpf(1)]
        xm = mpmath.mpf(x)
        y = mpmath.fsum(c * mpmath.expjpi(xm * t / mpmath.pi) for c, t in zip(_jump_weights(seq.n), times))
        return FilterValue(float(y.real), float(y.imag))


def filter_bessel_approx(n: int, x):
    """16 (n+1)**2 J_{n+1}(x/2)**2, meaningful for x/2 < n + 1."""
    return 16.0 * (n + 1) ** 2 * besselj(n + 1, 0.5 * np.asarray(x, dtype=float)) ** 2
