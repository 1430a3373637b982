"""Decoherence exponents and signals for free and pulsed evolution.

    chi(t)     = int_0^inf J(w)/w**2 sin(w t/2)**2 coth(beta w/2) dw
    chi_n(tau) = int_0^inf J(w)/(4 w**2) |y_n(w tau)|**2 coth(beta w/2) dw

Both are evaluated with the adaptive Gauss-Kronrod engine over the support
of the spectral density, never touching w = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .bessel import besselj
from .quadrature import QuadratureError, QuadratureSettings, integrate
from .sequence import PulseSequence, filter_sq
from .spectral import Kind, SpectralDensity, evaluate, integrate_spectrum

__all__ = [
    "BathConfig",
    "QuadratureSettings",
    "DivergentIntegralError",
    "coth_half",
    "chi_free",
    "chi_n",
    "chi_n_series",
    "signal",
]

_DEFAULT_Q = QuadratureSettings()


@dataclass(frozen=True)
class BathConfig:
    """Bath temperature in units of the reference frequency; 0 means T = 0."""

    temperature: float = 10.0

    def __post_init__(self):
        if not (self.temperature >= 0 and math.isfinite(self.temperature)):
            raise ValueError(f"temperature must be finite and >= 0, got {self.temperature}")

    @property
    def beta(self) -> Optional[float]:
        """Inverse temperature, or ``None`` in the zero-temperature limit."""
        return None if self.temperature == 0 else 1.0 / self.temperature


class DivergentIntegralError(QuadratureError):
    pass


def coth_half(bath: BathConfig, omega):
    """coth(beta*omega/2), with both asymptotic ends handled explicitly."""
    w = np.asarray(omega, dtype=float)
    beta = bath.beta
    if beta is None:
        return np.ones_like(w)
    z = 0.5 * beta * w
    safe = np.clip(z, 1e-6, 20.0)
    out = np.where(z < 1e-6, 1.0 / np.where(z == 0, 1.0, z) + z / 3.0, 1.0 / np.tanh(safe))
    return np.where(z > 20.0, 1.0, out)


def _thermal_tail(bath: BathConfig, scale: float):
    # coth is decreasing, so its value at the cut bounds it on the tail
    return lambda cut: scale * float(coth_half(bath, cut))


def chi_free(
    density: SpectralDensity,
    t: float,
    bath: BathConfig,
    q: QuadratureSettings = _DEFAULT_Q,
) -> float:
    """Decoherence exponent for free evolution over time ``t``."""
    if t < 0:
        raise ValueError("time must be non-negative")
    if t == 0:
        return 0.0

    def integrand(w):
        return evaluate(density, w) / (w * w) * np.sin(0.5 * w * t) ** 2 * coth_half(bath, w)

    res = integrate_spectrum(density, integrand, q, _thermal_tail(bath, 1.0), tail_power=-2.0)
    return max(res.value, 0.0)


def chi_n(
    density: SpectralDensity,
    tau: float,
    bath: BathConfig,
    seq: PulseSequence,
    q: QuadratureSettings = _DEFAULT_Q,
) -> float:
    """Decoherence exponent after total time ``tau`` under pulse sequence ``seq``."""
    if tau < 0:
        raise ValueError("time must be non-negative")
    if tau == 0:
        return 0.0

    def integrand(w):
        return evaluate(density, w) / (4 * w * w) * filter_sq(seq, w * tau) * coth_half(bath, w)

    res = integrate_spectrum(
        density, integrand, q, _thermal_tail(bath, (seq.n + 1) ** 2), tail_power=-2.0
    )
    return max(res.value, 0.0)


def signal(chi: float) -> float:
    """Coherence signal r = exp(-2 chi)."""
    if chi < 0:
        raise ValueError("decoherence exponent must be non-negative")
    return math.exp(-2.0 * chi)


# coth(z) = 1/z + z/3 - z**3/45 + ... with z = beta*w/2, written as the
# coefficient of beta**k and the extra power of w multiplying w**s / w**2.
_COTH_TERMS = ((2.0, -1, -1), (1.0 / 6.0, 1, 1), (-1.0 / 360.0, 3, 3))


def chi_n_series(
    density: SpectralDensity,
    tau: float,
    bath: BathConfig,
    n: int,
    terms: int = 3,
    q: QuadratureSettings = _DEFAULT_Q,
) -> float:
    """High-temperature expansion of chi_n for the sharp-cutoff density.

    The filter is replaced by its Bessel form 16 (n+1)**2 J_{n+1}(w tau/2)**2
    and coth by the first ``terms`` terms of its Laurent series, giving

        8 (n+1)**2 alpha [ (2/beta) I(s-3) + (beta/6) I(s-1) - (beta**3/360) I(s+1) ]

    with I(p) = int_0^1 w**p J_{n+1}(w tau/2)**2 dw.  Meant for the regime
    w tau / 2 < n + 1 and beta small.
    """
    if density.kind is not Kind.POWER_SHARP:
        raise ValueError("the series expansion is defined for the sharp-cutoff density only")
    if not 1 <= terms <= 3:
        raise ValueError("terms must be 1, 2 or 3")
    if n < 0:
        raise ValueError("pulse count must be non-negative")
    beta = bath.beta
    if beta is None:
        raise ValueError("the expansion in beta needs a finite temperature")
    if tau == 0:
        return 0.0
    order = n + 1
    total = 0.0
    for coeff, beta_power, extra in _COTH_TERMS[:terms]:
        power = density.s - 2 + extra
        # near w = 0 the integrand behaves like w**(power + 2*order)
        if power + 2 * order <= -1:
            raise DivergentIntegralError(
                f"integral of w**{power} J_{order}**2 diverges at w = 0", math.inf, math.inf
            )

        def integrand(w, power=power):
            return w**power * besselj(order, 0.5 * w * tau) ** 2

        try:
            part = integrate(integrand, 0.0, 1.0, q).value
        except QuadratureError as exc:
            raise DivergentIntegralError(
                f"integral of w**{power} J_{order}**2 did not converge", exc.value, exc.error
            ) from exc
        total += coeff * beta**beta_power * part
    return 8.0 * order**2 * density.alpha * total
