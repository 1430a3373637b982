"""Bath spectral densities in dimensionless frequency units.

Power-law kinds measure frequency in units of the cutoff, the structured
kind in units of the intermediate oscillator frequency.  In both cases the
reference frequency is 1 and is not stored.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .quadrature import QuadratureResult, QuadratureSettings, integrate

__all__ = [
    "Kind",
    "SpectralDensity",
    "evaluate",
    "spectral_area",
    "integrate_spectrum",
]


class Kind(str, enum.Enum):
    POWER_SHARP = "power_sharp"
    POWER_EXP = "power_exp"
    STRUCTURED = "structured"


@dataclass(frozen=True)
class SpectralDensity:
    """J(omega) for one of the three supported families.

    ``s`` is only meaningful for the power-law kinds and ``gamma`` only for
    the structured kind; the unused one is ``None``.
    """

    kind: Kind
    alpha: float
    s: Optional[float] = None
    gamma: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if self.kind is Kind.STRUCTURED:
            if self.gamma is None or not self.gamma > 0:
                raise ValueError(f"gamma must be positive, got {self.gamma}")
            if self.s is not None:
                raise ValueError("s is not a parameter of the structured density")
        else:
            if self.s is None or not self.s > 0:
                raise ValueError(f"s must be positive, got {self.s}")
            if self.gamma is not None:
                raise ValueError("gamma is only a parameter of the structured density")

    @classmethod
    def power_sharp(cls, alpha: float, s: float) -> "SpectralDensity":
        return cls(Kind.POWER_SHARP, float(alpha), s=float(s))

    @classmethod
    def power_exp(cls, alpha: float, s: float) -> "SpectralDensity":
        return cls(Kind.POWER_EXP, float(alpha), s=float(s))

    @classmethod
    def structured(cls, alpha: float, gamma: float) -> "SpectralDensity":
        return cls(Kind.STRUCTURED, float(alpha), gamma=float(gamma))

    def __call__(self, omega):
        return evaluate(self, omega)

    def describe(self) -> dict:
        out = {"kind": self.kind.value, "alpha": self.alpha}
        if self.s is not None:
            out["s"] = self.s
        if self.gamma is not None:
            out["gamma"] = self.gamma
        return out


def evaluate(density: SpectralDensity, omega):
    """Spectral weight J(omega); accepts scalars or arrays with omega >= 0.

    The sharp cutoff keeps its left limit at omega == 1.
    """
    w = np.asarray(omega, dtype=float)
    if np.any(w < 0):
        raise ValueError("frequency must be non-negative")
    a = density.alpha
    if density.kind is Kind.POWER_SHARP:
        out = np.where(w <= 1.0, 2 * a * w ** density.s, 0.0)
    elif density.kind is Kind.POWER_EXP:
        out = 2 * a * w ** density.s * np.exp(-w)
    else:
        g = density.gamma
        out = 2 * a * w / ((1 - w * w) ** 2 + 4 * w * w * g * g)
    return float(out) if out.ndim == 0 else out


def _exp_tail(power: float, cut: float) -> float:
    # Bound on the integral of omega**power * exp(-omega) over [cut, inf).
    if power <= 0:
        return cut**power * math.exp(-cut)
    if cut <= power:
        return math.inf
    return cut**power * math.exp(-cut) / (1 - power / cut)


def integrate_spectrum(
    density: SpectralDensity,
    integrand: Callable[[np.ndarray], np.ndarray],
    settings: QuadratureSettings,
    tail_factor: Callable[[float], float] = lambda w: 1.0,
    tail_power: float = 0.0,
) -> QuadratureResult:
    """Integrate ``integrand(omega)`` over the support of ``density``.

    ``integrand`` must already include J(omega).  The sharp kind integrates
    over [0, 1]; the structured kind over u in [0, 1) with omega = u/(1-u).
    For power laws with s < 1 the stretch omega = v**(1/s) is applied first.
    The exponential kind integrates over [0, W] and keeps extending W until
    the tail bound ``tail_factor(W) * 2*alpha * int_W^inf omega**(s+tail_power)
    exp(-omega)`` drops below the tolerance.
    """
    if density.kind is Kind.STRUCTURED:
        def mapped(u):
            v = 1.0 - u
            return integrand(u / v) / (v * v)

        breaks = []
        if density.gamma < 0.1:
            for k in (10, 3, 1, -1, -3, -10):
                w = 1.0 + k * density.gamma
                if w > 0:
                    breaks.append(w / (1.0 + w))
        return integrate(mapped, 0.0, 1.0, settings, breakpoints=sorted(breaks))

    # Sub-Ohmic integrands can behave like omega**(s-1) at the origin; with
    # omega = v**(1/s) that leading term becomes constant in v.
    if density.s < 1.0:
        p = 1.0 / density.s

        def head(v):
            return integrand(v**p) * p * v ** (p - 1.0)

        def head_range(upper):
            return integrate(head, 0.0, upper**density.s, settings)
    else:
        def head_range(upper):
            return integrate(integrand, 0.0, upper, settings)

    if density.kind is Kind.POWER_SHARP:
        return head_range(1.0)

    cut = max(50.0, 10.0 * density.s)
    res = head_range(cut)
    value, error = res.value, res.error
    intervals, evaluations = res.intervals, res.evaluations
    while True:
        bound = tail_factor(cut) * 2 * density.alpha * _exp_tail(density.s + tail_power, cut)
        if bound < max(settings.abs_tol, 0.1 * settings.rel_tol * abs(value)):
            return QuadratureResult(value, error + bound, intervals, evaluations)
        nxt = 2.0 * cut
        extra = integrate(integrand, cut, nxt, settings)
        value += extra.value
        error += extra.error
        intervals += extra.intervals
        evaluations += extra.evaluations
        cut = nxt


def spectral_area(
    density: SpectralDensity, settings: QuadratureSettings = QuadratureSettings()
) -> float:
    """Integral of J over [0, inf) in units of the reference frequency squared."""
    return integrate_spectrum(density, lambda w: evaluate(density, w), settings).value
