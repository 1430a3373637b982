"""Gaussian timing jitter on pulse sequences.

Each pulse time delta_j * tau is shifted by a_j ~ N(0, sigma**2); the whole
vector is redrawn until the shifted fractions are again strictly increasing
and inside (0, 1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sequence import PulseSequence, Rule

__all__ = ["JitterModel", "RngStream", "ResampleLimitError", "perturb", "perturb_counted"]

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class JitterModel:
    sigma: float = 5e-4
    max_resamples: int = 10_000

    def __post_init__(self):
        if not self.sigma >= 0:
            raise ValueError(f"jitter width must be >= 0, got {self.sigma}")
        if self.max_resamples < 1:
            raise ValueError("max_resamples must be at least 1")


@dataclass(frozen=True)
class RngStream:
    """Counter-based stream keyed by (run seed, realization index).

    Philox-4x64 with the 128-bit key ``index << 64 | seed`` gives every
    realization its own reproducible stream regardless of evaluation order.
    """

    seed: int
    index: int = 0

    def __post_init__(self):
        if not (0 <= self.seed <= _MASK64):
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        if not (0 <= self.index <= _MASK64):
            raise ValueError("stream index must fit in an unsigned 64-bit integer")

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(key=(self.index << 64) | self.seed))


class ResampleLimitError(RuntimeError):
    pass


def perturb_counted(
    seq: PulseSequence, tau: float, model: JitterModel, rng: RngStream
) -> tuple[PulseSequence, int]:
    """Jittered copy of ``seq`` and the number of rejected draws."""
    if not tau > 0:
        raise ValueError("total time must be positive")
    if seq.n < 1:
        raise ValueError("jitter needs at least one pulse")
    if model.sigma == 0:
        return PulseSequence(seq.fractions, Rule.EXPLICIT), 0
    gen = rng.generator()
    base = seq.array
    scale = model.sigma / tau
    for attempt in range(model.max_resamples):
        cand = base + scale * gen.standard_normal(seq.n)
        if cand[0] > 0.0 and cand[-1] < 1.0 and np.all(np.diff(cand) > 0.0):
            return PulseSequence(tuple(cand), Rule.EXPLICIT), attempt
    raise ResampleLimitError(
        f"no valid jittered sequence after {model.max_resamples} draws "
        f"(sigma/tau = {scale:.3g}); use a smaller sigma or a larger tau"
    )


def perturb(seq: PulseSequence, tau: float, model: JitterModel, rng: RngStream) -> PulseSequence:
    return perturb_counted(seq, tau, model, rng)[0]
