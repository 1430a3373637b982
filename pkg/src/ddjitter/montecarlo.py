"""Jittered-ensemble signals over a grid of total times.

For every grid point the ideal signal is computed once, then ``N`` jittered
realizations are drawn with stream indices 0..N-1 of the run seed.  Each
realization is a pure function of (plan, tau, index), and the ensemble mean
is always accumulated in ascending index order, so results do not depend on
how the work was split across processes.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .decoherence import BathConfig, chi_n, signal
from .jitter import JitterModel, RngStream, perturb_counted
from .quadrature import QuadratureSettings
from .sequence import PulseSequence, Rule, cpmg_fractions, udd_fractions
from .spectral import SpectralDensity

__all__ = [
    "SimulationPlan",
    "SignalCurve",
    "SimulationError",
    "SweepError",
    "run",
    "sweep",
    "CSV_COLUMNS",
]

log = logging.getLogger(__name__)

CSV_COLUMNS = (
    "tau",
    "chi_ideal",
    "r_ideal",
    "one_minus_r_ideal",
    "r_pert_mean",
    "r_pert_stderr",
    "one_minus_r_pert_mean",
    "robustness",
    "rejection_rate",
)


@dataclass(frozen=True)
class SimulationPlan:
    density: SpectralDensity
    bath: BathConfig = BathConfig(10.0)
    rule: Rule = Rule.UDD
    n: int = 3
    jitter: JitterModel = JitterModel()
    realizations: int = 5000
    seed: int = 0
    tau_start: float = 0.1
    tau_stop: float = 2.0
    tau_step: float = 0.1
    quadrature: QuadratureSettings = QuadratureSettings()

    def __post_init__(self):
        object.__setattr__(self, "rule", Rule(self.rule))
        if self.rule is Rule.EXPLICIT:
            raise ValueError("plans generate their sequence from the udd or cpmg rule")
        if self.n < 0 or (self.rule is Rule.CPMG and self.n < 1):
            raise ValueError(f"invalid pulse count {self.n} for {self.rule.value}")
        if self.realizations < 1:
            raise ValueError("at least one realization is required")
        if not self.tau_start >= 0:
            raise ValueError("tau grid must start at a non-negative time")
        if not self.tau_step > 0:
            raise ValueError("tau step must be positive")
        if not self.tau_stop > self.tau_start:
            raise ValueError("tau grid must stop after it starts")

    def sequence(self) -> PulseSequence:
        return udd_fractions(self.n) if self.rule is Rule.UDD else cpmg_fractions(self.n)

    def tau_grid(self) -> np.ndarray:
        count = int(math.floor((self.tau_stop - self.tau_start) / self.tau_step + 1e-9)) + 1
        return self.tau_start + self.tau_step * np.arange(count)

    def describe(self) -> dict:
        out = {f"spectral.{k}": v for k, v in self.density.describe().items()}
        out.update(
            {
                "bath.temperature": self.bath.temperature,
                "sequence.kind": self.rule.value,
                "sequence.n": self.n,
                "jitter.sigma": self.jitter.sigma,
                "mc.realizations": self.realizations,
                "mc.seed": self.seed,
                "sweep.tau_start": self.tau_start,
                "sweep.tau_stop": self.tau_stop,
                "sweep.tau_step": self.tau_step,
            }
        )
        return out


@dataclass
class SignalCurve:
    plan: SimulationPlan
    tau: np.ndarray
    chi_ideal: np.ndarray
    r_ideal: np.ndarray
    r_pert_mean: np.ndarray
    r_pert_stderr: np.ndarray
    rejection_rate: np.ndarray

    @property
    def one_minus_r_ideal(self) -> np.ndarray:
        return 1.0 - self.r_ideal

    @property
    def one_minus_r_pert_mean(self) -> np.ndarray:
        return 1.0 - self.r_pert_mean

    @property
    def robustness(self) -> np.ndarray:
        return 1.0 - np.abs(self.r_pert_mean - self.r_ideal)

    def columns(self) -> dict[str, np.ndarray]:
        return {name: np.asarray(getattr(self, name)) for name in CSV_COLUMNS}

    def __len__(self):
        return self.tau.size


class SimulationError(RuntimeError):
    """A realization failed; carries the grid time and realization index."""

    def __init__(self, message: str, tau: Optional[float] = None, index: Optional[int] = None):
        super().__init__(message, tau, index)
        self.message = message
        self.tau = tau
        self.index = index

    def __str__(self):
        where = []
        if self.tau is not None:
            where.append(f"tau={self.tau!r}")
        if self.index is not None:
            where.append(f"realization={self.index}")
        return f"{self.message} [{', '.join(where)}]" if where else self.message


@dataclass
class SweepError(RuntimeError):
    """Some plans of a sweep failed; ``results`` holds ``None`` in their slots."""

    results: list
    errors: dict = field(default_factory=dict)

    def __str__(self):
        parts = "; ".join(f"plan {i}: {e}" for i, e in sorted(self.errors.items()))
        return f"{len(self.errors)} of {len(self.results)} plans failed: {parts}"


def _realizations(plan: SimulationPlan, tau: float, start: int, stop: int):
    """Signals for realization indices ``start..stop-1`` at one grid time."""
    seq = plan.sequence()
    out = np.empty(stop - start)
    rejected = 0
    for k, index in enumerate(range(start, stop)):
        try:
            if seq.n == 0:
                # free evolution has no pulse times to jitter
                pert, rej = seq, 0
            else:
                pert, rej = perturb_counted(seq, tau, plan.jitter, RngStream(plan.seed, index))
            out[k] = signal(chi_n(plan.density, tau, plan.bath, pert, plan.quadrature))
        except Exception as exc:
            raise SimulationError(f"{type(exc).__name__}: {exc}", float(tau), index) from exc
        rejected += rej
    return out, rejected


def _ideal(plan: SimulationPlan, tau: float) -> float:
    try:
        return chi_n(plan.density, tau, plan.bath, plan.sequence(), plan.quadrature)
    except Exception as exc:
        raise SimulationError(f"{type(exc).__name__}: {exc}", float(tau)) from exc


def _chunks(total: int, parts: int) -> list[tuple[int, int]]:
    size = max(1, math.ceil(total / parts))
    return [(a, min(a + size, total)) for a in range(0, total, size)]


def _reduce(values: np.ndarray, reference: float) -> tuple[float, float]:
    """Mean and standard error, accumulated in ascending index order.

    Deviations from the ideal signal are summed rather than the signals
    themselves: they are tiny, so no digits are lost, and an ensemble that
    reproduces the ideal signal exactly yields exactly the ideal mean.
    """
    total = 0.0
    for v in values.tolist():
        total += v - reference
    shift = total / values.size
    mean = reference + shift
    if values.size < 2:
        return mean, 0.0
    dev = 0.0
    for v in values.tolist():
        d = (v - reference) - shift
        dev += d * d
    return mean, math.sqrt(dev / (values.size - 1) / values.size)


def run(plan: SimulationPlan, workers: int = 1) -> SignalCurve:
    """Evaluate the ideal and jittered signals on the plan's tau grid.

    ``workers > 1`` distributes (tau, index-range) blocks over processes;
    the output is bit-identical to the serial result.
    """
    taus = plan.tau_grid()
    N = plan.realizations
    chi_ideal = np.empty(taus.size)
    samples = np.empty((taus.size, N))
    rejected = np.zeros(taus.size, dtype=np.int64)
    active = [i for i, t in enumerate(taus) if t > 0]
    for i, t in enumerate(taus):
        if t == 0:
            chi_ideal[i] = 0.0
            samples[i] = 1.0

    if workers > 1 and active:
        blocks = [(i, a, b) for i in active for (a, b) in _chunks(N, 4 * workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            ideal_futs = {i: pool.submit(_ideal, plan, float(taus[i])) for i in active}
            futs = [(i, a, b, pool.submit(_realizations, plan, float(taus[i]), a, b)) for i, a, b in blocks]
            for i, fut in ideal_futs.items():
                chi_ideal[i] = fut.result()
            for i, a, b, fut in futs:
                samples[i, a:b], rej = fut.result()
                rejected[i] += rej
    else:
        for i in active:
            chi_ideal[i] = _ideal(plan, float(taus[i]))
            samples[i], rejected[i] = _realizations(plan, float(taus[i]), 0, N)
            log.debug("tau=%g done", taus[i])

    r_ideal = np.array([signal(c) for c in chi_ideal])
    means = np.empty(taus.size)
    errs = np.empty(taus.size)
    for i in range(taus.size):
        means[i], errs[i] = _reduce(samples[i], r_ideal[i])
    rate = np.array([r / (r + N) for r in rejected.tolist()])
    return SignalCurve(plan, taus, chi_ideal, r_ideal, means, errs, rate)


def sweep(plans: Sequence[SimulationPlan], workers: int = 1) -> list[SignalCurve]:
    """Run each plan independently; failures are collected, not fatal to siblings."""
    if not plans:
        raise ValueError("sweep needs at least one plan")
    results: list = []
    errors: dict = {}
    for k, plan in enumerate(plans):
        try:
            results.append(run(plan, workers=workers))
        except (SimulationError, ValueError) as exc:
            log.error("plan %d failed: %s", k, exc)
            results.append(None)
            errors[k] = exc
    if errors:
        raise SweepError(results, errors)
    return results
