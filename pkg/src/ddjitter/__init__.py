"""Qubit dephasing under ideal and timing-jittered dynamical decoupling."""

from .decoherence import BathConfig, chi_free, chi_n, chi_n_series, signal
from .jitter import JitterModel, RngStream, perturb
from .montecarlo import SignalCurve, SimulationPlan, run, sweep
from .quadrature import QuadratureError, QuadratureSettings
from .sequence import PulseSequence, cpmg_fractions, filter, filter_bessel_approx, udd_fractions
from .spectral import SpectralDensity, evaluate, spectral_area

__version__ = "0.1.0"

__all__ = [
    "BathConfig",
    "JitterModel",
    "PulseSequence",
    "QuadratureError",
    "QuadratureSettings",
    "RngStream",
    "SignalCurve",
    "SimulationPlan",
    "SpectralDensity",
    "chi_free",
    "chi_n",
    "chi_n_series",
    "cpmg_fractions",
    "evaluate",
    "filter",
    "filter_bessel_approx",
    "perturb",
    "run",
    "signal",
    "spectral_area",
    "sweep",
    "udd_fractions",
]
