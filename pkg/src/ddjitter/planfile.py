"""Flat ``key = value`` plan files.

Blank lines and ``#`` comments are ignored.  List-valued keys
(``sequence.n``, ``sweep.s_values``, ``sweep.gamma_values``) expand into a
Cartesian family of plans, pulse count outermost.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .decoherence import BathConfig
from .jitter import JitterModel
from .montecarlo import SimulationPlan
from .quadrature import QuadratureSettings
from .sequence import Rule
from .spectral import Kind, SpectralDensity

__all__ = ["PlanError", "PlanFile", "parse_plan", "read_plan_file", "DEFAULTS"]

_DECIMAL = re.compile(r"[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?")
_INTEGER = re.compile(r"\d+")

# Defaults: alpha 0.1, T = 10, sigma 5e-4,
# 5000 realizations on a 0.1 grid.
DEFAULTS = {
    "spectral.alpha": "0.1",
    "bath.temperature": "10",
    "sequence.kind": "udd",
    "sequence.n": "3",
    "jitter.sigma": "5e-4",
    "mc.realizations": "5000",
    "mc.seed": "0",
    "sweep.tau_start": "0.1",
    "sweep.tau_stop": "2.0",
    "sweep.tau_step": "0.1",
    "output.path": "results",
}

KNOWN_KEYS = frozenset(
    DEFAULTS
) | {"spectral.kind", "spectral.s", "spectral.gamma", "sweep.s_values", "sweep.gamma_values"}


class PlanError(ValueError):
    def __init__(self, message: str, key: Optional[str] = None, line: Optional[int] = None):
        super().__init__(message, key, line)
        self.message = message
        self.key = key
        self.line = line

    def __str__(self):
        where = []
        if self.key is not None:
            where.append(f"key={self.key}")
        if self.line is not None:
            where.append(f"line={self.line}")
        return " ".join(where + [self.message])


@dataclass
class PlanFile:
    """Raw key/value pairs with the line each came from."""

    values: dict
    lines: dict

    @classmethod
    def parse(cls, document: str) -> "PlanFile":
        values, lines = {}, {}
        for lineno, raw in enumerate(document.splitlines(), start=1):
            text = raw.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                raise PlanError("expected 'key = value'", line=lineno)
            key, value = (part.strip() for part in text.split("=", 1))
            if key not in KNOWN_KEYS:
                raise PlanError("unknown key", key, lineno)
            if key in values:
                raise PlanError(f"duplicate key (first set on line {lines[key]})", key, lineno)
            if not value:
                raise PlanError("empty value", key, lineno)
            values[key] = value
            lines[key] = lineno
        return cls(values, lines)

    def get(self, key: str) -> Optional[str]:
        return self.values.get(key, DEFAULTS.get(key))

    def number(self, key: str) -> float:
        text = self.get(key)
        if text is None:
            raise PlanError("missing required key", key)
        if not _DECIMAL.fullmatch(text):
            raise PlanError(f"not a decimal number: {text!r}", key, self.lines.get(key))
        return float(text)

    def integer(self, key: str) -> int:
        text = self.get(key)
        if text is None or not _INTEGER.fullmatch(text):
            raise PlanError(f"not a non-negative integer: {text!r}", key, self.lines.get(key))
        return int(text)

    def numbers(self, key: str) -> list[float]:
        out = []
        for item in self.get(key).split(","):
            item = item.strip()
            if not _DECIMAL.fullmatch(item):
                raise PlanError(f"not a decimal number: {item!r}", key, self.lines.get(key))
            out.append(float(item))
        return out

    def integers(self, key: str) -> list[int]:
        out = []
        for item in self.get(key).split(","):
            item = item.strip()
            if not _INTEGER.fullmatch(item):
                raise PlanError(f"not a non-negative integer: {item!r}", key, self.lines.get(key))
            out.append(int(item))
        return out

    def has(self, key: str) -> bool:
        return key in self.values


def _forbid(pf: PlanFile, key: str, kind: str):
    if pf.has(key):
        raise PlanError(f"not allowed with spectral.kind = {kind}", key, pf.lines[key])


def parse_plan(
    document: str,
    *,
    seed: Optional[int] = None,
    realizations: Optional[int] = None,
    quadrature: QuadratureSettings = QuadratureSettings(),
) -> list[SimulationPlan]:
    """Expand a plan document into simulation plans.

    ``seed`` and ``realizations`` override the corresponding keys.
    """
    pf = PlanFile.parse(document)

    kind_text = pf.get("spectral.kind")
    if kind_text is None:
        raise PlanError("missing required key", "spectral.kind")
    try:
        kind = Kind(kind_text)
    except ValueError:
        raise PlanError(
            f"expected one of {', '.join(k.value for k in Kind)}", "spectral.kind", pf.lines["spectral.kind"]
        ) from None

    if kind is Kind.STRUCTURED:
        _forbid(pf, "spectral.s", kind.value)
        _forbid(pf, "sweep.s_values", kind.value)
        if pf.has("sweep.gamma_values"):
            _forbid(pf, "spectral.gamma", kind.value + " when sweep.gamma_values is set")
            shapes = pf.numbers("sweep.gamma_values")
        elif pf.has("spectral.gamma"):
            shapes = [pf.number("spectral.gamma")]
        else:
            raise PlanError("missing required key", "spectral.gamma")
    else:
        _forbid(pf, "spectral.gamma", kind.value)
        _forbid(pf, "sweep.gamma_values", kind.value)
        if pf.has("sweep.s_values"):
            _forbid(pf, "spectral.s", kind.value + " when sweep.s_values is set")
            shapes = pf.numbers("sweep.s_values")
        else:
            shapes = [pf.number("spectral.s") if pf.has("spectral.s") else 1.0]

    rule_text = pf.get("sequence.kind")
    if rule_text not in ("udd", "cpmg"):
        raise PlanError("expected udd or cpmg", "sequence.kind", pf.lines.get("sequence.kind"))
    rule = Rule(rule_text)

    alpha = pf.number("spectral.alpha")
    pulse_counts = pf.integers("sequence.n")
    common = dict(
        bath=_build(pf, "bath.temperature", lambda: BathConfig(pf.number("bath.temperature"))),
        rule=rule,
        jitter=_build(pf, "jitter.sigma", lambda: JitterModel(pf.number("jitter.sigma"))),
        realizations=realizations if realizations is not None else pf.integer("mc.realizations"),
        seed=seed if seed is not None else pf.integer("mc.seed"),
        tau_start=pf.number("sweep.tau_start"),
        tau_stop=pf.number("sweep.tau_stop"),
        tau_step=pf.number("sweep.tau_step"),
        quadrature=quadrature,
    )
    checks = (
        ("spectral.alpha", alpha > 0, "must be > 0"),
        ("mc.seed", common["seed"] < 2**64, "seed must fit in 64 bits"),
        ("mc.realizations", common["realizations"] >= 1, "at least one realization is required"),
        ("sweep.tau_start", common["tau_start"] >= 0, "must be >= 0"),
        ("sweep.tau_step", common["tau_step"] > 0, "must be > 0"),
        ("sweep.tau_stop", common["tau_stop"] > common["tau_start"], "must exceed sweep.tau_start"),
        ("sequence.n", rule is Rule.UDD or min(pulse_counts) >= 1, "cpmg needs at least one pulse"),
    )
    for key, ok, message in checks:
        if not ok:
            raise PlanError(message, key, pf.lines.get(key))

    plans = []
    for n in pulse_counts:
        for shape in shapes:
            if kind is Kind.STRUCTURED:
                density = _build(pf, "sweep.gamma_values" if pf.has("sweep.gamma_values") else "spectral.gamma",
                                 lambda: SpectralDensity.structured(alpha, shape))
            else:
                key = "sweep.s_values" if pf.has("sweep.s_values") else "spectral.s"
                density = _build(pf, key, lambda: SpectralDensity(kind, alpha, s=shape))
            plans.append(_build(pf, "sequence.n", lambda: SimulationPlan(density=density, n=n, **common)))
    return plans


def _build(pf: PlanFile, key: str, make):
    try:
        return make()
    except ValueError as exc:
        if isinstance(exc, PlanError):
            raise
        raise PlanError(str(exc), key, pf.lines.get(key)) from None


def read_plan_file(path, **overrides) -> tuple[list[SimulationPlan], str]:
    """Plans from a file plus its ``output.path`` value."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    plans = parse_plan(text, **overrides)
    return plans, PlanFile.parse(text).get("output.path")
