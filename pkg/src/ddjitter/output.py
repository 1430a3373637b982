"""CSV, manifest and gnuplot script emission."""

from __future__ import annotations

import enum
import os
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .montecarlo import CSV_COLUMNS, SignalCurve
from .quadrature import QuadratureSettings
from .spectral import SpectralDensity, spectral_area

__all__ = [
    "PlotStyle",
    "OutputError",
    "format_number",
    "emit_csv",
    "read_csv",
    "read_manifest",
    "emit_area_tables",
    "emit_plot_script",
    "MANIFEST_NAME",
]

MANIFEST_NAME = "manifest.txt"
AREA_POWER_COLUMNS = ("s", "area_sharp", "area_exp")
AREA_STRUCTURED_COLUMNS = ("gamma", "area_structured")


class PlotStyle(str, enum.Enum):
    COHERENCE_PANELS = "coherence_panels"
    SPECTRAL_AREAS = "spectral_areas"


class OutputError(OSError):
    pass


def format_number(value: float) -> str:
    """17 significant digits in scientific notation; round-trips exactly."""
    return format(float(value), ".16e")


def _write_table(path: Path, header: Sequence[str], columns: Iterable[np.ndarray]) -> None:
    rows = zip(*[np.asarray(c, dtype=float).tolist() for c in columns])
    lines = [",".join(header)]
    lines += [",".join(format_number(v) for v in row) for row in rows]
    try:
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _write_manifest(directory: Path, entries: list[dict], kind: str) -> Path:
    lines = [f"manifest.kind = {kind}", f"manifest.count = {len(entries)}"]
    for k, entry in enumerate(entries):
        for key, value in entry.items():
            lines.append(f"entry.{k}.{key} = {value}")
    path = directory / MANIFEST_NAME
    try:
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def _prepare(directory) -> Path:
    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"cannot create {directory}: {exc.strerror or exc}") from exc
    if not os.access(directory, os.W_OK):
        raise OutputError(f"directory {directory} is not writable")
    return directory


def emit_csv(curves: Sequence[SignalCurve], directory) -> Path:
    """One CSV per curve plus a manifest describing each plan; returns the manifest path."""
    if not curves:
        raise ValueError("no curves to write")
    directory = _prepare(directory)
    entries = []
    for k, curve in enumerate(curves):
        name = f"plan_{k:03d}.csv"
        cols = curve.columns()
        _write_table(directory / name, CSV_COLUMNS, [cols[c] for c in CSV_COLUMNS])
        entry = {"file": name}
        entry.update({key: _plain(v) for key, v in curve.plan.describe().items()})
        entries.append(entry)
    return _write_manifest(directory, entries, PlotStyle.COHERENCE_PANELS.value)


def _plain(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def read_csv(path) -> dict[str, np.ndarray]:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        rows = [[float(v) for v in line.split(",")] for line in fh if line.strip()]
    data = np.array(rows, dtype=float).reshape(len(rows), len(header))
    return {name: data[:, k] for k, name in enumerate(header)}


def read_manifest(path) -> dict:
    """Parse a manifest into ``{"kind": str, "entries": [dict, ...]}``."""
    path = Path(path)
    raw = {}
    for line in path.read_text(encoding="utf-8").splitlines():
        if "=" in line:
            key, value = (p.strip() for p in line.split("=", 1))
            raw[key] = value
    count = int(raw.get("manifest.count", 0))
    entries = [dict() for _ in range(count)]
    for key, value in raw.items():
        if key.startswith("entry."):
            _, idx, name = key.split(".", 2)
            entries[int(idx)][name] = value
    return {"kind": raw.get("manifest.kind"), "entries": entries, "directory": path.parent}


def emit_area_tables(
    directory,
    alpha: float = 0.1,
    s_values: Sequence[float] = tuple(np.round(np.arange(0.1, 6.0001, 0.1), 10)),
    gamma_values: Sequence[float] = tuple(np.round(10.0 ** np.arange(-2, 1.0001, 0.25), 10)),
    settings: QuadratureSettings = QuadratureSettings(),
) -> Path:
    """Tabulate spectral areas versus s (both cutoffs) and versus gamma."""
    directory = _prepare(directory)
    s_values = [float(s) for s in s_values]
    gamma_values = [float(g) for g in gamma_values]
    sharp = [spectral_area(SpectralDensity.power_sharp(alpha, s), settings) for s in s_values]
    expo = [spectral_area(SpectralDensity.power_exp(alpha, s), settings) for s in s_values]
    structured = [spectral_area(SpectralDensity.structured(alpha, g), settings) for g in gamma_values]
    _write_table(directory / "areas_power.csv", AREA_POWER_COLUMNS, [s_values, sharp, expo])
    _write_table(directory / "areas_structured.csv", AREA_STRUCTURED_COLUMNS, [gamma_values, structured])
    entries = [
        {"file": "areas_power.csv", "spectral.alpha": repr(float(alpha)), "x": "s"},
        {"file": "areas_structured.csv", "spectral.alpha": repr(float(alpha)), "x": "gamma"},
    ]
    return _write_manifest(directory, entries, PlotStyle.SPECTRAL_AREAS.value)


def _label(entry: dict) -> str:
    shape = f"s={entry['spectral.s']}" if "spectral.s" in entry else f"gamma={entry.get('spectral.gamma')}"
    return f"{entry.get('spectral.kind')} {entry.get('sequence.kind')} n={entry.get('sequence.n')} {shape}"


def _coherence_script(entries: list[dict]) -> str:
    rows = len(entries)
    out = [
        "# gnuplot script: 1 - r (log scale) and robustness R_n per plan",
        "set datafile separator ','",
        "set terminal pngcairo size 1000,%d" % (320 * rows),
        "set output 'coherence_panels.png'",
        "set multiplot layout %d,2" % rows,
        "set xlabel 'tau (reference-frequency units)'",
    ]
    for entry in entries:
        f = entry["file"]
        title = _label(entry)
        out += [
            "set logscale y",
            "set format y '10^{%L}'",
            f"set ylabel '1 - r'",
            f"set title '{title}'",
            f"plot '{f}' using 'tau':'one_minus_r_ideal' with lines title 'ideal', \\",
            f"     '{f}' using 'tau':'one_minus_r_pert_mean' with points pt 7 ps 0.6 title 'jittered mean'",
            "unset logscale y",
            "set format y '%g'",
            "set ylabel 'R_n'",
            f"set title '{title}'",
            f"plot '{f}' using 'tau':'robustness' with linespoints pt 7 ps 0.6 title 'R_n'",
        ]
    out.append("unset multiplot")
    return "\n".join(out) + "\n"


def _areas_script(entries: list[dict]) -> str:
    files = {e.get("x"): e["file"] for e in entries}
    out = [
        "# gnuplot script: spectral areas versus s and versus gamma",
        "set datafile separator ','",
        "set terminal pngcairo size 1000,400",
        "set output 'spectral_areas.png'",
        "set multiplot layout 1,2",
    ]
    if "s" in files:
        f = files["s"]
        out += [
            "set xlabel 's'",
            "set ylabel 'area'",
            "set logscale y",
            f"plot '{f}' using 's':'area_sharp' with lines lw 2 title 'sharp cutoff', \\",
            f"     '{f}' using 's':'area_exp' with lines dt 2 lw 2 title 'exponential cutoff'",
            "unset logscale y",
        ]
    if "gamma" in files:
        f = files["gamma"]
        out += [
            "set xlabel 'gamma'",
            "set ylabel 'area'",
            "set logscale xy",
            f"plot '{f}' using 'gamma':'area_structured' with linespoints lw 2 title 'structured'",
            "unset logscale xy",
        ]
    out.append("unset multiplot")
    return "\n".join(out) + "\n"


def emit_plot_script(manifest, style) -> Path:
    """Write a gnuplot script next to the manifest's CSVs and return its path."""
    style = PlotStyle(style)
    info = manifest if isinstance(manifest, dict) else read_manifest(manifest)
    entries = info["entries"]
    directory = Path(info["directory"])
    if not entries:
        raise ValueError("manifest lists no data files")
    for entry in entries:
        if not (directory / entry["file"]).is_file():
            raise FileNotFoundError(f"manifest references missing file {entry['file']}")
    if style is PlotStyle.COHERENCE_PANELS:
        text, name = _coherence_script(entries), "coherence_panels.gp"
    else:
        text, name = _areas_script(entries), "spectral_areas.gp"
    path = directory / name
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path
