import subprocess
import sys

import numpy as np
import pytest

from ddjitter.cli import main
from ddjitter.decoherence import BathConfig
from ddjitter.jitter import JitterModel
from ddjitter.montecarlo import CSV_COLUMNS, SignalCurve, SimulationPlan, run
from ddjitter.output import (
    PlotStyle,
    emit_area_tables,
    emit_csv,
    emit_plot_script,
    format_number,
    read_csv,
    read_manifest,
)
from ddjitter.planfile import PlanError, parse_plan, read_plan_file
from ddjitter.sequence import Rule
from ddjitter.spectral import Kind, SpectralDensity

MINIMAL = "spectral.kind = power_sharp\n"

SMALL = """\
# quick plan
spectral.kind = power_sharp
spectral.s = 1
sequence.n = 3
mc.realizations = 3
sweep.tau_start = 0.5
sweep.tau_stop = 1.0
sweep.tau_step = 0.5
"""


def test_minimal_document_uses_defaults():
    (p,) = parse_plan(MINIMAL)
    assert p.density == SpectralDensity.power_sharp(0.1, 1.0)
    assert p.bath == BathConfig(10.0)
    assert p.rule is Rule.UDD and p.n == 3
    assert p.jitter == JitterModel(5e-4)
    assert p.realizations == 5000 and p.seed == 0
    assert (p.tau_start, p.tau_stop, p.tau_step) == (0.1, 2.0, 0.1)


def test_cartesian_expansion_order():
    plans = parse_plan(MINIMAL + "sequence.n = 3,6,9\nsweep.s_values = 0.5, 1, 5\n")
    assert len(plans) == 9
    assert [(p.n, p.density.s) for p in plans] == [(n, s) for n in (3, 6, 9) for s in (0.5, 1.0, 5.0)]


def test_structured_family():
    plans = parse_plan("spectral.kind = structured\nsweep.gamma_values = 0.01,1,10\nsequence.kind = cpmg\n")
    assert [p.density.gamma for p in plans] == [0.01, 1.0, 10.0]
    assert all(p.density.kind is Kind.STRUCTURED and p.rule is Rule.CPMG for p in plans)


def test_overrides():
    (p,) = parse_plan(MINIMAL + "mc.seed = 5\n", seed=9, realizations=17)
    assert p.seed == 9 and p.realizations == 17


@pytest.mark.parametrize(
    "document, key, line",
    [
        ("spectral.kind = structured\n", "spectral.gamma", None),
        ("spectral.kind = power_sharp\nspectral.gamma = 1\n", "spectral.gamma", 2),
        ("spectral.kind = structured\nspectral.gamma = 1\nspectral.s = 2\n", "spectral.s", 3),
        ("spectral.kind = power_exp\nbogus.key = 1\n", "bogus.key", 2),
        ("spectral.kind = power_exp\n\nspectral.alpha = 0x10\n", "spectral.alpha", 3),
        ("spectral.kind = power_exp\nspectral.alpha = 0.1\nspectral.alpha = 0.2\n", "spectral.alpha", 3),
        ("spectral.kind = power_exp\nspectral.alpha = -1\n", "spectral.alpha", 2),
        ("spectral.kind = power_exp\nsequence.n = 3,x\n", "sequence.n", 2),
        ("spectral.kind = power_exp\nsequence.kind = cpmg\nsequence.n = 0\n", "sequence.n", 3),
        ("spectral.kind = power_exp\nsequence.kind = hahn\n", "sequence.kind", 2),
        ("spectral.kind = lorentz\n", "spectral.kind", 1),
        ("spectral.alpha = 0.1\n", "spectral.kind", None),
        ("spectral.kind = power_exp\nsweep.tau_stop = 0.05\n", "sweep.tau_stop", 2),
        ("spectral.kind = power_exp\nbath.temperature = -3\n", "bath.temperature", 2),
        ("spectral.kind = power_exp\nmc.realizations = 0\n", "mc.realizations", 2),
        ("spectral.kind = power_exp\nspectral.s = nan\n", "spectral.s", 2),
        ("spectral.kind = power_exp\nspectral.s\n", None, 2),
    ],
)
def test_plan_errors_name_key_and_line(document, key, line):
    with pytest.raises(PlanError) as info:
        parse_plan(document)
    assert info.value.key == key and info.value.line == line
    if key:
        assert f"key={key}" in str(info.value)


def _curve(n_points=1, sigma=0.0):
    p = SimulationPlan(
        SpectralDensity.power_exp(0.1, 1),
        jitter=JitterModel(sigma),
        realizations=3,
        tau_start=1.0,
        tau_stop=1.0 + 0.5 * n_points - 0.25,
        tau_step=0.5,
    )
    return run(p)


def test_csv_header_and_round_trip(tmp_path):
    curve = _curve(n_points=3, sigma=1e-3)
    manifest = emit_csv([curve], tmp_path)
    text = (tmp_path / "plan_000.csv").read_text().splitlines()
    assert text[0] == "tau,chi_ideal,r_ideal,one_minus_r_ideal,r_pert_mean,r_pert_stderr,one_minus_r_pert_mean,robustness,rejection_rate"
    assert len(text) == 4
    data = read_csv(tmp_path / "plan_000.csv")
    for name in CSV_COLUMNS:
        assert data[name].tobytes() == np.asarray(getattr(curve, name), dtype=float).tobytes()
    info = read_manifest(manifest)
    assert info["kind"] == "coherence_panels"
    assert info["entries"][0]["file"] == "plan_000.csv"
    assert info["entries"][0]["spectral.kind"] == "power_exp"


def test_single_point_file(tmp_path):
    emit_csv([_curve(n_points=1)], tmp_path)
    assert len((tmp_path / "plan_000.csv").read_text().splitlines()) == 2


def test_zero_jitter_robustness_column(tmp_path):
    emit_csv([_curve(n_points=3, sigma=0.0)], tmp_path)
    assert np.all(read_csv(tmp_path / "plan_000.csv")["robustness"] == 1.0)


def test_number_format():
    assert format_number(0.1) == "1.0000000000000001e-01"
    assert format_number(1.0) == "1.0000000000000000e+00"
    for v in (np.pi, 1e-300, 5e-324, 0.30000000000000004):
        assert float(format_number(v)) == v


def test_coherence_script_has_one_panel_per_plan(tmp_path):
    curves = [_curve(n_points=2) for _ in range(3)]
    manifest = emit_csv(curves, tmp_path)
    script = emit_plot_script(manifest, PlotStyle.COHERENCE_PANELS).read_text()
    assert script.count("'one_minus_r_pert_mean'") == 3
    assert script.count("'robustness'") == 3
    assert "set multiplot layout 3,2" in script and "set logscale y" in script
    for k in range(3):
        assert f"plan_00{k}.csv" in script


def test_area_tables_and_script(tmp_path):
    manifest = emit_area_tables(tmp_path, alpha=0.1)
    power = read_csv(tmp_path / "areas_power.csv")
    s = power["s"]
    assert s[0] == pytest.approx(0.1) and s[-1] == pytest.approx(6.0)
    assert power["area_sharp"] == pytest.approx(0.2 / (s + 1), rel=1e-9)
    from scipy.special import gamma

    assert power["area_exp"] == pytest.approx(0.2 * gamma(s + 1), rel=1e-9)
    structured = read_csv(tmp_path / "areas_structured.csv")
    assert np.all(np.diff(structured["area_structured"]) < 0)
    script = emit_plot_script(manifest, "spectral_areas").read_text()
    assert "'area_sharp'" in script and "'area_exp'" in script and "'area_structured'" in script


def test_empty_manifest_rejected(tmp_path):
    path = tmp_path / "manifest.txt"
    path.write_text("manifest.kind = coherence_panels\nmanifest.count = 0\n")
    with pytest.raises(ValueError):
        emit_plot_script(path, PlotStyle.COHERENCE_PANELS)


def test_dangling_manifest_rejected(tmp_path):
    manifest = emit_csv([_curve()], tmp_path)
    (tmp_path / "plan_000.csv").unlink()
    with pytest.raises(FileNotFoundError):
        emit_plot_script(manifest, PlotStyle.COHERENCE_PANELS)


def test_emit_csv_needs_curves(tmp_path):
    with pytest.raises(ValueError):
        emit_csv([], tmp_path)


def test_read_plan_file(tmp_path):
    path = tmp_path / "plan.txt"
    path.write_text(SMALL + "output.path = somewhere\n")
    plans, out = read_plan_file(path, seed=3)
    assert len(plans) == 1 and plans[0].seed == 3 and out == "somewhere"


# ---- command line -----------------------------------------------------------


def _error_line(capsys):
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 1
    return err[0]


def test_run_command(tmp_path, capsys):
    plan = tmp_path / "plan.txt"
    plan.write_text(SMALL)
    out = tmp_path / "out"
    assert main(["run", str(plan), "--out", str(out), "--seed", "4", "--quiet"]) == 0
    assert sorted(p.name for p in out.iterdir()) == ["coherence_panels.gp", "manifest.txt", "plan_000.csv"]
    assert read_manifest(out / "manifest.txt")["entries"][0]["mc.seed"] == "4"
    assert capsys.readouterr().err == ""


def test_areas_command(tmp_path):
    assert main(["areas", "--out", str(tmp_path), "--quiet"]) == 0
    assert (tmp_path / "spectral_areas.gp").is_file()


@pytest.mark.parametrize(
    "document, category, code",
    [
        ("spectral.kind = structured\n", "plan", 2),
        (SMALL + "jitter.sigma = 5\n", "numerical", 3),
    ],
)
def test_run_failures(tmp_path, capsys, document, category, code):
    plan = tmp_path / "plan.txt"
    plan.write_text(document)
    with pytest.raises(SystemExit) as info:
        main(["run", str(plan), "--out", str(tmp_path / "o"), "--quiet"])
    assert info.value.code == code
    assert _error_line(capsys).startswith(f"error:{category}:")


def test_missing_plan_file(tmp_path, capsys):
    with pytest.raises(SystemExit) as info:
        main(["run", str(tmp_path / "absent.txt")])
    assert info.value.code == 1
    assert _error_line(capsys).startswith("error:io:")


def test_unwritable_output(tmp_path, capsys):
    plan = tmp_path / "plan.txt"
    plan.write_text(SMALL)
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(SystemExit) as info:
        main(["run", str(plan), "--out", str(blocker / "sub"), "--quiet"])
    assert info.value.code == 1
    assert _error_line(capsys).startswith("error:io:")


@pytest.mark.parametrize("argv", [[], ["run"], ["run", "p", "--seed", "-1"], ["run", "p", "--realizations", "0"], ["fly"]])
def test_usage_errors(argv, capsys):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 2
    assert _error_line(capsys).startswith("error:usage:")


def test_module_entry_point(tmp_path):
    plan = tmp_path / "plan.txt"
    plan.write_text(SMALL)
    proc = subprocess.run(
        [sys.executable, "-m", "ddjitter", "run", str(plan), "--out", str(tmp_path / "o"), "--realizations", "2"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "o" / "plan_000.csv").is_file()
