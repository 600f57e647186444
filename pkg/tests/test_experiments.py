import json
import subprocess
import sys
from pathlib import Path

import pytest

from ptkr_otoc.cli import main
from ptkr_otoc.experiments import PRESETS, RunConfig, make_config, parse_settings, run

SMALL = ["N=256", "N_values=256,512", "n_kicks=3", "m_values=1,2"]


def small(kind, tmp_path, *more, **extra):
    return make_config(kind, SMALL + list(more), out=str(tmp_path), **extra)


def listed_files(out: Path):
    return sorted(str(p.relative_to(out)) for p in out.rglob("*") if p.is_file() and p.name != "manifest.json")


def test_parse_settings_types():
    s = parse_settings(["lam=0.5", "N=512", "m_values=1,3", "lambda_values=0,0.5", "out=x", "kind=trajectory"])
    assert s == dict(lam=0.5, N=512, m_values=(1, 3), lambda_values=(0.0, 0.5), out="x", kind="trajectory")
    assert parse_settings(["lambda=0.2"]) == dict(lam=0.2)
    with pytest.raises(ValueError):
        parse_settings(["bogus=1"])
    with pytest.raises(ValueError):
        parse_settings(["N"])


def test_config_file_with_preset_base(tmp_path):
    f = tmp_path / "mine.cfg"
    f.write_text("# a comment\npreset = fig2\nlam = 0.5  # trailing\n\nN = 512\n")
    cfg = make_config(str(f), ["n_kicks=4"])
    assert (cfg.kind, cfg.lam, cfg.N, cfg.n_kicks) == ("trajectory", 0.5, 512, 4)
    assert cfg.out == "runs/mine"


def test_defaults_and_presets():
    cfg = RunConfig()
    p = cfg.params()
    assert (p.K, p.lam, p.hbar, p.sigma, p.N, p.n_kicks) == pytest.approx(
        (6.283185307179586, 0.9, 0.1, 10.0, 8192, 10))
    for name in PRESETS:
        assert make_config(name).out == f"runs/{name}"
    assert make_config("fig1b").N_values == (1024, 2048, 4096, 8192, 16384)


@pytest.mark.parametrize("bad", [["N=100"], ["workers=0"], ["kind=nope"], ["m_values="], ["hbar=-1"]])
def test_invalid_configs(bad):
    with pytest.raises(ValueError):
        make_config("fig1a", bad)


def test_unknown_preset_exit_code(tmp_path, capsys):
    assert main(["run", "no-such-preset", "--out", str(tmp_path)]) == 2
    assert "error" in capsys.readouterr().err


def test_bad_override_exit_code(tmp_path):
    assert main(["run", "fig2", "--out", str(tmp_path), "--override", "N=7"]) == 2


@pytest.mark.parametrize("kind", ["fig1a", "fig1b", "fig2", "fig3", "fig6", "lambda_scan", "oracle"])
def test_manifest_lists_exactly_the_written_files(kind, tmp_path):
    extra = ["lambda_values=0,0.5,1"] if kind == "lambda_scan" else []
    cfg = small(kind, tmp_path, *extra) if kind != "oracle" else make_config(kind, out=str(tmp_path))
    manifest = run(cfg)
    assert sorted(f["path"] for f in manifest["files"]) == listed_files(tmp_path)
    on_disk = json.loads((tmp_path / "manifest.json").read_text())
    assert on_disk["config"]["kind"] == cfg.kind
    assert on_disk["checks"] and on_disk["finite"]
    assert set(on_disk["tolerances"]) >= {"oracle_rel", "C2_rel"}


def test_stale_outputs_are_removed(tmp_path):
    run(small("fig1b", tmp_path))
    assert (tmp_path / "slopes.csv").exists()
    run(small("fig2", tmp_path))
    assert not (tmp_path / "slopes.csv").exists()
    assert listed_files(tmp_path) == ["series.csv"]


def test_series_columns(tmp_path):
    run(small("fig1a", tmp_path))
    header = (tmp_path / "series.csv").read_text().splitlines()[0].split(",")
    assert header[:11] == ["t", "m", "N", "C", "C1", "C2", "ReC3", "norm", "mean_theta", "mean_p", "tail_exponent"]


def test_snapshot_files_have_two_columns(tmp_path):
    run(small("fig3", tmp_path))
    snaps = list((tmp_path / "snapshots").glob("*.csv"))
    assert snaps
    for f in snaps:
        lines = f.read_text().splitlines()
        assert lines[0] == "value,probability"
        assert all(len(ln.split(",")) == 2 for ln in lines)


def test_rerun_is_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run(small("fig1a", a))
    run(small("fig1a", b))
    assert (a / "series.csv").read_bytes() == (b / "series.csv").read_bytes()


def test_workers_do_not_change_results(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run(small("fig1b", a))
    run(small("fig1b", b, workers=2))
    for name in ("series.csv", "slopes.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_check_flag_matches_manifest(tmp_path):
    code = main(["oracle", "--out", str(tmp_path / "o"), "--check"])
    assert code == 0
    assert json.loads((tmp_path / "o" / "manifest.json").read_text())["passed"]
    code = main(["sweep", "--N", "256,512", "--m", "1", "--t", "3", "--out", str(tmp_path / "s"), "--check"])
    passed = json.loads((tmp_path / "s" / "manifest.json").read_text())["passed"]
    assert code == (0 if passed else 1)


def test_scan_lambda_subcommand(tmp_path):
    code = main(["scan-lambda", "--lambdas", "0,0.6,1.2", "--steps", "12", "--out", str(tmp_path),
                 "--override", "N=256"])
    assert code == 0
    rows = (tmp_path / "series.csv").read_text().splitlines()
    assert rows[0] == "lam,growth_rate,broken" and len(rows) == 4


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "ptkr_otoc", "oracle", "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert "PASS  oracle equivalence" in proc.stdout
