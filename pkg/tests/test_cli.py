import json
import math
import time

import numpy as np
import pytest

from revdiss.cli import main
from revdiss.sweeps import FIGURE_IDS


def _read_csv(path):
    lines = path.read_text().strip().splitlines()
    names = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:]]
    return {
        name: np.array([float(r[i]) for r in rows])
        for i, name in enumerate(names)
        if all(_is_number(r[i]) for r in rows)
    }


def _is_number(text):
    try:
        float(text)
        return True
    except ValueError:
        return False


def test_eigen_single_point_flags_ep(tmp_path, capsys):
    rc = main(
        [
            "--out", str(tmp_path),
            "eigen", "--model", "effective",
            "--G", "10", "--J", "10", "--theta", "1.5707963",
        ]
    )
    assert rc == 0
    assert "exceptional point flagged" in capsys.readouterr().out
    meta = json.loads((tmp_path / "eigen.meta.json").read_text())
    assert meta["is_ep"] is True
    assert meta["phase_matching"] == {"n": 1, "parity": "odd"}
    data = _read_csv(tmp_path / "eigen.csv")
    # two nearly identical eigenvalues
    assert abs(data["re"][0] - data["re"][1]) < 1e-2
    assert abs(data["im"][0] - data["im"][1]) < 1e-2


def test_eigen_ring_both_closed_forms(tmp_path):
    rc = main(
        [
            "--out", str(tmp_path),
            "eigen", "--model", "ring", "--closed-form", "paper,circulant",
            "--theta-range", "0", "12.566370614359172", "--theta-points", "41",
            "--j-over-g", "1.0",
        ]
    )
    assert rc == 0
    data = _read_csv(tmp_path / "eigen_ring.csv")
    for col in ("circ0_re", "paper0_re", "disc0", "disc1", "disc2"):
        assert col in data
    assert np.max(data["disc0"] + data["disc1"] + data["disc2"]) > 10.0


def test_malformed_config_names_offending_key(tmp_path, capsys):
    cfg = tmp_path / "bad.toml"
    cfg.write_text("[model]\nbogus = 3\n")
    rc = main(["--config", str(cfg), "--out", str(tmp_path), "eigen"])
    assert rc == 1
    assert "model.bogus" in capsys.readouterr().err


def test_config_values_used_and_overridden(tmp_path):
    cfg = tmp_path / "ok.toml"
    cfg.write_text("[model]\nG = 5.0\nj_over_g = 1.0\n")
    rc = main(["--config", str(cfg), "--out", str(tmp_path), "eigen", "--G", "10"])
    assert rc == 0
    meta = json.loads((tmp_path / "eigen.meta.json").read_text())
    assert meta["params"]["G"] == 10.0
    assert meta["params"]["J"] == 10.0  # j_over_g from config applies to flag G


def test_smatrix_blockade_and_exact_range(tmp_path):
    rc = main(
        [
            "--out", str(tmp_path),
            "smatrix", "--pair", "41", "--pair", "14",
            "--theta-over-halfpi", "1",
            "--delta-range", "-110", "110", "--points", "2001",
        ]
    )
    assert rc == 0
    s41 = _read_csv(tmp_path / "s41.csv")
    assert list(s41) == ["delta", "re", "im", "abs"]
    assert s41["delta"].size == 2001
    assert s41["delta"][0] == -110.0 and s41["delta"][-1] == 110.0
    assert np.max(s41["abs"]) < 1e-12
    s14 = _read_csv(tmp_path / "s14.csv")
    assert np.max(s14["abs"]) == pytest.approx(10 / 11, abs=1e-9)


def test_smatrix_round_trip_precision(tmp_path):
    from revdiss.model import EffectiveParams
    from revdiss.scattering import s21_closed

    rc = main(
        ["--out", str(tmp_path), "smatrix", "--pair", "21",
         "--theta", "0.7", "--J", "4.0", "--delta-range", "-3", "3",
         "--points", "7"]
    )
    assert rc == 0
    data = _read_csv(tmp_path / "s21.csv")
    p = EffectiveParams(G=10.0, J=4.0, theta=0.7)
    for i, d in enumerate(data["delta"]):
        want = s21_closed(p, float(d))
        assert data["re"][i] == want.real and data["im"][i] == want.imag


def test_smatrix_all_ports_grid(tmp_path):
    rc = main(
        ["--out", str(tmp_path), "smatrix", "--model", "ring", "--pair", "21",
         "--all-ports", "--points", "11", "--kappa", "1000",
         "--theta-over-halfpi", "1"]
    )
    assert rc == 0
    grid = json.loads((tmp_path / "smatrix_grid.json").read_text())
    assert len(grid["delta"]) == 11
    assert np.array(grid["s_re"]).shape == (11, 3, 3)


def test_ep_find_default_box(tmp_path):
    rc = main(["--out", str(tmp_path), "ep-find"])
    assert rc == 0
    records = json.loads((tmp_path / "eps.json").read_text())
    assert len(records) == 4
    assert [r["parity"] for r in records] == ["odd", "even", "odd", "even"]
    assert [r["n"] for r in records] == [1, 2, 3, 4]
    for r in records:
        assert abs(r["theta_over_halfpi"] - (2 * r["n"] - 1)) < 1e-9
        assert abs(r["j_over_g"] - 1.0) < 1e-9
        assert r["eigengap"] <= 1e-5


def test_ep_find_empty_box(tmp_path):
    rc = main(
        ["--out", str(tmp_path), "ep-find", "--ratio-min", "0.0",
         "--ratio-max", "0.4"]
    )
    assert rc == 0
    assert json.loads((tmp_path / "eps.json").read_text()) == []


def test_ep_find_ring_reports_both_lists(tmp_path):
    rc = main(
        ["--out", str(tmp_path), "ep-find", "--model", "ring", "--order", "3",
         "--theta-min", "0", "--theta-max", "6.283185307179586"]
    )
    assert rc == 0
    doc = json.loads((tmp_path / "eps.json").read_text())
    assert doc["defective"] == []
    assert [r["n"] for r in doc["as_published_coalescence"]] == [1, 2]
    assert all(r["order"] == 3 for r in doc["as_published_coalescence"])


def test_chirality_theta_sweep(tmp_path):
    rc = main(["--out", str(tmp_path), "chirality", "--points", "81"])
    assert rc == 0
    data = _read_csv(tmp_path / "chirality.csv")
    assert data["alpha"].min() == pytest.approx(-1.0, abs=1e-9)
    assert data["alpha"].max() == pytest.approx(1.0, abs=1e-9)


def test_bandwidth_summary_monotone(tmp_path):
    rc = main(
        ["--out", str(tmp_path), "bandwidth",
         "--gammas-over-g", "1,10,50", "--points", "1001"]
    )
    assert rc == 0
    summary = json.loads((tmp_path / "bandwidth_summary.json").read_text())
    w = summary["fwhm"]
    assert w[0] < w[1] <= w[2] * 1.01
    assert summary["effective_fwhm"] == pytest.approx(44.0, rel=2e-2)
    data = _read_csv(tmp_path / "bandwidth.csv")
    assert "d_gamma_10" in data and "d_effective" in data


def test_figure_subcommand_and_determinism(tmp_path):
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    assert main(["--out", str(out1), "figure", "fig6b"]) == 0
    assert main(["--out", str(out2), "figure", "fig6b"]) == 0
    assert (out1 / "fig6b.csv").read_bytes() == (out2 / "fig6b.csv").read_bytes()
    assert (
        (out1 / "fig6b.meta.json").read_bytes()
        == (out2 / "fig6b.meta.json").read_bytes()
    )


def test_figure_unknown_id_lists_valid(tmp_path, capsys):
    rc = main(["--out", str(tmp_path), "figure", "fig99"])
    assert rc == 1
    err = capsys.readouterr().err
    for fid in FIGURE_IDS:
        assert fid in err


def test_figure_all_within_runtime_budget(tmp_path):
    start = time.monotonic()
    rc = main(["--out", str(tmp_path), "--workers", "1", "figure", "--all"])
    elapsed = time.monotonic() - start
    assert rc == 0
    assert elapsed < 60.0
    for fid in FIGURE_IDS:
        assert (tmp_path / f"{fid}.csv").stat().st_size > 0
        assert (tmp_path / f"{fid}.meta.json").stat().st_size > 0


def test_validation_exit_code_for_bad_flags(tmp_path, capsys):
    assert main(["--out", str(tmp_path), "eigen", "--model", "marble"]) == 1
    assert main(["--out", str(tmp_path), "nonsense-command"]) == 1
    assert main(["--out", str(tmp_path), "eigen", "--J", "1", "--j-over-g", "2"]) == 1
    capsys.readouterr()


def test_invalid_physical_parameters_exit_one(tmp_path, capsys):
    rc = main(["--out", str(tmp_path), "eigen", "--G", "-5"])
    assert rc == 1
    assert "G must be" in capsys.readouterr().err


def test_no_partial_files_on_validation_failure(tmp_path):
    cfg = tmp_path / "bad.toml"
    cfg.write_text("[model]\nbogus = 3\n")
    assert main(["--config", str(cfg), "--out", str(tmp_path), "eigen"]) == 1
    assert sorted(f.name for f in tmp_path.iterdir()) == ["bad.toml"]


def test_smatrix_full_model(tmp_path):
    rc = main(
        ["--out", str(tmp_path), "smatrix", "--model", "full",
         "--theta-over-halfpi", "1", "--gamma-over-g", "50",
         "--pair", "41", "--pair", "14", "--points", "101"]
    )
    assert rc == 0
    s41 = _read_csv(tmp_path / "s41.csv")
    s14 = _read_csv(tmp_path / "s14.csv")
    # the blockade is exact on resonance and approximate away from it
    assert s41["abs"][50] < 1e-6
    assert np.max(s41["abs"]) < 0.05
    assert np.max(s14["abs"]) == pytest.approx(10 / 11, abs=1e-3)


def test_smatrix_pole_rows_flagged_and_run_continues(tmp_path, capsys, monkeypatch):
    import revdiss.cli as cli_mod
    from revdiss.scattering import PoleError

    real = cli_mod.ring_s_closed

    def poisoned(ring, delta):
        if abs(delta) < 1e-9:
            raise PoleError("forced pole for the flagging path")
        return real(ring, delta)

    monkeypatch.setattr(cli_mod, "ring_s_closed", poisoned)
    rc = main(
        ["--out", str(tmp_path), "smatrix", "--model", "ring", "--pair", "21",
         "--kappa", "1000", "--delta-range", "-10", "10", "--points", "11"]
    )
    assert rc == 0
    assert "pole" in capsys.readouterr().err
    data = _read_csv(tmp_path / "s21.csv")
    assert np.isnan(data["abs"][5]) and not np.isnan(data["abs"][0])
    meta = json.loads((tmp_path / "smatrix.meta.json").read_text())
    assert meta["pole_deltas"] == [0.0]
