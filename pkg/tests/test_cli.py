import csv
import json
import subprocess
import sys

import numpy as np
import pytest
from golden import ARRAY_T15, ARRAY_T5_EXT

from zakzcz import cli
from zakzcz.io import read_family, sha256_file
from zakzcz.zczgen import generate_family


def run(*argv):
    return cli.main([str(a) for a in argv])


def read_rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


@pytest.fixture
def r3t5_file(tmp_path):
    path = tmp_path / "r3t5.json"
    assert run("generate", "T2", "--r", 3, "--t", 5, "--q", 1, "--rows", "0,1", "--out", path) == 0
    return path


def test_generate_summary_and_manifest(tmp_path, capsys):
    path = tmp_path / "t1.json"
    assert run("generate", "T1", "--t", 5, "--q", 1, "--out", path) == 0
    out = capsys.readouterr().out
    assert "N=25 M=4" in out and "Z=5" in out and "theta_c=5" in out
    fam = read_family(path)
    assert fam.sequences.shape == (4, 5, 25)
    man = json.loads(path.with_suffix(".manifest.json").read_text())
    assert man["master_seed"] == cli.DEFAULT_SEED
    assert man["outputs"] == {"t1.json": sha256_file(path)}
    assert man["command"][:2] == ["zakzcz", "generate"]


def test_generate_single_set_reports_not_applicable(tmp_path, capsys):
    assert run("generate", "T3", "--r", 2, "--t", 6, "--out", tmp_path / "x.json") == 0
    assert "not applicable" in capsys.readouterr().out


def test_generate_round_trip_is_exponent_exact(r3t5_file):
    ref = generate_family("T2", 3, 5, q=1, rows=[0, 1])
    fam = read_family(r3t5_file)
    D, E = ref.exponent_form()
    assert fam.meta["denominator"] == D
    assert np.array_equal(fam.exponent_form()[1], E)
    assert np.array_equal(fam.index_matrix, ref.index_matrix)
    rec = json.loads(r3t5_file.read_text())
    assert rec["schema_version"] == 1 and rec["form"] == "exponent"


def test_generate_rejects_bad_parameters(tmp_path, capsys):
    assert run("generate", "T2", "--r", 2, "--t", 5, "--out", tmp_path / "x.json") == 2
    assert "R must be odd for Theorem 2" in capsys.readouterr().err
    assert run("generate", "T7", "--t", 5) == 2
    assert run("generate", "T1", "--t", 5, "--rows", "a,b") == 2


def test_global_flags_in_either_position(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run("--seed", 7, "--out", a, "generate", "T1", "--t", 5) == 0
    assert run("generate", "T1", "--t", 5, "--seed", 7, "--out", b) == 0
    assert a.read_bytes() == b.read_bytes()
    assert json.loads(a.with_suffix(".manifest.json").read_text())["master_seed"] == 7


def test_verify_r3_t5_family(r3t5_file, tmp_path):
    cert = tmp_path / "cert.json"
    assert run("verify", r3t5_file, "--out", cert) == 0
    rep = json.loads(cert.read_text())
    assert rep["all_properties_hold"]
    assert [(s["N"], s["T_set_size"], s["Z_measured"]) for s in rep["sets"]] == [(75, 5, 15)] * 2
    assert rep["inter_set"]["theta_c"] == pytest.approx(5 * np.sqrt(3))
    assert rep["sarwate_lhs"] == pytest.approx(1, abs=1e-9)
    assert cert.with_suffix(".manifest.json").exists()


def test_verify_r1_t4_set(tmp_path, capsys):
    path = tmp_path / "r1t4.json"
    assert run("generate", "T1", "--t", 4, "--out", path) == 0
    capsys.readouterr()
    assert run("verify", path) == 0
    rep = json.loads(capsys.readouterr().out)
    s = rep["sets"][0]
    assert (s["N"], s["T_set_size"], s["Z_measured"]) == (16, 4, 4)
    assert s["all_distinct"] and rep["inter_set"] == "not applicable"


def test_verify_detects_cyclic_shift(r3t5_file, capsys):
    rec = json.loads(r3t5_file.read_text())
    rec["sets"][0][1] = np.roll(rec["sets"][0][0], 3).tolist()
    r3t5_file.write_text(json.dumps(rec))
    assert run("verify", r3t5_file) == 1
    rep = json.loads(capsys.readouterr().out)
    assert not rep["sets"][0]["all_distinct"]


def test_verify_parse_error(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run("verify", bad) == 2
    bad.write_text(json.dumps({"kind": "other"}))
    assert run("verify", bad) == 2


def test_correlate_pair_and_self(tmp_path):
    path = tmp_path / "r1t4.json"
    run("generate", "T1", "--t", 4, "--out", path)
    out = tmp_path / "c.csv"
    assert run("correlate", path, "--pair", "2,0", "3,0", "--out", out) == 0
    rows = read_rows(out)
    assert list(rows[0]) == ["u", "m", "v", "m2", "tau_samples", "real", "imag", "magnitude"]
    mag = [float(r["magnitude"]) for r in rows]
    assert len(mag) == 16 and max(mag[:4]) < 1e-9 * 16
    assert run("correlate", path, "--pair", "1,0", "1,0", "--out", out) == 0
    assert float(read_rows(out)[0]["real"]) == pytest.approx(16)
    assert run("correlate", path, "--pair", "4,0", "1,0") == 2
    assert run("correlate", path) == 2


def test_correlate_all(r3t5_file, tmp_path):
    out = tmp_path / "all.csv"
    assert run("correlate", r3t5_file, "--all", "--out", out) == 0
    assert len(read_rows(out)) == 10 * 10 * 75


def test_af_zero_doppler_cut(tmp_path):
    path = tmp_path / "r2t8.json"
    assert run("generate", "T3", "--r", 2, "--t", 8, "--q", 188, "--out", path) == 0
    out = tmp_path / "af.csv"
    assert run("af", path, "--set", 0, "--seq", 1, "--out", out) == 0
    rows = read_rows(out)
    assert len(rows) == 128 * 128
    cut = {int(r["tau_samples"]): float(r["magnitude"]) for r in rows if r["doppler_bins"] == "0"}
    assert cut[0] == pytest.approx(128)
    assert max(v for k, v in cut.items() if k) < 1e-9 * 128
    cen = tmp_path / "afc.csv"
    assert run("af", path, "--set", 0, "--seq", 1, "--order", "centered", "--out", cen) == 0
    assert read_rows(cen)[0]["tau_samples"] == "-64"


def test_florentine_actions(tmp_path, capsys):
    base = tmp_path / "f5.csv"
    assert run("florentine", "gen-prime", 5, "--out", base) == 0
    ext = tmp_path / "f5q1.csv"
    assert run("florentine", "extend", base, "--q", 1, "--out", ext) == 0
    assert np.loadtxt(ext, delimiter=",", dtype=int).tolist() == ARRAY_T5_EXT[1]
    eq7 = tmp_path / "eq7.csv"
    np.savetxt(eq7, ARRAY_T15, fmt="%d", delimiter=",")
    capsys.readouterr()
    assert run("florentine", "verify", eq7) == 0
    assert capsys.readouterr().out.strip() == "valid"
    assert run("florentine", "search", 4, "--rows", 2) == 1
    assert "not-found" in capsys.readouterr().out
    assert run("florentine", "gen-prime", 9) == 2
    assert run("florentine", "extend", base, "--q", 99) == 2
    bad = tmp_path / "bad.csv"
    bad.write_text("0,1,2,3,4\n0,1,3,2,4\n")
    assert run("florentine", "verify", bad) == 1
    assert "repeated-step" in capsys.readouterr().out


def test_otfs_config_errors_named(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"window_len": 64, "colour": 1, "trials": 0}))
    assert run("otfs-sim", cfg) == 2
    err = capsys.readouterr().err
    assert "unknown field 'colour'" in err and "'trials'" in err
    cfg.write_text(json.dumps({"window_len": 64}))
    assert run("otfs-sim", cfg) == 2
    assert "window_len" in capsys.readouterr().err
    assert run("otfs-sim", tmp_path / "missing.json") == 2


def test_otfs_sim_deterministic(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"snr_list": [10, 20], "trials": 3}))
    a, b = tmp_path / "a", tmp_path / "b"
    assert run("otfs-sim", cfg, "--mode", "ber", "--out", a) == 0
    assert run("otfs-sim", cfg, "--mode", "ber", "--out", b) == 0
    ca, cb = a / "otfs_ber.csv", b / "otfs_ber.csv"
    assert ca.read_bytes() == cb.read_bytes()
    rows = read_rows(ca)
    assert [r["preamble"] for r in rows] == ["proposed"] * 2 + ["random"] * 2
    assert "ber_perfect_sync" in rows[0]
    man = json.loads((a / "otfs_ber.manifest.json").read_text())
    assert man["config"]["trials"] == 3 and man["config"]["mode"] == "ber"
    assert man["outputs"]["otfs_ber.csv"] == sha256_file(ca)


def test_otfs_velocity_sweep(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"velocities": [0, 300], "compare_random": False}))
    out = tmp_path / "v.csv"
    assert run("otfs-sim", cfg, "--mode", "velocity-sweep", "--trials", 2, "--out", out) == 0
    rows = read_rows(out)
    assert [r["v_max_kmh"] for r in rows] == ["0.0", "300.0"]


def test_module_entry_point(tmp_path):
    res = subprocess.run(
        [sys.executable, "-m", "zakzcz", "florentine", "gen-prime", "5"],
        capture_output=True,
        text=True,
    )
    assert res.returncode == 0
    assert res.stdout.splitlines()[0] == "0,1,2,3,4"
