import csv
import json
import subprocess
import sys


from frachs.cli import main, validate_config


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_hardy_constant_table(tmp_path):
    out = tmp_path / "h"
    assert main(["hardy-constant", "--n", "3", "--alphas", "0.5,1.0,1.5,1.99", "-o", str(out)]) == 0
    rows = read_csv(out / "hardy_constant.csv")
    assert [float(r["alpha"]) for r in rows] == [0.5, 1.0, 1.5, 1.99]
    assert abs(float(rows[-1]["gamma_H"]) - 0.25) < 1e-2
    rep = json.loads((out / "report.json").read_text())
    assert rep["report_version"] == 1 and rep["config"]["problem"]["n"] == 3
    assert (out / "SCHEMA.md").exists()


def test_quotient_bubble_self_convergence(tmp_path):
    vals = []
    for N in (2048, 4096):
        out = tmp_path / f"q{N}"
        code = main(["quotient", "--profile", "bubble", "--n", "1", "--alpha", "0.5", "--s", "0",
                     "--gamma", "0", "--N", str(N), "-o", str(out)])
        assert code == 0
        vals.append(float(read_csv(out / "quotient.csv")[0]["quotient"]))
        rep = json.loads((out / "report.json").read_text())
        assert rep["grid"]["N"] == N and rep["config"]["grid"]["N"] == N
    assert abs(vals[0] - vals[1]) / vals[1] < 1e-3


def test_malformed_config_names_hypothesis(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"problem": {"n": 1, "alpha": 0.5, "s": 0.5}, "output": str(tmp_path / "o")}))
    assert main(["quotient", "--config", str(cfg)]) == 2
    assert "0 ≤ s < α" in capsys.readouterr().err


def test_unknown_keys_are_all_listed(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"problem": {"alpha": 0.5, "beta": 1}, "grid": {"NN": 8}, "extra": 1, "seed": "x"}))
    assert main(["quotient", "--config", str(cfg)]) == 2
    err = capsys.readouterr().err
    for key in ("problem.beta", "grid.NN", "extra", "seed"):
        assert key in err


def test_validate_config_types():
    assert validate_config({"grid": {"N": 1.5}}) == ["grid.N: expected int, got float"]
    assert validate_config({"solver": {"renormalize": 1}})
    assert validate_config({"problem": {"gamma": 0.1, "gamma_frac": 0.2}})
    assert validate_config({"problem": {"alpha": 1}}) == []


def test_flags_override_file(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"problem": {"alpha": 0.5, "gamma_frac": 0.2}, "grid": {"N": 256, "L": 20.0}}))
    out = tmp_path / "o"
    assert main(["quotient", "--config", str(cfg), "--N", "512", "--gamma", "0.0", "-o", str(out)]) == 0
    rep = json.loads((out / "report.json").read_text())
    assert rep["config"]["grid"] == {"N": 512, "L": 20.0}
    assert rep["config"]["problem"]["gamma"] == 0.0 and rep["config"]["problem"]["gamma_frac"] is None


def test_reports_are_deterministic(tmp_path, monkeypatch):
    blobs = []
    for sub in ("a", "b"):
        (tmp_path / sub).mkdir()
        monkeypatch.chdir(tmp_path / sub)
        assert main(["minimize", "--alpha", "0.5", "--s", "0.25", "--N", "256", "--seed", "3", "-o", "out"]) == 0
        blobs.append(((tmp_path / sub / "out" / "report.json").read_bytes(),
                      (tmp_path / sub / "out" / "history.csv").read_bytes()))
    assert blobs[0] == blobs[1]


def test_non_convergence_exit_code(tmp_path):
    out = tmp_path / "d"
    code = main(["minimize", "--alpha", "0.5", "--gamma-frac", "-0.1", "--N", "256", "--max-iters", "200",
                 "-o", str(out)])
    assert code == 3
    rep = json.loads((out / "report.json").read_text())
    assert rep["converged"] is False and rep["status"] in ("drift", "not_attained")


def test_translate_scan_and_extension_check(tmp_path):
    out = tmp_path / "t"
    assert main(["translate-scan", "--alpha", "0.5", "--gamma-frac", "-0.1", "--N", "256", "-o", str(out)]) == 0
    rows = read_csv(out / "scan.csv")
    assert float(rows[0]["delta"]) == 0.0 and len(rows) >= 2
    out = tmp_path / "e"
    assert main(["extension-check", "--alpha", "1.0", "--N", "256", "--profile", "gaussian", "-o", str(out)]) == 0
    rep = json.loads((out / "report.json").read_text())
    assert rep["relative_error"] < 1e-6 and rep["status"] == "ok"
    assert read_csv(out / "profiles.csv")[0].keys() == {"xi_abs", "y", "phi"}


def test_mountain_pass_command(tmp_path):
    out = tmp_path / "mp"
    code = main(["mountain-pass", "--alpha", "0.5", "--s", "0.25", "--gamma-frac", "0.1", "--N", "256",
                 "--profile", "gaussian", "-o", str(out)])
    assert code == 0
    rep = json.loads((out / "report.json").read_text())["mountain_pass"]
    assert 0 < rep["c_est"] < rep["c_star"]
    assert (out / "maximizer.fxv").exists() and (out / "path_energy.csv").exists()
    assert main(["mountain-pass", "--alpha", "0.5", "--s", "0", "-o", str(tmp_path / "bad")]) == 2


def test_sweep_cartesian_grid(tmp_path):
    out = tmp_path / "sw"
    code = main(["sweep", "--command", "quotient", "--set", "problem.alpha=0.25,0.5", "--set", "grid.N=128,256",
                 "--workers", "2", "-o", str(out)])
    assert code == 0
    rows = read_csv(out / "sweep.csv")
    assert len(rows) == 4 and {r["status"] for r in rows} == {"ok"}
    for r in rows:
        entry = json.loads((out / r["entry"] / "report.json").read_text())
        assert entry["config"]["problem"]["alpha"] == float(r["problem.alpha"])


def test_sweep_reports_invalid_entries(tmp_path):
    out = tmp_path / "sw"
    code = main(["sweep", "--command", "quotient", "--set", "problem.s=0.0,0.9", "-o", str(out)])
    assert code == 2
    statuses = [r["status"] for r in read_csv(out / "sweep.csv")]
    assert statuses == ["ok", "invalid"]
    assert main(["sweep", "--set", "problem.bogus=1", "-o", str(out)]) == 2


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "frachs", "hardy-constant", "--n", "2", "-o", str(tmp_path / "h")],
                         capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    assert (tmp_path / "h" / "hardy_constant.csv").exists()
