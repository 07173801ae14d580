import json

from densitylab import cli


def _run(capsys, *argv):
    code = cli.main(list(argv))
    return code, json.loads(capsys.readouterr().out)


def test_exponents_dh(tmp_path, capsys):
    code, out = _run(capsys, "exponents", "--profile", "DH", "--nu", "0.3", "--eps", "0.001",
                     "--out", str(tmp_path))
    assert code == 0
    assert abs(out["report"]["exponent"] - 0.6) <= 0.002
    assert out["report"]["trace"]
    saved = json.loads((tmp_path / "exponents.json").read_text())
    assert saved["config_sha256"] == out["config_sha256"] and len(saved["manifest_sha256"]) == 64


def test_detect_missing_table(tmp_path, capsys):
    missing = tmp_path / "none.txt"
    code, out = _run(capsys, "detect", "--zero-table", str(missing), "--out", str(tmp_path))
    assert code == 2 and out["path"] == str(missing)


def test_unknown_config_key(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"nu": 0.3, "eps": 0.01, "colour": "red"}))
    code, out = _run(capsys, "exponents", "--config", str(cfg), "--out", str(tmp_path))
    assert code == 2 and "colour" in out["message"]


def test_flags_override_config(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"nu": 0.3, "eps": 0.01}))
    _, a = _run(capsys, "exponents", "--config", str(cfg), "--out", str(tmp_path))
    _, b = _run(capsys, "exponents", "--config", str(cfg), "--nu", "0.1", "--out", str(tmp_path))
    assert a["config"]["nu"] == "0.3" and b["config"]["nu"] == "0.1"
    assert a["config_sha256"] != b["config_sha256"]


def test_out_dir_does_not_change_config_hash(tmp_path, capsys):
    _, a = _run(capsys, "exponents", "--nu", "0.3", "--eps", "0.01", "--out", str(tmp_path / "x"))
    _, b = _run(capsys, "exponents", "--nu", "0.3", "--eps", "0.01", "--out", str(tmp_path / "y"))
    assert a["config_sha256"] == b["config_sha256"]


def test_validation_errors_exit_2(tmp_path, capsys):
    code, out = _run(capsys, "exponents", "--nu", "0.9", "--eps", "0.01", "--out", str(tmp_path))
    assert code == 2 and out["error"] == "InputDomainError"
    code, out = _run(capsys, "verify-lemma", "7.7", "--out", str(tmp_path))
    assert code == 2
    code, out = _run(capsys, "scan-R", "--T", "1000", "--out", str(tmp_path))
    assert code == 2 and "sigma" in out["message"]


def test_verify_lemma_default_samples(tmp_path, capsys):
    code, out = _run(capsys, "verify-lemma", "4.1", "--out", str(tmp_path))
    assert code == 0 and out["results"][0]["samples"] == 10_000
    assert out["results"][0]["max_ratio"] <= 1


def test_scan_outputs_carry_hashes(tmp_path, capsys):
    code, out = _run(capsys, "scan-theorem-lhs", "--T", "400", "--out", str(tmp_path))
    assert code == 0
    csv_head = (tmp_path / "theorem_lhs_T400.csv").read_text().splitlines()[0]
    assert csv_head == "t_lo,t_hi,config_sha256,manifest_sha256"
    svg = (tmp_path / "theorem_lhs.svg").read_text()
    assert out["config_sha256"] in svg and out["manifest_sha256"] in svg


def test_report_lists_artifacts(tmp_path, capsys):
    _run(capsys, "exponents", "--nu", "0.3", "--eps", "0.01", "--out", str(tmp_path))
    code, out = _run(capsys, "report", "--out", str(tmp_path))
    assert code == 0 and [f["file"] for f in out["files"]] == ["exponents.json"]


def test_preset_pins_acceptance_inputs():
    p = cli.acceptance_preset()
    assert p["theorem"] == {"T": 10000.0, "T_table": [1000.0, 3000.0, 10000.0], "dt": 0.05,
                            "eps": 0.25, "nu": 0.4, "U": 200.0}
    assert p["detector"]["eps"] == 0.3 and p["detector"]["nu"] == 0.5


def test_calibrate_reproduces_packaged_manifest(tmp_path, capsys):
    from importlib import resources
    code, out = _run(capsys, "calibrate", "--out", str(tmp_path))
    assert code == 0 and out["new_manifest_sha256"] == out["manifest_sha256"]
    packaged = resources.files("densitylab").joinpath("data/calibration.txt").read_text("utf-8")
    assert (tmp_path / "calibration.txt").read_text() == packaged
