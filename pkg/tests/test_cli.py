import json

import pytest

from phasekit.cli import bundled_config, main
from phasekit.persistence import read_csv

SHIFTED = str(bundled_config("gaussian_shifted"))


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_moments_mixed(tmp_path, capsys):
    code, out, _ = run(["moments", "-c", SHIFTED, "--n", "1", "--m", "1", "-o", str(tmp_path)], capsys)
    assert code == 0
    assert "PASS moments.path_agreement" in out
    header, rows = read_csv(tmp_path / "moments.csv")
    assert header == ["n", "m", "path", "re", "im", "residual"]
    assert [r[2] for r in rows] == ["internal", "separable", "phase_space"]
    for r in rows:
        assert abs(float(r[3]) + 3.0) < 1e-8


def test_moments_single_path(tmp_path, capsys):
    code, _, _ = run(["moments", "-c", SHIFTED, "--n", "2", "--m", "0", "--path", "separable", "-o", str(tmp_path)],
                     capsys)
    assert code == 0
    _, rows = read_csv(tmp_path / "moments.csv")
    assert len(rows) == 1 and abs(float(rows[0][3]) - 2.75) < 1e-10


def test_moments_needs_both_orders(tmp_path, capsys):
    code, _, err = run(["moments", "-c", SHIFTED, "--n", "1", "-o", str(tmp_path)], capsys)
    assert code == 2
    assert json.loads(err)[0]["kind"] == "config"


def test_state_outputs(tmp_path, capsys):
    code, _, _ = run(["state", "-c", SHIFTED, "-o", str(tmp_path)], capsys)
    assert code == 0
    header, rows = read_csv(tmp_path / "state.csv")
    assert header == ["x", "re", "im"] and len(rows) == 1024
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["status"] == "pass"
    assert {o["name"] for o in manifest["outputs"]} == {"state.csv", "momentum_state.csv"}


def test_phase_space_with_plot(tmp_path, capsys):
    code, _, _ = run(["phase-space", "-c", SHIFTED, "--set", "grid.n=256", "--set", "grid.dx=0.078125",
                      "--plot", "-o", str(tmp_path)], capsys)
    assert code == 0
    summary = json.loads((tmp_path / "phase_space_summary.json").read_text())
    assert abs(summary["mean_x"] - 1.5) < 1e-10
    text = (tmp_path / "density_heatmap.dat").read_text()
    assert text.count("\n\n") == 256


def test_kernel_command(tmp_path, capsys):
    code, out, _ = run(["kernel", "-c", SHIFTED, "-o", str(tmp_path)], capsys)
    assert code == 0
    assert "PASS phase_space.kernel_equivalence" in out


def test_constants_command(tmp_path, capsys):
    code, _, _ = run(["constants", "-c", SHIFTED, "-o", str(tmp_path)], capsys)
    assert code == 0
    header, rows = read_csv(tmp_path / "constants_scan.csv")
    assert header == ["h", "c", "d", "A", "residual"]
    assert float(rows[-1][0]) == 0.0 and float(rows[-1][3]) == 0.0


def test_eigensolve(tmp_path, capsys):
    code, _, _ = run(["eigensolve", "-k", "3", "-o", str(tmp_path)], capsys)
    assert code == 0
    _, rows = read_csv(tmp_path / "spectrum.csv")
    assert [abs(float(r[1]) - (j + 0.5)) < 5e-4 for j, r in enumerate(rows)] == [True] * 3
    assert (tmp_path / "eigenstate_2.csv").exists()


def test_eigensolve_k_too_large(tmp_path, capsys):
    code, _, err = run(["eigensolve", "-k", "5000", "-o", str(tmp_path)], capsys)
    assert code == 2
    assert "outputs.spectrum" in err


def test_eigensolve_without_hamiltonian(tmp_path, capsys):
    code, _, _ = run(["eigensolve", "-c", SHIFTED, "-k", "2", "-o", str(tmp_path)], capsys)
    assert code == 2


def test_missing_config(tmp_path, capsys):
    code, _, err = run(["state", "-c", str(tmp_path / "nope.toml"), "-o", str(tmp_path)], capsys)
    assert code == 2
    assert "not found" in json.loads(err)[0]["message"]


def test_bad_override_key(tmp_path, capsys):
    code, _, err = run(["state", "-c", SHIFTED, "--set", "grid.dx=-1", "-o", str(tmp_path)], capsys)
    assert code == 2
    assert "grid.dx" in err


def test_unwritable_output(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("")
    code, _, err = run(["state", "-c", SHIFTED, "-o", str(blocker / "sub")], capsys)
    assert code == 3
    assert json.loads(err)[0]["kind"] == "io"


def test_env_output_dir(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("PHASEKIT_OUTPUT_DIR", str(tmp_path / "env"))
    code, _, _ = run(["constants", "-c", SHIFTED], capsys)
    assert code == 0
    assert (tmp_path / "env" / "manifest.json").exists()


def test_invariant_failure_exit_code(tmp_path, capsys):
    code, out, err = run(["moments", "-c", SHIFTED, "--n", "1", "--m", "1",
                          "--set", "tolerances.\"moments.path_agreement\"=0.0", "-o", str(tmp_path)], capsys)
    assert code == 1
    assert "FAIL moments.path_agreement" in out
    assert json.loads(err)[0]["check"] == "moments.path_agreement"


def test_verify_without_hamiltonian(tmp_path, capsys):
    code, out, _ = run(["verify", "-c", SHIFTED, "-o", str(tmp_path)], capsys)
    assert code == 0
    assert "FAIL" not in out
    header, rows = read_csv(tmp_path / "verify.csv")
    assert header == ["check", "value", "tolerance", "passed", "detail"]
    assert all(r[3] == "true" for r in rows)


def test_unknown_command(capsys):
    with pytest.raises(SystemExit):
        main(["frobnicate"])
