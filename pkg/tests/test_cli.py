import json
import math

import pytest

from spectral_dumbbell import io
from spectral_dumbbell.cli import main
from spectral_dumbbell.mesh import gen_icosphere, isoperimetric_ratio


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def values(csv_text):
    return [float(line.split(",")[1]) for line in csv_text.strip().splitlines()[1:]]


def test_sphere_spectrum(capsys):
    code, out, _ = run(["spectrum", "sphere", "--n", 2, "--count", 9], capsys)
    assert code == 0
    assert values(out) == [0, 2, 2, 2, 6, 6, 6, 6, 6]


def test_segment_spectrum(capsys):
    code, out, _ = run(["spectrum", "segment", "--h", 0.5, "--count", 1], capsys)
    assert code == 0 and values(out)[0] == pytest.approx(math.pi**2, rel=1e-15)


def test_missing_argument_exit_2(capsys):
    code, _, err = run(["spectrum", "sphere", "--count", 3], capsys)
    assert code == 2 and "usage" in err


def test_domain_error_exit_3(capsys):
    code, out, err = run(["spectrum", "sphere", "--n", 0, "--count", 3], capsys)
    assert code == 3 and out == "" and "error" in err


def test_merge(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(["spectrum", "sphere", "--n", 2, "--count", 4, "--out", a], capsys)[0] == 0
    assert run(["spectrum", "sphere", "--n", 2, "--count", 4, "--radius", 2, "--out", b], capsys)[0] == 0
    code, out, _ = run(["spectrum", "merge", a, b], capsys)
    assert code == 0 and values(out) == [0, 0, 0.5, 0.5, 0.5, 2, 2, 2]
    sidecar = json.loads((tmp_path / "b.json").read_text())
    assert sidecar["volume"] == pytest.approx(16 * math.pi)


def test_mesh_round_trip_measure_is_bit_exact(tmp_path, capsys):
    f = tmp_path / "ico.off"
    assert run(["mesh", "icosphere", "--level", 3, "--radius", 1.5, "--out", f], capsys)[0] == 0
    code, out, _ = run(["mesh", "measure", "--in", f], capsys)
    assert code == 0
    got = json.loads(out)
    ref = isoperimetric_ratio(gen_icosphere(3, 1.5)).as_dict()
    assert got == ref


def test_icosphere_level_zero_to_stdout(capsys):
    code, out, _ = run(["mesh", "icosphere", "--level", 0], capsys)
    lines = out.splitlines()
    assert code == 0 and lines[0] == "OFF" and lines[1] == "12 20 0"


def test_validate(tmp_path, capsys):
    f = tmp_path / "d.off"
    assert run(["mesh", "dumbbell", "--delta", 0.15, "--h", 0.5, "--level", 3, "--out", f], capsys)[0] == 0
    code, out, _ = run(["mesh", "validate", "--in", f], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["ok"] and rep["euler"] == 2
    open_mesh = tmp_path / "open.off"
    open_mesh.write_text("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n")
    code, out, err = run(["mesh", "validate", "--in", open_mesh], capsys)
    assert code == 3 and "open: 1 boundary loops" in err


def test_dumbbell_delta_out_of_range(capsys):
    code, _, err = run(["mesh", "dumbbell", "--delta", 0.5], capsys)
    assert code == 3 and "delta out of range (0, 0.3]" in err


def test_missing_file_exit_3(tmp_path, capsys):
    code, _, err = run(["mesh", "measure", "--in", tmp_path / "nope.off"], capsys)
    assert code == 3 and err


def test_spectrum_mesh_outputs(tmp_path, capsys):
    f = tmp_path / "s.off"
    run(["mesh", "icosphere", "--level", 3, "--out", f], capsys)
    code, out, _ = run(["spectrum", "mesh", "--in", f, "--num", 10, "--tol", 1e-9, "--seed", 0,
                        "--eig-out", tmp_path / "e.csv", "--matrix-dir", tmp_path / "mm"], capsys)
    assert code == 0
    vals = values(out)
    assert vals[0] == 0.0 and vals[1] == pytest.approx(2.0, rel=1e-2)
    assert (tmp_path / "e.csv").read_text().startswith("index,eigenvalue,residual\n")
    assert (tmp_path / "mm" / "stiffness.mtx").exists()


def test_spectrum_mesh_too_many_eigenvalues(tmp_path, capsys):
    f = tmp_path / "s.off"
    run(["mesh", "icosphere", "--level", 1, "--out", f], capsys)
    code, _, err = run(["spectrum", "mesh", "--in", f, "--num", 11, "--tol", 1e-9], capsys)
    assert code == 3 and "m must lie" in err


def test_spectrum_mesh_solver_failure_exit_4(tmp_path, capsys, monkeypatch):
    from spectral_dumbbell import cli, fem

    def one_step(K, M, m, **kw):
        return fem.solve_lowest(K, M, m, max_iter=1, **kw)

    monkeypatch.setattr(cli, "solve_lowest", one_step)
    f = tmp_path / "s.off"
    run(["mesh", "icosphere", "--level", 3, "--out", f], capsys)
    code, out, err = run(["spectrum", "mesh", "--in", f, "--num", 10, "--tol", 1e-12], capsys)
    assert code == 4 and out == "" and "solver error" in err


def test_bad_tolerance_rejected(tmp_path, capsys):
    code, _, err = run(["exp", "dumbbell", "--deltas", "0.2", "--tol", 1e-15, "--out", tmp_path], capsys)
    assert code == 3 and "--tol" in err


def test_exp_weyl(tmp_path, capsys):
    code, _, err = run(["exp", "weyl", "--n", 2, "--kmax", 100, "--out", tmp_path, "--no-timestamp"], capsys)
    assert code == 0 and "k1 = 5" in err
    meta, rows = io.read_table(tmp_path / "weyl.csv")
    assert meta["k1"] == 5 and "created" not in meta
    assert [r["k"] for r in rows if r["k1_mark"] == "1"] == ["5"]
    assert (tmp_path / "weyl_ratio.csv").exists()


def test_exp_weyl_default_out_dir(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv(io.OUT_DIR_ENV, str(tmp_path / "envdir"))
    assert run(["exp", "weyl", "--n", 3, "--kmax", 50], capsys)[0] == 0
    meta, _ = io.read_table(tmp_path / "envdir" / "weyl.csv")
    assert meta["k1"] == 6 and "created" in meta


def test_exp_dumbbell_empty_deltas(tmp_path, capsys):
    code, _, err = run(["exp", "dumbbell", "--deltas", "", "--out", tmp_path], capsys)
    assert code == 2 and "empty" in err


def test_exp_dumbbell_partial_failure(tmp_path, capsys):
    code, _, err = run(["exp", "dumbbell", "--h", 0.5, "--deltas", "0.4,0.2", "--level", 3,
                        "--num", 4, "--out", tmp_path, "--no-timestamp"], capsys)
    assert code == 3 and "delta=0.4" in err
    _, rows = io.read_table(tmp_path / "dumbbell.csv")
    assert rows[0]["status"].startswith("mesh:") and rows[1]["status"] == "ok"


def test_plan(tmp_path, capsys):
    f = tmp_path / "zero.csv"
    f.write_text("x,fx\n0,0\n100,0\n")
    cert = tmp_path / "cert.json"
    code, _, err = run(["plan", "--n", 2, "--A", 1, "--f", f, "--horizon", 10**6, "--out", cert,
                        "--no-timestamp"], capsys)
    assert code == 0 and "k0=5" in err
    data = json.loads(cert.read_text())
    assert data["k0"] == 5 and data["reverification"]["matches"]
    assert "created" not in data["metadata"]


def test_plan_n4(tmp_path, capsys):
    f = tmp_path / "zero.csv"
    f.write_text("x,fx\n0,0\n100,0\n")
    code, out, _ = run(["plan", "--n", 4, "--A", 1, "--f", f, "--horizon", 1000], capsys)
    data = json.loads(out)
    assert code == 0 and data["n"] == 4 and data["k1"] == 7
    assert data["sphere_volume"] == pytest.approx(8 * math.pi**2 / 3, rel=1e-14)


def test_plan_coverage_error(tmp_path, capsys):
    f = tmp_path / "short.csv"
    f.write_text("x,fx\n5,0\n6,0\n")
    code, _, err = run(["plan", "--n", 2, "--A", math.pi, "--f", f], capsys)
    assert code == 3 and "9.67" in err and "4.83" in err
