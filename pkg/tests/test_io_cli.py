import json
import subprocess
import sys

import numpy as np
import pytest

from flagmetric import io
from flagmetric.cli import EXIT_DEGENERATE, EXIT_OK, EXIT_VALIDATION, main
from flagmetric.errors import BadDimensions
from flagmetric.shapes import bumpy_sphere, ellipsoid, sphere


@pytest.mark.parametrize("layout", ["inline", "binary"])
def test_round_trip_is_exact(tmp_path, layout):
    f = bumpy_sphere(1.0, 0.05, 4, 64, 33)
    p = io.write_flag(f, tmp_path / "bumpy.json", layout=layout)
    back = io.read_flag(p)
    assert np.array_equal(back.grid, f.grid)
    assert back.equator_row == f.equator_row


def test_binary_sidecar_is_little_endian_row_major(tmp_path):
    f = sphere(1.0, 16, 9)
    io.write_flag(f, tmp_path / "s.json", layout="binary")
    raw = np.fromfile(tmp_path / "s.bin", dtype="<f8")
    assert np.array_equal(raw[:3], f.grid[0, 0])
    assert np.array_equal(raw[3:6], f.grid[0, 1])


def test_manifest_checks(tmp_path):
    f = sphere(1.0, 16, 9)
    p = io.write_flag(f, tmp_path / "s.json")
    m = json.loads(p.read_text())
    m["N_v"] = 10
    p.write_text(json.dumps(m))
    with pytest.raises(BadDimensions):
        io.read_flag(p)
    m["N_v"], m["version"] = 9, 2
    p.write_text(json.dumps(m))
    with pytest.raises(BadDimensions):
        io.read_flag(p)


def test_dumps_uses_17_digits():
    text = io.dumps({"x": 0.1, "y": [1.0, 2.5], "n": 3, "ok": True, "none": None})
    assert json.loads(text) == {"x": 0.1, "y": [1.0, 2.5], "n": 3, "ok": True, "none": None}
    assert "0.10000000000000001" in text


def test_obj_export(tmp_path):
    f = sphere(1.0, 16, 9)
    mesh, curve = io.export_obj(f, tmp_path / "s.obj")
    lines = mesh.read_text().splitlines()
    assert sum(l.startswith("v ") for l in lines) == 16 * 9
    assert sum(l.startswith("f ") for l in lines) == 16 * 8
    cl = curve.read_text().splitlines()
    assert cl[-1].startswith("l 1 2") and cl[-1].endswith(" 1")


def _run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_cli_synth_and_invariants(tmp_path, capsys):
    p = tmp_path / "e.json"
    code, rep = _run(["synth", "ellipsoid", "--params", "1,1,2", "--grid", "64x33", "--out", str(p)], capsys)
    assert code == EXIT_OK and rep["equator_row"] == 16
    code, rep = _run(["invariants", str(p)], capsys)
    assert code == EXIT_OK
    np.testing.assert_allclose(rep["curve"]["kappa_n"], -1.0, atol=1e-6)
    assert rep["k1"]["min"] < rep["k1"]["max"]
    assert rep["curve_length"] == pytest.approx(2 * np.pi, rel=1e-8)


def test_cli_metric_closed_form(tmp_path, capsys):
    p = tmp_path / "s.json"
    main(["synth", "sphere", "--grid", "128x65", "--out", str(p)])
    capsys.readouterr()
    code, rep = _run(["metric", str(p), "--h1", "const:2", "--h2", "const:1"], capsys)
    assert code == EXIT_OK
    assert rep["metric"] == pytest.approx(18 * np.pi, rel=0.02)
    code, rep = _run(["metric", str(p), "--h2", "const:1", "--elastic", "1,1,0,0.25,0"], capsys)
    assert rep["weights"] == [1, 1, 1, 0, 1, 0]


def test_cli_metric_field_from_file(tmp_path, capsys):
    p = tmp_path / "s.json"
    main(["synth", "sphere", "--grid", "32x17", "--out", str(p)])
    capsys.readouterr()
    np.save(tmp_path / "h2.npy", np.ones((32, 17)))
    code, from_file = _run(["metric", str(p), "--h2", str(tmp_path / "h2.npy")], capsys)
    code, named = _run(["metric", str(p), "--h2", "const:1"], capsys)
    assert from_file["metric"] == named["metric"]


def test_cli_validate_exit_codes(tmp_path, capsys):
    p = tmp_path / "s.json"
    main(["synth", "sphere", "--grid", "64x33", "--out", str(p)])
    capsys.readouterr()
    code, rep = _run(["validate", str(p)], capsys)
    assert code == EXIT_OK and rep["passed"]
    code, rep = _run(["validate", str(p), "--tol", "curve_variation=1e-12"], capsys)
    assert code == EXIT_VALIDATION and not rep["passed"]


def test_cli_degenerate_input(tmp_path, capsys):
    p = tmp_path / "flat.json"
    grid = sphere(1.0, 16, 9).grid.copy()
    grid[..., 2] = 0
    p.write_text(io.dumps({"version": 1, "N_u": 16, "N_v": 9, "equator_row": 4,
                           "data_layout": "inline", "data": grid.reshape(-1, 3)}))
    assert main(["invariants", str(p)]) == EXIT_DEGENERATE
    assert main(["synth", "torus", "--out", str(tmp_path / "t.json")]) == EXIT_DEGENERATE


def test_cli_distance_with_config(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    io.write_flag(sphere(1.0, 32, 17), a)
    io.write_flag(ellipsoid(1.0, 1.0, 1.3, 32, 17), b)
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"K": 3, "max_iters": 2, "weights": [1, 1, 1, 1, 1, 1]}))
    code, rep = _run(["distance", str(a), str(b), "--config", str(cfg), "--frames", str(tmp_path / "fr")], capsys)
    assert code == EXIT_OK
    assert rep["K"] == 3 and rep["distance"] > 0
    assert np.all(np.diff(rep["energy_history"]) <= 0)
    assert len(list((tmp_path / "fr").glob("frame_*_curve.obj"))) == 4


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "flagmetric", "--help"], capture_output=True, text=True)
    assert out.returncode == 0
    assert "distance" in out.stdout
