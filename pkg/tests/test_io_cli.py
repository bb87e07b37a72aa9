import json
import subprocess
import sys

import numpy as np
import pytest

from bcregions import cli
from bcregions.errors import InvariantError, ModelError
from bcregions.io import parse_model, read_region, region_to_csv, region_to_json, write_region
from bcregions.regions import blackwell_state_region, finite_field_region


def _model(tmp_path, obj, name="model.json"):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def test_parse_deterministic_and_probabilities():
    m = parse_model({"deterministic": {"f1": [0, 1, 1], "f2": [0, 1, 0]}, "p1": 0.7, "p2": 0.3})
    assert m.kind == "deterministic" and m.det.input_size == 3
    assert parse_model({"p1": 0.4, "p2": [0.6, 0.4]}).p2 == 0.6


def test_parse_gaussian_and_general():
    g = parse_model({"t": 1, "G": [[1]], "N1": [[1]], "N2": [[2]], "P": 10, "p1": 0.8, "p2": 0.3})
    assert g.gaussian.t == 1
    m = parse_model({"components": [[[0.9, 0.1], [0.1, 0.9]], [[0.7, 0.3], [0.3, 0.7]]],
                     "input_size": 2, "p1": [0.5, 0.5], "p2": [0.2, 0.8]})
    assert m.bc.k == 2


@pytest.mark.parametrize("bad", [
    {"p1": 1.5, "p2": 0.3},
    {"deterministic": {"f1": [0, 1]}, "p1": 0.5, "p2": 0.5},
    {"t": 2, "G": [[1]], "N1": [[1]], "N2": [[2]], "P": 10, "p1": 0.8, "p2": 0.3},
    {"components": [[[0.9, 0.2], [0.1, 0.9]]], "p1": [1], "p2": [1]},
    {"unknown": 1},
    [1, 2],
])
def test_parse_rejects_bad_models(bad):
    with pytest.raises(ModelError):
        parse_model(bad)


def test_csv_round_trip_keeps_supports_and_validates(tmp_path):
    reg = blackwell_state_region(0.7, 0.3, directions=[(1.0, 0.5), (1.0, 1.0), (1.0, 2.0)])
    path = tmp_path / "r.csv"
    write_region(reg, path)
    back = read_region(path)
    assert [s.value for s in back.supports] == pytest.approx([s.value for s in reg.supports], abs=1e-11)
    for lam in (0.5, 1.0, 2.0):
        assert back.support((1, lam)) == pytest.approx(reg.support((1, lam)), abs=1e-11)


def test_json_round_trip(tmp_path):
    reg = finite_field_region(2, 0.7, 0.4, directions=[(1.0, 1.0)])
    path = tmp_path / "r.json"
    path.write_text(region_to_json(reg))
    back = read_region(path)
    assert np.allclose(np.sort(back.vertices, axis=0), np.sort(reg.vertices, axis=0))
    assert region_to_csv(reg).splitlines()[0].startswith("lambda1,lambda2")


def test_read_region_rejects_inconsistent_file(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("lambda1,lambda2,support_bits,r1,r2\n1,1,0.5,0.9,0.9\n")
    with pytest.raises(InvariantError):
        read_region(path)


# -- command line -------------------------------------------------------------

BLACKWELL = {"deterministic": {"f1": [0, 1, 1], "f2": [0, 1, 0]}, "p1": 0.7, "p2": 0.3}


def test_order_check_reports_json(tmp_path, capsys):
    m = _model(tmp_path, {"components": [[[0.9, 0.1], [0.1, 0.9]], [[0.7, 0.3], [0.3, 0.7]]],
                          "p1": [1, 0], "p2": [0, 1]})
    assert cli.main(["order", "check", "--model", m]) == 0
    rep = json.loads(capsys.readouterr().out)
    for side in ("components", "lifted"):
        assert rep[side]["degraded"] and rep[side]["less_noisy"] and rep[side]["more_capable"]
    assert not rep["receivers_swapped"]


def test_region_output_is_deterministic(tmp_path):
    m = _model(tmp_path, BLACKWELL)
    outs = []
    for i in range(2):
        out = tmp_path / f"o{i}.csv"
        assert cli.main(["region", "--kind", "tdcs", "--model", m, "--sweep", "6:0.25:4",
                         "--seed", "3", "--out", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    read_region(tmp_path / "o0.csv")


def test_bec_triangle_from_cli(tmp_path):
    m = _model(tmp_path, {"bec": {"eps": [0.2, 0.6]}, "p1": [0.8, 0.2], "p2": [0.3, 0.7]})
    out = tmp_path / "bec.csv"
    assert cli.main(["region", "--kind", "bec", "--model", m, "--sweep", "5:0.5:2",
                     "--out", str(out)]) == 0
    reg = read_region(out)
    assert reg.support((0.52, 0.72)) == pytest.approx(0.72 * 0.52, abs=1e-9)


def test_exit_code_for_schema_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["region", "--kind", "tdcs", "--model", str(bad)]) == 2
    m = _model(tmp_path, {"p1": 0.5, "p2": 0.5})
    assert cli.main(["region", "--kind", "tdcs", "--model", m]) == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["region", "--kind", "nope", "--model", m])
    assert exc.value.code == 2


def test_exit_code_for_unsupported_size(tmp_path):
    m = _model(tmp_path, {"deterministic": {"f1": [0, 1, 0, 1, 0], "f2": [0, 0, 1, 1, 0]},
                          "p1": 0.5, "p2": 0.5})
    assert cli.main(["region", "--kind", "tdcs", "--model", m]) == 3


def test_exit_code_for_invariant_breach(tmp_path, monkeypatch):
    def broken(*a, **k):
        raise InvariantError("negative support")

    monkeypatch.setattr(cli, "compute_region", broken)
    m = _model(tmp_path, BLACKWELL)
    assert cli.main(["region", "--kind", "tdcs", "--model", m]) == 4


def test_repro_fig5_writes_vertices_and_manifest(tmp_path):
    assert cli.main(["repro", "fig5", "--p1", "0.7", "--p2", "0.4", "--out-dir", str(tmp_path)]) == 0
    rows = (tmp_path / "fig5_0.7_0.4.csv").read_text().splitlines()[1:]
    pts = {tuple(float(x) for x in r.split(",")) for r in rows}
    assert pts == {(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (0.7, 0.6)}
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["fig5"]["files"] == ["fig5_0.7_0.4.csv"]


def test_repro_rejects_stray_probabilities(tmp_path):
    assert cli.main(["repro", "fig4", "--p1", "0.3", "--out-dir", str(tmp_path)]) == 2


def test_module_entry_point_runs():
    out = subprocess.run([sys.executable, "-m", "bcregions", "--help"], capture_output=True, text=True)
    assert out.returncode == 0 and "repro" in out.stdout


def test_thread_cap_sets_blas_variables(monkeypatch):
    monkeypatch.setenv("BCREGIONS_THREADS", "1")
    for k in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        monkeypatch.delenv(k, raising=False)
    cli._apply_thread_cap()
    import os

    assert os.environ["OMP_NUM_THREADS"] == "1"
