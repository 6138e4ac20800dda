import json
import subprocess
import sys

import numpy as np
import pytest

from seasonlv import bundled_scenario, iterate
from seasonlv.attractor import read_rows
from seasonlv.cli import main
from seasonlv.fixedpoints import axial_coordinate


def run(tmp_path, *args):
    return main([*args, "--out", str(tmp_path / "out")])


def report(tmp_path, scen, cmd, name="report.json"):
    return json.loads((tmp_path / "out" / scen / cmd / name).read_text())


@pytest.mark.parametrize("name,cid", [("class26", 26), ("class27", 27), ("class29", 29),
                                      ("class31", 31)])
def test_classify_bundled(tmp_path, capsys, name, cid):
    assert run(tmp_path, "classify", "--scenario", name, "--oracle") == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["class_id"] == cid and doc["oracle_agrees"] is True
    assert report(tmp_path, name, "classify") == doc
    if cid == 27:
        assert abs(doc["theta"]["theta"]) <= 1e-12


def test_classify_file(tmp_path, capsys):
    path = tmp_path / "mine.json"
    path.write_text(json.dumps(bundled_scenario("class31").params.to_dict()))
    assert run(tmp_path, "classify", "--scenario", str(path)) == 0
    assert report(tmp_path, "mine", "classify")["class_id"] == 31


def test_malformed_file(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert run(tmp_path, "classify", "--scenario", str(path)) == 1
    assert "error" in capsys.readouterr().err
    path.write_text(json.dumps({"omega": 1}))
    assert run(tmp_path, "classify", "--scenario", str(path)) == 1


def test_missing_scenario(tmp_path, capsys):
    assert run(tmp_path, "classify") == 1
    assert run(tmp_path, "classify", "--scenario", "nowhere") == 1


def test_degenerate_exit(tmp_path, capsys):
    p = bundled_scenario("class27").params
    path = tmp_path / "deg.json"
    path.write_text(json.dumps(p.with_entry("a", (1, 0), p.a[0, 0]).to_dict()))
    assert run(tmp_path, "classify", "--scenario", str(path)) == 2
    assert report(tmp_path, "deg", "classify")["class_id"] is None


def test_inadmissible_exit(tmp_path, capsys):
    path = tmp_path / "dead.json"
    path.write_text(json.dumps(bundled_scenario("class27").params.with_entry("b", 0, 0.2).to_dict()))
    assert run(tmp_path, "fixed-points", "--scenario", str(path)) == 2
    assert run(tmp_path, "classify", "--scenario", str(path)) == 2


def test_force(tmp_path, capsys):
    assert run(tmp_path, "classify", "--scenario", "class26") == 0
    assert run(tmp_path, "classify", "--scenario", "class26") == 1
    assert run(tmp_path, "classify", "--scenario", "class26", "--force") == 0


def test_fixed_points_class29(tmp_path, capsys):
    assert run(tmp_path, "fixed-points", "--scenario", "class29") == 0
    doc = report(tmp_path, "class29", "fixed-points")
    assert doc["index_formula"]["holds"] is True
    fps = json.loads((tmp_path / "out/class29/fixed-points/fixed_points.json").read_text())
    assert len(fps) >= 4


def test_fixed_points_neutral_center(tmp_path, capsys):
    # the class-27 example's interior point is a center: index undefined
    assert run(tmp_path, "fixed-points", "--scenario", "class27") == 2
    doc = report(tmp_path, "class27", "fixed-points")
    assert [q["stability"] for q in doc["axial"]] == ["saddle"] * 3
    assert all(v is None for v in doc["planar"])
    assert len(doc["positive"]) >= 1
    assert run(tmp_path, "verify-index", "--scenario", "class27") == 2


def test_verify_index(tmp_path, capsys):
    assert run(tmp_path, "verify-index", "--scenario", "class31") == 0
    assert report(tmp_path, "class31", "verify-index")["lhs"] == 1


def test_orbit_class29(tmp_path, capsys):
    assert run(tmp_path, "orbit", "--scenario", "class29", "--x0", "1,7,1") == 0
    doc = report(tmp_path, "class29", "orbit")
    assert doc["verdict"] == "closed_curve"
    head, data = read_rows(tmp_path / "out/class29/orbit/orbit.csv")
    assert head == ["k", "x1", "x2", "x3"] and len(data) == doc["n"]
    assert data[0, 0] == doc["transient"] + 1


def test_orbit_bad_x0(tmp_path, capsys):
    assert run(tmp_path, "orbit", "--scenario", "class29", "--x0", "1,2") == 1
    assert run(tmp_path, "orbit", "--scenario", "class29", "--x0", "1,-2,1", "--force") == 1


def test_simplex(tmp_path, capsys):
    assert run(tmp_path, "simplex", "--scenario", "class31", "--resolution", "6") == 0
    doc = report(tmp_path, "class31", "simplex")
    assert doc["ordered_pairs"] == 0 and doc["points"] == 28
    head, data = read_rows(tmp_path / "out/class31/simplex/simplex.csv")
    assert head == ["seed_b1", "seed_b2", "seed_b3", "x1", "x2", "x3"]
    p = bundled_scenario("class31").params
    for i in range(3):
        row = data[data[:, i] == 1.0][0]
        assert row[3 + i] == pytest.approx(axial_coordinate(p, i), rel=1e-8)


def test_sweep_reproducible(tmp_path, capsys):
    assert run(tmp_path, "sweep", "--n", "12", "--seed", "5") == 0
    a = report(tmp_path, "default-box", "sweep", "summary.json")
    assert a["samples"] == 12 and a["index_formula"]["pass_rate"] == 1.0
    first = (tmp_path / "out/default-box/sweep/sweep.csv").read_text()
    assert run(tmp_path, "sweep", "--n", "12", "--seed", "5", "--jobs", "2", "--force") == 0
    assert (tmp_path / "out/default-box/sweep/sweep.csv").read_text() == first


def test_tolerance_flags(tmp_path, capsys):
    assert run(tmp_path, "orbit", "--scenario", "class26", "--n", "2000", "--transient", "10",
               "--rel-tol", "1e-8", "--abs-tol", "1e-8") == 0
    assert report(tmp_path, "class26", "orbit")["verdict"] == "closed_curve"


def test_round_trip_17_digits(tmp_path, capsys):
    assert run(tmp_path, "orbit", "--scenario", "class31", "--n", "2000") == 0
    _, data = read_rows(tmp_path / "out/class31/orbit/orbit.csv")
    s = bundled_scenario("class31")
    np.testing.assert_array_equal(data[:, 1:], iterate(s.params, s.x0, 2000, 2000).points)


def test_console_entry(tmp_path):
    out = subprocess.run([sys.executable, "-m", "seasonlv.cli", "classify", "--scenario",
                          "class31", "--out", str(tmp_path)], capture_output=True, text=True)
    assert out.returncode == 0
    assert json.loads(out.stdout)["class_id"] == 31
