import json
import math
import os

import numpy as np
import pytest

from hermlab.cli import (
    EXIT_CHECK_FAILED,
    EXIT_CONFIG,
    EXIT_OK,
    EXIT_UNSUPPORTED,
    dumps_canonical,
    main,
    metric_file_loader,
    parse_points,
)
from hermlab.errors import ConfigError


def run(args):
    return main(args)


def test_list_geometries(capsys):
    assert run(["list-geometries"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "fubini-study" in out and "iwasawa" in out


def test_report_fs_origin(tmp_path):
    out = tmp_path / "rep.json"
    code = run(["report", "--geometry", "fubini-study:1", "--points", "origin",
                "--grid", "40", "--out", str(out)])
    assert code == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["schema_version"] == 1
    ric4 = np.array(doc["curvature"]["points"][0]["ric_sb4"])
    assert ric4.shape == (1, 1)
    assert ric4[0, 0] == pytest.approx(2.0, abs=1e-9)
    assert doc["geometry"]["balanced_residual"] < 1e-6
    assert doc["curvature"]["extrema"]["min_hol_ricci"] == pytest.approx(2.0, abs=1e-6)


def test_report_torus_zero_block(tmp_path):
    out = tmp_path / "rep.json"
    assert run(["report", "--geometry", "flat-torus:1", "--grid", "30",
                "--out", str(out)]) == EXIT_OK
    doc = json.loads(out.read_text())
    blk = doc["curvature"]["points"][0]
    for key in ("ric_sb1", "ric_sb2", "ric_sb3", "ric_sb4", "theta_ric1", "t_circ_tbar"):
        assert np.max(np.abs(np.array(blk[key]))) == 0.0
    assert blk["chern_torsion_max"] == 0.0


def test_report_nonbalanced_warning(tmp_path):
    out = tmp_path / "rep.json"
    assert run(["report", "--geometry", "nonbalanced", "--grid", "30",
                "--out", str(out)]) == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["geometry"]["balanced_residual"] > 0.1
    assert "warning" in doc["geometry"]


def test_report_csv_with_figures(tmp_path):
    out = tmp_path / "profile.csv"
    assert run(["report", "--geometry", "fubini-study:1", "--grid", "50",
                "--format", "csv", "--out", str(out)]) == EXIT_OK
    lines = out.read_text().strip().splitlines()
    header = lines[0].split(",")
    for col in ("grad_norm_sq", "q_composite", "p_ratio", "bochner_residual",
                "re_z1", "im_z1"):
        assert col in header
    assert len(lines) > 20
    assert (tmp_path / "profile.png").exists()


def test_report_csv_unsupported_for_iwasawa(tmp_path):
    code = run(["report", "--geometry", "iwasawa", "--format", "csv",
                "--out", str(tmp_path / "x.csv")])
    assert code == EXIT_UNSUPPORTED


def test_check_identities_torus_exit0(tmp_path):
    out = tmp_path / "checks.json"
    code = run(["check", "identities", "--geometry", "flat-torus:1",
                "--grid", "25", "--out", str(out)])
    assert code == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["checks"] and all(c["passed"] for c in doc["checks"])
    assert all(c["value"] <= max(c["tolerance"], 1e-8) or c["kind"] != "identity-residual"
               for c in doc["checks"])


def test_check_bounds_fs_equality(tmp_path):
    out = tmp_path / "bounds.json"
    code = run(["check", "bounds", "--geometry", "fubini-study:1",
                "--grid", "25", "--subdivisions", "4", "--out", str(out)])
    assert code == EXIT_OK
    doc = json.loads(out.read_text())
    lich = [c for c in doc["checks"] if c["name"] == "lichnerowicz-bound"
            and c["details"].get("lambda1_source") == "exact"]
    assert lich and lich[0]["details"]["equality"] == 1.0


def test_check_bounds_iwasawa_not_applicable(tmp_path):
    out = tmp_path / "iw.json"
    code = run(["check", "bounds", "--geometry", "iwasawa", "--grid", "20",
                "--out", str(out)])
    assert code == EXIT_OK
    doc = json.loads(out.read_text())
    assert all(c["details"].get("applicable") == 0.0 for c in doc["checks"])


def test_check_failure_exit1(tmp_path):
    # an impossible global tolerance forces identity failures
    code = run(["check", "identities", "--geometry", "flat-torus:1", "--grid", "20",
                "--tol", "1e-30", "--out", str(tmp_path / "f.json")])
    assert code == EXIT_CHECK_FAILED


def test_check_determinism(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    args = ["check", "bounds", "--geometry", "flat-torus:1", "--grid", "30",
            "--seed", "3"]
    assert run(args + ["--out", str(a)]) == EXIT_OK
    assert run(args + ["--out", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_spectrum_torus(tmp_path):
    out = tmp_path / "spec.json"
    assert run(["spectrum", "--geometry", "flat-torus:1", "--out", str(out)]) == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["spectrum"]["lambda1"] == 1.0
    assert doc["spectrum"]["method"] == "fourier-exact"
    assert doc["spectrum"]["diameter"] == pytest.approx(math.pi * math.sqrt(2.0))


def test_spectrum_fs_mesh_and_csv(tmp_path):
    out = tmp_path / "spec.json"
    assert run(["spectrum", "--geometry", "fubini-study:1", "--subdivisions", "4",
                "--out", str(out)]) == EXIT_OK
    doc = json.loads(out.read_text())
    assert 3.92 <= doc["spectrum"]["lambda1"] <= 4.08
    assert doc["spectrum"]["diameter"] == pytest.approx(math.pi / math.sqrt(2.0), abs=1e-15)
    csv_out = tmp_path / "mesh.csv"
    assert run(["spectrum", "--geometry", "fubini-study:1", "--subdivisions", "3",
                "--format", "csv", "--out", str(csv_out)]) == EXIT_OK
    lines = csv_out.read_text().splitlines()
    assert lines[0] == "kind,i0,i1,i2,value"
    assert sum(1 for ln in lines if ln.startswith("vertex")) == 10 * 4 ** 3 + 2
    assert sum(1 for ln in lines if ln.startswith("face")) == 20 * 4 ** 3
    assert (tmp_path / "mesh.png").exists()


def test_spectrum_unsupported_exit4():
    assert run(["spectrum", "--geometry", "iwasawa"]) == EXIT_UNSUPPORTED
    assert run(["spectrum", "--geometry", "fubini-study:2"]) == EXIT_UNSUPPORTED


def test_bad_geometry_exit2():
    assert run(["report", "--geometry", "moebius"]) == EXIT_CONFIG
    assert run(["check", "all"]) == EXIT_CONFIG  # no geometry given


def test_parse_points():
    pts = parse_points("0.5,-0.25", 1)
    assert pts[0][0] == pytest.approx(0.5 - 0.25j)
    pts = parse_points("1,0,0,1;0,0,0,0", 2)
    assert pts[0][0] == 1.0 and pts[0][1] == 1j
    # 'origin' mixes with explicit points
    pts = parse_points("origin;1,0", 1)
    assert pts[0][0] == 0.0 and pts[1][0] == 1.0
    with pytest.raises(ConfigError):
        parse_points("1,2,3", 1)
    with pytest.raises(ConfigError):
        parse_points("garbage", 1)
    with pytest.raises(ConfigError):
        parse_points(";", 1)


def test_canonical_json_formatting():
    s = dumps_canonical({"b": 1.0, "a": 1.0 / 3.0, "nested": [1, 2.5, True, None]})
    assert s == '{"a":0.33333333333333331,"b":1,"nested":[1,2.5,true,null]}\n'


# -- metric files ------------------------------------------------------------------------


@pytest.fixture(scope="module")
def fs_metric_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("metrics") / "fs.txt"
    xs = np.linspace(-2.0, 2.0, 64)
    rows = []
    for x in xs:
        for y in xs:
            h = 1.0 / (1.0 + x * x + y * y) ** 2
            rows.append(f"{h:.17g} 0.0")
    path.write_text("herm-metric v1; n=1; domain=-2,2;-2,2; grid=64,64;\n"
                    + "\n".join(rows) + "\n")
    return str(path)


def test_metric_file_fs_curvature(fs_metric_file):
    from hermlab.curvature import first_chern_ricci

    m = metric_file_loader(fs_metric_file)
    val = first_chern_ricci(m, np.array([0j]))[0, 0]
    assert val == pytest.approx(2.0, abs=1e-3)


def test_metric_file_constant_torus(tmp_path):
    path = tmp_path / "torus.txt"
    path.write_text("herm-metric v1; n=1; domain=0,6.3;0,6.3; grid=8,8;\n"
                    + "\n".join(["0.5 0.0"] * 64) + "\n")
    from hermlab.curvature import chern_curvature

    m = metric_file_loader(str(path))
    assert np.max(np.abs(chern_curvature(m, np.array([2.0 + 2.0j])))) < 1e-6


def test_metric_file_header_mismatch_exit2(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("herm-metric v1; n=2; domain=-1,1;-1,1; grid=4,4;\n"
                    + "\n".join(["0.5 0.0"] * 16) + "\n")
    assert run(["report", "--metric-file", str(path)]) == EXIT_CONFIG


def test_metric_file_non_pd_exit3(tmp_path):
    path = tmp_path / "npd.txt"
    path.write_text("herm-metric v1; n=1; domain=-1,1;-1,1; grid=4,4;\n"
                    + "\n".join(["-0.5 0.0"] * 16) + "\n")
    assert run(["report", "--metric-file", str(path)]) == 3


def test_metric_file_report_runs(fs_metric_file, tmp_path):
    out = tmp_path / "file_rep.json"
    code = run(["report", "--metric-file", fs_metric_file, "--points", "origin",
                "--grid", "20", "--out", str(out)])
    assert code == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["curvature"]["points"][0]["ric_sb4"][0][0] == pytest.approx(2.0, abs=5e-3)
