import json

import numpy as np
import pytest

from conemono.cli import dumps, main
from conemono.construct import random_cloud, save_cloud
from conemono.field import load_field
from conemono.geometry import parse_cone


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def verdicts(report):
    return {v["definition"]: v["holds"] for v in report["verdicts"]}


class TestClassify:
    def test_paraboloid_cone_vs_vg(self, capsys):
        code, out, _ = run(["classify", "--gallery", "paraboloid", "--checks", "cone,vg"], capsys)
        assert code == 2
        rep = json.loads(out)
        assert verdicts(rep) == {"cone": True, "vg": False}
        assert rep["field"] == "gallery:paraboloid"
        assert rep["params"]["eps"] > 0 and rep["params"]["q"] == 64

    def test_all_hold_exit_zero(self, capsys):
        code, out, err = run(["classify", "--gallery", "plane", "--nx", 33, "--checks", "lebesgue,k",
                              "--cone", "0:90"], capsys)
        assert code == 0
        assert verdicts(json.loads(out)) == {"lebesgue": True, "k": True}
        assert "lebesgue: holds" in err

    def test_emits_sibling_files(self, tmp_path, capsys):
        out = tmp_path / "rep.json"
        code, _, _ = run(["classify", "--gallery", "cubic", "--nx", 17, "--checks", "lebesgue",
                          "--out", out, "--emit", "json,csv,pgm"], capsys)
        assert code == 0
        assert json.loads(out.read_text())["verdicts"][0]["holds"] is True
        assert out.with_suffix(".csv").read_text().splitlines() == ["definition,holds", "lebesgue,true"]
        assert out.with_suffix(".pgm").read_bytes().startswith(b"P5\n17 17\n255\n")

    def test_with_report(self, capsys):
        _, out, _ = run(["classify", "--gallery", "plane", "--nx", 9, "--checks", "cone",
                         "--with-report"], capsys)
        assert "report" in json.loads(out)["verdicts"][0]

    def test_cone_file(self, tmp_path, capsys):
        p = tmp_path / "k.json"
        p.write_text(json.dumps(parse_cone("0:90").to_dict()))
        code, out, _ = run(["classify", "--gallery", "tipped_sine", "--nx", 33, "--checks", "k",
                            "--cone-file", p], capsys)
        assert code == 0 and json.loads(out)["params"]["cone"]["kind"] == "sector"

    def test_params_echo(self, capsys):
        _, out, _ = run(["classify", "--gallery", "plane", "--nx", 9, "--checks", "weak", "--eps", "0.01",
                         "--q", 16, "--subdomains", 20, "--seed", 3, "--tau", "0.1",
                         "--radii", "0.2,0.4"], capsys)
        p = json.loads(out)["params"]
        assert (p["eps"], p["q"], p["subdomains"], p["seed"], p["tau"], p["radii"]) == (0.01, 16, 20, 3, 0.1,
                                                                                      [0.2, 0.4])

    def test_deterministic_bytes(self, tmp_path, capsys):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for p in (a, b):
            run(["classify", "--gallery", "hook", "--nx", 33, "--checks", "mostow,weak,normal", "--out", p], capsys)
        assert a.read_bytes() == b.read_bytes()

    def test_round_trip_matches_gallery(self, tmp_path, capsys):
        f = tmp_path / "f.json"
        assert run(["gallery", "u_affine", "--nx", 33, "--out", f], capsys)[0] == 0
        checks = "lebesgue,mostow,vg,weak"
        _, from_file, _ = run(["classify", "--field", f, "--checks", checks, "--relatively-compact", "false"],
                              capsys)
        _, direct, _ = run(["classify", "--gallery", "u_affine", "--nx", 33, "--checks", checks,
                            "--relatively-compact", "false"], capsys)
        a, b = json.loads(from_file), json.loads(direct)
        assert a["verdicts"] == b["verdicts"] and a["params"] == b["params"]


class TestErrors:
    @pytest.mark.parametrize("argv", [
        ["classify", "--field", "/nonexistent/f.json"],
        ["classify", "--gallery", "nope"],
        ["classify", "--gallery", "plane", "--nx", 9, "--checks", "bogus"],
        ["classify", "--gallery", "plane", "--nx", 9, "--checks", "k", "--cone", "0:270"],
        ["classify", "--gallery", "plane", "--nx", 9, "--emit", "csv"],
        ["synth", "--points", "/nonexistent.json", "--out", "/tmp/x.json"],
        ["tv", "--gallery", "plane", "--nx", 9, "--cone", "0:0"],
    ])
    def test_exit_one(self, argv, capsys):
        code, _, err = run(argv, capsys)
        assert code == 1 and err.startswith("error:")

    def test_malformed_field(self, tmp_path, capsys):
        p = tmp_path / "f.json"
        p.write_text('{"nx": 2}')
        assert run(["classify", "--field", p], capsys)[0] == 1


class TestGalleryAndSynth:
    def test_list(self, capsys):
        code, out, _ = run(["gallery", "--list"], capsys)
        assert code == 0 and "annulus_spiral" in out.split()

    def test_param_override(self, tmp_path, capsys):
        p = tmp_path / "f.json"
        run(["gallery", "plane", "--nx", 5, "--param", "a=0", "--param", "b=2", "--out", p], capsys)
        f = load_field(p)
        _, Y = f.domain.coords()
        assert np.allclose(f.values, 2 * Y)

    def test_synth_then_classify(self, tmp_path, capsys):
        pts, f = tmp_path / "pts.json", tmp_path / "f.json"
        save_cloud(random_cloud(50, parse_cone("0:90"), seed=1), pts)
        assert run(["synth", "--points", pts, "--grid", 65, "--out", f], capsys)[0] == 0
        code, out, _ = run(["classify", "--field", f, "--checks", "k", "--cone", "0:90", "--eps", "0"], capsys)
        assert code == 0 and verdicts(json.loads(out)) == {"k": True}


class TestTvAndVenn:
    def test_tv(self, capsys):
        code, out, err = run(["tv", "--gallery", "tipped_sine", "--nx", 33, "--q", 64, "--cone", "0:90"],
                             capsys)
        rep = json.loads(out)
        assert code == 0 and rep["within_bound"] is True and rep["L"] == pytest.approx(2.0)
        assert "tv_gradient=" in err

    def test_venn_subset(self, tmp_path, capsys):
        table = {"rows": [{"field": "plane", "k_cone": "0:90", "expect": {"lebesgue": True, "vg": True}},
                          {"field": "paraboloid", "expect": {"vg": True}}]}
        p = tmp_path / "expected.json"
        p.write_text(json.dumps(table))
        code, out, err = run(["venn", "--nx", 17, "--expected", p], capsys)
        rep = json.loads(out)
        assert code == 2 and rep["mismatch_count"] == 1
        assert rep["rows"][1]["mismatches"] == ["vg"]
        assert "vg" in err and "!" in err

    def test_bad_expected_table(self, tmp_path, capsys):
        p = tmp_path / "expected.json"
        p.write_text(json.dumps({"rows": [{"field": "plane", "expect": {"nonsense": True}}]}))
        assert run(["venn", "--nx", 9, "--expected", p], capsys)[0] == 1


def test_dumps_is_canonical():
    assert dumps({"b": 1, "a": [1.5]}) == '{\n  "a": [\n    1.5\n  ],\n  "b": 1\n}\n'
