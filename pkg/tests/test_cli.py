import json
import subprocess
import sys

import pytest

from slfusion.cli import cmd_convert, cmd_fuse, cmd_table, cmd_validate, main
from slfusion.files import load_evidence, load_opinions
from slfusion.table import EXPECTED


def _fused(text):
    doc = json.loads(text)
    (record,) = doc["opinions"]
    belief = {tuple(e["set"]): e["mass"] for e in record["belief"]}
    return belief, record["uncertainty"], doc


class TestFuse:
    def test_wbf_table(self, fixture_path, capsys):
        assert main(["fuse", "--op", "wbf", "--input", fixture_path("table1.json")]) == 0
        belief, u, doc = _fused(capsys.readouterr().out)
        assert round(belief[("x",)], 3) == 0.562
        assert round(belief[("not_x",)], 3) == 0.146
        assert round(u, 3) == 0.292
        assert doc["opinions"][0]["actor"] == "fused:wbf"
        assert doc["projected"]["x"] == pytest.approx(0.708, abs=1e-3)

    @pytest.mark.parametrize("op", ["cbf", "abf", "wbf", "bcf", "ccf"])
    def test_single_echo(self, op, fixture_path, capsys):
        assert cmd_fuse(fixture_path("single.json"), op) == 0
        belief, u, doc = _fused(capsys.readouterr().out)
        assert belief[("red", "green")] == pytest.approx(0.4, abs=1e-12)
        assert belief[("blue",)] == pytest.approx(0.25, abs=1e-12)
        assert u == pytest.approx(0.35, abs=1e-12)
        assert doc["opinions"][0]["base_rate"] == pytest.approx({"red": 0.2, "green": 0.3, "blue": 0.5})

    def test_total_conflict(self, fixture_path, capsys):
        assert main(["fuse", "--op", "bcf", "--input", fixture_path("conflict.json")]) == 2
        assert "TotalConflict" in capsys.readouterr().err

    def test_ecbf_hyper_is_fusion_error(self, fixture_path, capsys):
        assert cmd_fuse(fixture_path("single.json"), "ecbf") == 2
        assert "HyperInputUnsupported" in capsys.readouterr().err

    def test_bad_file(self, fixture_path, capsys):
        assert cmd_fuse(fixture_path("bad_additivity.json"), "cbf") == 1
        assert "overfull" in capsys.readouterr().err

    def test_empty(self, fixture_path, capsys):
        assert cmd_fuse(fixture_path("empty.json"), "cbf") == 1
        assert "EmptyInput" in capsys.readouterr().err

    def test_missing_file(self, tmp_path, capsys):
        assert cmd_fuse(str(tmp_path / "nope.json"), "cbf") == 1
        assert "cannot read" in capsys.readouterr().err

    def test_weights(self, fixture_path, capsys):
        path = fixture_path("dogmatic_mix.json")
        assert cmd_fuse(path, "cbf") == 0
        belief, u, _ = _fused(capsys.readouterr().out)
        assert (belief[("x",)], belief[("not_x",)], u) == pytest.approx((0.75, 0.25, 0.0))
        assert cmd_fuse(path, "cbf", weights="D1=1,D2=3") == 0
        belief, _, _ = _fused(capsys.readouterr().out)
        assert belief[("x",)] == pytest.approx(0.25 + 0.375)

    def test_weights_ignored_without_dogmatic(self, fixture_path, capsys, caplog):
        assert cmd_fuse(fixture_path("table1.json"), "wbf", weights="A1=1") == 0
        assert "ignored" in caplog.text
        belief, _, _ = _fused(capsys.readouterr().out)
        assert round(belief[("x",)], 3) == 0.562

    @pytest.mark.parametrize("weights", ["A1", "ghost=1", "D1=abc", "D1=-1"])
    def test_bad_weights(self, weights, fixture_path, capsys):
        assert cmd_fuse(fixture_path("dogmatic_mix.json"), "cbf", weights=weights) == 1
        assert capsys.readouterr().err.startswith("error:")

    def test_output_reparses(self, fixture_path, tmp_path):
        for op in ("cbf", "ecbf", "abf", "wbf", "bcf", "ccf"):
            out = tmp_path / f"{op}.json"
            assert cmd_fuse(fixture_path("table1.json"), op, str(out)) == 0
            data = load_opinions(str(out))
            assert data.actors == (f"fused:{op}",)
            assert cmd_validate(str(out)) == 0


class TestTable:
    def test_all_pass(self, capsys):
        assert cmd_table() == 0
        out = capsys.readouterr().out
        assert "24/24 checked cells PASS" in out
        assert "FAIL" not in out

    def test_corrupted_expected(self, capsys):
        broken = {c: dict(rows) for c, rows in EXPECTED.items()}
        broken["WBF"]["u"] = 0.300
        assert cmd_table(expected=broken) == 3
        assert "FAIL WBF u" in capsys.readouterr().out

    def test_tight_tolerance_fails(self, capsys):
        # published values are rounded to three decimals
        assert main(["table", "--tolerance", "1e-6"]) == 3

    def test_subprocess(self):
        proc = subprocess.run(
            [sys.executable, "-m", "slfusion", "table"], capture_output=True, text=True, timeout=60
        )
        assert proc.returncode == 0, proc.stderr
        assert "24/24" in proc.stdout


class TestConvert:
    def test_to_evidence(self, fixture_path, capsys):
        assert cmd_convert(fixture_path("table1.json"), "to-evidence") == 0
        doc = json.loads(capsys.readouterr().out)
        a3 = doc["evidence"][2]
        r = {tuple(e["set"]): e["value"] for e in a3["r"]}
        assert r[("x",)] == pytest.approx(7.0, abs=1e-12)
        assert r[("not_x",)] == pytest.approx(1.0, abs=1e-12)
        assert a3["W"] == 2.0

    def test_to_opinion(self, fixture_path, capsys):
        assert cmd_convert(fixture_path("a3_evidence.json"), "to-opinion") == 0
        belief, u, _ = _fused(capsys.readouterr().out)
        assert (belief[("x",)], belief[("not_x",)], u) == pytest.approx((0.7, 0.1, 0.2), abs=1e-12)

    def test_dogmatic(self, fixture_path, capsys):
        assert cmd_convert(fixture_path("conflict.json"), "to-evidence") == 2
        assert "DogmaticOpinion" in capsys.readouterr().err

    def test_round_trip_files(self, fixture_path, tmp_path):
        ev_path, op_path = tmp_path / "ev.json", tmp_path / "op.json"
        assert cmd_convert(fixture_path("single.json"), "to-evidence", str(ev_path)) == 0
        assert load_evidence(str(ev_path)).actors == ("observer",)
        assert cmd_convert(str(ev_path), "to-opinion", str(op_path)) == 0
        (op,) = load_opinions(str(op_path)).opinions
        (orig,) = load_opinions(fixture_path("single.json")).opinions
        assert dict(op.belief) == pytest.approx(dict(orig.belief), abs=1e-12)
        assert op.uncertainty == pytest.approx(orig.uncertainty, abs=1e-12)

    def test_wrong_kind(self, fixture_path, capsys):
        assert cmd_convert(fixture_path("table1.json"), "to-opinion") == 1


class TestValidate:
    def test_ok(self, fixture_path, capsys):
        assert cmd_validate(fixture_path("table1.json")) == 0
        assert "3 opinion(s)" in capsys.readouterr().out

    def test_names_actor(self, fixture_path, capsys):
        assert main(["validate", "--input", fixture_path("bad_additivity.json")]) == 1
        err = capsys.readouterr().err
        assert "overfull" in err and "fine" not in err

    def test_empty(self, fixture_path, capsys):
        assert cmd_validate(fixture_path("empty.json")) == 1
        assert "EmptyInput" in capsys.readouterr().err

    def test_reports_every_actor(self, tmp_path, capsys):
        doc = {
            "domain": ["x", "not_x"],
            "opinions": [
                {"actor": "p", "belief": [{"set": ["x"], "mass": -0.2}], "uncertainty": 1.2},
                {"actor": "q", "belief": [{"set": ["x", "x"], "mass": 0.5}], "uncertainty": 0.5},
            ],
        }
        path = tmp_path / "two.json"
        path.write_text(json.dumps(doc))
        assert cmd_validate(str(path)) == 1
        err = capsys.readouterr().err
        assert err.splitlines() == [
            "error: p: NegativeMass: negative belief mass -0.2 on ('x',)",
            "error: q: InvalidKey: duplicate label 'x' in set",
        ]

    def test_bad_json(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text("{")
        assert cmd_validate(str(path)) == 1
        assert "invalid JSON" in capsys.readouterr().err
