import csv
import io
import json

import pytest

from fracorlicz import __version__
from fracorlicz.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    return json.loads(out)


def csv_rows(text):
    body = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.reader(io.StringIO("\n".join(body))))


class TestClassify:
    def test_power(self, capsys):
        rep = run_json(capsys, "classify", "--nfunction", "power:q=2", "--s", "0.8",
                       "--domain-class", "bounded-lipschitz")
        st = {v["inequality"]: v["status"] for v in rep["result"]}
        assert st["FOHI"] == "holds" and st["RFOPI"] == "holds"

    def test_llogl(self, capsys):
        rep = run_json(capsys, "classify", "--nfunction", "llogl", "--s", "0.5", "--domain-class", "bounded-lipschitz")
        by = {v["inequality"]: v for v in rep["result"]}
        assert by["FOHI"]["status"] == by["RFOPI"]["status"] == "fails"
        assert by["FOHI"]["rule"] == "Thm1.3(1)"

    def test_spec_file_and_override(self, capsys, tmp_path):
        p = tmp_path / "spec.json"
        p.write_text(json.dumps({"command": "classify", "nfunction": "llogl", "s": 0.5,
                                 "domain_class": "bounded-lipschitz"}))
        rep = run_json(capsys, "classify", "--spec", str(p), "--nfunction", "power:q=2", "--s", "0.8")
        assert rep["spec"]["nfunction"] == {"kind": "power", "q": 2.0}
        assert rep["result"][0]["status"] == "holds"

    def test_report_provenance(self, capsys):
        rep = run_json(capsys, "classify", "--nfunction", "power:q=3", "--s", "0.4",
                       "--domain-class", "bounded-lipschitz")
        assert rep["version"] == __version__ and rep["command"] == "classify"
        # the class is recorded fully resolved, not as the shorthand tag
        assert rep["spec"]["s"] == 0.4 and rep["spec"]["domain_class"]["tag"] == "BoundedLipschitz"


class TestExitCodes:
    def test_malformed_json(self, capsys, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text('{"nfunction": "llogl",\n')
        code, _, err = run(capsys, "classify", "--spec", str(p))
        assert code == 2 and "bad.json:2:" in err

    def test_unknown_field(self, capsys, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text(json.dumps({"nfunction": "llogl", "s": 0.5, "colour": 1}))
        code, _, err = run(capsys, "classify", "--spec", str(p))
        assert code == 2 and "colour" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "classify", "--spec", str(tmp_path / "nope.json"))
        assert code == 2 and "nope.json" in err

    def test_s_out_of_range(self, capsys):
        code, _, err = run(capsys, "classify", "--nfunction", "power:q=2", "--s", "1.5",
                           "--domain-class", "bounded-lipschitz")
        assert code == 2 and "'s'" in err

    def test_invalid_nfunction(self, capsys):
        code, _, err = run(capsys, "gauges", "--nfunction", "power:q=0.5", "--p")
        assert code == 4 and "invalid nfunction" in err

    def test_degenerate_trial(self, capsys):
        code, _, err = run(capsys, "estimate", "--kind", "p1", "--nfunction", "power:q=2", "--s", "0.8",
                           "--domain", "interval:0,1", "--grid", "2")
        assert code == 5 and "degenerate" in err

    def test_contradiction(self, capsys, monkeypatch):
        import fracorlicz.classifier as clf
        bogus = clf._Rule("Bogus", ("BoundedLipschitz",), (("FOHI", "holds"),),
                          lambda g: [clf.Hypothesis("always", True, True)])
        monkeypatch.setattr(clf, "RULES", clf.RULES + (bogus,))
        code, _, err = run(capsys, "classify", "--nfunction", "llogl", "--s", "0.5",
                           "--domain-class", "bounded-lipschitz")
        assert code == 3 and "contradiction" in err

    def test_table_mismatch(self, capsys, monkeypatch):
        import fracorlicz.classifier as clf
        golden = dict(clf.TABLE1_GOLDEN)
        golden["t^q"] = golden["t^q(1+|log t|)"][::-1]
        monkeypatch.setattr(clf, "TABLE1_GOLDEN", golden)
        code, out, _ = run(capsys, "table1", "--q", "2")
        assert code == 1 and json.loads(out)["result"]["matches_golden"] is False

    def test_bad_threads(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["table1", "--q", "2", "--threads", "0"])
        assert exc.value.code == 2


class TestGauges:
    def test_alpha_grid_is_one(self, capsys):
        _, out, _ = run(capsys, "gauges", "--nfunction", "power:q=2", "--s", "0.5", "--alpha-grid", "1e-6:1:13",
                        "--format", "csv")
        rows = csv_rows(out)
        assert rows[0] == ["lambda", "alpha"] and len(rows) == 14
        assert all(float(r[1]) == pytest.approx(1.0, rel=1e-12) for r in rows[1:])

    def test_beta(self, capsys):
        rep = run_json(capsys, "gauges", "--nfunction", "power:q=2", "--s", "0.5", "--beta")
        assert rep["result"]["beta"]["value"] == 0.5

    def test_p(self, capsys):
        rep = run_json(capsys, "gauges", "--nfunction", "llogl", "--p")
        assert rep["result"]["p"] == pytest.approx(2.0, rel=1e-9)

    def test_csv_header_comments(self, capsys):
        _, out, _ = run(capsys, "gauges", "--nfunction", "power:q=2", "--s", "0.5", "--alpha-grid", "0.1:10:3",
                        "--format", "csv")
        first, second = out.splitlines()[:2]
        assert first == f"# fracorlicz {__version__}"
        assert json.loads(second[len("# spec: "):])["nfunction"] == {"kind": "power", "q": 2.0}


class TestEstimate:
    ARGS = ("estimate", "--kind", "p1", "--nfunction", "power:q=2", "--s", "0.8", "--domain", "interval:0,1",
            "--grid", "32", "--seed", "7")

    def test_positive_and_byte_identical(self, capsys, tmp_path):
        _, a, _ = run(capsys, *self.ARGS)
        _, b, _ = run(capsys, *self.ARGS, "--threads", "4")
        assert a == b
        assert json.loads(a)["result"]["value"] > 0
        hist = tmp_path / "h.csv"
        assert main([*self.ARGS, "--history", str(hist), "-o", str(tmp_path / "r.json")]) == 0
        assert hist.read_text().startswith("iteration,value")
        saved = json.loads((tmp_path / "r.json").read_text())
        assert saved["result"] == json.loads(a)["result"]
        assert saved["spec"]["history"] == str(hist)

    def test_sweep_decreasing(self, capsys):
        _, out, _ = run(capsys, "estimate", "--sweep", "cutoff", "--s", "0.3", "--nfunction", "power:q=2",
                        "--domain", "interval:0,1", "--format", "csv")
        rows = csv_rows(out)
        assert rows[0] == ["eps", "hardy_quotient", "poincare_quotient", "divergent"]
        for col in (1, 2):
            vals = [float(r[col]) for r in rows[1:]]
            assert all(b < a for a, b in zip(vals, vals[1:]))

    def test_polar(self, capsys):
        rep = run_json(capsys, "estimate", "--check", "polar", "--domain", "box2d", "--s", "0.5",
                       "--nfunction", "power:q=2", "--n-angles", "8")
        assert rep["result"]["relative_difference"] < 1e-3


class TestTable1:
    @pytest.mark.parametrize("q", ["1.5", "2", "3"])
    def test_golden(self, capsys, q):
        rep = run_json(capsys, "table1", "--q", q)
        assert rep["result"]["matches_golden"] is True

    def test_csv_deterministic(self, capsys):
        _, a, _ = run(capsys, "table1", "--q", "2", "--format", "csv")
        _, b, _ = run(capsys, "table1", "--q", "2", "--format", "csv", "--threads", "3")
        assert a == b
        assert csv_rows(a)[0] == ["A(t)", "H>0", "H=0", "P1>0", "P1=0"]
