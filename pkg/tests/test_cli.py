import csv
import json
import math
import xml.etree.ElementTree as ET

import pytest

from friedrichs_bc import cli, report
from friedrichs_bc.errors import ParseError

SVG_NS = "{http://www.w3.org/2000/svg}"


def run(*argv):
    return cli.main([str(a) for a in argv])


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


class TestParsing:
    def test_number_list(self):
        assert cli.parse_list("-2, 0.5,inf,1/e") == [-2.0, 0.5, math.inf, math.exp(-1)]
        assert cli.parse_list("") == []
        assert cli.parse_list(None) == []

    def test_bad_number_list(self):
        with pytest.raises(ParseError):
            cli.parse_list("1,two")

    def test_config_file(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# comment\nseed = 7\nmax-dim=3\n\ntol=1e-9\n")
        assert cli.read_config(cfg) == {"seed": 7, "max_dim": 3, "tol": 1e-9}

    @pytest.mark.parametrize("text", ["bogus=1\n", "seed\n", "seed=abc\n"])
    def test_config_errors(self, tmp_path, text):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text(text)
        with pytest.raises(ParseError):
            cli.read_config(cfg)


class TestTransportSweep:
    def test_signed_column(self, tmp_path):
        assert run("transport-sweep", "--out", tmp_path, "--alphas=-2,-1,0,0.5,1,2,inf") == 0
        rows = read_csv(tmp_path / "transport_sweep.csv")
        assert [r["signed_map"] for r in rows] == ["1", "1", "0", "0", "1", "1", "1"]
        assert [r["m_accretive"] for r in rows] == ["1", "1", "0", "0", "1", "1", "1"]
        assert [r["alpha"] for r in rows] == ["-2.0", "-1.0", "0.0", "0.5", "1.0", "2.0", "inf"]
        u_norm = {r["alpha"]: float(r["U_norm"]) for r in rows}
        assert u_norm["0.0"] == pytest.approx(math.e, abs=1e-8)
        assert u_norm["inf"] == pytest.approx(math.exp(-1), abs=1e-12)

    def test_exceptional_alpha(self, tmp_path):
        assert run("transport-sweep", "--out", tmp_path, "--alphas=1/e") == 0
        rows = read_csv(tmp_path / "transport_sweep.csv")
        assert [r["bijective"] for r in rows] == ["0"]
        assert rows[0]["U_norm"] == "nan"

    def test_empty_grid(self, tmp_path):
        assert run("transport-sweep", "--out", tmp_path, "--alphas=") == 0
        doc = json.loads((tmp_path / "transport_sweep.json").read_text())
        assert doc["records"] == [] and doc["series"] == {}
        assert read_csv(tmp_path / "transport_sweep.csv") == []

    def test_report_shape(self, tmp_path):
        run("transport-sweep", "--out", tmp_path, "--alphas=2,0.5", "--times=0,1")
        doc = json.loads((tmp_path / "transport_sweep.json").read_text())
        assert doc["schema"] == 1 and doc["command"] == "transport-sweep"
        for rec in doc["records"]:
            assert set(rec) == {"name", "inputs", "expected", "observed", "tolerance", "pass",
                                "provenance"}
            assert rec["provenance"] in {"paper", "trivial", "derived"}
        lines = doc["series"]["semigroup_norm"]["lines"]
        assert lines["alpha=2.0"] == pytest.approx([1.0, 0.5], abs=1e-8)
        assert lines["alpha=0.5"] == pytest.approx([1.0, 2.0], abs=1e-8)
        assert (tmp_path / "transport_sweep_records.csv").exists()
        assert "elapsed_s" in json.loads((tmp_path / "transport_sweep.timing.json").read_text())

    def test_deterministic_and_job_independent(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        grid = "-2,-0.5,0,0.5,1,inf"
        assert run("transport-sweep", "--out", a, "--alphas=" + grid) == 0
        assert run("transport-sweep", "--out", b, "--alphas=" + grid, "--jobs", 3) == 0
        assert (a / "transport_sweep.json").read_bytes() == (b / "transport_sweep.json").read_bytes()
        assert (a / "transport_sweep.csv").read_bytes() == (b / "transport_sweep.csv").read_bytes()

    def test_unwritable_output(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("")
        assert run("transport-sweep", "--out", blocker / "sub", "--alphas=2") == 2

    def test_bad_alpha_list(self, tmp_path):
        assert run("transport-sweep", "--out", tmp_path, "--alphas=2,x") == 2


class TestResolvent:
    def test_lambda_one_passes(self, tmp_path):
        assert run("resolvent", "--out", tmp_path, "--lambdas=1") == 0
        doc = json.loads((tmp_path / "resolvent.json").read_text())
        row = doc["tables"]["resolvent"][0]
        assert abs(row["quadrature_norm_sq"] - row["formula"]) <= 1e-8

    def test_default_run_records_published_mismatch(self, tmp_path):
        assert run("resolvent", "--out", tmp_path) == 1
        doc = json.loads((tmp_path / "resolvent.json").read_text())
        failed = {(r["name"], r["inputs"]["lambda"]) for r in doc["records"] if not r["pass"]}
        assert failed == {("resolvent.norm_sq_vs_published_formula", 10.0),
                          ("resolvent.norm_sq_vs_published_formula", 100.0)}
        bound = [r for r in doc["records"] if r["name"] == "resolvent.lambda_bound_100"][0]
        assert bound["pass"] and bound["observed"] == pytest.approx(12.2066, abs=1e-4)

    @pytest.mark.parametrize("lams", ["0", "-1,2", "inf"])
    def test_rejects_non_positive(self, tmp_path, lams):
        assert run("resolvent", "--out", tmp_path, "--lambdas=" + lams) == 2


class TestOtherCommands:
    def test_semigroup(self, tmp_path):
        assert run("semigroup", "--out", tmp_path) == 0

    def test_elliptic(self, tmp_path):
        assert run("elliptic", "--out", tmp_path) == 0
        doc = json.loads((tmp_path / "elliptic.json").read_text())
        assert doc["summary"]["failed"] == 0 and doc["summary"]["total"] > 0

    def test_fuzz_single_reproducible(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert run("model-fuzz", "--out", a, "--count", 1, "--seed", 4) == 0
        assert run("model-fuzz", "--out", b, "--count", 1, "--seed", 4) == 0
        ha = json.loads((a / "model_fuzz.json").read_text())["hash"]
        hb = json.loads((b / "model_fuzz.json").read_text())["hash"]
        assert ha == hb

    def test_fuzz_smallest_models(self, tmp_path):
        assert run("model-fuzz", "--out", tmp_path, "--count", 50, "--max-dim", 1) == 0

    def test_fuzz_jobs_do_not_change_report(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        run("model-fuzz", "--out", a, "--count", 40)
        run("model-fuzz", "--out", b, "--count", 40, "--jobs", 3)
        assert (a / "model_fuzz.json").read_bytes() == (b / "model_fuzz.json").read_bytes()

    def test_config_and_flag_precedence(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(f"out={tmp_path / 'from_cfg'}\ncount=3\nseed=9\n")
        assert run("model-fuzz", "--config", cfg, "--seed", 2) == 0
        doc = json.loads((tmp_path / "from_cfg" / "model_fuzz.json").read_text())
        assert doc["seed"] == 2
        assert doc["config"]["count"] == 3

    def test_missing_config(self, tmp_path):
        assert run("model-fuzz", "--config", tmp_path / "nope.cfg") == 2

    def test_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            run("transport-sweep", "--no-such-flag")
        assert exc.value.code == 2


class TestPlot:
    def test_sweep_plot_one_line_per_alpha(self, tmp_path):
        run("transport-sweep", "--out", tmp_path, "--alphas=-2,0,0.5,2,inf")
        svg = tmp_path / "sweep.svg"
        assert run("plot", tmp_path / "transport_sweep.json", svg) == 0
        root = ET.parse(svg).getroot()
        assert root.tag == SVG_NS + "svg"
        doc = report.load_report(tmp_path / "transport_sweep.json")
        assert report.plot_report(doc, tmp_path / "again.svg") == 5

    def test_empty_report_plot(self, tmp_path):
        run("transport-sweep", "--out", tmp_path, "--alphas=")
        svg = tmp_path / "empty.svg"
        assert run("plot", tmp_path / "transport_sweep.json", svg) == 0
        ET.parse(svg)
        assert report.plot_report(report.load_report(tmp_path / "transport_sweep.json"),
                                  tmp_path / "again.svg") == 0

    def test_plot_is_deterministic(self, tmp_path):
        run("resolvent", "--out", tmp_path, "--lambdas=1,10,100,1000")
        run("plot", tmp_path / "resolvent.json", tmp_path / "a.svg")
        run("plot", tmp_path / "resolvent.json", tmp_path / "b.svg")
        assert (tmp_path / "a.svg").read_bytes() == (tmp_path / "b.svg").read_bytes()

    @pytest.mark.parametrize("text", ["{not json", '{"schema": 2}', '[1, 2]',
                                      '{"schema": 1, "series": {"s": {"x": [1]}}}',
                                      '{"schema": 1, "series": {"s": {"x": [1], "lines": {"a": [1, 2]}}}}'])
    def test_malformed_report(self, tmp_path, text):
        bad = tmp_path / "bad.json"
        bad.write_text(text)
        assert run("plot", bad, tmp_path / "x.svg") == 2

    def test_missing_report(self, tmp_path):
        assert run("plot", tmp_path / "none.json", tmp_path / "x.svg") == 2
