import csv
import io
import json
import subprocess
import sys

import pytest

from psicm import cli, report as rp
from psicm.precision import extended
from psicm.report import (
    ConfigError,
    SuiteConfig,
    SuiteEntry,
    VerificationReport,
    emit_report,
    run_suite,
)


def small_config(**kw):
    base = dict(suites=("wallis", "ball"), n_max=5)
    base.update(kw)
    return SuiteConfig(**base)


def run_cli(*argv):
    buf = io.StringIO()
    code = cli.main(list(argv), out=buf)
    return code, buf.getvalue()


class TestRunSuite:
    def test_wallis_single(self):
        rep = run_suite(SuiteConfig(suites=("wallis",), n_max=1))
        assert len(rep.suite) == 2
        assert all(e.verdict == "pass" for e in rep.suite)
        assert rep.summary["total"] == 2 and rep.verdict == "pass"

    def test_critical_pair_indeterminate(self):
        rep = run_suite(SuiteConfig(suites=("cm",), pairs=((0.0, 1.0),), k_max=2, grid=20))
        verdicts = {e.verdict for e in rep.suite if e.claim_id.startswith("cm")}
        assert verdicts == {"indeterminate"}
        assert rep.summary["fail"] == 0 and rep.verdict == "pass"

    def test_entries_have_descriptive_anchor(self):
        rep = run_suite(small_config())
        assert all(e.paper_anchor for e in rep.suite)
        assert all(e.runtime_ms is None for e in rep.suite)

    def test_timings_optional(self):
        rep = run_suite(small_config(timings=True))
        assert all(isinstance(e.runtime_ms, float) for e in rep.suite)

    def test_extended_precision_recorded(self):
        rep = run_suite(small_config(suites=("ball",), precision=extended(30)))
        assert rep.precision_mode == "extended:30"

    @pytest.mark.parametrize("bad", [
        dict(suites=("nope",)), dict(n_max=0), dict(k_max=20), dict(grid=1),
        dict(samples=0), dict(pairs=()),
    ])
    def test_invalid_config(self, bad):
        with pytest.raises(ConfigError):
            run_suite(small_config(**bad))

    def test_summary_counts(self):
        entries = [SuiteEntry("a", "x", {}, v, {}) for v in ("pass", "fail", "probe", "pass")]
        s = rp.summarize(entries)
        assert s == {"total": 4, "pass": 2, "fail": 1, "indeterminate": 0, "probe": 1,
                     "verdict": "fail"}


class TestEmit:
    def test_json_round_trip(self):
        rep = run_suite(small_config())
        back = VerificationReport.from_dict(json.loads(emit_report(rep, "json")))
        assert back == rep

    def test_json_byte_identical(self):
        a = emit_report(run_suite(small_config(suites=("wallis", "aux"), samples=10)), "json")
        b = emit_report(run_suite(small_config(suites=("wallis", "aux"), samples=10)), "json")
        assert a == b

    def test_json_fields(self):
        d = json.loads(emit_report(run_suite(small_config()), "json"))
        assert set(d) == {"tool_version", "precision_mode", "suite", "summary"}
        assert set(d["suite"][0]) == set(rp.CSV_FIELDS)

    def test_csv_rows(self):
        rep = run_suite(small_config())
        rows = list(csv.reader(io.StringIO(emit_report(rep, "csv").decode())))
        assert len(rows) == len(rep.suite) + 1
        assert tuple(rows[0]) == rp.CSV_FIELDS

    def test_text(self):
        text = emit_report(run_suite(small_config()), "text").decode()
        assert "overall: PASS" in text

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            emit_report(run_suite(small_config()), "xml")

    def test_non_finite_margins_serialise(self):
        rep = run_suite(SuiteConfig(suites=("gamma-psi",)))
        json.loads(emit_report(rep, "json"))  # strict parse, no NaN/Infinity literals
        assert b"Infinity" not in emit_report(rep, "json")


class TestCli:
    def test_eval_digamma(self):
        code, out = run_cli("eval", "digamma", "--x", "1")
        assert code == 0
        value = float(out.split("=")[1])
        assert value == pytest.approx(-0.5772156649015329, abs=1e-15)

    def test_eval_extended(self):
        code, out = run_cli("eval", "psi_root", "--precision", "extended:40")
        assert code == 0
        assert out.strip().startswith("x_star = 1.46163214496836234126")

    def test_eval_z(self):
        code, out = run_cli("eval", "z", "--s", "0.5", "--t", "1", "--x", "1")
        assert code == 0
        lines = dict(line.split(" = ") for line in out.strip().splitlines())
        assert set(lines) == {"z", "z1", "z2"}

    def test_eval_domain_error(self):
        code, _ = run_cli("eval", "delta", "--s", "0.5", "--t", "1", "--x", "-0.6")
        assert code == 2

    def test_verify_pass(self):
        code, out = run_cli("verify", "wallis", "--n-max", "1", "--format", "json")
        assert code == 0
        assert len(json.loads(out)["suite"]) == 2

    def test_verify_bad_suite(self):
        assert run_cli("verify", "nonsense")[0] == 2

    def test_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            cli.main(["verify", "wallis", "--n-max", "x"], out=io.StringIO())
        assert exc.value.code == 2

    def test_bad_precision(self):
        with pytest.raises(SystemExit) as exc:
            cli.main(["eval", "digamma", "--precision", "quad"], out=io.StringIO())
        assert exc.value.code == 2

    def test_failure_exit_code(self, monkeypatch):
        failing = VerificationReport("0", "double", [SuiteEntry("x", "y", {}, "fail", {})])
        monkeypatch.setattr(cli, "run_suite", lambda config: failing)
        assert run_cli("verify", "wallis")[0] == 1

    def test_output_files(self, tmp_path):
        j, c = tmp_path / "r.json", tmp_path / "r.csv"
        code, _ = run_cli("verify", "ball", "--n-max", "3", "--json", str(j), "--csv", str(c))
        assert code == 0
        assert len(json.loads(j.read_text())["suite"]) == 3
        assert len(c.read_text().strip().splitlines()) == 4

    def test_unwritable_output(self, tmp_path):
        code, _ = run_cli("verify", "ball", "--n-max", "1", "--json",
                          str(tmp_path / "missing" / "r.json"))
        assert code == 2

    def test_pair_option(self):
        code, out = run_cli("verify", "cm", "--pair", "0,0.5", "--k-max", "2", "--grid", "10",
                            "--format", "json")
        assert code == 0
        suite = json.loads(out)["suite"]
        pairs = {(e["parameters"]["s"], e["parameters"]["t"]) for e in suite
                 if e["claim_id"].startswith("cm-")}
        assert pairs == {(0.0, 0.5)}

    def test_module_entry_point(self):
        res = subprocess.run([sys.executable, "-m", "psicm", "eval", "digamma", "--x", "2"],
                             capture_output=True, text=True, check=False)
        assert res.returncode == 0
        assert float(res.stdout.split("=")[1]) == pytest.approx(1 - 0.5772156649015329)
