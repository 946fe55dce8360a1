import json
from fractions import Fraction

import pytest

from permoments import __version__
from permoments.cli import main, parse_m_lists
from permoments.verify import KNOWN_Q1_R2_5_3


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out)


def test_moment_trivial(capsys):
    code, doc = run_json(capsys, "moment", "--measure", "e1", "--n", "3", "--r", "2", "--m", "1")
    assert code == 0
    assert doc["result"]["rows"][0]["value"] == "6"
    assert doc["version"] == __version__
    assert doc["config"]["command"] == "moment" and doc["config"]["m_lists"] == [[1]]


def test_moment_pair_matches_reference_q1(capsys):
    _, doc = run_json(capsys, "moment", "--n", "8", "--r", "2", "--m", "5,3")
    assert Fraction(doc["result"]["rows"][0]["value"]) == KNOWN_Q1_R2_5_3(8)


def test_moment_mc_within_four_sigma(capsys):
    _, doc = run_json(capsys, "moment", "--n", "8", "--r", "2", "--m", "3", "--method", "mc",
                      "--samples", "20000", "--seed", "7")
    row = doc["result"]["rows"][0]
    _, exact = run_json(capsys, "moment", "--n", "8", "--r", "2", "--m", "3")
    value = Fraction(exact["result"]["rows"][0]["value"])
    assert abs(float(row["mean"]) - float(value)) <= 4 * float(row["stderr"])
    assert doc["config"]["seed"] == 7 and doc["config"]["samples"] == 20000


def test_moment_eb_and_uniform(capsys):
    _, doc = run_json(capsys, "moment", "--measure", "eb", "--n", "3", "--r", "1", "--m", "1,1", "--method", "tiny-enum")
    assert doc["result"]["rows"][0]["value"] == "11"
    _, doc = run_json(capsys, "moment", "--measure", "e", "--n", "4", "--r", "1", "--m", "2")
    assert doc["result"]["rows"][0]["value"] == "6"


def test_moment_budget_error_is_structured(capsys):
    code, doc = run_json(capsys, "moment", "--n", "9", "--r", "3", "--m", "2,2,2", "--method", "naive",
                         "--budget", "1000")
    assert code == 2
    assert doc["error"]["type"] == "BudgetExceeded" and doc["error"]["budget"] == 1000


def test_moment_unsupported_measure(capsys):
    code, doc = run_json(capsys, "moment", "--measure", "e", "--n", "4", "--r", "2", "--m", "2", "--method", "mc")
    assert code == 1 and doc["error"]["type"] == "UnsupportedMeasure"


def test_budget_env_override(capsys, monkeypatch):
    monkeypatch.setenv("PERMOMENTS_BUDGET", "10")
    code, doc = run_json(capsys, "moment", "--n", "6", "--r", "3", "--m", "2,2,2", "--method", "naive")
    assert code == 2 and doc["config"]["budget"] == 10


def test_reconstruct_q2(capsys):
    code, doc = run_json(capsys, "reconstruct", "--r", "2", "--m", "5,3", "--target", "q2")
    row = doc["result"]["rows"][0]
    assert code == 0
    assert row["model"] == ["224", "-920/3", "460/3", "-100/3", "8/3"]
    assert row["held_out_verified"] and len(row["nodes_used"]) == 11


def test_reconstruct_zero_and_q1(capsys):
    _, doc = run_json(capsys, "reconstruct", "--r", "2", "--m", "1,3", "--target", "q2")
    assert doc["result"]["rows"][0]["model"] == []
    _, doc = run_json(capsys, "reconstruct", "--r", "2", "--m", "5,3", "--target", "q1")
    model = doc["result"]["rows"][0]["model"]
    assert len(model) == 9 and model[-1] == "16/45"


def test_verify_appendix(capsys):
    code, doc = run_json(capsys, "verify", "appendix")
    assert code == 0
    assert {rep["verdict"] for rep in doc["result"]["reports"]} == {"pass"}


def test_verify_cancellation_with_flags(capsys):
    code, doc = run_json(capsys, "verify", "cancellation", "--r", "2", "--m", "2,2", "--grid", "10,20,40")
    (rep,) = doc["result"]["reports"]
    assert code == 0 and rep["claim_id"] == "cancellation-r2-m2-2"
    assert rep["evidence"]["measured_slope"] == pytest.approx(-2, abs=0.35)


def test_verify_degree(capsys):
    code, doc = run_json(capsys, "verify", "degree", "--r", "2", "--mmax", "5")
    assert code == 0
    pairs = doc["result"]["reports"][0]["evidence"]["pairs"]
    assert len(pairs) == 10 and all(p["pass"] for p in pairs)


def test_verify_zero_tolerance_exit_2(capsys):
    code, doc = run_json(capsys, "verify", "cancellation", "--slope-tolerance", "0")
    assert code == 2 and doc["result"]["exit_status"] == 2


def test_verify_output_identical_across_workers(capsys, tmp_path, monkeypatch):
    for workers in ("1", "3"):
        monkeypatch.setenv("PERMOMENTS_OUTPUT_DIR", str(tmp_path / workers))
        main(["verify", "cancellation", "limits", "--workers", workers, "--output", "report.json"])
    assert (tmp_path / "1" / "report.json").read_bytes() == (tmp_path / "3" / "report.json").read_bytes()


def test_output_dir_env(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("PERMOMENTS_OUTPUT_DIR", str(tmp_path))
    main(["verify", "appendix"])
    capsys.readouterr()
    doc = json.loads((tmp_path / "verify-report.json").read_text())
    assert doc["config"]["suites"] == ["appendix"]
    main(["moment", "--n", "4", "--r", "2", "--m", "2", "--output", "m.json"])
    assert json.loads((tmp_path / "m.json").read_text())["result"]["rows"][0]["n"] == 4


def test_formulas_term(capsys):
    code, doc = run_json(capsys, "formulas", "--term", "I", "--n", "4", "--r", "1", "--m", "2")
    row = doc["result"]["rows"][0]
    assert code == 0 and set(row) >= {"term", "spec", "value"}
    assert row["value"] == "6"


def test_formulas_series_table(capsys):
    code, out = run(capsys, "formulas", "--term", "series", "--r", "2", "--m", "3", "--format", "table")
    assert code == 0 and "4/3" in out and "20/3" in out


def test_csv_embeds_config(capsys):
    code, out = run(capsys, "moment", "--n", "4,5", "--r", "2", "--m", "2", "--format", "csv")
    lines = out.strip().splitlines()
    assert lines[0].startswith(f"# permoments {__version__}")
    assert lines[1] == "n,r,m_list,method,value"
    assert len(lines) == 4


def test_m_range_expansion_deduplicates():
    assert parse_m_lists("5,3") == [[5, 3]]
    assert parse_m_lists("2-3,2-3") == [[2, 2], [2, 3], [3, 3]]
