import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from chunkchain.cli import main

REPO_ROOT = Path(__file__).resolve().parent.parent
EDGES_CSV = REPO_ROOT / "sample_data" / "topic_edges.csv"
RECORDS_CSV = REPO_ROOT / "sample_data" / "assessment_records.csv"
DEFAULT_PACK = (
    REPO_ROOT / "src" / "chunkchain" / "missions" / "default_pack.json"
)


@pytest.fixture
def runner():
    return CliRunner()


def test_unknown_flag_exits_2(runner):
    result = runner.invoke(main, ["node", "start", "--frobnicate"])
    assert result.exit_code == 2
    assert "Usage" in result.output or "no such option" in result.output.lower()


def test_node_start_requires_classroom_settings(runner):
    result = runner.invoke(main, ["node", "start"])
    assert result.exit_code == 2
    assert "classroom" in result.output


def test_node_start_rejects_short_passphrase(runner):
    result = runner.invoke(
        main, ["node", "start", "--classroom", "demo", "--passphrase", "short"]
    )
    assert result.exit_code == 2
    assert "at least 8" in result.output


def test_node_status_unreachable_exits_1(runner):
    result = runner.invoke(main, ["node", "status", "--api", "127.0.0.1:1"])
    assert result.exit_code == 1
    assert "cannot reach node" in result.output


def test_packs_validate_bundled_default(runner):
    result = runner.invoke(main, ["packs", "validate", str(DEFAULT_PACK)])
    assert result.exit_code == 0
    assert "8 missions over 2 levels" in result.output


def test_packs_validate_bad_pack(runner, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(
        json.dumps(
            {
                "version": 1,
                "missions": [
                    {"id": "a", "level": 1, "kind": "quiz", "prompt": "p",
                     "quiz": {"choices": ["x", "y"], "correct_index": 0}},
                    {"id": "a", "level": 3, "kind": "quiz", "prompt": "p",
                     "quiz": {"choices": ["x", "y"], "correct_index": 9}},
                ],
            }
        )
    )
    result = runner.invoke(main, ["packs", "validate", str(bad)])
    assert result.exit_code == 1
    assert "duplicate id" in result.output
    assert "contiguous" in result.output
    assert "correct_index" in result.output


def test_analytics_hits_bundled_edges(runner):
    result = runner.invoke(main, ["analytics", "hits", str(EDGES_CSV)])
    assert result.exit_code == 0, result.output
    assert "Hub (content)" in result.output
    assert "Authority (prerequisite)" in result.output
    json_part = result.output[result.output.index("{") :]
    report = json.loads(json_part)
    hubs = {s["label"]: s["hub"] for s in report["scores"]}
    assert abs(sum(hubs.values()) - 1.0) < 1e-6
    assert hubs["Blockchain"] == max(hubs.values())


def test_analytics_hits_missing_column(runner, tmp_path):
    bad = tmp_path / "edges.csv"
    bad.write_text("from,to\na,b\n")
    result = runner.invoke(main, ["analytics", "hits", str(bad)])
    assert result.exit_code == 1
    assert "missing column" in result.output
    assert "content" in result.output


def test_analytics_assess_t(runner):
    result = runner.invoke(main, ["analytics", "assess", str(RECORDS_CSV), "--test", "t"])
    assert result.exit_code == 0, result.output
    assert "two_sample_t" in result.output
    report = json.loads(result.output[result.output.index("{") :])
    assert report["df"] == 51 + 17 - 2  # 51 treatment, 17 placebo in the sample set
    assert 0.0 <= report["p"] <= 1.0


def test_analytics_assess_ancova(runner):
    result = runner.invoke(
        main, ["analytics", "assess", str(RECORDS_CSV), "--test", "ancova"]
    )
    assert result.exit_code == 0, result.output
    report = json.loads(result.output[result.output.index("{") :])
    assert set(report["adjusted_means"]) == {"A", "B", "P"}
    assert len(report["df"]) == 2


def test_analytics_assess_cor(runner):
    result = runner.invoke(main, ["analytics", "assess", str(RECORDS_CSV), "--test", "cor"])
    assert result.exit_code == 0, result.output
    report = json.loads(result.output[result.output.index("{") :])
    assert "cor" in report


def test_analytics_assess_cor_without_grades(runner, tmp_path):
    no_grades = tmp_path / "records.csv"
    lines = RECORDS_CSV.read_text().splitlines()
    header = lines[0]
    stripped = [",".join(line.split(",")[:-1] + [""]) for line in lines[1:]]
    no_grades.write_text("\n".join([header] + stripped) + "\n")
    result = runner.invoke(main, ["analytics", "assess", str(no_grades), "--test", "cor"])
    assert result.exit_code == 1
    assert "no grade column" in result.output


def test_analytics_assess_bad_row_names_line(runner, tmp_path):
    bad = tmp_path / "records.csv"
    bad.write_text(
        "student_id,group,cohort,pretest,posttest,grade\n"
        "s1,A,prelast,10,20,2.0\n"
        "s2,Q,prelast,10,20,2.0\n"
    )
    result = runner.invoke(main, ["analytics", "assess", str(bad), "--test", "t"])
    assert result.exit_code == 1
    assert "line 3" in result.output
    assert "group" in result.output
