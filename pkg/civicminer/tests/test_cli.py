import json
from itertools import combinations

import pandas as pd
import pytest

from civicminer.cli import main
from civicminer.importer import load_dataset, read_rules
from civicminer.models import ALL_MEASURES, Measure


def test_mine_writes_all_measures(tmp_path, toy_path, capsys):
    output = tmp_path / "rules.csv"
    assert main(["mine", "--input", str(toy_path), "--output", str(output)]) == 0
    df = pd.read_csv(output)
    for measure in ALL_MEASURES:
        assert measure.value in df.columns
    assert "rules from 8 transactions" in capsys.readouterr().err


def test_mine_is_byte_identical_across_runs_and_workers(tmp_path, toy_path):
    first, second, sharded = tmp_path / "a.csv", tmp_path / "b.csv", tmp_path / "c.csv"
    assert main(["mine", "--input", str(toy_path), "--output", str(first)]) == 0
    assert main(["mine", "--input", str(toy_path), "--output", str(second)]) == 0
    assert main(["mine", "--input", str(toy_path), "--output", str(sharded), "--workers", "3"]) == 0
    assert first.read_bytes() == second.read_bytes() == sharded.read_bytes()


def test_mine_to_stdout(toy_path, capsys):
    assert main(["mine", "--input", str(toy_path), "--measure", "wcc", "--measure", "conf"]) == 0
    header = capsys.readouterr().out.splitlines()[0]
    assert header.endswith("conf,conf_display,wcc,wcc_display")


def test_mine_with_unsatisfiable_threshold_writes_header_only(tmp_path, toy_path):
    output = tmp_path / "rules.csv"
    assert main(["mine", "--input", str(toy_path), "--min-antecedent-count", "9", "--output", str(output)]) == 0
    assert len(output.read_text(encoding="utf-8").splitlines()) == 1

def _subsets(names):
    return [frozenset(c) for size in range(1, len(names) + 1) for c in combinations(sorted(names), size)]


def test_mine_pair_counts_match_subset_scan(tmp_path, toy_path, capsys):
    rows = [frozenset(t.generic_items.names) for t in load_dataset(toy_path).transactions]
    candidates = set().union(*(_subsets(row) for row in rows))
    qualifying = {x for x in candidates if sum(x <= row for row in rows) >= 2}
    distinct = {
        (x, y) for x in qualifying for y in candidates if not x & y and any(x | y <= row for row in rows)
    }
    enumerated = sum(len(_subsets(row - x)) for row in rows for x in _subsets(row) if x in qualifying)

    output = tmp_path / "rules.csv"
    assert main(["mine", "--input", str(toy_path), "--output", str(output)]) == 0
    assert len(pd.read_csv(output)) == len(distinct)
    assert f"mined {len(distinct)} rules from 8 transactions ({enumerated} pairs enumerated)" in capsys.readouterr().err


def test_invalid_utf8_input_is_a_data_error(tmp_path, capsys):
    bad = tmp_path / "latin.jsonl"
    bad.write_bytes(b'{"id": "r2", "issues": ["\xff\xfe"]}\n')
    assert main(["mine", "--input", str(bad)]) == 2
    assert "line 1: invalid UTF-8" in capsys.readouterr().err


def test_bad_pairs_output_fails_before_writing(tmp_path, toy_path):
    rules, comparison = tmp_path / "rules.csv", tmp_path / "comparison.csv"
    assert main(["mine", "--input", str(toy_path), "--output", str(rules)]) == 0
    args = [
        "compare", "--rules-a", str(rules), "--output", str(comparison),
        "--pairs", "2", "--pairs-output", str(tmp_path / "pairs.txt"),
    ]
    assert main(args) == 1
    assert not comparison.exists()


def test_bad_output_extension_fails_before_mining(tmp_path, toy_path, capsys):
    assert main(["mine", "--input", str(toy_path), "--output", str(tmp_path / "rules.txt")]) == 1
    assert "mined" not in capsys.readouterr().err



def test_usage_errors_exit_1(toy_path, capsys):
    with pytest.raises(SystemExit) as info:
        main(["mine"])
    assert info.value.code == 1
    assert main(["mine", "--input", str(toy_path), "--w", "2.5"]) == 1
    assert main(["mine", "--input", str(toy_path), "--alpha", "0"]) == 1
    assert main(["mine", "--input", str(toy_path), "--min-antecedent-count", "0"]) == 1
    assert "error:" in capsys.readouterr().err


def test_data_errors_exit_2(tmp_path):
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"id": "r1", "hobbies": ["Cycling"]}\n', encoding="utf-8")
    assert main(["mine", "--input", str(bad)]) == 2


def test_budget_exceeded_exits_3(tmp_path, toy_path, capsys):
    assert main(["mine", "--input", str(toy_path), "--pair-budget", "5", "--log-dir", str(tmp_path)]) == 3
    assert "pair budget of 5 exceeded" in capsys.readouterr().err
    records = [json.loads(line) for line in (tmp_path / "failures.log").read_text(encoding="utf-8").splitlines()]
    assert records[-1]["error_type"] == "BudgetExceededError"
    assert records[-1]["exit_code"] == 3


def test_score_rank_compare_pipeline(tmp_path, toy_path):
    rules = tmp_path / "rules.csv"
    assert main(["mine", "--input", str(toy_path), "--measure", "conf", "--output", str(rules)]) == 0

    rescored = tmp_path / "rescored.jsonl"
    assert main(["score", "--rules", str(rules), "--w", "1.2", "--output", str(rescored)]) == 0
    assert all(set(rule.scores) == set(ALL_MEASURES) for rule in read_rules(rescored))

    top = tmp_path / "top.csv"
    assert main(["rank", "--rules", str(rescored), "--measure", "wcc", "--k", "5", "--output", str(top)]) == 0
    ranked = pd.read_csv(top)
    assert len(ranked) == 5
    assert ranked["rank"].iloc[0] == 1
    assert ranked["wcc"].is_monotonic_decreasing

    comparison, pairs = tmp_path / "comparison.csv", tmp_path / "pairs.csv"
    args = [
        "compare", "--rules-a", str(rescored), "--rules-b", str(top), "--measure-a", "wcc", "--measure-b", "wcc",
        "--k", "10",
        "--output", str(comparison), "--pairs", "4", "--seed", "3", "--pairs-output", str(pairs),
    ]
    assert main(args) == 0
    labels = pd.read_csv(comparison)["label"].value_counts().to_dict()
    assert labels == {"both": 5, "only_a": 5}
    assert len(pd.read_csv(pairs)) == 8


def test_rank_without_the_measure_is_a_data_error(tmp_path, toy_path):
    rules = tmp_path / "rules.csv"
    assert main(["mine", "--input", str(toy_path), "--measure", "conf", "--output", str(rules)]) == 0
    assert main(["rank", "--rules", str(rules), "--measure", "wcc"]) == 2


def test_compare_pairs_need_output(tmp_path, toy_path):
    rules = tmp_path / "rules.csv"
    assert main(["mine", "--input", str(toy_path), "--output", str(rules)]) == 0
    assert main(["compare", "--rules-a", str(rules), "--pairs", "2"]) == 1


def test_explain_reports_complement_frequencies(toy_path, capsys):
    assert main(["explain", "--input", str(toy_path), "--antecedent", "i_A", "--consequent", "i_G"]) == 0
    out = capsys.readouterr().out
    assert "cf(~X) = 4" in out
    assert "cf(~X u ~Y) = 0" in out
    assert "wcc = " in out and "(0.178)" in out


def test_explain_casual_conf_breakdown(toy_path, capsys):
    assert main(["explain", "--input", str(toy_path), "--antecedent", "i_B", "--consequent", "i_A"]) == 0
    out = capsys.readouterr().out
    assert "casual_conf = 1/2 [L(3, 6; alpha=0.01) + L(1, 2; alpha=0.01)]" in out


def test_explain_rule_without_cooccurrence(toy_path, capsys):
    assert main(["explain", "--input", str(toy_path), "--antecedent", "i_A", "--consequent", "i_C"]) == 0
    out = capsys.readouterr().out
    assert "cf(X u Y) = 0" in out
    assert f"{Measure.CONF.value} = cf(X u Y) / cf(X) = 0 / 4 = 0.0 (0.000)" in out


def test_explain_unknown_item_is_named(toy_path, capsys):
    assert main(["explain", "--input", str(toy_path), "--antecedent", "i_Z", "--consequent", "i_A"]) == 2
    assert "i_Z" in capsys.readouterr().err


def test_explain_questionnaire_rule(example_path, capsys):
    args = ["explain", "--input", str(example_path), "--antecedent", "Traffic", "--consequent", "Open Data"]
    assert main(args) == 0
    assert "rule: {Traffic} => {Open Data}" in capsys.readouterr().out


def test_explain_reports_the_selected_measure(toy_path, capsys):
    args = ["explain", "--input", str(toy_path), "--antecedent", "i_A", "--consequent", "i_G", "--measure", "conf"]
    assert main(args) == 0
    assert capsys.readouterr().out.splitlines()[-1] == "score (conf) = 0.750"
