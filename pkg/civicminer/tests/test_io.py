import json
import logging

import pandas as pd
import pytest

from civicminer.enumeration import count_frequencies, generate_rules
from civicminer.errors import DataError, UsageError
from civicminer.exporter import write_comparison, write_pairs, write_rules
from civicminer.importer import load_dataset, read_rules
from civicminer.measures import score_rules
from civicminer.models import ALL_MEASURES, ItemSet, Measure, MeasureConfig, Namespace, NamespaceMode
from civicminer.ranking import compare_lists, sample_rule_pairs, top_k


@pytest.fixture
def toy_rules(toy_db):
    ft = count_frequencies(toy_db)
    return score_rules(generate_rules(ft), ft.n, MeasureConfig(alpha=0.01, w=1.6))


def _write_lines(path, lines):
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def test_load_questionnaire_example(example_path):
    db = load_dataset(example_path)
    assert db.mode == NamespaceMode.ISSUE_TECH
    assert db.n == 1
    transaction = db.transactions[0]
    assert len(transaction.issue_items) == 3
    assert len(transaction.tech_items) == 2
    assert "GIS and Geospatial Information" in transaction.tech_items.names


def test_load_toy_fixture(toy_db):
    assert toy_db.mode == NamespaceMode.GENERIC
    assert toy_db.n == 8
    assert toy_db.support_count(ItemSet.of(Namespace.GENERIC, ["i_G"])) == 7


def test_load_csv_dataset(sample_csv_path):
    db = load_dataset(sample_csv_path)
    assert db.n == 6
    assert db.transactions[0].issue_items.names == ["Living", "Sightseeing", "Traffic"]
    assert len(db.transactions[5].tech_items) == 0


def test_duplicate_items_collapse_with_warning(tmp_path, caplog):
    path = _write_lines(tmp_path / "dup.jsonl", ['{"id": "r1", "issues": ["Traffic", " Traffic"], "techs": ["SNS"]}'])
    with caplog.at_level(logging.WARNING, logger="civicminer.importer"):
        db = load_dataset(path)
    assert db.transactions[0].issue_items.names == ["Traffic"]
    assert "duplicates collapsed" in caplog.text


def test_duplicate_respondent_id_is_named(tmp_path):
    path = _write_lines(
        tmp_path / "ids.jsonl",
        ['{"id": "r7", "issues": ["Traffic"]}', '{"id": "r7", "issues": ["Living"]}'],
    )
    with pytest.raises(DataError, match="r7"):
        load_dataset(path)


def test_unparseable_line_reports_line_number(tmp_path):
    path = _write_lines(tmp_path / "bad.jsonl", ['{"id": "r1", "issues": ["Traffic"]}', '{"id": "r2", "issues": ['])
    with pytest.raises(DataError, match="line 2"):
        load_dataset(path)


def test_invalid_utf8_reports_line_number(tmp_path):
    path = tmp_path / "latin.jsonl"
    path.write_bytes(b'{"id": "r1", "issues": ["Traffic"]}\n{"id": "r2", "issues": ["\xff\xfe"]}\n')
    with pytest.raises(DataError, match="line 2: invalid UTF-8"):
        load_dataset(path)


@pytest.mark.parametrize(
    "lines",
    [
        ['{"id": "t1", "items": ["i_A", "i_B"]}', '{"id": "t2"}'],
        ['{"id": "t2"}', '{"id": "t1", "items": ["i_A", "i_B"]}'],
    ],
)
def test_record_without_item_lists_fits_generic_mode_in_any_position(tmp_path, lines):
    db = load_dataset(_write_lines(tmp_path / "sparse.jsonl", lines))
    assert db.mode == NamespaceMode.GENERIC
    assert db.n == 2
    assert sorted(len(t.generic_items) for t in db.transactions) == [0, 2]


def test_unknown_namespace_tag_is_rejected(tmp_path):
    path = _write_lines(tmp_path / "tag.jsonl", ['{"id": "r1", "hobbies": ["Cycling"]}'])
    with pytest.raises(DataError, match="unknown namespace tag 'hobbies'"):
        load_dataset(path)


def test_mixed_dataset_modes_are_rejected(tmp_path):
    path = _write_lines(
        tmp_path / "mixed.jsonl",
        ['{"id": "r1", "issues": ["Traffic"]}', '{"id": "t1", "items": ["i_A"]}'],
    )
    with pytest.raises(DataError, match="mixes"):
        load_dataset(path)


def test_csv_item_with_delimiter_is_rejected(tmp_path):
    path = tmp_path / "comma.csv"
    path.write_text('id,issues,techs\nr1,"Traffic, Roads",Open Data\n', encoding="utf-8")
    with pytest.raises(DataError, match="line 2"):
        load_dataset(path)


def test_jsonl_item_with_item_separator_is_rejected(tmp_path):
    path = _write_lines(tmp_path / "semi.jsonl", ['{"id": "r1", "issues": ["Traffic;Roads"]}'])
    with pytest.raises(DataError, match="separator"):
        load_dataset(path)


def test_jsonl_item_with_comma_is_accepted(tmp_path):
    path = _write_lines(tmp_path / "comma.jsonl", ['{"id": "r1", "techs": ["Telecommunications (5G, LoRa)"]}'])
    assert load_dataset(path).transactions[0].tech_items.names == ["Telecommunications (5G, LoRa)"]


def test_unknown_extension_is_a_usage_error(tmp_path):
    path = tmp_path / "data.txt"
    path.write_text("", encoding="utf-8")
    with pytest.raises(UsageError):
        load_dataset(path)


def test_missing_dataset_is_a_data_error(tmp_path):
    with pytest.raises(DataError, match="does not exist"):
        load_dataset(tmp_path / "absent.jsonl")


@pytest.mark.parametrize("suffix", ["csv", "jsonl"])
def test_rule_files_read_back_exactly(tmp_path, toy_rules, suffix):
    path = tmp_path / f"rules.{suffix}"
    write_rules(toy_rules, path)
    restored = read_rules(path)
    assert restored == toy_rules
    for before, after in zip(toy_rules, restored):
        for measure in ALL_MEASURES:
            assert after.score(measure) == before.score(measure)


def test_rule_file_columns(tmp_path, toy_rules):
    path = tmp_path / "rules.csv"
    write_rules(toy_rules, path)
    df = pd.read_csv(path, dtype=str)
    assert list(df.columns[:8]) == [
        "antecedent",
        "antecedent_namespace",
        "consequent",
        "consequent_namespace",
        "cf_x",
        "cf_y",
        "cf_xy",
        "n",
    ]
    for measure in ALL_MEASURES:
        assert measure.value in df.columns
        assert df[f"{measure.value}_display"].str.fullmatch(r"\d\.\d{3}").all()
    assert len(df) == len(toy_rules)


def test_empty_rule_list_writes_header_only(tmp_path):
    path = tmp_path / "empty.csv"
    write_rules([], path, measures=[Measure.WCC])
    assert path.read_text(encoding="utf-8").splitlines() == [
        "antecedent,antecedent_namespace,consequent,consequent_namespace,cf_x,cf_y,cf_xy,n,wcc,wcc_display"
    ]
    assert read_rules(path) == []


def test_ranked_list_adds_rank_column(tmp_path, toy_rules):
    path = tmp_path / "top.jsonl"
    ranked = top_k(toy_rules, Measure.WCC, 5)
    write_rules(ranked, path)
    records = [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()]
    assert [record["rank"] for record in records] == list(ranked.ranks)
    assert [r.rule for r in read_rules(path)] == [entry.rule for entry in ranked.entries]


def test_xlsx_export(tmp_path, toy_rules):
    path = tmp_path / "rules.xlsx"
    write_rules(toy_rules, path)
    df = pd.read_excel(path, sheet_name="rules", engine="openpyxl")
    assert len(df) == len(toy_rules)


def test_unwritable_path_is_a_data_error(tmp_path, toy_rules):
    with pytest.raises(DataError, match="cannot write"):
        write_rules(toy_rules, tmp_path / "missing" / "rules.csv")


def test_comparison_and_pairs_files(tmp_path, toy_rules):
    report = compare_lists(top_k(toy_rules, Measure.WCC, 3), top_k(toy_rules, Measure.CONF_LOWER, 6))
    comparison_path = tmp_path / "comparison.csv"
    write_comparison(report, comparison_path)
    df = pd.read_csv(comparison_path)
    assert len(df) == report.union_size
    assert set(df["label"]) <= {"only_a", "only_b", "both"}

    pairs_path = tmp_path / "pairs.csv"
    write_pairs(sample_rule_pairs(report.labeled, 3, seed=11), pairs_path)
    pairs = pd.read_csv(pairs_path)
    assert list(pairs["pair"]) == [1, 1, 2, 2, 3, 3]
    assert all(group["label"].nunique() == 2 for _, group in pairs.groupby("pair"))
