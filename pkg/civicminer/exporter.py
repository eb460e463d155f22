"""Serialization of scored rules, ranked lists and comparison reports.

Rule files carry one row per rule: both sides as ``;``-joined item names with
their namespaces, the frequency quadruple, an optional competition rank, and
for every computed measure a full-precision column plus a 3-decimal
``<measure>_display`` column. CSV and JSONL files read back bit-for-bit with
``importer.read_rules``; XLSX is an export-only format.
"""

import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import pandas as pd

from .config import settings
from .errors import DataError
from .input_validation import InputValidator
from .models import (
    ALL_MEASURES,
    ComparisonLabel,
    ComparisonReport,
    LabeledRule,
    Measure,
    RankedList,
    ScoredRule,
)

logger = logging.getLogger(__name__)

STDOUT_PATH = "-"

BASE_COLUMNS = [
    "antecedent",
    "antecedent_namespace",
    "consequent",
    "consequent_namespace",
    "cf_x",
    "cf_y",
    "cf_xy",
    "n",
]


def display_value(score: float) -> str:
    return f"{score:.{settings.DISPLAY_DECIMALS}f}"


def measures_present(rules: Sequence[ScoredRule]) -> List[Measure]:
    """Measures scored on every rule, in canonical order."""
    if not rules:
        return []
    return [m for m in ALL_MEASURES if all(m in rule.scores for rule in rules)]


def rule_columns(measures: Sequence[Measure], ranked: bool = False) -> List[str]:
    columns = list(BASE_COLUMNS)
    if ranked:
        columns.insert(0, "rank")
    for measure in measures:
        columns.extend([measure.value, f"{measure.value}_display"])
    return columns


def rule_record(rule: ScoredRule, measures: Sequence[Measure], rank: Optional[int] = None) -> Dict[str, Any]:
    antecedent, consequent = rule.rule.antecedent, rule.rule.consequent
    record: Dict[str, Any] = {}
    if rank is not None:
        record["rank"] = rank
    record.update(
        {
            "antecedent": InputValidator.ITEM_SEPARATOR.join(antecedent.names),
            "antecedent_namespace": antecedent.namespace.value,
            "consequent": InputValidator.ITEM_SEPARATOR.join(consequent.names),
            "consequent_namespace": consequent.namespace.value,
            "cf_x": rule.freq.cf_x,
            "cf_y": rule.freq.cf_y,
            "cf_xy": rule.freq.cf_xy,
            "n": rule.freq.n,
        }
    )
    for measure in measures:
        value = rule.score(measure)
        record[measure.value] = value
        record[f"{measure.value}_display"] = display_value(value)
    return record


def resolve_format(path: Union[str, Path], file_format: Optional[str] = None) -> str:
    """Output format for ``path``: explicit, csv on stdout, otherwise from the extension."""
    if file_format:
        return file_format
    if str(path) == STDOUT_PATH:
        return "csv"
    return InputValidator.detect_format(path, allowed=["csv", "jsonl", "xlsx"])


def _write_records(
    records: List[Dict[str, Any]],
    columns: List[str],
    path: Union[str, Path],
    file_format: str,
    sheet_name: str = "rules",
) -> None:
    to_stdout = str(path) == STDOUT_PATH
    try:
        if file_format == "jsonl":
            lines = "".join(json.dumps(record, ensure_ascii=False) + "\n" for record in records)
            if to_stdout:
                sys.stdout.write(lines)
            else:
                Path(path).write_text(lines, encoding="utf-8")
            return

        df = pd.DataFrame(records, columns=columns)
        if file_format == "csv":
            df.to_csv(sys.stdout if to_stdout else path, index=False, encoding="utf-8", lineterminator="\n")
        elif file_format == "xlsx":
            if to_stdout:
                raise DataError("xlsx output needs a file path")
            df.to_excel(path, index=False, sheet_name=sheet_name, engine="openpyxl")
        else:
            raise DataError(f"unsupported output format '{file_format}'")
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc}") from exc


def write_rules(
    rules: Union[Sequence[ScoredRule], RankedList],
    path: Union[str, Path],
    file_format: Optional[str] = None,
    measures: Optional[Sequence[Measure]] = None,
) -> None:
    """Write rules in their given order; ranked lists add a ``rank`` column."""
    file_format = resolve_format(path, file_format)
    ranks: Tuple[Optional[int], ...]
    if isinstance(rules, RankedList):
        entries = list(rules.entries)
        ranks = rules.ranks or tuple(range(1, len(entries) + 1))
        ranked = True
    else:
        entries = list(rules)
        ranks = (None,) * len(entries)
        ranked = False

    measures = list(measures) if measures is not None else measures_present(entries)
    columns = rule_columns(measures, ranked=ranked)
    records = [rule_record(rule, measures, rank) for rule, rank in zip(entries, ranks)]
    _write_records(records, columns, path, file_format)
    logger.info(f"Wrote {len(records)} rules to {path} ({file_format})")


def write_comparison(
    report: ComparisonReport,
    path: Union[str, Path],
    file_format: Optional[str] = None,
) -> None:
    """Write the labeled union of two ranked lists, one row per rule."""
    file_format = resolve_format(path, file_format)
    entries = [labeled.rule for labeled in report.labeled]
    measures = measures_present(entries)
    columns = ["label"] + rule_columns(measures)
    records = [
        {"label": labeled.label.value, **rule_record(labeled.rule, measures)}
        for labeled in report.labeled
    ]
    _write_records(records, columns, path, file_format, sheet_name="comparison")
    logger.info(f"Wrote comparison of {report.union_size} rules to {path} ({file_format})")


def write_pairs(
    pairs: Sequence[Tuple[LabeledRule, LabeledRule]],
    path: Union[str, Path],
    file_format: Optional[str] = None,
) -> None:
    """Write sampled two-rule sets as two consecutive rows sharing a ``pair`` number."""
    file_format = resolve_format(path, file_format)
    entries = [labeled.rule for pair in pairs for labeled in pair]
    measures = measures_present(entries)
    columns = ["pair", "position", "label"] + rule_columns(measures)
    records = [
        {"pair": number, "position": position, "label": labeled.label.value, **rule_record(labeled.rule, measures)}
        for number, pair in enumerate(pairs, start=1)
        for position, labeled in enumerate(pair, start=1)
    ]
    _write_records(records, columns, path, file_format, sheet_name="pairs")
    logger.info(f"Wrote {len(pairs)} rule pairs to {path} ({file_format})")


def comparison_summary(report: ComparisonReport) -> Dict[str, Any]:
    return {
        "measure_a": report.measure_a.value,
        "measure_b": report.measure_b.value,
        "intersection_size": report.intersection_size,
        "union_size": report.union_size,
        "only_a": report.count(ComparisonLabel.ONLY_A),
        "only_b": report.count(ComparisonLabel.ONLY_B),
        "both": report.count(ComparisonLabel.BOTH),
    }
