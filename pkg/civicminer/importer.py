"""Ingestion of questionnaire answers and previously written rule files.

Dataset records hold one respondent each::

    {"id": "r1", "issues": ["Sightseeing", "Traffic"], "techs": ["Open Data"]}
    {"id": "t1", "items": ["i_A", "i_B", "i_E", "i_F"]}

The first form builds an issue/tech database, the second a generic one. CSV
files use the same field names as columns, with ``;``-separated item lists.
"""

import json
import logging
from collections import Counter
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple, Union

import pandas as pd
from pydantic import ValidationError

from .errors import DataError
from .exporter import BASE_COLUMNS
from .input_validation import InputValidator
from .models import (
    ALL_MEASURES,
    ItemSet,
    Namespace,
    NamespaceMode,
    Rule,
    RuleFrequencies,
    ScoredRule,
    Transaction,
    TransactionDatabase,
)

logger = logging.getLogger(__name__)

ID_FIELD = "id"
FIELD_NAMESPACES = {
    "issues": Namespace.ISSUE,
    "techs": Namespace.TECH,
    "items": Namespace.GENERIC,
}

# (line number, record) pairs
NumberedRecord = Tuple[int, Dict[str, Any]]


def _first_error(exc: ValidationError) -> str:
    error = exc.errors()[0]
    return str(error.get("msg", exc)).removeprefix("Value error, ")


def _iter_jsonl(path: Path) -> Iterator[NumberedRecord]:
    with path.open("rb") as handle:
        for line_number, raw in enumerate(handle, start=1):
            try:
                line = raw.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise DataError(f"line {line_number}: invalid UTF-8 ({exc.reason})") from exc
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"line {line_number}: unparseable record ({exc.msg})") from exc
            if not isinstance(record, dict):
                raise DataError(f"line {line_number}: record must be a JSON object")
            yield line_number, record


def _iter_csv(path: Path) -> Iterator[NumberedRecord]:
    try:
        df = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as exc:
        raise DataError(f"unparseable CSV file {path}: {exc}") from exc

    list_columns = [c for c in df.columns if c in FIELD_NAMESPACES]
    for position, row in enumerate(df.to_dict(orient="records")):
        record: Dict[str, Any] = dict(row)
        for column in list_columns:
            names = InputValidator.split_item_field(record[column])
            try:
                record[column] = [InputValidator.sanitize_item_name(name, csv_field=True) for name in names]
            except DataError as exc:
                raise DataError(f"line {position + 2}: {exc.detail}") from exc
        # Header is line 1
        yield position + 2, record


def _collapse(names: Sequence[Any], line_number: int, respondent: str, field: str) -> List[str]:
    if not isinstance(names, list):
        raise DataError(f"line {line_number}: field '{field}' must be a list of item names")
    cleaned: List[str] = []
    for name in names:
        try:
            cleaned.append(InputValidator.sanitize_item_name(name))
        except DataError as exc:
            raise DataError(f"line {line_number}: {exc.detail}") from exc
    duplicates = [name for name, count in Counter(cleaned).items() if count > 1]
    if duplicates:
        logger.warning(
            f"line {line_number}: respondent '{respondent}' lists {', '.join(duplicates)} more than once in "
            f"'{field}'; duplicates collapsed"
        )
    return list(dict.fromkeys(cleaned))


def _build_database(records: Iterator[NumberedRecord], source: Path) -> TransactionDatabase:
    transactions: List[Transaction] = []
    seen_ids: Dict[str, int] = {}
    mode: Optional[NamespaceMode] = None

    for line_number, record in records:
        unknown = [key for key in record if key != ID_FIELD and key not in FIELD_NAMESPACES]
        if unknown:
            raise DataError(f"line {line_number}: unknown namespace tag '{unknown[0]}'")
        if ID_FIELD not in record:
            raise DataError(f"line {line_number}: record has no '{ID_FIELD}'")

        try:
            respondent = InputValidator.sanitize_identifier(record[ID_FIELD])
        except DataError as exc:
            raise DataError(f"line {line_number}: {exc.detail}") from exc
        if respondent in seen_ids:
            raise DataError(
                f"line {line_number}: duplicate respondent id '{respondent}' (first seen on line {seen_ids[respondent]})"
            )
        seen_ids[respondent] = line_number

        if "items" in record and ("issues" in record or "techs" in record):
            raise DataError(f"line {line_number}: 'items' cannot be combined with 'issues'/'techs'")
        # A record without list fields fits either mode
        if any(field in record for field in FIELD_NAMESPACES):
            record_mode = NamespaceMode.GENERIC if "items" in record else NamespaceMode.ISSUE_TECH
            if mode is not None and record_mode != mode:
                raise DataError(f"line {line_number}: record mixes generic and issue/tech datasets")
            mode = record_mode

        sides: Dict[str, ItemSet] = {}
        for field, namespace in FIELD_NAMESPACES.items():
            names = _collapse(record.get(field, []), line_number, respondent, field)
            sides[field] = ItemSet.of(namespace, names)

        try:
            transactions.append(
                Transaction(
                    id=respondent,
                    issue_items=sides["issues"],
                    tech_items=sides["techs"],
                    generic_items=sides["items"],
                )
            )
        except ValidationError as exc:
            raise DataError(f"line {line_number}: {_first_error(exc)}") from exc

    try:
        db = TransactionDatabase(transactions=tuple(transactions), mode=mode or NamespaceMode.ISSUE_TECH)
    except ValidationError as exc:
        raise DataError(f"{source}: {_first_error(exc)}") from exc
    logger.info(f"Loaded {db.n} transactions ({db.mode.value}) from {source}")
    return db


def load_dataset(path: Union[str, Path], file_format: Optional[str] = None) -> TransactionDatabase:
    """Read a questionnaire export into a TransactionDatabase."""
    path = Path(path)
    file_format = file_format or InputValidator.detect_format(path, allowed=["jsonl", "csv"])
    if not path.is_file():
        raise DataError(f"dataset {path} does not exist")

    if file_format == "jsonl":
        return _build_database(_iter_jsonl(path), path)
    if file_format == "csv":
        return _build_database(_iter_csv(path), path)
    raise DataError(f"unsupported dataset format '{file_format}'")


def _itemset_from_field(value: Any, namespace: str, line_number: int) -> ItemSet:
    try:
        return ItemSet.of(Namespace(namespace), InputValidator.split_item_field(value))
    except (ValueError, ValidationError) as exc:
        raise DataError(f"line {line_number}: invalid item set {value!r}: {exc}") from exc


def _rule_from_record(record: Dict[str, Any], line_number: int) -> ScoredRule:
    missing = [column for column in BASE_COLUMNS if column not in record]
    if missing:
        raise DataError(f"line {line_number}: rule record lacks {', '.join(missing)}")
    try:
        rule = Rule(
            antecedent=_itemset_from_field(record["antecedent"], record["antecedent_namespace"], line_number),
            consequent=_itemset_from_field(record["consequent"], record["consequent_namespace"], line_number),
        )
        freq = RuleFrequencies(
            cf_x=int(record["cf_x"]),
            cf_y=int(record["cf_y"]),
            cf_xy=int(record["cf_xy"]),
            n=int(record["n"]),
        )
        scores = {
            measure: float(record[measure.value])
            for measure in ALL_MEASURES
            if measure.value in record and record[measure.value] is not None
        }
        return ScoredRule(rule=rule, freq=freq, scores=scores)
    except ValidationError as exc:
        raise DataError(f"line {line_number}: {_first_error(exc)}") from exc
    except (TypeError, ValueError) as exc:
        raise DataError(f"line {line_number}: malformed rule record: {exc}") from exc


def read_rules(path: Union[str, Path], file_format: Optional[str] = None) -> List[ScoredRule]:
    """Read a rule file written by ``exporter.write_rules``."""
    path = Path(path)
    file_format = file_format or InputValidator.detect_format(path, allowed=["jsonl", "csv"])
    if not path.is_file():
        raise DataError(f"rule file {path} does not exist")

    if file_format == "jsonl":
        records = list(_iter_jsonl(path))
    elif file_format == "csv":
        try:
            df = pd.read_csv(
                path,
                dtype={"antecedent": str, "consequent": str},
                keep_default_na=False,
                float_precision="round_trip",
                encoding="utf-8",
            )
        except (pd.errors.ParserError, UnicodeDecodeError) as exc:
            raise DataError(f"unparseable rule file {path}: {exc}") from exc
        except pd.errors.EmptyDataError:
            return []
        records = [(position + 2, row) for position, row in enumerate(df.to_dict(orient="records"))]
    else:
        raise DataError(f"unsupported rule file format '{file_format}'")

    rules = [_rule_from_record(record, line_number) for line_number, record in records]
    logger.info(f"Read {len(rules)} rules from {path}")
    return rules
