import re
from pathlib import Path
from typing import List, Optional, Union

from .errors import DataError, UsageError



class InputValidator:
    """Validation and normalisation of questionnaire labels and file names"""

    # `;` separates items inside a list field; `,` is the CSV delimiter
    ITEM_SEPARATOR = ";"
    CSV_DELIMITER = ","

    CONTROL_CHAR_PATTERN = re.compile(r"[\x00-\x08\x0B\x0C\x0E-\x1F\x7F\n\r\t]")

    MAX_ITEM_NAME_LENGTH = 200
    MAX_IDENTIFIER_LENGTH = 100

    SUPPORTED_EXTENSIONS = {
        "jsonl": "jsonl",
        "ndjson": "jsonl",
        "json": "jsonl",
        "csv": "csv",
        "xlsx": "xlsx",
    }

    @staticmethod
    def sanitize_item_name(value: str, csv_field: bool = False) -> str:
        """Trim an item label and reject names the file formats cannot carry.

        Names read from CSV cells may not contain the CSV delimiter either.
        """
        if not isinstance(value, str):
            raise DataError(f"Item name must be a string, got {type(value).__name__}")

        name = value.strip()
        if not name:
            raise DataError("Item name is empty after trimming")

        if len(name) > InputValidator.MAX_ITEM_NAME_LENGTH:
            raise DataError(
                f"Item name too long. Maximum length is {InputValidator.MAX_ITEM_NAME_LENGTH} characters"
            )

        if InputValidator.CONTROL_CHAR_PATTERN.search(name):
            raise DataError(f"Item name contains control characters: {name[:50]!r}")

        reserved = [InputValidator.ITEM_SEPARATOR]
        if csv_field:
            reserved.append(InputValidator.CSV_DELIMITER)
        for separator in reserved:
            if separator in name:
                raise DataError(f"Item name {name!r} contains reserved separator {separator!r}")

        return name

    @staticmethod
    def sanitize_identifier(value: Union[str, int]) -> str:
        """Normalise a respondent id to a trimmed, non-empty string"""
        if isinstance(value, bool) or not isinstance(value, (str, int)):
            raise DataError(f"Respondent id must be a string or integer, got {type(value).__name__}")

        identifier = str(value).strip()
        if not identifier:
            raise DataError("Respondent id is empty")

        if len(identifier) > InputValidator.MAX_IDENTIFIER_LENGTH:
            raise DataError(
                f"Respondent id too long. Maximum length is {InputValidator.MAX_IDENTIFIER_LENGTH} characters"
            )

        return identifier

    @staticmethod
    def split_item_field(value: Optional[str]) -> List[str]:
        """Split a `;`-separated CSV item-list cell; blank cells are empty lists"""
        if value is None:
            return []
        text = str(value).strip()
        if not text:
            return []
        return [part for part in (p.strip() for p in text.split(InputValidator.ITEM_SEPARATOR)) if part]

    @staticmethod
    def detect_format(path: Union[str, Path], allowed: Optional[List[str]] = None) -> str:
        """Infer a file format from its extension"""
        suffix = Path(str(path)).suffix.lower().lstrip(".")
        file_format = InputValidator.SUPPORTED_EXTENSIONS.get(suffix)
        if file_format is None:
            raise UsageError(f"Cannot infer file format from extension '.{suffix}' of {path}")

        if allowed and file_format not in allowed:
            raise UsageError(
                f"Format '{file_format}' is not supported here. Allowed: {', '.join(allowed)}"
            )

        return file_format
