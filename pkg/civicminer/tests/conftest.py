from pathlib import Path

import pytest

from civicminer.importer import load_dataset
from civicminer.models import ItemSet, Namespace, Rule

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def toy_path() -> Path:
    return FIXTURES / "toy_database.jsonl"


@pytest.fixture
def toy_db(toy_path):
    return load_dataset(toy_path)


@pytest.fixture
def example_path() -> Path:
    return FIXTURES / "questionnaire_example.jsonl"


@pytest.fixture
def sample_csv_path() -> Path:
    return FIXTURES / "questionnaire_sample.csv"


def generic(*names: str) -> ItemSet:
    return ItemSet.of(Namespace.GENERIC, names)


def generic_rule(antecedent: str, consequent: str) -> Rule:
    return Rule(antecedent=generic(antecedent), consequent=generic(consequent))
