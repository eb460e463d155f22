import json
from enum import Enum
from typing import Dict, Iterable, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .config import settings
from .input_validation import InputValidator


class Namespace(str, Enum):
    ISSUE = "issue"
    TECH = "tech"
    GENERIC = "generic"


class NamespaceMode(str, Enum):
    """How a database splits items between rule sides."""

    ISSUE_TECH = "issue_tech"  # antecedents are issues, consequents technologies
    GENERIC = "generic"  # one namespace, any disjoint split


class Measure(str, Enum):
    CONF = "conf"
    CONF_LOWER = "conf_lower"
    CASUAL_CONF = "casual_conf"
    WCC = "wcc"


ALL_MEASURES: Tuple[Measure, ...] = (
    Measure.CONF,
    Measure.CONF_LOWER,
    Measure.CASUAL_CONF,
    Measure.WCC,
)


class ComparisonLabel(str, Enum):
    ONLY_A = "only_a"
    ONLY_B = "only_b"
    BOTH = "both"


# ---------------------------
# Items and item sets
# ---------------------------


class Item(BaseModel):
    """One answer choice; compared case-sensitively after trimming."""

    model_config = ConfigDict(frozen=True)

    namespace: Namespace
    name: str

    @field_validator("name")
    @classmethod
    def _trim_name(cls, value: str) -> str:
        return InputValidator.sanitize_item_name(value)

    @property
    def sort_key(self) -> Tuple[str, str]:
        return (self.namespace.value, self.name)

    def __lt__(self, other: "Item") -> bool:
        if not isinstance(other, Item):
            return NotImplemented
        return self.sort_key < other.sort_key

    def __str__(self) -> str:
        return self.name


class ItemSet(BaseModel):
    """Canonically ordered, duplicate-free set of items from one namespace."""

    model_config = ConfigDict(frozen=True)

    items: Tuple[Item, ...] = ()

    @field_validator("items")
    @classmethod
    def _canonicalise(cls, value: Tuple[Item, ...]) -> Tuple[Item, ...]:
        unique = sorted(set(value), key=lambda item: item.sort_key)
        if len({item.namespace for item in unique}) > 1:
            raise ValueError("all items of an itemset must share one namespace")
        return tuple(unique)

    @classmethod
    def of(cls, namespace: Namespace, names: Iterable[str]) -> "ItemSet":
        return cls(items=tuple(Item(namespace=namespace, name=name) for name in names))

    @property
    def namespace(self) -> Optional[Namespace]:
        return self.items[0].namespace if self.items else None

    @property
    def names(self) -> List[str]:
        return [item.name for item in self.items]

    @property
    def sort_key(self) -> Tuple[Tuple[str, str], ...]:
        return tuple(item.sort_key for item in self.items)

    def issubset(self, other: "ItemSet") -> bool:
        return set(self.items).issubset(other.items)

    def isdisjoint(self, other: "ItemSet") -> bool:
        return set(self.items).isdisjoint(other.items)

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def __contains__(self, item: object) -> bool:
        return item in self.items

    def __str__(self) -> str:
        return "{" + ", ".join(self.names) + "}"


def canonical_encode(itemset: ItemSet) -> str:
    """Stable text key for an item set; equal sets give equal keys."""
    if not itemset.items:
        raise ValueError("empty itemset")
    pairs = [[item.namespace.value, item.name] for item in itemset.items]
    return json.dumps(pairs, ensure_ascii=False, separators=(",", ":"))


def canonical_decode(key: str) -> ItemSet:
    pairs = json.loads(key)
    return ItemSet(items=tuple(Item(namespace=Namespace(ns), name=name) for ns, name in pairs))


# ---------------------------
# Transactions
# ---------------------------


class Transaction(BaseModel):
    """One respondent's answer: chosen issues and technologies.

    Generic-mode transactions carry their items in ``generic_items`` and leave
    the two namespaced sides empty.
    """

    model_config = ConfigDict(frozen=True)

    id: str
    issue_items: ItemSet = ItemSet()
    tech_items: ItemSet = ItemSet()
    generic_items: ItemSet = ItemSet()

    @model_validator(mode="after")
    def _check_namespaces(self) -> "Transaction":
        for side, expected in (
            (self.issue_items, Namespace.ISSUE),
            (self.tech_items, Namespace.TECH),
            (self.generic_items, Namespace.GENERIC),
        ):
            if side.items and side.namespace != expected:
                raise ValueError(f"transaction {self.id}: expected {expected.value} items")
        if self.generic_items.items and (self.issue_items.items or self.tech_items.items):
            raise ValueError(f"transaction {self.id}: generic and namespaced items cannot be mixed")
        return self

    def contains(self, itemset: ItemSet) -> bool:
        """True when every item of ``itemset`` appears in this transaction."""
        present = set(self.issue_items.items) | set(self.tech_items.items) | set(self.generic_items.items)
        return present.issuperset(itemset.items)


class TransactionDatabase(BaseModel):
    """The database D of n transactions."""

    model_config = ConfigDict(frozen=True)

    transactions: Tuple[Transaction, ...]
    mode: NamespaceMode = NamespaceMode.ISSUE_TECH

    @model_validator(mode="after")
    def _check_transactions(self) -> "TransactionDatabase":
        seen = set()
        for transaction in self.transactions:
            if transaction.id in seen:
                raise ValueError(f"duplicate respondent id '{transaction.id}'")
            seen.add(transaction.id)
            if self.mode == NamespaceMode.GENERIC and (
                transaction.issue_items.items or transaction.tech_items.items
            ):
                raise ValueError(f"transaction {transaction.id}: namespaced items in a generic database")
            if self.mode == NamespaceMode.ISSUE_TECH and transaction.generic_items.items:
                raise ValueError(f"transaction {transaction.id}: generic items in an issue/tech database")
        return self

    @property
    def n(self) -> int:
        return len(self.transactions)

    def antecedent_side(self, transaction: Transaction) -> ItemSet:
        if self.mode == NamespaceMode.GENERIC:
            return transaction.generic_items
        return transaction.issue_items

    def consequent_side(self, transaction: Transaction) -> ItemSet:
        if self.mode == NamespaceMode.GENERIC:
            return transaction.generic_items
        return transaction.tech_items

    def item_namespaces(self) -> Tuple[Namespace, Namespace]:
        if self.mode == NamespaceMode.GENERIC:
            return (Namespace.GENERIC, Namespace.GENERIC)
        return (Namespace.ISSUE, Namespace.TECH)

    def vocabulary(self) -> List[Item]:
        items = set()
        for transaction in self.transactions:
            items.update(transaction.issue_items.items)
            items.update(transaction.tech_items.items)
            items.update(transaction.generic_items.items)
        return sorted(items, key=lambda item: item.sort_key)

    def support_count(self, itemset: ItemSet) -> int:
        """cf(S) by direct scan."""
        return sum(1 for transaction in self.transactions if transaction.contains(itemset))


class Rule(BaseModel):
    """Association rule X => Y."""

    model_config = ConfigDict(frozen=True)

    antecedent: ItemSet
    consequent: ItemSet

    @model_validator(mode="after")
    def _check_sides(self) -> "Rule":
        if not self.antecedent.items or not self.consequent.items:
            raise ValueError("both sides of a rule must be non-empty")
        if not self.antecedent.isdisjoint(self.consequent):
            raise ValueError("antecedent and consequent must be disjoint")
        return self

    @property
    def sort_key(self):
        return (self.antecedent.sort_key, self.consequent.sort_key)

    def __str__(self) -> str:
        return f"{self.antecedent} => {self.consequent}"


# ---------------------------
# Enumeration
# ---------------------------


class MiningConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    min_antecedent_count: int = Field(default=settings.DEFAULT_MIN_ANTECEDENT_COUNT, ge=1)
    min_cooccurrence: int = Field(default=settings.DEFAULT_MIN_COOCCURRENCE, ge=0)
    max_antecedent_size: Optional[int] = Field(default=None, ge=1)
    max_consequent_size: Optional[int] = Field(default=None, ge=1)
    pair_budget: Optional[int] = Field(default=None, ge=0)
    workers: int = Field(default=settings.MINING_WORKERS, ge=1)


class RuleCount(BaseModel):
    """A generated rule with its observed frequencies."""

    model_config = ConfigDict(frozen=True)

    rule: Rule
    cf_x: int
    cf_y: int
    cf_xy: int


# ---------------------------
# Statistics and measures
# ---------------------------


class BoundParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    k: int = Field(ge=0)
    n: int = Field(ge=0)
    alpha: float = Field(default=settings.DEFAULT_ALPHA, gt=0.0, lt=1.0)

    @model_validator(mode="after")
    def _check_k(self) -> "BoundParams":
        if self.k > self.n:
            raise ValueError(f"successes k={self.k} exceed trials n={self.n}")
        return self


class MeasureConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    alpha: float = Field(default=settings.DEFAULT_ALPHA, gt=0.0, lt=1.0)
    w: float = Field(default=settings.DEFAULT_W, gt=0.0, lt=2.0)
    measure: Measure = Measure.WCC


class RuleFrequencies(BaseModel):
    """The frequency quadruple (cf(X), cf(Y), cf(X u Y), n) of one rule."""

    model_config = ConfigDict(frozen=True)

    cf_x: int = Field(ge=0)
    cf_y: int = Field(ge=0)
    cf_xy: int = Field(ge=0)
    n: int = Field(ge=0)

    @model_validator(mode="after")
    def _check_counts(self) -> "RuleFrequencies":
        if self.cf_xy > min(self.cf_x, self.cf_y):
            raise ValueError("cf(X u Y) cannot exceed min(cf(X), cf(Y))")
        if self.cf_x > self.n or self.cf_y > self.n:
            raise ValueError("cf(X) and cf(Y) cannot exceed n")
        if self.cf_not_x_not_y < 0:
            raise ValueError("cf(not X, not Y) would be negative")
        return self

    @property
    def cf_not_x(self) -> int:
        return self.n - self.cf_x

    @property
    def cf_not_x_not_y(self) -> int:
        return self.n - self.cf_x - self.cf_y + self.cf_xy


class ScoredRule(BaseModel):
    model_config = ConfigDict(frozen=True)

    rule: Rule
    freq: RuleFrequencies
    scores: Dict[Measure, float] = {}

    @field_validator("scores")
    @classmethod
    def _check_scores(cls, value: Dict[Measure, float]) -> Dict[Measure, float]:
        for measure, score in value.items():
            if not 0.0 <= score <= 1.0:
                raise ValueError(f"{measure.value} score {score} outside [0, 1]")
        return value

    def score(self, measure: Measure) -> float:
        try:
            return self.scores[measure]
        except KeyError:
            raise KeyError(f"rule {self.rule} has no {measure.value} score") from None

    def __hash__(self) -> int:
        return hash(self.rule)


# ---------------------------
# Ranking and comparison
# ---------------------------


class RankedList(BaseModel):
    model_config = ConfigDict(frozen=True)

    measure: Measure
    entries: Tuple[ScoredRule, ...]
    # Competition ranks (1, 2, 3, 3, 5) aligned with entries
    ranks: Tuple[int, ...] = ()

    @model_validator(mode="after")
    def _check_order(self) -> "RankedList":
        scores = [entry.score(self.measure) for entry in self.entries]
        if any(later > earlier for earlier, later in zip(scores, scores[1:])):
            raise ValueError("ranked list scores must be non-increasing")
        if len({entry.rule for entry in self.entries}) != len(self.entries):
            raise ValueError("ranked list contains duplicate rules")
        if self.ranks and len(self.ranks) != len(self.entries):
            raise ValueError("ranks must align with entries")
        return self

    def __len__(self) -> int:
        return len(self.entries)


class LabeledRule(BaseModel):
    model_config = ConfigDict(frozen=True)

    rule: ScoredRule
    label: ComparisonLabel


class ComparisonReport(BaseModel):
    """Union of two ranked lists with provenance labels."""

    model_config = ConfigDict(frozen=True)

    measure_a: Measure
    measure_b: Measure
    labeled: Tuple[LabeledRule, ...]
    intersection_size: int
    union_size: int

    def count(self, label: ComparisonLabel) -> int:
        return sum(1 for entry in self.labeled if entry.label == label)


# ---------------------------
# Service results
# ---------------------------


class MiningResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    rules: Tuple[ScoredRule, ...]
    measures: Tuple[Measure, ...]
    n: int
    pair_count: int
    enumerated_pairs: int
    execution_time: float


class RuleExplanation(BaseModel):
    """Audit view of one rule: every frequency, bound and formula."""

    model_config = ConfigDict(frozen=True)

    rule: Rule
    freq: RuleFrequencies
    alpha: float
    w: float
    measure: Measure = Measure.WCC
    positive_bound: Optional[float] = None
    negative_bound: Optional[float] = None
    scores: Dict[Measure, float] = {}
    formulas: Dict[Measure, str] = {}
