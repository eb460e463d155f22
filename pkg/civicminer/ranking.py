"""Top-K extraction and cross-measure list comparison."""

import logging
import random
from typing import Dict, Iterable, List, Sequence, Tuple

from .errors import DataError, UsageError
from .models import (
    ComparisonLabel,
    ComparisonReport,
    LabeledRule,
    Measure,
    RankedList,
    Rule,
    ScoredRule,
)

logger = logging.getLogger(__name__)


def ranking_key(rule: ScoredRule, measure: Measure):
    """Score descending, then cf(X u Y) descending, then canonical antecedent and consequent."""
    return (-rule.score(measure), -rule.freq.cf_xy, rule.rule.antecedent.sort_key, rule.rule.consequent.sort_key)


def competition_ranks(scores_desc: Sequence[float]) -> Tuple[int, ...]:
    """Competition ranks for descending scores: [9.0, 8.1, 7.2, 7.2, 6.0] -> (1, 2, 3, 3, 5)."""
    ranks: List[int] = []
    for position, value in enumerate(scores_desc):
        if position and value == scores_desc[position - 1]:
            ranks.append(ranks[-1])
        else:
            ranks.append(position + 1)
    return tuple(ranks)


def top_k(rules: Iterable[ScoredRule], measure: Measure, k: int) -> RankedList:
    """The k best rules under ``measure`` with a deterministic tie-break."""
    if k < 1:
        raise UsageError(f"k must be at least 1, got {k}")

    candidates = list(rules)
    missing = [rule for rule in candidates if measure not in rule.scores]
    if missing:
        raise DataError(f"{len(missing)} rule(s) carry no {measure.value} score, e.g. {missing[0].rule}")

    # One entry per rule; the first occurrence wins
    unique: Dict[Rule, ScoredRule] = {}
    for rule in candidates:
        unique.setdefault(rule.rule, rule)

    ordered = sorted(unique.values(), key=lambda rule: ranking_key(rule, measure))[:k]
    ranks = competition_ranks([rule.score(measure) for rule in ordered])
    return RankedList(measure=measure, entries=tuple(ordered), ranks=ranks)


def _merge_scores(first: ScoredRule, second: ScoredRule) -> ScoredRule:
    if first.scores.keys() >= second.scores.keys():
        return first
    merged = dict(second.scores)
    merged.update(first.scores)
    return ScoredRule(rule=first.rule, freq=first.freq, scores=merged)


def compare_lists(a: RankedList, b: RankedList) -> ComparisonReport:
    """Union of two ranked lists, each rule labeled by the list(s) holding it.

    Rules keep list ``a``'s order, followed by the rules found only in ``b``
    in ``b``'s order.
    """
    in_a = {entry.rule: entry for entry in a.entries}
    in_b = {entry.rule: entry for entry in b.entries}

    labeled: List[LabeledRule] = []
    for entry in a.entries:
        if entry.rule in in_b:
            labeled.append(LabeledRule(rule=_merge_scores(entry, in_b[entry.rule]), label=ComparisonLabel.BOTH))
        else:
            labeled.append(LabeledRule(rule=entry, label=ComparisonLabel.ONLY_A))
    for entry in b.entries:
        if entry.rule not in in_a:
            labeled.append(LabeledRule(rule=entry, label=ComparisonLabel.ONLY_B))

    intersection = sum(1 for rule in in_a if rule in in_b)
    report = ComparisonReport(
        measure_a=a.measure,
        measure_b=b.measure,
        labeled=tuple(labeled),
        intersection_size=intersection,
        union_size=len(labeled),
    )
    logger.info(
        f"Compared {a.measure.value} ({len(a)}) with {b.measure.value} ({len(b)}): "
        f"{intersection} shared, union {len(labeled)}"
    )
    return report


def _label_groups(union: Sequence[LabeledRule]) -> List[List[int]]:
    groups: Dict[ComparisonLabel, List[int]] = {}
    for position, entry in enumerate(union):
        groups.setdefault(entry.label, []).append(position)
    return [groups[label] for label in ComparisonLabel if label in groups]


def sample_rule_pairs(union: Sequence[LabeledRule], count: int, seed: int) -> List[Tuple[LabeledRule, LabeledRule]]:
    """Draw ``count`` two-rule sets with different labels from one seeded generator.

    Each draw is uniform over unordered pairs of differently labeled rules;
    draws are independent, so a pair may repeat. A draw first picks two label
    groups with probability proportional to the product of their sizes, then
    one rule from each.
    """
    if count < 1:
        raise UsageError(f"pair count must be at least 1, got {count}")
    groups = _label_groups(union)
    if len(groups) < 2:
        labels = sorted({entry.label.value for entry in union})
        raise DataError(f"need rules with at least two different labels, found {labels}")

    group_pairs = [(a, b) for a in range(len(groups)) for b in range(a + 1, len(groups))]
    weights = [len(groups[a]) * len(groups[b]) for a, b in group_pairs]
    rng = random.Random(seed)
    drawn = []
    for _ in range(count):
        a, b = rng.choices(group_pairs, weights=weights)[0]
        i, j = sorted((rng.choice(groups[a]), rng.choice(groups[b])))
        drawn.append((union[i], union[j]))
    return drawn


def sample_rule_pair(union: Sequence[LabeledRule], seed: int) -> Tuple[LabeledRule, LabeledRule]:
    """One uniformly drawn two-rule set with different labels."""
    return sample_rule_pairs(union, 1, seed)[0]
