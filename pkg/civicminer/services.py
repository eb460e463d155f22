import logging
import time
from typing import Iterable, List, Optional, Sequence, Tuple

from .enumeration import count_frequencies, generate_rules
from .errors import DataError
from .measures import evidence_bounds, formula, rescore, score, score_rules
from .models import (
    ALL_MEASURES,
    ComparisonReport,
    ItemSet,
    LabeledRule,
    Measure,
    MeasureConfig,
    MiningConfig,
    MiningResult,
    RankedList,
    Rule,
    RuleExplanation,
    RuleFrequencies,
    ScoredRule,
    TransactionDatabase,
)
from .ranking import compare_lists, sample_rule_pairs, top_k

logger = logging.getLogger(__name__)


class MiningService:
    """Pipeline steps shared by the command line and library callers."""

    @staticmethod
    def mine(
        db: TransactionDatabase,
        mining_cfg: Optional[MiningConfig] = None,
        measure_cfg: Optional[MeasureConfig] = None,
        measures: Sequence[Measure] = ALL_MEASURES,
    ) -> MiningResult:
        start_time = time.time()
        mining_cfg = mining_cfg or MiningConfig()
        measure_cfg = measure_cfg or MeasureConfig()

        ft = count_frequencies(db, mining_cfg)
        rules = score_rules(generate_rules(ft), ft.n, measure_cfg, measures)

        execution_time = time.time() - start_time
        logger.info(f"Mined {len(rules)} rules from {db.n} transactions in {execution_time:.3f}s")
        return MiningResult(
            rules=tuple(rules),
            measures=tuple(measures),
            n=db.n,
            pair_count=len(rules),
            enumerated_pairs=ft.enumerated_pairs,
            execution_time=execution_time,
        )

    @staticmethod
    def rescore(
        rules: Iterable[ScoredRule],
        measure_cfg: Optional[MeasureConfig] = None,
        measures: Sequence[Measure] = ALL_MEASURES,
    ) -> List[ScoredRule]:
        return rescore(rules, measure_cfg, measures)

    @staticmethod
    def rank(rules: Iterable[ScoredRule], measure: Measure, k: int) -> RankedList:
        return top_k(rules, measure, k)

    @staticmethod
    def compare(
        rules_a: Iterable[ScoredRule],
        rules_b: Iterable[ScoredRule],
        measure_a: Measure,
        measure_b: Measure,
        k: int,
    ) -> ComparisonReport:
        """Top-k of each rule collection under its own measure, then their labeled union."""
        return compare_lists(top_k(rules_a, measure_a, k), top_k(rules_b, measure_b, k))

    @staticmethod
    def sample_pairs(
        report: ComparisonReport, count: int, seed: int
    ) -> List[Tuple[LabeledRule, LabeledRule]]:
        return sample_rule_pairs(report.labeled, count, seed)

    @staticmethod
    def parse_rule(db: TransactionDatabase, antecedent: Sequence[str], consequent: Sequence[str]) -> Rule:
        """Build a rule from item names, checking every name against the dataset vocabulary."""
        antecedent_ns, consequent_ns = db.item_namespaces()
        vocabulary = set(db.vocabulary())
        sides = []
        for namespace, names in ((antecedent_ns, antecedent), (consequent_ns, consequent)):
            try:
                side = ItemSet.of(namespace, names)
            except ValueError as exc:
                raise DataError(f"invalid item name in rule: {exc}") from exc
            unknown = [item.name for item in side.items if item not in vocabulary]
            if unknown:
                raise DataError(f"unknown {namespace.value} item '{unknown[0]}'")
            sides.append(side)
        try:
            return Rule(antecedent=sides[0], consequent=sides[1])
        except ValueError as exc:
            raise DataError(f"invalid rule: {exc}") from exc

    @staticmethod
    def explain(db: TransactionDatabase, rule: Rule, measure_cfg: Optional[MeasureConfig] = None) -> RuleExplanation:
        """Frequencies, both evidence bounds and every measure for one rule, by direct scan."""
        measure_cfg = measure_cfg or MeasureConfig()
        freq = RuleFrequencies(
            cf_x=db.support_count(rule.antecedent),
            cf_y=db.support_count(rule.consequent),
            cf_xy=sum(
                1
                for transaction in db.transactions
                if transaction.contains(rule.antecedent) and transaction.contains(rule.consequent)
            ),
            n=db.n,
        )
        if freq.cf_x < 1:
            raise DataError(f"antecedent {rule.antecedent} never occurs; measures are undefined")

        positive, negative = evidence_bounds(freq, measure_cfg.alpha)
        return RuleExplanation(
            rule=rule,
            freq=freq,
            alpha=measure_cfg.alpha,
            w=measure_cfg.w,
            measure=measure_cfg.measure,
            positive_bound=positive,
            negative_bound=negative,
            scores=score(freq, measure_cfg, ALL_MEASURES),
            formulas={measure: formula(measure, freq, measure_cfg) for measure in ALL_MEASURES},
        )
