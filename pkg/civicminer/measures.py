"""Interestingness measures over a rule's frequency quadruple.

    conf         cf(X u Y) / cf(X)
    conf_lower   L(cf(X u Y), cf(X))
    casual_conf  1/2 [L(cf(X u Y), cf(X)) + L(cf(~X ~Y), cf(~X))]
    wcc          1/2 [w L(cf(X u Y), cf(X)) + (2 - w) L(cf(~X ~Y), cf(~X))]

L is the conservative bound from ``stats``. All measures share one alpha.
When X occurs in every transaction cf(~X) = 0 and the negative-evidence bound
is L(0, 0) = alpha.
"""

import logging
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import DataError
from .models import (
    ALL_MEASURES,
    Measure,
    MeasureConfig,
    RuleCount,
    RuleFrequencies,
    ScoredRule,
)
from .stats import lower_bound

logger = logging.getLogger(__name__)


def _require_antecedent(f: RuleFrequencies, measure: str) -> None:
    if f.cf_x < 1:
        raise DataError(f"undefined {measure}: cf(X) = 0")


def evidence_bounds(f: RuleFrequencies, alpha: float) -> Tuple[float, float]:
    """Conservative estimates of P(Y | X) and P(~Y | ~X)."""
    _require_antecedent(f, "confidence")
    positive = lower_bound(f.cf_xy, f.cf_x, alpha)
    negative = lower_bound(f.cf_not_x_not_y, f.cf_not_x, alpha)
    return positive, negative


def conf(f: RuleFrequencies, cfg: Optional[MeasureConfig] = None) -> float:
    _require_antecedent(f, "confidence")
    return f.cf_xy / f.cf_x


def conf_lower(f: RuleFrequencies, cfg: Optional[MeasureConfig] = None) -> float:
    cfg = cfg or MeasureConfig()
    _require_antecedent(f, "conservative confidence")
    return lower_bound(f.cf_xy, f.cf_x, cfg.alpha)


def casual_conf(f: RuleFrequencies, cfg: Optional[MeasureConfig] = None) -> float:
    cfg = cfg or MeasureConfig()
    positive, negative = evidence_bounds(f, cfg.alpha)
    return 0.5 * (positive + negative)


def wcc(f: RuleFrequencies, cfg: Optional[MeasureConfig] = None) -> float:
    cfg = cfg or MeasureConfig()
    if not 0.0 < cfg.w < 2.0:
        raise DataError(f"weight w={cfg.w} outside (0, 2)")
    positive, negative = evidence_bounds(f, cfg.alpha)
    return 0.5 * (cfg.w * positive + (2.0 - cfg.w) * negative)


MEASURE_FUNCTIONS: Dict[Measure, Callable[[RuleFrequencies, Optional[MeasureConfig]], float]] = {
    Measure.CONF: conf,
    Measure.CONF_LOWER: conf_lower,
    Measure.CASUAL_CONF: casual_conf,
    Measure.WCC: wcc,
}


def score(f: RuleFrequencies, cfg: MeasureConfig, measures: Sequence[Measure] = ALL_MEASURES) -> Dict[Measure, float]:
    return {measure: MEASURE_FUNCTIONS[measure](f, cfg) for measure in measures}


def score_rules(
    rule_counts: Iterable[RuleCount],
    n: int,
    cfg: Optional[MeasureConfig] = None,
    measures: Sequence[Measure] = ALL_MEASURES,
) -> List[ScoredRule]:
    """Attach frequencies and the requested scores to generated rules."""
    cfg = cfg or MeasureConfig()
    scored: List[ScoredRule] = []
    for rule_count in rule_counts:
        freq = RuleFrequencies(cf_x=rule_count.cf_x, cf_y=rule_count.cf_y, cf_xy=rule_count.cf_xy, n=n)
        scored.append(ScoredRule(rule=rule_count.rule, freq=freq, scores=score(freq, cfg, measures)))
    logger.info(f"Scored {len(scored)} rules under {', '.join(m.value for m in measures)}")
    return scored


def rescore(
    rules: Iterable[ScoredRule],
    cfg: Optional[MeasureConfig] = None,
    measures: Sequence[Measure] = ALL_MEASURES,
) -> List[ScoredRule]:
    """Recompute scores from stored frequencies, replacing any previous scores."""
    cfg = cfg or MeasureConfig()
    return [
        ScoredRule(rule=rule.rule, freq=rule.freq, scores=score(rule.freq, cfg, measures))
        for rule in rules
    ]


def formula(measure: Measure, f: RuleFrequencies, cfg: MeasureConfig) -> str:
    """Human-readable instantiation of a measure for one rule."""
    if measure == Measure.CONF:
        return f"cf(X u Y) / cf(X) = {f.cf_xy} / {f.cf_x}"
    if measure == Measure.CONF_LOWER:
        return f"L({f.cf_xy}, {f.cf_x}; alpha={cfg.alpha})"
    bounds = (
        f"L({f.cf_xy}, {f.cf_x}; alpha={cfg.alpha})",
        f"L({f.cf_not_x_not_y}, {f.cf_not_x}; alpha={cfg.alpha})",
    )
    if measure == Measure.CASUAL_CONF:
        return f"1/2 [{bounds[0]} + {bounds[1]}]"
    return f"1/2 [{cfg.w:g} * {bounds[0]} + {2.0 - cfg.w:g} * {bounds[1]}]"
