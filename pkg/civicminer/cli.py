#!/usr/bin/env python3
"""
Command-line front end.

    python -m civicminer mine --input answers.jsonl --output rules.csv
    python -m civicminer rank --rules rules.csv --measure wcc --k 30
    python -m civicminer compare --rules-a rules.csv --measure-a wcc --measure-b conf --pairs 20 --seed 7
    python -m civicminer explain --input answers.jsonl --antecedent "Traffic" --consequent "Open Data"

Data goes to stdout (or --output); summaries and logs go to stderr. Exit
status: 0 success, 1 usage error, 2 data error, 3 pair budget exceeded.
"""

import argparse
import logging
import sys
from typing import List, NoReturn, Optional, Sequence

from pydantic import ValidationError

from .config import settings
from .errors import BudgetExceededError, MinerError, UsageError
from .exporter import (
    STDOUT_PATH,
    comparison_summary,
    display_value,
    resolve_format,
    write_comparison,
    write_pairs,
    write_rules,
)
from .failure_tracker import FailureTracker
from .importer import load_dataset, read_rules
from .input_validation import InputValidator
from .logging_config import setup_logging
from .models import ALL_MEASURES, Measure, MeasureConfig, MiningConfig
from .services import MiningService

logger = logging.getLogger(__name__)

MEASURE_CHOICES = [measure.value for measure in ALL_MEASURES]
DATASET_FORMATS = ["jsonl", "csv"]
OUTPUT_FORMATS = ["csv", "jsonl", "xlsx"]


class MinerArgumentParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with status 1."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(UsageError.exit_code, f"{self.prog}: error: {message}\n")


def _add_logging_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--log-level", type=str.upper, choices=["DEBUG", "INFO", "WARNING", "ERROR"],
                        help=f"Log level (default: {settings.LOG_LEVEL})")
    parser.add_argument("--log-dir", type=str, help="Directory for rotating JSON logs and failures.log")
    parser.add_argument("--log-json", action="store_true", help="Emit console logs as JSON")


def _add_measure_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--alpha", type=float, default=settings.DEFAULT_ALPHA,
                        help=f"Lower-bound level of the conservative estimates (default: {settings.DEFAULT_ALPHA})")
    parser.add_argument("--w", type=float, default=settings.DEFAULT_W,
                        help=f"Positive-evidence weight of wcc, in (0, 2) (default: {settings.DEFAULT_W})")


def _add_output_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--output", type=str, default=STDOUT_PATH, help="Output file, '-' for stdout (default)")
    parser.add_argument("--output-format", choices=OUTPUT_FORMATS,
                        help="Output format (default: from the output extension, csv on stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = MinerArgumentParser(
        prog="civicminer",
        description="Mine and rank issue => technology association rules from questionnaire answers",
    )
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=MinerArgumentParser)
    subparsers.required = True

    mine = subparsers.add_parser("mine", help="Enumerate rules from a dataset and score them")
    mine.add_argument("--input", required=True, help="Dataset file (.jsonl or .csv)")
    mine.add_argument("--format", choices=DATASET_FORMATS, help="Dataset format (default: from extension)")
    mine.add_argument("--measure", action="append", choices=MEASURE_CHOICES,
                      help="Measure to compute; repeatable (default: all four)")
    _add_measure_flags(mine)
    mine.add_argument("--min-antecedent-count", type=int, default=settings.DEFAULT_MIN_ANTECEDENT_COUNT,
                      help=f"Minimum cf(X) of an antecedent (default: {settings.DEFAULT_MIN_ANTECEDENT_COUNT})")
    mine.add_argument("--min-cooccurrence", type=int, default=settings.DEFAULT_MIN_COOCCURRENCE,
                      help="Minimum cf(X u Y) of an emitted rule, classical minsup (default: 0)")
    mine.add_argument("--max-antecedent-size", type=int, help="Largest antecedent itemset (default: unbounded)")
    mine.add_argument("--max-consequent-size", type=int, help="Largest consequent itemset (default: unbounded)")
    mine.add_argument("--pair-budget", type=int, help="Abort when more pairs than this would be enumerated")
    mine.add_argument("--workers", type=int, default=settings.MINING_WORKERS,
                      help=f"Counting processes (default: {settings.MINING_WORKERS})")
    _add_output_flags(mine)
    _add_logging_flags(mine)

    score = subparsers.add_parser("score", help="Recompute measures of a stored rule file")
    score.add_argument("--rules", required=True, help="Rule file written by mine (.csv or .jsonl)")
    score.add_argument("--measure", action="append", choices=MEASURE_CHOICES,
                       help="Measure to compute; repeatable (default: all four)")
    _add_measure_flags(score)
    _add_output_flags(score)
    _add_logging_flags(score)

    rank = subparsers.add_parser("rank", help="Top-k rules of a stored rule file under one measure")
    rank.add_argument("--rules", required=True, help="Rule file written by mine or score")
    rank.add_argument("--measure", choices=MEASURE_CHOICES, default=Measure.WCC.value,
                      help="Ranking measure (default: wcc)")
    rank.add_argument("--k", type=int, default=settings.DEFAULT_TOP_K,
                      help=f"List length (default: {settings.DEFAULT_TOP_K})")
    _add_output_flags(rank)
    _add_logging_flags(rank)

    compare = subparsers.add_parser("compare", help="Compare the top-k lists of two measures")
    compare.add_argument("--rules-a", required=True, help="Rule file ranked under --measure-a")
    compare.add_argument("--rules-b", help="Rule file ranked under --measure-b (default: --rules-a)")
    compare.add_argument("--measure-a", choices=MEASURE_CHOICES, default=Measure.WCC.value)
    compare.add_argument("--measure-b", choices=MEASURE_CHOICES, default=Measure.CONF.value)
    compare.add_argument("--k", type=int, default=settings.DEFAULT_TOP_K,
                         help=f"List length per measure (default: {settings.DEFAULT_TOP_K})")
    compare.add_argument("--pairs", type=int, default=0,
                         help="Also draw this many differently labeled rule pairs (default: 0)")
    compare.add_argument("--seed", type=int, default=0, help="Seed of the pair sampler (default: 0)")
    compare.add_argument("--pairs-output", type=str, help="File for the sampled pairs (required with --pairs)")
    _add_output_flags(compare)
    _add_logging_flags(compare)

    explain = subparsers.add_parser("explain", help="Show the frequencies and measure formulas of one rule")
    explain.add_argument("--input", required=True, help="Dataset file (.jsonl or .csv)")
    explain.add_argument("--format", choices=DATASET_FORMATS, help="Dataset format (default: from extension)")
    explain.add_argument("--antecedent", required=True, help="';'-separated antecedent items")
    explain.add_argument("--consequent", required=True, help="';'-separated consequent items")
    explain.add_argument("--measure", choices=MEASURE_CHOICES, default=Measure.WCC.value,
                         help="Measure reported as the rule's score (default: wcc)")
    _add_measure_flags(explain)
    _add_logging_flags(explain)

    return parser


def _measures(values: Optional[List[str]]) -> List[Measure]:
    if not values:
        return list(ALL_MEASURES)
    chosen = {Measure(value) for value in values}
    return [measure for measure in ALL_MEASURES if measure in chosen]


def _measure_config(args: argparse.Namespace, measure: Optional[str] = None) -> MeasureConfig:
    try:
        if measure is None:
            return MeasureConfig(alpha=args.alpha, w=args.w)
        return MeasureConfig(alpha=args.alpha, w=args.w, measure=Measure(measure))
    except ValidationError as exc:
        raise UsageError(f"invalid measure parameters: {exc.errors()[0]['msg']}") from exc


def _mining_config(args: argparse.Namespace) -> MiningConfig:
    try:
        return MiningConfig(
            min_antecedent_count=args.min_antecedent_count,
            min_cooccurrence=args.min_cooccurrence,
            max_antecedent_size=args.max_antecedent_size,
            max_consequent_size=args.max_consequent_size,
            pair_budget=args.pair_budget,
            workers=args.workers,
        )
    except ValidationError as exc:
        error = exc.errors()[0]
        field = ".".join(str(part) for part in error.get("loc", ()))
        raise UsageError(f"invalid mining parameter {field}: {error['msg']}") from exc


def cmd_mine(args: argparse.Namespace) -> int:
    mining_cfg = _mining_config(args)
    measure_cfg = _measure_config(args)
    output_format = resolve_format(args.output, args.output_format)
    db = load_dataset(args.input, args.format)
    result = MiningService.mine(db, mining_cfg, measure_cfg, _measures(args.measure))
    write_rules(list(result.rules), args.output, output_format, measures=result.measures)
    print(
        f"mined {result.pair_count} rules from {result.n} transactions "
        f"({result.enumerated_pairs} pairs enumerated) in {result.execution_time:.3f}s",
        file=sys.stderr,
    )
    return 0


def cmd_score(args: argparse.Namespace) -> int:
    measure_cfg = _measure_config(args)
    measures = _measures(args.measure)
    output_format = resolve_format(args.output, args.output_format)
    rules = MiningService.rescore(read_rules(args.rules), measure_cfg, measures)
    write_rules(rules, args.output, output_format, measures=measures)
    print(f"scored {len(rules)} rules under {', '.join(m.value for m in measures)}", file=sys.stderr)
    return 0


def cmd_rank(args: argparse.Namespace) -> int:
    measure = Measure(args.measure)
    output_format = resolve_format(args.output, args.output_format)
    ranked = MiningService.rank(read_rules(args.rules), measure, args.k)
    write_rules(ranked, args.output, output_format)
    print(f"ranked top {len(ranked)} rules under {measure.value}", file=sys.stderr)
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    if args.pairs < 0:
        raise UsageError(f"--pairs must not be negative, got {args.pairs}")
    if args.pairs and not args.pairs_output:
        raise UsageError("--pairs needs --pairs-output")
    output_format = resolve_format(args.output, args.output_format)
    pairs_format = resolve_format(args.pairs_output) if args.pairs else None

    rules_a = read_rules(args.rules_a)
    rules_b = read_rules(args.rules_b) if args.rules_b else rules_a
    report = MiningService.compare(rules_a, rules_b, Measure(args.measure_a), Measure(args.measure_b), args.k)
    pairs = MiningService.sample_pairs(report, args.pairs, args.seed) if args.pairs else []
    write_comparison(report, args.output, output_format)

    summary = comparison_summary(report)
    print(
        f"{summary['measure_a']} vs {summary['measure_b']}: union {summary['union_size']}, "
        f"both {summary['both']}, only {summary['measure_a']} {summary['only_a']}, "
        f"only {summary['measure_b']} {summary['only_b']}",
        file=sys.stderr,
    )

    if args.pairs:
        write_pairs(pairs, args.pairs_output, pairs_format)
        print(f"sampled {len(pairs)} rule pairs with seed {args.seed}", file=sys.stderr)
    return 0


def cmd_explain(args: argparse.Namespace) -> int:
    measure_cfg = _measure_config(args, args.measure)
    db = load_dataset(args.input, args.format)
    rule = MiningService.parse_rule(
        db,
        InputValidator.split_item_field(args.antecedent),
        InputValidator.split_item_field(args.consequent),
    )
    explanation = MiningService.explain(db, rule, measure_cfg)
    freq = explanation.freq

    lines = [
        f"rule: {rule}",
        f"n = {freq.n}",
        f"cf(X) = {freq.cf_x}",
        f"cf(Y) = {freq.cf_y}",
        f"cf(X u Y) = {freq.cf_xy}",
        f"cf(~X) = {freq.cf_not_x}",
        f"cf(~X u ~Y) = {freq.cf_not_x_not_y}",
        f"alpha = {explanation.alpha:g}, w = {explanation.w:g}",
        f"L(cf(X u Y), cf(X)) = {explanation.positive_bound!r}",
        f"L(cf(~X u ~Y), cf(~X)) = {explanation.negative_bound!r}",
    ]
    for measure in ALL_MEASURES:
        value = explanation.scores[measure]
        lines.append(
            f"{measure.value} = {explanation.formulas[measure]} = {value!r} ({display_value(value)})"
        )
    selected = explanation.measure
    lines.append(f"score ({selected.value}) = {display_value(explanation.scores[selected])}")
    sys.stdout.write("\n".join(lines) + "\n")
    return 0


COMMANDS = {
    "mine": cmd_mine,
    "score": cmd_score,
    "rank": cmd_rank,
    "compare": cmd_compare,
    "explain": cmd_explain,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    setup_logging(level=args.log_level, log_dir=args.log_dir, json_console=args.log_json or None)
    tracker = FailureTracker(log_dir=args.log_dir)
    logger.debug(f"Running {args.command} with {vars(args)}")

    try:
        return COMMANDS[args.command](args)
    except BudgetExceededError as exc:
        tracker.track_budget_failure(getattr(args, "input", ""), exc)
        print(f"error: {exc.detail}", file=sys.stderr)
        return exc.exit_code
    except MinerError as exc:
        tracker.track_failure(args.command, exc, {"argv": list(argv) if argv is not None else sys.argv[1:]})
        print(f"error: {exc.detail}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
