"""Pair generation and frequency counting.

Every transaction contributes all non-empty subsets of its antecedent side and
of its consequent side to the cf(X) / cf(Y) tables. A second pass over the
transactions emits, per transaction, every pair (X, Y) whose X is frequent
enough; counting those emissions gives cf(X u Y) directly because each
transaction emits a given pair at most once.

Items are interned to integers in canonical order, so a subset produced by
``itertools.combinations`` over a sorted index tuple is already canonical and
tuple comparison of keys equals canonical item-set order.
"""

import logging
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from concurrent.futures.process import BrokenProcessPool
from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from types import MappingProxyType
from typing import Dict, FrozenSet, Iterator, List, Mapping, Optional, Set, Tuple

from .errors import BudgetExceededError, DataError
from .models import (
    Item,
    ItemSet,
    MiningConfig,
    NamespaceMode,
    Rule,
    RuleCount,
    TransactionDatabase,
)

logger = logging.getLogger(__name__)

ItemKey = Tuple[int, ...]
PairKey = Tuple[ItemKey, ItemKey]
# (transaction id, antecedent-side indices, consequent-side indices)
EncodedTransaction = Tuple[str, ItemKey, ItemKey]


def combi(s: ItemSet, max_size: Optional[int] = None) -> Set[ItemSet]:
    """All non-empty subsets of ``s``, optionally only those up to ``max_size``."""
    limit = len(s) if max_size is None else min(max_size, len(s))
    return {
        ItemSet(items=subset)
        for size in range(1, limit + 1)
        for subset in combinations(s.items, size)
    }


def _subsets(indices: ItemKey, max_size: Optional[int]) -> Iterator[ItemKey]:
    limit = len(indices) if max_size is None else min(max_size, len(indices))
    for size in range(1, limit + 1):
        yield from combinations(indices, size)


@dataclass(frozen=True)
class FrequencyTable:
    """cf counts for antecedents, consequents and co-occurring pairs.

    Keys are index tuples into ``vocabulary``; use the ``cf_*`` helpers to look
    counts up by ItemSet. Absent keys count as zero.
    """

    vocabulary: Tuple[Item, ...]
    antecedent_counts: Mapping[ItemKey, int]
    consequent_counts: Mapping[ItemKey, int]
    pair_counts: Mapping[PairKey, int]
    n: int
    mode: NamespaceMode
    min_antecedent_count: int
    enumerated_pairs: int = 0
    _itemsets: Dict[ItemKey, ItemSet] = field(default_factory=dict, repr=False, compare=False)
    _index: Dict[Item, int] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        self._index.update({item: position for position, item in enumerate(self.vocabulary)})

    def key_of(self, itemset: ItemSet) -> Optional[ItemKey]:
        try:
            return tuple(self._index[item] for item in itemset.items)
        except KeyError:
            return None

    def itemset(self, key: ItemKey) -> ItemSet:
        cached = self._itemsets.get(key)
        if cached is None:
            # Index tuples are canonical by construction
            cached = ItemSet.model_construct(items=tuple(self.vocabulary[i] for i in key))
            self._itemsets[key] = cached
        return cached

    def cf_antecedent(self, itemset: ItemSet) -> int:
        key = self.key_of(itemset)
        return 0 if key is None else self.antecedent_counts.get(key, 0)

    def cf_consequent(self, itemset: ItemSet) -> int:
        key = self.key_of(itemset)
        return 0 if key is None else self.consequent_counts.get(key, 0)

    def cf_pair(self, antecedent: ItemSet, consequent: ItemSet) -> int:
        x, y = self.key_of(antecedent), self.key_of(consequent)
        if x is None or y is None:
            return 0
        return self.pair_counts.get((x, y), 0)


# ---------------------------------------------------------------------------
# Shard workers. Module-level so a process pool can pickle them.
# ---------------------------------------------------------------------------


def _count_side_shard(
    shard: List[EncodedTransaction],
    max_antecedent_size: Optional[int],
    max_consequent_size: Optional[int],
) -> Tuple[Counter, Counter]:
    antecedents: Counter = Counter()
    consequents: Counter = Counter()
    for _, antecedent_side, consequent_side in shard:
        antecedents.update(_subsets(antecedent_side, max_antecedent_size))
        consequents.update(_subsets(consequent_side, max_consequent_size))
    return antecedents, consequents


def _pairs_for_transaction(
    antecedent_side: ItemKey,
    consequent_side: ItemKey,
    qualifying: FrozenSet[ItemKey],
    generic: bool,
    max_antecedent_size: Optional[int],
    max_consequent_size: Optional[int],
) -> Iterator[PairKey]:
    for x in _subsets(antecedent_side, max_antecedent_size):
        if x not in qualifying:
            continue
        if generic:
            taken = set(x)
            remainder = tuple(i for i in consequent_side if i not in taken)
        else:
            remainder = consequent_side
        for y in _subsets(remainder, max_consequent_size):
            yield (x, y)


def _count_pair_shard(
    shard: List[EncodedTransaction],
    qualifying: FrozenSet[ItemKey],
    generic: bool,
    max_antecedent_size: Optional[int],
    max_consequent_size: Optional[int],
) -> Counter:
    pairs: Counter = Counter()
    for _, antecedent_side, consequent_side in shard:
        pairs.update(
            _pairs_for_transaction(
                antecedent_side,
                consequent_side,
                qualifying,
                generic,
                max_antecedent_size,
                max_consequent_size,
            )
        )
    return pairs


def _shards(encoded: List[EncodedTransaction], workers: int) -> List[List[EncodedTransaction]]:
    if workers <= 1 or len(encoded) <= 1:
        return [encoded]
    size = -(-len(encoded) // workers)
    return [encoded[start:start + size] for start in range(0, len(encoded), size)]


def _run_shards(func, shards, *args) -> list:
    """Apply ``func`` to every shard, in a process pool when there are several."""
    if len(shards) == 1:
        return [func(shards[0], *args)]
    try:
        with ProcessPoolExecutor(max_workers=len(shards)) as executor:
            return list(executor.map(func, shards, *[[arg] * len(shards) for arg in args]))
    except (OSError, NotImplementedError, BrokenProcessPool) as exc:
        logger.warning(f"Process pool unavailable ({exc}); counting shards inline")
        return [func(shard, *args) for shard in shards]


def _count_subsets_up_to(size: int, max_size: Optional[int]) -> int:
    limit = size if max_size is None else min(max_size, size)
    return sum(comb(size, j) for j in range(1, limit + 1))


def _check_subset_budget(encoded: List[EncodedTransaction], cfg: MiningConfig) -> None:
    """Reject any transaction whose side subsets alone exceed the budget, before counting."""
    if cfg.pair_budget is None:
        return
    for transaction_id, antecedent_side, consequent_side in encoded:
        subsets = _count_subsets_up_to(len(antecedent_side), cfg.max_antecedent_size) + _count_subsets_up_to(
            len(consequent_side), cfg.max_consequent_size
        )
        if subsets > cfg.pair_budget:
            raise BudgetExceededError(transaction_id, cfg.pair_budget, subsets, unit="subsets")


def _check_pair_budget(
    encoded: List[EncodedTransaction],
    qualifying: FrozenSet[ItemKey],
    generic: bool,
    cfg: MiningConfig,
) -> int:
    """Count enumerated pairs in transaction order, failing at the first overflow.

    Consequents are counted in closed form per antecedent, so the work per
    transaction is bounded by its antecedent subsets.
    """
    enumerated = 0
    for transaction_id, antecedent_side, consequent_side in encoded:
        for x in _subsets(antecedent_side, cfg.max_antecedent_size):
            if x not in qualifying:
                continue
            remaining = len(consequent_side) - len(x) if generic else len(consequent_side)
            enumerated += _count_subsets_up_to(remaining, cfg.max_consequent_size)
            if cfg.pair_budget is not None and enumerated > cfg.pair_budget:
                raise BudgetExceededError(transaction_id, cfg.pair_budget, enumerated)
    return enumerated


def count_frequencies(db: TransactionDatabase, cfg: Optional[MiningConfig] = None) -> FrequencyTable:
    """Count cf(X), cf(Y) and cf(X u Y) for every generated pair."""
    cfg = cfg or MiningConfig()
    if db.n < 1:
        raise DataError("cannot mine an empty database")

    start_time = time.time()
    generic = db.mode == NamespaceMode.GENERIC
    vocabulary = tuple(db.vocabulary())
    index = {item: position for position, item in enumerate(vocabulary)}

    encoded: List[EncodedTransaction] = [
        (
            transaction.id,
            tuple(index[item] for item in db.antecedent_side(transaction).items),
            tuple(index[item] for item in db.consequent_side(transaction).items),
        )
        for transaction in db.transactions
    ]
    _check_subset_budget(encoded, cfg)
    shards = _shards(encoded, cfg.workers)
    logger.debug(f"Counting {db.n} transactions in {len(shards)} shard(s)")

    antecedent_counts: Counter = Counter()
    consequent_counts: Counter = Counter()
    for antecedents, consequents in _run_shards(
        _count_side_shard, shards, cfg.max_antecedent_size, cfg.max_consequent_size
    ):
        antecedent_counts.update(antecedents)
        consequent_counts.update(consequents)

    qualifying = frozenset(
        key for key, count in antecedent_counts.items() if count >= cfg.min_antecedent_count
    )
    enumerated = _check_pair_budget(encoded, qualifying, generic, cfg)

    pair_counts: Counter = Counter()
    for partial in _run_shards(
        _count_pair_shard,
        shards,
        qualifying,
        generic,
        cfg.max_antecedent_size,
        cfg.max_consequent_size,
    ):
        pair_counts.update(partial)

    kept_pairs = {
        key: count for key, count in sorted(pair_counts.items()) if count >= cfg.min_cooccurrence
    }

    logger.info(
        f"Counted {len(antecedent_counts)} antecedent and {len(consequent_counts)} consequent itemsets, "
        f"{len(kept_pairs)} pairs ({enumerated} enumerated) in {time.time() - start_time:.3f}s"
    )

    return FrequencyTable(
        vocabulary=vocabulary,
        antecedent_counts=MappingProxyType(dict(sorted(antecedent_counts.items()))),
        consequent_counts=MappingProxyType(dict(sorted(consequent_counts.items()))),
        pair_counts=MappingProxyType(kept_pairs),
        n=db.n,
        mode=db.mode,
        min_antecedent_count=cfg.min_antecedent_count,
        enumerated_pairs=enumerated,
    )


def generate_rules(ft: FrequencyTable) -> List[RuleCount]:
    """One RuleCount per pair, ordered by antecedent then consequent."""
    rules: List[RuleCount] = []
    for (x, y), cf_xy in ft.pair_counts.items():
        # Pairs are disjoint, non-empty and canonical by construction
        rule = Rule.model_construct(antecedent=ft.itemset(x), consequent=ft.itemset(y))
        rules.append(
            RuleCount.model_construct(
                rule=rule,
                cf_x=ft.antecedent_counts[x],
                cf_y=ft.consequent_counts[y],
                cf_xy=cf_xy,
            )
        )
    return rules
