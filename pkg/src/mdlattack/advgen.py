"""Adversarial examples by adding one code-table pattern.

For a sample ``t`` and a code table built on benign data, pick the
non-singleton row ``P`` minimizing ``L(t | P ∪ t)``; the adversarial sample
is ``t ∪ P``.  Items are only ever added, so the original is preserved.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .codetable import CodeTable, encoded_length_transaction
from .core import Itemset, make_itemset, union

OK = "ok"
NO_PATTERNS = "no-patterns"
KEPT_ORIGINAL = "kept-original"


@dataclass(frozen=True)
class AdversarialResult:
    original: Itemset
    adversarial: Itemset
    added_pattern: Itemset
    len_before: float
    len_after: float
    status: str = OK

    @property
    def added_items(self) -> Itemset:
        return tuple(i for i in self.adversarial if i not in set(self.original))


def generate(ct_b: CodeTable, t: Iterable[int], *, only_if_shorter: bool = False) -> AdversarialResult:
    t = make_itemset(t)
    before = encoded_length_transaction(ct_b, t)  # also validates the alphabet
    best_p: Itemset | None = None
    best_len = float("inf")
    # rows are in cover order, so strict < keeps the earliest pattern on ties
    for row in ct_b.non_singletons:
        cand = union(t, row.pattern)
        length = encoded_length_transaction(ct_b, cand)
        if length < best_len:
            best_p, best_len = row.pattern, length
    if best_p is None:
        return AdversarialResult(t, t, (), before, before, NO_PATTERNS)
    if only_if_shorter and best_len >= before:
        return AdversarialResult(t, t, (), before, before, KEPT_ORIGINAL)
    return AdversarialResult(t, union(t, best_p), best_p, before, best_len, OK)


def batch_generate(ct_b: CodeTable, malware: Iterable[Itemset], *, only_if_shorter: bool = False
                   ) -> list[AdversarialResult]:
    return [generate(ct_b, t, only_if_shorter=only_if_shorter) for t in malware]
