"""Closed frequent itemset mining.

``mine_closed`` is a depth-first prefix-preserving closure extension (the LCM
scheme) over the dataset's per-item tid bitsets.  ``brute_force_closed``
enumerates the full powerset and exists only as a reference for testing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

from .core import Dataset, Itemset


@dataclass(frozen=True, order=True)
class MinedPattern:
    pattern: Itemset
    support: int

    def __len__(self) -> int:
        return len(self.pattern)


@dataclass(frozen=True)
class MinsupSpec:
    """Minimum support, absolute (int >= 1) or relative (float in (0, 1))."""

    value: int | float

    def __post_init__(self):
        v = self.value
        if isinstance(v, bool):
            raise TypeError("minsup must be int or float")
        if isinstance(v, int):
            if v < 1:
                raise ValueError(f"absolute minsup must be >= 1, got {v}")
        elif isinstance(v, float):
            if not 0.0 < v < 1.0:
                raise ValueError(f"relative minsup must lie in (0, 1), got {v}")
        else:
            raise TypeError("minsup must be int or float")

    @classmethod
    def parse(cls, text: str) -> "MinsupSpec":
        """``"5"`` -> absolute 5, ``"0.001"`` -> relative 0.1%."""
        try:
            return cls(int(text))
        except ValueError:
            return cls(float(text))

    def resolve(self, n: int) -> int:
        if isinstance(self.value, int):
            return self.value
        return max(1, math.ceil(self.value * n))


def _as_spec(minsup: MinsupSpec | int | float) -> MinsupSpec:
    return minsup if isinstance(minsup, MinsupSpec) else MinsupSpec(minsup)


def order_candidates(patterns: Iterable[MinedPattern]) -> list[MinedPattern]:
    """Standard candidate order: support desc, length desc, items ascending."""
    return sorted(patterns, key=lambda p: (-p.support, -len(p.pattern), p.pattern))


def mine_closed(d: Dataset, minsup: MinsupSpec | int | float) -> list[MinedPattern]:
    """All non-empty closed itemsets with support >= minsup, in candidate order."""
    if d.n == 0:
        raise ValueError("cannot mine an empty dataset")
    threshold = _as_spec(minsup).resolve(d.n)
    full = (1 << d.n) - 1
    # only frequent items can appear in a frequent itemset
    items = [i for i in d.alphabet if d.item_tidset(i).bit_count() >= threshold]
    bits = {i: d.item_tidset(i) for i in items}

    def closure(tids: int) -> tuple[int, ...]:
        return tuple(i for i in items if tids & bits[i] == tids)

    out: list[MinedPattern] = []
    if full.bit_count() < threshold:
        return out

    root = closure(full)
    if root:
        out.append(MinedPattern(root, d.n))

    # iterative DFS; stack holds (pattern, tidset, core position)
    stack: list[tuple[tuple[int, ...], int, int]] = [(root, full, -1)]
    while stack:
        pat, tids, core = stack.pop()
        pset = set(pat)
        for pos in range(len(items) - 1, core, -1):
            e = items[pos]
            if e in pset:
                continue
            new = tids & bits[e]
            if new.bit_count() < threshold:
                continue
            q = closure(new)
            # prefix-preserving check: q adds no item smaller than e
            if any(i < e and i not in pset for i in q):
                continue
            out.append(MinedPattern(q, new.bit_count()))
            stack.append((q, new, pos))
    return order_candidates(out)


BRUTE_FORCE_MAX_ITEMS = 20


def brute_force_closed(d: Dataset, minsup: MinsupSpec | int | float) -> list[MinedPattern]:
    """Reference miner: enumerate the powerset of the alphabet."""
    if d.m > BRUTE_FORCE_MAX_ITEMS:
        raise ValueError(f"brute force refused for {d.m} items (max {BRUTE_FORCE_MAX_ITEMS})")
    threshold = _as_spec(minsup).resolve(max(d.n, 1))
    rows = [frozenset(t) for t in d.transactions]
    sup: dict[frozenset, int] = {}
    for k in range(1, d.m + 1):
        for combo in combinations(d.alphabet, k):
            s = frozenset(combo)
            sup[s] = sum(1 for t in rows if s <= t)
    out = []
    for s, c in sup.items():
        if c < threshold:
            continue
        if any(sup[s | {i}] == c for i in d.alphabet if i not in s):
            continue
        out.append(MinedPattern(tuple(sorted(s)), c))
    return order_candidates(out)
