"""Transactional datasets, itemset algebra and FIMI I/O.

Itemsets are plain tuples of strictly increasing non-negative ints.  A
``Dataset`` keeps transactions as a multiset (duplicates stored explicitly,
input order preserved) and builds an inverted index ``item -> bitset of
transaction ids`` so that support counting is a chain of ``&`` operations.
"""

from __future__ import annotations

import io
import os
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

Itemset = tuple[int, ...]

MAX_ITEM_ID = 2**32 - 1


class DomainError(ValueError):
    """An itemset refers to items outside a dataset/code-table alphabet."""


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def make_itemset(items: Iterable[int], *, allow_duplicates: bool = True) -> Itemset:
    """Return ``items`` as a canonical (sorted, duplicate-free) itemset."""
    items = list(items)
    for i in items:
        if not isinstance(i, int) or isinstance(i, bool) or i < 0 or i > MAX_ITEM_ID:
            raise ValueError(f"item ids must be non-negative 32-bit integers, got {i!r}")
    out = tuple(sorted(set(items)))
    if not allow_duplicates and len(out) != len(items):
        raise ValueError(f"duplicate item in {items!r}")
    return out


def is_subset(p: Sequence[int], q: Sequence[int]) -> bool:
    return set(p).issubset(q)


def union(p: Itemset, q: Itemset) -> Itemset:
    return tuple(sorted(set(p) | set(q)))


def format_itemset(p: Itemset) -> str:
    return "{" + ",".join(map(str, p)) + "}"


def _bits(indices: Iterable[int]) -> int:
    b = 0
    for j in indices:
        b |= 1 << j
    return b


def _bit_indices(b: int) -> list[int]:
    out = []
    while b:
        low = b & -b
        out.append(low.bit_length() - 1)
        b ^= low
    return out


@dataclass(frozen=True)
class Dataset:
    """A non-mutating multiset of transactions over an item alphabet.

    ``alphabet`` defaults to the union of all transactions; passing an explicit
    alphabet declares a superset (items that never occur are still part of the
    feature space, e.g. for a classifier's full feature set).
    """

    transactions: tuple[Itemset, ...]
    alphabet: Itemset = None  # type: ignore[assignment]
    _index: dict[int, int] = field(default=None, init=False, repr=False, compare=False)  # type: ignore[assignment]

    def __post_init__(self):
        txs = tuple(make_itemset(t) for t in self.transactions)
        object.__setattr__(self, "transactions", txs)
        present = set().union(*txs) if txs else set()
        if self.alphabet is None:
            alpha = tuple(sorted(present))
        else:
            alpha = make_itemset(self.alphabet)
            missing = present - set(alpha)
            if missing:
                raise DomainError(f"transactions use items outside the alphabet: {sorted(missing)[:10]}")
        object.__setattr__(self, "alphabet", alpha)
        index: dict[int, int] = {i: 0 for i in alpha}
        for j, t in enumerate(txs):
            bit = 1 << j
            for i in t:
                index[i] |= bit
        object.__setattr__(self, "_index", index)

    @classmethod
    def from_iterables(cls, rows: Iterable[Iterable[int]], alphabet: Iterable[int] | None = None) -> "Dataset":
        return cls(tuple(make_itemset(r) for r in rows), None if alphabet is None else make_itemset(alphabet))

    @property
    def n(self) -> int:
        return len(self.transactions)

    @property
    def m(self) -> int:
        return len(self.alphabet)

    def __len__(self) -> int:
        return len(self.transactions)

    def __iter__(self) -> Iterator[Itemset]:
        return iter(self.transactions)

    def __getitem__(self, j: int) -> Itemset:
        return self.transactions[j]

    def check_items(self, p: Iterable[int]) -> None:
        bad = [i for i in p if i not in self._index]
        if bad:
            raise DomainError(f"items {bad} are not in the dataset alphabet")

    def tidset(self, p: Itemset) -> int:
        """Bitset of the transactions that contain ``p`` (bit j <=> T_j ⊇ p)."""
        self.check_items(p)
        b = (1 << self.n) - 1
        for i in p:
            b &= self._index[i]
            if not b:
                break
        return b

    def item_tidset(self, item: int) -> int:
        return self._index[item]

    def subset(self, indices: Iterable[int]) -> "Dataset":
        """Sub-multiset with the given transaction indices; alphabet is kept."""
        return Dataset(tuple(self.transactions[j] for j in indices), self.alphabet)

    def with_alphabet(self, alphabet: Iterable[int]) -> "Dataset":
        return Dataset(self.transactions, make_itemset(alphabet))


def support(d: Dataset, p: Iterable[int]) -> int:
    """Number of transactions of ``d`` containing ``p``, counting duplicates."""
    return d.tidset(make_itemset(p)).bit_count()


def supporting_transactions(d: Dataset, p: Iterable[int]) -> list[int]:
    """Indices of the transactions containing ``p``, ascending."""
    return _bit_indices(d.tidset(make_itemset(p)))


@dataclass(frozen=True)
class LabeledDataset:
    benign: Dataset
    malware: Dataset

    def __post_init__(self):
        alpha = make_itemset(set(self.benign.alphabet) | set(self.malware.alphabet))
        if self.benign.alphabet != alpha:
            object.__setattr__(self, "benign", self.benign.with_alphabet(alpha))
        if self.malware.alphabet != alpha:
            object.__setattr__(self, "malware", self.malware.with_alphabet(alpha))

    @property
    def alphabet(self) -> Itemset:
        return self.benign.alphabet


# -- FIMI I/O ---------------------------------------------------------------

def parse_fimi(text: str, alphabet: Iterable[int] | None = None, *, allow_empty: bool = False) -> Dataset:
    """Parse FIMI text: one transaction per non-empty line, space-separated ids."""
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        toks = line.split()
        if not toks:
            continue
        items = []
        for tok in toks:
            if not tok.isdigit():
                raise ParseError(f"malformed item token {tok!r}", lineno)
            v = int(tok)
            if v > MAX_ITEM_ID:
                raise ParseError(f"item id {v} exceeds 32 bits", lineno)
            items.append(v)
        if len(set(items)) != len(items):
            raise ParseError(f"duplicate item in transaction {line.strip()!r}", lineno)
        rows.append(tuple(sorted(items)))
    if not rows and not allow_empty:
        raise ParseError("empty dataset", None)
    try:
        return Dataset(tuple(rows), None if alphabet is None else make_itemset(alphabet))
    except DomainError as e:
        raise ParseError(str(e)) from e


def load_dataset(source: str | os.PathLike | io.TextIOBase, format: str = "fimi",
                 alphabet: Iterable[int] | None = None, *, allow_empty: bool = False) -> Dataset:
    if format != "fimi":
        raise ValueError(f"unsupported dataset format {format!r}")
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    return parse_fimi(text, alphabet, allow_empty=allow_empty)


def dumps_fimi(transactions: Iterable[Itemset]) -> str:
    return "".join(" ".join(map(str, t)) + "\n" for t in transactions)


def save_dataset(d: Dataset | Iterable[Itemset], path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_fimi(d))


def load_name_map(path: str | os.PathLike) -> dict[int, str]:
    """Read an ``id<TAB>name`` sidecar file."""
    names = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            key, sep, name = line.partition("\t")
            if not sep or not key.isdigit():
                raise ParseError(f"expected 'id<TAB>name', got {line!r}", lineno)
            names[int(key)] = name
    return names
