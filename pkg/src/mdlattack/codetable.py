"""MDL code tables: cover, usages, Shannon code lengths and greedy KRIMP.

Rows are kept in standard cover order (length desc, support desc, items asc).
Covering is greedy and disjoint; usages drive Shannon code lengths
``ceil(-log2(u / U))`` where zero-usage rows get a pseudo-usage ``epsilon``
that also counts in ``U``.  Internally patterns and transactions are bitmasks
over the table's alphabet so a cover is a sequence of ``&`` tests.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Sequence

from .cfpm import MinedPattern
from .core import Dataset, DomainError, Itemset, ParseError, make_itemset

DEFAULT_EPSILON = 0.1


@dataclass(frozen=True)
class CodeTableRow:
    pattern: Itemset
    usage: int
    code_length: float  # integral when the table uses ceiled lengths
    support: int = field(default=0, compare=False)  # cached at insertion; ordering only


def _cover_key(row: CodeTableRow):
    return (-len(row.pattern), -row.support, row.pattern)


def shannon_length(usage: float, total: float, epsilon: float = DEFAULT_EPSILON, *, ceil: bool = True) -> float:
    """Code length in bits for a row with ``usage`` out of smoothed ``total``."""
    u = usage if usage > 0 else epsilon
    if not ceil:
        return -math.log2(u / total)
    # exact ceil(log2(total/u)) with rationals; floats misround at powers of two
    uq = Fraction(u) if isinstance(u, int) else Fraction(repr(u))
    tq = Fraction(total) if isinstance(total, int) else Fraction(repr(total))
    ratio = tq / uq
    if ratio <= 1:
        return 0
    k = max(0, math.ceil(math.log2(float(ratio))) - 1)
    while Fraction(2) ** k < ratio:
        k += 1
    return k


@dataclass(frozen=True)
class CodeTable:
    rows: tuple[CodeTableRow, ...]
    alphabet: Itemset
    epsilon: float = DEFAULT_EPSILON
    ceil_lengths: bool = True
    _masks: tuple[int, ...] = field(default=None, init=False, repr=False, compare=False)  # type: ignore[assignment]
    _bitpos: dict[int, int] = field(default=None, init=False, repr=False, compare=False)  # type: ignore[assignment]

    def __post_init__(self):
        bitpos = {item: k for k, item in enumerate(self.alphabet)}
        masks = []
        for r in self.rows:
            m = 0
            for i in r.pattern:
                if i not in bitpos:
                    raise DomainError(f"pattern {r.pattern} uses items outside the alphabet")
                m |= 1 << bitpos[i]
            masks.append(m)
        singles = [r.pattern[0] for r in self.rows if len(r.pattern) == 1]
        if sorted(singles) != list(self.alphabet):
            raise ValueError("a code table must hold every alphabet singleton exactly once")
        object.__setattr__(self, "_bitpos", bitpos)
        object.__setattr__(self, "_masks", tuple(masks))

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    @property
    def patterns(self) -> list[Itemset]:
        return [r.pattern for r in self.rows]

    @property
    def non_singletons(self) -> list[CodeTableRow]:
        return [r for r in self.rows if len(r.pattern) > 1]

    def row(self, pattern: Iterable[int]) -> CodeTableRow:
        p = make_itemset(pattern)
        for r in self.rows:
            if r.pattern == p:
                return r
        raise KeyError(p)

    def lengths(self) -> dict[Itemset, float]:
        return {r.pattern: r.code_length for r in self.rows}

    def total_usage(self) -> float:
        """Smoothed usage total U: zero-usage rows contribute ``epsilon``."""
        return sum(r.usage if r.usage > 0 else self.epsilon for r in self.rows)

    def mask(self, t: Iterable[int]) -> int:
        m = 0
        try:
            for i in t:
                m |= 1 << self._bitpos[i]
        except KeyError as e:
            raise DomainError(f"item {e.args[0]} is not in the code table alphabet") from None
        return m

    def cover_indices(self, t: Iterable[int]) -> list[int]:
        rem = self.mask(t)
        used = []
        for k, pm in enumerate(self._masks):
            if not rem:
                break
            if pm & rem == pm:
                used.append(k)
                rem ^= pm
        return used


def _with_lengths(ct: CodeTable, rows: Sequence[CodeTableRow]) -> CodeTable:
    total = sum(r.usage if r.usage > 0 else ct.epsilon for r in rows)
    new_rows = tuple(
        replace(r, code_length=shannon_length(r.usage, total, ct.epsilon, ceil=ct.ceil_lengths)) for r in rows
    )
    return CodeTable(new_rows, ct.alphabet, ct.epsilon, ct.ceil_lengths)


def cover(ct: CodeTable, t: Iterable[int]) -> list[Itemset]:
    """Greedy disjoint cover of ``t`` in cover order."""
    return [ct.rows[k].pattern for k in ct.cover_indices(t)]


def recompute_usages(ct: CodeTable, d: Dataset | Iterable[Itemset]) -> CodeTable:
    counts = [0] * len(ct.rows)
    for t in d:
        for k in ct.cover_indices(t):
            counts[k] += 1
    rows = [replace(r, usage=c) for r, c in zip(ct.rows, counts)]
    return _with_lengths(ct, rows)


def standard_code_table(d: Dataset, epsilon: float = DEFAULT_EPSILON, *, ceil_lengths: bool = True) -> CodeTable:
    """Singleton-only table over ``d.alphabet`` with usages from ``d``."""
    rows = [CodeTableRow((i,), 0, 0, d.item_tidset(i).bit_count()) for i in d.alphabet]
    rows.sort(key=_cover_key)
    ct = CodeTable(tuple(rows), d.alphabet, epsilon, ceil_lengths)
    return recompute_usages(ct, d)


def code_length(ct: CodeTable, row: CodeTableRow | Iterable[int]) -> float:
    if not isinstance(row, CodeTableRow):
        row = ct.row(row)
    return shannon_length(row.usage, ct.total_usage(), ct.epsilon, ceil=ct.ceil_lengths)


def encoded_length_transaction(ct: CodeTable, t: Iterable[int]) -> float:
    return sum(ct.rows[k].code_length for k in ct.cover_indices(t))


def encoded_length_dataset(ct: CodeTable, d: Iterable[Itemset]) -> float:
    return sum(encoded_length_transaction(ct, t) for t in d)


def model_length(ct: CodeTable, *, include_unused: bool = False) -> float:
    """Bits to describe the table itself.

    Each counted row costs ``(|P| + 1) * log2(|I| + 1)`` for its items plus a
    separator, and its own code length.  By default rows with zero usage are
    not counted: they never appear in an encoding, so they need not be
    transmitted.  ``include_unused=True`` sums over every row.
    """
    unit = math.log2(len(ct.alphabet) + 1)
    rows = ct.rows if include_unused else [r for r in ct.rows if r.usage > 0]
    n_items = sum(len(r.pattern) for r in rows)
    return n_items * unit + len(rows) * unit + sum(r.code_length for r in rows)


def _data_length_from_usages(ct: CodeTable) -> float:
    # equals encoded_length_dataset when usages are current for that dataset
    return sum(r.usage * r.code_length for r in ct.rows)


def total_length(ct: CodeTable, d: Iterable[Itemset] | None = None, *, include_unused: bool = False) -> float:
    """``L(D|CT) + L(CT)``.  With ``d=None`` the stored usages are trusted."""
    data = _data_length_from_usages(ct) if d is None else encoded_length_dataset(ct, d)
    return data + model_length(ct, include_unused=include_unused)


def insert_row(ct: CodeTable, pattern: Itemset, support: int) -> CodeTable:
    """Insert a pattern at its cover-order position (usages left stale)."""
    new = CodeTableRow(make_itemset(pattern), 0, 0, support)
    rows = sorted(ct.rows + (new,), key=_cover_key)
    return CodeTable(tuple(rows), ct.alphabet, ct.epsilon, ct.ceil_lengths)


def _drop_unused_non_singletons(ct: CodeTable) -> CodeTable:
    keep = [r for r in ct.rows if len(r.pattern) == 1 or r.usage > 0]
    if len(keep) == len(ct.rows):
        return ct
    return _with_lengths(ct, keep)


@dataclass
class KrimpTrace:
    """What happened during a greedy build, mainly for tests and reports."""

    initial_length: float
    accepted: list[tuple[Itemset, float]] = field(default_factory=list)
    rejected: int = 0


def build_krimp(d: Dataset, candidates: Iterable[MinedPattern], epsilon: float = DEFAULT_EPSILON, *,
                ceil_lengths: bool = True, trace: KrimpTrace | None = None) -> CodeTable:
    """Greedy code table construction.

    Candidates are tried in the given order (normally ``order_candidates``);
    a candidate stays only if it strictly lowers ``total_length``.
    Singletons in the candidate list are skipped since the standard table
    already holds them.
    """
    ct = standard_code_table(d, epsilon, ceil_lengths=ceil_lengths)
    best = total_length(ct)
    if trace is not None:
        trace.initial_length = best
    present = set(ct.patterns)
    for cand in candidates:
        p = make_itemset(cand.pattern)
        if len(p) < 2 or p in present:
            continue
        trial = recompute_usages(insert_row(ct, p, cand.support), d)
        length = total_length(trial)
        if length < best:
            ct = _drop_unused_non_singletons(trial)
            best = total_length(ct)
            present = set(ct.patterns)
            if trace is not None:
                trace.accepted.append((p, best))
        elif trace is not None:
            trace.rejected += 1
    return ct


# -- text format --------------------------------------------------------------

def _fmt_len(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def dumps_code_table(ct: CodeTable) -> str:
    lines = [f"alphabet={len(ct.alphabet)} epsilon={ct.epsilon!r}"]
    for r in ct.rows:
        lines.append(f"{' '.join(map(str, r.pattern))} | usage={r.usage} len={_fmt_len(r.code_length)}")
    return "\n".join(lines) + "\n"


def loads_code_table(text: str) -> CodeTable:
    """Parse the text format; row order in the file is the cover order."""
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty code table")
    header = dict(tok.split("=", 1) for tok in lines[0].split() if "=" in tok)
    try:
        m = int(header["alphabet"])
        epsilon = float(header["epsilon"])
    except (KeyError, ValueError):
        raise ParseError(f"bad header {lines[0]!r}", 1) from None
    rows = []
    ceil_lengths = True
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        items_part, sep, rest = line.partition("|")
        if not sep:
            raise ParseError(f"missing '|' in {line!r}", lineno)
        try:
            items = make_itemset(int(x) for x in items_part.split())
            fields = dict(tok.split("=", 1) for tok in rest.split())
            usage = int(fields["usage"])
            raw_len = fields["len"]
            length: float = int(raw_len) if raw_len.lstrip("-").isdigit() else float(raw_len)
        except (KeyError, ValueError):
            raise ParseError(f"malformed row {line!r}", lineno) from None
        if not isinstance(length, int):
            ceil_lengths = False
        # cover order is the file order; the support key only needs to preserve it
        rows.append(CodeTableRow(items, usage, length, 0))
    alphabet = make_itemset(r.pattern[0] for r in rows if len(r.pattern) == 1)
    if len(alphabet) != m:
        raise ParseError(f"header declares {m} items but table has {len(alphabet)} singletons")
    n = len(rows)
    rows = [replace(r, support=n - k) for k, r in enumerate(rows)]
    return CodeTable(tuple(rows), alphabet, epsilon, ceil_lengths)


def save_code_table(ct: CodeTable, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_code_table(ct))


def load_code_table(path: str | os.PathLike) -> CodeTable:
    with open(path, encoding="utf-8") as fh:
        return loads_code_table(fh.read())
