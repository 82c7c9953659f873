"""Planted-pattern two-class transaction data for desk-scale experiments."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .core import Dataset, LabeledDataset, make_itemset


@dataclass(frozen=True)
class SyntheticConfig:
    n_items: int = 40
    n_patterns: int = 5
    pattern_size: int = 6
    patterns_per_sample: int = 1
    noise: float = 0.05
    n_train: int = 150       # per class, used to train the target
    n_pool: int = 150        # benign candidates the attacker queries
    n_test: int = 150        # malware samples to attack
    seed: int = 0


@dataclass(frozen=True)
class SyntheticData:
    train: LabeledDataset
    pool: Dataset
    malware_test: Dataset
    benign_patterns: tuple
    malware_patterns: tuple


def _patterns(rng: random.Random, items: list[int], k: int, size: int):
    return tuple(make_itemset(rng.sample(items, size)) for _ in range(k))


def _sample(rng: random.Random, patterns, cfg: SyntheticConfig):
    chosen = rng.sample(range(len(patterns)), cfg.patterns_per_sample)
    items = set()
    for c in chosen:
        items.update(patterns[c])
    for i in range(cfg.n_items):
        if rng.random() < cfg.noise:
            items.add(i)
    return make_itemset(items)


def generate(cfg: SyntheticConfig = SyntheticConfig()) -> SyntheticData:
    """Benign and malware samples each built from their own planted patterns plus noise."""
    rng = random.Random(cfg.seed)
    items = list(range(cfg.n_items))
    benign_p = _patterns(rng, items, cfg.n_patterns, cfg.pattern_size)
    malware_p = _patterns(rng, items, cfg.n_patterns, cfg.pattern_size)
    alphabet = tuple(items)

    def draw(patterns, n):
        return Dataset(tuple(_sample(rng, patterns, cfg) for _ in range(n)), alphabet)

    train = LabeledDataset(draw(benign_p, cfg.n_train), draw(malware_p, cfg.n_train))
    pool = draw(benign_p, cfg.n_pool)
    test = draw(malware_p, cfg.n_test)
    return SyntheticData(train, pool, test, benign_p, malware_p)
