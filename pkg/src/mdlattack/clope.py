"""CLOPE clustering of transactions and cluster quality scoring.

Profit of a clustering is ``sum_k S_k * N_k / W_k**r / sum_k N_k`` with S the
summed transaction sizes, W the number of distinct items and N the member
count of cluster k.  The denominator is the dataset size and is constant, so
every allocation decision only compares numerator deltas.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field

from .core import Dataset, Itemset

DEFAULT_REPULSION = 4.0
DEFAULT_MAX_CLUSTERS = 16
DEFAULT_MAX_PASSES = 10
DEFAULT_QUALITY_THRESHOLD = 0.1

_TOL = 1e-12


@dataclass
class Cluster:
    member_indices: list[int] = field(default_factory=list)
    S: int = 0
    occ: Counter = field(default_factory=Counter)

    @property
    def W(self) -> int:
        return len(self.occ)

    @property
    def size(self) -> int:
        return len(self.member_indices)

    def __len__(self) -> int:
        return len(self.member_indices)

    def add(self, j: int, t: Itemset) -> None:
        self.member_indices.append(j)
        self.S += len(t)
        self.occ.update(t)

    def remove(self, j: int, t: Itemset) -> None:
        self.member_indices.remove(j)
        self.S -= len(t)
        self.occ.subtract(t)
        for i in t:
            if self.occ[i] <= 0:
                del self.occ[i]

    @classmethod
    def of(cls, d: Dataset, indices) -> "Cluster":
        c = cls()
        for j in indices:
            c.add(j, d[j])
        return c


@dataclass
class Clustering:
    clusters: list[Cluster]
    r: float
    max_clusters: int
    passes: int = 0

    def assignment(self, n: int) -> list[int]:
        """Cluster id of every transaction index."""
        out = [-1] * n
        for k, c in enumerate(self.clusters):
            for j in c.member_indices:
                out[j] = k
        return out


def _gain(c: Cluster, t: Itemset, r: float) -> float:
    """Change of ``S*N/W**r`` when ``t`` joins ``c``."""
    s_new = c.S + len(t)
    n_new = c.size + 1
    w_new = c.W + sum(1 for i in t if i not in c.occ)
    new = s_new * n_new / w_new**r if w_new else 0.0
    old = c.S * c.size / c.W**r if c.W else 0.0
    return new - old


def _best_cluster(clusters: list[Cluster], t: Itemset, r: float, allow_new: bool) -> tuple[int, float]:
    """Index maximizing the gain; ties -> lowest index, existing before new."""
    best_k, best = -1, float("-inf")
    empty_k = -1
    for k, c in enumerate(clusters):
        if c.size == 0:
            if empty_k < 0:
                empty_k = k
            continue
        g = _gain(c, t, r)
        if g > best + _TOL:
            best_k, best = k, g
    if allow_new:
        g = _gain(Cluster(), t, r)
        if g > best + _TOL:
            if empty_k < 0:
                clusters.append(Cluster())
                empty_k = len(clusters) - 1
            best_k, best = empty_k, g
    return best_k, best


def profit(clusters: list[Cluster], r: float) -> float:
    n = sum(c.size for c in clusters)
    if n == 0:
        return 0.0
    return sum(c.S * c.size / c.W**r for c in clusters if c.W) / n


def cluster(d: Dataset, r: float = DEFAULT_REPULSION, max_clusters: int = DEFAULT_MAX_CLUSTERS,
            max_passes: int = DEFAULT_MAX_PASSES, *, shuffle: bool = False, seed: int | None = None) -> Clustering:
    """Run CLOPE: one allocation pass, then move passes until stable."""
    if r <= 0:
        raise ValueError("repulsion must be positive")
    if max_clusters < 1:
        raise ValueError("max_clusters must be >= 1")
    if d.n == 0:
        raise ValueError("cannot cluster an empty dataset")

    order = list(range(d.n))
    if shuffle:
        random.Random(seed).shuffle(order)

    clusters: list[Cluster] = []
    where = [-1] * d.n
    n_open = 0
    for j in order:
        t = d[j]
        k, _ = _best_cluster(clusters, t, r, allow_new=n_open < max_clusters)
        if clusters[k].size == 0:
            n_open += 1
        clusters[k].add(j, t)
        where[j] = k

    passes = 0
    while passes < max_passes:
        passes += 1
        moved = False
        for j in order:
            t = d[j]
            home = clusters[where[j]]
            home.remove(j, t)
            stay = _gain(home, t, r)
            if home.size == 0:
                n_open -= 1
            k, g = _best_cluster(clusters, t, r, allow_new=n_open < max_clusters)
            if k != where[j] and g > stay + _TOL:
                if clusters[k].size == 0:
                    n_open += 1
                clusters[k].add(j, t)
                where[j] = k
                moved = True
            else:
                if home.size == 0:
                    n_open += 1
                home.add(j, t)
        if not moved:
            break

    kept = [c for c in clusters if c.size > 0]
    for c in kept:
        c.member_indices.sort()
    return Clustering(kept, r, max_clusters, passes)


def quality(c: Cluster) -> float:
    """Height over member count; 1.0 iff all members are identical."""
    if c.size == 0:
        raise ValueError("quality of an empty cluster is undefined")
    if c.W == 0:
        # only empty transactions: all members identical
        return 1.0
    return (c.S / c.W) / c.size


def partition_hq(cl: Clustering | list[Cluster], threshold: float = DEFAULT_QUALITY_THRESHOLD
                 ) -> tuple[list[Cluster], list[Cluster]]:
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("quality threshold must lie in [0, 1]")
    clusters = cl.clusters if isinstance(cl, Clustering) else cl
    hq = [c for c in clusters if quality(c) >= threshold]
    lq = [c for c in clusters if quality(c) < threshold]
    return hq, lq
