"""Cluster-guided model selection: CLOPE -> HQ clusters -> closed mining -> KRIMP."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from . import clope
from .cfpm import MinedPattern, MinsupSpec, mine_closed, order_candidates
from .codetable import DEFAULT_EPSILON, CodeTable, KrimpTrace, build_krimp
from .core import Dataset, support

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ModelParams:
    minsup: MinsupSpec = field(default_factory=lambda: MinsupSpec(0.001))
    repulsion: float = clope.DEFAULT_REPULSION
    max_clusters: int = clope.DEFAULT_MAX_CLUSTERS
    quality_threshold: float = clope.DEFAULT_QUALITY_THRESHOLD
    epsilon: float = DEFAULT_EPSILON
    skip_clustering: bool = False
    max_passes: int = clope.DEFAULT_MAX_PASSES
    ceil_lengths: bool = True
    shuffle: bool = False
    seed: int | None = None

    def __post_init__(self):
        if not isinstance(self.minsup, MinsupSpec):
            object.__setattr__(self, "minsup", MinsupSpec(self.minsup))
        if self.repulsion <= 0:
            raise ValueError("repulsion must be positive")
        if self.max_clusters < 1:
            raise ValueError("max_clusters must be >= 1")
        if not 0.0 <= self.quality_threshold <= 1.0:
            raise ValueError("quality_threshold must lie in [0, 1]")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")


@dataclass
class CandidateReport:
    n_clusters: int = 0
    qualities: list[float] = field(default_factory=list)
    n_hq: int = 0
    fallback: bool = False
    per_cluster_counts: list[int] = field(default_factory=list)


def candidates_via_clustering(d: Dataset, p: ModelParams, report: CandidateReport | None = None
                              ) -> list[MinedPattern]:
    """Closed patterns of the high-quality clusters, re-supported on all of ``d``."""
    if d.n == 0:
        raise ValueError("cannot build candidates for an empty dataset")
    report = report if report is not None else CandidateReport()
    threshold = p.minsup.resolve(d.n)
    if p.skip_clustering:
        return mine_closed(d, threshold)

    cl = clope.cluster(d, p.repulsion, p.max_clusters, p.max_passes, shuffle=p.shuffle, seed=p.seed)
    report.n_clusters = len(cl.clusters)
    report.qualities = [clope.quality(c) for c in cl.clusters]
    hq, _ = clope.partition_hq(cl, p.quality_threshold)
    report.n_hq = len(hq)
    if not hq:
        log.warning("no cluster reaches quality %.3f; mining the whole dataset", p.quality_threshold)
        report.fallback = True
        return mine_closed(d, threshold)

    found: set[tuple[int, ...]] = set()
    for c in hq:
        # absolute minsup from |D| applied inside each cluster
        if c.size < threshold:
            report.per_cluster_counts.append(0)
            continue
        mined = mine_closed(d.subset(c.member_indices), threshold)
        report.per_cluster_counts.append(len(mined))
        found.update(m.pattern for m in mined)
    return order_candidates(MinedPattern(q, support(d, q)) for q in found)


def build_model(d: Dataset, p: ModelParams, *, report: CandidateReport | None = None,
                trace: KrimpTrace | None = None) -> CodeTable:
    cands = candidates_via_clustering(d, p, report)
    return build_krimp(d, cands, p.epsilon, ceil_lengths=p.ceil_lengths, trace=trace)
