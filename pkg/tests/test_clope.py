from collections import Counter

import pytest
from hypothesis import given, strategies as st

from mdlattack.clope import Cluster, Clustering, cluster, partition_hq, profit, quality
from mdlattack.core import Dataset

from conftest import datasets


def set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for k in range(len(part)):
            yield part[:k] + [[first] + part[k]] + part[k + 1:]
        yield [[first]] + part


def brute_profit(d, blocks, r):
    num = 0.0
    for b in blocks:
        s = sum(len(d[j]) for j in b)
        w = len(set().union(*(d[j] for j in b)))
        num += s * len(b) / w**r
    return num / d.n


def groups_fixture(k=3, copies=2):
    rows = []
    for g in range(k):
        rows += [{10 * g + 1, 10 * g + 2, 10 * g + 3}] * copies
    return Dataset.from_iterables(rows)


def _blocks(cl):
    return sorted(sorted(c.member_indices) for c in cl.clusters)


def test_disjoint_groups_recovered_and_profit_optimal():
    d = groups_fixture(3, 2)  # n = 6
    cl = cluster(d, r=4, max_clusters=3)
    assert _blocks(cl) == [[0, 1], [2, 3], [4, 5]]
    best = max(set_partitions(list(range(d.n))), key=lambda b: brute_profit(d, b, 4))
    assert sorted(sorted(b) for b in best) == _blocks(cl)
    assert profit(cl.clusters, 4) == pytest.approx(brute_profit(d, best, 4))


def test_groups_with_spare_cluster_capacity():
    d = groups_fixture(3, 3)
    cl = cluster(d, r=4, max_clusters=16)
    assert _blocks(cl) == [[0, 1, 2], [3, 4, 5], [6, 7, 8]]


def test_single_transaction():
    cl = cluster(Dataset.from_iterables([{1, 2}]))
    assert _blocks(cl) == [[0]]


def test_max_clusters_one():
    cl = cluster(groups_fixture(3, 2), max_clusters=1)
    assert _blocks(cl) == [list(range(6))]


def test_bad_parameters():
    d = groups_fixture()
    with pytest.raises(ValueError):
        cluster(d, r=0)
    with pytest.raises(ValueError):
        cluster(d, max_clusters=0)


def test_quality_examples():
    d = Dataset.from_iterables([{1, 2}, {3, 4}, {5, 6, 7}, {5, 6, 7}, {5, 6, 7}])
    assert quality(Cluster.of(d, [0, 1])) == 0.5
    assert quality(Cluster.of(d, [2, 3, 4])) == 1.0
    assert quality(Cluster.of(d, [0])) == 1.0
    with pytest.raises(ValueError):
        quality(Cluster())


def _cluster_with_quality(q):
    # N members, one item per member: S = N, W = ... pick S/W/N = q via occ counts
    c = Cluster(member_indices=list(range(100)), S=int(round(q * 100 * 100)))
    c.occ = Counter({i: 1 for i in range(100)})
    return c


def test_partition_hq_reported_qualities():
    qs = [0.20, 0.51, 0.71, 0.91, 0.75, 0.87, 0.51, 0.15, 0.50, 0.37, 0.31, 0.35, 0.34, 0.86, 0.29, 0.08]
    clusters = [_cluster_with_quality(q) for q in qs]
    assert [quality(c) for c in clusters] == pytest.approx(qs)
    hq, lq = partition_hq(Clustering(clusters, 4, 16), 0.1)
    assert len(hq) == 15 and len(lq) == 1
    assert quality(lq[0]) == pytest.approx(0.08)
    assert hq == [c for c in clusters if c is not lq[0]]


def test_partition_hq_thresholds():
    d = Dataset.from_iterables([{1, 2}, {3, 4}, {5}, {5}])
    cl = Clustering([Cluster.of(d, [0, 1]), Cluster.of(d, [2, 3])], 4, 16)
    assert partition_hq(cl, 0.0) == (cl.clusters, [])
    hq, lq = partition_hq(cl, 1.0)
    assert [c.member_indices for c in hq] == [[2, 3]]
    with pytest.raises(ValueError):
        partition_hq(cl, 1.5)


def test_shuffle_is_seeded():
    d = groups_fixture(3, 4)
    a = cluster(d, shuffle=True, seed=7)
    b = cluster(d, shuffle=True, seed=7)
    assert _blocks(a) == _blocks(b)


@given(datasets(max_items=10, max_n=30), st.floats(0.5, 5), st.integers(1, 6))
def test_clustering_is_partition_with_valid_stats(d, r, k):
    cl = cluster(d, r=r, max_clusters=k)
    assert len(cl.clusters) <= k
    idx = sorted(j for c in cl.clusters for j in c.member_indices)
    assert idx == list(range(d.n))
    for c in cl.clusters:
        assert c.size > 0
        assert c.S == sum(len(d[j]) for j in c.member_indices)
        assert c.W == len(set().union(*(d[j] for j in c.member_indices)))
        assert 0 < quality(c) <= 1


@given(datasets(max_items=6, max_n=7), st.sampled_from([1.0, 2.0, 4.0]))
def test_moves_never_lose_profit_against_first_pass(d, r):
    first = cluster(d, r=r, max_passes=0)
    final = cluster(d, r=r)
    assert profit(final.clusters, r) >= profit(first.clusters, r) - 1e-9
