
import pytest
from hypothesis import given, strategies as st

from mdlattack import clope
from mdlattack.cfpm import mine_closed, order_candidates
from mdlattack.codetable import build_krimp, standard_code_table, total_length
from mdlattack.core import Dataset, support
from mdlattack.pipeline import CandidateReport, ModelParams, build_model, candidates_via_clustering

from conftest import datasets


def test_skip_clustering_equals_direct_mining(example):
    p = ModelParams(minsup=1, skip_clustering=True)
    assert candidates_via_clustering(example, p) == mine_closed(example, 1)
    assert len(candidates_via_clustering(example, p)) == 12


def test_build_model_reproduces_example_table(example):
    ct = build_model(example, ModelParams(minsup=1, skip_clustering=True))
    assert [r.pattern for r in ct.non_singletons] == [(1, 2, 4)]
    assert ct.lengths() == {(1, 2, 4): 3, (4,): 3, (3,): 2, (2,): 4, (5,): 3, (1,): 8}


def test_two_disjoint_groups_union_of_closed_sets():
    d = Dataset.from_iterables([{1, 2, 3}] * 3 + [{7, 8}] * 2)
    rep = CandidateReport()
    cands = candidates_via_clustering(d, ModelParams(minsup=1), rep)
    expected = set()
    for rows in ([0, 1, 2], [3, 4]):
        expected |= {(m.pattern, support(d, m.pattern)) for m in mine_closed(d.subset(rows), 1)}
    assert {(c.pattern, c.support) for c in cands} == expected == {((1, 2, 3), 3), ((7, 8), 2)}
    assert rep.n_clusters == 2 and rep.n_hq == 2 and not rep.fallback


def test_no_hq_cluster_falls_back(caplog):
    d = Dataset.from_iterables([{1, 2}, {2, 3}, {3, 4}, {1, 4}])
    rep = CandidateReport()
    p = ModelParams(minsup=1, max_clusters=1, quality_threshold=1.0)
    cands = candidates_via_clustering(d, p, rep)
    assert rep.fallback
    assert cands == mine_closed(d, 1)
    assert "mining the whole dataset" in caplog.text


def test_one_transaction_dataset():
    d = Dataset.from_iterables([{1, 2, 3}])
    ct = build_model(d, ModelParams(minsup=1))
    # standard: 3 codes of 2 bits, 6 data bits, 6*log2(4)+6 model bits
    standard = 6 + 6 * 2 + 6
    # with {1,2,3}: one 1-bit code, 4*log2(4)+1 model bits
    with_pattern = 1 + 4 * 2 + 1
    assert total_length(standard_code_table(d)) == pytest.approx(standard)
    assert with_pattern < standard
    assert [r.pattern for r in ct.non_singletons] == [(1, 2, 3)]
    assert total_length(ct) == pytest.approx(with_pattern)


@pytest.mark.parametrize("n", [2, 5, 12])
def test_identical_transactions(n):
    d = Dataset.from_iterables([{1, 2, 3}] * n)
    ct = build_model(d, ModelParams(minsup=1))
    assert ct.row((1, 2, 3)).usage == n


def test_relative_minsup_resolved_against_full_dataset():
    # 20 rows; 0.1 -> 2; the {5,6} cluster has 2 rows and must still be mined
    d = Dataset.from_iterables([{1, 2, 3, 4}] * 18 + [{5, 6}] * 2)
    cands = candidates_via_clustering(d, ModelParams(minsup=0.1))
    assert ((5, 6), 2) in {(c.pattern, c.support) for c in cands}


def test_params_validation():
    with pytest.raises(ValueError):
        ModelParams(repulsion=0)
    with pytest.raises(ValueError):
        ModelParams(quality_threshold=2)
    with pytest.raises(ValueError):
        ModelParams(epsilon=0)
    assert ModelParams(minsup=3).minsup.value == 3


@given(datasets(max_items=8, max_n=25), st.integers(1, 3), st.floats(0.0, 0.6))
def test_candidate_union_properties(d, minsup, thr):
    p = ModelParams(minsup=minsup, quality_threshold=thr, max_clusters=4)
    cands = candidates_via_clustering(d, p)
    pats = [c.pattern for c in cands]
    assert len(pats) == len(set(pats))
    for c in cands:
        assert c.support == support(d, c.pattern)
    assert cands == order_candidates(cands)
    # nothing mined from an HQ cluster is lost in the union
    cl = clope.cluster(d, p.repulsion, p.max_clusters, p.max_passes)
    hq, _ = clope.partition_hq(cl, thr)
    if hq:
        for c in hq:
            for m in mine_closed(d.subset(c.member_indices), minsup):
                assert m.pattern in pats


@given(datasets(max_items=7, max_n=20))
def test_skip_clustering_bit_identical(d):
    p = ModelParams(minsup=1, skip_clustering=True)
    assert build_model(d, p) == build_krimp(d, order_candidates(mine_closed(d, 1)))
