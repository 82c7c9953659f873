"""End-to-end attack runs and the worked-example self check."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from . import advgen, cfpm, codetable
from .core import Dataset, dumps_fimi, format_itemset, load_dataset
from .oracle import Oracle, build_benign_pool, evasion_rate, make_oracle
from .pipeline import CandidateReport, ModelParams, build_model


class StageError(RuntimeError):
    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"[{stage}] {type(cause).__name__}: {cause}")


@dataclass
class ExperimentConfig:
    pool_path: str
    malware_path: str
    out_dir: str
    oracle_kind: str = "fixed"
    oracle_config: str = "benign"
    params: ModelParams = field(default_factory=ModelParams)
    query_budget: int | None = None
    only_if_shorter: bool = False
    seed: int = 0

    def check(self) -> None:
        for p in (self.pool_path, self.malware_path):
            if not os.path.exists(p):
                raise FileNotFoundError(p)


def attack(oracle: Oracle, pool: Dataset, malware: Dataset, params: ModelParams, *,
           only_if_shorter: bool = False) -> tuple[dict, list[advgen.AdversarialResult], codetable.CodeTable]:
    """Query -> model -> generate -> measure.  Returns (report, results, benign table)."""
    stage = "benign-pool"
    try:
        d_b = build_benign_pool(oracle, pool)
        q_pool = oracle.query_count
        stage = "build-model"
        cand = CandidateReport()
        ct = build_model(d_b, params, report=cand)
        stage = "advgen"
        results = advgen.batch_generate(ct, malware, only_if_shorter=only_if_shorter)
        stage = "evasion"
        before = evasion_rate(oracle, malware)
        after = evasion_rate(oracle, [r.adversarial for r in results])
    except Exception as e:  # noqa: BLE001 - re-raised with the stage attached
        raise StageError(stage, e) from e

    report = {
        "n_pool": pool.n,
        "n_benign": d_b.n,
        "n_malware": malware.n,
        "evasion_before": before,
        "evasion_after": after,
        "queries_pool": q_pool,
        "queries_total": oracle.query_count,
        "ct_rows": len(ct),
        "ct_non_singletons": len(ct.non_singletons),
        "ct_total_length": codetable.total_length(ct),
        "n_clusters": cand.n_clusters,
        "n_hq_clusters": cand.n_hq,
        "cluster_fallback": cand.fallback,
        "samples": [
            {"idx": j, "len_before": r.len_before, "len_after": r.len_after,
             "pattern": list(r.added_pattern), "status": r.status}
            for j, r in enumerate(results)
        ],
    }
    return report, results, ct


def _fmt_bits(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else f"{x:.6f}"


def format_report(report: dict) -> str:
    lines = [
        f"pool samples        {report['n_pool']}",
        f"benign after query  {report['n_benign']}",
        f"malware samples     {report['n_malware']}",
        f"evasion before      {report['evasion_before']:.4f}",
        f"evasion after       {report['evasion_after']:.4f}",
        f"queries (pool)      {report['queries_pool']}",
        f"queries (total)     {report['queries_total']}",
        f"code table rows     {report['ct_rows']} ({report['ct_non_singletons']} non-singleton)",
        f"code table length   {report['ct_total_length']:.6f}",
        f"clusters            {report['n_clusters']} ({report['n_hq_clusters']} HQ)",
        "",
    ]
    for s in report["samples"]:
        lines.append(f"{s['idx']} {_fmt_bits(s['len_before'])} {_fmt_bits(s['len_after'])} "
                     f"pattern={' '.join(map(str, s['pattern']))}")
    return "\n".join(lines) + "\n"


def run_attack(config: ExperimentConfig) -> dict:
    """Run the full attack from files and write outputs into ``config.out_dir``."""
    try:
        config.check()
    except FileNotFoundError as e:
        raise StageError("config", e) from e
    try:
        pool = load_dataset(config.pool_path)
        malware = load_dataset(config.malware_path, allow_empty=True)
    except Exception as e:  # noqa: BLE001
        raise StageError("load", e) from e
    # the attacker's feature space covers both files
    alphabet = set(pool.alphabet) | set(malware.alphabet)
    pool, malware = pool.with_alphabet(alphabet), malware.with_alphabet(alphabet)
    try:
        oracle = make_oracle(config.oracle_kind, config.oracle_config, query_budget=config.query_budget)
    except Exception as e:  # noqa: BLE001
        raise StageError("oracle", e) from e
    with oracle:
        report, results, ct = attack(oracle, pool, malware, config.params, only_if_shorter=config.only_if_shorter)

    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "adversarial.fimi").write_text(dumps_fimi(r.adversarial for r in results), encoding="utf-8")
    (out / "benign.ct").write_text(codetable.dumps_code_table(ct), encoding="utf-8")
    (out / "report.txt").write_text(format_report(report), encoding="utf-8")
    (out / "report.json").write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    return report


# -- worked example -----------------------------------------------------------

EXAMPLE_TRANSACTIONS = (
    (1, 2, 3, 4), (1, 2, 3, 4), (1, 2, 4), (2, 3, 4, 5), (3, 4, 5),
    (4, 5), (2,), (3,), (4,), (5,),
)

EXAMPLE_CANDIDATES = (
    ((4,), 7), ((3,), 5), ((2,), 5), ((3, 4), 4), ((2, 4), 4), ((5,), 4),
    ((2, 3, 4), 3), ((1, 2, 4), 3), ((4, 5), 3), ((1, 2, 3, 4), 2), ((3, 4, 5), 2), ((2, 3, 4, 5), 1),
)

EXAMPLE_CODE_LENGTHS = {(1, 2, 4): 3, (4,): 3, (3,): 2, (2,): 4, (5,): 3, (1,): 8}


def example_dataset() -> Dataset:
    return Dataset(EXAMPLE_TRANSACTIONS)


def run_golden(epsilon: float = codetable.DEFAULT_EPSILON, minsup: int = 1) -> list[tuple[str, bool, str]]:
    """Check the 10-transaction example end to end; one (name, ok, detail) per check."""
    d = example_dataset()
    checks = []

    def check(name, ok, detail=""):
        checks.append((name, bool(ok), detail))

    check("dataset shape n=10 m=5", d.n == 10 and d.m == 5, f"n={d.n} m={d.m}")
    mined = cfpm.mine_closed(d, minsup)
    got = {(p.pattern, p.support) for p in mined}
    check("12 closed candidates", len(mined) == len(EXAMPLE_CANDIDATES), f"got {len(mined)}")
    check("candidate supports", got == set(EXAMPLE_CANDIDATES),
          f"diff {sorted(got ^ set(EXAMPLE_CANDIDATES))}")

    ct = codetable.build_krimp(d, mined, epsilon)
    lengths = {r.pattern: r.code_length for r in ct.rows}
    check("non-singleton rows == {1,2,4}", [r.pattern for r in ct.non_singletons] == [(1, 2, 4)],
          f"got {[format_itemset(r.pattern) for r in ct.non_singletons]}")
    for p, want in EXAMPLE_CODE_LENGTHS.items():
        check(f"code length {format_itemset(p)} == {want}", lengths.get(p) == want, f"got {lengths.get(p)}")

    res = advgen.generate(ct, (1, 4))
    check("len({1,4}) == 11", res.len_before == 11, f"got {res.len_before}")
    check("P* == {1,2,4}", res.added_pattern == (1, 2, 4), f"got {res.added_pattern}")
    check("len(adv) == 3", res.len_after == 3, f"got {res.len_after}")
    return checks


def golden_passed(checks) -> bool:
    return all(ok for _, ok, _ in checks)


__all__ = ["ExperimentConfig", "StageError", "attack", "run_attack", "run_golden", "golden_passed",
           "example_dataset", "format_report"]
