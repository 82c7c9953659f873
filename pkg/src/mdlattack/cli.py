"""Command line entry point (``mdlattack <subcommand>``).

Exit codes: 0 success, 1 usage error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import advgen, cfpm, clope, codetable
from .classify import ClassifierModel, classify, evaluate
from .core import Dataset, DomainError, LabeledDataset, ParseError, load_dataset, save_dataset
from .experiment import ExperimentConfig, StageError, format_report, golden_passed, run_attack, run_golden
from .oracle import OracleError, make_oracle
from .pipeline import CandidateReport, ModelParams, build_model


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _minsup(text: str) -> cfpm.MinsupSpec:
    try:
        return cfpm.MinsupSpec.parse(text)
    except (TypeError, ValueError) as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _add_model_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--minsup", type=_minsup, default=cfpm.MinsupSpec(0.001),
                   help="absolute count (int) or fraction of |D| (float); default 0.001")
    p.add_argument("--repulsion", type=float, default=clope.DEFAULT_REPULSION)
    p.add_argument("--max-clusters", type=int, default=clope.DEFAULT_MAX_CLUSTERS)
    p.add_argument("--threshold", type=float, default=clope.DEFAULT_QUALITY_THRESHOLD)
    p.add_argument("--epsilon", type=float, default=codetable.DEFAULT_EPSILON)
    p.add_argument("--no-cluster", action="store_true", help="mine the whole dataset directly")
    p.add_argument("--real-lengths", action="store_true", help="use real-valued code lengths")
    p.add_argument("--max-passes", type=int, default=clope.DEFAULT_MAX_PASSES)
    p.add_argument("--shuffle", action="store_true", help="shuffle transaction order before clustering")
    p.add_argument("--seed", type=int, default=0)


def _model_params(a) -> ModelParams:
    try:
        return ModelParams(minsup=a.minsup, repulsion=a.repulsion, max_clusters=a.max_clusters,
                           quality_threshold=a.threshold, epsilon=a.epsilon, skip_clustering=a.no_cluster,
                           max_passes=a.max_passes, ceil_lengths=not a.real_lengths, shuffle=a.shuffle,
                           seed=a.seed)
    except ValueError as e:
        raise UsageError(str(e)) from None


def _bits(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else f"{x:.6f}"


def cmd_mine(a) -> int:
    d = load_dataset(a.input)
    for m in cfpm.mine_closed(d, a.minsup):
        print(f"{' '.join(map(str, m.pattern))} : {m.support}")
    return 0


def cmd_cluster(a) -> int:
    d = load_dataset(a.input)
    cl = clope.cluster(d, a.repulsion, a.max_clusters, a.max_passes, shuffle=a.shuffle, seed=a.seed)
    hq, _ = clope.partition_hq(cl, a.threshold)
    hq_ids = {id(c) for c in hq}
    print("cluster size S W quality hq")
    for k, c in enumerate(cl.clusters):
        print(f"{k} {c.size} {c.S} {c.W} {clope.quality(c):.6f} {int(id(c) in hq_ids)}")
    if a.assignment:
        with open(a.assignment, "w", encoding="utf-8") as fh:
            for j, k in enumerate(cl.assignment(d.n)):
                fh.write(f"{j} {k}\n")
    return 0


def cmd_build_ct(a) -> int:
    d = load_dataset(a.input)
    params = _model_params(a)
    rep = CandidateReport()
    ct = build_model(d, params, report=rep)
    codetable.save_code_table(ct, a.out)
    print(f"rows={len(ct)} non_singletons={len(ct.non_singletons)} "
          f"total_length={codetable.total_length(ct):.6f}", file=sys.stderr)
    return 0


def cmd_encode(a) -> int:
    ct = codetable.load_code_table(a.ct)
    d = load_dataset(a.input)
    for j, t in enumerate(d):
        parts = " + ".join(" ".join(map(str, p)) for p in codetable.cover(ct, t))
        print(f"{j} {_bits(codetable.encoded_length_transaction(ct, t))} cover={parts}")
    return 0


def _read_labels(path: str) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        return [line.strip() for line in fh if line.strip()]


def cmd_classify(a) -> int:
    model = ClassifierModel(codetable.load_code_table(a.ct_benign), codetable.load_code_table(a.ct_malware))
    d = load_dataset(a.input)
    skipped = 0
    for j, t in enumerate(d):
        try:
            l_b, l_m = model.lengths(t)
            print(f"{j} {classify(model, t)} benign_len={_bits(l_b)} malware_len={_bits(l_m)}")
        except DomainError:
            skipped += 1
            print(f"{j} skipped")
    if a.labels:
        labels = _read_labels(a.labels)
        if len(labels) != d.n:
            raise UsageError(f"{a.labels} has {len(labels)} labels for {d.n} samples")
        bad = set(labels) - {model.label1, model.label2}
        if bad:
            raise UsageError(f"unknown labels {sorted(bad)}")
        ben = [t for t, lab in zip(d, labels) if lab == model.label1]
        mal = [t for t, lab in zip(d, labels) if lab == model.label2]
        m = evaluate(model, LabeledDataset(Dataset(tuple(ben), d.alphabet), Dataset(tuple(mal), d.alphabet)))
        print("# metrics")
        for k, v in m.as_dict().items():
            print(f"{k} {v:.6f}" if isinstance(v, float) else f"{k} {v}")
    elif skipped:
        print(f"# skipped {skipped}")
    return 0


def cmd_advgen(a) -> int:
    ct = codetable.load_code_table(a.ct)
    d = load_dataset(a.malware, allow_empty=True)
    results = advgen.batch_generate(ct, d, only_if_shorter=a.only_if_shorter)
    save_dataset([r.adversarial for r in results], a.out)
    lines = [f"{j} {_bits(r.len_before)} {_bits(r.len_after)} pattern={' '.join(map(str, r.added_pattern))}"
             for j, r in enumerate(results)]
    text = "\n".join(lines) + ("\n" if lines else "")
    if a.report:
        with open(a.report, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_oracle_query(a) -> int:
    d = load_dataset(a.input)
    with make_oracle(a.kind, a.config, query_budget=a.budget) as o:
        for j, t in enumerate(d):
            print(f"{j} {o.query(t)}")
        print(f"# queries {o.query_count}")
    return 0


def cmd_attack(a) -> int:
    cfg = ExperimentConfig(a.pool, a.malware, a.out_dir, a.oracle_kind, a.oracle_config,
                           _model_params(a), a.budget, a.only_if_shorter, a.seed)
    report = run_attack(cfg)
    sys.stdout.write(format_report({**report, "samples": []}))
    return 0


def cmd_golden(a) -> int:
    checks = run_golden(a.epsilon, a.minsup)
    for name, ok, detail in checks:
        print(f"{'PASS' if ok else 'FAIL'} {name}" + ("" if ok else f" ({detail})"))
    if a.json:
        print(json.dumps([{"check": n, "ok": ok} for n, ok, _ in checks]))
    return 0 if golden_passed(checks) else 2


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="mdlattack", description="MDL code tables, classification and adversarial examples")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("mine", help="closed frequent itemsets in candidate order")
    p.add_argument("--input", required=True)
    p.add_argument("--minsup", type=_minsup, required=True)
    p.add_argument("--closed", action="store_true", help="accepted for compatibility; output is always closed")
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("cluster", help="CLOPE clustering with quality scores")
    p.add_argument("--input", required=True)
    p.add_argument("--repulsion", type=float, default=clope.DEFAULT_REPULSION)
    p.add_argument("--max-clusters", type=int, default=clope.DEFAULT_MAX_CLUSTERS)
    p.add_argument("--threshold", type=float, default=clope.DEFAULT_QUALITY_THRESHOLD)
    p.add_argument("--max-passes", type=int, default=clope.DEFAULT_MAX_PASSES)
    p.add_argument("--assignment", help="write 'index cluster' lines here")
    p.add_argument("--shuffle", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("build-ct", help="build a code table")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    _add_model_args(p)
    p.set_defaults(func=cmd_build_ct)

    p = sub.add_parser("encode", help="per-sample encoded lengths")
    p.add_argument("--ct", required=True)
    p.add_argument("--input", required=True)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("classify", help="label samples by compressed length")
    p.add_argument("--ct-benign", required=True)
    p.add_argument("--ct-malware", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--labels", help="one 'benign'/'malware' per sample; enables metrics")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("advgen", help="generate adversarial examples")
    p.add_argument("--ct", required=True, help="benign code table")
    p.add_argument("--malware", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--report")
    p.add_argument("--only-if-shorter", action="store_true")
    p.set_defaults(func=cmd_advgen)

    p = sub.add_parser("oracle-query", help="query a target classifier")
    p.add_argument("--kind", required=True, choices=["fixed", "builtin-mdl", "subprocess", "http"])
    p.add_argument("--config", default="")
    p.add_argument("--input", required=True)
    p.add_argument("--budget", type=int)
    p.set_defaults(func=cmd_oracle_query)

    p = sub.add_parser("attack", help="end-to-end black-box attack")
    p.add_argument("--pool", required=True, help="candidate benign samples (FIMI)")
    p.add_argument("--malware", required=True)
    p.add_argument("--oracle-kind", default="fixed", choices=["fixed", "builtin-mdl", "subprocess", "http"])
    p.add_argument("--oracle-config", default="benign")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--budget", type=int)
    p.add_argument("--only-if-shorter", action="store_true")
    _add_model_args(p)
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("golden", help="check the built-in 10-transaction example")
    p.add_argument("--epsilon", type=float, default=codetable.DEFAULT_EPSILON)
    p.add_argument("--minsup", type=int, default=1)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_golden)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    a = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if a.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return a.func(a)
    except UsageError as e:
        print(f"mdlattack {a.command}: error: {e}", file=sys.stderr)
        return 1
    except FileNotFoundError as e:
        print(f"mdlattack {a.command}: error: {e}", file=sys.stderr)
        return 1
    except (StageError, OracleError, ParseError, DomainError, ValueError, OSError) as e:
        print(f"mdlattack {a.command}: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
