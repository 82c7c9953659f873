"""Serve a code-table classifier over the subprocess oracle protocol.

    python -m mdlattack.stub_oracle --ct-benign b.ct --ct-malware m.ct
    python -m mdlattack.stub_oracle --fixed malware
"""

import argparse
import sys

from .classify import ClassifierModel, classify
from .codetable import load_code_table
from .core import DomainError


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="python -m mdlattack.stub_oracle")
    ap.add_argument("--ct-benign")
    ap.add_argument("--ct-malware")
    ap.add_argument("--fixed", choices=["benign", "malware"])
    args = ap.parse_args(argv)
    if args.fixed is None and not (args.ct_benign and args.ct_malware):
        ap.error("need --fixed or both code tables")
    model = None
    if args.fixed is None:
        model = ClassifierModel(load_code_table(args.ct_benign), load_code_table(args.ct_malware))
    for line in sys.stdin:
        if model is None:
            answer = args.fixed
        else:
            try:
                answer = classify(model, [int(x) for x in line.split()])
            except (ValueError, DomainError):
                answer = "error"
        sys.stdout.write(answer + "\n")
        sys.stdout.flush()
    return 0


if __name__ == "__main__":
    sys.exit(main())
