"""Print the worked-example checks (same as ``mdlattack golden``)."""

import sys

from mdlattack.experiment import golden_passed, run_golden

checks = run_golden()
for name, ok, detail in checks:
    print(f"{'PASS' if ok else 'FAIL'}  {name}  {'' if ok else detail}")
sys.exit(0 if golden_passed(checks) else 1)
