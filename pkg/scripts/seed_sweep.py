"""Evasion before/after over several synthetic seeds and noise levels."""

import itertools

from mdlattack import synthetic
from mdlattack.pipeline import ModelParams

from synthetic_attack import run

print("noise seed before after non_singletons")
for noise, seed in itertools.product([0.02, 0.05, 0.1], range(5)):
    cfg = synthetic.SyntheticConfig(noise=noise, seed=seed)
    r = run(cfg, ModelParams(minsup=0.05))
    print(f"{noise:.2f} {seed} {r['evasion_before']:.4f} {r['evasion_after']:.4f} {r['ct_non_singletons']}")
