"""The 3,125-configuration validation sweep and its six behavioral targets.

Run: python demos/03_validation_sweep.py [workers]
"""

import sys
import time

from loyaltygame import GridSpec, run_sweep
from loyaltygame.harness import PUBLISHED_REFERENCE

workers = int(sys.argv[1]) if len(sys.argv) > 1 else 1
start = time.perf_counter()
report = run_sweep(GridSpec(), workers=workers)
print(f"Solved {GridSpec().size} configurations in {time.perf_counter() - start:.1f}s\n")

print(f"  {'target':<24} {'ours':>7} {'published':>10}")
for name, frac in report.targets.fractions.items():
    ref = PUBLISHED_REFERENCE["target_fractions"].get(name)
    print(f"  {name:<24} {frac:7.3f} {'' if ref is None else f'{ref:10.3f}'}")

s = report.statistics
print("\nEffort differentiation (high over low loyalty):")
print(f"  median, capped efforts    {s['median_differentiation']:.2f}")
print(f"  median, uncapped efforts  {s['median_differentiation_uncapped']:.2f}"
      f"   published {PUBLISHED_REFERENCE['median_differentiation']}")
print("\nThe published effect sizes depend on pairing choices that are not described,")
print("so they are reported next to ours rather than matched:")
boot = s["bootstrap_mean_differentiation"]
print(f"  bootstrap mean  {boot['point_estimate']:.2f} [{boot['ci_low']:.2f}, {boot['ci_high']:.2f}]"
      f"   published {PUBLISHED_REFERENCE['bootstrap_mean_differentiation']} {PUBLISHED_REFERENCE['bootstrap_ci']}")
print(f"  paired t        {s['paired_t_high_vs_low']['t']:.2f}   published {PUBLISHED_REFERENCE['paired_t']}")
print(f"  Cohen's d       {s['cohens_d_high_vs_low']:.2f}   published {PUBLISHED_REFERENCE['cohens_d']}")
