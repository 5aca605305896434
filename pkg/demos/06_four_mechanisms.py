"""Pulling loyalty apart into internalization, warm glow, cost tolerance and guilt.

Run: python demos/06_four_mechanisms.py
"""

from loyaltygame import ExtendedStrengths, TeamConfig, solve_extended, synergy_analysis
from loyaltygame import MechanismStrengths

config = TeamConfig()
theta = 0.5

variants = {
    "none": ExtendedStrengths(0.0, 0.0, 0.0, 0.0),
    "internalization": ExtendedStrengths(0.6, 0.0, 0.0, 0.0),
    "warm glow": ExtendedStrengths(0.0, 0.2, 0.0, 0.0),
    "cost tolerance": ExtendedStrengths(0.0, 0.0, 0.3, 0.0),
    "guilt": ExtendedStrengths(0.0, 0.0, 0.0, 0.1),
    "all four": ExtendedStrengths(),
}
print(f"Mean equilibrium effort at loyalty {theta}:\n")
for name, ext in variants.items():
    profile, sweeps, ok = solve_extended(config, ext, theta)
    print(f"  {name:<16} {profile.mean():7.3f}")

print("\nWith only two mechanisms the gains compound. Together they give more than")
print("the sum of their solo effects:")
res = synergy_analysis(config, theta, MechanismStrengths())
print(f"  baseline {res.baseline:.3f}, benefit only {res.benefit_only:.3f}, "
      f"cost only {res.cost_only:.3f}, both {res.combined:.3f}")
print(f"  synergy ratio {res.ratio:.2f}")
