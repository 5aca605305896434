"""From an HR-style assessment table to model inputs, using the shipped Team T scenario.

Run: python demos/02_team_translation.py
"""

import numpy as np

from loyaltygame import load_builtin, solve_tpe
from loyaltygame.translation import loyalty_gap, needs_intervention

team = load_builtin("team_t")
print(team.description, "\n")

formula = team.loyalties(use_override=False)
published = team.loyalties()
print(f"  {'member':<7} {'factor score':>12} {'assessed':>9}")
for mid, f, p in zip(team.ids(), formula, published):
    print(f"  {mid:<7} {f:12.4f} {p:9.2f}")
print("\nThe weighted factor sum and the assessed values differ. Both are kept:")
print("the assessed column is an explicit per-member override.\n")

print(f"Dependency-weighted cohesion: {team.cohesion():.4f}\n")

for label, theta in (("assessed", published), ("factor score", formula)):
    eq = solve_tpe(team.config, team.consolidated_mech, theta)
    print(f"Equilibrium with {label} loyalty:", np.round(eq.profile, 3))

target = 0.7
print(f"\nMembers whose loyalty falls more than 0.3 below a target of {target}:")
for mid, theta in zip(team.ids(), published):
    gap = loyalty_gap(target, float(theta))
    if needs_intervention(gap):
        print(f"  {mid}: gap {gap:.2f}")
