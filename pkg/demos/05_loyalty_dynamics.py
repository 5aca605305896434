"""Loyalty that responds to results: a virtuous circle and a vicious one.

Run: python demos/05_loyalty_dynamics.py
"""

from loyaltygame import (
    DynamicsSettings,
    MechanismStrengths,
    TeamConfig,
    classify_regime,
    simulate_loyalty_evolution,
)

config, mech = TeamConfig(), MechanismStrengths()
print("Each period the team plays its equilibrium, then every member's loyalty")
print("moves toward or away from the team by rate * (output - target).\n")

for start in (0.6, 0.35, 0.1):
    traj = simulate_loyalty_evolution(config, mech, start)
    means = traj.mean_loyalty()
    path = " ".join(f"{m:.2f}" for m in means[::10])
    print(f"  start {start:.2f}: {path}  -> {classify_regime(traj)}")

print(f"\nThe target output ({traj.output_target:.1f}) sits between the low- and high-loyalty")
print("equilibria. Teams starting above the tipping point climb, and the others decay.")

frozen = simulate_loyalty_evolution(config, mech, 0.6, DynamicsSettings(learning_rate=0.0))
print("With learning rate 0 nothing moves:", classify_regime(frozen))
