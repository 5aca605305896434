"""How much effort does a five-person team put in, and how much does loyalty buy back?

Run: python demos/01_free_riding.py
"""

from loyaltygame import (
    MechanismStrengths,
    TeamConfig,
    analytic_symmetric_equilibrium,
    social_optimum,
    solve_tpe,
    welfare_loss,
)

config = TeamConfig()  # omega=20, beta=0.5, c=2.5, n=5, cap=10
mech = MechanismStrengths()  # phi_B=0.8, phi_C=0.3

print("A purely self-interested team keeps 1/n of the output it creates but pays")
print("the full cost of its own effort, so everyone holds back.\n")

baseline = analytic_symmetric_equilibrium(config, mech, 0.0)
optimum = social_optimum(config)
print(f"  equilibrium effort per member   {baseline:7.3f}")
print(f"  socially optimal effort         {optimum:7.3f}")
print(f"  shortfall                       {100 * (1 - baseline / optimum):6.1f}%\n")

print("Loyalty makes each member count part of the teammates' payoff as their own")
print("and discounts the felt cost of effort.\n")
print(f"  {'loyalty':>7} {'effort':>8} {'of optimum':>11} {'welfare lost':>13}")
for theta in (0.0, 0.2, 0.4, 0.6, 0.8):
    eq = solve_tpe(config, mech, theta)
    loss = welfare_loss(config, mech, theta)
    print(f"  {theta:7.1f} {eq.profile[0]:8.3f} {eq.profile[0] / optimum:10.0%} {loss.loss:13.2f}")

print("\nMixed teams are solved by best-response iteration. The most loyal member")
print("carries the load while the others contribute nothing:")
eq = solve_tpe(config, mech, [0.1, 0.3, 0.5, 0.7, 0.9])
print("  efforts", [round(float(x), 3) for x in eq.profile], "converged:", eq.converged)
