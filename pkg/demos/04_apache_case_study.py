"""Four phases of the Apache HTTP Server project, and three what-if scenarios.

Run: python demos/04_apache_case_study.py
"""

from loyaltygame import Counterfactual, load_builtin, run_case_study, run_counterfactual

apache = load_builtin("apache")
report = run_case_study(apache)

print("As the project grew, mean loyalty fell. Both push per-member effort down.\n")
print(f"  {'phase':<11} {'n':>3} {'loyalty':>8} {'capped':>8} {'uncapped':>10} {'published':>10}")
for p in report.phases:
    print(f"  {p.name:<11} {p.team_size:>3} {p.mean_loyalty:8.2f} {p.effort:8.2f} "
          f"{p.effort_uncapped:10.2f} {p.reference['published_effort']:10.1f}")

print("\nWith a cap of 10 the first three phases saturate, so ordering is judged on")
print("the uncapped level.")
print(f"  Spearman vs expected ranks: {report.spearman_effort}")
print(f"  rubric score: {report.rubric['score']:g} / {report.rubric['max_score']:g}\n")

for spec in ("scale_mechanisms:0.5", "cap_team_size:15", "shift_loyalty:0.15@Growth"):
    cf = run_counterfactual(apache, Counterfactual.parse(spec))
    print(f"{spec}: expected {cf['expectation']}")
    for row in cf["phases"]:
        if row["affected"]:
            print(f"    {row['phase']:<11} uncapped effort {row['effort_uncapped_change_pct']:+7.1f}%"
                  f"   output {row['output_change_pct']:+6.1f}%")
