import json

import numpy as np
import pytest

from loyaltygame.scenarios import (
    BUILTIN_SCENARIOS,
    Counterfactual,
    ScenarioInvariantError,
    ScenarioParseError,
    ScenarioSchemaError,
    dump_scenario,
    load_builtin,
    load_scenario,
    run_case_study,
    run_counterfactual,
    scenario_from_dict,
    scenario_to_dict,
)
from loyaltygame.stats import pearson_r


def _doc(**changes):
    doc = scenario_to_dict(load_builtin("apache"))
    doc.update(changes)
    return doc


def _write(tmp_path, text):
    p = tmp_path / "s.json"
    p.write_text(text)
    return p


def test_team_t_contents():
    s = load_builtin("team_t")
    c = s.config
    assert (c.team_size, c.productivity, c.returns_exponent, c.effort_cost, c.effort_cap) == (
        6, 30, 0.7, 1.0, 10
    )
    assert s.loyalties().tolist() == [0.93, 0.74, 0.43, 0.38, 0.56, 0.50]
    assert s.loyalties(use_override=False)[0] == pytest.approx(0.8015)
    w = np.array([0.22, 0.20, 0.12, 0.12, 0.18, 0.16])
    assert s.cohesion() == pytest.approx(float(w @ s.loyalties()) / w.sum())


def test_system_s_formula_matches_published_table():
    s = load_builtin("system_s")
    assert np.allclose(s.loyalties(use_override=False), s.loyalties(), atol=0.006)


def test_apache_contents():
    s = load_builtin("apache")
    assert [p.config(s.config).team_size for p in s.phases] == [8, 20, 40, 50]
    assert [p.mean_loyalty for p in s.phases] == [0.82, 0.65, 0.52, 0.45]
    assert len(s.dependencies) == 9


@pytest.mark.parametrize("name", BUILTIN_SCENARIOS)
def test_round_trip(name, tmp_path):
    s = load_builtin(name)
    again = load_scenario(_write(tmp_path, dump_scenario(s)))
    assert again == s
    assert scenario_to_dict(again) == scenario_to_dict(s)


def test_empty_file_is_parse_error(tmp_path):
    with pytest.raises(ScenarioParseError):
        load_scenario(_write(tmp_path, ""))


def test_parse_error_reports_line(tmp_path):
    with pytest.raises(ScenarioParseError, match=r":3:"):
        load_scenario(_write(tmp_path, '{\n "name": "x",\n oops\n}'))


@pytest.mark.parametrize(
    "mutate",
    [
        lambda d: d.pop("config"),
        lambda d: d.__setitem__("bogus", 1),
        lambda d: d.__setitem__("schema_version", 2),
        lambda d: d["config"].__setitem__("team_size", "8"),
        lambda d: d["config"].__setitem__("productivity", True),
        lambda d: d.__setitem__("extended_mechanisms", {"internalization": 0.5}),
        lambda d: d["loyalty"].__setitem__("members", []),
    ],
)
def test_schema_errors(mutate):
    d = _doc()
    mutate(d)
    with pytest.raises(ScenarioSchemaError):
        scenario_from_dict(d)


@pytest.mark.parametrize(
    "mutate",
    [
        lambda d: d["config"].__setitem__("returns_exponent", 1.5),
        lambda d: d["loyalty"].__setitem__("profile", [0.5] * 7),
        lambda d: d["loyalty"].__setitem__("profile", [1.5] * 8),
        lambda d: d["phases"][0].__setitem__("expected_rank", 2),
        lambda d: d["dependency_weights"].__setitem__("nobody", 0.1),
        lambda d: d["dependencies"][0].__setitem__("criticality", 3.0),
    ],
)
def test_invariant_errors(mutate):
    d = _doc()
    mutate(d)
    with pytest.raises(ScenarioInvariantError):
        scenario_from_dict(d)


def test_error_classes_distinct():
    assert not issubclass(ScenarioParseError, ScenarioSchemaError)
    assert not issubclass(ScenarioSchemaError, ScenarioInvariantError)


def test_apache_case_study():
    r = run_case_study(load_builtin("apache"))
    eff = [p.effort_uncapped for p in r.phases]
    assert all(b < a for a, b in zip(eff, eff[1:]))
    assert r.strictly_decreasing
    assert r.spearman_effort == 1.0
    assert r.spearman_total == 1.0
    assert r.rubric["score"] == r.rubric["max_score"] == 60
    assert all(p.converged for p in r.phases)


def test_published_phase_values_correlate():
    r, _ = pearson_r([50.0, 35.9, 14.5, 11.5], [4, 3, 2, 1])
    assert r > 0.95


def test_single_phase_correlation_undefined():
    d = _doc()
    d["phases"] = d["phases"][:1]
    d["phases"][0]["expected_rank"] = 1
    r = run_case_study(scenario_from_dict(d))
    assert r.spearman_effort is None and not r.correlation_defined


def test_equal_phases_correlation_undefined():
    d = _doc()
    d["phases"] = [dict(d["phases"][1], name=n, expected_rank=k) for n, k in (("a", 1), ("b", 2))]
    r = run_case_study(scenario_from_dict(d))
    assert r.phases[0].effort == r.phases[1].effort
    assert r.spearman_effort is None


def test_case_study_needs_phases():
    with pytest.raises(ValueError):
        run_case_study(load_builtin("team_t"))


@pytest.mark.parametrize("text", ["scale_mechanisms:1", "cap_team_size:1000", "shift_loyalty:0"])
def test_identity_counterfactuals(text):
    out = run_counterfactual(load_builtin("apache"), Counterfactual.parse(text))
    for row in out["phases"]:
        assert row["baseline"] == row["counterfactual"]
        assert row["effort_change_pct"] == 0.0


def test_cf1_lowers_effort():
    out = run_counterfactual(load_builtin("apache"), Counterfactual("scale_mechanisms", 0.5))
    for row in out["phases"]:
        assert row["checks"]["effort_direction_uncapped"]
        assert row["checks"]["effort_direction_capped"]


def test_cf2_raises_effort_and_lowers_output():
    out = run_counterfactual(load_builtin("apache"), Counterfactual("cap_team_size", 15))
    affected = [r for r in out["phases"] if r["affected"]]
    assert [r["phase"] for r in affected] == ["Growth", "Maturation", "Evolution"]
    for r in affected:
        assert r["checks"]["effort_higher_uncapped"]
        assert r["checks"]["effort_not_lower_capped"]
        assert r["checks"]["output_lower_capped"]
    assert any(r["checks"]["effort_higher_capped"] for r in affected)


def test_cf3_growth_phase():
    out = run_counterfactual(load_builtin("apache"), Counterfactual.parse("shift_loyalty:0.15@Growth"))
    rows = {r["phase"]: r for r in out["phases"]}
    g = rows["Growth"]
    assert g["counterfactual"]["effort_uncapped"] > g["baseline"]["effort_uncapped"]
    assert not rows["Formation"]["affected"]


@pytest.mark.parametrize("text", ["bogus:1", "scale_mechanisms", "cap_team_size:1.5", "shift_loyalty:x"])
def test_invalid_modifiers(text):
    with pytest.raises(ValueError):
        Counterfactual.parse(text)


def test_unknown_phase_in_modifier():
    with pytest.raises(ValueError):
        run_counterfactual(load_builtin("apache"), Counterfactual.parse("shift_loyalty:0.1@Nope"))


def test_report_json_serializable():
    json.dumps(run_case_study(load_builtin("apache")).as_dict())
