"""Scenario file parsing, validation and bundled profile tests."""

import pytest

from deploysim import (
    Scenario,
    ScenarioError,
    build_scenario,
    bundled_scenario,
    list_bundled,
    load_scenario,
    parse_scenario_text,
    scenario_with,
)
from deploysim.scenario import SCHEMA


def test_empty_text_is_all_defaults():
    assert parse_scenario_text("") == {}
    assert parse_scenario_text("\n# only a comment\n\n") == {}


def test_defaults_build_a_valid_scenario():
    sc = build_scenario()
    assert isinstance(sc, Scenario)
    assert sc.dt == 0.001
    assert sc.seed == 42
    assert sc.trigger.deploy_ceiling == 400.0
    assert sc.trigger.deploy_floor == 150.0
    assert sc.payload.mass == 1.0
    assert sc.values["vehicle.dry_mass"] == sc.vehicle.dry_mass


def test_every_schema_key_has_a_workable_default():
    sc = build_scenario()
    assert set(sc.values) == set(SCHEMA)


def test_parse_key_values_with_comments():
    text = """
    # mission tweak
    payload.mass = 2.5      # kg
    trigger.deploy_floor = 120
    faults.door_jam = true
    sim.seed = 7
    """
    overrides = parse_scenario_text(text)
    assert overrides == {
        "payload.mass": 2.5,
        "trigger.deploy_floor": 120.0,
        "faults.door_jam": True,
        "sim.seed": 7,
    }


def test_unknown_key_reports_line():
    with pytest.raises(ScenarioError, match=r"deck:2: unknown key 'vehicle\.wings'"):
        parse_scenario_text("payload.mass = 1\nvehicle.wings = 4\n",
                            source="deck")


def test_duplicate_key_reports_line():
    with pytest.raises(ScenarioError, match=r"deck:3: duplicate key"):
        parse_scenario_text("payload.mass = 1\n\npayload.mass = 2\n",
                            source="deck")


def test_missing_equals_sign_rejected():
    with pytest.raises(ScenarioError, match="expected 'key = value'"):
        parse_scenario_text("payload.mass 1\n")


def test_missing_value_rejected():
    with pytest.raises(ScenarioError, match="has no value"):
        parse_scenario_text("payload.mass =\n")


def test_non_numeric_value_rejected():
    with pytest.raises(ScenarioError, match="payload.mass expects a number"):
        parse_scenario_text("payload.mass = heavy\n")


def test_bad_boolean_rejected():
    with pytest.raises(ScenarioError, match="expects true/false"):
        parse_scenario_text("faults.door_jam = maybe\n")


def test_boolean_synonyms():
    assert parse_scenario_text("faults.door_jam = YES")["faults.door_jam"]
    assert not parse_scenario_text("faults.door_jam = off")["faults.door_jam"]


def test_integer_key_rejects_fraction():
    with pytest.raises(ScenarioError, match="sim.seed expects an integer"):
        parse_scenario_text("sim.seed = 1.5\n")


def test_build_rejects_out_of_range_named_key():
    with pytest.raises(ScenarioError, match="mechanism.efficiency"):
        build_scenario({"mechanism.efficiency": 1.5})
    with pytest.raises(ScenarioError, match="payload.mass"):
        build_scenario({"payload.mass": 0.0})
    with pytest.raises(ScenarioError, match="barometer.noise_sigma"):
        build_scenario({"barometer.noise_sigma": -3.0})


def test_build_rejects_unknown_override():
    with pytest.raises(ScenarioError, match="unknown key"):
        build_scenario({"payload.color": 1.0})


def test_build_rejects_cross_field_violations():
    # Individually legal values that violate a component invariant.
    with pytest.raises(ScenarioError):
        build_scenario({"trigger.deploy_floor": 500.0})  # above the ceiling


def test_build_rejects_dt_that_misses_task_periods():
    with pytest.raises(ScenarioError, match="dt"):
        build_scenario({"sim.dt": 0.0003})


def test_scenario_with_changes_one_key():
    base = build_scenario()
    heavier = scenario_with(base, {"payload.mass": 14.0})
    assert heavier.payload.mass == 14.0
    assert heavier.vehicle == base.vehicle
    assert base.payload.mass == 1.0, "the base scenario is untouched"


def test_scenario_with_rejects_unknown_key():
    with pytest.raises(ScenarioError, match="unknown key"):
        scenario_with(build_scenario(), {"nope": 1.0})


def test_load_scenario_from_file(tmp_path):
    deck = tmp_path / "mission.scn"
    deck.write_text("payload.mass = 3.0\nsim.seed = 5\n", encoding="utf-8")
    sc = load_scenario(deck)
    assert sc.payload.mass == 3.0
    assert sc.seed == 5


def test_load_scenario_error_names_file_and_line(tmp_path):
    deck = tmp_path / "broken.scn"
    deck.write_text("payload.mass = 1.0\nbogus.key = 2\n", encoding="utf-8")
    with pytest.raises(ScenarioError, match=r"broken\.scn:2"):
        load_scenario(deck)


def test_load_scenario_missing_file():
    with pytest.raises(ScenarioError, match="cannot read scenario"):
        load_scenario("/nonexistent/path.scn")


def test_bundled_list_is_complete():
    names = list_bundled()
    assert names == sorted(names)
    assert set(names) == {
        "altair_nominal", "altair_link_break", "altair_gear_slip",
        "altair_friction3x", "altair_battery_fail", "altair_door_jam",
    }


def test_bundled_nominal_equals_defaults():
    assert bundled_scenario("altair_nominal").values == build_scenario().values


def test_bundled_fault_decks_set_their_fault():
    assert bundled_scenario("altair_link_break").faults.link_break_force == 3.0
    assert bundled_scenario("altair_gear_slip").faults.gear_slip_push == 1
    fr = bundled_scenario("altair_friction3x")
    assert fr.faults.surface_friction_scale == 3.0
    assert fr.payload.mass == 6.0
    assert bundled_scenario("altair_battery_fail").faults.battery_fail_time == 30.0
    assert bundled_scenario("altair_door_jam").faults.door_jam is True


def test_unknown_bundled_name():
    with pytest.raises(ScenarioError, match="no bundled scenario"):
        bundled_scenario("altair_missing")


def test_schema_defaults_pass_their_own_checks():
    for key, entry in SCHEMA.items():
        entry.check(key, entry.default)
