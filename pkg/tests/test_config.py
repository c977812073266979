"""Run-config parsing: defaults, nesting, strict key checking, YAML round trip."""
import pytest
import yaml

from sagin_aoi.config import (
    ConfigError,
    RunConfig,
    load_run_config,
    parse_run_config,
    run_config_to_dict,
    save_run_config,
)
from sagin_aoi.env import SimConfig
from sagin_aoi.hap_queue import SchedulingPolicy


def test_empty_config_gives_defaults():
    assert parse_run_config(None) == RunConfig()
    assert parse_run_config({}) == RunConfig()
    assert RunConfig().sim == SimConfig()


def test_nested_overrides_reach_leaf_dataclasses():
    rc = parse_run_config(
        {
            "sim": {
                "num_users": 3,
                "scheduling": "ldf",
                "fso": {"tx_gain_db": 120.0, "num_apertures": 2},
                "rf": {"nakagami_m": 3.0},
                "constants": {"earth_radius": 6.4e6},
                "altitude_range_m": [6.0e5, 9.0e5],
            },
            "ewg": {"handover": 1.5},
            "policy": "rr",
            "episodes": 4,
            "seed": 17,
        }
    )
    assert rc.sim.num_users == 3
    assert rc.sim.scheduling is SchedulingPolicy.LDF
    assert rc.sim.fso.tx_gain_db == 120.0
    assert rc.sim.fso.num_apertures == 2
    assert rc.sim.rf.nakagami_m == 3.0
    assert rc.sim.constants.earth_radius == 6.4e6
    assert rc.sim.altitude_range_m == (6.0e5, 9.0e5)
    assert rc.ewg.handover == 1.5
    assert (rc.policy, rc.episodes, rc.seed) == ("rr", 4, 17)


def test_scheduling_name_is_case_insensitive():
    assert parse_run_config({"sim": {"scheduling": "EDF"}}).sim.scheduling is SchedulingPolicy.EDF


def test_constellation_list_parses_to_specs():
    rc = parse_run_config(
        {
            "sim": {
                "num_satellites": 2,
                "constellation": [
                    {"altitude_m": 7.0e5, "inclination_deg": 10.0, "raan_deg": 0.0,
                     "arg_perigee_deg": 0.0, "true_anomaly_deg": 0.0},
                    {"altitude_m": 8.0e5, "inclination_deg": 50.0, "raan_deg": 3.0,
                     "arg_perigee_deg": 10.0, "true_anomaly_deg": 0.0},
                ],
            }
        }
    )
    assert len(rc.sim.constellation) == 2
    assert rc.sim.constellation[1].altitude_m == 8.0e5


@pytest.mark.parametrize(
    "data, fragment",
    [
        ({"episodez": 1}, "episodez"),
        ({"sim": {"num_userz": 3}}, "num_userz"),
        ({"sim": {"fso": {"gain_db": 1.0}}}, "gain_db"),
        ({"sim": {"constellation": [{"altitude_km": 700}]}}, "altitude_km"),
    ],
)
def test_unknown_keys_are_rejected_with_path(data, fragment):
    with pytest.raises(ConfigError) as err:
        parse_run_config(data)
    assert fragment in str(err.value)


@pytest.mark.parametrize(
    "data",
    [
        {"episodes": 0},
        {"policy": "greedy"},
        {"sim": {"scheduling": "mru"}},
        {"sim": {"episode_slots": 0}},
        {"sim": {"num_users": "ten"}},
        {"sim": {"num_users": 3.5}},
        {"sim": {"altitude_range_m": [1.0]}},
        {"sim": {"fso": 5}},
        {"sim": {"num_satellites": 2, "constellation": [
            {"altitude_m": 7e5, "inclination_deg": 0.0, "raan_deg": 0.0,
             "arg_perigee_deg": 0.0, "true_anomaly_deg": 0.0}]}},
    ],
)
def test_invalid_values_are_rejected(data):
    with pytest.raises(ConfigError):
        parse_run_config(data)


def test_optional_reward_weights_accept_null_and_numbers():
    rc = parse_run_config({"sim": {"reward_aoi_weight": None, "reward_rate_weight": 2.0e-7}})
    assert rc.sim.reward_aoi_weight is None
    assert rc.sim.reward_rate_weight == 2.0e-7


def test_yaml_file_round_trip(tmp_path):
    rc = parse_run_config({"sim": {"num_users": 5, "scheduling": "sjf"}, "episodes": 2})
    path = tmp_path / "run.yaml"
    save_run_config(rc, path)
    assert load_run_config(path) == rc


def test_yaml_empty_file_gives_defaults(tmp_path):
    path = tmp_path / "empty.yaml"
    path.write_text("")
    assert load_run_config(path) == RunConfig()


def test_yaml_top_level_must_be_mapping(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("- 1\n- 2\n")
    with pytest.raises(ConfigError):
        load_run_config(path)


def test_to_dict_is_yaml_dumpable_and_plain():
    data = run_config_to_dict(RunConfig())
    text = yaml.safe_dump(data)
    assert yaml.safe_load(text) == data
    assert data["sim"]["scheduling"] == "fifo"
