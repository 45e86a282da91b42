import pytest

from semloc.config import (ConfigError, RunConfig, build_run_config,
                           build_synth_config, parse_config_file,
                           parse_float_list, parse_int_list)


class TestRunConfig:
    def test_defaults(self):
        cfg = RunConfig()
        assert cfg.connectivity_threshold == 10.0
        assert cfg.descriptor == "histogram"
        assert cfg.localization_threshold == 20.0
        assert cfg.good_match_radius == 10.0

    def test_validation(self):
        with pytest.raises(ConfigError):
            RunConfig(score_threshold=1.5)
        with pytest.raises(ConfigError):
            RunConfig(connectivity_threshold=-1.0)
        with pytest.raises(ConfigError):
            RunConfig(descriptor="bogus")
        with pytest.raises(ConfigError):
            RunConfig(walk_depth=1)


class TestConfigFile:
    def test_parse_and_layer(self, tmp_path):
        path = tmp_path / "c.cfg"
        path.write_text("# comment\nconnectivity_threshold = 15\n"
                        "descriptor=neighbor\nobject_count=99\n"
                        "same_label_only = false\n")
        values = parse_config_file(path)
        cfg = build_run_config(values, {"descriptor": "walk"})
        assert cfg.connectivity_threshold == 15.0
        assert cfg.descriptor == "walk"  # override beats file
        assert cfg.same_label_only is False
        assert build_synth_config(values)["object_count"] == 99

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "c.cfg"
        path.write_text("not_a_key=1\n")
        with pytest.raises(ConfigError, match="unknown config key"):
            parse_config_file(path)

    def test_malformed_line_rejected(self, tmp_path):
        path = tmp_path / "c.cfg"
        path.write_text("just a line\n")
        with pytest.raises(ConfigError, match="key=value"):
            parse_config_file(path)

    def test_bad_value_type(self, tmp_path):
        path = tmp_path / "c.cfg"
        path.write_text("ransac_iterations=many\n")
        with pytest.raises(ConfigError):
            parse_config_file(path)

    def test_none_overrides_ignored(self):
        cfg = build_run_config({}, {"seed": None, "connectivity_threshold": 7.0})
        assert cfg.seed == 0
        assert cfg.connectivity_threshold == 7.0


def test_list_parsing():
    assert parse_float_list("1,2.5, 3") == [1.0, 2.5, 3.0]
    assert parse_int_list("0,2,4") == [0, 2, 4]
