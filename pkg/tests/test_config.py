"""TOML config loading: strict keys, typed values, derived method configs."""

import pytest

from spectral_aug.config import (RunConfig, config_digest, config_from_dict,
                                 load_config, oge_config, vanilla_config)
from spectral_aug.errors import ValidationError


def test_defaults():
    cfg = config_from_dict({})
    assert (cfg.seed, cfg.out, cfg.jobs, cfg.format) == (0, "out", 1, "json")
    assert cfg.augment.method == "oge"
    assert cfg.stability.experiments == 200
    assert cfg.stability.n_values == (4, 5, 6, 7, 8)
    assert cfg.iso.pipeline == "vanilla" and cfg.iso.n_max == 6
    assert cfg.lemmas.weyl_pairs == 500
    assert load_config(None) == cfg


def test_toml_happy_path(tmp_path):
    doc = tmp_path / "run.toml"
    doc.write_text(
        """
seed = 7
out = "results"
format = "csv"

[augment]
method = "vanilla"
smoothing_delta = 0.25
encoder_width = 16

[stability]
experiments = 10
n_values = [4, 5]

[iso]
pipeline = "baseline-wl"
n_max = 5

[lemmas]
weyl_pairs = 50
"""
    )
    cfg = load_config(doc)
    assert cfg.seed == 7 and cfg.out == "results" and cfg.format == "csv"
    assert cfg.augment.method == "vanilla"
    assert cfg.augment.smoothing_delta == 0.25
    assert cfg.stability.n_values == (4, 5)
    assert cfg.iso.pipeline == "baseline-wl"
    assert cfg.lemmas.weyl_pairs == 50 and cfg.lemmas.dk_pairs == 200


def test_unknown_keys_are_named():
    with pytest.raises(ValidationError, match="'smoothing'"):
        config_from_dict({"smoothing": "hat"})
    with pytest.raises(ValidationError, match="'augment.widht'"):
        config_from_dict({"augment": {"widht": 3}})
    with pytest.raises(ValidationError, match="'stability.nvalues'"):
        config_from_dict({"stability": {"nvalues": [4]}})


def test_type_errors_are_specific():
    with pytest.raises(ValidationError, match="'seed' must be an integer"):
        config_from_dict({"seed": "zero"})
    with pytest.raises(ValidationError, match="'seed' must be an integer"):
        config_from_dict({"seed": True})
    with pytest.raises(ValidationError, match="'augment.smoothing_delta' must be a number"):
        config_from_dict({"augment": {"smoothing_delta": "thin"}})
    with pytest.raises(ValidationError, match="list of integers"):
        config_from_dict({"stability": {"n_values": [4, "five"]}})
    with pytest.raises(ValidationError, match="must be a table"):
        config_from_dict({"augment": 3})
    with pytest.raises(ValidationError, match="root"):
        config_from_dict([1, 2])


def test_value_range_validation():
    with pytest.raises(ValidationError, match="'seed'"):
        config_from_dict({"seed": -1})
    with pytest.raises(ValidationError, match="'jobs'"):
        config_from_dict({"jobs": 0})
    with pytest.raises(ValidationError, match="'format'"):
        config_from_dict({"format": "yaml"})
    with pytest.raises(ValidationError, match="'augment.method'"):
        config_from_dict({"augment": {"method": "fast"}})
    with pytest.raises(ValidationError, match="'stability.n_values'"):
        config_from_dict({"stability": {"n_values": [0]}})
    with pytest.raises(ValidationError, match="'iso.n_max'"):
        config_from_dict({"iso": {"n_max": 8}})
    with pytest.raises(ValidationError, match="'lemmas.n'"):
        config_from_dict({"lemmas": {"n": 0}})
    with pytest.raises(ValidationError, match="safety"):
        config_from_dict({"stability": {"safety": 0.5}})


def test_empty_grid_is_a_command_concern_not_a_config_error():
    cfg = config_from_dict({"stability": {"experiments": 0, "n_values": []}})
    assert cfg.stability.experiments == 0 and cfg.stability.n_values == ()


def test_zero_sentinels_map_to_method_defaults():
    cfg = config_from_dict({})
    assert vanilla_config(cfg).tau_group is None
    assert vanilla_config(cfg).encoder_out == 1
    assert oge_config(cfg).tau_group is None
    assert oge_config(cfg).encoder_out == 8

    explicit = config_from_dict({"augment": {"tau_group": 1e-5, "encoder_out": 3}})
    assert vanilla_config(explicit).tau_group == 1e-5
    assert vanilla_config(explicit).encoder_out == 3
    assert oge_config(explicit).encoder_out == 3


def test_derived_configs_carry_shared_fields():
    cfg = config_from_dict({
        "seed": 9,
        "augment": {"path": "grouped", "smoothing_family": "cosine",
                    "smoothing_delta": 0.2, "encoder_width": 16},
    })
    oge = oge_config(cfg)
    assert oge.seed == 9 and oge.path == "grouped"
    assert oge.smoothing.family == "cosine" and oge.smoothing.delta == 0.2
    assert oge.encoder_width == 16
    van = vanilla_config(cfg)
    assert van.seed == 9 and van.encoder_width == 16


def test_config_digest_stable_and_sensitive():
    a = config_from_dict({})
    b = config_from_dict({})
    c = config_from_dict({"seed": 1})
    assert config_digest(a) == config_digest(b)
    assert config_digest(a) != config_digest(c)
    assert len(config_digest(a)) == 16


def test_load_config_errors(tmp_path):
    with pytest.raises(ValidationError, match="not found"):
        load_config(tmp_path / "missing.toml")
    bad = tmp_path / "bad.toml"
    bad.write_text("seed = [unclosed")
    with pytest.raises(ValidationError, match="not valid TOML"):
        load_config(bad)


def test_runconfig_is_immutable():
    cfg = RunConfig()
    with pytest.raises(Exception):
        cfg.seed = 5
