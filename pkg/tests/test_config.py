import json

import pytest

from lsforge.config import ConfigError, interpolate, load_config


def write(tmp_path, data, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return p


def test_defaults_and_paths(tmp_path):
    (tmp_path / "inst").mkdir()
    cfg = load_config(write(tmp_path, {"scheme": "coloring", "instances": ["inst"]}))
    cfg.validate()
    assert cfg.instance_dirs == [tmp_path / "inst"]
    assert cfg.limits("train").soft == 60 and cfg.limits("test").sat == 3600
    assert cfg.scheme.name == "coloring"


def test_interpolation():
    assert interpolate({"a": ["${X}/y"]}, {"X": "v"}) == {"a": ["v/y"]}
    with pytest.raises(ConfigError, match="MISSING"):
        interpolate("${MISSING}", {})


def test_overrides_and_hash(tmp_path):
    p = write(tmp_path, {"scheme": "dfvs"})
    a = load_config(p, {"out": "/x", "workers": 4})
    b = load_config(p, {"out": "/y"})
    c = load_config(p, {"seed": 3})
    assert a.out == a.path("/x") and a["workers"] == 4
    assert a.hash() == b.hash() != c.hash()


@pytest.mark.parametrize("data, match", [
    ({"scheme": "coloring", "bogus": 1}, "unknown config keys"),
    ({"scheme": "nope"}, "unknown scheme"),
    ({"scheme": "coloring", "metric": "cpu"}, "metric"),
    ({"scheme": "coloring", "instances": ["missing"]}, "not found"),
    ({"scheme": "coloring", "timeouts": {"train_hard": 1}}, "train timeouts"),
    ({"scheme": "coloring", "workers": 0}, "workers"),
])
def test_invalid(tmp_path, data, match):
    with pytest.raises(ConfigError, match=match):
        load_config(write(tmp_path, data)).validate()


def test_bad_json(tmp_path):
    p = tmp_path / "c.json"
    p.write_text("{oops")
    with pytest.raises(ConfigError, match="invalid JSON"):
        load_config(p)
