import csv
import io
import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from willmorekit.config import load_config, parse_config
from willmorekit.errors import ConfigError
from willmorekit.reporting import SWEEP_HEADER, dumps, format_float, human, write_csv

from oracles import schwarzschild_coordinate


# -- configuration ----------------------------------------------------------------

def test_family_config():
    W = parse_config({"warp": {"family": "schwarzschild", "params": {"mass": 2.0}}})
    assert W.name == "schwarzschild"
    assert W.h(0.0) == pytest.approx(2.0)


def test_cone_config_with_custom_fiber():
    W = parse_config({"name": "wide", "fiber": {"dim": 2, "area": 6.0, "ricci_lower": 1.0},
                      "warp": {"family": "cone", "params": {"slope": 0.5}}})
    assert W.name == "wide"
    assert W.fiber.area == 6.0
    assert W.h(2.0) == pytest.approx(2.0)


def test_profile_config_reproduces_schwarzschild():
    s = np.linspace(2.0, 60.0, 400)
    data = {"fiber": {"dim": 2, "round_sphere": True},
            "warp": {"profile": {"s": s.tolist(), "omega": (1 - 2.0 / s).tolist()}}}
    W = parse_config(data)
    r = schwarzschild_coordinate(10.0, 2.0)
    assert W.h(r) == pytest.approx(10.0, rel=1e-4)


def test_sample_config():
    r = np.linspace(0.0, 10.0, 21)
    data = {"fiber": {"dim": 2, "round_sphere": True},
            "warp": {"samples": {"r": r.tolist(), "h": (1.0 + r).tolist()}}}
    W = parse_config(data)
    assert W.h(5.25) == pytest.approx(6.25, rel=1e-12)
    assert W.h(50.0) == pytest.approx(51.0, rel=1e-12)


def test_probe_settings_are_applied():
    W = parse_config({"warp": {"family": "cone"}, "probe": {"per_decade": 64}})
    assert W.probe.per_decade == 64


@pytest.mark.parametrize("data", [
    {},
    {"warp": {"family": "cone"}, "colour": "red"},
    {"warp": {"family": "torus"}},
    {"warp": {"family": "cone", "params": {"mass": 1.0}}},
    {"warp": {"family": "schwarzschild"}, "fiber": {"dim": 2, "round_sphere": True}},
    {"warp": {"family": "cone"}, "fiber": {"dim": 2, "area": -1.0, "ricci_lower": 1.0}},
    {"warp": {"family": "cone"}, "fiber": {"dim": 2, "area": "big", "ricci_lower": 1.0}},
    {"warp": {"family": "cone", "samples": {}}},
    {"warp": {"samples": {"r": [0, 1], "h": [1, 2]}}},
    {"warp": {"profile": {"s": [1, 2], "omega": [1, 1]}}, "fiber": {"dim": 2, "round_sphere": True}},
    {"warp": {"family": "cone"}, "probe": {"r_probe": math.inf}},
    {"name": 3, "warp": {"family": "cone"}},
])
def test_invalid_configs_are_rejected(data):
    with pytest.raises(ConfigError):
        parse_config(data)


def test_load_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(bad)
    good = tmp_path / "good.json"
    good.write_text(json.dumps({"warp": {"family": "cone"}}), encoding="utf-8")
    assert load_config(good).name == "cone"


# -- reporting ----------------------------------------------------------------------

def test_format_float():
    assert format_float(0.1) == "0.10000000000000001"
    assert format_float(math.inf) == "inf"
    assert format_float(-math.inf) == "-inf"
    assert format_float(math.nan) == "nan"


@given(x=st.floats(allow_nan=False, allow_infinity=False))
def test_format_float_round_trips(x):
    assert float(format_float(x)) == x


def test_dumps_is_standard_json_with_fixed_order():
    text = dumps({"b": 1.5, "a": [math.inf, None, True], "c": {"x": np.float64(2.0)}})
    assert text.endswith("\n")
    obj = json.loads(text)
    assert list(obj) == ["b", "a", "c"]
    assert obj["a"] == ["inf", None, True]
    assert obj["c"]["x"] == 2.0


def test_dumps_rejects_unknown_types():
    with pytest.raises(TypeError):
        dumps({"x": object()})


def test_csv_layout():
    text = write_csv(SWEEP_HEADER, [[0.0, 1.0, None, 2.0, 3.0, 4.0, 5.0, 6.0, "strict"]],
                     ["F_prime_root none"])
    lines = text.split("\n")
    assert lines[0] == ",".join(SWEEP_HEADER)
    assert lines[-2] == "# F_prime_root none"
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[1][2] == ""
    assert "\r" not in text


def test_human_rendering():
    text = human({"a": 1.0, "nested": {"b": "x"}})
    assert text == "a: 1\nnested:\n  b: x\n"
