import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tailkit.reports import (
    LOG_CEIL,
    LOG_FLOOR,
    SCHEMA_VERSION,
    SpecError,
    curve_csv,
    parse_distribution,
    parse_risk_model,
    read_curve_csv,
    render_json,
    sanitize,
)


class TestSanitize:
    def test_sentinels(self):
        assert sanitize(-math.inf) == LOG_FLOOR
        assert sanitize(math.inf) == LOG_CEIL
        assert sanitize(math.nan) is None
        assert sanitize(1.5) == 1.5

    def test_numpy_scalars(self):
        assert sanitize(np.float64(2.5)) == 2.5
        assert sanitize(np.int64(3)) == 3
        assert sanitize(np.bool_(True)) is True
        out = sanitize(np.float64(-math.inf))
        assert out == LOG_FLOOR and isinstance(out, float)

    def test_nested_structures(self):
        payload = {"a": [1.0, -math.inf, {"b": (math.nan, np.float32(2.0))}],
                   3: np.array([1.0, math.inf])}
        out = sanitize(payload)
        assert out == {"a": [1.0, LOG_FLOOR, {"b": [None, 2.0]}],
                       "3": [1.0, LOG_CEIL]}
        json.dumps(out)


class TestRenderJson:
    def test_deterministic_and_versioned(self):
        a = render_json({"z": 1, "a": 2})
        b = render_json({"a": 2, "z": 1})
        assert a == b
        assert a.endswith("\n")
        body = json.loads(a)
        assert body["schema_version"] == SCHEMA_VERSION

    def test_explicit_version_kept(self):
        body = json.loads(render_json({"schema_version": 1, "x": 0}))
        assert body["schema_version"] == 1

    def test_sentinels_applied(self):
        body = json.loads(render_json({"v": [-math.inf, math.nan]}))
        assert body["v"] == [LOG_FLOOR, None]


class TestCurveCsv:
    def test_header_and_layout(self):
        text = curve_csv([1.0, 2.0], [-1.0, -2.0])
        lines = text.splitlines()
        assert lines[0] == "x,value"
        assert lines[1] == "1.0,-1.0"
        assert len(lines) == 3

    def test_sorts_by_x(self):
        text = curve_csv([2.0, 1.0], [-2.0, -1.0])
        assert text.splitlines()[1].startswith("1.0")

    def test_duplicate_x_rejected(self):
        with pytest.raises(ValueError):
            curve_csv([1.0, 1.0], [-1.0, -2.0])

    def test_round_trip_with_sentinels(self):
        xs = np.array([1.0, 2.0, 3.0])
        vs = np.array([-1.5, -math.inf, math.nan])
        x2, v2 = read_curve_csv(curve_csv(xs, vs))
        np.testing.assert_array_equal(x2, xs)
        assert v2[0] == -1.5
        assert v2[1] == -math.inf
        assert math.isnan(v2[2])

    @given(st.lists(st.floats(min_value=-1e300, max_value=0.0,
                              allow_nan=False), min_size=1, max_size=20))
    def test_round_trip_property(self, values):
        xs = np.arange(1.0, len(values) + 1.0)
        x2, v2 = read_curve_csv(curve_csv(xs, values))
        np.testing.assert_array_equal(x2, xs)
        np.testing.assert_array_equal(v2, np.asarray(values))

    def test_bad_header_rejected(self):
        with pytest.raises(SpecError):
            read_curve_csv("a,b\n1,2\n")


class TestParseDistribution:
    def test_from_dict(self):
        d = parse_distribution({"family": "regvar", "beta": 1.0,
                                "x_min": 1.0})
        assert d.sf(2.0) == pytest.approx(0.5)

    def test_from_file(self, tmp_path):
        p = tmp_path / "dist.json"
        p.write_text(json.dumps({"family": "exponential", "rate": 2.0,
                                 "schema_version": 1}))
        d = parse_distribution(str(p))
        assert d.log_sf(3.0) == -6.0

    def test_wrong_version(self):
        with pytest.raises(SpecError) as e:
            parse_distribution({"family": "uniform", "s": 1.0,
                                "schema_version": 99})
        assert "schema_version" in e.value.where

    def test_unknown_family_pathed_error(self):
        with pytest.raises(SpecError) as e:
            parse_distribution({"family": "nope"}, where="F")
        assert e.value.where == "F.family"

    def test_nested_wrapper(self):
        d = parse_distribution({"family": "scaled", "c": 2.0,
                                "base": {"family": "regvar", "beta": 1.0}})
        assert d.sf(4.0) == pytest.approx(0.5)

    def test_missing_file(self, tmp_path):
        with pytest.raises(SpecError):
            parse_distribution(str(tmp_path / "absent.json"))

    def test_malformed_json(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{not json")
        with pytest.raises(SpecError):
            parse_distribution(str(p))


class TestParseRiskModel:
    GOOD = {"Z": {"family": "regvar", "beta": 1.0, "x_min": 1.0},
            "Y": {"family": "uniform", "s": 1.0}}

    def test_full_round_trip(self):
        data = dict(self.GOOD, horizon=3,
                    estimator={"paths": 5000, "seed": 7})
        model, settings = parse_risk_model(data)
        assert model.horizon == 3
        assert settings == {"paths": 5000, "seed": 7}

    def test_defaults(self):
        model, settings = parse_risk_model(dict(self.GOOD))
        assert model.horizon == math.inf
        assert settings == {"paths": 10 ** 6, "seed": 0}

    def test_inf_string_horizon(self):
        model, _ = parse_risk_model(dict(self.GOOD, horizon="inf"))
        assert model.horizon == math.inf

    def test_integral_float_horizon(self):
        model, _ = parse_risk_model(dict(self.GOOD, horizon=4.0))
        assert model.horizon == 4
        assert isinstance(model.horizon, int)

    def test_missing_law(self):
        with pytest.raises(SpecError) as e:
            parse_risk_model({"Z": self.GOOD["Z"]})
        assert e.value.where == "model.Y"

    def test_unknown_field_rejected(self):
        with pytest.raises(SpecError) as e:
            parse_risk_model(dict(self.GOOD, extra=1))
        assert e.value.where == "model.extra"

    def test_unknown_estimator_setting(self):
        with pytest.raises(SpecError) as e:
            parse_risk_model(dict(self.GOOD, estimator={"walks": 2}))
        assert "walks" in e.value.where

    def test_model_validation_pathed(self):
        bad = {"Z": self.GOOD["Z"],
               "Y": {"family": "degenerate", "c": 0.0}}
        with pytest.raises(SpecError):
            parse_risk_model(bad)
