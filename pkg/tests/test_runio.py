import io
import json

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st
from mpmath import mpf

from nestgeom.precision import workprec
from nestgeom.runio import (
    RunConfig,
    nest_csv_rows,
    read_csv,
    record_from_json,
    record_to_json,
    results_fingerprint,
    run_nest_pipeline,
    scalar_from_json,
    scalar_to_json,
    write_csv,
)


def test_config_validation():
    RunConfig(parameter="1.9").validate()
    with pytest.raises(ValueError):
        RunConfig(precision_start=512, precision_max=256).validate()
    with pytest.raises(ValueError):
        RunConfig(max_levels=0).validate()
    with pytest.raises(ValueError):
        RunConfig(delta="1.5").validate()
    with pytest.raises(ValueError):
        RunConfig(format="xml").validate()


@given(st.integers(min_value=-10**10, max_value=10**10),
       st.integers(min_value=-60, max_value=40))
def test_scalar_json_round_trip(man, exp):
    with workprec(128):
        x = mpf(man) * mpf(2) ** exp
    again = scalar_from_json(scalar_to_json(x))
    assert again == x


def test_scalar_json_rounding_is_deterministic():
    with workprec(700):
        x = mpmath.sqrt(2)
    one = scalar_to_json(x, bits=256)
    two = scalar_to_json(x, bits=256)
    assert one == two
    assert scalar_from_json(one) != x  # rounded on purpose
    with workprec(800):
        assert abs(scalar_from_json(one) - x) < mpf(2) ** -250


def quick_config(**over):
    base = dict(parameter="1.9120", precision_start=192, precision_max=1 << 14,
                max_levels=5, orbit_cap=20000, return_cap=2000,
                renorm_horizon=0, delta="0.01")
    base.update(over)
    return RunConfig(**base)


@pytest.fixture(scope="module")
def record():
    return run_nest_pipeline(quick_config())


def test_record_json_round_trip(record):
    text = record_to_json(record)
    again = record_from_json(text)
    assert again == record
    assert record_to_json(again) == text


def test_record_structure(record):
    res = record["results"]
    assert res["depth"] >= 5
    assert len(res["levels"]) == res["depth"] + 1
    assert res["levels"][0]["r"] == 0
    assert record["schema_version"] == 1
    geom = res["geometry"]
    assert len(geom["lambdas"]) == res["depth"]
    for lam in geom["lambdas"]:
        assert 0 < lam["float"] < 1


def test_rerun_reproduces_results_bit_identically(record):
    again = run_nest_pipeline(quick_config())
    assert results_fingerprint(again) == results_fingerprint(record)


def test_csv_round_trip(record):
    rows = nest_csv_rows(record)
    buf = io.StringIO()
    write_csv(rows, buf)
    text = buf.getvalue()
    assert "\r\n" in text
    parsed = read_csv(text)
    assert len(parsed) == len(rows)
    for got, want in zip(parsed, rows):
        assert int(got["level"]) == want["level"]
        assert float(got["lambda"]) == want["lambda"]
        assert str(want["central"]) == got["central"]


def test_timings_do_not_affect_fingerprint(record):
    clone = json.loads(record_to_json(record))
    clone["timings"] = {"nest": 123.0}
    assert results_fingerprint(clone) == results_fingerprint(record)
