import json
import math
import struct

import pytest
from hypothesis import given, settings, strategies as st

from cmdviz import ClusterConfig, Experiment, ParseError, ValidationError, parse_csv, parse_json, write_json
from cmdviz.ingest import write_csv

from conftest import make_memory


def memory_doc():
    return json.loads(write_json(make_memory()))


def bits(exp):
    out = []
    for s in exp.steps:
        out += [struct.pack("<d", v) for v in s.independent_values]
        out += [struct.pack("<d", v) for row in s.measurements for v in row]
    return out


def test_parse_memory_json(memory_json_path, memory):
    report = parse_json(memory_json_path.read_bytes())
    exp = report.experiment
    assert (exp.M, exp.N, exp.K, exp.T) == (3, 2, 1, 3)
    assert exp.outcomes == ("recall", "association")
    assert exp == memory
    assert report.warnings == []


def test_parse_minimal_json():
    doc = {"agents": ["a"], "outcomes": ["o"], "independents": ["v"],
           "steps": [{"independent_values": [0], "measurements": [[0.0]]}]}
    exp = parse_json(json.dumps(doc)).experiment
    assert (exp.M, exp.N, exp.K, exp.T) == (1, 1, 1, 1)


def test_truncated_step_names_step():
    doc = memory_doc()
    doc["steps"][1]["measurements"] = doc["steps"][1]["measurements"][:2]
    with pytest.raises(ValidationError, match="step 1"):
        parse_json(json.dumps(doc))


def test_wrong_independent_length():
    doc = memory_doc()
    doc["steps"][2]["independent_values"] = [1, 2]
    with pytest.raises(ValidationError, match="step 2"):
        parse_json(json.dumps(doc))


def test_syntax_error_has_position():
    with pytest.raises(ParseError) as info:
        parse_json(b'{"agents": [\n  "a",\n  ]\n}')
    assert info.value.line == 3
    assert "line 3" in str(info.value)


def test_non_finite_json_names_cell():
    text = write_json(make_memory()).decode().replace("0.75", "NaN", 1)
    with pytest.raises(ValidationError, match=r"step 1, agent 'A2', outcome 'recall'"):
        parse_json(text)
    with pytest.raises(ValidationError, match="non-finite"):
        parse_json(write_json(make_memory()).decode().replace("0.25", "1e999", 1))


def test_duplicate_agent_json():
    doc = memory_doc()
    doc["agents"][2] = "A1"
    with pytest.raises(ValidationError, match="duplicate agent"):
        parse_json(json.dumps(doc))


def test_bool_is_not_a_number():
    doc = memory_doc()
    doc["steps"][0]["measurements"][0][0] = True
    with pytest.raises(ValidationError, match="expected a number"):
        parse_json(json.dumps(doc))


def test_invalid_utf8():
    with pytest.raises(ParseError, match="UTF-8"):
        parse_json(b"\xff\xfe")


def test_clustering_block():
    doc = memory_doc()
    doc["clustering"] = {"method": "kmeans", "k": 2, "seed": 7}
    report = parse_json(json.dumps(doc))
    assert report.clustering == ClusterConfig(method="kmeans", k=2, seed=7)
    doc["clustering"] = {"threshold": -1}
    with pytest.raises(ValidationError, match="clustering"):
        parse_json(json.dumps(doc))
    doc["clustering"] = {"bogus": 1}
    with pytest.raises(ValidationError, match="bogus"):
        parse_json(json.dumps(doc))


def test_constant_outcome_warning():
    exp = Experiment(("a", "b"), ("flat", "x"), ("v",), (([0], [[1.0, 0.0], [1.0, 2.0]]),))
    report = parse_json(write_json(exp))
    assert len(report.warnings) == 1 and "flat" in report.warnings[0]


def test_round_trip_memory_and_minimal(memory):
    assert parse_json(write_json(memory)).experiment == memory
    tiny = Experiment(("a",), ("o",), ("v",), (([3], [[-0.0]]),))
    back = parse_json(write_json(tiny)).experiment
    assert bits(back) == bits(tiny)


def test_round_trip_point_one_plus_point_two():
    v = 0.1 + 0.2
    exp = Experiment(("a",), ("o",), ("v",), (([0], [[v]]),))
    back = parse_json(write_json(exp)).experiment
    assert back.steps[0].measurements[0][0] == v
    assert bits(back) == bits(exp)


def test_write_json_key_order(memory):
    doc = json.loads(write_json(memory))
    assert list(doc) == ["agents", "outcomes", "independents", "steps"]
    assert list(doc["steps"][0]) == ["independent_values", "measurements"]


finite = st.floats(allow_nan=False, allow_infinity=False)


@st.composite
def experiments(draw):
    m, n, k, t = (draw(st.integers(1, 4)) for _ in range(4))
    steps = tuple(
        (draw(st.lists(finite, min_size=k, max_size=k)),
         draw(st.lists(st.lists(finite, min_size=n, max_size=n), min_size=m, max_size=m)))
        for _ in range(t)
    )
    return Experiment(tuple(f"agent {j}" for j in range(m)), tuple(f"o,{i}" for i in range(n)),
                      tuple(f"v{i}" for i in range(k)), steps)


@given(experiments())
def test_round_trip_property(exp):
    back = parse_json(write_json(exp)).experiment
    assert back == exp
    assert bits(back) == bits(exp)


@given(experiments())
def test_csv_json_equivalence(exp):
    assert parse_csv(write_csv(exp)).experiment == parse_json(write_json(exp)).experiment


@settings(max_examples=300)
@given(st.one_of(st.binary(max_size=200), st.text(max_size=200),
                 st.recursive(st.none() | st.booleans() | st.floats() | st.text(max_size=5),
                              lambda c: st.lists(c, max_size=4) | st.dictionaries(
                                  st.sampled_from(["agents", "outcomes", "independents", "steps",
                                                   "independent_values", "measurements", "x"]),
                                  c, max_size=4)).map(lambda d: json.dumps(d))))
def test_validation_is_total(data):
    try:
        report = parse_json(data)
    except ValidationError:
        return
    assert isinstance(report.experiment, Experiment)


# --- CSV ---

def test_parse_memory_csv(memory_csv_path, memory_json_path):
    csv_exp = parse_csv(memory_csv_path.read_bytes()).experiment
    assert csv_exp == parse_json(memory_json_path.read_bytes()).experiment
    lines = memory_csv_path.read_text().strip().splitlines()
    assert len(lines) == 1 + 18


def test_csv_missing_cell(memory_csv_path):
    lines = memory_csv_path.read_text().splitlines()
    del lines[5]
    with pytest.raises(ValidationError, match="1 missing cells"):
        parse_csv("\n".join(lines))


def test_csv_missing_cells_listed_up_to_ten(memory_csv_path):
    lines = memory_csv_path.read_text().splitlines()
    kept = [lines[0]] + [l for l in lines[1:] if not l.startswith("1,")] + ["1,A1,recall,0.7,1.0"]
    with pytest.raises(ValidationError) as info:
        parse_csv("\n".join(kept))
    msg = str(info.value)
    assert "5 missing cells" in msg and msg.count("(step 1") == 5


def test_csv_duplicate_triple(memory_csv_path):
    lines = memory_csv_path.read_text().splitlines()
    lines.append(lines[3])
    with pytest.raises(ValidationError, match="duplicate cell"):
        parse_csv("\n".join(lines))


def test_csv_inconsistent_independent(memory_csv_path):
    lines = memory_csv_path.read_text().splitlines()
    assert lines[2].startswith("0,") and lines[2].endswith(",0.0")
    lines[2] = lines[2][: -len("0.0")] + "1"
    with pytest.raises(ValidationError, match="inconsistent independent values for step 0"):
        parse_csv("\n".join(lines))


@pytest.mark.parametrize("value", ["0,5", "nan", "inf", "1.2.3", "", "0x10"])
def test_csv_decimal_only(value):
    text = f'step,agent,outcome,value,iv:v\n0,a,o,"{value}",0\n'
    with pytest.raises(ValidationError, match="decimal"):
        parse_csv(text)


def test_csv_header_checked():
    with pytest.raises(ValidationError, match="header"):
        parse_csv("agent,step,outcome,value,iv:v\n")
    with pytest.raises(ValidationError, match="iv:"):
        parse_csv("step,agent,outcome,value,noise\n0,a,o,1,0\n")


def test_csv_step_gap():
    with pytest.raises(ValidationError, match="without gaps"):
        parse_csv("step,agent,outcome,value,iv:v\n0,a,o,1,0\n2,a,o,1,0\n")


def test_csv_exponent_and_sign_accepted():
    exp = parse_csv("step,agent,outcome,value,iv:v\n0,a,o,-1.5e-3,+2\n").experiment
    assert exp.steps[0].measurements[0][0] == -1.5e-3
    assert math.isclose(exp.steps[0].independent_values[0], 2.0)
