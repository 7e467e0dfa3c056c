import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from surfres.resolver import resolve
from surfres.trace import SchemaError, canonical, emit, parse_trace

from conftest import corpus_names, corpus_trace, ring


@pytest.mark.parametrize("name", corpus_names())
def test_corpus_traces_round_trip_byte_identically(name):
    _, t = corpus_trace(name)
    text = emit(t)
    again = emit(parse_trace(text))
    assert again == text
    assert emit(parse_trace(again)) == text


def test_canonical_form_is_sorted_and_compact():
    assert canonical({"b": 1, "a": [1, 2]}) == '{"a":[1,2],"b":1}\n'
    assert canonical({"s": "é"}) == '{"s":"é"}\n'


json_values = st.recursive(
    st.none() | st.booleans() | st.integers(-10**6, 10**6) | st.text(max_size=6),
    lambda kids: st.lists(kids, max_size=4) | st.dictionaries(st.text(max_size=4), kids, max_size=4),
    max_leaves=12)


@given(json_values)
def test_canonical_is_a_fixed_point(obj):
    text = canonical(obj)
    assert canonical(json.loads(text)) == text


def test_trace_over_an_extension_field_round_trips():
    R = ring(2, 2)
    t = resolve([R.parse("z^2 + x^3 + y^3")])
    text = emit(t)
    assert emit(parse_trace(text)) == text
    assert json.loads(text)["field"] == R.field.spec()


def _sample():
    return json.loads(emit(resolve([ring(0).parse("z^2 - x^2*y")])))


@pytest.mark.parametrize("breakage", [
    lambda d: d.pop("nodes"),
    lambda d: d.pop("version"),
    lambda d: d.__setitem__("version", "99"),
    lambda d: d.__setitem__("nodes", []),
    lambda d: d["nodes"][0].pop("generators"),
    lambda d: d["nodes"][1].__setitem__("parent", 7),
    lambda d: d["nodes"][1].__setitem__("id", 5),
    lambda d: d["nodes"][0]["generators"].__setitem__(0, "z^^2"),
    lambda d: d["nodes"][0]["center"].__setitem__("kind", "surface"),
    lambda d: d["nodes"][0]["center"].__setitem__("vars", ["x"]),
    lambda d: d.__setitem__("field", {"char": 4}),
    lambda d: d["nodes"][1].__setitem__("exceptional", "w"),
])
def test_schema_errors(breakage):
    data = _sample()
    breakage(data)
    with pytest.raises(SchemaError):
        parse_trace(canonical(data))


def test_non_json_and_non_object():
    for text in ["", "{", "[1, 2]", "null"]:
        with pytest.raises(SchemaError):
            parse_trace(text)
