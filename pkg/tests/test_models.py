import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from skcollapse.errors import DomainError, InputError, ParseError, SchemaError
from skcollapse.models import (bundled, bundled_names, canonical_hash, load_document, load_model,
                               parse_json)
from skcollapse.report import dumps
from skcollapse.special_kahler import Prepotential

from conftest import FIXTURES


def test_bundled_quadratic_loads():
    m = load_model(bundled("quadratic"))
    assert m.kind == "prepotential" and m.value.n == 1 and m.name == "quadratic"


@pytest.mark.parametrize("name", bundled_names())
def test_every_bundled_model_loads(name):
    m = load_model(bundled(name))
    assert len(m.hash) == 64


def test_bad_corner_names_the_corner():
    with pytest.raises(DomainError) as err:
        load_model(FIXTURES / "bad_corner.json")
    assert "w=(-1+1i)" in str(err.value)
    assert err.value.min_eigenvalue < 0


def test_truncated_file_reports_byte_offset(tmp_path):
    data = bundled("cubic").read_bytes()
    cut = tmp_path / "cut.json"
    cut.write_bytes(data[:57])
    with pytest.raises(ParseError) as err:
        load_model(cut)
    assert err.value.offset == 57
    assert "byte 57" in str(err.value)


def test_offset_counts_bytes_not_characters():
    with pytest.raises(ParseError) as err:
        parse_json('{"name": "Kähler", }'.encode())
    assert err.value.offset == len('{"name": "Kähler", '.encode())


def test_missing_file(tmp_path):
    with pytest.raises(InputError):
        load_model(tmp_path / "nope.json")


def test_schema_errors_carry_a_path():
    doc = json.loads(bundled("cubic").read_text())
    doc["terms"][0]["index"] = ["x"]
    with pytest.raises(SchemaError) as err:
        load_document(doc)
    assert err.value.location == "$.terms[0].index[0]"
    with pytest.raises(SchemaError):
        load_document({"kind": "nonsense"})
    with pytest.raises(SchemaError):
        load_document([1, 2])


def test_non_integral_monodromy_is_rejected():
    doc = {"kind": "monodromy", "generators": [[[1, 1], [0, 1]]], "form": [["0", "1/2"], ["-1/2", "0"]]}
    load_document(doc)
    doc["generators"] = [[[2, 0], [0, 1]]]
    with pytest.raises(InputError):
        load_document(doc)


def test_metric_models_carry_divisors():
    m = load_model(bundled("metric_cross"))
    assert m.extras["divisor"].orders == (2, 3)
    assert m.value.n == 2


def test_hash_ignores_key_order():
    a = {"kind": "prepotential", "n": 1, "terms": [{"index": [2], "im": 0.5}]}
    b = {"terms": [{"im": 0.5, "index": [2]}], "n": 1, "kind": "prepotential"}
    assert canonical_hash(a) == canonical_hash(b)


coef = st.floats(-3, 3, allow_nan=False).map(lambda v: round(v, 6))


@given(st.dictionaries(st.integers(0, 4), st.tuples(coef, coef), min_size=1, max_size=4))
def test_prepotential_json_round_trip(terms):
    F = Prepotential.from_terms(1, {(k,): complex(a, b) for k, (a, b) in terms.items()})
    G = Prepotential.from_json(json.loads(json.dumps(F.to_json())))
    w = np.array([0.3 + 0.7j])
    assert G.value(w) == F.value(w)
    assert F.to_json() == G.to_json()


json_leaf = st.one_of(st.none(), st.booleans(), st.integers(-10 ** 6, 10 ** 6),
                      st.floats(allow_nan=False, allow_infinity=False, width=64), st.text(max_size=8))
json_value = st.recursive(json_leaf, lambda c: st.lists(c, max_size=4) |
                          st.dictionaries(st.text(max_size=6), c, max_size=4), max_leaves=20)


@given(json_value)
def test_report_encoding_is_stable(value):
    text = dumps(value)
    assert dumps(value) == text
    again = parse_json(text)
    assert dumps(again) == text
