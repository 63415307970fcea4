import json

import pytest

from cartan_algebroids.catalog import NAMES, catalog, catalog_text
from cartan_algebroids.document import (
    DimensionDiagnostic,
    DocumentError,
    ReferenceDiagnostic,
    SchemaDiagnostic,
    SyntaxDiagnostic,
    from_data,
    parse,
    serialize,
    to_data,
)


@pytest.mark.parametrize("name", NAMES)
def test_round_trip_is_identity(name):
    text = catalog_text(name)
    assert serialize(parse(text)) == text
    assert to_data(parse(text)) == json.loads(text)


def test_round_trip_preserves_objects():
    doc = catalog("euclidean2")
    again = parse(serialize(doc))
    assert again.charts == doc.charts
    assert again.a_connections == doc.a_connections
    assert again.geometry("flat").D == doc.geometry("flat").D


def _so3():
    return json.loads(catalog_text("so3"))


def _euclid():
    return json.loads(catalog_text("euclidean2"))


def _expect(exc_type, data_or_text, rule_part=None):
    text = data_or_text if isinstance(data_or_text, str) else json.dumps(data_or_text, indent=2)
    with pytest.raises(exc_type) as info:
        parse(text)
    err = info.value
    assert err.line is not None and err.column is not None
    if rule_part:
        assert rule_part in err.rule
    return err


def test_zero_denominator_names_the_field():
    data = _so3()
    data["lieAlgebras"][0]["brackets"][0]["coeffs"][2] = "1/0"
    err = _expect(SchemaDiagnostic, data, "1/0")
    assert err.path[-2:] == ("coeffs", 2)
    assert "coeffs" in str(err)


def test_missing_algebra_is_reference_error():
    data = _so3()
    data["subspaces"][0]["algebra"] = "nope"
    err = _expect(ReferenceDiagnostic, data)
    assert err.path[-1] == "algebra"


def test_missing_chart_reference():
    data = _euclid()
    data["aConnections"][0]["chart"] = "elsewhere"
    _expect(ReferenceDiagnostic, data)


def test_syntax_error_has_position():
    err = _expect(SyntaxDiagnostic, '{\n  "version": 1,\n  "lieAlgebras": [\n}')
    assert err.line == 4


def test_coefficient_count_is_dimension_error():
    data = _so3()
    data["lieAlgebras"][0]["brackets"][0]["coeffs"].append("0")
    _expect(DimensionDiagnostic, data)


def test_exponent_length_is_dimension_error():
    data = _euclid()
    data["charts"][0]["anchor"][2][0][0]["exponents"] = [0, 1, 0]
    _expect(DimensionDiagnostic, data)


def test_unknown_field_is_schema_error():
    data = _so3()
    data["lieAlgebras"][0]["colour"] = "blue"
    _expect(SchemaDiagnostic, data, "colour")


def test_bracket_pair_order_is_schema_error():
    data = _so3()
    data["lieAlgebras"][0]["brackets"][0]["i"] = 2
    data["lieAlgebras"][0]["brackets"][0]["j"] = 1
    _expect(SchemaDiagnostic, data)


def test_diagnostic_classes_are_distinct():
    kinds = {SyntaxDiagnostic, SchemaDiagnostic, ReferenceDiagnostic, DimensionDiagnostic}
    assert all(issubclass(k, DocumentError) for k in kinds)
    assert len({k.kind for k in kinds}) == 4


def test_diagnostic_serializes():
    data = _so3()
    data["subspaces"][0]["algebra"] = "nope"
    with pytest.raises(DocumentError) as info:
        parse(json.dumps(data))
    d = info.value.to_dict()
    assert d["class"] == "reference" and d["path"] == "/subspaces/0/algebra" and "line" in d and "column" in d


def test_from_data_matches_parse():
    text = catalog_text("sphere2-model")
    assert serialize(from_data(json.loads(text))) == text


def test_antisymmetric_completion():
    doc = catalog("so3")
    g = doc.lie_algebras["so3"]
    assert g.C[1][0][2] == -1
