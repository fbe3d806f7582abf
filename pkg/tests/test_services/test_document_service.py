"""
Tests for document reading, validation and writing.
"""

import json

import pytest

from app.core.triples import semidirect
from app.utils.exceptions import (
    DimensionMismatchError,
    DocumentParseError,
    LieAlgebraError,
    TripleError,
)


def _write(path, data):
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


def test_algebra_round_trip(document_service, d4_triple, temp_dir):
    algebra, structure = semidirect(d4_triple)
    path = str(temp_dir / "d4.json")
    document_service.write(document_service.algebra_to_document(algebra, structure), path)

    loaded, loaded_structure = document_service.load_algebra(path)
    backend = document_service.backend
    assert loaded.names == algebra.names
    assert backend.all_zero(loaded.constants - algebra.constants)
    assert backend.all_zero(loaded_structure.J - structure.J)


def test_triple_round_trip_is_bit_exact(document_service, gb_triple, temp_dir):
    path = str(temp_dir / "gb.json")
    document = document_service.triple_to_document(gb_triple)
    document_service.write(document, path)
    first = (temp_dir / "gb.json").read_text(encoding="utf-8")

    reloaded = document_service.load_triple(path)
    document_service.write(document_service.triple_to_document(reloaded), path)
    assert (temp_dir / "gb.json").read_text(encoding="utf-8") == first
    assert json.loads(first)["n"] == 1


def test_load_any_detects_triples(document_service, d4_triple, temp_dir):
    path = str(temp_dir / "triple.json")
    document_service.write(document_service.triple_to_document(d4_triple), path)
    loaded = document_service.load_any(path)
    assert loaded.c == 1
    assert loaded.dim == 2


def test_invalid_json_reports_position(document_service, temp_dir):
    path = temp_dir / "broken.json"
    path.write_text('{\n  "dim": 2,\n  "metric": [\n', encoding="utf-8")
    with pytest.raises(DocumentParseError) as info:
        document_service.read_json(str(path))
    assert info.value.error_code == "invalid_json"
    assert info.value.details["line"] >= 3


def test_missing_file(document_service, temp_dir):
    with pytest.raises(DocumentParseError) as info:
        document_service.read_json(str(temp_dir / "missing.json"))
    assert info.value.error_code == "io_error"


def test_bad_rational_names_the_field(document_service, temp_dir):
    path = _write(temp_dir / "bad.json", {
        "dim": 2,
        "brackets": [],
        "metric": [["1", "0"], ["0", "1/0"]],
        "J": [["0", "-1"], ["1", "0"]],
    })
    with pytest.raises(DocumentParseError) as info:
        document_service.load_algebra(path)
    assert info.value.details["errors"][0]["field"] == "metric"


def test_bracket_order_enforced(document_service, temp_dir):
    path = _write(temp_dir / "order.json", {
        "dim": 2,
        "brackets": [{"i": 1, "j": 0, "terms": [{"k": 1, "coeff": "1"}]}],
        "metric": [["1", "0"], ["0", "1"]],
        "J": [["0", "-1"], ["1", "0"]],
    })
    with pytest.raises(DocumentParseError) as info:
        document_service.load_algebra(path)
    assert "i < j" in info.value.message


def test_jacobi_violation_raises(document_service, temp_dir):
    """[e0,e1] = e2, [e1,e2] = e1 breaks Jacobi at (0, 1, 2)."""
    identity = [["1" if i == j else "0" for j in range(4)] for i in range(4)]
    J = [["0", "-1", "0", "0"], ["1", "0", "0", "0"], ["0", "0", "0", "-1"], ["0", "0", "1", "0"]]
    path = _write(temp_dir / "jacobi.json", {
        "dim": 4,
        "brackets": [
            {"i": 0, "j": 1, "terms": [{"k": 2, "coeff": "1"}]},
            {"i": 1, "j": 2, "terms": [{"k": 1, "coeff": "1"}]},
        ],
        "metric": identity,
        "J": J,
    })
    with pytest.raises(LieAlgebraError):
        document_service.load_algebra(path)


def test_triple_with_non_derivation_rejected(document_service, counterexample_triple, temp_dir):
    data = document_service.triple_to_document(counterexample_triple).model_dump()
    data["u"] = [["1", "0"], ["0", "1"]]
    path = _write(temp_dir / "triple.json", data)
    with pytest.raises(TripleError):
        document_service.load_triple(path)


def test_triple_n_must_match(document_service, d4_triple, temp_dir):
    data = document_service.triple_to_document(d4_triple).model_dump()
    data["n"] = 2
    path = _write(temp_dir / "triple.json", data)
    with pytest.raises(DocumentParseError):
        document_service.load_triple(path)


def test_read_matrix_inline_and_file(document_service, temp_dir):
    inline = document_service.read_matrix('[["0", "1/2"], ["-3", "0"]]', 2, "u")
    assert inline[0, 1].denominator == 2
    path = _write(temp_dir / "u.json", [["1", "0"], ["0", "1"]])
    assert document_service.read_matrix(path, 2, "u")[1, 1] == 1


def test_read_matrix_errors(document_service):
    with pytest.raises(DimensionMismatchError):
        document_service.read_matrix('[["0"]]', 2, "u")
    with pytest.raises(DocumentParseError):
        document_service.read_matrix('[["x", "0"], ["0", "0"]]', 2, "u")
    with pytest.raises(DocumentParseError):
        document_service.read_matrix('[1, 2', 2, "u")
