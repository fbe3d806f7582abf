"""
Tests for the named example registry.
"""

import pytest

from app.core.lck_analysis import is_lck
from app.services.example_registry import EXAMPLES, build_example, corpus
from app.utils.exceptions import ValidationError


def test_registry_names():
    assert sorted(EXAMPLES) == ["counterexample", "d4", "dim", "gb", "r2c"]


@pytest.mark.parametrize("name, params, dim", [
    ("d4", {}, 4),
    ("gb", {"b": "7/2"}, 4),
    ("dim", {"n": 3}, 8),
    ("counterexample", {}, 4),
    ("r2c", {"c": "2"}, 2),
])
def test_build_example_dimensions(exact, name, params, dim):
    example = build_example(name, exact, **params)
    assert example.algebra.dim == dim
    assert example.structure.dim == dim


def test_examples_with_triples_are_lck(exact):
    for name, params in (("d4", {}), ("gb", {"b": "-2"}), ("dim", {"n": 2})):
        example = build_example(name, exact, **params)
        assert example.triple is not None
        assert is_lck(example.algebra, example.structure)


def test_label_includes_parameters(exact):
    assert build_example("gb", exact, b="7/2").label == "gb[b=7/2]"
    assert build_example("d4", exact).label == "d4"


def test_unknown_example(exact):
    with pytest.raises(ValidationError) as info:
        build_example("so3", exact)
    assert info.value.error_code == "unknown_example"


def test_missing_parameter(exact):
    with pytest.raises(ValidationError) as info:
        build_example("gb", exact)
    assert info.value.error_code == "missing_parameter"


@pytest.mark.parametrize("n", [0, -1, "2", True])
def test_dim_needs_positive_integer(exact, n):
    with pytest.raises(ValidationError) as info:
        build_example("dim", exact, n=n)
    assert info.value.error_code == "invalid_parameter"


def test_corpus_contents(exact):
    names = [example.name for example in corpus(exact)]
    assert names.count("gb") == 4
    assert names.count("dim") == 5
    assert "counterexample" in names
