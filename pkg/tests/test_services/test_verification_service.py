"""
Tests for the verification suite.
"""

import pytest

from app.core.triples import KahlerTriple, check_triple, semidirect
from app.services.example_registry import Example, build_example
from app.services.verification_service import (
    GROUPS,
    SECTIONS,
    CheckResult,
    VerificationService,
    expand_groups,
    violating_triples,
)
from app.utils.exceptions import ValidationError


def test_check_result_line():
    assert CheckResult("dim4", "d4 classifies as D4", True).line() == "[PASS] dim4: d4 classifies as D4"
    assert CheckResult("g", "x", False, "why").line() == "[FAIL] g: x (why)"


def test_violating_triples_break_exactly_the_listed_conditions(exact):
    cases = violating_triples(exact)
    assert len(cases) == 21
    for triple, broken in cases:
        assert check_triple(triple).failed == list(broken)


@pytest.mark.parametrize("group", ["builders", "counterexample", "dim4", "correspondence"])
def test_fixed_groups_pass(exact, group):
    summary = VerificationService(backend=exact).run(only=[group])
    assert summary.passed, summary.first_failure
    assert summary.total == len(summary.results) > 0


def test_conditions_group_on_small_corpus(exact):
    service = VerificationService(examples=[build_example("d4", exact)], backend=exact)
    seen = []
    summary = service.run(only=["conditions", "residuals", "identities", "structure"], on_result=seen.append)
    assert summary.passed, summary.first_failure
    assert len(seen) == summary.total


def test_broken_example_is_reported(exact, abelian_plane):
    """u = 0 breaks J + u*J + Ju = 0."""
    algebra, structure = abelian_plane
    zero = exact.zeros((2, 2))
    triple = KahlerTriple(algebra, structure, zero, zero, 1)
    broken = Example("broken", *semidirect(triple), triple=triple)
    summary = VerificationService(examples=[broken], backend=exact).run(only=["conditions"])
    assert not summary.passed
    assert summary.failures == 1
    assert summary.first_failure.startswith("conditions: broken")


def test_unknown_group(exact):
    with pytest.raises(ValidationError) as info:
        VerificationService(backend=exact).run(only=["section9"])
    assert info.value.error_code == "unknown_group"
    assert "builders" in GROUPS


def test_sections_expand_to_groups():
    assert expand_groups(["section3"]) == ["residuals"]
    expanded = expand_groups(["section5", "conditions", "dim4"])
    assert expanded == ["conditions", "counterexample", "correspondence", "dim4"]
    assert {group for groups in SECTIONS.values() for group in groups} == set(GROUPS)


def test_run_by_section(exact):
    examples = [build_example("d4", exact)]
    summary = VerificationService(examples=examples, backend=exact).run(only=["section3"])
    assert summary.passed
    assert summary.total > 0
    assert {result.group for result in summary.results} == {"residuals"}
