"""Tests for the soundness properties over randomly generated programs."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fjlambda.harness.config import GenConfig
from fjlambda.harness.properties import PropertyStatus, get_property

seeds = st.integers(min_value=0, max_value=10_000)


@pytest.mark.parametrize("name", ["subject-reduction", "progress", "determinism"])
@settings(max_examples=15, deadline=None)
@given(seed=seeds)
def test_closed_term_properties_never_fail(name, seed):
    """No generated program is a counterexample to the closed-term properties."""
    result = get_property(name, GenConfig(max_steps=200)).run(seed)
    assert not result.failed, result.message


@settings(max_examples=10, deadline=None)
@given(seed=seeds)
def test_failed_downcasts_are_the_only_stuck_states(seed):
    """With downcasts on, evaluation only gets stuck on a failed cast."""
    result = get_property("stuck-classification", GenConfig(max_steps=200)).run(seed)
    assert result.status is not PropertyStatus.FAIL, result.message


@settings(max_examples=10, deadline=None)
@given(seed=seeds)
def test_open_term_properties_never_fail(seed):
    """Substitution and weakening hold for generated open terms."""
    for name in ("substitution", "weakening"):
        result = get_property(name).run(seed)
        assert not result.failed, result.message


@settings(max_examples=10, deadline=None)
@given(seed=seeds)
def test_printed_programs_parse_back(seed):
    """Pretty-printing and re-parsing a generated program is the identity."""
    assert get_property("round-trip").run(seed).status is not PropertyStatus.FAIL
