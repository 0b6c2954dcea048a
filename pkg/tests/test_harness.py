"""Tests for generation, properties, shrinking, the corpus and the fuzz runner."""

import json

import pytest

from fjlambda.errors import GenerationBudgetError, HarnessError, PropertyPreconditionError
from fjlambda.harness.config import GenConfig
from fjlambda.harness.corpus import (
    CounterExample,
    load_counterexample,
    replay,
    save_counterexample,
)
from fjlambda.harness.generate import Generator, gen_table, gen_typed_term, method_order
from fjlambda.harness.oracles import SubtypeOracle, enumerate_redexes
from fjlambda.harness.properties import (
    PROPERTIES,
    BaseProperty,
    Case,
    PropertyResult,
    PropertyStatus,
    check_progress,
    check_subject_reduction,
    check_substitution_lemma,
    get_property,
)
from fjlambda.harness.runner import check_config, run_property
from fjlambda.harness.shrink import case_size, shrink
from fjlambda.parser import SourceProgram, parse_term
from fjlambda.printer import pretty
from fjlambda.syntax import EMPTY_ENV, OBJECT_TYPE, New, nominal, subterms
from fjlambda.typecheck import t_inf
from fjlambda.wellformed import ok_table
from tests.conftest import SHAPES, make_table

CALL = "new Holder((x) -> x).run(new A())"

SMALL = """
interface I { Object m(); }
interface J extends I { }
class A implements J { A() { super(); } Object m() { return this; } }
class B extends A { B() { super(); } }
"""


class NoPairs(BaseProperty):
    """Fails whenever the term mentions ``Pair``; used to drive the shrinker."""

    name = "no-pairs"

    def generate(self, gen, seed):
        term = parse_term("new Holder((x) -> new Pair(x, x)).run(new A())")
        return Case(seed, make_table(SHAPES), term)

    def precondition(self, case):
        pass

    def check(self, case):
        if any(isinstance(s, New) and s.class_name == "Pair" for s in subterms(case.term)):
            return self.result(case, PropertyStatus.FAIL, "found a Pair")
        return self.result(case, PropertyStatus.PASS)


def draw_table(seed):
    try:
        return gen_table(GenConfig(seed=seed))
    except GenerationBudgetError:
        return None


def test_generation_is_deterministic():
    """Equal seeds give equal tables."""
    for seed in range(3):
        first, second = draw_table(seed), draw_table(seed)
        if first is None:
            assert second is None
            continue
        assert pretty(SourceProgram(tuple(first))) == pretty(SourceProgram(tuple(second)))


def test_generated_tables_and_terms_are_well_typed():
    """Every generated table is well formed and every term has the reported type."""
    drawn = 0
    for seed in range(5):
        cfg = GenConfig(seed=seed)
        ct = draw_table(seed)
        if ct is None:
            continue
        assert ok_table(ct) == []
        try:
            term, tau = gen_typed_term(cfg, ct)
        except GenerationBudgetError:
            continue
        assert t_inf(ct, EMPTY_ENV, term).type == tau
        drawn += 1
    assert drawn > 0


def test_method_order_follows_first_declaration(shapes):
    """Methods are numbered in the order they are first declared."""
    order = method_order(shapes)
    assert order["apply"] < order["name"] < order["greet"] < order["shout"] < order["id"]


def test_generator_helpers_are_seeded():
    """Two generators with one seed draw the same numbers."""
    first, second = Generator(GenConfig(seed=11)), Generator(GenConfig(seed=11))
    def draws(gen):
        return [
            (gen.upto(10), gen.subset("abcdef", 3), gen.weighted(["var", "new"]))
            for _ in range(5)
        ]

    assert draws(first) == draws(second)


def test_closed_term_properties_pass_on_a_fixed_case(shapes):
    """Subject reduction, progress and determinism hold along a λ call."""
    term = parse_term(CALL)
    assert check_subject_reduction(shapes, term).status is PropertyStatus.PASS
    assert check_progress(shapes, term).status is PropertyStatus.PASS
    determinism = get_property("determinism").check_case(Case(0, shapes, term))
    assert determinism.status is PropertyStatus.PASS
    round_trip = get_property("round-trip").check_case(Case(0, shapes, term))
    assert round_trip.status is PropertyStatus.PASS


def test_properties_skip_cases_outside_their_domain(shapes):
    """Ill-typed terms and downcasts are excluded by precondition."""
    ill_typed = check_progress(shapes, parse_term("(Pair) new A()"))
    assert ill_typed.status is PropertyStatus.SKIPPED
    downcast = check_progress(shapes, parse_term("(B) new A()"))
    assert downcast.status is PropertyStatus.SKIPPED
    assert "T-UDCAST" in downcast.message


def test_stuck_classification_accepts_failed_casts(shapes):
    """A failed downcast is an expected stuck state."""
    prop = get_property("stuck-classification")
    assert prop.cfg.udcast
    result = prop.check_case(Case(0, shapes, parse_term("(B) new A()")))
    assert result.status is PropertyStatus.PASS


def test_budget_exhaustion_is_inconclusive(table):
    """A diverging term neither passes nor fails."""
    ct = table("class Loop { Loop() { super(); } Object go() { return this.go(); } }")
    result = check_progress(ct, parse_term("new Loop().go()"), GenConfig(max_steps=10))
    assert result.status is PropertyStatus.INCONCLUSIVE
    assert not result.failed


def test_open_term_properties(shapes):
    """Substitution and weakening hold for a small open term."""
    env = EMPTY_ENV.bind("x", nominal("A"))
    term = parse_term("x.id(x)")
    value = parse_term("new B(new Object())")
    result = check_substitution_lemma(shapes, [(env, term, OBJECT_TYPE, "x", value)])
    assert result.status is PropertyStatus.PASS
    weakening = get_property("weakening").check_case(Case(0, shapes, term, env, OBJECT_TYPE))
    assert weakening.status is PropertyStatus.PASS
    assert check_substitution_lemma(shapes, []).status is PropertyStatus.SKIPPED


def test_table_properties(table):
    """Lookup lemmas and the brute-force subtyping oracle agree with the table."""
    ct = table(SMALL)
    assert get_property("lookup").check_case(Case(0, ct)).status is PropertyStatus.PASS
    assert get_property("oracles").check_case(Case(0, ct)).status is PropertyStatus.PASS
    oracle = SubtypeOracle(ct)
    assert oracle.disagreements() == []
    assert oracle.subtype(nominal("B"), nominal("I"))


def test_enumerate_redexes_finds_the_next_step(shapes):
    """A projection under a receiver is the single redex."""
    term = parse_term("new Holder((x) -> x).f.apply(new A())")
    assert enumerate_redexes(shapes, term) == [((0,), "E-ProjNew")]


def test_unknown_property_name():
    """Lookup by name lists the known properties."""
    with pytest.raises(KeyError, match="subject-reduction"):
        get_property("soundness")
    assert set(PROPERTIES) >= {"subject-reduction", "progress", "substitution", "lookup"}


def test_shrink_removes_everything_irrelevant():
    """The shrinker keeps only what the failure needs."""
    prop = NoPairs()
    result = prop.run(0)
    assert result.failed
    case, shrunk = shrink(prop, result.case, result)
    assert shrunk.failed
    assert case.term == parse_term("new Pair(x, x)")
    assert len(case.ct) == 0
    assert case_size(case) < case_size(result.case)


def test_counterexample_files_round_trip(tmp_path, shapes):
    """Saved counterexamples load back and replay."""
    term = parse_term(CALL)
    result = check_progress(shapes, term)
    example = CounterExample.from_result(result)
    path = save_counterexample(example, tmp_path / "corpus")
    assert path.name == "progress-0.fjl"
    assert path.read_text(encoding="utf-8").endswith(f"main = {CALL};\n")
    meta = json.loads(path.with_suffix(".json").read_text(encoding="utf-8"))
    assert meta["property"] == "progress"
    loaded = load_counterexample(path)
    assert loaded.term_source == CALL
    assert replay(path).status is PropertyStatus.PASS


def test_edited_source_wins_over_metadata(tmp_path, shapes):
    """The ``.fjl`` file is authoritative when replaying."""
    example = CounterExample.from_result(check_progress(shapes, parse_term(CALL)))
    path = save_counterexample(example, tmp_path)
    text = path.read_text(encoding="utf-8").replace(CALL, "(B) new A()")
    path.write_text(text, encoding="utf-8")
    assert load_counterexample(path).term_source == "(B) new A()"
    assert replay(path).status is PropertyStatus.SKIPPED


def test_open_term_counterexample_keeps_its_context(shapes):
    """Environment, target and substituted value survive serialisation."""
    env = EMPTY_ENV.bind("x", nominal("A"))
    case = Case(4, shapes, parse_term("x.id(x)"), env, OBJECT_TYPE, "x", parse_term("new A()"))
    result = PropertyResult("substitution", PropertyStatus.FAIL, 4, "boom", case=case)
    example = CounterExample.from_dict(CounterExample.from_result(result).to_dict())
    restored = example.to_case()
    assert restored.env == env
    assert restored.target == OBJECT_TYPE
    assert restored.var == "x"
    assert restored.value == New("A", ())


def test_missing_metadata_is_an_error(tmp_path):
    """A ``.fjl`` file without its ``.json`` cannot be replayed."""
    path = tmp_path / "progress-1.fjl"
    path.write_text("main = new Object();\n", encoding="utf-8")
    with pytest.raises(HarnessError):
        load_counterexample(path)


def test_run_property_counts_statuses():
    """Every seed ends in exactly one status."""
    report = run_property("round-trip", GenConfig(), runs=3, seed=0, progress=False)
    assert report.runs == 3
    assert sum(report.counts.values()) == 3
    assert report.ok
    assert report.summary().startswith("round-trip: 3 runs from seed 0")


def test_run_property_saves_shrunk_failures(tmp_path, monkeypatch):
    """Failures are shrunk, reported and written to the corpus."""
    monkeypatch.setitem(PROPERTIES, NoPairs.name, NoPairs)
    report = run_property("no-pairs", runs=2, seed=5, corpus_dir=tmp_path, progress=False)
    assert not report.ok
    assert report.counts[PropertyStatus.FAIL] == 2
    assert [p.name for p in report.paths] == ["no-pairs-5.fjl", "no-pairs-6.fjl"]
    assert all(example.shrunk for example in report.counterexamples)
    assert report.counterexamples[0].source() == "main = new Pair(x, x);\n"
    assert report.to_dict()["counts"]["fail"] == 2


def test_check_config_rejects_bad_combinations():
    """Downcasts are excluded from the soundness properties; counts must validate."""
    with pytest.raises(PropertyPreconditionError):
        check_config("progress", GenConfig(udcast=True))
    with pytest.raises(HarnessError):
        check_config("round-trip", GenConfig(max_classes=0))
    with pytest.raises(KeyError):
        check_config("nope", GenConfig())


def test_subject_reduction_with_downcasts_uses_stupid_casts(table):
    """With +udcast a downcast trace is typed with stupid casts instead of being skipped."""
    ct = table(
        """
        class C { C() { super(); } }
        class A extends C { A() { super(); } }
        class B extends A { B() { super(); } }
        class D extends C { D() { super(); } }
        """
    )
    term = parse_term("(B) (C) new D()")
    assert check_subject_reduction(ct, term).status is PropertyStatus.SKIPPED
    result = check_subject_reduction(ct, term, GenConfig(udcast=True))
    assert result.status is PropertyStatus.PASS
    prop = get_property("subject-reduction", GenConfig(udcast=True))
    assert prop.checker(ct).stupid_cast
    assert not prop.excludes_udcast
    check_config("subject-reduction", GenConfig(udcast=True))
    report = run_property(
        "subject-reduction", GenConfig(udcast=True, max_steps=200), runs=2, seed=0, progress=False
    )
    assert report.runs == 2


def test_substitution_samples_pass_when_none_fail(shapes):
    """A skipped sample does not hide an earlier or later passing one."""
    env = EMPTY_ENV.bind("x", nominal("A"))
    term = parse_term("x.id(x)")
    good = (env, term, OBJECT_TYPE, "x", parse_term("new A()"))
    skipped = (env, term, OBJECT_TYPE, "x", parse_term("true"))
    assert check_substitution_lemma(shapes, [skipped]).status is PropertyStatus.SKIPPED
    assert check_substitution_lemma(shapes, [good, skipped]).status is PropertyStatus.PASS
    assert check_substitution_lemma(shapes, [skipped, good]).status is PropertyStatus.PASS
