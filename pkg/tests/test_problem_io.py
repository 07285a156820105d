"""Parser and printer: grammar coverage, diagnostics, round-trips."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from finsym.logic import (And, Apply, DomainElement, Eq, Forall, Or, PredApp,
                          satisfies)
from finsym.oracle import enumerate_interpretations
from finsym.problem_io import (ParseError, parse_interpretation,
                               parse_problem, print_interpretation,
                               print_problem)
from finsym.randgen import random_problem
from tests.conftest import AB_TEXT, AB_INTERP_TEXT


def test_worked_example_parses(ab_problem):
    assert len(ab_problem.formulas) == 2
    assert ab_problem.is_pure
    assert ab_problem.size("A") == 3 and ab_problem.size("B") == 2


def test_minimal_document():
    problem = parse_problem("(sort A 1)")
    assert problem.formulas == ()
    assert problem.signature.sorts == ("A",)


def test_comments_are_skipped():
    problem = parse_problem("; a comment\n(sort A 2) ; trailing\n")
    assert problem.size("A") == 2


def test_nary_connectives_fold_right():
    problem = parse_problem("""
(sort A 2)
(pred P (A))
(assert (and (P A!1) (P A!2) (P A!1)))
(assert (or (P A!1) (P A!2) (P A!1)))
""")
    p1 = PredApp("P", (DomainElement("A", 1),))
    p2 = PredApp("P", (DomainElement("A", 2),))
    assert problem.formulas[0] == And(p1, And(p2, p1))
    assert problem.formulas[1] == Or(p1, Or(p2, p1))


def test_multi_binder_quantifier_nests():
    problem = parse_problem("""
(sort A 2)
(sort B 2)
(pred P (A B))
(assert (forall ((x A) (y B)) (P x y)))
""")
    outer = problem.formulas[0]
    assert isinstance(outer, Forall) and outer.sort == "A"
    assert isinstance(outer.body, Forall) and outer.body.sort == "B"


@pytest.mark.parametrize("text, fragment", [
    ("(sort A 3)\n(assert (= A!4 A!1))", "out of range"),
    ("(sort A 2)\n(assert (= A!1 B!1))", "undeclared sort"),
    ("(sort A 2)\n(assert (P A!1))", "undeclared predicate"),
    ("(sort A 2)\n(assert (= q A!1))", "undeclared symbol"),
    ("(sort A 2)\n(pred P (A))\n(assert (P A!1 A!2))", "expects 1 argument"),
    ("(sort A 2)\n(sort B 2)\n(const c A)\n(assert (= c B!1))", "unequal sorts"),
    ("(sort A 2)\n(sort A 3)", "duplicate declaration"),
    ("(sort A 2)\n(const A A)", "duplicate declaration"),
    ("(sort A 2)\n(const not A)", "reserved word"),
    ("(sort A 0)", "at least 1"),
    ("(sort A 2", "unclosed"),
    ("(sort A 2))", "unmatched"),
    ("(sort A 2) (assert (= A! A!1))", "expected index"),
    ("(pred P (A))", "undeclared sort"),
])
def test_diagnostics_carry_positions(text, fragment):
    with pytest.raises(ParseError) as err:
        parse_problem(text)
    assert fragment in str(err.value)
    assert err.value.line >= 1 and err.value.col >= 1


def test_bare_identifier_formula_is_rejected():
    with pytest.raises(ParseError) as err:
        parse_problem("(sort A 2)\n(pred P (A))\n(assert P)")
    assert "not a formula" in str(err.value)


def test_round_trip_worked_example(ab_problem):
    assert parse_problem(print_problem(ab_problem)) == ab_problem


def test_round_trip_declarations_only():
    problem = parse_problem("(sort A 2)\n(const c A)\n(func g (A A) A)\n(pred P (A))")
    text = print_problem(problem)
    assert parse_problem(text) == problem
    assert "(func g (A A) A)" in text


def test_extended_formula_prints_domain_literal(cp_problem):
    extended = cp_problem.with_formulas([Eq(Apply("c"), DomainElement("A", 1))])
    text = print_problem(extended)
    assert "(assert (= c A!1))" in text
    assert parse_problem(text) == extended


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6), st.booleans())
def test_round_trip_random_problems(seed, extended):
    problem = random_problem(random.Random(seed), extended=extended,
                             max_space=10 ** 6)
    assert parse_problem(print_problem(problem)) == problem


# ---------------------------------------------------------------------------
# Interpretations
# ---------------------------------------------------------------------------


def test_parse_worked_interpretation(ab_problem, ab_interp):
    assert satisfies(ab_problem, ab_interp)
    assert ab_interp.functions["c"][()] == DomainElement("A", 1)


def test_nullary_only_interpretation():
    problem = parse_problem("(sort A 4)\n(const c A)")
    interp = parse_interpretation(problem, "(value c A!1)")
    assert interp.functions["c"][()] == DomainElement("A", 1)


@pytest.mark.parametrize("drop_line, fragment", [
    ("(value f A!2 B!2)", "missing cell"),
])
def test_missing_cell_is_an_error(ab_problem, drop_line, fragment):
    text = AB_INTERP_TEXT.replace(drop_line + "\n", "")
    with pytest.raises(ParseError) as err:
        parse_interpretation(ab_problem, text)
    assert fragment in str(err.value)


def test_duplicate_cell_is_an_error(ab_problem):
    text = AB_INTERP_TEXT + "(value c A!2)\n"
    with pytest.raises(ParseError) as err:
        parse_interpretation(ab_problem, text)
    assert "duplicate cell" in str(err.value)


def test_wrong_sort_value_is_an_error(ab_problem):
    text = AB_INTERP_TEXT.replace("(value c A!1)", "(value c B!1)")
    with pytest.raises(ParseError) as err:
        parse_interpretation(ab_problem, text)
    assert "sort" in str(err.value)


def test_interpretation_round_trip(ab_problem, ab_interp):
    text = print_interpretation(ab_problem, ab_interp)
    again = parse_interpretation(ab_problem, text)
    assert again.key() == ab_interp.key()


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_interpretation_round_trip_random(seed):
    problem = random_problem(random.Random(seed), max_space=200)
    for interp in list(enumerate_interpretations(problem))[:5]:
        text = print_interpretation(problem, interp)
        assert parse_interpretation(problem, text).key() == interp.key()
