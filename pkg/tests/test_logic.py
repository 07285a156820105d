"""Core data model: well-sortedness, evaluation, occurring values, grounding."""

from __future__ import annotations

import random

import pytest

from finsym.logic import (And, Apply, DomainAssignment, DomainElement, Eq,
                          Exists, Forall, FuncDecl, Implies, Interpretation,
                          LogicError, Not, Or, PredApp, PredDecl, Problem,
                          Signature, Var, check_well_sorted,
                          collect_occurring_values, evaluate, free_vars,
                          ground_formula, ground_problem, satisfies,
                          substitute, symbols_in)
from finsym.oracle import enumerate_interpretations, is_satisfiable
from finsym.problem_io import parse_problem
from finsym.randgen import random_problem


def elem(sort, i):
    return DomainElement(sort, i)


# ---------------------------------------------------------------------------
# Well-sortedness
# ---------------------------------------------------------------------------


def test_worked_example_is_well_sorted(ab_problem):
    assert check_well_sorted(ab_problem) == []


def test_equality_over_unequal_sorts_is_reported(ab_problem):
    bad = ab_problem.with_formulas([Eq(Apply("c"), Apply("d"))])
    errors = check_well_sorted(bad)
    assert len(errors) == 1
    assert "unequal sorts" in errors[0].message
    assert "A" in errors[0].message and "B" in errors[0].message


def test_wrong_argument_sort_names_position():
    sig = Signature(("A", "B"), (), (PredDecl("P", ("A", "B")),))
    problem = Problem(sig, DomainAssignment.of(A=2, B=2),
                      (Forall("x", "A", PredApp("P", (Var("x", "A"), Var("x", "A")))),))
    errors = check_well_sorted(problem)
    assert len(errors) == 1
    assert "argument 2" in errors[0].message
    assert "expected B" in errors[0].message


def test_free_variable_is_an_error():
    sig = Signature(("A",), (), (PredDecl("P", ("A",)),))
    problem = Problem(sig, DomainAssignment.of(A=2),
                      (PredApp("P", (Var("x", "A"),)),))
    errors = check_well_sorted(problem)
    assert any("free variable" in e.message for e in errors)


def test_domain_element_out_of_range_is_an_error():
    sig = Signature(("A",), (FuncDecl("c", (), "A"),), ())
    problem = Problem(sig, DomainAssignment.of(A=3),
                      (Eq(Apply("c"), elem("A", 4)),))
    errors = check_well_sorted(problem)
    assert any("out of range" in e.message for e in errors)


def test_undeclared_symbols_are_errors():
    sig = Signature(("A",), (), ())
    problem = Problem(sig, DomainAssignment.of(A=1),
                      (PredApp("Q", (elem("A", 1),)),
                       Eq(Apply("g", (elem("A", 1),)), elem("A", 1))))
    messages = [e.message for e in check_well_sorted(problem)]
    assert any("undeclared predicate 'Q'" in m for m in messages)
    assert any("undeclared function 'g'" in m for m in messages)


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def test_worked_interpretation_satisfies(ab_problem, ab_interp):
    assert satisfies(ab_problem, ab_interp)
    for f in ab_problem.formulas:
        assert evaluate(f, ab_interp)


def test_domain_element_identity(ab_problem, ab_interp):
    assert evaluate(Eq(elem("A", 1), elem("A", 1)), ab_interp)
    assert not evaluate(Eq(elem("A", 1), elem("A", 2)), ab_interp)


def test_extended_formulas_evaluate(cp_problem):
    extended = cp_problem.with_formulas([Eq(Apply("c"), elem("A", 1))])
    interp = Interpretation.build(
        cp_problem.signature, cp_problem.domains,
        functions={"c": elem("A", 1)},
        predicates={"P": [elem("A", 2)]})
    assert satisfies(extended, interp)
    # cross-check: the same interpretation appears among the enumerated models
    keys = {i.key() for i in enumerate_interpretations(extended)
            if satisfies(extended, i)}
    assert interp.key() in keys


def test_empty_formula_set_is_always_satisfied(ab_problem, ab_interp):
    empty = Problem(ab_problem.signature, ab_problem.domains, ())
    assert satisfies(empty, ab_interp)


def test_over_combined_constraints_unsatisfiable_everywhere(cp_problem):
    a1, a2, a3 = cp_problem.domain("A")
    over = cp_problem.with_formulas([
        Eq(Apply("c"), a1),
        Implies(PredApp("P", (a3,)), PredApp("P", (a2,))),
        Implies(PredApp("P", (a2,)), PredApp("P", (a1,)))])
    assert all(not satisfies(over, i) for i in enumerate_interpretations(over))


def test_shape_mismatch_is_rejected(ab_problem, ab_interp, cp_problem):
    with pytest.raises(LogicError):
        satisfies(cp_problem, ab_interp)


def test_unbound_variable_is_a_programming_error(ab_interp):
    with pytest.raises(LogicError):
        evaluate(PredApp("P", (Var("x", "A"), Var("y", "B"))), ab_interp)


def test_inner_binding_shadows_outer(cp_problem):
    interp = Interpretation.build(
        cp_problem.signature, cp_problem.domains,
        functions={"c": elem("A", 1)}, predicates={"P": [elem("A", 1)]})
    # the inner x re-binds: for every x there is an x equal to A!1
    formula = Forall("x", "A", Exists("x", "A", Eq(Var("x", "A"), elem("A", 1))))
    assert evaluate(formula, interp)
    # without shadowing the outer binding would make this false
    no_shadow = Forall("x", "A", Eq(Var("x", "A"), elem("A", 1)))
    assert not evaluate(no_shadow, interp)


def test_connective_semantics_match_python_on_random_instances():
    rng = random.Random(7)
    for seed in range(30):
        problem = random_problem(rng, max_space=300)
        models = list(enumerate_interpretations(problem))
        for interp in models[:10]:
            for f in problem.formulas:
                assert evaluate(Not(f), interp) == (not evaluate(f, interp))
                for g in problem.formulas:
                    assert evaluate(And(f, g), interp) == (
                        evaluate(f, interp) and evaluate(g, interp))
                    assert evaluate(Or(f, g), interp) == (
                        evaluate(f, interp) or evaluate(g, interp))


# ---------------------------------------------------------------------------
# Occurring values and purity
# ---------------------------------------------------------------------------


def test_pure_problem_has_no_occurring_values(ab_problem):
    occurring = collect_occurring_values(ab_problem)
    assert set(occurring) == {"A", "B"}
    assert all(v == frozenset() for v in occurring.values())
    assert ab_problem.is_pure


def test_extended_example_occurring_values():
    problem = parse_problem("""
(sort A 5)
(sort B 2)
(func f (B) A)
(pred P (A))
(assert (P A!3))
(assert (= (f B!1) A!4))
""")
    occurring = collect_occurring_values(problem)
    assert occurring["A"] == {elem("A", 3), elem("A", 4)}
    assert occurring["B"] == {elem("B", 1)}
    assert not problem.is_pure


def test_single_constraint_occurring_values(cp_problem):
    extended = cp_problem.with_formulas([Eq(Apply("c"), elem("A", 1))])
    occurring = collect_occurring_values(extended)
    assert occurring["A"] == {elem("A", 1)}


def test_purity_iff_no_occurring_values():
    rng = random.Random(3)
    for seed in range(20):
        problem = random_problem(rng, extended=bool(seed % 2), max_space=500)
        empty = all(not v for v in collect_occurring_values(problem).values())
        assert empty == problem.is_pure


# ---------------------------------------------------------------------------
# Helpers: free variables, symbols, substitution
# ---------------------------------------------------------------------------


def test_free_vars_and_symbols(ab_problem):
    f1, f2 = ab_problem.formulas
    assert free_vars(f1) == set() and free_vars(f2) == set()
    assert symbols_in(f1) == {"P", "c"}
    assert symbols_in(f2) == {"f", "d"}


def test_substitution_respects_shadowing():
    inner = Exists("x", "A", PredApp("P", (Var("x", "A"),)))
    outer = And(PredApp("P", (Var("x", "A"),)), inner)
    replaced = substitute(outer, "x", elem("A", 2))
    assert replaced == And(PredApp("P", (elem("A", 2),)), inner)


# ---------------------------------------------------------------------------
# Grounding
# ---------------------------------------------------------------------------


def test_ground_forall_becomes_conjunction():
    domains = DomainAssignment.of(A=2)
    formula = Forall("x", "A", PredApp("P", (Var("x", "A"),)))
    assert ground_formula(formula, domains) == And(
        PredApp("P", (elem("A", 1),)), PredApp("P", (elem("A", 2),)))


def test_ground_exists_becomes_disjunction():
    domains = DomainAssignment.of(A=3, B=2)
    formula = Exists("y", "A", Eq(Apply("f", (Var("y", "A"),)), Apply("d")))
    grounded = ground_formula(formula, domains)
    assert grounded == Or(
        Eq(Apply("f", (elem("A", 1),)), Apply("d")),
        Or(Eq(Apply("f", (elem("A", 2),)), Apply("d")),
           Eq(Apply("f", (elem("A", 3),)), Apply("d"))))


def test_ground_quantifier_free_is_unchanged(cp_problem):
    formula = Eq(Apply("c"), elem("A", 1))
    assert ground_formula(formula, cp_problem.domains) == formula


def test_grounding_preserves_satisfiability():
    rng = random.Random(11)
    for _ in range(15):
        problem = random_problem(rng, max_space=400)
        grounded = ground_problem(problem)
        assert all(not free_vars(f) or False for f in grounded.formulas)
        assert is_satisfiable(problem)[0] == is_satisfiable(grounded)[0]


def test_grounding_size_guard():
    problem = parse_problem("""
(sort A 9)
(pred P (A))
(assert (forall ((x A) (y A) (z A) (w A) (v A) (u A) (t A)) (P x)))
""")
    with pytest.raises(LogicError):
        ground_problem(problem, max_atoms=10 ** 4)
