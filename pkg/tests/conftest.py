"""Shared fixtures: the small worked problems used across the suite."""

from __future__ import annotations

import pytest

from finsym.problem_io import parse_interpretation, parse_problem

AB_TEXT = """
(sort A 3)
(sort B 2)
(const c A)
(const d B)
(func f (A) B)
(pred P (A B))
(assert (forall ((x B)) (P c x)))
(assert (exists ((y A)) (= (f y) d)))
"""

AB_INTERP_TEXT = """
(value c A!1)
(value d B!2)
(value f A!1 B!2)
(value f A!2 B!2)
(value f A!3 B!2)
(holds P A!1 B!1)
(holds P A!1 B!2)
(holds P A!3 B!2)
"""

CP_TEXT = """
(sort A 3)
(const c A)
(pred P (A))
(assert (and (not (P c)) (exists ((x A)) (P x))))
"""


@pytest.fixture
def ab_problem():
    """Two sorts, two constants, one unary function, one binary predicate."""
    return parse_problem(AB_TEXT)


@pytest.fixture
def ab_interp(ab_problem):
    return parse_interpretation(ab_problem, AB_INTERP_TEXT)


@pytest.fixture
def cp_problem():
    """One constant and one unary predicate over a 3-value sort, with
    the formula "P is nonempty but does not contain c"."""
    return parse_problem(CP_TEXT)


def latin_problem(n: int):
    """An n x n Latin square as a single-sorted binary function with
    row- and column-injectivity constraints."""
    return parse_problem(f"""
(sort N {n})
(func f (N N) N)
(assert (forall ((x N) (y1 N) (y2 N)) (=> (= (f x y1) (f x y2)) (= y1 y2))))
(assert (forall ((x1 N) (x2 N) (y N)) (=> (= (f x1 y) (f x2 y)) (= x1 x2))))
""")


def counting_problem(resorted: bool):
    """The symmetry-counting pair: c and f share sort A, or the constant
    and result move to a third sort C of the same size."""
    if not resorted:
        return parse_problem("""
(sort A 3)
(sort B 2)
(const c A)
(func f (A B) A)
(assert (forall ((x A) (y B)) (not (= (f x y) c))))
""")
    return parse_problem("""
(sort A 3)
(sort B 2)
(sort C 3)
(const c C)
(func f (A B) C)
(assert (forall ((x A) (y B)) (not (= (f x y) c))))
""")
