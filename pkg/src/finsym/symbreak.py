"""Static symmetry-breaking constraint generation.

Six constraint families are generated here, each backed by a soundness
theorem: ordered constant constraints with canonicity constraints,
ordered range constraints for single-sorted unary functions, strong
ordered range constraints for domain-range distinct (DRD) functions,
predicate membership constraints for unary predicates, and single-pivot
membership constraints for binary predicates over two distinct sorts.

Schemes compose through a per-sort *interchangeability ledger*: the
ordered list of values provably interchangeable at this point, namely the
values that occur nowhere in the formulas nor in any constraint emitted
so far.  Any permutation acting only on such values fixes every
occurrence, hence fixes the formula set, hence preserves satisfaction;
that occurrence criterion is what lets the extended soundness theorems
chain.  After every emission the ledger drops, for every sort, every
value that the new constraints mention (result values, argument-tuple
values, pivots alike); anything less is unsound once two schemes feed
each other's sorts.

Single-sorted ordered range constraints and the binary predicate scheme
have no partial-ledger soundness theorem, so they demand an untouched
(full-domain) ledger and refuse otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import itertools

from .logic import (Apply, DomainElement, Eq, Formula, Implies, PredApp,
                    Problem, collect_occurring_values, domain_elements_in,
                    or_all)


class SchemeError(Exception):
    """A scheme's precondition fails; carries the ledger state at failure."""

    def __init__(self, message: str, ledger: InterchangeabilityLedger | None = None):
        super().__init__(message)
        self.ledger = ledger


@dataclass(frozen=True)
class InterchangeabilityLedger:
    """Per sort, the ordered list of values currently known interchangeable.

    Every listed value is absent from the problem's formulas and from all
    constraints emitted so far; the order is ascending canonical index,
    fixed at creation, and schemes consume prefix-first.
    """

    entries: tuple[tuple[str, tuple[DomainElement, ...]], ...]

    def values(self, sort: str) -> tuple[DomainElement, ...]:
        for s, vals in self.entries:
            if s == sort:
                return vals
        raise KeyError(sort)

    def is_full(self, problem: Problem, sort: str) -> bool:
        return len(self.values(sort)) == problem.size(sort)

    def remove(self, elements: Iterable[DomainElement]) -> InterchangeabilityLedger:
        gone = set(elements)
        return InterchangeabilityLedger(tuple(
            (s, tuple(v for v in vals if v not in gone))
            for s, vals in self.entries))

    def as_dict(self) -> dict[str, tuple[DomainElement, ...]]:
        return dict(self.entries)


def initial_ledger(problem: Problem) -> InterchangeabilityLedger:
    """Per sort, the values not occurring in the formulas, ascending; the
    full domain for a pure problem."""
    occurring = collect_occurring_values(problem)
    return InterchangeabilityLedger(tuple(
        (s, tuple(v for v in problem.domain(s) if v not in occurring[s]))
        for s in problem.signature.sorts))


@dataclass(frozen=True)
class SchemeApplication:
    """Audit record of one scheme application."""

    kind: str
    symbols: tuple[str, ...]
    formulas: tuple[Formula, ...]
    ledger_before: InterchangeabilityLedger
    ledger_after: InterchangeabilityLedger
    note: str | None = None

    def consumed(self) -> dict[str, tuple[DomainElement, ...]]:
        out = {}
        for sort, before in self.ledger_before.entries:
            after = set(self.ledger_after.values(sort))
            gone = tuple(v for v in before if v not in after)
            if gone:
                out[sort] = gone
        return out


def _finish(kind: str, symbols: Sequence[str], formulas: Sequence[Formula],
            ledger: InterchangeabilityLedger, note: str | None = None
            ) -> SchemeApplication:
    after = ledger.remove(domain_elements_in(list(formulas)))
    return SchemeApplication(kind, tuple(symbols), tuple(formulas), ledger,
                             after, note)


# ---------------------------------------------------------------------------
# The six schemes
# ---------------------------------------------------------------------------


def constants_scheme(problem: Problem, sort: str, constants: Sequence[str],
                     ledger: InterchangeabilityLedger) -> SchemeApplication:
    """Ordered constant constraints, extended form.

    With the ledger's values enumerated a_1..a_m and constants c_1..c_n,
    the k-th constraint allows c_k one of a_1..a_k or any non-ledger value
    (the non-ledger disjunct vanishes for a full ledger, recovering the
    pure form exactly).  Canonicity constraints - if c_k takes a_d then
    some earlier constant takes a_{d-1} - are emitted only for a
    full-domain ledger.
    """
    if not constants:
        raise SchemeError("constants scheme needs at least one constant", ledger)
    for name in constants:
        decl = problem.signature.function(name)
        if decl is None or not decl.is_constant:
            raise SchemeError(f"'{name}' is not a declared constant", ledger)
        if decl.result_sort != sort:
            raise SchemeError(f"constant '{name}' has sort {decl.result_sort}, "
                              f"not {sort}", ledger)
    xs = ledger.values(sort)
    if not xs:
        raise SchemeError(f"no interchangeable values remain for sort {sort}", ledger)
    non_x = [v for v in problem.domain(sort) if v not in set(xs)]
    r = min(len(xs), len(constants))
    formulas: list[Formula] = []
    for k in range(1, r + 1):
        c_k = Apply(constants[k - 1])
        disjuncts = [Eq(c_k, xs[i]) for i in range(k)]
        disjuncts += [Eq(c_k, v) for v in non_x]
        formulas.append(or_all(disjuncts))
    if len(xs) == problem.size(sort):
        for k in range(2, r + 1):
            c_k = Apply(constants[k - 1])
            for d in range(2, k + 1):
                earlier = or_all([Eq(Apply(constants[i - 1]), xs[d - 2])
                                  for i in range(1, k)])
                formulas.append(Implies(Eq(c_k, xs[d - 1]), earlier))
    return _finish("constants", constants, formulas, ledger)


def unary_range_scheme(problem: Problem, func: str,
                       ledger: InterchangeabilityLedger) -> SchemeApplication:
    """Ordered range constraints for a single-sorted unary function
    f: A -> A, requiring an untouched full-domain ledger: f(a_i) must be
    one of a_1..a_{i+1}."""
    decl = problem.signature.function(func)
    if decl is None or decl.arity != 1 or decl.arg_sorts[0] != decl.result_sort:
        raise SchemeError(f"'{func}' is not a unary function A -> A", ledger)
    sort = decl.result_sort
    if not ledger.is_full(problem, sort):
        raise SchemeError(
            f"scheme inapplicable: ordered range constraints for {func} need "
            f"an untouched ledger for {sort} and no extended soundness "
            f"theorem exists", ledger)
    values = problem.domain(sort)
    m = len(values)
    formulas = [
        or_all([Eq(Apply(func, (values[i - 1],)), values[j - 1])
                for j in range(1, i + 2)])
        for i in range(1, m)]
    return _finish("unary-range", (func,), formulas, ledger)


def drd_range_scheme(problem: Problem, func: str,
                     ledger: InterchangeabilityLedger,
                     tuple_order: Sequence[tuple[DomainElement, ...]] | None = None
                     ) -> SchemeApplication:
    """Strong ordered range constraints for a DRD function
    f: A1 x .. x Ak -> B: the i-th argument tuple must map into the first
    i ledger values of B or any non-ledger value.  The default tuple order
    is row-major lexicographic over the argument domains."""
    decl = problem.signature.function(func)
    if decl is None or not decl.is_drd:
        raise SchemeError(f"'{func}' is not a domain-range distinct function", ledger)
    xs = ledger.values(decl.result_sort)
    if not xs:
        raise SchemeError(f"no interchangeable values remain for sort "
                          f"{decl.result_sort}", ledger)
    if tuple_order is None:
        tuples = list(itertools.product(*(problem.domain(s) for s in decl.arg_sorts)))
    else:
        tuples = [tuple(t) for t in tuple_order]
        expected = set(itertools.product(*(problem.domain(s) for s in decl.arg_sorts)))
        if len(tuples) != len(expected) or set(tuples) != expected:
            raise SchemeError(f"tuple order must enumerate the argument space "
                              f"of '{func}' exactly once", ledger)
    non_x = [v for v in problem.domain(decl.result_sort) if v not in set(xs)]
    r = min(len(tuples), len(xs))
    formulas = []
    for i in range(1, r + 1):
        cell = Apply(func, tuples[i - 1])
        disjuncts = [Eq(cell, xs[j - 1]) for j in range(1, i + 1)]
        disjuncts += [Eq(cell, v) for v in non_x]
        formulas.append(or_all(disjuncts))
    return _finish("drd-range", (func,), formulas, ledger)


def unary_predicate_scheme(problem: Problem, pred: str,
                           ledger: InterchangeabilityLedger) -> SchemeApplication:
    """Predicate membership constraints for a unary predicate Q: the
    ledger's values d_1..d_m may be members only downward-closed,
    Q(d_i) => Q(d_{i-1})."""
    decl = problem.signature.predicate(pred)
    if decl is None or decl.arity != 1:
        raise SchemeError(f"'{pred}' is not a unary predicate", ledger)
    xs = ledger.values(decl.arg_sorts[0])
    if len(xs) < 2:
        return _finish("unary-pred", (pred,), [], ledger,
                       note=f"fewer than 2 interchangeable values for "
                            f"{decl.arg_sorts[0]}; nothing to break")
    formulas = [Implies(PredApp(pred, (xs[i],)), PredApp(pred, (xs[i - 1],)))
                for i in range(1, len(xs))]
    return _finish("unary-pred", (pred,), formulas, ledger)


def binary_predicate_scheme(problem: Problem, pred: str, pivot: DomainElement,
                            ledger: InterchangeabilityLedger) -> SchemeApplication:
    """Single-pivot membership constraints for Q: A x B with A and B
    distinct: Q(pivot, b_j) => Q(pivot, b_{j-1}) over all of B.  Requires
    an untouched full-domain ledger for B; a second pivot for the same
    predicate is unsound."""
    decl = problem.signature.predicate(pred)
    if decl is None or decl.arity != 2:
        raise SchemeError(f"'{pred}' is not a binary predicate", ledger)
    sort_a, sort_b = decl.arg_sorts
    if sort_a == sort_b:
        raise SchemeError(
            f"scheme inapplicable: '{pred}' uses one sort twice and the "
            f"membership theorem fails for single-sorted binary predicates",
            ledger)
    if pivot.sort != sort_a or not 1 <= pivot.index <= problem.size(sort_a):
        raise SchemeError(f"pivot {pivot} is not a value of sort {sort_a}", ledger)
    if not ledger.is_full(problem, sort_b):
        raise SchemeError(
            f"scheme inapplicable: membership constraints for {pred} need an "
            f"untouched ledger for {sort_b} and no extended soundness "
            f"theorem exists", ledger)
    values = problem.domain(sort_b)
    formulas = [
        Implies(PredApp(pred, (pivot, values[j - 1])),
                PredApp(pred, (pivot, values[j - 2])))
        for j in range(2, len(values) + 1)]
    return _finish("binary-pred", (pred,), formulas, ledger)


# ---------------------------------------------------------------------------
# Plans and combination
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConstantsRequest:
    sort: str
    constants: tuple[str, ...]


@dataclass(frozen=True)
class UnaryRangeRequest:
    func: str


@dataclass(frozen=True)
class DrdRangeRequest:
    func: str


@dataclass(frozen=True)
class UnaryPredicateRequest:
    pred: str


@dataclass(frozen=True)
class BinaryPredicateRequest:
    pred: str
    pivot: DomainElement


SchemeRequest = Union[ConstantsRequest, UnaryRangeRequest, DrdRangeRequest,
                      UnaryPredicateRequest, BinaryPredicateRequest]


def _apply_request(problem: Problem, req: SchemeRequest,
                   ledger: InterchangeabilityLedger,
                   pivots: dict[str, DomainElement]) -> SchemeApplication:
    if isinstance(req, ConstantsRequest):
        return constants_scheme(problem, req.sort, req.constants, ledger)
    if isinstance(req, UnaryRangeRequest):
        return unary_range_scheme(problem, req.func, ledger)
    if isinstance(req, DrdRangeRequest):
        return drd_range_scheme(problem, req.func, ledger)
    if isinstance(req, UnaryPredicateRequest):
        return unary_predicate_scheme(problem, req.pred, ledger)
    if isinstance(req, BinaryPredicateRequest):
        seen = pivots.get(req.pred)
        if seen is not None and seen != req.pivot:
            raise SchemeError(
                f"second pivot {req.pivot} for '{req.pred}' after {seen}; "
                f"two-pivot membership breaking is unsound", ledger)
        app = binary_predicate_scheme(problem, req.pred, req.pivot, ledger)
        pivots[req.pred] = req.pivot
        return app
    raise TypeError(f"not a scheme request: {req!r}")


def combine(problem: Problem, plan: Sequence[SchemeRequest]
            ) -> tuple[Problem, list[SchemeApplication]]:
    """Run the plan in order, each scheme validated against the ledger as
    updated by the earlier steps, and append every emitted constraint to
    the problem.  Satisfiability is preserved; any inapplicable scheme
    aborts with the ledger state at failure."""
    ledger = initial_ledger(problem)
    pivots: dict[str, DomainElement] = {}
    applications: list[SchemeApplication] = []
    extended = problem
    for req in plan:
        app = _apply_request(problem, req, ledger, pivots)
        applications.append(app)
        extended = extended.with_formulas(app.formulas)
        ledger = app.ledger_after
    return extended, applications


def default_plan(problem: Problem) -> list[SchemeRequest]:
    """Deterministic heuristic plan: per sort, constants first; then DRD
    functions by descending argument-space size; then unary predicates;
    then binary predicates (first pivot) where their second sort is still
    untouched; finally single-sorted unary ranges on untouched sorts.
    Every request is kept only if it applies cleanly and emits at least
    one constraint, so the plan always passes ``combine``."""
    sig = problem.signature
    ledger = initial_ledger(problem)
    pivots: dict[str, DomainElement] = {}
    plan: list[SchemeRequest] = []

    def attempt(req: SchemeRequest) -> None:
        nonlocal ledger
        try:
            app = _apply_request(problem, req, ledger, dict(pivots))
        except SchemeError:
            return
        if not app.formulas:
            return
        if isinstance(req, BinaryPredicateRequest):
            pivots[req.pred] = req.pivot
        plan.append(req)
        ledger = app.ledger_after

    for sort in sig.sorts:
        consts = tuple(f.name for f in sig.constants(sort))
        if consts:
            attempt(ConstantsRequest(sort, consts))
    drds = [f for f in sig.functions if f.is_drd]

    def arg_space(decl) -> int:
        size = 1
        for s in decl.arg_sorts:
            size *= problem.size(s)
        return size

    order = {f.name: i for i, f in enumerate(sig.functions)}
    for f in sorted(drds, key=lambda d: (-arg_space(d), order[d.name])):
        attempt(DrdRangeRequest(f.name))
    for p in sig.predicates:
        if p.arity == 1:
            attempt(UnaryPredicateRequest(p.name))
    for p in sig.predicates:
        if p.arity == 2 and p.arg_sorts[0] != p.arg_sorts[1]:
            attempt(BinaryPredicateRequest(p.name, problem.domain(p.arg_sorts[0])[0]))
    for f in sig.functions:
        if f.arity == 1 and f.arg_sorts[0] == f.result_sort:
            attempt(UnaryRangeRequest(f.name))
    return plan


def audit_lines(applications: Iterable[SchemeApplication]) -> list[str]:
    """The audit trail as comment lines for the problem file format."""
    lines = []
    for app in applications:
        consumed = app.consumed()
        spent = " ".join(f"{v}" for vs in consumed.values() for v in vs) or "nothing"
        lines.append(f"; scheme {app.kind} {','.join(app.symbols)} consumed {spent}")
    return lines
