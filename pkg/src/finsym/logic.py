"""Core data model for many-sorted finite model finding.

A problem is a triple: a signature (sorts, function symbols, predicate
symbols), a finite set of closed formulas, and a domain assignment giving
each sort a finite nonempty domain.  Only domain *sizes* matter, so the
domain of a sort ``A`` with size ``n`` is fixed to the canonical values
``A!1 .. A!n``; distinct sorts therefore always have disjoint domains.

Formulas are immutable trees.  An *extended* formula may embed canonical
domain elements as terms (they evaluate to themselves); a *pure* formula
contains none.  ``Bool`` is not a sort: predicates are interpreted as sets
of argument tuples, never as Bool-valued functions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Union


class LogicError(Exception):
    """A malformed signature, domain assignment, or interpretation."""


# ---------------------------------------------------------------------------
# Signatures and domain assignments
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FuncDecl:
    """A function symbol ``f: A1 x ... x An -> B``; a constant when n = 0."""

    name: str
    arg_sorts: tuple[str, ...]
    result_sort: str

    @property
    def arity(self) -> int:
        return len(self.arg_sorts)

    @property
    def is_constant(self) -> bool:
        return not self.arg_sorts

    @property
    def is_drd(self) -> bool:
        """Domain-range distinct: the result sort differs from every argument sort."""
        return self.arity > 0 and self.result_sort not in self.arg_sorts

    def __str__(self) -> str:
        if self.is_constant:
            return f"{self.name}: {self.result_sort}"
        return f"{self.name}: {' x '.join(self.arg_sorts)} -> {self.result_sort}"


@dataclass(frozen=True)
class PredDecl:
    """A predicate symbol ``R: A1 x ... x An -> Bool`` (n >= 1)."""

    name: str
    arg_sorts: tuple[str, ...]

    @property
    def arity(self) -> int:
        return len(self.arg_sorts)

    def __str__(self) -> str:
        return f"{self.name}: {' x '.join(self.arg_sorts)} -> Bool"


@dataclass(frozen=True)
class Signature:
    """Sorts plus function and predicate declarations, in declaration order.

    Names are unique across all three namespaces.  Every sort referenced by
    a declaration must be among ``sorts``.
    """

    sorts: tuple[str, ...]
    functions: tuple[FuncDecl, ...] = ()
    predicates: tuple[PredDecl, ...] = ()

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for name in (*self.sorts, *(f.name for f in self.functions),
                     *(p.name for p in self.predicates)):
            if name in seen:
                raise LogicError(f"duplicate declaration of '{name}'")
            seen.add(name)
        known = set(self.sorts)
        for f in self.functions:
            for s in (*f.arg_sorts, f.result_sort):
                if s not in known:
                    raise LogicError(f"function {f.name} references unknown sort '{s}'")
        for p in self.predicates:
            if not p.arg_sorts:
                raise LogicError(f"predicate {p.name} must have at least one argument")
            for s in p.arg_sorts:
                if s not in known:
                    raise LogicError(f"predicate {p.name} references unknown sort '{s}'")

    def function(self, name: str) -> FuncDecl | None:
        for f in self.functions:
            if f.name == name:
                return f
        return None

    def predicate(self, name: str) -> PredDecl | None:
        for p in self.predicates:
            if p.name == name:
                return p
        return None

    def constants(self, sort: str | None = None) -> tuple[FuncDecl, ...]:
        """Nullary function symbols, optionally restricted to one result sort."""
        return tuple(f for f in self.functions
                     if f.is_constant and (sort is None or f.result_sort == sort))


@dataclass(frozen=True)
class DomainAssignment:
    """Finite domain sizes per sort; every size is at least 1."""

    sizes: tuple[tuple[str, int], ...]

    def __post_init__(self) -> None:
        seen = set()
        for sort, n in self.sizes:
            if sort in seen:
                raise LogicError(f"duplicate domain size for sort '{sort}'")
            seen.add(sort)
            if n < 1:
                raise LogicError(f"sort '{sort}' must have a nonempty domain, got size {n}")

    @classmethod
    def of(cls, mapping: Mapping[str, int] | None = None, **kw: int) -> DomainAssignment:
        merged = dict(mapping or {})
        merged.update(kw)
        return cls(tuple(merged.items()))

    def size(self, sort: str) -> int:
        for s, n in self.sizes:
            if s == sort:
                return n
        raise KeyError(sort)

    def values(self, sort: str) -> tuple[DomainElement, ...]:
        return tuple(DomainElement(sort, i) for i in range(1, self.size(sort) + 1))

    @property
    def sort_names(self) -> tuple[str, ...]:
        return tuple(s for s, _ in self.sizes)

    def as_dict(self) -> dict[str, int]:
        return dict(self.sizes)


# ---------------------------------------------------------------------------
# Terms and formulas
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str
    sort: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, order=True)
class DomainElement:
    """The canonical k-th value of a sort, written ``Sort!k`` (1-based)."""

    sort: str
    index: int

    def __str__(self) -> str:
        return f"{self.sort}!{self.index}"


@dataclass(frozen=True)
class Apply:
    """Application of a function symbol; a constant is ``Apply(c)``."""

    func: str
    args: tuple[Term, ...] = ()

    def __str__(self) -> str:
        return format_term(self)


Term = Union[Var, DomainElement, Apply]


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class PredApp:
    pred: str
    args: tuple[Term, ...]

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Not:
    body: Formula

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class And:
    left: Formula
    right: Formula

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Or:
    left: Formula
    right: Formula

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Implies:
    left: Formula
    right: Formula

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Iff:
    left: Formula
    right: Formula

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Forall:
    var: str
    sort: str
    body: Formula

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Exists:
    var: str
    sort: str
    body: Formula

    def __str__(self) -> str:
        return format_formula(self)


Formula = Union[Eq, PredApp, Not, And, Or, Implies, Iff, Forall, Exists]

_BINARY = {And: "and", Or: "or", Implies: "=>", Iff: "<=>"}


def and_all(parts: Iterable[Formula]) -> Formula:
    """Right-fold a nonempty sequence into nested conjunctions."""
    items = list(parts)
    if not items:
        raise ValueError("empty conjunction")
    out = items[-1]
    for f in reversed(items[:-1]):
        out = And(f, out)
    return out


def or_all(parts: Iterable[Formula]) -> Formula:
    """Right-fold a nonempty sequence into nested disjunctions."""
    items = list(parts)
    if not items:
        raise ValueError("empty disjunction")
    out = items[-1]
    for f in reversed(items[:-1]):
        out = Or(f, out)
    return out


def format_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, DomainElement):
        return f"{t.sort}!{t.index}"
    if not t.args:
        return t.func
    return f"({t.func} {' '.join(format_term(a) for a in t.args)})"


def _spine(f: Formula, cls: type) -> list[Formula]:
    # Flatten the right spine of a nested and/or chain; re-parsing the
    # n-ary form right-folds back to the identical tree.
    parts = []
    while isinstance(f, cls):
        parts.append(f.left)
        f = f.right
    parts.append(f)
    return parts


def format_formula(f: Formula) -> str:
    if isinstance(f, Eq):
        return f"(= {format_term(f.left)} {format_term(f.right)})"
    if isinstance(f, PredApp):
        if not f.args:
            return f"({f.pred})"
        return f"({f.pred} {' '.join(format_term(a) for a in f.args)})"
    if isinstance(f, Not):
        return f"(not {format_formula(f.body)})"
    if isinstance(f, (And, Or)):
        word = "and" if isinstance(f, And) else "or"
        parts = _spine(f, type(f))
        return f"({word} {' '.join(format_formula(p) for p in parts)})"
    if isinstance(f, Implies):
        return f"(=> {format_formula(f.left)} {format_formula(f.right)})"
    if isinstance(f, Iff):
        return f"(<=> {format_formula(f.left)} {format_formula(f.right)})"
    if isinstance(f, (Forall, Exists)):
        word = "forall" if isinstance(f, Forall) else "exists"
        binders = [(f.var, f.sort)]
        body = f.body
        while isinstance(body, type(f)):
            binders.append((body.var, body.sort))
            body = body.body
        bs = " ".join(f"({v} {s})" for v, s in binders)
        return f"({word} ({bs}) {format_formula(body)})"
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Problems
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Problem:
    """A many-sorted finite model finding problem (signature, formulas, domains)."""

    signature: Signature
    domains: DomainAssignment
    formulas: tuple[Formula, ...] = ()

    def __post_init__(self) -> None:
        if set(self.domains.sort_names) != set(self.signature.sorts):
            raise LogicError("domain assignment must cover exactly the signature's sorts")

    def size(self, sort: str) -> int:
        return self.domains.size(sort)

    def domain(self, sort: str) -> tuple[DomainElement, ...]:
        return self.domains.values(sort)

    @property
    def is_pure(self) -> bool:
        return not any(domain_elements_in(f) for f in self.formulas)

    def with_formulas(self, extra: Iterable[Formula]) -> Problem:
        """The same problem with formulas appended (an extended problem)."""
        return Problem(self.signature, self.domains, self.formulas + tuple(extra))


# ---------------------------------------------------------------------------
# Interpretations
# ---------------------------------------------------------------------------


def _lex_cells(decl_sorts: tuple[str, ...], domains: DomainAssignment
               ) -> Iterator[tuple[DomainElement, ...]]:
    yield from itertools.product(*(domains.values(s) for s in decl_sorts))


@dataclass(frozen=True)
class Interpretation:
    """Total function tables and predicate tuple sets over canonical domains.

    Direct construction is trusted (hot paths build thousands of these);
    :meth:`build` validates totality and sorts and is the right entry point
    for hand-written tables.
    """

    signature: Signature
    domains: DomainAssignment
    functions: dict[str, dict[tuple[DomainElement, ...], DomainElement]]
    predicates: dict[str, frozenset[tuple[DomainElement, ...]]]

    def validate(self) -> None:
        for f in self.signature.functions:
            table = self.functions.get(f.name)
            if table is None:
                raise LogicError(f"interpretation missing function '{f.name}'")
            cells = set(_lex_cells(f.arg_sorts, self.domains))
            if set(table) != cells:
                raise LogicError(f"table for '{f.name}' is not total over its cells")
            for args, res in table.items():
                if res.sort != f.result_sort or not 1 <= res.index <= self.domains.size(res.sort):
                    raise LogicError(f"value {res} out of range for '{f.name}'")
        for p in self.signature.predicates:
            tuples = self.predicates.get(p.name)
            if tuples is None:
                raise LogicError(f"interpretation missing predicate '{p.name}'")
            cells = set(_lex_cells(p.arg_sorts, self.domains))
            if not set(tuples) <= cells:
                raise LogicError(f"tuple set for '{p.name}' contains out-of-domain tuples")
        if set(self.functions) != {f.name for f in self.signature.functions}:
            raise LogicError("interpretation assigns undeclared function symbols")
        if set(self.predicates) != {p.name for p in self.signature.predicates}:
            raise LogicError("interpretation assigns undeclared predicate symbols")

    @classmethod
    def build(cls, signature: Signature, domains: DomainAssignment,
              functions: Mapping[str, object] | None = None,
              predicates: Mapping[str, Iterable] | None = None) -> Interpretation:
        """Convenience constructor.

        Constants may be given as a bare value instead of a one-cell table,
        unary predicate tuples as bare values instead of 1-tuples.
        """
        funcs: dict[str, dict[tuple[DomainElement, ...], DomainElement]] = {}
        for name, table in (functions or {}).items():
            if isinstance(table, DomainElement):
                funcs[name] = {(): table}
            else:
                funcs[name] = dict(table)  # type: ignore[arg-type]
        preds: dict[str, frozenset[tuple[DomainElement, ...]]] = {}
        for name, tuples in (predicates or {}).items():
            fixed = []
            for t in tuples:
                fixed.append((t,) if isinstance(t, DomainElement) else tuple(t))
            preds[name] = frozenset(fixed)
        out = cls(signature, domains, funcs, preds)
        out.validate()
        return out

    def value_of(self, func: str, args: tuple[DomainElement, ...]) -> DomainElement:
        return self.functions[func][args]

    def holds(self, pred: str, args: tuple[DomainElement, ...]) -> bool:
        return args in self.predicates[pred]

    def domain_values(self, sort: str) -> tuple[DomainElement, ...]:
        return self.domains.values(sort)

    def key(self) -> tuple:
        """A canonical hashable encoding: result indices for every function
        cell in lexicographic argument order, then membership booleans for
        every predicate cell, symbols in declaration order."""
        out: list[int | bool] = []
        for f in self.signature.functions:
            for cell in _lex_cells(f.arg_sorts, self.domains):
                out.append(self.functions[f.name][cell].index)
        for p in self.signature.predicates:
            for cell in _lex_cells(p.arg_sorts, self.domains):
                out.append(cell in self.predicates[p.name])
        return tuple(out)


# ---------------------------------------------------------------------------
# Well-sortedness
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SortError:
    """One well-sortedness violation, naming the offending subterm."""

    where: str
    message: str

    def __str__(self) -> str:
        return f"{self.message} (in {self.where})"


def check_well_sorted(problem: Problem) -> list[SortError]:
    """All sort errors in the problem's formulas; empty iff every formula is
    well-sorted and closed."""
    sig = problem.signature
    errors: list[SortError] = []

    def term_sort(t: Term, env: dict[str, str]) -> str | None:
        if isinstance(t, Var):
            bound = env.get(t.name)
            if bound is None:
                errors.append(SortError(format_term(t), f"free variable '{t.name}'"))
                return None
            if bound != t.sort:
                errors.append(SortError(
                    format_term(t),
                    f"variable '{t.name}' annotated {t.sort} but bound at sort {bound}"))
                return None
            return bound
        if isinstance(t, DomainElement):
            if t.sort not in sig.sorts:
                errors.append(SortError(format_term(t), f"unknown sort '{t.sort}'"))
                return None
            if not 1 <= t.index <= problem.size(t.sort):
                errors.append(SortError(
                    format_term(t),
                    f"index {t.index} out of range for sort {t.sort} "
                    f"of size {problem.size(t.sort)}"))
                return None
            return t.sort
        decl = sig.function(t.func)
        if decl is None:
            errors.append(SortError(format_term(t), f"undeclared function '{t.func}'"))
            return None
        if len(t.args) != decl.arity:
            errors.append(SortError(
                format_term(t),
                f"'{t.func}' expects {decl.arity} argument(s), got {len(t.args)}"))
            return None
        for i, (arg, want) in enumerate(zip(t.args, decl.arg_sorts), start=1):
            got = term_sort(arg, env)
            if got is not None and got != want:
                errors.append(SortError(
                    format_term(arg),
                    f"argument {i} of '{t.func}' has sort {got}, expected {want}"))
        return decl.result_sort

    def check(f: Formula, env: dict[str, str]) -> None:
        if isinstance(f, Eq):
            ls = term_sort(f.left, env)
            rs = term_sort(f.right, env)
            if ls is not None and rs is not None and ls != rs:
                errors.append(SortError(
                    format_formula(f), f"equality over unequal sorts {ls} and {rs}"))
        elif isinstance(f, PredApp):
            decl = sig.predicate(f.pred)
            if decl is None:
                errors.append(SortError(format_formula(f), f"undeclared predicate '{f.pred}'"))
                return
            if len(f.args) != decl.arity:
                errors.append(SortError(
                    format_formula(f),
                    f"'{f.pred}' expects {decl.arity} argument(s), got {len(f.args)}"))
                return
            for i, (arg, want) in enumerate(zip(f.args, decl.arg_sorts), start=1):
                got = term_sort(arg, env)
                if got is not None and got != want:
                    errors.append(SortError(
                        format_term(arg),
                        f"argument {i} of '{f.pred}' has sort {got}, expected {want}"))
        elif isinstance(f, Not):
            check(f.body, env)
        elif isinstance(f, (And, Or, Implies, Iff)):
            check(f.left, env)
            check(f.right, env)
        elif isinstance(f, (Forall, Exists)):
            if f.sort not in sig.sorts:
                errors.append(SortError(format_formula(f), f"unknown sort '{f.sort}'"))
                return
            check(f.body, {**env, f.var: f.sort})
        else:
            raise TypeError(f"not a formula: {f!r}")

    for formula in problem.formulas:
        check(formula, {})
    return errors


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def evaluate(formula: Formula, interp: Interpretation,
             env: Mapping[str, DomainElement] | None = None) -> bool:
    """Standard MSFOL truth value of a well-sorted formula under a total
    interpretation.  Quantifiers range over the canonical domain of their
    sort; domain elements evaluate to themselves."""
    env = dict(env or {})

    def term(t: Term, env: dict[str, DomainElement]) -> DomainElement:
        if isinstance(t, Var):
            try:
                return env[t.name]
            except KeyError:
                raise LogicError(f"unbound variable '{t.name}'") from None
        if isinstance(t, DomainElement):
            return t
        return interp.value_of(t.func, tuple(term(a, env) for a in t.args))

    def go(f: Formula, env: dict[str, DomainElement]) -> bool:
        if isinstance(f, Eq):
            return term(f.left, env) == term(f.right, env)
        if isinstance(f, PredApp):
            return interp.holds(f.pred, tuple(term(a, env) for a in f.args))
        if isinstance(f, Not):
            return not go(f.body, env)
        if isinstance(f, And):
            return go(f.left, env) and go(f.right, env)
        if isinstance(f, Or):
            return go(f.left, env) or go(f.right, env)
        if isinstance(f, Implies):
            return (not go(f.left, env)) or go(f.right, env)
        if isinstance(f, Iff):
            return go(f.left, env) == go(f.right, env)
        if isinstance(f, Forall):
            return all(go(f.body, {**env, f.var: v})
                       for v in interp.domain_values(f.sort))
        if isinstance(f, Exists):
            return any(go(f.body, {**env, f.var: v})
                       for v in interp.domain_values(f.sort))
        raise TypeError(f"not a formula: {f!r}")

    return go(formula, env)


def satisfies(problem: Problem, interp: Interpretation) -> bool:
    """True iff the interpretation satisfies every formula of the problem."""
    if interp.signature != problem.signature or interp.domains != problem.domains:
        raise LogicError("interpretation shape does not match the problem")
    return all(evaluate(f, interp) for f in problem.formulas)


def evaluate_partial(formula: Formula, fget, pget, domains: DomainAssignment,
                     env: Mapping[str, DomainElement] | None = None) -> bool | None:
    """Kleene three-valued evaluation under a partial cell assignment.

    ``fget(name, args)`` returns the function value or None when the cell is
    unassigned; ``pget(name, args)`` likewise returns a bool or None.  The
    result is monotone in information: a True/False verdict under a partial
    assignment holds for every completion, which makes search pruning and
    early clause resolution sound.
    """

    def term(t: Term, env) -> DomainElement | None:
        if isinstance(t, Var):
            return env[t.name]
        if isinstance(t, DomainElement):
            return t
        args = []
        for a in t.args:
            v = term(a, env)
            if v is None:
                return None
            args.append(v)
        return fget(t.func, tuple(args))

    def go(f: Formula, env) -> bool | None:
        if isinstance(f, Eq):
            l, r = term(f.left, env), term(f.right, env)
            if l is None or r is None:
                return None
            return l == r
        if isinstance(f, PredApp):
            args = []
            for a in f.args:
                v = term(a, env)
                if v is None:
                    return None
                args.append(v)
            return pget(f.pred, tuple(args))
        if isinstance(f, Not):
            v = go(f.body, env)
            return None if v is None else not v
        if isinstance(f, And):
            l = go(f.left, env)
            if l is False:
                return False
            r = go(f.right, env)
            if r is False:
                return False
            return True if (l is True and r is True) else None
        if isinstance(f, Or):
            l = go(f.left, env)
            if l is True:
                return True
            r = go(f.right, env)
            if r is True:
                return True
            return False if (l is False and r is False) else None
        if isinstance(f, Implies):
            l = go(f.left, env)
            if l is False:
                return True
            r = go(f.right, env)
            if r is True:
                return True
            return False if (l is True and r is False) else None
        if isinstance(f, Iff):
            l = go(f.left, env)
            r = go(f.right, env)
            if l is None or r is None:
                return None
            return l == r
        if isinstance(f, (Forall, Exists)):
            want_all = isinstance(f, Forall)
            saw_unknown = False
            for v in domains.values(f.sort):
                got = go(f.body, {**env, f.var: v})
                if got is None:
                    saw_unknown = True
                elif got is not want_all:
                    return not want_all
            return None if saw_unknown else want_all
        raise TypeError(f"not a formula: {f!r}")

    return go(formula, dict(env or {}))


# ---------------------------------------------------------------------------
# Occurring values, free variables, grounding
# ---------------------------------------------------------------------------


def domain_elements_in(obj: Formula | Term | Iterable) -> set[DomainElement]:
    """All domain elements syntactically occurring in a formula, term, or
    iterable of either."""
    out: set[DomainElement] = set()

    def walk(x) -> None:
        if isinstance(x, DomainElement):
            out.add(x)
        elif isinstance(x, Var):
            pass
        elif isinstance(x, Apply):
            for a in x.args:
                walk(a)
        elif isinstance(x, Eq):
            walk(x.left)
            walk(x.right)
        elif isinstance(x, PredApp):
            for a in x.args:
                walk(a)
        elif isinstance(x, Not):
            walk(x.body)
        elif isinstance(x, (And, Or, Implies, Iff)):
            walk(x.left)
            walk(x.right)
        elif isinstance(x, (Forall, Exists)):
            walk(x.body)
        else:
            for item in x:
                walk(item)

    walk(obj)
    return out


def collect_occurring_values(problem: Problem) -> dict[str, frozenset[DomainElement]]:
    """Domain elements syntactically present in the formulas, grouped by
    sort; every sort of the signature gets an entry (possibly empty)."""
    found = domain_elements_in(problem.formulas)
    return {s: frozenset(v for v in found if v.sort == s) for s in problem.signature.sorts}


def symbols_in(formula: Formula) -> set[str]:
    """Names of all function and predicate symbols occurring in a formula."""
    out: set[str] = set()

    def walk_term(t: Term) -> None:
        if isinstance(t, Apply):
            out.add(t.func)
            for a in t.args:
                walk_term(a)

    def walk(f: Formula) -> None:
        if isinstance(f, Eq):
            walk_term(f.left)
            walk_term(f.right)
        elif isinstance(f, PredApp):
            out.add(f.pred)
            for a in f.args:
                walk_term(a)
        elif isinstance(f, Not):
            walk(f.body)
        elif isinstance(f, (And, Or, Implies, Iff)):
            walk(f.left)
            walk(f.right)
        elif isinstance(f, (Forall, Exists)):
            walk(f.body)
        else:
            raise TypeError(f"not a formula: {f!r}")

    walk(formula)
    return out


def map_domain_elements(formula: Formula, fn) -> Formula:
    """Rewrite every domain element occurrence through ``fn``; the formula
    structure is otherwise unchanged."""

    def sub_term(t: Term) -> Term:
        if isinstance(t, DomainElement):
            return fn(t)
        if isinstance(t, Apply):
            return Apply(t.func, tuple(sub_term(a) for a in t.args))
        return t

    def go(f: Formula) -> Formula:
        if isinstance(f, Eq):
            return Eq(sub_term(f.left), sub_term(f.right))
        if isinstance(f, PredApp):
            return PredApp(f.pred, tuple(sub_term(a) for a in f.args))
        if isinstance(f, Not):
            return Not(go(f.body))
        if isinstance(f, (And, Or, Implies, Iff)):
            return type(f)(go(f.left), go(f.right))
        if isinstance(f, (Forall, Exists)):
            return type(f)(f.var, f.sort, go(f.body))
        raise TypeError(f"not a formula: {f!r}")

    return go(formula)


def free_vars(formula: Formula) -> set[str]:
    if isinstance(formula, Eq):
        return _term_vars(formula.left) | _term_vars(formula.right)
    if isinstance(formula, PredApp):
        out: set[str] = set()
        for a in formula.args:
            out |= _term_vars(a)
        return out
    if isinstance(formula, Not):
        return free_vars(formula.body)
    if isinstance(formula, (And, Or, Implies, Iff)):
        return free_vars(formula.left) | free_vars(formula.right)
    if isinstance(formula, (Forall, Exists)):
        return free_vars(formula.body) - {formula.var}
    raise TypeError(f"not a formula: {formula!r}")


def _term_vars(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, Apply):
        out: set[str] = set()
        for a in t.args:
            out |= _term_vars(a)
        return out
    return set()


def substitute(formula: Formula, var: str, value: DomainElement) -> Formula:
    """Replace free occurrences of a variable by a domain element.  Inner
    bindings of the same name shadow, so no substitution happens below them."""

    def sub_term(t: Term) -> Term:
        if isinstance(t, Var):
            return value if t.name == var else t
        if isinstance(t, Apply):
            return Apply(t.func, tuple(sub_term(a) for a in t.args))
        return t

    def go(f: Formula) -> Formula:
        if isinstance(f, Eq):
            return Eq(sub_term(f.left), sub_term(f.right))
        if isinstance(f, PredApp):
            return PredApp(f.pred, tuple(sub_term(a) for a in f.args))
        if isinstance(f, Not):
            return Not(go(f.body))
        if isinstance(f, (And, Or, Implies, Iff)):
            return type(f)(go(f.left), go(f.right))
        if isinstance(f, (Forall, Exists)):
            if f.var == var:
                return f
            return type(f)(f.var, f.sort, go(f.body))
        raise TypeError(f"not a formula: {f!r}")

    return go(formula)


def ground_formula(formula: Formula, domains: DomainAssignment) -> Formula:
    """Expand every quantifier into the finite conjunction or disjunction
    over its sort's canonical values (ascending)."""
    if isinstance(formula, (Eq, PredApp)):
        return formula
    if isinstance(formula, Not):
        return Not(ground_formula(formula.body, domains))
    if isinstance(formula, (And, Or, Implies, Iff)):
        return type(formula)(ground_formula(formula.left, domains),
                             ground_formula(formula.right, domains))
    if isinstance(formula, (Forall, Exists)):
        fold = and_all if isinstance(formula, Forall) else or_all
        inner = ground_formula(formula.body, domains)
        return fold([substitute(inner, formula.var, v)
                     for v in domains.values(formula.sort)])
    raise TypeError(f"not a formula: {formula!r}")


def ground_problem(problem: Problem, max_atoms: int = 10 ** 6) -> Problem:
    """Quantifier-free, satisfiability-equivalent version of the problem.

    ``max_atoms`` guards against blow-up: the product of domain sizes along
    nested quantifiers is bounded before any expansion happens.
    """
    def quant_cost(f: Formula) -> int:
        if isinstance(f, (Eq, PredApp)):
            return 1
        if isinstance(f, Not):
            return quant_cost(f.body)
        if isinstance(f, (And, Or, Implies, Iff)):
            return quant_cost(f.left) + quant_cost(f.right)
        if isinstance(f, (Forall, Exists)):
            return problem.size(f.sort) * quant_cost(f.body)
        raise TypeError(f"not a formula: {f!r}")

    total = sum(quant_cost(f) for f in problem.formulas)
    if total > max_atoms:
        raise LogicError(f"grounding would produce {total} atoms (limit {max_atoms})")
    return Problem(problem.signature, problem.domains,
                   tuple(ground_formula(f, problem.domains) for f in problem.formulas))
