"""Most-general sorting of a problem, with a checkable witness.

Sort inference splits each sort into as many fresh sorts as the formulas
permit, in the Hindley-Milner style: every declared argument/result
position and every quantified variable binding is a "sort slot", the
formulas impose equalities between slots (equality atoms unify their
operand slots, applications unify actual arguments with declared
positions, variable uses unify with their binder), and each final
union-find class becomes one sort.  Split sorts inherit the original
sort's domain size, so any interpretation of one problem transports to
the other and satisfiability is preserved.

A domain element occurring as a term pins nothing beyond its slot: it is
re-indexed into whatever split sort its context forces, which is legal
because sizes are inherited.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .logic import (And, Apply, DomainAssignment, DomainElement, Eq, Exists,
                    Forall, Formula, FuncDecl, Iff, Implies, LogicError, Not,
                    Or, PredApp, PredDecl, Problem, Signature, Term, Var,
                    check_well_sorted)


@dataclass(frozen=True)
class SortSubstitution:
    """A finite map from sort symbols to sort symbols, applied as one
    simultaneous substitution (never iterated)."""

    mapping: tuple[tuple[str, str], ...]

    def __post_init__(self) -> None:
        keys = [k for k, _ in self.mapping]
        if len(keys) != len(set(keys)):
            raise LogicError("substitution keys must be distinct")

    @classmethod
    def of(cls, mapping: Mapping[str, str]) -> SortSubstitution:
        return cls(tuple(sorted(mapping.items())))

    def target(self, sort: str) -> str:
        for k, v in self.mapping:
            if k == sort:
                return v
        return sort

    def as_dict(self) -> dict[str, str]:
        return dict(self.mapping)

    @property
    def is_identity(self) -> bool:
        return all(k == v for k, v in self.mapping)


def _resort_term(t: Term, fn) -> Term:
    if isinstance(t, Var):
        return Var(t.name, fn(t.sort))
    if isinstance(t, DomainElement):
        return DomainElement(fn(t.sort), t.index)
    return Apply(t.func, tuple(_resort_term(a, fn) for a in t.args))


def _resort_formula(f: Formula, fn) -> Formula:
    if isinstance(f, Eq):
        return Eq(_resort_term(f.left, fn), _resort_term(f.right, fn))
    if isinstance(f, PredApp):
        return PredApp(f.pred, tuple(_resort_term(a, fn) for a in f.args))
    if isinstance(f, Not):
        return Not(_resort_formula(f.body, fn))
    if isinstance(f, (And, Or, Implies, Iff)):
        return type(f)(_resort_formula(f.left, fn), _resort_formula(f.right, fn))
    if isinstance(f, (Forall, Exists)):
        return type(f)(f.var, fn(f.sort), _resort_formula(f.body, fn))
    raise TypeError(f"not a formula: {f!r}")


def apply_substitution(eta: SortSubstitution, problem: Problem) -> Problem:
    """Rewrite every sort occurrence through the substitution.  Domain
    sizes follow the target sorts; merging sorts of different sizes is a
    size conflict."""
    sig = problem.signature
    new_sorts: list[str] = []
    sizes: dict[str, int] = {}
    for s in sig.sorts:
        t = eta.target(s)
        if t not in new_sorts:
            new_sorts.append(t)
        n = problem.size(s)
        if t in sizes and sizes[t] != n:
            raise LogicError(f"target sort size conflict for '{t}': "
                             f"{sizes[t]} vs {n}")
        sizes[t] = n
    functions = tuple(
        FuncDecl(f.name, tuple(eta.target(s) for s in f.arg_sorts),
                 eta.target(f.result_sort))
        for f in sig.functions)
    predicates = tuple(
        PredDecl(p.name, tuple(eta.target(s) for s in p.arg_sorts))
        for p in sig.predicates)
    formulas = tuple(_resort_formula(f, eta.target) for f in problem.formulas)
    result = Problem(Signature(tuple(new_sorts), functions, predicates),
                     DomainAssignment.of(sizes), formulas)
    errors = check_well_sorted(result)
    if errors:
        raise LogicError(f"substitution produces an ill-sorted problem: {errors[0]}")
    return result


@dataclass(frozen=True)
class GeneralizationWitness:
    """A most-general resorting: the generalized problem, the substitution
    mapping its sorts back onto the original's, and the per-sort splits."""

    generalized: Problem
    substitution: SortSubstitution
    splits: tuple[tuple[str, tuple[str, ...]], ...]

    def split_of(self, sort: str) -> tuple[str, ...]:
        for s, names in self.splits:
            if s == sort:
                return names
        raise KeyError(sort)

    @property
    def is_identity(self) -> bool:
        return not self.substitution.mapping


class _UnionFind:
    def __init__(self) -> None:
        self.parent: dict = {}

    def add(self, x) -> None:
        self.parent.setdefault(x, x)

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def infer_sorts(problem: Problem) -> GeneralizationWitness:
    """Compute the most-general resorting of a well-sorted problem.

    No further split is possible without breaking well-sortedness, and
    re-running inference on the generalized problem is the identity.
    """
    errors = check_well_sorted(problem)
    if errors:
        raise LogicError(f"cannot infer sorts of an ill-sorted problem: {errors[0]}")

    sig = problem.signature
    uf = _UnionFind()
    orig_sort: dict = {}
    slot_order: list = []

    def add_slot(key, sort: str) -> None:
        uf.add(key)
        orig_sort[key] = sort
        slot_order.append(key)

    for f in sig.functions:
        for i, s in enumerate(f.arg_sorts):
            add_slot(("fa", f.name, i), s)
        add_slot(("fr", f.name), f.result_sort)
    for p in sig.predicates:
        for i, s in enumerate(p.arg_sorts):
            add_slot(("pa", p.name, i), s)

    def unify(a, b) -> None:
        if orig_sort[uf.find(a)] != orig_sort[uf.find(b)]:
            raise LogicError("unification across distinct sorts; problem is ill-sorted")
        uf.union(a, b)

    counters = {"b": 0, "e": 0}

    def fresh(kind: str, sort: str):
        key = (kind, counters[kind])
        counters[kind] += 1
        add_slot(key, sort)
        return key

    def term_slot(t: Term, env: dict):
        if isinstance(t, Var):
            return env[t.name]
        if isinstance(t, DomainElement):
            return fresh("e", t.sort)
        for i, a in enumerate(t.args):
            unify(term_slot(a, env), ("fa", t.func, i))
        return ("fr", t.func)

    def walk(f: Formula, env: dict) -> None:
        if isinstance(f, Eq):
            unify(term_slot(f.left, env), term_slot(f.right, env))
        elif isinstance(f, PredApp):
            for i, a in enumerate(f.args):
                unify(term_slot(a, env), ("pa", f.pred, i))
        elif isinstance(f, Not):
            walk(f.body, env)
        elif isinstance(f, (And, Or, Implies, Iff)):
            walk(f.left, env)
            walk(f.right, env)
        elif isinstance(f, (Forall, Exists)):
            slot = fresh("b", f.sort)
            walk(f.body, {**env, f.var: slot})
        else:
            raise TypeError(f"not a formula: {f!r}")

    for formula in problem.formulas:
        walk(formula, {})

    # Name one fresh sort per class, in first-use order over slot creation.
    # A sort with a single class (or no slots at all) keeps its name.
    classes_of: dict[str, list] = {s: [] for s in sig.sorts}
    for key in slot_order:
        root = uf.find(key)
        sort = orig_sort[root]
        if root not in classes_of[sort]:
            classes_of[sort].append(root)

    taken = set(sig.sorts)
    class_name: dict = {}
    splits: list[tuple[str, tuple[str, ...]]] = []
    for sort in sig.sorts:
        roots = classes_of[sort]
        if len(roots) <= 1:
            names = (sort,)
            if roots:
                class_name[roots[0]] = sort
        else:
            names_list = []
            suffix = 1
            for root in roots:
                name = f"{sort}_{suffix}"
                while name in taken:
                    suffix += 1
                    name = f"{sort}_{suffix}"
                taken.add(name)
                suffix += 1
                class_name[root] = name
                names_list.append(name)
            names = tuple(names_list)
        splits.append((sort, names))

    def slot_sort(key) -> str:
        return class_name[uf.find(key)]

    new_sorts = tuple(name for _, names in splits for name in names)
    sizes = {name: problem.size(sort) for sort, names in splits for name in names}
    functions = tuple(
        FuncDecl(f.name,
                 tuple(slot_sort(("fa", f.name, i)) for i in range(f.arity)),
                 slot_sort(("fr", f.name)))
        for f in sig.functions)
    predicates = tuple(
        PredDecl(p.name,
                 tuple(slot_sort(("pa", p.name, i)) for i in range(p.arity)))
        for p in sig.predicates)

    # Second pass rebuilds formulas; the counters revisit binder and element
    # slots in the same traversal order as the first pass.
    counters2 = {"b": 0, "e": 0}

    def next_slot(kind: str):
        key = (kind, counters2[kind])
        counters2[kind] += 1
        return key

    def rebuild_term(t: Term, env: dict) -> Term:
        if isinstance(t, Var):
            return Var(t.name, env[t.name])
        if isinstance(t, DomainElement):
            return DomainElement(slot_sort(next_slot("e")), t.index)
        return Apply(t.func, tuple(rebuild_term(a, env) for a in t.args))

    def rebuild(f: Formula, env: dict) -> Formula:
        if isinstance(f, Eq):
            return Eq(rebuild_term(f.left, env), rebuild_term(f.right, env))
        if isinstance(f, PredApp):
            return PredApp(f.pred, tuple(rebuild_term(a, env) for a in f.args))
        if isinstance(f, Not):
            return Not(rebuild(f.body, env))
        if isinstance(f, (And, Or, Implies, Iff)):
            left = rebuild(f.left, env)
            return type(f)(left, rebuild(f.right, env))
        if isinstance(f, (Forall, Exists)):
            new_sort = slot_sort(next_slot("b"))
            return type(f)(f.var, new_sort, rebuild(f.body, {**env, f.var: new_sort}))
        raise TypeError(f"not a formula: {f!r}")

    formulas = tuple(rebuild(f, {}) for f in problem.formulas)
    generalized = Problem(Signature(new_sorts, functions, predicates),
                          DomainAssignment.of(sizes), formulas)
    eta = SortSubstitution.of({name: sort for sort, names in splits
                               for name in names if name != sort})
    return GeneralizationWitness(generalized, eta, tuple(splits))


def verify_witness(original: Problem, witness: GeneralizationWitness
                   ) -> tuple[bool, list[str]]:
    """Check a witness independently of how it was produced: applying the
    substitution to the generalized problem must reproduce the original,
    and every split sort must inherit its original's domain size."""
    diagnostics: list[str] = []
    try:
        recovered = apply_substitution(witness.substitution, witness.generalized)
    except LogicError as e:
        return False, [str(e)]
    if recovered.signature != original.signature:
        diagnostics.append("substituted signature differs from the original")
    if recovered.formulas != original.formulas:
        diagnostics.append("substituted formulas differ from the original")
    if recovered.domains != original.domains:
        diagnostics.append("substituted domain sizes differ from the original")
    if {s for s, _ in witness.splits} != set(original.signature.sorts):
        diagnostics.append("splits do not cover the original sorts")
    for sort, names in witness.splits:
        for name in names:
            mapped = witness.substitution.target(name)
            if mapped != sort:
                diagnostics.append(f"split sort {name} maps to {mapped}, not {sort}")
            try:
                if witness.generalized.size(name) != original.size(sort):
                    diagnostics.append(f"split sort {name} does not inherit "
                                       f"the size of {sort}")
            except KeyError:
                diagnostics.append(f"split sort {name} missing from the "
                                   f"generalized problem")
    return not diagnostics, diagnostics
