"""Constraint-satisfaction view of finite model finding.

Two embeddings are provided.  The *flat* CSP makes every function cell
and relation cell a variable (forgetting that functions exist); the
*functional* CSP makes every symbol a variable whose values are whole
function tables or relations, so complete assignments are exactly
interpretations.  Function tables are canonically encoded as result-index
vectors in lexicographic cell order and relations as boolean vectors, so
table equality and permutation images are exact.

On top of the CSP model: brute-force solution enumeration, the
microstructure complement hypergraph, solution- and constraint-symmetry
checks for binding permutations, and the functional extension that turns
a domain permutation into a binding permutation of the functional CSP.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Mapping

from .logic import (DomainElement, Formula, Interpretation, LogicError,
                    Problem, evaluate_partial, symbols_in)
from .oracle import CapExceeded, DEFAULT_CAP, DomainPermutation

Binding = tuple  # (variable, value)


@dataclass(frozen=True)
class Constraint:
    """A scope plus either an explicit allowed-tuple relation or an
    intensional predicate over scope assignments."""

    scope: tuple[Hashable, ...]
    allowed: frozenset[tuple] | None = None
    predicate: Callable[[tuple], bool] | None = None
    label: str = ""

    def __post_init__(self) -> None:
        if (self.allowed is None) == (self.predicate is None):
            raise LogicError("constraint needs exactly one of allowed/predicate")

    def permits(self, values: tuple) -> bool:
        if self.allowed is not None:
            return values in self.allowed
        return bool(self.predicate(values))


@dataclass(frozen=True)
class Csp:
    """A finite constraint satisfaction problem (variables, domains,
    constraints)."""

    variables: tuple[Hashable, ...]
    domains: dict[Hashable, tuple]
    constraints: tuple[Constraint, ...]

    def __post_init__(self) -> None:
        for c in self.constraints:
            for v in c.scope:
                if v not in self.domains:
                    raise LogicError(f"constraint scope names unknown variable {v!r}")
        if set(self.variables) != set(self.domains):
            raise LogicError("domains must cover exactly the variables")

    def bindings(self) -> list[Binding]:
        return [(x, v) for x in self.variables for v in self.domains[x]]

    def assignment_space(self) -> int:
        out = 1
        for x in self.variables:
            out *= len(self.domains[x])
        return out


def csp_solutions(csp: Csp, cap: int = DEFAULT_CAP) -> list[frozenset]:
    """All satisfying complete assignments (as binding sets), in the
    deterministic product order of the variable domains."""
    if csp.assignment_space() > cap:
        raise CapExceeded(csp.assignment_space(), cap)
    out = []
    for combo in itertools.product(*(csp.domains[x] for x in csp.variables)):
        assignment = dict(zip(csp.variables, combo))
        if all(c.permits(tuple(assignment[y] for y in c.scope))
               for c in csp.constraints):
            out.append(frozenset(assignment.items()))
    return out


def is_complete_assignment(csp: Csp, bindings: frozenset) -> bool:
    seen = [x for x, _ in bindings]
    return (len(seen) == len(set(seen)) == len(csp.variables)
            and all((x, v) in set(csp.bindings()) for x, v in bindings))


def satisfies_csp(csp: Csp, bindings: frozenset) -> bool:
    """Whether a binding set is a solution: a complete assignment meeting
    every constraint."""
    if not is_complete_assignment(csp, bindings):
        return False
    assignment = dict(bindings)
    return all(c.permits(tuple(assignment[y] for y in c.scope))
               for c in csp.constraints)


# ---------------------------------------------------------------------------
# Microstructure complement
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MicrostructureComplement:
    """Hypergraph on bindings whose size-|X| independent sets are exactly
    the solutions: one consistency edge per variable and distinct value
    pair, and one constraint edge per disallowed scope assignment."""

    vertices: tuple[Binding, ...]
    consistency_edges: frozenset[frozenset]
    constraint_edges: tuple[frozenset[frozenset], ...]

    @property
    def edges(self) -> frozenset[frozenset]:
        out = set(self.consistency_edges)
        for group in self.constraint_edges:
            out |= group
        return frozenset(out)


def microstructure_complement(csp: Csp, cap: int = DEFAULT_CAP
                              ) -> MicrostructureComplement:
    """Expand every constraint over its scope's assignment space; the
    expansion cost is guarded by the cap."""
    cost = 0
    for c in csp.constraints:
        scope_vars = list(dict.fromkeys(c.scope))
        prod = 1
        for x in scope_vars:
            prod *= len(csp.domains[x])
        cost += prod
    if cost > cap:
        raise CapExceeded(cost, cap)

    consistency = set()
    for x in csp.variables:
        for a, b in itertools.combinations(csp.domains[x], 2):
            consistency.add(frozenset({(x, a), (x, b)}))
    groups = []
    for c in csp.constraints:
        scope_vars = list(dict.fromkeys(c.scope))
        edges = set()
        for combo in itertools.product(*(csp.domains[x] for x in scope_vars)):
            assignment = dict(zip(scope_vars, combo))
            if not c.permits(tuple(assignment[y] for y in c.scope)):
                edges.add(frozenset(assignment.items()))
        groups.append(frozenset(edges))
    return MicrostructureComplement(tuple(csp.bindings()), frozenset(consistency),
                                    tuple(groups))


def is_independent_set(ms: MicrostructureComplement,
                       bindings: Iterable[Binding]) -> bool:
    chosen = set(bindings)
    return not any(edge <= chosen for edge in ms.edges)


# ---------------------------------------------------------------------------
# Binding permutations and symmetry checks
# ---------------------------------------------------------------------------


def _check_binding_permutation(csp: Csp, perm: Mapping[Binding, Binding]) -> None:
    bindings = set(csp.bindings())
    if set(perm) != bindings or set(perm.values()) != bindings:
        raise LogicError("not a bijection on the bindings of this CSP")


def is_solution_symmetry(csp: Csp, perm: Mapping[Binding, Binding],
                         cap: int = DEFAULT_CAP) -> bool:
    """True iff the pointwise image of every solution is a solution."""
    _check_binding_permutation(csp, perm)
    solutions = csp_solutions(csp, cap)
    pool = set(solutions)
    return all(frozenset(perm[b] for b in sol) in pool for sol in solutions)


def is_constraint_symmetry(csp: Csp, perm: Mapping[Binding, Binding],
                           binding_cap: int = 12,
                           cap: int = DEFAULT_CAP) -> bool:
    """True iff the permutation is an automorphism of the microstructure
    complement (edges map onto edges setwise, hence non-edges onto
    non-edges).  Exponential in the binding count, so guarded."""
    _check_binding_permutation(csp, perm)
    if len(csp.bindings()) > binding_cap:
        raise CapExceeded(len(csp.bindings()), binding_cap)
    edges = microstructure_complement(csp, cap).edges
    image = {frozenset(perm[b] for b in edge) for edge in edges}
    return image == edges


# ---------------------------------------------------------------------------
# Flat and functional CSPs of a problem
# ---------------------------------------------------------------------------


def _cells(problem: Problem, arg_sorts: tuple[str, ...]):
    return itertools.product(*(problem.domain(s) for s in arg_sorts))


def flat_csp(problem: Problem) -> Csp:
    """One variable per function/relation cell; each formula becomes one
    intensional constraint whose scope is every cell of every symbol
    occurring in it."""
    variables: list = []
    domains: dict = {}
    for f in problem.signature.functions:
        for cell in _cells(problem, f.arg_sorts):
            var = (f.name, cell)
            variables.append(var)
            domains[var] = problem.domain(f.result_sort)
    for p in problem.signature.predicates:
        for cell in _cells(problem, p.arg_sorts):
            var = (p.name, cell)
            variables.append(var)
            domains[var] = (False, True)

    constraints = []
    for idx, formula in enumerate(problem.formulas):
        used = symbols_in(formula)
        scope = tuple(v for v in variables if v[0] in used)
        constraints.append(Constraint(
            scope, predicate=_flat_predicate(problem, formula, scope),
            label=f"formula-{idx}"))
    return Csp(tuple(variables), domains, tuple(constraints))


def _flat_predicate(problem: Problem, formula: Formula, scope: tuple):
    position = {var: i for i, var in enumerate(scope)}

    def ok(values: tuple) -> bool:
        def fget(name, args):
            return values[position[(name, args)]]

        def pget(name, args):
            return values[position[(name, args)]]

        return evaluate_partial(formula, fget, pget, problem.domains) is True

    return ok


def function_table_values(problem: Problem, func: str) -> list[tuple[int, ...]]:
    """Every possible table for a function symbol, encoded as result-index
    vectors over its cells in lexicographic order, ascending."""
    decl = problem.signature.function(func)
    n_cells = len(list(_cells(problem, decl.arg_sorts)))
    n = problem.size(decl.result_sort)
    return [vec for vec in itertools.product(range(1, n + 1), repeat=n_cells)]


def relation_values(problem: Problem, pred: str) -> list[tuple[bool, ...]]:
    """Every possible relation for a predicate symbol, encoded as boolean
    vectors over its cells in lexicographic order, ascending."""
    decl = problem.signature.predicate(pred)
    n_cells = len(list(_cells(problem, decl.arg_sorts)))
    return [vec for vec in itertools.product((False, True), repeat=n_cells)]


def functional_csp(problem: Problem) -> Csp:
    """One variable per symbol, valued in whole tables/relations; complete
    assignments are exactly interpretations of the problem."""
    variables: list = []
    domains: dict = {}
    cell_index: dict[str, dict[tuple, int]] = {}
    for f in problem.signature.functions:
        variables.append(f.name)
        domains[f.name] = tuple(function_table_values(problem, f.name))
        cell_index[f.name] = {cell: i for i, cell
                              in enumerate(_cells(problem, f.arg_sorts))}
    for p in problem.signature.predicates:
        variables.append(p.name)
        domains[p.name] = tuple(relation_values(problem, p.name))
        cell_index[p.name] = {cell: i for i, cell
                              in enumerate(_cells(problem, p.arg_sorts))}

    result_sorts = {f.name: f.result_sort for f in problem.signature.functions}

    def make_predicate(formula: Formula, scope: tuple):
        position = {name: i for i, name in enumerate(scope)}

        def ok(values: tuple) -> bool:
            def fget(name, args):
                vec = values[position[name]]
                return DomainElement(result_sorts[name],
                                     vec[cell_index[name][args]])

            def pget(name, args):
                vec = values[position[name]]
                return vec[cell_index[name][args]]

            return evaluate_partial(formula, fget, pget, problem.domains) is True

        return ok

    constraints = []
    for idx, formula in enumerate(problem.formulas):
        used = symbols_in(formula)
        scope = tuple(name for name in variables if name in used)
        constraints.append(Constraint(
            scope, predicate=make_predicate(formula, scope), label=f"formula-{idx}"))
    return Csp(tuple(variables), domains, tuple(constraints))


def interpretation_to_assignment(problem: Problem,
                                 interp: Interpretation) -> frozenset:
    """The interpretation as a complete assignment of the functional CSP."""
    bindings = []
    for f in problem.signature.functions:
        vec = tuple(interp.functions[f.name][cell].index
                    for cell in _cells(problem, f.arg_sorts))
        bindings.append((f.name, vec))
    for p in problem.signature.predicates:
        vec = tuple(cell in interp.predicates[p.name]
                    for cell in _cells(problem, p.arg_sorts))
        bindings.append((p.name, vec))
    return frozenset(bindings)


def assignment_to_interpretation(problem: Problem,
                                 assignment: frozenset) -> Interpretation:
    values = dict(assignment)
    functions = {}
    for f in problem.signature.functions:
        vec = values[f.name]
        functions[f.name] = {
            cell: DomainElement(f.result_sort, vec[i])
            for i, cell in enumerate(_cells(problem, f.arg_sorts))}
    predicates = {}
    for p in problem.signature.predicates:
        vec = values[p.name]
        predicates[p.name] = frozenset(
            cell for i, cell in enumerate(_cells(problem, p.arg_sorts)) if vec[i])
    return Interpretation(problem.signature, problem.domains, functions, predicates)


def functional_extension(problem: Problem, sigma: DomainPermutation,
                         cap: int = DEFAULT_CAP) -> dict[Binding, Binding]:
    """The binding permutation of the functional CSP induced by a domain
    permutation: every variable (symbol) is fixed and its table value is
    transformed exactly as the permutation acts on interpretations."""
    if not sigma.matches(problem.domains):
        raise LogicError("permutation shape does not match the problem")
    csp = functional_csp(problem)
    total = len(csp.bindings())
    if total > cap:
        raise CapExceeded(total, cap)
    perm: dict[Binding, Binding] = {}
    for f in problem.signature.functions:
        cells = list(_cells(problem, f.arg_sorts))
        index = {cell: i for i, cell in enumerate(cells)}
        images = sigma.images(f.result_sort)
        target = [index[tuple(sigma.image(a) for a in cell)] for cell in cells]
        for vec in csp.domains[f.name]:
            out = [0] * len(cells)
            for i in range(len(cells)):
                out[target[i]] = images[vec[i] - 1]
            perm[(f.name, vec)] = (f.name, tuple(out))
    for p in problem.signature.predicates:
        cells = list(_cells(problem, p.arg_sorts))
        index = {cell: i for i, cell in enumerate(cells)}
        target = [index[tuple(sigma.image(a) for a in cell)] for cell in cells]
        for vec in csp.domains[p.name]:
            out = [False] * len(cells)
            for i in range(len(cells)):
                out[target[i]] = vec[i]
            perm[(p.name, vec)] = (p.name, tuple(out))
    return perm
