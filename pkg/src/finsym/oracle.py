"""Brute-force ground truth for finite model finding.

Everything here is exhaustive and deterministic: interpretations are
enumerated in a fixed lexicographic order (function cells in argument
order, values ascending, predicates after functions, symbols in
declaration order), satisfiability search returns the first witness in
that order, and symmetry claims are checked against every interpretation.
The oracle refuses (raises :class:`CapExceeded`) rather than truncating
when the interpretation space exceeds the cap.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .logic import (DomainAssignment, DomainElement, Formula, Interpretation,
                    LogicError, Problem, evaluate, evaluate_partial,
                    map_domain_elements, satisfies, symbols_in)

DEFAULT_CAP = 10 ** 6


class CapExceeded(Exception):
    """The interpretation space is larger than the caller's cap."""

    def __init__(self, space: int, cap: int):
        super().__init__(f"interpretation space has {space} members, cap is {cap}")
        self.space = space
        self.cap = cap


# ---------------------------------------------------------------------------
# Domain permutations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DomainPermutation:
    """One permutation per sort, stored as 1-based image arrays.

    ``perms`` maps each sort name to a tuple ``images`` where ``images[i-1]``
    is the image of the i-th canonical value.
    """

    perms: tuple[tuple[str, tuple[int, ...]], ...]

    @classmethod
    def of(cls, mapping: Mapping[str, Sequence[int]]) -> DomainPermutation:
        items = []
        for sort in sorted(mapping):
            images = tuple(mapping[sort])
            if sorted(images) != list(range(1, len(images) + 1)):
                raise LogicError(f"not a permutation of 1..{len(images)} for sort {sort}")
            items.append((sort, images))
        return cls(tuple(items))

    @classmethod
    def identity(cls, domains: DomainAssignment) -> DomainPermutation:
        return cls.of({s: range(1, domains.size(s) + 1) for s in domains.sort_names})

    def images(self, sort: str) -> tuple[int, ...]:
        for s, imgs in self.perms:
            if s == sort:
                return imgs
        raise KeyError(sort)

    def image(self, value: DomainElement) -> DomainElement:
        return DomainElement(value.sort, self.images(value.sort)[value.index - 1])

    def compose(self, other: DomainPermutation) -> DomainPermutation:
        """``self`` after ``other``: ``(self.compose(other)).image(v) ==
        self.image(other.image(v))``."""
        out = {}
        for sort, imgs in other.perms:
            mine = self.images(sort)
            out[sort] = tuple(mine[i - 1] for i in imgs)
        return DomainPermutation.of(out)

    def inverse(self) -> DomainPermutation:
        out = {}
        for sort, imgs in self.perms:
            inv = [0] * len(imgs)
            for i, img in enumerate(imgs, start=1):
                inv[img - 1] = i
            out[sort] = tuple(inv)
        return DomainPermutation.of(out)

    def matches(self, domains: DomainAssignment) -> bool:
        have = {s: len(imgs) for s, imgs in self.perms}
        return have == domains.as_dict()


def all_domain_permutations(domains: DomainAssignment) -> list[DomainPermutation]:
    """Every domain permutation, in a deterministic order; there are
    ``prod(n_sort!)`` of them."""
    sorts = domains.sort_names
    pools = [list(itertools.permutations(range(1, domains.size(s) + 1))) for s in sorts]
    return [DomainPermutation.of(dict(zip(sorts, combo)))
            for combo in itertools.product(*pools)]


def transposition_generators(domains: DomainAssignment) -> list[DomainPermutation]:
    """Adjacent transpositions per sort; they generate the full domain
    permutation group, which is all that orbit computations need."""
    out = []
    for sort in domains.sort_names:
        n = domains.size(sort)
        for i in range(1, n):
            images = list(range(1, n + 1))
            images[i - 1], images[i] = images[i], images[i - 1]
            full = {s: tuple(range(1, domains.size(s) + 1)) for s in domains.sort_names}
            full[sort] = tuple(images)
            out.append(DomainPermutation.of(full))
    return out


def apply_to_interpretation(sigma: DomainPermutation,
                            interp: Interpretation) -> Interpretation:
    """The group action on interpretations: permute a function table's
    inputs and output together, and a relation's tuples pointwise."""
    if not sigma.matches(interp.domains):
        raise LogicError("permutation shape does not match the interpretation")
    functions = {}
    for f in interp.signature.functions:
        functions[f.name] = {
            tuple(sigma.image(a) for a in args): sigma.image(res)
            for args, res in interp.functions[f.name].items()}
    predicates = {}
    for p in interp.signature.predicates:
        predicates[p.name] = frozenset(
            tuple(sigma.image(a) for a in t) for t in interp.predicates[p.name])
    return Interpretation(interp.signature, interp.domains, functions, predicates)


def apply_to_formulas(sigma: DomainPermutation,
                      formulas: Iterable[Formula]) -> tuple[Formula, ...]:
    """Rewrite every domain element occurrence through its sort's
    permutation; the formula structure is otherwise unchanged."""
    return tuple(map_domain_elements(f, sigma.image) for f in formulas)


# ---------------------------------------------------------------------------
# The interpretation space
# ---------------------------------------------------------------------------


class InterpretationSpace:
    """Canonical vector encoding of all interpretations of a problem.

    A vector holds one int per function cell (the 1-based result index)
    followed by one 0/1 per predicate cell, cells in lexicographic argument
    order and symbols in declaration order.
    """

    def __init__(self, problem: Problem):
        self.problem = problem
        sig = problem.signature
        self.func_slots: list[tuple[str, tuple[DomainElement, ...]]] = []
        self.slot_ranges: list[range] = []
        for f in sig.functions:
            n = problem.size(f.result_sort)
            for cell in itertools.product(*(problem.domain(s) for s in f.arg_sorts)):
                self.func_slots.append((f.name, cell))
                self.slot_ranges.append(range(1, n + 1))
        self.pred_slots: list[tuple[str, tuple[DomainElement, ...]]] = []
        for p in sig.predicates:
            for cell in itertools.product(*(problem.domain(s) for s in p.arg_sorts)):
                self.pred_slots.append((p.name, cell))
                self.slot_ranges.append(range(0, 2))
        self._slot_index = {slot: i for i, slot in enumerate(self.func_slots)}
        self._slot_index.update(
            {slot: len(self.func_slots) + i for i, slot in enumerate(self.pred_slots)})

    @property
    def size(self) -> int:
        out = 1
        for r in self.slot_ranges:
            out *= len(r)
        return out

    def iter_vectors(self) -> Iterator[tuple[int, ...]]:
        return itertools.product(*self.slot_ranges)

    def interpretation(self, vec: Sequence[int]) -> Interpretation:
        sig = self.problem.signature
        functions: dict[str, dict] = {f.name: {} for f in sig.functions}
        predicates: dict[str, set] = {p.name: set() for p in sig.predicates}
        for (fname, cell), v in zip(self.func_slots, vec):
            decl = sig.function(fname)
            functions[fname][cell] = DomainElement(decl.result_sort, v)
        for (pname, cell), v in zip(self.pred_slots, vec[len(self.func_slots):]):
            if v:
                predicates[pname].add(cell)
        return Interpretation(sig, self.problem.domains, functions,
                              {k: frozenset(v) for k, v in predicates.items()})

    def vector(self, interp: Interpretation) -> tuple[int, ...]:
        out = [interp.functions[f][cell].index for f, cell in self.func_slots]
        out += [int(cell in interp.predicates[p]) for p, cell in self.pred_slots]
        return tuple(out)

    def perm_action(self, sigma: DomainPermutation) -> Callable[[tuple], tuple]:
        """The induced permutation on canonical vectors, precomputed."""
        sig = self.problem.signature
        n = len(self.func_slots) + len(self.pred_slots)
        target = [0] * n
        valmap: list[tuple[int, ...] | None] = [None] * n
        for i, (fname, cell) in enumerate(self.func_slots):
            image_cell = tuple(sigma.image(a) for a in cell)
            target[i] = self._slot_index[(fname, image_cell)]
            valmap[i] = sigma.images(sig.function(fname).result_sort)
        for j, (pname, cell) in enumerate(self.pred_slots):
            i = len(self.func_slots) + j
            image_cell = tuple(sigma.image(a) for a in cell)
            target[i] = self._slot_index[(pname, image_cell)]

        nfunc = len(self.func_slots)

        def act(vec: tuple[int, ...]) -> tuple[int, ...]:
            out = [0] * n
            for i in range(nfunc):
                out[target[i]] = valmap[i][vec[i] - 1]
            for i in range(nfunc, n):
                out[target[i]] = vec[i]
            return tuple(out)

        return act


def space_size(problem: Problem) -> int:
    """Number of interpretations: ``prod |B_f|^(#cells) * prod 2^(#cells)``."""
    return InterpretationSpace(problem).size


def enumerate_interpretations(problem: Problem,
                              cap: int = DEFAULT_CAP) -> Iterator[Interpretation]:
    """Every interpretation exactly once, in canonical lexicographic order."""
    space = InterpretationSpace(problem)
    if space.size > cap:
        raise CapExceeded(space.size, cap)

    def gen() -> Iterator[Interpretation]:
        for vec in space.iter_vectors():
            yield space.interpretation(vec)

    return gen()


# ---------------------------------------------------------------------------
# Satisfiability by pruned depth-first search
# ---------------------------------------------------------------------------


def _search(problem: Problem, cap: int, find_all: bool) -> list[Interpretation]:
    space = InterpretationSpace(problem)
    if space.size > cap:
        raise CapExceeded(space.size, cap)

    slots = [("f",) + s for s in space.func_slots] + [("p",) + s for s in space.pred_slots]
    ranges = space.slot_ranges
    formulas = problem.formulas
    fsyms = [symbols_in(f) for f in formulas]
    assign: dict[tuple[str, tuple], object] = {}
    sig = problem.signature
    result_sorts = {f.name: f.result_sort for f in sig.functions}

    def fget(name: str, args: tuple) -> DomainElement | None:
        v = assign.get((name, args))
        if v is None:
            return None
        return DomainElement(result_sorts[name], v)

    def pget(name: str, args: tuple) -> bool | None:
        v = assign.get((name, args))
        return None if v is None else bool(v)

    status: list[bool | None] = [None] * len(formulas)
    models: list[Interpretation] = []

    def recheck(symbol: str | None) -> list[int] | None:
        """Re-evaluate unresolved formulas touching ``symbol`` (all if None);
        returns newly resolved indices, or None on a contradiction."""
        resolved = []
        for i, f in enumerate(formulas):
            if status[i] is True:
                continue
            if symbol is not None and symbol not in fsyms[i]:
                continue
            v = evaluate_partial(f, fget, pget, problem.domains)
            if v is False:
                for j in resolved:
                    status[j] = None
                return None
            if v is True:
                status[i] = True
                resolved.append(i)
        return resolved

    def rec(depth: int) -> bool:
        if depth == len(slots):
            models.append(space.interpretation(
                tuple(assign[(sym, args)] for _, sym, args in slots)))
            return not find_all
        _, sym, args = slots[depth]
        for v in ranges[depth]:
            assign[(sym, args)] = v
            resolved = recheck(sym)
            if resolved is not None:
                if rec(depth + 1):
                    return True
                for j in resolved:
                    status[j] = None
            del assign[(sym, args)]
        return False

    first = recheck(None)
    if first is not None:
        rec(0)
    return models


def is_satisfiable(problem: Problem,
                   cap: int = DEFAULT_CAP) -> tuple[bool, Interpretation | None]:
    """Exhaustive satisfiability; the witness is the first satisfying
    interpretation in enumeration order."""
    models = _search(problem, cap, find_all=False)
    return (True, models[0]) if models else (False, None)


def all_models(problem: Problem, cap: int = DEFAULT_CAP) -> list[Interpretation]:
    """Every satisfying interpretation, in enumeration order."""
    return _search(problem, cap, find_all=True)


# ---------------------------------------------------------------------------
# Symmetry checks
# ---------------------------------------------------------------------------


def _sat_table(space: InterpretationSpace) -> dict[tuple, bool]:
    problem = space.problem
    return {vec: satisfies(problem, space.interpretation(vec))
            for vec in space.iter_vectors()}


def is_domain_symmetry(sigma: DomainPermutation, problem: Problem,
                       cap: int = DEFAULT_CAP) -> bool:
    """True iff the permutation preserves the satisfies verdict of every
    interpretation (checked exhaustively)."""
    space = InterpretationSpace(problem)
    if space.size > cap:
        raise CapExceeded(space.size, cap)
    sat = _sat_table(space)
    act = space.perm_action(sigma)
    return all(sat[act(vec)] == ok for vec, ok in sat.items())


def is_constraint_domain_symmetry(sigma: DomainPermutation, problem: Problem) -> bool:
    """True iff rewriting the formula set through the permutation fixes it
    setwise, under strict structural formula equality."""
    gamma = set(problem.formulas)
    return set(apply_to_formulas(sigma, problem.formulas)) == gamma


def domain_symmetries(problem: Problem,
                      cap: int = DEFAULT_CAP) -> list[DomainPermutation]:
    """All domain permutations that pass :func:`is_domain_symmetry`."""
    space = InterpretationSpace(problem)
    if space.size > cap:
        raise CapExceeded(space.size, cap)
    sat = _sat_table(space)
    out = []
    for sigma in all_domain_permutations(problem.domains):
        act = space.perm_action(sigma)
        if all(sat[act(vec)] == ok for vec, ok in sat.items()):
            out.append(sigma)
    return out


def domain_symmetry_group_size(problem: Problem, cap: int = DEFAULT_CAP) -> int:
    return len(domain_symmetries(problem, cap))


# ---------------------------------------------------------------------------
# Orbits
# ---------------------------------------------------------------------------


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


@dataclass(frozen=True)
class OrbitPartition:
    """Orbits of the full interpretation space under the domain-symmetry
    group; classes hold enumeration indices and share one satisfies verdict."""

    classes: tuple[tuple[int, ...], ...]
    class_satisfies: tuple[bool, ...]

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.classes)


def _group_indices(uf: _UnionFind, n: int) -> list[list[int]]:
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(uf.find(i), []).append(i)
    return [groups[root] for root in sorted(groups)]


def orbit_partition(problem: Problem, cap: int = DEFAULT_CAP) -> OrbitPartition:
    """Partition all interpretations under the action of the full
    domain-symmetry group, by union-find."""
    space = InterpretationSpace(problem)
    if space.size > cap:
        raise CapExceeded(space.size, cap)
    vecs = list(space.iter_vectors())
    index = {v: i for i, v in enumerate(vecs)}
    sat = _sat_table(space)
    sigmas = []
    for sigma in all_domain_permutations(problem.domains):
        act = space.perm_action(sigma)
        if all(sat[act(vec)] == ok for vec, ok in sat.items()):
            sigmas.append(sigma)
    uf = _UnionFind(len(vecs))
    for sigma in sigmas:
        act = space.perm_action(sigma)
        for i, vec in enumerate(vecs):
            uf.union(i, index[act(vec)])
    classes = _group_indices(uf, len(vecs))
    verdicts = []
    for cls in classes:
        flags = {sat[vecs[i]] for i in cls}
        if len(flags) != 1:
            raise AssertionError("satisfies is not constant on an orbit")
        verdicts.append(flags.pop())
    return OrbitPartition(tuple(tuple(c) for c in classes), tuple(verdicts))


def orbits_of(problem: Problem, interps: Sequence[Interpretation],
              sigmas: Iterable[DomainPermutation]) -> list[list[int]]:
    """Partition a set of interpretations (closed under the given
    permutations) into orbits; indices refer to the input sequence."""
    index = {interp.key(): i for i, interp in enumerate(interps)}
    uf = _UnionFind(len(interps))
    for sigma in sigmas:
        for i, interp in enumerate(interps):
            image = apply_to_interpretation(sigma, interp)
            j = index.get(image.key())
            if j is None:
                raise LogicError("interpretation set is not closed under the permutations")
            uf.union(i, j)
    return _group_indices(uf, len(interps))


def check_symmetry_breaking_completeness(
        problem: Problem, constraints: Sequence[Formula],
        cap: int = DEFAULT_CAP) -> tuple[bool, tuple[int, ...] | None]:
    """True iff every orbit of the problem's interpretation space contains
    an interpretation satisfying the constraint formulas; on failure the
    first violating orbit (as enumeration indices) is returned."""
    space = InterpretationSpace(problem)
    if space.size > cap:
        raise CapExceeded(space.size, cap)
    part = orbit_partition(problem, cap)
    vecs = list(space.iter_vectors())
    for cls in part.classes:
        hit = False
        for i in cls:
            interp = space.interpretation(vecs[i])
            if all(evaluate(c, interp) for c in constraints):
                hit = True
                break
        if not hit:
            return False, cls
    return True, None


def interchangeable_set_oracle(problem: Problem, sort: str,
                               candidate: Iterable[DomainElement],
                               cap: int = DEFAULT_CAP) -> bool:
    """True iff every domain permutation that solely permutes the candidate
    set (identity on its complement and on all other sorts) is a domain
    symmetry, checked exhaustively."""
    xs = sorted(candidate)
    for x in xs:
        if x.sort != sort or not 1 <= x.index <= problem.size(sort):
            raise LogicError(f"{x} is not a value of sort {sort}")
    space = InterpretationSpace(problem)
    if space.size > cap:
        raise CapExceeded(space.size, cap)
    sat = _sat_table(space)
    indices = [x.index for x in xs]
    base = {s: tuple(range(1, problem.size(s) + 1))
            for s in problem.domains.sort_names}
    for perm in itertools.permutations(indices):
        images = list(range(1, problem.size(sort) + 1))
        for src, dst in zip(indices, perm):
            images[src - 1] = dst
        sigma = DomainPermutation.of({**base, sort: tuple(images)})
        act = space.perm_action(sigma)
        if not all(sat[act(vec)] == ok for vec, ok in sat.items()):
            return False
    return True
