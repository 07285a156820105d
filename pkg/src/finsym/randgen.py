"""Seeded random problem corpus for oracle-backed property verification.

Problems come out closed and well-sorted by construction.  Signatures and
formulas are tiny on purpose: the brute-force oracle has to enumerate the
full interpretation space, so generation retries until the space fits the
requested bound.
"""

from __future__ import annotations

import random
from typing import Sequence

from .logic import (And, Apply, DomainAssignment, DomainElement, Eq, Exists,
                    Forall, Formula, FuncDecl, Iff, Implies, Not, Or, PredApp,
                    PredDecl, Problem, Signature, Term, Var, check_well_sorted)
from .oracle import space_size

_SORT_NAMES = ("A", "B", "C", "D")


def random_signature(rng: random.Random, *, max_sorts: int = 2,
                     max_size: int = 3, max_funcs: int = 2,
                     max_func_arity: int = 2, max_preds: int = 2,
                     max_pred_arity: int = 2
                     ) -> tuple[Signature, DomainAssignment]:
    n_sorts = rng.randint(1, max_sorts)
    sorts = _SORT_NAMES[:n_sorts]
    sizes = {s: rng.randint(1, max_size) for s in sorts}
    functions = []
    for i in range(rng.randint(0, max_funcs)):
        arity = rng.randint(0, max_func_arity)
        functions.append(FuncDecl(
            f"f{i}" if arity else f"c{i}",
            tuple(rng.choice(sorts) for _ in range(arity)),
            rng.choice(sorts)))
    predicates = []
    for i in range(rng.randint(0, max_preds)):
        arity = rng.randint(1, max_pred_arity)
        predicates.append(PredDecl(
            f"P{i}", tuple(rng.choice(sorts) for _ in range(arity))))
    return Signature(tuple(sorts), tuple(functions), tuple(predicates)), \
        DomainAssignment.of(sizes)


def _generable_sorts(sig: Signature, env: dict[str, str], fuel: int,
                     extended: bool, sorts: Sequence[str]) -> list[str]:
    def ok(sort: str, fuel: int) -> bool:
        if extended:
            return True
        if sort in env.values():
            return True
        if any(f.is_constant and f.result_sort == sort for f in sig.functions):
            return True
        if fuel > 0:
            for f in sig.functions:
                if f.result_sort == sort and f.arity > 0 \
                        and all(ok(s, fuel - 1) for s in f.arg_sorts):
                    return True
        return False

    return [s for s in sorts if ok(s, fuel)]


def random_term(rng: random.Random, sig: Signature, domains: DomainAssignment,
                sort: str, env: dict[str, str], fuel: int,
                extended: bool) -> Term | None:
    options = []
    for name, vsort in env.items():
        if vsort == sort:
            options.append(("var", name))
    for f in sig.functions:
        if f.is_constant and f.result_sort == sort:
            options.append(("const", f))
    if extended:
        options.append(("elem", None))
    if fuel > 0:
        for f in sig.functions:
            if f.arity > 0 and f.result_sort == sort:
                if all(_generable_sorts(sig, env, fuel - 1, extended, (s,))
                       for s in f.arg_sorts):
                    options.append(("app", f))
    if not options:
        return None
    kind, payload = rng.choice(options)
    if kind == "var":
        return Var(payload, sort)
    if kind == "const":
        return Apply(payload.name)
    if kind == "elem":
        return DomainElement(sort, rng.randint(1, domains.size(sort)))
    args = []
    for s in payload.arg_sorts:
        t = random_term(rng, sig, domains, s, env, fuel - 1, extended)
        if t is None:
            return None
        args.append(t)
    return Apply(payload.name, tuple(args))


def random_formula(rng: random.Random, sig: Signature,
                   domains: DomainAssignment, depth: int,
                   env: dict[str, str] | None = None,
                   extended: bool = False) -> Formula | None:
    env = dict(env or {})

    def atom() -> Formula | None:
        choices = []
        usable = _generable_sorts(sig, env, 2, extended, sig.sorts)
        for p in sig.predicates:
            if all(s in usable for s in p.arg_sorts):
                choices.append(("pred", p))
        for s in usable:
            choices.append(("eq", s))
        if not choices:
            return None
        kind, payload = rng.choice(choices)
        if kind == "pred":
            args = []
            for s in payload.arg_sorts:
                t = random_term(rng, sig, domains, s, env, 2, extended)
                if t is None:
                    return None
                args.append(t)
            return PredApp(payload.name, tuple(args))
        left = random_term(rng, sig, domains, payload, env, 2, extended)
        right = random_term(rng, sig, domains, payload, env, 2, extended)
        if left is None or right is None:
            return None
        return Eq(left, right)

    def quantifier(depth: int) -> Formula | None:
        sort = rng.choice(sig.sorts)
        var = f"x{len(env)}"
        body = random_formula(rng, sig, domains, depth - 1,
                              {**env, var: sort}, extended)
        if body is None:
            return None
        cls = Forall if rng.random() < 0.55 else Exists
        return cls(var, sort, body)

    if depth <= 0:
        return atom()
    roll = rng.random()
    if roll < 0.40:
        got = atom()
        return got if got is not None else quantifier(depth)
    if roll < 0.50:
        body = random_formula(rng, sig, domains, depth - 1, env, extended)
        return Not(body) if body is not None else None
    if roll < 0.72:
        cls = rng.choice([And, Or, Implies, Iff])
        left = random_formula(rng, sig, domains, depth - 1, env, extended)
        right = random_formula(rng, sig, domains, depth - 1, env, extended)
        if left is None or right is None:
            return None
        return cls(left, right)
    return quantifier(depth)


def random_problem(seed: int | random.Random, *, max_sorts: int = 2,
                   max_size: int = 3, max_funcs: int = 2,
                   max_func_arity: int = 2, max_preds: int = 2,
                   max_pred_arity: int = 2, max_formulas: int = 3,
                   depth: int = 3, extended: bool = False,
                   max_space: int = 2000,
                   signature: tuple[Signature, DomainAssignment] | None = None,
                   attempts: int = 400) -> Problem:
    """A random closed well-sorted problem whose interpretation space has
    at most ``max_space`` members.  Pass ``signature`` to fix the symbols
    and only randomize the formulas."""
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    for _ in range(attempts):
        if signature is not None:
            sig, domains = signature
        else:
            sig, domains = random_signature(
                rng, max_sorts=max_sorts, max_size=max_size,
                max_funcs=max_funcs, max_func_arity=max_func_arity,
                max_preds=max_preds, max_pred_arity=max_pred_arity)
        formulas = []
        for _ in range(rng.randint(0, max_formulas)):
            f = random_formula(rng, sig, domains, rng.randint(1, depth),
                               extended=extended)
            if f is not None:
                formulas.append(f)
        problem = Problem(sig, domains, tuple(formulas))
        if space_size(problem) > max_space:
            continue
        if check_well_sorted(problem):
            raise AssertionError("generator produced an ill-sorted problem")
        return problem
    raise RuntimeError(f"no problem within space bound {max_space} "
                       f"after {attempts} attempts")
