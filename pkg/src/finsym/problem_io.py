"""Line-oriented S-expression text format for problems and interpretations.

Grammar::

    document  := decl* ;
    decl      := "(" "sort" IDENT INT ")"
               | "(" "const" IDENT IDENT ")"
               | "(" "func" IDENT "(" IDENT+ ")" IDENT ")"
               | "(" "pred" IDENT "(" IDENT+ ")" ")"
               | "(" "assert" form ")" ;
    form      := "(" "not" form ")" | "(" "and" form+ ")" | "(" "or" form+ ")"
               | "(" "=>" form form ")" | "(" "<=>" form form ")"
               | "(" "=" term term ")" | "(" IDENT term* ")" | IDENT
               | "(" "forall" "(" binder+ ")" form ")"
               | "(" "exists" "(" binder+ ")" form ")" ;
    binder    := "(" IDENT IDENT ")" ;
    term      := IDENT | DOMLIT | "(" IDENT term+ ")" ;
    DOMLIT    := IDENT "!" INT ;

Identifiers are 7-bit ``[A-Za-z_][A-Za-z0-9_']*``; ``;`` starts a comment
running to end of line.  Declarations must precede use.  ``and``/``or``
are n-ary in the syntax and normalize to binary right-folds internally,
so parse and print are mutually inverse up to that normal form.

An interpretation document lists one ``(value <func> <arg>* <result>)``
form per function cell and one ``(holds <pred> <arg>*)`` form per true
predicate tuple, arguments and results written as domain literals.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterator

from .logic import (Apply, DomainAssignment, DomainElement, Eq, Exists,
                    Forall, Formula, FuncDecl, Iff, Implies, Interpretation,
                    Not, PredApp, PredDecl, Problem, Signature, Term, Var,
                    and_all, format_formula, or_all)

RESERVED = {"sort", "const", "func", "pred", "assert",
            "not", "and", "or", "forall", "exists", "value", "holds"}

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")
_INT = re.compile(r"[0-9]+")


class ParseError(Exception):
    """A lex, syntax, or sort diagnostic with its source position."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Token:
    kind: str  # "(", ")", "ident", "int", "domlit"
    text: str
    line: int
    col: int


def _tokenize(text: str) -> Iterator[Token]:
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
        elif c in " \t\r":
            i += 1
            col += 1
        elif c == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif c in "()":
            yield Token(c, c, line, col)
            i += 1
            col += 1
        else:
            m = _IDENT.match(text, i)
            if m:
                word = m.group()
                start = col
                i = m.end()
                col += len(word)
                if i < n and text[i] == "!":
                    mi = _INT.match(text, i + 1)
                    if not mi:
                        raise ParseError(f"expected index after '{word}!'", line, col)
                    lit = f"{word}!{mi.group()}"
                    col += 1 + len(mi.group())
                    i = mi.end()
                    yield Token("domlit", lit, line, start)
                else:
                    yield Token("ident", word, line, start)
                continue
            m = _INT.match(text, i)
            if m:
                yield Token("int", m.group(), line, col)
                col += len(m.group())
                i = m.end()
                continue
            if text.startswith("<=>", i):
                yield Token("ident", "<=>", line, col)
                i += 3
                col += 3
            elif text.startswith("=>", i):
                yield Token("ident", "=>", line, col)
                i += 2
                col += 2
            elif c == "=":
                yield Token("ident", "=", line, col)
                i += 1
                col += 1
            else:
                raise ParseError(f"unexpected character {c!r}", line, col)


@dataclass(frozen=True)
class SAtom:
    text: str
    kind: str  # "ident", "int", "domlit"
    line: int
    col: int


@dataclass(frozen=True)
class SList:
    items: tuple
    line: int
    col: int


def _read_sexprs(text: str) -> list:
    """Parse the token stream into nested lists, keeping positions."""
    stack: list[list] = [[]]
    opens: list[Token] = []
    for tok in _tokenize(text):
        if tok.kind == "(":
            stack.append([])
            opens.append(tok)
        elif tok.kind == ")":
            if not opens:
                raise ParseError("unmatched ')'", tok.line, tok.col)
            top = stack.pop()
            o = opens.pop()
            stack[-1].append(SList(tuple(top), o.line, o.col))
        else:
            stack[-1].append(SAtom(tok.text, tok.kind, tok.line, tok.col))
    if opens:
        o = opens[-1]
        raise ParseError("unclosed '('", o.line, o.col)
    return stack[0]


def _err(node, message: str) -> ParseError:
    return ParseError(message, node.line, node.col)


def _expect_ident(node, what: str) -> str:
    if not isinstance(node, SAtom) or node.kind != "ident":
        raise _err(node, f"expected {what}")
    return node.text


def _expect_fresh(node, what: str, taken: set[str]) -> str:
    name = _expect_ident(node, what)
    if name in RESERVED:
        raise _err(node, f"'{name}' is a reserved word")
    if name in taken:
        raise _err(node, f"duplicate declaration of '{name}'")
    return name


class _Builder:
    """Accumulates declarations and type-checks formulas as they arrive."""

    def __init__(self) -> None:
        self.sorts: dict[str, int] = {}
        self.functions: list[FuncDecl] = []
        self.predicates: list[PredDecl] = []
        self.formulas: list[Formula] = []
        self.names: set[str] = set()

    def func(self, name: str) -> FuncDecl | None:
        for f in self.functions:
            if f.name == name:
                return f
        return None

    def pred(self, name: str) -> PredDecl | None:
        for p in self.predicates:
            if p.name == name:
                return p
        return None

    def sort_ref(self, node) -> str:
        name = _expect_ident(node, "a sort name")
        if name not in self.sorts:
            raise _err(node, f"undeclared sort '{name}'")
        return name

    # -- terms ------------------------------------------------------------

    def term(self, node, env: dict[str, str]) -> tuple[Term, str]:
        """Parse a term and return it with its sort."""
        if isinstance(node, SAtom) and node.kind == "domlit":
            sort, idx = node.text.split("!")
            if sort not in self.sorts:
                raise _err(node, f"undeclared sort '{sort}'")
            index = int(idx)
            if not 1 <= index <= self.sorts[sort]:
                raise _err(node, f"index {index} out of range for sort {sort} "
                                 f"of size {self.sorts[sort]}")
            return DomainElement(sort, index), sort
        if isinstance(node, SAtom) and node.kind == "ident":
            if node.text in env:
                return Var(node.text, env[node.text]), env[node.text]
            decl = self.func(node.text)
            if decl is not None:
                if not decl.is_constant:
                    raise _err(node, f"'{node.text}' expects {decl.arity} argument(s)")
                return Apply(node.text), decl.result_sort
            raise _err(node, f"undeclared symbol '{node.text}'")
        if isinstance(node, SList):
            if not node.items:
                raise _err(node, "empty term")
            head = _expect_ident(node.items[0], "a function name")
            decl = self.func(head)
            if decl is None:
                raise _err(node.items[0], f"undeclared function '{head}'")
            args = node.items[1:]
            if len(args) != decl.arity:
                raise _err(node, f"'{head}' expects {decl.arity} argument(s), "
                                 f"got {len(args)}")
            parsed = []
            for i, (arg, want) in enumerate(zip(args, decl.arg_sorts), start=1):
                t, got = self.term(arg, env)
                if got != want:
                    raise _err(arg, f"argument {i} of '{head}' has sort {got}, "
                                    f"expected {want}")
                parsed.append(t)
            return Apply(head, tuple(parsed)), decl.result_sort
        raise _err(node, "expected a term")

    # -- formulas ----------------------------------------------------------

    def formula(self, node, env: dict[str, str]) -> Formula:
        if isinstance(node, SAtom):
            name = _expect_ident(node, "a formula")
            raise _err(node, f"'{name}' is not a formula; predicates take arguments")
        if not isinstance(node, SList) or not node.items:
            raise _err(node, "expected a formula")
        head_node = node.items[0]
        head = _expect_ident(head_node, "a connective or predicate")
        rest = node.items[1:]

        if head == "not":
            if len(rest) != 1:
                raise _err(node, "'not' takes exactly one formula")
            return Not(self.formula(rest[0], env))
        if head in ("and", "or"):
            if not rest:
                raise _err(node, f"'{head}' needs at least one formula")
            parts = [self.formula(x, env) for x in rest]
            return and_all(parts) if head == "and" else or_all(parts)
        if head in ("=>", "<=>"):
            if len(rest) != 2:
                raise _err(node, f"'{head}' takes exactly two formulas")
            cls = Implies if head == "=>" else Iff
            return cls(self.formula(rest[0], env), self.formula(rest[1], env))
        if head == "=":
            if len(rest) != 2:
                raise _err(node, "'=' takes exactly two terms")
            lt, ls = self.term(rest[0], env)
            rt, rs = self.term(rest[1], env)
            if ls != rs:
                raise _err(node, f"equality over unequal sorts {ls} and {rs}")
            return Eq(lt, rt)
        if head in ("forall", "exists"):
            if len(rest) != 2 or not isinstance(rest[0], SList):
                raise _err(node, f"'{head}' takes a binder list and a body")
            binders = []
            for b in rest[0].items:
                if not isinstance(b, SList) or len(b.items) != 2:
                    raise _err(b, "binder must be (name sort)")
                vname = _expect_ident(b.items[0], "a variable name")
                if vname in RESERVED:
                    raise _err(b.items[0], f"'{vname}' is a reserved word")
                vsort = self.sort_ref(b.items[1])
                binders.append((vname, vsort))
            if not binders:
                raise _err(rest[0], f"'{head}' needs at least one binder")
            inner_env = dict(env)
            inner_env.update(binders)
            body = self.formula(rest[1], inner_env)
            cls = Forall if head == "forall" else Exists
            for vname, vsort in reversed(binders):
                body = cls(vname, vsort, body)
            return body

        decl = self.pred(head)
        if decl is None:
            raise _err(head_node, f"undeclared predicate '{head}'")
        if len(rest) != decl.arity:
            raise _err(node, f"'{head}' expects {decl.arity} argument(s), "
                             f"got {len(rest)}")
        args = []
        for i, (arg, want) in enumerate(zip(rest, decl.arg_sorts), start=1):
            t, got = self.term(arg, env)
            if got != want:
                raise _err(arg, f"argument {i} of '{head}' has sort {got}, "
                                f"expected {want}")
            args.append(t)
        return PredApp(head, tuple(args))

    # -- declarations -------------------------------------------------------

    def decl(self, node) -> None:
        if not isinstance(node, SList) or not node.items:
            raise _err(node, "expected a declaration")
        head = _expect_ident(node.items[0], "a declaration keyword")
        rest = node.items[1:]
        if head == "sort":
            if len(rest) != 2:
                raise _err(node, "sort declaration is (sort NAME SIZE)")
            name = _expect_fresh(rest[0], "a sort name", self.names)
            if not (isinstance(rest[1], SAtom) and rest[1].kind == "int"):
                raise _err(rest[1], "expected a domain size")
            size = int(rest[1].text)
            if size < 1:
                raise _err(rest[1], "domain size must be at least 1")
            self.sorts[name] = size
            self.names.add(name)
        elif head == "const":
            if len(rest) != 2:
                raise _err(node, "constant declaration is (const NAME SORT)")
            name = _expect_fresh(rest[0], "a constant name", self.names)
            sort = self.sort_ref(rest[1])
            self.functions.append(FuncDecl(name, (), sort))
            self.names.add(name)
        elif head == "func":
            if len(rest) != 3 or not isinstance(rest[1], SList):
                raise _err(node, "function declaration is (func NAME (ARGSORTS..) RESULT)")
            name = _expect_fresh(rest[0], "a function name", self.names)
            if not rest[1].items:
                raise _err(rest[1], "function needs at least one argument sort")
            arg_sorts = tuple(self.sort_ref(a) for a in rest[1].items)
            result = self.sort_ref(rest[2])
            self.functions.append(FuncDecl(name, arg_sorts, result))
            self.names.add(name)
        elif head == "pred":
            if len(rest) != 2 or not isinstance(rest[1], SList):
                raise _err(node, "predicate declaration is (pred NAME (ARGSORTS..))")
            name = _expect_fresh(rest[0], "a predicate name", self.names)
            if not rest[1].items:
                raise _err(rest[1], "predicate needs at least one argument sort")
            arg_sorts = tuple(self.sort_ref(a) for a in rest[1].items)
            self.predicates.append(PredDecl(name, arg_sorts))
            self.names.add(name)
        elif head == "assert":
            if len(rest) != 1:
                raise _err(node, "assert takes exactly one formula")
            self.formulas.append(self.formula(rest[0], {}))
        else:
            raise _err(node.items[0], f"unknown declaration '{head}'")

    def problem(self) -> Problem:
        sig = Signature(tuple(self.sorts), tuple(self.functions), tuple(self.predicates))
        return Problem(sig, DomainAssignment.of(self.sorts), tuple(self.formulas))


def parse_problem(text: str) -> Problem:
    """Parse a problem document; raises :class:`ParseError` with a source
    position on any lex, syntax, or sort violation."""
    builder = _Builder()
    for node in _read_sexprs(text):
        builder.decl(node)
    return builder.problem()


def print_problem(problem: Problem) -> str:
    """Render a problem so that ``parse_problem(print_problem(p))`` is
    structurally equal to ``p``."""
    lines = []
    for sort in problem.signature.sorts:
        lines.append(f"(sort {sort} {problem.size(sort)})")
    for f in problem.signature.functions:
        if f.is_constant:
            lines.append(f"(const {f.name} {f.result_sort})")
        else:
            lines.append(f"(func {f.name} ({' '.join(f.arg_sorts)}) {f.result_sort})")
    for p in problem.signature.predicates:
        lines.append(f"(pred {p.name} ({' '.join(p.arg_sorts)}))")
    for formula in problem.formulas:
        lines.append(f"(assert {format_formula(formula)})")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Interpretations
# ---------------------------------------------------------------------------


def parse_interpretation(problem: Problem, text: str) -> Interpretation:
    """Parse an interpretation document against a known problem.

    Every function cell must be given exactly once (totality); predicate
    tuples not listed are false.
    """
    sig = problem.signature
    functions: dict[str, dict[tuple[DomainElement, ...], DomainElement]] = \
        {f.name: {} for f in sig.functions}
    predicates: dict[str, set[tuple[DomainElement, ...]]] = \
        {p.name: set() for p in sig.predicates}

    def domlit(node) -> DomainElement:
        if not (isinstance(node, SAtom) and node.kind == "domlit"):
            raise _err(node, "expected a domain literal Sort!k")
        sort, idx = node.text.split("!")
        if sort not in problem.signature.sorts:
            raise _err(node, f"undeclared sort '{sort}'")
        index = int(idx)
        if not 1 <= index <= problem.size(sort):
            raise _err(node, f"index {index} out of range for sort {sort} "
                             f"of size {problem.size(sort)}")
        return DomainElement(sort, index)

    for node in _read_sexprs(text):
        if not isinstance(node, SList) or not node.items:
            raise _err(node, "expected (value ...) or (holds ...)")
        head = _expect_ident(node.items[0], "'value' or 'holds'")
        if head == "value":
            if len(node.items) < 3:
                raise _err(node, "value form is (value FUNC ARGS.. RESULT)")
            fname = _expect_ident(node.items[1], "a function name")
            decl = sig.function(fname)
            if decl is None:
                raise _err(node.items[1], f"undeclared function '{fname}'")
            lits = [domlit(x) for x in node.items[2:]]
            args, result = tuple(lits[:-1]), lits[-1]
            if len(args) != decl.arity:
                raise _err(node, f"'{fname}' expects {decl.arity} argument(s), "
                                 f"got {len(args)}")
            for i, (a, want) in enumerate(zip(args, decl.arg_sorts), start=1):
                if a.sort != want:
                    raise _err(node, f"argument {i} of '{fname}' has sort {a.sort}, "
                                     f"expected {want}")
            if result.sort != decl.result_sort:
                raise _err(node, f"value of '{fname}' has sort {result.sort}, "
                                 f"expected {decl.result_sort}")
            if args in functions[fname]:
                raise _err(node, f"duplicate cell {fname}({', '.join(map(str, args))})")
            functions[fname][args] = result
        elif head == "holds":
            if len(node.items) < 3:
                raise _err(node, "holds form is (holds PRED ARGS..)")
            pname = _expect_ident(node.items[1], "a predicate name")
            decl = sig.predicate(pname)
            if decl is None:
                raise _err(node.items[1], f"undeclared predicate '{pname}'")
            args = tuple(domlit(x) for x in node.items[2:])
            if len(args) != decl.arity:
                raise _err(node, f"'{pname}' expects {decl.arity} argument(s), "
                                 f"got {len(args)}")
            for i, (a, want) in enumerate(zip(args, decl.arg_sorts), start=1):
                if a.sort != want:
                    raise _err(node, f"argument {i} of '{pname}' has sort {a.sort}, "
                                     f"expected {want}")
            if args in predicates[pname]:
                raise _err(node, f"duplicate tuple for '{pname}'")
            predicates[pname].add(args)
        else:
            raise _err(node.items[0], f"unknown form '{head}'")

    end_line = text.count("\n") + 1
    for f in sig.functions:
        cells = itertools.product(*(problem.domain(s) for s in f.arg_sorts))
        for cell in cells:
            if tuple(cell) not in functions[f.name]:
                raise ParseError(
                    f"missing cell {f.name}({', '.join(map(str, cell))})",
                    end_line, 1)
    return Interpretation(sig, problem.domains, functions,
                          {k: frozenset(v) for k, v in predicates.items()})


def print_interpretation(problem: Problem, interp: Interpretation) -> str:
    """Render every function cell and every true predicate tuple, symbols in
    declaration order and cells in lexicographic argument order."""
    lines = []
    for f in problem.signature.functions:
        for cell in itertools.product(*(problem.domain(s) for s in f.arg_sorts)):
            result = interp.functions[f.name][tuple(cell)]
            parts = " ".join(str(x) for x in (*cell, result))
            lines.append(f"(value {f.name} {parts})")
    for p in problem.signature.predicates:
        for cell in itertools.product(*(problem.domain(s) for s in p.arg_sorts)):
            if tuple(cell) in interp.predicates[p.name]:
                lines.append(f"(holds {p.name} {' '.join(str(x) for x in cell)})")
    return "\n".join(lines) + "\n"
