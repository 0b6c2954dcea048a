"""Greedy shrinking of failing cases.

Candidates are tried smallest change first: drop a declaration, drop or
simplify a method body, replace a subterm of the main term by one of its
children or by ``new Object()``. The first candidate on which the property
still fails is kept and the search restarts from it.
"""

from __future__ import annotations

import logging
from collections.abc import Iterator

from fjlambda.class_table import ClassTable
from fjlambda.errors import FJLError
from fjlambda.harness.properties import BaseProperty, Case, PropertyResult
from fjlambda.syntax import (
    OBJECT,
    ClassDecl,
    Decl,
    InterfaceDecl,
    MethodDecl,
    New,
    Term,
    children,
    map_children,
    term_size,
)

logger = logging.getLogger(__name__)

SMALLEST: Term = New(OBJECT, ())

Path = tuple[int, ...]


def case_size(case: Case) -> int:
    """Declarations, method bodies and the term, counted in nodes."""
    size = len(case.ct)
    for decl in case.ct:
        methods = decl.methods if isinstance(decl, ClassDecl) else decl.defaults
        size += sum(term_size(m.body) for m in methods)
    if case.term is not None:
        size += term_size(case.term)
    return size


def _paths(t: Term, path: Path = ()) -> Iterator[Path]:
    yield path
    for index, child in enumerate(children(t)):
        yield from _paths(child, (*path, index))


def _at(t: Term, path: Path) -> Term:
    for index in path:
        t = children(t)[index]
    return t


def _replace(t: Term, path: Path, new: Term) -> Term:
    if not path:
        return new
    head, rest = path[0], path[1:]
    counter = iter(range(len(children(t))))
    return map_children(
        t, lambda child: _replace(child, rest, new) if next(counter) == head else child
    )


def term_candidates(t: Term) -> Iterator[Term]:
    """Smaller variants of ``t``, outermost positions first."""
    for path in _paths(t):
        sub = _at(t, path)
        for child in children(sub):
            yield _replace(t, path, child)
        if sub != SMALLEST:
            yield _replace(t, path, SMALLEST)


def _with_methods(decl: Decl, methods: tuple[MethodDecl, ...]) -> Decl:
    if isinstance(decl, ClassDecl):
        return ClassDecl(
            decl.name, decl.superclass, decl.interfaces, decl.fields, decl.ctor, methods, decl.pos
        )
    return InterfaceDecl(decl.name, decl.extends, decl.headers, methods, decl.pos)


def _table_variants(decls: list[Decl]) -> Iterator[list[Decl]]:
    for index in range(len(decls)):
        yield decls[:index] + decls[index + 1 :]
    for index, decl in enumerate(decls):
        methods = decl.methods if isinstance(decl, ClassDecl) else decl.defaults
        for position, method in enumerate(methods):
            others = methods[:position] + methods[position + 1 :]
            yield [*decls[:index], _with_methods(decl, others), *decls[index + 1 :]]
            for body in (*children(method.body), SMALLEST):
                if body == method.body:
                    continue
                simpler = MethodDecl(method.header, body, method.pos)
                replaced = (*methods[:position], simpler, *methods[position + 1 :])
                yield [*decls[:index], _with_methods(decl, replaced), *decls[index + 1 :]]


def candidates(case: Case) -> Iterator[Case]:
    """Every one-change simplification of ``case`` that still builds a table."""
    for decls in _table_variants(list(case.ct)):
        try:
            ct = ClassTable(decls)
        except FJLError:
            continue
        yield case.replace(ct=ct)
    if case.term is not None:
        for term in term_candidates(case.term):
            yield case.replace(term=term)


def _still_fails(prop: BaseProperty, candidate: Case) -> PropertyResult | None:
    try:
        result = prop.check_case(candidate)
    except (FJLError, ValueError) as exc:
        logger.debug("shrink candidate rejected: %s", exc)
        return None
    return result if result.failed else None


def shrink(
    prop: BaseProperty, case: Case, result: PropertyResult, max_rounds: int = 500
) -> tuple[Case, PropertyResult]:
    """The smallest case found on which ``prop`` still fails, with its result."""
    best, best_result = case, result
    best_size = case_size(case)
    for _ in range(max_rounds):
        for candidate in candidates(best):
            size = case_size(candidate)
            if size >= best_size:
                continue
            found = _still_fails(prop, candidate)
            if found is not None:
                best, best_result, best_size = candidate, found, size
                break
        else:
            break
    logger.debug("shrunk %s case from %d to %d nodes", prop.name, case_size(case), best_size)
    return best, best_result


__all__ = ["case_size", "candidates", "shrink", "term_candidates"]
