"""Subtyping, type equivalence and least upper bounds."""

from __future__ import annotations

import logging

from fjlambda.class_table import ClassTable
from fjlambda.errors import IncomparableTypesError
from fjlambda.syntax import BOOLEAN, OBJECT, BoolType, PreType, RefType

logger = logging.getLogger(__name__)


def subtype(ct: ClassTable, tau: PreType, sigma: PreType) -> bool:
    """Decide ``tau <: sigma``.

    Intersections on the right are decomposed first (every component must be
    a supertype), then intersections on the left (some component must be a
    subtype), leaving nominal reachability in the declared hierarchy.
    ``boolean`` is related only to itself.

    Raises:
        UnknownNameError: A name in either type is not declared.
    """
    if isinstance(tau, BoolType) or isinstance(sigma, BoolType):
        return isinstance(tau, BoolType) and isinstance(sigma, BoolType)
    for atom in tau.atoms:
        ct.require_known(atom)
    return all(
        any(ct.is_nominal_subtype(left, right) for left in tau.atoms) for right in sigma.atoms
    )


def equiv(ct: ClassTable, tau: PreType, sigma: PreType) -> bool:
    """Mutual subtyping, written ``tau ~ sigma``."""
    return subtype(ct, tau, sigma) and subtype(ct, sigma, tau)


def class_component(ct: ClassTable, tau: PreType) -> str:
    """The class of ``tau``: its leftmost class, or ``Object`` for interface-only types."""
    if isinstance(tau, BoolType):
        raise ValueError("boolean has no class component")
    head, _ = ct.split(tau)
    return head if head is not None else OBJECT


def lub(ct: ClassTable, first: PreType, second: PreType) -> PreType:
    """Least upper bound of two types, as used to type conditionals.

    The result intersects the least common superclass with the minimal common
    superinterfaces, listed in declaration order. ``Object`` is left out when
    interfaces remain, and so is any interface the common superclass already
    implements. The result can therefore differ in syntax from the full
    intersection, but the two are mutually subtypes (``equiv``). ``lub(I, B)`` is
    ``I`` when ``B`` implements ``I``.

    Raises:
        IncomparableTypesError: Exactly one side is ``boolean``.
    """
    if isinstance(first, BoolType) or isinstance(second, BoolType):
        if isinstance(first, BoolType) and isinstance(second, BoolType):
            return BOOLEAN
        raise IncomparableTypesError(f"no common supertype of {first} and {second}")

    second_class = class_component(ct, second)
    common = next(
        c
        for c in ct.superclasses(class_component(ct, first))
        if ct.is_nominal_subtype(second_class, c)
    )
    shared = [
        decl.name
        for decl in ct.interfaces()
        if subtype(ct, first, RefType((decl.name,))) and subtype(ct, second, RefType((decl.name,)))
    ]
    minimal = [
        name
        for name in shared
        if not any(other != name and ct.is_nominal_subtype(other, name) for other in shared)
        and not ct.is_nominal_subtype(common, name)
    ]
    if common == OBJECT and minimal:
        result = RefType(tuple(minimal))
    else:
        result = RefType((common, *minimal))
    logger.debug("lub(%s, %s) = %s", first, second, result)
    return result
