"""Pretty printer producing concrete syntax that parses back to the same tree."""

from __future__ import annotations

from fjlambda.parser import SourceProgram
from fjlambda.syntax import (
    BoolLit,
    BoolType,
    Cast,
    ClassDecl,
    Cond,
    CtorDecl,
    DecoratedLambda,
    FieldAccess,
    InterfaceDecl,
    Invoke,
    MethodDecl,
    MethodHeader,
    New,
    Param,
    PureLambda,
    RefType,
    Var,
)

# Binding strength of a printed term: conditionals and λs bind loosest, casts
# sit in between, postfix chains and atoms bind tightest.
_EXPR, _CAST, _POSTFIX = 0, 1, 2

INDENT = "    "


def pretty(node: object) -> str:
    """Render a term, pre-type, header, declaration or whole program."""
    match node:
        case RefType() | BoolType():
            return str(node)
        case MethodHeader():
            return _header(node)
        case ClassDecl():
            return _class(node)
        case InterfaceDecl():
            return _interface(node)
        case SourceProgram():
            return _program(node)
    return _term(node, _EXPR)


def _params(params: tuple[Param, ...]) -> str:
    rendered = (
        f"{p.declared_type} {p.name}" if p.declared_type is not None else p.name for p in params
    )
    return "(" + ", ".join(rendered) + ")"


def _args(args: tuple) -> str:
    return "(" + ", ".join(_term(a, _EXPR) for a in args) + ")"


def _wrap(text: str, own: int, context: int) -> str:
    return f"({text})" if own < context else text


def _term(t: object, context: int) -> str:
    match t:
        case Var(name=name):
            return name
        case BoolLit(value=value):
            return "true" if value else "false"
        case New(class_name=name, args=args):
            return f"new {name}{_args(args)}"
        case FieldAccess(target=target, field_name=name):
            return f"{_term(target, _POSTFIX)}.{name}"
        case Invoke(target=target, method=method, args=args):
            return f"{_term(target, _POSTFIX)}.{method}{_args(args)}"
        case Cast(type=tau, term=inner):
            if isinstance(inner, PureLambda):
                operand = f"({_term(inner, _EXPR)})"
            else:
                operand = _term(inner, _CAST)
            return _wrap(f"({tau}) {operand}", _CAST, context)
        case PureLambda(params=params, body=body):
            return _wrap(f"{_params(params)} -> {_term(body, _EXPR)}", _EXPR, context)
        case DecoratedLambda(params=params, body=body, target=target):
            return f"[{_params(params)} -> {_term(body, _EXPR)} : {target}]"
        case Cond(guard=guard, then=then, orelse=orelse):
            text = f"{_term(guard, _CAST)} ? {_term(then, _EXPR)} : {_term(orelse, _EXPR)}"
            return _wrap(text, _EXPR, context)
    raise TypeError(f"cannot pretty-print {type(t).__name__}")


def _header(header: MethodHeader) -> str:
    params = ", ".join(f"{t} {x}" for t, x in header.params)
    return f"{header.result} {header.name}({params})"


def _method(method: MethodDecl, prefix: str = "") -> str:
    return f"{prefix}{_header(method.header)} {{ return {_term(method.body, _EXPR)}; }}"


def _ctor(ctor: CtorDecl) -> str:
    params = ", ".join(f"{t} {x}" for t, x in ctor.params)
    body = [f"super({', '.join(ctor.super_args)});"]
    body.extend(f"this.{f} = {x};" for f, x in ctor.assignments)
    return f"{ctor.name}({params}) {{ {' '.join(body)} }}"


def _class(decl: ClassDecl) -> str:
    head = f"class {decl.name} extends {decl.superclass}"
    if decl.interfaces:
        head += " implements " + ", ".join(decl.interfaces)
    members = [f"{f.type} {f.name};" for f in decl.fields]
    members.append(_ctor(decl.ctor))
    members.extend(_method(m) for m in decl.methods)
    return head + " {\n" + "".join(f"{INDENT}{m}\n" for m in members) + "}"


def _interface(decl: InterfaceDecl) -> str:
    head = f"interface {decl.name}"
    if decl.extends:
        head += " extends " + ", ".join(decl.extends)
    members = [f"{_header(h)};" for h in decl.headers]
    members.extend(_method(m, "default ") for m in decl.defaults)
    if not members:
        return head + " { }"
    return head + " {\n" + "".join(f"{INDENT}{m}\n" for m in members) + "}"


def _program(program: SourceProgram) -> str:
    parts = [pretty(d) for d in program.decls]
    if program.main is not None:
        parts.append(f"main = {_term(program.main, _EXPR)};")
    return "\n\n".join(parts) + "\n"
