"""Tokenizer and recursive-descent parser for ``.fjl`` sources.

The concrete grammar is documented in ``docs/grammar.md``. Parsing stops at the
first error; every error carries the line and column of the offending token.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from typing import Final

from fjlambda.errors import (
    DuplicateDeclarationError,
    LexError,
    MixedLambdaParametersError,
    ParseError,
)
from fjlambda.syntax import (
    BOOLEAN_NAME,
    OBJECT,
    RESERVED_TYPE_NAMES,
    RESERVED_WORDS,
    THIS,
    BoolLit,
    Cast,
    ClassDecl,
    Cond,
    CtorDecl,
    Decl,
    DecoratedLambda,
    FieldAccess,
    FieldDecl,
    InterfaceDecl,
    Invoke,
    MethodDecl,
    MethodHeader,
    New,
    Param,
    PreType,
    PureLambda,
    RefType,
    SourcePosition,
    Term,
    Var,
    nominal,
)

logger = logging.getLogger(__name__)

MAIN_CLAUSE: Final[str] = "main"

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*)
  | (?P<arrow>->)
  | (?P<name>[A-Za-z][A-Za-z0-9_]*)
  | (?P<punct>[(){}\[\],;.&?:=])
    """,
    re.VERBOSE,
)

# Tokens that can begin the operand of a cast.
_OPERAND_START: Final[frozenset[str]] = frozenset({"(", "["})


@dataclass(frozen=True, slots=True)
class Token:
    kind: str  # "name", "punct", "arrow" or "eof"
    text: str
    pos: SourcePosition

    def __str__(self) -> str:
        return "end of input" if self.kind == "eof" else f"'{self.text}'"


@dataclass(frozen=True, slots=True)
class SourceProgram:
    """A parsed ``.fjl`` file: declarations plus an optional ``main`` term."""

    decls: tuple[Decl, ...]
    main: Term | None = None

    def decl(self, name: str) -> Decl | None:
        return next((d for d in self.decls if d.name == name), None)


def tokenize(text: str) -> list[Token]:
    """Split ``text`` into tokens, dropping whitespace and comments."""
    tokens: list[Token] = []
    line, line_start, offset = 1, 0, 0
    while offset < len(text):
        match = _TOKEN_RE.match(text, offset)
        if match is None:
            pos = SourcePosition(line, offset - line_start + 1)
            raise LexError(f"unexpected character {text[offset]!r}", position=pos)
        kind = match.lastgroup or ""
        lexeme = match.group()
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, lexeme, SourcePosition(line, offset - line_start + 1)))
        newlines = lexeme.count("\n")
        if newlines:
            line += newlines
            line_start = offset + lexeme.rindex("\n") + 1
        offset = match.end()
    tokens.append(Token("eof", "", SourcePosition(line, offset - line_start + 1)))
    return tokens


class Parser:
    """Recursive-descent parser over a token list."""

    def __init__(self, text: str) -> None:
        self.tokens = tokenize(text)
        self.index = 0

    # -- token plumbing -----------------------------------------------------

    @property
    def token(self) -> Token:
        return self.tokens[self.index]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.index + offset, len(self.tokens) - 1)]

    def next(self) -> Token:
        token = self.token
        if token.kind != "eof":
            self.index += 1
        return token

    def would_accept(self, text: str) -> bool:
        return self.token.kind != "eof" and self.token.text == text

    def accept(self, text: str) -> bool:
        if self.would_accept(text):
            self.next()
            return True
        return False

    def require(self, text: str) -> Token:
        if not self.would_accept(text):
            raise self.error(f"expected '{text}', found {self.token}")
        return self.next()

    def error(self, message: str, token: Token | None = None) -> ParseError:
        return ParseError(message, position=(token or self.token).pos)

    def require_identifier(self, what: str) -> Token:
        token = self.token
        if token.kind != "name":
            raise self.error(f"expected {what}, found {token}")
        if token.text in RESERVED_WORDS or token.text in RESERVED_TYPE_NAMES:
            raise self.error(f"'{token.text}' is reserved and cannot be used as {what}")
        return self.next()

    def require_eof(self) -> None:
        if self.token.kind != "eof":
            raise self.error(f"unexpected {self.token} after end of input")

    # -- types --------------------------------------------------------------

    def type_atom(self) -> Token:
        token = self.token
        if token.kind != "name" or token.text in RESERVED_WORDS:
            raise self.error(f"expected a type name, found {token}")
        return self.next()

    def nominal_type(self) -> PreType:
        """A single nominal type or ``boolean``: field, parameter and result positions."""
        atom = self.type_atom()
        if self.would_accept("&"):
            raise self.error("intersection types are not allowed here")
        return nominal(atom.text)

    def pre_type(self) -> PreType:
        first = self.type_atom()
        atoms = [first]
        while self.accept("&"):
            atoms.append(self.type_atom())
        if len(atoms) == 1:
            return nominal(first.text)
        names = [a.text for a in atoms]
        if BOOLEAN_NAME in names:
            raise self.error("boolean cannot occur in an intersection", first)
        try:
            return RefType(tuple(names))
        except ValueError as exc:
            raise self.error(str(exc), first) from exc

    # -- declarations -------------------------------------------------------

    def program(self) -> SourceProgram:
        decls: list[Decl] = []
        seen: set[str] = set()
        main: Term | None = None
        while self.token.kind != "eof":
            if self.would_accept("class") or self.would_accept("interface"):
                if main is not None:
                    raise self.error("declarations must come before the main clause")
                decl = self.class_decl() if self.token.text == "class" else self.interface_decl()
                if decl.name in seen:
                    raise DuplicateDeclarationError(
                        f"'{decl.name}' is declared twice", position=decl.pos
                    )
                seen.add(decl.name)
                decls.append(decl)
            elif self.would_accept(MAIN_CLAUSE) and self.peek().text == "=":
                if main is not None:
                    raise self.error("duplicate main clause")
                self.next()
                self.require("=")
                main = self.expr()
                self.require(";")
            else:
                raise self.error(f"expected a declaration, found {self.token}")
        logger.debug("Parsed %d declarations (main clause: %s)", len(decls), main is not None)
        return SourceProgram(tuple(decls), main)

    def _declared_name(self) -> Token:
        token = self.token
        if token.kind == "name" and token.text in RESERVED_TYPE_NAMES:
            raise self.error(f"'{token.text}' is predefined and cannot be declared")
        return self.require_identifier("a type name")

    def _name_list(self) -> tuple[str, ...]:
        names = [self.type_atom()]
        while self.accept(","):
            names.append(self.type_atom())
        texts = [n.text for n in names]
        for index, name in enumerate(texts):
            if name in texts[:index]:
                raise DuplicateDeclarationError(
                    f"'{name}' is listed twice", position=names[index].pos
                )
        return tuple(texts)

    def class_decl(self) -> ClassDecl:
        start = self.require("class")
        name = self._declared_name().text
        superclass = self.type_atom().text if self.accept("extends") else OBJECT
        interfaces = self._name_list() if self.accept("implements") else ()
        self.require("{")
        fields: list[FieldDecl] = []
        methods: list[MethodDecl] = []
        ctor: CtorDecl | None = None
        while not self.accept("}"):
            if self.token.text == name and self.peek().text == "(":
                if ctor is not None:
                    raise self.error(f"class '{name}' has more than one constructor")
                ctor = self.ctor_decl()
                continue
            member_start = self.token
            member_type = self.nominal_type()
            member_name = self.require_identifier("a member name")
            if self.accept(";"):
                if any(f.name == member_name.text for f in fields):
                    raise DuplicateDeclarationError(
                        f"field '{member_name.text}' is declared twice", position=member_name.pos
                    )
                fields.append(FieldDecl(member_type, member_name.text, pos=member_start.pos))
                continue
            method = self.method_rest(member_type, member_name, member_start, require_body=True)
            assert method is not None
            if any(m.name == method.name for m in methods):
                raise DuplicateDeclarationError(
                    f"method '{method.name}' is declared twice", position=method.pos
                )
            methods.append(method)
        if ctor is None:
            raise self.error(f"class '{name}' has no constructor", start)
        return ClassDecl(
            name, superclass, interfaces, tuple(fields), ctor, tuple(methods), pos=start.pos
        )

    def ctor_decl(self) -> CtorDecl:
        start = self.next()
        params = self.method_params()
        self.require("{")
        self.require("super")
        self.require("(")
        super_args: list[str] = []
        if not self.would_accept(")"):
            super_args.append(self.require_identifier("a constructor argument").text)
            while self.accept(","):
                super_args.append(self.require_identifier("a constructor argument").text)
        self.require(")")
        self.require(";")
        assignments: list[tuple[str, str]] = []
        while self.accept(THIS):
            self.require(".")
            field_name = self.require_identifier("a field name").text
            self.require("=")
            value = self.require_identifier("a constructor parameter").text
            self.require(";")
            assignments.append((field_name, value))
        self.require("}")
        return CtorDecl(
            start.text, params, tuple(super_args), tuple(assignments), pos=start.pos
        )

    def method_params(self) -> tuple[tuple[PreType, str], ...]:
        self.require("(")
        params: list[tuple[PreType, str]] = []
        if not self.would_accept(")"):
            while True:
                param_type = self.nominal_type()
                param_name = self.require_identifier("a parameter name")
                if any(param_name.text == p for _, p in params):
                    raise DuplicateDeclarationError(
                        f"parameter '{param_name.text}' is declared twice",
                        position=param_name.pos,
                    )
                params.append((param_type, param_name.text))
                if not self.accept(","):
                    break
        self.require(")")
        return tuple(params)

    def method_rest(
        self, result: PreType, name: Token, start: Token, *, require_body: bool
    ) -> MethodDecl | MethodHeader:
        params = self.method_params()
        header = MethodHeader(
            result,
            name.text,
            tuple(t for t, _ in params),
            tuple(x for _, x in params),
            pos=start.pos,
        )
        if not require_body and self.accept(";"):
            return header
        self.require("{")
        self.require("return")
        body = self.expr()
        self.require(";")
        self.require("}")
        return MethodDecl(header, body, pos=start.pos)

    def interface_decl(self) -> InterfaceDecl:
        start = self.require("interface")
        name = self._declared_name().text
        extends = self._name_list() if self.accept("extends") else ()
        self.require("{")
        headers: list[MethodHeader] = []
        defaults: list[MethodDecl] = []
        names: set[str] = set()
        while not self.accept("}"):
            member_start = self.token
            marked_default = self.accept("default")
            result = self.nominal_type()
            member_name = self.require_identifier("a method name")
            member = self.method_rest(result, member_name, member_start, require_body=False)
            if member_name.text in names:
                raise DuplicateDeclarationError(
                    f"method '{member_name.text}' is declared twice", position=member_name.pos
                )
            names.add(member_name.text)
            if isinstance(member, MethodHeader):
                if marked_default:
                    raise self.error("a default method needs a body", member_start)
                headers.append(member)
            else:
                defaults.append(member)
        return InterfaceDecl(name, extends, tuple(headers), tuple(defaults), pos=start.pos)

    # -- terms --------------------------------------------------------------

    def _closing_paren(self) -> int | None:
        """Index of the ')' matching the '(' at the current token, if balanced."""
        depth = 0
        for index in range(self.index, len(self.tokens)):
            text = self.tokens[index].text
            if self.tokens[index].kind == "eof":
                return None
            if text == "(":
                depth += 1
            elif text == ")":
                depth -= 1
                if depth == 0:
                    return index
        return None

    def at_lambda(self) -> bool:
        if not self.would_accept("("):
            return False
        close = self._closing_paren()
        return close is not None and self.tokens[close + 1].kind == "arrow"

    def at_cast(self) -> bool:
        if not self.would_accept("("):
            return False
        close = self._closing_paren()
        if close is None or close == self.index + 1:
            return False
        inner = self.tokens[self.index + 1 : close]
        for position, token in enumerate(inner):
            expected_name = position % 2 == 0
            if expected_name and (token.kind != "name" or token.text in RESERVED_WORDS):
                return False
            if not expected_name and token.text != "&":
                return False
        if len(inner) % 2 == 0:
            return False
        after = self.tokens[close + 1]
        return after.kind == "name" or after.text in _OPERAND_START

    def expr(self) -> Term:
        if self.at_lambda():
            return self.lambda_expr()
        start = self.token
        guard = self.unary()
        if self.accept("?"):
            then = self.expr()
            self.require(":")
            orelse = self.expr()
            return Cond(guard, then, orelse, pos=start.pos)
        return guard

    def unary(self) -> Term:
        if self.at_cast():
            start = self.require("(")
            tau = self.pre_type()
            self.require(")")
            operand = self.lambda_expr() if self.at_lambda() else self.unary()
            return Cast(tau, operand, pos=start.pos)
        return self.postfix()

    def postfix(self) -> Term:
        term = self.primary()
        while self.would_accept("."):
            dot = self.next()
            member = self.require_identifier("a field or method name")
            if self.would_accept("("):
                term = Invoke(term, member.text, self.arguments(), pos=dot.pos)
            else:
                term = FieldAccess(term, member.text, pos=dot.pos)
        return term

    def arguments(self) -> tuple[Term, ...]:
        self.require("(")
        args: list[Term] = []
        if not self.would_accept(")"):
            args.append(self.expr())
            while self.accept(","):
                args.append(self.expr())
        self.require(")")
        return tuple(args)

    def primary(self) -> Term:
        token = self.token
        if token.kind == "name":
            if token.text == "new":
                self.next()
                class_name = self.type_atom()
                return New(class_name.text, self.arguments(), pos=token.pos)
            if token.text in ("true", "false"):
                self.next()
                return BoolLit(token.text == "true", pos=token.pos)
            if token.text == THIS:
                self.next()
                return Var(THIS, pos=token.pos)
            name = self.require_identifier("a variable")
            return Var(name.text, pos=name.pos)
        if self.accept("("):
            inner = self.expr()
            self.require(")")
            return inner
        if self.would_accept("["):
            return self.decorated_lambda()
        raise self.error(f"expected a term, found {token}")

    def lambda_params(self) -> tuple[Param, ...]:
        open_paren = self.require("(")
        raw: list[tuple[Token | None, Token]] = []
        if not self.would_accept(")"):
            while True:
                first = self.token
                if first.kind != "name":
                    raise self.error(f"expected a λ parameter, found {first}")
                if self.peek().kind == "name":
                    param_type = self.type_atom()
                    raw.append((param_type, self.require_identifier("a parameter name")))
                else:
                    raw.append((None, self.require_identifier("a parameter name")))
                if not self.accept(","):
                    break
        self.require(")")
        if len({annotation is None for annotation, _ in raw}) > 1:
            raise MixedLambdaParametersError(
                "λ parameters must be all typed or all untyped", position=open_paren.pos
            )
        seen: set[str] = set()
        params: list[Param] = []
        for annotation, name in raw:
            if name.text in seen:
                raise self.error(f"λ parameter '{name.text}' is declared twice", name)
            seen.add(name.text)
            declared = nominal(annotation.text) if annotation is not None else None
            params.append(Param(name.text, declared, pos=name.pos))
        return tuple(params)

    def lambda_expr(self) -> PureLambda:
        start = self.token
        params = self.lambda_params()
        if self.token.kind != "arrow":
            raise self.error(f"expected '->', found {self.token}")
        self.next()
        return PureLambda(params, self.expr(), pos=start.pos)

    def decorated_lambda(self) -> DecoratedLambda:
        start = self.require("[")
        lam = self.lambda_expr()
        self.require(":")
        target = self.pre_type()
        self.require("]")
        return DecoratedLambda(lam.params, lam.body, target, pos=start.pos)


def parse_program(text: str) -> SourceProgram:
    """Parse a whole ``.fjl`` source.

    Raises:
        ParseError: On the first lexical or syntactic error.
    """
    parser = Parser(text)
    program = parser.program()
    parser.require_eof()
    return program


def parse_term(text: str) -> Term:
    """Parse a single term, e.g. ``new C().m(() -> new C())``."""
    parser = Parser(text)
    term = parser.expr()
    parser.require_eof()
    return term


def parse_type(text: str) -> PreType:
    """Parse a pre-type such as ``C & I1 & I2`` or ``boolean``."""
    parser = Parser(text)
    tau = parser.pre_type()
    parser.require_eof()
    return tau
