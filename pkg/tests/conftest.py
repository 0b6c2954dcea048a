"""Shared fixtures: small class tables written in concrete syntax."""

from collections.abc import Callable
from pathlib import Path

import pytest

from fjlambda.class_table import ClassTable
from fjlambda.harness.corpus import golden_program
from fjlambda.parser import parse_program

# Functional interfaces, a default method reachable from a class and from a
# functional interface, a small class hierarchy and a class holding a λ.
SHAPES = """
interface Fun {
    Object apply(Object x);
}

interface Named {
    Object name();
    default Object greet() { return this.name(); }
}

interface Loud {
    default Object shout() { return new Object(); }
}

interface Both extends Named, Loud {
}

class A {
    A() { super(); }
    Object id(Object x) { return x; }
}

class B extends A implements Named {
    Object n;
    B(Object n) { super(); this.n = n; }
    Object name() { return this.n; }
}

class Pair {
    Object fst;
    Object snd;
    Pair(Object fst, Object snd) { super(); this.fst = fst; this.snd = snd; }
    Object first() { return this.fst; }
    Pair swap() { return new Pair(this.snd, this.fst); }
}

class Holder {
    Fun f;
    Holder(Fun f) { super(); this.f = f; }
    Object run(Object x) { return this.f.apply(x); }
}

class Flag {
    boolean on;
    Flag(boolean on) { super(); this.on = on; }
    Object pick(Object a, Object b) { return this.on ? a : b; }
}
"""


def make_table(source: str) -> ClassTable:
    return ClassTable.from_program(parse_program(source))


@pytest.fixture
def table() -> Callable[[str], ClassTable]:
    """Factory building a class table from source text."""
    return make_table


@pytest.fixture
def shapes() -> ClassTable:
    return make_table(SHAPES)


@pytest.fixture
def golden_table() -> Callable[[str], ClassTable]:
    """Factory building the class table of a shipped example program."""

    def build(name: str) -> ClassTable:
        return ClassTable.from_program(golden_program(name))

    return build


@pytest.fixture
def program_file(tmp_path: Path) -> Callable[[str], Path]:
    """Write source text to a ``.fjl`` file under ``tmp_path``."""

    def write(source: str, name: str = "program.fjl") -> Path:
        path = tmp_path / name
        path.write_text(source, encoding="utf-8")
        return path

    return write
