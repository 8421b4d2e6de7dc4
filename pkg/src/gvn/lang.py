"""Parser and printer for the little assignment language.

Grammar (whitespace-insensitive, ``#`` starts a line comment)::

    program := item*
    item    := label ":" | stmt ";"
             | "if" "(*)" "{" program "}" "else" "{" program "}"
             | "while" "(*)" "{" program "}"
    stmt    := IDENT ":=" expr
    expr    := atom | expr op expr | "(" expr ")"
    atom    := IDENT | INTEGER
    op      := "+" | "-" | "*" | "/"

``*`` and ``/`` bind tighter than ``+`` and ``-``; each level is
left-associative.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union

from .terms import App, Const, Term, Var, constants, operators, size, subterms, variables

RESERVED_PREFIX = "__"
KEYWORDS = frozenset({"if", "else", "while"})


class ParseError(Exception):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.message = message
        self.line = line
        self.column = column
        where = f"{line}:{column}: " if line else ""
        super().__init__(f"{where}{message}")


class DuplicateLabelError(ParseError):
    pass


class ReservedIdentifierError(ParseError):
    pass


@dataclass(frozen=True)
class Assign:
    target: str
    rhs: Term

    def __str__(self) -> str:
        return f"{self.target} := {self.rhs}"


@dataclass(frozen=True)
class Label:
    name: str


@dataclass(frozen=True)
class If:
    then: tuple["Item", ...]
    orelse: tuple["Item", ...]


@dataclass(frozen=True)
class While:
    body: tuple["Item", ...]


Item = Union[Assign, Label, If, While]


@dataclass(frozen=True)
class Program:
    items: tuple[Item, ...] = ()

    def statements(self) -> list[Assign]:
        return list(_walk_statements(self.items))

    def labels(self) -> list[str]:
        out = []
        _collect_labels(self.items, out)
        return out

    def variables(self) -> set[str]:
        out: set[str] = set()
        for s in self.statements():
            out.add(s.target)
            out |= variables(s.rhs)
        return out

    def constants(self) -> set[int]:
        return set().union(*(constants(s.rhs) for s in self.statements()))

    def operators(self) -> set[str]:
        return set().union(*(operators(s.rhs) for s in self.statements()))

    def max_term_size(self) -> int:
        return max((size(s.rhs) for s in self.statements()), default=0)

    def expressions(self) -> set[Term]:
        """Distinct expressions: every variable plus every subterm of every rhs."""
        out: set[Term] = {Var(v) for v in self.variables()}
        for s in self.statements():
            out.update(subterms(s.rhs))
        return out

    def has_loops(self) -> bool:
        return _has_loops(self.items)

    def __str__(self) -> str:
        return print_program(self)


def _walk_statements(items) -> Iterator[Assign]:
    for it in items:
        if isinstance(it, Assign):
            yield it
        elif isinstance(it, If):
            yield from _walk_statements(it.then)
            yield from _walk_statements(it.orelse)
        elif isinstance(it, While):
            yield from _walk_statements(it.body)


def _collect_labels(items, out):
    for it in items:
        if isinstance(it, Label):
            out.append(it.name)
        elif isinstance(it, If):
            _collect_labels(it.then, out)
            _collect_labels(it.orelse, out)
        elif isinstance(it, While):
            _collect_labels(it.body, out)


def _has_loops(items) -> bool:
    for it in items:
        if isinstance(it, While):
            return True
        if isinstance(it, If) and (_has_loops(it.then) or _has_loops(it.orelse)):
            return True
    return False


# -- tokenizer -----------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<star>\(\s*\*\s*\))
  | (?P<assign>:=)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<punct>[:;{}()+\-*/])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind != "ws":
            if kind == "ident" and m.group() in KEYWORDS:
                kind = m.group()
            elif kind == "punct":
                kind = m.group()
            tokens.append(Token(kind, m.group(), line, pos - line_start + 1))
        chunk = m.group()
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            line_start = m.start() + chunk.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


# -- parser --------------------------------------------------------------------

_PRECEDENCE = {"+": 1, "-": 1, "*": 2, "/": 2}


class _Parser:
    def __init__(self, text: str, allow_reserved: bool = False):
        self.tokens = tokenize(text)
        self.pos = 0
        self.allow_reserved = allow_reserved
        self.seen_labels: set[str] = set()

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def expect(self, kind: str) -> Token:
        t = self.tok
        if t.kind != kind:
            shown = t.text or "end of input"
            raise ParseError(f"expected {kind!r}, found {shown!r}", t.line, t.column)
        return self.advance()

    def ident(self) -> Token:
        t = self.expect("ident")
        if t.text.startswith(RESERVED_PREFIX) and not self.allow_reserved:
            raise ReservedIdentifierError(
                f"identifier {t.text!r} uses the reserved prefix {RESERVED_PREFIX!r}", t.line, t.column
            )
        return t

    def program(self, closing: str) -> tuple[Item, ...]:
        items = []
        while self.tok.kind != closing:
            items.append(self.item())
        return tuple(items)

    def item(self) -> Item:
        t = self.tok
        if t.kind == "if":
            self.advance()
            self.expect("star")
            then = self.block()
            self.expect("else")
            return If(then, self.block())
        if t.kind == "while":
            self.advance()
            self.expect("star")
            return While(self.block())
        name = self.ident()
        if self.tok.kind == ":":
            self.advance()
            if name.text in self.seen_labels:
                raise DuplicateLabelError(f"duplicate label {name.text!r}", name.line, name.column)
            self.seen_labels.add(name.text)
            return Label(name.text)
        self.expect("assign")
        rhs = self.expr()
        self.expect(";")
        return Assign(name.text, rhs)

    def block(self) -> tuple[Item, ...]:
        self.expect("{")
        items = self.program("}")
        self.expect("}")
        return items

    def expr(self, min_prec: int = 1) -> Term:
        left = self.atom()
        while self.tok.kind in _PRECEDENCE and _PRECEDENCE[self.tok.kind] >= min_prec:
            op = self.advance().kind
            right = self.expr(_PRECEDENCE[op] + 1)
            left = App(op, left, right)
        return left

    def atom(self) -> Term:
        t = self.tok
        if t.kind == "int":
            self.advance()
            return Const(int(t.text))
        if t.kind == "(":
            self.advance()
            inner = self.expr()
            self.expect(")")
            return inner
        if t.kind == "ident":
            return Var(self.ident().text)
        shown = t.text or "end of input"
        raise ParseError(f"expected an expression, found {shown!r}", t.line, t.column)


def parse(text: str) -> Program:
    p = _Parser(text)
    items = p.program("eof")
    return Program(items)


def parse_term(text: str) -> Term:
    p = _Parser(text)
    t = p.expr()
    p.expect("eof")
    return t


def print_program(p: Program, indent: str = "  ") -> str:
    lines: list[str] = []
    _print_items(p.items, 0, indent, lines)
    return "\n".join(lines) + ("\n" if lines else "")


def _print_items(items, depth, indent, lines):
    pad = indent * depth
    for it in items:
        if isinstance(it, Assign):
            lines.append(f"{pad}{it};")
        elif isinstance(it, Label):
            lines.append(f"{pad}{it.name}:")
        elif isinstance(it, If):
            lines.append(f"{pad}if (*) {{")
            _print_items(it.then, depth + 1, indent, lines)
            lines.append(f"{pad}}} else {{")
            _print_items(it.orelse, depth + 1, indent, lines)
            lines.append(f"{pad}}}")
        else:
            lines.append(f"{pad}while (*) {{")
            _print_items(it.body, depth + 1, indent, lines)
            lines.append(f"{pad}}}")
