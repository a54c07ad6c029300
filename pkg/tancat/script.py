"""
The script language: declarations of rings, modules, points and morphisms,
followed by exactly one run line.

    ring R = QQ[x, y] / (x*y)
    module M over R = cokernel [x, 0; 0, y]
    point P on R = (1, 0)
    morphism f : R -> R = {x |-> x^2, y |-> 0}
    run tangent R --side scheme

Polynomials use + - * ^ and parentheses over integer and a/b literals;
unary minus binds tighter than +, and ^ takes a non-negative integer.
Everything after '#' on a line is a comment.
"""

import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from tancat.engine.errors import ParseError, ScriptError, UnresolvedNameError
from tancat.engine.modules import FPModule
from tancat.engine.polynomial import Poly
from tancat.engine.rings import FPRing, Point, RingMorphism

logger = logging.getLogger(__name__)

_TOKEN = re.compile(
    r"""
    (?P<space>[ \t\r]+)
  | (?P<newline>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<number>\d+(?:/\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<symbol>\|->|->|[\[\](){},;=:+\-*^/])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> List[Token]:
    tokens = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = match.lastgroup
        if kind == "newline":
            tokens.append(Token("newline", "\n", line, pos - line_start + 1))
            line, line_start = line + 1, match.end()
        elif kind not in ("space", "comment"):
            tokens.append(Token(kind, match.group(), line, pos - line_start + 1))
        pos = match.end()
    tokens.append(Token("end", "", line, pos - line_start + 1))
    return tokens


@dataclass(frozen=True)
class MorphismDecl:
    """Generator images kept raw; they become a RingMorphism or a Derivation on use."""

    domain: FPRing
    codomain: FPRing
    images: Tuple[Poly, ...]

    def as_morphism(self) -> RingMorphism:
        return RingMorphism(self.domain, self.codomain, self.images)


Value = Union[FPRing, FPModule, Point, MorphismDecl]


@dataclass(frozen=True)
class Command:
    name: str
    args: Tuple[str, ...]
    line: int


@dataclass
class Script:
    declarations: Dict[str, Value] = field(default_factory=dict)
    order: List[str] = field(default_factory=list)
    command: Optional[Command] = None

    def lookup(self, name: str, kind: type) -> Value:
        if name not in self.declarations:
            raise UnresolvedNameError(f"{name!r} is not declared")
        value = self.declarations[name]
        if not isinstance(value, kind):
            raise ScriptError(f"{name!r} is a {_kind_name(value)}, expected a {_kind_name(kind)}")
        return value

    def kind_of(self, name: str) -> str:
        if name not in self.declarations:
            raise UnresolvedNameError(f"{name!r} is not declared")
        return _kind_name(self.declarations[name])


def _kind_name(value) -> str:
    cls = value if isinstance(value, type) else type(value)
    return {FPRing: "ring", FPModule: "module", Point: "point", MorphismDecl: "morphism"}.get(cls, cls.__name__)


class _Parser:
    def __init__(self, text: str):
        self.lines = text.split("\n")
        self.tokens = tokenize(text)
        self.pos = 0
        self.script = Script()

    # Token helpers

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def _skip_newlines(self) -> None:
        while self.current.kind == "newline":
            self.pos += 1

    def _advance(self) -> Token:
        token = self.current
        self.pos += 1
        return token

    def _peek_text(self) -> str:
        # Inside a declaration line breaks are insignificant.
        self._skip_newlines()
        return self.current.text

    def _error(self, expected: str) -> ParseError:
        token = self.current
        found = "end of input" if token.kind == "end" else repr(token.text)
        return ParseError(f"expected {expected}, found {found}", token.line, token.column)

    def _expect(self, text: str) -> Token:
        self._skip_newlines()
        if self.current.text != text or self.current.kind not in ("symbol", "ident"):
            raise self._error(repr(text))
        return self._advance()

    def _ident(self, what: str = "a name") -> Token:
        self._skip_newlines()
        if self.current.kind != "ident":
            raise self._error(what)
        return self._advance()

    # Script

    def parse(self) -> Script:
        while True:
            self._skip_newlines()
            token = self.current
            if token.kind == "end":
                break
            if token.kind != "ident":
                raise self._error("a declaration or run")
            keyword = token.text
            if keyword == "ring":
                self._ring()
            elif keyword == "module":
                self._module()
            elif keyword == "point":
                self._point()
            elif keyword == "morphism":
                self._morphism()
            elif keyword == "run":
                self._run()
            else:
                raise ParseError(f"unknown keyword {keyword!r}", token.line, token.column)
        if self.script.command is None:
            raise ParseError("a script needs a run line")
        return self.script

    def _declare(self, name: Token, value: Value) -> None:
        if self.script.command is not None:
            raise ParseError("declarations must come before the run line", name.line, name.column)
        if name.text in self.script.declarations:
            raise ParseError(f"{name.text!r} is declared twice", name.line, name.column)
        self.script.declarations[name.text] = value
        self.script.order.append(name.text)
        logger.debug("declared %s %s", _kind_name(value), name.text)

    def _ring_ref(self) -> FPRing:
        token = self._ident("a ring name")
        if token.text not in self.script.declarations:
            raise UnresolvedNameError(f"{token.line}:{token.column}: {token.text!r} is not declared")
        value = self.script.declarations[token.text]
        if not isinstance(value, FPRing):
            raise ParseError(f"{token.text!r} is not a ring", token.line, token.column)
        return value

    def _ring(self) -> None:
        self._advance()
        name = self._ident()
        self._expect("=")
        self._expect("QQ")
        self._expect("[")
        variables = []
        if self._peek_text() != "]":
            variables.append(self._ident("a variable").text)
            while self._peek_text() == ",":
                self._advance()
                variables.append(self._ident("a variable").text)
        self._expect("]")
        if len(set(variables)) != len(variables):
            raise ParseError(f"duplicate variables in ring {name.text}", name.line, name.column)
        relations = []
        if self._at_line_continuation("/"):
            self._advance()
            self._expect("(")
            relations.append(self._poly(variables))
            while self._peek_text() == ",":
                self._advance()
                relations.append(self._poly(variables))
            self._expect(")")
        self._declare(name, FPRing(variables, relations))

    def _at_line_continuation(self, text: str) -> bool:
        # A ring's "/ (...)" clause must start on the declaration line.
        return self.current.kind == "symbol" and self.current.text == text

    def _module(self) -> None:
        self._advance()
        name = self._ident()
        self._expect("over")
        ring = self._ring_ref()
        self._expect("=")
        self._expect("cokernel")
        self._expect("[")
        rows: List[Tuple[Poly, ...]] = []
        if self._peek_text() == "[":
            rows.append(self._bracketed_row(ring))
            while self._peek_text() == ",":
                self._advance()
                rows.append(self._bracketed_row(ring))
        else:
            rows.append(self._row(ring))
            while self._peek_text() == ";":
                self._advance()
                rows.append(self._row(ring))
        self._expect("]")
        widths = {len(r) for r in rows}
        if len(widths) != 1:
            raise ParseError(f"rows of module {name.text} have different lengths", name.line, name.column)
        self._declare(name, FPModule.cokernel(ring, rows))

    def _row(self, ring: FPRing) -> Tuple[Poly, ...]:
        entries = [self._poly(ring.vars)]
        while self._peek_text() == ",":
            self._advance()
            entries.append(self._poly(ring.vars))
        return tuple(entries)

    def _bracketed_row(self, ring: FPRing) -> Tuple[Poly, ...]:
        self._expect("[")
        row = self._row(ring)
        self._expect("]")
        return row

    def _point(self) -> None:
        self._advance()
        name = self._ident()
        self._expect("on")
        ring = self._ring_ref()
        self._expect("=")
        self._expect("(")
        coords = [self._rational()]
        while self._peek_text() == ",":
            self._advance()
            coords.append(self._rational())
        self._expect(")")
        self._declare(name, Point(ring, tuple(coords)))

    def _rational(self) -> Fraction:
        self._skip_newlines()
        sign = 1
        if self.current.text == "-":
            self._advance()
            sign = -1
        if self.current.kind != "number":
            raise self._error("a rational number")
        return sign * self._number(self._advance())

    def _number(self, token: Token) -> Fraction:
        numerator, _, denominator = token.text.partition("/")
        if denominator and int(denominator) == 0:
            raise ParseError(f"ill-formed rational {token.text}", token.line, token.column)
        return Fraction(int(numerator), int(denominator or 1))

    def _morphism(self) -> None:
        self._advance()
        name = self._ident()
        self._expect(":")
        domain = self._ring_ref()
        self._expect("->")
        codomain = self._ring_ref()
        self._expect("=")
        self._expect("{")
        images: Dict[str, Poly] = {}
        while True:
            var = self._ident("a variable")
            if var.text not in domain.vars:
                raise ParseError(f"{var.text!r} is not a variable of the domain", var.line, var.column)
            if var.text in images:
                raise ParseError(f"{var.text!r} is mapped twice", var.line, var.column)
            self._expect("|->")
            images[var.text] = self._poly(codomain.vars)
            if self._peek_text() != ",":
                break
            self._advance()
        self._expect("}")
        missing = [v for v in domain.vars if v not in images]
        if missing:
            raise ParseError(f"no image for {', '.join(missing)} in {name.text}", name.line, name.column)
        self._declare(name, MorphismDecl(domain, codomain, tuple(images[v] for v in domain.vars)))

    def _run(self) -> None:
        token = self._advance()
        if self.script.command is not None:
            raise ParseError("a script has exactly one run line", token.line, token.column)
        rest = self.lines[token.line - 1][token.column - 1 + len("run"):]
        args = rest.split("#", 1)[0].split()
        if not args:
            raise ParseError("run needs a command", token.line, token.column)
        while self.current.kind not in ("newline", "end"):
            self.pos += 1
        self.script.command = Command(args[0], tuple(args[1:]), token.line)

    # Polynomials

    def _poly(self, variables: Sequence[str]) -> Poly:
        variables = tuple(variables)
        result = self._term(variables)
        while self._peek_text() in ("+", "-") and self.current.kind == "symbol":
            op = self._advance().text
            term = self._term(variables)
            result = result + term if op == "+" else result - term
        return result

    def _term(self, variables: Tuple[str, ...]) -> Poly:
        result = self._unary(variables)
        while self._peek_text() == "*" and self.current.kind == "symbol":
            self._advance()
            result = result * self._unary(variables)
        return result

    def _unary(self, variables: Tuple[str, ...]) -> Poly:
        if self._peek_text() == "-" and self.current.kind == "symbol":
            self._advance()
            return -self._unary(variables)
        return self._power(variables)

    def _power(self, variables: Tuple[str, ...]) -> Poly:
        base = self._atom(variables)
        if self._peek_text() == "^" and self.current.kind == "symbol":
            self._advance()
            self._skip_newlines()
            token = self.current
            if token.kind != "number" or "/" in token.text:
                raise self._error("an integer exponent")
            self._advance()
            return base ** int(token.text)
        return base

    def _atom(self, variables: Tuple[str, ...]) -> Poly:
        self._skip_newlines()
        token = self.current
        if token.kind == "number":
            self._advance()
            return Poly.constant(variables, self._number(token))
        if token.kind == "ident":
            self._advance()
            if token.text not in variables:
                raise ParseError(f"unknown variable {token.text!r}", token.line, token.column)
            return Poly.variable(variables, token.text)
        if token.text == "(":
            self._advance()
            inner = self._poly(variables)
            self._expect(")")
            return inner
        raise self._error("a polynomial")


def parse(text: str) -> Script:
    """Parses a script; errors carry line:column positions."""
    return _Parser(text).parse()


def render_ring_declaration(name: str, ring: FPRing) -> str:
    """A ring declaration that parses back to an equal ring."""
    head = f"ring {name} = QQ[{', '.join(ring.vars)}]"
    if not ring.basis:
        return head
    return f"{head} / ({', '.join(str(g) for g in ring.basis)})"

