"""
Tokenizer and parser for session files.

A session declares a ring, named modules, lattices and complexes, and at
most one ``check`` command::

    ring W(1) over QZ;
    module M = coker [[z*d1 - 1]];
    lattice L = M;
    check L holonomic-hat

Elements are evaluated while parsing, so ``d1*x1`` is stored in normal
order as ``x1*d1 + 1``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, NamedTuple, Optional, Tuple

from app.algebra.derham import PerfectComplexOverDVR
from app.algebra.groebner import FreeVector, Side
from app.algebra.modules import PresentedModule
from app.algebra.scalars import Z, LocalScalar, RingTag, coerce_scalar, ring_one
from app.algebra.weyl import WeylElement, bernstein_degree, constant, generator_d, generator_x, map_coefficients
from app.errors import ParseError, RingMismatch, UndeclaredName, WeylFiberError

MAX_EXPONENT = 64
MAX_DEGREE = 128
MAX_COEFFICIENT_BITS = 4096
MAX_AMBIENT = 16

KEYWORDS = {"ring", "over", "module", "coker", "left", "right", "lattice", "gens", "complex", "with", "check"}

RINGS = {"QQ": RingTag.RATIONAL_FIELD, "QZ": RingTag.LOCAL_FIELD}

# subcommand -> positional argument kinds
SUBCOMMANDS: Dict[str, Tuple[str, ...]] = {
    "gb": (),
    "nf": ("vector",),
    "dim": (),
    "grade": (),
    "holonomic": (),
    "ext": ("int",),
    "charcycle": (),
    "dual": (),
    "reduce": (),
    "holonomic-hat": (),
    "good-lattice": (),
    "compare-lattices": ("name",),
    "kunneth": ("int",),
    "derham": (),
    "chi": (),
    "euler-check": (),
    "bfunction": (),
    "generic": (),
}

FLAGS = {"zpower", "max_degree", "window"}

TOKEN_SPEC = {
    "comment": r"\#[^\n]*",
    "newline": r"\n",
    "skip": r"[ \t\r]+",
    "num": r"\d+",
    "name": r"[A-Za-z_][A-Za-z0-9_]*",
    "pow": r"\*\*|\^",
    "op": r"[+\-*/]",
    "lpar": r"\(",
    "rpar": r"\)",
    "lbr": r"\[",
    "rbr": r"\]",
    "comma": r",",
    "semi": r";",
    "equal": r"=",
    "error": r".",
}
TOKEN_RE = re.compile("|".join(f"(?P<{name}>{text})" for name, text in TOKEN_SPEC.items()))


class Token(NamedTuple):
    type: str
    value: Any
    line: int
    column: int


def tokenize(source: str) -> Iterator[Token]:
    line, line_start = 1, 0
    for mo in TOKEN_RE.finditer(source):
        kind = str(mo.lastgroup)
        value: Any = mo.group()
        column = mo.start() - line_start + 1
        if kind == "newline":
            line += 1
            line_start = mo.end()
            continue
        if kind in ("skip", "comment"):
            continue
        if kind == "error":
            raise ParseError(f"unexpected character {value!r}", line, column, value)
        if kind == "num":
            value = int(value)
        elif kind == "name" and value in KEYWORDS:
            kind = "keyword"
        yield Token(kind, value, line, column)
    yield Token("end", "", line, len(source) - line_start + 1)


# -- session objects --------------------------------------------------------------


@dataclass(frozen=True)
class LatticeDecl:
    name: str
    module_name: str
    generators: Optional[Tuple[FreeVector, ...]] = None


@dataclass(frozen=True)
class Command:
    target: str
    subcommand: str
    args: Tuple[Any, ...] = ()
    flags: Dict[str, int] = field(default_factory=dict)

    def echo(self) -> str:
        parts = ["check", self.target, self.subcommand]
        parts += [str(a) for a in self.args]
        parts += [f"{k}={v}" for k, v in sorted(self.flags.items())]
        return " ".join(parts)


@dataclass
class SessionInput:
    ambient_n: int
    ring_tag: RingTag
    modules: Dict[str, PresentedModule] = field(default_factory=dict)
    lattices: Dict[str, LatticeDecl] = field(default_factory=dict)
    complexes: Dict[str, PerfectComplexOverDVR] = field(default_factory=dict)
    command: Optional[Command] = None

    @property
    def ring_name(self) -> str:
        return "QZ" if self.ring_tag is RingTag.LOCAL_FIELD else "QQ"

    def declared(self, name: str) -> bool:
        return name in self.modules or name in self.lattices or name in self.complexes


# -- expressions ---------------------------------------------------------------------


def _bits(q: Any) -> int:
    return max(int(q.numerator).bit_length(), int(q.denominator).bit_length())


def _measure(e: WeylElement) -> Tuple[int, int]:
    """Total degree (Bernstein plus z) and largest rational coefficient size in bits."""
    if not e:
        return 0, 0
    zdeg, bits = 0, 0
    for _, c in e.terms:
        if isinstance(c, LocalScalar):
            polys = (c.numerator, c.denominator)
            zdeg = max(zdeg, *(p.degree() for p in polys))
            bits = max(bits, *(_bits(q) for p in polys for q in p.coeffs()))
        else:
            bits = max(bits, _bits(c))
    return bernstein_degree(e) + zdeg, bits


class _ExpressionParser:
    """Pratt parser evaluating directly into Weyl elements."""

    BINDING = {"+": 10, "-": 10, "*": 20, "/": 20, "^": 30}
    PREFIX_BINDING = 25

    def __init__(self, parser: "SessionParser") -> None:
        self.parser = parser
        self.n = parser.ambient_n
        self.tag = parser.ring_tag

    def lbp(self, tok: Token) -> int:
        if tok.type == "op":
            return self.BINDING[tok.value]
        if tok.type == "pow":
            return self.BINDING["^"]
        return 0

    def expression(self, rbp: int = 0) -> WeylElement:
        tok = self.parser.advance()
        left = self.nud(tok)
        while rbp < self.lbp(self.parser.peek()):
            tok = self.parser.advance()
            left = self.led(tok, left)
        return left

    def nud(self, tok: Token) -> WeylElement:
        if tok.type == "num":
            return constant(self.n, self.tag, tok.value)
        if tok.type == "name":
            return self.variable(tok)
        if tok.type == "lpar":
            inner = self.expression()
            self.parser.expect("rpar")
            return inner
        if tok.type == "op" and tok.value in "+-":
            operand = self.expression(self.PREFIX_BINDING)
            return -operand if tok.value == "-" else operand
        raise self.parser.error("expected an expression", tok)

    def led(self, tok: Token, left: WeylElement) -> WeylElement:
        if tok.type == "pow":
            exp_tok = self.parser.expect("num")
            if exp_tok.value > MAX_EXPONENT:
                raise self.parser.error(f"exponent larger than {MAX_EXPONENT}", exp_tok)
            degree, bits = _measure(left)
            self.bound(degree * exp_tok.value, bits * exp_tok.value, tok)
            return left ** exp_tok.value
        right = self.expression(self.BINDING[tok.value])
        if tok.value == "*":
            (dl, bl), (dr, br) = _measure(left), _measure(right)
            self.bound(dl + dr, bl + br, tok)
        if tok.value == "+":
            return left + right
        if tok.value == "-":
            return left - right
        if tok.value == "*":
            return left * right
        return self.divide(left, right, tok)

    def bound(self, degree: int, bits: int, tok: Token) -> None:
        if degree > MAX_DEGREE:
            raise self.parser.error(f"result degree exceeds {MAX_DEGREE}", tok)
        if bits > MAX_COEFFICIENT_BITS:
            raise self.parser.error(f"coefficients exceed {MAX_COEFFICIENT_BITS} bits", tok)

    def divide(self, left: WeylElement, right: WeylElement, tok: Token) -> WeylElement:
        origin = (0,) * self.n
        if not right:
            raise self.parser.error("division by zero", tok)
        if len(right.terms) != 1 or right.terms[0][0] != (origin, origin):
            raise self.parser.error("division by a non-scalar", tok)
        c = right.terms[0][1]
        return left.scale(ring_one(self.tag) / c)

    def variable(self, tok: Token) -> WeylElement:
        name = tok.value
        if name == "z":
            if self.tag is not RingTag.LOCAL_FIELD:
                raise RingMismatch("z is only available over QZ", tok.line, tok.column, name)
            return constant(self.n, self.tag, Z)
        m = re.fullmatch(r"([xd])(\d+)", name)
        if m and 1 <= int(m.group(2)) <= self.n:
            i = int(m.group(2))
            return generator_x(self.n, i, self.tag) if m.group(1) == "x" else generator_d(self.n, i, self.tag)
        raise UndeclaredName(f"unknown variable {name!r} in W({self.n})", tok.line, tok.column, name)


# -- statements ----------------------------------------------------------------------


class SessionParser:
    def __init__(self, source: str) -> None:
        self.source = source
        self.tokens: List[Token] = []
        self.pos = 0
        self.ambient_n = 0
        self.ring_tag = RingTag.RATIONAL_FIELD
        self.session: Optional[SessionInput] = None

    # cursor helpers

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.type != "end":
            self.pos += 1
        return tok

    def error(self, message: str, tok: Optional[Token] = None) -> ParseError:
        tok = tok or self.peek()
        return ParseError(message, tok.line, tok.column, str(tok.value) if tok.type != "end" else None)

    def expect(self, kind: str, value: Any = None) -> Token:
        tok = self.peek()
        if tok.type != kind or (value is not None and tok.value != value):
            wanted = value if value is not None else kind
            raise self.error(f"expected {wanted!r}", tok)
        return self.advance()

    def accept(self, kind: str, value: Any = None) -> Optional[Token]:
        tok = self.peek()
        if tok.type == kind and (value is None or tok.value == value):
            return self.advance()
        return None

    # grammar

    def parse(self) -> SessionInput:
        self.tokens = list(tokenize(self.source))
        while self.peek().type != "end":
            if self.accept("semi"):
                continue
            self.statement()
            if self.peek().type != "end":
                self.expect("semi")
        if self.session is None:
            raise self.error("missing ring declaration")
        return self.session

    def statement(self) -> None:
        tok = self.peek()
        if tok.type != "keyword":
            raise self.error("expected a statement", tok)
        if tok.value == "ring":
            return self.ring_statement()
        if self.session is None:
            raise self.error("the ring must be declared first", tok)
        handlers = {
            "module": self.module_statement,
            "lattice": self.lattice_statement,
            "complex": self.complex_statement,
            "check": self.check_statement,
        }
        if tok.value not in handlers:
            raise self.error(f"unexpected keyword {tok.value!r}", tok)
        handlers[tok.value]()

    def ring_statement(self) -> None:
        start = self.advance()
        if self.session is not None:
            raise self.error("ring declared twice", start)
        self.expect("name", "W")
        self.expect("lpar")
        n_tok = self.expect("num")
        self.expect("rpar")
        self.expect("keyword", "over")
        ring_tok = self.expect("name")
        if ring_tok.value not in RINGS:
            raise RingMismatch("ring must be QQ or QZ", ring_tok.line, ring_tok.column, ring_tok.value)
        if not 1 <= n_tok.value <= MAX_AMBIENT:
            raise self.error(f"W(n) needs 1 <= n <= {MAX_AMBIENT}", n_tok)
        self.ambient_n = n_tok.value
        self.ring_tag = RINGS[ring_tok.value]
        self.session = SessionInput(self.ambient_n, self.ring_tag)

    def new_name(self) -> Token:
        tok = self.expect("name")
        if self.session.declared(tok.value):
            raise self.error(f"{tok.value!r} already declared", tok)
        return tok

    def module_statement(self) -> None:
        self.advance()
        name = self.new_name()
        self.expect("equal")
        side = Side.LEFT
        if self.accept("keyword", "right"):
            side = Side.RIGHT
        else:
            self.accept("keyword", "left")
        coker = self.expect("keyword", "coker")
        rows = self.matrix()
        widths = {len(r) for r in rows if r}
        if len(widths) > 1:
            raise self.error("relation rows have different lengths", coker)
        rank = widths.pop() if widths else 1
        relations = tuple(FreeVector.of(r) for r in rows if r)
        self.session.modules[name.value] = PresentedModule(self.ring_tag, side, self.ambient_n, rank, relations)

    def lattice_statement(self) -> None:
        self.advance()
        name = self.new_name()
        self.expect("equal")
        ref = self.expect("name")
        if ref.value not in self.session.modules:
            raise UndeclaredName(f"module {ref.value!r} is not declared", ref.line, ref.column, ref.value)
        if self.ring_tag is not RingTag.LOCAL_FIELD:
            raise RingMismatch("lattices need the ring QZ", ref.line, ref.column, ref.value)
        generators = None
        if self.accept("keyword", "gens"):
            rank = self.session.modules[ref.value].rank
            rows = self.matrix()
            if any(len(r) != rank for r in rows):
                raise self.error(f"lattice generators must have {rank} entries", ref)
            generators = tuple(FreeVector.of([self.integral(e, ref) for e in r]) for r in rows)
        self.session.lattices[name.value] = LatticeDecl(name.value, ref.value, generators)

    def integral(self, e: WeylElement, tok: Token) -> WeylElement:
        try:
            return map_coefficients(e, lambda c: coerce_scalar(RingTag.POLYNOMIAL_Z, c), RingTag.POLYNOMIAL_Z)
        except WeylFiberError as exc:
            raise self.error(f"lattice generator is not integral: {exc.message}", tok) from exc

    def complex_statement(self) -> None:
        self.advance()
        name = self.new_name()
        self.expect("equal")
        self.expect("lbr")
        ranks: List[int] = []
        if not self.accept("rbr"):
            while True:
                ranks.append(self.expect("num").value)
                if self.accept("rbr"):
                    break
                self.expect("comma")
        mats = []
        if self.accept("keyword", "with"):
            while self.peek().type == "lbr":
                start = self.peek()
                mats.append(tuple(tuple(self.scalar(e, start) for e in row) for row in self.matrix()))
        try:
            self.session.complexes[name.value] = PerfectComplexOverDVR(tuple(ranks), tuple(mats))
        except WeylFiberError as exc:
            raise self.error(exc.message, name) from exc

    def scalar(self, e: WeylElement, tok: Token) -> Any:
        origin = (0,) * self.ambient_n
        if not e:
            return coerce_scalar(RingTag.LOCAL_FIELD, 0)
        if len(e.terms) != 1 or e.terms[0][0] != (origin, origin):
            raise self.error("complex entries must be scalars", tok)
        return coerce_scalar(RingTag.LOCAL_FIELD, e.terms[0][1])

    def check_statement(self) -> None:
        start = self.advance()
        if self.session.command is not None:
            raise self.error("only one check per session", start)
        target = self.expect("name")
        if not self.session.declared(target.value):
            raise UndeclaredName(f"{target.value!r} is not declared", target.line, target.column, target.value)
        sub_tok = self.word()
        parts = [sub_tok.value]
        while self.peek().type == "op" and self.peek().value == "-":
            self.advance()
            parts.append(str(self.word().value))
        subcommand = "-".join(parts)
        if subcommand not in SUBCOMMANDS:
            raise self.error(f"unknown subcommand {subcommand!r}", sub_tok)
        args = [self.argument(kind) for kind in SUBCOMMANDS[subcommand]]
        flags: Dict[str, int] = {}
        while self.peek().type == "name":
            key = self.advance()
            if key.value not in FLAGS:
                raise self.error(f"unknown flag {key.value!r}", key)
            self.expect("equal")
            flags[key.value] = self.expect("num").value
        self.session.command = Command(target.value, subcommand, tuple(args), flags)

    def word(self) -> Token:
        """A subcommand fragment; keywords such as ``check`` are allowed."""
        tok = self.peek()
        if tok.type not in ("name", "keyword"):
            raise self.error("expected a subcommand", tok)
        return self.advance()

    def argument(self, kind: str) -> Any:
        if kind == "int":
            return self.expect("num").value
        if kind == "name":
            tok = self.expect("name")
            if not self.session.declared(tok.value):
                raise UndeclaredName(f"{tok.value!r} is not declared", tok.line, tok.column, tok.value)
            return tok.value
        if self.peek().type == "lbr":
            self.advance()
            entries = self.row_entries()
            return FreeVector.of(entries)
        return FreeVector.of([_ExpressionParser(self).expression()])

    def matrix(self) -> List[List[WeylElement]]:
        self.expect("lbr")
        rows: List[List[WeylElement]] = []
        if self.accept("rbr"):
            return rows
        while True:
            self.expect("lbr")
            rows.append(self.row_entries())
            if self.accept("rbr"):
                return rows
            self.expect("comma")

    def row_entries(self) -> List[WeylElement]:
        """Entries after an opening bracket, consuming the closing one."""
        entries: List[WeylElement] = []
        if self.accept("rbr"):
            return entries
        while True:
            entries.append(_ExpressionParser(self).expression())
            if self.accept("rbr"):
                return entries
            self.expect("comma")


def parse(source: str) -> SessionInput:
    """
    Parse a session.

    Raises
    ------
    ParseError
        For every malformed input, with line, column and the offending token.
        Errors raised by the algebra while evaluating elements are converted.
    """
    parser = SessionParser(source)
    try:
        return parser.parse()
    except ParseError:
        raise
    except WeylFiberError as exc:
        raise parser.error(exc.message) from exc
    except Exception as exc:
        raise parser.error(f"malformed input ({exc.__class__.__name__})") from exc


def parse_element(text: str, n: int, ring: str = "QQ") -> WeylElement:
    """Parse a single element of W(n) over QQ or QZ."""
    session = SessionParser(text)
    session.tokens = list(tokenize(text))
    session.ambient_n = n
    session.ring_tag = RINGS[ring]
    try:
        value = _ExpressionParser(session).expression()
        session.expect("end")
    except ParseError:
        raise
    except WeylFiberError as exc:
        raise session.error(exc.message) from exc
    return value


def parse_scalar(text: str, ring: str = "QZ") -> Any:
    """Parse a scalar literal such as ``(1+z)/(1-z)`` or ``-3/4``."""
    e = parse_element(text, 1, ring)
    origin = (0,)
    if not e:
        return coerce_scalar(RINGS[ring], 0)
    if len(e.terms) != 1 or e.terms[0][0] != (origin, origin):
        raise ParseError("not a scalar", 1, 1, text)
    return e.terms[0][1]
