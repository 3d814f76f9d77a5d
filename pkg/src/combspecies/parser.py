"""Parser for the textual specification language.

    system   := [ "mode" "linear" ";" ] { sortdecl } equation { equation } ;
    sortdecl := "sort" IDENT ";" ;
    equation := IDENT "=" expr ";" ;
    expr     := term { "+" term } ;
    term     := factor { "*" factor } ;
    factor   := "0" | "1" | "Z" | IDENT | ctor | "Int" "(" expr ")" | "(" expr ")" ;
    ctor     := ("Seq"|"Set"|"Cyc"|"PSet") "(" expr [ "," card ] ")" ;
    card     := "card" (">="|"<="|"=") NAT | "card" "in" "[" range { "," range } "]" ;
    range    := NAT ".." (NAT | "inf") ;

``#`` starts a comment running to the end of the line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Tuple

from .cardinality import FULL, Card
from .errors import SpecError, SpecSyntaxError
from .expr import (
    CTOR_KINDS,
    Atom,
    Expr,
    Integral,
    One,
    Ref,
    Sum,
    Zero,
    contains,
    make_ctor,
    make_integral,
    make_prod,
    make_sum,
    pretty,
    refs,
)

KEYWORDS = {"sort", "mode", "card", "in", "inf", "Int", *CTOR_KINDS}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<nat>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>\.\.|>=|<=|[=;+*(),\[\]])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # "nat", "ident", "op", "eof"
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise SpecSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            tokens.append(Token(kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


@dataclass(frozen=True)
class Equation:
    name: str
    rhs: Expr
    integrand: Optional[Expr] = None  # the G part of Y = H + Int(G), linear mode only


@dataclass(frozen=True)
class SystemSpec:
    equations: Tuple[Equation, ...]
    sorts: Tuple[str, ...] = ("Z",)
    mode: str = "classical"
    _index: dict = field(default=None, compare=False, hash=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {eq.name: i for i, eq in enumerate(self.equations)})

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(eq.name for eq in self.equations)

    @property
    def m(self) -> int:
        return len(self.equations)

    @property
    def rhs(self) -> Tuple[Expr, ...]:
        return tuple(eq.rhs for eq in self.equations)

    @property
    def integrands(self) -> Tuple[Expr, ...]:
        return tuple(eq.integrand if eq.integrand is not None else Zero for eq in self.equations)

    def index(self, name: str) -> int:
        return self._index[name]

    def with_rhs(self, rhs, sorts=None) -> "SystemSpec":
        eqs = tuple(Equation(eq.name, h, eq.integrand) for eq, h in zip(self.equations, rhs))
        return SystemSpec(eqs, tuple(sorts) if sorts is not None else self.sorts, self.mode)

    def to_text(self) -> str:
        lines = []
        if self.mode == "linear":
            lines.append("mode linear;")
        for s in self.sorts:
            if s != "Z":
                lines.append(f"sort {s};")
        for eq in self.equations:
            rhs = eq.rhs
            if eq.integrand is not None:
                rhs = make_sum([rhs, Integral(eq.integrand)])
            lines.append(f"{eq.name} = {pretty(rhs)};")
        return "\n".join(lines) + "\n"


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0
        self.sorts: list[str] = ["Z"]
        self.mode = "classical"

    # -- token helpers -----------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def error(self, message: str, tok: Optional[Token] = None):
        tok = tok or self.tok
        shown = tok.text if tok.kind != "eof" else "end of input"
        raise SpecSyntaxError(f"{message} (found {shown!r})", tok.line, tok.col)

    def at(self, text: str) -> bool:
        return self.tok.kind in ("op", "ident") and self.tok.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}")
        tok = self.tok
        self.pos += 1
        return tok

    def expect_nat(self) -> int:
        if self.tok.kind != "nat":
            self.error("expected a natural number")
        value = int(self.tok.text)
        self.pos += 1
        return value

    def expect_ident(self) -> Token:
        tok = self.tok
        if tok.kind != "ident" or tok.text in KEYWORDS:
            self.error("expected an identifier")
        self.pos += 1
        return tok

    # -- grammar -----------------------------------------------------------

    def system(self) -> SystemSpec:
        if self.at("mode"):
            self.pos += 1
            tok = self.tok
            if tok.kind != "ident" or tok.text not in ("linear", "classical"):
                self.error("expected 'linear' or 'classical'")
            self.mode = tok.text
            self.pos += 1
            self.expect(";")
        while self.at("sort"):
            self.pos += 1
            tok = self.expect_ident()
            if tok.text in self.sorts:
                raise SpecError(f"line {tok.line}: sort {tok.text} declared twice")
            self.sorts.append(tok.text)
            self.expect(";")
        raw: list[tuple[Token, Expr]] = []
        while self.tok.kind != "eof":
            name = self.expect_ident()
            if name.text in self.sorts:
                self.error("a sort cannot be redefined as an equation", name)
            self.expect("=")
            rhs = self.expr()
            self.expect(";")
            raw.append((name, rhs))
        if not raw:
            self.error("expected at least one equation")
        return self._finish(raw)

    def expr(self) -> Expr:
        terms = [self.term()]
        while self.at("+"):
            self.pos += 1
            terms.append(self.term())
        return make_sum(terms)

    def term(self) -> Expr:
        factors = [self.factor()]
        while self.at("*"):
            self.pos += 1
            factors.append(self.factor())
        return make_prod(factors)

    def factor(self) -> Expr:
        tok = self.tok
        if tok.kind == "nat":
            if tok.text not in ("0", "1"):
                self.error("only the constants 0 and 1 are allowed")
            self.pos += 1
            return Zero if tok.text == "0" else One
        if self.at("("):
            self.pos += 1
            e = self.expr()
            self.expect(")")
            return e
        if tok.kind == "ident" and tok.text in CTOR_KINDS:
            self.pos += 1
            self.expect("(")
            child = self.expr()
            card = FULL
            if self.at(","):
                self.pos += 1
                card_tok = self.tok
                card = self.card()
                if tok.text == "PSet":
                    raise SpecError(
                        f"line {card_tok.line}, column {card_tok.col}: "
                        "PSet does not accept a cardinality constraint"
                    )
            self.expect(")")
            return make_ctor(tok.text, child, card)
        if self.at("Int"):
            self.pos += 1
            self.expect("(")
            child = self.expr()
            self.expect(")")
            return make_integral(child)
        if tok.kind == "ident" and tok.text not in KEYWORDS:
            self.pos += 1
            if tok.text in self.sorts:
                return Atom(tok.text)
            return _PendingRef(tok.text, tok.line, tok.col)
        self.error("expected a factor")

    def card(self) -> Card:
        self.expect("card")
        if self.at(">="):
            self.pos += 1
            return Card.at_least(self.expect_nat())
        if self.at("<="):
            self.pos += 1
            return Card.at_most(self.expect_nat())
        if self.at("="):
            self.pos += 1
            return Card.exactly(self.expect_nat())
        if self.at("in"):
            self.pos += 1
            self.expect("[")
            ranges = [self.range_()]
            while self.at(","):
                self.pos += 1
                ranges.append(self.range_())
            self.expect("]")
            return Card.of(*ranges)
        self.error("expected '>=', '<=', '=' or 'in'")

    def range_(self):
        start = self.tok
        lo = self.expect_nat()
        self.expect("..")
        if self.at("inf"):
            self.pos += 1
            return (lo, None)
        hi = self.expect_nat()
        if hi < lo:
            self.error("empty range", start)
        return (lo, hi)

    # -- semantic checks ---------------------------------------------------

    def _finish(self, raw) -> SystemSpec:
        names: dict[str, Token] = {}
        for tok, _ in raw:
            if tok.text in names:
                raise SpecError(f"line {tok.line}: duplicate equation name {tok.text}")
            names[tok.text] = tok
        equations = []
        for tok, rhs in raw:
            rhs = _resolve(rhs, names)
            integrand = None
            if self.mode == "linear":
                rhs, integrand = _split_integral(rhs, tok)
                for part in (rhs, integrand):
                    if part is not None and contains(part, _is_pset):
                        raise SpecError(f"line {tok.line}: PSet is not available in linear mode")
            elif contains(rhs, lambda x: isinstance(x, Integral)):
                raise SpecError(f"line {tok.line}: Int(...) requires 'mode linear;'")
            equations.append(Equation(tok.text, rhs, integrand))
        return SystemSpec(tuple(equations), tuple(self.sorts), self.mode)


def _is_pset(x: Expr) -> bool:
    return getattr(x, "kind", None) == "PSet"


@dataclass(frozen=True)
class _PendingRef(Expr):
    name: str
    line: int
    col: int


def _resolve(e: Expr, names) -> Expr:
    """Replace pending identifiers by references, checking they exist."""
    from .symbolic import rebuild

    def leaf(x):
        if isinstance(x, _PendingRef):
            if x.name not in names:
                raise SpecError(f"line {x.line}, column {x.col}: unknown name {x.name}")
            return Ref(x.name)
        return None

    return rebuild(e, leaf)


def _split_integral(rhs: Expr, tok: Token):
    terms = rhs.terms if isinstance(rhs, Sum) else (rhs,)
    h_terms, g_terms = [], []
    for t in terms:
        if isinstance(t, Integral):
            if contains(t.child, lambda x: isinstance(x, Integral)):
                raise SpecError(f"line {tok.line}: nested Int(...) is not supported")
            g_terms.append(t.child)
        elif contains(t, lambda x: isinstance(x, Integral)):
            raise SpecError(
                f"line {tok.line}: Int(...) must appear as a top-level summand "
                "(introduce an auxiliary equation)"
            )
        else:
            h_terms.append(t)
    integrand = make_sum(g_terms) if g_terms else None
    return make_sum(h_terms), integrand


def parse_system(text: str) -> SystemSpec:
    """Parse a specification; raises SpecSyntaxError or SpecError."""
    return _Parser(text).system()


def parse_expr(text: str, names=(), sorts=("Z",)) -> Expr:
    """Parse a single expression, resolving identifiers against ``names``."""
    p = _Parser(text)
    p.sorts = list(sorts)
    e = p.expr()
    if p.tok.kind != "eof":
        p.error("unexpected trailing input")
    return _resolve(e, {n: None for n in names})


def load_system(path_or_text: str) -> SystemSpec:
    """Parse a file path if it exists, otherwise the argument itself."""
    import os

    if os.path.exists(path_or_text):
        with open(path_or_text, encoding="utf-8") as fh:
            return parse_system(fh.read())
    return parse_system(path_or_text)


__all__ = ["Equation", "SystemSpec", "parse_system", "parse_expr", "load_system", "tokenize", "refs"]
