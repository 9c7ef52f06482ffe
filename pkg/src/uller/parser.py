"""Lexer and recursive-descent parser for the concrete textual syntax.

ASCII keywords with unicode aliases; `#` comments to end of line. Program
files hold one formula, or several separated by `;` which are implicitly
conjoined. The parser emits the sugared tree and hands it to the desugarer,
so callers always receive core formulas.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import syntax as s
from .errors import ParseError
from .syntax import desugar
from .values import Int, Real, Symbol

KEYWORDS = {"forall", "exists", "in", "and", "or", "not", "true"}

UNICODE_ALIASES = {
    "∀": "forall",  # ∀
    "∃": "exists",  # ∃
    "∧": "and",     # ∧
    "∨": "or",      # ∨
    "¬": "not",     # ¬
    "⇒": "=>",      # ⇒
    "∈": "in",      # ∈
}

CMP_OPS = ("!=", "<=", ">=", "=", "<", ">")

# longest-match first
_OPERATORS = (":=", "<=>", "=>", "!=", "<=", ">=", "=", "<", ">", "+", "-", "*")
_PUNCT = ("(", ")", ",", ".", ";")

_IDENT_RE = re.compile(s.IDENT_RE)
_NUM_RE = re.compile(r"\d+(\.\d+)?([eE][+-]?\d+)?", re.ASCII)


@dataclass(frozen=True)
class Token:
    kind: str  # keyword | ident | int_lit | real_lit | string_lit | operator | punct | eof
    text: str
    span: tuple[int, int]


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i = 0
    n = len(source)

    def prev_ends_term() -> bool:
        if not tokens:
            return False
        t = tokens[-1]
        return t.kind in ("ident", "int_lit", "real_lit", "string_lit") or t.text == ")"

    while i < n:
        c = source[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "#":
            while i < n and source[i] != "\n":
                i += 1
            continue
        span = (line, col)
        if c in UNICODE_ALIASES:
            alias = UNICODE_ALIASES[c]
            kind = "keyword" if alias in KEYWORDS else "operator"
            tokens.append(Token(kind, alias, span))
            i += 1
            col += 1
            continue
        if c == '"':
            j = i + 1
            buf = []
            while j < n and source[j] != '"':
                if source[j] == "\\" and j + 1 < n:
                    buf.append(source[j + 1])
                    j += 2
                else:
                    buf.append(source[j])
                    j += 1
            if j >= n:
                raise ParseError("unterminated string literal", span)
            tokens.append(Token("string_lit", "".join(buf), span))
            col += j + 1 - i
            i = j + 1
            continue
        if c == "-" and i + 1 < n and source[i + 1] in "0123456789" and not prev_ends_term():
            m = _NUM_RE.match(source, i + 1)
            text = "-" + m.group(0)
            kind = "int_lit" if m.group(1) is None and m.group(2) is None else "real_lit"
            tokens.append(Token(kind, text, span))
            col += len(text)
            i += len(text)
            continue
        if c in "0123456789":
            m = _NUM_RE.match(source, i)
            text = m.group(0)
            kind = "int_lit" if m.group(1) is None and m.group(2) is None else "real_lit"
            tokens.append(Token(kind, text, span))
            col += len(text)
            i += len(text)
            continue
        m = _IDENT_RE.match(source, i)
        if m:
            text = m.group(0)
            kind = "keyword" if text in KEYWORDS else "ident"
            tokens.append(Token(kind, text, span))
            col += len(text)
            i += len(text)
            continue
        matched = False
        for op in _OPERATORS:
            if source.startswith(op, i):
                tokens.append(Token("operator", op, span))
                col += len(op)
                i += len(op)
                matched = True
                break
        if matched:
            continue
        if c in _PUNCT:
            tokens.append(Token("punct", c, span))
            i += 1
            col += 1
            continue
        raise ParseError(f"unexpected character {c!r}", span)
    tokens.append(Token("eof", "", (line, col)))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.pos = 0

    # -- token plumbing -----------------------------------------------------

    def peek(self, ahead: int = 0) -> Token:
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.toks[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def at(self, text: str) -> bool:
        return self.peek().text == text and self.peek().kind != "string_lit"

    def expect(self, text: str, what: str | None = None) -> Token:
        t = self.peek()
        if t.text != text or t.kind == "string_lit":
            found = t.text if t.kind != "eof" else "end of input"
            raise ParseError(f"expected {what or repr(text)}, found {found!r}", t.span, [text])
        return self.next()

    def expect_ident(self, what: str = "identifier") -> Token:
        t = self.peek()
        if t.kind != "ident":
            raise ParseError(f"expected {what}, found {t.text!r}", t.span, ["ident"])
        return self.next()

    def fail(self, message: str) -> ParseError:
        t = self.peek()
        return ParseError(message + (f", found {t.text!r}" if t.kind != "eof" else ", found end of input"), t.span)

    # -- formulas -----------------------------------------------------------

    def formulas(self) -> list[s.Formula]:
        if self.peek().kind == "eof":
            raise ParseError("expected formula", self.peek().span)
        out = [self.formula()]
        while self.at(";"):
            self.next()
            if self.peek().kind == "eof":
                break
            out.append(self.formula())
        t = self.peek()
        if t.kind != "eof":
            raise self.fail("expected end of input")
        return out

    def formula(self) -> s.Formula:
        return self.implication()

    def implication(self) -> s.Formula:
        left = self.disjunction()
        if self.at("=>"):
            span = self.next().span
            return s.Implies(left, self.implication(), span)
        if self.at("<=>"):
            span = self.next().span
            return s.Iff(left, self.implication(), span)
        return left

    def disjunction(self) -> s.Formula:
        left = self.conjunction()
        while self.at("or"):
            span = self.next().span
            left = s.Or(left, self.conjunction(), span)
        return left

    def conjunction(self) -> s.Formula:
        left = self.unary()
        while self.at("and"):
            span = self.next().span
            left = s.And(left, self.unary(), span)
        return left

    def unary(self) -> s.Formula:
        t = self.peek()
        if t.text == "not" and t.kind == "keyword":
            self.next()
            return s.Not(self.unary(), t.span)
        if t.text in ("forall", "exists") and t.kind == "keyword":
            return self.quantified()
        return self.atom()

    def quantified(self) -> s.Formula:
        kw = self.next()
        binders = [self.qbinder()]
        while self.at(","):
            self.next()
            binders.append(self.qbinder())
        self.expect("(", "parenthesized body")
        body = self.formula()
        self.expect(")")
        return s.SugarQuant(kw.text, tuple(binders), body, kw.span)

    def qbinder(self) -> tuple[str, str]:
        var = self.expect_ident("bound variable")
        self.expect("in")
        dom = self.expect_ident("domain name")
        return (var.text, dom.text)

    def atom(self) -> s.Formula:
        t = self.peek()
        if t.text == "(" and t.kind == "punct":
            save = self.pos
            try:
                self.next()
                f = self.formula()
                self.expect(")")
            except ParseError:
                self.pos = save
                return self.comparison()
            nxt = self.peek()
            if nxt.text in CMP_OPS or nxt.text in s.ARITH_OPS or nxt.text == ".":
                # was a parenthesized term after all
                self.pos = save
                return self.comparison()
            return f
        if t.text == "true" and t.kind == "keyword":
            self.next()
            args = self.call_args()
            return s.Pred("true", args, t.span)
        if t.kind == "ident":
            nxt = self.peek(1)
            if nxt.text == ":=":
                return self.statement_group()
            if nxt.text == "(" and nxt.kind == "punct":
                name = self.next()
                args = self.call_args()
                return s.Pred(name.text, args, name.span)
            return self.comparison()
        if t.kind in ("int_lit", "real_lit", "string_lit"):
            return self.comparison()
        raise self.fail("expected formula")

    def statement_group(self) -> s.Formula:
        first = self.peek()
        bindings = [self.sbinding()]
        while self.at(","):
            self.next()
            bindings.append(self.sbinding())
        self.expect("(", "parenthesized statement body")
        body = self.formula()
        self.expect(")")
        return s.SugarBindings(tuple(bindings), body, first.span)

    def sbinding(self) -> tuple[str, str, tuple[s.Term, ...]]:
        var = self.expect_ident("bound variable")
        self.expect(":=")
        func = self.expect_ident("function name")
        args = self.call_args()
        return (var.text, func.text, args)

    def call_args(self) -> tuple[s.Term, ...]:
        self.expect("(")
        if self.at(")"):
            self.next()
            return ()
        args = [self.term_expr()]
        while self.at(","):
            self.next()
            args.append(self.term_expr())
        self.expect(")")
        return tuple(args)

    def comparison(self) -> s.Formula:
        left = self.term_expr()
        t = self.peek()
        if t.text not in CMP_OPS or t.kind != "operator":
            raise self.fail("expected comparison operator or predicate")
        self.next()
        right = self.term_expr()
        return s.Compare(t.text, left, right, t.span)

    # -- terms --------------------------------------------------------------

    def term_expr(self) -> s.Term:
        left = self.multiplicative()
        while self.peek().text in ("+", "-") and self.peek().kind == "operator":
            op = self.next()
            left = s.Arith(op.text, left, self.multiplicative(), op.span)
        return left

    def multiplicative(self) -> s.Term:
        left = self.postfix()
        while self.at("*"):
            op = self.next()
            left = s.Arith("*", left, self.postfix(), op.span)
        return left

    def postfix(self) -> s.Term:
        t = self.primary()
        while self.at("."):
            dot = self.next()
            prop = self.expect_ident("property name")
            t = s.PropAccess(t, prop.text, dot.span)
        return t

    def primary(self) -> s.Term:
        t = self.peek()
        if t.kind == "ident":
            self.next()
            return s.RawName(t.text, t.span)
        if t.kind == "int_lit":
            self.next()
            return s.Literal(Int(int(t.text)), t.span)
        if t.kind == "real_lit":
            self.next()
            return s.Literal(Real(float(t.text)), t.span)
        if t.kind == "string_lit":
            self.next()
            return s.Literal(Symbol(t.text), t.span)
        if t.text == "(" and t.kind == "punct":
            self.next()
            inner = self.term_expr()
            self.expect(")")
            return inner
        raise self.fail("expected term")


def parse_formulas(source: str) -> list[s.Formula]:
    """Parse a program file into its desugared formulas (one per `;` section)."""
    p = _Parser(tokenize(source))
    return [desugar(f) for f in p.formulas()]


def parse_program(source: str) -> s.Formula:
    """Parse a program; multiple `;`-separated formulas are conjoined."""
    fs = parse_formulas(source)
    out = fs[0]
    for f in fs[1:]:
        out = s.And(out, f)
    return out


def parse_term(source: str) -> s.Term:
    """Parse a single term; bare names become variables."""
    p = _Parser(tokenize(source))
    if p.peek().kind == "eof":
        raise ParseError("expected term", p.peek().span)
    t = p.term_expr()
    if p.peek().kind != "eof":
        raise p.fail("expected end of input")
    return _resolve_all_vars(t)


def _resolve_all_vars(t: s.Term) -> s.Term:
    if isinstance(t, s.RawName):
        return s.Var(t.name, t.span)
    if isinstance(t, s.PropAccess):
        return s.PropAccess(_resolve_all_vars(t.base), t.prop, t.span)
    if isinstance(t, s.Arith):
        return s.Arith(t.op, _resolve_all_vars(t.left), _resolve_all_vars(t.right), t.span)
    return t
