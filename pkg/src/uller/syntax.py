"""Formula and term AST, plus the desugaring rewrites.

The desugared tree has exactly one bound variable per quantifier or statement
node, no equivalence connective, and no infix comparison sugar. Source spans
are carried for diagnostics only and never take part in equality.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from .errors import DuplicateBinder
from .values import Value

Span = tuple[int, int]

IDENT_RE = r"[A-Za-z_][A-Za-z0-9_']*"

# Infix comparison sugar lowers to these predicate names.
CMP_PREDICATES = {
    "=": "eq",
    "!=": "neq",
    "<": "lt",
    "<=": "leq",
    ">": "gt",
    ">=": "geq",
}

ARITH_OPS = ("+", "-", "*")


def _span() -> Span:
    return (0, 0)


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str
    span: Span = field(default_factory=_span, compare=False, repr=False)


@dataclass(frozen=True)
class Const:
    name: str
    span: Span = field(default_factory=_span, compare=False, repr=False)


@dataclass(frozen=True)
class PropAccess:
    base: "Term"
    prop: str
    span: Span = field(default_factory=_span, compare=False, repr=False)


@dataclass(frozen=True)
class Arith:
    op: str  # one of ARITH_OPS
    left: "Term"
    right: "Term"
    span: Span = field(default_factory=_span, compare=False, repr=False)


@dataclass(frozen=True)
class Literal:
    value: Value
    span: Span = field(default_factory=_span, compare=False, repr=False)


@dataclass(frozen=True)
class RawName:
    """Parser-produced name not yet resolved to Var or Const."""

    name: str
    span: Span = field(default_factory=_span, compare=False, repr=False)


Term = Var | Const | PropAccess | Arith | Literal | RawName


# ---------------------------------------------------------------------------
# Formulas (desugared core)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ForAll:
    var: str
    domain: str
    body: "Formula"
    span: Span = field(default_factory=_span, compare=False, repr=False)


@dataclass(frozen=True)
class Exists:
    var: str
    domain: str
    body: "Formula"
    span: Span = field(default_factory=_span, compare=False, repr=False)


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"
    span: Span = field(default_factory=_span, compare=False, repr=False)


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"
    span: Span = field(default_factory=_span, compare=False, repr=False)


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"
    span: Span = field(default_factory=_span, compare=False, repr=False)


@dataclass(frozen=True)
class Not:
    body: "Formula"
    span: Span = field(default_factory=_span, compare=False, repr=False)


@dataclass(frozen=True)
class Pred:
    name: str
    args: tuple[Term, ...]
    span: Span = field(default_factory=_span, compare=False, repr=False)


@dataclass(frozen=True)
class Statement:
    """Binding form `var := func(args) (body)`: a (possibly random) function
    output bound to `var`, scoped over `body` only."""

    var: str
    func: str
    args: tuple[Term, ...]
    body: "Formula"
    span: Span = field(default_factory=_span, compare=False, repr=False)


# ---------------------------------------------------------------------------
# Sugar nodes (parser output, removed by desugar)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SugarQuant:
    """Multi-binder quantifier: forall/exists x1 in D1, x2 in D2 (body)."""

    kind: str  # "forall" | "exists"
    binders: tuple[tuple[str, str], ...]  # (var, domain)
    body: "Formula"
    span: Span = field(default_factory=_span, compare=False, repr=False)


@dataclass(frozen=True)
class SugarBindings:
    """Multi-binding statement group: x1 := f1(..), x2 := f2(..) (body)."""

    bindings: tuple[tuple[str, str, tuple[Term, ...]], ...]  # (var, func, args)
    body: "Formula"
    span: Span = field(default_factory=_span, compare=False, repr=False)


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"
    span: Span = field(default_factory=_span, compare=False, repr=False)


@dataclass(frozen=True)
class Compare:
    op: str  # key of CMP_PREDICATES
    left: Term
    right: Term
    span: Span = field(default_factory=_span, compare=False, repr=False)


Formula = (
    ForAll | Exists | And | Or | Implies | Not | Pred | Statement
    | SugarQuant | SugarBindings | Iff | Compare
)

CORE_FORMULAS = (ForAll, Exists, And, Or, Implies, Not, Pred, Statement)
CORE_TERMS = (Var, Const, PropAccess, Arith, Literal)


# ---------------------------------------------------------------------------
# Desugaring
# ---------------------------------------------------------------------------

def desugar(raw: Formula) -> Formula:
    """Rewrite sugar into the single-binder core and resolve names.

    Multi-binder quantifiers and statement groups nest left to right;
    `A <=> B` becomes `(A => B) and (B => A)`; infix comparisons become
    named predicates. Names bound by an enclosing binder become Var,
    all other names become Const. Already-desugared input is a fixed point.
    """
    return _desugar_formula(raw, frozenset())


def _desugar_formula(f: Formula, scope: frozenset[str]) -> Formula:
    if isinstance(f, SugarQuant):
        _check_distinct((v for v, _ in f.binders), f)
        body = f.body
        inner_scope = scope.union(v for v, _ in f.binders)
        out = _desugar_formula(body, inner_scope)
        ctor = ForAll if f.kind == "forall" else Exists
        for var, dom in reversed(f.binders):
            out = ctor(var, dom, out, f.span)
        return out
    if isinstance(f, SugarBindings):
        _check_distinct((v for v, _, _ in f.bindings), f)
        out = _desugar_formula(f.body, scope.union(v for v, _, _ in f.bindings))
        for var, func, args in reversed(f.bindings):
            # args of binding i see the outer scope plus earlier binders in the group
            arg_scope = scope | _earlier_binders(f.bindings, var)
            out = Statement(var, func, tuple(_desugar_term(a, arg_scope) for a in args), out, f.span)
        return out
    if isinstance(f, Iff):
        l = _desugar_formula(f.left, scope)
        r = _desugar_formula(f.right, scope)
        return And(Implies(l, r, f.span), Implies(r, l, f.span), f.span)
    if isinstance(f, Compare):
        return Pred(
            CMP_PREDICATES[f.op],
            (_desugar_term(f.left, scope), _desugar_term(f.right, scope)),
            f.span,
        )
    if isinstance(f, ForAll):
        return ForAll(f.var, f.domain, _desugar_formula(f.body, scope | {f.var}), f.span)
    if isinstance(f, Exists):
        return Exists(f.var, f.domain, _desugar_formula(f.body, scope | {f.var}), f.span)
    if isinstance(f, And):
        return And(_desugar_formula(f.left, scope), _desugar_formula(f.right, scope), f.span)
    if isinstance(f, Or):
        return Or(_desugar_formula(f.left, scope), _desugar_formula(f.right, scope), f.span)
    if isinstance(f, Implies):
        return Implies(_desugar_formula(f.left, scope), _desugar_formula(f.right, scope), f.span)
    if isinstance(f, Not):
        return Not(_desugar_formula(f.body, scope), f.span)
    if isinstance(f, Pred):
        return Pred(f.name, tuple(_desugar_term(a, scope) for a in f.args), f.span)
    if isinstance(f, Statement):
        return Statement(
            f.var,
            f.func,
            tuple(_desugar_term(a, scope) for a in f.args),
            _desugar_formula(f.body, scope | {f.var}),
            f.span,
        )
    raise TypeError(f"not a formula: {f!r}")


def _earlier_binders(bindings, var: str) -> set[str]:
    out: set[str] = set()
    for v, _, _ in bindings:
        if v == var:
            break
        out.add(v)
    return out


def _check_distinct(names: Iterator[str], node: Formula) -> None:
    seen: set[str] = set()
    for n in names:
        if n in seen:
            raise DuplicateBinder(f"variable {n!r} bound twice in one binder group at {node.span}")
        seen.add(n)


def _desugar_term(t: Term, scope: frozenset[str] | set[str]) -> Term:
    if isinstance(t, RawName):
        return Var(t.name, t.span) if t.name in scope else Const(t.name, t.span)
    if isinstance(t, (Var, Const, Literal)):
        return t
    if isinstance(t, PropAccess):
        return PropAccess(_desugar_term(t.base, scope), t.prop, t.span)
    if isinstance(t, Arith):
        return Arith(t.op, _desugar_term(t.left, scope), _desugar_term(t.right, scope), t.span)
    raise TypeError(f"not a term: {t!r}")


# ---------------------------------------------------------------------------
# Scope information
# ---------------------------------------------------------------------------

def term_free_variables(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, (Const, Literal)):
        return set()
    if isinstance(t, PropAccess):
        return term_free_variables(t.base)
    if isinstance(t, Arith):
        return term_free_variables(t.left) | term_free_variables(t.right)
    if isinstance(t, RawName):
        return {t.name}
    raise TypeError(f"not a term: {t!r}")


def free_variables(f: Formula) -> set[str]:
    """Free variables of a formula. A statement's args contribute free
    variables, while its bound variable is removed from the body's set."""
    if isinstance(f, (ForAll, Exists)):
        return free_variables(f.body) - {f.var}
    if isinstance(f, (And, Or, Implies, Iff)):
        return free_variables(f.left) | free_variables(f.right)
    if isinstance(f, Not):
        return free_variables(f.body)
    if isinstance(f, Pred):
        return set().union(*(term_free_variables(a) for a in f.args)) if f.args else set()
    if isinstance(f, Statement):
        out = free_variables(f.body) - {f.var}
        for a in f.args:
            out |= term_free_variables(a)
        return out
    if isinstance(f, SugarQuant):
        return free_variables(f.body) - {v for v, _ in f.binders}
    if isinstance(f, SugarBindings):
        out = free_variables(f.body) - {v for v, _, _ in f.bindings}
        bound: set[str] = set()
        for var, _, args in f.bindings:
            for a in args:
                out |= term_free_variables(a) - bound
            bound.add(var)
        return out
    if isinstance(f, Compare):
        return term_free_variables(f.left) | term_free_variables(f.right)
    raise TypeError(f"not a formula: {f!r}")


def bound_variables(f: Formula) -> set[str]:
    if isinstance(f, (ForAll, Exists)):
        return {f.var} | bound_variables(f.body)
    if isinstance(f, (And, Or, Implies, Iff)):
        return bound_variables(f.left) | bound_variables(f.right)
    if isinstance(f, Not):
        return bound_variables(f.body)
    if isinstance(f, Pred):
        return set()
    if isinstance(f, Statement):
        return {f.var} | bound_variables(f.body)
    if isinstance(f, SugarQuant):
        return {v for v, _ in f.binders} | bound_variables(f.body)
    if isinstance(f, SugarBindings):
        return {v for v, _, _ in f.bindings} | bound_variables(f.body)
    if isinstance(f, Compare):
        return set()
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Structural checks and traversal
# ---------------------------------------------------------------------------

def validate_desugared(f: Formula) -> None:
    """Raise TypeError if any sugar or unresolved name survives in the tree."""
    for node in walk(f):
        if not isinstance(node, CORE_FORMULAS + CORE_TERMS):
            raise TypeError(f"sugar node {type(node).__name__} in desugared tree")


def walk(f: Formula | Term) -> Iterator[Formula | Term]:
    """Preorder traversal over every formula and term node."""
    yield f
    if isinstance(f, (ForAll, Exists, Not)):
        yield from walk(f.body)
    elif isinstance(f, (And, Or, Implies, Iff)):
        yield from walk(f.left)
        yield from walk(f.right)
    elif isinstance(f, Pred):
        for a in f.args:
            yield from walk(a)
    elif isinstance(f, Statement):
        for a in f.args:
            yield from walk(a)
        yield from walk(f.body)
    elif isinstance(f, SugarQuant):
        yield from walk(f.body)
    elif isinstance(f, SugarBindings):
        for _, _, args in f.bindings:
            for a in args:
                yield from walk(a)
        yield from walk(f.body)
    elif isinstance(f, Compare):
        yield from walk(f.left)
        yield from walk(f.right)
    elif isinstance(f, (PropAccess,)):
        yield from walk(f.base)
    elif isinstance(f, Arith):
        yield from walk(f.left)
        yield from walk(f.right)
    elif isinstance(f, (Var, Const, Literal, RawName)):
        pass
    else:
        raise TypeError(f"unknown node: {f!r}")
