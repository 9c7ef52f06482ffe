"""Canonical, deterministic pretty-printer for the concrete syntax.

Emits minimal parentheses: re-parsing the output reproduces the tree
(parse of print is the identity on desugared trees).
"""

from __future__ import annotations

from . import syntax as s
from .values import Bool, Int, Real, Record, Symbol

# formula precedence: implication < or < and < not < atom
_IMPL, _OR, _AND, _NOT, _ATOM = range(5)

_INFIX_PRED = {v: k for k, v in s.CMP_PREDICATES.items()}


def pretty_print(f: s.Formula) -> str:
    return _formula(f, _IMPL)


def pretty_print_term(t: s.Term) -> str:
    return _term(t, 0)


def _formula(f: s.Formula, ctx: int) -> str:
    if isinstance(f, s.Implies):
        # right-associative
        out = f"{_formula(f.left, _OR)} => {_formula(f.right, _IMPL)}"
        return _wrap(out, ctx > _IMPL)
    if isinstance(f, s.Or):
        out = f"{_formula(f.left, _OR)} or {_formula(f.right, _AND)}"
        return _wrap(out, ctx > _OR)
    if isinstance(f, s.And):
        out = f"{_formula(f.left, _AND)} and {_formula(f.right, _NOT)}"
        return _wrap(out, ctx > _AND)
    if isinstance(f, s.Not):
        return f"not {_formula(f.body, _NOT)}"
    if isinstance(f, s.ForAll):
        return f"forall {f.var} in {f.domain} ({_formula(f.body, _IMPL)})"
    if isinstance(f, s.Exists):
        return f"exists {f.var} in {f.domain} ({_formula(f.body, _IMPL)})"
    if isinstance(f, s.Statement):
        args = ", ".join(_term(a, 0) for a in f.args)
        return f"{f.var} := {f.func}({args}) ({_formula(f.body, _IMPL)})"
    if isinstance(f, s.Pred):
        if f.name in _INFIX_PRED and len(f.args) == 2:
            return f"{_term(f.args[0], 0)} {_INFIX_PRED[f.name]} {_term(f.args[1], 0)}"
        args = ", ".join(_term(a, 0) for a in f.args)
        return f"{f.name}({args})"
    raise ValueError(f"cannot print sugar node {type(f).__name__}; desugar first")


# term precedence: additive < multiplicative < postfix/primary
def _term(t: s.Term, ctx: int) -> str:
    if isinstance(t, (s.Var, s.Const)):
        return t.name
    if isinstance(t, s.RawName):
        return t.name
    if isinstance(t, s.Literal):
        return _literal(t.value)
    if isinstance(t, s.PropAccess):
        return f"{_term(t.base, 2)}.{t.prop}"
    if isinstance(t, s.Arith):
        if t.op == "*":
            out = f"{_term(t.left, 1)} * {_term(t.right, 2)}"
            return _wrap(out, ctx > 1)
        out = f"{_term(t.left, 0)} {t.op} {_term(t.right, 1)}"
        return _wrap(out, ctx > 0)
    raise ValueError(f"cannot print term {t!r}")


def _literal(v) -> str:
    if isinstance(v, Int):
        return str(v.i)
    if isinstance(v, Real):
        r = repr(v.r)
        return r if ("." in r or "e" in r or "E" in r) else r + ".0"
    if isinstance(v, Symbol):
        return '"' + v.name.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, (Bool, Record)):
        raise ValueError(f"{type(v).__name__} literals have no concrete syntax")
    raise ValueError(f"cannot print literal {v!r}")


def _wrap(out: str, need: bool) -> str:
    return f"({out})" if need else out


def formula_to_json(f: s.Formula) -> dict:
    """Stable JSON encoding of a desugared tree (spans omitted)."""
    if isinstance(f, (s.ForAll, s.Exists)):
        return {"node": type(f).__name__, "var": f.var, "domain": f.domain, "body": formula_to_json(f.body)}
    if isinstance(f, (s.And, s.Or, s.Implies)):
        return {"node": type(f).__name__, "left": formula_to_json(f.left), "right": formula_to_json(f.right)}
    if isinstance(f, s.Not):
        return {"node": "Not", "body": formula_to_json(f.body)}
    if isinstance(f, s.Pred):
        return {"node": "Pred", "name": f.name, "args": [term_to_json(a) for a in f.args]}
    if isinstance(f, s.Statement):
        return {
            "node": "Statement",
            "var": f.var,
            "func": f.func,
            "args": [term_to_json(a) for a in f.args],
            "body": formula_to_json(f.body),
        }
    raise ValueError(f"cannot encode sugar node {type(f).__name__}; desugar first")


def term_to_json(t: s.Term) -> dict:
    if isinstance(t, s.Var):
        return {"node": "Var", "name": t.name}
    if isinstance(t, s.Const):
        return {"node": "Const", "name": t.name}
    if isinstance(t, s.PropAccess):
        return {"node": "PropAccess", "base": term_to_json(t.base), "prop": t.prop}
    if isinstance(t, s.Arith):
        return {"node": "Arith", "op": t.op, "left": term_to_json(t.left), "right": term_to_json(t.right)}
    if isinstance(t, s.Literal):
        v = t.value
        if isinstance(v, Int):
            return {"node": "Literal", "type": "int", "value": v.i}
        if isinstance(v, Real):
            return {"node": "Literal", "type": "real", "value": v.r}
        if isinstance(v, Symbol):
            return {"node": "Literal", "type": "symbol", "value": v.name}
        if isinstance(v, Bool):
            return {"node": "Literal", "type": "bool", "value": v.b}
        raise ValueError(f"cannot encode literal {v!r}")
    raise ValueError(f"cannot encode term {t!r}")
