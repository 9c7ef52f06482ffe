"""Fuzzy semantics with selectable t-norm/t-conorm families.

Statements over a boolean codomain bind the scalar probability of the true
outcome as a truth degree; `true(x)` reads such degrees back. Statements
over other finite codomains aggregate disjointly: big-oplus of
weight-tnorm-body over all outcomes. Negation is 1-x for every family.

All family operations are written to accept plain numbers or dual numbers,
so the same recursion yields values and forward-mode gradients. At min/max
kinks the first argument's one-sided derivative is used.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from . import syntax as s
from .errors import TrueOnNonUnit, ZeroProbability
from .interpretation import EMPTY_ENV, Env, Interpretation, apply_predicate, eval_term
from .semiring import Dual, as_value
from .values import FALSE, TRUE, Bool, Int, Real, Record, Symbol


def _const_like(x, c: int):
    # ints keep Fraction arithmetic exact on the non-dual path
    return Dual(float(c)) if isinstance(x, Dual) else c


class TNormFamily:
    """A named t-norm/t-conorm pair; negation is fixed to 1-x."""

    def __init__(self, name: str, tnorm, tconorm):
        self.name = name
        self.tnorm = tnorm
        self.tconorm = tconorm

    @staticmethod
    def negation(a):
        return 1 - a

    def implication(self, a, b):
        return self.tconorm(1 - a, b)

    def __repr__(self) -> str:
        return f"TNormFamily({self.name!r})"


def _godel_tnorm(a, b):
    return a if as_value(a) <= as_value(b) else b


def _godel_tconorm(a, b):
    return a if as_value(a) >= as_value(b) else b


def _product_tnorm(a, b):
    return a * b


def _product_tconorm(a, b):
    return a + b - a * b


def _luka_tnorm(a, b):
    z = a + b - 1
    return z if as_value(z) > 0 else _const_like(z, 0)


def _luka_tconorm(a, b):
    z = a + b
    return z if as_value(z) < 1 else _const_like(z, 1)


GODEL = TNormFamily("godel", _godel_tnorm, _godel_tconorm)
PRODUCT = TNormFamily("product", _product_tnorm, _product_tconorm)
LUKASIEWICZ = TNormFamily("lukasiewicz", _luka_tnorm, _luka_tconorm)

TNORM_FAMILIES = {"godel": GODEL, "product": PRODUCT, "lukasiewicz": LUKASIEWICZ}

_VALUE_TYPES = (Int, Real, Bool, Symbol, Record)


def _resolve(family) -> TNormFamily:
    if isinstance(family, str):
        return TNORM_FAMILIES[family]
    return family


def _embed_boundary(v):
    """Truth degrees that are exactly 0 or 1 re-enter discrete positions
    (predicate and function arguments) as booleans; other degrees pass
    through unchanged."""
    if isinstance(v, Dual):
        v = v.value
    if isinstance(v, (int, float, Fraction)) and not isinstance(v, bool):
        if v == 0:
            return FALSE
        if v == 1:
            return TRUE
    return v


def eval_fuzzy(
    f: s.Formula,
    interp: Interpretation,
    env: Env = EMPTY_ENV,
    family: TNormFamily | str = PRODUCT,
    stmt_family: TNormFamily | str | None = None,
    with_tangent: bool = False,
):
    """Fuzzy truth value in [0, 1] (a dual number when with_tangent is set).

    stmt_family selects the oplus/otimes pair used inside the non-boolean
    statement rule; it defaults to the connective family.
    """
    fam = _resolve(family)
    sfam = fam if stmt_family is None else _resolve(stmt_family)
    return _eval(f, interp, env, fam, sfam, with_tangent)


def _eval(f: s.Formula, interp: Interpretation, env: Env, fam: TNormFamily, sfam: TNormFamily, tang: bool):
    if isinstance(f, s.ForAll):
        elems = interp.domain(f.domain).elements
        if not elems:
            return 1
        acc = _eval(f.body, interp, env.bind(f.var, elems[0]), fam, sfam, tang)
        for a in elems[1:]:
            acc = fam.tnorm(acc, _eval(f.body, interp, env.bind(f.var, a), fam, sfam, tang))
        return acc
    if isinstance(f, s.Exists):
        elems = interp.domain(f.domain).elements
        if not elems:
            return 0
        acc = _eval(f.body, interp, env.bind(f.var, elems[0]), fam, sfam, tang)
        for a in elems[1:]:
            acc = fam.tconorm(acc, _eval(f.body, interp, env.bind(f.var, a), fam, sfam, tang))
        return acc
    if isinstance(f, s.And):
        return fam.tnorm(_eval(f.left, interp, env, fam, sfam, tang), _eval(f.right, interp, env, fam, sfam, tang))
    if isinstance(f, s.Or):
        return fam.tconorm(_eval(f.left, interp, env, fam, sfam, tang), _eval(f.right, interp, env, fam, sfam, tang))
    if isinstance(f, s.Implies):
        return fam.implication(_eval(f.left, interp, env, fam, sfam, tang), _eval(f.right, interp, env, fam, sfam, tang))
    if isinstance(f, s.Not):
        return 1 - _eval(f.body, interp, env, fam, sfam, tang)
    if isinstance(f, s.Pred):
        if f.name == "true" and len(f.args) == 1:
            return _eval_true(f.args[0], interp, env)
        args = [_embed_boundary(eval_term(a, interp, env)) for a in f.args]
        return 1 if apply_predicate(f.name, args, interp) else 0
    if isinstance(f, s.Statement):
        fn = interp.function(f.func)
        args = tuple(_embed_boundary(eval_term(a, interp, env)) for a in f.args)
        if fn.codomain.is_boolean:
            # boolean codomain: bind the probability of the true outcome as a degree
            if tang:
                entries = fn.query_entries(args, interp.params)
                degree = next(Dual(float(p), tan or {}) for v, p, tan in entries if v == TRUE)
            else:
                degree = fn.query(args, interp.params).prob_of(TRUE)
            return _eval(f.body, interp, env.bind(f.var, degree), fam, sfam, tang)
        if tang:
            entries = [(v, Dual(float(p), tan or {})) for v, p, tan in fn.query_entries(args, interp.params)]
        else:
            entries = list(fn.query(args, interp.params).support)
        v0, w0 = entries[0]
        acc = sfam.tnorm(w0, _eval(f.body, interp, env.bind(f.var, v0), fam, sfam, tang))
        for v, w in entries[1:]:
            acc = sfam.tconorm(acc, sfam.tnorm(w, _eval(f.body, interp, env.bind(f.var, v), fam, sfam, tang)))
        return acc
    raise TypeError(f"cannot evaluate sugar node {type(f).__name__}; desugar first")


def _eval_true(arg: s.Term, interp: Interpretation, env: Env):
    v = eval_term(arg, interp, env)
    if isinstance(v, Bool):
        return 1 if v.b else 0
    if isinstance(v, Int) and v.i in (0, 1):
        return v.i
    if isinstance(v, Dual):
        if 0.0 <= v.value <= 1.0:
            return v
        raise TrueOnNonUnit(f"true() received {v.value}, outside [0, 1]")
    if isinstance(v, (int, float, Fraction)) and not isinstance(v, bool):
        if 0 <= v <= 1:
            return v
        raise TrueOnNonUnit(f"true() received {v}, outside [0, 1]")
    raise TrueOnNonUnit(f"true() received non-numeric {v!r}")


def grad_fuzzy(
    f: s.Formula,
    interp: Interpretation,
    family: TNormFamily | str = PRODUCT,
    transform: str = "neg",
    stmt_family: TNormFamily | str | None = None,
) -> np.ndarray:
    """Loss gradient through the t-norm operations (forward-mode duals).

    transform: 'neg' for L = -value (the fuzzy default), 'neg_log', or 'value'.
    """
    out = eval_fuzzy(f, interp, EMPTY_ENV, family, stmt_family, with_tangent=True)
    if not isinstance(out, Dual):
        out = Dual(float(out))
    grad = np.zeros(interp.n_params())
    if transform == "neg":
        for k, dv in out.tangent.items():
            grad[k] = -dv
    elif transform == "neg_log":
        if out.value <= 0.0:
            raise ZeroProbability(f"formula has truth value {out.value}; -log loss undefined")
        for k, dv in out.tangent.items():
            grad[k] = -dv / out.value
    elif transform == "value":
        for k, dv in out.tangent.items():
            grad[k] = dv
    else:
        raise ValueError(f"unknown transform {transform!r}")
    return grad
