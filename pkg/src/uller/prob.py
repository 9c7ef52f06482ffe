"""Exact probabilistic semantics over finite domains, generalized to
exchangeable semiring carriers.

Quantifiers and conjunction multiply, statements sum the carrier-weighted
body over the codomain; disjunction, negation, implication and existentials
derive from the carrier complement. Evaluation is direct recursive
enumeration (exponential in nesting depth), guarded by a node budget.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from . import syntax as s
from .errors import BudgetExceeded, ZeroProbability
from .interpretation import EMPTY_ENV, Env, Interpretation, apply_predicate, eval_term
from .semiring import CARRIERS, DualCarrier, ProbCarrier

DEFAULT_NODE_BUDGET = 50_000_000


class _Budget:
    __slots__ = ("left",)

    def __init__(self, n: int):
        self.left = n

    def spend(self) -> None:
        self.left -= 1
        if self.left < 0:
            raise BudgetExceeded(
                "evaluation node budget exhausted; the formula's statement/quantifier "
                "nesting is too deep for exact enumeration"
            )


def eval_semiring(
    f: s.Formula,
    interp: Interpretation,
    env: Env = EMPTY_ENV,
    carrier=ProbCarrier,
    node_budget: int = DEFAULT_NODE_BUDGET,
):
    """Run the probabilistic recursion with the given carrier's operations."""
    if isinstance(carrier, str):
        carrier = CARRIERS[carrier]
    return _eval(f, interp, env, carrier, _Budget(node_budget))


def _eval(f: s.Formula, interp: Interpretation, env: Env, c, budget: _Budget):
    budget.spend()
    if isinstance(f, s.ForAll):
        acc = c.one
        for a in interp.domain(f.domain).elements:
            acc = c.times(acc, _eval(f.body, interp, env.bind(f.var, a), c, budget))
        return acc
    if isinstance(f, s.Exists):
        # derived form: not forall not
        acc = c.one
        for a in interp.domain(f.domain).elements:
            acc = c.times(acc, c.complement(_eval(f.body, interp, env.bind(f.var, a), c, budget)))
        return c.complement(acc)
    if isinstance(f, s.And):
        return c.times(_eval(f.left, interp, env, c, budget), _eval(f.right, interp, env, c, budget))
    if isinstance(f, s.Or):
        lv = _eval(f.left, interp, env, c, budget)
        rv = _eval(f.right, interp, env, c, budget)
        return c.complement(c.times(c.complement(lv), c.complement(rv)))
    if isinstance(f, s.Implies):
        lv = _eval(f.left, interp, env, c, budget)
        rv = _eval(f.right, interp, env, c, budget)
        return c.complement(c.times(lv, c.complement(rv)))
    if isinstance(f, s.Not):
        return c.complement(_eval(f.body, interp, env, c, budget))
    if isinstance(f, s.Pred):
        args = [eval_term(a, interp, env) for a in f.args]
        return c.from_prob(1 if apply_predicate(f.name, args, interp) else 0)
    if isinstance(f, s.Statement):
        fn = interp.function(f.func)
        args = tuple(eval_term(a, interp, env) for a in f.args)
        if c.wants_tangent:
            entries = fn.query_entries(args, interp.params)
        else:
            entries = [(v, p, None) for v, p in fn.query(args, interp.params).support]
        acc = c.zero
        for v, p, tan in entries:
            body = _eval(f.body, interp, env.bind(f.var, v), c, budget)
            acc = c.plus(acc, c.times(c.lift(p, tan), body))
        return acc
    raise TypeError(f"cannot evaluate sugar node {type(f).__name__}; desugar first")


def eval_prob(
    f: s.Formula,
    interp: Interpretation,
    env: Env = EMPTY_ENV,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> float | Fraction:
    """Probability that the formula holds; exact Fraction when the
    interpretation's probabilities are rational."""
    out = eval_semiring(f, interp, env, ProbCarrier, node_budget)
    if isinstance(out, Fraction):
        return out
    return min(1.0, max(0.0, float(out)))


def eval_max(
    f: s.Formula,
    interp: Interpretation,
    env: Env = EMPTY_ENV,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> float:
    """Probability of the single best statement assignment (Viterbi-style)."""
    return float(eval_semiring(f, interp, env, CARRIERS["max"], node_budget))


def grad_prob(
    f: s.Formula,
    interp: Interpretation,
    transform: str = "neg_log",
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> np.ndarray:
    """Exact loss gradient w.r.t. the parameter vector via the dual carrier.

    transform: 'neg_log' for L = -log p, 'neg' for L = -p, 'value' for p itself.
    """
    out = eval_semiring(f, interp, EMPTY_ENV, DualCarrier, node_budget)
    grad = np.zeros(interp.n_params())
    if transform == "neg_log":
        if out.value <= 0.0:
            raise ZeroProbability(f"formula has probability {out.value}; -log loss undefined")
        for k, dv in out.tangent.items():
            grad[k] = -dv / out.value
    elif transform == "neg":
        for k, dv in out.tangent.items():
            grad[k] = -dv
    elif transform == "value":
        for k, dv in out.tangent.items():
            grad[k] = dv
    else:
        raise ValueError(f"unknown transform {transform!r}")
    return grad
