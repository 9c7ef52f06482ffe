"""Boolean semantics: quantifiers as min/max over finite domains, statements
bind the mode (argmax) of the function's distribution."""

from __future__ import annotations

from . import syntax as s
from .interpretation import EMPTY_ENV, Env, Interpretation, apply_predicate, eval_term


def eval_classical(f: s.Formula, interp: Interpretation, env: Env = EMPTY_ENV) -> int:
    """Evaluate to 0 or 1. Short-circuits quantifier and connective
    enumeration; outputs are two-valued so this never changes the result."""
    if isinstance(f, s.ForAll):
        for a in interp.domain(f.domain).elements:
            if not eval_classical(f.body, interp, env.bind(f.var, a)):
                return 0
        return 1
    if isinstance(f, s.Exists):
        for a in interp.domain(f.domain).elements:
            if eval_classical(f.body, interp, env.bind(f.var, a)):
                return 1
        return 0
    if isinstance(f, s.And):
        return eval_classical(f.right, interp, env) if eval_classical(f.left, interp, env) else 0
    if isinstance(f, s.Or):
        return 1 if eval_classical(f.left, interp, env) else eval_classical(f.right, interp, env)
    if isinstance(f, s.Implies):
        return eval_classical(f.right, interp, env) if eval_classical(f.left, interp, env) else 1
    if isinstance(f, s.Not):
        return 1 - eval_classical(f.body, interp, env)
    if isinstance(f, s.Pred):
        args = [eval_term(a, interp, env) for a in f.args]
        return 1 if apply_predicate(f.name, args, interp) else 0
    if isinstance(f, s.Statement):
        fn = interp.function(f.func)
        args = tuple(eval_term(a, interp, env) for a in f.args)
        dist = fn.query(args, interp.params)
        mode = dist.mode(fn.codomain)
        return eval_classical(f.body, interp, env.bind(f.var, mode))
    raise TypeError(f"cannot evaluate sugar node {type(f).__name__}; desugar first")
