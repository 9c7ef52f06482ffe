"""First-order constraint language with exchangeable semantics.

Programs are first-order formulas where (possibly random) function outputs
are bound to scoped variables by statements `x := f(...) (F)`. The same
parsed tree evaluates under classical, probabilistic (exact, semiring-
generic), fuzzy (selectable t-norm family) and sampling semantics, with
exact forward-mode or estimated score-function gradients, plus a minibatch
training loop for softmax-parameterised function tables.
"""

from .classical import eval_classical
from .errors import ParseError, SchemaError, UllerError
from .fuzzy import TNORM_FAMILIES, TNormFamily, eval_fuzzy, grad_fuzzy
from .interpretation import (
    Distribution,
    DomainDef,
    Env,
    EMPTY_ENV,
    FunctionDef,
    Interpretation,
    eval_term,
    interpretation_from_dict,
    interpretation_to_dict,
    load_interpretation,
    mode_interpretation,
    query_distribution,
    restrict_domain,
)
from .learning import TrainConfig, adversarial_search, loss, satisfaction_rate, train
from .parser import parse_formulas, parse_program, parse_term
from .printer import formula_to_json, pretty_print, pretty_print_term
from .prob import eval_max, eval_prob, eval_semiring, grad_prob
from .sample import RngStream, estimate_prob, eval_sample, grad_score, grad_score_detailed
from .syntax import bound_variables, desugar, free_variables
from .values import Bool, Int, Real, Record, Symbol, Value

__version__ = "0.1.0"

__all__ = [
    "Bool",
    "Distribution",
    "DomainDef",
    "EMPTY_ENV",
    "Env",
    "FunctionDef",
    "Int",
    "Interpretation",
    "ParseError",
    "Real",
    "Record",
    "RngStream",
    "SchemaError",
    "Symbol",
    "TNORM_FAMILIES",
    "TNormFamily",
    "TrainConfig",
    "UllerError",
    "Value",
    "adversarial_search",
    "bound_variables",
    "desugar",
    "estimate_prob",
    "eval_classical",
    "eval_fuzzy",
    "eval_max",
    "eval_prob",
    "eval_sample",
    "eval_semiring",
    "eval_term",
    "formula_to_json",
    "free_variables",
    "grad_fuzzy",
    "grad_prob",
    "grad_score",
    "grad_score_detailed",
    "interpretation_from_dict",
    "interpretation_to_dict",
    "load_interpretation",
    "loss",
    "mode_interpretation",
    "parse_formulas",
    "parse_program",
    "parse_term",
    "pretty_print",
    "pretty_print_term",
    "query_distribution",
    "restrict_domain",
    "satisfaction_rate",
    "train",
    "__version__",
]
