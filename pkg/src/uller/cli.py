"""Command-line driver: parse, evaluate, differentiate, train, search, check.

Exit codes: 0 success, 1 domain error (bad input files, evaluation failure),
2 usage error. All numbers print with 12 significant digits; --json switches
to structured output. ULLER_COLOR=0|1 forces diagnostics coloring off/on.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

import numpy as np

from . import syntax as s
from .classical import eval_classical
from .errors import UllerError
from .fuzzy import TNORM_FAMILIES, eval_fuzzy
from .interpretation import Interpretation, interpretation_to_dict, load_interpretation
from .learning import TrainConfig, adversarial_search, train
from .parser import parse_formulas
from .printer import formula_to_json
from .prob import eval_max, eval_prob, grad_prob
from .fuzzy import grad_fuzzy
from .sample import estimate_prob, grad_score_detailed
from .values import value_from_json, value_to_json

SEMANTICS = ("classical", "prob", "viterbi", "fuzzy", "sample")


def fmt(x: float) -> str:
    # fixed 12 decimal places: 1/6 -> 0.166666666667, 1/12 -> 0.083333333333
    return f"{float(x):.12f}"


def _conjoin(formulas: list[s.Formula]) -> s.Formula:
    out = formulas[0]
    for f in formulas[1:]:
        out = s.And(out, f)
    return out


def _load_program(path: str) -> list[s.Formula]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_formulas(fh.read())


def _load_interp(args) -> Interpretation:
    interp = load_interpretation(args.interp, exact=getattr(args, "exact", False))
    if getattr(args, "data", None):
        with open(args.data, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        interp = _merge_datasets(interp, doc)
    return interp


def _merge_datasets(interp: Interpretation, doc: dict) -> Interpretation:
    from .errors import SchemaError
    from .interpretation import DomainDef

    if not isinstance(doc, dict) or "datasets" not in doc:
        raise SchemaError("data file must be an object with a 'datasets' key")
    domains = dict(interp.domains)
    for name, records in doc["datasets"].items():
        if not isinstance(records, list):
            raise SchemaError("dataset must be a list of records", f"$.datasets.{name}")
        domains[name] = DomainDef(name, [value_from_json(r, f"$.datasets.{name}[{i}]") for i, r in enumerate(records)])
    from dataclasses import replace

    return replace(interp, domains=domains)


def _emit(args, plain: str, structured: dict) -> None:
    if args.json:
        print(json.dumps(structured, sort_keys=True))
    else:
        print(plain)


def cmd_parse(args) -> int:
    formulas = _load_program(args.program)
    encoded = [formula_to_json(f) for f in formulas]
    doc = encoded[0] if len(encoded) == 1 else {"node": "Program", "formulas": encoded}
    print(json.dumps(doc, sort_keys=True, indent=None if args.json else 2))
    return 0


def cmd_eval(args) -> int:
    formulas = _load_program(args.program)
    interp = _load_interp(args)
    f = _conjoin(formulas)
    if args.semantics == "classical":
        v = eval_classical(f, interp)
        _emit(args, str(v), {"semantics": "classical", "value": v})
    elif args.semantics == "prob":
        v = eval_prob(f, interp)
        if args.exact and isinstance(v, Fraction):
            _emit(args, str(v), {"semantics": "prob", "value": str(v), "float": float(v)})
        else:
            _emit(args, fmt(v), {"semantics": "prob", "value": float(v)})
    elif args.semantics == "viterbi":
        v = eval_max(f, interp)
        _emit(args, fmt(v), {"semantics": "viterbi", "value": float(v)})
    elif args.semantics == "fuzzy":
        v = eval_fuzzy(f, interp, family=args.tnorm)
        _emit(args, fmt(float(v)), {"semantics": "fuzzy", "tnorm": args.tnorm, "value": float(v)})
    elif args.semantics == "sample":
        mean, se = estimate_prob(f, interp, args.samples, args.seed, workers=args.threads)
        _emit(
            args,
            fmt(mean),
            {"semantics": "sample", "value": mean, "std_error": se, "samples": args.samples, "seed": args.seed},
        )
    return 0


def cmd_grad(args) -> int:
    formulas = _load_program(args.program)
    interp = _load_interp(args)
    f = _conjoin(formulas)
    transform = args.transform or ("neg_log" if args.semantics == "prob" else "neg")
    if args.estimator == "exact":
        if args.semantics == "prob":
            g = grad_prob(f, interp, transform=transform)
        else:
            g = grad_fuzzy(f, interp, family=args.tnorm, transform=transform)
        structured = {"gradient": [float(x) for x in g], "estimator": "exact", "transform": transform}
    else:
        est = grad_score_detailed(f, interp, args.samples, args.seed, transform=transform)
        g = est.gradient
        structured = {
            "gradient": [float(x) for x in g],
            "std_error": [float(x) for x in est.std_error],
            "estimator": "score",
            "transform": transform,
            "samples": args.samples,
            "seed": args.seed,
        }
    _emit(args, "[" + ", ".join(fmt(x) for x in g) + "]", structured)
    return 0


def cmd_train(args) -> int:
    formulas = _load_program(args.program)
    interp = _load_interp(args)
    weights = [float(w) for w in args.weights.split(",")] if args.weights else None
    dataset = interp.domain(args.dataset).elements
    config = TrainConfig(
        semantics=args.semantics,
        tnorm=args.tnorm,
        estimator=args.estimator,
        n_samples=args.samples,
        optimizer=args.optimizer,
        lr=args.lr,
        batch_size=args.batch,
        epochs=args.epochs,
        seed=args.seed,
    )
    trained, report = train(formulas, interp, dataset, args.dataset, config, weights=weights)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(interpretation_to_dict(trained), fh, indent=2, sort_keys=True)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            for rec in report:
                fh.write(json.dumps(rec.to_dict(), sort_keys=True) + "\n")
    final = report[-1] if report else None
    summary = {
        "epochs": len(report),
        "final_loss": final.loss if final else None,
        "final_satisfaction": final.satisfaction if final else None,
    }
    plain = (
        f"trained {len(report)} epochs; final loss {fmt(final.loss)}, satisfaction {fmt(final.satisfaction)}"
        if final
        else "trained 0 epochs"
    )
    _emit(args, plain, summary)
    return 0


def cmd_search(args) -> int:
    formulas = _load_program(args.program)
    interp = _load_interp(args)
    f = _conjoin(formulas)
    best, score = adversarial_search(
        f, interp, args.dataset, semantics=args.semantics, tnorm=args.tnorm, maximize=args.maximize
    )
    _emit(
        args,
        f"{json.dumps(value_to_json(best), sort_keys=True)} {fmt(score)}",
        {"input": value_to_json(best), "score": score, "maximize": args.maximize},
    )
    return 0


def cmd_check(args) -> int:
    formulas = _load_program(args.program)
    interp = _load_interp(args)
    problems: list[str] = []
    for f in formulas:
        problems.extend(check_formula(f, interp))
    if problems:
        for p in problems:
            print(_color_error(p), file=sys.stderr)
        return 1
    _emit(args, "ok", {"ok": True})
    return 0


def check_formula(f: s.Formula, interp: Interpretation) -> list[str]:
    """Static validation: referenced domains, functions (with arity),
    predicates and constants must all exist."""
    problems = []
    for node in s.walk(f):
        if isinstance(node, (s.ForAll, s.Exists)):
            if node.domain not in interp.domains:
                problems.append(f"unknown domain {node.domain!r} at {node.span}")
        elif isinstance(node, s.Statement):
            fn = interp.functions.get(node.func)
            if fn is None:
                problems.append(f"unknown function {node.func!r} at {node.span}")
            elif fn.arity != len(node.args):
                problems.append(
                    f"function {node.func!r} expects {fn.arity} arguments, got {len(node.args)} at {node.span}"
                )
        elif isinstance(node, s.Pred):
            if node.name not in interp.predicates:
                problems.append(f"unknown predicate {node.name!r} at {node.span}")
        elif isinstance(node, s.Const):
            if node.name not in interp.constants:
                problems.append(f"unknown constant {node.name!r} at {node.span}")
    return problems


def _use_color() -> bool:
    flag = os.environ.get("ULLER_COLOR")
    if flag == "1":
        return True
    if flag == "0":
        return False
    return sys.stderr.isatty()


def _color_error(msg: str) -> str:
    if _use_color():
        return f"\x1b[31merror:\x1b[0m {msg}"
    return f"error: {msg}"


def build_parser() -> argparse.ArgumentParser:
    from . import __version__

    root = argparse.ArgumentParser(prog="uller", description=__doc__)
    root.add_argument("--version", action="version", version=__version__)
    sub = root.add_subparsers(dest="command", required=True)

    def common(p, interp_required=True):
        p.add_argument("--program", required=True, help="program file (.uller)")
        if interp_required:
            p.add_argument("--interp", required=True, help="interpretation file (.json)")
            p.add_argument("--data", help="dataset file merged over the interpretation")
        p.add_argument("--json", action="store_true", help="structured JSON output")
        p.add_argument("--threads", type=int, default=1, help="worker threads for sampling")

    p = sub.add_parser("parse", help="print the canonical AST")
    p.add_argument("--program", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_parse)

    p = sub.add_parser("eval", help="evaluate under a chosen semantics")
    common(p)
    p.add_argument("--semantics", choices=SEMANTICS, default="prob")
    p.add_argument("--tnorm", choices=sorted(TNORM_FAMILIES), default="product")
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exact", action="store_true", help="keep rational probabilities exact")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("grad", help="loss gradient w.r.t. the parameter vector")
    common(p)
    p.add_argument("--semantics", choices=("prob", "fuzzy"), default="prob")
    p.add_argument("--tnorm", choices=sorted(TNORM_FAMILIES), default="product")
    p.add_argument("--estimator", choices=("exact", "score"), default="exact")
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--transform", choices=("neg", "neg_log", "value"))
    p.set_defaults(fn=cmd_grad)

    p = sub.add_parser("train", help="gradient-descent training of parameterised functions")
    common(p)
    p.add_argument("--semantics", choices=("prob", "fuzzy"), default="prob")
    p.add_argument("--tnorm", choices=sorted(TNORM_FAMILIES), default="product")
    p.add_argument("--estimator", choices=("exact", "score"), default="exact")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--dataset", required=True, help="domain symbol bound to the dataset")
    p.add_argument("--epochs", type=int, default=10)
    p.add_argument("--batch", type=int, default=32)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lr", type=float, default=1e-2)
    p.add_argument("--optimizer", choices=("adam", "sgd"), default="adam")
    p.add_argument("--weights", help="comma-separated per-formula weights")
    p.add_argument("--out", help="write the trained interpretation here")
    p.add_argument("--report", help="write per-epoch records here (JSON lines)")
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("search", help="enumerate inputs for the worst (or best) constraint value")
    common(p)
    p.add_argument("--semantics", choices=("prob", "fuzzy"), default="prob")
    p.add_argument("--tnorm", choices=sorted(TNORM_FAMILIES), default="product")
    p.add_argument("--dataset", required=True, help="domain symbol holding the candidates")
    p.add_argument("--maximize", action="store_true", help="return the best satisfier instead")
    p.set_defaults(fn=cmd_search)

    p = sub.add_parser("check", help="validate an interpretation against a program")
    common(p)
    p.set_defaults(fn=cmd_check)

    return root


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except UllerError as exc:
        print(_color_error(str(exc)), file=sys.stderr)
        return 1
    except OSError as exc:
        print(_color_error(str(exc)), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
