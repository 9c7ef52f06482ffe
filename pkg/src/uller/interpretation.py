"""Symbol meanings: domains, constants, predicates and stochastic functions.

Functions are finite conditional probability tables (or softmax-parameterised
logit tables carrying learnable weights); deterministic functions are the
special case of a unit-mass distribution. Interpretations are immutable
during evaluation; parameter updates produce a new copy sharing structure.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Callable, Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    ArithTypeError,
    ArityMismatch,
    MissingProperty,
    MissingTableRow,
    PredTypeError,
    PropertyOnNonRecord,
    SchemaError,
    UnboundVariable,
    UnknownConstant,
    UnknownDomain,
    UnknownDomainElement,
    UnknownFunction,
    UnknownPredicate,
)
from .syntax import Arith, Const, Literal, PropAccess, RawName, Term, Var
from .values import (
    FALSE,
    TRUE,
    Bool,
    Int,
    Real,
    Record,
    Symbol,
    Value,
    prob_from_json,
    value_from_json,
    value_key,
    value_to_json,
)

PROB_SUM_TOL = 1e-9

Prob = float | Fraction


# ---------------------------------------------------------------------------
# Environments
# ---------------------------------------------------------------------------

class Env:
    """Persistent variable assignment; bind() leaves the original untouched.

    Values are usually domain elements, but the fuzzy semantics may bind
    raw truth degrees (floats or dual numbers) via statements.
    """

    __slots__ = ("_name", "_value", "_parent")

    def __init__(self, name=None, value=None, parent=None):
        self._name = name
        self._value = value
        self._parent = parent

    def bind(self, name: str, value) -> "Env":
        return Env(name, value, self)

    def lookup(self, name: str):
        env = self
        while env._name is not None:
            if env._name == name:
                return env._value
            env = env._parent
        raise UnboundVariable(f"unbound variable {name!r}")

    def __contains__(self, name: str) -> bool:
        env = self
        while env._name is not None:
            if env._name == name:
                return True
            env = env._parent
        return False


EMPTY_ENV = Env()


# ---------------------------------------------------------------------------
# Domains and distributions
# ---------------------------------------------------------------------------

class DomainDef:
    """Finite, ordered set of elements; order fixes argmax tie-breaking."""

    __slots__ = ("name", "elements", "index")

    def __init__(self, name: str, elements: Sequence[Value]):
        self.name = name
        self.elements = tuple(elements)
        self.index = {v: i for i, v in enumerate(self.elements)}
        if len(self.index) != len(self.elements):
            raise SchemaError(f"domain {name!r} has duplicate elements", f"$.domains.{name}")

    @property
    def is_boolean(self) -> bool:
        return set(self.elements) == {FALSE, TRUE}

    def __repr__(self) -> str:
        return f"DomainDef({self.name!r}, {len(self.elements)} elements)"


class Distribution:
    """Finite-support distribution: ordered (value, probability) pairs."""

    __slots__ = ("support",)

    def __init__(self, support: Iterable[tuple[Value, Prob]]):
        self.support = tuple(support)
        seen = set()
        total: Prob = 0
        for v, p in self.support:
            if v in seen:
                raise SchemaError(f"duplicate support value {v!r} in distribution")
            seen.add(v)
            if p < 0 or p > 1 + PROB_SUM_TOL:
                raise SchemaError(f"probability {p} outside [0, 1]")
            total = total + p
        if abs(float(total) - 1.0) > PROB_SUM_TOL:
            raise SchemaError(f"distribution sums to {float(total)}, expected 1")

    def prob_of(self, v: Value) -> Prob:
        for atom, p in self.support:
            if atom == v:
                return p
        return 0

    def mode(self, domain: DomainDef) -> Value:
        """Most likely value; ties broken by lowest index in the codomain order."""
        best = None
        best_p: Prob = -1
        for v, p in self.support:
            if p > best_p or (p == best_p and domain.index[v] < domain.index[best]):
                best, best_p = v, p
        return best

    def __repr__(self) -> str:
        inner = ", ".join(f"{v!r}: {p}" for v, p in self.support)
        return f"Distribution({inner})"


def unit_mass(v: Value) -> Distribution:
    return Distribution([(v, 1)])


def _softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - np.max(logits)
    e = np.exp(z)
    return e / e.sum()


# ---------------------------------------------------------------------------
# Function meanings
# ---------------------------------------------------------------------------

TABLE = "table"
PARAMETERISED = "parameterised"
DETERMINISTIC_TABLE = "deterministic_table"
NATIVE = "native"
DETERMINISTIC_NATIVE = "deterministic_native"


@dataclass(frozen=True)
class FunctionDef:
    name: str
    arg_domains: tuple[str, ...]
    codomain: DomainDef
    kind: str
    table: Mapping[tuple[Value, ...], Distribution] | None = None
    det_table: Mapping[tuple[Value, ...], Value] | None = None
    param_rows: Mapping[tuple[Value, ...], int] | None = None  # row -> offset into theta
    native: Callable[..., Any] | None = None

    @property
    def arity(self) -> int:
        return len(self.arg_domains)

    def _row(self, args: tuple[Value, ...], rows: Mapping) -> Any:
        try:
            return rows[args]
        except KeyError:
            raise MissingTableRow(
                f"function {self.name!r} has no row for arguments {args!r}"
            ) from None

    def query(self, args: tuple[Value, ...], params: np.ndarray | None = None) -> Distribution:
        if len(args) != self.arity:
            raise ArityMismatch(f"function {self.name!r} expects {self.arity} arguments, got {len(args)}")
        if self.kind == TABLE:
            return self._row(args, self.table)
        if self.kind == DETERMINISTIC_TABLE:
            return unit_mass(self._row(args, self.det_table))
        if self.kind == PARAMETERISED:
            off = self._row(args, self.param_rows)
            probs = _softmax(params[off:off + len(self.codomain.elements)])
            return Distribution(list(zip(self.codomain.elements, probs.tolist())))
        if self.kind == NATIVE:
            return self.native(*args)
        if self.kind == DETERMINISTIC_NATIVE:
            return unit_mass(self.native(*args))
        raise ValueError(f"unknown function kind {self.kind!r}")

    def query_entries(
        self, args: tuple[Value, ...], params: np.ndarray | None = None
    ) -> list[tuple[Value, Prob, dict[int, float] | None]]:
        """Support entries with per-parameter probability tangents.

        Only softmax rows have nonzero tangents: dp_a/dtheta_j = p_a (1{a=j} - p_j)
        over the row's own logit slots.
        """
        if self.kind == PARAMETERISED:
            if len(args) != self.arity:
                raise ArityMismatch(f"function {self.name!r} expects {self.arity} arguments, got {len(args)}")
            off = self._row(args, self.param_rows)
            k = len(self.codomain.elements)
            p = _softmax(params[off:off + k])
            out = []
            for a in range(k):
                tan = {off + j: p[a] * ((1.0 if a == j else 0.0) - p[j]) for j in range(k)}
                out.append((self.codomain.elements[a], float(p[a]), tan))
            return out
        dist = self.query(args, params)
        return [(v, pr, None) for v, pr in dist.support]

    def mode_version(self, params: np.ndarray | None) -> "FunctionDef":
        """Deterministic argmax counterpart; deterministic kinds are fixed points."""
        if self.kind in (DETERMINISTIC_TABLE, DETERMINISTIC_NATIVE):
            return self
        if self.kind == TABLE:
            det = {row: dist.mode(self.codomain) for row, dist in self.table.items()}
            return FunctionDef(self.name, self.arg_domains, self.codomain, DETERMINISTIC_TABLE, det_table=det)
        if self.kind == PARAMETERISED:
            det = {}
            for row, off in self.param_rows.items():
                logits = params[off:off + len(self.codomain.elements)]
                det[row] = self.codomain.elements[int(np.argmax(logits))]
            return FunctionDef(self.name, self.arg_domains, self.codomain, DETERMINISTIC_TABLE, det_table=det)
        if self.kind == NATIVE:
            base, codomain = self.native, self.codomain
            return FunctionDef(
                self.name, self.arg_domains, self.codomain, DETERMINISTIC_NATIVE,
                native=lambda *args: base(*args).mode(codomain),
            )
        raise ValueError(f"unknown function kind {self.kind!r}")


# ---------------------------------------------------------------------------
# Builtin predicates
# ---------------------------------------------------------------------------

def _as_number(v) -> int | float | Fraction:
    if isinstance(v, Int):
        return v.i
    if isinstance(v, Real):
        return v.r
    if isinstance(v, (int, float, Fraction)) and not isinstance(v, bool):
        return v
    raise PredTypeError(f"expected a number, got {v!r}")


def _pred_true(x) -> bool:
    if isinstance(x, Bool):
        return x.b
    if isinstance(x, Int) and x.i in (0, 1):
        return bool(x.i)
    if isinstance(x, (int, float, Fraction)) and not isinstance(x, bool) and x in (0, 1):
        return bool(x)
    raise PredTypeError(f"true() expects a boolean, got {x!r}")


def _pred_eq(a, b) -> bool:
    if isinstance(a, (Int, Real, Bool, Symbol, Record)) and isinstance(b, (Int, Real, Bool, Symbol, Record)):
        return a == b
    if not isinstance(a, (Int, Real, Bool, Symbol, Record)) and not isinstance(b, (Int, Real, Bool, Symbol, Record)):
        return a == b
    return False


def _pred_even(x) -> bool:
    if isinstance(x, Int):
        return x.i % 2 == 0
    raise PredTypeError(f"even() expects an integer, got {x!r}")


def _pred_odd(x) -> bool:
    if isinstance(x, Int):
        return x.i % 2 == 1
    raise PredTypeError(f"odd() expects an integer, got {x!r}")


BUILTIN_PREDICATES: dict[str, Callable[..., bool]] = {
    "true": _pred_true,
    "eq": _pred_eq,
    "neq": lambda a, b: not _pred_eq(a, b),
    "lt": lambda a, b: _as_number(a) < _as_number(b),
    "leq": lambda a, b: _as_number(a) <= _as_number(b),
    "gt": lambda a, b: _as_number(a) > _as_number(b),
    "geq": lambda a, b: _as_number(a) >= _as_number(b),
    "even": _pred_even,
    "odd": _pred_odd,
}

BOOL_DOMAIN = DomainDef("bool", (FALSE, TRUE))


# ---------------------------------------------------------------------------
# Interpretation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Interpretation:
    domains: Mapping[str, DomainDef] = field(default_factory=dict)
    constants: Mapping[str, Value] = field(default_factory=dict)
    functions: Mapping[str, FunctionDef] = field(default_factory=dict)
    predicates: Mapping[str, Callable[..., bool]] = field(default_factory=dict)
    params: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        preds = dict(BUILTIN_PREDICATES)
        preds.update(self.predicates)
        object.__setattr__(self, "predicates", preds)
        doms = dict(self.domains)
        doms.setdefault("bool", BOOL_DOMAIN)
        object.__setattr__(self, "domains", doms)

    def domain(self, name: str) -> DomainDef:
        try:
            return self.domains[name]
        except KeyError:
            raise UnknownDomain(f"unknown domain {name!r}") from None

    def function(self, name: str) -> FunctionDef:
        try:
            return self.functions[name]
        except KeyError:
            raise UnknownFunction(f"unknown function {name!r}") from None

    def predicate(self, name: str) -> Callable[..., bool]:
        try:
            return self.predicates[name]
        except KeyError:
            raise UnknownPredicate(f"unknown predicate {name!r}") from None

    def with_params(self, params: np.ndarray) -> "Interpretation":
        return replace(self, params=np.asarray(params, dtype=float))

    def n_params(self) -> int:
        return int(self.params.shape[0])


def query_distribution(fname: str, args: Sequence[Value], interp: Interpretation) -> Distribution:
    return interp.function(fname).query(tuple(args), interp.params)


def mode_interpretation(interp: Interpretation) -> Interpretation:
    fns = {name: fn.mode_version(interp.params) for name, fn in interp.functions.items()}
    return replace(interp, functions=fns)


def restrict_domain(interp: Interpretation, name: str, subset: Sequence[Value]) -> Interpretation:
    base = interp.domain(name)
    for v in subset:
        if v not in base.index:
            raise UnknownDomainElement(f"{v!r} is not an element of domain {name!r}")
    doms = dict(interp.domains)
    doms[name] = DomainDef(name, subset)
    return replace(interp, domains=doms)


# ---------------------------------------------------------------------------
# Term evaluation
# ---------------------------------------------------------------------------

def eval_term(t: Term, interp: Interpretation, env: Env = EMPTY_ENV):
    if isinstance(t, Var):
        env_ = env
        while env_._name is not None:
            if env_._name == t.name:
                return env_._value
            env_ = env_._parent
        if t.name in interp.constants:
            return interp.constants[t.name]
        raise UnboundVariable(f"unbound variable {t.name!r}")
    if isinstance(t, Const):
        try:
            return interp.constants[t.name]
        except KeyError:
            raise UnknownConstant(f"unknown constant {t.name!r}") from None
    if isinstance(t, Literal):
        return t.value
    if isinstance(t, PropAccess):
        base = eval_term(t.base, interp, env)
        if not isinstance(base, Record):
            raise PropertyOnNonRecord(f"property {t.prop!r} requested on non-record {base!r}")
        try:
            return base.props[t.prop]
        except KeyError:
            raise MissingProperty(f"record has no property {t.prop!r}") from None
    if isinstance(t, Arith):
        left = eval_term(t.left, interp, env)
        right = eval_term(t.right, interp, env)
        return _arith(t.op, left, right)
    if isinstance(t, RawName):
        raise TypeError("unresolved name in evaluated term; desugar first")
    raise TypeError(f"not a term: {t!r}")


def _arith(op: str, left, right) -> Value:
    for v in (left, right):
        if not isinstance(v, (Int, Real)):
            raise ArithTypeError(f"arithmetic on non-numeric value {v!r}")
    a = left.i if isinstance(left, Int) else left.r
    b = right.i if isinstance(right, Int) else right.r
    if op == "+":
        r = a + b
    elif op == "-":
        r = a - b
    elif op == "*":
        r = a * b
    else:
        raise ArithTypeError(f"unsupported arithmetic operator {op!r}")
    if isinstance(left, Int) and isinstance(right, Int):
        return Int(r)
    return Real(float(r))


def apply_predicate(name: str, args: Sequence, interp: Interpretation) -> bool:
    fn = interp.predicate(name)
    try:
        result = fn(*args)
    except TypeError as exc:
        raise ArityMismatch(f"predicate {name!r}: {exc}") from None
    return bool(result)


# ---------------------------------------------------------------------------
# JSON schema
# ---------------------------------------------------------------------------

_TOP_KEYS = {"domains", "constants", "functions", "datasets"}
_FN_KINDS = {TABLE, PARAMETERISED, DETERMINISTIC_TABLE}


def interpretation_from_dict(doc: dict, exact: bool = False) -> Interpretation:
    """Build a fully validated interpretation from the JSON schema.

    With exact=False, rational "p/q" probabilities are converted to floats;
    with exact=True they stay Fractions and exact arithmetic flows through
    the probabilistic evaluator.
    """
    if not isinstance(doc, dict):
        raise SchemaError("interpretation document must be a JSON object")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise SchemaError(f"unknown top-level keys {sorted(unknown)}")

    domains: dict[str, DomainDef] = {}
    for name, elems in _expect_obj(doc.get("domains", {}), "$.domains").items():
        if not isinstance(elems, list):
            raise SchemaError("domain must be a list of values", f"$.domains.{name}")
        domains[name] = DomainDef(name, [value_from_json(e, f"$.domains.{name}[{i}]") for i, e in enumerate(elems)])

    for name, records in _expect_obj(doc.get("datasets", {}), "$.datasets").items():
        if not isinstance(records, list):
            raise SchemaError("dataset must be a list of records", f"$.datasets.{name}")
        domains[name] = DomainDef(name, [value_from_json(r, f"$.datasets.{name}[{i}]") for i, r in enumerate(records)])

    domains.setdefault("bool", BOOL_DOMAIN)

    constants = {
        name: value_from_json(v, f"$.constants.{name}")
        for name, v in _expect_obj(doc.get("constants", {}), "$.constants").items()
    }

    functions: dict[str, FunctionDef] = {}
    theta: list[float] = []
    for name, spec in _expect_obj(doc.get("functions", {}), "$.functions").items():
        path = f"$.functions.{name}"
        spec = _expect_obj(spec, path)
        for key in ("args", "codomain", "kind", "rows"):
            if key not in spec:
                raise SchemaError(f"missing key {key!r}", path)
        arg_domains = tuple(spec["args"])
        for d in arg_domains:
            if d not in domains:
                raise SchemaError(f"unknown argument domain {d!r}", f"{path}.args")
        cod_name = spec["codomain"]
        if cod_name not in domains:
            raise SchemaError(f"unknown codomain {cod_name!r}", f"{path}.codomain")
        codomain = domains[cod_name]
        kind = spec["kind"]
        if kind not in _FN_KINDS:
            raise SchemaError(f"unknown kind {kind!r}", f"{path}.kind")
        rows = _expect_obj(spec["rows"], f"{path}.rows")

        if kind == TABLE:
            table = {}
            for row_key, dist_obj in rows.items():
                args = _parse_row_key(row_key, len(arg_domains), f"{path}.rows")
                dist_obj = _expect_obj(dist_obj, f"{path}.rows[{row_key}]")
                support = []
                for vk, pj in dist_obj.items():
                    v = _parse_value_key(vk, f"{path}.rows[{row_key}]")
                    if v not in codomain.index:
                        raise UnknownDomainElement(
                            f"{v!r} is not in codomain {cod_name!r} (function {name!r})"
                        )
                    p = prob_from_json(pj, f"{path}.rows[{row_key}][{vk}]")
                    if not exact and isinstance(p, Fraction):
                        p = float(p)
                    support.append((v, p))
                support.sort(key=lambda vp: codomain.index[vp[0]])
                table[args] = Distribution(support)
            functions[name] = FunctionDef(name, arg_domains, codomain, TABLE, table=table)
        elif kind == PARAMETERISED:
            param_rows = {}
            k = len(codomain.elements)
            for row_key, logits in rows.items():
                args = _parse_row_key(row_key, len(arg_domains), f"{path}.rows")
                if not isinstance(logits, list) or len(logits) != k:
                    raise SchemaError(
                        f"logit row must be a list of {k} numbers", f"{path}.rows[{row_key}]"
                    )
                param_rows[args] = len(theta)
                theta.extend(float(x) for x in logits)
            functions[name] = FunctionDef(name, arg_domains, codomain, PARAMETERISED, param_rows=param_rows)
        else:  # deterministic_table
            det = {}
            for row_key, vj in rows.items():
                args = _parse_row_key(row_key, len(arg_domains), f"{path}.rows")
                v = value_from_json(vj, f"{path}.rows[{row_key}]")
                if v not in codomain.index:
                    raise UnknownDomainElement(
                        f"{v!r} is not in codomain {cod_name!r} (function {name!r})"
                    )
                det[args] = v
            functions[name] = FunctionDef(name, arg_domains, codomain, DETERMINISTIC_TABLE, det_table=det)

    return Interpretation(
        domains=domains,
        constants=constants,
        functions=functions,
        params=np.array(theta, dtype=float),
    )


def load_interpretation(path: str, exact: bool = False) -> Interpretation:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}") from None
    return interpretation_from_dict(doc, exact=exact)


def interpretation_to_dict(interp: Interpretation) -> dict:
    """Serialize back to the JSON schema (table-backed functions only)."""
    doc: dict[str, Any] = {"domains": {}, "constants": {}, "functions": {}, "datasets": {}}
    for name, dom in interp.domains.items():
        if name == "bool" and dom is BOOL_DOMAIN:
            continue
        doc["domains"][name] = [value_to_json(v) for v in dom.elements]
    for name, v in interp.constants.items():
        doc["constants"][name] = value_to_json(v)
    for name, fn in interp.functions.items():
        spec: dict[str, Any] = {"args": list(fn.arg_domains), "codomain": fn.codomain.name, "kind": fn.kind}
        if fn.kind == TABLE:
            spec["rows"] = {
                _row_key(row): {value_key(v): (str(p) if isinstance(p, Fraction) else p) for v, p in dist.support}
                for row, dist in fn.table.items()
            }
        elif fn.kind == PARAMETERISED:
            spec["rows"] = {
                _row_key(row): [float(x) for x in interp.params[off:off + len(fn.codomain.elements)]]
                for row, off in fn.param_rows.items()
            }
        elif fn.kind == DETERMINISTIC_TABLE:
            spec["rows"] = {_row_key(row): value_to_json(v) for row, v in fn.det_table.items()}
        else:
            raise SchemaError(f"native function {name!r} cannot be serialized")
        doc["functions"][name] = spec
    return doc


def _expect_obj(obj: Any, path: str) -> dict:
    if not isinstance(obj, dict):
        raise SchemaError("expected a JSON object", path)
    return obj


def _parse_row_key(key: str, arity: int, path: str) -> tuple[Value, ...]:
    try:
        parsed = json.loads(key)
    except json.JSONDecodeError:
        raise SchemaError(f"row key {key!r} is not a JSON array", path) from None
    if not isinstance(parsed, list):
        raise SchemaError(f"row key {key!r} must encode a JSON array", path)
    if len(parsed) != arity:
        raise SchemaError(f"row key {key!r} has {len(parsed)} entries, expected {arity}", path)
    return tuple(value_from_json(v, path) for v in parsed)


def _parse_value_key(key: str, path: str) -> Value:
    try:
        parsed = json.loads(key)
    except json.JSONDecodeError:
        raise SchemaError(f"value key {key!r} is not valid JSON", path) from None
    return value_from_json(parsed, path)


def _row_key(row: tuple[Value, ...]) -> str:
    return json.dumps([value_to_json(v) for v in row], sort_keys=True, separators=(",", ":"))
