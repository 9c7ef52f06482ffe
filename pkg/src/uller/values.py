"""Runtime domain elements: dynamically typed values with structural equality.

Ints and reals are distinct (no implicit coercion on equality); records are
finite string-keyed maps. All values are immutable and hashable so they can
serve as table keys and domain elements.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Mapping

from .errors import SchemaError


@dataclass(frozen=True)
class Int:
    i: int

    def __repr__(self) -> str:
        return f"Int({self.i})"


@dataclass(frozen=True)
class Real:
    r: float

    def __repr__(self) -> str:
        return f"Real({self.r})"


@dataclass(frozen=True)
class Bool:
    b: bool

    def __repr__(self) -> str:
        return f"Bool({self.b})"


@dataclass(frozen=True)
class Symbol:
    name: str

    def __repr__(self) -> str:
        return f"Symbol({self.name!r})"


class Record:
    """Immutable string-keyed map of values."""

    __slots__ = ("props", "_hash")

    def __init__(self, props: Mapping[str, "Value"]):
        object.__setattr__(self, "props", dict(props))
        object.__setattr__(self, "_hash", hash(tuple(sorted(self.props.items()))))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Record) and self.props == other.props

    def __hash__(self) -> int:
        return self._hash

    def __setattr__(self, name: str, value: Any) -> None:
        raise AttributeError("Record is immutable")

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}: {v!r}" for k, v in sorted(self.props.items()))
        return f"Record({{{inner}}})"


Value = Int | Real | Bool | Symbol | Record

TRUE = Bool(True)
FALSE = Bool(False)


def value_from_json(obj: Any, path: str = "$") -> Value:
    """Decode a JSON datum into a Value: numbers, booleans, strings, objects."""
    if isinstance(obj, bool):
        return Bool(obj)
    if isinstance(obj, int):
        return Int(obj)
    if isinstance(obj, float):
        return Real(obj)
    if isinstance(obj, str):
        return Symbol(obj)
    if isinstance(obj, dict):
        return Record({k: value_from_json(v, f"{path}.{k}") for k, v in obj.items()})
    raise SchemaError(f"cannot decode {type(obj).__name__} as a value", path)


def value_to_json(v: Value) -> Any:
    if isinstance(v, Bool):
        return v.b
    if isinstance(v, Int):
        return v.i
    if isinstance(v, Real):
        return v.r
    if isinstance(v, Symbol):
        return v.name
    if isinstance(v, Record):
        return {k: value_to_json(p) for k, p in v.props.items()}
    raise TypeError(f"not a value: {v!r}")


def value_key(v: Value) -> str:
    """Canonical string key for a value, used for JSON table rows."""
    return json.dumps(value_to_json(v), sort_keys=True, separators=(",", ":"))


def tuple_key(vs: tuple[Value, ...]) -> str:
    """Canonical string key for an argument tuple."""
    return json.dumps([value_to_json(v) for v in vs], sort_keys=True, separators=(",", ":"))


def prob_from_json(obj: Any, path: str = "$") -> float | Fraction:
    """Decode a probability: a JSON number, or a "p/q" string for exact rationals."""
    if isinstance(obj, bool):
        raise SchemaError("probability must be a number or 'p/q' string", path)
    if isinstance(obj, (int, float)):
        return float(obj)
    if isinstance(obj, str):
        try:
            return Fraction(obj)
        except (ValueError, ZeroDivisionError) as exc:
            raise SchemaError(f"bad rational probability {obj!r}: {exc}", path) from None
    raise SchemaError("probability must be a number or 'p/q' string", path)
