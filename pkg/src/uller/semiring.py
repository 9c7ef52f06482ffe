"""Exchangeable carriers for the probabilistic recursion.

A carrier supplies zero/one/plus/times/complement plus an embedding for
probabilities; threading different carriers through the same recursion
yields probabilities, best-single-outcome scores, or exact gradients.
Dual tangents are sparse maps from parameter index to partial derivative,
so evaluation cost scales with the parameters actually touched.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

Number = Union[int, float, Fraction]


def tangent_add(a: dict[int, float], b: dict[int, float]) -> dict[int, float]:
    if not a:
        return b
    if not b:
        return a
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0.0) + v
    return out


def tangent_scale(t: dict[int, float], s: float) -> dict[int, float]:
    if not t or s == 0.0:
        return {}
    return {k: v * s for k, v in t.items()}


class Dual:
    """Forward-mode number: value plus sparse tangent over the parameter vector."""

    __slots__ = ("value", "tangent")

    def __init__(self, value: float, tangent: dict[int, float] | None = None):
        self.value = value
        self.tangent = tangent if tangent is not None else {}

    def __add__(self, other):
        if isinstance(other, Dual):
            return Dual(self.value + other.value, tangent_add(self.tangent, other.tangent))
        return Dual(self.value + other, self.tangent)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Dual):
            return Dual(self.value - other.value, tangent_add(self.tangent, tangent_scale(other.tangent, -1.0)))
        return Dual(self.value - other, self.tangent)

    def __rsub__(self, other):
        return Dual(other - self.value, tangent_scale(self.tangent, -1.0))

    def __mul__(self, other):
        if isinstance(other, Dual):
            return Dual(
                self.value * other.value,
                tangent_add(tangent_scale(self.tangent, other.value), tangent_scale(other.tangent, self.value)),
            )
        return Dual(self.value * other, tangent_scale(self.tangent, float(other)))

    __rmul__ = __mul__

    def __neg__(self):
        return Dual(-self.value, tangent_scale(self.tangent, -1.0))

    def __repr__(self) -> str:
        return f"Dual({self.value}, {self.tangent})"


def as_value(x) -> float:
    return x.value if isinstance(x, Dual) else float(x)


class ProbCarrier:
    """Plain probabilities; sums/products stay exact on Fraction inputs."""

    name = "prob"
    wants_tangent = False
    zero: Number = 0
    one: Number = 1

    @staticmethod
    def plus(a, b):
        return a + b

    @staticmethod
    def times(a, b):
        return a * b

    @staticmethod
    def complement(a):
        return 1 - a

    @staticmethod
    def from_prob(p):
        return p

    @staticmethod
    def lift(p, tangent):
        return p

    @staticmethod
    def to_float(a) -> float:
        return float(a)


class MaxCarrier:
    """Best-single-assignment scores: plus is max, times is product.

    The 1-x complement makes negation only approximate; exact for
    negation-free statement bodies.
    """

    name = "max"
    wants_tangent = False
    zero: Number = 0
    one: Number = 1

    @staticmethod
    def plus(a, b):
        return a if a >= b else b

    @staticmethod
    def times(a, b):
        return a * b

    @staticmethod
    def complement(a):
        return 1 - a

    @staticmethod
    def from_prob(p):
        return p

    @staticmethod
    def lift(p, tangent):
        return p

    @staticmethod
    def to_float(a) -> float:
        return float(a)


class DualCarrier:
    """Forward-mode gradient carrier over the probability semiring."""

    name = "dual"
    wants_tangent = True
    zero = Dual(0.0)
    one = Dual(1.0)

    @staticmethod
    def plus(a: Dual, b: Dual) -> Dual:
        return a + b

    @staticmethod
    def times(a: Dual, b: Dual) -> Dual:
        return a * b

    @staticmethod
    def complement(a: Dual) -> Dual:
        return 1 - a

    @staticmethod
    def from_prob(p) -> Dual:
        return Dual(float(p))

    @staticmethod
    def lift(p, tangent) -> Dual:
        return Dual(float(p), dict(tangent) if tangent else {})

    @staticmethod
    def to_float(a: Dual) -> float:
        return a.value


CARRIERS = {
    "prob": ProbCarrier,
    "max": MaxCarrier,
    "dual": DualCarrier,
}
