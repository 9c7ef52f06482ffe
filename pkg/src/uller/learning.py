"""Constraint-driven training: minibatch loss over a dataset-bound domain
symbol, gradient descent on parameterised interpretations, and enumerative
adversarial input search."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import syntax as s
from .classical import eval_classical
from .errors import EmptyCandidateSet, NonFiniteGradient, ZeroProbability
from .fuzzy import eval_fuzzy, grad_fuzzy
from .interpretation import Interpretation, mode_interpretation, restrict_domain
from .prob import eval_prob, grad_prob
from .sample import grad_score
from .semiring import as_value
from .values import Value


@dataclass
class TrainConfig:
    semantics: str = "prob"  # "prob" | "fuzzy"
    tnorm: str = "product"
    estimator: str = "exact"  # "exact" | "score"
    n_samples: int = 1000
    optimizer: str = "adam"  # "adam" | "sgd"
    lr: float = 1e-2
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    batch_size: int = 32
    epochs: int = 10
    seed: int = 0
    loss_transform: str | None = None  # default: neg_log for prob, neg for fuzzy

    def transform(self) -> str:
        if self.loss_transform is not None:
            return self.loss_transform
        return "neg_log" if self.semantics == "prob" else "neg"


@dataclass
class EpochRecord:
    epoch: int
    loss: float
    satisfaction: float
    theta_norm: float

    def to_dict(self) -> dict:
        return {
            "epoch": self.epoch,
            "loss": self.loss,
            "satisfaction": self.satisfaction,
            "theta_norm": self.theta_norm,
        }


def _evaluate(f: s.Formula, interp: Interpretation, semantics: str, tnorm: str) -> float:
    if semantics == "prob":
        return float(eval_prob(f, interp))
    if semantics == "fuzzy":
        return float(as_value(eval_fuzzy(f, interp, family=tnorm)))
    raise ValueError(f"unsupported training semantics {semantics!r}")


def _transform_loss(value: float, transform: str) -> float:
    if transform == "neg":
        return -value
    if transform == "neg_log":
        if value <= 0.0:
            raise ZeroProbability(f"formula value {value}; -log loss undefined")
        return -float(np.log(value))
    raise ValueError(f"unknown loss transform {transform!r}")


def loss(
    f: s.Formula,
    interp: Interpretation,
    batch: Sequence[Value],
    dataset_symbol: str,
    semantics: str = "prob",
    tnorm: str = "product",
    transform: str | None = None,
) -> float:
    """Loss of the formula with the dataset symbol bound to the minibatch."""
    restricted = restrict_domain(interp, dataset_symbol, batch)
    transform = transform or ("neg_log" if semantics == "prob" else "neg")
    return _transform_loss(_evaluate(f, restricted, semantics, tnorm), transform)


def _gradient(f: s.Formula, interp: Interpretation, config: TrainConfig) -> np.ndarray:
    if config.estimator == "score":
        return grad_score(f, interp, config.n_samples, config.seed, transform=config.transform())
    if config.semantics == "prob":
        return grad_prob(f, interp, transform=config.transform())
    return grad_fuzzy(f, interp, family=config.tnorm, transform=config.transform())


class _Adam:
    def __init__(self, n: int, lr: float, beta1: float, beta2: float, eps: float):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = np.zeros(n)
        self.v = np.zeros(n)
        self.t = 0

    def step(self, theta: np.ndarray, grad: np.ndarray) -> np.ndarray:
        self.t += 1
        self.m = self.beta1 * self.m + (1 - self.beta1) * grad
        self.v = self.beta2 * self.v + (1 - self.beta2) * grad ** 2
        m_hat = self.m / (1 - self.beta1 ** self.t)
        v_hat = self.v / (1 - self.beta2 ** self.t)
        return theta - self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


class _Sgd:
    def __init__(self, lr: float):
        self.lr = lr

    def step(self, theta: np.ndarray, grad: np.ndarray) -> np.ndarray:
        return theta - self.lr * grad


def satisfaction_rate(
    formulas: Sequence[s.Formula],
    interp: Interpretation,
    dataset: Sequence[Value],
    dataset_symbol: str,
) -> float:
    """Fraction of data points whose classical evaluation under the mode
    interpretation is 1, with the dataset symbol bound to that single point."""
    if not dataset:
        return 1.0
    mode = mode_interpretation(interp)
    hits = 0
    for x in dataset:
        single = restrict_domain(mode, dataset_symbol, [x])
        if all(eval_classical(f, single) for f in formulas):
            hits += 1
    return hits / len(dataset)


def train(
    formulas: Sequence[s.Formula] | s.Formula,
    interp: Interpretation,
    dataset: Sequence[Value],
    dataset_symbol: str,
    config: TrainConfig,
    weights: Sequence[float] | None = None,
) -> tuple[Interpretation, list[EpochRecord]]:
    """Minimize the (weighted) constraint loss over minibatches.

    Deterministic given the config seed: shuffling, sampling estimators and
    optimizer state all derive from it.
    """
    if isinstance(formulas, s.CORE_FORMULAS):
        formulas = [formulas]
    weights = list(weights) if weights is not None else [1.0] * len(formulas)
    if len(weights) != len(formulas):
        raise ValueError("one weight per formula required")

    theta = interp.params.copy()
    if config.optimizer == "adam":
        opt = _Adam(len(theta), config.lr, config.beta1, config.beta2, config.eps)
    elif config.optimizer == "sgd":
        opt = _Sgd(config.lr)
    else:
        raise ValueError(f"unknown optimizer {config.optimizer!r}")

    rng = np.random.default_rng(config.seed)
    report: list[EpochRecord] = []
    n = len(dataset)
    batch_size = min(config.batch_size, n) if n else config.batch_size

    for epoch in range(config.epochs):
        order = rng.permutation(n) if n else np.zeros(0, dtype=int)
        epoch_losses = []
        for start in range(0, max(n, 1), max(batch_size, 1)):
            batch = [dataset[i] for i in order[start:start + batch_size]] if n else []
            current = interp.with_params(theta)
            restricted = restrict_domain(current, dataset_symbol, batch)
            grad = np.zeros(len(theta))
            batch_loss = 0.0
            for w, f in zip(weights, formulas):
                grad += w * _gradient(f, restricted, config)
                batch_loss += w * _transform_loss(
                    _evaluate(f, restricted, config.semantics, config.tnorm), config.transform()
                )
            if not np.all(np.isfinite(grad)):
                bad = int(np.flatnonzero(~np.isfinite(grad))[0])
                raise NonFiniteGradient(
                    f"non-finite gradient at parameter {bad} (epoch {epoch}, batch offset {start})"
                )
            theta = opt.step(theta, grad)
            epoch_losses.append(batch_loss)
            if n == 0:
                break
        current = interp.with_params(theta)
        report.append(
            EpochRecord(
                epoch=epoch,
                loss=float(np.mean(epoch_losses)) if epoch_losses else 0.0,
                satisfaction=satisfaction_rate(formulas, current, dataset, dataset_symbol),
                theta_norm=float(np.linalg.norm(theta)),
            )
        )
    return interp.with_params(theta), report


def adversarial_search(
    f: s.Formula,
    interp: Interpretation,
    dataset_symbol: str,
    candidates: Sequence[Value] | None = None,
    semantics: str = "prob",
    tnorm: str = "product",
    maximize: bool = False,
) -> tuple[Value, float]:
    """Enumerate candidates, binding the dataset symbol to each one; return
    the worst violator (argmin of the formula value) or, with maximize, the
    best satisfier. Ties keep the first candidate in declared order."""
    if candidates is None:
        candidates = interp.domain(dataset_symbol).elements
    if not candidates:
        raise EmptyCandidateSet(f"no candidates for {dataset_symbol!r}")
    best_x = None
    best_score = None
    for x in candidates:
        single = restrict_domain(interp, dataset_symbol, [x])
        score = _evaluate(f, single, semantics, tnorm)
        better = best_score is None or (score > best_score if maximize else score < best_score)
        if better:
            best_x, best_score = x, score
    return best_x, best_score
