"""Sampling semantics: single-rollout boolean evaluation, Monte Carlo
probability estimation, and the score-function gradient surrogate.

Randomness comes from a portable splitmix64-based tree: every statement-node
visit derives its own uniform from (rollout seed, statement node id, visit
counter), so conjunction branches consume independent substreams and a given
(seed, program, interpretation) triple reproduces rollouts bit-for-bit.
"""

from __future__ import annotations

import math

import numpy as np

from . import syntax as s
from .errors import InvalidSampleCount, ZeroProbability, ZeroProbabilitySample
from .interpretation import EMPTY_ENV, Env, Interpretation, apply_predicate, eval_term
from .semiring import tangent_add, tangent_scale

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _sm64(z: int) -> int:
    """splitmix64 finalizer."""
    z = (z + _GOLDEN) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def _combine(a: int, b: int) -> int:
    return _sm64((a ^ _sm64(b & _MASK)) & _MASK)


class RngStream:
    """Counter-based stream: one uniform per (statement node, visit) pair."""

    algorithm = "splitmix64-tree"

    __slots__ = ("seed", "_visits")

    def __init__(self, seed: int):
        self.seed = seed & _MASK
        self._visits: dict[int, int] = {}

    def substream(self, k: int) -> "RngStream":
        return RngStream(_combine(self.seed, k))

    def statement_uniform(self, node_id: int) -> float:
        visit = self._visits.get(node_id, 0)
        self._visits[node_id] = visit + 1
        child = _combine(_combine(self.seed, node_id), visit)
        return (child >> 11) * 2.0 ** -53


def statement_ids(f: s.Formula) -> dict[int, int]:
    """Stable preorder numbering of statement nodes, keyed by object identity."""
    ids: dict[int, int] = {}
    for node in s.walk(f):
        if isinstance(node, s.Statement):
            ids[id(node)] = len(ids)
    return ids


def _draw(dist, u: float):
    """Inverse-CDF draw over the distribution's (codomain-ordered) support."""
    cum = 0.0
    for v, p in dist.support:
        cum += float(p)
        if u < cum:
            return v
    return dist.support[-1][0]


class _DistCache:
    """Per-run memo of conditional distributions keyed by (function, args).

    Statement *values* are drawn fresh on every visit; only the probability
    tables behind them are pure in (interpretation, args) and safe to reuse.
    """

    __slots__ = ("interp", "plain", "scored")

    def __init__(self, interp: Interpretation):
        self.interp = interp
        self.plain: dict = {}
        self.scored: dict = {}

    def support(self, fname: str, args: tuple) -> tuple:
        key = (fname, args)
        hit = self.plain.get(key)
        if hit is None:
            dist = self.interp.function(fname).query(args, self.interp.params)
            hit = tuple((v, float(p)) for v, p in dist.support)
            self.plain[key] = hit
        return hit

    def entries(self, fname: str, args: tuple) -> tuple:
        key = (fname, args)
        hit = self.scored.get(key)
        if hit is None:
            raw = self.interp.function(fname).query_entries(args, self.interp.params)
            hit = tuple((v, float(p), tan) for v, p, tan in raw)
            self.scored[key] = hit
        return hit


def eval_sample(
    f: s.Formula,
    interp: Interpretation,
    env: Env = EMPTY_ENV,
    rng: RngStream | int = 0,
    _ids: dict[int, int] | None = None,
) -> int:
    """One rollout: classical evaluation with sampled statement bindings."""
    if isinstance(rng, int):
        rng = RngStream(rng)
    ids = _ids if _ids is not None else statement_ids(f)
    return _rollout(f, interp, env, rng, ids, _DistCache(interp))


def _rollout(f: s.Formula, interp: Interpretation, env: Env, rng: RngStream, ids, cache: _DistCache) -> int:
    if isinstance(f, s.ForAll):
        for a in interp.domain(f.domain).elements:
            if not _rollout(f.body, interp, env.bind(f.var, a), rng, ids, cache):
                return 0
        return 1
    if isinstance(f, s.Exists):
        for a in interp.domain(f.domain).elements:
            if _rollout(f.body, interp, env.bind(f.var, a), rng, ids, cache):
                return 1
        return 0
    if isinstance(f, s.And):
        return _rollout(f.right, interp, env, rng, ids, cache) if _rollout(f.left, interp, env, rng, ids, cache) else 0
    if isinstance(f, s.Or):
        return 1 if _rollout(f.left, interp, env, rng, ids, cache) else _rollout(f.right, interp, env, rng, ids, cache)
    if isinstance(f, s.Implies):
        return _rollout(f.right, interp, env, rng, ids, cache) if _rollout(f.left, interp, env, rng, ids, cache) else 1
    if isinstance(f, s.Not):
        return 1 - _rollout(f.body, interp, env, rng, ids, cache)
    if isinstance(f, s.Pred):
        args = [eval_term(a, interp, env) for a in f.args]
        return 1 if apply_predicate(f.name, args, interp) else 0
    if isinstance(f, s.Statement):
        args = tuple(eval_term(a, interp, env) for a in f.args)
        support = cache.support(f.func, args)
        u = rng.statement_uniform(ids[id(f)])
        cum = 0.0
        value = support[-1][0]
        for v, p in support:
            cum += p
            if u < cum:
                value = v
                break
        return _rollout(f.body, interp, env.bind(f.var, value), rng, ids, cache)
    raise TypeError(f"cannot evaluate sugar node {type(f).__name__}; desugar first")


def estimate_prob(
    f: s.Formula,
    interp: Interpretation,
    n_samples: int,
    seed: int = 0,
    workers: int = 1,
) -> tuple[float, float]:
    """Monte Carlo mean and standard error over independent rollouts.

    Per-rollout seeds come from the master stream by index, so splitting the
    index range across worker threads returns bit-identical results."""
    if n_samples < 1:
        raise InvalidSampleCount(f"n_samples must be >= 1, got {n_samples}")
    ids = statement_ids(f)
    master = RngStream(seed)

    def run_range(lo: int, hi: int) -> int:
        cache = _DistCache(interp)
        hits = 0
        for i in range(lo, hi):
            hits += _rollout(f, interp, EMPTY_ENV, master.substream(i), ids, cache)
        return hits

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        chunk = -(-n_samples // workers)
        bounds = [(lo, min(lo + chunk, n_samples)) for lo in range(0, n_samples, chunk)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            hits = sum(pool.map(lambda b: run_range(*b), bounds))
    else:
        hits = run_range(0, n_samples)
    mean = hits / n_samples
    if n_samples == 1:
        return mean, 0.0
    std_error = math.sqrt(mean * (1.0 - mean) / (n_samples - 1))
    return mean, std_error


# ---------------------------------------------------------------------------
# Score-function gradient (surrogate with unit forward value)
# ---------------------------------------------------------------------------

class ScoreEstimate:
    """Per-coordinate gradient estimate with standard errors."""

    __slots__ = ("gradient", "std_error", "mean_truth", "n_samples")

    def __init__(self, gradient: np.ndarray, std_error: np.ndarray, mean_truth: float, n_samples: int):
        self.gradient = gradient
        self.std_error = std_error
        self.mean_truth = mean_truth
        self.n_samples = n_samples


def _rollout_scored(f, interp, env, rng, ids, cache, score) -> tuple[int, dict[int, float]]:
    """Full (non-short-circuiting) rollout accumulating d(log p)/dtheta of
    every sampled binding, so the surrogate covers all statements."""
    if isinstance(f, s.ForAll):
        out = 1
        for a in interp.domain(f.domain).elements:
            v, score = _rollout_scored(f.body, interp, env.bind(f.var, a), rng, ids, cache, score)
            out = min(out, v)
        return out, score
    if isinstance(f, s.Exists):
        out = 0
        for a in interp.domain(f.domain).elements:
            v, score = _rollout_scored(f.body, interp, env.bind(f.var, a), rng, ids, cache, score)
            out = max(out, v)
        return out, score
    if isinstance(f, s.And):
        lv, score = _rollout_scored(f.left, interp, env, rng, ids, cache, score)
        rv, score = _rollout_scored(f.right, interp, env, rng, ids, cache, score)
        return min(lv, rv), score
    if isinstance(f, s.Or):
        lv, score = _rollout_scored(f.left, interp, env, rng, ids, cache, score)
        rv, score = _rollout_scored(f.right, interp, env, rng, ids, cache, score)
        return max(lv, rv), score
    if isinstance(f, s.Implies):
        lv, score = _rollout_scored(f.left, interp, env, rng, ids, cache, score)
        rv, score = _rollout_scored(f.right, interp, env, rng, ids, cache, score)
        return max(1 - lv, rv), score
    if isinstance(f, s.Not):
        v, score = _rollout_scored(f.body, interp, env, rng, ids, cache, score)
        return 1 - v, score
    if isinstance(f, s.Pred):
        args = [eval_term(a, interp, env) for a in f.args]
        return (1 if apply_predicate(f.name, args, interp) else 0), score
    if isinstance(f, s.Statement):
        args = tuple(eval_term(a, interp, env) for a in f.args)
        entries = cache.entries(f.func, args)
        u = rng.statement_uniform(ids[id(f)])
        cum = 0.0
        chosen = entries[-1]
        for entry in entries:
            cum += entry[1]
            if u < cum:
                chosen = entry
                break
        v, p, tan = chosen
        if tan:
            if p <= 0.0:
                raise ZeroProbabilitySample(f"sampled zero-probability outcome from {f.func!r}")
            score = tangent_add(score, tangent_scale(tan, 1.0 / p))
        return _rollout_scored(f.body, interp, env.bind(f.var, v), rng, ids, cache, score)
    raise TypeError(f"cannot evaluate sugar node {type(f).__name__}; desugar first")


def grad_score_detailed(
    f: s.Formula,
    interp: Interpretation,
    n_samples: int,
    seed: int = 0,
    transform: str = "neg",
) -> ScoreEstimate:
    """Averaged score-function surrogate gradient.

    Each rollout contributes truth * sum_i d(log p_i)/dtheta; with
    transform 'neg' the estimate is unbiased for the gradient of -E[truth].
    'neg_log' divides by the estimated mean truth (a smoothed -log loss).
    """
    if n_samples < 1:
        raise InvalidSampleCount(f"n_samples must be >= 1, got {n_samples}")
    ids = statement_ids(f)
    master = RngStream(seed)
    cache = _DistCache(interp)
    n = interp.n_params()
    total = np.zeros(n)
    total_sq = np.zeros(n)
    hits = 0
    for i in range(n_samples):
        truth, score = _rollout_scored(f, interp, EMPTY_ENV, master.substream(i), ids, cache, {})
        hits += truth
        if truth and score:
            for k, dv in score.items():
                total[k] += dv
                total_sq[k] += dv * dv
    mean = total / n_samples
    if n_samples > 1:
        var = (total_sq / n_samples - mean ** 2) * (n_samples / (n_samples - 1))
        stderr = np.sqrt(np.maximum(var, 0.0) / n_samples)
    else:
        stderr = np.zeros(n)
    mean_truth = hits / n_samples
    if transform == "neg":
        return ScoreEstimate(-mean, stderr, mean_truth, n_samples)
    if transform == "value":
        return ScoreEstimate(mean, stderr, mean_truth, n_samples)
    if transform == "neg_log":
        if mean_truth <= 0.0:
            raise ZeroProbability("all rollouts false; -log loss undefined")
        return ScoreEstimate(-mean / mean_truth, stderr / mean_truth, mean_truth, n_samples)
    raise ValueError(f"unknown transform {transform!r}")


def grad_score(
    f: s.Formula,
    interp: Interpretation,
    n_samples: int,
    seed: int = 0,
    transform: str = "neg",
) -> np.ndarray:
    return grad_score_detailed(f, interp, n_samples, seed, transform).gradient
