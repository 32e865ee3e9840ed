"""The centred spine walk S under Q: ballot probabilities, minima, regressions."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import rng as rngmod
from .errors import NonPositiveStatistic
from .spine import spine_paths_chunk, spine_step_law

EXACT_MAX_N = 24


@dataclass(frozen=True)
class RandomWalkPath:
    """S_0 = 0, S_1, ..., S_n."""

    steps: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.steps, dtype=float)
        if s.size == 0 or s[0] != 0.0:
            raise ValueError("a path starts at S_0 = 0")
        object.__setattr__(self, "steps", s)

    @property
    def n(self):
        return self.steps.size - 1

    @property
    def running_min(self):
        return np.minimum.accumulate(self.steps)

    @property
    def minimum(self):
        return float(self.steps.min())

    @property
    def argmin(self):
        """Smallest index attaining the minimum."""
        return int(np.argmin(self.steps))


def walk_paths(law, n, trials, seed):
    """Yield arrays of spine-walk paths, one (size, n+1) array per fixed chunk."""
    for c, size in rngmod.chunks(trials):
        yield spine_paths_chunk(law, n, size, seed, c)


def sample_walks(law, n, trials, seed):
    return [RandomWalkPath(p) for block in walk_paths(law, n, trials, seed) for p in block]


def _lattice_spine(law):
    """Integer step values and probabilities of the spine walk, or None."""
    h = law.lattice_step()
    if h is None:
        return None
    step = spine_step_law(law)
    ks = np.rint(step.values / h).astype(np.int64)
    if not np.allclose(ks * h, step.values, rtol=0, atol=1e-9 * max(1.0, h)):
        return None
    return ks, step.probs


def stay_positive_exact(law, n):
    """Q(min_{1<=k<=n} S_k > 0) by convolution on integer lattice sites."""
    lattice = _lattice_spine(law)
    if lattice is None:
        raise ValueError("exact stay-positive needs a lattice spine law")
    ks, ps = lattice
    if n == 0:
        return 1.0
    # mass[j] = Q(S_k = j, S_1..S_k > 0); sites <= 0 are absorbed and dropped
    mass = np.zeros(max(int(ks.max()), 0) * n + 1)
    mass[0] = 1.0
    for _ in range(n):
        new = np.zeros_like(mass)
        for k, p in zip(ks, ps):
            if k >= 0:
                new[k:] += p * mass[:mass.size - k]
            else:
                new[:k] += p * mass[-k:]
        new[0] = 0.0
        mass = new
    return float(mass.sum())


def stay_positive(law, n, trials=100_000, seed=0, method="auto"):
    """(Q(min_{1<=k<=n} S_k > 0), standard error).

    ``method``: 'exact' (lattice convolution), 'mc', or 'auto' (exact for
    lattice spine laws with n <= 24, Monte Carlo otherwise).
    """
    if method not in ("auto", "exact", "mc"):
        raise ValueError(f"unknown method {method!r}")
    if method == "exact" or (method == "auto" and n <= EXACT_MAX_N and _lattice_spine(law) is not None):
        return stay_positive_exact(law, n), 0.0
    if n == 0:
        return 1.0, 0.0
    hits = 0
    for paths in walk_paths(law, n, trials, seed):
        hits += int(np.count_nonzero(paths[:, 1:].min(axis=1) > 0))
    p = hits / trials
    return p, math.sqrt(p * (1 - p) / trials)


def min_exp_moment(law, b, n, trials=100_000, seed=0):
    """(E_Q exp(b min_{0<=i<=n} S_i), standard error)."""
    if b < 0:
        raise ValueError("b must be >= 0")
    if b == 0 or n == 0:
        return 1.0, 0.0
    vals = np.concatenate([np.exp(b * paths.min(axis=1)) for paths in walk_paths(law, n, trials, seed)])
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(vals.size))


def exponent_regress(pairs, kind="power"):
    """Least-squares (slope, intercept, r2).

    kind='power' fits log(stat) against log(n); kind='log' fits stat against
    log(n), which is the right scale for statistics growing like c log n.
    """
    pairs = [(float(n), float(s)) for n, s in pairs]
    if len(pairs) < 3:
        raise ValueError("need at least 3 (n, statistic) pairs")
    ns = np.array([n for n, _ in pairs])
    st = np.array([s for _, s in pairs])
    if np.any(ns <= 0):
        raise ValueError("n must be positive")
    if kind == "power":
        if np.any(~(st > 0)):
            raise NonPositiveStatistic("log-log regression needs positive statistics")
        y = np.log(st)
    elif kind == "log":
        if not np.all(np.isfinite(st)):
            raise NonPositiveStatistic("statistics must be finite")
        y = st
    else:
        raise ValueError(f"unknown regression kind {kind!r}")
    x = np.log(ns)
    slope, icpt = np.polyfit(x, y, 1)
    resid = y - (slope * x + icpt)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if np.ptp(y) > 0 else 1.0
    return float(slope), float(icpt), r2
