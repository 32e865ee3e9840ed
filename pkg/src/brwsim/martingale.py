"""Additive and multiplicative martingales, partition functions, and norming.

Functions taking a generation accept either a :class:`Generation` or any
array-like of positions (one entry per particle).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .errors import DegenerateSample
from .simulate import EXACT, Generation, Mode, collect


def _multiset(gen):
    if isinstance(gen, Generation):
        return gen.values.astype(float), gen.counts.astype(float)
    v = np.asarray(gen, dtype=float).ravel()
    return v, np.ones(v.size)


def additive(gen) -> float:
    """W = sum e^{-V} (compensated); 0 for an empty generation."""
    v, c = _multiset(gen)
    return float(K.weighted_expsum(v, c, 1.0))


def partition(gen, beta) -> float:
    """W_beta = sum e^{-beta V}; ``partition(g, 1)`` is bit-identical to ``additive(g)``."""
    beta = float(beta)
    if not beta > 0:
        raise ValueError("beta must be > 0")
    v, c = _multiset(gen)
    return float(K.weighted_expsum(v, c, beta))


def log_multiplicative(gen, phi) -> float:
    """log W* = sum log phi(e^{-V}), accumulated in log space; 0 when empty."""
    v, c = _multiset(gen)
    if v.size == 0:
        return 0.0
    with np.errstate(over="ignore"):
        args = np.exp(-v)
    return -math.fsum(c * phi.log_inv(args))


def multiplicative(gen, phi) -> float:
    """W* = prod phi(e^{-V}); 1 for an empty generation."""
    return math.exp(log_multiplicative(gen, phi))


# -- Seneta-Heyde norming -----------------------------------------------------------

@dataclass(frozen=True)
class NormingEstimate:
    n: int
    lambda_n: float
    std_error: float
    trials: int

    def csv_row(self):
        return f"{self.n},{self.lambda_n!r},{self.std_error!r},{self.trials}"


NORMING_HEADER = "n,lambda,stderr,trials"


def norming_from_w(n, w) -> NormingEstimate:
    """lambda_n = (mean sqrt W_n)^{-2} with a delta-method standard error.

    Extinct trials enter with W_n = 0.
    """
    w = np.asarray(w, dtype=float)
    if n == 0:
        return NormingEstimate(0, 1.0, 0.0, int(w.size))
    root = np.sqrt(w)
    m = float(root.mean())
    if w.size == 0 or m == 0.0:
        raise DegenerateSample(f"n={n}: every trial is extinct")
    se_m = float(root.std(ddof=1) / math.sqrt(w.size)) if w.size > 1 else math.inf
    return NormingEstimate(int(n), m ** -2, 2.0 * m ** -3 * se_m, int(w.size))


def estimate_lambda(law, n, trials, seed, mode: Mode = EXACT, threads=1) -> NormingEstimate:
    if n == 0:
        return NormingEstimate(0, 1.0, 0.0, int(trials))
    sample = collect(law, (n,), trials, seed, mode, threads=threads)
    return norming_from_w(n, sample.w[n])


def conditioned_from_w(n, w):
    """(lambda_n W_n on surviving trials, NormingEstimate) from one sample of W_n."""
    w = np.asarray(w, dtype=float)
    est = norming_from_w(n, w)
    return est.lambda_n * w[w > 0], est


def conditioned_samples(law, n, trials, seed, mode: Mode = EXACT, threads=1):
    """lambda_n W_n over trials alive at generation n (lambda_n from the same trials)."""
    sample = collect(law, (n,), trials, seed, mode, threads=threads)
    return conditioned_from_w(n, sample.w[n])[0]


def lower_tail_prob(n, w, eps=0.2):
    """Empirical P(n^{1/2} W_n < n^{-eps} | W_n > 0)."""
    w = np.asarray(w, dtype=float)
    alive = w[w > 0]
    if alive.size == 0:
        raise DegenerateSample(f"n={n}: no surviving trials")
    return float(np.mean(math.sqrt(n) * alive < n ** -eps))
