"""Size-biased measure Q and the spinal decomposition.

Under Q the spine moves as a centred random walk S whose step law is the
e^{-x}-tilt of the displacement intensity; the spine's brothers start
ordinary P-subtrees.  The sampler builds the spine constructively (tilted
brood, then spine child picked proportionally to e^{-V}), never by rejection.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations_with_replacement, product

import numpy as np

from . import rng as rngmod
from .errors import NotBoundary
from .model import psi
from .simulate import (EXACT, Generation, Mode, TrialStats, _exact_keys, _generation_law,
                       _stats_from_rows, brood_outcomes, enumerate_histories, enumerate_paths,
                       stats_of, step_generation)

BOUNDARY_TOL = 1e-9


@dataclass(frozen=True)
class SpineStepLaw:
    """One-step law of (spine increment, brothers' displacements) under Q.

    For discrete laws ``outcomes`` lists (dS, brothers, prob) with brothers a
    sorted tuple; ``values``/``probs`` give the marginal law of dS.  For
    gaussian-binary the step is N(mu - sigma2, sigma2) with one brother drawn
    from the untilted N(mu, sigma2).
    """

    law: object
    values: np.ndarray
    probs: np.ndarray
    outcomes: tuple = ()
    mean: float = 0.0
    variance: float = 0.0

    @property
    def gaussian(self):
        return self.law.kind == "gaussian-binary"

    def sample_steps(self, rng, size):
        if self.gaussian:
            return rng.normal(self.mean, math.sqrt(self.variance), size)
        return self.values[rng.choice(self.values.size, size=size, p=self.probs)]

    def sample_brood(self, rng):
        """One (dS, brothers array) draw."""
        law = self.law
        if self.gaussian:
            ds = rng.normal(self.mean, math.sqrt(self.variance))
            return ds, rng.normal(law.mu, math.sqrt(law.sigma2), 1)
        if law.kind == "discrete-atoms":
            ks = np.array([k for k, _ in law.offspring])
            kp = np.array([p for _, p in law.offspring], dtype=float) * ks
            kp /= kp.sum()
            k = ks[rng.choice(ks.size, p=kp)]
            ds = self.values[rng.choice(self.values.size, p=self.probs)]
            av = np.array([v for v, _ in law.atoms])
            ap = np.array([p for _, p in law.atoms])
            return ds, av[rng.choice(av.size, size=k - 1, p=ap)]
        # joint: brood r w.p. prop. to pi_r sum e^{-x}, spine child i prop. to e^{-x_ri}
        probs = np.array([p for _, _, p in self.outcomes])
        i = rng.choice(probs.size, p=probs)
        ds, bro, _ = self.outcomes[i]
        return ds, np.array(bro, dtype=float)


def spine_step_law(law, tol=BOUNDARY_TOL) -> SpineStepLaw:
    """Tilted step law realising E_Q F(S_1) = E sum_{|u|=1} e^{-V(u)} F(V(u))."""
    p1 = psi(law, 1.0)
    if not (math.isfinite(p1) and abs(p1) <= tol):
        raise NotBoundary(f"psi(1) = {p1!r}; the e^{{-V}} tilt is not a probability")
    if law.kind == "gaussian-binary":
        mean = law.mu - law.sigma2
        return SpineStepLaw(law, np.zeros(0), np.zeros(0), (), mean, law.sigma2)
    outcomes = {}
    if law.kind == "discrete-atoms":
        atoms = [(v, p) for v, p in law.atoms if p > 0]
        for k, pk in law.offspring:
            if k == 0 or pk <= 0:
                continue
            for x, ax in atoms:
                head = pk * k * ax * math.exp(-x)
                for combo in combinations_with_replacement(range(len(atoms)), k - 1):
                    mult = math.factorial(k - 1)
                    prob = head
                    for a in set(combo):
                        c = combo.count(a)
                        mult //= math.factorial(c)
                        prob *= atoms[a][1] ** c
                    key = (x, tuple(sorted(atoms[a][0] for a in combo)))
                    outcomes[key] = outcomes.get(key, 0.0) + mult * prob
    else:
        for vec, p in law.broods:
            for i, x in enumerate(vec):
                key = (x, tuple(sorted(vec[:i] + vec[i + 1:])))
                outcomes[key] = outcomes.get(key, 0.0) + p * math.exp(-x)
    total = sum(outcomes.values())
    table = tuple((x, bro, p / total) for (x, bro), p in sorted(outcomes.items()))
    marg = {}
    for x, _, p in table:
        marg[x] = marg.get(x, 0.0) + p
    values = np.array(sorted(marg))
    probs = np.array([marg[v] for v in values])
    mean = float(np.dot(values, probs))
    var = float(np.dot((values - mean) ** 2, probs))
    return SpineStepLaw(law, values, probs, table, mean, var)


@dataclass
class SpineSample:
    """Spine path S_0..S_n, brothers per level, and optionally the whole Q-tree's stats."""

    spine_path: np.ndarray
    sibling_sets: list
    decorated_stats: TrialStats | None = None

    @property
    def argmin(self):
        return int(np.argmin(self.spine_path))


def sample_spine(law, n, seed, decorate=False, mode: Mode = EXACT, trial=0, betas=()) -> SpineSample:
    """Sample one spine of length n under Q.

    With ``decorate`` each brother at level k roots an independent P-subtree
    grown to depth n with :func:`step_generation`, and ``decorated_stats``
    summarises spine plus subtrees at every generation.  The mode controls the
    subtrees only; the spine itself is never dropped.
    """
    step = spine_step_law(law)
    rng = rngmod.stream(seed, rngmod.SPINE, trial)
    betas = tuple(float(b) for b in betas)
    h = law.lattice_step()
    path = np.zeros(n + 1)
    siblings = []
    if not decorate:
        if n:
            for k in range(1, n + 1):
                ds, bro = step.sample_brood(rng)
                path[k] = path[k - 1] + ds
                siblings.append(np.asarray(bro, dtype=float))
        return SpineSample(path, siblings)

    lattice = h is not None

    def as_gen(index, values):
        return Generation.from_positions(index, values, h)

    others = as_gen(0, [])
    stats = np.zeros((n + 1, 5))
    wbeta = np.zeros((n + 1, len(betas)))
    spine_site = 0
    c, lo, hi, w, wb = stats_of(as_gen(0, [0.0]), betas)
    stats[0] = (c, lo, hi, w, 0.0)
    wbeta[0] = wb
    for k in range(1, n + 1):
        ds, bro = step.sample_brood(rng)
        others = step_generation(law, others, rng, mode)
        if lattice:
            spine_site_prev = spine_site
            spine_site += int(round(ds / h))
            bro_sites = spine_site_prev + np.rint(np.asarray(bro) / h).astype(np.int64)
            path[k] = spine_site * h
            others = others.merged(as_gen(k, bro_sites * h))
        else:
            path[k] = path[k - 1] + ds
            others = others.merged(as_gen(k, path[k - 1] + np.asarray(bro, dtype=float)))
        others.index = k
        siblings.append(np.asarray(bro, dtype=float))
        full = others.merged(as_gen(k, [path[k]]))
        c, lo, hi, w, wb = stats_of(full, betas)
        stats[k] = (c, lo, hi, w, others.dropped_mass_bound)
        wbeta[k] = wb
    return SpineSample(path, siblings, _stats_from_rows(betas, stats, wbeta))


def spine_paths(law, n, trials, seed):
    """Array (trials, n+1) of spine paths S_0..S_n under Q (chunked streams)."""
    return np.concatenate([spine_paths_chunk(law, n, size, seed, c)
                           for c, size in rngmod.chunks(trials)])


def many_to_one(law, n, f, trials, seed):
    """Monte Carlo E_Q[e^{S_n} f(S)] = E[sum_{|u|=n} f(path of u)].

    ``f`` maps an array of paths of shape (m, n+1) (column 0 is S_0 = 0) to m
    values.  Returns (estimate, standard error).
    """
    spine_step_law(law)
    if n == 0:
        vals = np.asarray(f(np.zeros((1, 1))), dtype=float)
        return float(vals[0]), 0.0
    acc = []
    for c, size in rngmod.chunks(trials):
        paths = spine_paths_chunk(law, n, size, seed, c)
        acc.append(np.exp(paths[:, -1]) * np.asarray(f(paths), dtype=float))
    vals = np.concatenate(acc)
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(vals.size))


def spine_paths_chunk(law, n, size, seed, chunk):
    step = spine_step_law(law)
    rng = rngmod.stream(seed, rngmod.WALK, chunk)
    out = np.zeros((size, n + 1))
    if n:
        out[:, 1:] = np.cumsum(step.sample_steps(rng, (size, n)), axis=1)
    return out


# -- exact oracles -----------------------------------------------------------------------

def many_to_one_exact(law, n, f, max_outcomes=10**7):
    """(direct, spine) exact values of E[sum_{|u|=n} f(path)] and E_Q[e^{S_n} f(S)].

    ``f`` takes a single path tuple (S_0, ..., S_n).  The direct side
    enumerates genealogies under P; the spine side enumerates tilted steps.
    """
    lhs = 0.0
    for p, paths in enumerate_paths(law, n, max_outcomes):
        lhs += p * sum(f((0.0,) + tuple(path)) for path in paths)
    step = spine_step_law(law)
    to_key, to_val = _exact_keys(law)
    rhs = 0.0
    for combo in product(range(step.values.size), repeat=n):
        prob = 1.0
        s = 0
        path = [0.0]
        for i in combo:
            prob *= step.probs[i]
            s += to_key(step.values[i])
            path.append(to_val(s))
        rhs += prob * math.exp(path[-1]) * f(tuple(path))
    return lhs, rhs


def _q_histories(law, n, max_outcomes):
    """Exact law of the Q-tree generation history via the spine construction."""
    to_key, to_val = _exact_keys(law)
    step = spine_step_law(law)
    broods = [(tuple(to_key(d) for d in disp), p) for disp, p in brood_outcomes(law)]
    spine_out = {}
    for x, bro, p in step.outcomes:
        key = (to_key(x), tuple(sorted(to_key(b) for b in bro)))
        spine_out[key] = spine_out.get(key, 0.0) + p
    budget = [int(max_outcomes)]
    cache = {}
    states = {(((0,),), 0): 1.0}
    for _ in range(n):
        nxt = {}
        for (hist, s), p in states.items():
            others = list(hist[-1])
            others.remove(s)
            others = tuple(others)
            if others not in cache:
                cache[others] = _generation_law(others, broods, to_key, budget)
            for g, q in cache[others].items():
                for (ds, bro), r in spine_out.items():
                    new_s = s + ds
                    gen = tuple(sorted(g + tuple(s + b for b in bro) + (new_s,)))
                    key = (hist + (gen,), new_s)
                    nxt[key] = nxt.get(key, 0.0) + p * q * r
        states = nxt
    merged = {}
    for (hist, _), p in states.items():
        merged[hist] = merged.get(hist, 0.0) + p
    return [(p, tuple(tuple(to_val(k) for k in g) for g in h)) for h, p in merged.items()]


def q_vs_p_consistency(law, n, g, max_outcomes=10**7):
    """(E_P[W_n g(T^n)], E_Q[g(T^n)]) by exact enumeration of both sides.

    ``g`` acts on a generation history: a tuple of sorted position tuples,
    one per generation 0..n.
    """
    lhs = 0.0
    for p, hist in enumerate_histories(law, n, max_outcomes):
        w = math.fsum(math.exp(-v) for v in hist[-1])
        lhs += p * w * g(hist)
    rhs = 0.0
    for p, hist in _q_histories(law, n, max_outcomes):
        rhs += p * g(hist)
    return lhs, rhs
