"""Generation-streamed simulation of the branching random walk under P.

Lattice laws (all displacement atoms on h*Z) are advanced as site histograms
with exact multinomial splitting, so a generation costs O(#occupied sites)
regardless of how many particles it holds.  Other laws are advanced particle
by particle with vectorised numpy draws.
"""
from __future__ import annotations

import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from . import rng as rngmod
from .errors import PopulationOverflow, TooLarge
from .model import OffspringLaw

DEFAULT_HARD_LIMIT = 10**8
DEFAULT_CAP = 10**6
# A window of 30 loses most of W_n (and biases the minimum) by n ~ 10^3 on the
# discrete-binary law; 150 keeps the dropped mass below 1% there.
DEFAULT_PRUNE = 150.0


@dataclass(frozen=True)
class Mode:
    """Population control: ``exact``, ``cap`` (keep N lowest) or ``prune`` (window Δ)."""

    kind: str = "exact"
    param: float = 0.0

    def __post_init__(self):
        if self.kind not in ("exact", "cap", "prune"):
            raise ValueError(f"unknown mode {self.kind!r}")
        if self.kind == "cap" and not self.param >= 1:
            raise ValueError("cap(N) needs N >= 1")
        if self.kind == "prune" and not self.param > 0:
            raise ValueError("prune(Δ) needs Δ > 0")

    @classmethod
    def parse(cls, text):
        """Parse ``exact``, ``cap``, ``cap:N``, ``prune`` or ``prune:Δ`` (also ``prune(Δ)``)."""
        s = str(text).strip().replace("(", ":").rstrip(")")
        kind, _, arg = s.partition(":")
        kind = kind.strip()
        if kind == "exact":
            return cls("exact")
        if kind == "cap":
            return cls("cap", float(arg) if arg else float(DEFAULT_CAP))
        if kind == "prune":
            return cls("prune", float(arg) if arg else DEFAULT_PRUNE)
        raise ValueError(f"unknown mode {text!r}")

    def __str__(self):
        if self.kind == "exact":
            return "exact"
        return f"{self.kind}({self.param:g})"

    @property
    def code(self):
        return {"exact": K.EXACT, "cap": K.CAP, "prune": K.PRUNE}[self.kind]


EXACT = Mode()


@dataclass
class Generation:
    """Positions of generation ``index`` as a multiset (distinct values, counts).

    ``sites`` holds integer lattice coordinates (position = site * step) for
    lattice laws and is None otherwise.
    """

    index: int
    values: np.ndarray
    counts: np.ndarray
    dropped_mass_bound: float = 0.0
    sites: np.ndarray | None = None
    step: float | None = None

    @classmethod
    def root(cls, law=None):
        step = law.lattice_step() if law is not None else None
        sites = np.zeros(1, dtype=np.int64) if step is not None else None
        return cls(0, np.zeros(1), np.ones(1), 0.0, sites, step)

    @classmethod
    def from_lattice(cls, index, counts, lo, step, dropped=0.0):
        nz = np.flatnonzero(counts)
        sites = (lo + nz).astype(np.int64)
        return cls(index, sites * step, counts[nz].astype(float), dropped, sites, step)

    @classmethod
    def from_positions(cls, index, positions, step=None):
        """Generation holding one particle per entry of ``positions``."""
        values = np.sort(np.asarray(positions, dtype=float))
        if step is None:
            return cls(index, values, np.ones(values.size))
        sites, counts = np.unique(np.rint(values / step).astype(np.int64), return_counts=True)
        return cls(index, sites * step, counts.astype(float), 0.0, sites, step)

    @property
    def count(self):
        return float(self.counts.sum())

    @property
    def empty(self):
        return self.values.size == 0

    def positions(self):
        """Expanded sorted array of positions (one entry per particle)."""
        return np.repeat(self.values, self.counts.astype(np.int64))

    def dense(self):
        """(counts, lo) over consecutive lattice sites."""
        if self.sites is None:
            raise ValueError("not a lattice generation")
        if self.sites.size == 0:
            return np.zeros(0), 0
        lo = int(self.sites.min())
        dense = np.zeros(int(self.sites.max()) - lo + 1)
        np.add.at(dense, self.sites - lo, self.counts)
        return dense, lo

    def merged(self, other):
        """Union of two multisets on the same lattice (or both off-lattice)."""
        values = np.concatenate([self.values, other.values])
        counts = np.concatenate([self.counts, other.counts])
        if self.sites is not None and other.sites is not None:
            sites = np.concatenate([self.sites, other.sites])
            uniq, inv = np.unique(sites, return_inverse=True)
            c = np.zeros(uniq.size)
            np.add.at(c, inv, counts)
            return Generation(self.index, uniq * self.step, c,
                              self.dropped_mass_bound + other.dropped_mass_bound, uniq, self.step)
        order = np.argsort(values, kind="stable")
        return Generation(self.index, values[order], counts[order],
                          self.dropped_mass_bound + other.dropped_mass_bound)


# -- compiled law tables --------------------------------------------------------

def _lattice_tables(law):
    if "tables" in law._cache:
        return law._cache["tables"]
    h = law.lattice_step()
    empty_i = np.zeros(0, dtype=np.int64)
    empty_f = np.zeros(0)
    if law.kind == "discrete-atoms":
        off = [(k, p) for k, p in law.offspring if p > 0]
        atoms = [(int(round(v / h)), p) for v, p in law.atoms if p > 0]
        off_k = np.array([k for k, _ in off], dtype=np.float64)
        off_p = np.array([p for _, p in off])
        shifts = np.array([s for s, _ in atoms], dtype=np.int64)
        shift_p = np.array([p for _, p in atoms])
        tab = dict(joint=False, off_k=off_k, off_p=off_p, shifts=shifts, shift_p=shift_p,
                   brood_shift=np.zeros((0, 0), dtype=np.int64), brood_len=empty_i, brood_p=empty_f,
                   smin=int(shifts.min()), smax=int(shifts.max()))
    else:
        broods = [(vec, p) for vec, p in law.broods if p > 0]
        width = max(1, max(len(v) for v, _ in broods))
        bs = np.zeros((len(broods), width), dtype=np.int64)
        bl = np.zeros(len(broods), dtype=np.int64)
        for r, (vec, _) in enumerate(broods):
            bl[r] = len(vec)
            bs[r, :len(vec)] = [int(round(x / h)) for x in vec]
        used = [s for r in range(len(broods)) for s in bs[r, :bl[r]]]
        tab = dict(joint=True, off_k=empty_f, off_p=empty_f, shifts=empty_i, shift_p=empty_f,
                   brood_shift=bs, brood_len=bl, brood_p=np.array([p for _, p in broods]),
                   smin=int(min(used, default=0)), smax=int(max(used, default=0)))
    law._cache["tables"] = tab
    return tab


def _prune_levels(delta, h):
    return int(math.floor(delta / h * (1 + 1e-12)))


# -- one generation ---------------------------------------------------------------

def step_generation(law: OffspringLaw, gen: Generation, rng, mode: Mode = EXACT,
                    hard_limit=DEFAULT_HARD_LIMIT) -> Generation:
    """Advance ``gen`` by one generation.

    Every particle independently draws a brood; ``cap(N)`` keeps the N lowest
    children and ``prune(Δ)`` drops children above min + Δ, adding the removed
    e^{-V} mass to ``dropped_mass_bound``.
    """
    index = gen.index + 1
    if gen.empty:
        return Generation(index, np.zeros(0), np.zeros(0), gen.dropped_mass_bound,
                          None if gen.sites is None else np.zeros(0, dtype=np.int64), gen.step)
    h = law.lattice_step()
    if h is not None and gen.sites is not None:
        tab = _lattice_tables(law)
        dense, lo = gen.dense()
        new = K.lattice_offspring(dense, rng, tab["joint"], tab["off_k"], tab["off_p"], tab["shifts"],
                                  tab["shift_p"], tab["brood_shift"], tab["brood_len"], tab["brood_p"],
                                  tab["smin"], tab["smax"])
        if mode.kind == "exact" and new.sum() > hard_limit:
            raise PopulationOverflow(f"generation {index} would hold {new.sum():.3g} particles")
        counts, lo2, dropped = K.lattice_control(new, lo + tab["smin"], h, mode.code, float(mode.param),
                                                 _prune_levels(mode.param, h) if mode.kind == "prune" else 0)
        return Generation.from_lattice(index, counts, lo2, h, gen.dropped_mass_bound + dropped)
    children = _particle_children(law, gen.positions(), rng, mode, hard_limit, index)
    values, dropped = _control_particles(np.sort(children), mode)
    return Generation(index, values, np.ones(values.size), gen.dropped_mass_bound + dropped)


def _particle_children(law, parents, rng, mode, hard_limit, index):
    n = parents.size
    if law.kind == "gaussian-binary":
        total = 2 * n
        if mode.kind == "exact" and total > hard_limit:
            raise PopulationOverflow(f"generation {index} would hold {total} particles")
        return np.repeat(parents, 2) + rng.normal(law.mu, math.sqrt(law.sigma2), total)
    if law.kind == "discrete-atoms":
        ks = np.array([k for k, _ in law.offspring])
        kp = np.array([p for _, p in law.offspring])
        nk = ks[rng.choice(ks.size, size=n, p=kp)] if ks.size > 1 else np.full(n, ks[0])
        total = int(nk.sum())
        if mode.kind == "exact" and total > hard_limit:
            raise PopulationOverflow(f"generation {index} would hold {total} particles")
        av = np.array([v for v, _ in law.atoms])
        ap = np.array([p for _, p in law.atoms])
        disp = av[rng.choice(av.size, size=total, p=ap)]
        return np.repeat(parents, nk) + disp
    probs = np.array([p for _, p in law.broods])
    pick = rng.choice(probs.size, size=n, p=probs)
    sizes = np.array([len(v) for v, _ in law.broods])[pick]
    total = int(sizes.sum())
    if mode.kind == "exact" and total > hard_limit:
        raise PopulationOverflow(f"generation {index} would hold {total} particles")
    disp = np.concatenate([np.asarray(law.broods[r][0], dtype=float) for r in pick]) if total else np.zeros(0)
    return np.repeat(parents, sizes) + disp


def _control_particles(children, mode):
    if children.size == 0 or mode.kind == "exact":
        return children, 0.0
    if mode.kind == "prune":
        keep = children <= children[0] + mode.param
    else:
        keep = np.arange(children.size) < int(mode.param)
    removed = children[~keep]
    dropped = K.weighted_expsum(removed, np.ones(removed.size), 1.0) if removed.size else 0.0
    return children[keep], dropped


# -- one trial -----------------------------------------------------------------------

@dataclass
class TrialStats:
    """Per-generation summary of one trial, k = 0..n.

    Extinct generations carry count 0, w = w_beta = 0, min_v = +inf and
    max_v = -inf (empty-sum / empty-inf conventions).
    """

    betas: tuple
    k: np.ndarray
    count: np.ndarray
    min_v: np.ndarray
    max_v: np.ndarray
    w: np.ndarray
    w_beta: np.ndarray
    dropped_mass_bound: np.ndarray
    generations: dict = field(default_factory=dict)

    @property
    def survived(self):
        return self.count > 0

    @property
    def n(self):
        return int(self.k[-1])

    def record(self, k):
        return dict(k=int(self.k[k]), count=self.count[k], min_v=self.min_v[k], max_v=self.max_v[k],
                    w=self.w[k], w_beta={b: self.w_beta[k, i] for i, b in enumerate(self.betas)},
                    survived=bool(self.count[k] > 0), dropped_mass_bound=self.dropped_mass_bound[k])

    def __eq__(self, other):
        if not isinstance(other, TrialStats):
            return NotImplemented
        return self.betas == other.betas and all(
            np.array_equal(getattr(self, a), getattr(other, a))
            for a in ("k", "count", "min_v", "max_v", "w", "w_beta", "dropped_mass_bound"))


def _stats_from_rows(betas, stats, wbeta):
    n1 = stats.shape[0]
    return TrialStats(tuple(betas), np.arange(n1), stats[:, 0].copy(), stats[:, 1].copy(),
                      stats[:, 2].copy(), stats[:, 3].copy(), wbeta.copy(), stats[:, 4].copy())


def stats_of(gen: Generation, betas):
    """(count, min_v, max_v, w, w_beta) of one generation."""
    if gen.empty:
        return 0.0, math.inf, -math.inf, 0.0, np.zeros(len(betas))
    w = K.weighted_expsum(gen.values, gen.counts, 1.0)
    wb = np.array([K.weighted_expsum(gen.values, gen.counts, float(b)) for b in betas])
    return gen.count, float(gen.values[0]), float(gen.values[-1]), w, wb


def run_trial(law, n, seed, mode: Mode = EXACT, betas=(), trial=0, keep=(),
              hard_limit=DEFAULT_HARD_LIMIT) -> TrialStats:
    """Simulate generations 0..n of trial ``trial`` under master ``seed``.

    Deterministic in (law, n, seed, trial, mode, betas).  Generations listed in
    ``keep`` are returned in ``TrialStats.generations``.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    betas = tuple(float(b) for b in betas)
    rng = rngmod.trial_rng(seed, trial)
    keep = set(int(k) for k in keep)
    h = law.lattice_step()
    if h is not None:
        tab = _lattice_tables(law)
        keep_mask = np.zeros(n + 1, dtype=np.bool_)
        for k in keep:
            if 0 <= k <= n:
                keep_mask[k] = True
        stats, wbeta, status, snaps, los = K.run_lattice(
            rng, n, h, tab["joint"], tab["off_k"], tab["off_p"], tab["shifts"], tab["shift_p"],
            tab["brood_shift"], tab["brood_len"], tab["brood_p"], tab["smin"], tab["smax"],
            mode.code, float(mode.param), _prune_levels(mode.param, h) if mode.kind == "prune" else 0,
            float(hard_limit), np.array(betas, dtype=float), keep_mask)
        if status:
            raise PopulationOverflow(f"trial {trial}: generation {status} exceeds {hard_limit:g} particles")
        out = _stats_from_rows(betas, stats, wbeta)
        for k, c, lo in zip(sorted(keep & set(range(n + 1))), snaps, los):
            out.generations[k] = Generation.from_lattice(k, c, lo, h, out.dropped_mass_bound[k])
        return out
    stats = np.zeros((n + 1, 5))
    wbeta = np.zeros((n + 1, len(betas)))
    gen = Generation.root(law)
    kept = {}
    for k in range(n + 1):
        if k > 0:
            gen = step_generation(law, gen, rng, mode, hard_limit)
        c, lo_v, hi_v, w, wb = stats_of(gen, betas)
        stats[k] = (c, lo_v, hi_v, w, gen.dropped_mass_bound)
        wbeta[k] = wb
        if k in keep:
            kept[k] = gen
    out = _stats_from_rows(betas, stats, wbeta)
    out.generations = kept
    return out


# -- many trials -------------------------------------------------------------------

@dataclass
class Sample:
    """Statistics of many trials at selected horizons, in trial order.

    Arrays are indexed ``[trial]``; ``w_beta[n]`` has shape (trials, len(betas)).
    """

    law_name: str
    ns: tuple
    betas: tuple
    mode: str
    seed: int
    count: dict
    min_v: dict
    max_v: dict
    w: dict
    w_beta: dict
    dropped: dict
    generations: dict

    @property
    def trials(self):
        return len(next(iter(self.w.values()))) if self.w else 0

    def survived(self, n):
        return self.count[n] > 0

    def subset(self, idx):
        pick = lambda d: {n: v[idx] for n, v in d.items()}
        gens = {n: [g[i] for i in np.arange(len(g))[idx]] for n, g in self.generations.items()}
        return Sample(self.law_name, self.ns, self.betas, self.mode, self.seed, pick(self.count),
                      pick(self.min_v), pick(self.max_v), pick(self.w), pick(self.w_beta),
                      pick(self.dropped), gens)


def _collect_block(args):
    law, ns, betas, mode, seed, start, stop, keep, hard_limit = args
    nmax = max(ns)
    idx = list(ns)
    t = stop - start
    out = dict(count=np.zeros((t, len(ns))), min_v=np.zeros((t, len(ns))), max_v=np.zeros((t, len(ns))),
               w=np.zeros((t, len(ns))), dropped=np.zeros((t, len(ns))),
               w_beta=np.zeros((t, len(ns), len(betas))), generations={k: [] for k in keep})
    for i, trial in enumerate(range(start, stop)):
        st = run_trial(law, nmax, seed, mode, betas, trial=trial, keep=keep, hard_limit=hard_limit)
        out["count"][i] = st.count[idx]
        out["min_v"][i] = st.min_v[idx]
        out["max_v"][i] = st.max_v[idx]
        out["w"][i] = st.w[idx]
        out["dropped"][i] = st.dropped_mass_bound[idx]
        out["w_beta"][i] = st.w_beta[idx]
        for k in keep:
            out["generations"][k].append(st.generations[k])
    return out


def collect(law, ns, trials, seed, mode: Mode = EXACT, betas=(), keep=(), threads=1,
            first_trial=0, hard_limit=DEFAULT_HARD_LIMIT) -> Sample:
    """Run ``trials`` independent trials to max(ns) and keep statistics at each n in ns.

    Trial t uses the stream keyed by (seed, first_trial + t); with ``threads``
    > 1 trial blocks run in worker processes and are reassembled in order.
    """
    ns = tuple(sorted(set(int(n) for n in ns)))
    betas = tuple(float(b) for b in betas)
    keep = tuple(sorted(set(int(k) for k in keep)))
    bounds = np.linspace(first_trial, first_trial + trials, max(1, threads) * 4 + 1).astype(int)
    jobs = [(law, ns, betas, mode, seed, int(a), int(b), keep, hard_limit)
            for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as ex:
            blocks = list(ex.map(_collect_block, jobs))
    else:
        blocks = [_collect_block(j) for j in jobs]
    cat = lambda key: np.concatenate([b[key] for b in blocks]) if blocks else np.zeros((0, len(ns)))
    per_n = lambda arr: {n: arr[:, j].copy() for j, n in enumerate(ns)}
    wb = np.concatenate([b["w_beta"] for b in blocks]) if blocks else np.zeros((0, len(ns), len(betas)))
    return Sample(
        law.describe(), ns, betas, str(mode), int(seed),
        per_n(cat("count")), per_n(cat("min_v")), per_n(cat("max_v")), per_n(cat("w")),
        {n: wb[:, j, :].copy() for j, n in enumerate(ns)},
        per_n(cat("dropped")),
        {k: [g for b in blocks for g in b["generations"][k]] for k in keep},
    )


# -- CSV ------------------------------------------------------------------------------

def _fmt(x):
    x = float(x)
    if math.isfinite(x) and x == int(x) and abs(x) < 2**53:
        return str(int(x))
    return repr(x)


def trial_header(betas):
    return ["trial", "k", "count", "min_v", "max_v", "w",
            *[f"w_beta_{b:g}" for b in betas], "survived", "dropped_mass_bound"]


def write_trial_csv(stats_list, out=None, first_trial=0):
    """Serialise TrialStats rows; returns the text when ``out`` is None."""
    buf = io.StringIO() if out is None else out
    betas = stats_list[0].betas if stats_list else ()
    buf.write(",".join(trial_header(betas)) + "\n")
    for t, st in enumerate(stats_list, start=first_trial):
        for k in range(len(st.k)):
            row = [str(t), str(k), _fmt(st.count[k]), repr(float(st.min_v[k])), repr(float(st.max_v[k])),
                   repr(float(st.w[k])), *[repr(float(x)) for x in st.w_beta[k]],
                   "1" if st.count[k] > 0 else "0", repr(float(st.dropped_mass_bound[k]))]
            buf.write(",".join(row) + "\n")
    if out is None:
        return buf.getvalue()
    return None


# -- exhaustive enumeration ------------------------------------------------------------

def _exact_keys(law):
    """(to_key, to_value) maps so that positions add exactly as keys."""
    h = law.lattice_step()
    if h is not None:
        return (lambda x: int(round(x / h))), (lambda k: k * h)
    return (lambda x: round(float(x), 12)), float


def brood_outcomes(law):
    """Unordered brood outcomes as (sorted tuple of displacements, probability)."""
    if not law.is_discrete:
        raise TypeError("enumeration needs a discrete law")
    if law.kind == "joint-atoms":
        out = {}
        for vec, p in law.broods:
            if p > 0:
                key = tuple(sorted(vec))
                out[key] = out.get(key, 0.0) + p
        return list(out.items())
    from itertools import combinations_with_replacement
    atoms = [(v, p) for v, p in law.atoms if p > 0]
    out = {}
    for k, pk in law.offspring:
        if pk <= 0:
            continue
        for combo in combinations_with_replacement(range(len(atoms)), k):
            mult = math.factorial(k)
            prob = pk
            for a in set(combo):
                c = combo.count(a)
                mult //= math.factorial(c)
                prob *= atoms[a][1] ** c
            key = tuple(sorted(atoms[a][0] for a in combo))
            out[key] = out.get(key, 0.0) + mult * prob
    return list(out.items())


def _generation_law(parents, broods, to_key, budget):
    """Distribution of the next generation (sorted key tuple) given parent keys."""
    dist = {(): 1.0}
    for x in parents:
        nxt = {}
        budget[0] -= len(dist) * len(broods)
        if budget[0] < 0:
            raise TooLarge("enumeration exceeds its outcome budget")
        for state, p in dist.items():
            for disp, q in broods:
                key = tuple(sorted(state + tuple(x + d for d in disp)))
                nxt[key] = nxt.get(key, 0.0) + p * q
        dist = nxt
    return dist


def enumerate_histories(law, n, max_outcomes=10**7):
    """Exact law of the generation history (G_0, ..., G_n) for a discrete law.

    Returns a list of (probability, history) where history[k] is the sorted
    tuple of positions (as floats) of generation k.
    """
    to_key, to_val = _exact_keys(law)
    broods = [(tuple(to_key(d) for d in disp), p) for disp, p in brood_outcomes(law)]
    budget = [int(max_outcomes)]
    cache = {}
    hist = {((0,),): 1.0}
    for _ in range(n):
        nxt = {}
        for h, p in hist.items():
            last = h[-1]
            if last not in cache:
                cache[last] = _generation_law(last, broods, to_key, budget)
            for g, q in cache[last].items():
                key = h + (g,)
                nxt[key] = nxt.get(key, 0.0) + p * q
        budget[0] -= len(nxt)
        if budget[0] < 0:
            raise TooLarge("enumeration exceeds its outcome budget")
        hist = nxt
    return [(p, tuple(tuple(to_val(k) for k in g) for g in h)) for h, p in hist.items()]


def history_stats(history, betas=()):
    """TrialStats of one enumerated history."""
    n1 = len(history)
    stats = np.zeros((n1, 5))
    wb = np.zeros((n1, len(betas)))
    for k, g in enumerate(history):
        vals = np.array(g, dtype=float)
        gen = Generation(k, vals, np.ones(vals.size))
        c, lo, hi, w, wbk = stats_of(gen, betas)
        stats[k] = (c, lo, hi, w, 0.0)
        wb[k] = wbk
    return _stats_from_rows(tuple(float(b) for b in betas), stats, wb)


def enumerate_exact(law, n, betas=(), max_outcomes=10**7):
    """Exhaustive weighted list of (probability, TrialStats) over all histories to depth n."""
    return [(p, history_stats(h, betas)) for p, h in enumerate_histories(law, n, max_outcomes)]


def enumerate_paths(law, n, max_outcomes=10**7):
    """Exact law of the multiset of ancestral paths of generation n.

    Returns (probability, paths) pairs; each path is (V(u_1), ..., V(u_n)).
    Used by the many-to-one oracle, which needs genealogy.
    """
    to_key, to_val = _exact_keys(law)
    broods = [(tuple(to_key(d) for d in disp), p) for disp, p in brood_outcomes(law)]
    budget = [int(max_outcomes)]
    dist = {((),): 1.0}
    for _ in range(n):
        nxt = {}
        for paths, p in dist.items():
            sub = {(): 1.0}
            for path in paths:
                x = path[-1] if path else 0
                grown = {}
                budget[0] -= len(sub) * len(broods)
                if budget[0] < 0:
                    raise TooLarge("enumeration exceeds its outcome budget")
                for state, q in sub.items():
                    for disp, r in broods:
                        key = tuple(sorted(state + tuple(path + (x + d,) for d in disp)))
                        grown[key] = grown.get(key, 0.0) + q * r
                sub = grown
            for key, q in sub.items():
                nxt[key] = nxt.get(key, 0.0) + p * q
        dist = nxt
    return [(p, [tuple(to_val(k) for k in path) for path in paths]) for paths, p in dist.items()]
