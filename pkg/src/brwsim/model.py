"""Reproduction laws, their log-Laplace transform psi, and boundary-case checks.

Three families are supported, all with closed-form psi:

* ``gaussian-binary``: exactly two children, i.i.d. N(mu, sigma2) displacements;
* ``discrete-atoms``: offspring count on 0..K, children i.i.d. on finite atoms;
* ``joint-atoms``: finitely many whole-brood outcomes (dependence allowed).

Positions follow the minimal-position convention: psi(t) = log E sum e^{-t V(u)}.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .errors import LawError, NoSolution, NotSupercritical

KINDS = ("gaussian-binary", "discrete-atoms", "joint-atoms")
PMF_TOL = 1e-12
NEG_INF = -math.inf


def _pairs(obj):
    if isinstance(obj, dict):
        return tuple(obj.items())
    return tuple(tuple(p) for p in obj)


@dataclass(frozen=True)
class OffspringLaw:
    """Point-process law of one brood of children.

    Build instances with :meth:`gaussian_binary`, :meth:`discrete_atoms` or
    :meth:`joint_atoms` rather than the raw constructor.  ``d_min`` is the
    declared lower bound of a single displacement (``None`` = unbounded).
    """

    kind: str
    mu: float = 0.0
    sigma2: float = 0.0
    offspring: tuple = ()
    atoms: tuple = ()
    broods: tuple = ()
    d_min: float | None = None
    name: str = ""
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise LawError(f"unknown law kind {self.kind!r}")
        if self.kind == "gaussian-binary":
            if not self.sigma2 > 0:
                raise LawError("gaussian-binary requires sigma2 > 0")
            if self.d_min is not None and self.d_min != -math.inf:
                raise LawError("gaussian-binary displacements are unbounded below")
            return
        if self.kind == "discrete-atoms":
            _check_pmf(self.offspring, "offspring_pmf")
            _check_pmf(self.atoms, "displacement atoms")
            for k, _ in self.offspring:
                if int(k) != k or k < 0:
                    raise LawError(f"offspring count {k!r} is not a nonnegative integer")
        else:
            _check_pmf(self.broods, "brood outcomes")
        if self.d_min is not None and math.isfinite(self.d_min):
            lowest = min(self.displacement_values(), default=math.inf)
            if lowest < self.d_min:
                raise LawError(f"d_min={self.d_min} exceeds displacement atom {lowest}")

    # -- constructors --------------------------------------------------------
    @classmethod
    def gaussian_binary(cls, mu, sigma2, name=""):
        return cls("gaussian-binary", mu=float(mu), sigma2=float(sigma2), d_min=None, name=name)

    @classmethod
    def discrete_atoms(cls, offspring_pmf, displacement_atoms, d_min=None, name=""):
        off = tuple(sorted((int(k), float(p)) for k, p in _pairs(offspring_pmf)))
        atoms = tuple(sorted((float(v), float(p)) for v, p in _pairs(displacement_atoms)))
        if d_min is None and atoms:
            d_min = atoms[0][0]
        return cls("discrete-atoms", offspring=off, atoms=atoms, d_min=d_min, name=name)

    @classmethod
    def joint_atoms(cls, broods, d_min=None, name=""):
        out = tuple((tuple(float(x) for x in vec), float(p)) for vec, p in _pairs(broods))
        law = cls("joint-atoms", broods=out, d_min=None, name=name)
        if d_min is None:
            d_min = min(law.displacement_values(), default=None)
        return cls("joint-atoms", broods=out, d_min=d_min, name=name)

    # -- structure -----------------------------------------------------------
    @property
    def is_discrete(self):
        return self.kind != "gaussian-binary"

    def brood_size_pmf(self):
        """Return (sizes, probs) of the offspring count N."""
        if self.kind == "gaussian-binary":
            return np.array([2]), np.array([1.0])
        if self.kind == "discrete-atoms":
            ks, ps = zip(*self.offspring)
            return np.array(ks, dtype=np.int64), np.array(ps)
        sizes = {}
        for vec, p in self.broods:
            sizes[len(vec)] = sizes.get(len(vec), 0.0) + p
        ks = sorted(sizes)
        return np.array(ks, dtype=np.int64), np.array([sizes[k] for k in ks])

    def mean_offspring(self):
        ks, ps = self.brood_size_pmf()
        return float(np.dot(ks, ps))

    def displacement_values(self):
        if self.kind == "discrete-atoms":
            return [v for v, p in self.atoms if p > 0]
        if self.kind == "joint-atoms":
            return [x for vec, p in self.broods if p > 0 for x in vec]
        return []

    def lattice_step(self):
        """Common span h of all displacement atoms, or None if not a lattice law.

        Candidate spans are h0/d for d = 1..12, where h0 is the smallest
        nonzero |atom|.  All-zero laws live on the lattice with h = 1.
        """
        if "lattice" in self._cache:
            return self._cache["lattice"]
        h = None
        if self.is_discrete:
            vals = np.array(self.displacement_values(), dtype=float)
            nz = np.abs(vals[np.abs(vals) > 1e-15])
            if nz.size == 0:
                h = 1.0
            else:
                h0 = nz.min()
                for d in range(1, 13):
                    cand = h0 / d
                    r = vals / cand
                    if np.all(np.abs(r - np.round(r)) <= 1e-9):
                        h = cand
                        break
        self._cache["lattice"] = h
        return h

    def affine(self, scale, shift, name=""):
        """Law of the displacements x -> scale * x + shift."""
        if scale <= 0:
            raise LawError("affine scale must be positive")
        d_min = None if self.d_min is None else scale * self.d_min + shift
        if self.kind == "gaussian-binary":
            return OffspringLaw.gaussian_binary(scale * self.mu + shift, scale**2 * self.sigma2, name=name)
        if self.kind == "discrete-atoms":
            atoms = [(scale * v + shift, p) for v, p in self.atoms]
            return OffspringLaw.discrete_atoms(self.offspring, atoms, d_min=d_min, name=name)
        broods = [(tuple(scale * x + shift for x in vec), p) for vec, p in self.broods]
        return OffspringLaw.joint_atoms(broods, d_min=d_min, name=name)

    def describe(self):
        if self.name:
            return self.name
        if self.kind == "gaussian-binary":
            return f"gaussian-binary(mu={self.mu:g}, sigma2={self.sigma2:g})"
        return self.kind


def _check_pmf(pairs, what):
    if not pairs:
        raise LawError(f"{what} is empty")
    ps = np.array([p for _, p in pairs], dtype=float)
    if np.any(ps < 0) or not np.all(np.isfinite(ps)):
        raise LawError(f"{what} has negative or non-finite probabilities")
    if abs(ps.sum() - 1.0) > PMF_TOL:
        raise LawError(f"{what} sums to {ps.sum()!r}, not 1")


# -- presets -------------------------------------------------------------------

def discrete_binary():
    """Two children, each independently +h w.p. p and -h w.p. 1-p.

    h = arccosh(2) and p = (2+sqrt 3)/4 put the law exactly in the boundary
    case: 2 p e^{-h} = 2 (1-p) e^{h} = 1/2.
    """
    h = math.log(2.0 + math.sqrt(3.0))
    p = (2.0 + math.sqrt(3.0)) / 4.0
    return OffspringLaw.discrete_atoms({2: 1.0}, [(h, p), (-h, 1.0 - p)], name="discrete-binary")


def discrete_gw():
    """Offspring {0: 1/4, 2: 3/4} with +-a displacements, a = arccosh(3/2).

    p = e^a / 3 gives p e^{-a} = (1-p) e^{a} = 1/3, the boundary case for
    mean offspring 3/2.  Extinction probability is 1/3.
    """
    a = math.acosh(1.5)
    p = math.exp(a) / 3.0
    return OffspringLaw.discrete_atoms({0: 0.25, 2: 0.75}, [(a, p), (-a, 1.0 - p)], name="discrete-gw")


def gaussian_boundary():
    """gaussian-binary(2 ln 2, 2 ln 2); psi(t) = ln 2 (1 - t)^2."""
    ln2 = math.log(2.0)
    return OffspringLaw.gaussian_binary(2 * ln2, 2 * ln2, name="gaussian-binary-boundary")


PRESETS = {
    "discrete-binary": discrete_binary,
    "discrete-gw": discrete_gw,
    "gaussian-boundary": gaussian_boundary,
}


# -- psi -----------------------------------------------------------------------

def _atom_terms(law):
    """Flatten E sum_u f(V(u)) into (values, weights) with sum weights = E N."""
    if law.kind == "discrete-atoms":
        m = law.mean_offspring()
        vals = np.array([v for v, _ in law.atoms])
        w = np.array([p for _, p in law.atoms]) * m
    else:
        vals = np.array([x for vec, p in law.broods for x in vec])
        w = np.array([p for vec, p in law.broods for _ in vec])
    keep = w > 0
    return vals[keep], w[keep]


def psi(law, t):
    """log E[sum_{|u|=1} e^{-t V(u)}], in closed form.

    Returns -inf when the brood is empty almost surely.
    """
    t = float(t)
    if law.kind == "gaussian-binary":
        return math.log(2.0) - t * law.mu + 0.5 * t * t * law.sigma2
    vals, w = _atom_terms(law)
    if vals.size == 0:
        return NEG_INF
    return float(logsumexp(-t * vals, b=w))


def psi_prime(law, t):
    """Exact derivative of :func:`psi` in t."""
    t = float(t)
    if law.kind == "gaussian-binary":
        return -law.mu + t * law.sigma2
    vals, w = _atom_terms(law)
    if vals.size == 0:
        return math.nan
    lw = np.log(w) - t * vals
    lw -= lw.max()
    pw = np.exp(lw)
    return float(-np.dot(pw, vals) / pw.sum())


@dataclass(frozen=True)
class AssumptionReport:
    psi0: float
    psi1: float
    psi1_prime: float
    moment_1_plus_delta_finite: bool
    exp_moments_finite: bool
    passes_boundary: bool
    tolerance: float


def validate_assumptions(law, tolerance=1e-9):
    """Check the standing moment assumptions and psi(0)>0, psi(1)=psi'(1)=0.

    Supported kinds have bounded offspring counts and displacements with all
    exponential moments, so both moment flags hold structurally.  Failures
    are reported, never raised.
    """
    if not tolerance > 0:
        raise ValueError("tolerance must be positive")
    p0 = psi(law, 0.0)
    p1 = psi(law, 1.0)
    d1 = psi_prime(law, 1.0)
    ks, _ = law.brood_size_pmf()
    moment_ok = bool(np.all(np.isfinite(ks)))
    exp_ok = law.kind == "gaussian-binary" or bool(np.all(np.isfinite(law.displacement_values())))
    passes = (
        p0 > 0
        and math.isfinite(p1)
        and abs(p1) <= tolerance
        and math.isfinite(d1)
        and abs(d1) <= tolerance
        and moment_ok
        and exp_ok
    )
    return AssumptionReport(p0, p1, d1, moment_ok, exp_ok, bool(passes), tolerance)


def boundary_normalize(law, t_bracket=(1e-3, 50.0), tol=1e-12, probes=200):
    """Solve t psi'(t) = psi(t) and return (t_star, law') in the boundary case.

    law' is the law of t_star * V + psi(t_star) per generation.  The bracket
    is scanned at ``probes`` log-spaced points before bisection.
    """
    lo, hi = t_bracket
    if not (0 < lo < hi):
        raise ValueError("bracket endpoints must satisfy 0 < lo < hi")

    def g(t):
        return t * psi_prime(law, t) - psi(law, t)

    ts = np.geomspace(lo, hi, probes)
    gs = np.array([g(t) for t in ts])
    if not np.all(np.isfinite(gs)):
        raise NoSolution("t psi'(t) - psi(t) is not finite on the bracket")
    # values within rounding noise of 0 carry no sign information: g can creep
    # up to 0 without crossing (e.g. when N * P(V = d_min) = 1)
    noise = 1e-12 * np.array([max(1.0, abs(t * psi_prime(law, t)), abs(psi(law, t))) for t in ts])
    valid = np.flatnonzero(np.abs(gs) > noise)
    signs = np.sign(gs[valid])
    change = np.flatnonzero(signs[:-1] != signs[1:])
    if change.size == 0:
        raise NoSolution(
            f"t psi'(t) - psi(t) does not change sign on [{lo:g}, {hi:g}]"
        )
    i, j = valid[change[0]], valid[change[0] + 1]
    a, b = ts[i], ts[j]
    ga = gs[i]
    if ga == 0:
        t_star = a
    else:
        while b - a > tol:
            m = 0.5 * (a + b)
            gm = g(m)
            if gm == 0:
                a = b = m
                break
            if (gm < 0) == (ga < 0):
                a, ga = m, gm
            else:
                b = m
        t_star = 0.5 * (a + b)
    shift = psi(law, t_star)
    name = f"{law.describe()} (boundary-normalized)"
    return t_star, law.affine(t_star, shift, name=name)


def extinction_prob(law, tol=1e-12, max_iter=10_000_000):
    """Smallest root of E(s^N) = s on [0, 1), by monotone iteration from 0."""
    ks, ps = law.brood_size_pmf()
    mean = float(np.dot(ks, ps))
    if mean <= 1.0:
        raise NotSupercritical(f"mean offspring {mean:g} <= 1")

    def f(s):
        return float(np.dot(ps, s ** ks.astype(float)))

    s = 0.0
    for _ in range(max_iter):
        fs = f(s)
        if abs(fs - s) <= tol:
            return fs
        s = fs
    return s
