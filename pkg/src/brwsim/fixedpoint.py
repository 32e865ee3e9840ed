"""Fixed point of the smoothing transform and its tabulated Laplace transform.

The unknown is phi(t) = E exp(-t xi) with xi = sum_u e^{-V(u)} xi_u in law,
i.e. phi = T[phi] where

    T[phi](t) = E prod_{|u|=1} phi(t e^{-V(u)}).

Internally every table is held as y(t) = log(1/phi(t)) so that values of phi
within 1e-16 of 1 (small t) or of 0 (large t, q = 0) keep full precision.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq
from scipy.special import logsumexp

from .errors import DomainError, NoConvergence, PhiRangeError, PoorFit
from .model import extinction_prob
from .simulate import Mode, collect

LN2 = math.log(2.0)
GRID = (1e-8, 1e4, 400)
HERMITE_NODES = 64


@dataclass
class PhiTable:
    """phi tabulated on a log-spaced grid, with both-side extensions.

    Between grid points log(1/phi) is interpolated as a monotone cubic in
    log t.  Below ``grid[0]`` the table continues as
    log(1/phi(t)) = t (c_lo log(1/t) + d_lo); above ``grid[-1]`` phi - q decays
    exponentially at ``tail_rate`` (q > 0) or log log(1/phi) continues linearly
    in log t with slope ``tail_slope`` (q = 0).
    """

    grid: np.ndarray
    phi: np.ndarray
    q: float
    scale: float = 1.0
    tol: float = 0.0
    residual: float = math.nan
    iterations: int = 0
    history: list = field(default_factory=list, repr=False)
    y: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.phi = np.asarray(self.phi, dtype=float)
        if self.y is None:
            self.y = -np.log(self.phi)
        self.y = np.asarray(self.y, dtype=float)
        if self.grid.size < 3 or self.grid.shape != self.y.shape:
            raise ValueError("grid and values must be matching arrays of length >= 3")
        if np.any(np.diff(self.grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        self._build()

    @classmethod
    def from_log(cls, grid, y, q, **kw):
        y = np.asarray(y, dtype=float)
        return cls(grid, np.exp(-y), q, y=y, **kw)

    def _build(self):
        t, y = self.grid, self.y
        lt = np.log(t)
        self._lt = lt
        self._spline = PchipInterpolator(lt, np.log(y), extrapolate=False)
        r0, r1 = y[0] / t[0], y[1] / t[1]
        self.c_lo = (r0 - r1) / (lt[1] - lt[0])
        self.d_lo = r0 + self.c_lo * lt[0]
        self.tail_rate = 0.0
        self.tail_slope = 0.0
        if self.q > 0:
            p1 = math.exp(-y[-1]) - self.q
            p2 = math.exp(-y[-2]) - self.q
            self._tail_gap = max(p1, 0.0)
            if 0 < p1 < p2:
                self.tail_rate = math.log(p2 / p1) / (t[-1] - t[-2])
        else:
            self.tail_slope = (math.log(y[-1]) - math.log(y[-2])) / (lt[-1] - lt[-2])

    @property
    def t_lo(self):
        return float(self.grid[0])

    @property
    def t_hi(self):
        return float(self.grid[-1])

    def log_inv(self, t):
        """log(1/phi(t)), accurate for phi near 0 and near 1."""
        x = np.asarray(t, dtype=float)
        if np.any(np.isnan(x)) or np.any(x < 0):
            raise PhiRangeError("phi is defined for t >= 0 only")
        out = np.empty_like(x)
        lo = x < self.grid[0]
        hi = x > self.grid[-1]
        mid = ~(lo | hi)
        out[mid] = np.exp(self._spline(np.log(x[mid])))
        xl = x[lo]
        with np.errstate(divide="ignore", invalid="ignore"):
            out[lo] = np.where(xl > 0, xl * (self.c_lo * -np.log(xl) + self.d_lo), 0.0)
        xh = x[hi]
        if self.q > 0:
            out[hi] = -np.log(self.q + self._tail_gap * np.exp(-self.tail_rate * (xh - self.grid[-1])))
        else:
            with np.errstate(over="ignore"):
                out[hi] = self.y[-1] * np.exp(self.tail_slope * (np.log(xh) - self._lt[-1]))
        return out if out.ndim else float(out)

    def __call__(self, t):
        return np.exp(-self.log_inv(t))

    @property
    def c_star(self):
        try:
            return cstar_fit(self)[0]
        except (PoorFit, DomainError):
            return math.nan

    # -- serialization -----------------------------------------------------
    def to_csv(self, out=None):
        buf = io.StringIO()
        buf.write(f"# q={float(self.q)!r},c_star={float(self.c_star)!r},tol={float(self.tol)!r},scale={float(self.scale)!r},"
                  f"residual={float(self.residual)!r},tail=exponential\n")
        # log(1/phi) is kept alongside phi: near t = 0 it cannot be recovered from phi
        buf.write("t,phi,log_inv_phi\n")
        for t, p, y in zip(self.grid, self.phi, self.y):
            buf.write(f"{float(t)!r},{float(p)!r},{float(y)!r}\n")
        text = buf.getvalue()
        if out is not None:
            out.write(text)
        return text

    @classmethod
    def from_csv(cls, text):
        lines = [ln for ln in text.strip().splitlines() if ln.strip()]
        meta = {}
        if lines[0].startswith("#"):
            for part in lines[0][1:].split(","):
                k, _, v = part.strip().partition("=")
                meta[k] = v
            lines = lines[1:]
        rows = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
        y = rows[:, 2] if rows.shape[1] > 2 else None
        return cls(rows[:, 0], rows[:, 1], float(meta.get("q", 0.0)), y=y,
                   scale=float(meta.get("scale", 1.0)), tol=float(meta.get("tol", 0.0)),
                   residual=float(meta.get("residual", "nan")))


# -- the operator ---------------------------------------------------------------

def _operator_tables(law):
    """Brood description used by T: ('iid', values, probs, ks, ps) or ('joint', broods)."""
    if "T" in law._cache:
        return law._cache["T"]
    if law.kind == "gaussian-binary":
        z, w = np.polynomial.hermite.hermgauss(HERMITE_NODES)
        tab = ("iid", law.mu + math.sqrt(2.0 * law.sigma2) * z, w / math.sqrt(math.pi),
               np.array([2]), np.array([1.0]))
    elif law.kind == "discrete-atoms":
        ks, ps = law.brood_size_pmf()
        tab = ("iid", np.array([v for v, _ in law.atoms]), np.array([p for _, p in law.atoms]),
               ks.astype(float), ps)
    else:
        tab = ("joint", [(np.array(vec, dtype=float), p) for vec, p in law.broods if p > 0])
    law._cache["T"] = tab
    return tab


def _log1m(u):
    """log(1 - u) for u in [0, 1]."""
    with np.errstate(divide="ignore"):
        return np.log1p(-u)


def _apply_log(law, ylog, t):
    """log(1/T[phi](t)) given ylog(x) = log(1/phi(x))."""
    t = np.asarray(t, dtype=float)
    tab = _operator_tables(law)
    if tab[0] == "iid":
        _, vals, probs, ks, ps = tab
        ya = np.stack([ylog(t * math.exp(-v)) for v in vals])
        pa = probs.reshape((-1,) + (1,) * t.ndim)
        # log G with G = E phi(t e^{-X}); the expm1 route keeps precision for G near 1
        u = np.sum(pa * -np.expm1(-ya), axis=0)
        log_g = np.where(u < 0.5, _log1m(np.minimum(u, 0.5)), logsumexp(-ya, b=pa, axis=0))
        kk = ks.reshape((-1,) + (1,) * t.ndim)
        pk = ps.reshape((-1,) + (1,) * t.ndim)
        with np.errstate(invalid="ignore"):
            terms = np.where(kk == 0, 0.0, kk * log_g)
        om = np.sum(pk * -np.expm1(terms), axis=0)
        lt = logsumexp(terms, b=pk, axis=0)
        return np.where(om < 0.5, -_log1m(np.minimum(om, 0.5)), -lt)
    _, broods = tab
    sums = np.stack([sum((ylog(t * math.exp(-x)) for x in vec), np.zeros_like(t)) for vec, _ in broods])
    pb = np.array([p for _, p in broods]).reshape((-1,) + (1,) * t.ndim)
    om = np.sum(pb * -np.expm1(-sums), axis=0)
    lt = logsumexp(-sums, b=pb, axis=0)
    return np.where(om < 0.5, -_log1m(np.minimum(om, 0.5)), -lt)


def smoothing_operator(law, phi, t):
    """T[phi](t) = E prod_children phi(t e^{-V}).

    ``phi`` is a :class:`PhiTable` or any vectorised callable with values in
    [0, 1].  Exact finite sums for atom laws; Gauss-Hermite quadrature with
    64 nodes per child for gaussian-binary.
    """
    if isinstance(phi, PhiTable):
        ylog = phi.log_inv
    else:
        def ylog(x):
            with np.errstate(divide="ignore"):
                return -np.log(np.asarray(phi(x), dtype=float) * np.ones_like(x))
    scalar = np.ndim(t) == 0
    out = np.exp(-_apply_log(law, ylog, np.atleast_1d(np.asarray(t, dtype=float))))
    return float(out[0]) if scalar else out


# -- solver -------------------------------------------------------------------------

def _normalized(table):
    """Rescale the argument so that phi(1) = 1/2; returns (new y on grid, a)."""
    f = lambda s: table.log_inv(np.array([math.exp(s)]))[0] - LN2
    lo, hi = math.log(table.t_lo), math.log(table.t_hi)
    if f(lo) > 0 or f(hi) < 0:
        raise NoConvergence("phi crossed 1/2 outside the grid; widen the grid")
    la = brentq(f, lo, hi, xtol=1e-15, rtol=1e-15)
    return table.log_inv(table.grid * math.exp(la)), math.exp(la)


def solve_phi(law, grid=GRID, tol=1e-10, max_iter=5000, relax=None) -> PhiTable:
    """Iterate phi <- T[phi] from max(q, e^{-t}) to the normalized fixed point.

    ``grid`` is (t_lo, t_hi, points).  After every application of T the
    argument is rescaled so that phi(1) = 1/2; without this the boundary-case
    iteration drifts along the one-parameter family phi(a t) and converges
    very slowly.  Stops when the sup-norm change of phi is <= ``tol``.

    ``relax`` in (0, 1] takes the step log(1/phi) <- (1 - relax) log(1/phi) +
    relax log(1/T[phi]).  The default is 1/2 on lattice laws, whose plain
    iteration carries a slowly decaying period-2 (parity) mode, and 1 otherwise.
    """
    if relax is None:
        relax = 0.5 if law.lattice_step() is not None else 1.0
    if not 0 < relax <= 1:
        raise ValueError("relax must lie in (0, 1]")
    t_lo, t_hi, m = grid
    t = np.geomspace(float(t_lo), float(t_hi), int(m))
    q = extinction_prob(law)
    y = np.minimum(t, -math.log(q)) if q > 0 else t.copy()
    table = PhiTable.from_log(t, y, q, tol=tol)
    history = []
    scale = 1.0
    for it in range(1, int(max_iter) + 1):
        ty = _apply_log(law, table.log_inv, t)
        if relax < 1:
            ty = (1 - relax) * table.y + relax * ty
        y_new, a = _normalized(PhiTable.from_log(t, ty, q))
        scale *= a
        change = float(np.max(np.abs(np.exp(-y_new) - table.phi)))
        history.append(change)
        table = PhiTable.from_log(t, y_new, q, tol=tol)
        if change <= tol:
            break
    else:
        raise NoConvergence(f"no convergence after {max_iter} iterations", residual=_residual(law, table))
    table.scale = scale
    table.iterations = it
    table.history = history
    table.residual = _residual(law, table)
    return table


def _residual(law, table):
    return float(np.max(np.abs(np.exp(-_apply_log(law, table.log_inv, table.grid)) - table.phi)))


def cstar_fit(phi: PhiTable):
    """Fit log(1/phi(t)) ~ c* t log(1/t) over the lowest decade of the grid.

    Ordinary least squares with intercept; returns (c_star, R^2).
    """
    if phi.t_lo > 1e-6:
        raise DomainError(f"t_lo = {phi.t_lo:g} > 1e-6 does not reach the small-t regime")
    sel = phi.grid <= 10.0 * phi.t_lo * (1 + 1e-12)
    t = phi.grid[sel]
    x = t * np.log(1.0 / t)
    y = phi.y[sel]
    slope, icpt = np.polyfit(x, y, 1)
    fit = slope * x + icpt
    ss_res = float(np.sum((y - fit) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0
    if r2 < 0.99:
        raise PoorFit(f"R^2 = {r2:.4f} < 0.99")
    return float(slope), r2


# -- simulation cross-check -----------------------------------------------------------

def xi_star_samples(law, n_large, trials, seed, phi: PhiTable, mode=Mode("prune", 30.0), threads=1):
    """log(1/W*_n) at n = n_large for ``trials`` independent trials.

    Extinct trials give W*_n = 1 and hence the sample 0.
    """
    from .martingale import log_multiplicative

    sample = collect(law, (n_large,), trials, seed, mode, keep=(n_large,), threads=threads)
    return np.array([-log_multiplicative(g, phi) for g in sample.generations[n_large]])


def laplace_check(samples, phi: PhiTable, ts=(0.5, 1.0, 2.0)):
    """Per t: (empirical mean of e^{-t xi}, its standard error, phi(t))."""
    xi = np.asarray(samples, dtype=float)
    rows = []
    for t in ts:
        v = np.exp(-t * xi)
        rows.append((float(t), float(v.mean()), float(v.std(ddof=1) / math.sqrt(v.size)), float(phi(t))))
    return rows

