"""Independent reference computations used to freeze expected values.

Nothing here imports the package under test; each oracle re-derives its
quantity with a different algorithm (closed forms, rational arithmetic,
brute-force tree enumeration, a separate fixed-point iteration).
Run ``python tests/oracles.py`` to print the frozen numbers.
"""
import math
from fractions import Fraction
from itertools import product

import numpy as np

H = math.log(2 + math.sqrt(3))
P_UP = (2 + math.sqrt(3)) / 4
A_GW = math.acosh(1.5)
P_GW = math.exp(A_GW) / 3


def ballot_fair(n):
    """P(S_1..S_n > 0) for the fair +-1 walk: C(n-1, floor((n-1)/2)) / 2^n."""
    if n == 0:
        return Fraction(1)
    return Fraction(math.comb(n - 1, (n - 1) // 2), 2 ** n)


def brute_expected_w(n, children, probs, atoms, atom_p):
    """E W_n by explicit recursion over generations of a discrete law (float)."""
    def gen_expect(k):
        # E sum_{|u|=k} e^{-V(u)} = m^k where m = E sum_{|u|=1} e^{-V}
        m = sum(pk * k_ * sum(pa * math.exp(-a) for a, pa in zip(atoms, atom_p))
                for k_, pk in zip(children, probs))
        return m ** k
    return gen_expect(n)


def binary_indicator_many_to_one():
    """E sum_{|u|=2} 1{V(u) = 2h} for the binary law: 2 * 2 * p^2 (two generations, each 2 children)."""
    return 4 * P_UP ** 2


def q_gw():
    """Smallest root of s = 1/4 + 3/4 s^2."""
    return min(r.real for r in np.roots([0.75, -1.0, 0.25]) if abs(r.imag) < 1e-14)


def phi_oracle(atoms, atom_p, ks, pk, q, lo=-18.5, hi=10.0, step=0.02, tol=1e-13, iters=50000):
    """phi* by plain iteration with linear interpolation of log log(1/phi) on a uniform log-t grid."""
    u = np.arange(lo, hi + step / 2, step)
    t = np.exp(u)
    y = np.minimum(t, -math.log(q)) if q > 0 else t.copy()

    def ev(yv, x):
        lx = np.log(x)
        ly = np.log(yv)
        out = np.exp(np.interp(lx, u, ly))
        small = lx < u[0]
        r0, r1 = yv[0] / t[0], yv[1] / t[1]
        c = (r0 - r1) / step
        d = r0 + c * u[0]
        out[small] = x[small] * (-c * lx[small] + d)
        big = lx > u[-1]
        if q > 0:
            out[big] = yv[-1]
        else:
            sl = (ly[-1] - ly[-2]) / step
            out[big] = np.exp(ly[-1] + sl * (lx[big] - u[-1]))
        return out

    for _ in range(iters):
        log_g = np.logaddexp.reduce([math.log(p) - ev(y, t * math.exp(-a)) for a, p in zip(atoms, atom_p)])
        y_new = -np.logaddexp.reduce([math.log(p) + k * log_g for k, p in zip(ks, pk)])
        # rescale the argument so that phi(1) = 1/2
        lny = np.log(y_new)
        s = np.interp(math.log(math.log(2)), lny, u)
        y_next = ev(y_new, t * math.exp(s))
        done = np.max(np.abs(np.exp(-y_next) - np.exp(-y))) < tol
        y = y_next
        if done:
            break
    return lambda x: float(np.exp(-ev(y, np.atleast_1d(np.asarray(x, float))))[0])


if __name__ == "__main__":
    print("ballot", [str(ballot_fair(n)) for n in range(6)])
    print("many-to-one", binary_indicator_many_to_one(), (7 + 4 * math.sqrt(3)) / 4)
    print("q_gw", q_gw())
    f = phi_oracle([H, -H], [P_UP, 1 - P_UP], [2], [1.0], 0.0)
    print("binary phi", {t: f(t) for t in (0.01, 0.5, 2.0, 10.0)})
    g = phi_oracle([A_GW, -A_GW], [P_GW, 1 - P_GW], [0, 2], [0.25, 0.75], 1 / 3)
    print("gw phi", {t: g(t) for t in (0.01, 0.5, 2.0, 10.0)})
