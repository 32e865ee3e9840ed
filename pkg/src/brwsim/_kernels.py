"""Compiled inner loops for lattice populations and compensated sums.

A lattice generation is a dense count vector over consecutive sites
``lo, lo+1, ...``; site j sits at position j*h.  Counts are float64 holding
integers, so multiplicities beyond 2**63 never overflow.
"""
import math

import numpy as np
from numba import njit

EXACT, CAP, PRUNE = 0, 1, 2

# Binomial splits of counts at or above this use a Gaussian approximation
# (relative error far below 1e-6 at that size); below it they are exact.
EXACT_COUNT = 2.0**53


@njit(cache=True)
def weighted_expsum(values, counts, beta):
    """Neumaier-compensated sum of counts * exp(-beta * values)."""
    s = 0.0
    comp = 0.0
    for i in range(values.size):
        x = counts[i] * math.exp(-(beta * values[i]))
        t = s + x
        if abs(s) >= abs(x):
            comp += (s - t) + x
        else:
            comp += (x - t) + s
        s = t
    return s + comp


@njit(cache=True)
def _binom(rng, n, p):
    if n <= 0.0 or p <= 0.0:
        return 0.0
    if p >= 1.0:
        return n
    if n < EXACT_COUNT:
        return float(rng.binomial(np.int64(n), p))
    mean = n * p
    x = np.rint(mean + math.sqrt(mean * (1.0 - p)) * rng.standard_normal())
    return min(max(x, 0.0), n)


@njit(cache=True)
def _multinomial(rng, n, probs, out):
    """Sequential conditional-binomial multinomial; probs are all > 0."""
    rem = n
    rest = 1.0
    m = probs.size
    for i in range(m):
        if rem <= 0.0:
            out[i] = 0.0
            continue
        if i == m - 1:
            out[i] = rem
            break
        q = probs[i] / rest if rest > 0.0 else 1.0
        x = _binom(rng, rem, min(q, 1.0))
        out[i] = x
        rem -= x
        rest -= probs[i]


@njit(cache=True)
def lattice_offspring(counts, rng, joint, off_k, off_p, shifts, shift_p,
                      brood_shift, brood_len, brood_p, smin, smax):
    """Children of a dense lattice generation; new lo = old lo + smin."""
    size = counts.size
    new = np.zeros(size + smax - smin)
    buf_off = np.empty(max(off_p.size, brood_p.size))
    buf_sh = np.empty(shift_p.size)
    for i in range(size):
        c = counts[i]
        if c == 0.0:
            continue
        if joint:
            _multinomial(rng, c, brood_p, buf_off)
            for r in range(brood_p.size):
                m = buf_off[r]
                if m == 0.0:
                    continue
                for j in range(brood_len[r]):
                    new[i + brood_shift[r, j] - smin] += m
        else:
            if off_k.size == 1:
                total = c * off_k[0]
            else:
                _multinomial(rng, c, off_p, buf_off)
                total = 0.0
                for r in range(off_p.size):
                    total += off_k[r] * buf_off[r]
            if total == 0.0:
                continue
            if shifts.size == 1:
                new[i + shifts[0] - smin] += total
            else:
                _multinomial(rng, total, shift_p, buf_sh)
                for a in range(shift_p.size):
                    new[i + shifts[a] - smin] += buf_sh[a]
    return new


@njit(cache=True)
def lattice_control(new, lo, h, mode, cap_n, prune_levels):
    """Trim empty sites and apply cap/prune; returns (counts, lo, dropped)."""
    first = -1
    for i in range(new.size):
        if new[i] > 0.0:
            first = i
            break
    if first < 0:
        return np.zeros(0), lo, 0.0
    last = first
    for i in range(new.size - 1, first - 1, -1):
        if new[i] > 0.0:
            last = i
            break
    dropped = 0.0
    out = new[first:last + 1].copy()
    if mode == PRUNE:
        if out.size > prune_levels + 1:
            for i in range(prune_levels + 1, out.size):
                dropped += out[i] * math.exp(-((lo + first + i) * h))
            out = out[:prune_levels + 1].copy()
    elif mode == CAP:
        cum = 0.0
        for i in range(out.size):
            c = out[i]
            if cum + c > cap_n:
                keep = cap_n - cum
                dropped += (c - keep) * math.exp(-((lo + first + i) * h))
                for j in range(i + 1, out.size):
                    dropped += out[j] * math.exp(-((lo + first + j) * h))
                out[i] = keep
                stop = i + 1 if keep > 0.0 else i
                out = out[:stop].copy()
                break
            cum += c
    # trailing zeros can only appear through cap at an exhausted site
    end = out.size
    while end > 0 and out[end - 1] == 0.0:
        end -= 1
    return out[:end].copy(), lo + first, dropped


@njit(cache=True)
def lattice_record(counts, lo, h, betas, row, wrow):
    """Fill row = (count, min_v, max_v, w) and wrow[b] = W_beta for a generation."""
    if counts.size == 0:
        row[0] = 0.0
        row[1] = np.inf
        row[2] = -np.inf
        row[3] = 0.0
        for b in range(betas.size):
            wrow[b] = 0.0
        return
    values = np.empty(counts.size)
    total = 0.0
    for i in range(counts.size):
        values[i] = (lo + i) * h
        total += counts[i]
    row[0] = total
    row[1] = values[0]
    row[2] = values[values.size - 1]
    row[3] = weighted_expsum(values, counts, 1.0)
    for b in range(betas.size):
        wrow[b] = weighted_expsum(values, counts, betas[b])


@njit(cache=True)
def run_lattice(rng, n, h, joint, off_k, off_p, shifts, shift_p, brood_shift,
                brood_len, brood_p, smin, smax, mode, cap_n, prune_levels,
                hard_limit, betas, keep):
    """Simulate one trial of n generations from a single root at site 0.

    Returns (stats, wbeta, status, snap_counts, snap_lo) where stats[k] holds
    (count, min_v, max_v, w, dropped_mass_bound) and status is 0 or the first
    generation at which the exact-mode hard limit was exceeded.
    """
    stats = np.zeros((n + 1, 5))
    wbeta = np.zeros((n + 1, betas.size))
    snap_counts = []
    snap_lo = []
    counts = np.ones(1)
    lo = 0
    dropped = 0.0
    lattice_record(counts, lo, h, betas, stats[0], wbeta[0])
    if keep[0]:
        snap_counts.append(counts.copy())
        snap_lo.append(lo)
    status = 0
    for k in range(1, n + 1):
        if counts.size > 0:
            new = lattice_offspring(counts, rng, joint, off_k, off_p, shifts, shift_p,
                                    brood_shift, brood_len, brood_p, smin, smax)
            counts, lo, d = lattice_control(new, lo + smin, h, mode, cap_n, prune_levels)
            dropped += d
        lattice_record(counts, lo, h, betas, stats[k], wbeta[k])
        stats[k, 4] = dropped
        if mode == EXACT and stats[k, 0] > hard_limit:
            status = k
            break
        if keep[k]:
            snap_counts.append(counts.copy())
            snap_lo.append(lo)
    return stats, wbeta, status, snap_counts, snap_lo
