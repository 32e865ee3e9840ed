"""Path functionals f(S_0, ..., S_n) shared by the many-to-one checks."""
import math


def _min(p):
    return min(p)


FUNCTIONALS = {
    "one": lambda p: 1.0,
    "endpoint": lambda p: p[-1],
    "endpoint_sq": lambda p: p[-1] ** 2,
    "exp_half": lambda p: math.exp(-0.5 * p[-1]),
    "stays_nonneg": lambda p: float(all(x >= -1e-12 for x in p[1:])),
    "running_min": _min,
    "exp_min": lambda p: math.exp(_min(p)),
    "max_abs": lambda p: max(abs(x) for x in p),
    "first_step_up": lambda p: float(len(p) > 1 and p[1] > 0),
    "sum_positions": lambda p: sum(p),
}
