"""Experiment configs, seeded batch runs, reports, and the ``brwsim`` command line.

Configs are flat ``key = value`` text files; see README for the schema.
"""
from __future__ import annotations

import argparse
import hashlib
import io
import math
import re
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from . import rng as rngmod
from .errors import BRWError, ConfigError, DegenerateSample
from .model import PRESETS, OffspringLaw, boundary_normalize, validate_assumptions
from .simulate import Mode, collect, run_trial, write_trial_csv

STATISTICS = ("min_v", "w", "w_beta", "w_star", "lambda_w")
KNOWN_KEYS = {
    "law.kind", "law.mu", "law.sigma2", "law.offspring", "law.atoms", "law.broods", "law.d_min",
    "law.normalize", "n_list", "trials", "seed", "mode", "betas", "conditioning", "statistic",
    "statistic.beta", "summary", "regress.kind", "bootstrap", "accept.slope", "accept.r2_min",
    "allow_biased_min", "threads",
}
# keys that cannot change results and are left out of the provenance hash
UNHASHED = {"threads"}


# -- law descriptions -----------------------------------------------------------------------

def _floats(text):
    return [float(x) for x in re.split(r"[\s,]+", text.strip()) if x]


def _pmf(text):
    """'a:p, b:q' -> [(a, p), (b, q)]."""
    out = []
    for part in text.split(","):
        if not part.strip():
            continue
        k, sep, p = part.partition(":")
        if not sep:
            raise ConfigError(f"expected value:prob, got {part.strip()!r}")
        out.append((float(k), float(p)))
    return out


def _broods(text):
    """'x1 x2 : p ; x3 : q ; : r' -> [((x1, x2), p), ((x3,), q), ((), r)]."""
    out = []
    for part in text.split(";"):
        if not part.strip():
            continue
        vec, sep, p = part.rpartition(":")
        if not sep:
            raise ConfigError(f"expected 'x1 x2 ... : prob', got {part.strip()!r}")
        out.append((tuple(_floats(vec)), float(p)))
    return out


def _d_min(text):
    if text is None:
        return None
    t = text.strip().lower()
    if t in ("unbounded", "-inf", "none", ""):
        return -math.inf
    return float(t)


def law_from_keys(keys):
    """Build an OffspringLaw from ``law.*`` entries of a flat config."""
    kind = keys.get("law.kind")
    if kind is None:
        raise ConfigError("law.kind is required")
    try:
        if kind in PRESETS:
            law = PRESETS[kind]()
        elif kind == "gaussian-binary":
            law = OffspringLaw.gaussian_binary(float(keys["law.mu"]), float(keys["law.sigma2"]))
        elif kind == "discrete-atoms":
            off = [(int(k), p) for k, p in _pmf(keys["law.offspring"])]
            dmin = _d_min(keys.get("law.d_min"))
            law = OffspringLaw.discrete_atoms(off, _pmf(keys["law.atoms"]),
                                              d_min=None if dmin == -math.inf else dmin)
        elif kind == "joint-atoms":
            dmin = _d_min(keys.get("law.d_min"))
            law = OffspringLaw.joint_atoms(_broods(keys["law.broods"]),
                                           d_min=None if dmin == -math.inf else dmin)
        else:
            raise ConfigError(f"unknown law.kind {kind!r}")
    except KeyError as e:
        raise ConfigError(f"law.kind={kind} needs key {e.args[0]}") from None
    if _bool(keys.get("law.normalize", "false")):
        law = boundary_normalize(law)[1]
    return law


def _bool(text):
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


# -- config ------------------------------------------------------------------------------

def parse_kv(text):
    """Flat ``key = value`` lines; '#' starts a comment."""
    keys = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}: expected key = value")
        key = key.strip()
        if key not in KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        keys[key] = value.strip()
    return keys


@dataclass
class ExperimentConfig:
    law: OffspringLaw
    n_list: tuple
    trials: int
    seed: int
    mode: Mode
    betas: tuple = ()
    conditioning: str = "survived"
    statistic: str = "w"
    beta: float | None = None
    summary: str = "median"
    regress_kind: str = "auto"
    bootstrap: int = 1000
    accept_slope: tuple | None = None
    accept_r2_min: float | None = None
    allow_biased_min: bool = False
    threads: int = 1
    keys: dict = field(default_factory=dict, repr=False)

    @classmethod
    def from_text(cls, text, overrides=None):
        keys = parse_kv(text)
        keys.update(overrides or {})
        return cls.from_keys(keys)

    @classmethod
    def from_keys(cls, keys):
        keys = dict(keys)
        unknown = set(keys) - KNOWN_KEYS
        if unknown:
            raise ConfigError(f"unknown keys: {', '.join(sorted(unknown))}")
        for req in ("law.kind", "n_list", "trials", "seed"):
            if req not in keys:
                raise ConfigError(f"missing required key {req!r}")
        try:
            n_list = tuple(int(x) for x in _floats(keys["n_list"]))
            trials = int(keys["trials"])
            seed = int(keys["seed"])
            mode = Mode.parse(keys.get("mode", "exact"))
            betas = tuple(_floats(keys.get("betas", "")))
            beta = float(keys["statistic.beta"]) if "statistic.beta" in keys else None
            boot = int(keys.get("bootstrap", "1000"))
            slope = tuple(_floats(keys["accept.slope"])) if "accept.slope" in keys else None
            r2min = float(keys["accept.r2_min"]) if "accept.r2_min" in keys else None
            threads = int(keys.get("threads", "1"))
        except ValueError as e:
            raise ConfigError(str(e)) from None
        cfg = cls(law_from_keys(keys), n_list, trials, seed, mode, betas,
                  keys.get("conditioning", "survived"), keys.get("statistic", "w"), beta,
                  keys.get("summary", "median"), keys.get("regress.kind", "auto"), boot, slope, r2min,
                  _bool(keys.get("allow_biased_min", "false")), threads, keys)
        cfg.validate()
        return cfg

    def validate(self):
        if not self.n_list or any(b <= a for a, b in zip(self.n_list, self.n_list[1:])):
            raise ConfigError("n_list must be nonempty and strictly increasing")
        if self.n_list[0] < 0:
            raise ConfigError("horizons must be >= 0")
        if self.trials < 100:
            raise ConfigError("trials must be >= 100")
        if self.conditioning not in ("all", "survived"):
            raise ConfigError("conditioning must be 'all' or 'survived'")
        if self.statistic not in STATISTICS:
            raise ConfigError(f"statistic must be one of {', '.join(STATISTICS)}")
        summary_quantile(self.summary)
        if self.regress_kind not in ("auto", "power", "log"):
            raise ConfigError("regress.kind must be auto, power or log")
        if self.statistic == "w_beta":
            if self.beta is None:
                if len(self.betas) != 1:
                    raise ConfigError("statistic=w_beta needs statistic.beta (or exactly one entry in betas)")
                self.beta = self.betas[0]
            if not self.beta > 0:
                raise ConfigError("statistic.beta must be > 0")
            if self.beta not in self.betas:
                self.betas = tuple(self.betas) + (self.beta,)
        if self.bootstrap < 1:
            raise ConfigError("bootstrap must be >= 1")
        if self.accept_slope is not None and (len(self.accept_slope) != 2
                                              or self.accept_slope[0] > self.accept_slope[1]):
            raise ConfigError("accept.slope must be 'lo, hi' with lo <= hi")
        if (self.statistic == "min_v" and self.mode.kind == "prune" and not self.allow_biased_min
                and (self.law.d_min is None or self.law.d_min < 0)):
            raise ConfigError("min_v under pruning is biased when displacements can be negative; "
                              "set allow_biased_min (CLI: --allow-biased-min) to run anyway")
        normalized = _bool(self.keys.get("law.normalize", "false"))
        report = validate_assumptions(self.law, tolerance=1e-6 if normalized else 1e-9)
        if not report.passes_boundary:
            raise ConfigError("law is not in the boundary case (set law.normalize = true to reduce it)")

    @property
    def regression(self):
        if self.regress_kind != "auto":
            return self.regress_kind
        return "log" if self.statistic == "min_v" else "power"

    def canonical(self):
        """Normalized key=value text hashed into the provenance."""
        keys = {k: v for k, v in self.keys.items() if k not in UNHASHED}
        norm = {k: re.sub(r"\s*([,;:])\s*", r"\1 ", " ".join(v.split())).strip() for k, v in keys.items()}
        return "".join(f"{k}={norm[k]}\n" for k in sorted(norm))

    @property
    def config_hash(self):
        return hashlib.sha256(self.canonical().encode()).hexdigest()[:16]


def summary_quantile(summary):
    """Quantile level of a summary string; None for 'mean', 'imedian' for the interpolated median."""
    if summary in ("mean", "imedian"):
        return None if summary == "mean" else summary
    if summary == "median":
        return 0.5
    m = re.fullmatch(r"quantile\(\s*([0-9.eE+-]+)\s*\)", summary)
    if not m:
        raise ConfigError(f"summary must be mean, median, imedian or quantile(p), got {summary!r}")
    p = float(m.group(1))
    if not 0 < p < 1:
        raise ConfigError("quantile level must lie in (0, 1)")
    return p


def interpolated_median(values):
    """Grouped-data median of lattice-valued data.

    Each distinct value x is read as a cell [x - w/2, x + w/2] of width w (the
    smallest gap between distinct values) holding its sample mass uniformly,
    and the median of that piecewise-uniform law is returned.  For data without
    ties this is the ordinary median up to O(w).
    """
    x = np.sort(np.asarray(values, dtype=float))
    n = x.size
    if n == 0:
        return math.nan
    u = np.unique(x)
    m = x[(n - 1) // 2]
    if u.size < 2 or not np.isfinite(u).all():
        return float(np.median(x))
    w = float(np.min(np.diff(u)))
    eps = w * 1e-6
    below = np.count_nonzero(x < m - eps)
    at = np.count_nonzero(np.abs(x - m) <= eps)
    return float(m - w / 2 + (n / 2 - below) / at * w)


# -- results -------------------------------------------------------------------------------

@dataclass(frozen=True)
class SummaryRow:
    n: int
    trials: int
    used: int
    value: float
    ci_lo: float
    ci_hi: float


@dataclass(frozen=True)
class Regression:
    kind: str
    slope: float
    intercept: float
    r2: float
    ci_lo: float
    ci_hi: float


@dataclass(frozen=True)
class Check:
    name: str
    lo: float
    hi: float
    value: float

    @property
    def passed(self):
        return self.lo <= self.value <= self.hi


@dataclass
class ExperimentResult:
    config_hash: str
    seed: int
    version: str
    statistic: str = ""
    summary: str = ""
    conditioning: str = ""
    law: str = ""
    mode: str = ""
    rows: list = field(default_factory=list)
    regression: Regression | None = None
    checks: list = field(default_factory=list)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)


def _summarize(values, q):
    """Summary of a 1-d sample, or of each row of a 2-d array."""
    values = np.asarray(values, dtype=float)
    if q == "imedian":
        if values.ndim == 1:
            return interpolated_median(values)
        return np.array([interpolated_median(r) for r in values])
    if q is None:
        out = np.mean(values, axis=-1)
    else:
        out = np.quantile(values, q, axis=-1)
    return float(out) if values.ndim == 1 else out


def trial_statistic(cfg, sample, n, phi=None):
    """Per-trial statistic at horizon n (all trials, in trial order)."""
    if cfg.statistic == "min_v":
        return sample.min_v[n]
    if cfg.statistic == "w":
        return sample.w[n]
    if cfg.statistic == "w_beta":
        return sample.w_beta[n][:, list(sample.betas).index(cfg.beta)]
    if cfg.statistic == "lambda_w":
        from .martingale import norming_from_w
        return norming_from_w(n, sample.w[n]).lambda_n * sample.w[n]
    from .martingale import multiplicative
    return np.array([multiplicative(g, phi) for g in sample.generations[n]])


def run_experiment(cfg: ExperimentConfig, sample=None) -> ExperimentResult:
    """Simulate (unless ``sample`` is given), summarize per n, bootstrap, regress.

    One set of trials is shared by every horizon: trial t is run to max(n_list)
    and read off at each n.  Deterministic given the config.
    """
    phi = None
    keep = ()
    if cfg.statistic == "w_star":
        from .fixedpoint import solve_phi
        phi = solve_phi(cfg.law)
        keep = cfg.n_list
    if sample is None:
        sample = collect(cfg.law, cfg.n_list, cfg.trials, cfg.seed, cfg.mode, betas=cfg.betas,
                         keep=keep, threads=cfg.threads)
    q = summary_quantile(cfg.summary)
    result = ExperimentResult(cfg.config_hash, cfg.seed, __version__, cfg.statistic, cfg.summary,
                              cfg.conditioning, cfg.law.describe(), str(cfg.mode))
    boots = []
    for n in cfg.n_list:
        vals = np.asarray(trial_statistic(cfg, sample, n, phi), dtype=float)
        if cfg.conditioning == "survived":
            vals = vals[sample.count[n] > 0]
        if vals.size == 0:
            raise DegenerateSample(f"n={n}: no trials left after {cfg.conditioning} conditioning")
        point = _summarize(vals, q)
        boot = _bootstrap(vals, q, cfg.bootstrap, rngmod.stream(cfg.seed, rngmod.BOOTSTRAP, n))
        lo, hi = np.quantile(boot, [0.025, 0.975])
        # percentile intervals of a skewed statistic can miss the point estimate
        result.rows.append(SummaryRow(int(n), int(sample.count[n].size), int(vals.size), float(point),
                                      float(min(lo, point)), float(max(hi, point))))
        boots.append(boot)
    if len(cfg.n_list) >= 3:
        result.regression = _regress(cfg, result.rows, boots)
        if cfg.accept_slope is not None:
            result.checks.append(Check("slope", *cfg.accept_slope, result.regression.slope))
        if cfg.accept_r2_min is not None:
            result.checks.append(Check("r2", cfg.accept_r2_min, 1.0, result.regression.r2))
    return result


def _bootstrap(vals, q, resamples, rng, batch=100):
    out = np.empty(resamples)
    m = vals.size
    for start in range(0, resamples, batch):
        b = min(batch, resamples - start)
        idx = rng.integers(0, m, size=(b, m))
        out[start:start + b] = _summarize(vals[idx], q)
    return out


def _regress(cfg, rows, boots):
    from .rwtools import exponent_regress
    kind = cfg.regression
    pairs = [(r.n, r.value) for r in rows]
    slope, icpt, r2 = exponent_regress(pairs, kind)
    slopes = []
    for b in range(len(boots[0])):
        try:
            slopes.append(exponent_regress([(r.n, bt[b]) for r, bt in zip(rows, boots)], kind)[0])
        except BRWError:
            continue
    lo, hi = np.quantile(slopes, [0.025, 0.975]) if slopes else (math.nan, math.nan)
    return Regression(kind, slope, icpt, r2, float(min(lo, slope)), float(max(hi, slope)))


# -- reports ------------------------------------------------------------------------------

ROW_HEADER = "n,trials,used,value,ci_lo,ci_hi"
REG_HEADER = "kind,slope,intercept,r2,slope_ci_lo,slope_ci_hi"
CHECK_HEADER = "criterion,lo,hi,value,pass"


def report(result: ExperimentResult | None, format="csv") -> str:
    """Per-n table, regression block, and one pass/fail line per configured bound."""
    if format == "csv":
        return _report_csv(result)
    if format == "markdown":
        return _report_md(result)
    raise ValueError(f"unknown report format {format!r}")


def _report_csv(res):
    buf = io.StringIO()
    if res is not None:
        buf.write(f"# config_hash={res.config_hash},seed={res.seed},version={res.version},"
                  f"statistic={res.statistic},summary={res.summary},conditioning={res.conditioning},"
                  f"mode={res.mode},law={res.law}\n")
    buf.write(ROW_HEADER + "\n")
    if res is None:
        return buf.getvalue()
    for r in res.rows:
        buf.write(f"{r.n},{r.trials},{r.used},{r.value!r},{r.ci_lo!r},{r.ci_hi!r}\n")
    if res.regression is not None:
        g = res.regression
        buf.write("\n" + REG_HEADER + "\n")
        buf.write(f"{g.kind},{g.slope!r},{g.intercept!r},{g.r2!r},{g.ci_lo!r},{g.ci_hi!r}\n")
    if res.checks:
        buf.write("\n" + CHECK_HEADER + "\n")
        for c in res.checks:
            buf.write(f"{c.name},{c.lo!r},{c.hi!r},{c.value!r},{'PASS' if c.passed else 'FAIL'}\n")
    return buf.getvalue()


def parse_report(text) -> ExperimentResult:
    """Inverse of the CSV report; floats round-trip exactly."""
    res = ExperimentResult("", 0, "")
    block = None
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            meta = dict(part.partition("=")[::2] for part in line[1:].strip().split(","))
            res.config_hash = meta.get("config_hash", "")
            res.seed = int(meta.get("seed", 0))
            res.version = meta.get("version", "")
            for k in ("statistic", "summary", "conditioning", "mode", "law"):
                setattr(res, k, meta.get(k, ""))
            continue
        if line in (ROW_HEADER, REG_HEADER, CHECK_HEADER):
            block = line
            continue
        f = line.split(",")
        if block == ROW_HEADER:
            res.rows.append(SummaryRow(int(f[0]), int(f[1]), int(f[2]), float(f[3]), float(f[4]), float(f[5])))
        elif block == REG_HEADER:
            res.regression = Regression(f[0], *map(float, f[1:6]))
        elif block == CHECK_HEADER:
            res.checks.append(Check(f[0], float(f[1]), float(f[2]), float(f[3])))
    return res


def _report_md(res):
    if res is None:
        return "| n | trials | used | value | 95% CI |\n|---|---|---|---|---|\n"
    out = [f"# Experiment: {res.statistic} ({res.summary}, {res.conditioning})", "",
           f"- config hash: `{res.config_hash}`",
           f"- seed: {res.seed}", f"- version: {res.version}",
           f"- law: {res.law}", f"- mode: {res.mode}", "",
           "| n | trials | used | value | 95% CI |", "|---|---|---|---|---|"]
    for r in res.rows:
        out.append(f"| {r.n} | {r.trials} | {r.used} | {r.value:.6g} | [{r.ci_lo:.6g}, {r.ci_hi:.6g}] |")
    if res.regression is not None:
        g = res.regression
        axis = "log stat vs log n" if g.kind == "power" else "stat vs log n"
        out += ["", f"Regression ({axis}): slope {g.slope:.4f} "
                    f"(95% CI [{g.ci_lo:.4f}, {g.ci_hi:.4f}]), intercept {g.intercept:.4f}, R² {g.r2:.4f}"]
    if res.checks:
        out.append("")
        for c in res.checks:
            out.append(f"- {'PASS' if c.passed else 'FAIL'} {c.name} = {c.value:.4f} in [{c.lo:g}, {c.hi:g}]")
    return "\n".join(out) + "\n"


# -- command line -----------------------------------------------------------------------

def _law_from_args(args):
    keys = {}
    if args.config:
        with open(args.config) as fh:
            keys.update(parse_kv(fh.read()))
    keys.update(_overrides(args.set))
    if args.law:
        keys["law.kind"] = args.law
    keys.setdefault("law.kind", "discrete-binary")
    return law_from_keys({k: v for k, v in keys.items() if k.startswith("law.")})


def _overrides(pairs):
    out = {}
    for item in pairs or ():
        k, sep, v = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        out[k.strip()] = v.strip()
    return out


def _emit(args, text):
    if args.out and args.out != "-":
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_validate(args):
    law = _law_from_args(args)
    rep = validate_assumptions(law)
    lines = [f"law,{law.describe()}"] + [f"{k},{v}" for k, v in vars(rep).items()]
    _emit(args, "\n".join(lines) + "\n")
    return 0 if rep.passes_boundary else 2


def _cmd_simulate(args):
    law = _law_from_args(args)
    mode = Mode.parse(args.mode)
    betas = tuple(_floats(args.betas)) if args.betas else ()
    stats = [run_trial(law, args.n, args.seed, mode, betas, trial=t) for t in range(args.trials)]
    _emit(args, write_trial_csv(stats))
    return 0


def _cmd_spine(args):
    from .spine import sample_spine
    law = _law_from_args(args)
    buf = io.StringIO()
    buf.write("trial,k,s\n")
    for t in range(args.trials):
        path = sample_spine(law, args.n, args.seed, trial=t).spine_path
        for k, s in enumerate(path):
            buf.write(f"{t},{k},{float(s)!r}\n")
    _emit(args, buf.getvalue())
    return 0


def _cmd_fixedpoint(args):
    from .fixedpoint import solve_phi
    law = _law_from_args(args)
    table = solve_phi(law, grid=(args.t_lo, args.t_hi, args.points), tol=args.tol, max_iter=args.max_iter)
    _emit(args, table.to_csv())
    return 0


def _cmd_experiment(args):
    with open(args.config) as fh:
        text = fh.read()
    overrides = _overrides(args.set)
    if args.seed is not None:
        overrides["seed"] = str(args.seed)
    if args.threads is not None:
        overrides["threads"] = str(args.threads)
    if args.allow_biased_min:
        overrides["allow_biased_min"] = "true"
    cfg = ExperimentConfig.from_text(text, overrides)
    res = run_experiment(cfg)
    _emit(args, report(res, args.format))
    return 0 if res.passed else 2


def _cmd_regress(args):
    from .rwtools import exponent_regress
    with open(args.input) if args.input != "-" else sys.stdin as fh:
        lines = [ln.strip() for ln in fh if ln.strip() and not ln.startswith("#")]
    head = lines[0].split(",")
    try:
        ni, si = head.index(args.n_column), head.index(args.stat_column)
    except ValueError:
        raise ConfigError(f"input needs columns {args.n_column!r} and {args.stat_column!r}") from None
    pairs = [(float(r.split(",")[ni]), float(r.split(",")[si])) for r in lines[1:]]
    slope, icpt, r2 = exponent_regress(pairs, args.kind)
    _emit(args, f"slope,intercept,r2\n{slope!r},{icpt!r},{r2!r}\n")
    return 0


def _cmd_report(args):
    with open(args.input) if args.input != "-" else sys.stdin as fh:
        res = parse_report(fh.read())
    _emit(args, report(res, args.format))
    return 0 if res.passed else 2


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="master seed")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS, help="worker processes")
    common.add_argument("--out", default=argparse.SUPPRESS, help="output file (default stdout)")
    common.add_argument("--allow-biased-min", action="store_true", default=argparse.SUPPRESS,
                        help="permit min_v statistics under pruning")
    p = argparse.ArgumentParser(prog="brwsim", parents=[common],
                                description="Boundary-case branching random walk experiments.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def law_opts(sp):
        sp.add_argument("--law", help=f"preset ({', '.join(PRESETS)}) or kind")
        sp.add_argument("--config", help="key=value file supplying law.* keys")
        sp.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key")

    sp = sub.add_parser("validate", parents=[common], help="check the boundary-case assumptions")
    law_opts(sp)
    sp = sub.add_parser("simulate", parents=[common], help="per-generation trial statistics as CSV")
    law_opts(sp)
    sp.add_argument("-n", type=int, required=True)
    sp.add_argument("--trials", type=int, default=1)
    sp.add_argument("--mode", default="exact")
    sp.add_argument("--betas", default="")
    sp = sub.add_parser("spine", parents=[common], help="spine paths under Q as CSV")
    law_opts(sp)
    sp.add_argument("-n", type=int, required=True)
    sp.add_argument("--trials", type=int, default=1)
    sp = sub.add_parser("fixedpoint", parents=[common], help="solve for phi* and print the table")
    law_opts(sp)
    sp.add_argument("--t-lo", type=float, default=1e-8)
    sp.add_argument("--t-hi", type=float, default=1e4)
    sp.add_argument("--points", type=int, default=400)
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--max-iter", type=int, default=5000)
    sp = sub.add_parser("experiment", parents=[common], help="run a configured experiment")
    sp.add_argument("--config", required=True)
    sp.add_argument("--set", action="append", metavar="KEY=VALUE")
    sp.add_argument("--format", choices=("csv", "markdown"), default="markdown")
    sp = sub.add_parser("regress", parents=[common], help="exponent regression of a CSV column")
    sp.add_argument("--input", default="-")
    sp.add_argument("--n-column", default="n")
    sp.add_argument("--stat-column", default="stat")
    sp.add_argument("--kind", choices=("power", "log"), default="power")
    sp = sub.add_parser("report", parents=[common], help="re-render a CSV experiment report")
    sp.add_argument("--input", default="-")
    sp.add_argument("--format", choices=("csv", "markdown"), default="markdown")
    return p


COMMANDS = {"validate": _cmd_validate, "simulate": _cmd_simulate, "spine": _cmd_spine,
            "fixedpoint": _cmd_fixedpoint, "experiment": _cmd_experiment, "regress": _cmd_regress,
            "report": _cmd_report}


def main(argv=None):
    args = build_parser().parse_args(argv)
    for name, default in (("seed", None), ("threads", None), ("out", None), ("allow_biased_min", False)):
        if not hasattr(args, name):
            setattr(args, name, default)
    if args.seed is None and args.command != "experiment":
        args.seed = 0
    try:
        return COMMANDS[args.command](args)
    except (BRWError, OSError, ValueError) as e:
        print(f"brwsim: error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
