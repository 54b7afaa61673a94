"""Monte Carlo experiments for the diameter and maximum-norm limit laws.

Each replication draws from its own stream ``make_stream(seed, tag, n, rep)``
so results do not depend on the number of worker threads or on scheduling.
Per-replication work runs in a thread pool; the heavy parts (numpy
sampling, sorting and the numba kernels) release the GIL.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numba as nb
import numpy as np
from scipy import special, stats

from . import limit_laws as ll
from .diameter import count_pairs, diameter_pruned, max_norm, pair_angle
from .errors import PreconditionError
from .normalization import (
    angle_tail_constant,
    constants,
    d1_interpoint_normalization,
    frechet_gamma_n,
    gammatail_anbn,
    gammatail_interpoint_normalization,
    gumbel_interpoint_from_anbn,
    norm_max_normalization,
    rn_sn_threshold,
    weibull_interpoint_normalization,
)
from .radial_models import (
    BoundedTail,
    GammaTail,
    Kotz,
    PowerLaw,
    model_from_dict,
    sample_direction,
    sample_points,
)
from .rng import as_stream, make_stream

MIN_KS_SAMPLES = 50

# stream tags, one per experiment kind
_TAG_GUMBEL, _TAG_POISSON, _TAG_WEIBULL, _TAG_FRECHET, _TAG_ZALPHA = 1, 2, 3, 4, 5

EXPERIMENTS = ("gumbel", "poisson_count", "weibull", "frechet")


@dataclass
class ExperimentConfig:
    model: object
    n_values: list
    replications: int
    seed: int = 0
    lam: float = 0.0
    epsilon: float = 0.01
    statistic: str = "both"
    z_draws: int = None
    threads: int = 1

    def __post_init__(self):
        if self.replications < 1:
            raise PreconditionError("replications must be >= 1", "replications")
        if not 0 < self.epsilon <= 0.1:
            raise PreconditionError("epsilon must lie in (0, 0.1]", "epsilon")
        if self.statistic not in ("both", "interpoint", "norm"):
            raise PreconditionError(f"unknown statistic selector {self.statistic!r}", "config")
        if not self.n_values:
            raise PreconditionError("n_values must be nonempty", "config")
        self.n_values = [int(n) for n in self.n_values]

    @classmethod
    def from_dict(cls, spec: dict):
        spec = dict(spec)
        spec.pop("experiment", None)
        if "model" not in spec:
            raise PreconditionError("experiment config needs a 'model'", "config")
        model = spec.pop("model")
        if isinstance(model, dict):
            model = model_from_dict(model)
        if "lambda" in spec:
            spec["lam"] = spec.pop("lambda")
        known = {"n_values", "replications", "seed", "lam", "epsilon", "statistic", "z_draws", "threads"}
        unknown = set(spec) - known
        if unknown:
            raise PreconditionError(f"unknown config fields {sorted(unknown)}", "config")
        return cls(model=model, **spec)

    def to_dict(self):
        return {
            "model": self.model.to_dict(),
            "n_values": list(self.n_values),
            "replications": self.replications,
            "seed": self.seed,
            "lambda": self.lam,
            "epsilon": self.epsilon,
            "statistic": self.statistic,
            "z_draws": self.z_draws,
        }


@dataclass
class NResult:
    """Everything recorded at one sample size."""

    n: int
    samples: dict = field(default_factory=dict)
    ks: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)

    def to_dict(self, include_samples=False):
        out = {"n": self.n, "ks": dict(self.ks), "summary": _jsonable(self.summary)}
        out["sample_sizes"] = {k: int(len(v)) for k, v in self.samples.items()}
        if include_samples:
            out["samples"] = {k: [float(x) for x in v] for k, v in self.samples.items()}
        return out


@dataclass
class ExperimentReport:
    experiment: str
    config: dict
    results: list
    comparisons: int = 0
    runtime_s: float = 0.0

    def by_n(self, n):
        for r in self.results:
            if r.n == n:
                return r
        raise KeyError(n)

    def to_dict(self, include_samples=False, include_timing=False):
        out = {
            "experiment": self.experiment,
            "config": self.config,
            "results": [r.to_dict(include_samples) for r in self.results],
            "comparisons": int(self.comparisons),
        }
        if include_timing:
            out["runtime_s"] = self.runtime_s
        return out

    def to_json(self, include_samples=False, include_timing=False, indent=2):
        return json.dumps(self.to_dict(include_samples, include_timing), indent=indent, sort_keys=True)

    def samples_csv(self) -> str:
        """Standardized samples as CSV with columns ``n, rep, stat_name, value``."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "rep", "stat_name", "value"])
        for r in self.results:
            for name, values in r.samples.items():
                for k, v in enumerate(values):
                    w.writerow([r.n, k, name, f"{float(v):.17g}"])
        return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    return obj


def _map_reps(fn, count, threads):
    """``[fn(k) for k in range(count)]``, optionally on a thread pool."""
    if threads is None or threads <= 1 or count <= 1:
        return [fn(k) for k in range(count)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(count)))


def _ks_or_none(values, law):
    if len(values) < MIN_KS_SAMPLES:
        return None
    return ll.ks_statistic(values, law)


def _gamma_tail(model):
    if isinstance(model, Kotz):
        return model.resolve()
    if not isinstance(model, GammaTail):
        raise PreconditionError("this experiment needs a gamma-tail (or Kotz) model", "model-family")
    return model


def run_gumbel_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Diameter and maximum norm of gamma-tail samples against their Gumbel limits.

    ``interpoint`` is the diameter standardized from the tail sequences
    ``(a_n, b_n)``; ``interpoint_closed_form`` uses the fully collected
    closed form. For ``d = 1`` both target the Gumbel-sum law. ``norm_gap``
    holds ``(2 M_n - D_n) / (b_n log(a_n / b_n))`` (``d >= 2`` only).
    """
    t0 = time.perf_counter()
    model = _gamma_tail(cfg.model)
    d = model.d
    results, comparisons = [], 0
    for n in cfg.n_values:
        a_n, b_n = gammatail_anbn(model, n)
        main = gumbel_interpoint_from_anbn(a_n, b_n, d, n)
        closed = d1_interpoint_normalization(model, n) if d == 1 else gammatail_interpoint_normalization(model, n)
        norm_m = norm_max_normalization(model, n)
        target = main.law

        def one(rep, n=n):
            pts = sample_points(model, n, make_stream(cfg.seed, _TAG_GUMBEL, n, rep))
            res = diameter_pruned(pts)
            angle = pair_angle(pts, *res.pair) if d >= 2 else math.pi
            return res.value, max_norm(pts)[0], res.comparisons, angle

        raw = np.array(_map_reps(one, cfg.replications, cfg.threads), dtype=float)
        diam, mnorm, comps, angle = raw.T
        comparisons += int(comps.sum())
        r = NResult(n)
        if cfg.statistic in ("both", "interpoint"):
            r.samples["interpoint"] = main.standardize(diam)
            r.samples["interpoint_closed_form"] = closed.standardize(diam)
            r.ks["interpoint"] = _ks_or_none(r.samples["interpoint"], target)
            r.ks["interpoint_closed_form"] = _ks_or_none(r.samples["interpoint_closed_form"], target)
        if cfg.statistic in ("both", "norm"):
            r.samples["norm"] = norm_m.standardize(mnorm)
            r.ks["norm"] = _ks_or_none(r.samples["norm"], ll.GUMBEL)
        if d >= 2 and cfg.statistic == "both":
            r.samples["norm_gap"] = (2 * mnorm - diam) / (b_n * math.log(a_n / b_n))
        r.summary = {
            "a_n": a_n,
            "b_n": b_n,
            "center": main.center,
            "center_closed_form": closed.center,
            "scale": main.scale,
            "law": target.to_dict(),
            "norm_gap_target": 0.5 * (d - 1),
            "norm_gap_median": float(np.median(r.samples["norm_gap"])) if "norm_gap" in r.samples else None,
            "median_pair_angle": float(np.median(angle)),
            "mean_comparisons": float(comps.mean()),
        }
        results.append(r)
    return ExperimentReport("gumbel", cfg.to_dict(), results, comparisons, time.perf_counter() - t0)


def poisson_tv_distance(counts, mean: float) -> float:
    """Total variation distance between the empirical pmf of ``counts`` and Po(mean)."""
    counts = np.asarray(counts, dtype=int)
    kmax = int(counts.max()) if counts.size else 0
    emp = np.bincount(counts, minlength=kmax + 1) / counts.size
    po = stats.poisson.pmf(np.arange(kmax + 1), mean)
    tail = stats.poisson.sf(kmax, mean)
    return float(0.5 * (np.abs(emp - po).sum() + tail))


def run_poisson_count_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Counts of far-apart pairs at the threshold ``2a_n - r_n b_n``.

    Records ``W_n`` (all pairs beyond the threshold) and ``W'_n`` (only pairs
    whose norms are both below ``a_n + s_n b_n``) and compares ``W_n`` with
    the Poisson law of mean ``exp(-lambda)``.
    """
    t0 = time.perf_counter()
    model = _gamma_tail(cfg.model)
    if model.d < 2:
        raise PreconditionError("pair-count experiment needs d >= 2", "dimension")
    mean = math.exp(-cfg.lam)
    results = []
    for n in cfg.n_values:
        a_n, b_n = gammatail_anbn(model, n)
        th = rn_sn_threshold(a_n, b_n, model.d, cfg.lam)

        def one(rep, n=n, th=th):
            pts = sample_points(model, n, make_stream(cfg.seed, _TAG_POISSON, n, rep))
            c = count_pairs(pts, th.threshold, th.cap)
            return c.w_n, c.w_prime_n

        raw = np.array(_map_reps(one, cfg.replications, cfg.threads), dtype=np.int64)
        w, wp = raw[:, 0], raw[:, 1]
        kmax = int(w.max())
        table = {str(k): float(np.mean(w == k)) for k in range(kmax + 1)}
        r = NResult(n)
        r.samples["w_n"] = w
        r.samples["w_prime_n"] = wp
        r.summary = {
            "a_n": a_n,
            "b_n": b_n,
            **th.to_dict(),
            "poisson_mean": mean,
            "pmf_w_n": table,
            "tv_w_n": poisson_tv_distance(w, mean),
            "tv_w_prime_n": poisson_tv_distance(wp, mean),
            "p_w_zero": float(np.mean(w == 0)),
            "freq_w_neq_w_prime": float(np.mean(w != wp)),
            "mean_w_prime": float(wp.mean()),
            "mean_w": float(w.mean()),
        }
        results.append(r)
    return ExperimentReport("poisson_count", cfg.to_dict(), results, 0, time.perf_counter() - t0)


def run_weibull_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Bounded-radius samples: diameter against its reversed-Weibull limit."""
    t0 = time.perf_counter()
    model = cfg.model
    if not isinstance(model, BoundedTail) or model.d < 2:
        raise PreconditionError("Weibull experiment needs a bounded model with d >= 2", "model-family")
    results, comparisons = [], 0
    for n in cfg.n_values:
        mapping = weibull_interpoint_normalization(model.alpha_w, model.c_w, model.d, n)

        def one(rep, n=n):
            pts = sample_points(model, n, make_stream(cfg.seed, _TAG_WEIBULL, n, rep))
            res = diameter_pruned(pts)
            return res.value, max_norm(pts)[0], res.comparisons

        raw = np.array(_map_reps(one, cfg.replications, cfg.threads), dtype=float)
        diam, mnorm, comps = raw.T
        comparisons += int(comps.sum())
        r = NResult(n)
        r.samples["interpoint"] = mapping.normalization.standardize(diam)
        r.samples["interpoint_raw"] = mapping.raw_statistic(diam)
        r.ks["interpoint"] = _ks_or_none(r.samples["interpoint"], mapping.normalization.law)
        r.summary = {
            "exponent": mapping.exponent,
            "shape": mapping.shape,
            "survival_constant": mapping.survival_constant,
            "survival_at_1": float(np.mean(r.samples["interpoint_raw"] > 1.0)),
            "survival_at_1_limit": float(mapping.survival(1.0)),
            "fraction_max_norm_one": float(np.mean(np.abs(mnorm - 1.0) <= 1e-12)),
        }
        if model.alpha_w > 0:
            nm = norm_max_normalization(model, n)
            r.samples["norm"] = nm.standardize(mnorm)
            r.ks["norm"] = _ks_or_none(r.samples["norm"], nm.law)
        results.append(r)
    return ExperimentReport("weibull", cfg.to_dict(), results, comparisons, time.perf_counter() - t0)


@nb.njit(cache=True, nogil=True)
def _absorb_points(pts, count, new, radii, r_first, best):
    """Add ``new`` (sorted by decreasing radius) to ``pts[:count]``.

    Returns the updated best distance, the new count, and whether the
    search may stop: no later point (radius <= the last one seen) can
    beat ``best`` once ``r_first + radius <= best``.
    """
    d = pts.shape[1]
    for m in range(new.shape[0]):
        r = radii[m]
        if count > 0 and r_first + r <= best:
            return best, count, True
        if r > best:  # pair with the origin
            best = r
        for i in range(count):
            s = 0.0
            for k in range(d):
                t = pts[i, k] - new[m, k]
                s += t * t
            s = math.sqrt(s)
            if s > best:
                best = s
        for k in range(d):
            pts[count, k] = new[m, k]
        count += 1
    return best, count, False


def simulate_poisson_limit(alpha_f: float, d: int, epsilon: float, rng) -> float:
    """One draw of the diameter of the limiting Poisson process plus the origin.

    The process has intensity ``alpha_f / omega_d |x|^(-alpha_f - d)``;
    only points with ``|x| > epsilon`` are generated (``epsilon^-alpha_f``
    of them on average). Radii are produced in decreasing order as
    ``Gamma_k^(-1/alpha_f)`` with ``Gamma_k`` the arrival times of a unit
    Poisson process, which is the same law as a Poisson number of Pareto
    radii. Generation stops once the triangle bound shows that no
    remaining point can change the diameter, so the result equals the
    diameter of all points beyond ``epsilon`` together with the origin.
    """
    if not 0 < epsilon <= 0.1:
        raise PreconditionError("epsilon must lie in (0, 0.1]", "epsilon")
    if not alpha_f > 0:
        raise PreconditionError("alpha_f must be positive", "invalid-parameter")
    rng = as_stream(rng)
    cutoff = epsilon ** (-alpha_f)  # arrival time at which radius hits epsilon
    pts = np.empty((64, d))
    count, best, r_first, arrival = 0, 0.0, 0.0, 0.0
    chunk = 32
    while True:
        gaps = rng.standard_exponential(chunk)
        arrivals = arrival + np.cumsum(gaps)
        arrival = float(arrivals[-1])
        keep = arrivals < cutoff
        radii = arrivals[keep] ** (-1.0 / alpha_f)
        dirs = sample_direction(d, rng, chunk)[keep]
        if radii.size:
            if count == 0:
                r_first = float(radii[0])
            if count + radii.size > pts.shape[0]:
                grown = np.empty((max(2 * pts.shape[0], count + radii.size), d))
                grown[:count] = pts[:count]
                pts = grown
            best, count, done = _absorb_points(pts, count, dirs * radii[:, None], radii, r_first, best)
            if done:
                return float(best)
        if not keep[-1]:
            return float(best)
        chunk = min(2 * chunk, 1 << 16)


def simulate_poisson_limit_direct(alpha_f: float, d: int, epsilon: float, rng) -> float:
    """Literal construction: Poisson count, i.i.d. Pareto radii, origin, full diameter.

    Cost grows like ``epsilon^-alpha_f``; meant for checking
    :func:`simulate_poisson_limit` at moderate truncation.
    """
    if not 0 < epsilon <= 0.1:
        raise PreconditionError("epsilon must lie in (0, 0.1]", "epsilon")
    rng = as_stream(rng)
    count = int(rng.poisson(epsilon ** (-alpha_f)))
    if count == 0:
        return 0.0
    radii = epsilon * (1.0 - rng.random(count)) ** (-1.0 / alpha_f)
    pts = np.vstack([np.zeros((1, d)), sample_direction(d, rng, count) * radii[:, None]])
    return diameter_pruned(pts).value


def run_frechet_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Power-law samples: scaled diameter against simulated Poisson-process diameters."""
    t0 = time.perf_counter()
    model = cfg.model
    if not isinstance(model, PowerLaw):
        raise PreconditionError("Frechet experiment needs a power-law model", "model-family")
    d, alpha = model.d, model.alpha_f
    z_count = cfg.z_draws or cfg.replications
    z = np.array(
        _map_reps(
            lambda k: simulate_poisson_limit(alpha, d, cfg.epsilon, make_stream(cfg.seed, _TAG_ZALPHA, k)),
            z_count,
            cfg.threads,
        )
    )
    results, comparisons = [], 0
    for n in cfg.n_values:
        g_n = frechet_gamma_n(model.c_f, alpha, n)

        def one(rep, n=n):
            pts = sample_points(model, n, make_stream(cfg.seed, _TAG_FRECHET, n, rep))
            res = diameter_pruned(pts)
            top2 = np.argsort(-pts.norms, kind="stable")[:2]
            not_top = set(res.pair) != set(int(i) for i in top2)
            angle = pair_angle(pts, *res.pair) if d >= 2 else math.pi
            return res.value, max_norm(pts)[0], res.comparisons, float(not_top), angle

        raw = np.array(_map_reps(one, cfg.replications, cfg.threads), dtype=float)
        diam, mnorm, comps, not_top, angle = raw.T
        comparisons += int(comps.sum())
        r = NResult(n)
        r.samples["interpoint"] = diam / g_n
        r.samples["norm"] = mnorm / g_n
        r.samples["z_alpha"] = z
        r.ks["interpoint_vs_z"] = ll.ks_two_sample(r.samples["interpoint"], z)
        r.ks["norm"] = _ks_or_none(r.samples["norm"], ll.Frechet(alpha))
        r.summary = {
            "gamma_n": g_n,
            "freq_pair_not_top_two": float(not_top.mean()),
            "angle_quantiles": {str(q): float(np.quantile(angle, q)) for q in (0.01, 0.1, 0.5, 0.9)},
            "min_angle": float(angle.min()),
        }
        results.append(r)
    return ExperimentReport("frechet", cfg.to_dict(), results, comparisons, time.perf_counter() - t0)


def exact_angle_tail(d: int, eps):
    """Exact ``P(1 + cos(angle) < eps)`` for independent uniform directions in R^d."""
    if d < 2:
        raise PreconditionError("angle tails need d >= 2", "dimension")
    e = np.clip(np.asarray(eps, dtype=float), 0.0, 2.0)
    h = 0.5 * (d - 1)
    return special.betainc(h, h, e / 2.0)


def _cosines(d, reps, rng, chunk=1 << 18):
    out = np.empty(reps)
    done = 0
    while done < reps:
        m = min(chunk, reps - done)
        y = sample_direction(d, rng, m)
        z = sample_direction(d, rng, m)
        out[done : done + m] = np.einsum("ij,ij->i", y, z)
        done += m
    return out


def angle_tail_experiment(d: int, eps_list, reps: int, rng) -> list:
    """Empirical ``P(1 + cos(angle) < eps)`` for pairs of uniform directions.

    Each row carries the empirical frequency, the small-``eps`` formula
    ``k_d eps^((d-1)/2)``, the exact probability and its binomial sd.
    """
    rng = as_stream(rng)
    for e in eps_list:
        if not 0 < e < 1:
            raise PreconditionError("each eps must lie in (0, 1)", "epsilon")
    cosines = _cosines(d, reps, rng)
    k_d = angle_tail_constant(d)
    rows = []
    for e in eps_list:
        emp = float(np.mean(1.0 + cosines < e))
        exact = float(exact_angle_tail(d, e))
        formula = k_d * e ** (0.5 * (d - 1))
        rows.append(
            {
                "eps": e,
                "empirical": emp,
                "formula": formula,
                "exact": exact,
                "sigma": math.sqrt(exact * (1 - exact) / reps),
                "ratio": emp / formula,
            }
        )
    return rows


def sphere_pair_experiment(a, b, r, t, u, d, reps, rng) -> dict:
    """``P(|Y - Z| > 2a - r b)`` for ``Y`` uniform on the sphere of radius
    ``a + t b`` and ``Z = (a + u b) e_1``.

    Returns the empirical frequency, the asymptotic formula
    ``c'_d (b/a)^((d-1)/2) (r + t + u)_+^((d-1)/2)`` and the exact value
    from the cosine-threshold integral.
    """
    if d < 2:
        raise PreconditionError("sphere-pair experiment needs d >= 2", "dimension")
    if not (a > 0 and b > 0) or (1 + abs(r) + abs(t) + abs(u)) * b > a / 10:
        raise PreconditionError("need (1 + |r| + |t| + |u|) b <= a/10", "parameter")
    rng = as_stream(rng)
    ry, rz = a + t * b, a + u * b
    thr = 2 * a - r * b
    eps_star = ((ry + rz) ** 2 - thr**2) / (2 * ry * rz)
    exact = float(exact_angle_tail(d, eps_star)) if eps_star > 0 else 0.0
    k = r + t + u
    formula = constants(d).c_prime_d * (b / a) ** (0.5 * (d - 1)) * max(k, 0.0) ** (0.5 * (d - 1))
    hits = 0
    done = 0
    z = np.zeros(d)
    z[0] = rz
    while done < reps:
        m = min(1 << 18, reps - done)
        y = sample_direction(d, rng, m) * ry
        diff = y - z
        hits += int(np.count_nonzero(np.sqrt(np.einsum("ij,ij->i", diff, diff)) > thr))
        done += m
    emp = hits / reps
    return {
        "empirical": emp,
        "formula": formula,
        "exact": exact,
        "sigma": math.sqrt(max(exact * (1 - exact), 0.0) / reps),
        "eps_star": eps_star,
    }


def run_experiment(kind: str, cfg: ExperimentConfig) -> ExperimentReport:
    runners = {
        "gumbel": run_gumbel_experiment,
        "poisson_count": run_poisson_count_experiment,
        "weibull": run_weibull_experiment,
        "frechet": run_frechet_experiment,
    }
    if kind not in runners:
        raise PreconditionError(f"unknown experiment {kind!r}", "config")
    return runners[kind](cfg)
