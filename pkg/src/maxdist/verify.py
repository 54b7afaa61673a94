"""Named verification suites with pass/fail scorecards.

Each suite returns a list of :class:`Criterion` records (measured value,
threshold, verdict). Scorecards contain no timings, so equal seeds give
byte-identical output regardless of the thread count.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import limit_laws as ll
from .diameter import diameter_naive, diameter_pruned
from .montecarlo import (
    ExperimentConfig,
    angle_tail_experiment,
    run_frechet_experiment,
    run_gumbel_experiment,
    run_poisson_count_experiment,
    run_weibull_experiment,
    simulate_poisson_limit,
    sphere_pair_experiment,
)
from .normalization import constants, gammatail_interpoint_normalization
from .radial_models import BoundedTail, GammaTail, Kotz, PowerLaw, normal_model, sample_points
from .rng import make_stream


@dataclass(frozen=True)
class Criterion:
    name: str
    measured: object
    threshold: str
    passed: bool

    def to_dict(self):
        return {"name": self.name, "measured": self.measured, "threshold": self.threshold, "passed": bool(self.passed)}


def scorecard(suite: str, criteria) -> dict:
    return {
        "suite": suite,
        "passed": all(c.passed for c in criteria),
        "criteria": [c.to_dict() for c in criteria],
    }


def scorecard_json(card: dict) -> str:
    return json.dumps(card, indent=2, sort_keys=True)


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def suite_constants(**_):
    out = []
    worst = [0.0, 0.0, 0.0]
    for d in range(2, 11):
        k = constants(d)
        worst[0] = max(worst[0], _rel(k.c_tilde_d, k.c_d * k.omega_d**2))
        worst[1] = max(worst[1], _rel(k.c_d, (d - 1) * k.c_dblprime_d / 4))
        worst[2] = max(worst[2], _rel(k.c_dblprime_d, math.gamma((d + 1) / 2) * k.c_prime_d))
    names = ("c_tilde = c_d omega_d^2", "c_d = (d-1) c''_d / 4", "c''_d = Gamma((d+1)/2) c'_d")
    for name, w in zip(names, worst):
        out.append(Criterion(f"{name}, d=2..10", w, "<= 1e-12 relative", w <= 1e-12))
    k2 = constants(2, alpha_w=0.0)
    for name, got, want in (
        ("c_2", k2.c_d, 0.25 / math.sqrt(math.pi)),
        ("c_tilde_2", k2.c_tilde_d, math.pi**1.5),
        ("c_star(alpha=0, d=2)", k2.c_star, 1 / math.pi),
    ):
        err = abs(got - want)
        out.append(Criterion(f"{name} value", got, f"|x - {want:.10f}| <= 1e-10", err <= 1e-10))
    return out


def suite_oracle(seed=0, instances=1000, max_n=500, **_):
    rng = make_stream(seed, 101)
    dims = (1, 2, 3, 5)
    mismatches = 0
    for k in range(instances):
        d = int(dims[k % 4])
        fam = (k // 4) % 4
        n = int(rng.integers(2, max_n + 1))
        model = (
            GammaTail(alpha=float(rng.uniform(0, 2)), beta=float(rng.uniform(0.3, 2)), gamma=float(rng.uniform(0.5, 3)), d=d),
            Kotz(kappa=float(rng.uniform(0.3, 2)), b=float(rng.uniform(1, 3)), d=d),
            BoundedTail(("uniform-ball", "uniform-sphere", "pure-weibull-radius")[k % 3], d, alpha_w=1.5 if k % 3 == 2 else None),
            PowerLaw(alpha_f=float(rng.uniform(0.5, 4)), c_f=1.0, d=d),
        )[fam]
        pts = sample_points(model, n, rng)
        a, b = diameter_naive(pts), diameter_pruned(pts)
        if a.value != b.value or a.pair != b.pair:
            mismatches += 1
    return [Criterion(f"pruned == naive on {instances} instances", mismatches, "== 0 mismatches", mismatches == 0)]


def normal_reference(d, n):
    """Known closed form for the standard normal: ``(scale^-1, bracket)``."""
    L = math.log(n)
    const = math.log((d - 1) * 2 ** ((d - 7) / 2) / (math.sqrt(math.pi) * math.gamma(d / 2)))
    return math.sqrt(2 * L), 4 * L + (d - 3) / 2 * math.log(L) + math.log(math.log(L)) + const


def kotz_reference(kappa, b, d, n):
    L = math.log(n)
    const = math.log((d - 1) * 2 ** ((d - 7) / 2) * math.gamma(d / 2) / (math.sqrt(math.pi) * math.gamma(d / 2 + b - 1) ** 2))
    return math.sqrt(4 * kappa * L), 4 * L + (4 * b + d - 7) / 2 * math.log(L) + math.log(math.log(L)) + const


def exponential_reference(alpha, beta, d, n):
    """Known ``gamma = 1`` closed form, constant written with ``c`` of the exact model."""
    m = GammaTail(alpha, beta, 1.0, d)
    L = math.log(n)
    const = math.log(constants(d).c_tilde_d * beta ** (-2 * (alpha + d)) * m.density_constant**2)
    return beta, 2 * L + (4 * alpha + 3 * d - 3) / 2 * math.log(L) + math.log(math.log(L)) + const


def suite_closed_forms(**_):
    worst = {"normal": 0.0, "kotz": 0.0, "exponential": 0.0}
    for n in (10**3, 10**6, 10**9):
        for d in (2, 3, 4, 5, 8):
            cases = [("normal", normal_model(d), normal_reference(d, n))]
            for kappa, b in ((1.0, 2.0), (0.5, 1.0), (2.0, 0.75), (1.3, 3.5)):
                cases.append(("kotz", Kotz(kappa, b, d), kotz_reference(kappa, b, d, n)))
            for alpha, beta in ((0.0, 1.0), (1.5, 0.7), (-0.5, 2.0)):
                cases.append(("exponential", GammaTail(alpha, beta, 1.0, d), exponential_reference(alpha, beta, d, n)))
            for key, model, (inv_scale, bracket) in cases:
                nm = gammatail_interpoint_normalization(model, n)
                err = max(_rel(1 / nm.scale, inv_scale), _rel(nm.center / nm.scale, bracket))
                worst[key] = max(worst[key], err)
    return [
        Criterion(f"closed form vs {k} reference form, n in 1e3/1e6/1e9", v, "<= 1e-10 relative", v <= 1e-10)
        for k, v in worst.items()
    ]


def suite_angle_tail(seed=0, reps=10**6, **_):
    eps_list = (0.1, 0.03, 0.01)
    out = []
    rows3 = angle_tail_experiment(3, eps_list, reps, make_stream(seed, 201, 3))
    z = max(abs(r["empirical"] - r["eps"] / 2) / r["sigma"] for r in rows3)
    out.append(Criterion("d=3: |P - eps/2| in sigmas, eps in {0.1,0.03,0.01}", z, "<= 4", z <= 4))
    for d in (2, 4):
        rows = angle_tail_experiment(d, eps_list, reps, make_stream(seed, 201, d))
        last = rows[-1]
        zf = abs(last["empirical"] - last["formula"]) / last["sigma"]
        out.append(Criterion(f"d={d}: |P - formula| at eps=0.01 in sigmas", zf, "<= 4", zf <= 4))
        # |ratio - 1| may not grow from one eps to the next by more than 4 sd of the ratio
        ok = True
        gaps = []
        for prev, cur in zip(rows, rows[1:]):
            gap_prev, gap_cur = abs(prev["ratio"] - 1), abs(cur["ratio"] - 1)
            gaps.append(gap_cur)
            if gap_cur > gap_prev + 4 * cur["sigma"] / cur["formula"]:
                ok = False
        out.append(
            Criterion(
                f"d={d}: ratio empirical/formula trends to 1 as eps decreases",
                [round(r["ratio"], 6) for r in rows],
                "|ratio-1| nonincreasing within 4 sd",
                ok,
            )
        )
    return out


def suite_sphere_pair(seed=0, reps=10**6, **_):
    res = sphere_pair_experiment(100.0, 0.5, 2.0, 0.0, 0.0, 2, reps, make_stream(seed, 301))
    z = abs(res["empirical"] - res["exact"]) / res["sigma"]
    gap = abs(res["exact"] - res["formula"]) / res["exact"]
    return [
        Criterion("empirical vs exact cosine integral (sigmas)", z, "<= 4", z <= 4),
        Criterion("exact vs asymptotic, relative", gap, "<= 0.10", gap <= 0.10),
    ]


def suite_poisson(seed=0, threads=1, n=100_000, reps=2000, **_):
    cfg = ExperimentConfig(normal_model(2), [n], reps, seed=seed, lam=0.0, threads=threads)
    s = run_poisson_count_experiment(cfg).results[0].summary
    target = math.exp(-1)
    return [
        Criterion("P(W_n = 0)", s["p_w_zero"], f"within {target:.4f} +/- 0.06", abs(s["p_w_zero"] - target) <= 0.06),
        Criterion("mean W'_n", s["mean_w_prime"], "in [0.7, 1.4]", 0.7 <= s["mean_w_prime"] <= 1.4),
        Criterion("freq(W_n != W'_n)", s["freq_w_neq_w_prime"], "<= 0.05", s["freq_w_neq_w_prime"] <= 0.05),
    ]


def gumbel_trend(seed=0, threads=1, n_values=(10**3, 10**4, 10**5), batches=10, batch_reps=1000):
    """KS of the standardized diameter in ``batches`` independent experiments per ``n``.

    Batch ``k`` holds replications ``k*batch_reps .. (k+1)*batch_reps - 1``,
    so batch 0 is exactly a ``batch_reps``-replication run with this seed.
    """
    cfg = ExperimentConfig(normal_model(2), list(n_values), batches * batch_reps, seed=seed, threads=threads)
    report = run_gumbel_experiment(cfg)
    table = {}
    for r in report.results:
        x = r.samples["interpoint"]
        ks = [ll.ks_statistic(x[k * batch_reps : (k + 1) * batch_reps], ll.GUMBEL) for k in range(batches)]
        table[r.n] = {"batch_ks": ks, "median_batch_ks": float(np.median(ks))}
    return table


def suite_gumbel(seed=0, threads=1, n=100_000, reps=1000, batches=10, **_):
    # batches of reps replications each; KS noise at 1000 samples (sd ~0.01)
    # is well below the differences between successive n
    n_values = sorted({10**3, 10**4, n})
    table = gumbel_trend(seed, threads, n_values, batches, reps)
    meds = [table[m]["median_batch_ks"] for m in n_values]
    decreasing = all(x > y for x, y in zip(meds, meds[1:]))
    ks_top = table[n_values[-1]]["batch_ks"][0]
    return [
        Criterion(f"KS(standardized diameter, Gumbel) at n={n_values[-1]}, {reps} reps", ks_top, "<= 0.12", ks_top <= 0.12),
        Criterion(
            f"median KS over {batches} runs of {reps} reps, n={n_values}",
            meds,
            "strictly decreasing",
            decreasing,
        ),
    ]


def suite_norm_gap(seed=0, threads=1, n=100_000, reps=1000, **_):
    cfg = ExperimentConfig(normal_model(2), [n], reps, seed=seed, threads=threads)
    med = run_gumbel_experiment(cfg).results[0].summary["norm_gap_median"]
    return [Criterion(f"median (2M-D)/(b log(a/b)) at n={n}", med, "in [0.35, 0.65]", 0.35 <= med <= 0.65)]


def suite_weibull(seed=0, threads=1, n=2000, reps=2000, **_):
    sphere = run_weibull_experiment(
        ExperimentConfig(BoundedTail("uniform-sphere", 2), [n], reps, seed=seed, threads=threads)
    ).results[0]
    ball = run_weibull_experiment(
        ExperimentConfig(BoundedTail("uniform-ball", 2), [n], reps, seed=seed, threads=threads)
    ).results[0]
    ks = sphere.ks["interpoint"]
    p = ball.summary["survival_at_1"]
    target = math.exp(-4 * constants(2, 1.0).c_star)
    return [
        Criterion("sphere d=2: KS vs NegWeibull(1/2)", ks, "<= 0.05", ks <= 0.05),
        Criterion("ball d=2: P(n^(4/5)(2-D) > 1)", p, f"within {target:.4f} +/- 0.04", abs(p - target) <= 0.04),
    ]


def suite_frechet(seed=0, threads=1, n=10_000, reps=5000, z_draws=5000, stability_draws=10_000, **_):
    r = run_frechet_experiment(
        ExperimentConfig(PowerLaw(3.0, 1.0, 2), [n], reps, seed=seed, epsilon=0.01, z_draws=z_draws, threads=threads)
    ).results[0]
    z_coarse = [simulate_poisson_limit(3.0, 2, 1e-2, make_stream(seed, 401, k)) for k in range(stability_draws)]
    z_fine = [simulate_poisson_limit(3.0, 2, 1e-3, make_stream(seed, 402, k)) for k in range(stability_draws)]
    ks_eps = ll.ks_two_sample(z_coarse, z_fine)
    return [
        Criterion("two-sample KS(scaled diameter, Z_alpha)", r.ks["interpoint_vs_z"], "<= 0.05", r.ks["interpoint_vs_z"] <= 0.05),
        Criterion("Z_alpha truncation stability KS(eps=1e-2 vs 1e-3)", ks_eps, "<= 0.03", ks_eps <= 0.03),
        Criterion("KS(scaled max norm, Frechet(3))", r.ks["norm"], "<= 0.03", r.ks["norm"] <= 0.03),
    ]


def suite_d1(seed=0, threads=1, n=100_000, reps=2000, mc_pairs=10**7, **_):
    laplace = GammaTail(alpha=0.0, beta=1.0, gamma=1.0, d=1)
    r = run_gumbel_experiment(ExperimentConfig(laplace, [n], reps, seed=seed, threads=threads)).results[0]
    draws = ll.sample(ll.GUMBEL_SUM, make_stream(seed, 501), mc_pairs)
    ks_conv = ll.ks_statistic(draws, ll.GUMBEL_SUM)
    return [
        Criterion("d=1 Laplace: KS(standardized diameter, Gumbel sum)", r.ks["interpoint"], "<= 0.10", r.ks["interpoint"] <= 0.10),
        Criterion("Gumbel-sum quadrature vs Monte Carlo convolution KS", ks_conv, "<= 0.001", ks_conv <= 0.001),
    ]


def suite_determinism(seed=0, threads=4, **_):
    """Re-run small experiments with one thread and with ``threads`` threads."""
    same = True
    for runner, model, n in (
        (run_gumbel_experiment, normal_model(2), [2000]),
        (run_poisson_count_experiment, normal_model(3), [2000]),
        (run_frechet_experiment, PowerLaw(2.0, 1.0, 2), [500]),
    ):
        outs = []
        for t in (1, max(2, threads)):
            cfg = ExperimentConfig(model, n, 40, seed=seed, threads=t)
            outs.append(runner(cfg).to_json(include_samples=True))
        same = same and outs[0] == outs[1]
    return [Criterion("reports identical across thread counts", same, "== true", same)]


SUITES = {
    "constants": suite_constants,
    "oracle": suite_oracle,
    "closed_forms": suite_closed_forms,
    "angle_tail": suite_angle_tail,
    "sphere_pair": suite_sphere_pair,
    "poisson": suite_poisson,
    "gumbel": suite_gumbel,
    "norm_gap": suite_norm_gap,
    "weibull": suite_weibull,
    "frechet": suite_frechet,
    "d1": suite_d1,
    "determinism": suite_determinism,
}


def run_suite(name: str, **kwargs) -> dict:
    if name not in SUITES:
        raise KeyError(name)
    kwargs = {k: v for k, v in kwargs.items() if v is not None}
    return scorecard(name, SUITES[name](**kwargs))
