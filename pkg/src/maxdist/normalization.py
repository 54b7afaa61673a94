"""Normalizing constants and sequences for the sample diameter and maximum norm.

Every normalization is returned as an :class:`AffineNormalization`, the
claim that ``(statistic - center) / scale`` converges in law to ``law``.

Routes provided:

* :func:`gumbel_interpoint_from_anbn` - diameter from any tail sequences
  ``a_n, b_n`` with ``P(|X| > a_n + t b_n) ~ e^(-t)/n``.
* :func:`gammatail_anbn` / :func:`general_anbn` - those sequences for an
  exact gamma-type tail (closed form) or any tail exponent ``g`` (root
  finding).
* :func:`gammatail_interpoint_normalization` - the fully collected closed
  form for densities ``c |x|^alpha exp(-beta |x|^gamma)``.
* :func:`weibull_interpoint_normalization` - bounded radii.
* :func:`frechet_gamma_n` - power-law radii.
* :func:`d1_interpoint_normalization` - the one-dimensional case, whose
  limit is the sum of two independent Gumbel variables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateLimitError, PreconditionError
from .limit_laws import GUMBEL, GUMBEL_SUM, Frechet, LimitLaw, NegWeibull
from .radial_models import BoundedTail, GammaTail, Kotz, PowerLaw, sphere_area

INTERPOINT = "interpoint-max"
NORM = "norm-max"


@dataclass(frozen=True)
class AffineNormalization:
    center: float
    scale: float
    law: LimitLaw
    statistic: str
    n: int = None
    extras: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.scale > 0:
            raise PreconditionError(f"scale must be positive, got {self.scale}", "invalid-scale")

    def standardize(self, values):
        return (np.asarray(values, dtype=float) - self.center) / self.scale

    def to_dict(self):
        return {
            "center": self.center,
            "scale": self.scale,
            "law": self.law.to_dict(),
            "statistic": self.statistic,
            "n": self.n,
            "extras": dict(self.extras),
        }


@dataclass(frozen=True)
class ExtremeConstants:
    d: int
    c_d: float
    c_tilde_d: float
    c_prime_d: float
    c_dblprime_d: float
    omega_d: float
    c_star: float = None
    alpha_w: float = None


def constants(d: int, alpha_w: float = None) -> ExtremeConstants:
    """Closed-form constants for dimension ``d >= 2``.

    ``c_star`` (the Weibull-case constant) is filled in only when
    ``alpha_w`` is given.
    """
    if not isinstance(d, (int, np.integer)) or d < 2:
        raise PreconditionError(f"constants need an integer d >= 2, got {d!r}", "dimension")
    lg = math.lgamma
    sqrt_pi = math.sqrt(math.pi)
    c_d = (d - 1) * 2.0 ** (d - 4) * math.gamma(d / 2) / sqrt_pi
    c_tilde = (d - 1) * 2.0 ** (d - 2) * math.pi ** (d - 0.5) / math.gamma(d / 2)
    # the angle-tail constant times 2^((d-1)/2)
    c_prime = 2.0 ** (d - 2) * math.exp(lg(d / 2) - lg((d + 1) / 2)) / sqrt_pi
    c_dbl = 2.0 ** (d - 2) * math.gamma(d / 2) / sqrt_pi
    c_star = None
    if alpha_w is not None:
        if alpha_w < 0:
            raise PreconditionError("alpha_w must be nonnegative", "invalid-parameter")
        c_star = 2.0 ** (d - 3) * math.exp(2 * lg(alpha_w + 1) + lg(d / 2) - lg((d + 1 + 4 * alpha_w) / 2)) / sqrt_pi
    return ExtremeConstants(
        d=int(d),
        c_d=c_d,
        c_tilde_d=c_tilde,
        c_prime_d=c_prime,
        c_dblprime_d=c_dbl,
        omega_d=sphere_area(d),
        c_star=c_star,
        alpha_w=alpha_w,
    )


def angle_tail_constant(d: int) -> float:
    """Constant ``k_d`` in ``P(1 + cos(angle) < eps) ~ k_d eps^((d-1)/2)``."""
    return 2.0 ** ((d - 3) / 2) * math.exp(math.lgamma(d / 2) - math.lgamma((d + 1) / 2)) / math.sqrt(math.pi)


def _bracket_term(a_n, b_n, d):
    """``(d-1)/2 log(a/b) - log log(a/b) - log c_d``."""
    ratio = a_n / b_n
    return 0.5 * (d - 1) * math.log(ratio) - math.log(math.log(ratio)) - math.log(constants(d).c_d)


def gumbel_interpoint_from_anbn(a_n: float, b_n: float, d: int, n: int = None) -> AffineNormalization:
    """Diameter normalization built from tail sequences ``a_n``, ``b_n``.

    For ``d >= 2`` the limit is Gumbel with
    ``center = 2 a_n - b_n [(d-1)/2 log(a_n/b_n) - log log(a_n/b_n) - log c_d]``.
    For ``d = 1`` the limit is the Gumbel-sum law with
    ``center = 2 a_n - 2 log(2) b_n``.
    """
    if not (a_n > 0 and b_n > 0 and b_n < a_n):
        raise PreconditionError("need 0 < b_n < a_n", "anbn-order")
    if d == 1:
        return AffineNormalization(
            center=2.0 * a_n - 2.0 * math.log(2.0) * b_n,
            scale=b_n,
            law=GUMBEL_SUM,
            statistic=INTERPOINT,
            n=n,
            extras={"a_n": a_n, "b_n": b_n},
        )
    if a_n / b_n <= math.e:
        raise PreconditionError("a_n/b_n must exceed e so that log log(a_n/b_n) > 0", "degenerate-ratio")
    bracket = _bracket_term(a_n, b_n, d)
    return AffineNormalization(
        center=2.0 * a_n - b_n * bracket,
        scale=b_n,
        law=GUMBEL,
        statistic=INTERPOINT,
        n=n,
        extras={"a_n": a_n, "b_n": b_n, "tau_n": 0.5 * (d - 1) * math.log(a_n / b_n)},
    )


def _as_gammatail(model) -> GammaTail:
    if isinstance(model, Kotz):
        return model.resolve()
    if not isinstance(model, GammaTail):
        raise PreconditionError(f"expected a gamma-tail model, got {type(model).__name__}", "model-family")
    return model


def gammatail_anbn(model, n: int):
    """Closed-form tail sequences ``(a_n, b_n)`` for a gamma-type model."""
    m = _as_gammatail(model)
    if n < 3:
        raise PreconditionError("n >= 3 is needed so that log log n is defined", "loglog")
    al, be, ga, d = m.alpha, m.beta, m.gamma, m.d
    L = math.log(n)
    b_n = be ** (-1 / ga) / ga * L ** (1 / ga - 1)
    a_n = be ** (-1 / ga) * L ** (1 / ga) + b_n * (
        (al + d - ga) / ga * math.log(L)
        - (al + d) / ga * math.log(be)
        - math.log(ga)
        + math.log(m.density_constant * sphere_area(d))
    )
    return a_n, b_n


def gammatail_interpoint_normalization(model, n: int) -> AffineNormalization:
    """Fully collected closed-form diameter normalization, ``d >= 2``."""
    m = _as_gammatail(model)
    if m.d < 2:
        raise PreconditionError("d = 1 uses d1_interpoint_normalization", "dimension")
    if n < 16:
        raise PreconditionError("n >= 16 is needed so that log log log n > 0", "logloglog")
    al, be, ga, d = m.alpha, m.beta, m.gamma, m.d
    c = m.density_constant
    L = math.log(n)
    scale = be ** (-1 / ga) / ga * L ** (1 / ga - 1)
    log_const = (
        math.log(constants(d).c_tilde_d)
        - 2 * (al + d) / ga * math.log(be)
        - (d + 3) / 2 * math.log(ga)
        + 2 * math.log(c)
    )
    bracket = 2 * ga * L + (2 * (al + d) / ga - (d + 3) / 2) * math.log(L) + math.log(math.log(L)) + log_const
    return AffineNormalization(
        center=scale * bracket,
        scale=scale,
        law=GUMBEL,
        statistic=INTERPOINT,
        n=n,
        extras={"scaled_center": bracket, "log_constant": log_const},
    )


def gammatail_g(model):
    """Tail exponent ``g = -log P(|X| > x)`` of a gamma-type model and its derivative.

    The derivative is the radial hazard rate, density over survival.
    """
    m = _as_gammatail(model)

    def g(x):
        return -float(m.log_tail_probability(x))

    def g_prime(x):
        return math.exp(float(m.radial_log_density(x)) - float(m.log_tail_probability(x)))

    return g, g_prime


def general_anbn(g, g_prime, n: int, bracket):
    """Solve ``g(a_n) = log n`` by bisection and set ``b_n = 1/g'(a_n)``."""
    lo, hi = float(bracket[0]), float(bracket[1])
    target = math.log(n)
    glo, ghi = g(lo) - target, g(hi) - target
    if not (glo < 0 < ghi):
        raise PreconditionError(f"bracket [{lo}, {hi}] does not straddle log n", "bracket")
    tol = 1e-12 * max(abs(hi), 1e-300)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if g(mid) < target:
            lo = mid
        else:
            hi = mid
    a_n = 0.5 * (lo + hi)
    slope = g_prime(a_n)
    if not slope > 0:
        raise PreconditionError(f"g'(a_n) = {slope} is not positive", "invalid-derivative")
    return a_n, 1.0 / slope


def norm_max_normalization(model, n: int) -> AffineNormalization:
    """Normalization of the maximum norm ``M_n`` for any supported model."""
    if isinstance(model, (GammaTail, Kotz)):
        a_n, b_n = gammatail_anbn(model, n)
        return AffineNormalization(a_n, b_n, GUMBEL, NORM, n, {"a_n": a_n, "b_n": b_n})
    if isinstance(model, BoundedTail):
        if model.alpha_w == 0:
            raise DegenerateLimitError(
                "max norm has a degenerate limit when alpha_w = 0 (P(M_n = 1) -> 1)", "degenerate-norm-max"
            )
        scale = (model.c_w * n) ** (-1.0 / model.alpha_w)
        return AffineNormalization(1.0, scale, NegWeibull(model.alpha_w), NORM, n)
    if isinstance(model, PowerLaw):
        g_n = frechet_gamma_n(model.c_f, model.alpha_f, n)
        return AffineNormalization(0.0, g_n, Frechet(model.alpha_f), NORM, n, {"gamma_n": g_n})
    raise PreconditionError(f"unsupported model {type(model).__name__}", "model-family")


@dataclass(frozen=True)
class WeibullMapping:
    """Bounded-radius diameter limit.

    ``P(n^p (2 - D) > x) -> exp(-survival_constant * x^shape)`` and
    ``normalization`` maps ``D`` onto ``NegWeibull(shape)``.
    """

    exponent: float
    shape: float
    survival_constant: float
    normalization: AffineNormalization

    def survival(self, x):
        x = np.asarray(x, dtype=float)
        return np.exp(-self.survival_constant * x**self.shape)

    def raw_statistic(self, diameters):
        """``n^p (2 - D)``."""
        return self.normalization.n**self.exponent * (2.0 - np.asarray(diameters, dtype=float))

    def to_dict(self):
        return {
            "exponent": self.exponent,
            "shape": self.shape,
            "survival_constant": self.survival_constant,
            **self.normalization.to_dict(),
        }


def weibull_interpoint_normalization(alpha_w: float, c_w: float, d: int, n: int) -> WeibullMapping:
    if d < 2:
        raise PreconditionError("the Weibull diameter limit needs d >= 2", "dimension")
    if n < 1:
        raise PreconditionError("n must be positive", "sample-size")
    k2 = d - 1 + 4 * alpha_w
    p = 4.0 / k2
    shape = k2 / 2.0
    surv_const = constants(d, alpha_w).c_star * c_w**2
    scale = surv_const ** (-1.0 / shape) * float(n) ** (-p)
    norm = AffineNormalization(2.0, scale, NegWeibull(shape), INTERPOINT, n, {"exponent": p})
    return WeibullMapping(exponent=p, shape=shape, survival_constant=surv_const, normalization=norm)


def frechet_gamma_n(c_f: float, alpha_f: float, n: int) -> float:
    """``gamma_n = (c_f n)^(1/alpha_f)``."""
    if n < 1:
        raise PreconditionError("n must be positive", "sample-size")
    return (c_f * n) ** (1.0 / alpha_f)


def d1_interpoint_normalization(model, n: int) -> AffineNormalization:
    m = _as_gammatail(model)
    if m.d != 1:
        raise PreconditionError("d1_interpoint_normalization needs d = 1", "dimension")
    if n < 16:
        raise PreconditionError("n >= 16 required", "logloglog")
    al, be, ga = m.alpha, m.beta, m.gamma
    c = m.density_constant
    L = math.log(n)
    scale = be ** (-1 / ga) / ga * L ** (1 / ga - 1)
    log_const = -2 * (al + 1) / ga * math.log(be) - 2 * math.log(ga) + 2 * math.log(c)
    bracket = 2 * ga * L + (2 * (al + 1) / ga - 2) * math.log(L) + log_const
    return AffineNormalization(
        center=scale * bracket,
        scale=scale,
        law=GUMBEL_SUM,
        statistic=INTERPOINT,
        n=n,
        extras={"scaled_center": bracket, "log_constant": log_const},
    )


@dataclass(frozen=True)
class ThresholdSet:
    r_n: float
    s_n: float
    threshold: float
    cap: float
    tau_n: float
    lam: float

    def to_dict(self):
        return {"r_n": self.r_n, "s_n": self.s_n, "threshold": self.threshold, "cap": self.cap, "tau_n": self.tau_n}


def rn_sn_threshold(a_n: float, b_n: float, d: int, lam: float = 0.0) -> ThresholdSet:
    """Pair-count threshold ``2a_n - r_n b_n`` and norm cap ``a_n + s_n b_n``."""
    if d < 2:
        raise PreconditionError("pair-count thresholds need d >= 2", "dimension")
    if not (0 < b_n < a_n) or a_n / b_n <= math.e:
        raise PreconditionError("need a_n/b_n > e", "degenerate-ratio")
    r_n = _bracket_term(a_n, b_n, d) - lam
    if not r_n > 1:
        raise PreconditionError(f"r_n = {r_n:.6g} <= 1; sample size too small", "sample-size-too-small")
    s_n = 0.5 * math.log(r_n)
    return ThresholdSet(
        r_n=r_n,
        s_n=s_n,
        threshold=2 * a_n - r_n * b_n,
        cap=a_n + s_n * b_n,
        tau_n=0.5 * (d - 1) * math.log(a_n / b_n),
        lam=lam,
    )


def normalize(model, n: int, lam: float = 0.0) -> dict:
    """Dispatch on the model family and return a JSON-ready description."""
    if isinstance(model, (GammaTail, Kotz)):
        m = _as_gammatail(model)
        if m.d == 1:
            norm = d1_interpoint_normalization(m, n)
            a_n, b_n = gammatail_anbn(m, n)
            extras = {"a_n": a_n, "b_n": b_n}
        else:
            norm = gammatail_interpoint_normalization(m, n)
            a_n, b_n = gammatail_anbn(m, n)
            extras = {"a_n": a_n, "b_n": b_n}
            try:
                extras.update(rn_sn_threshold(a_n, b_n, m.d, lam).to_dict())
            except PreconditionError as exc:
                extras["threshold_error"] = exc.guard
        out = norm.to_dict()
        out["extras"] = {**out["extras"], **extras}
        return out
    if isinstance(model, BoundedTail):
        if model.d < 2:
            raise PreconditionError("bounded models need d >= 2 here", "dimension")
        return weibull_interpoint_normalization(model.alpha_w, model.c_w, model.d, n).to_dict()
    if isinstance(model, PowerLaw):
        g_n = frechet_gamma_n(model.c_f, model.alpha_f, n)
        return {
            "center": 0.0,
            "scale": g_n,
            # no closed form: the limit is the diameter of a Poisson process
            "law": {"law": "poisson_process_diameter", "alpha": model.alpha_f},
            "statistic": INTERPOINT,
            "n": n,
            "extras": {"gamma_n": g_n, "norm_max_law": Frechet(model.alpha_f).to_dict()},
        }
    raise PreconditionError(f"unsupported model {type(model).__name__}", "model-family")
