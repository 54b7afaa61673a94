"""Spherically symmetric models with exact radial laws.

Four families are provided:

``GammaTail``
    density ``c |x|^alpha exp(-beta |x|^gamma)`` on all of R^d. The radius
    has density proportional to ``r^(alpha+d-1) exp(-beta r^gamma)`` so
    ``beta R^gamma`` is Gamma((alpha+d)/gamma) distributed.
``Kotz``
    the Kotz family, an alias for ``GammaTail(2(b-1), kappa, 2, d)``.
``BoundedTail``
    radius in [0, 1] with ``P(|X| > x) ~ c_w (1-x)^alpha_w`` as x -> 1.
``PowerLaw``
    Pareto radius, ``P(|X| > x) = c_f x^(-alpha_f)`` above ``c_f^(1/alpha_f)``.

Directions are always uniform on the unit sphere and independent of the
radius.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy import special

from .errors import PreconditionError
from .rng import as_stream

BOUNDED_KINDS = ("pure-weibull-radius", "uniform-ball", "uniform-sphere")


def sphere_area(d: int) -> float:
    """Surface area of the unit sphere in R^d, ``2 pi^(d/2) / Gamma(d/2)``."""
    return 2.0 * math.pi ** (d / 2) / math.gamma(d / 2)


def _check_dimension(d):
    if not isinstance(d, (int, np.integer)) or isinstance(d, bool) or d < 1:
        raise PreconditionError(f"dimension must be a positive integer, got {d!r}", "invalid-dimension")


@dataclass(frozen=True)
class GammaTail:
    alpha: float
    beta: float
    gamma: float
    d: int

    def __post_init__(self):
        _check_dimension(self.d)
        if not self.beta > 0:
            raise PreconditionError(f"beta must be positive, got {self.beta}", "invalid-parameter")
        if not self.gamma > 0:
            raise PreconditionError(f"gamma must be positive, got {self.gamma}", "invalid-parameter")
        if not self.alpha + self.d > 0:
            raise PreconditionError("alpha + d must be positive", "invalid-parameter")

    @property
    def shape(self) -> float:
        """Shape of the gamma law of ``beta R^gamma``."""
        return (self.alpha + self.d) / self.gamma

    @property
    def density_constant(self) -> float:
        """The constant ``c`` making ``c |x|^alpha exp(-beta |x|^gamma)`` a density."""
        log_c = (
            math.log(self.gamma)
            + self.shape * math.log(self.beta)
            + math.lgamma(self.d / 2)
            - math.log(2.0)
            - (self.d / 2) * math.log(math.pi)
            - math.lgamma(self.shape)
        )
        return math.exp(log_c)

    def resolve(self) -> "GammaTail":
        return self

    def tail_probability(self, x):
        x = _check_x(x)
        return special.gammaincc(self.shape, self.beta * x**self.gamma)

    def log_tail_probability(self, x):
        """``log P(|X| > x)``; finite well past where the tail underflows."""
        x = _check_x(x)
        z = self.beta * np.asarray(x, dtype=float) ** self.gamma
        q = special.gammaincc(self.shape, z)
        with np.errstate(divide="ignore"):
            out = np.log(q)
        # continued-fraction leading term, used once Q underflows
        tiny = q < 1e-280
        if np.any(tiny):
            zt = z[tiny] if np.ndim(z) else z
            approx = (self.shape - 1) * np.log(zt) - zt - math.lgamma(self.shape) - np.log1p(-(self.shape - 1) / zt)
            if np.ndim(out):
                out[tiny] = approx
            else:
                out = approx
        return out

    def radial_log_density(self, x):
        """Log density of ``|X|`` at ``x > 0``."""
        x = np.asarray(x, dtype=float)
        s = self.shape
        return (
            math.log(self.gamma)
            + s * math.log(self.beta)
            + (self.alpha + self.d - 1) * np.log(x)
            - self.beta * x**self.gamma
            - math.lgamma(s)
        )

    def sample_radius(self, rng, size=None):
        rng = as_stream(rng)
        g = rng.standard_gamma(self.shape, size=size)
        return (g / self.beta) ** (1.0 / self.gamma)

    def to_dict(self):
        return {"family": "gamma_tail", "d": self.d, "alpha": self.alpha, "beta": self.beta, "gamma": self.gamma}


@dataclass(frozen=True)
class Kotz:
    kappa: float
    b: float
    d: int

    def __post_init__(self):
        _check_dimension(self.d)
        if not self.kappa > 0:
            raise PreconditionError(f"kappa must be positive, got {self.kappa}", "invalid-parameter")
        if not self.d / 2 + self.b - 1 > 0:
            raise PreconditionError("Kotz requires d/2 + b - 1 > 0", "invalid-parameter")

    def resolve(self) -> GammaTail:
        return GammaTail(alpha=2.0 * (self.b - 1.0), beta=self.kappa, gamma=2.0, d=self.d)

    @property
    def density_constant(self) -> float:
        return self.resolve().density_constant

    def tail_probability(self, x):
        return self.resolve().tail_probability(x)

    def log_tail_probability(self, x):
        return self.resolve().log_tail_probability(x)

    def sample_radius(self, rng, size=None):
        return self.resolve().sample_radius(rng, size)

    def to_dict(self):
        return {"family": "kotz", "d": self.d, "kappa": self.kappa, "b": self.b}


@dataclass(frozen=True)
class BoundedTail:
    """Radius supported in [0, 1].

    ``kind`` fixes the global law: ``pure-weibull-radius`` has survival
    exactly ``(1-x)^alpha_w`` (so ``c_w = 1``), ``uniform-ball`` is uniform
    in the unit ball (``alpha_w = 1``, ``c_w = d``) and ``uniform-sphere``
    is uniform on the unit sphere (``alpha_w = 0``, ``c_w = 1``). Omitted
    tail parameters are filled in from the kind; inconsistent ones are
    rejected.
    """

    kind: str
    d: int
    alpha_w: float = None
    c_w: float = None

    def __post_init__(self):
        _check_dimension(self.d)
        kind = self.kind.replace("_", "-")
        if kind not in BOUNDED_KINDS:
            raise PreconditionError(f"unknown bounded kind {self.kind!r}", "invalid-parameter")
        object.__setattr__(self, "kind", kind)
        if kind == "pure-weibull-radius":
            if self.alpha_w is None or self.alpha_w < 0:
                raise PreconditionError("pure-weibull-radius needs alpha_w >= 0", "invalid-parameter")
            expected = (float(self.alpha_w), 1.0)
        elif kind == "uniform-ball":
            expected = (1.0, float(self.d))
        else:
            expected = (0.0, 1.0)
        for name, given, want in zip(("alpha_w", "c_w"), (self.alpha_w, self.c_w), expected):
            if given is not None and not math.isclose(given, want, rel_tol=1e-12, abs_tol=1e-15):
                raise PreconditionError(f"{kind} requires {name}={want}, got {given}", "invalid-parameter")
        object.__setattr__(self, "alpha_w", expected[0])
        object.__setattr__(self, "c_w", expected[1])

    def resolve(self):
        return self

    def tail_probability(self, x):
        x = _check_x(x)
        xa = np.asarray(x, dtype=float)
        if self.kind == "uniform-sphere":
            out = (xa < 1.0).astype(float)
        elif self.kind == "uniform-ball":
            out = np.where(xa < 1.0, 1.0 - np.minimum(xa, 1.0) ** self.d, 0.0)
        else:
            base = np.clip(1.0 - xa, 0.0, 1.0)
            out = np.where(xa < 1.0, base**self.alpha_w, 0.0)
        return out if np.ndim(out) else float(out)

    def sample_radius(self, rng, size=None):
        rng = as_stream(rng)
        if self.kind == "uniform-sphere" or self.alpha_w == 0:
            return np.ones(size) if size is not None else 1.0
        u = 1.0 - rng.random(size)  # (0, 1]
        if self.kind == "uniform-ball":
            return u ** (1.0 / self.d)
        return 1.0 - u ** (1.0 / self.alpha_w)

    def to_dict(self):
        return {"family": "bounded", "d": self.d, "kind": self.kind, "alpha_w": self.alpha_w, "c_w": self.c_w}


@dataclass(frozen=True)
class PowerLaw:
    alpha_f: float
    c_f: float
    d: int

    def __post_init__(self):
        _check_dimension(self.d)
        if not self.alpha_f > 0 or not self.c_f > 0:
            raise PreconditionError("power law needs alpha_f > 0 and c_f > 0", "invalid-parameter")

    @property
    def r_min(self) -> float:
        return self.c_f ** (1.0 / self.alpha_f)

    def resolve(self):
        return self

    def tail_probability(self, x):
        x = _check_x(x)
        xa = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            out = np.minimum(1.0, self.c_f * xa ** (-self.alpha_f))
        return out if np.ndim(out) else float(out)

    def sample_radius(self, rng, size=None):
        rng = as_stream(rng)
        u = 1.0 - rng.random(size)
        return self.r_min * u ** (-1.0 / self.alpha_f)

    def to_dict(self):
        return {"family": "power_law", "d": self.d, "alpha_f": self.alpha_f, "c_f": self.c_f}


SphericalModel = Union[GammaTail, Kotz, BoundedTail, PowerLaw]


def normal_model(d: int) -> GammaTail:
    """Standard normal law in R^d."""
    return GammaTail(alpha=0.0, beta=0.5, gamma=2.0, d=d)


def _check_x(x):
    if np.any(np.asarray(x) < 0):
        raise PreconditionError("tail probability needs x >= 0", "domain")
    return x


@dataclass
class PointCloud:
    """``n`` points in R^d with their Euclidean norms cached."""

    coordinates: np.ndarray
    norms: np.ndarray = field(default=None)

    def __post_init__(self):
        coords = np.ascontiguousarray(self.coordinates, dtype=float)
        if coords.ndim == 1:
            coords = coords[:, None]
        if coords.ndim != 2:
            raise PreconditionError("coordinates must be an n x d array", "invalid-shape")
        self.coordinates = coords
        if self.norms is None:
            self.norms = np.sqrt(np.einsum("ij,ij->i", coords, coords))
        else:
            self.norms = np.ascontiguousarray(self.norms, dtype=float)

    @property
    def n(self) -> int:
        return self.coordinates.shape[0]

    @property
    def d(self) -> int:
        return self.coordinates.shape[1]


def sample_direction(d: int, rng, size=None) -> np.ndarray:
    """Uniform point(s) on the unit sphere S^(d-1).

    With ``size=None`` a single vector of shape ``(d,)`` is returned,
    otherwise an array of shape ``(size, d)``.
    """
    _check_dimension(d)
    rng = as_stream(rng)
    m = 1 if size is None else int(size)
    z = rng.standard_normal((m, d))
    r = np.sqrt(np.einsum("ij,ij->i", z, z))
    bad = r == 0.0
    while np.any(bad):  # measure-zero event, redraw those rows
        z[bad] = rng.standard_normal((int(bad.sum()), d))
        r[bad] = np.sqrt(np.einsum("ij,ij->i", z[bad], z[bad]))
        bad = r == 0.0
    u = z / r[:, None]
    return u[0] if size is None else u


def sample_radius(model: SphericalModel, rng, size=None):
    return model.sample_radius(rng, size)


def sample_points(model: SphericalModel, n: int, rng) -> PointCloud:
    """Draw ``n`` i.i.d. points: radius times an independent uniform direction."""
    if n < 1:
        raise PreconditionError("sample_points needs n >= 1", "empty-sample")
    rng = as_stream(rng)
    r = np.asarray(model.sample_radius(rng, n), dtype=float)
    u = sample_direction(model.d, rng, n)
    return PointCloud(u * r[:, None])


def tail_probability(model: SphericalModel, x):
    """Exact ``P(|X| > x)``."""
    return model.tail_probability(x)


_FAMILIES = {
    "gamma_tail": (GammaTail, ("alpha", "beta", "gamma")),
    "kotz": (Kotz, ("kappa", "b")),
    "bounded": (BoundedTail, ("kind", "alpha_w", "c_w")),
    "power_law": (PowerLaw, ("alpha_f", "c_f")),
}


def model_from_dict(spec: dict) -> SphericalModel:
    """Build a model from its JSON object form, e.g.
    ``{"family": "gamma_tail", "d": 2, "alpha": 0, "beta": 0.5, "gamma": 2}``.
    """
    if not isinstance(spec, dict):
        raise PreconditionError("model specification must be a JSON object", "config")
    family = spec.get("family")
    if family not in _FAMILIES:
        raise PreconditionError(f"unknown model family {family!r}", "config")
    cls, names = _FAMILIES[family]
    if "d" not in spec:
        raise PreconditionError("model specification needs 'd'", "config")
    unknown = set(spec) - set(names) - {"family", "d"}
    if unknown:
        raise PreconditionError(f"unknown fields for {family}: {sorted(unknown)}", "config")
    kwargs = {k: spec[k] for k in names if k in spec}
    try:
        return cls(d=spec["d"], **kwargs)
    except TypeError as exc:
        raise PreconditionError(f"bad parameters for {family}: {exc}", "config") from exc


def model_from_json(text: str) -> SphericalModel:
    return model_from_dict(json.loads(text))
