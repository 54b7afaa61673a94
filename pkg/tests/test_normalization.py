import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maxdist.errors import DegenerateLimitError, PreconditionError
from maxdist.limit_laws import GUMBEL, GUMBEL_SUM, Frechet, NegWeibull
from maxdist.normalization import (
    INTERPOINT,
    NORM,
    AffineNormalization,
    angle_tail_constant,
    constants,
    d1_interpoint_normalization,
    frechet_gamma_n,
    gammatail_anbn,
    gammatail_g,
    gammatail_interpoint_normalization,
    general_anbn,
    gumbel_interpoint_from_anbn,
    norm_max_normalization,
    normalize,
    rn_sn_threshold,
    weibull_interpoint_normalization,
)
from maxdist.radial_models import BoundedTail, GammaTail, Kotz, PowerLaw, normal_model


def test_scale_must_be_positive():
    with pytest.raises(PreconditionError):
        AffineNormalization(0.0, 0.0, GUMBEL, INTERPOINT)


def test_constant_identities():
    for d in range(2, 11):
        k = constants(d)
        assert k.c_tilde_d == pytest.approx(k.c_d * k.omega_d**2, rel=1e-12)
        assert k.c_d == pytest.approx((d - 1) * k.c_dblprime_d / 4, rel=1e-12)
        assert k.c_dblprime_d == pytest.approx(math.gamma((d + 1) / 2) * k.c_prime_d, rel=1e-12)


def test_constant_values_d2():
    k = constants(2, alpha_w=0.0)
    assert k.c_d == pytest.approx(0.25 / math.sqrt(math.pi), abs=1e-15)
    assert k.c_d == pytest.approx(0.1410474, abs=5e-8)
    assert k.c_tilde_d == pytest.approx(math.pi**1.5, abs=1e-12)
    assert k.c_star == pytest.approx(1 / math.pi, abs=1e-15)
    # uniform ball: 4 c*(1, 2) from Gamma(7/2) = 15 sqrt(pi) / 8
    assert 4 * constants(2, alpha_w=1.0).c_star == pytest.approx(0.33953, abs=5e-6)


def test_angle_tail_constant_d2():
    assert angle_tail_constant(2) * math.sqrt(0.01) == pytest.approx(math.sqrt(2) / math.pi * 0.1, rel=1e-14)
    assert angle_tail_constant(3) == pytest.approx(0.5, rel=1e-14)


def test_constants_reject_d1():
    with pytest.raises(PreconditionError):
        constants(1)


def test_interpoint_from_anbn_arithmetic():
    norm = gumbel_interpoint_from_anbn(100.0, 1.0, 2)
    expected = 200 - (0.5 * math.log(100) - math.log(math.log(100)) - math.log(0.25 / math.sqrt(math.pi)))
    assert norm.center == pytest.approx(expected, abs=1e-12)
    assert norm.center == pytest.approx(197.265935, abs=5e-7)
    assert norm.scale == 1.0
    assert norm.law == GUMBEL


@settings(max_examples=50, deadline=None)
@given(a=st.floats(10, 1e4), ratio=st.floats(3, 1e3), d=st.integers(2, 8))
def test_interpoint_from_anbn_scale_is_bn(a, ratio, d):
    b = a / ratio
    norm = gumbel_interpoint_from_anbn(a, b, d)
    assert norm.scale == b
    try:
        r = rn_sn_threshold(a, b, d)
    except PreconditionError as exc:
        assert exc.guard == "sample-size-too-small"
        return
    # at lambda = 0 the pair-count threshold is the diameter centering
    assert r.threshold == pytest.approx(norm.center, rel=1e-13)


def test_interpoint_from_anbn_d1_and_guards():
    norm = gumbel_interpoint_from_anbn(10.0, 1.0, 1)
    assert norm.center == pytest.approx(20 - 2 * math.log(2))
    assert norm.law == GUMBEL_SUM
    with pytest.raises(PreconditionError):
        gumbel_interpoint_from_anbn(2.0, 1.0, 2)  # ratio below e
    with pytest.raises(PreconditionError):
        gumbel_interpoint_from_anbn(1.0, 2.0, 2)


def test_anbn_normal():
    a, b = gammatail_anbn(normal_model(2), 10**6)
    assert b == pytest.approx((2 * math.log(1e6)) ** -0.5, rel=1e-14)
    assert b == pytest.approx(0.190233, abs=1e-5)


def test_anbn_gamma_one_has_constant_bn():
    m = GammaTail(1.5, 2.0, 1.0, 3)
    assert {gammatail_anbn(m, n)[1] for n in (10, 10**4, 10**9)} == {0.5}


def test_anbn_solves_tail_equation():
    m = normal_model(2)
    n = 10**8
    a, _ = gammatail_anbn(m, n)
    assert abs(-float(m.log_tail_probability(a)) - math.log(n)) <= 0.05


def test_general_anbn_closed_form_roots():
    for n in (10**3, 10**6):
        a, b = general_anbn(lambda x: x, lambda x: 1.0, n, (0.0, 100.0))
        assert a == pytest.approx(math.log(n), rel=1e-10)
        assert b == pytest.approx(1.0, rel=1e-12)
        a, b = general_anbn(lambda x: x**3, lambda x: 3 * x**2, n, (0.0, 100.0))
        L = math.log(n)
        assert a == pytest.approx(L ** (1 / 3), rel=1e-10)
        assert b == pytest.approx(L ** (-2 / 3) / 3, rel=1e-9)


def test_general_anbn_agrees_with_closed_form():
    m = normal_model(2)
    n = 10**8
    g, gp = gammatail_g(m)
    a1, b1 = general_anbn(g, gp, n, (0.0, 50.0))
    a2, b2 = gammatail_anbn(m, n)
    assert abs(a1 - a2) / b2 <= 0.05


def test_closed_form_normal_d2():
    n = 10**6
    norm = gammatail_interpoint_normalization(normal_model(2), n)
    L = math.log(n)
    scaled = 4 * L - 0.5 * math.log(L) + math.log(math.log(L)) + math.log(2**-2.5 / math.sqrt(math.pi))
    assert norm.extras["scaled_center"] == pytest.approx(scaled, rel=1e-13)
    assert norm.extras["scaled_center"] == pytest.approx(52.609, abs=5e-4)
    assert norm.scale == pytest.approx(0.1902399, abs=5e-8)
    assert norm.center == pytest.approx(10.008385, abs=5e-7)


def test_closed_form_gap_to_anbn_route():
    # For the d=2 normal the two routes differ by log(1 + log 2 / log log n)
    # in units of the scale; the gap shrinks, slowly, as n grows.
    m = normal_model(2)
    gaps = []
    for n in (10**3, 10**5, 10**8, 10**12, 10**20):
        closed = gammatail_interpoint_normalization(m, n)
        via = gumbel_interpoint_from_anbn(*gammatail_anbn(m, n), 2, n)
        gap = (via.center - closed.center) / closed.scale
        assert gap == pytest.approx(math.log(1 + math.log(2) / math.log(math.log(n))), abs=1e-9)
        gaps.append(gap)
    assert all(x > y for x, y in zip(gaps, gaps[1:]))


def test_kotz_closed_form_reference():
    kappa, b, d = 0.7, 1.8, 3
    m = Kotz(kappa, b, d).resolve()
    for n in (10**3, 10**6, 10**9):
        norm = gammatail_interpoint_normalization(m, n)
        L = math.log(n)
        c = m.density_constant
        const = math.log(constants(d).c_tilde_d * kappa ** (-(4 * b + 2 * d - 4) / 2) * 2 ** (-(d + 3) / 2) * c**2)
        scaled = 4 * L + (4 * b + d - 7) / 2 * math.log(L) + math.log(math.log(L)) + const
        assert norm.extras["scaled_center"] == pytest.approx(scaled, rel=1e-10)
        assert 1 / norm.scale == pytest.approx(math.sqrt(4 * kappa * L), rel=1e-12)


def test_gamma_one_reference_coefficients():
    alpha, beta, d = 1.3, 2.0, 4
    m = GammaTail(alpha, beta, 1.0, d)
    ln1, ln2 = math.log(1e4), math.log(1e8)
    s1 = gammatail_interpoint_normalization(m, 10**4).extras["scaled_center"]
    s2 = gammatail_interpoint_normalization(m, 10**8).extras["scaled_center"]
    llc = lambda L: math.log(math.log(L))
    # remove the 2 log n and log log log n parts; what remains is linear in log log n
    r1 = s1 - 2 * ln1 - llc(ln1)
    r2 = s2 - 2 * ln2 - llc(ln2)
    slope = (r2 - r1) / (math.log(ln2) - math.log(ln1))
    assert slope == pytest.approx((4 * alpha + 3 * d - 3) / 2, rel=1e-10)
    const = r1 - slope * math.log(ln1)
    expect = math.log(constants(d).c_tilde_d * beta ** (-2 * (alpha + d)) * m.density_constant**2)
    assert const == pytest.approx(expect, rel=1e-10)


def test_closed_form_guards():
    with pytest.raises(PreconditionError) as err:
        gammatail_interpoint_normalization(normal_model(2), 2)
    assert err.value.guard == "logloglog"
    with pytest.raises(PreconditionError):
        gammatail_interpoint_normalization(normal_model(1), 1000)
    with pytest.raises(PreconditionError):
        gammatail_anbn(normal_model(2), 2)


def test_norm_max_dispatch():
    g = norm_max_normalization(normal_model(2), 1000)
    assert g.law == GUMBEL and g.statistic == NORM
    w = norm_max_normalization(BoundedTail("uniform-ball", 2), 1000)
    assert w.law == NegWeibull(1.0) and w.center == 1.0
    assert w.scale == pytest.approx(1 / 2000)
    f = norm_max_normalization(PowerLaw(3.0, 1.0, 2), 1000)
    assert f.law == Frechet(3.0) and f.scale == pytest.approx(10.0)
    with pytest.raises(DegenerateLimitError):
        norm_max_normalization(BoundedTail("uniform-sphere", 2), 1000)


def test_weibull_mappings():
    s = weibull_interpoint_normalization(0.0, 1.0, 2, 2000)
    assert s.exponent == 4.0 and s.shape == 0.5
    assert s.survival_constant == pytest.approx(1 / math.pi, rel=1e-14)
    assert s.survival(4.0) == pytest.approx(math.exp(-2 / math.pi))
    b = weibull_interpoint_normalization(1.0, 2.0, 2, 2000)
    assert b.exponent == pytest.approx(0.8) and b.shape == 2.5
    assert b.survival_constant == pytest.approx(0.33953, abs=5e-6)
    # the affine map sends n^p (2 - D) > x onto the NegWeibull tail
    D = 2 - 1.0 / 2000**0.8
    z = b.normalization.standardize(D)
    assert 1 - NegWeibull(2.5).cdf(z) == pytest.approx(1 - b.survival(1.0), rel=1e-12)


def test_frechet_gamma_n():
    assert frechet_gamma_n(1.0, 2.0, 100) == pytest.approx(10.0)
    assert frechet_gamma_n(4.0, 1.0, 25) == pytest.approx(100.0)
    m = PowerLaw(2.5, 3.0, 2)
    n = 5000
    g = frechet_gamma_n(m.c_f, m.alpha_f, n)
    for x in (0.5, 1.0, 3.0):
        assert n * float(m.tail_probability(x * g)) == pytest.approx(x**-2.5, rel=1e-12)


def test_d1_closed_forms():
    n = 10**6
    L = math.log(n)
    norm = d1_interpoint_normalization(normal_model(1), n)
    assert norm.scale == pytest.approx((2 * L) ** -0.5, rel=1e-14)
    assert norm.extras["scaled_center"] == pytest.approx(4 * L - math.log(L) - math.log(4 * math.pi), rel=1e-13)
    assert norm.law == GUMBEL_SUM
    laplace = GammaTail(0.0, 1.0, 1.0, 1)
    norm = d1_interpoint_normalization(laplace, n)
    assert norm.scale == 1.0
    assert norm.center == pytest.approx(2 * L - 2 * math.log(2), rel=1e-14)
    a, b = gammatail_anbn(laplace, n)
    assert a == pytest.approx(L, rel=1e-14) and b == 1.0
    assert gumbel_interpoint_from_anbn(a, b, 1).center == pytest.approx(norm.center, rel=1e-14)


def test_rn_sn_arithmetic():
    t = rn_sn_threshold(100.0, 1.0, 2)
    log_c2 = math.log(0.25 / math.sqrt(math.pi))
    r_n = 0.5 * math.log(100) - math.log(math.log(100)) - log_c2
    assert t.r_n == pytest.approx(r_n, rel=1e-14)
    assert t.r_n == pytest.approx(2.734065, abs=5e-7)
    assert t.s_n == pytest.approx(0.5 * math.log(r_n), rel=1e-14)
    assert t.threshold == pytest.approx(197.265935, abs=5e-7)
    assert t.cap == pytest.approx(100 + 0.5 * math.log(r_n), rel=1e-14)


def test_rn_sn_lambda_shift():
    b = 0.8
    base = rn_sn_threshold(100.0, b, 3, lam=0.0)
    for lam in (0.5, 1.0, 1.7):
        t = rn_sn_threshold(100.0, b, 3, lam=lam)
        assert t.threshold - base.threshold == pytest.approx(lam * b, rel=1e-12)


def test_rn_sn_guard():
    with pytest.raises(PreconditionError) as err:
        rn_sn_threshold(100.0, 1.0, 2, lam=5.0)
    assert err.value.guard == "sample-size-too-small"


def test_normalize_dispatch():
    out = normalize(normal_model(2), 10**6)
    assert out["scale"] == pytest.approx(0.190233, abs=1e-5)
    assert out["law"] == {"law": "gumbel"}
    assert "threshold" in out["extras"]
    sph = normalize(BoundedTail("uniform-sphere", 2), 2000)
    assert sph["exponent"] == 4.0 and sph["survival_constant"] == pytest.approx(1 / math.pi)
    pl = normalize(PowerLaw(3.0, 1.0, 2), 1000)
    assert pl["scale"] == pytest.approx(10.0) and pl["law"]["alpha"] == 3.0
    assert normalize(GammaTail(0.0, 1.0, 1.0, 1), 1000)["law"] == {"law": "gumbel_sum"}
