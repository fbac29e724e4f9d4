import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ffgamma.errors import DomainError
from ffgamma.ffpoly import Poly, enumerate_monics, field, gcd, parse_poly
from ffgamma.laurent import ETA_INV, THETA_INV, LaurentSeries, theta
from ffgamma.special_values import (
    RationalArg,
    carlitz_exp,
    carlitz_exp_coeffs,
    carlitz_period,
    gamma,
    gamma_eta,
    gamma_partial,
    gamma_partial_bruteforce,
    gamma_slice,
    gamma_slice_bruteforce,
    gauss_arguments,
    gauss_product,
    reflection_product,
    simplest_case_sides,
    slice_valuation_bound,
)


def Z(a, f, q):
    F = field(q)
    return RationalArg.of(parse_poly(a, F), parse_poly(f, F))


def rational(num, den, prec, var=THETA_INV):
    return LaurentSeries.from_rational(num, den, var, prec)


# -- the slice identity against explicit products ---------------------------------------


CASES = [
    (2, "1", "t"), (2, "t", "t^2+t+1"), (2, "t^3+1", "t"),
    (3, "1", "t"), (3, "t+1", "t^2+1"), (3, "t^2+1", "t"), (3, "2", "t^2+2*t"),
    (4, "(g)", "t"), (4, "t+(g)", "t^2+t"),
    (5, "1", "t"), (5, "3*t", "t^2+2"),
]


@pytest.mark.parametrize("q,a,f", CASES)
def test_slices_match_bruteforce(q, a, f):
    z = Z(a, f, q)
    for N in range(0, 4 if q <= 4 else 3):
        assert gamma_slice(z, N, 50).eq_to_precision(gamma_slice_bruteforce(z, N, 50), 50)


@pytest.mark.parametrize("q,a,f", CASES)
def test_slice_valuation_bound(q, a, f):
    z = Z(a, f, q)
    for N in range(1, 4):
        s = gamma_slice(z, N, 200) - LaurentSeries.one(z.field, THETA_INV)
        if not s.is_zero():
            assert s.valuation() >= slice_valuation_bound(q, N, z.valuation())


def test_partial_with_single_factor():
    F = field(3)
    z = Z("t+1", "t^2+1", 3)
    expected = rational(z.den, z.num, 40) * rational(z.den, z.num + z.den, 40)
    got = gamma_partial(z, 0, 30)
    assert got.eq_to_precision(expected, got.abs_prec)
    assert F.q == 3


def test_partial_q3_degree_one_explicit():
    F = field(3)
    t = Poly.t(F)
    z = Z("1", "t", 3)
    acc = LaurentSeries.from_poly(t)
    for n in [Poly.one(F)] + list(enumerate_monics(F, 1)):
        acc = acc * rational(t * n, t * n + Poly.one(F), 40)
    got = gamma_partial(z, 1, 30)
    assert got.eq_to_precision(acc, got.abs_prec)


@pytest.mark.parametrize("q,a,f", CASES[:8])
def test_partial_matches_bruteforce(q, a, f):
    z = Z(a, f, q)
    D = 3 if q <= 3 else 2
    fast, slow = gamma_partial(z, D, 40), gamma_partial_bruteforce(z, D, 40)
    assert fast.eq_to_precision(slow, fast.abs_prec)


@pytest.mark.parametrize("q,a,f", [(2, "1", "t"), (3, "1", "t"), (2, "t+1", "t^2+t+1")])
def test_adaptive_cutoff_against_larger_cutoff(q, a, f):
    z = Z(a, f, q)
    g = gamma(z, 24)
    later = gamma_partial(z, g.cutoff_degree + 2, 24)
    assert g.series.eq_to_precision(later, g.series.abs_prec)
    assert g.stabilized_at == g.cutoff_degree - 2
    base = gamma_partial(z, g.stabilized_at, 24)
    nxt = gamma_partial(z, g.stabilized_at + 1, 24)
    assert base.eq_to_precision(nxt, g.series.abs_prec)


def test_gamma_precision_coherence():
    z = Z("1", "t", 3)
    lo, hi = gamma(z, 64).series, gamma(z, 128).series
    assert lo.eq_to_precision(hi, lo.abs_prec)
    assert lo.prec == 64


@pytest.mark.parametrize("a,f", [("0", "t"), ("2", "1"), ("2*t+2", "1"), ("2*t^2+t", "t")])
def test_poles_rejected(a, f):
    with pytest.raises(DomainError):
        gamma(Z(a, f, 3), 10)


def test_pole_message_names_n():
    with pytest.raises(DomainError, match=r"t\+1"):
        gamma(Z("2*t+2", "1", 3), 10)


def test_integral_non_pole_arguments_allowed():
    z = Z("t", "1", 3)
    g = gamma(z, 20)
    slow = gamma_partial_bruteforce(z, g.cutoff_degree, 30)
    assert g.series.eq_to_precision(slow, g.series.abs_prec)


@pytest.mark.parametrize("q", [2, 3, 5])
def test_leading_term_law(q):
    F = field(q)
    rng = random.Random(q)
    for _ in range(10):
        f = Poly(F, [rng.randrange(q) for _ in range(rng.randint(1, 3))] + [1])
        a = Poly(F, [rng.randrange(q) for _ in range(rng.randint(1, 5))]) % f
        if a.is_zero() or gcd(a, f).degree or f.degree < 1:
            continue
        z = RationalArg.of(a, f)
        s = gamma(z, 8).series * z.series(20)
        assert s.valuation() == 0 and s.leading_coeff() == 1


def test_translation_ratio_is_the_finite_product():
    """Gamma(z+a)/Gamma(z) = z/(z+a) prod_{deg n <= deg a} (n+z)/(n+a+z)."""
    F = field(3)
    f, a = parse_poly("t^2+1", F), parse_poly("t", F)
    for b in ("1", "t", "2*t+1"):
        shift = parse_poly(b, F)
        z0, z1 = RationalArg.of(a, f), RationalArg.of(a + shift * f, f)
        num, den = a, a + shift * f
        for d in range(shift.degree + 1):
            for n in enumerate_monics(F, d):
                num = num * (n * f + a)
                den = den * (n * f + a + shift * f)
        oracle = rational(num, den, 60)
        ratio = gamma(z1, 60).series * gamma(z0, 60).series.inverse()
        assert ratio.eq_to_precision(oracle, min(ratio.abs_prec, oracle.abs_prec))


# -- the Carlitz period and exponential ------------------------------------------------


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7])
def test_period_valuation(q):
    assert carlitz_period(field(q), 40).valuation() == -q


def test_period_q2_first_terms():
    # theta*eta*(1 - 1/theta)^-1 ... ; for q = 2, eta = theta
    pi = carlitz_period(field(2), 6)
    assert pi.terms() == [(-2, 1), (-1, 1), (0, 1)]


def test_period_precision_coherence():
    F = field(3)
    lo, hi = carlitz_period(F, 64), carlitz_period(F, 128)
    assert lo.eq_to_precision(hi, lo.abs_prec)


def test_exp_coefficients():
    F = field(3)
    t = Poly.t(F)
    c = carlitz_exp_coeffs(F, 4, 40)
    assert c[0] == LaurentSeries.one(F, THETA_INV, 40)
    c1 = rational(Poly.one(F), t**3 - t, 3 + 40)
    assert c[1].eq_to_precision(c1, c[1].abs_prec)
    for i in range(1, 4):
        # c_i (theta^(q^i) - theta) = c_{i-1}^q
        lhs = c[i] * LaurentSeries.from_poly(t ** (3**i) - t)
        rhs = c[i - 1] ** 3
        assert lhs.eq_to_precision(rhs, min(lhs.abs_prec, rhs.abs_prec))


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_exp_kills_period_multiples(q):
    F = field(q)
    pi = carlitz_period(F, 120)
    for c in F.units():
        e = carlitz_exp(pi.scale(c))
        assert e.is_zero() and e.abs_prec >= pi.valuation() + 120


def test_exp_of_zero_and_small_input():
    F = field(3)
    zero = LaurentSeries.zero(F, THETA_INV, 20)
    assert carlitz_exp(zero).is_zero()
    z = LaurentSeries(F, THETA_INV, 5, [1, 2, 1], 30)
    e = carlitz_exp(z)
    assert e.valuation() == 5 and e.leading_coeff() == 1


@pytest.mark.parametrize("q", [2, 3, 4])
@settings(max_examples=20, deadline=None)
@given(data=st.data())
def test_exp_functional_equation(q, data):
    F = field(q)
    v = data.draw(st.integers(-2, 4))
    cs = [data.draw(st.integers(1, q - 1))] + data.draw(st.lists(st.integers(0, q - 1), min_size=30, max_size=30))
    z = LaurentSeries(F, THETA_INV, v, cs, v + 31)
    th = theta(F, THETA_INV)
    lhs = carlitz_exp(th * z)
    e = carlitz_exp(z)
    rhs = th * e + e**q
    assert lhs.eq_to_precision(rhs, min(lhs.abs_prec, rhs.abs_prec))


# -- functional-equation products ------------------------------------------------------


def test_reflection_product_q2_single_factor():
    z = Z("t+1", "t^2+t+1", 2)
    assert reflection_product(z, 30) == gamma(z, 30).series


@pytest.mark.parametrize("q,a,f", [(3, "1", "t"), (3, "t+1", "t^2+1"), (5, "2", "t"), (4, "(g)", "t^2+t")])
def test_reflection_formula(q, a, f):
    """prod_c Gamma(c z) = -pi z^(2-q) / e_C(pi z)."""
    F = field(q)
    z = Z(a, f, q)
    lhs = reflection_product(z, 60).embed_theta_to_eta()
    pi = carlitz_period(F, 70)
    zs = z.series(80).embed_theta_to_eta()
    ec = carlitz_exp((pi * zs).truncate_rel(70))
    rhs = (pi * (zs ** (q - 2)).inverse() * ec.inverse()).scale(F.neg(1))
    assert lhs.eq_to_precision(rhs, min(lhs.abs_prec, rhs.abs_prec))


def test_reflection_invariance():
    z = Z("t+1", "t^2+1", 3)
    assert reflection_product(z, 30) == reflection_product(z.scaled(2), 30)


def test_gauss_arguments():
    z = Z("1", "t", 3)
    args = gauss_arguments(z, parse_poly("t", field(3)))
    assert [str(a) for a in args] == ["1/t^2", "t+1/t^2", "2*t+1/t^2"]
    assert len(gauss_arguments(z, parse_poly("t^2+1", field(3)))) == 9


def test_gauss_product_series():
    F = field(3)
    z, g = Z("1", "t", 3), parse_poly("t", F)
    prod = gauss_product(z, g, 30)
    direct = LaurentSeries.one(F, THETA_INV)
    for arg in gauss_arguments(z, g):
        direct = direct * gamma(arg, 30).series
    assert prod == direct


def test_gamma_eta_is_embedding():
    z = Z("1", "t", 3)
    g = gamma_eta(z, 40)
    assert g.var == ETA_INV and g.prec == 40
    assert g.valuation() == -2


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7])
def test_simplest_case_identity(q):
    lhs, rhs = simplest_case_sides(field(q), 60)
    n = min(lhs.abs_prec, rhs.abs_prec)
    assert n - lhs.valuation() >= 55 and lhs.eq_to_precision(rhs, n)
