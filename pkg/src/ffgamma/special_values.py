"""Truncated-series values of the Thakur Gamma function, the Carlitz period and exponential.

Gamma is evaluated from its defining product one degree at a time.  The
product over all monic n of degree N has the closed form

    prod_{deg n = N} (1 + x/n) = 1 + e_N(x) / D_N,
    e_N(x) / D_N = sum_{i=0}^{N} (-1)^(N-i) x^(q^i) / (D_i L_{N-i}^(q^i)),

with D_i = prod_{j=1}^{i} [j]^(q^(i-j)), L_k = prod_{j=1}^{k} [j] and
[j] = theta^(q^j) - theta.  Every factor 1/[j] is the 0/1 series
sum_k w^(q^j + k(q^j - 1)) in w = 1/theta, so a slice costs a handful of
sparse convolutions instead of q^N factors.  The brute-force product over
:func:`ffpoly.enumerate_monics` remains available as the test oracle.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

from .errors import DomainError, NonConvergenceError, PrecisionError
from .ffpoly import GF, Poly, enumerate_monics, gcd
from .laurent import ETA_INV, THETA_INV, LaurentSeries, theta

DEFAULT_MAX_CUTOFF = 40
EXP_INDEX_CEILING = 64


@dataclass(frozen=True)
class RationalArg:
    """A point a/f of k, stored reduced with monic denominator."""

    num: Poly
    den: Poly

    @classmethod
    def of(cls, num: Poly, den: Poly | None = None) -> RationalArg:
        fld = num.field
        den = Poly.one(fld) if den is None else den
        if den.is_zero():
            raise DomainError("zero denominator")
        g = gcd(num, den) if not num.is_zero() else den.monic()
        num, den = num // g, den // g
        c = fld.inv(den.lc)
        return cls(num.scale(c), den.scale(c))

    @property
    def field(self) -> GF:
        return self.num.field

    def is_integral(self) -> bool:
        """True when the argument lies in A (denominator 1 after reduction)."""
        return self.den.degree == 0

    def pole(self) -> Poly | None:
        """The monic n with z = -n (or zero) when z is a pole, else None."""
        if not self.is_integral():
            return None
        if self.num.is_zero():
            return self.num
        n = -self.num
        return n if n.is_monic() else None

    def valuation(self) -> int:
        """Valuation in 1/theta (minus the degree of z)."""
        if self.num.is_zero():
            raise DomainError("zero has no valuation")
        return self.den.degree - self.num.degree

    def scaled(self, c: int) -> RationalArg:
        return RationalArg.of(self.num.scale(c), self.den)

    def series(self, abs_prec: int) -> LaurentSeries:
        return LaurentSeries.from_rational(self.num, self.den, THETA_INV, abs_prec)

    def __str__(self):
        return f"{self.num}/{self.den}"


@dataclass(frozen=True)
class GammaValue:
    arg: RationalArg
    series: LaurentSeries
    cutoff_degree: int
    stabilized_at: int

    def to_json(self) -> dict:
        out = self.series.to_json()
        out.update({"arg": str(self.arg), "cutoff": self.cutoff_degree, "stabilized_at": self.stabilized_at})
        return out


@dataclass(frozen=True)
class CarlitzData:
    period: LaurentSeries
    exp_coeffs: tuple


# ---------------------------------------------------------------------------
# building blocks
# ---------------------------------------------------------------------------


@functools.lru_cache(maxsize=4096)
def _inv_bracket_power(fld: GF, j: int, m: int, abs_prec: int) -> LaurentSeries:
    """(1/[j])^(q^m) in 1/theta, known below abs_prec."""
    q = fld.q
    qj = q**j
    step, first = q**m * (qj - 1), q**m * qj
    if first >= abs_prec:
        return LaurentSeries.zero(fld, THETA_INV, abs_prec)
    n = (abs_prec - 1 - first) // step + 1
    dense = [0] * ((n - 1) * step + 1)
    dense[::step] = [1] * n
    return LaurentSeries(fld, THETA_INV, first, dense, abs_prec)


def _bracket_product(fld: GF, factors: list[tuple[int, int]], abs_prec: int) -> LaurentSeries:
    """prod (1/[j])^(q^m) over (j, m), known below abs_prec."""
    q = fld.q
    total = sum(q**m * q**j for j, m in factors)
    acc = LaurentSeries.one(fld, THETA_INV)
    for j, m in factors:
        need = abs_prec - total + q**m * q**j
        acc = acc * _inv_bracket_power(fld, j, m, max(need, q**m * q**j + 1))
    return acc.truncate(abs_prec) if acc.abs_prec >= abs_prec else acc


def _slice_coeff_factors(N: int, i: int) -> list[tuple[int, int]]:
    """(j, m) pairs for 1/(D_i L_{N-i}^(q^i))."""
    return [(j, i - j) for j in range(1, i + 1)] + [(j, i) for j in range(1, N - i + 1)]


def _slice_coeff_valuation(q: int, N: int, i: int) -> int:
    return i * q**i + q**i * sum(q**j for j in range(1, N - i + 1))


def slice_valuation_bound(q: int, N: int, vz: int) -> int:
    """Lower bound for the 1/theta valuation of prod_{deg n = N}(1 + z/n) - 1."""
    return min(_slice_coeff_valuation(q, N, i) + q**i * vz for i in range(N + 1))


def gamma_slice(z: RationalArg, N: int, abs_prec: int) -> LaurentSeries:
    """prod over monic n of degree N of (1 + z/n), known below abs_prec."""
    fld = z.field
    q = fld.q
    if z.num.is_zero():
        return LaurentSeries.one(fld, THETA_INV, abs_prec)
    vz = z.valuation()
    pz = max(abs_prec, vz + abs_prec)
    zs = z.series(pz)
    acc = LaurentSeries.one(fld, THETA_INV, abs_prec)
    minus_one = fld.neg(1)
    for i in range(N + 1):
        c_val = _slice_coeff_valuation(q, N, i)
        if c_val + q**i * vz >= abs_prec:
            continue
        coeff = _bracket_product(fld, _slice_coeff_factors(N, i), abs_prec - q**i * vz)
        term = zs.qth_power(i) * coeff
        if (N - i) % 2:
            term = term.scale(minus_one)
        acc = acc + term
    return acc


def gamma_slice_bruteforce(z: RationalArg, N: int, abs_prec: int) -> LaurentSeries:
    """Oracle: the same slice as an explicit product over all q^N monics."""
    fld = z.field
    acc = LaurentSeries.one(fld, THETA_INV)
    for n in enumerate_monics(fld, N):
        factor = RationalArg.of(z.num + z.den * n, z.den * n)
        acc = acc * factor.series(abs_prec + max(0, -factor.valuation()))
    return acc.truncate(abs_prec)


def _check_pole(z: RationalArg) -> None:
    n = z.pole()
    if n is not None:
        if n.is_zero():
            raise DomainError("Gamma has a pole at 0")
        raise DomainError(f"Gamma has a pole at -n for the monic n = {n}")


# ---------------------------------------------------------------------------
# Gamma
# ---------------------------------------------------------------------------


def _gamma_from_product(z: RationalArg, prod: LaurentSeries, abs_prec: int) -> LaurentSeries:
    zinv = LaurentSeries.from_rational(z.den, z.num, THETA_INV, abs_prec)
    return zinv * prod.inverse()


def gamma_partial(z: RationalArg, D: int, prec: int) -> LaurentSeries:
    """(1/z) prod_{n monic, deg n <= D} (1 + z/n)^-1 to relative precision prec."""
    _check_pole(z)
    if prec < 1:
        raise DomainError("precision must be positive")
    extra = 0
    while True:
        W = prec + extra + max(0, -z.valuation())
        prod = LaurentSeries.one(z.field, THETA_INV, W)
        for N in range(D + 1):
            prod = prod * gamma_slice(z, N, W)
        g = _gamma_from_product(z, prod, W - z.valuation())
        if g.prec >= prec:
            return g.truncate_rel(prec)
        extra += prec - g.prec + 4


def gamma_partial_bruteforce(z: RationalArg, D: int, prec: int) -> LaurentSeries:
    """Oracle for :func:`gamma_partial` that enumerates every monic factor."""
    _check_pole(z)
    W = prec + 2 * abs(z.valuation()) + 4
    prod = LaurentSeries.one(z.field, THETA_INV, W)
    for N in range(D + 1):
        prod = prod * gamma_slice_bruteforce(z, N, W)
    return _gamma_from_product(z, prod, W).truncate_rel(prec)


@functools.lru_cache(maxsize=1024)
def gamma(z: RationalArg, prec: int, max_cutoff: int = DEFAULT_MAX_CUTOFF) -> GammaValue:
    """Gamma(z) with adaptive cutoff.

    The cutoff D grows until the partial products at D, D+1 and D+2 agree
    to the requested precision; the slice valuation bound then certifies
    that no later slice can change a retained coefficient.
    """
    _check_pole(z)
    if prec < 1:
        raise DomainError("precision must be positive")
    fld = z.field
    q = fld.q
    vz = z.valuation()
    extra = 0
    while True:
        W = prec + extra + max(0, -vz)
        prod = LaurentSeries.one(fld, THETA_INV, W)
        partials: list[LaurentSeries] = []
        D = 0
        while True:
            if D > max_cutoff:
                raise NonConvergenceError(f"Gamma({z}) did not stabilize below cutoff {max_cutoff}")
            prod = prod * gamma_slice(z, D, W)
            partials.append(_gamma_from_product(z, prod, W - vz))
            if len(partials) >= 3:
                a, b, c = partials[-3:]
                n = min(a.abs_prec, b.abs_prec, c.abs_prec)
                if (
                    a.eq_to_precision(b, n)
                    and b.eq_to_precision(c, n)
                    and D >= -vz
                    and slice_valuation_bound(q, D + 1, vz) >= W
                ):
                    break
            D += 1
        g = partials[-1]
        if not g.is_zero() and g.prec >= prec:
            return GammaValue(z, g.truncate_rel(prec), D, D - 2)
        extra += prec - (0 if g.is_zero() else g.prec) + 4


def gamma_eta(z: RationalArg, prec: int) -> LaurentSeries:
    """Gamma(z) in 1/eta with relative precision prec."""
    e = z.field.q - 1
    return gamma(z, -(-prec // e)).series.embed_theta_to_eta().truncate_rel(prec)


def leading_law(z: RationalArg, prec: int = 8) -> LaurentSeries:
    """Gamma(z) * z, which is 1 + O(1/theta)."""
    g = gamma(z, prec).series
    return g * z.series(g.abs_prec + prec)


# ---------------------------------------------------------------------------
# Carlitz period and exponential
# ---------------------------------------------------------------------------


def _period_product(fld: GF, abs_prec: int) -> LaurentSeries:
    """prod_{i>=1} (1 - w^(q^i - 1))^-1 in the uniformizer, known below abs_prec."""
    q = fld.q
    acc = LaurentSeries.one(fld, THETA_INV, abs_prec)
    i = 1
    while q**i - 1 < abs_prec:
        step = q**i - 1
        n = (abs_prec - 1) // step + 1
        dense = [0] * ((n - 1) * step + 1)
        dense[::step] = [1] * n
        acc = acc * LaurentSeries(fld, THETA_INV, 0, dense, abs_prec)
        i += 1
    return acc


@functools.lru_cache(maxsize=64)
def carlitz_period(fld: GF, prec: int) -> LaurentSeries:
    """The Carlitz period theta * eta * prod (1 - theta^(1-q^i))^-1 in 1/eta.

    eta is the fixed root with eta^(q-1) = -theta, so theta*eta = -eta^q and
    the valuation is -q.  ``prec`` is the relative precision in 1/eta.
    """
    if prec < 1:
        raise DomainError("precision must be positive")
    e = fld.q - 1
    prod = _period_product(fld, -(-prec // e)).embed_theta_to_eta()
    lead = LaurentSeries.monomial(fld, ETA_INV, -fld.q, fld.neg(1))
    return (lead * prod).truncate_rel(prec)


def eta_period_power(fld: GF, prec: int) -> LaurentSeries:
    """(q-1)-st power of the Carlitz period with theta replaced by eta.

    That period is eta * (-eta)^(1/(q-1)) * prod (1 - eta^(1-q^i))^-1; its
    (q-1)-st power -eta^q * prod(...)^-(q-1) no longer needs a root.
    """
    prod = _period_product(fld, prec)
    prod = LaurentSeries(fld, ETA_INV, prod.min_exp, prod.coeffs, prod.abs_prec)
    lead = LaurentSeries.monomial(fld, ETA_INV, -fld.q, fld.neg(1))
    return (lead * prod ** (fld.q - 1)).truncate_rel(prec)


def carlitz_exp_coeff(fld: GF, i: int, prec: int = 64) -> LaurentSeries:
    """c_i = 1/D_i = 1/prod_{j=0}^{i-1}(theta^(q^i) - theta^(q^j)), relative precision prec."""
    if i == 0:
        return LaurentSeries.one(fld, THETA_INV, prec)
    q = fld.q
    val = i * q**i
    return _bracket_product(fld, [(j, i - j) for j in range(1, i + 1)], val + prec)


def carlitz_exp_coeffs(fld: GF, n: int, prec: int = 64) -> list[LaurentSeries]:
    """The first n coefficients c_0 = 1, c_1, ... of the Carlitz exponential."""
    if n < 1:
        raise DomainError("need at least one coefficient")
    return [carlitz_exp_coeff(fld, i, prec) for i in range(n)]


def _coeff_in_var(fld: GF, i: int, var: str, abs_prec: int) -> LaurentSeries:
    """c_i in the requested uniformizer, known below abs_prec (in that uniformizer)."""
    q = fld.q
    e = 1 if var == THETA_INV else q - 1
    val = i * q**i
    rel = max(1, -(-abs_prec // e) - val)
    c = carlitz_exp_coeff(fld, i, rel)
    return c if var == THETA_INV else c.embed_theta_to_eta()


def carlitz_exp(z: LaurentSeries, prec: int | None = None) -> LaurentSeries:
    """e_C(z) = sum c_i z^(q^i) to relative precision prec (relative to val z).

    Terms are added until their valuations exceed the target and are
    increasing from then on.
    """
    fld = z.field
    q = fld.q
    if z.is_zero():
        return z
    v = z.valuation()
    if prec is None:
        prec = int(z.prec)
    T = v + prec
    e = 1 if z.var == THETA_INV else q - 1
    acc = LaurentSeries.zero(fld, z.var, T)
    for i in range(EXP_INDEX_CEILING + 1):
        term_val = e * i * q**i + q**i * v
        # valuations increase from the first i with i*e + v >= 0
        if term_val >= T and i * e + v >= 0:
            break
        c = _coeff_in_var(fld, i, z.var, T - q**i * v)
        acc = acc + z.qth_power(i) * c
    else:
        raise DomainError(f"Carlitz exponential terms did not fall below precision within {EXP_INDEX_CEILING} terms")
    if acc.abs_prec < T:
        raise PrecisionError(f"input known only to {z.abs_prec}; cannot reach {T}")
    return acc.truncate(T)


def carlitz_data(fld: GF, prec: int, n_coeffs: int = 4) -> CarlitzData:
    return CarlitzData(carlitz_period(fld, prec), tuple(carlitz_exp_coeffs(fld, n_coeffs, prec)))


# ---------------------------------------------------------------------------
# functional-equation products
# ---------------------------------------------------------------------------


def reflection_product(z: RationalArg, prec: int) -> LaurentSeries:
    """prod over c in F_q^x of Gamma(c z)."""
    fld = z.field
    acc = LaurentSeries.one(fld, THETA_INV)
    for c in fld.units():
        acc = acc * gamma(z.scaled(c), prec).series
    return acc


def gauss_arguments(z: RationalArg, g: Poly) -> list[RationalArg]:
    """(z + alpha)/g for alpha over the residues mod g (degree < deg g)."""
    if g.degree < 1 or not g.is_monic():
        raise DomainError("g must be monic of positive degree")
    fld = z.field
    out = []
    for code in range(fld.q**g.degree):
        alpha = Poly.from_code(fld, code)
        out.append(RationalArg.of(z.num + alpha * z.den, z.den * g))
    return out


def gauss_product(z: RationalArg, g: Poly, prec: int) -> LaurentSeries:
    """prod_{alpha in A/(g)} Gamma((z + alpha)/g)."""
    acc = LaurentSeries.one(z.field, THETA_INV)
    for arg in gauss_arguments(z, g):
        acc = acc * gamma(arg, prec).series
    return acc


def simplest_case_sides(fld: GF, prec: int) -> tuple[LaurentSeries, LaurentSeries]:
    """Both sides of Gamma(1/theta)^(q-1) * theta*eta / theta^(q-1) = (eta-period)^(q-1).

    Each side is returned in 1/eta with relative precision prec.
    """
    q = fld.q
    z = RationalArg.of(Poly.one(fld), Poly.t(fld))
    g = gamma_eta(z, prec + q)
    th = theta(fld, ETA_INV)
    th_eta = LaurentSeries.monomial(fld, ETA_INV, -q, fld.neg(1))
    lhs = (g ** (q - 1)) * th_eta * (th ** (q - 1)).inverse()
    rhs = eta_period_power(fld, prec)
    return lhs.truncate_rel(prec), rhs


__all__ = [
    "CarlitzData",
    "GammaValue",
    "RationalArg",
    "carlitz_data",
    "carlitz_exp",
    "carlitz_exp_coeff",
    "carlitz_exp_coeffs",
    "carlitz_period",
    "eta_period_power",
    "gamma",
    "gamma_eta",
    "gamma_partial",
    "gamma_partial_bruteforce",
    "gamma_slice",
    "gamma_slice_bruteforce",
    "gauss_arguments",
    "gauss_product",
    "leading_law",
    "reflection_product",
    "simplest_case_sides",
    "slice_valuation_bound",
]
