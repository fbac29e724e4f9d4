"""Recognize truncated Laurent series as rational functions of eta (or theta).

A bracket relation makes prod Gamma(a/f)^(m_a) / pi^(Sigma_+) algebraic.
When that quotient happens to be rational in eta, rational reconstruction
finds it from finitely many coefficients; we accept a candidate only if it
reproduces every known coefficient and reappears at twice the precision.
Failure is INCONCLUSIVE, never a refutation.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bracket import ExponentVector, is_bracket_relation, sigma_plus
from .errors import DomainError, PrecisionError
from .ffpoly import Poly, gcd
from .laurent import ETA_INV, THETA_INV, LaurentSeries
from .special_values import RationalArg, carlitz_period, gamma_eta

DEFAULT_DMAX = 8

_VAR_NAMES = {ETA_INV: "eta", THETA_INV: "theta"}


@dataclass(frozen=True)
class RationalCandidate:
    """value = x^shift * num(x) / den(x) with x = eta (or theta).

    num and den are coprime, den is monic and neither is divisible by x.
    """

    num: Poly
    den: Poly
    shift: int
    var: str = ETA_INV

    def folded(self) -> tuple[Poly, Poly]:
        """num and den with the power of x multiplied in."""
        x = Poly.monomial(self.num.field, abs(self.shift))
        if self.shift >= 0:
            return self.num * x, self.den
        return self.num, self.den * x

    def expand(self, abs_prec: int) -> LaurentSeries:
        num, den = self.folded()
        return LaurentSeries.from_rational(num, den, self.var, abs_prec)

    def to_json(self) -> dict:
        name = _VAR_NAMES[self.var]
        num, den = self.folded()
        return {"num": num.to_str(name), "den": den.to_str(name), "var": name}

    def __str__(self):
        c = self.to_json()
        return f"({c['num']})/({c['den']})"


@dataclass(frozen=True)
class CertReport:
    recognized: bool
    stable: bool
    candidate: RationalCandidate | None
    prec_used: tuple[int, int]
    sigma_plus: int
    dmax: int

    @property
    def status(self) -> str:
        return "CERTIFIED" if self.recognized and self.stable else "INCONCLUSIVE"

    def to_json(self) -> dict:
        return {
            "recognized": self.recognized,
            "stable": self.stable,
            "candidate": None if self.candidate is None else self.candidate.to_json(),
            "prec_used": list(self.prec_used),
            "sigma_plus": self.sigma_plus,
            "dmax": self.dmax,
            "status": self.status,
        }


def pade_reconstruct(s: LaurentSeries, dmax: int) -> RationalCandidate | None:
    """Rational function with numerator and denominator degree <= dmax matching s.

    Runs the extended Euclidean algorithm on (w^N, U) where U holds the N
    known coefficients of s / w^val(s), stopping at the first remainder of
    degree <= dmax.
    """
    if dmax < 0:
        raise DomainError("dmax must be nonnegative")
    if s.is_zero():
        raise PrecisionError("cannot reconstruct a series that is zero to precision")
    if s.is_exact():
        raise PrecisionError("reconstruction needs a truncated series; truncate it first")
    N = int(s.prec)
    if N < 2 * dmax + 2:
        raise PrecisionError(f"relative precision {N} is below 2*dmax+2 = {2 * dmax + 2}")
    fld = s.field
    v = s.valuation()
    U = Poly(fld, s.dense(v, v + N).tolist())
    r0, r1 = Poly.monomial(fld, N), U
    t0, t1 = Poly.zero(fld), Poly.one(fld)
    while r1.degree > dmax:
        quo, rem = divmod(r0, r1)
        r0, r1 = r1, rem
        t0, t1 = t1, t0 - quo * t1
    P, Q = r1, t1
    if P.is_zero() or Q.degree > dmax or Q[0] == 0:
        return None
    g = gcd(P, Q)
    P, Q = P // g, Q // g
    # w-polynomials -> x-polynomials with x = 1/w
    num, den = P.reverse(), Q.reverse()
    c = fld.inv(den.lc)
    cand = RationalCandidate(num.scale(c), den.scale(c), -v - P.degree + Q.degree, s.var)
    if not cand.expand(s.abs_prec).eq_to_precision(s, s.abs_prec):
        return None
    return cand


def relation_quotient(m: ExponentVector, prec: int) -> LaurentSeries:
    """prod Gamma(a/f)^(m_a) / pi^(Sigma_+(m)) in 1/eta, relative precision prec."""
    fld = m.modulus.field
    if m.is_zero():
        return LaurentSeries.one(fld, ETA_INV, prec)
    acc = LaurentSeries.one(fld, ETA_INV)
    for a, e in m.entries:
        g = gamma_eta(RationalArg.of(a, m.modulus), prec)
        acc = acc * (g ** e if e > 0 else g.inverse() ** (-e))
    s = sigma_plus(m)
    if s:
        pi = carlitz_period(fld, prec)
        acc = acc * ((pi ** s).inverse() if s > 0 else pi ** (-s))
    return acc.truncate_rel(prec)


def certify_relation(m: ExponentVector, prec: int = 80, dmax: int = DEFAULT_DMAX) -> CertReport:
    """Try to recognize the relation quotient as a rational function of eta.

    The candidate must be found at prec and found again, identical, at
    2*prec.  dmax is doubled once if nothing is found.
    """
    report = is_bracket_relation(m)
    if not report.is_relation:
        raise DomainError(f"not a bracket relation (witness u = {report.witness})")
    low = relation_quotient(m, prec)
    high = relation_quotient(m, 2 * prec)
    d = dmax
    for attempt in range(2):
        if prec < 2 * d + 2:
            break
        cand = pade_reconstruct(low, d)
        if cand is not None:
            again = pade_reconstruct(high, d)
            return CertReport(True, again == cand, cand, (prec, 2 * prec), report.sigma_plus, d)
        if attempt == 0:
            d *= 2
    return CertReport(False, False, None, (prec, 2 * prec), report.sigma_plus, d)


__all__ = [
    "CertReport",
    "DEFAULT_DMAX",
    "RationalCandidate",
    "certify_relation",
    "pade_reconstruct",
    "relation_quotient",
]
