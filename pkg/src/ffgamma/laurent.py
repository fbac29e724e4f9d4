"""Truncated Laurent series over F_q in 1/theta or 1/eta, where eta^(q-1) = -theta.

A series stores the exponent of its first coefficient, a dense coefficient
array and an *absolute* precision: every coefficient at an exponent below
``abs_prec`` is known, nothing at or above it is.  ``abs_prec`` may be
``math.inf`` for exact (finite) Laurent polynomials such as theta itself.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .errors import DomainError, PrecisionError
from .ffpoly import GF, Poly, field as get_field, parse_elem

THETA_INV = "1/theta"
ETA_INV = "1/eta"
_VARS = (THETA_INV, ETA_INV)

INF = math.inf


class LaurentSeries:
    """Immutable truncated Laurent series in the uniformizer w of ``var``."""

    __slots__ = ("field", "var", "min_exp", "coeffs", "abs_prec")

    def __init__(self, fld: GF, var: str, min_exp: int, coeffs, abs_prec=INF):
        if var not in _VARS:
            raise DomainError(f"unknown uniformizer {var!r}")
        cs = np.asarray(coeffs, dtype=np.int64).ravel()
        nz = np.flatnonzero(cs)
        if abs_prec != INF:
            abs_prec = int(abs_prec)
        if len(nz) == 0:
            min_exp = abs_prec if abs_prec != INF else 0
            cs = cs[:0]
        else:
            first, last = int(nz[0]), int(nz[-1])
            m0 = int(min_exp)
            min_exp = m0 + first
            if abs_prec != INF:
                last = min(last, abs_prec - m0 - 1)
            if last < first:
                min_exp, cs = abs_prec, cs[:0]
            else:
                cs = cs[first : last + 1]
                nz = np.flatnonzero(cs)
                cs = cs[: int(nz[-1]) + 1]
        self.field = fld
        self.var = var
        self.min_exp = int(min_exp)
        self.coeffs = cs.copy()
        self.coeffs.flags.writeable = False
        self.abs_prec = abs_prec

    # -- constructors ---------------------------------------------------------

    @classmethod
    def zero(cls, fld: GF, var: str = THETA_INV, abs_prec=INF) -> LaurentSeries:
        return cls(fld, var, 0, [], abs_prec)

    @classmethod
    def one(cls, fld: GF, var: str = THETA_INV, abs_prec=INF) -> LaurentSeries:
        return cls(fld, var, 0, [1], abs_prec)

    @classmethod
    def monomial(cls, fld: GF, var: str, exp: int, coeff: int = 1, abs_prec=INF) -> LaurentSeries:
        return cls(fld, var, exp, [coeff], abs_prec)

    @classmethod
    def from_poly(cls, p: Poly, var: str = THETA_INV) -> LaurentSeries:
        """Exact series of a polynomial in theta (var 1/theta) or eta (var 1/eta)."""
        if p.is_zero():
            return cls.zero(p.field, var)
        return cls(p.field, var, -p.degree, list(reversed(p.coeffs)))

    @classmethod
    def from_rational(cls, num: Poly, den: Poly, var: str = THETA_INV, abs_prec: int = 64) -> LaurentSeries:
        """num/den expanded in the uniformizer, known below ``abs_prec``."""
        if den.is_zero():
            raise DomainError("rational function with zero denominator")
        rel = max(1, abs_prec - den.degree + num.degree)
        return (cls.from_poly(num, var) * cls.from_poly(den, var).inverse(rel)).truncate(abs_prec)

    # -- queries --------------------------------------------------------------

    @property
    def prec(self):
        """Relative precision: number of known coefficients from min_exp."""
        return self.abs_prec - self.min_exp

    def is_exact(self) -> bool:
        return self.abs_prec == INF

    def is_zero(self) -> bool:
        """Zero to the available precision (exactly zero if the series is exact)."""
        return len(self.coeffs) == 0

    def valuation(self) -> int:
        if self.is_zero():
            raise PrecisionError("valuation of a series that is zero to precision")
        return self.min_exp

    def leading_coeff(self) -> int:
        if self.is_zero():
            raise PrecisionError("leading coefficient of a series that is zero to precision")
        return int(self.coeffs[0])

    def coeff(self, k: int) -> int:
        if k >= self.abs_prec:
            raise PrecisionError(f"coefficient {k} is beyond the precision {self.abs_prec}")
        i = k - self.min_exp
        if 0 <= i < len(self.coeffs):
            return int(self.coeffs[i])
        return 0

    def terms(self) -> list[tuple[int, int]]:
        return [(self.min_exp + i, int(c)) for i, c in enumerate(self.coeffs) if c]

    def dense(self, start: int, stop: int) -> np.ndarray:
        """Coefficients at exponents start..stop-1 (all must be known)."""
        if stop > self.abs_prec:
            raise PrecisionError(f"coefficients up to {stop} requested, known below {self.abs_prec}")
        out = np.zeros(max(0, stop - start), dtype=np.int64)
        lo = max(start, self.min_exp)
        hi = min(stop, self.min_exp + len(self.coeffs))
        if hi > lo:
            out[lo - start : hi - start] = self.coeffs[lo - self.min_exp : hi - self.min_exp]
        return out

    def truncate(self, abs_prec: int) -> LaurentSeries:
        if abs_prec > self.abs_prec:
            raise PrecisionError(f"cannot raise precision from {self.abs_prec} to {abs_prec}")
        return LaurentSeries(self.field, self.var, self.min_exp, self.coeffs, abs_prec)

    def truncate_rel(self, n: int) -> LaurentSeries:
        """Keep n coefficients from the leading term."""
        return self.truncate(self.valuation() + n)

    def eq_to_precision(self, other: LaurentSeries, n: int) -> bool:
        """True iff all coefficients at exponents < n agree."""
        self._check(other)
        if self.abs_prec < n or other.abs_prec < n:
            raise PrecisionError(
                f"comparison below {n} needs precision {n}, have {self.abs_prec} and {other.abs_prec}"
            )
        lo = min(self.min_exp, other.min_exp, n)
        return bool(np.array_equal(self.dense(lo, n), other.dense(lo, n)))

    def __eq__(self, other):
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        return (
            self.field == other.field
            and self.var == other.var
            and self.min_exp == other.min_exp
            and self.abs_prec == other.abs_prec
            and np.array_equal(self.coeffs, other.coeffs)
        )

    def __hash__(self):
        return hash((self.var, self.min_exp, self.abs_prec, self.coeffs.tobytes()))

    def __repr__(self):
        shown = self.terms()[:6]
        body = " + ".join(f"{self.field.format(c)}*w^{k}" for k, c in shown) or "0"
        if len(self.terms()) > 6:
            body += " + ..."
        tail = "" if self.is_exact() else f" + O(w^{self.abs_prec})"
        return f"<LaurentSeries w={self.var} q={self.field.q}: {body}{tail}>"

    # -- arithmetic -----------------------------------------------------------

    def _check(self, other: LaurentSeries) -> None:
        if not isinstance(other, LaurentSeries):
            raise DomainError("expected a LaurentSeries")
        if other.var != self.var:
            raise DomainError(f"mixed uniformizers {self.var} and {other.var}")
        if other.field != self.field:
            raise DomainError("series over different fields")

    def _lift(self, other) -> LaurentSeries:
        if isinstance(other, LaurentSeries):
            self._check(other)
            return other
        if isinstance(other, int):
            return LaurentSeries(self.field, self.var, 0, [self.field.from_int(other)])
        if isinstance(other, Poly):
            return LaurentSeries.from_poly(other, self.var)
        raise DomainError(f"cannot combine a series with {type(other).__name__}")

    def __add__(self, other):
        other = self._lift(other)
        fld = self.field
        P = min(self.abs_prec, other.abs_prec)
        lo = min(self.min_exp, other.min_exp)
        hi_a = self.min_exp + len(self.coeffs)
        hi_b = other.min_exp + len(other.coeffs)
        hi = max(hi_a, hi_b, lo)
        if P != INF:
            hi = min(hi, P)
        if hi <= lo:
            return LaurentSeries(fld, self.var, lo, [], P)
        a = np.zeros(hi - lo, dtype=np.int64)
        b = np.zeros(hi - lo, dtype=np.int64)
        n = max(0, min(hi, hi_a) - self.min_exp)
        a[self.min_exp - lo : self.min_exp - lo + n] = self.coeffs[:n]
        n = max(0, min(hi, hi_b) - other.min_exp)
        b[other.min_exp - lo : other.min_exp - lo + n] = other.coeffs[:n]
        return LaurentSeries(fld, self.var, lo, fld.vadd(a, b), P)

    __radd__ = __add__

    def __neg__(self):
        return LaurentSeries(self.field, self.var, self.min_exp, self.field.vneg(self.coeffs), self.abs_prec)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def scale(self, c: int) -> LaurentSeries:
        return LaurentSeries(self.field, self.var, self.min_exp, self.field.vscale(self.coeffs, c), self.abs_prec)

    def shift(self, k: int) -> LaurentSeries:
        """Multiply by w^k."""
        return LaurentSeries(self.field, self.var, self.min_exp + k, self.coeffs, self.abs_prec + k)

    def __mul__(self, other):
        if isinstance(other, int) and not isinstance(other, bool):
            return self.scale(self.field.from_int(other))
        other = self._lift(other)
        fld = self.field
        va, vb = self.min_exp, other.min_exp
        P = min(self.abs_prec + vb, other.abs_prec + va)
        base = va + vb
        if (self.is_zero() and self.is_exact()) or (other.is_zero() and other.is_exact()):
            return LaurentSeries.zero(fld, self.var)
        if self.is_zero() or other.is_zero():
            return LaurentSeries(fld, self.var, base, [], P)
        a, b = self.coeffs, other.coeffs
        if P != INF:
            n = P - base
            if n <= 0:
                return LaurentSeries(fld, self.var, base, [], P)
            a, b = a[:n], b[:n]
        prod = fld.convolve(a, b)
        if P != INF:
            prod = prod[: P - base]
        return LaurentSeries(fld, self.var, base, prod, P)

    __rmul__ = __mul__

    def inverse(self, prec: int | None = None) -> LaurentSeries:
        """Multiplicative inverse.

        The relative precision is preserved.  Exact non-monomial input needs
        ``prec`` (relative precision of the result).
        """
        if self.is_zero():
            raise DomainError("inversion of a series that is zero to precision")
        fld = self.field
        v = self.min_exp
        n = self.prec
        if n == INF:
            if len(self.coeffs) == 1:
                return LaurentSeries(fld, self.var, -v, [fld.inv(int(self.coeffs[0]))])
            if prec is None:
                raise PrecisionError("inverting an exact series requires a target precision")
            n = prec
        elif prec is not None:
            n = min(n, prec)
        n = int(n)
        c = np.zeros(n, dtype=np.int64)
        m = min(n, len(self.coeffs))
        c[:m] = self.coeffs[:m]
        x = np.array([fld.inv(int(c[0]))], dtype=np.int64)
        k = 1
        while k < n:
            k2 = min(2 * k, n)
            ax = fld.convolve(c[:k2], x)[:k2]
            err = fld.vneg(ax)
            err[0] = fld.add(int(err[0]), 1)
            corr = fld.convolve(x, err)[:k2]
            xx = np.zeros(k2, dtype=np.int64)
            xx[: len(x)] = x
            x = fld.vadd(xx, corr)
            k = k2
        return LaurentSeries(fld, self.var, -v, x, -v + n)

    def __truediv__(self, other):
        other = self._lift(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def frobenius(self) -> LaurentSeries:
        """The p-th power: coefficients to the p-th power, exponents times p.

        Precision grows by the same factor, since (x + e)^p = x^p + e^p.
        """
        p = self.field.p
        cs = self.field.vfrob(self.coeffs)
        spread = np.zeros(max(0, (len(cs) - 1) * p + 1), dtype=np.int64)
        spread[::p] = cs
        return LaurentSeries(self.field, self.var, self.min_exp * p, spread, self.abs_prec * p)

    def qth_power(self, i: int = 1) -> LaurentSeries:
        """Raise to q**i by spreading exponents (coefficients are fixed by x -> x^q)."""
        if i == 0:
            return self
        s = self.field.q**i
        spread = np.zeros(max(0, (len(self.coeffs) - 1) * s + 1), dtype=np.int64)
        spread[::s] = self.coeffs
        return LaurentSeries(self.field, self.var, self.min_exp * s, spread, self.abs_prec * s)

    def __pow__(self, n: int) -> LaurentSeries:
        if not isinstance(n, int):
            raise DomainError("only integer powers are supported")
        if n < 0:
            return self.inverse() ** (-n)
        if n == 0:
            return LaurentSeries.one(self.field, self.var)
        p = self.field.p
        if n % p == 0:
            return self.frobenius() ** (n // p)
        result, base = None, self
        while n:
            if n & 1:
                result = base if result is None else result * base
            n >>= 1
            if n:
                base = base * base
        return result

    pow_int = __pow__

    # -- change of variable ---------------------------------------------------

    def embed_theta_to_eta(self) -> LaurentSeries:
        """Substitute 1/theta = -(1/eta)^(q-1)."""
        if self.var != THETA_INV:
            raise DomainError("embedding expects a series in 1/theta")
        fld = self.field
        e = fld.q - 1
        cs = self.coeffs.copy()
        if fld.p != 2:
            odd = (np.arange(len(cs)) + self.min_exp) % 2 == 1
            cs[odd] = fld.vneg(cs[odd])
        spread = np.zeros(max(0, (len(cs) - 1) * e + 1), dtype=np.int64)
        spread[::e] = cs
        return LaurentSeries(fld, ETA_INV, self.min_exp * e, spread, self.abs_prec * e)

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        """``{"var", "q", "terms": [[exp, "coeff"], ...], "prec"}``; prec is absolute."""
        if self.is_exact():
            raise PrecisionError("exact series have no finite precision to serialize")
        return {
            "var": self.var,
            "q": self.field.q,
            "terms": [[k, self.field.format(c)] for k, c in self.terms()],
            "prec": int(self.abs_prec),
        }

    @classmethod
    def from_json(cls, data: dict, fld: GF | None = None) -> LaurentSeries:
        fld = fld or get_field(int(data["q"]))
        terms = data["terms"]
        P = int(data["prec"])
        if not terms:
            return cls.zero(fld, data["var"], P)
        lo = terms[0][0]
        cs = np.zeros(terms[-1][0] - lo + 1, dtype=np.int64)
        for k, c in terms:
            cs[k - lo] = parse_elem(str(c), fld)
        return cls(fld, data["var"], lo, cs, P)


def theta(fld: GF, var: str = THETA_INV) -> LaurentSeries:
    """theta itself: w^-1 in 1/theta, -w^-(q-1) in 1/eta."""
    if var == THETA_INV:
        return LaurentSeries.monomial(fld, var, -1)
    return LaurentSeries.monomial(fld, var, -(fld.q - 1), fld.neg(1))


def eta(fld: GF) -> LaurentSeries:
    return LaurentSeries.monomial(fld, ETA_INV, -1)


def from_sequence(fld: GF, var: str, min_exp: int, coeffs: Sequence[int], abs_prec) -> LaurentSeries:
    return LaurentSeries(fld, var, min_exp, coeffs, abs_prec)


def product(series, fld: GF, var: str = THETA_INV) -> LaurentSeries:
    acc = LaurentSeries.one(fld, var)
    for s in series:
        acc = acc * s
    return acc


__all__ = [
    "ETA_INV",
    "INF",
    "LaurentSeries",
    "THETA_INV",
    "eta",
    "product",
    "theta",
]
