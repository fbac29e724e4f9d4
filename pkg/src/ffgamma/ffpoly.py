"""Exact arithmetic over F_q, the polynomial ring F_q[t] and its residue rings.

Field elements are plain ints in ``range(q)``.  The base-p digits of an
element are its coordinates in the power basis ``1, g, ..., g^(r-1)`` of
F_q = F_p[g]/(m(g)), so for prime q the encoding is the usual one.

A residue modulo a polynomial f of degree n is encoded by the integer
``sum(c_i * q**i)`` of its canonical representative.  Its base-p digits are
then its coordinates over F_p, which makes multiplication by a fixed residue
an F_p-matrix acting on digit vectors.  Everything that quantifies over a
unit group (bracket checks, stabilizers, equivalence tests) runs through
those matrices with numpy.
"""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass, field as dc_field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import DomainError, ResourceGuardError

MAX_FIELD_SIZE = 2**16
MAX_RESIDUES = 10**7
MAX_TRIAL_DIVISORS = 10**6

# Conway polynomials, coefficients lowest degree first.
CONWAY = {
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (2, 5): (1, 0, 1, 0, 0, 1),
    (2, 6): (1, 1, 0, 1, 1, 0, 1),
    (3, 2): (2, 2, 1),
    (3, 3): (1, 2, 0, 1),
    (5, 2): (2, 4, 1),
    (7, 2): (3, 6, 1),
}


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def prime_power(q: int) -> tuple[int, int]:
    """Split q = p**r; raise DomainError if q is not a prime power."""
    if q < 2:
        raise DomainError(f"q={q} is not a prime power")
    p = next(d for d in range(2, q + 1) if q % d == 0)
    r, m = 0, q
    while m % p == 0:
        m //= p
        r += 1
    if m != 1:
        raise DomainError(f"q={q} is not a prime power")
    return p, r


class GF:
    """The finite field F_q with q = p**r, elements encoded as ints.

    Use :func:`field` to obtain instances; it caches them so identical
    configurations compare and hash equal.
    """

    def __init__(self, p: int, r: int = 1, modulus: Sequence[int] | None = None, symbol: str = "g"):
        if not _is_prime(p):
            raise DomainError(f"p={p} is not prime")
        if r < 1:
            raise DomainError("extension degree must be positive")
        q = p**r
        if q > MAX_FIELD_SIZE:
            raise ResourceGuardError(f"q={q} exceeds the field size guard {MAX_FIELD_SIZE}")
        self.p, self.r, self.q, self.symbol = p, r, q, symbol
        if r == 1:
            self.modulus = (0, 1)
        else:
            if modulus is None:
                if (p, r) not in CONWAY:
                    raise DomainError(f"no built-in modulus for q={q}; supply one")
                modulus = CONWAY[(p, r)]
            modulus = tuple(int(c) % p for c in modulus)
            while modulus and modulus[-1] == 0:
                modulus = modulus[:-1]
            if len(modulus) != r + 1 or modulus[-1] != 1:
                raise DomainError(f"field modulus must be monic of degree {r}")
            self.modulus = modulus
            if not _prime_poly_irreducible(p, modulus):
                raise DomainError(f"field modulus {modulus} is reducible over F_{p}")

        self._pw = p ** np.arange(r, dtype=np.int64)
        self._digits = (np.arange(q, dtype=np.int64)[:, None] // self._pw) % p
        if r > 1:
            self._build_log_tables()
            if p != 2 and q <= 256:
                d = self._digits
                self._add_table = (((d[:, None, :] + d[None, :, :]) % p) @ self._pw).astype(np.int64)
            else:
                self._add_table = None

    # -- construction helpers -------------------------------------------

    def _slow_mul(self, a: int, b: int) -> int:
        p, r = self.p, self.r
        da, db = self._digits[a], self._digits[b]
        prod = [0] * (2 * r - 1)
        for i in range(r):
            if da[i]:
                for j in range(r):
                    prod[i + j] += int(da[i]) * int(db[j])
        m = self.modulus
        for k in range(2 * r - 2, r - 1, -1):
            c = prod[k] % p
            if c:
                for j in range(r):
                    prod[k - r + j] -= c * m[j]
            prod[k] = 0
        return sum((prod[j] % p) * p**j for j in range(r))

    def _build_log_tables(self) -> None:
        q = self.q
        order = q - 1
        primes = [d for d in range(2, order + 1) if order % d == 0 and _is_prime(d)]

        def slow_pow(a: int, n: int) -> int:
            result, base = 1, a
            while n:
                if n & 1:
                    result = self._slow_mul(result, base)
                base = self._slow_mul(base, base)
                n >>= 1
            return result

        for cand in range(2, q):
            if all(slow_pow(cand, order // ell) != 1 for ell in primes):
                gen = cand
                break
        else:  # pragma: no cover - a finite field always has a generator
            raise AssertionError("no primitive element found")
        exp = [1] * (2 * order)
        for i in range(1, 2 * order):
            exp[i] = self._slow_mul(exp[i - 1], gen)
        log = [0] * q
        for i in range(order):
            log[exp[i]] = i
        self._exp, self._log = exp, log
        self._exp_np = np.array(exp, dtype=np.int64)
        self._log_np = np.array(log, dtype=np.int64)

    # -- identity ----------------------------------------------------------

    def _key(self):
        return (self.p, self.r, self.modulus)

    def __eq__(self, other):
        return isinstance(other, GF) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        if self.r == 1:
            return f"GF({self.p})"
        return f"GF({self.q}, modulus={self.format_modulus()})"

    # -- scalar arithmetic ---------------------------------------------------

    @property
    def generator(self) -> int:
        """The element g (equal to p in the integer encoding)."""
        if self.r == 1:
            raise DomainError("prime fields have no generator symbol")
        return self.p

    def add(self, a: int, b: int) -> int:
        if self.r == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        if self._add_table is not None:
            return int(self._add_table[a, b])
        return int(((self._digits[a] + self._digits[b]) % self.p) @ self._pw)

    def neg(self, a: int) -> int:
        if self.r == 1:
            return (-a) % self.p
        if self.p == 2:
            return a
        return int(((-self._digits[a]) % self.p) @ self._pw)

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.r == 1:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise DomainError("inverse of zero in F_q")
        if self.r == 1:
            return pow(a, self.p - 2, self.p)
        return self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, n: int) -> int:
        if n < 0:
            return self.pow(self.inv(a), -n)
        if n == 0:
            return 1
        if a == 0:
            return 0
        if self.r == 1:
            return pow(a, n, self.p)
        return self._exp[(self._log[a] * n) % (self.q - 1)]

    def from_int(self, n: int) -> int:
        """Image of an ordinary integer in the prime subfield."""
        return n % self.p

    def elements(self) -> range:
        return range(self.q)

    def units(self) -> range:
        return range(1, self.q)

    # -- vectorized arithmetic on int64 arrays ------------------------------

    def vadd(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if self.r == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        if self._add_table is not None:
            return self._add_table[a, b]
        return ((self._digits[a] + self._digits[b]) % self.p) @ self._pw

    def vneg(self, a: np.ndarray) -> np.ndarray:
        if self.r == 1:
            return (-a) % self.p
        if self.p == 2:
            return a.copy()
        return ((-self._digits[a]) % self.p) @ self._pw

    def vsub(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return self.vadd(a, self.vneg(b))

    def vmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if self.r == 1:
            return (a * b) % self.p
        out = self._exp_np[(self._log_np[a] + self._log_np[b]) % (self.q - 1)]
        return np.where((a == 0) | (b == 0), 0, out)

    def vscale(self, a: np.ndarray, c: int) -> np.ndarray:
        return self.vmul(a, np.full_like(a, c))

    def vfrob(self, a: np.ndarray) -> np.ndarray:
        """Elementwise p-th power."""
        if self.r == 1:
            return a.copy()
        out = self._exp_np[(self._log_np[a] * self.p) % (self.q - 1)]
        return np.where(a == 0, 0, out)

    def convolve(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Product of two coefficient arrays (polynomial multiplication)."""
        if len(a) == 0 or len(b) == 0:
            return np.zeros(0, dtype=np.int64)
        p = self.p
        if self.r == 1:
            return np.convolve(a, b) % p
        r = self.r
        da, db = self._digits[a], self._digits[b]
        n = len(a) + len(b) - 1
        acc = np.zeros((n, 2 * r - 1), dtype=np.int64)
        for i in range(r):
            ai = da[:, i]
            if not ai.any():
                continue
            for j in range(r):
                bj = db[:, j]
                if bj.any():
                    acc[:, i + j] += np.convolve(ai, bj)
            acc %= p
        m = self.modulus
        for k in range(2 * r - 2, r - 1, -1):
            col = acc[:, k] % p
            for j in range(r):
                if m[j]:
                    acc[:, k - r + j] -= col * m[j]
        return (acc[:, :r] % p) @ self._pw

    # -- text -----------------------------------------------------------------

    def format(self, a: int) -> str:
        """Element as text: an integer for the prime subfield, else a polynomial in g."""
        if a < self.p:
            return str(a)
        return _format_terms(
            [(k, int(d)) for k, d in enumerate(self._digits[a])], self.symbol, str
        )

    def format_modulus(self) -> str:
        return _format_terms(list(enumerate(self.modulus)), self.symbol, str)

    def is_prime_subfield(self, a: int) -> bool:
        return a < self.p


def _format_terms(terms, var: str, coeff_fmt) -> str:
    """Join ``c*var^k`` terms, highest degree first, with '+'."""
    parts = []
    for k, c in sorted(terms, key=lambda kc: -kc[0]):
        if c == 0:
            continue
        cs = coeff_fmt(c)
        if k == 0:
            parts.append(cs)
        elif cs == "1":
            parts.append(var if k == 1 else f"{var}^{k}")
        else:
            parts.append(f"{cs}*{var}" if k == 1 else f"{cs}*{var}^{k}")
    return "+".join(parts) if parts else "0"


def _prime_poly_irreducible(p: int, coeffs: Sequence[int]) -> bool:
    """Trial division of a monic F_p polynomial by all monic polynomials of degree <= deg/2."""
    deg = len(coeffs) - 1
    f = field(p)
    target = Poly(f, coeffs)
    for d in range(1, deg // 2 + 1):
        for h in enumerate_monics(f, d):
            if (target % h).is_zero():
                return False
    return True


@functools.lru_cache(maxsize=None)
def _cached_field(p: int, r: int, modulus: tuple | None) -> GF:
    return GF(p, r, modulus)


def field(q: int, modulus: Sequence[int] | str | None = None) -> GF:
    """Cached F_q.  ``modulus`` is a coefficient list over F_p or text in ``g``."""
    p, r = prime_power(q)
    if isinstance(modulus, str):
        modulus = parse_poly(modulus, field(p), var="g").coeffs
    if modulus is not None:
        modulus = tuple(int(c) % p for c in modulus)
        if r == 1:
            modulus = None
        elif CONWAY.get((p, r)) == modulus:
            modulus = None
    return _cached_field(p, r, modulus)


class Poly:
    """Dense polynomial over a :class:`GF`, coefficients lowest degree first.

    Immutable and hashable.  The zero polynomial has degree -1.
    """

    __slots__ = ("field", "coeffs", "_hash")

    def __init__(self, fld: GF, coeffs: Iterable[int] = ()):
        cs = [int(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.field = fld
        self.coeffs = tuple(cs)
        self._hash = None

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, fld: GF) -> Poly:
        return cls(fld)

    @classmethod
    def one(cls, fld: GF) -> Poly:
        return cls(fld, (1,))

    @classmethod
    def const(cls, fld: GF, c: int) -> Poly:
        return cls(fld, (c,))

    @classmethod
    def t(cls, fld: GF) -> Poly:
        return cls(fld, (0, 1))

    @classmethod
    def monomial(cls, fld: GF, k: int, c: int = 1) -> Poly:
        return cls(fld, [0] * k + [c])

    @classmethod
    def from_code(cls, fld: GF, code: int) -> Poly:
        q, cs = fld.q, []
        while code:
            code, c = divmod(code, q)
            cs.append(c)
        return cls(fld, cs)

    def code(self) -> int:
        q, n = self.field.q, 0
        for c in reversed(self.coeffs):
            n = n * q + c
        return n

    # -- basic queries ----------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lc(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def monic(self) -> Poly:
        if self.is_zero():
            return self
        return self.scale(self.field.inv(self.lc))

    def __getitem__(self, k: int) -> int:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def __len__(self):
        return len(self.coeffs)

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, int):
            return self.coeffs == Poly(self.field, (self.field.from_int(other),)).coeffs
        return isinstance(other, Poly) and self.field == other.field and self.coeffs == other.coeffs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.field, self.coeffs))
        return self._hash

    def __lt__(self, other: Poly) -> bool:
        return (self.degree, tuple(reversed(self.coeffs))) < (other.degree, tuple(reversed(other.coeffs)))

    # -- ring operations ----------------------------------------------------

    def _coerce(self, other) -> Poly:
        if isinstance(other, Poly):
            if other.field != self.field:
                raise DomainError("polynomials over different fields")
            return other
        if isinstance(other, int):
            return Poly(self.field, (self.field.from_int(other),))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b, add = self.coeffs, other.coeffs, self.field.add
        n = max(len(a), len(b))
        return Poly(self.field, [add(a[i] if i < len(a) else 0, b[i] if i < len(b) else 0) for i in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.field, [self.field.neg(c) for c in self.coeffs])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: int) -> Poly:
        mul = self.field.mul
        return Poly(self.field, [mul(c, x) for x in self.coeffs])

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self.coeffs or not other.coeffs:
            return Poly(self.field)
        if len(self.coeffs) == 1:
            return other.scale(self.coeffs[0])
        if len(other.coeffs) == 1:
            return self.scale(other.coeffs[0])
        fld = self.field
        prod = fld.convolve(np.array(self.coeffs, dtype=np.int64), np.array(other.coeffs, dtype=np.int64))
        return Poly(fld, prod.tolist())

    __rmul__ = __mul__

    def __pow__(self, n: int) -> Poly:
        if n < 0:
            raise DomainError("negative power of a polynomial")
        result, base = Poly.one(self.field), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __divmod__(self, other):
        other = self._coerce(other)
        if other.is_zero():
            raise DomainError("polynomial division by zero")
        fld = self.field
        rem = list(self.coeffs)
        db = other.degree
        if len(rem) <= db:
            return Poly(fld), self
        inv_lc = fld.inv(other.lc)
        quot = [0] * (len(rem) - db)
        bc = other.coeffs
        for k in range(len(rem) - 1, db - 1, -1):
            c = rem[k]
            if c == 0:
                continue
            c = fld.mul(c, inv_lc)
            quot[k - db] = c
            for j in range(db + 1):
                if bc[j]:
                    rem[k - db + j] = fld.sub(rem[k - db + j], fld.mul(c, bc[j]))
        return Poly(fld, quot), Poly(fld, rem[:db])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        if isinstance(other, Poly) and other.field is self.field and len(self.coeffs) <= other.degree:
            return self
        return divmod(self, other)[1]

    def divides(self, other: Poly) -> bool:
        return (other % self).is_zero()

    def __call__(self, x: int) -> int:
        """Evaluate at a field element (Horner)."""
        fld, acc = self.field, 0
        for c in reversed(self.coeffs):
            acc = fld.add(fld.mul(acc, x), c)
        return acc

    def reverse(self, n: int | None = None) -> Poly:
        """Reciprocal polynomial t^n * p(1/t), n defaulting to the degree."""
        n = self.degree if n is None else n
        cs = list(self.coeffs) + [0] * max(0, n + 1 - len(self.coeffs))
        return Poly(self.field, reversed(cs[: n + 1]))

    # -- text -------------------------------------------------------------------

    def to_str(self, var: str = "t") -> str:
        fld = self.field

        def coeff(c: int) -> str:
            s = fld.format(c)
            return s if fld.is_prime_subfield(c) else f"({s})"

        return _format_terms(list(enumerate(self.coeffs)), var, coeff)

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return f"Poly({self.to_str()!r}, q={self.field.q})"


def gcd(a: Poly, b: Poly) -> Poly:
    """Monic greatest common divisor (zero iff both arguments are zero)."""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def xgcd(a: Poly, b: Poly) -> tuple[Poly, Poly, Poly]:
    """Return (g, s, u) with s*a + u*b = g monic."""
    fld = a.field
    r0, r1 = a, b
    s0, s1 = Poly.one(fld), Poly.zero(fld)
    u0, u1 = Poly.zero(fld), Poly.one(fld)
    while not r1.is_zero():
        qt, r = divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - qt * s1
        u0, u1 = u1, u0 - qt * u1
    if r0.is_zero():
        return r0, s0, u0
    c = fld.inv(r0.lc)
    return r0.scale(c), s0.scale(c), u0.scale(c)


def lcm(a: Poly, b: Poly) -> Poly:
    if a.is_zero() or b.is_zero():
        return Poly.zero(a.field)
    return ((a * b) // gcd(a, b)).monic()


def enumerate_monics(fld: GF, d: int) -> Iterator[Poly]:
    """All q**d monic polynomials of degree d, lexicographic on (c_{d-1}, ..., c_0)."""
    if d < 0:
        raise DomainError("degree must be non-negative")
    q = fld.q
    for low in range(q**d):
        yield Poly.from_code(fld, q**d + low)


def _check_trial_budget(fld: GF, d: int) -> None:
    if sum(fld.q**k for k in range(1, d + 1)) > MAX_TRIAL_DIVISORS:
        raise ResourceGuardError("trial division would exceed the divisor budget")


def is_irreducible(f: Poly) -> bool:
    """Trial division by every monic polynomial of degree <= deg(f)/2."""
    if f.degree < 1:
        return False
    _check_trial_budget(f.field, f.degree // 2)
    for d in range(1, f.degree // 2 + 1):
        for h in enumerate_monics(f.field, d):
            if h.divides(f):
                return False
    return True


def factor(f: Poly) -> list[tuple[Poly, int]]:
    """Factor a nonzero polynomial into monic irreducibles by trial division.

    The leading coefficient is dropped; factors come out in increasing
    degree, then enumeration order.
    """
    if f.is_zero():
        raise DomainError("cannot factor zero")
    rest = f.monic()
    _check_trial_budget(f.field, rest.degree // 2)
    out: list[tuple[Poly, int]] = []
    d = 1
    while 2 * d <= rest.degree:
        for h in enumerate_monics(f.field, d):
            e = 0
            while True:
                qt, r = divmod(rest, h)
                if not r.is_zero():
                    break
                rest, e = qt, e + 1
            if e:
                out.append((h, e))
            if 2 * d > rest.degree:
                break
        d += 1
    if rest.degree >= 1:
        for i, (h, e) in enumerate(out):
            if h == rest:
                out[i] = (h, e + 1)
                break
        else:
            out.append((rest, 1))
    out.sort(key=lambda he: (he[0].degree, he[0].code()))
    return out


def euler_phi(f: Poly) -> int:
    """|(A/f)^x| from the factorization of f."""
    q = f.field.q
    n = 1
    for h, e in factor(f):
        n *= q ** (h.degree * e) - q ** (h.degree * (e - 1))
    return n


# ---------------------------------------------------------------------------
# Polynomial text grammar
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_]\w*)|(\*\*|[-+*^()]))")


def _tokenize(text: str) -> list[str]:
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise DomainError(f"cannot parse polynomial {text!r} at position {pos}")
        tok = m.group(1) or m.group(2) or m.group(3)
        out.append("^" if tok == "**" else tok)
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str, fld: GF, var: str, gen: str):
        self.toks = _tokenize(text)
        self.i = 0
        self.fld, self.var, self.gen = fld, var, gen
        self.text = text

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def fail(self, msg):
        raise DomainError(f"cannot parse polynomial {self.text!r}: {msg}")

    def parse(self) -> Poly:
        if not self.toks:
            self.fail("empty input")
        p = self.expr()
        if self.peek() is not None:
            self.fail(f"unexpected token {self.peek()!r}")
        return p

    def expr(self) -> Poly:
        sign = None
        if self.peek() in ("+", "-"):
            sign = self.take()
        acc = self.term()
        if sign == "-":
            acc = -acc
        while self.peek() in ("+", "-"):
            op = self.take()
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self) -> Poly:
        acc = self.power()
        while True:
            nxt = self.peek()
            if nxt == "*":
                self.take()
                acc = acc * self.power()
            elif nxt is not None and (nxt == "(" or nxt[0].isalnum()):
                acc = acc * self.power()  # implicit multiplication, e.g. 2t or t(t+1)
            else:
                return acc

    def power(self) -> Poly:
        base = self.atom()
        if self.peek() == "^":
            self.take()
            tok = self.take()
            if tok is None or not tok.isdigit():
                self.fail("exponent must be a non-negative integer")
            return base ** int(tok)
        return base

    def atom(self) -> Poly:
        tok = self.take()
        fld = self.fld
        if tok is None:
            self.fail("unexpected end of input")
        if tok.isdigit():
            return Poly.const(fld, fld.from_int(int(tok)))
        if tok == self.var:
            return Poly.t(fld)
        if tok == self.gen and fld.r > 1:
            return Poly.const(fld, fld.generator)
        if tok == "(":
            inner = self.expr()
            if self.take() != ")":
                self.fail("missing ')'")
            return inner
        self.fail(f"unknown symbol {tok!r}")


def parse_poly(text: str, fld: GF, var: str = "t") -> Poly:
    """Parse the polynomial grammar: ``c*t^k`` terms joined by ``+``.

    Coefficients over F_{p^r} are polynomials in ``g``, usually in
    parentheses: ``(g+1)*t^2 + g``.  Also accepted: ``-``, nested
    parentheses and implicit products such as ``t(t+1)``.
    """
    return _Parser(text, fld, var, fld.symbol if var != fld.symbol else "\0").parse()


def parse_elem(text: str, fld: GF) -> int:
    """Parse a field element written in the generator symbol."""
    p = _Parser(text, fld, "\0", fld.symbol).parse()
    if p.degree > 0:  # pragma: no cover - the parser never produces t here
        raise DomainError(f"{text!r} is not a field element")
    return p[0]


# ---------------------------------------------------------------------------
# Residue rings and unit groups
# ---------------------------------------------------------------------------


def _check_modulus(f: Poly) -> None:
    if f.degree < 1 or not f.is_monic():
        raise DomainError(f"modulus {f} must be monic and nonconstant")


def monic_codes_mask(codes: np.ndarray, q: int, n: int) -> np.ndarray:
    """True where the residue with this code has a monic canonical rep.

    A code is monic iff its leading base-q digit is 1, i.e. it lies in
    [q^k, 2 q^k) for some k < n.
    """
    mask = np.zeros(codes.shape, dtype=bool)
    for k in range(n):
        lo = q**k
        mask |= (codes >= lo) & (codes < 2 * lo)
    return mask


class ResidueRing:
    """A/f with residues encoded as integer codes (see module docstring)."""

    def __init__(self, f: Poly):
        _check_modulus(f)
        self.modulus = f
        self.field = f.field
        self.n = f.degree
        self.size = self.field.q**self.n
        self.dim = self.n * self.field.r
        self._pw = self.field.p ** np.arange(self.dim, dtype=np.int64)
        self._mat_cache: dict[tuple[int, int], np.ndarray] = {}
        self._units = None
        self._struct = None
        self._monic_table = None

    def __repr__(self):
        return f"ResidueRing({self.modulus})"

    def code(self, a: Poly) -> int:
        return (a % self.modulus).code()

    def poly(self, code: int) -> Poly:
        return Poly.from_code(self.field, int(code))

    def digits(self, codes: np.ndarray, dim: int | None = None) -> np.ndarray:
        dim = self.dim if dim is None else dim
        pw = self.field.p ** np.arange(dim, dtype=np.int64)
        return (np.asarray(codes, dtype=np.int64)[..., None] // pw) % self.field.p

    def codes(self, digits: np.ndarray) -> np.ndarray:
        return digits @ self._pw

    def is_monic(self, codes) -> np.ndarray:
        codes = np.asarray(codes, dtype=np.int64)
        if self.size <= MAX_RESIDUES:
            if self._monic_table is None:
                self._monic_table = monic_codes_mask(np.arange(self.size, dtype=np.int64), self.field.q, self.n)
            return self._monic_table[codes]
        return monic_codes_mask(codes, self.field.q, self.n)

    def mul_matrix(self, a: Poly, src_deg: int | None = None) -> np.ndarray:
        """F_p-matrix of x -> a*x mod f on polynomials x of degree < src_deg.

        Row convention: ``digits(x) @ M % p == digits(a*x mod f)``.  The source
        may be a different (larger) modulus, which is how reductions between
        moduli are expressed.
        """
        src_deg = self.n if src_deg is None else src_deg
        if a.field != self.field:
            raise DomainError("multiplier lives over a different field")
        key = (a.code(), src_deg)
        mat = self._mat_cache.get(key)
        if mat is None:
            fld = self.field
            p, r = fld.p, fld.r
            if src_deg == 0:
                mat = np.zeros((0, self.dim), dtype=np.int64)
            else:
                T, G = self._structure_matrices()
                row = self.digits(np.array([self.code(a)], dtype=np.int64))[0]
                block = np.array([(row @ G[j]) % p for j in range(r)], dtype=np.int64)
                blocks = [block]
                for _ in range(src_deg - 1):
                    block = (block @ T) % p
                    blocks.append(block)
                mat = np.concatenate(blocks, axis=0)
            if len(self._mat_cache) < 65536:
                self._mat_cache[key] = mat
        return mat

    def _structure_matrices(self):
        """Matrices of x -> t*x mod f and x -> g^j * x on digit vectors."""
        if self._struct is None:
            fld = self.field
            t = Poly.t(fld)
            basis = [Poly.monomial(fld, i, fld.p**j) for i in range(self.n) for j in range(fld.r)]
            T = self.digits(np.array([self.code(t * b) for b in basis], dtype=np.int64))
            G = [
                self.digits(np.array([self.code(b.scale(fld.p**j)) for b in basis], dtype=np.int64))
                for j in range(fld.r)
            ]
            self._struct = (T, G)
        return self._struct

    def multiply_codes(self, codes: np.ndarray, a: Poly, src_deg: int | None = None) -> np.ndarray:
        """Codes of a*x mod f for every x given by code (x of degree < src_deg)."""
        src_deg = self.n if src_deg is None else src_deg
        src_dim = src_deg * self.field.r
        d = self.digits(codes, src_dim)
        return self.codes((d @ self.mul_matrix(a, src_deg)) % self.field.p)

    def _basis_tensor(self, src_deg: int) -> np.ndarray:
        """B[k] = mul_matrix(e_k, src_deg) for the F_p-basis e_k of A/f."""
        key = ("basis", src_deg)
        B = self._mat_cache.get(key)
        if B is None:
            fld = self.field
            basis = [Poly.monomial(fld, i, fld.p**j) for i in range(self.n) for j in range(fld.r)]
            B = np.stack([self.mul_matrix(b, src_deg) for b in basis])
            self._mat_cache[key] = B
        return B

    def multiply_many(self, codes: np.ndarray, multipliers, src_deg: int | None = None) -> np.ndarray:
        """Codes of a*x mod f for every x (rows) and every multiplier a (columns).

        ``multipliers`` are residue codes mod f (or Polys, reduced first).
        """
        src_deg = self.n if src_deg is None else src_deg
        if len(multipliers) and isinstance(multipliers[0], Poly):
            multipliers = [self.code(a) for a in multipliers]
        mult = np.asarray(multipliers, dtype=np.int64)
        d = self.digits(codes, src_deg * self.field.r)
        if mult.size == 0 or d.shape[1] == 0:
            return np.zeros((len(d), mult.size), dtype=np.int64)
        B = self._basis_tensor(src_deg)
        M = np.tensordot(self.digits(mult), B, axes=(1, 0)) % self.field.p
        m, i, dim = M.shape
        # float64 products are exact here (entries < p, inner sums < 2^53) and use BLAS
        p = self.field.p
        flat = d.astype(np.float64) @ M.transpose(1, 0, 2).reshape(i, m * dim).astype(np.float64)
        flat -= p * np.floor(flat / p)
        # exact while codes stay below 2^53, far past any ring we can enumerate
        codes = flat.reshape(-1, dim) @ self._pw.astype(np.float64)
        return codes.astype(np.int64).reshape(len(d), m)

    def add_codes(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Digitwise sum of residue codes (addition in A/f)."""
        return self.codes((self.digits(a) + self.digits(b)) % self.field.p)

    @property
    def units(self) -> np.ndarray:
        """Sorted codes of the residues coprime to f."""
        if self._units is None:
            if self.size > MAX_RESIDUES:
                raise ResourceGuardError(
                    f"q^deg f = {self.size} exceeds the residue guard {MAX_RESIDUES}"
                )
            nonunit = np.zeros(self.size, dtype=bool)
            nonunit[0] = True
            for h, _ in factor(self.modulus):
                src = self.n - h.degree
                cofactors = np.arange(self.field.q**src, dtype=np.int64)
                nonunit[self.multiply_codes(cofactors, h, src)] = True
            self._units = np.flatnonzero(~nonunit).astype(np.int64)
        return self._units


@functools.lru_cache(maxsize=512)
def residue_ring(f: Poly) -> ResidueRing:
    return ResidueRing(f)


@dataclass(frozen=True)
class Residue:
    """An element of A/f, stored as its canonical remainder."""

    modulus: Poly
    rep: Poly

    @classmethod
    def of(cls, a: Poly, f: Poly) -> Residue:
        _check_modulus(f)
        return cls(f, a % f)

    def _same(self, other: Residue) -> None:
        if other.modulus != self.modulus:
            raise DomainError("residues modulo different polynomials")

    def __mul__(self, other: Residue) -> Residue:
        self._same(other)
        return Residue(self.modulus, (self.rep * other.rep) % self.modulus)

    def __add__(self, other: Residue) -> Residue:
        self._same(other)
        return Residue(self.modulus, (self.rep + other.rep) % self.modulus)

    def is_zero(self) -> bool:
        return self.rep.is_zero()

    def is_monic(self) -> bool:
        return self.rep.is_monic()

    def is_unit(self) -> bool:
        return gcd(self.rep, self.modulus).degree == 0

    def inverse(self) -> Residue:
        g, s, _ = xgcd(self.rep, self.modulus)
        if g.degree != 0:
            raise DomainError(f"{self.rep} is not a unit modulo {self.modulus}")
        return Residue(self.modulus, s % self.modulus)

    def code(self) -> int:
        return self.rep.code()

    def __str__(self):
        return str(self.rep)


@dataclass(frozen=True)
class UnitGroup:
    """(A/f)^x as canonical representatives in code (lexicographic) order."""

    modulus: Poly
    elements: tuple[Poly, ...]
    codes: np.ndarray = dc_field(repr=False, compare=False)
    index: dict = dc_field(repr=False, compare=False)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, a: Poly) -> bool:
        return (a % self.modulus) in self.index

    @property
    def order(self) -> int:
        return len(self.elements)

    def residues(self) -> list[Residue]:
        return [Residue(self.modulus, e) for e in self.elements]


@functools.lru_cache(maxsize=256)
def unit_group(f: Poly) -> UnitGroup:
    """Enumerate the residues coprime to a monic nonconstant f."""
    ring = residue_ring(f)
    codes = ring.units
    elements = tuple(Poly.from_code(f.field, int(c)) for c in codes)
    return UnitGroup(f, elements, codes, {e: i for i, e in enumerate(elements)})


def coprime_residues(f: Poly) -> list[Poly]:
    """I: coprime residues of degree < deg f (same as the unit group reps)."""
    return list(unit_group(f).elements)


def all_monic_moduli(fld: GF, max_deg: int) -> list[Poly]:
    return [f for d in range(1, max_deg + 1) for f in enumerate_monics(fld, d)]


def poly_from_any(x, fld: GF) -> Poly:
    """Accept Poly, Residue, int or grammar text."""
    if isinstance(x, Poly):
        return x
    if isinstance(x, Residue):
        return x.rep
    if isinstance(x, int):
        return Poly.const(fld, fld.from_int(x))
    if isinstance(x, str):
        return parse_poly(x, fld)
    raise DomainError(f"cannot interpret {x!r} as a polynomial")


def product(polys: Iterable[Poly], fld: GF) -> Poly:
    acc = Poly.one(fld)
    for p in polys:
        acc = acc * p
    return acc


__all__ = [
    "CONWAY",
    "GF",
    "Poly",
    "Residue",
    "ResidueRing",
    "UnitGroup",
    "all_monic_moduli",
    "coprime_residues",
    "enumerate_monics",
    "euler_phi",
    "factor",
    "field",
    "gcd",
    "is_irreducible",
    "lcm",
    "monic_codes_mask",
    "parse_elem",
    "parse_poly",
    "poly_from_any",
    "prime_power",
    "product",
    "residue_ring",
    "unit_group",
    "xgcd",
]

