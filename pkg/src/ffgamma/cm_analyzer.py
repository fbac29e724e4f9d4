"""CM-type combinatorics of the soliton t-module E_f.

Under the Galois correspondence the CM type of E_f is the set S_f of
units mod f with monic canonical representative, and F(1), the right
stabilizer of S_f, governs everything else here: its cosets are the
classes of Gamma values with algebraic ratios, E_f is simple exactly when
F(1) is trivial, and E_f is isogenous to a power of a module of dimension
|S_f|/|F(1)|.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .ffpoly import (
    Poly,
    Residue,
    factor,
    gcd,
    is_irreducible,
    lcm,
    product,
    residue_ring,
    unit_group,
)


@dataclass(frozen=True)
class MonicSet:
    """S_f as a bitset over the unit group (in its enumeration order)."""

    modulus: Poly
    bits: np.ndarray

    def members(self) -> list[Poly]:
        elems = unit_group(self.modulus).elements
        return [elems[i] for i in np.flatnonzero(self.bits)]

    def __len__(self):
        return int(self.bits.sum())

    def __contains__(self, a) -> bool:
        a = a % self.modulus
        ug = unit_group(self.modulus)
        return a in ug.index and bool(self.bits[ug.index[a]])


@dataclass(frozen=True)
class Stabilizer:
    modulus: Poly
    members: tuple[Poly, ...]

    def __len__(self):
        return len(self.members)

    def __contains__(self, a) -> bool:
        return (a % self.modulus) in self.members


@dataclass(frozen=True)
class Classification:
    modulus: Poly
    is_simple: bool
    m: int
    classes: tuple[tuple[Poly, ...], ...]
    dim_E: int
    rank_E: int
    dim_H: int
    rank_H: int
    n_quasiperiods: int

    def to_json(self) -> dict:
        return {
            "q": self.modulus.field.q,
            "f": str(self.modulus),
            "simple": self.is_simple,
            "m": self.m,
            "dim_E": self.dim_E,
            "rank_E": self.rank_E,
            "dim_H": self.dim_H,
            "rank_H": self.rank_H,
            "n_quasiperiods": self.n_quasiperiods,
            "classes": [[str(a) for a in c] for c in self.classes],
        }


@dataclass(frozen=True)
class MoreDenomsReport:
    S: Residue
    direct: Poly
    formula: Poly
    congruent: bool
    exact: bool
    coprime: bool

    def to_json(self) -> dict:
        return {
            "S": str(self.S),
            "direct": str(self.direct),
            "formula": str(self.formula),
            "congruent": self.congruent,
            "exact": self.exact,
            "coprime": self.coprime,
        }


def monic_set(f: Poly) -> MonicSet:
    ug = unit_group(f)
    return MonicSet(f, residue_ring(f).is_monic(ug.codes))


def _stabilizer_mask(f: Poly) -> np.ndarray:
    ring = residue_ring(f)
    ug = unit_group(f)
    S = ug.codes[ring.is_monic(ug.codes)]
    # column s holds S*s; s stabilizes iff every product stays monic
    return ring.is_monic(ring.multiply_many(S, ug.codes)).all(axis=0)


def stabilizer(f: Poly) -> Stabilizer:
    """F(1) = {s unit : S_f * s = S_f}."""
    ug = unit_group(f)
    keep = _stabilizer_mask(f)
    return Stabilizer(f, tuple(ug.elements[i] for i in np.flatnonzero(keep)))


def cosets(f: Poly, H: Stabilizer) -> list[tuple[Poly, ...]]:
    """Cosets a*H of the subgroup H in (A/f)^x, ordered by smallest member."""
    ring = residue_ring(f)
    ug = unit_group(f)
    prods = ring.multiply_many(ug.codes, list(H.members))
    seen = np.zeros(ring.size, dtype=bool)
    out = []
    for row in prods:
        if seen[row[0]]:
            continue
        seen[row] = True
        out.append(tuple(Poly.from_code(f.field, int(c)) for c in np.sort(row)))
    return out


def classify(f: Poly) -> Classification:
    ug = unit_group(f)
    S = monic_set(f)
    F1 = stabilizer(f)
    m = len(F1)
    dim_E, rank_E = len(S), ug.order
    return Classification(
        modulus=f,
        is_simple=m == 1,
        m=m,
        classes=tuple(cosets(f, F1)),
        dim_E=dim_E,
        rank_E=rank_E,
        dim_H=dim_E // m,
        rank_H=rank_E // m,
        n_quasiperiods=rank_E - dim_E,
    )


def _require_coprime(a: Poly, f: Poly) -> Poly:
    a = a % f
    if a.is_zero() or gcd(a, f).degree != 0:
        raise DomainError(f"{a} is not coprime to {f}")
    return a


def approx_equiv(a: Poly, f: Poly, b: Poly, g: Poly) -> bool:
    """Gamma(a/f) and Gamma(b/g) have the same monic pattern over (A/lcm)^x."""
    a, b = _require_coprime(a, f), _require_coprime(b, g)
    M = lcm(f, g)
    units = unit_group(M).codes
    rf, rg = residue_ring(f), residue_ring(g)
    left = rf.is_monic(rf.multiply_many(units, [a], M.degree)[:, 0])
    right = rg.is_monic(rg.multiply_many(units, [b], M.degree)[:, 0])
    return bool(np.array_equal(left, right))


def isogenous(f: Poly, g: Poly) -> tuple[Poly, Poly] | None:
    """A witness (1, b) with Gamma(1/f) ~ Gamma(b/g), searched over I_g in order."""
    one = Poly.one(f.field)
    M = lcm(f, g)
    units = unit_group(M).codes
    rf, rg = residue_ring(f), residue_ring(g)
    left = rf.is_monic(rf.multiply_many(units, [one], M.degree)[:, 0])
    cand = unit_group(g).elements
    right = rg.is_monic(rg.multiply_many(units, list(cand), M.degree))
    hits = np.flatnonzero((right == left[:, None]).all(axis=0))
    if hits.size == 0:
        return None
    return one, cand[int(hits[0])]


# ---------------------------------------------------------------------------
# the sum of monic units
# ---------------------------------------------------------------------------


def _check_factorization(f: Poly, factors) -> list[tuple[Poly, int]]:
    out = []
    for h, e in factors:
        if not h.is_monic() or h.degree < 1 or not is_irreducible(h):
            raise DomainError(f"{h} is not a monic irreducible")
        if e < 1:
            raise DomainError(f"exponent {e} must be positive")
        out.append((h, int(e)))
    if len({h for h, _ in out}) != len(out):
        raise DomainError("factors must be distinct")
    if product((h**e for h, e in out), f.field) != f:
        raise DomainError(f"factors do not multiply to {f}")
    return out


def monic_unit_sum(f: Poly) -> Poly:
    """Sum over I_+ of the canonical representatives, as a polynomial."""
    ring = residue_ring(f)
    ug = unit_group(f)
    S = ug.codes[ring.is_monic(ug.codes)]
    digits = ring.digits(S).sum(axis=0) % f.field.p
    return Poly.from_code(f.field, int(ring.codes(digits)))


def moredenoms_check(f: Poly, factors=None) -> MoreDenomsReport:
    """Compare sum(I_+) with prod(1 - f_i); report whether S is a unit mod f."""
    factors = factor(f) if factors is None else _check_factorization(f, factors)
    one = Poly.one(f.field)
    direct = monic_unit_sum(f)
    formula = product((one - h for h, _ in factors), f.field)
    return MoreDenomsReport(
        S=Residue.of(direct, f),
        direct=direct,
        formula=formula,
        congruent=(direct - formula) % f == Poly.zero(f.field),
        exact=direct == formula,
        coprime=gcd(direct, f).degree == 0,
    )


def moredenoms_hypothesis(factors) -> bool:
    """No irreducible factor f_i divides any f_j - 1."""
    hs = [h for h, _ in factors]
    return not any((hj - Poly.one(hj.field)) % hi == Poly.zero(hi.field) for hi in hs for hj in hs)


__all__ = [
    "Classification",
    "MonicSet",
    "MoreDenomsReport",
    "Stabilizer",
    "approx_equiv",
    "classify",
    "cosets",
    "isogenous",
    "monic_set",
    "monic_unit_sum",
    "moredenoms_check",
    "moredenoms_hypothesis",
    "stabilizer",
]
