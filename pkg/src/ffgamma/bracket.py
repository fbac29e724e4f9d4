"""Bracket relations among Gamma values at fractions with a fixed denominator f.

An exponent vector m assigns integers to nonzero residues a mod f and
stands for prod Gamma(a/f)^(m_a).  Sigma_+ adds the entries whose canonical
representative is monic, and m is a bracket relation when Sigma_+ is
unchanged by every unit u acting through a -> u*a mod f.

Everything runs on residue codes (see ffpoly), so deciding a relation is
one matrix product per support element over the whole unit group.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import DomainError
from .ffpoly import Poly, Residue, gcd, parse_poly, poly_from_any, residue_ring, unit_group


@dataclass(frozen=True)
class ExponentVector:
    """Finitely supported integer vector on nonzero residues mod f.

    ``entries`` holds (rep, exponent) pairs sorted by residue code with
    zero exponents dropped.
    """

    modulus: Poly
    entries: tuple[tuple[Poly, int], ...]

    @classmethod
    def of(cls, f: Poly, mapping: Mapping | None = None) -> ExponentVector:
        if f.degree < 1 or not f.is_monic():
            raise DomainError(f"modulus {f} must be monic and nonconstant")
        acc: dict[Poly, int] = defaultdict(int)
        for rep, e in (mapping or {}).items():
            a = poly_from_any(rep, f.field) % f
            if a.is_zero():
                raise DomainError(f"{rep} is zero modulo {f}; Gamma has a pole there")
            acc[a] += int(e)
        items = sorted(((a, e) for a, e in acc.items() if e), key=lambda it: it[0].code())
        return cls(f, tuple(items))

    @classmethod
    def zero(cls, f: Poly) -> ExponentVector:
        return cls.of(f)

    def as_dict(self) -> dict[Poly, int]:
        return dict(self.entries)

    def __getitem__(self, a) -> int:
        a = poly_from_any(a, self.modulus.field) % self.modulus
        return self.as_dict().get(a, 0)

    def is_zero(self) -> bool:
        return not self.entries

    def __len__(self):
        return len(self.entries)

    def _same(self, other: ExponentVector) -> None:
        if other.modulus != self.modulus:
            raise DomainError("exponent vectors over different moduli")

    def __add__(self, other: ExponentVector) -> ExponentVector:
        self._same(other)
        acc = self.as_dict()
        for a, e in other.entries:
            acc[a] = acc.get(a, 0) + e
        return ExponentVector.of(self.modulus, acc)

    def __neg__(self) -> ExponentVector:
        return ExponentVector(self.modulus, tuple((a, -e) for a, e in self.entries))

    def __sub__(self, other: ExponentVector) -> ExponentVector:
        return self + (-other)

    def scale(self, k: int) -> ExponentVector:
        return ExponentVector.of(self.modulus, {a: k * e for a, e in self.entries})

    def to_text(self) -> str:
        return ",".join(f"{a}:{e}" for a, e in self.entries)

    def to_json(self) -> dict:
        return {"f": str(self.modulus), "entries": [[str(a), e] for a, e in self.entries]}

    def __str__(self):
        return "{" + self.to_text() + "}"


@dataclass(frozen=True)
class BracketReport:
    is_relation: bool
    sigma_plus: int | None = None
    witness: Poly | None = None

    def to_json(self) -> dict:
        if self.is_relation:
            return {"is_relation": True, "sigma_plus": self.sigma_plus}
        return {"is_relation": False, "witness": str(self.witness)}


def parse_vector(text: str, f: Poly) -> ExponentVector:
    """Parse ``rep:exp,rep:exp,...``; an empty string is the zero vector."""
    mapping: dict[Poly, int] = defaultdict(int)
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        rep, sep, exp = chunk.rpartition(":")
        if not sep:
            raise DomainError(f"vector entry {chunk!r} is not of the form rep:exponent")
        try:
            e = int(exp)
        except ValueError as exc:
            raise DomainError(f"exponent {exp!r} is not an integer") from exc
        mapping[parse_poly(rep, f.field)] += e
    return ExponentVector.of(f, mapping)


def _as_residue_poly(a, f: Poly) -> Poly:
    if isinstance(a, Residue) and a.modulus != f:
        raise DomainError("residue modulo a different polynomial")
    return poly_from_any(a, f.field) % f


def sigma_plus(m: ExponentVector) -> int:
    """Sum of entries at residues with monic canonical representative."""
    return sum(e for a, e in m.entries if a.is_monic())


def act(u, m: ExponentVector) -> ExponentVector:
    """u * m, transporting the entry at a to u*a mod f."""
    f = m.modulus
    u = _as_residue_poly(u, f)
    if gcd(u, f).degree != 0:
        raise DomainError(f"{u} is not a unit modulo {f}")
    return ExponentVector.of(f, {(u * a) % f: e for a, e in m.entries})


def sigma_plus_orbit(m: ExponentVector) -> np.ndarray:
    """Sigma_+(u * m) for every unit u, in unit-group order."""
    f = m.modulus
    ring = residue_ring(f)
    units = unit_group(f).codes
    if m.is_zero():
        return np.zeros(units.shape, dtype=np.int64)
    reps = [a for a, _ in m.entries]
    exps = np.array([e for _, e in m.entries], dtype=np.int64)
    return ring.is_monic(ring.multiply_many(units, reps)).astype(np.int64) @ exps


def is_bracket_relation(m: ExponentVector) -> BracketReport:
    """Decide invariance of Sigma_+ under the unit group; report the first failing unit."""
    s = sigma_plus(m)
    if m.is_zero():
        return BracketReport(True, 0)
    orbit = sigma_plus_orbit(m)
    bad = np.flatnonzero(orbit != s)
    if bad.size:
        return BracketReport(False, witness=unit_group(m.modulus).elements[int(bad[0])])
    return BracketReport(True, s)


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------


def pair_vector(a, b, f: Poly) -> ExponentVector:
    """e_a - e_b; the zero vector when a = b (so the relation is reflexive)."""
    a, b = _as_residue_poly(a, f), _as_residue_poly(b, f)
    if a.is_zero() or b.is_zero():
        raise DomainError("pair entries must be nonzero modulo f")
    return ExponentVector.of(f, {a: 1}) - ExponentVector.of(f, {b: 1})


def lift_modulus(m: ExponentVector, F: Poly) -> ExponentVector:
    """Rewrite a/f as (a*F/f)/F; colliding targets add."""
    f = m.modulus
    if not F.is_monic():
        raise DomainError(f"{F} is not monic")
    cof, rem = divmod(F, f)
    if not rem.is_zero():
        raise DomainError(f"{f} does not divide {F}")
    return ExponentVector.of(F, _collect(((a * cof) % F, e) for a, e in m.entries))


def _collect(pairs) -> dict[Poly, int]:
    acc: dict[Poly, int] = defaultdict(int)
    for a, e in pairs:
        acc[a] += e
    return acc


def reflection_vector(a, f: Poly) -> ExponentVector:
    """sum over c in F_q^x of e_{c a}: the reflection formula."""
    a = _as_residue_poly(a, f)
    if gcd(a, f).degree != 0:
        raise DomainError(f"{a} is not coprime to {f}")
    fld = f.field
    return ExponentVector.of(f, _collect((a.scale(c) % f, 1) for c in fld.units()))


def gauss_vector(a, f: Poly, g: Poly) -> ExponentVector:
    """Multiplication formula for r = a/f and g: over the modulus f*g.

    sum over alpha of degree < deg g of e_{a + alpha f}, minus e_{a g}.
    """
    a = _as_residue_poly(a, f)
    if a.is_zero():
        raise DomainError("a must be nonzero modulo f")
    if g.degree < 1 or not g.is_monic():
        raise DomainError(f"{g} must be monic of positive degree")
    fld = f.field
    F = f * g
    ring = residue_ring(F)
    # a + alpha*f is already reduced mod F, so the targets are code sums
    alphas = np.arange(fld.q**g.degree, dtype=np.int64)
    shifted = ring.multiply_many(alphas, [f], g.degree)[:, 0]
    targets = ring.add_codes(shifted, np.full_like(shifted, a.code()))
    acc: dict[int, int] = defaultdict(int)
    for c in targets.tolist():
        acc[c] += 1
    acc[ring.code(a * g)] -= 1
    # codes are reduced and nonzero (a is nonzero mod f), so skip the normalizing constructor
    entries = tuple((Poly.from_code(fld, c), e) for c, e in sorted(acc.items()) if e)
    return ExponentVector(F, entries)


def translation_vector(a, b, f: Poly) -> ExponentVector:
    """Gamma((a + b f)/f) against Gamma(a/f); always zero on residues."""
    a = _as_residue_poly(a, f)
    b = poly_from_any(b, f.field)
    return ExponentVector.of(f, {a + b * f: 1}) - ExponentVector.of(f, {a: 1})


def expected_gauss_sigma(q: int, d: int) -> int:
    return (q**d - 1) // (q - 1)


__all__ = [
    "BracketReport",
    "ExponentVector",
    "act",
    "expected_gauss_sigma",
    "gauss_vector",
    "is_bracket_relation",
    "lift_modulus",
    "pair_vector",
    "parse_vector",
    "reflection_vector",
    "sigma_plus",
    "sigma_plus_orbit",
    "translation_vector",
]
