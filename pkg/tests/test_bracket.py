import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ffgamma.bracket import (
    ExponentVector,
    act,
    expected_gauss_sigma,
    gauss_vector,
    is_bracket_relation,
    lift_modulus,
    pair_vector,
    parse_vector,
    reflection_vector,
    sigma_plus,
    sigma_plus_orbit,
    translation_vector,
)
from ffgamma.cm_analyzer import classify, stabilizer
from ffgamma.errors import DomainError
from ffgamma.ffpoly import Poly, enumerate_monics, field, parse_poly, unit_group


def P(text, q):
    return parse_poly(text, field(q))


def V(text, f, q):
    return parse_vector(text, P(f, q))


def brute_relation(m):
    """Sigma_+ of u*m for each unit, straight from the definitions."""
    f = m.modulus
    return {u: sum(e for a, e in m.entries if ((u * a) % f).is_monic()) for u in unit_group(f)}


# -- examples ---------------------------------------------------------------------------


def test_sigma_plus_examples():
    assert sigma_plus(ExponentVector.zero(P("t", 3))) == 0
    assert sigma_plus(V("1:1,2:1", "t", 3)) == 1
    assert sigma_plus(V("1:1,2:-1", "t", 3)) == 1


def test_act_examples():
    m = V("1:1,2:-1,", "t", 3)
    assert act(1, m) == m
    assert act(2, V("1:1", "t", 3)) == V("2:1", "t", 3)
    with pytest.raises(DomainError):
        act(P("t", 3), V("1:1", "t^2+2*t", 3))


def test_bracket_examples():
    r = is_bracket_relation(ExponentVector.zero(P("t", 3)))
    assert r.is_relation and r.sigma_plus == 0
    r = is_bracket_relation(V("1:1,2:1", "t", 3))
    assert r.to_json() == {"is_relation": True, "sigma_plus": 1}
    r = is_bracket_relation(V("1:1,2:-1", "t", 3))
    assert r.to_json() == {"is_relation": False, "witness": "2"}


def test_pair_examples():
    f3, f5 = P("t^2-t", 3), P("t^2-t", 5)
    assert is_bracket_relation(pair_vector(1, P("t+1", 3), f3)).is_relation
    assert not is_bracket_relation(pair_vector(1, P("t+1", 5), f5)).is_relation
    z = pair_vector(P("t+2", 3), P("t+2", 3), f3)
    assert z.is_zero() and is_bracket_relation(z).is_relation
    with pytest.raises(DomainError):
        pair_vector(P("t", 3), 1, P("t", 3))


def test_lift_examples():
    m = V("1:1", "t", 3)
    assert lift_modulus(m, P("t", 3)) == m
    assert lift_modulus(m, P("t^2-t", 3)) == V("t+2:1", "t^2-t", 3)
    with pytest.raises(DomainError):
        lift_modulus(m, P("t^2+1", 3))


def test_lift_multiplies_by_cofactor():
    f = P("t", 3)
    m = ExponentVector.of(f, {P("1", 3): 2, P("2", 3): -1})
    lifted = lift_modulus(m, P("t^2", 3))
    assert lifted == ExponentVector.of(P("t^2", 3), {P("t", 3): 2, P("2*t", 3): -1})


def test_reflection_and_gauss_examples():
    m = reflection_vector(1, P("t", 3))
    assert m == V("1:1,2:1", "t", 3)
    g = gauss_vector(1, P("t", 3), P("t+2", 3))
    r = is_bracket_relation(g)
    assert r.is_relation and r.sigma_plus == 1 == expected_gauss_sigma(3, 1)
    # the vector lives over t(t+2): e_1 + e_{1+t} + e_{1+2t} - e_{t+2}
    assert g == V("1:1,t+1:1,2*t+1:1,t+2:-1", "t^2+2*t", 3)


def test_reflection_q2_single_entry():
    F = field(2)
    for f in enumerate_monics(F, 2):
        for a in unit_group(f):
            m = reflection_vector(a, f)
            assert m == ExponentVector.of(f, {a: 1})
            assert sigma_plus(m) == int(a.is_monic())


def test_translation_is_zero_on_residues():
    f = P("t^2+1", 3)
    assert translation_vector(P("t", 3), P("t+2", 3), f).is_zero()


def test_parse_vector_grammar():
    f = P("t^2+1", 3)
    m = parse_vector(" t+1 : 2 , 1:-1, t+1:1", f)
    assert m == ExponentVector.of(f, {P("t+1", 3): 3, P("1", 3): -1})
    assert m.to_text() == "1:-1,t+1:3"
    assert parse_vector("", f).is_zero()
    assert parse_vector("t^2+2:1", f) == parse_vector("1:1", f)
    for bad in ("1", "1:x", "t^2+1:1", "y:1"):
        with pytest.raises(DomainError):
            parse_vector(bad, f)


def test_modulus_must_be_monic_nonconstant():
    with pytest.raises(DomainError):
        ExponentVector.zero(P("2*t", 3))
    with pytest.raises(DomainError):
        ExponentVector.zero(P("1", 3))


def test_mixed_moduli_rejected():
    with pytest.raises(DomainError):
        V("1:1", "t", 3) + V("1:1", "t+1", 3)


# -- the decision procedure against brute force -----------------------------------------


@pytest.mark.parametrize("q", [2, 3, 4])
def test_orbit_matches_definition(q):
    rng = random.Random(q)
    F = field(q)
    for f in list(enumerate_monics(F, 2))[:6]:
        residues = [Poly.from_code(F, c) for c in range(1, q**2)]
        m = ExponentVector.of(f, {a: rng.randint(-3, 3) for a in rng.sample(residues, min(4, len(residues)))})
        brute = brute_relation(m)
        assert list(sigma_plus_orbit(m)) == [brute[u] for u in unit_group(f)]
        r = is_bracket_relation(m)
        assert r.is_relation == (len(set(brute.values())) <= 1)


# -- properties -------------------------------------------------------------------------


def vectors(q, f):
    F = field(q)
    n = q**f.degree

    @st.composite
    def build(draw):
        items = draw(st.dictionaries(st.integers(1, n - 1), st.integers(-4, 4), max_size=6))
        return ExponentVector.of(f, {Poly.from_code(F, c): e for c, e in items.items()})

    return build()


MODULI = [(2, "t^3+t"), (3, "t^2+2*t"), (3, "t^2+1"), (4, "t^2+t"), (5, "t^2+4*t")]


@pytest.mark.parametrize("q,f", MODULI)
@settings(max_examples=40, deadline=None)
@given(data=st.data())
def test_sigma_plus_additive_and_act_linear(q, f, data):
    f = P(f, q)
    m, n = data.draw(vectors(q, f)), data.draw(vectors(q, f))
    assert sigma_plus(m + n) == sigma_plus(m) + sigma_plus(n)
    assert sigma_plus(-m) == -sigma_plus(m)
    u = data.draw(st.sampled_from(list(unit_group(f))))
    assert act(u, m + n) == act(u, m) + act(u, n)
    assert lift_modulus(m + n, f * f) == lift_modulus(m, f * f) + lift_modulus(n, f * f)


def random_relation(f, rng):
    """Differences e_{sa} - e_a with s in the stabilizer, plus reflection vectors."""
    ug = list(unit_group(f))
    H = stabilizer(f).members
    acc = ExponentVector.zero(f)
    for _ in range(3):
        a, u = rng.choice(ug), rng.choice(H)
        acc = acc + (ExponentVector.of(f, {(u * a) % f: 1}) - ExponentVector.of(f, {a: 1})).scale(rng.randint(-2, 2))
        acc = acc + reflection_vector(rng.choice(ug), f).scale(rng.randint(-2, 2))
    return acc


@pytest.mark.parametrize("q,f", MODULI)
@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_relations_form_a_subgroup(q, f, seed):
    f = P(f, q)
    rng = random.Random(seed)
    m, n = random_relation(f, rng), random_relation(f, rng)
    rm, rn = is_bracket_relation(m), is_bracket_relation(n)
    assert rm.is_relation and rn.is_relation
    s = is_bracket_relation(m + n)
    assert s.is_relation and s.sigma_plus == rm.sigma_plus + rn.sigma_plus
    neg = is_bracket_relation(-m)
    assert neg.is_relation and neg.sigma_plus == -rm.sigma_plus


@pytest.mark.parametrize("q,f", MODULI)
def test_unit_action_preserves_relations(q, f):
    f = P(f, q)
    rng = random.Random(7)
    for _ in range(10):
        m = random_relation(f, rng)
        r = is_bracket_relation(m)
        assert r.is_relation
        for u in unit_group(f):
            ru = is_bracket_relation(act(u, m))
            assert ru.is_relation and ru.sigma_plus == r.sigma_plus


def small_moduli(qs=(2, 3), max_deg=3):
    for q in qs:
        for d in range(1, max_deg + 1):
            for f in enumerate_monics(field(q), d):
                yield f


@pytest.mark.parametrize("f", list(small_moduli()), ids=lambda f: f"q{f.field.q}-{f}")
def test_pair_relation_is_coset_equivalence(f):
    classes = classify(f).classes
    where = {a: i for i, c in enumerate(classes) for a in c}
    units = list(unit_group(f))
    for a, b in itertools.product(units, repeat=2):
        related = is_bracket_relation(pair_vector(a, b, f)).is_relation
        assert related == (where[a] == where[b])


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_functional_equation_vectors_are_relations(q):
    F = field(q)
    moduli = [f for d in (1, 2) for f in enumerate_monics(F, d)]
    rng = random.Random(q)
    for f in moduli:
        for a in unit_group(f):
            r = is_bracket_relation(reflection_vector(a, f))
            assert r.is_relation and r.sigma_plus == 1
        residues = [Poly.from_code(F, c) for c in range(1, q**f.degree)]
        for g in [g for d in (1, 2) for g in enumerate_monics(F, d)]:
            if q == 5 and f.degree == 2 and g.degree == 2 and rng.random() > 0.1:
                continue
            a = rng.choice(residues)
            r = is_bracket_relation(gauss_vector(a, f, g))
            assert r.is_relation and r.sigma_plus == expected_gauss_sigma(q, g.degree)


@pytest.mark.parametrize("q", [2, 3])
def test_lift_preserves_relation_status(q):
    """Empirical check over every f | F with deg F <= 3."""
    F = field(q)
    rng = random.Random(11 * q)
    for D in (2, 3):
        for big in enumerate_monics(F, D):
            for d in range(1, D):
                for f in enumerate_monics(F, d):
                    if not (big % f).is_zero():
                        continue
                    residues = [Poly.from_code(F, c) for c in range(1, q**d)]
                    for _ in range(4):
                        m = ExponentVector.of(f, {a: rng.randint(-2, 2) for a in rng.sample(residues, min(3, len(residues)))})
                        for cand in (m, random_relation(f, rng)):
                            lo, hi = is_bracket_relation(cand), is_bracket_relation(lift_modulus(cand, big))
                            assert lo.is_relation == hi.is_relation
                            if lo.is_relation:
                                assert lo.sigma_plus == hi.sigma_plus
