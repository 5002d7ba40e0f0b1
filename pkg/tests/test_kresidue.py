import pytest
from hypothesis import given, settings, strategies as st

from isotower import kresidue as kr
from isotower.kresidue import AbelianGroupSpec, KPolynomial, RepRingElem, Representation

C2 = AbelianGroupSpec((2,), 0)
ONE = RepRingElem.one(C2)
X = RepRingElem.of_character(C2, (1,))
TRIV, SIGN = (0,), (1,)


def rep(group, *chars):
    return Representation(group, tuple(chars))


def z_minus(group, ch):
    return KPolynomial(group, [-RepRingElem.of_character(group, ch), RepRingElem.one(group)])


# --- ring arithmetic ----------------------------------------------------

def test_cyclic_exponents_reduce():
    assert X * X == ONE
    assert RepRingElem(C2, {(3,): 2}) == 2 * X
    assert (X - X).is_zero()
    assert str(ONE - X) == "1 - x"


def test_torus_ring_is_laurent():
    t2 = AbelianGroupSpec((), 2)
    a = RepRingElem.of_character(t2, (1, -2))
    assert a * a.inverse() == RepRingElem.one(t2)
    assert str(a) == "x1*x2^-2"


def test_group_validation():
    with pytest.raises(kr.GroupSpecError):
        AbelianGroupSpec((0,), 0)
    with pytest.raises(kr.GroupSpecError):
        AbelianGroupSpec((2,), -1)
    with pytest.raises(kr.GroupSpecError):
        kr.parse_group({"cyclic": [2], "dihedral": 4})
    with pytest.raises(kr.GroupSpecError):
        kr.parse_group({"cyclic": "2"})
    with pytest.raises(kr.GroupSpecError):
        kr.parse_representation(C2, [[0, 1]])
    assert kr.parse_group({"cyclic": [2, 3], "torus_rank": 1}) == AbelianGroupSpec((2, 3), 1)


def test_mixing_groups_is_an_error():
    with pytest.raises(kr.GroupSpecError):
        ONE + RepRingElem.one(AbelianGroupSpec((3,), 0))


# --- exterior powers and f_V ------------------------------------------

def test_exterior_powers_examples():
    t2 = AbelianGroupSpec((), 2)
    lam = kr.exterior_powers(rep(t2, (1, 0), (0, 1)))
    assert lam[0] == RepRingElem.one(t2)
    assert lam[2] == RepRingElem.of_character(t2, (1, 1))
    lam = kr.exterior_powers(rep(C2, TRIV, SIGN))
    assert lam[1] == ONE + X and lam[2] == X


def test_k_polynomial_examples():
    assert kr.k_polynomial(rep(C2)) == KPolynomial(C2, [ONE])
    assert kr.k_polynomial(rep(C2, TRIV, SIGN)) == KPolynomial(C2, [X, -(ONE + X), ONE])
    # (z - 1)^3
    assert kr.k_polynomial(rep(C2, TRIV, TRIV, TRIV)) == KPolynomial(C2, [-1, 3, -3, 1])
    assert str(kr.k_polynomial(rep(C2, TRIV, SIGN))) == "z^2 + (-1 - x)*z + x"


def test_k_polynomial_is_monic_with_unit_constant():
    g = AbelianGroupSpec((3,), 1)
    f = kr.k_polynomial(rep(g, (1, 2), (2, -1), (0, 0)))
    assert f.is_monic()
    assert f.coeff(0).unit_character() is not None


# --- residues -----------------------------------------------------------

def test_residue_examples():
    f = kr.k_polynomial(rep(C2, TRIV, SIGN))
    assert kr.residue(KPolynomial.monomial(C2, 2), f) == ONE + X
    assert kr.residue(KPolynomial.monomial(C2, 1), f) == ONE
    assert kr.residue(KPolynomial.monomial(C2, 0), f).is_zero()
    g = KPolynomial(C2, [X, ONE, 3 * X])
    assert kr.residue(g * f, f).is_zero()


def test_residue_needs_monic():
    with pytest.raises(ValueError):
        kr.residue(KPolynomial.monomial(C2, 1), KPolynomial(C2, [ONE, 2 * ONE]))


def test_gysin_values_examples():
    assert kr.gysin_values(rep(C2, SIGN)) == [ONE]
    g = AbelianGroupSpec((4,), 1)
    r = kr.gysin_values(rep(g, (1, 3), (2, -1), (3, 0)))
    assert r == [RepRingElem.zero(g), RepRingElem.zero(g), RepRingElem.one(g)]


def test_normalization_identity():
    v = rep(AbelianGroupSpec((5,), 1), (1, 1), (4, 0), (2, -3), (0, 2))
    assert kr.normalization_sum(v) == KPolynomial(v.group, [RepRingElem.one(v.group)])


def test_diagonal_class_examples():
    e = kr.diagonal_class(rep(C2, SIGN))
    assert e.terms == {(0, 0): ONE}
    e = kr.diagonal_class(rep(C2, TRIV, SIGN))
    assert e.terms == {(1, 0): ONE, (0, 1): ONE, (0, 0): -(ONE + X)}
    with pytest.raises(ValueError):
        kr.diagonal_class(rep(C2))


# --- divisibility and the obstruction --------------------------------

def test_divides_examples():
    f = kr.k_polynomial(rep(C2, TRIV, SIGN))
    ok, quo = kr.divides(f, f)
    assert ok and quo == KPolynomial(C2, [ONE])
    assert kr.divides(z_minus(C2, TRIV), z_minus(C2, SIGN)) == (False, None)
    v0, v2 = rep(C2, SIGN), rep(C2, TRIV, SIGN)
    ok, quo = kr.divides(kr.k_polynomial(v0), kr.k_polynomial(v0 + v2))
    assert ok and quo == kr.k_polynomial(v2)


def test_obstruction_examples():
    v = kr.obstruction_check(rep(C2, TRIV), rep(C2, SIGN))
    assert not v.divides and not v.subrepresentation
    assert v.residues == [ONE - X]
    v = kr.obstruction_check(rep(C2, TRIV), rep(C2, TRIV, SIGN))
    assert v.divides and v.subrepresentation and all(r.is_zero() for r in v.residues)
    same = rep(C2, SIGN, SIGN)
    v = kr.obstruction_check(same, same)
    assert v.divides and v.subrepresentation
    with pytest.raises(ValueError):
        kr.obstruction_check(rep(C2, TRIV, SIGN), rep(C2, TRIV))


def test_multiplicity_matters():
    # V0 = 2 trivial is not inside V1 = trivial + sign
    v = kr.obstruction_check(rep(C2, TRIV, TRIV), rep(C2, TRIV, SIGN))
    assert not v.divides and not v.subrepresentation


def test_json_rendering():
    out = kr.obstruction_check(rep(C2, TRIV), rep(C2, SIGN)).to_json()
    assert out["residues"] == [[{"exponents": [0], "coeff": 1}, {"exponents": [1], "coeff": -1}]]
    assert out["residues_text"] == ["1 - x"]


characters = st.tuples(st.integers(0, 5), st.integers(-3, 3))


@settings(max_examples=100, deadline=None)
@given(st.lists(characters, max_size=5), st.lists(characters, max_size=3))
def test_product_and_divisibility_properties(c0, c2):
    g = AbelianGroupSpec((6,), 1)
    v0, v2 = Representation(g, tuple(c0)), Representation(g, tuple(c2))
    assert kr.k_polynomial(v0) == kr.linear_factor_product(v0)
    ok, quo = kr.divides(kr.k_polynomial(v0), kr.k_polynomial(v0 + v2))
    assert ok and quo == kr.k_polynomial(v2)
    if v0.dim:
        e = kr.diagonal_class(v0)
        f = kr.k_polynomial(v0)
        assert e.times_z_minus_w() == kr.BivariatePolynomial.in_z(f) - kr.BivariatePolynomial.in_w(f)
