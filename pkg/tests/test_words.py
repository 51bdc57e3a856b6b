import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _strategies import permutations, polynomials
from qergodic.errors import ParseError
from qergodic.words import (
    Kind,
    Letter,
    Permutation,
    Polynomial,
    Shift,
    a,
    act,
    ad,
    format_polynomial,
    parse,
    star,
    support,
)


def test_letter_adjoint_and_text():
    l = Letter(3, Kind.CREATOR)
    assert l.adjoint() == Letter(3, Kind.ANNIHILATOR)
    assert str(l) == "ad(3)"
    assert str(l.adjoint()) == "a(3)"


def test_polynomial_basic_algebra():
    p = ad(0) * a(1) + 2
    assert p.identity_coefficient() == 2
    assert p.max_length() == 2
    assert (p - p) == Polynomial.zero()
    assert not Polynomial.zero()
    assert Polynomial.one() * p == p == p * Polynomial.one()


def test_star_of_word():
    assert star(ad(0) * a(1)) == ad(1) * a(0)
    assert star(1j * a(2)) == -1j * ad(2)


@given(polynomials(), polynomials())
def test_star_is_antihomomorphism(p, q):
    assert star(p * q) == star(q) * star(p)
    assert star(star(p)) == p


@given(polynomials(), polynomials(), st.integers(-5, 5))
def test_shift_is_homomorphism(p, q, n):
    g = Shift(n)
    assert act(g, p * q) == act(g, p) * act(g, q)
    assert act(g, p + q) == act(g, p) + act(g, q)
    assert act(g, star(p)) == star(act(g, p))


@given(polynomials(), st.integers(-5, 5))
def test_support_shifts(p, n):
    assert support(act(Shift(n), p)) == frozenset(m + n for m in support(p))


@given(polynomials(), permutations(), permutations())
def test_permutation_action_composes(p, g, h):
    assert act(g.compose(h), p) == act(g, act(h, p))
    assert act(g.inverse(), act(g, p)) == p


@given(polynomials())
@settings(max_examples=60)
def test_text_round_trip(p):
    assert parse(format_polynomial(p)) == p


def test_imaginary_coefficients_print_with_sign():
    p = 1 - 1j * a(0) + (-2 + 3j) * ad(1)
    text = format_polynomial(p)
    assert "+ -" not in text and "-0" not in text
    assert parse(text) == p


def test_parse_examples():
    assert parse("ad(0) a(1)") == ad(0) * a(1)
    assert parse("2 * ad(0) - 0.5 * a(1) + 1") == 2 * ad(0) - 0.5 * a(1) + 1
    assert parse("(1+2j) * a(0)") == (1 + 2j) * a(0)
    assert parse("1") == Polynomial.one()
    with pytest.raises(ParseError):
        parse("b(0)")


def test_permutation_must_be_bijection():
    with pytest.raises(ValueError):
        Permutation({0: 1, 1: 1})
    with pytest.raises(ValueError):
        Permutation({0: 1})
    t = Permutation.transposition(0, 1)
    assert t(0) == 1 and t(1) == 0 and t(5) == 5
    assert t.compose(t) == Permutation({})


def test_shift_group_structure():
    assert Shift(2).compose(Shift(3)) == Shift(5)
    assert Shift(2).inverse() == Shift(-2)
