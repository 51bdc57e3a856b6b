import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from _strategies import group_words, permutations
from qergodic.errors import LambdaOutOfRange, ParseError, SupportsOverlap
from qergodic.freegroup import (
    GroupAlgebraElement,
    GroupWord,
    HaagerupState,
    act_on_word,
    block_singleton_check,
    haagerup,
    haagerup_positivity_probe,
    parse_group_word,
    product_state_check,
    random_reduced_word,
    reduce,
    symmetry_check,
)
from qergodic.words import Shift


def test_reduction_and_text():
    w = parse_group_word("g1 g2 g2^-1 g3")
    assert str(w) == "g1 g3"
    assert str(GroupWord.identity()) == "e"
    assert parse_group_word("e") == GroupWord.identity()
    with pytest.raises(ValueError):
        GroupWord([(1, 1), (1, -1)])
    with pytest.raises(ParseError):
        parse_group_word("h1")


@given(group_words(), group_words(), group_words())
def test_group_axioms(x, y, z):
    assert (x * y) * z == x * (y * z)
    assert x * x.inverse() == GroupWord.identity()
    assert (x * y).inverse() == y.inverse() * x.inverse()
    assert str(parse_group_word(str(x))) == str(x)


@given(group_words(), permutations(range(4)))
def test_relabeling_keeps_length(w, g):
    assert len(act_on_word(g, w)) == len(w)
    assert symmetry_check(0.7, w, g)
    assert symmetry_check(0.7, w, Shift(3))


def test_haagerup_values():
    assert haagerup(1.0, parse_group_word("g1 g2")) == math.exp(-2)
    assert haagerup(math.inf, GroupWord.identity()) == 1
    assert haagerup(math.inf, parse_group_word("g1")) == 0
    with pytest.raises(LambdaOutOfRange):
        HaagerupState(0)


@pytest.mark.parametrize("lam", [0.5, 1.0, 2.0])
def test_block_singleton_counterexample(lam):
    rep = block_singleton_check(lam, parse_group_word("g1"), parse_group_word("g2"), parse_group_word("g1^-1"))
    assert rep.lhs == math.exp(-3 * lam)
    assert rep.rhs == math.exp(-lam)
    assert not rep.equal and rep.in_hypothesis


@given(group_words((0, 1, 2)), group_words((3, 4, 5)), st.floats(0.1, 3))
def test_product_state_on_disjoint_supports(v, w, lam):
    rep = product_state_check(lam, v, w, strict=True)
    assert rep.equal
    assert rep.lhs == pytest.approx(rep.rhs, rel=1e-14)


def test_product_state_overlap_flags():
    v, w = parse_group_word("g1"), parse_group_word("g1^-1")
    rep = product_state_check(1.0, v, w)
    assert not rep.in_hypothesis and not rep.equal
    with pytest.raises(SupportsOverlap):
        product_state_check(1.0, v, w, strict=True)


@pytest.mark.parametrize("lam", [0.3, 1.0, 2.5])
def test_positivity_probe(lam):
    rng = np.random.Generator(np.random.PCG64(7))
    words = []
    while len(words) < 20:
        w = random_reduced_word(rng, 4, [0, 1, 2])
        if w not in words:
            words.append(w)
    assert haagerup_positivity_probe(lam, words) > -1e-10


def test_group_algebra():
    x = GroupAlgebraElement({parse_group_word("g1"): 2.0, GroupWord.identity(): 1j})
    assert x.star() == GroupAlgebraElement({parse_group_word("g1^-1"): 2.0, GroupWord.identity(): -1j})
    val = HaagerupState(1.0)(x.star() * x)
    assert val.real >= 0 and abs(val.imag) < 1e-15


def test_random_words_are_reduced():
    rng = np.random.Generator(np.random.PCG64(0))
    for _ in range(200):
        w = random_reduced_word(rng, 6, [0, 1])
        assert reduce(w.letters) == w
