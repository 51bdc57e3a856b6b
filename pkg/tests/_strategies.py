"""Shared hypothesis strategies."""

from hypothesis import strategies as st

from qergodic.freegroup import reduce
from qergodic.words import Kind, Letter, Permutation, Polynomial


def letters(lo=0, hi=4):
    return st.builds(Letter, st.integers(lo, hi), st.sampled_from([Kind.ANNIHILATOR, Kind.CREATOR]))


def words(lo=0, hi=4, max_len=6, min_len=0):
    return st.lists(letters(lo, hi), min_size=min_len, max_size=max_len).map(tuple)


coeffs = st.complex_numbers(min_magnitude=0.0, max_magnitude=4.0, allow_nan=False, allow_infinity=False).map(
    lambda z: complex(round(z.real, 3), round(z.imag, 3))
)


def polynomials(lo=0, hi=4, max_len=5, max_terms=4):
    return st.lists(st.tuples(words(lo, hi, max_len), coeffs), max_size=max_terms).map(Polynomial)


def permutations(points=range(6)):
    pts = list(points)
    return st.permutations(pts).map(lambda img: Permutation(dict(zip(pts, img))))


def group_words(gens=(0, 1, 2, 3), max_len=6):
    syll = st.tuples(st.sampled_from(gens), st.sampled_from([1, -1]))
    return st.lists(syll, max_size=max_len).map(reduce)
