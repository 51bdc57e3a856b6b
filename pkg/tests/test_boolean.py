import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _strategies import permutations, polynomials
from qergodic.boolean import (
    BooleanEngine,
    BooleanState,
    boolean_expectation,
    boolean_permutation_average,
    boolean_state_invariance_check,
    check_boolean_relations,
    e_mixing_experiment,
    expectation_operator,
    matrix_unit,
    shift_fixed_points,
)
from qergodic.errors import FactorialBlowup, GammaOutOfRange, WindowTooSmall
from qergodic.operators import ModeWindow
from qergodic.words import Polynomial, Shift, a, ad, star


def dense_oracle(p: Polynomial, n_modes: int) -> np.ndarray:
    """Hand-built matrix units on C + C^n (index 0 = vacuum)."""
    dim = n_modes + 1

    def unit(r, c):
        m = np.zeros((dim, dim), dtype=complex)
        m[r, c] = 1
        return m

    out = np.zeros((dim, dim), dtype=complex)
    for w, coeff in p:
        m = np.eye(dim, dtype=complex)
        for l in w:
            m = m @ (unit(l.mode + 1, 0) if l.is_creator else unit(0, l.mode + 1))
        out += coeff * m
    return out


def test_relations_exact():
    rep = check_boolean_relations(BooleanEngine(ModeWindow(0, 4)))
    assert rep.max_defect == 0.0


@given(polynomials(0, 3, 4, 4))
@settings(max_examples=80, deadline=None)
def test_materialize_matches_hand_built_units(p):
    eng = BooleanEngine(ModeWindow(0, 3))
    assert np.array_equal(eng.materialize(p).dense(), dense_oracle(p, 4))


def test_basis_vector_labels():
    eng = BooleanEngine(ModeWindow(0, 6))
    assert eng.basis_vector("#")[0] == 1
    assert eng.basis_vector("e5")[6] == 1
    assert np.array_equal(eng.basis_vector(5), eng.basis_vector("e5"))


def test_expectation_properties():
    eng = BooleanEngine(ModeWindow(0, 3))
    K = eng.materialize(ad(0) * a(1) + a(0) * ad(0) * 3 + ad(2))
    pair = boolean_expectation(K, 2.0)
    assert pair == (3, 2)
    E = expectation_operator(eng, pair)
    again = expectation_operator(eng, boolean_expectation(expectation_operator(eng, (pair[0], 0)), pair[1]))
    assert (E - again).max_abs() == 0
    assert (expectation_operator(eng, (0, 1)) - eng.identity()).max_abs() == 0


def test_e_mixing_tail_exact():
    eng = BooleanEngine(ModeWindow(0, 12))
    out = e_mixing_experiment(eng, ad(0) * a(0), eng.basis_vector("e5"), 12)
    assert out[5] == 1.0
    assert all(v == 0.0 for i, v in enumerate(out) if i != 5)
    with pytest.raises(WindowTooSmall):
        e_mixing_experiment(BooleanEngine(ModeWindow(0, 4)), ad(0) * a(0), np.eye(6)[0], 12)


def test_permutation_average_examples():
    eng = BooleanEngine(ModeWindow(0, 5))
    J = range(6)
    P = matrix_unit(eng.basis, "#", "#")
    assert (boolean_permutation_average(eng, P, J) - P).max_abs() == 0
    avg = boolean_permutation_average(eng, matrix_unit(eng.basis, 0, 0), J).dense()
    assert np.allclose(avg, np.diag([0] + [1 / 6] * 6))
    avg = boolean_permutation_average(eng, matrix_unit(eng.basis, "#", 0), J).dense()
    assert np.allclose(avg[0, 1:], 1 / 6) and np.allclose(avg[1:, :], 0)


def test_permutation_average_distance_shrinks():
    eng = BooleanEngine(ModeWindow(0, 5))
    A = matrix_unit(eng.basis, 0, 0)
    dists = [boolean_permutation_average(eng, A, range(n)).max_abs() for n in range(1, 7)]
    assert all(d <= 1 / n + 1e-15 for n, d in zip(range(1, 7), dists))
    assert all(y < x for x, y in zip(dists, dists[1:]))


def test_factorial_guard():
    eng = BooleanEngine(ModeWindow(0, 9))
    with pytest.raises(FactorialBlowup):
        boolean_permutation_average(eng, eng.identity(), range(9))


def test_shift_fixed_points():
    fixed = shift_fixed_points(ModeWindow(0, 4))
    assert len(fixed) == 2
    P = np.zeros((6, 6))
    P[0, 0] = 1
    span = np.array([f.ravel() for f in fixed])
    for target in (P, np.eye(6)):
        coef, *_ = np.linalg.lstsq(span.T, target.ravel(), rcond=None)
        assert np.allclose(span.T @ coef, target.ravel())


def test_state_values():
    assert BooleanState(0.3)(a(0) * ad(0)) == pytest.approx(0.7)
    assert BooleanState(0.3)(ad(0) * a(0) + 2) == pytest.approx(2)
    with pytest.raises(GammaOutOfRange):
        BooleanState(-0.1)


@given(polynomials(0, 3, 4, 3), st.floats(0, 1), permutations(range(5)), st.integers(-3, 3))
@settings(max_examples=60, deadline=None)
def test_state_invariance(p, gamma, g, k):
    assert boolean_state_invariance_check(gamma, [p], [g, Shift(k)]).passed


@given(polynomials(0, 3, 3, 3), st.floats(0, 1))
@settings(max_examples=60, deadline=None)
def test_state_positive(p, gamma):
    assert BooleanState(gamma)(star(p) * p).real >= -1e-12
