import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _strategies import polynomials
from qergodic.errors import ParameterOutOfRange
from qergodic.operators import ModeWindow
from qergodic.states import SegmentState, VacuumState, VectorState, make_engine
from qergodic.words import a, ad, star


@given(polynomials(0, 3, 4, 3), st.sampled_from(["boolean", "monotone"]))
@settings(max_examples=60, deadline=None)
def test_local_vacuum_matches_full_window(p, kind):
    eng = make_engine(kind, ModeWindow(0, 3))
    assert VacuumState(kind)(p) == pytest.approx(eng.vacuum_expectation(eng.materialize(p)), abs=1e-12)


@given(polynomials(0, 2, 4, 3), st.sampled_from([0.0, 0.4, -0.8]))
@settings(max_examples=40, deadline=None)
def test_local_q_vacuum_matches_deep_engine(p, q):
    eng = make_engine("q", ModeWindow(0, 2), q=q, depth=4)
    assert VacuumState("q", q)(p) == pytest.approx(eng.vacuum_expectation(eng.materialize(p)), abs=1e-12)


def test_vacuum_examples():
    assert VacuumState("q", 0.5)(a(0) * ad(0)) == 1
    assert VacuumState("monotone")(a(1) * a(0) * ad(0) * ad(1)) == 1
    assert VacuumState("monotone")(a(0) * a(1) * ad(1) * ad(0)) == 0
    with pytest.raises(ParameterOutOfRange):
        VacuumState("bosonic")
    with pytest.raises(ParameterOutOfRange):
        SegmentState("q", 0.5)


def test_segment_state():
    phi = SegmentState("monotone", 0.3)
    assert phi(a(0) * ad(0) + 2) == pytest.approx(0.7 + 2)
    assert phi.param == 0.3 and phi.label == "monotone"


def test_vector_state_gram_normalized():
    eng = make_engine("q", ModeWindow(0, 1), q=0.5, depth=2)
    xi = np.zeros(eng.dim)
    xi[eng.basis.index[(0, 0)]] = 1.0  # |e0 e0|^2 = 1 + q
    phi = VectorState(eng, xi)
    assert phi(a(0) * 0 + 1) == pytest.approx(1.0)
    # a(0) e0 e0 = (1 + q) e0, so ad(0) a(0) has expectation 1 + q there
    assert phi(ad(0) * a(0)) == pytest.approx(1.5)


@given(polynomials(0, 1, 2, 3))
@settings(max_examples=30, deadline=None)
def test_vector_state_positive(p):
    eng = make_engine("q", ModeWindow(0, 1), q=0.3, depth=4)
    xi = np.zeros(eng.dim)
    xi[:3] = [1.0, 0.5, -0.25]
    assert VectorState(eng, xi)(star(p) * p).real >= -1e-12
