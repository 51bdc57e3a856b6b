import numpy as np
import pytest

from qergodic.errors import KeyConcatenationInvalid, UnknownLabel
from qergodic.moments import (
    MomentKey,
    MomentTable,
    concatenate,
    conjugate_symmetry_check,
    consistency_check,
    enumerate_keys,
    exchangeability_check,
    fock_table,
    haagerup_table,
    normalize_label,
    permutations_of,
    positivity_check,
    remove_unit,
    stationarity_check,
    symsh_verification,
)
from qergodic.states import SegmentState, VacuumState
from qergodic.words import Permutation

K = MomentKey


def test_key_invariants():
    with pytest.raises(ValueError):
        K((0, 0), ("a", "a"))
    assert K((0,), ("a.ad",)).labels == ("a·ad",)
    assert normalize_label("1·a·1") == "a"
    assert normalize_label("1") == "1"


def test_evaluate_examples():
    q = fock_table(VacuumState("q", 0.4))
    assert q(K((0,), ("ad·a",))) == 0
    b = fock_table(VacuumState("boolean"))
    assert b(K((0, 1), ("x", "x"))) == 0
    assert b(K((0, 1, 0), ("x", "x", "x"))) == 0
    assert b(K((0,), ("a·ad",))) == 1
    with pytest.raises(UnknownLabel):
        b(K((0,), ("z",)))


def test_adjoint_key():
    t = fock_table(VacuumState("boolean"))
    assert t.adjoint_key(K((0, 1), ("a", "a·x"))) == K((1, 0), ("x·ad", "ad"))


@pytest.mark.parametrize(
    "table",
    [
        fock_table(VacuumState("q", 0.3)),
        fock_table(SegmentState("boolean", 0.5)),
        fock_table(VacuumState("monotone")),
        haagerup_table(0.7),
    ],
    ids=["q", "boolean", "monotone", "haagerup"],
)
def test_engine_tables_positive_and_conjugate_symmetric(table):
    labels = ["g", "g^-1"] if table.name == "haagerup" else ["a", "ad", "x"]
    keys = enumerate_keys([0, 1, 2], labels, 2)
    rng = np.random.Generator(np.random.PCG64(3))
    half = [K.unit()] + [keys[i] for i in rng.choice(len(keys), 10, replace=False)]
    assert positivity_check(table, half) >= -1e-10
    assert conjugate_symmetry_check(table, keys, tol=1e-12).passed


def test_positivity_unit_and_tampered():
    t = fock_table(VacuumState("boolean"))
    assert positivity_check(t, [K.unit()]) == 1.0
    hand = MomentTable(entries={K((0,), ("x·x",)): 1.0, K((0,), ("x",)): 2.0})
    # [[1, 2], [2, 1]] has eigenvalue -1
    assert positivity_check(hand, [K.unit(), K((0,), ("x",))]) == pytest.approx(-1.0)


def test_concatenation_fuses_and_rejects_missing():
    t = fock_table(VacuumState("boolean"))
    assert concatenate(t, K((0,), ("ad",)), K((0,), ("ad",))) == K((0,), ("a·ad",))
    hand = MomentTable(entries={K((0,), ("x",)): 0.0})
    with pytest.raises(KeyConcatenationInvalid):
        positivity_check(hand, [K((1,), ("x",)), K((0,), ("x",))])


def test_consistency():
    b = fock_table(VacuumState("boolean"))
    key = K((0, 1, 0), ("ad", "1", "ad"))
    assert remove_unit(key, 1) == K((0,), ("ad·ad",))
    assert consistency_check(b, key, 1).passed
    for k in enumerate_keys([0, 1], ["a", "ad", "x"], 2):
        with_unit = K(k.indices[:1] + (5,) + k.indices[1:], k.labels[:1] + ("1",) + k.labels[1:])
        assert consistency_check(b, with_unit, 1).passed
    broken = MomentTable(entries={K((0, 1), ("x", "1")): 0.5, K((0,), ("x",)): 0.0})
    assert not consistency_check(broken, K((0, 1), ("x", "1")), 1).passed


def test_exchangeability_and_stationarity_examples():
    h = haagerup_table(1.0)
    keys = enumerate_keys([0, 1, 2], ["g", "g^-1"], 3)
    assert exchangeability_check(h, keys, permutations_of([0, 1, 2])).passed
    b = fock_table(VacuumState("boolean"))
    assert stationarity_check(b, enumerate_keys([0, 1], ["a", "ad", "x"], 3), (1, 3)).passed
    m = fock_table(VacuumState("monotone"))
    key = K((1, 0, 1), ("a", "a·ad", "ad"))
    assert m(key) == 1
    assert m(key.relabel(Permutation.transposition(0, 1))) == 0
    assert not exchangeability_check(m, [key], [Permutation.transposition(0, 1)]).passed


def test_symsh_verdicts():
    keys = enumerate_keys([0, 1, 2], ["a", "ad", "a·ad"], 3)
    assert symsh_verification(fock_table(SegmentState("boolean", 0.4)), keys).verdict == "holds"
    assert symsh_verification(haagerup_table(2.0), enumerate_keys([0, 1], ["g"], 2)).verdict == "holds"
    rep = symsh_verification(fock_table(VacuumState("monotone")), keys)
    assert rep.verdict == "hypothesis not met" and rep.stationarity.passed and rep.passed


def test_symsh_violation_detected_on_hand_table():
    # exchangeable on {0,1} but not shift invariant: the checker must say "violated"
    entries = {K((0,), ("x",)): 1.0, K((1,), ("x",)): 1.0, K((2,), ("x",)): 0.0}
    rep = symsh_verification(MomentTable(entries=entries), [K((0,), ("x",)), K((1,), ("x",))], powers=(1,))
    assert rep.verdict == "violated" and not rep.passed


def test_csv_round_trip():
    t = fock_table(VacuumState("q", 0.3)).fill(enumerate_keys([0, 1], ["a", "ad"], 2))
    text = t.to_csv()
    assert text.splitlines()[0] == "indices;labels;re;im"
    back = MomentTable.from_csv(text)
    assert back.entries == t.entries
    assert back.to_csv() == text
