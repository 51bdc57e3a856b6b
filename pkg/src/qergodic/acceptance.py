"""Acceptance suite: nine criteria, each producing verdict rows.

Rows share the schema ``check,engine,params,max_defect,tolerance,pass``.
Floats are written with ``repr`` so two runs with the same seed give
byte-identical output.  Wall-clock timings are reported separately and
never enter the tables.
"""

from __future__ import annotations

import math
import os
import random
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .boolean import (
    BooleanEngine,
    boolean_permutation_average,
    boolean_expectation,
    check_boolean_relations,
    compact_part,
    e_mixing_experiment,
    expectation_operator,
    matrix_unit,
)
from .ergodics import (
    ConvergenceSeries,
    cesaro_deviation_series,
    permutation_average,
    sampled_permutation_average,
    unique_mixing_probe,
)
from .freegroup import (
    GroupWord,
    HaagerupState,
    block_singleton_check,
    haagerup_positivity_probe,
    parse_group_word,
    product_state_check,
    random_reduced_word,
)
from .moments import MomentKey, enumerate_keys, fock_table, haagerup_table, symsh_verification
from .monotone import MonotoneEngine, check_monotone_relations, normal_form_oracle_check, normalize
from .operators import ModeWindow, SparseOperator
from .qfock import build_q_basis, check_q_adjointness, check_q_relation, q_gram
from .states import SegmentState, VacuumState
from .words import Letter, Kind, Permutation, Polynomial, a, ad, word

Q_GRID = (-0.9, -0.5, 0.0, 0.3, 0.5, 0.9)
MIXING_WORD = ad(0) * a(0) + a(0) + ad(0)
MIXING_TEST_MODES = tuple(range(10))
MIXING_TEST_DEPTH = 2
MIXING_SCALES = (4, 8, 16, 32, 64)
CESARO_TEST_MODES = tuple(range(4))
CESARO_SCALES = (4, 8, 16, 32)
PERM_WORDS = {
    "eps(0,0)": ad(0) * a(0),
    "eps(#,0)": a(0),
    "eps(0,#)": ad(0),
    "eps(0,1)": ad(0) * a(1),
    "eps(1,0)+eps(#,#)+2": ad(1) * a(0) + a(0) * ad(0) + 2,
}
CSV_HEADER = "check,engine,params,max_defect,tolerance,pass"


@dataclass
class Verdict:
    criterion: int
    check: str
    engine: str
    params: str
    max_defect: float
    tolerance: float
    passed: bool

    def csv_line(self) -> str:
        return ",".join(
            [
                f"c{self.criterion}_{self.check}",
                self.engine,
                self.params,
                repr(float(self.max_defect)),
                repr(float(self.tolerance)),
                "true" if self.passed else "false",
            ]
        )


@dataclass
class SuiteResult:
    verdicts: list = field(default_factory=list)
    series: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)

    def add(self, *args, **kw):
        self.verdicts.append(Verdict(*args, **kw))

    def verdict_csv(self) -> str:
        return "\n".join([CSV_HEADER] + [v.csv_line() for v in self.verdicts]) + "\n"

    def criterion_passed(self, k: int) -> bool:
        rows = [v for v in self.verdicts if v.criterion == k]
        return bool(rows) and all(v.passed for v in rows)

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)


def _params(**kw) -> str:
    # no commas: the verdict table is plain CSV
    return " ".join(f"{k}={v}" for k, v in kw.items())


# -- criteria ---------------------------------------------------------------------


def criterion_q_relation(res: SuiteResult):
    for q in Q_GRID:
        worst = 0.0
        for width in (1, 2, 3):
            for depth in (1, 2, 3, 4):
                basis = build_q_basis(ModeWindow(0, width - 1), depth)
                for i in range(width):
                    for j in range(width):
                        worst = max(worst, check_q_relation(basis, q, i, j).max_defect)
        res.add(1, "q_relation", "q", _params(q=q, width="1..3", depth="1..4"), worst, 1e-12, worst < 1e-12)


def criterion_q_adjointness(res: SuiteResult):
    for q in Q_GRID:
        worst = 0.0
        for width in (1, 2, 3):
            for depth in (1, 2, 3, 4):
                basis = build_q_basis(ModeWindow(0, width - 1), depth)
                gram = q_gram(basis, q)
                for i in range(width):
                    worst = max(worst, check_q_adjointness(basis, q, i, gram))
        res.add(2, "q_adjointness", "q", _params(q=q, width="1..3", depth="1..4"), worst, 1e-10, worst < 1e-10)


def criterion_monotone_relations(res: SuiteResult):
    families: dict[str, float] = {}
    for width in range(1, 13):
        rep = check_monotone_relations(MonotoneEngine(ModeWindow(0, width - 1)))
        for name, d in rep.defects.items():
            families[name] = max(families.get(name, 0.0), d)
    for name, d in families.items():
        res.add(3, name, "monotone", _params(width="1..12"), d, 0.0, d == 0.0)


def reduction_identity_rhs(i: int, j: int, l: int) -> Polynomial:
    """``ad(i) a(l) - sum_{k = max(i,l)+1}^{j} ad(i) ad(k) a(k) a(l)``."""
    rhs = ad(i) * a(l)
    for k in range(max(i, l) + 1, j + 1):
        rhs = rhs - ad(i) * ad(k) * a(k) * a(l)
    return rhs


def random_letter_word(rng: np.random.Generator, max_len: int, modes: int) -> Polynomial:
    n = int(rng.integers(1, max_len + 1))
    return word(*(Letter(int(rng.integers(0, modes)), Kind(int(rng.integers(0, 2)))) for _ in range(n)))


def criterion_monotone_rewriter(res: SuiteResult, seed: int):
    triples = [(i, j, l) for j in range(1, 5) for i in range(j) for l in range(j)]
    mismatches = sum(
        normalize(ad(i) * a(j) * ad(j) * a(l)).to_polynomial() != reduction_identity_rhs(i, j, l)
        for i, j, l in triples
    )
    res.add(4, "reduction_identity", "monotone", _params(triples=len(triples)), mismatches, 0.0, mismatches == 0)

    rng = np.random.Generator(np.random.PCG64(seed))
    corpus = [random_letter_word(rng, 8, 5) for _ in range(100)]
    window = ModeWindow(-1, 5)
    worst = max(normal_form_oracle_check(p, window) for p in corpus)
    res.add(4, "oracle", "monotone", _params(words=100, max_len=8, seed=seed), worst, 1e-12, worst < 1e-12)

    r1, r2 = random.Random(seed + 1), random.Random(seed + 2)
    differ = sum(normalize(p, rng=r1) != normalize(p, rng=r2) for p in corpus)
    res.add(4, "confluence", "monotone", _params(words=100, seed=seed), differ, 0.0, differ == 0)


def criterion_boolean(res: SuiteResult, seed: int):
    eng = BooleanEngine(ModeWindow(0, 5))
    rep = check_boolean_relations(eng)
    res.add(5, "matrix_units", "boolean", _params(window="0:5"), rep.max_defect, 0.0, rep.max_defect == 0.0)

    # E on 100 random K + bI with K positive semidefinite, b >= 0
    rng = np.random.Generator(np.random.PCG64(seed))
    idem = 0.0
    min_eig = math.inf
    for _ in range(100):
        X = rng.standard_normal((7, 7)) + 1j * rng.standard_normal((7, 7))
        K, b = SparseOperator(eng.basis, X @ X.conj().T), float(rng.random())
        pair = boolean_expectation(K, b)
        EK = expectation_operator(eng, pair)
        again = expectation_operator(eng, boolean_expectation(expectation_operator(eng, (pair[0], 0.0)), b))
        idem = max(idem, (again - EK).max_abs())
        min_eig = min(min_eig, float(np.linalg.eigvalsh(EK.dense()).min()))
    unit = expectation_operator(eng, boolean_expectation(eng.zero(), 1.0))
    unital = (unit - eng.identity()).max_abs()
    res.add(5, "E_idempotent", "boolean", _params(inputs=100, seed=seed), idem, 0.0, idem == 0.0)
    res.add(5, "E_unital", "boolean", _params(), unital, 0.0, unital == 0.0)
    res.add(5, "E_positive", "boolean", _params(inputs=100, seed=seed), max(0.0, -min_eig), 1e-12, min_eig >= -1e-12)

    # permutation averages vs E(A): compact-part distance over the bound |A|max |F|/|J|
    ratio, monotone_ok = 0.0, True
    for name, p in PERM_WORDS.items():
        A = eng.materialize(p)
        compact, b = compact_part(p)
        F = len({l.mode for w, _ in compact for l in w})
        EA = matrix_unit(eng.basis, "#", "#") * eng.vacuum_expectation(eng.materialize(compact)) + eng.identity() * b
        norm = eng.materialize(compact).max_abs()
        prev = math.inf
        for n in range(max(F, 1) + 1, 7):
            dist = (boolean_permutation_average(eng, A, range(n)) - EA).max_abs()
            ratio = max(ratio, dist / (norm * F / n))
            monotone_ok &= dist <= prev
            prev = dist
    res.add(5, "permutation_average_bound", "boolean", _params(words=len(PERM_WORDS), J="{0..n-1} n<=6"),
            ratio, 1.0 + 1e-12, ratio <= 1.0 + 1e-12 and monotone_ok)

    big = BooleanEngine(ModeWindow(0, 12))
    tail = 0.0
    for p, vec in ((ad(0) * a(0), big.basis_vector("e5")),
                   (ad(0) * a(0) + a(0) * ad(0), big.basis_vector("e5") + big.basis_vector("#"))):
        out = e_mixing_experiment(big, p, vec, 12)
        tail = max(tail, max(out[6:]))
        hit = out[5] > 0
    res.add(5, "e_mixing_tail", "boolean", _params(vector="e5", n_max=12, exit_step=5), tail, 0.0, tail == 0.0 and hit)


def criterion_haagerup(res: SuiteResult, seed: int):
    u, v, w = parse_group_word("g1"), parse_group_word("g2"), parse_group_word("g1^-1")
    for lam in (0.5, 1.0, 2.0):
        rep = block_singleton_check(lam, u, v, w)
        d = abs(rep.lhs - math.exp(-3 * lam)) + abs(rep.rhs - math.exp(-lam))
        res.add(6, "counterexample", "haagerup", _params(lam=lam), d, 0.0, d == 0.0 and not rep.equal)

    rng = np.random.Generator(np.random.PCG64(seed))
    bad, float_gap = 0, 0.0
    for _ in range(1000):
        gens = [int(x) for x in rng.permutation(8)]
        cut = int(rng.integers(1, 8))
        x = random_reduced_word(rng, 5, gens[:cut])
        y = random_reduced_word(rng, 5, gens[cut:])
        rep = product_state_check(1.0, x, y, strict=True)
        # exactness lives in the integer lengths; the float sides agree to rounding
        bad += not rep.equal
        float_gap = max(float_gap, abs(rep.lhs - rep.rhs))
    res.add(6, "product_state", "haagerup", _params(pairs=1000, lam=1.0, seed=seed), bad, 0.0, bad == 0)
    res.add(6, "product_state_float", "haagerup", _params(pairs=1000, lam=1.0, seed=seed),
            float_gap, 1e-15, float_gap <= 1e-15)

    for lam in (0.5, 1.0, 2.0):
        words: list[GroupWord] = []
        while len(words) < 20:
            cand = random_reduced_word(rng, 4, [0, 1, 2])
            if cand not in words:
                words.append(cand)
        m = haagerup_positivity_probe(lam, words)
        res.add(6, "gram_positivity", "haagerup", _params(lam=lam, words=20, seed=seed), max(0.0, -m), 1e-10, m > -1e-10)

    # permutation averages keep the block-singleton gap: every term is e^{-3 lam}
    for lam in (0.5, 1.0, 2.0):
        phi = HaagerupState(lam)
        scales, devs = [], []
        for n in range(2, 7):
            I = range(2, 2 + n)
            avg = permutation_average(u, v, w, phi, I)
            scales.append(n)
            devs.append(abs(avg - math.exp(-3 * lam)))
        res.series[f"haagerup_equilibrium_lam{lam}"] = ConvergenceSeries(scales, devs, "haagerup", lam, "")
        gap = max(devs)
        stays_away = math.exp(-lam) - math.exp(-3 * lam) > gap
        res.add(6, "equilibrium_average", "haagerup", _params(lam=lam, I="{2..n+1} n<=6"), gap, 0.0,
                gap == 0.0 and stays_away)

    phi = HaagerupState(1.0)
    x, y, z = parse_group_word("g0"), parse_group_word("g1 g2"), parse_group_word("g1^-1")
    exact = permutation_average(x, y, z, phi, range(6))
    mean, err = sampled_permutation_average(x, y, z, phi, range(6), 2000, seed)
    res.add(6, "sampled_vs_exact", "haagerup", _params(I="{0..5}", count=2000, seed=seed),
            abs(mean - exact), 3 * err, abs(mean - exact) < 3 * err)


def criterion_mixing(res: SuiteResult):
    for q in (0.0, 0.3, 0.5):
        s = unique_mixing_probe(MIXING_WORD, "q", MIXING_SCALES, MIXING_TEST_MODES, MIXING_TEST_DEPTH, q=q)
        res.series[f"unique_mixing_q{q}"] = s
        ratio = s.deviations[-1] / s.deviations[0]
        ok = s.is_nonincreasing(start_scale=8) and ratio < 0.5
        res.add(7, "unique_mixing", "q", _params(q=q, n="4..64", test_modes="0:9", test_depth=2), ratio, 0.5, ok)
    s = cesaro_deviation_series(MIXING_WORD, "q", CESARO_SCALES, CESARO_TEST_MODES, MIXING_TEST_DEPTH, q=0.3)
    res.series["cesaro_q0.3"] = s
    strict = all(y < x for x, y in zip(s.deviations, s.deviations[1:]))
    res.add(7, "cesaro_decreasing", "q", _params(q=0.3, n="4..32", test_modes="0:3", test_depth=2),
            s.deviations[-1] / s.deviations[0], 1.0, strict)


SYMSH_EXPECTED = {
    "q0.3": "holds",
    "boolean": "holds",
    "boolean_gamma0.4": "holds",
    "monotone": "hypothesis not met",
    "monotone_gamma0.4": "hypothesis not met",
    "haagerup_lam1.0": "holds",
}


def symsh_tables():
    fock_keys = enumerate_keys([0, 1, 2], ["a", "ad", "x", "a·ad"], 3)
    group_keys = enumerate_keys([0, 1, 2], ["g", "g^-1"], 3)
    return {
        "q0.3": (fock_table(VacuumState("q", 0.3)), fock_keys),
        "boolean": (fock_table(VacuumState("boolean")), fock_keys),
        "boolean_gamma0.4": (fock_table(SegmentState("boolean", 0.4)), fock_keys),
        "monotone": (fock_table(VacuumState("monotone")), fock_keys),
        "monotone_gamma0.4": (fock_table(SegmentState("monotone", 0.4)), fock_keys),
        "haagerup_lam1.0": (haagerup_table(1.0), group_keys),
    }


def criterion_moments(res: SuiteResult):
    for name, (table, keys) in symsh_tables().items():
        rep = symsh_verification(table, keys, powers=(1, 2))
        ok = rep.verdict == SYMSH_EXPECTED[name] and rep.stationarity.passed
        res.add(8, "symsh", name.split("_")[0].rstrip("0123456789."), _params(table=name, keys=len(keys), verdict=rep.verdict.replace(" ", "-")),
                rep.stationarity.max_deviation, 0.0, ok)
    mono = fock_table(VacuumState("monotone"))
    key = MomentKey((1, 0, 1), ("a", "a·ad", "ad"))
    lhs, rhs = mono(key), mono(key.relabel(Permutation.transposition(0, 1)))
    res.add(8, "monotone_not_exchangeable", "monotone", _params(key="a@1|a·ad@0|ad@1"),
            abs(lhs - rhs), 0.0, lhs == 1 and rhs == 0)


# -- driver ------------------------------------------------------------------------


def run_suite(seed: int = 0) -> SuiteResult:
    """Criteria 1-8."""
    res = SuiteResult()
    steps = [
        ("c1", lambda: criterion_q_relation(res)),
        ("c2", lambda: criterion_q_adjointness(res)),
        ("c3", lambda: criterion_monotone_relations(res)),
        ("c4", lambda: criterion_monotone_rewriter(res, seed)),
        ("c5", lambda: criterion_boolean(res, seed)),
        ("c6", lambda: criterion_haagerup(res, seed)),
        ("c7", lambda: criterion_mixing(res)),
        ("c8", lambda: criterion_moments(res)),
    ]
    for name, step in steps:
        t0 = time.perf_counter()
        step()
        res.timings[name] = time.perf_counter() - t0
    return res


def render(res: SuiteResult) -> dict[str, str]:
    files = {"verdicts.csv": res.verdict_csv()}
    for name, s in sorted(res.series.items()):
        files[f"series_{name}.csv"] = s.to_csv()
    return files


def run_acceptance(seed: int = 0, outdir: str | os.PathLike | None = None) -> SuiteResult:
    """Criteria 1-8, then criterion 9: a second run must render byte-identically."""
    t0 = time.perf_counter()
    first = run_suite(seed)
    second = run_suite(seed)
    a_files, b_files = render(first), render(second)
    differ = sum(a_files.get(k) != b_files.get(k) for k in set(a_files) | set(b_files))
    first.add(9, "determinism", "all", _params(seed=seed, files=len(a_files)), differ, 0.0, differ == 0)
    first.timings["total"] = time.perf_counter() - t0
    if outdir is not None:
        write_outputs(first, outdir)
    return first


def atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def write_outputs(res: SuiteResult, outdir):
    outdir = Path(outdir)
    for name, text in render(res).items():
        atomic_write(outdir / name, text)
