"""Ergodic averages and the clustering / equilibrium / mixing probes.

Finite-scale "norms" here are max moduli of matrix elements between
orthonormalized test vectors of bounded particle number over a fixed set of
test modes.  They are not operator norms of the infinite-dimensional
objects; every series records this in its ``note``.

Matrix elements of a shifted polynomial between test vectors only involve
the modes of the test vectors and of the polynomial, so each term is
computed on a small engine over exactly those modes.  All engines are
invariant under order-preserving relabeling of modes, which makes this
exact.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .boolean import boolean_permutation_average  # noqa: F401  (re-exported)
from .errors import FactorialBlowup, ParameterOutOfRange, WindowTooSmall
from .freegroup import GroupWord, HaagerupState, act_on_word
from .operators import ModeWindow, SparseOperator
from .qfock import orthonormal_test_block, probe_sequences
from .states import VacuumState, local_mapping, make_engine, relabel
from .words import Permutation, Polynomial, Shift, act, support

MAX_EXACT = 8
AVERAGE_NOTE = "|group average - factorized target| per scale (exact state values)"
FINITE_SCALE_NOTE = "max matrix element over orthonormalized test vectors (not an operator norm)"


@dataclass
class ConvergenceSeries:
    scales: list
    deviations: list
    engine: str = ""
    param: object = ""
    seed: object = ""
    note: str = FINITE_SCALE_NOTE

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.scales, self.scales[1:])):
            raise ValueError("scales must be strictly increasing")
        if len(self.scales) != len(self.deviations):
            raise ValueError("one deviation per scale")

    def pairs(self):
        return list(zip(self.scales, self.deviations))

    def to_csv(self, header: bool = True) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        if header:
            wr.writerow(["scale", "deviation", "engine", "q_or_lambda", "seed"])
        for s, d in self.pairs():
            wr.writerow([s, repr(float(d)), self.engine, self.param, self.seed])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "ConvergenceSeries":
        rows = list(csv.DictReader(io.StringIO(text)))
        if not rows:
            return cls([], [])
        return cls(
            [int(r["scale"]) for r in rows],
            [float(r["deviation"]) for r in rows],
            rows[0]["engine"],
            rows[0]["q_or_lambda"],
            rows[0]["seed"],
        )

    def is_nonincreasing(self, start_scale=None) -> bool:
        ds = [d for s, d in self.pairs() if start_scale is None or s >= start_scale]
        return all(b <= a for a, b in zip(ds, ds[1:]))


# -- Cesaro shift averages -------------------------------------------------------


def _required_window(p: Polynomial, n: int) -> ModeWindow | None:
    modes = support(p)
    if not modes:
        return None
    return ModeWindow(min(modes), max(modes) + max(n - 1, 0))


def cesaro_shift_average(p: Polynomial, n: int, engine) -> SparseOperator:
    """``(1/n) sum_{k<n} materialize(shift^k p)`` on ``engine``."""
    if n < 1:
        raise ValueError("n must be positive")
    need = _required_window(p, n)
    if need is not None and not engine.window.contains_all((need.lo, need.hi)):
        raise WindowTooSmall(f"window {engine.window} cannot hold {n} shifts of the support", need)
    total = engine.zero()
    for k in range(n):
        total = total + engine.materialize(act(Shift(k), p))
    return total * (1.0 / n)


def matrix_element_block(
    p: Polynomial,
    kind: str,
    test_modes: Sequence[int],
    test_depth: int,
    q: float | None = None,
) -> np.ndarray:
    """Matrix of ``<p xi_a, xi_b>`` over orthonormalized test vectors.

    Test vectors are the basis vectors over ``test_modes`` with at most
    ``test_depth`` particles, Gram-orthonormalized (Cholesky, level by
    level) for the q engine.  Row index ``b``, column index ``a``.
    """
    test_modes = sorted(set(test_modes))
    modes = sorted(set(test_modes) | support(p))
    mapping = local_mapping("monotone", modes)  # order-preserving for every engine
    window = ModeWindow(0, len(modes) - 1)
    depth = test_depth + p.max_length()
    eng = make_engine(kind, window, q=q, depth=depth)
    M = eng.materialize(relabel(p, mapping)).matrix.tocsr()
    if kind == "q":
        seqs = probe_sequences(test_modes, test_depth)
        pos = [eng.basis.index[tuple(mapping[m] for m in s)] for s in seqs]
        L, Linv_H = orthonormal_test_block(seqs, q)
        sub = M[pos][:, pos].toarray()
        return L.conj().T @ sub @ Linv_H
    if kind == "monotone":
        seqs = [
            c for n in range(min(test_depth, len(test_modes)) + 1) for c in itertools.combinations(test_modes, n)
        ]
        pos = [eng.basis.index[tuple(mapping[m] for m in s)] for s in seqs]
    else:
        pos = [0] + ([eng.basis.index[mapping[m]] for m in test_modes] if test_depth >= 1 else [])
    return M[pos][:, pos].toarray()


def _test_identity(kind, test_modes, test_depth, q) -> int:
    return matrix_element_block(Polynomial.one(), kind, test_modes, test_depth, q).shape[0]


def cesaro_deviation_series(
    p: Polynomial,
    kind: str,
    n_list: Iterable[int],
    test_modes: Sequence[int],
    test_depth: int,
    q: float | None = None,
    window: ModeWindow | None = None,
) -> ConvergenceSeries:
    """``max |<(C_n(p) - omega(p) I) xi, eta>|`` for each ``n`` in ``n_list``."""
    n_list = list(n_list)
    if window is not None:
        need = _required_window(p, max(n_list))
        if need is not None and not window.contains_all((need.lo, need.hi)):
            raise WindowTooSmall("window too small for the Cesaro schedule", need)
    omega = VacuumState(kind, q)(p)
    dim = _test_identity(kind, test_modes, test_depth, q)
    running = np.zeros((dim, dim), dtype=complex)
    devs, done = [], 0
    for n in n_list:
        for k in range(done, n):
            running = running + matrix_element_block(act(Shift(k), p), kind, test_modes, test_depth, q)
        done = n
        devs.append(float(np.abs(running / n - omega * np.eye(dim)).max()))
    return ConvergenceSeries(n_list, devs, kind, q if kind == "q" else "", "")


def unique_mixing_probe(
    p: Polynomial,
    kind: str,
    n_list: Iterable[int],
    test_modes: Sequence[int],
    test_depth: int,
    q: float | None = None,
    window: ModeWindow | None = None,
) -> ConvergenceSeries:
    """``max |<(shift^n(p) - omega(p) I) xi, eta>|`` over test vectors, per ``n``."""
    n_list = list(n_list)
    if window is not None:
        need = _required_window(p, max(n_list) + 1)
        if need is not None and not window.contains_all((need.lo, need.hi)):
            raise WindowTooSmall("window too small for the shift schedule", need)
    omega = VacuumState(kind, q)(p)
    devs = []
    for n in n_list:
        B = matrix_element_block(act(Shift(n), p), kind, test_modes, test_depth, q)
        devs.append(float(np.abs(B - omega * np.eye(B.shape[0])).max()))
    return ConvergenceSeries(n_list, devs, kind, q if kind == "q" else "", "")


# -- permutation averages ---------------------------------------------------------


def _act(g, x):
    if isinstance(x, GroupWord):
        return act_on_word(g, x)
    return act(g, x)


def _support(x) -> frozenset:
    return x.support() if isinstance(x, GroupWord) else support(x)


def _fsum_complex(values) -> complex:
    values = [complex(v) for v in values]
    return complex(math.fsum(v.real for v in values), math.fsum(v.imag for v in values))


def _mean(state, items) -> complex:
    """Weighted mean of ``state`` over ``(element, weight)`` pairs.

    Haagerup values depend only on word length, so terms are grouped by
    length first; a constant length then gives the state value exactly.
    """
    items = list(items)
    total = sum(wt for _, wt in items)
    if isinstance(state, HaagerupState) and all(isinstance(x, GroupWord) for x, _ in items):
        counts = Counter()
        for x, wt in items:
            counts[len(x)] += wt
        return complex(math.fsum(state.of_length(n) * (c / total) for n, c in sorted(counts.items())))
    return _fsum_complex(wt * state(x) for x, wt in items) / total


def _product(state, x, y) -> complex:
    """``state(x) * state(y)``; for Haagerup words via the summed length."""
    if isinstance(state, HaagerupState) and isinstance(x, GroupWord) and isinstance(y, GroupWord):
        return complex(state.of_length(len(x) + len(y)))
    return state(x) * state(y)


def _permutations_of(I: Sequence[int]):
    for image in itertools.permutations(I):
        yield Permutation(dict(zip(I, image)))


def permutation_average(
    u,
    v,
    w,
    state: Callable,
    I: Iterable[int],
    mode: str = "exact",
    count: int = 1000,
    seed: int = 0,
    enumerate_all: bool = False,
) -> complex:
    """Average of ``state(u * alpha_g(v) * w)`` over ``g`` in the permutations of ``I``.

    Exact mode enumerates lexicographically.  By default it enumerates the
    injective images of ``support(v) & I`` and weights each by the number of
    permutations restricting to it, which is the same average;
    ``enumerate_all`` walks all ``|I|!`` permutations instead.
    """
    I = sorted(set(I))
    if mode == "sampled":
        return sampled_permutation_average(u, v, w, state, I, count, seed)[0]
    if mode != "exact":
        raise ParameterOutOfRange(f"mode must be 'exact' or 'sampled', got {mode!r}")
    if len(I) > MAX_EXACT:
        raise FactorialBlowup(f"exact average over |I| = {len(I)} > {MAX_EXACT}")
    if enumerate_all:
        return _mean(state, ((u * _act(g, v) * w, 1) for g in _permutations_of(I)))
    moved = sorted(_support(v) & set(I))
    weight = math.factorial(len(I) - len(moved))
    items = []
    for image in itertools.permutations(I, len(moved)):
        g = _extend_injection(dict(zip(moved, image)), I)
        items.append((u * _act(g, v) * w, weight))
    return _mean(state, items)


def _extend_injection(partial: dict, I: Sequence[int]) -> Permutation:
    """Some permutation of ``I`` extending an injection ``partial``."""
    free_src = [i for i in I if i not in partial]
    free_dst = [i for i in I if i not in set(partial.values())]
    full = dict(partial)
    full.update(zip(free_src, free_dst))
    return Permutation(full)


def sampled_permutation_average(u, v, w, state, I, count: int, seed: int) -> tuple[complex, float]:
    """Monte Carlo mean and standard error with ``numpy`` PCG64(seed)."""
    I = sorted(set(I))
    rng = np.random.Generator(np.random.PCG64(seed))
    vals = []
    for _ in range(count):
        image = [I[k] for k in rng.permutation(len(I))]
        vals.append(complex(state(u * _act(Permutation(dict(zip(I, image))), v) * w)))
    arr = np.array(vals)
    stderr = float(np.sqrt(np.var(arr.real, ddof=1) + np.var(arr.imag, ddof=1)) / np.sqrt(count))
    return _fsum_complex(vals) / count, stderr


def stabilizer_fractions(I: Iterable[int], F: Iterable[int], V: Iterable[int] = ()) -> dict:
    """Counting ratios for the permutation group of ``I``.

    ``pointwise_fixing``: fraction of permutations fixing ``F & I`` pointwise,
    ``(|I| - |F|)! / |I|!``.  ``moving_clear``: fraction with ``g(V) & F``
    empty, ``P(|I| - |F|, |V|) / P(|I|, |V|)`` for ``V`` inside ``I`` and
    disjoint from ``F``.
    """
    I = set(I)
    F = set(F) & I
    V = set(V) & I
    if V & F:
        raise ValueError("V must be disjoint from F")
    n, f, k = len(I), len(F), len(V)
    fixing = math.factorial(n - f) / math.factorial(n)
    clear = math.perm(n - f, k) / math.perm(n, k) if n else 1.0
    return {"pointwise_fixing": fixing, "moving_clear": clear}


# -- clustering and equilibrium ---------------------------------------------------


def _group_elements(scale, group: str):
    if group == "shift":
        return [Shift(k) for k in range(scale)]
    if group == "permutation":
        I = sorted(scale)
        if len(I) > MAX_EXACT:
            raise FactorialBlowup(f"scales: permutation group on |I| = {len(I)} points exceeds {MAX_EXACT}")
        return list(_permutations_of(I))
    raise ParameterOutOfRange(f"group must be 'shift' or 'permutation', got {group!r}")


def _average(make, state, scale, group) -> complex:
    return _mean(state, ((make(g), 1) for g in _group_elements(scale, group)))


def _unit_like(x):
    return GroupWord.identity() if isinstance(x, GroupWord) else Polynomial.one()


def _series_meta(state):
    if hasattr(state, "lam"):
        return "haagerup", state.lam
    return getattr(state, "label", ""), getattr(state, "param", "")


def weak_clustering_probe(A, B, state, scales: Sequence, group: str = "shift") -> ConvergenceSeries:
    """``|avg_g state(A alpha_g(B)) - state(A) state(B)|`` per scale.

    Shift scales are ``n`` (average over ``k < n``); permutation scales are
    finite index sets, reported by their size.
    """
    target = _product(state, A, B)
    devs = [abs(_average(lambda g: A * _act(g, B), state, s, group) - target) for s in scales]
    keys = list(scales) if group == "shift" else [len(s) for s in scales]
    engine, param = _series_meta(state)
    return ConvergenceSeries(keys, [float(d) for d in devs], engine, param, "", note=AVERAGE_NOTE)


def equilibrium_probe(A, B, C, state, scales: Sequence, group: str = "shift") -> ConvergenceSeries:
    """``|avg_g state(A alpha_g(B) C) - state(AC) state(B)|`` per scale."""
    target = _product(state, A * C, B)
    devs = [abs(_average(lambda g: A * _act(g, B) * C, state, s, group) - target) for s in scales]
    keys = list(scales) if group == "shift" else [len(s) for s in scales]
    engine, param = _series_meta(state)
    return ConvergenceSeries(keys, [float(d) for d in devs], engine, param, "", note=AVERAGE_NOTE)
