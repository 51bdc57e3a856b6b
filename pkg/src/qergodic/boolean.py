"""Boolean Fock space C + l2(window).

Position 0 is the vacuum slot ``#``; mode ``i`` sits at ``1 + i - lo``.
The annihilator of mode ``i`` is the matrix unit ``eps(#, i)`` and the
creator ``eps(i, #)``.  Every nonempty word is a finite-rank operator, so
an element is a compact part plus a multiple of the identity, and the
invariant conditional expectation reads

    E(A + b I) = <A e_#, e_#> P_# + b I.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .errors import FactorialBlowup, GammaOutOfRange, ModeOutOfWindow, WindowTooSmall
from .monotone import InvarianceReport
from .operators import FockEngine, ModeWindow, RelationReport, SparseOperator, first_occurrence_modes, local_relabeling
from .words import GroupElement, Letter, Permutation, Polynomial, Shift, act, support

VACUUM = "#"
MAX_PERMUTED = 8


class BooleanBasis(Sequence):
    def __init__(self, window: ModeWindow):
        self.window = window
        self.entries = [VACUUM] + list(window.modes)
        self.index = {e: k for k, e in enumerate(self.entries)}

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, k):
        return self.entries[k]


def matrix_unit(basis: BooleanBasis, row, col) -> SparseOperator:
    n = len(basis)
    m = sp.csr_matrix(([1.0], ([basis.index[row]], [basis.index[col]])), shape=(n, n))
    return SparseOperator(basis, m)


def b_creator(basis: BooleanBasis, i: int) -> SparseOperator:
    return matrix_unit(basis, i, VACUUM)


def b_annihilator(basis: BooleanBasis, i: int) -> SparseOperator:
    return matrix_unit(basis, VACUUM, i)


class BooleanEngine(FockEngine):
    kind = "boolean"

    def __init__(self, window: ModeWindow):
        super().__init__(window, BooleanBasis(window))

    def creator(self, i: int) -> SparseOperator:
        self._check_mode(i)
        return b_creator(self.basis, i)

    def annihilator(self, i: int) -> SparseOperator:
        self._check_mode(i)
        return b_annihilator(self.basis, i)

    def levels(self) -> np.ndarray:
        return np.array([0] + [1] * self.window.width)

    def basis_vector(self, label) -> np.ndarray:
        """Unit vector ``e_#`` or ``e_i``; accepts ``"#"``, ``"e5"``, ``5``."""
        if isinstance(label, str) and label != VACUUM:
            label = int(label.lstrip("e"))
        if label != VACUUM and label not in self.window:
            raise ModeOutOfWindow([label], self.window)
        v = np.zeros(self.dim, dtype=complex)
        v[self.basis.index[label]] = 1.0
        return v


def boolean_expectation(op: SparseOperator, extra_identity: complex = 0.0) -> tuple[complex, complex]:
    """``E(A + bI)`` as the pair ``(<A e_#, e_#>, b)``."""
    return op.entry(0, 0), complex(extra_identity)


def expectation_operator(engine: BooleanEngine, pair: tuple[complex, complex]) -> SparseOperator:
    c, b = pair
    return matrix_unit(engine.basis, VACUUM, VACUUM) * c + engine.identity() * b


def compact_part(p: Polynomial) -> tuple[Polynomial, complex]:
    """Split ``p`` into its nonempty-word part and the identity coefficient."""
    b = p.identity_coefficient()
    return p - b, b


def local_vacuum(p: Polynomial) -> complex:
    """Vacuum expectation on the smallest window holding ``support(p)``.

    Modes are relabeled by first occurrence; the Boolean structure is
    invariant under any relabeling, so the value does not depend on it.
    """
    modes = first_occurrence_modes(p)
    if not modes:
        return p.identity_coefficient()
    mapping = local_relabeling(modes, order_preserving=False)
    return _canonical_vacuum(Polynomial((tuple(Letter(mapping[l.mode], l.kind) for l in w), c) for w, c in p))


@lru_cache(maxsize=65536)
def _canonical_vacuum(p: Polynomial) -> complex:
    eng = BooleanEngine(ModeWindow(0, len(support(p)) - 1))
    return eng.vacuum_expectation(eng.materialize(p))


@dataclass(frozen=True)
class BooleanState:
    """``(1 - gamma) * omega_# + gamma * omega_inf``; ``omega_inf(A + cI) = c``."""

    gamma: float

    def __post_init__(self):
        if not 0.0 <= self.gamma <= 1.0:
            raise GammaOutOfRange(f"gamma must lie in [0, 1], got {self.gamma}")

    def __call__(self, p: Polynomial) -> complex:
        return (1 - self.gamma) * local_vacuum(p) + self.gamma * p.identity_coefficient()


def e_mixing_experiment(
    engine: BooleanEngine, word: Polynomial, xi: np.ndarray, n_max: int
) -> list[float]:
    """``|phi_xi(alpha^n(A)) - phi_xi(E(A))|`` for ``n = 0..n_max``."""
    modes = support(word)
    if modes and (min(modes) < engine.window.lo or max(modes) + n_max > engine.window.hi):
        raise WindowTooSmall(
            "shifted support leaves the window",
            ModeWindow(min(modes), max(modes) + n_max),
        )
    xi = np.asarray(xi, dtype=complex)
    xi = xi / np.linalg.norm(xi)
    compact, b = compact_part(word)
    c = engine.vacuum_expectation(engine.materialize(compact))
    target = c * abs(xi[0]) ** 2 + b
    out = []
    for n in range(n_max + 1):
        M = engine.materialize(act(Shift(n), word)).matrix
        val = np.vdot(xi, M @ xi)
        out.append(float(abs(val - target)))
    return out


def boolean_state_invariance_check(
    gamma: float,
    words: Iterable[Polynomial],
    group_elements: Iterable[GroupElement],
    window: ModeWindow | None = None,
) -> InvarianceReport:
    phi = BooleanState(gamma)
    gs = list(group_elements)
    failures, worst, n = [], 0.0, 0
    for w in words:
        base = phi(w)
        for g in gs:
            moved = act(g, w)
            if window is not None and not window.contains_all(support(moved)):
                raise WindowTooSmall(f"{g} moves {w} outside {window}")
            val = phi(moved)
            n += 1
            worst = max(worst, abs(val - base))
            if val != base:
                failures.append((str(w), g, base, val))
    return InvarianceReport(n, failures, worst)


def _position_map(basis: BooleanBasis, g) -> np.ndarray:
    return np.array([basis.index[e if e == VACUUM else g(e)] for e in basis.entries])


def boolean_permutation_average(engine: BooleanEngine, A: SparseOperator, J: Iterable[int]) -> SparseOperator:
    """Exact average of ``alpha_g(A)`` over all permutations of ``J``.

    Permutations are enumerated lexicographically; the sum is divided by
    ``|J|!`` once at the end.
    """
    J = sorted(set(J))
    if len(J) > MAX_PERMUTED:
        raise FactorialBlowup(f"|J| = {len(J)} exceeds {MAX_PERMUTED}")
    if not engine.window.contains_all(J):
        raise ModeOutOfWindow(set(J) - set(engine.window.modes), engine.window)
    dense = A.dense()
    total = np.zeros_like(dense)
    for image in itertools.permutations(J):
        g = Permutation(dict(zip(J, image)))
        pm = _position_map(engine.basis, g)
        total[np.ix_(pm, pm)] += dense
    return SparseOperator(engine.basis, total / math.factorial(len(J)))


def shift_fixed_points(window: ModeWindow) -> list[np.ndarray]:
    """Basis of shift-invariant elements ``K + bI`` with ``K`` supported on ``window``.

    ``K`` and its shift are embedded in the window extended by one mode;
    invariance is ``alpha(K) = K`` there.  Returns matrices on the
    original window (the identity included).
    """
    n = window.width + 1
    ext = BooleanBasis(ModeWindow(window.lo, window.hi + 1))
    base = BooleanBasis(window)
    shift_pos = [ext.index[e if e == VACUUM else e + 1] for e in base.entries]
    same_pos = [ext.index[e] for e in base.entries]
    m = len(ext)
    # linear map vec(K) -> vec(alpha(K) - K) on the extended basis
    L = np.zeros((m * m, n * n))
    for r in range(n):
        for c in range(n):
            col = r * n + c
            L[shift_pos[r] * m + shift_pos[c], col] += 1.0
            L[same_pos[r] * m + same_pos[c], col] -= 1.0
    null = scipy.linalg.null_space(L)
    rows = [null[:, k].reshape(n, n) for k in range(null.shape[1])]
    return rows + [np.eye(n)]


def check_boolean_relations(engine: BooleanEngine) -> RelationReport:
    """Matrix-unit algebra on the window; exact (defect 0) by construction.

    Families: ``eps(r,c) eps(s,t) = delta_cs eps(r,t)`` over all labels,
    ``a(i) ad(j) = delta_ij P_#`` and ``ad(i) a(j) = eps(i,j)``.
    """
    labels = engine.basis.entries
    units = {(r, c): matrix_unit(engine.basis, r, c) for r in labels for c in labels}
    mu = 0.0
    for (r, c), x in units.items():
        for (s, t), y in units.items():
            target = units[(r, t)] * (1.0 if c == s else 0.0)
            mu = max(mu, (x @ y - target).max_abs())
    ac = cc = 0.0
    for i in engine.window.modes:
        for j in engine.window.modes:
            ac = max(ac, (engine.annihilator(i) @ engine.creator(j) - units[(VACUUM, VACUUM)] * (i == j)).max_abs())
            cc = max(cc, (engine.creator(i) @ engine.annihilator(j) - units[(i, j)]).max_abs())
    return RelationReport(
        engine="boolean",
        params={"window": str(engine.window)},
        defects={"matrix_units": mu, "annihilator_creator": ac, "creator_annihilator": cc},
        tolerance=0.0,
    )
