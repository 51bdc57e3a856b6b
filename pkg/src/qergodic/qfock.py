"""Truncated q-deformed Fock representation, |q| < 1.

The basis is the full Fock basis e_w over words ``w`` in the window modes
of length at most ``depth`` (graded, then lexicographic).  The creator
prepends its mode; the annihilator removes one occurrence of its mode at
position ``k`` with weight ``q**(k-1)``.  With these actions

    a(i) ad(j) - q ad(j) a(i) = delta_ij

holds exactly on vectors of length ``< depth``.  The deformed inner product
only enters through :func:`q_gram`, with respect to which ``a(i)`` is the
adjoint of ``ad(i)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import CapacityExceeded, GramDegenerate, ModeOutOfWindow, ParameterOutOfRange
from .operators import FockEngine, ModeWindow, RelationReport, SparseOperator
from .words import Polynomial, star

MAX_ENTRIES = 500_000
MAX_GRAM_LEVEL = 5
GRAM_MIN_EIGENVALUE = 1e-10
Q_LIMIT = 0.99


def validate_q(q: float) -> float:
    q = float(q)
    if not abs(q) <= Q_LIMIT:
        raise ParameterOutOfRange(f"q must satisfy |q| <= {Q_LIMIT}, got {q}")
    return q


class QFockBasis(Sequence):
    """All mode sequences of length <= depth, graded then lexicographic."""

    def __init__(self, window: ModeWindow, depth: int, entries: list[tuple[int, ...]]):
        self.window = window
        self.depth = depth
        self.entries = entries
        self.index = {e: k for k, e in enumerate(entries)}

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, k):
        return self.entries[k]

    def level_positions(self, n: int) -> np.ndarray:
        start = sum(self.window.width**m for m in range(n))
        return np.arange(start, start + self.window.width**n)

    def __repr__(self) -> str:
        return f"QFockBasis(window={self.window}, depth={self.depth}, size={len(self)})"


def count_entries(width: int, depth: int) -> int:
    return sum(width**n for n in range(depth + 1))


def build_q_basis(window: ModeWindow, depth: int, max_entries: int = MAX_ENTRIES) -> QFockBasis:
    if depth < 0:
        raise ValueError("depth must be non-negative")
    total = count_entries(window.width, depth)
    if total > max_entries:
        raise CapacityExceeded(
            f"{total} basis entries for window {window}, depth {depth} exceed bound {max_entries}"
        )
    entries = [
        w for n in range(depth + 1) for w in itertools.product(window.modes, repeat=n)
    ]
    return QFockBasis(window, depth, entries)


def q_creator(basis: QFockBasis, q: float, i: int) -> SparseOperator:
    """``ad(i)``: prepend ``i``; vectors already at full depth go to 0."""
    rows, cols = [], []
    for col, w in enumerate(basis.entries):
        if len(w) < basis.depth:
            rows.append(basis.index[(i,) + w])
            cols.append(col)
    n = len(basis)
    m = sp.csr_matrix((np.ones(len(rows), dtype=complex), (rows, cols)), shape=(n, n))
    return SparseOperator(basis, m)


def q_annihilator(basis: QFockBasis, q: float, i: int) -> SparseOperator:
    """``a(i)``: sum over occurrences of ``i`` at position k of q**(k-1) times removal."""
    rows, cols, vals = [], [], []
    for col, w in enumerate(basis.entries):
        for k, m in enumerate(w):
            if m == i:
                rows.append(basis.index[w[:k] + w[k + 1:]])
                cols.append(col)
                vals.append(q**k)
    n = len(basis)
    m = sp.csr_matrix((np.asarray(vals, dtype=complex), (rows, cols)), shape=(n, n))
    return SparseOperator(basis, m)


class QEngine(FockEngine):
    kind = "q"

    def __init__(self, window: ModeWindow, depth: int, q: float, max_entries: int = MAX_ENTRIES):
        self.q = validate_q(q)
        self.depth = depth
        super().__init__(window, build_q_basis(window, depth, max_entries))
        self._gram: QGram | None = None

    @property
    def params(self) -> dict:
        return {"window": str(self.window), "depth": self.depth, "q": self.q}

    def creator(self, i: int) -> SparseOperator:
        self._check_mode(i)
        return q_creator(self.basis, self.q, i)

    def annihilator(self, i: int) -> SparseOperator:
        self._check_mode(i)
        return q_annihilator(self.basis, self.q, i)

    def gram(self) -> "QGram":
        if self._gram is None:
            self._gram = q_gram(self.basis, self.q)
        return self._gram


def check_q_relation(basis: QFockBasis, q: float, i: int, j: int) -> RelationReport:
    """Defect of ``a(i) ad(j) - q ad(j) a(i) - delta_ij`` on interior columns.

    Columns of length < depth form the interior.  The defect on the
    top-level columns (a truncation artifact) is reported separately.
    """
    q = validate_q(q)
    for m in (i, j):
        if m not in basis.window:
            raise ModeOutOfWindow([m], basis.window)
    A, C = q_annihilator(basis, q, i), q_creator(basis, q, j)
    M = (A @ C).matrix - q * (C @ A).matrix
    if i == j:
        M = M - sp.identity(len(basis), dtype=complex, format="csr")
    M = M.tocsc()
    top = basis.level_positions(basis.depth)
    interior = np.arange(top[0])
    defect = float(abs(M[:, interior]).max()) if len(interior) else 0.0
    boundary = abs(M[:, top])
    nonzero_cols = int((boundary.max(axis=0).toarray().ravel() > 0).sum())
    return RelationReport(
        engine="q",
        params={"q": q, "i": i, "j": j, "window": str(basis.window), "depth": basis.depth},
        defects={"q_commutation": defect},
        tolerance=1e-12,
        boundary_defects={
            "q_commutation": float(boundary.max()) if boundary.nnz else 0.0,
            "broken_top_columns": nonzero_cols,
        },
        note="defect restricted to vectors of length < depth",
    )


# -- deformed inner product ---------------------------------------------------


def inversions(perm: Sequence[int]) -> int:
    return sum(
        1 for x in range(len(perm)) for y in range(x + 1, len(perm)) if perm[x] > perm[y]
    )


def gram_block(seqs: Sequence[tuple[int, ...]], q: float) -> np.ndarray:
    """Brute-force q-Gram over same-length sequences.

    ``G[w, v] = sum of q**inv(s)`` over permutations ``s`` with
    ``v[k] == w[s[k]]`` for all k.  Sequences missing from ``seqs`` are
    skipped, so ``seqs`` must be closed under rearrangement.
    """
    seqs = list(seqs)
    if not seqs:
        return np.zeros((0, 0))
    n = len(seqs[0])
    if n > MAX_GRAM_LEVEL:
        raise ValueError(f"Gram oracle capped at {MAX_GRAM_LEVEL} particles, got {n}")
    index = {w: k for k, w in enumerate(seqs)}
    perms = [(s, q ** inversions(s)) for s in itertools.permutations(range(n))]
    G = np.zeros((len(seqs), len(seqs)))
    for a, w in enumerate(seqs):
        for s, weight in perms:
            b = index.get(tuple(w[k] for k in s))
            if b is not None:
                G[a, b] += weight
    return G


@dataclass(frozen=True)
class QGram:
    q: float
    blocks: dict  # particle number -> dense Hermitian block
    positions: dict  # particle number -> basis positions of the block

    def min_eigenvalues(self) -> dict:
        return {n: float(np.linalg.eigvalsh(G).min()) for n, G in self.blocks.items()}

    def full(self, size: int) -> np.ndarray:
        G = np.zeros((size, size))
        for n, B in self.blocks.items():
            pos = self.positions[n]
            G[np.ix_(pos, pos)] = B
        return G

    def cholesky_factors(self) -> dict:
        """Lower-triangular L per level with ``G = L L^H``."""
        return {n: np.linalg.cholesky(G) for n, G in self.blocks.items()}


def q_gram(basis: QFockBasis, q: float, max_level: int | None = None) -> QGram:
    q = validate_q(q)
    top = basis.depth if max_level is None else min(max_level, basis.depth)
    blocks, positions = {}, {}
    for n in range(top + 1):
        pos = basis.level_positions(n)
        G = gram_block([basis.entries[k] for k in pos], q)
        lam = np.linalg.eigvalsh(G).min()
        if lam <= GRAM_MIN_EIGENVALUE:
            raise GramDegenerate(f"level {n} Gram has min eigenvalue {lam:.3e}")
        blocks[n], positions[n] = G, pos
    return QGram(q, blocks, positions)


def check_q_adjointness(basis: QFockBasis, q: float, i: int, gram: QGram | None = None) -> float:
    """Max entry of ``G a(i) - ad(i)^H G`` over level pairs (n, n+1), n < depth."""
    gram = gram or q_gram(basis, q)
    A = q_annihilator(basis, q, i).matrix.tocsr()
    C = q_creator(basis, q, i).matrix.tocsr()
    defect = 0.0
    for n in range(basis.depth):
        lo, hi = gram.positions[n], gram.positions[n + 1]
        A_blk = A[lo][:, hi].toarray()
        C_blk = C[hi][:, lo].toarray()
        D = gram.blocks[n] @ A_blk - C_blk.conj().T @ gram.blocks[n + 1]
        defect = max(defect, float(np.abs(D).max()) if D.size else 0.0)
    return defect


def check_star_adjointness(engine: QEngine, p: Polynomial) -> float:
    """Compare ``G M(star p)`` with ``M(p)^H G`` where no truncation is hit.

    Rows and columns are restricted to lengths ``<= depth - max word length``.
    """
    L = p.max_length()
    keep = np.flatnonzero(engine.levels() <= engine.depth - L)
    if len(keep) == 0:
        raise ValueError("depth too small for the word length")
    G = engine.gram().full(engine.dim)
    M = engine.materialize(p).dense()
    Ms = engine.materialize(star(p)).dense()
    D = G @ Ms - M.conj().T @ G
    return float(np.abs(D[np.ix_(keep, keep)]).max())


def orthonormal_test_block(
    seqs: Sequence[tuple[int, ...]], q: float
) -> tuple[np.ndarray, np.ndarray]:
    """Cholesky factor ``L`` and its inverse-adjoint for a set of test sequences.

    ``seqs`` must be graded and closed under rearrangement within each level.
    Matrix elements between the orthonormalized vectors are
    ``L^H M L^{-H}`` (restricted to the test positions).
    """
    seqs = list(seqs)
    L = np.zeros((len(seqs), len(seqs)))
    start = 0
    for n, group in itertools.groupby(seqs, key=len):
        block = list(group)
        G = gram_block(block, q)
        lam = np.linalg.eigvalsh(G).min()
        if lam <= GRAM_MIN_EIGENVALUE:
            raise GramDegenerate(f"level {n} Gram has min eigenvalue {lam:.3e}")
        stop = start + len(block)
        L[start:stop, start:stop] = np.linalg.cholesky(G)
        start = stop
    Linv_H = np.linalg.inv(L).conj().T
    return L, Linv_H


def probe_sequences(modes: Iterable[int], depth: int) -> list[tuple[int, ...]]:
    modes = sorted(modes)
    return [w for n in range(depth + 1) for w in itertools.product(modes, repeat=n)]
