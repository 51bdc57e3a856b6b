"""Shared matrix-layer machinery for the Fock engines.

Every engine exposes the same surface: a basis with a reverse lookup,
``creator(i)`` / ``annihilator(i)`` as :class:`SparseOperator`, and
:meth:`FockEngine.materialize` mapping symbolic polynomials to matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import ModeOutOfWindow
from .words import Letter, Polynomial, support

MATERIALIZATION_TOL = 1e-15


@dataclass(frozen=True)
class ModeWindow:
    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty window [{self.lo}, {self.hi}]")

    @classmethod
    def parse(cls, text: str) -> "ModeWindow":
        lo, hi = text.split(":")
        return cls(int(lo), int(hi))

    @property
    def width(self) -> int:
        return self.hi - self.lo + 1

    @property
    def modes(self) -> range:
        return range(self.lo, self.hi + 1)

    def __contains__(self, m) -> bool:
        return self.lo <= m <= self.hi

    def contains_all(self, modes: Iterable[int]) -> bool:
        return all(m in self for m in modes)

    def __str__(self) -> str:
        return f"{self.lo}:{self.hi}"


class SparseOperator:
    """Complex CSR matrix tied to the basis it acts on."""

    __slots__ = ("basis", "matrix")

    def __init__(self, basis, matrix):
        m = sp.csr_matrix(matrix, dtype=complex)
        if m.shape != (len(basis), len(basis)):
            raise ValueError(f"shape {m.shape} does not match basis of size {len(basis)}")
        if m.nnz:
            m.data[np.abs(m.data) <= MATERIALIZATION_TOL] = 0
            m.eliminate_zeros()
        self.basis = basis
        self.matrix = m

    @property
    def shape(self):
        return self.matrix.shape

    def _check(self, other: "SparseOperator"):
        if other.basis is not self.basis and len(other.basis) != len(self.basis):
            raise ValueError("operators act on different bases")

    def __matmul__(self, other: "SparseOperator") -> "SparseOperator":
        self._check(other)
        return SparseOperator(self.basis, self.matrix @ other.matrix)

    def __add__(self, other: "SparseOperator") -> "SparseOperator":
        self._check(other)
        return SparseOperator(self.basis, self.matrix + other.matrix)

    def __sub__(self, other: "SparseOperator") -> "SparseOperator":
        self._check(other)
        return SparseOperator(self.basis, self.matrix - other.matrix)

    def __mul__(self, c) -> "SparseOperator":
        return SparseOperator(self.basis, self.matrix * complex(c))

    __rmul__ = __mul__

    def adjoint(self) -> "SparseOperator":
        """Conjugate transpose (the adjoint for an orthonormal basis)."""
        return SparseOperator(self.basis, self.matrix.conj().T)

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def entry(self, row: int, col: int) -> complex:
        return complex(self.matrix[row, col])

    def max_abs(self) -> float:
        return float(np.abs(self.matrix.data).max()) if self.matrix.nnz else 0.0

    def to_coo_text(self) -> str:
        """Coordinate listing, one ``row col re im`` line per stored entry."""
        coo = self.matrix.tocoo()
        order = np.lexsort((coo.col, coo.row))
        lines = [
            f"{int(coo.row[k])} {int(coo.col[k])} {float(coo.data[k].real)!r} {float(coo.data[k].imag)!r}"
            for k in order
        ]
        return "\n".join(lines) + ("\n" if lines else "")

    def __repr__(self) -> str:
        return f"SparseOperator(dim={self.shape[0]}, nnz={self.matrix.nnz})"


def operator_norm(op: SparseOperator) -> float:
    """Largest singular value."""
    n = op.shape[0]
    if n <= 512:
        return float(np.linalg.norm(op.dense(), 2))
    from scipy.sparse.linalg import svds

    return float(svds(op.matrix, k=1, return_singular_vectors=False)[0])


@dataclass
class RelationReport:
    """Max-entry defects per relation family."""

    engine: str
    params: dict
    defects: dict = field(default_factory=dict)
    tolerance: float = 0.0
    boundary_defects: dict = field(default_factory=dict)
    note: str = ""

    @property
    def max_defect(self) -> float:
        return max(self.defects.values(), default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_defect <= self.tolerance


class FockEngine:
    """Base class: subclasses define the basis and the two letter matrices."""

    kind = "abstract"

    def __init__(self, window: ModeWindow, basis: Sequence):
        self.window = window
        self.basis = basis
        self._letters: dict[Letter, SparseOperator] = {}

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def params(self) -> dict:
        return {"window": str(self.window)}

    def creator(self, i: int) -> SparseOperator:
        raise NotImplementedError

    def annihilator(self, i: int) -> SparseOperator:
        raise NotImplementedError

    def _check_mode(self, i: int):
        if i not in self.window:
            raise ModeOutOfWindow([i], self.window)

    def letter(self, l: Letter) -> SparseOperator:
        op = self._letters.get(l)
        if op is None:
            op = self.creator(l.mode) if l.is_creator else self.annihilator(l.mode)
            self._letters[l] = op
        return op

    def identity(self) -> SparseOperator:
        return SparseOperator(self.basis, sp.identity(self.dim, dtype=complex, format="csr"))

    def zero(self) -> SparseOperator:
        return SparseOperator(self.basis, sp.csr_matrix((self.dim, self.dim), dtype=complex))

    def materialize(self, p: Polynomial) -> SparseOperator:
        """Linear, multiplicative image of ``p``: letters first, then products."""
        bad = {m for m in support(p) if m not in self.window}
        if bad:
            raise ModeOutOfWindow(bad, self.window)
        total = sp.csr_matrix((self.dim, self.dim), dtype=complex)
        ident = sp.identity(self.dim, dtype=complex, format="csr")
        for w, c in p:
            m = ident
            for l in w:
                m = m @ self.letter(l).matrix
            total = total + c * m
        return SparseOperator(self.basis, total)

    def vacuum_expectation(self, op: SparseOperator) -> complex:
        return op.entry(0, 0)

    def levels(self) -> np.ndarray:
        """Particle number of each basis entry."""
        return np.array([len(e) for e in self.basis])


def local_relabeling(modes: Iterable[int], order_preserving: bool = True) -> dict[int, int]:
    """Map a finite set of modes onto ``0..k-1``.

    With ``order_preserving`` the relative order survives (needed by the
    monotone engine).  Otherwise the given iteration order is used, which
    lets permutation-invariant engines canonicalize by first occurrence.
    """
    seq = sorted(set(modes)) if order_preserving else list(dict.fromkeys(modes))
    return {m: k for k, m in enumerate(seq)}


def first_occurrence_modes(p: Polynomial) -> list[int]:
    seen: dict[int, None] = {}
    for w, _ in p:
        for l in w:
            seen.setdefault(l.mode, None)
    return list(seen)
