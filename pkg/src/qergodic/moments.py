"""Joint-moment tables of stochastic processes indexed by Z.

A key is a sequence of (index, label) slots with adjacent indices distinct;
its value is the state of the ordered product of the labelled sample
operators placed at those indices.  Labels come from a finite alphabet with
an involution and a unit ``"1"``.  A composite label ``"a·ad"`` is a product
inside one slot (``"."`` is accepted as separator on input).

CSV schema: ``indices;labels;re;im`` with comma-separated indices/labels,
rows sorted lexicographically by key.
"""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .errors import KeyConcatenationInvalid, UnknownLabel, WindowTooSmall
from .freegroup import GroupWord, HaagerupState
from .operators import ModeWindow
from .words import Permutation, Polynomial, Shift, a, ad

UNIT = "1"
SEP = "·"
FOCK_ALPHABET = MappingProxyType({"1": "1", "a": "ad", "ad": "a", "x": "x"})
HAAGERUP_ALPHABET = MappingProxyType({"1": "1", "g": "g^-1", "g^-1": "g"})


def split_label(label: str) -> tuple[str, ...]:
    return tuple(part for part in label.replace(".", SEP).split(SEP) if part)


def join_label(parts: Sequence[str]) -> str:
    """Product of label components; unit factors drop out."""
    parts = [p for p in parts if p != UNIT]
    return SEP.join(parts) if parts else UNIT


def normalize_label(label: str) -> str:
    return join_label(split_label(label))


@dataclass(frozen=True, order=True)
class MomentKey:
    indices: tuple[int, ...]
    labels: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(int(j) for j in self.indices))
        object.__setattr__(self, "labels", tuple(normalize_label(l) for l in self.labels))
        if len(self.indices) != len(self.labels):
            raise ValueError("indices and labels must have equal length")
        for x, y in zip(self.indices, self.indices[1:]):
            if x == y:
                raise ValueError(f"adjacent indices must differ: {self.indices}")

    @classmethod
    def unit(cls) -> "MomentKey":
        return cls((), ())

    def __len__(self) -> int:
        return len(self.indices)

    def __str__(self) -> str:
        if not self.indices:
            return "()"
        return " ".join(f"{l}@{j}" for j, l in zip(self.indices, self.labels))

    def relabel(self, g: Callable[[int], int]) -> "MomentKey":
        return MomentKey(tuple(g(j) for j in self.indices), self.labels)


def fuse(slots: Iterable[tuple[int, str]]) -> MomentKey:
    """Build a key from slots, multiplying labels of equal neighbours."""
    out: list[list] = []
    for j, l in slots:
        if out and out[-1][0] == j:
            out[-1][1] = join_label(split_label(out[-1][1]) + split_label(l))
        else:
            out.append([j, l])
    return MomentKey(tuple(j for j, _ in out), tuple(l for _, l in out))


# -- bindings -----------------------------------------------------------------------


class FockBinding:
    """Labels become mode operators; ``state`` is any callable on polynomials."""

    alphabet = FOCK_ALPHABET

    def __init__(self, state: Callable[[Polynomial], complex], window: ModeWindow | None = None, name: str = ""):
        self.state = state
        self.window = window
        self.name = name or f"{getattr(state, 'label', 'fock')}"

    @staticmethod
    def operator(label: str, j: int) -> Polynomial:
        if label == "a":
            return a(j)
        if label == "ad":
            return ad(j)
        if label == "x":
            return a(j) + ad(j)
        if label == UNIT:
            return Polynomial.one()
        raise UnknownLabel(label)

    def __call__(self, key: MomentKey) -> complex:
        p = Polynomial.one()
        for j, label in zip(key.indices, key.labels):
            for part in split_label(label) or (UNIT,):
                p = p * self.operator(part, j)
        return complex(self.state(p))


class HaagerupBinding:
    """Label ``g`` at index ``j`` is the generator ``g_j``."""

    alphabet = HAAGERUP_ALPHABET

    def __init__(self, lam: float, window: ModeWindow | None = None):
        self.state = HaagerupState(lam)
        self.window = window
        self.name = "haagerup"

    @staticmethod
    def operator(label: str, j: int) -> GroupWord:
        if label == "g":
            return GroupWord.generator(j, 1)
        if label == "g^-1":
            return GroupWord.generator(j, -1)
        if label == UNIT:
            return GroupWord.identity()
        raise UnknownLabel(label)

    def __call__(self, key: MomentKey) -> complex:
        w = GroupWord.identity()
        for j, label in zip(key.indices, key.labels):
            for part in split_label(label):
                w = w * self.operator(part, j)
        return complex(self.state(w))


# -- tables --------------------------------------------------------------------------


class MomentTable:
    """Moments as stored entries, optionally backed by an engine binding.

    Stored entries win over the binding, so a bound table can be tampered
    with for negative tests.
    """

    def __init__(
        self,
        alphabet: Mapping[str, str] | None = None,
        entries: Mapping[MomentKey, complex] | None = None,
        binding=None,
    ):
        if alphabet is None:
            alphabet = binding.alphabet if binding is not None else FOCK_ALPHABET
        self.alphabet = MappingProxyType(dict(alphabet))
        for l, l_star in self.alphabet.items():
            if self.alphabet.get(l_star) != l:
                raise ValueError(f"alphabet involution broken at {l!r}")
        self.binding = binding
        self._entries: dict[MomentKey, complex] = {}
        for k, v in (entries or {}).items():
            self.set(k, v)

    @property
    def name(self) -> str:
        return getattr(self.binding, "name", "table")

    @property
    def entries(self) -> Mapping[MomentKey, complex]:
        return MappingProxyType(dict(sorted(self._entries.items())))

    def _check_labels(self, key: MomentKey):
        for label in key.labels:
            for part in split_label(label):
                if part not in self.alphabet:
                    raise UnknownLabel(part)

    def set(self, key: MomentKey, value: complex):
        self._check_labels(key)
        self._entries[key] = complex(value)

    def adjoint_label(self, label: str) -> str:
        parts = split_label(label)
        for part in parts:
            if part not in self.alphabet:
                raise UnknownLabel(part)
        return join_label([self.alphabet[p] for p in reversed(parts)])

    def adjoint_key(self, key: MomentKey) -> MomentKey:
        return MomentKey(key.indices[::-1], tuple(self.adjoint_label(l) for l in key.labels[::-1]))

    def __contains__(self, key: MomentKey) -> bool:
        return key in self._entries or self.binding is not None

    def __call__(self, key: MomentKey) -> complex:
        self._check_labels(key)
        if not key.indices:
            return self._entries.get(key, 1.0 + 0j)
        if key in self._entries:
            return self._entries[key]
        if self.binding is None:
            raise KeyError(f"no entry for {key}")
        win = getattr(self.binding, "window", None)
        if win is not None and not win.contains_all(key.indices):
            raise WindowTooSmall(f"key {key} leaves window {win}", ModeWindow(min(key.indices), max(key.indices)))
        return self.binding(key)

    def fill(self, keys: Iterable[MomentKey]) -> "MomentTable":
        for k in keys:
            self.set(k, self(k))
        return self

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, delimiter=";", lineterminator="\n")
        wr.writerow(["indices", "labels", "re", "im"])
        for k, v in sorted(self._entries.items()):
            wr.writerow([",".join(map(str, k.indices)), ",".join(k.labels), repr(v.real), repr(v.imag)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, alphabet: Mapping[str, str] | None = None, binding=None) -> "MomentTable":
        entries = {}
        for row in csv.DictReader(io.StringIO(text), delimiter=";"):
            idx = tuple(int(x) for x in row["indices"].split(",") if x != "")
            labels = tuple(x for x in row["labels"].split(",") if x != "")
            entries[MomentKey(idx, labels)] = complex(float(row["re"]), float(row["im"]))
        return cls(alphabet, entries, binding)


def evaluate(table_or_binding, key: MomentKey) -> complex:
    return table_or_binding(key)


def enumerate_keys(indices: Sequence[int], labels: Sequence[str], max_len: int) -> list[MomentKey]:
    """All keys over ``indices`` with adjacent indices distinct, lengths ``1..max_len``."""
    out = []
    for n in range(1, max_len + 1):
        for idx in itertools.product(indices, repeat=n):
            if any(x == y for x, y in zip(idx, idx[1:])):
                continue
            for labs in itertools.product(labels, repeat=n):
                out.append(MomentKey(idx, labs))
    return out


# -- checks ----------------------------------------------------------------------------


@dataclass
class MomentReport:
    checked: int = 0
    failures: list = field(default_factory=list)
    max_deviation: float = 0.0
    tolerance: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures

    def record(self, what, lhs: complex, rhs: complex):
        self.checked += 1
        d = abs(lhs - rhs)
        self.max_deviation = max(self.max_deviation, d)
        if (lhs != rhs) if self.tolerance == 0 else d > self.tolerance:
            self.failures.append((what, lhs, rhs))


def concatenate(table: MomentTable, left: MomentKey, right: MomentKey) -> MomentKey:
    """``left* · right`` with colliding neighbour slots fused."""
    ls = table.adjoint_key(left)
    try:
        return fuse(list(zip(ls.indices, ls.labels)) + list(zip(right.indices, right.labels)))
    except ValueError as exc:
        raise KeyConcatenationInvalid(str(exc)) from exc


def positivity_gram(table: MomentTable, half_keys: Sequence[MomentKey]) -> np.ndarray:
    G = np.empty((len(half_keys), len(half_keys)), dtype=complex)
    for i, hi in enumerate(half_keys):
        for j, hj in enumerate(half_keys):
            k = concatenate(table, hi, hj)
            if table.binding is None and k.indices and k not in table.entries:
                raise KeyConcatenationInvalid(f"table has no entry for {k}")
            G[i, j] = table(k)
    return G


def positivity_check(table: MomentTable, half_keys: Sequence[MomentKey]) -> float:
    """Smallest eigenvalue of the Hermitian part of ``[p(h_i* h_j)]``."""
    G = positivity_gram(table, half_keys)
    return float(np.linalg.eigvalsh((G + G.conj().T) / 2).min())


def remove_unit(key: MomentKey, position: int) -> MomentKey:
    if key.labels[position] != UNIT:
        raise ValueError(f"slot {position} of {key} is not the unit label")
    slots = list(zip(key.indices, key.labels))
    del slots[position]
    return fuse(slots)


def consistency_check(table: MomentTable, key: MomentKey, position: int) -> MomentReport:
    """``p(..., 1 at position, ...)`` against the reduced key."""
    rep = MomentReport()
    reduced = remove_unit(key, position)
    rep.record((key, reduced), table(key), table(reduced))
    return rep


def conjugate_symmetry_check(table: MomentTable, keys: Iterable[MomentKey], tol: float = 0.0) -> MomentReport:
    rep = MomentReport(tolerance=tol)
    for k in keys:
        rep.record(k, table(table.adjoint_key(k)), complex(table(k)).conjugate())
    return rep


def _invariance(table, keys, elements, tol) -> MomentReport:
    rep = MomentReport(tolerance=tol)
    win = getattr(table.binding, "window", None)
    for k in keys:
        base = table(k)
        for g in elements:
            moved = k.relabel(g)
            if win is not None and not win.contains_all(moved.indices):
                raise WindowTooSmall(f"{g} moves {k} outside {win}")
            rep.record((k, g), table(moved), base)
    return rep


def exchangeability_check(
    table: MomentTable, keys: Iterable[MomentKey], permutations: Iterable[Permutation], tol: float = 0.0
) -> MomentReport:
    return _invariance(table, list(keys), list(permutations), tol)


def stationarity_check(
    table: MomentTable, keys: Iterable[MomentKey], powers: Iterable[int] = (1,), tol: float = 0.0
) -> MomentReport:
    return _invariance(table, list(keys), [Shift(n) for n in powers], tol)


def permutations_of(indices: Sequence[int]) -> list[Permutation]:
    idx = sorted(set(indices))
    return [Permutation(dict(zip(idx, img))) for img in itertools.permutations(idx)]


@dataclass
class SymshReport:
    exchangeability: MomentReport
    stationarity: MomentReport

    @property
    def hypothesis_met(self) -> bool:
        return self.exchangeability.passed

    @property
    def verdict(self) -> str:
        if not self.hypothesis_met:
            return "hypothesis not met"
        return "holds" if self.stationarity.passed else "violated"

    @property
    def passed(self) -> bool:
        return self.verdict != "violated"


def symsh_verification(
    table: MomentTable,
    keys: Iterable[MomentKey],
    powers: Iterable[int] = (1,),
    permutations: Iterable[Permutation] | None = None,
) -> SymshReport:
    """Exchangeable on ``keys`` implies stationary on ``keys``; both checked exactly.

    ``permutations`` defaults to all permutations of the indices used by
    ``keys``.
    """
    keys = list(keys)
    if permutations is None:
        permutations = permutations_of({j for k in keys for j in k.indices})
    ex = exchangeability_check(table, keys, permutations)
    st = stationarity_check(table, keys, powers)
    return SymshReport(ex, st)


def fock_table(state, window: ModeWindow | None = None, name: str = "") -> MomentTable:
    return MomentTable(binding=FockBinding(state, window, name))


def haagerup_table(lam: float, window: ModeWindow | None = None) -> MomentTable:
    return MomentTable(binding=HaagerupBinding(lam, window))
