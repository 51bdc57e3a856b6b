"""Reduced words in the free group on Z-indexed generators and Haagerup states.

Word syntax: ``g1 g2^-1 g1``; the empty word prints as ``e``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import LambdaOutOfRange, ParseError, SupportsOverlap
from .words import GroupElement

Syllable = tuple  # (generator index, +1 or -1)


def reduce(letters: Iterable[Syllable]) -> "GroupWord":
    """Free reduction with a stack; result is the unique reduced word."""
    stack: list[tuple[int, int]] = []
    for gen, exp in letters:
        gen, exp = int(gen), int(exp)
        if exp not in (1, -1):
            raise ValueError(f"exponent must be +1 or -1, got {exp}")
        if stack and stack[-1] == (gen, -exp):
            stack.pop()
        else:
            stack.append((gen, exp))
    return GroupWord._trusted(tuple(stack))


class GroupWord:
    __slots__ = ("letters",)

    def __init__(self, letters: Iterable[Syllable] = ()):
        letters = tuple((int(g), int(e)) for g, e in letters)
        if reduce(letters).letters != letters:
            raise ValueError(f"word {letters} is not reduced")
        self.letters = letters

    @classmethod
    def _trusted(cls, letters: tuple) -> "GroupWord":
        w = object.__new__(cls)
        w.letters = letters
        return w

    @classmethod
    def identity(cls) -> "GroupWord":
        return cls._trusted(())

    @classmethod
    def generator(cls, i: int, exp: int = 1) -> "GroupWord":
        return cls._trusted(((int(i), int(exp)),))

    def __len__(self) -> int:
        return len(self.letters)

    def __mul__(self, other: "GroupWord") -> "GroupWord":
        return reduce(self.letters + other.letters)

    def inverse(self) -> "GroupWord":
        return GroupWord._trusted(tuple((g, -e) for g, e in reversed(self.letters)))

    def support(self) -> frozenset[int]:
        return frozenset(g for g, _ in self.letters)

    def __eq__(self, other) -> bool:
        return isinstance(other, GroupWord) and self.letters == other.letters

    def __lt__(self, other: "GroupWord") -> bool:
        return (len(self), self.letters) < (len(other), other.letters)

    def __hash__(self) -> int:
        return hash(self.letters)

    def __str__(self) -> str:
        if not self.letters:
            return "e"
        return " ".join(f"g{g}" if e == 1 else f"g{g}^-1" for g, e in self.letters)

    def __repr__(self) -> str:
        return f"GroupWord('{self}')"


_SYLLABLE = re.compile(r"g(-?\d+)(?:\^(-?1))?$")


def parse_group_word(text: str) -> GroupWord:
    """Parse ``g1 g2^-1 g1`` (reducing on the way); ``e`` or ``1`` is the identity."""
    letters = []
    for tok in text.split():
        if tok in ("e", "1"):
            continue
        m = _SYLLABLE.match(tok)
        if not m:
            raise ParseError(f"bad group letter {tok!r}")
        letters.append((int(m.group(1)), int(m.group(2) or 1)))
    return reduce(letters)


def act_on_word(g: GroupElement, w: GroupWord) -> GroupWord:
    """Relabel generator indices; relabeling preserves reducedness."""
    return GroupWord._trusted(tuple((g(i), e) for i, e in w.letters))


class GroupAlgebraElement:
    """Finite complex combination of reduced words."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[GroupWord, complex] | Iterable = ()):
        acc: dict[GroupWord, complex] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for w, c in items:
            acc[w] = acc.get(w, 0j) + complex(c)
        self.terms = MappingProxyType({w: acc[w] for w in sorted(acc) if acc[w] != 0})

    def __mul__(self, other: "GroupAlgebraElement") -> "GroupAlgebraElement":
        return GroupAlgebraElement((u * v, a * b) for u, a in self.terms.items() for v, b in other.terms.items())

    def __add__(self, other: "GroupAlgebraElement") -> "GroupAlgebraElement":
        return GroupAlgebraElement(list(self.terms.items()) + list(other.terms.items()))

    def star(self) -> "GroupAlgebraElement":
        return GroupAlgebraElement((w.inverse(), c.conjugate()) for w, c in self.terms.items())

    def support(self) -> frozenset[int]:
        return frozenset().union(*(w.support() for w in self.terms)) if self.terms else frozenset()

    def __eq__(self, other) -> bool:
        return isinstance(other, GroupAlgebraElement) and dict(self.terms) == dict(other.terms)


@dataclass(frozen=True)
class HaagerupState:
    """``phi(w) = exp(-lam * |w|)``; ``lam = inf`` is the trace (1 on e, 0 elsewhere)."""

    lam: float

    def __post_init__(self):
        if not (self.lam > 0):
            raise LambdaOutOfRange(f"lambda must lie in (0, inf], got {self.lam}")

    def __call__(self, x) -> complex | float:
        if isinstance(x, GroupAlgebraElement):
            return sum((c * self(w) for w, c in x.terms.items()), 0j)
        return self.of_length(len(x))

    def of_length(self, n: int) -> float:
        if math.isinf(self.lam):
            return 1.0 if n == 0 else 0.0
        return math.exp(-self.lam * n)


def haagerup(lam: float, w) -> complex | float:
    return HaagerupState(lam)(w)


@dataclass
class ConditionReport:
    lhs: float
    rhs: float
    equal: bool
    in_hypothesis: bool
    lhs_length: int
    rhs_length: int


def product_state_check(lam: float, v: GroupWord, w: GroupWord, strict: bool = False) -> ConditionReport:
    """Compare ``phi(vw)`` with ``phi(v) phi(w)``.

    Both sides are ``exp(-lam * n)`` for integer ``n``; equality is decided
    on those integers, so it is exact.  Overlapping supports are flagged (or
    raise with ``strict``).
    """
    phi = HaagerupState(lam)
    overlap = bool(v.support() & w.support())
    if overlap and strict:
        raise SupportsOverlap(f"supports of {v} and {w} intersect")
    vw = v * w
    return ConditionReport(
        lhs=phi(vw),
        rhs=phi(v) * phi(w),
        equal=len(vw) == len(v) + len(w),
        in_hypothesis=not overlap,
        lhs_length=len(vw),
        rhs_length=len(v) + len(w),
    )


def block_singleton_check(
    lam: float, u: GroupWord, v: GroupWord, w: GroupWord, strict: bool = False
) -> ConditionReport:
    """Compare ``phi(uvw)`` with ``phi(uw) phi(v)``."""
    phi = HaagerupState(lam)
    overlap = bool(v.support() & (u.support() | w.support()))
    if overlap and strict:
        raise SupportsOverlap(f"support of {v} meets those of {u}, {w}")
    uvw, uw = u * v * w, u * w
    return ConditionReport(
        lhs=phi(uvw),
        rhs=phi(uw) * phi(v),
        equal=len(uvw) == len(uw) + len(v),
        in_hypothesis=not overlap,
        lhs_length=len(uvw),
        rhs_length=len(uw) + len(v),
    )


def haagerup_gram(lam: float, words: Sequence[GroupWord]) -> np.ndarray:
    phi = HaagerupState(lam)
    return np.array([[phi(vi.inverse() * vj) for vj in words] for vi in words], dtype=float)


def haagerup_positivity_probe(lam: float, words: Sequence[GroupWord]) -> float:
    """Smallest eigenvalue of ``[phi(v_i^-1 v_j)]``."""
    if len(set(words)) != len(words):
        raise ValueError("words must be distinct")
    return float(np.linalg.eigvalsh(haagerup_gram(lam, words)).min())


def symmetry_check(lam: float, w: GroupWord, g: GroupElement) -> bool:
    phi = HaagerupState(lam)
    return phi(act_on_word(g, w)) == phi(w)


def random_reduced_word(rng: np.random.Generator, max_len: int, generators: Sequence[int]) -> GroupWord:
    """Uniform length, then letters drawn avoiding immediate cancellation."""
    n = int(rng.integers(0, max_len + 1))
    letters: list[tuple[int, int]] = []
    while len(letters) < n:
        cand = (int(rng.choice(generators)), int(rng.choice([1, -1])))
        if letters and letters[-1] == (cand[0], -cand[1]):
            continue
        letters.append(cand)
    return GroupWord._trusted(tuple(letters))
