"""Symbolic words in creators and annihilators.

A word is a tuple of :class:`Letter`; a :class:`Polynomial` is a finite
complex-linear combination of words with no relations applied.  Index
relabelings (the shift and finite permutations) act letterwise through
:class:`Shift` and :class:`Permutation`.

Text syntax::

    1.0 * ad(0) a(0) + (0.5-2.0j) * a(1) - 3.0 * 1

``ad(i)`` is the creator of mode ``i``, ``a(i)`` the annihilator and ``1``
the unit word.  :func:`parse` inverts :func:`format_polynomial` exactly.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, NamedTuple, Union

from .errors import ParseError


class Kind(enum.IntEnum):
    ANNIHILATOR = 0
    CREATOR = 1


class Letter(NamedTuple):
    mode: int
    kind: Kind

    @property
    def is_creator(self) -> bool:
        return self.kind is Kind.CREATOR

    def adjoint(self) -> "Letter":
        return Letter(self.mode, Kind(1 - self.kind))

    def __str__(self) -> str:
        return f"{'ad' if self.kind else 'a'}({self.mode})"


Word = tuple  # tuple[Letter, ...]


def _coerce(c) -> complex:
    return complex(c)


class Polynomial:
    """Immutable finite linear combination of words.

    Terms are stored sorted by word (lexicographic on ``(mode, kind)``
    sequences) and exact zeros are dropped, so ``==`` compares term maps.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Word, complex] | Iterable[tuple[Word, complex]] = ()):
        acc: dict[Word, complex] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for word, coeff in items:
            word = tuple(Letter(int(m), Kind(k)) for m, k in word)
            acc[word] = acc.get(word, 0j) + _coerce(coeff)
        self._terms = MappingProxyType(
            {w: acc[w] for w in sorted(acc) if acc[w] != 0}
        )

    # constructors
    @classmethod
    def one(cls) -> "Polynomial":
        return cls({(): 1.0})

    @classmethod
    def zero(cls) -> "Polynomial":
        return cls()

    @classmethod
    def from_word(cls, word: Iterable[Letter], coeff: complex = 1.0) -> "Polynomial":
        return cls({tuple(word): coeff})

    @property
    def terms(self) -> Mapping[Word, complex]:
        return self._terms

    def __iter__(self):
        return iter(self._terms.items())

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, float, complex)):
            other = Polynomial.one() * other
        if not isinstance(other, Polynomial):
            return NotImplemented
        return dict(self._terms) == dict(other._terms)

    def __hash__(self) -> int:
        return hash(tuple(self._terms.items()))

    def identity_coefficient(self) -> complex:
        return self._terms.get((), 0j)

    def max_length(self) -> int:
        return max((len(w) for w in self._terms), default=0)

    # arithmetic
    def __add__(self, other):
        if isinstance(other, (int, float, complex)):
            other = Polynomial.one() * other
        if not isinstance(other, Polynomial):
            return NotImplemented
        return Polynomial(list(self._terms.items()) + list(other._terms.items()))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial({w: -c for w, c in self._terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, float, complex)):
            other = Polynomial.one() * other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return Polynomial({w: c * other for w, c in self._terms.items()})
        if not isinstance(other, Polynomial):
            return NotImplemented
        return multiply(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex)):
            return self * other
        return NotImplemented

    def __str__(self) -> str:
        return format_polynomial(self)

    def __repr__(self) -> str:
        return f"Polynomial('{format_polynomial(self)}')"


def a(i: int) -> Polynomial:
    return Polynomial.from_word([Letter(i, Kind.ANNIHILATOR)])


def ad(i: int) -> Polynomial:
    return Polynomial.from_word([Letter(i, Kind.CREATOR)])


def word(*letters: Letter) -> Polynomial:
    return Polynomial.from_word(letters)


def star(p: Polynomial) -> Polynomial:
    """Adjoint: reverse each word, swap a/ad, conjugate coefficients."""
    return Polynomial(
        (tuple(l.adjoint() for l in reversed(w)), c.conjugate()) for w, c in p
    )


def multiply(p: Polynomial, q: Polynomial) -> Polynomial:
    """Free product: concatenate words, multiply coefficients."""
    return Polynomial((u + v, cu * cv) for u, cu in p for v, cv in q)


def support(p: Polynomial) -> frozenset[int]:
    return frozenset(l.mode for w, _ in p for l in w)


# -- index relabelings ------------------------------------------------------


@dataclass(frozen=True)
class Shift:
    power: int = 0

    def __call__(self, m: int) -> int:
        return m + self.power

    def compose(self, other: "Shift") -> "Shift":
        """``self ∘ other``."""
        return Shift(self.power + other.power)

    def inverse(self) -> "Shift":
        return Shift(-self.power)


@dataclass(frozen=True)
class Permutation:
    """Finite-support bijection of the integers; unlisted indices are fixed."""

    mapping: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self):
        m = {int(k): int(v) for k, v in dict(self.mapping).items() if k != v}
        if set(m) != set(m.values()):
            raise ValueError(f"not a permutation of its domain: {m}")
        object.__setattr__(self, "mapping", MappingProxyType(dict(sorted(m.items()))))

    @classmethod
    def transposition(cls, i: int, j: int) -> "Permutation":
        return cls({i: j, j: i})

    def __call__(self, m: int) -> int:
        return self.mapping.get(m, m)

    def __hash__(self) -> int:
        return hash(tuple(self.mapping.items()))

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and dict(self.mapping) == dict(other.mapping)

    def compose(self, other: "Permutation") -> "Permutation":
        """``self ∘ other``."""
        dom = set(self.mapping) | set(other.mapping)
        return Permutation({k: self(other(k)) for k in dom})

    def inverse(self) -> "Permutation":
        return Permutation({v: k for k, v in self.mapping.items()})


GroupElement = Union[Shift, Permutation]


def act(g: GroupElement, p: Polynomial) -> Polynomial:
    """Relabel every mode ``m`` to ``g(m)``."""
    return Polynomial(
        (tuple(Letter(g(l.mode), l.kind) for l in w), c) for w, c in p
    )


# -- text syntax -------------------------------------------------------------


def format_coefficient(c: complex) -> str:
    c = complex(c.real + 0.0, c.imag + 0.0)  # drop signed zeros
    if c.imag == 0:
        return repr(float(c.real))
    return repr(c)


def is_negative(c: complex) -> bool:
    """Sign used when printing: the leading nonzero component is negative."""
    return c.real < 0 or (c.real == 0 and c.imag < 0)


def format_word(w: Word) -> str:
    return " ".join(str(l) for l in w) if w else "1"


def format_polynomial(p: Polynomial) -> str:
    if not p:
        return "0"
    parts = []
    for w, c in p:
        if is_negative(c):
            sign, c = "-", -c
        else:
            sign = "+"
        body = f"{format_coefficient(c)} * {format_word(w)}"
        if not parts:
            parts.append(body if sign == "+" else f"-{body}")
        else:
            parts.append(f"{sign} {body}")
    return " ".join(parts)


_TOKEN = re.compile(
    r"""\s*(?:
        (?P<letter>ad|a)\(\s*(?P<mode>[+-]?\d+)\s*\)
      | (?P<cplx>\([^()]*\))
      | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?j?|inf|nan)
      | (?P<op>[*+\-\[\]])
    )""",
    re.VERBOSE,
)


def tokenize(text: str) -> list[tuple[str, object]]:
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected input at {pos}: {text[pos:pos + 12]!r}")
        pos = m.end()
        if m.group("letter"):
            kind = Kind.CREATOR if m.group("letter") == "ad" else Kind.ANNIHILATOR
            out.append(("letter", Letter(int(m.group("mode")), kind)))
        elif m.group("cplx"):
            try:
                out.append(("num", complex(m.group("cplx").replace(" ", ""))))
            except ValueError as exc:
                raise ParseError(str(exc)) from None
        elif m.group("num"):
            out.append(("num", complex(m.group("num"))))
        else:
            out.append(("op", m.group("op")))
    return out


def parse(text: str) -> Polynomial:
    """Parse the text syntax of the module docstring.

    Square brackets are accepted and ignored so that normal forms printed
    with a bracketed middle block parse back.
    """
    tokens = [t for t in tokenize(text) if t != ("op", "[") and t != ("op", "]")]
    if tokens == [("num", 0j)]:
        return Polynomial.zero()
    terms: list[tuple[Word, complex]] = []
    i = 0
    while i < len(tokens):
        sign = 1.0
        if tokens[i][0] == "op" and tokens[i][1] in "+-":
            sign = -1.0 if tokens[i][1] == "-" else 1.0
            i += 1
        elif terms:
            raise ParseError("terms must be joined by '+' or '-'")
        coeff = 1.0 + 0j
        if i < len(tokens) and tokens[i][0] == "num":
            coeff = tokens[i][1]
            i += 1
            if i < len(tokens) and tokens[i] == ("op", "*"):
                i += 1
            else:
                terms.append(((), sign * coeff))
                continue
        letters: list[Letter] = []
        unit = False
        while i < len(tokens):
            kind, val = tokens[i]
            if kind == "letter":
                letters.append(val)
            elif kind == "num" and val == 1 and not letters and not unit:
                unit = True
            else:
                break
            i += 1
        if not letters and not unit:
            raise ParseError(f"expected a word at token {i}")
        terms.append((tuple(letters), sign * coeff))
    return Polynomial(terms)
