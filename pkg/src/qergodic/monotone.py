"""Monotone Fock space: matrices, relations and the lambda/pi rewriter.

Basis vectors e_s are labelled by strictly increasing mode sequences.  The
creator ``ad(i)`` prepends ``i`` when ``i`` is below the current first mode;
the annihilator ``a(i)`` removes a leading ``i``.

Symbolic reduction works word by word.  Writing ``P_k = a(k) ad(k)`` (the
projection onto vectors whose first mode exceeds ``k``) the rules are::

    ad(i) ad(j) -> 0          i >= j
    a(j) a(i)   -> 0          i >= j
    a(i) ad(j)  -> 0          i != j
    ad(i) P_k   -> ad(i)      i >= k
    a(i) P_k    -> a(i)       i > k
    P_k ad(i)   -> ad(i)      i > k
    P_k a(j)    -> a(j)       j >= k

Irreducible words are exactly lambda forms ``ad(i1)..ad(im) a(j1)..a(jn)``
(creators ascending, annihilators descending) and pi forms with one middle
block ``a(k) ad(k)`` above both neighbours.  A pi form with at least one
neighbour flattens to a finite sum of lambda forms; only the bare ``P_k``
needs the window-dependent expansion ``I - sum_{k' <= k} ad(k') a(k')``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import GammaOutOfRange, ParseError, WindowTooSmall
from .operators import FockEngine, ModeWindow, RelationReport, SparseOperator
from .words import (
    Kind,
    Letter,
    Polynomial,
    Shift,
    act,
    format_coefficient,
    is_negative,
    parse,
    support,
)


def ad_(i: int) -> Letter:
    return Letter(i, Kind.CREATOR)


def a_(i: int) -> Letter:
    return Letter(i, Kind.ANNIHILATOR)


# -- matrices -----------------------------------------------------------------


class MonotoneBasis(Sequence):
    """Strictly increasing sequences over the window, graded then lexicographic."""

    def __init__(self, window: ModeWindow):
        self.window = window
        self.entries = [
            c for n in range(window.width + 1) for c in itertools.combinations(window.modes, n)
        ]
        self.index = {e: k for k, e in enumerate(self.entries)}

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, k):
        return self.entries[k]


def m_creator(basis: MonotoneBasis, i: int) -> SparseOperator:
    rows, cols = [], []
    for col, s in enumerate(basis.entries):
        if not s or i < s[0]:
            rows.append(basis.index[(i,) + s])
            cols.append(col)
    n = len(basis)
    return SparseOperator(basis, sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n)))


def m_annihilator(basis: MonotoneBasis, i: int) -> SparseOperator:
    rows, cols = [], []
    for col, s in enumerate(basis.entries):
        if s and s[0] == i:
            rows.append(basis.index[s[1:]])
            cols.append(col)
    n = len(basis)
    return SparseOperator(basis, sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n)))


class MonotoneEngine(FockEngine):
    kind = "monotone"

    def __init__(self, window: ModeWindow):
        if window.width > 20:
            raise ValueError("monotone basis has 2**width entries; width capped at 20")
        super().__init__(window, MonotoneBasis(window))

    def creator(self, i: int) -> SparseOperator:
        self._check_mode(i)
        return m_creator(self.basis, i)

    def annihilator(self, i: int) -> SparseOperator:
        self._check_mode(i)
        return m_annihilator(self.basis, i)


def check_monotone_relations(engine: MonotoneEngine) -> RelationReport:
    """Max defect of each relation family over all mode pairs in the window.

    The projection identity is checked with its sum cut to the window:
    ``a(i) ad(i) + sum_{lo <= k <= i} ad(k) a(k) = I``.
    """
    modes = list(engine.window.modes)
    C = {i: engine.creator(i).matrix for i in modes}
    A = {i: engine.annihilator(i).matrix for i in modes}

    def mx(m) -> float:
        return float(abs(m).max()) if m.nnz else 0.0

    cc = aa = ac = 0.0
    for i in modes:
        for j in modes:
            if i >= j:
                cc = max(cc, mx(C[i] @ C[j]))
                aa = max(aa, mx(A[j] @ A[i]))
            if i != j:
                ac = max(ac, mx(A[i] @ C[j]))
    ident = sp.identity(engine.dim, format="csr")
    running = sp.csr_matrix((engine.dim, engine.dim))
    proj = 0.0
    for i in modes:
        running = running + C[i] @ A[i]
        proj = max(proj, mx(A[i] @ C[i] + running - ident))
    adj = max(mx(A[i] - C[i].conj().T) for i in modes)
    return RelationReport(
        engine="monotone",
        params={"window": str(engine.window)},
        defects={
            "creator_pairs": cc,
            "annihilator_pairs": aa,
            "mixed_offdiagonal": ac,
            "windowed_projection": proj,
            "adjointness": adj,
        },
        tolerance=0.0,
    )


# -- rewriting ----------------------------------------------------------------

ZERO = None


def _redexes(w: tuple[Letter, ...]) -> list[tuple[str, int]]:
    """All applicable rules as (action, position).

    ``("zero", p)`` kills the word; ``("drop", p)`` deletes the block
    ``w[p] w[p+1] = a(k) ad(k)``.
    """
    out = []
    n = len(w)
    for p in range(n - 1):
        x, y = w[p], w[p + 1]
        if x.is_creator and y.is_creator:
            if x.mode >= y.mode:
                out.append(("zero", p))
        elif not x.is_creator and not y.is_creator:
            if y.mode >= x.mode:
                out.append(("zero", p))
        elif not x.is_creator and y.is_creator:
            if x.mode != y.mode:
                out.append(("zero", p))
                continue
            k = x.mode
            if p > 0:
                left = w[p - 1]
                if (left.is_creator and left.mode >= k) or (not left.is_creator and left.mode > k):
                    out.append(("drop", p))
            if p + 2 < n:
                right = w[p + 2]
                if (right.is_creator and right.mode > k) or (not right.is_creator and right.mode >= k):
                    out.append(("drop", p))
    return out


def rewrite_word(w: Sequence[Letter], rng: random.Random | None = None):
    """Reduce one word to a lambda/pi form, or ``None`` when it vanishes.

    Without ``rng`` the leftmost redex fires first; with ``rng`` a uniformly
    random redex is chosen at every step.
    """
    w = tuple(w)
    while True:
        red = _redexes(w)
        if not red:
            return w
        action, p = rng.choice(red) if rng is not None else red[0]
        if action == "zero":
            return ZERO
        w = w[:p] + w[p + 2:]


def classify(w: tuple[Letter, ...]):
    """Split an irreducible word into ``("lambda", I, J)`` or ``("pi", I, k, J)``."""
    for p in range(len(w) - 1):
        if not w[p].is_creator and w[p + 1].is_creator:
            I = tuple(l.mode for l in w[:p])
            J = tuple(l.mode for l in w[p + 2:])
            return ("pi", I, w[p].mode, J)
    cut = next((p for p, l in enumerate(w) if not l.is_creator), len(w))
    return ("lambda", tuple(l.mode for l in w[:cut]), tuple(l.mode for l in w[cut:]))


def _is_lambda_key(I, J) -> bool:
    return all(x < y for x, y in zip(I, I[1:])) and all(x > y for x, y in zip(J, J[1:]))


def _is_pi_key(I, k, J) -> bool:
    return _is_lambda_key(I, J) and (not I or I[-1] < k) and (not J or J[0] < k)


def _freeze(d: Mapping) -> Mapping:
    return MappingProxyType({k: d[k] for k in sorted(d) if d[k] != 0})


@dataclass(frozen=True)
class NormalForm:
    """Lambda terms keyed ``(creators, annihilators)``; pi terms keyed ``(creators, k, annihilators)``."""

    lambda_terms: Mapping = field(default_factory=dict)
    pi_terms: Mapping = field(default_factory=dict)

    def __post_init__(self):
        lam, pi = _freeze(dict(self.lambda_terms)), _freeze(dict(self.pi_terms))
        for I, J in lam:
            if not _is_lambda_key(I, J):
                raise ValueError(f"invalid lambda key {(I, J)}")
        for I, k, J in pi:
            if not _is_pi_key(I, k, J):
                raise ValueError(f"invalid pi key {(I, k, J)}")
        object.__setattr__(self, "lambda_terms", lam)
        object.__setattr__(self, "pi_terms", pi)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, NormalForm)
            and dict(self.lambda_terms) == dict(other.lambda_terms)
            and dict(self.pi_terms) == dict(other.pi_terms)
        )

    def __hash__(self):
        return hash((tuple(self.lambda_terms.items()), tuple(self.pi_terms.items())))

    def identity_coefficient(self) -> complex:
        return self.lambda_terms.get(((), ()), 0j)

    def to_polynomial(self) -> Polynomial:
        terms = []
        for (I, J), c in self.lambda_terms.items():
            terms.append((tuple(map(ad_, I)) + tuple(map(a_, J)), c))
        for (I, k, J), c in self.pi_terms.items():
            terms.append((tuple(map(ad_, I)) + (a_(k), ad_(k)) + tuple(map(a_, J)), c))
        return Polynomial(terms)

    def shifted(self, power: int) -> "NormalForm":
        sh = lambda t: tuple(x + power for x in t)  # noqa: E731
        return NormalForm(
            {(sh(I), sh(J)): c for (I, J), c in self.lambda_terms.items()},
            {(sh(I), k + power, sh(J)): c for (I, k, J), c in self.pi_terms.items()},
        )

    def __str__(self) -> str:
        return format_normal_form(self)


def _flatten_pi(I, k, J) -> list[tuple[tuple, tuple, int]]:
    """Finite lambda expansion of a pi form with at least one neighbour."""
    lower = max(([I[-1]] if I else []) + ([J[0]] if J else []))
    out = [(I, J, 1)]
    for kk in range(lower + 1, k + 1):
        out.append((I + (kk,), (kk,) + J, -1))
    return out


def normalize(p: Polynomial, flatten: bool = True, rng: random.Random | None = None) -> NormalForm:
    """Rewrite ``p`` into lambda/pi normal form.

    With ``flatten`` every pi form that has a creator on its left or an
    annihilator on its right is expanded into lambda forms; bare ``a(k) ad(k)``
    blocks stay as pi terms.
    """
    lam: dict = {}
    pi: dict = {}
    for w, c in p:
        r = rewrite_word(w, rng)
        if r is ZERO:
            continue
        form = classify(r)
        if form[0] == "lambda":
            key = form[1:]
            lam[key] = lam.get(key, 0j) + c
        else:
            _, I, k, J = form
            if flatten and (I or J):
                for II, JJ, s in _flatten_pi(I, k, J):
                    lam[(II, JJ)] = lam.get((II, JJ), 0j) + s * c
            else:
                pi[(I, k, J)] = pi.get((I, k, J), 0j) + c
    return NormalForm(lam, pi)


def flatten_to_lambda(nf: NormalForm, window: ModeWindow) -> NormalForm:
    """Expand every pi term into lambda forms, cutting bare-block sums to ``window``."""
    lam = dict(nf.lambda_terms)
    for (I, k, J), c in nf.pi_terms.items():
        if I or J:
            parts = _flatten_pi(I, k, J)
        else:
            if k not in window:
                raise WindowTooSmall(f"mode {k} outside window {window}")
            parts = [((), (), 1)] + [((kk,), (kk,), -1) for kk in range(window.lo, k + 1)]
        for II, JJ, s in parts:
            lam[(II, JJ)] = lam.get((II, JJ), 0j) + s * c
    return NormalForm(lam, {})


def format_normal_form(nf: NormalForm) -> str:
    """``ad(i1)..ad(im) [a(k) ad(k)] a(j1)..a(jn)`` terms joined by +/-."""
    items = []
    for (I, J), c in nf.lambda_terms.items():
        letters = [f"ad({i})" for i in I] + [f"a({j})" for j in J]
        items.append((c, " ".join(letters) or "1"))
    for (I, k, J), c in nf.pi_terms.items():
        letters = [f"ad({i})" for i in I] + [f"[a({k}) ad({k})]"] + [f"a({j})" for j in J]
        items.append((c, " ".join(letters)))
    if not items:
        return "0"
    parts = []
    for c, body in items:
        neg = is_negative(c)
        txt = f"{format_coefficient(-c if neg else c)} * {body}"
        if not parts:
            parts.append(f"-{txt}" if neg else txt)
        else:
            parts.append(f"{'-' if neg else '+'} {txt}")
    return " ".join(parts)


def parse_normal_form(text: str) -> NormalForm:
    """Inverse of :func:`format_normal_form`; rejects words not in lambda/pi form."""
    lam: dict = {}
    pi: dict = {}
    for w, c in parse(text):
        if rewrite_word(w) != w:
            raise ParseError(f"term {w} is not in lambda/pi form")
        form = classify(w)
        if form[0] == "lambda":
            lam[form[1:]] = lam.get(form[1:], 0j) + c
        else:
            pi[form[1:]] = pi.get(form[1:], 0j) + c
    return NormalForm(lam, pi)


def _margin_window(modes) -> ModeWindow:
    return ModeWindow(min(modes) - 1, max(modes) + 1) if modes else ModeWindow(0, 0)


def normal_form_oracle_check(p: Polynomial, window: ModeWindow, nf: NormalForm | None = None) -> float:
    """Max-entry distance between the matrices of ``p`` and of its normal form."""
    modes = support(p)
    if modes:
        need = _margin_window(modes)
        if window.lo > need.lo or window.hi < need.hi:
            raise WindowTooSmall("window must cover the support with one mode of margin", need)
    nf = normalize(p) if nf is None else nf
    eng = MonotoneEngine(window)
    return (eng.materialize(p) - eng.materialize(nf.to_polynomial())).max_abs()


# -- stationary states --------------------------------------------------------


def vacuum_value(nf: NormalForm) -> complex:
    """Vacuum expectation of a normal form: identity plus bare projection terms."""
    return nf.identity_coefficient() + sum(
        (c for (I, k, J), c in nf.pi_terms.items() if not I and not J), 0j
    )


@dataclass(frozen=True)
class MonotoneState:
    """``(1 - gamma) * vacuum + gamma * state_at_infinity``."""

    gamma: float

    def __post_init__(self):
        if not 0.0 <= self.gamma <= 1.0:
            raise GammaOutOfRange(f"gamma must lie in [0, 1], got {self.gamma}")

    def __call__(self, x) -> complex:
        nf = x if isinstance(x, NormalForm) else normalize(x)
        return (1 - self.gamma) * vacuum_value(nf) + self.gamma * nf.identity_coefficient()


def monotone_state(gamma: float) -> MonotoneState:
    return MonotoneState(gamma)


@dataclass
class InvarianceReport:
    checked: int
    failures: list
    max_deviation: float

    @property
    def passed(self) -> bool:
        return not self.failures


def stationarity_check(gamma: float, words: Iterable[Polynomial], shift_powers: Iterable[int]) -> InvarianceReport:
    phi = MonotoneState(gamma)
    powers = list(shift_powers)
    failures, worst, n = [], 0.0, 0
    for w in words:
        base = phi(w)
        for k in powers:
            val = phi(act(Shift(k), w))
            n += 1
            worst = max(worst, abs(val - base))
            if val != base:
                failures.append((str(w), k, base, val))
    return InvarianceReport(n, failures, worst)
