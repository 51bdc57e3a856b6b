"""State functionals over the engines.

Vacuum and segment states evaluate a polynomial on the smallest engine
holding its support (modes relabeled onto ``0..k-1``), so values do not
depend on any ambient window.  :class:`VectorState` instead lives on a
fixed engine.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .boolean import BooleanEngine, BooleanState
from .errors import ParameterOutOfRange
from .freegroup import HaagerupState
from .monotone import MonotoneEngine, MonotoneState
from .operators import FockEngine, ModeWindow, first_occurrence_modes, local_relabeling
from .qfock import QEngine, validate_q
from .words import Letter, Polynomial, support

ENGINES = ("q", "boolean", "monotone")


def relabel(p: Polynomial, mapping: dict[int, int]) -> Polynomial:
    return Polynomial((tuple(Letter(mapping[l.mode], l.kind) for l in w), c) for w, c in p)


def local_mapping(kind: str, modes) -> dict[int, int]:
    """Monotone needs order; q and Boolean are relabeling invariant."""
    return local_relabeling(modes, order_preserving=(kind == "monotone"))


def make_engine(kind: str, window: ModeWindow, q: float | None = None, depth: int | None = None) -> FockEngine:
    if kind == "q":
        if q is None or depth is None:
            raise ParameterOutOfRange("q engine needs q and depth")
        return QEngine(window, depth, q)
    if kind == "boolean":
        return BooleanEngine(window)
    if kind == "monotone":
        return MonotoneEngine(window)
    raise ParameterOutOfRange(f"unknown engine {kind!r}; expected one of {ENGINES}")


def local_vacuum(kind: str, p: Polynomial, q: float | None = None) -> complex:
    """Exact vacuum expectation of ``p``.

    For the q engine a depth of ``floor(L/2)`` suffices: a path that returns
    to the vacuum after ``L`` letters never rises above that level.
    """
    modes = first_occurrence_modes(p)
    if not modes:
        return p.identity_coefficient()
    return _canonical_vacuum(kind, relabel(p, local_mapping(kind, modes)), q)


@lru_cache(maxsize=65536)
def _canonical_vacuum(kind: str, p: Polynomial, q: float | None) -> complex:
    window = ModeWindow(0, len(support(p)) - 1)
    eng = make_engine(kind, window, q=q, depth=p.max_length() // 2)
    return eng.vacuum_expectation(eng.materialize(p))


@dataclass(frozen=True)
class VacuumState:
    """``omega_q``, ``omega_#`` or the monotone vacuum."""

    kind: str
    q: float | None = None

    def __post_init__(self):
        if self.kind not in ENGINES:
            raise ParameterOutOfRange(f"unknown engine {self.kind!r}")
        if self.kind == "q":
            validate_q(self.q)

    @property
    def label(self) -> str:
        return self.kind

    @property
    def param(self):
        return self.q if self.kind == "q" else ""

    def __call__(self, p: Polynomial) -> complex:
        return local_vacuum(self.kind, p, self.q)


@dataclass(frozen=True)
class SegmentState:
    """``(1 - gamma) * vacuum + gamma * omega_inf`` for the Boolean or monotone engine."""

    kind: str
    gamma: float

    def __post_init__(self):
        if self.kind not in ("boolean", "monotone"):
            raise ParameterOutOfRange("segment states exist for the boolean and monotone engines")
        impl = BooleanState(self.gamma) if self.kind == "boolean" else MonotoneState(self.gamma)
        object.__setattr__(self, "_impl", impl)

    @property
    def label(self) -> str:
        return self.kind

    @property
    def param(self):
        return self.gamma

    def __call__(self, p: Polynomial) -> complex:
        return self._impl(p)


class VectorState:
    """``<M(p) xi, xi>`` on a fixed engine, Gram-weighted for the q engine."""

    def __init__(self, engine: FockEngine, xi):
        xi = np.asarray(xi, dtype=complex)
        self.engine = engine
        self.gram = engine.gram().full(engine.dim) if isinstance(engine, QEngine) else None
        norm2 = np.vdot(xi, self._G(xi)).real
        if norm2 <= 0:
            raise ValueError("zero vector")
        self.xi = xi / np.sqrt(norm2)

    def _G(self, v):
        return v if self.gram is None else self.gram @ v

    @property
    def label(self) -> str:
        return self.engine.kind

    @property
    def param(self):
        return getattr(self.engine, "q", "")

    def __call__(self, p: Polynomial) -> complex:
        M = self.engine.materialize(p).matrix
        return complex(np.vdot(self.xi, self._G(M @ self.xi)))


__all__ = [
    "HaagerupState",
    "SegmentState",
    "VacuumState",
    "VectorState",
    "local_vacuum",
    "make_engine",
    "relabel",
    "support",
]
