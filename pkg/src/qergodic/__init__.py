"""Truncated Fock-space engines and ergodic probes for noncommutative processes.

q-deformed, Boolean and monotone Fock spaces on finite mode windows; a
rewriting normal form for the monotone algebra; Haagerup states on free
groups; Cesaro / permutation averages; joint-moment tables.
"""

from .boolean import BooleanEngine, BooleanState, boolean_permutation_average, e_mixing_experiment
from .ergodics import (
    ConvergenceSeries,
    cesaro_deviation_series,
    cesaro_shift_average,
    equilibrium_probe,
    permutation_average,
    stabilizer_fractions,
    unique_mixing_probe,
    weak_clustering_probe,
)
from .errors import (QErgodicError, CapacityExceeded, ModeOutOfWindow, WindowTooSmall, GramDegenerate, ParameterOutOfRange, GammaOutOfRange, LambdaOutOfRange, SupportsOverlap, FactorialBlowup, UnknownLabel, KeyConcatenationInvalid, ParseError)
from .freegroup import GroupWord, HaagerupState, parse_group_word
from .moments import MomentKey, MomentTable
from .monotone import MonotoneEngine, MonotoneState, NormalForm, normalize
from .operators import ModeWindow, SparseOperator
from .qfock import QEngine, q_gram
from .states import SegmentState, VacuumState, VectorState
from .words import Permutation, Polynomial, Shift, a, act, ad, parse, star, support

__version__ = "0.1.0"
