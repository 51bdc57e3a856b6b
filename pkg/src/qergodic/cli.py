"""Command-line experiment runner.

    python -m qergodic relations --engine q --q 0.5 --window 0:2 --depth 3
    python -m qergodic normalform --word "ad(1) a(3) ad(3) a(2)"
    python -m qergodic ergodic --engine boolean --probe mixing --word "ad(0) a(0)" --vector e5 --n 12
    python -m qergodic haagerup --lambda 1 --check block-singleton --u g1 --v g2 --w g1^-1
    python -m qergodic moments --engine boolean --gamma 0.4 --check all
    python -m qergodic acceptance --seed 0 --out results/

``--config FILE`` reads ``key = value`` lines (``#`` comments); keys are the
long option names with ``-`` or ``_``.  Flags given on the command line
override the file.

Exit codes: 0 all assertions pass, 1 an assertion failed, 2 configuration error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import acceptance as acc
from .boolean import BooleanEngine, check_boolean_relations, e_mixing_experiment
from .errors import QErgodicError
from .ergodics import (
    ConvergenceSeries,
    cesaro_deviation_series,
    equilibrium_probe,
    unique_mixing_probe,
    weak_clustering_probe,
)
from .freegroup import (
    HaagerupState,
    block_singleton_check,
    haagerup_positivity_probe,
    parse_group_word,
    product_state_check,
    random_reduced_word,
)
from .moments import (
    MomentKey,
    consistency_check,
    enumerate_keys,
    fock_table,
    haagerup_table,
    positivity_check,
    symsh_verification,
)
from .monotone import MonotoneEngine, check_monotone_relations, format_normal_form, normal_form_oracle_check, normalize
from .operators import ModeWindow
from .qfock import build_q_basis, check_q_adjointness, check_q_relation
from .states import SegmentState, VacuumState, VectorState, make_engine
from .words import parse, support

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class ConfigError(Exception):
    pass


def _ints(text: str) -> list[int]:
    return [int(x) for x in str(text).replace(",", " ").split()]


def emit(text: str, out: str | None):
    if out:
        acc.atomic_write(Path(out), text)
    else:
        sys.stdout.write(text)


def verdict_table(rows) -> str:
    return "\n".join([acc.CSV_HEADER] + [r.csv_line() for r in rows]) + "\n"


# -- subcommands ---------------------------------------------------------------------


def cmd_relations(args) -> int:
    window = ModeWindow.parse(args.window)
    res = acc.SuiteResult()
    if args.engine == "q":
        if args.q is None:
            raise ConfigError("q: required for the q engine")
        basis = build_q_basis(window, args.depth)
        rel = max(check_q_relation(basis, args.q, i, j).max_defect for i in window.modes for j in window.modes)
        top = max(
            check_q_relation(basis, args.q, i, j).boundary_defects["q_commutation"]
            for i in window.modes
            for j in window.modes
        )
        adj = max(check_q_adjointness(basis, args.q, i) for i in window.modes)
        p = f"q={args.q} window={window} depth={args.depth}"
        res.add(1, "q_relation", "q", p, rel, 1e-12, rel < 1e-12)
        res.add(2, "q_adjointness", "q", p, adj, 1e-10, adj < 1e-10)
        print(f"# top-level (truncation) defect: {top!r}; not asserted", file=sys.stderr)
    elif args.engine == "monotone":
        rep = check_monotone_relations(MonotoneEngine(window))
        for name, d in rep.defects.items():
            res.add(3, name, "monotone", f"window={window}", d, 0.0, d == 0.0)
    elif args.engine == "boolean":
        rep = check_boolean_relations(BooleanEngine(window))
        for name, d in rep.defects.items():
            res.add(5, name, "boolean", f"window={window}", d, 0.0, d == 0.0)
    else:
        raise ConfigError(f"engine: relations not available for {args.engine!r}")
    if args.export:
        eng = make_engine(args.engine, window, q=args.q, depth=args.depth)
        emit(eng.materialize(parse(args.export)).to_coo_text(), args.export_out)
    sys.stdout.write(verdict_table(res.verdicts))
    return EXIT_OK if res.passed else EXIT_FAIL


def cmd_normalform(args) -> int:
    p = parse(args.word)
    nf = normalize(p, flatten=not args.no_flatten)
    modes = support(p)
    window = ModeWindow.parse(args.window) if args.window else (
        ModeWindow(min(modes) - 1, max(modes) + 1) if modes else ModeWindow(0, 0)
    )
    defect = normal_form_oracle_check(p, window, nf)
    print(format_normal_form(nf))
    print(f"# oracle defect on window {window}: {defect!r}")
    return EXIT_OK if defect < 1e-12 else EXIT_FAIL


def _state(args):
    if args.engine == "haagerup":
        return HaagerupState(args.lam)
    if args.gamma is not None:
        return SegmentState(args.engine, args.gamma)
    return VacuumState(args.engine, args.q)


def _element(args, text):
    if text is None:
        return parse_group_word("e") if args.engine == "haagerup" else parse("1")
    return parse_group_word(text) if args.engine == "haagerup" else parse(text)


def cmd_ergodic(args) -> int:
    scales = _ints(args.scales) if args.scales else None
    seed = args.seed if args.seed is not None else ""
    if args.probe in ("cesaro", "mixing") and args.engine == "haagerup":
        raise ConfigError("engine: cesaro/mixing probes need a Fock engine")
    word_text = args.word or "ad(0) a(0) + a(0) + ad(0)"
    if args.probe == "mixing" and args.engine == "boolean" and args.vector:
        p = parse(word_text)
        modes = support(p)
        hi = max(max(modes, default=0) + args.n, int(str(args.vector).lstrip("e")) if args.vector != "#" else 0)
        eng = BooleanEngine(ModeWindow(min(min(modes, default=0), 0), hi))
        vals = e_mixing_experiment(eng, p, eng.basis_vector(args.vector), args.n)
        series = ConvergenceSeries(list(range(args.n + 1)), vals, "boolean", "", seed,
                                   note=f"unaveraged |phi_xi(alpha^n(A)) - phi_xi(E(A))|, xi={args.vector}")
    elif args.probe in ("cesaro", "mixing"):
        p = parse(word_text)
        modes = _ints(args.test_modes)
        test_modes = range(modes[0], modes[1] + 1) if len(modes) == 2 else modes
        probe = cesaro_deviation_series if args.probe == "cesaro" else unique_mixing_probe
        series = probe(p, args.engine, scales or [4, 8, 16, 32], test_modes, args.test_depth, q=args.q)
    else:
        A = _element(args, args.word)
        B = _element(args, args.word_b)
        if args.vector and args.engine != "haagerup":
            B_modes = support(B) | support(A)
            hi = max(B_modes, default=0) + max(scales or [1])
            v = args.vector
            hi = max(hi, int(str(v).lstrip("e")) if v != "#" else 0)
            eng = make_engine(args.engine, ModeWindow(0, hi), q=args.q, depth=args.depth)
            xi = eng.basis_vector(v) if isinstance(eng, BooleanEngine) else np.eye(eng.dim)[int(str(v).lstrip("e"))]
            state = VectorState(eng, xi)
        else:
            state = _state(args)
        sc = scales or ([1, 2, 4, 8, 16] if args.group == "shift" else [1, 2, 4, 6, 8])
        group_scales = sc if args.group == "shift" else [range(args.perm_offset, args.perm_offset + n) for n in sc]
        if args.probe == "clustering":
            series = weak_clustering_probe(A, B, state, group_scales, args.group)
        else:
            series = equilibrium_probe(A, B, _element(args, args.word_c), state, group_scales, args.group)
        series.seed = seed
    print(f"# {series.note}", file=sys.stderr)
    emit(series.to_csv(), args.out)
    return EXIT_OK


def cmd_haagerup(args) -> int:
    lam = args.lam
    if args.check == "state":
        w = parse_group_word(args.u or "e")
        print(f"phi({w}) = {HaagerupState(lam)(w)!r}")
        return EXIT_OK
    if args.check == "positivity":
        rng = np.random.Generator(np.random.PCG64(args.seed or 0))
        words = [parse_group_word(t) for t in args.words.split(";")] if args.words else []
        while len(words) < args.count:
            cand = random_reduced_word(rng, 4, [0, 1, 2])
            if cand not in words:
                words.append(cand)
        m = haagerup_positivity_probe(lam, words)
        print(f"min eigenvalue over {len(words)} words: {m!r}")
        return EXIT_OK if m > -1e-10 else EXIT_FAIL
    u, v = parse_group_word(args.u or "e"), parse_group_word(args.v or "e")
    if args.check == "product":
        rep = product_state_check(lam, u, v)
        lhs_txt, rhs_txt = f"phi({u * v})", f"phi({u}) phi({v})"
    else:
        w = parse_group_word(args.w or "e")
        rep = block_singleton_check(lam, u, v, w)
        lhs_txt, rhs_txt = f"phi({u * v * w})", f"phi({u * w}) phi({v})"
    print(f"{lhs_txt} = {rep.lhs!r}  (exp(-{lam} * {rep.lhs_length}))")
    print(f"{rhs_txt} = {rep.rhs!r}  (exp(-{lam} * {rep.rhs_length}))")
    print("verdict: " + ("EQUAL" if rep.equal else "NOT-EQUAL"))
    if not rep.in_hypothesis:
        print("# supports overlap: outside the condition's hypothesis")
    # the checks report, they do not assert: inequality is a legitimate outcome
    return EXIT_OK


def cmd_moments(args) -> int:
    indices = _ints(args.indices)
    if args.engine == "haagerup":
        table = haagerup_table(args.lam)
        labels = args.labels.split(",") if args.labels else ["g", "g^-1"]
    else:
        table = fock_table(_state(args))
        labels = args.labels.split(",") if args.labels else ["a", "ad", "x", "a·ad"]
    keys = enumerate_keys(indices, labels, args.max_len)
    ok = True
    if args.check in ("symsh", "all"):
        rep = symsh_verification(table, keys, powers=(1, 2))
        print(f"exchangeable: {rep.exchangeability.passed} ({len(rep.exchangeability.failures)} failures)")
        print(f"stationary: {rep.stationarity.passed} (max deviation {rep.stationarity.max_deviation!r})")
        print(f"symsh: {rep.verdict}")
        ok &= rep.passed
    if args.check in ("positivity", "all"):
        half = [MomentKey.unit()] + [k for k in keys if len(k) <= 2][: args.half_keys]
        m = positivity_check(table, half)
        print(f"positivity: min eigenvalue {m!r} over {len(half)} half-keys")
        ok &= m >= -1e-10
    if args.check in ("consistency", "all"):
        bad = 0
        for k in keys:
            if len(k) < 2:
                continue
            slots = list(zip(k.indices, k.labels))
            slots.insert(1, (k.indices[0] + 1 if k.indices[0] + 1 != k.indices[1] else k.indices[0] + 2, "1"))
            key = MomentKey(tuple(j for j, _ in slots), tuple(l for _, l in slots))
            bad += not consistency_check(table, key, 1).passed
        print(f"consistency: {bad} failures")
        ok &= bad == 0
    if args.out:
        table.fill(keys)
        emit(table.to_csv(), args.out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_acceptance(args) -> int:
    res = acc.run_acceptance(args.seed or 0, args.out)
    sys.stdout.write(res.verdict_csv())
    for k in range(1, 10):
        print(f"# criterion {k}: {'PASS' if res.criterion_passed(k) else 'FAIL'}", file=sys.stderr)
    print(f"# runtime {res.timings['total']:.1f} s", file=sys.stderr)
    return EXIT_OK if res.passed else EXIT_FAIL


# -- parser ----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qergodic", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, engines):
        p.add_argument("--config", help="key=value file; flags override it")
        p.add_argument("--engine", choices=engines, default=engines[0])
        p.add_argument("--q", type=float)
        p.add_argument("--lambda", dest="lam", type=float, default=1.0)
        p.add_argument("--gamma", type=float)
        p.add_argument("--window", default="0:2")
        p.add_argument("--depth", type=int, default=3)
        p.add_argument("--seed", type=int)
        p.add_argument("--out")

    p = sub.add_parser("relations", help="relation defect reports")
    common(p, ["q", "monotone", "boolean"])
    p.add_argument("--export", help="polynomial whose matrix is written as COO text")
    p.add_argument("--export-out")
    p.set_defaults(func=cmd_relations)

    p = sub.add_parser("normalform", help="monotone normal form and oracle defect")
    common(p, ["monotone"])
    p.add_argument("--word", required=True)
    p.add_argument("--no-flatten", action="store_true")
    p.set_defaults(func=cmd_normalform, window=None)

    p = sub.add_parser("ergodic", help="cesaro / mixing / clustering / equilibrium series as CSV")
    common(p, ["q", "boolean", "monotone", "haagerup"])
    p.add_argument("--probe", choices=["cesaro", "mixing", "clustering", "equilibrium"], default="mixing")
    p.add_argument("--word", help="polynomial or group word (A); cesaro/mixing default: ad(0) a(0) + a(0) + ad(0)")
    p.add_argument("--word-b")
    p.add_argument("--word-c")
    p.add_argument("--vector", help="basis vector for a vector state, e.g. e5 or #")
    p.add_argument("--n", type=int, default=12)
    p.add_argument("--scales", help="strictly increasing list, e.g. 4,8,16")
    p.add_argument("--group", choices=["shift", "permutation"], default="shift")
    p.add_argument("--perm-offset", type=int, default=0)
    p.add_argument("--test-modes", default="0 3", help="'lo hi' range or explicit list")
    p.add_argument("--test-depth", type=int, default=2)
    p.set_defaults(func=cmd_ergodic)

    p = sub.add_parser("haagerup", help="Haagerup state evaluations and condition checks")
    common(p, ["haagerup"])
    p.add_argument("--check", choices=["state", "product", "block-singleton", "positivity"], default="state")
    p.add_argument("--u")
    p.add_argument("--v")
    p.add_argument("--w")
    p.add_argument("--words", help="';'-separated words for the positivity probe")
    p.add_argument("--count", type=int, default=20)
    p.set_defaults(func=cmd_haagerup)

    p = sub.add_parser("moments", help="moment tables and their checks")
    common(p, ["q", "boolean", "monotone", "haagerup"])
    p.add_argument("--indices", default="0,1,2")
    p.add_argument("--labels")
    p.add_argument("--max-len", type=int, default=3)
    p.add_argument("--half-keys", type=int, default=10)
    p.add_argument("--check", choices=["symsh", "positivity", "consistency", "all"], default="all")
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("acceptance", help="full acceptance suite")
    p.add_argument("--config")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="directory for verdicts.csv and series CSVs")
    p.set_defaults(func=cmd_acceptance)
    return parser


def read_config(path: str) -> dict[str, str]:
    out = {}
    for n, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key = value")
        k, v = (s.strip() for s in line.split("=", 1))
        out[k.replace("-", "_")] = v
    return out


def apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if not getattr(args, "config", None):
        return args
    sub = parser._subparsers._group_actions[0].choices[args.command]
    dests = {a.dest: a for a in sub._actions}
    alias = {"lambda": "lam"}
    defaults = {}
    for k, v in read_config(args.config).items():
        k = alias.get(k, k)
        if k not in dests or k in ("help", "config"):
            raise ConfigError(f"{k}: unknown configuration key for '{args.command}'")
        action = dests[k]
        if isinstance(action, argparse._StoreTrueAction):
            defaults[k] = v.lower() in ("1", "true", "yes")
            continue
        try:
            defaults[k] = action.type(v) if action.type else v
        except ValueError as exc:
            raise ConfigError(f"{k}: {exc}") from exc
        if action.choices and defaults[k] not in action.choices:
            raise ConfigError(f"{k}: {v!r} not in {list(action.choices)}")
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def validate(args):
    if getattr(args, "q", None) is not None and not -1 < args.q < 1:
        raise ConfigError(f"q: must lie in (-1, 1), got {args.q}")
    if getattr(args, "gamma", None) is not None and not 0 <= args.gamma <= 1:
        raise ConfigError(f"gamma: must lie in [0, 1], got {args.gamma}")
    if getattr(args, "lam", None) is not None and not args.lam > 0:
        raise ConfigError(f"lambda: must be positive (inf allowed), got {args.lam}")
    if getattr(args, "scales", None):
        sc = _ints(args.scales)
        if any(b <= a for a, b in zip(sc, sc[1:])):
            raise ConfigError("scales: must be strictly increasing")
    if getattr(args, "command", "") in ("ergodic", "moments") and args.engine == "q" and args.q is None:
        raise ConfigError("q: required for the q engine")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = apply_config(parser, argv)
        validate(args)
        return args.func(args)
    except (ConfigError, QErgodicError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
