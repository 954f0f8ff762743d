"""``unipade`` command line: Pade approximants, lemma constructors, builds.

Exit codes: 0 ok, 2 bad input, 3 a mathematical precondition failed,
4 truncation exceeded, 5 a search gave up, 6 verification failed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .algebra import FormalPowerSeries, Polynomial, partial_sum, poly_from_json, series_from_json
from .builder import BuildTask, Limits, Schedule, build, dumps, replay, transcript_from_json
from .construct import (
    DEFAULT_MAX_HALVINGS,
    lemma23,
    lemma24,
    lemma25,
    lemma61,
    runge_fit,
    verify_candidate,
)
from .demos import DEMOS
from .errors import (
    CorruptTranscript,
    DegenerateInterpolation,
    DegreeCapExceeded,
    EmptyShape,
    HypothesisViolation,
    NoSafeD,
    NotInDpq,
    OrderTooLarge,
    OrderViolation,
    PoleAtPoint,
    PoleOnSet,
    ScheduleIncompatible,
    SearchExhausted,
    TaskInfeasible,
    TruncationExceeded,
    UnipadeError,
)
from .pade import DEFAULT_REL_TOL, pade_solve, pade_table, table_to_json
from .sets import grid_to_csv, set_from_json, union, with_origin

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_PRECONDITION = 3
EXIT_TRUNCATION = 4
EXIT_SEARCH = 5
EXIT_VERIFY = 6

EXIT_CODES: tuple[tuple[type, int], ...] = (
    (EmptyShape, EXIT_INPUT),
    (TruncationExceeded, EXIT_TRUNCATION),
    (CorruptTranscript, EXIT_VERIFY),
    ((NotInDpq, OrderViolation, HypothesisViolation, ScheduleIncompatible, PoleOnSet, PoleAtPoint, OrderTooLarge), EXIT_PRECONDITION),
    ((SearchExhausted, NoSafeD, DegreeCapExceeded, TaskInfeasible, DegenerateInterpolation), EXIT_SEARCH),
)

LEMMAS = ("lemma23", "lemma24", "lemma25", "lemma61", "runge")


class InputError(Exception):
    """Bad command line or config content (exit 2)."""


class CheckFailed(Exception):
    """``--check`` or replay found a violated conclusion (exit 6)."""


def _load_json(path: str | None, what: str):
    if path is None:
        raise InputError(f"{what} is required")
    p = Path(path)
    if not p.is_file():
        raise InputError(f"{what} {path!r} does not exist")
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{what} {path!r} is not valid JSON: {exc}") from None


def _require(cfg: dict, key: str):
    if key not in cfg:
        raise InputError(f"config is missing field {key!r}")
    return cfg[key]


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _order(cfg: dict, args) -> tuple[int, int]:
    p = args.p if getattr(args, "p", None) is not None else cfg.get("p")
    q = args.q if getattr(args, "q", None) is not None else cfg.get("q")
    if p is None and "order" in cfg:
        p, q = cfg["order"]
    if p is None or q is None:
        raise InputError("orders p and q are required")
    return int(p), int(q)


def _series(cfg: dict, args) -> FormalPowerSeries:
    if args.series is not None:
        data = _load_json(args.series, "series file")
    else:
        data = _require(cfg, "series")
        if isinstance(data, str):
            data = _load_json(data, "series file")
    if isinstance(data, list):
        data = {"coeffs": data}
    return series_from_json(data)


def _config(args) -> dict:
    if args.config is None:
        return {}
    cfg = _load_json(args.config, "config")
    if not isinstance(cfg, dict):
        raise InputError("config must be a JSON object")
    return cfg


def cmd_pade(args) -> int:
    cfg = _config(args)
    f = _series(cfg, args)
    order = _order(cfg, args)
    rel_tol = args.rel_tol if args.rel_tol is not None else cfg.get("rel_tol", DEFAULT_REL_TOL)
    approx = pade_solve(f, order, rel_tol)
    grid = args.grid or cfg.get("grid")
    if grid is not None or args.format == "csv":
        if grid is None:
            raise InputError("csv output needs --grid SETFILE")
        K = set_from_json(_load_json(grid, "set file"))
        whole = partial_sum(f, f.truncation_order)
        pts = K.eval_grid
        with np.errstate(all="ignore"):
            err = np.abs(whole(pts) - approx(pts))
        _emit(grid_to_csv(pts, err), args.out)
        return EXIT_OK
    _emit(dumps(approx.to_json()), args.out)
    return EXIT_OK


def cmd_table(args) -> int:
    cfg = _config(args)
    f = _series(cfg, args)
    p_max = args.p if args.p is not None else cfg.get("p_max", cfg.get("p"))
    q_max = args.q if args.q is not None else cfg.get("q_max", cfg.get("q"))
    if p_max is None or q_max is None:
        raise InputError("table needs p_max and q_max")
    rel_tol = args.rel_tol if args.rel_tol is not None else cfg.get("rel_tol", DEFAULT_REL_TOL)
    table = pade_table(f, int(p_max), int(q_max), rel_tol)
    _emit(dumps({"p_max": int(p_max), "q_max": int(q_max), "table": table_to_json(table)}), args.out)
    return EXIT_OK


def _poly(cfg: dict, key: str) -> Polynomial:
    return poly_from_json(_require(cfg, key))


def _set(cfg: dict, key: str):
    data = _require(cfg, key)
    if isinstance(data, str):
        data = _load_json(data, f"set file for {key}")
    return set_from_json(data)


def _run_lemma(name: str, cfg: dict, args):
    """Returns (result, target, check_set, den_set, prefix, a)."""
    a = float(_require(cfg, "a"))
    halvings = int(cfg.get("max_halvings", DEFAULT_MAX_HALVINGS))
    rel_tol = float(cfg.get("rel_tol", DEFAULT_REL_TOL))
    order = _order(cfg, args)
    K = _set(cfg, "K")
    if name == "lemma23":
        P = _poly(cfg, "P")
        res = lemma23(P, K, a, order, halvings, rel_tol)
        return res, P, K, with_origin(K), None, a
    if name == "lemma24":
        Pt = _poly(cfg, "Pt" if "Pt" in cfg else "P")
        res = lemma24(Pt, K, a, order, halvings, rel_tol)
        return res, Pt, K, with_origin(K), Pt, a
    if name == "lemma25":
        P, A, B = (_poly(cfg, k) for k in ("P", "A", "B"))
        lam = int(_require(cfg, "lambda"))
        res = lemma25(P, A, B, lam, K, a, order, halvings, rel_tol)

        def target(z):
            return P(z) + z**lam * A(z) / B(z)

        return res, target, K, with_origin(K), P, a
    A, B = _poly(cfg, "A"), _poly(cfg, "B")
    L = _set(cfg, "L")
    res = lemma61(A, B, K, L, a, order, halvings, rel_tol)
    KL = union(K, L)
    return res, (lambda z: A(z) / B(z)), KL, with_origin(KL), None, a


def _runge(cfg: dict, args) -> int:
    P, Q = _poly(cfg, "P"), _poly(cfg, "Q")
    K, D = _set(cfg, "K"), _set(cfg, "D")
    lam = int(_require(cfg, "lambda"))
    eps = float(_require(cfg, "eps"))
    fit = runge_fit(P, Q, K, D, lam, eps, int(cfg.get("degree_cap", 80)))
    if args.check:
        head = fit.polynomial.padded(max(P.coeffs.size, 1))[: P.coeffs.size]
        if not (fit.err_on_D < eps and fit.err_on_K < eps and np.array_equal(head, P.coeffs)):
            raise CheckFailed("runge conclusions do not hold on the validation grids")
    if args.format == "csv":
        pts = np.concatenate([K.eval_grid, D.eval_grid])
        with np.errstate(all="ignore"):
            err = np.concatenate(
                [np.abs(fit.polynomial(K.eval_grid) - Q(K.eval_grid)), np.abs(fit.polynomial(D.eval_grid) - P(D.eval_grid))]
            )
        _emit(grid_to_csv(pts, err), args.out)
    else:
        _emit(dumps(fit.to_json()), args.out)
    return EXIT_OK


def cmd_construct(args) -> int:
    cfg = _config(args)
    if not cfg:
        raise InputError("construct needs --config FILE")
    if args.lemma == "runge":
        return _runge(cfg, args)
    res, target, check_set, den_set, prefix, a = _run_lemma(args.lemma, cfg, args)
    if args.check:
        report = verify_candidate(res.rational, res.taylor, res.order, target, check_set, den_set, a, prefix)
        if not report["ok"]:
            raise CheckFailed(f"re-verification failed at {report.get('failed')}")
    if args.format == "csv":
        pts = check_set.eval_grid
        with np.errstate(all="ignore"):
            err = np.abs(res.rational(pts) - target(pts))
        _emit(grid_to_csv(pts, err), args.out)
    else:
        _emit(dumps(res.to_json()), args.out)
    return EXIT_OK


def _build_job(cfg: dict):
    tasks = [BuildTask.from_json(t) for t in _require(cfg, "tasks")]
    schedule = Schedule.from_json(_require(cfg, "schedule"))
    seed = cfg.get("seed_prefix")
    seed_poly = poly_from_json(seed) if seed else None
    return tasks, schedule, seed_poly, Limits.from_json(cfg.get("limits"))


def _print_replay(report, stream) -> None:
    for s in report.steps:
        failed = [k for k, v in s.checks.items() if not v]
        status = "pass" if s.ok else "FAIL " + ",".join(failed)
        print(f"step {s.step} task {s.task}: {status}", file=stream)


def cmd_build(args) -> int:
    cfg = _config(args)
    if not cfg:
        raise InputError("build needs --config FILE")
    tasks, schedule, seed, limits = _build_job(cfg)
    transcript = build(tasks, schedule, seed, limits)
    if args.check:
        report = replay(transcript)
        _print_replay(report, sys.stderr)
        if not report.ok:
            raise CheckFailed("replay of the fresh transcript failed")
    _emit(transcript.dumps(), args.out)
    return EXIT_OK


def cmd_replay(args) -> int:
    path = args.transcript or args.config
    data = _load_json(path, "transcript")
    if not isinstance(data, dict):
        raise CorruptTranscript("transcript must be a JSON object")
    report = replay(transcript_from_json(data))
    _print_replay(report, sys.stdout)
    if args.out is not None:
        _emit(dumps(report.to_json()), args.out)
    return EXIT_OK if report.ok else EXIT_VERIFY


def cmd_demo(args) -> int:
    if args.name not in DEMOS:
        raise InputError(f"unknown demo {args.name!r}; choose from {', '.join(sorted(DEMOS))}")
    _emit(dumps(DEMOS[args.name]()), args.out)
    return EXIT_OK


def _common() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--config", help="JSON job description")
    parent.add_argument("--out", help="output file (default: stdout)")
    parent.add_argument("--format", choices=("json", "csv"), default="json")
    parent.add_argument("--check", action="store_true", help="re-verify conclusions before writing")
    return parent


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="unipade", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    for name, fn, text in (("pade", cmd_pade, "one Pade approximant"), ("table", cmd_table, "Pade table up to (p, q)")):
        sp = sub.add_parser(name, parents=[common], help=text)
        sp.add_argument("--series", help="series JSON file (overrides the config)")
        sp.add_argument("--p", type=int)
        sp.add_argument("--q", type=int)
        sp.add_argument("--rel-tol", type=float)
        if name == "pade":
            sp.add_argument("--grid", help="set JSON file; write |f - [p/q]| on its eval grid as CSV")
        sp.set_defaults(func=fn)

    sp = sub.add_parser("construct", parents=[common], help="run a lemma constructor")
    sp.add_argument("lemma", choices=LEMMAS)
    sp.add_argument("--p", type=int)
    sp.add_argument("--q", type=int)
    sp.set_defaults(func=cmd_construct)

    sp = sub.add_parser("build", parents=[common], help="build a universal series prefix")
    sp.set_defaults(func=cmd_build)

    sp = sub.add_parser("replay", parents=[common], help="re-check a build transcript")
    sp.add_argument("transcript", nargs="?")
    sp.set_defaults(func=cmd_replay)

    sp = sub.add_parser("demo", parents=[common], help="canned experiments")
    sp.add_argument("name")
    sp.set_defaults(func=cmd_demo)
    return parser


def exit_code(exc: BaseException) -> int:
    for kinds, code in EXIT_CODES:
        if isinstance(exc, kinds):
            return code
    if isinstance(exc, CheckFailed):
        return EXIT_VERIFY
    if isinstance(exc, UnipadeError):
        return EXIT_PRECONDITION
    return EXIT_INPUT


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UnipadeError, CheckFailed, InputError, KeyError, ValueError, TypeError) as exc:
        code = exit_code(exc)
        msg = f"missing field {exc}" if isinstance(exc, KeyError) else str(exc)
        print(f"unipade: {type(exc).__name__}: {msg}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
