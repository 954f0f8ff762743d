"""Universal-series builder.

A build walks through a list of tasks (compact set, target, tolerance).
Each step extends the current Taylor prefix: the prefix is first corrected
towards the target (a two-set polynomial fit, or a rational correction with
poles in the hole around 0), then a lemma constructor turns the corrected
function into a rational that is its own Pade approximant at the next
admissible order of the schedule. The new prefix is that rational's Taylor
window, so every later step reproduces it exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Union

import numpy as np

from .algebra import (
    FormalPowerSeries,
    Polynomial,
    RationalFunction,
    complex_to_json,
    poly_from_json,
    poly_to_json,
    rational_from_json,
    series_from_json,
    series_to_json,
)
from .construct import (
    FIXED_POINT_RTOL,
    ConstructionResult,
    balancing_scale,
    fixed_point_error,
    lemma23,
    lemma24,
    lemma25,
    runge_fit,
)
from .errors import (
    CorruptTranscript,
    DegenerateInterpolation,
    DegreeCapExceeded,
    HypothesisViolation,
    NoSafeD,
    NotInDpq,
    OrderViolation,
    PoleOnSet,
    ScheduleIncompatible,
    SearchExhausted,
    TaskInfeasible,
)
from .pade import DEFAULT_REL_TOL, PadeOrder, in_D_pq, pade_solve
from .sets import CompactSet, bounds, disk, inf_abs, sample, set_from_json, sup_norm, with_origin

CONDITIONS = ("H1", "H2", "H_tilde")
SERIES_RTOL = 1e-9


@dataclass(frozen=True)
class Schedule:
    """Order sequence ``(p_n, q_n)``.

    ``diagonal``: p = q = n. ``ray``: q = n, p = ceil(l n). ``row``: q fixed,
    p = n. ``explicit``: a finite list.
    """

    kind: str
    l: Fraction | None = None
    qbar: int | None = None
    orders: tuple[PadeOrder, ...] = ()
    declared_condition: str | None = None

    def __post_init__(self):
        if self.kind not in ("diagonal", "ray", "row", "explicit"):
            raise ValueError(f"unknown schedule kind {self.kind!r}")
        if self.kind == "ray" and not (self.l is not None and self.l > 0):
            raise ValueError("ray schedules need l > 0")
        if self.kind == "row" and not (self.qbar is not None and self.qbar >= 0):
            raise ValueError("row schedules need qbar >= 0")
        if self.kind == "explicit" and not self.orders:
            raise ValueError("explicit schedules need at least one order")
        if self.declared_condition is not None and self.declared_condition not in CONDITIONS:
            raise ValueError(f"unknown condition {self.declared_condition!r}")

    @classmethod
    def diagonal(cls, declared: str | None = None) -> "Schedule":
        return cls("diagonal", declared_condition=declared)

    @classmethod
    def ray(cls, l, declared: str | None = None) -> "Schedule":
        return cls("ray", l=Fraction(l).limit_denominator(10**6), declared_condition=declared)

    @classmethod
    def row(cls, qbar: int, declared: str | None = None) -> "Schedule":
        return cls("row", qbar=int(qbar), declared_condition=declared)

    @classmethod
    def explicit(cls, orders, declared: str | None = None) -> "Schedule":
        return cls("explicit", orders=tuple(PadeOrder.of(o) for o in orders), declared_condition=declared)

    def order(self, n: int) -> PadeOrder:
        if self.kind == "diagonal":
            return PadeOrder(n, n)
        if self.kind == "ray":
            return PadeOrder(math.ceil(self.l * n), n)
        if self.kind == "row":
            return PadeOrder(n, self.qbar)
        return self.orders[n]

    def iter_orders(self, max_order: int) -> Iterator[PadeOrder]:
        """Orders in schedule sequence while ``p <= max_order``."""
        if self.kind == "explicit":
            yield from (o for o in self.orders if o.p <= max_order)
            return
        n = 0
        while True:
            o = self.order(n)
            if o.p > max_order:
                return
            yield o
            n += 1

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.l is not None:
            out["l"] = [self.l.numerator, self.l.denominator]
        if self.qbar is not None:
            out["qbar"] = self.qbar
        if self.orders:
            out["orders"] = [[o.p, o.q] for o in self.orders]
        out["declared_condition"] = self.declared_condition
        return out

    @classmethod
    def from_json(cls, data) -> "Schedule":
        if isinstance(data, str):
            data = {"kind": data}
        kind = data["kind"]
        declared = data.get("declared_condition")
        if kind == "diagonal":
            return cls.diagonal(declared)
        if kind == "ray":
            l = data["l"]
            return cls("ray", l=Fraction(*l) if isinstance(l, list) else Fraction(str(l)), declared_condition=declared)
        if kind == "row":
            return cls.row(data["qbar"], declared)
        if kind == "explicit":
            return cls.explicit(data["orders"], declared)
        raise ValueError(f"unknown schedule kind {kind!r}")


@dataclass(frozen=True)
class ConditionReport:
    h1: bool
    h2: bool
    h_tilde: bool
    analytic: bool
    unverifiable_tail: bool = False

    def holds(self, name: str) -> bool:
        return {"H1": self.h1, "H2": self.h2, "H_tilde": self.h_tilde}[name]

    def to_json(self) -> dict:
        return {
            "H1": self.h1,
            "H2": self.h2,
            "H_tilde": self.h_tilde,
            "analytic": self.analytic,
            "unverifiable_tail": self.unverifiable_tail,
        }


def _diverges(seq: list[int]) -> bool:
    return len(seq) >= 2 and all(b >= a for a, b in zip(seq, seq[1:])) and seq[-1] > seq[0]


def check_condition(s: Schedule) -> ConditionReport:
    """Which of (H1), (H2), (H~) the schedule satisfies.

    H1: p_n, q_n -> inf. H2: p_n - q_n -> inf. H~: q_n, p_n - q_n -> inf.
    Explicit lists only get an empirical verdict over the supplied window.
    """
    if s.kind == "diagonal":
        return ConditionReport(True, False, False, True)
    if s.kind == "ray":
        steep = s.l > 1
        return ConditionReport(True, steep, steep, True)
    if s.kind == "row":
        return ConditionReport(False, True, False, True)
    ps = [o.p for o in s.orders]
    qs = [o.q for o in s.orders]
    diffs = [p - q for p, q in zip(ps, qs)]
    h1 = _diverges(ps) and _diverges(qs)
    h2 = _diverges(diffs)
    return ConditionReport(h1, h2, _diverges(qs) and h2, False, True)


@dataclass(frozen=True, eq=False)
class Target:
    """``num / den`` with ``den`` allowed to vanish at 0 (e.g. ``1/z``)."""

    num: Polynomial
    den: Polynomial = field(default_factory=lambda: Polynomial([1.0]))

    def __post_init__(self):
        if self.den.is_zero:
            raise ValueError("target denominator is zero")

    @classmethod
    def of(cls, obj) -> "Target":
        if isinstance(obj, Target):
            return obj
        if isinstance(obj, Polynomial):
            return cls(obj)
        if isinstance(obj, RationalFunction):
            return cls(obj.numerator, obj.denominator)
        raise TypeError(f"cannot use {type(obj).__name__} as a target")

    @property
    def is_polynomial(self) -> bool:
        return self.den.degree == 0

    @property
    def polynomial(self) -> Polynomial:
        return Polynomial.exact(self.num.coeffs / self.den.coeffs[0])

    def __call__(self, z):
        z = np.asarray(z, dtype=np.complex128)
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.num(z) / self.den(z)

    def to_json(self) -> dict:
        return {"num": poly_to_json(self.num), "den": poly_to_json(self.den)}

    @classmethod
    def from_json(cls, data) -> "Target":
        if isinstance(data, list):
            return cls(poly_from_json(data))
        return cls(poly_from_json(data["num"]), poly_from_json(data.get("den", [[1.0, 0.0]])))


@dataclass(frozen=True, eq=False)
class BuildTask:
    set: CompactSet
    target: Target
    tol: float

    def __init__(self, set: CompactSet, target, tol: float):
        object.__setattr__(self, "set", set)
        object.__setattr__(self, "target", Target.of(target))
        object.__setattr__(self, "tol", float(tol))
        if not self.tol > 0:
            raise ValueError("task tolerance must be positive")

    def validate(self) -> None:
        K = self.set
        if self.target.is_polynomial:
            if not K.complement_connected:
                raise HypothesisViolation("polynomial targets need a set with connected complement")
            if K.contains_origin or bounds(K).dist_to_origin == 0:
                raise HypothesisViolation("polynomial targets need a set avoiding 0")
            return
        try:
            m = inf_abs(self.target.den, K, "validation")
        except PoleOnSet:
            m = 0.0
        if not m > 0:
            raise HypothesisViolation("target has a pole on the set")
        if bounds(K).dist_to_origin == 0:
            raise HypothesisViolation("rational targets need a set avoiding 0")

    def to_json(self) -> dict:
        return {"set": self.set.to_json(), "target": self.target.to_json(), "tol": self.tol}

    @classmethod
    def from_json(cls, data: dict) -> "BuildTask":
        return cls(set_from_json(data["set"]), Target.from_json(data["target"]), data["tol"])


@dataclass(frozen=True)
class Limits:
    rounds: int = 1
    max_order: int = 400
    max_halvings: int = 200
    degree_cap: int = 80
    ring_max: int = 400
    disk_points: int = 40
    rel_tol: float = DEFAULT_REL_TOL

    def to_json(self) -> dict:
        return {
            "rounds": self.rounds,
            "max_order": self.max_order,
            "max_halvings": self.max_halvings,
            "degree_cap": self.degree_cap,
            "ring_max": self.ring_max,
            "disk_points": self.disk_points,
            "rel_tol": self.rel_tol,
        }

    @classmethod
    def from_json(cls, data: dict | None) -> "Limits":
        return cls(**(data or {}))


@dataclass(frozen=True, eq=False)
class BuildStep:
    task: int
    order: PadeOrder
    constructor: str
    result: ConstructionResult
    prefix_length: int
    sup_error: float
    correction: dict

    def to_json(self) -> dict:
        return {
            "task": self.task,
            "p": self.order.p,
            "q": self.order.q,
            "constructor": self.constructor,
            "prefix_length": self.prefix_length,
            "sup_error": self.sup_error,
            "correction": self.correction,
            "result": self.result.to_json(),
        }


@dataclass(frozen=True, eq=False)
class BuildTranscript:
    schedule: Schedule
    tasks: tuple[BuildTask, ...]
    seed_prefix: Polynomial
    limits: Limits
    steps: tuple[BuildStep, ...]
    final_prefix: FormalPowerSeries

    def to_json(self) -> dict:
        return {
            "schedule": self.schedule.to_json(),
            "condition": check_condition(self.schedule).to_json(),
            "limits": self.limits.to_json(),
            "seed_prefix": poly_to_json(self.seed_prefix),
            "tasks": [t.to_json() for t in self.tasks],
            "steps": [s.to_json() for s in self.steps],
            "final_prefix": series_to_json(self.final_prefix),
        }

    def dumps(self) -> str:
        return dumps(self.to_json())


def dumps(data) -> str:
    return json.dumps(data, indent=2, allow_nan=False) + "\n"


def _corrected_polynomial(P_cur: Polynomial, Q: Polynomial, K: CompactSet, lam: int, eps: float, limits: Limits):
    """Two-set fit ``P~ = P_cur + z**lam Pi``: near Q on K, near P_cur on a
    disk around 0 of radius min(dist(K, 0)/2, 1)."""
    r = min(bounds(K).dist_to_origin / 2, 1.0)
    D = sample(disk(0, r), h=2 * r / limits.disk_points, flags={"contains_origin": True})
    fit = runge_fit(P_cur, Q, K, D, lam, eps, limits.degree_cap)
    info = {"kind": "runge", "lambda": lam, "disk_radius": r, "err_on_D": fit.err_on_D, "err_on_K": fit.err_on_K, "pi_degree": _deg(fit.pi)}
    return fit, info


def _deg(p: Polynomial) -> int:
    return -1 if p.is_zero else int(p.degree)


@dataclass(frozen=True, eq=False)
class RationalCorrection:
    A: Polynomial
    B: Polynomial
    lam: int
    ring_size: int
    ring_radius: float
    err_on_K: float

    def to_json(self) -> dict:
        return {
            "kind": "ring",
            "lambda": self.lam,
            "ring_size": self.ring_size,
            "ring_radius": self.ring_radius,
            "err_on_K": self.err_on_K,
            "deg_A": _deg(self.A),
            "deg_B": _deg(self.B),
        }


def rational_correction(P_cur: Polynomial, T: Target, K: CompactSet, lam: int, eps: float, ring_max: int = 400) -> RationalCorrection:
    """``A/B`` with ``|P_cur + z**lam A/B - T| < eps`` on K.

    Write ``T = N / (z**mu B_T)`` with ``B_T(0) = 1``. The function to
    match, ``(T - P_cur)/z**lam = W / (z**m B_T)`` with
    ``W = N - z**mu B_T P_cur`` and ``m = lam + mu``, splits into a
    principal part ``L(1/z)`` and a polynomial ``H``. A ring of N poles on
    ``|z| = rho`` (rho = dist(K, 0)/2) absorbs the principal part:
    ``B = (1 - (z/rho)**N) B_T`` and ``A = H (1 - (z/rho)**N) - (z/rho)**N L``
    leave the error ``-L(1/z) / B``, which decays like ``(rho/|z|)**N``.
    N grows from m until the error bound holds on the validation grid.
    """
    den = T.den.coeffs
    mu = int(np.argmax(den != 0))
    bt = den[mu:]
    scale0 = bt[0]
    B_T = Polynomial.exact(bt / scale0)
    N_T = Polynomial.exact(T.num.coeffs / scale0)
    W = N_T - (B_T * P_cur).shift(mu) if not P_cur.is_zero else N_T
    m = lam + mu
    w = W.padded(max(W.coeffs.size, m))
    low, high = w[:m], w[m:]
    rho = bounds(K).dist_to_origin / 2
    if not rho > 0:
        raise HypothesisViolation("set must avoid 0")
    err = math.inf
    for n_ring in range(max(m, 1), ring_max + 1):
        inv = rho**-n_ring
        ring = np.zeros(n_ring + 1, dtype=np.complex128)
        ring[0], ring[n_ring] = 1.0, -inv
        A = np.zeros(max(high.size + n_ring, n_ring), dtype=np.complex128)
        if high.size:
            A[: high.size] += high
            A[n_ring : n_ring + high.size] -= inv * high
        A[n_ring - m : n_ring] -= inv * low
        A_poly, B_poly = Polynomial.exact(A), Polynomial.exact(np.convolve(ring, B_T.coeffs))

        def approx(z, A_poly=A_poly, B_poly=B_poly):
            return P_cur(z) + z**lam * A_poly(z) / B_poly(z)

        try:
            err = sup_norm(lambda z: approx(z) - T(z), K, "eval")
            if err < eps:
                err = sup_norm(lambda z: approx(z) - T(z), K, "validation")
        except PoleOnSet:
            continue
        if err < eps:
            return RationalCorrection(A_poly, B_poly, lam, n_ring, rho, err)
    raise DegreeCapExceeded(f"no ring of at most {ring_max} poles reaches {eps:.2e} (last error {err:.2e})")


def build(tasks, schedule: Schedule, seed_prefix: Polynomial | None = None, limits: Limits | None = None) -> BuildTranscript:
    """Run the tasks in order (``limits.rounds`` times) and return the transcript."""
    tasks = tuple(t if isinstance(t, BuildTask) else BuildTask(*t) for t in tasks)
    limits = limits or Limits()
    seed = seed_prefix if seed_prefix is not None else Polynomial.zero()
    report = check_condition(schedule)
    if schedule.declared_condition is not None and not report.holds(schedule.declared_condition):
        raise ScheduleIncompatible(f"schedule {schedule.kind} does not satisfy {schedule.declared_condition}")
    for i, task in enumerate(tasks):
        if task.target.is_polynomial:
            if not (report.h1 or report.h2):
                raise ScheduleIncompatible(f"task {i}: polynomial targets need H1 or H2")
        elif not report.h_tilde:
            raise ScheduleIncompatible(f"task {i}: rational targets need H_tilde, schedule {schedule.kind} lacks it")
    for task in tasks:
        task.validate()

    prefix = np.array([], dtype=np.complex128) if seed.is_zero else seed.coeffs.copy()
    used: set[PadeOrder] = set()
    steps: list[BuildStep] = []
    for _ in range(limits.rounds):
        for i, task in enumerate(tasks):
            step = _step(i, task, prefix, schedule, report, used, limits)
            new = step.result.taylor.coeffs
            if not np.array_equal(new[: prefix.size], prefix):
                raise RuntimeError(f"task {i}: prefix law broken")
            prefix = new.copy()
            used.add(step.order)
            steps.append(step)
    final = FormalPowerSeries(prefix if prefix.size else np.zeros(1, dtype=np.complex128))
    return BuildTranscript(schedule, tasks, seed, limits, tuple(steps), final)


def _step(i: int, task: BuildTask, prefix: np.ndarray, schedule: Schedule, report: ConditionReport, used: set, limits: Limits) -> BuildStep:
    L = prefix.size
    P_cur = Polynomial.exact(prefix) if L else Polynomial.zero()
    K, T, tol = task.set, task.target, task.tol
    failures: list[str] = []
    if T.is_polynomial:
        try:
            fit, info = _corrected_polynomial(P_cur, T.polynomial, K, L, tol / 2, limits)
        except DegreeCapExceeded as exc:
            raise TaskInfeasible(f"task {i}: {exc}", i) from None
        Pt = fit.polynomial
        a = tol - fit.err_on_K
        g = max(_deg(Pt), L - 1)
        for order in schedule.iter_orders(limits.max_order):
            p, q = order
            if order in used:
                continue
            if report.h1 and q >= 1:
                if not (p > g and q > g):
                    continue
                kind = "lemma24"
            elif report.h2 and q >= 1:
                if not p > g + q:
                    continue
                kind = "lemma23"
            elif report.h2 and q == 0:
                if not p > g:
                    continue
                kind = "partial_sum"
            else:
                continue
            try:
                if kind == "lemma24":
                    res = lemma24(Pt, K, a, order, limits.max_halvings, limits.rel_tol)
                elif kind == "lemma23":
                    res = lemma23(Pt, K, a, order, limits.max_halvings, limits.rel_tol)
                else:
                    res = partial_sum_result(Pt, K, a, p, limits.max_halvings, limits.rel_tol)
            except (SearchExhausted, NoSafeD, DegenerateInterpolation, OrderViolation) as exc:
                failures.append(f"{tuple(order)}: {exc}")
                continue
            return _finish(i, task, order, kind, res, info)
    else:
        lam = max(L, 1)
        try:
            corr = rational_correction(P_cur, T, K, lam, tol / 2, limits.ring_max)
        except DegreeCapExceeded as exc:
            raise TaskInfeasible(f"task {i}: {exc}", i) from None
        a = tol - corr.err_on_K
        for order in schedule.iter_orders(limits.max_order):
            p, q = order
            if order in used or q < 1:
                continue
            if not (q >= corr.B.degree and p > max(lam + corr.A.degree, q + P_cur.degree)):
                continue
            try:
                res = lemma25(P_cur, corr.A, corr.B, lam, K, a, order, limits.max_halvings, limits.rel_tol)
            except (SearchExhausted, NoSafeD, DegenerateInterpolation, OrderViolation) as exc:
                failures.append(f"{tuple(order)}: {exc}")
                continue
            return _finish(i, task, order, "lemma25", res, corr.to_json())
    tail = f"; last failure {failures[-1]}" if failures else ""
    raise TaskInfeasible(f"task {i}: no admissible order up to p = {limits.max_order} succeeded ({len(failures)} tried{tail})", i)


def _finish(i: int, task: BuildTask, order: PadeOrder, kind: str, res: ConstructionResult, info: dict) -> BuildStep:
    err = sup_norm(lambda z: res.rational(z) - task.target(z), task.set, "validation")
    if not err < task.tol:
        raise TaskInfeasible(f"task {i}: combined error {err:.3e} exceeds {task.tol:.3e}", i)
    return BuildStep(i, order, kind, res, res.taylor.coeffs.size, err, info)


def partial_sum_result(Pt: Polynomial, K: CompactSet, a: float, p: int, max_halvings: int = 200, rel_tol: float = DEFAULT_REL_TOL) -> ConstructionResult:
    """Row-0 step: ``R = P~ + d z**p`` is its own ``[p/0]`` (a partial sum).

    This is the q = 0 reading of ``P + d z**p / (1 - (cz)**q)`` with the
    geometric factor dropped; ``c`` is unused and recorded as 0.
    """
    from .construct import ConstructionParams, DetInDPoly, shrink_search

    if not p > Pt.degree:
        raise OrderViolation(f"need p > deg P~, got p={p}")
    M = max(bounds(K).M, 1e-300)
    box: dict = {}

    def check(_c, d):
        coeffs = Pt.padded(p + 1)
        coeffs[p] += d
        R = Polynomial.exact(coeffs)
        err = sup_norm(lambda z: R(z) - Pt(z), K, "validation")
        box.update(R=R, err=err, d=d)
        return err < a

    hit = shrink_search(check, 1.0 / (2 * M), 1.0, max_halvings)
    R = box["R"]
    f = FormalPowerSeries(R.padded(p + 1))
    member = in_D_pq(f, (p, 0), rel_tol)
    return ConstructionResult(
        constructor="partial_sum",
        rational=RationalFunction(R, Polynomial([1.0])),
        params=_params(0.0, box["d"], p, 0),
        achieved_sup_error=box["err"],
        prefix_preserved_to=_deg(Pt),
        hankel_det=1.0 + 0j,
        search_iterations=hit.halvings,
        taylor=f,
        det_poly=DetInDPoly(np.array([1.0 + 0j])),
        forbidden_d=(),
        membership=member,
        raw_membership=member,
        fixed_point_error=0.0,
        condition_estimate=1.0,
        scale=1.0,
        denominator_min=1.0,
    )


def _params(c, d, p, q):
    from .construct import ConstructionParams

    return ConstructionParams(c, d, p, q)


@dataclass(frozen=True)
class StepReport:
    step: int
    task: int
    checks: dict
    detail: dict

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict:
        return {"step": self.step, "task": self.task, "ok": self.ok, "checks": self.checks, "detail": self.detail}


@dataclass(frozen=True)
class ReplayReport:
    steps: tuple[StepReport, ...]

    @property
    def ok(self) -> bool:
        return all(s.ok for s in self.steps)

    def to_json(self) -> dict:
        return {"ok": self.ok, "steps": [s.to_json() for s in self.steps]}


def _series_residual(num: np.ndarray, den: np.ndarray, b: np.ndarray) -> tuple[float, int]:
    """Worst relative residual of ``den * b = num`` (mod z**len(b)) and the
    first index exceeding ``SERIES_RTOL`` (or -1)."""
    n = b.size
    conv = np.convolve(den, b)[:n]
    absconv = np.convolve(np.abs(den), np.abs(b))[:n]
    nk = np.zeros(n, dtype=np.complex128)
    w = min(num.size, n)
    nk[:w] = num[:w]
    resid = np.abs(nk - conv)
    size = np.abs(nk) + absconv
    with np.errstate(invalid="ignore", divide="ignore"):
        rel = np.where(size > 0, resid / np.where(size > 0, size, 1.0), 0.0)
    if num.size > n and np.any(num[n:] != 0):
        return math.inf, n
    bad = np.nonzero(rel > SERIES_RTOL)[0]
    return float(rel.max(initial=0.0)), int(bad[0]) if bad.size else -1


def replay(transcript) -> ReplayReport:
    """Re-check every recorded step from the stored rationals and sets.

    ``prefix`` holds when the stored window extends the previous one
    verbatim and the stored rational reproduces that window.
    """
    if isinstance(transcript, BuildTranscript):
        data = transcript.to_json()
    elif isinstance(transcript, str):
        try:
            data = json.loads(transcript)
        except json.JSONDecodeError as exc:
            raise CorruptTranscript(f"not JSON: {exc}") from None
    else:
        data = transcript
    try:
        tasks = [BuildTask.from_json(t) for t in data.get("tasks", [])]
        steps = data.get("steps", [])
        seed = poly_from_json(data.get("seed_prefix", []))
        parsed = []
        for st in steps:
            res = st["result"]
            parsed.append(
                (
                    int(st["task"]),
                    PadeOrder(int(st["p"]), int(st["q"])),
                    rational_from_json(res["rational"]),
                    np.array([complex(*c) for c in res["taylor"]], dtype=np.complex128),
                    int(st["prefix_length"]),
                )
            )
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise CorruptTranscript(f"malformed transcript: {exc!r}") from None
    prev = np.array([], dtype=np.complex128) if seed.is_zero else seed.coeffs
    reports = []
    for k, (ti, order, R, taylor, plen) in enumerate(parsed):
        if not 0 <= ti < len(tasks):
            raise CorruptTranscript(f"step {k} refers to missing task {ti}")
        task = tasks[ti]
        checks: dict = {}
        detail: dict = {}
        p, q = order
        checks["window"] = taylor.size == p + q + 1 == plen and plen > prev.size
        same = taylor.size >= prev.size and np.array_equal(taylor[: prev.size], prev)
        worst, bad = _series_residual(R.numerator.coeffs, R.denominator.coeffs, taylor)
        detail["series_residual"] = worst
        checks["prefix"] = bool(same and bad == -1)
        try:
            f = FormalPowerSeries(taylor)
            scale = balancing_scale(f, order)
            member = in_D_pq(f, order, DEFAULT_REL_TOL, scale)
            approx = pade_solve(f, order, DEFAULT_REL_TOL, scale)
            fp = fixed_point_error(R, approx.value, scale, p)
            checks["fixed_point"] = bool(member) and not approx.ill_conditioned and fp <= FIXED_POINT_RTOL
            detail["fixed_point_error"] = fp
        except (NotInDpq, ValueError) as exc:
            checks["fixed_point"] = False
            detail["fixed_point_error"] = str(exc)
        try:
            dmin = inf_abs(R.denominator, with_origin(task.set), "validation")
        except PoleOnSet:
            dmin = 0.0
        checks["denominator"] = dmin > 0
        try:
            err = sup_norm(lambda z: R(z) - task.target(z), task.set, "validation")
        except PoleOnSet:
            err = math.inf
        checks["sup_error"] = err < task.tol
        detail["sup_error"] = err if math.isfinite(err) else None
        reports.append(StepReport(k, ti, checks, detail))
        prev = taylor
    return ReplayReport(tuple(reports))


def transcript_from_json(data: dict) -> dict:
    """Light parse used by the CLI: validates the top-level shape."""
    for key in ("schedule", "tasks", "steps", "final_prefix"):
        if key not in data:
            raise CorruptTranscript(f"missing field {key!r}")
    return data


__all__ = [
    "BuildStep",
    "BuildTask",
    "BuildTranscript",
    "ConditionReport",
    "Limits",
    "RationalCorrection",
    "ReplayReport",
    "Schedule",
    "StepReport",
    "Target",
    "build",
    "check_condition",
    "dumps",
    "partial_sum_result",
    "rational_correction",
    "replay",
    "series_from_json",
]
