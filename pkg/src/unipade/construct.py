"""Rational functions that are their own Pade approximants.

Each constructor perturbs a polynomial (or a polynomial plus a rational
tail) by two small parameters ``c`` and ``d``: ``c`` controls a
denominator term ``(cz)**q`` or ``c z**q``, ``d`` a numerator term
``d z**p``. Shrinking ``(c, d)`` drives the perturbation to zero uniformly
on the compact set, and ``d`` is chosen off the finitely many roots of the
Hankel determinant (a degree-q polynomial in ``d``), which makes the result
its own ``[p/q]`` approximant.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .algebra import (
    FormalPowerSeries,
    Polynomial,
    RationalFunction,
    as_complex,
    coeff_rel_error,
    complex_to_json,
    finite_or_none,
    rational_to_json,
    scale_powers,
    series_of_quotient,
)
from .errors import (
    DegenerateInterpolation,
    DegreeCapExceeded,
    HypothesisViolation,
    NoSafeD,
    NotInDpq,
    OrderViolation,
    PoleOnSet,
    SearchExhausted,
)
from .pade import DEFAULT_REL_TOL, Membership, PadeOrder, balanced_window, hankel_det, hankel_matrix, in_D_pq, pade_solve
from .roots import poly_roots
from .sets import CompactSet, are_disjoint, bounds, inf_abs, sup_norm, with_origin

FIXED_POINT_RTOL = 1e-8
DEFAULT_MAX_HALVINGS = 200
LEAD_RTOL = 1e-12
ROOT_RADIUS = 1e6


class SearchPoint(NamedTuple):
    c: float
    d: float
    halvings: int


def shrink_search(check: Callable[[float, float], bool], c0: float, d0: float, max_halvings: int = DEFAULT_MAX_HALVINGS) -> SearchPoint:
    """First ``(c0 / 2**k, d0 / 2**k)``, k = 0, 1, ..., accepted by ``check``."""
    if not (c0 > 0 and d0 > 0):
        raise ValueError("initial scales must be positive")
    for k in range(max_halvings + 1):
        c, d = c0 * 2.0**-k, d0 * 2.0**-k
        if check(c, d):
            return SearchPoint(c, d, k)
    raise SearchExhausted(f"no parameters accepted after {max_halvings} halvings")


@dataclass(frozen=True)
class DetInDPoly:
    """The Hankel determinant as a polynomial in ``d``.

    Stored as ``10**log10_factor * sum_j coeffs[j] * (d / d_scale)**j`` so
    that tiny search scales neither overflow nor underflow; ``coeffs_in_d``
    expands it when the numbers allow.
    """

    coeffs: np.ndarray
    d_scale: float = 1.0
    log10_factor: float = 0.0
    nodes: str = "real"
    resolved: bool = True

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    @property
    def relative_lead(self) -> float:
        top = np.abs(self.coeffs).max()
        return float(abs(self.coeffs[-1]) / top) if top > 0 else 0.0

    @property
    def coeffs_in_d(self) -> np.ndarray:
        with np.errstate(over="ignore", under="ignore"):
            return 10.0**self.log10_factor * self.coeffs / self.d_scale ** np.arange(self.coeffs.size)

    def __call__(self, d):
        t = np.asarray(d) / self.d_scale
        return 10.0**self.log10_factor * np.polynomial.polynomial.polyval(t, self.coeffs)

    def roots(self) -> np.ndarray:
        """Roots in ``d``; none when the constant term dominates the
        sampled disk (``resolved`` is False)."""
        if self.degree < 1 or not self.resolved:
            return np.zeros(0, dtype=np.complex128)
        return poly_roots(self.coeffs) * self.d_scale


INTERP_REAL_MAX_Q = 6


CONST_DOMINANCE = 1e-6


def det_in_d_poly(
    series_builder: Callable[[complex], FormalPowerSeries],
    order,
    d0: float = 1.0,
    scale: float = 1.0,
    strict: bool = True,
) -> DetInDPoly:
    """Interpolate ``d -> det H_q`` from q+1 samples.

    The entries of the Hankel matrix must be affine in ``d``; the
    determinant then has degree at most q and the samples pin it down.
    Nodes are ``d0 * (1..q+1)`` up to q = 6 and ``d0`` times the (q+1)-th
    roots of unity beyond, where the real Vandermonde system is hopelessly
    ill-conditioned. ``scale`` balances the series (the determinant is
    unchanged by the pivoted rescaling, only its rounding improves).

    With ``strict=False`` a leading coefficient lost in rounding is
    accepted when the constant term dominates all others by 1e6 on the
    sampled disk: the determinant then has no root of modulus <= d0 and the
    result is flagged ``resolved=False``.
    """
    order = PadeOrder.of(order)
    p, q = order
    if q == 0:
        return DetInDPoly(np.array([1.0 + 0j]), d0)
    if q <= INTERP_REAL_MAX_Q:
        t = np.arange(1, q + 2, dtype=np.complex128)
        kind = "real"
    else:
        t = np.exp(2j * np.pi * np.arange(q + 1) / (q + 1))
        kind = "circle"
    mats = [hankel_matrix(balanced_window(series_builder(d0 * tk), order, scale), order).entries for tk in t]
    top = float(np.abs(mats[0]).max()) or 1.0
    signs = np.empty(q + 1, dtype=np.complex128)
    logs = np.empty(q + 1)
    for i, h in enumerate(mats):
        signs[i], logs[i] = np.linalg.slogdet(h / top)
    finite = np.isfinite(logs)
    ref = logs[finite].max() if finite.any() else 0.0
    with np.errstate(under="ignore"):
        vals = np.where(finite, signs * np.exp(np.where(finite, logs - ref, 0.0)), 0.0)
    if kind == "real":
        coeffs = np.linalg.solve(np.vander(t, q + 1, increasing=True), vals)
    else:
        coeffs = np.fft.fft(vals) / (q + 1)
    factor = (ref + q * math.log(top)) / math.log(10)
    biggest = np.abs(coeffs).max()
    if biggest == 0:
        raise DegenerateInterpolation("determinant vanishes at every sample")
    if abs(coeffs[-1]) < LEAD_RTOL * biggest:
        if not strict and np.abs(coeffs[1:]).sum() < CONST_DOMINANCE * abs(coeffs[0]):
            return DetInDPoly(coeffs, d0, factor, kind, resolved=False)
        raise DegenerateInterpolation(
            f"determinant is not of degree {q} in d (relative leading coefficient {abs(coeffs[-1]) / biggest:.2e})"
        )
    return DetInDPoly(coeffs, d0, factor, kind)




def avoid_roots(poly: DetInDPoly, d_preferred: float, rel_gap: float = 1e-6) -> complex:
    """A ``d`` with ``|d| <= d_preferred`` away from every relevant root.

    Candidates ``d_preferred * 2**-k * exp(i pi j / 7)`` are scanned in
    order (k outer, j inner); a candidate is safe when its distance to
    every root is above ``rel_gap * max(|d|, |root|)``. Roots larger than
    ``1e6 * d_scale`` are outside the search ball and ignored.
    """
    roots = poly.roots()
    roots = roots[np.abs(roots) <= ROOT_RADIUS * max(poly.d_scale, d_preferred)]
    for k in range(41):
        mag = d_preferred * 2.0**-k
        for j in range(14):
            cand = mag * cmath.exp(1j * math.pi * j / 7)
            if j == 0:
                cand = complex(mag, 0.0)
            if roots.size == 0:
                return cand
            gap = np.abs(roots - cand)
            if np.all(gap > rel_gap * np.maximum(abs(cand), np.abs(roots))):
                return cand
    raise NoSafeD("every scanned d lies next to a root of the Hankel determinant")


@dataclass(frozen=True)
class ConstructionParams:
    c: complex
    d: complex
    p: int
    q: int
    lam: int | None = None

    def to_json(self) -> dict:
        out = {"c": complex_to_json(self.c), "d": complex_to_json(self.d), "p": self.p, "q": self.q}
        if self.lam is not None:
            out["lambda"] = self.lam
        return out


@dataclass(frozen=True, eq=False)
class ConstructionResult:
    constructor: str
    rational: RationalFunction
    params: ConstructionParams
    achieved_sup_error: float
    prefix_preserved_to: int
    hankel_det: complex
    search_iterations: int
    taylor: FormalPowerSeries = field(repr=False)
    det_poly: DetInDPoly = field(repr=False)
    forbidden_d: tuple[complex, ...] = field(repr=False)
    membership: Membership = field(repr=False)
    raw_membership: Membership = field(repr=False)
    fixed_point_error: float = 0.0
    condition_estimate: float = 1.0
    scale: float = 1.0
    denominator_min: float = 0.0

    @property
    def order(self) -> PadeOrder:
        return PadeOrder(self.params.p, self.params.q)

    def to_json(self) -> dict:
        return {
            "constructor": self.constructor,
            "params": self.params.to_json(),
            "rational": rational_to_json(self.rational),
            "achieved_sup_error": finite_or_none(self.achieved_sup_error),
            "prefix_preserved_to": self.prefix_preserved_to,
            "hankel_det": complex_to_json(self.hankel_det),
            "search_iterations": self.search_iterations,
            "det_in_d": {
                "coeffs": [complex_to_json(z) for z in self.det_poly.coeffs],
                "d_scale": self.det_poly.d_scale,
                "log10_factor": finite_or_none(self.det_poly.log10_factor),
                "nodes": self.det_poly.nodes,
                "relative_lead": self.det_poly.relative_lead,
                "resolved": self.det_poly.resolved,
            },
            "forbidden_d": [complex_to_json(z) for z in self.forbidden_d],
            "membership": self.membership.to_json(),
            "raw_membership": self.raw_membership.to_json(),
            "fixed_point_error": finite_or_none(self.fixed_point_error),
            "condition_estimate": finite_or_none(self.condition_estimate),
            "scale": self.scale,
            "denominator_min": finite_or_none(self.denominator_min),
            "taylor": [complex_to_json(z) for z in self.taylor.coeffs],
        }


SCALE_EXP_RANGE = 1100
SCALE_EXP_SLACK = 64


def balancing_scale(f: FormalPowerSeries, order) -> float:
    """Power of two ``s`` making ``a_p s**p`` dominate ``a_k s**k`` over
    the coefficients a_{p-q+1..p+q} the test and solve read.

    Minimizes ``max_k |a_k| s**(k-p) / |a_p|`` and takes the middle of the
    (clipped) set of minimizers. Falls back to a least-squares slope of
    ``log|a_k|`` when a_p is zero.
    """
    order = PadeOrder.of(order)
    p, q = order
    if q == 0:
        return 1.0
    lo, hi = max(p - q + 1, 0), p + q
    k = np.arange(lo, hi + 1)
    mags = np.abs(f.coeffs[lo : hi + 1])
    mask = mags > 0
    if mask.sum() < 2:
        return 1.0
    if f.coeffs[p] == 0:
        slope = np.polyfit(k[mask], np.log2(mags[mask]), 1)[0]
        return float(2.0 ** int(np.clip(round(-slope), -SCALE_EXP_RANGE, SCALE_EXP_RANGE)))
    logs = np.log2(mags[mask])
    rel = (k[mask] - p).astype(float)
    e = np.arange(-SCALE_EXP_RANGE, SCALE_EXP_RANGE + 1, dtype=float)
    obj = (logs[None, :] + e[:, None] * rel[None, :]).max(axis=1)
    best = e[obj <= obj.min() + 0.5]
    e_lo, e_hi = best.min(), best.max()
    if e_lo == -SCALE_EXP_RANGE:
        e_lo = e_hi - SCALE_EXP_SLACK
    if e_hi == SCALE_EXP_RANGE:
        e_hi = e_lo + SCALE_EXP_SLACK
    return float(2.0 ** int(round((e_lo + e_hi) / 2)))


def fixed_point_error(r: RationalFunction, approx: RationalFunction, scale: float = 1.0, pivot: int = 0) -> float:
    """Relative coefficient mismatch of two rationals, the worse of the
    raw coefficients and those of ``scale**-pivot r(scale z)``."""
    raw = max(
        coeff_rel_error(approx.numerator.coeffs, r.numerator.coeffs),
        coeff_rel_error(approx.denominator.coeffs, r.denominator.coeffs),
    )
    if scale == 1.0:
        return raw
    return max(
        raw,
        coeff_rel_error(scale_powers(approx.numerator.coeffs, scale, -pivot), scale_powers(r.numerator.coeffs, scale, -pivot)),
        coeff_rel_error(scale_powers(approx.denominator.coeffs, scale), scale_powers(r.denominator.coeffs, scale)),
    )


@dataclass
class _Candidate:
    rational: RationalFunction
    taylor: FormalPowerSeries


@dataclass
class _Spec:
    """What one constructor needs from the shared search loop."""

    name: str
    order: PadeOrder
    build: Callable[[complex, complex], _Candidate]
    target: Callable[[np.ndarray], np.ndarray]
    check_set: CompactSet
    den_set: CompactSet
    a: float
    c0: float
    d0: float
    prefix: Polynomial | None
    lam: int | None = None
    rel_tol: float = DEFAULT_REL_TOL
    max_halvings: int = DEFAULT_MAX_HALVINGS


def verify_candidate(
    rational: RationalFunction,
    taylor: FormalPowerSeries,
    order: PadeOrder,
    target: Callable,
    check_set: CompactSet,
    den_set: CompactSet,
    a: float,
    prefix: Polynomial | None,
    rel_tol: float = DEFAULT_REL_TOL,
    grid: str = "validation",
) -> dict:
    """Run the four conclusion checks; returns a report dict with ``ok``."""
    report: dict = {"ok": False}
    try:
        den_min = inf_abs(rational.denominator, den_set, grid)
    except PoleOnSet:
        den_min = 0.0
    report["denominator_min"] = den_min
    if not den_min > 0:
        report["failed"] = "denominator"
        return report
    try:
        err = sup_norm(lambda z: rational(z) - target(z), check_set, grid)
    except PoleOnSet:
        report["failed"] = "pole"
        return report
    report["sup_error"] = err
    if not err < a:
        report["failed"] = "sup_error"
        return report
    if prefix is not None and not prefix.is_zero:
        n = prefix.coeffs.size
        if taylor.truncation_order + 1 < n or not np.array_equal(taylor.coeffs[:n], prefix.coeffs):
            report["failed"] = "prefix"
            return report
    scale = balancing_scale(taylor, order)
    report["scale"] = scale
    member = in_D_pq(taylor, order, rel_tol, scale)
    report["membership"] = member
    report["raw_membership"] = in_D_pq(taylor, order, rel_tol)
    if not member:
        report["failed"] = "membership"
        return report
    try:
        approx = pade_solve(taylor, order, rel_tol, scale)
    except NotInDpq:
        report["failed"] = "membership"
        return report
    report["condition_estimate"] = approx.condition_estimate
    fp = fixed_point_error(rational, approx.value, scale, order.p)
    report["fixed_point_error"] = fp
    if approx.ill_conditioned or not fp <= FIXED_POINT_RTOL:
        report["failed"] = "fixed_point"
        return report
    report["ok"] = True
    return report


def _run(spec: _Spec) -> ConstructionResult:
    order = spec.order
    state: dict = {}

    def check(c: float, d_pref: float) -> bool:
        probe = spec.build(c, d_pref)
        try:
            err = sup_norm(lambda z: probe.rational(z) - spec.target(z), spec.check_set, "eval")
        except PoleOnSet:
            err = math.inf
        if not err < spec.a:
            state["last_failure"] = "sup_error"
            return False
        scale = balancing_scale(probe.taylor, order)
        series = lambda d: spec.build(c, d).taylor  # noqa: E731
        try:
            poly = det_in_d_poly(series, order, d0=d_pref, scale=scale)
        except DegenerateInterpolation:
            try:
                poly = det_in_d_poly(series, order, d0=d_pref, scale=scale, strict=False)
            except DegenerateInterpolation:
                state["last_failure"] = "degenerate"
                return False
        d = avoid_roots(poly, d_pref)
        cand = spec.build(c, d)
        quick = verify_candidate(
            cand.rational, cand.taylor, order, spec.target, spec.check_set, spec.den_set, spec.a, spec.prefix, spec.rel_tol, "eval"
        )
        state["last_failure"] = quick.get("failed")
        if not quick["ok"]:
            return False
        full = verify_candidate(
            cand.rational, cand.taylor, order, spec.target, spec.check_set, spec.den_set, spec.a, spec.prefix, spec.rel_tol, "validation"
        )
        state["last_failure"] = full.get("failed")
        if not full["ok"]:
            return False
        state.update(cand=cand, c=c, d=d, poly=poly, report=full)
        return True

    try:
        hit = shrink_search(check, spec.c0, spec.d0, spec.max_halvings)
    except SearchExhausted as exc:
        raise SearchExhausted(f"{spec.name}: {exc} (last failure: {state.get('last_failure')})") from None
    cand, rep, poly = state["cand"], state["report"], state["poly"]
    roots = poly.roots()
    roots = roots[np.abs(roots) <= ROOT_RADIUS * poly.d_scale]
    return ConstructionResult(
        constructor=spec.name,
        rational=cand.rational,
        params=ConstructionParams(state["c"], state["d"], order.p, order.q, spec.lam),
        achieved_sup_error=rep["sup_error"],
        prefix_preserved_to=int(spec.prefix.degree) if spec.prefix is not None and not spec.prefix.is_zero else -1,
        hankel_det=hankel_det(cand.taylor, order),
        search_iterations=hit.halvings,
        taylor=cand.taylor,
        det_poly=poly,
        forbidden_d=tuple(complex(z) for z in sorted(roots, key=lambda z: (abs(z), z.real, z.imag))),
        membership=rep["membership"],
        raw_membership=rep["raw_membership"],
        fixed_point_error=rep["fixed_point_error"],
        condition_estimate=rep["condition_estimate"],
        scale=rep["scale"],
        denominator_min=rep["denominator_min"],
    )


def _radius(K: CompactSet) -> float:
    return max(bounds(K).M, 1e-300)


def _check_common(a: float, order: PadeOrder) -> None:
    if not a > 0:
        raise ValueError("tolerance a must be positive")
    if order.q < 1:
        raise OrderViolation("constructors need q >= 1")


def _geometric_taylor(num: np.ndarray, c: complex, q: int, n: int) -> np.ndarray:
    """Coefficients of ``num(z) / (1 - (cz)**q)`` up to ``z**n``, adding
    each power ``(cz)**(mq)`` only at shifted positions so the first q
    coefficients are copied exactly."""
    out = np.zeros(n + 1, dtype=np.complex128)
    m = 0
    cq = c**q
    while m * q <= n:
        shift = m * q
        w = min(num.size, n + 1 - shift)
        coef = cq**m
        if m == 0:
            out[:w] += num[:w]
        elif coef != 0:
            out[shift : shift + w] += coef * num[:w]
        m += 1
    return out


def lemma23(P: Polynomial, K: CompactSet, a: float, order, max_halvings: int = DEFAULT_MAX_HALVINGS, rel_tol: float = DEFAULT_REL_TOL) -> ConstructionResult:
    """``R = P + d z**p / (1 - (cz)**q)`` with ``p > deg P + q``.

    R stays within ``a`` of P on K, keeps P as a Taylor partial sum and
    equals its own ``[p/q]`` approximant.
    """
    order = PadeOrder.of(order)
    p, q = order
    if P.is_zero:
        raise HypothesisViolation("P must be a nonzero polynomial")
    _check_common(a, order)
    if not p > P.degree + q:
        raise OrderViolation(f"need p > deg P + q, got p={p}, deg P={P.degree}, q={q}")
    n = p + q

    def build(c, d) -> _Candidate:
        cq = c**q
        den = np.zeros(q + 1, dtype=np.complex128)
        den[0], den[q] = 1.0, -cq
        num = np.zeros(p + 1, dtype=np.complex128)
        num[: P.coeffs.size] = P.coeffs
        num[q : q + P.coeffs.size] -= cq * P.coeffs
        num[p] += d
        taylor = np.zeros(n + 1, dtype=np.complex128)
        taylor[: P.coeffs.size] = P.coeffs
        for m in range((n - p) // q + 1):
            taylor[p + m * q] += d * cq**m
        rational = RationalFunction(Polynomial.exact(num), Polynomial.exact(den))
        return _Candidate(rational, FormalPowerSeries(taylor))

    M = _radius(K)
    spec = _Spec("lemma23", order, build, P, K, with_origin(K), a, 1.0 / (2 * M), 1.0, P, max_halvings=max_halvings, rel_tol=rel_tol)
    return _run(spec)


def lemma24(Pt: Polynomial, K: CompactSet, a: float, order, max_halvings: int = DEFAULT_MAX_HALVINGS, rel_tol: float = DEFAULT_REL_TOL) -> ConstructionResult:
    """``R = (Pt + d z**p) / (1 - (cz)**q)`` with ``p, q > deg Pt``."""
    order = PadeOrder.of(order)
    p, q = order
    if Pt.is_zero:
        raise HypothesisViolation("P~ must be a nonzero polynomial")
    _check_common(a, order)
    if not (p > Pt.degree and q > Pt.degree):
        raise OrderViolation(f"need p, q > deg P~, got p={p}, q={q}, deg P~={Pt.degree}")
    n = p + q

    def build(c, d) -> _Candidate:
        cq = c**q
        num = np.zeros(p + 1, dtype=np.complex128)
        num[: Pt.coeffs.size] = Pt.coeffs
        num[p] += d
        den = np.zeros(q + 1, dtype=np.complex128)
        den[0], den[q] = 1.0, -cq
        taylor = _geometric_taylor(num, c, q, n)
        rational = RationalFunction(Polynomial.exact(num), Polynomial.exact(den))
        return _Candidate(rational, FormalPowerSeries(taylor))

    M = _radius(K)
    spec = _Spec("lemma24", order, build, Pt, K, with_origin(K), a, 1.0 / (2 * M), 1.0, Pt, max_halvings=max_halvings, rel_tol=rel_tol)
    return _run(spec)


def lemma25(
    P: Polynomial,
    A: Polynomial,
    B: Polynomial,
    lam: int,
    K: CompactSet,
    a: float,
    order,
    max_halvings: int = DEFAULT_MAX_HALVINGS,
    rel_tol: float = DEFAULT_REL_TOL,
) -> ConstructionResult:
    """``R = A~/B~`` with ``B~ = B + c z**q`` and
    ``A~ = B~ P + z**lam A + d z**p``, approximating ``P + z**lam A/B``.

    ``P`` may be the zero polynomial (its degree is then ``-inf``).
    """
    order = PadeOrder.of(order)
    p, q = order
    if A.is_zero or B.is_zero:
        raise HypothesisViolation("A and B must be nonzero polynomials")
    if abs(B.coeff(0) - 1.0) > 1e-12:
        raise HypothesisViolation(f"B(0) must equal 1, got {B.coeff(0)}")
    _check_common(a, order)
    if lam < 1 or not lam > P.degree:
        raise OrderViolation(f"need lambda >= 1 and lambda > deg P, got lambda={lam}, deg P={P.degree}")
    if not q >= B.degree:
        raise OrderViolation(f"need q >= deg B, got q={q}, deg B={B.degree}")
    if not p > max(lam + A.degree, q + P.degree):
        raise OrderViolation(f"need p > max(lambda + deg A, q + deg P), got p={p}")
    K0 = with_origin(K)
    try:
        b_min = inf_abs(B, K0, "validation")
    except PoleOnSet:
        b_min = 0.0
    if not b_min > 0:
        raise HypothesisViolation("B vanishes on K or at 0")
    n = p + q

    def build(c, d) -> _Candidate:
        bt = B.padded(q + 1)
        bt[q] += c
        num = np.zeros(p + 1, dtype=np.complex128)
        if not P.is_zero:
            num[: q + P.coeffs.size] += np.convolve(bt, P.coeffs)
        num[lam : lam + A.coeffs.size] += A.coeffs
        num[p] += d
        g = series_of_quotient([1.0], bt, n)
        taylor = np.zeros(n + 1, dtype=np.complex128)
        taylor[: P.coeffs.size] = P.coeffs
        tail = np.convolve(A.coeffs, g)[: n + 1 - lam]
        taylor[lam : lam + tail.size] += tail
        taylor[p:] += d * g[: n + 1 - p]
        rational = RationalFunction(Polynomial.exact(num), Polynomial.exact(bt))
        return _Candidate(rational, FormalPowerSeries(taylor))

    def target(z):
        return P(z) + z**lam * A(z) / B(z)

    M = _radius(K)
    c0 = min(1.0 / (2 * M), b_min / (2 * M**q))
    spec = _Spec("lemma25", order, build, target, K, K0, a, c0, 1.0, P, lam=lam, max_halvings=max_halvings, rel_tol=rel_tol)
    result = _run(spec)
    num, den = result.rational.numerator, result.rational.denominator
    if num.degree != p or den.degree != q:
        raise HypothesisViolation(f"degrees ({num.degree}, {den.degree}) differ from ({p}, {q})")
    return result


def lemma61(
    A: Polynomial,
    B: Polynomial,
    K: CompactSet,
    L: CompactSet,
    a: float,
    order,
    max_halvings: int = DEFAULT_MAX_HALVINGS,
    rel_tol: float = DEFAULT_REL_TOL,
) -> ConstructionResult:
    """``R = (A + d z**p) / (B + (cz)**q)`` approximating ``A/B`` on K and L."""
    order = PadeOrder.of(order)
    p, q = order
    if A.is_zero or B.is_zero:
        raise HypothesisViolation("A and B must be nonzero polynomials")
    if B.coeff(0) == 0:
        raise HypothesisViolation("B(0) must be nonzero")
    _check_common(a, order)
    if not (A.degree < p and B.degree < q):
        raise OrderViolation(f"need deg A < p and deg B < q, got deg A={A.degree}, deg B={B.degree}, order={tuple(order)}")
    both = with_origin(_union(K, L))
    try:
        b_min = inf_abs(B, both, "validation")
    except PoleOnSet:
        b_min = 0.0
    if not b_min > 0:
        raise HypothesisViolation("B vanishes on K or L")
    n = p + q

    def build(c, d) -> _Candidate:
        num = A.padded(p + 1)
        num[p] += d
        bt = B.padded(q + 1)
        bt[q] += c**q
        rational = RationalFunction(Polynomial.exact(num), Polynomial.exact(bt))
        taylor = series_of_quotient(rational.numerator.padded(p + 1), rational.denominator.padded(q + 1), n)
        return _Candidate(rational, FormalPowerSeries(taylor))

    def target(z):
        return A(z) / B(z)

    KL = _union(K, L)
    M = _radius(KL)
    c0 = min(1.0 / (2 * M), (b_min / 2) ** (1.0 / q) / M)
    spec = _Spec("lemma61", order, build, target, KL, both, a, c0, 1.0, None, max_halvings=max_halvings, rel_tol=rel_tol)
    return _run(spec)


def _union(K: CompactSet, L: CompactSet) -> CompactSet:
    from .sets import union

    return union(K, L)


@dataclass(frozen=True, eq=False)
class RungeFit:
    polynomial: Polynomial
    pi: Polynomial
    lam: int
    err_on_D: float
    err_on_K: float
    pi_bound_K: float
    pi_bound_D: float
    displayed_bounds_met: bool

    def to_json(self) -> dict:
        from .algebra import poly_to_json

        return {
            "polynomial": poly_to_json(self.polynomial),
            "pi": poly_to_json(self.pi),
            "lambda": self.lam,
            "err_on_D": self.err_on_D,
            "err_on_K": self.err_on_K,
            "pi_bound_K": self.pi_bound_K,
            "pi_bound_D": self.pi_bound_D,
            "displayed_bounds_met": self.displayed_bounds_met,
        }


def runge_fit(
    P: Polynomial,
    Q: Polynomial,
    K: CompactSet,
    D: CompactSet,
    lam: int,
    eps: float,
    degree_cap: int = 80,
    step: int = 5,
) -> RungeFit:
    """``P~ = P + z**lam Pi`` close to P on D and to Q on K.

    ``Pi`` is a discrete least-squares fit of the piecewise target
    (0 on D, ``(Q - P)/z**lam`` on K) on the working grids, with the
    degree raised by ``step`` until ``|P~ - P| < eps`` on D and
    ``|P~ - Q| < eps`` on K hold on the validation grids.
    """
    if not D.contains_origin:
        raise HypothesisViolation("D must contain 0")
    if K.contains_origin or np.any(K.validation_grid == 0):
        raise HypothesisViolation("K must not contain 0")
    if not lam > P.degree or lam < 0:
        raise HypothesisViolation(f"need lambda > deg P, got lambda={lam}, deg P={P.degree}")
    if not are_disjoint(K, D):
        raise HypothesisViolation("K and D must be disjoint")
    if not eps > 0:
        raise ValueError("eps must be positive")
    zk, zd = K.eval_grid, D.eval_grid
    M = bounds(K).M
    r = bounds(D).M
    diff = Q - P
    scale = max(M, r)
    pts = np.concatenate([zk, zd])
    rhs = np.concatenate([diff(zk), np.zeros(zd.size, dtype=np.complex128)])
    base = (pts / scale) ** lam
    best = None
    for n in range(0, degree_cap + 1, max(step, 1)):
        cols = base[:, None] * (pts[:, None] / scale) ** np.arange(n + 1)[None, :]
        sol, *_ = np.linalg.lstsq(cols, rhs, rcond=None)
        pi = sol / scale ** (lam + np.arange(n + 1))
        pt = _extend(P, lam, pi)
        e_d = sup_norm(lambda z: pt(z) - P(z), D, "validation")
        e_k = sup_norm(lambda z: pt(z) - Q(z), K, "validation")
        best = (pt, pi, e_d, e_k)
        if e_d < eps and e_k < eps:
            break
    else:
        raise DegreeCapExceeded(
            f"no Pi of degree <= {degree_cap} meets the bounds (sup on D {best[2]:.2e}, on K {best[3]:.2e}, eps {eps:.2e})"
        )
    pt, pi, e_d, e_k = best
    pi_poly = Polynomial.exact(pi)
    bound_k = eps / M**lam if M > 0 else math.inf
    bound_d = eps / r**lam if r > 0 else math.inf
    with np.errstate(all="ignore"):
        dev_k = sup_norm(lambda z: pi_poly(z) - diff(z) / z**lam, K, "validation")
        dev_d = sup_norm(pi_poly, D, "validation")
    return RungeFit(pt, pi_poly, lam, e_d, e_k, bound_k, bound_d, bool(dev_k < bound_k and dev_d < bound_d))


def _extend(P: Polynomial, lam: int, pi: np.ndarray) -> Polynomial:
    """``P + z**lam * Pi`` with P's coefficients copied verbatim."""
    out = np.zeros(max(P.coeffs.size, lam + pi.size), dtype=np.complex128)
    out[: P.coeffs.size] = P.coeffs
    out[lam : lam + pi.size] += pi
    return Polynomial.exact(out)
