"""Hankel membership test and Pade approximants ``[p/q]_f``."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .algebra import (
    FormalPowerSeries,
    Polynomial,
    RationalFunction,
    complex_to_json,
    finite_or_none,
    partial_sum,
    rational_to_json,
    scale_powers,
)
from .errors import NotInDpq, OrderTooLarge, TruncationExceeded

DEFAULT_REL_TOL = 1e-10
ILL_CONDITIONED = 1e12
JACOBI_MAX_Q = 4


class PadeOrder(NamedTuple):
    p: int
    q: int

    @classmethod
    def of(cls, order) -> "PadeOrder":
        p, q = order
        if p < 0 or q < 0:
            raise ValueError(f"orders must be non-negative, got {(p, q)}")
        return cls(int(p), int(q))


@dataclass(frozen=True)
class HankelMatrix:
    entries: np.ndarray
    source_order: PadeOrder


@dataclass(frozen=True)
class Membership:
    """Outcome of the Hankel test; truthy when ``f`` is in ``D_{p,q}``.

    ``log10_margin`` is ``log10(|det| / threshold)``; it stays finite when
    the determinant itself under- or overflows.
    """

    ok: bool
    det: complex
    threshold: float
    max_entry: float
    rel_tol: float
    scale: float = 1.0
    log10_margin: float = math.inf

    def __bool__(self) -> bool:
        return self.ok

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "det": complex_to_json(self.det),
            "threshold": finite_or_none(self.threshold),
            "max_entry": finite_or_none(self.max_entry),
            "rel_tol": self.rel_tol,
            "scale": self.scale,
            "log10_margin": finite_or_none(self.log10_margin),
        }


@dataclass(frozen=True)
class PadeApproximant:
    order: PadeOrder
    value: RationalFunction
    hankel_det: complex
    condition_estimate: float

    @property
    def ill_conditioned(self) -> bool:
        return not self.condition_estimate <= ILL_CONDITIONED

    def __call__(self, z):
        return self.value(z)

    def to_json(self) -> dict:
        out = {"p": self.order.p, "q": self.order.q}
        out.update(rational_to_json(self.value))
        out["hankel_det"] = complex_to_json(self.hankel_det)
        out["cond"] = finite_or_none(self.condition_estimate)
        return out


@dataclass(frozen=True)
class NotInDpqMarker:
    """Placeholder for a Pade table cell that failed the Hankel test."""

    order: PadeOrder
    membership: Membership


def _require_window(f: FormalPowerSeries, order: PadeOrder) -> None:
    if f.truncation_order < order.p + order.q:
        raise TruncationExceeded(
            f"[{order.p}/{order.q}] needs a_0..a_{order.p + order.q}, "
            f"window ends at a_{f.truncation_order}"
        )


def hankel_matrix(f: FormalPowerSeries, order) -> HankelMatrix:
    """q x q matrix with entry (i, j) = a_{p-q+1+i+j} (0-based)."""
    order = PadeOrder.of(order)
    _require_window(f, order)
    p, q = order
    if q == 0:
        return HankelMatrix(np.zeros((0, 0), dtype=np.complex128), order)
    w = f.window(p - q + 1, p + q - 1)
    idx = np.add.outer(np.arange(q), np.arange(q))
    return HankelMatrix(w[idx], order)


def hankel_det(f: FormalPowerSeries, order) -> complex:
    return _det(hankel_matrix(f, order).entries)


def balanced_window(f: FormalPowerSeries, order, scale: float) -> FormalPowerSeries:
    """``scale**-p f(scale*z)`` restricted to a_0..a_{p+q}.

    Coefficients below a_{p-q+1} are never read by the Hankel test or the
    matching system; they are zeroed so their rescaling cannot overflow.
    """
    p, q = order
    if scale == 1.0:
        return f
    c = np.array(f.coeffs[: p + q + 1])
    c[: max(p - q + 1, 0)] = 0
    return FormalPowerSeries(c, f.center).scaled(scale, p)


def in_D_pq(f: FormalPowerSeries, order, rel_tol: float = DEFAULT_REL_TOL, scale: float = 1.0) -> Membership:
    """Relative Hankel test ``|det H| > rel_tol * (max |H_ij|)**q``.

    ``scale`` runs the test on ``scale**-p f(scale*z)``. Membership in
    ``D_{p,q}`` is invariant under that substitution but the relative
    threshold is not, so a balancing scale keeps the test meaningful for
    series whose coefficients grow or decay geometrically.
    """
    order = PadeOrder.of(order)
    p, q = order
    g = balanced_window(f, order, scale)
    h = hankel_matrix(g, order).entries
    if q == 0:
        return Membership(True, 1.0 + 0j, 0.0, 0.0, rel_tol, scale)
    top = float(np.abs(h).max())
    if top == 0.0:
        return Membership(False, 0j, 0.0, 0.0, rel_tol, scale, -math.inf)
    # power-of-two normalization is exact and safe for subnormal entries
    shift = math.frexp(top)[1]
    unit = _ldexp(h, -shift)
    sign, logdet = np.linalg.slogdet(unit)
    logdet += q * (shift * math.log(2) - math.log(top))
    margin = (logdet - math.log(rel_tol)) / math.log(10) if sign != 0 else -math.inf
    with np.errstate(all="ignore"):
        det = complex(sign * np.exp(logdet + q * math.log(top))) if sign != 0 else 0j
        threshold = float(rel_tol * np.exp(q * math.log(top)))
    return Membership(bool(margin > 0), det, threshold, top, rel_tol, scale, float(margin))


def _toeplitz_system(a: np.ndarray, p: int, q: int) -> tuple[np.ndarray, np.ndarray]:
    """Rows k = p+1..p+q of sum_{j=1..q} d_j a_{k-j} = -a_k.

    ``a`` is padded so that ``a[k + q]`` holds a_k (negative indices zero).
    """
    i = np.arange(q)[:, None]
    j = np.arange(1, q + 1)[None, :]
    mat = a[p + 1 + i - j + q]
    rhs = -a[p + 1 + np.arange(q) + q]
    return mat, rhs


def pade_solve(
    f: FormalPowerSeries,
    order,
    rel_tol: float = DEFAULT_REL_TOL,
    scale: float = 1.0,
) -> PadeApproximant:
    """``[p/q]_f`` from the q linear matching conditions on a_{p+1..p+q}.

    The denominator comes from a partially pivoted dense solve, the
    numerator from the convolution ``n_k = sum_j d_j a_{k-j}``. With
    ``scale != 1`` the solve runs on ``scale**-p f(scale*z)`` and the
    denominator is mapped back.
    """
    order = PadeOrder.of(order)
    _require_window(f, order)
    p, q = order
    member = in_D_pq(f, order, rel_tol, scale)
    if not member:
        raise NotInDpq(f"series is not in D_{{{p},{q}}} (|det|={abs(member.det):.3e})", member)
    if q == 0:
        num = Polynomial.exact(f.coeffs[: p + 1])
        return PadeApproximant(order, RationalFunction(num, Polynomial([1.0])), member.det, 1.0)

    g = balanced_window(f, order, scale)
    padded = np.concatenate([np.zeros(q, dtype=np.complex128), g.coeffs[: p + q + 1]])
    mat, rhs = _toeplitz_system(padded, p, q)
    top = max(float(np.abs(mat).max()), float(np.abs(rhs).max()))
    if top > 0:
        shift = math.frexp(top)[1]
        mat, rhs = _ldexp(mat, -shift), _ldexp(rhs, -shift)
    try:
        with np.errstate(all="ignore"):
            den_scaled = np.linalg.solve(mat, rhs)
            cond = float(np.abs(np.linalg.cond(mat, 1)))
    except np.linalg.LinAlgError as exc:
        raise NotInDpq(f"matching system is singular for ({p},{q})", member) from exc
    if not math.isfinite(cond):
        cond = math.inf
    d = np.concatenate([[1.0 + 0j], den_scaled])
    if scale != 1.0:
        d = scale_powers(d, 1.0 / scale)
        d[0] = 1.0
    a = f.coeffs[: p + 1]
    with np.errstate(all="ignore"):
        n = np.array([np.dot(d[: min(k, q) + 1], a[k::-1][: min(k, q) + 1]) for k in range(p + 1)])
    if not (np.all(np.isfinite(d)) and np.all(np.isfinite(n))):
        raise NotInDpq(f"[{p}/{q}] coefficients overflow double precision", member)
    value = RationalFunction(Polynomial.exact(n), Polynomial.exact(d))
    return PadeApproximant(order, value, member.det, max(cond, 1.0))


def _ldexp(x: np.ndarray, e: int) -> np.ndarray:
    return np.ldexp(x.real, e) + 1j * np.ldexp(x.imag, e)


def _det(m: np.ndarray) -> complex:
    """Determinant via ``slogdet``; saturates to 0 or inf instead of warning."""
    if m.shape[0] == 0:
        return 1.0 + 0j
    sign, logdet = np.linalg.slogdet(m)
    if sign == 0:
        return 0j
    with np.errstate(over="ignore", under="ignore"):
        return complex(sign * np.exp(logdet))


def pade_jacobi(f: FormalPowerSeries, order, rel_tol: float = DEFAULT_REL_TOL, scale: float = 1.0) -> PadeApproximant:
    """``[p/q]_f`` from Jacobi's determinant quotient (oracle, q <= 4).

    Both determinants share the coefficient rows a_{p-q+i..p+i}; the
    first rows hold ``z**(q-j) S_{p-q+j}(z)`` and ``z**(q-j)``. They are
    expanded by cofactors along that first row.
    """
    order = PadeOrder.of(order)
    p, q = order
    if q > JACOBI_MAX_Q:
        raise OrderTooLarge(f"Jacobi oracle is capped at q <= {JACOBI_MAX_Q}")
    _require_window(f, order)
    member = in_D_pq(f, order, rel_tol, scale)
    if not member:
        raise NotInDpq(f"series is not in D_{{{p},{q}}}", member)
    lower = np.array([[f.coeff(p - q + i + j) for j in range(q + 1)] for i in range(1, q + 1)], dtype=np.complex128)
    num = np.zeros(p + 1, dtype=np.complex128)
    den = np.zeros(q + 1, dtype=np.complex128)
    for j in range(q + 1):
        minor = _det(np.delete(lower, j, axis=1)) if q else 1.0 + 0j
        cof = (-1) ** j * minor
        s = partial_sum(f, p - q + j).coeffs
        num[q - j : q - j + s.size] += cof * s
        den[q - j] += cof
    value = RationalFunction(Polynomial(num), Polynomial(den))
    return PadeApproximant(order, value, member.det, 1.0)


def pade_table(f: FormalPowerSeries, p_max: int, q_max: int, rel_tol: float = DEFAULT_REL_TOL):
    """Grid ``table[p][q]`` of approximants or :class:`NotInDpqMarker`."""
    if f.truncation_order < p_max + q_max:
        raise TruncationExceeded(f"table up to ({p_max},{q_max}) needs a_0..a_{p_max + q_max}")
    table = []
    for p in range(p_max + 1):
        row = []
        for q in range(q_max + 1):
            try:
                row.append(pade_solve(f, (p, q), rel_tol))
            except NotInDpq as exc:
                row.append(NotInDpqMarker(PadeOrder(p, q), exc.diagnostics))
        table.append(row)
    return table


def table_to_json(table) -> list:
    return [[cell.to_json() if isinstance(cell, PadeApproximant) else None for cell in row] for row in table]
