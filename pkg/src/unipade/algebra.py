"""Polynomials, rational functions and truncated power series over C.

Coefficients are stored lowest degree first as read-only ``complex128``
arrays. Every value is immutable after construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import PoleAtPoint, TruncationExceeded
from .roots import poly_roots

#: relative threshold below which trailing coefficients are dropped
TRIM_RTOL = 1e-14
#: base factor of the pole test in :func:`rational_eval`
POLE_RTOL = 1e-12

NEG_INF = -math.inf


def as_complex(value) -> complex:
    """Coerce to a finite Python complex; rejects NaN and infinities."""
    if isinstance(value, (list, tuple)) and len(value) == 2:
        value = complex(float(value[0]), float(value[1]))
    z = complex(value)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"non-finite scalar {value!r}")
    return z


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=np.complex128).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise ValueError("coefficients must be finite")
    arr.setflags(write=False)
    return arr


def _trim(arr: np.ndarray, rtol: float) -> np.ndarray:
    if arr.size == 0:
        return arr
    mags = np.abs(arr)
    top = mags.max()
    if top == 0.0:
        return arr[:0]
    keep = np.nonzero(mags > rtol * top)[0] if rtol > 0 else np.nonzero(mags)[0]
    return arr[: keep[-1] + 1]


@dataclass(frozen=True, eq=False)
class Polynomial:
    """Dense polynomial ``sum coeffs[v] * z**v``.

    ``trim`` controls normalization: trailing coefficients smaller than
    ``TRIM_RTOL`` times the largest modulus are dropped. Pass
    ``trim=False`` to keep every nonzero coefficient (exact zeros are
    always dropped); constructors use this when the degree is structural.
    """

    coeffs: np.ndarray
    trim: bool = field(default=True, repr=False)

    def __post_init__(self):
        arr = _frozen(self.coeffs)
        arr = _trim(arr, TRIM_RTOL if self.trim else 0.0)
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    @classmethod
    def zero(cls) -> "Polynomial":
        return cls(np.zeros(0))

    @classmethod
    def exact(cls, coeffs) -> "Polynomial":
        return cls(coeffs, trim=False)

    @classmethod
    def monomial(cls, k: int, scale: complex = 1.0) -> "Polynomial":
        c = np.zeros(k + 1, dtype=np.complex128)
        c[k] = scale
        return cls(c, trim=False)

    @property
    def degree(self) -> float | int:
        """Degree, or ``-inf`` for the zero polynomial."""
        return self.coeffs.size - 1 if self.coeffs.size else NEG_INF

    @property
    def is_zero(self) -> bool:
        return self.coeffs.size == 0

    def coeff(self, k: int) -> complex:
        if 0 <= k < self.coeffs.size:
            return complex(self.coeffs[k])
        return 0j

    def padded(self, n: int) -> np.ndarray:
        """Coefficients as a length-``n`` array (zero padded or cut)."""
        out = np.zeros(n, dtype=np.complex128)
        m = min(n, self.coeffs.size)
        out[:m] = self.coeffs[:m]
        return out

    def __call__(self, z):
        return poly_eval(self, z)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        return poly_add(self, other)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return poly_add(self, poly_scale(other, -1.0))

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            return poly_mul(self, other)
        return poly_scale(self, other)

    __rmul__ = __mul__

    def __neg__(self) -> "Polynomial":
        return poly_scale(self, -1.0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.coeffs.shape == other.coeffs.shape and bool(np.all(self.coeffs == other.coeffs))

    def __hash__(self):
        return hash(self.coeffs.tobytes())

    def shift(self, k: int) -> "Polynomial":
        """Multiply by ``z**k``."""
        if self.is_zero:
            return self
        return Polynomial(np.concatenate([np.zeros(k, dtype=np.complex128), self.coeffs]), trim=False)

    def allclose(self, other: "Polynomial", rtol: float = 1e-12) -> bool:
        return coeff_rel_error(self.coeffs, other.coeffs) <= rtol


def coeff_rel_error(a: Sequence[complex], b: Sequence[complex]) -> float:
    """max |a_k - b_k| / max |b_k| with zero padding (0 when both vanish)."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    n = max(a.size, b.size)
    pa = np.zeros(n, dtype=np.complex128)
    pb = np.zeros(n, dtype=np.complex128)
    pa[: a.size] = a
    pb[: b.size] = b
    ref = np.abs(pb).max() if n else 0.0
    diff = np.abs(pa - pb).max() if n else 0.0
    if ref == 0.0:
        return 0.0 if diff == 0.0 else math.inf
    return float(diff / ref)


def poly_eval(p: Polynomial, z):
    """Horner evaluation; ``z`` may be a scalar or an array."""
    scalar = np.isscalar(z)
    zz = np.asarray(z, dtype=np.complex128)
    acc = np.zeros_like(zz)
    for c in p.coeffs[::-1]:
        acc = acc * zz + c
    return complex(acc) if scalar else acc


def poly_add(a: Polynomial, b: Polynomial) -> Polynomial:
    n = max(a.coeffs.size, b.coeffs.size)
    return Polynomial(a.padded(n) + b.padded(n))


def poly_mul(a: Polynomial, b: Polynomial) -> Polynomial:
    if a.is_zero or b.is_zero:
        return Polynomial.zero()
    return Polynomial(np.convolve(a.coeffs, b.coeffs))


def poly_scale(a: Polynomial, s) -> Polynomial:
    return Polynomial(a.coeffs * as_complex(s))


@dataclass(frozen=True, eq=False)
class RationalFunction:
    """``numerator / denominator`` normalized so the denominator's
    constant term is exactly 1."""

    numerator: Polynomial
    denominator: Polynomial

    def __post_init__(self):
        den = self.denominator
        if den.is_zero:
            raise ValueError("denominator is the zero polynomial")
        d0 = den.coeffs[0]
        if d0 == 0:
            raise ValueError("denominator must not vanish at the expansion center")
        if d0 != 1:
            num = Polynomial(self.numerator.coeffs / d0, trim=self.numerator.trim)
            dc = np.array(den.coeffs / d0)
            dc[0] = 1.0
            object.__setattr__(self, "numerator", num)
            object.__setattr__(self, "denominator", Polynomial(dc, trim=den.trim))

    @classmethod
    def from_coeffs(cls, num, den, trim: bool = True) -> "RationalFunction":
        return cls(Polynomial(num, trim=trim), Polynomial(den, trim=trim))

    @classmethod
    def polynomial(cls, p: Polynomial) -> "RationalFunction":
        return cls(p, Polynomial([1.0]))

    @property
    def p(self):
        return self.numerator.degree

    @property
    def q(self):
        return self.denominator.degree

    def __call__(self, z, pole_tolerance: float | None = None):
        return rational_eval(self, z, pole_tolerance)

    def poles(self) -> np.ndarray:
        return poly_roots(self.denominator.coeffs)


def rational_eval(r: RationalFunction, z, pole_tolerance: float | None = None):
    """Evaluate ``r`` at a scalar or array ``z``.

    Raises PoleAtPoint where ``|den(z)| < 1e-12 * (1 + |z|)**q`` (or below
    an explicit ``pole_tolerance``).
    """
    scalar = np.isscalar(z)
    zz = np.asarray(z, dtype=np.complex128)
    den = poly_eval(r.denominator, zz)
    q = max(r.denominator.coeffs.size - 1, 0)
    if pole_tolerance is None:
        tol = POLE_RTOL * (1.0 + np.abs(zz)) ** q
    else:
        tol = pole_tolerance
    bad = np.abs(den) < tol
    if np.any(bad):
        where = zz[bad].reshape(-1)[0] if zz.ndim else zz
        raise PoleAtPoint(f"denominator vanishes near z={complex(where)}")
    out = poly_eval(r.numerator, zz) / den
    return complex(out) if scalar else out


@dataclass(frozen=True, eq=False)
class FormalPowerSeries:
    """A finite window ``(a_0, ..., a_N)`` of a formal power series.

    Reading past ``N`` raises TruncationExceeded; negative indices read
    as exact zeros.
    """

    coeffs: np.ndarray
    center: complex = 0j

    def __post_init__(self):
        arr = _frozen(self.coeffs)
        if arr.size == 0:
            raise ValueError("a series window needs at least a_0")
        object.__setattr__(self, "coeffs", arr)
        object.__setattr__(self, "center", as_complex(self.center))

    @property
    def truncation_order(self) -> int:
        return self.coeffs.size - 1

    def coeff(self, k: int) -> complex:
        if k < 0:
            return 0j
        if k > self.truncation_order:
            raise TruncationExceeded(f"a_{k} requested, window ends at a_{self.truncation_order}")
        return complex(self.coeffs[k])

    def window(self, lo: int, hi: int) -> np.ndarray:
        """``a_lo .. a_hi`` inclusive, with zeros for negative indices."""
        if hi > self.truncation_order:
            raise TruncationExceeded(f"a_{hi} requested, window ends at a_{self.truncation_order}")
        out = np.zeros(max(hi - lo + 1, 0), dtype=np.complex128)
        start = max(lo, 0)
        if hi >= start:
            out[start - lo :] = self.coeffs[start : hi + 1]
        return out

    def truncate(self, order: int) -> "FormalPowerSeries":
        if order > self.truncation_order:
            raise TruncationExceeded(f"cannot extend window to order {order}")
        return FormalPowerSeries(self.coeffs[: order + 1], self.center)

    def scaled(self, sigma: float, pivot: int = 0) -> "FormalPowerSeries":
        """Series of ``sigma**-pivot * f(sigma * z)``: coefficients
        ``a_k sigma**(k - pivot)``, computed without overflow when sigma is
        a power of two."""
        return FormalPowerSeries(scale_powers(self.coeffs, sigma, -pivot), self.center)

    def __len__(self):
        return self.coeffs.size


def scale_powers(coeffs, sigma: float, offset: int = 0) -> np.ndarray:
    """``c_k * sigma**(k + offset)`` for every k.

    Powers of two go through ``ldexp`` so huge or tiny ``sigma`` only
    overflows when the product itself does.
    """
    c = np.asarray(coeffs, dtype=np.complex128)
    k = np.arange(c.size) + offset
    mant, e = math.frexp(sigma)
    if sigma > 0 and mant == 0.5:
        shift = (e - 1) * k
        shift = np.clip(shift, -2200, 2200)
        return np.ldexp(c.real, shift) + 1j * np.ldexp(c.imag, shift)
    with np.errstate(over="ignore", under="ignore"):
        return c * np.power(float(sigma), k.astype(float))


def series_of_quotient(num: Sequence[complex], den: Sequence[complex], order: int) -> np.ndarray:
    """Taylor coefficients ``b_0..b_order`` of ``num/den`` by long division."""
    num = np.asarray(num, dtype=np.complex128)
    den = np.asarray(den, dtype=np.complex128)
    d0 = den[0]
    if d0 == 0:
        raise ZeroDivisionError("denominator vanishes at the center")
    b = np.zeros(order + 1, dtype=np.complex128)
    n_pad = np.zeros(order + 1, dtype=np.complex128)
    m = min(order + 1, num.size)
    n_pad[:m] = num[:m]
    dq = den.size - 1
    for k in range(order + 1):
        top = min(k, dq)
        acc = n_pad[k]
        if top >= 1:
            acc = acc - np.dot(den[1 : top + 1], b[k - 1 :: -1][:top])
        b[k] = acc / d0
    return b


def series_of_rational(r: RationalFunction, order: int) -> FormalPowerSeries:
    """Taylor window of ``r`` about 0 up to ``z**order``."""
    return FormalPowerSeries(series_of_quotient(r.numerator.coeffs, r.denominator.coeffs, order))


def partial_sum(f: FormalPowerSeries, k: int) -> Polynomial:
    """``S_k = a_0 + ... + a_k z**k``; the zero polynomial when ``k < 0``."""
    if k < 0:
        return Polynomial.zero()
    if k > f.truncation_order:
        raise TruncationExceeded(f"S_{k} needs a_{k}, window ends at a_{f.truncation_order}")
    return Polynomial.exact(f.coeffs[: k + 1])


def recenter(p: Polynomial, from_center, to_center) -> Polynomial:
    """Re-express ``p`` (in powers of ``z - from_center``) in powers of
    ``z - to_center`` by repeated synthetic division."""
    s = as_complex(to_center) - as_complex(from_center)
    c = np.array(p.coeffs, dtype=np.complex128)
    n = c.size
    for i in range(n):
        for j in range(n - 2, i - 1, -1):
            c[j] += s * c[j + 1]
    return Polynomial(c)


def _pairs(arr: Iterable[complex]) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in np.asarray(arr, dtype=np.complex128)]


def _unpairs(data) -> np.ndarray:
    out = []
    for item in data:
        if isinstance(item, (list, tuple)):
            if len(item) != 2:
                raise ValueError(f"expected [re, im], got {item!r}")
            out.append(complex(float(item[0]), float(item[1])))
        else:
            out.append(complex(float(item)))
    return np.array(out, dtype=np.complex128)


def poly_to_json(p: Polynomial) -> list:
    return _pairs(p.coeffs)


def poly_from_json(data) -> Polynomial:
    return Polynomial.exact(_unpairs(data))


def rational_to_json(r: RationalFunction) -> dict:
    return {"num": _pairs(r.numerator.coeffs), "den": _pairs(r.denominator.coeffs)}


def rational_from_json(data) -> RationalFunction:
    return RationalFunction(Polynomial.exact(_unpairs(data["num"])), Polynomial.exact(_unpairs(data["den"])))


def series_to_json(f: FormalPowerSeries) -> dict:
    return {"coeffs": _pairs(f.coeffs), "center": [f.center.real, f.center.imag]}


def series_from_json(data) -> FormalPowerSeries:
    center = data.get("center", [0.0, 0.0])
    return FormalPowerSeries(_unpairs(data["coeffs"]), as_complex(center))


def finite_or_none(x: float) -> float | None:
    """JSON has no inf/nan; diagnostics that overflowed become null."""
    x = float(x)
    return x if math.isfinite(x) else None


def complex_to_json(z) -> list:
    z = complex(z)
    return [finite_or_none(z.real), finite_or_none(z.imag)]
