import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from strategies import coeff_lists
from unipade.algebra import FormalPowerSeries, Polynomial, RationalFunction, coeff_rel_error, series_of_quotient
from unipade.errors import NotInDpq, OrderTooLarge, TruncationExceeded
from unipade.pade import (
    NotInDpqMarker,
    PadeApproximant,
    hankel_det,
    hankel_matrix,
    in_D_pq,
    pade_jacobi,
    pade_solve,
    pade_table,
    table_to_json,
)

GEOM = FormalPowerSeries(np.ones(12))
EXP = FormalPowerSeries([1 / math.factorial(k) for k in range(12)])


def test_hankel_matrix_examples():
    assert np.array_equal(hankel_matrix(GEOM, (0, 1)).entries, [[1]])
    assert hankel_matrix(EXP, (3, 0)).entries.shape == (0, 0)
    assert np.allclose(hankel_matrix(EXP, (2, 2)).entries, [[1, 0.5], [0.5, 1 / 6]])


def test_hankel_matrix_reads_negative_indices_as_zero():
    h = hankel_matrix(EXP, (0, 2)).entries
    assert np.allclose(h, [[0, 1], [1, 1]])


def test_hankel_det_examples():
    assert hankel_det(GEOM, (0, 1)) == 1
    assert hankel_det(EXP, (4, 0)) == 1
    assert hankel_det(EXP, (2, 2)) == pytest.approx(1 / 6 - 1 / 4)


def test_hankel_window_must_fit():
    with pytest.raises(TruncationExceeded):
        hankel_matrix(FormalPowerSeries([1, 1, 1]), (2, 2))


def test_membership_examples():
    assert in_D_pq(GEOM, (0, 1), 1e-10)
    assert not in_D_pq(FormalPowerSeries([1, 0, 0, 0]), (1, 1), 1e-10)
    assert in_D_pq(EXP, (2, 2), 1e-10)


def test_membership_is_scale_invariant_for_geometric_growth():
    f = FormalPowerSeries([1e6**k for k in range(12)])
    assert not in_D_pq(f, (2, 3), 1e-10)
    member = in_D_pq(f, (0, 1), 1e-10, scale=2.0**-20)
    assert member and member.log10_margin > 0


def test_pade_solve_examples():
    r = pade_solve(GEOM, (0, 1)).value
    assert np.allclose(r.numerator.coeffs, [1]) and np.allclose(r.denominator.coeffs, [1, -1])
    s3 = pade_solve(EXP, (3, 0)).value
    assert np.array_equal(s3.numerator.coeffs, EXP.coeffs[:4])
    e11 = pade_solve(EXP, (1, 1)).value
    assert np.allclose(e11.numerator.coeffs, [1, 0.5]) and np.allclose(e11.denominator.coeffs, [1, -0.5])


def test_pade_solve_rejects_singular_hankel():
    with pytest.raises(NotInDpq) as info:
        pade_solve(FormalPowerSeries([1, 0, 0, 0]), (1, 1))
    assert not info.value.diagnostics.ok


def test_pade_jacobi_examples():
    r = pade_jacobi(GEOM, (0, 1)).value
    assert np.allclose(r.denominator.coeffs, [1, -1]) and np.allclose(r.numerator.coeffs, [1])
    for p in range(5):
        assert np.allclose(pade_jacobi(EXP, (p, 0)).value.numerator.coeffs, EXP.coeffs[: p + 1])
    a, b = pade_jacobi(EXP, (1, 1)).value, pade_solve(EXP, (1, 1)).value
    assert coeff_rel_error(a.numerator.coeffs, b.numerator.coeffs) < 1e-10
    assert coeff_rel_error(a.denominator.coeffs, b.denominator.coeffs) < 1e-10
    with pytest.raises(OrderTooLarge):
        pade_jacobi(EXP, (2, 5))


def test_pade_table_examples():
    t = pade_table(GEOM, 2, 2)
    for p in range(3):
        assert np.array_equal(t[p][0].value.numerator.coeffs, np.ones(p + 1))
    assert np.allclose(t[0][1].value.denominator.coeffs, [1, -1])
    marked = pade_table(FormalPowerSeries([1, 0, 0, 0, 0]), 1, 1)
    assert isinstance(marked[1][1], NotInDpqMarker)
    js = table_to_json(marked)
    assert js[1][1] is None and js[0][0]["num"] == [[1.0, 0.0]]


def test_approximant_json_has_no_nan():
    out = pade_solve(EXP, (2, 2)).to_json()
    assert set(out) >= {"p", "q", "num", "den", "hankel_det", "cond"}


@given(coeff_lists(min_size=2, max_size=4), coeff_lists(min_size=2, max_size=4))
def test_round_trip_recovers_rational(num, den):
    assume(num[-1] != 0 and den[-1] != 0)
    den = den.copy()
    den[0] = 1.0
    r = RationalFunction(Polynomial.exact(num), Polynomial.exact(den))
    p, q = r.numerator.degree, r.denominator.degree
    with np.errstate(all="ignore"):
        coeffs = series_of_quotient(num, den, p + q + 2)
    assume(np.all(np.isfinite(coeffs)))
    f = FormalPowerSeries(coeffs)
    assume(in_D_pq(f, (p, q), 1e-8))
    got = pade_solve(f, (p, q))
    assume(got.condition_estimate < 1e6)
    assert coeff_rel_error(got.value.denominator.coeffs, r.denominator.coeffs) < 1e-9 * got.condition_estimate
    assert coeff_rel_error(got.value.numerator.coeffs, r.numerator.coeffs) < 1e-9 * got.condition_estimate


@given(coeff_lists(min_size=13, max_size=13), st.integers(0, 12))
def test_partial_sum_column_is_exact(a, p):
    f = FormalPowerSeries(a)
    assert np.array_equal(pade_solve(f, (p, 0)).value.numerator.coeffs, Polynomial.exact(a[: p + 1]).coeffs)


@given(coeff_lists(min_size=10, max_size=10), st.integers(0, 4), st.integers(1, 4))
def test_matching_conditions_hold_backward_stably(a, p, q):
    # den * f - num vanishes through z**(p+q) up to a normwise rounding bound
    f = FormalPowerSeries(a)
    assume(in_D_pq(f, (p, q), 1e-8))
    r = pade_solve(f, (p, q)).value
    n = p + q + 1
    den = r.denominator.padded(q + 1)
    with np.errstate(all="ignore"):
        lhs = np.convolve(den, a[:n])[:n] - r.numerator.padded(n)
        size = np.abs(den).sum() * np.abs(a[:n]).max()
    assume(np.isfinite(size))
    assert np.abs(lhs).max() <= 1e-12 * size


def test_approximant_is_callable():
    approx = pade_solve(EXP, (2, 2))
    assert isinstance(approx, PadeApproximant)
    assert abs(approx(0.1) - math.exp(0.1)) < 1e-7


@given(st.lists(st.floats(-1, 1, allow_nan=False), min_size=12, max_size=12), st.integers(-120, 120), st.integers(1, 5), st.integers(0, 6))
def test_membership_margin_matches_direct_determinant(xs, e, q, p):
    a = np.array(xs) * 10.0**e
    f = FormalPowerSeries(a)
    h = hankel_matrix(f, (p, q)).entries
    top = np.abs(h).max()
    assume(top > 0)
    direct = abs(np.linalg.det(h / top))
    assume(direct > 1e-200)
    assert in_D_pq(f, (p, q), 1e-10).log10_margin == pytest.approx(math.log10(direct) + 10, abs=1e-8)
