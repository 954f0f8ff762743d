import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from strategies import coeff_lists, cplx
from unipade.algebra import (
    FormalPowerSeries,
    Polynomial,
    RationalFunction,
    coeff_rel_error,
    partial_sum,
    poly_add,
    poly_eval,
    poly_from_json,
    poly_mul,
    poly_scale,
    poly_to_json,
    rational_eval,
    rational_from_json,
    rational_to_json,
    recenter,
    series_from_json,
    series_of_rational,
    series_to_json,
)
from unipade.errors import PoleAtPoint, TruncationExceeded

GEOM = RationalFunction(Polynomial([1.0]), Polynomial([1.0, -1.0]))


def test_poly_eval_examples():
    assert poly_eval(Polynomial([1, 0, 1]), 2) == 5
    assert poly_eval(Polynomial.zero(), 1.5 + 2j) == 0
    assert poly_eval(Polynomial([0, 1]), 3 + 4j) == 3 + 4j


def test_poly_eval_array_matches_numpy():
    z = np.linspace(-2, 2, 7) + 0.5j
    p = Polynomial([1, -2j, 3, 0.5])
    assert np.allclose(p(z), np.polynomial.polynomial.polyval(z, p.coeffs))


def test_arith_examples():
    assert poly_mul(Polynomial([1, 1]), Polynomial([1, -1])) == Polynomial([1, 0, -1])
    p = Polynomial([1, 2j, 3])
    assert poly_add(p, Polynomial.zero()) == p
    assert poly_scale(Polynomial([2, 4]), 0.5) == Polynomial([1, 2])


def test_normalization_drops_tiny_trailing():
    assert Polynomial([1, 2, 1e-16]).degree == 1
    assert Polynomial.exact([1, 2, 1e-16]).degree == 2
    assert Polynomial([0, 0]).is_zero
    assert Polynomial.zero().degree == -np.inf


def test_rational_eval_examples():
    assert rational_eval(GEOM, 0.5) == pytest.approx(2)
    with pytest.raises(PoleAtPoint):
        rational_eval(GEOM, 1)
    assert rational_eval(RationalFunction(Polynomial([1, 1]), Polynomial([1])), 1j) == pytest.approx(1 + 1j)


def test_rational_normalizes_denominator():
    r = RationalFunction(Polynomial([2, 2]), Polynomial([2, -2]))
    assert r.denominator.coeffs[0] == 1
    assert r(0.5) == pytest.approx(3)
    with pytest.raises(ValueError):
        RationalFunction(Polynomial([1]), Polynomial([0, 1]))


def test_series_of_rational_examples():
    assert np.array_equal(series_of_rational(GEOM, 4).coeffs, np.ones(5))
    assert np.array_equal(series_of_rational(RationalFunction(Polynomial([1, 1]), Polynomial([1])), 3).coeffs, [1, 1, 0, 0])
    sq = RationalFunction(Polynomial([1]), Polynomial([1, -2, 1]))
    assert np.array_equal(series_of_rational(sq, 3).coeffs, [1, 2, 3, 4])


def test_partial_sum_examples():
    f = FormalPowerSeries([1, 2, 3])
    assert partial_sum(f, 1) == Polynomial([1, 2])
    assert partial_sum(f, -5).is_zero
    with pytest.raises(TruncationExceeded):
        partial_sum(f, 7)


def test_coefficient_past_window_is_an_error():
    f = FormalPowerSeries([1, 2, 3])
    assert f.coeff(-1) == 0
    with pytest.raises(TruncationExceeded):
        f.coeff(3)


def test_recenter_examples():
    assert recenter(Polynomial([0, 1]), 0, 1) == Polynomial([1, 1])
    assert recenter(Polynomial([5]), 0, 3 - 2j) == Polynomial([5])
    assert recenter(Polynomial([0, 0, 1]), 0, 1) == Polynomial([1, 2, 1])


def test_json_round_trip():
    p = Polynomial([1, 2j, -3.5])
    assert poly_from_json(poly_to_json(p)) == p
    r = RationalFunction(Polynomial([1, 1j]), Polynomial([1, -0.5]))
    back = rational_from_json(rational_to_json(r))
    assert back.numerator == r.numerator and back.denominator == r.denominator
    f = FormalPowerSeries([1, 2, 3], center=1j)
    g = series_from_json(series_to_json(f))
    assert np.array_equal(g.coeffs, f.coeffs) and g.center == 1j
    assert poly_from_json([1, [0, 2]]) == Polynomial([1, 2j])


@given(coeff_lists(), coeff_lists())
def test_mul_commutes(a, b):
    pa, pb = Polynomial(a), Polynomial(b)
    assert coeff_rel_error((pa * pb).coeffs, (pb * pa).coeffs) <= 1e-12


@given(coeff_lists(max_size=5), coeff_lists(max_size=5), coeff_lists(max_size=5))
def test_mul_associates(a, b, c):
    pa, pb, pc = Polynomial(a), Polynomial(b), Polynomial(c)
    lhs, rhs = (pa * pb) * pc, pa * (pb * pc)
    scale = np.abs(np.convolve(np.convolve(np.abs(a), np.abs(b)), np.abs(c))).max()
    assume(scale > 0)
    n = max(lhs.coeffs.size, rhs.coeffs.size)
    assert np.abs(lhs.padded(n) - rhs.padded(n)).max() <= 1e-12 * scale


@given(coeff_lists())
def test_add_zero_and_scale_are_exact(a):
    p = Polynomial.exact(a)
    assert np.array_equal(poly_add(p, Polynomial.zero()).coeffs, Polynomial(a).coeffs)
    assert np.array_equal(poly_scale(p, 2.0).coeffs, Polynomial(a * 2.0).coeffs)


@given(coeff_lists(max_size=6), cplx.filter(lambda w: abs(w) < 3))
def test_recenter_round_trip(a, w):
    p = Polynomial(a)
    assume(not p.is_zero)
    back = recenter(recenter(p, 0, w), w, 0)
    n = max(back.coeffs.size, p.coeffs.size)
    ref = np.abs(p.coeffs).max() * (1 + abs(w)) ** (2 * n)
    assert np.abs(back.padded(n) - p.padded(n)).max() <= 1e-10 * ref


@given(coeff_lists(max_size=4), coeff_lists(min_size=2, max_size=4), st.integers(4, 12), st.integers(0, 4))
def test_series_truncation_is_consistent(num, den, n, cut):
    assume(abs(den[0]) > 0.1)
    r = RationalFunction(Polynomial.exact(num) if np.any(num) else Polynomial([1.0]), Polynomial.exact(den))
    long = series_of_rational(r, n).coeffs
    short = series_of_rational(r, n - cut).coeffs
    assert np.array_equal(long[: short.size], short)


@given(coeff_lists(max_size=5), cplx)
def test_recentered_polynomial_agrees_pointwise(a, w):
    p = Polynomial(a)
    q = recenter(p, 0, w)
    z = 0.3 - 0.2j
    ref = 1 + np.abs(a).sum() * (1 + abs(z) + abs(w)) ** a.size
    assert abs(q(z - w) - p(z)) <= 1e-10 * ref
