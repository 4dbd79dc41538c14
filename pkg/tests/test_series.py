"""Core series arithmetic: examples against dense oracles, laws via hypothesis."""

from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from segre import (
    CompositionError,
    FormalMap,
    GaussianRational,
    I,
    SeriesError,
    TruncatedSeries,
    gauss,
    series_match,
)

from oracles import (
    d_add,
    d_compose,
    d_diff,
    d_mul,
    d_truncate,
    from_series,
    to_series,
)


def ts(arity, kappa, terms):
    return TruncatedSeries(arity, kappa, terms)


def var(arity, kappa, index):
    return TruncatedSeries.variable(arity, kappa, index)


# ---------------------------------------------------------------------------
# gaussian rationals
# ---------------------------------------------------------------------------


def test_gaussian_rational_field_ops():
    a = gauss(Fraction(1, 2), Fraction(3, 4))
    b = gauss(2, -1)
    assert a + b == gauss(Fraction(5, 2), Fraction(-1, 4))
    assert a * b == gauss(Fraction(7, 4), 1)
    assert (a / b) * b == a
    assert I * I == gauss(-1)
    assert a.conjugate().conjugate() == a
    with pytest.raises(ZeroDivisionError):
        a / gauss(0)


# ---------------------------------------------------------------------------
# add
# ---------------------------------------------------------------------------


def test_add_inverse_cancels():
    x1 = var(1, 4, 0)
    assert (x1 + (-x1)).is_zero()


def test_add_exact_rationals():
    half = ts(2, 4, {(1, 1): gauss(Fraction(1, 2))})
    assert half + half == ts(2, 4, {(1, 1): 1})


def test_add_mixed_orders_against_dense_oracle():
    a = ts(2, 2, {(3, 0): 1})  # the cube is already absent at order 2
    b = ts(2, 5, {(0, 1): 1})
    expected = d_truncate(d_add(from_series(a), from_series(b)), 2)
    result = a + b
    assert result.kappa == 2
    assert result == to_series(expected, 2, 2)
    assert result == ts(2, 2, {(0, 1): 1})


def test_add_arity_mismatch():
    with pytest.raises(SeriesError):
        var(1, 3, 0) + var(2, 3, 0)


# ---------------------------------------------------------------------------
# mul
# ---------------------------------------------------------------------------


def test_mul_difference_of_squares():
    one = TruncatedSeries.constant(1, 3, 1)
    x = var(1, 3, 0)
    assert (one + x) * (one - x) == ts(1, 3, {(0,): 1, (2,): -1})


def test_mul_imaginary_unit():
    i_const = TruncatedSeries.constant(1, 2, I)
    assert i_const * i_const == TruncatedSeries.constant(1, 2, -1)


def test_mul_square_against_dense_oracle():
    f = var(2, 2, 0) + var(2, 2, 1)
    expected = d_truncate(d_mul(from_series(f), from_series(f)), 2)
    assert f * f == to_series(expected, 2, 2)
    assert f * f == ts(2, 2, {(2, 0): 1, (1, 1): 2, (0, 2): 1})


# ---------------------------------------------------------------------------
# compose
# ---------------------------------------------------------------------------


def test_compose_square_of_sum_against_dense_oracle():
    f = ts(1, 4, {(2,): 1})  # y1^2
    g = FormalMap([var(2, 4, 0) + var(2, 4, 1)])
    expected = d_truncate(
        d_compose(from_series(f), [from_series(c) for c in g.components], 2), 4
    )
    assert f.compose(g) == to_series(expected, 2, 4)
    assert f.compose(g) == ts(2, 4, {(2, 0): 1, (1, 1): 2, (0, 2): 1})


def test_compose_identity_is_identity():
    f = ts(3, 5, {(1, 2, 0): gauss(2, 1), (0, 0, 3): gauss(Fraction(-1, 3))})
    assert f.compose(FormalMap.identity(3, 5)) == f


def test_compose_annihilates_on_zero_component():
    f = ts(2, 4, {(1, 1): 1})  # y1*y2
    g = FormalMap([var(1, 4, 0), TruncatedSeries.zero(1, 4)])
    assert f.compose(g).is_zero()


def test_compose_requires_vanishing_inner():
    f = var(1, 4, 0)
    inner = FormalMap([TruncatedSeries.constant(1, 4, 1)], vanishes_at_origin=False)
    with pytest.raises(CompositionError):
        f.compose(inner)


# ---------------------------------------------------------------------------
# partial derivatives
# ---------------------------------------------------------------------------


def test_partial_basic():
    f = ts(2, 5, {(2, 1): 1})  # x1^2 x2
    assert f.partial(0) == ts(2, 4, {(1, 1): 2})


def test_partial_unrelated_variable():
    f = ts(2, 5, {(3, 0): 1})
    assert f.partial(1).is_zero()


def test_partial_order_drop_against_dense_oracle():
    f = ts(2, 5, {(1, 1): gauss(0, 2)})  # 2i x1 x2
    expected = d_diff(from_series(f), 0)
    result = f.partial(0)
    assert result.kappa == 4
    assert result == to_series(expected, 2, 4)
    assert result == ts(2, 4, {(0, 1): gauss(0, 2)})


def test_partial_index_out_of_range():
    with pytest.raises(SeriesError):
        var(2, 3, 0).partial(2)


# ---------------------------------------------------------------------------
# sigma
# ---------------------------------------------------------------------------


def test_sigma_swaps_blocks():
    # ambient layout (z1, w1, ch1, ta1): sigma(w1) = ta1
    w1 = var(4, 4, 1)
    ta1 = var(4, 4, 3)
    assert w1.sigma(2) == ta1
    assert (w1 - ta1).sigma(2) == -(w1 - ta1)


def test_sigma_conjugates_and_relabels():
    # sigma(2i z1 ch1) swaps z and ch (same monomial) and conjugates: -2i z1 ch1
    f = ts(4, 4, {(1, 0, 1, 0): gauss(0, 2)})
    assert f.sigma(2) == ts(4, 4, {(1, 0, 1, 0): gauss(0, -2)})


def test_sigma_requires_block_split():
    with pytest.raises(SeriesError):
        var(3, 3, 0).sigma(2)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def test_evaluate_examples():
    f = var(2, 3, 0) + var(2, 3, 1)
    assert f.evaluate([gauss(1), gauss(2)]) == gauss(3)
    g = ts(1, 3, {(1,): I})
    assert g.evaluate([I]) == gauss(-1)
    h = ts(2, 3, {(2, 0): 1, (0, 1): -1})
    assert h.evaluate([gauss(Fraction(3, 2)), gauss(Fraction(9, 4))]) == gauss(0)


def test_evaluate_length_mismatch():
    with pytest.raises(SeriesError):
        var(2, 3, 0).evaluate([gauss(1)])


# ---------------------------------------------------------------------------
# property tests
# ---------------------------------------------------------------------------

small_coeff = st.builds(
    GaussianRational,
    st.fractions(min_value=-3, max_value=3, max_denominator=4),
    st.fractions(min_value=-3, max_value=3, max_denominator=4),
)


def series_strategy(arity: int, kappa: int):
    exponents = st.tuples(*([st.integers(min_value=0, max_value=kappa)] * arity)).filter(
        lambda e: sum(e) <= kappa
    )
    return st.dictionaries(exponents, small_coeff, max_size=4).map(
        lambda terms: TruncatedSeries(arity, kappa, terms)
    )


@settings(max_examples=60, deadline=None)
@given(series_strategy(2, 4), series_strategy(2, 4), series_strategy(2, 4))
def test_ring_laws(a, b, c):
    assert a + b == b + a
    assert (a + b) + c == a + (b + c)
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@settings(max_examples=60, deadline=None)
@given(series_strategy(2, 5), series_strategy(2, 5), st.integers(min_value=0, max_value=5))
def test_truncation_is_ring_homomorphism(a, b, kappa):
    assert (a * b).truncate(kappa) == a.truncate(kappa) * b.truncate(kappa)
    assert (a + b).truncate(kappa) == a.truncate(kappa) + b.truncate(kappa)


@settings(max_examples=40, deadline=None)
@given(series_strategy(2, 4), series_strategy(2, 4), series_strategy(3, 4), series_strategy(3, 4))
def test_compose_is_ring_homomorphism(f, g, h1, h2):
    inner = FormalMap(
        [
            h1 - TruncatedSeries.constant(3, 4, h1.constant_term()),
            h2 - TruncatedSeries.constant(3, 4, h2.constant_term()),
        ]
    )
    assert (f * g).compose(inner) == f.compose(inner) * g.compose(inner)
    assert (f + g).compose(inner) == f.compose(inner) + g.compose(inner)


@settings(max_examples=60, deadline=None)
@given(series_strategy(4, 4))
def test_sigma_involution_and_multiplicativity(f):
    assert f.sigma(2).sigma(2) == f


@settings(max_examples=40, deadline=None)
@given(series_strategy(4, 4), series_strategy(4, 4))
def test_sigma_multiplicative(f, g):
    assert (f * g).sigma(2) == f.sigma(2) * g.sigma(2)


@settings(max_examples=40, deadline=None)
@given(
    series_strategy(2, 8),
    series_strategy(1, 8),
    series_strategy(1, 8),
    st.lists(small_coeff, min_size=1, max_size=1),
)
def test_evaluate_commutes_with_compose_on_polynomials(f, g1, g2, point):
    # keep total degrees inside the truncation order so nothing is cut off
    f_low = TruncatedSeries(2, 8, {e: c for e, c in f.terms.items() if sum(e) <= 2})
    g1_low = TruncatedSeries(
        1, 8, {e: c for e, c in g1.terms.items() if 1 <= sum(e) <= 2}
    )
    g2_low = TruncatedSeries(
        1, 8, {e: c for e, c in g2.terms.items() if 1 <= sum(e) <= 2}
    )
    inner = FormalMap([g1_low, g2_low])
    composed = f_low.compose(inner)
    direct = f_low.evaluate([g1_low.evaluate(point), g2_low.evaluate(point)])
    assert composed.evaluate(point) == direct


# ---------------------------------------------------------------------------
# structure helpers
# ---------------------------------------------------------------------------


def test_strict_equality_includes_order():
    assert ts(1, 3, {(1,): 1}) != ts(1, 5, {(1,): 1})
    assert series_match(ts(1, 3, {(1,): 1}), ts(1, 5, {(1,): 1}))


def test_constructor_truncates_and_drops_zeros():
    f = ts(2, 2, {(3, 0): 1, (1, 0): 0, (0, 1): 2})
    assert f.terms == {(0, 1): gauss(2)}


def test_map_vars_identifies_variables():
    # x1*x2 with both variables sent to y1 becomes y1^2
    f = ts(2, 4, {(1, 1): 1})
    assert f.map_vars(1, [0, 0]) == ts(1, 4, {(2,): 1})
    # sending a variable to None kills monomials containing it
    assert f.map_vars(1, [0, None]).is_zero()


def test_leading_term_is_graded_lex_minimal():
    f = ts(2, 4, {(0, 2): 1, (1, 0): 2, (0, 1): 3})
    exp, coeff = f.leading_term()
    assert exp == (0, 1) and coeff == gauss(3)
