from fractions import Fraction
from math import factorial

import pytest
from hypothesis import given, settings, strategies as st

from shimlift.gkz import form_with_pole
from shimlift.qexact import QExpansion
from shimlift.raising import (AHSeries, alt_binomial_sum, delta_op, delta_power,
                              delta_power_closed, laplacian, lower_op, lowering_scalar)
from shimlift.weil import WeightMismatch, plus_to_vv


def mono(n, k, weight, c=1):
    return AHSeries(0, Fraction(weight), {0: {(n, k): Fraction(c)}})


def test_delta_monomial():
    l = Fraction(-3, 2)
    out = delta_op(l, mono(5, 0, l))
    assert out == AHSeries(0, l + 2, {0: {(5, 0): 5, (5, 1): -l}})
    assert delta_op(0, mono(0, 0, 0)).is_zero()


def test_delta_checks_weight():
    with pytest.raises(WeightMismatch):
        delta_op(2, mono(1, 0, 0))


def test_example_coefficients():
    # m = 2, b = 1 on q^-3: depth coefficients 9, -3, 3/4
    F = mono(-3, 0, Fraction(-3, 2))
    closed = delta_power_closed(2, F, 1)
    assert closed.comps[0] == {(-3, 0): 9, (-3, 1): -3, (-3, 2): Fraction(3, 4)}
    assert closed == delta_power(2, F)


def test_lowering():
    assert lower_op(mono(4, 0, 2)).is_zero()
    assert lower_op(mono(4, 1, 2)) == mono(4, 0, 0)
    assert lower_op(lower_op(mono(4, 2, 2))) == mono(4, 0, -2, 2)


def test_laplacian_conventions():
    assert laplacian(Fraction(-3, 2), mono(7, 0, Fraction(-3, 2))).is_zero()
    # Delta_k = -delta_(k-2) L~, so Delta_k(q^n w) = -(n q^n - (k-2) q^n w)
    k, n = Fraction(5, 2), 3
    assert laplacian(k, mono(n, 1, k)) == AHSeries(0, k, {0: {(n, 0): -n, (n, 1): k - 2}})


def test_eigenvalue_on_worked_example():
    g = plus_to_vv(form_with_pole(2, 3, 12))
    F = delta_power_closed(2, g, 1)
    assert F.weight == Fraction(5, 2)
    assert laplacian(F.weight, F) == F.scale(-1)


def test_lowering_scalar_identity():
    g = AHSeries.from_vv(plus_to_vv(form_with_pole(2, 3, 12)))
    for m in (1, 2):
        h = AHSeries(g.N, 1 - Fraction(1, 2) - m, g.comps, g.den)
        assert lower_op(delta_power(m, h)) == delta_power(m - 1, h).scale(lowering_scalar(m, 1))


terms = st.dictionaries(st.integers(-20, 40), st.fractions(max_denominator=30).filter(bool),
                        min_size=1, max_size=8)


@settings(max_examples=100, deadline=None)
@given(terms, st.integers(0, 6), st.integers(1, 3), st.integers(1, 4))
def test_closed_form_matches_iteration(t, m, b, den):
    weight = 1 - Fraction(b, 2) - m
    F = AHSeries(0, weight, {0: {(e, 0): v for e, v in t.items()}}, den)
    assert delta_power_closed(m, F, b) == delta_power(m, F)


@pytest.mark.parametrize("b", [1, 2, 3])
@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_eigenvalue(m, b):
    F = AHSeries(0, 1 - Fraction(b, 2) - m, {0: {(-3, 0): 1, (0, 0): 5, (2, 0): -7}})
    D = delta_power(m, F)
    assert laplacian(D.weight, D) == D.scale(Fraction(-m * b, 2))


def test_json_roundtrip():
    F = delta_power(2, mono(-3, 0, Fraction(-3, 2)))
    assert AHSeries.from_json(F.to_json()) == F


def test_depth_bound():
    with pytest.raises(ValueError):
        AHSeries(0, 0, {0: {(1, 3): 1}}, k_max=2)


def test_from_series():
    s = QExpansion({-1: 1, 2: 3})
    F = AHSeries.from_series(s, 4)
    assert F.depth == 0 and F.slice(0) == {0: {Fraction(-1): 1, Fraction(2): 3}}


def test_alt_binomial_examples():
    assert alt_binomial_sum([1], 1) == 0
    assert alt_binomial_sum([0, 7, 0, 1], 5) == 0
    assert alt_binomial_sum([0, 0, 0, 0, 1], 4) == factorial(4)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 30).flatmap(
    lambda C: st.tuples(st.just(C), st.lists(st.integers(-10**6, 10**6), min_size=1, max_size=C))))
def test_alt_binomial_vanishes(data):
    C, p = data
    assert alt_binomial_sum(p, C) == 0
