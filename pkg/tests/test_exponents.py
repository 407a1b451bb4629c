from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from curveavg.curves import moment_curve, parse_curve
from curveavg.exponents import (CRITICAL_BOUNDARY, OUTSIDE, SUBCRITICAL,
                                SUPERCRITICAL, ExponentPair, classify_by_degree,
                                classify_exponents, conjectured_constant,
                                critical_exponent, critical_vertex)


def test_critical_exponent_values():
    assert critical_exponent(parse_curve("n^2")) == Fraction(3, 2)
    assert critical_exponent(moment_curve(2)) == Fraction(5, 3)
    assert critical_exponent(moment_curve(3)) == Fraction(11, 6)


def test_exponent_pair_derived_quantities():
    e = ExponentPair(Fraction(2, 3), Fraction(1, 3))
    assert e.inv_r == Fraction(1, 3)
    assert e.inv_p_dual == Fraction(1, 3)
    assert e.inv_q_dual == Fraction(2, 3)
    with pytest.raises(ValueError):
        ExponentPair(Fraction(3, 2), Fraction(1, 2))


def test_classification_examples():
    g3 = moment_curve(2)  # D = 3
    assert classify_exponents(g3, ExponentPair(Fraction(1, 2), Fraction(1, 2))) \
        == SUPERCRITICAL
    vx = critical_vertex(3)
    assert classify_exponents(g3, ExponentPair(*vx)) == CRITICAL_BOUNDARY
    assert classify_exponents(g3, ExponentPair(1, 0)) == SUBCRITICAL
    assert classify_exponents(g3, ExponentPair(Fraction(1, 3), Fraction(2, 3))) \
        == OUTSIDE


def test_vertex_lies_on_both_critical_lines():
    for D in (2, 3, 6, 10):
        ip, iq = critical_vertex(D)
        assert D * iq == (D - 1) * ip
        assert D * (1 - ip) == (D - 1) * (1 - iq)


fractions_01 = st.fractions(min_value=0, max_value=1, max_denominator=12)


@given(fractions_01, fractions_01, st.integers(2, 8))
def test_classification_is_self_dual(ip, iq, D):
    e = ExponentPair(ip, iq)
    assert classify_by_degree(D, e) == classify_by_degree(D, e.dual())


def test_conjectured_constant_at_one():
    c = moment_curve(2)
    e = ExponentPair(Fraction(2, 3), Fraction(1, 3))
    assert conjectured_constant(c, e, 1) == pytest.approx(3.0)


def test_conjectured_constant_on_diagonal():
    c = moment_curve(2)
    e = ExponentPair(Fraction(1, 2), Fraction(1, 2))
    N = 16
    val = conjectured_constant(c, e, N)
    assert val == pytest.approx(1.0 + N ** -0.5 + N ** -0.5)


def test_conjectured_constant_direct_arithmetic():
    c = moment_curve(2)  # D = 3
    e = ExponentPair.from_p_q(Fraction(3, 2), 3)
    val = conjectured_constant(c, e, 64)
    assert val == pytest.approx(64 ** -1.0 + 64 ** (-2 / 3) + 64 ** (-2 / 3))


@given(fractions_01, fractions_01)
def test_conjectured_constant_monotone_in_N(ip, iq):
    if iq > ip:
        return
    c = moment_curve(2)
    e = ExponentPair(ip, iq)
    vals = [conjectured_constant(c, e, N) for N in (1, 2, 4, 8, 16)]
    assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))
