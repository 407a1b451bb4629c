import random

import pytest
from hypothesis import given, strategies as st

from curveavg.polynomials import (ALL_INTEGERS, IntPoly, PolyParseError, divisors,
                                  integer_roots, parse_poly, poly_to_text)


def test_parse_single_monomial():
    assert parse_poly("n^2").coeffs == (0, 0, 1)


def test_parse_zero():
    assert parse_poly("0").is_zero()
    assert parse_poly("0").coeffs == ()


def test_parse_direct_reading():
    assert parse_poly("2n^3-n").coeffs == (0, -1, 0, 2)


def test_parse_tolerates_whitespace_and_star():
    assert parse_poly(" 2*n^3 - n + 5 ").coeffs == (5, -1, 0, 2)


@pytest.mark.parametrize("bad", ["", "2x", "n^", "--n", "1.5n", "3 4", "+"])
def test_parse_errors_carry_position(bad):
    with pytest.raises(PolyParseError) as err:
        parse_poly(bad)
    assert err.value.position >= 0


coeff_lists = st.lists(st.integers(-50, 50), min_size=0, max_size=6)


@given(coeff_lists)
def test_print_parse_roundtrip(coeffs):
    p = IntPoly(coeffs)
    assert parse_poly(poly_to_text(p)) == p


@given(coeff_lists, st.integers(-30, 30))
def test_horner_matches_power_expansion(coeffs, n):
    p = IntPoly(coeffs)
    # independent oracle: explicit powers, no Horner
    expected = sum(c * n ** i for i, c in enumerate(p.coeffs))
    assert p(n) == expected


@given(coeff_lists, coeff_lists, st.integers(-10, 10))
def test_ring_operations_agree_with_evaluation(a, b, n):
    pa, pb = IntPoly(a), IntPoly(b)
    assert (pa + pb)(n) == pa(n) + pb(n)
    assert (pa - pb)(n) == pa(n) - pb(n)
    assert (pa * pb)(n) == pa(n) * pb(n)


def test_compose_is_substitution():
    p = parse_poly("n^2+1")
    inner = parse_poly("n-3")
    q = p.compose(inner)
    for n in range(-5, 6):
        assert q(n) == p(n - 3)


def test_divisors_of_12():
    assert divisors(12) == [1, 2, 3, 4, 6, 12]


def test_divisors_of_prime():
    assert divisors(97) == [1, 97]
    assert divisors(-97) == [1, 97]


def test_divisors_rejects_zero():
    with pytest.raises(ValueError):
        divisors(0)


def test_divisor_counts_match_sieve():
    # sieve oracle up to 1e6; full trial-division comparison up to 1e4,
    # then a fixed random sample of larger n
    import numpy as np

    limit = 10 ** 6
    tau = np.zeros(limit + 1, dtype=np.int32)
    for d in range(1, limit + 1):
        tau[d::d] += 1
    for n in range(1, 10 ** 4 + 1):
        assert len(divisors(n)) == tau[n]
    rng = random.Random(12345)
    for n in rng.sample(range(10 ** 4 + 1, limit + 1), 200):
        assert len(divisors(n)) == tau[n]


def brute_roots(p: IntPoly, lo: int, hi: int):
    return [n for n in range(lo, hi + 1) if p(n) == 0]


@given(coeff_lists, st.integers(-20, 0), st.integers(1, 20))
def test_integer_roots_match_brute_scan(coeffs, lo, hi):
    p = IntPoly(coeffs)
    got = integer_roots(p, lo, hi)
    if got == ALL_INTEGERS:
        assert p.is_zero()
    else:
        assert got == brute_roots(p, lo, hi)


def test_integer_roots_zero_polynomial_sentinel():
    assert integer_roots(IntPoly(()), -3, 3) == ALL_INTEGERS
