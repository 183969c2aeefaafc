"""Tests for exact field arithmetic in `services/scalar.py`."""
from collections import Counter
from fractions import Fraction
from math import gcd

import numpy as np
import pytest

from core.exceptions import DivisionByZeroError, FieldMismatchError, ValidationError, WrongFieldError
from services.scalar import FieldDesc, Scalar, arith, random_scalar, sqrt_mod_p

Q = FieldDesc.rationals()
F7 = FieldDesc.prime(7)
F13 = FieldDesc.prime(13)


def test_rational_addition_is_exact():
    assert arith(Scalar(Fraction(1, 2), Q), Scalar(Fraction(1, 3), Q), "add") == Fraction(5, 6)


def test_subtracting_itself_gives_zero():
    x = Scalar(Fraction(-17, 9), Q)
    assert arith(x, x, "sub") == 0
    assert not arith(x, x, "sub")


def test_prime_field_division_matches_brute_force():
    result = arith(Scalar(3, F7), Scalar(5, F7), "div")
    assert result == 2
    assert [r for r in range(7) if r * 5 % 7 == 3] == [result.value]


def test_division_by_zero_raises():
    with pytest.raises(DivisionByZeroError):
        arith(Scalar(1, Q), Scalar(0, Q), "div")
    with pytest.raises(ZeroDivisionError):
        Scalar(4, F7) / 0


def test_mixing_fields_raises():
    with pytest.raises(FieldMismatchError):
        arith(Scalar(1, F7), Scalar(1, F13), "add")


def test_sqrt_mod_p_canonical_roots():
    assert sqrt_mod_p(Scalar(4, F13)) == 2
    assert sqrt_mod_p(Scalar(5, F13)) is None
    assert sqrt_mod_p(Scalar(10, F13)) == 6
    assert sqrt_mod_p(Scalar(0, F13)) == 0


def test_sqrt_mod_p_non_residues_match_enumeration():
    squares = {r * r % 13 for r in range(13)}
    for a in range(13):
        root = sqrt_mod_p(Scalar(a, F13))
        assert (root is not None) == (a in squares)
        if root is not None:
            assert root.value <= 13 - root.value or root.value == 0
            assert root.value ** 2 % 13 == a


def test_sqrt_mod_p_rejects_rationals():
    with pytest.raises(WrongFieldError):
        sqrt_mod_p(Scalar(4, Q))


def test_rational_sqrt_only_for_perfect_squares():
    assert Q.sqrt(Fraction(25, 16)) == Fraction(5, 4)
    assert Q.sqrt(Fraction(2)) is None
    assert Q.sqrt(Fraction(-4)) is None


def test_random_scalar_is_reproducible():
    a = [random_scalar(np.random.default_rng(11), Q, 10) for _ in range(1)]
    rng1, rng2 = np.random.default_rng(11), np.random.default_rng(11)
    seq1 = [random_scalar(rng1, Q, 10) for _ in range(20)]
    seq2 = [random_scalar(rng2, Q, 10) for _ in range(20)]
    assert seq1 == seq2
    assert seq1[0] == a[0]
    assert all(-10 <= s.value <= 10 for s in seq1)


def test_random_scalar_degenerate_range():
    rng = np.random.default_rng(0)
    assert all(random_scalar(rng, Q, 0) == 0 for _ in range(50))


def test_random_scalar_is_uniform_over_f5():
    rng = np.random.default_rng(2024)
    f5 = FieldDesc.prime(5)
    counts = Counter(random_scalar(rng, f5, 10).value for _ in range(10_000))
    sigma = (10_000 * 0.2 * 0.8) ** 0.5
    assert set(counts) == set(range(5))
    assert all(abs(c - 2000) <= 5 * sigma for c in counts.values())


def test_field_parse_and_validation():
    assert FieldDesc.parse("q") == Q
    assert FieldDesc.parse("fp:101") == FieldDesc.prime(101)
    assert FieldDesc.parse("fp").modulus == 2147483647
    with pytest.raises(ValidationError):
        FieldDesc.parse("fp:100")
    with pytest.raises(ValidationError):
        FieldDesc.parse("reals")


def test_value_text_round_trip():
    assert Q.parse_value("-3/4") == Fraction(-3, 4)
    assert Q.format_value(Fraction(-3, 4)) == "-3/4"
    assert F7.parse_value("-1") == 6
    with pytest.raises(ValidationError):
        Q.parse_value("1.5")


def test_fraction_converts_into_prime_field():
    assert F7.convert(Fraction(1, 2)) == 4
    with pytest.raises(DivisionByZeroError):
        F7.convert(Fraction(1, 7))


def _random_scalars(rng, field, count):
    if field.is_prime:
        return [Scalar(int(v), field) for v in rng.integers(0, field.modulus, size=count)]
    nums = rng.integers(-60, 61, size=count)
    dens = rng.integers(1, 61, size=count)
    return [Scalar(Fraction(int(n), int(d)), field) for n, d in zip(nums, dens)]


@pytest.mark.parametrize("field", [Q, FieldDesc.prime(1000003)], ids=str)
def test_field_axioms_on_random_triples(field):
    rng = np.random.default_rng(31)
    a_s, b_s, c_s = (_random_scalars(rng, field, 200) for _ in range(3))
    one = Scalar(1, field)
    for a, b, c in zip(a_s, b_s, c_s):
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a + b == b + a and a * b == b * a
        assert a + (-a) == 0
        if a:
            assert a * (one / a) == 1


@pytest.mark.parametrize("op", ["add", "sub", "mul", "div"])
def test_rational_results_stay_canonical(op):
    rng = np.random.default_rng(8)
    left, right = _random_scalars(rng, Q, 100), _random_scalars(rng, Q, 100)
    for a, b in zip(left, right):
        if op == "div" and not b:
            continue
        value = arith(a, b, op).value
        assert isinstance(value, Fraction)
        assert value.denominator > 0
        assert gcd(value.numerator, value.denominator) == 1


def test_prime_results_are_reduced_residues():
    f101 = FieldDesc.prime(101)
    rng = np.random.default_rng(9)
    for a, b in zip(_random_scalars(rng, f101, 100), _random_scalars(rng, f101, 100)):
        for op in ("add", "sub", "mul"):
            assert 0 <= arith(a, b, op).value < 101
