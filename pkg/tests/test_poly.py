"""Tests for basis enumeration and polynomial operations in `services/poly.py`."""
from fractions import Fraction

import numpy as np
import pytest

from core.exceptions import (
    ExpressionSyntaxError,
    OrderingMismatchError,
    UnknownVariableError,
    ValidationError,
    ZeroDenominatorError,
    ZeroPolynomialError,
)
from services.poly import (
    BasisOrdering,
    Poly,
    enumerate_basis,
    evaluate,
    leading_index,
    parse_poly,
    poly_arith,
    serialize,
    substitute_t,
)
from services.scalar import FieldDesc

Q = FieldDesc.rationals()
UNCAPPED = BasisOrdering(1, 0, True)
CAPPED = BasisOrdering(1, 0, True, t_cap=1)


def names(ordering, monos):
    return [Poly.monomial(m, ordering, Q).serialize() for m in monos]


def test_enumeration_unbounded_t():
    assert names(UNCAPPED, enumerate_basis(UNCAPPED, 10)) == [
        "1", "x1", "t", "x1^2", "x1*t", "t^2", "x1^3", "x1^2*t", "x1*t^2", "t^3",
    ]


def test_enumeration_capped_t_skips_higher_powers():
    assert names(CAPPED, enumerate_basis(CAPPED, 7)) == ["1", "x1", "t", "x1^2", "x1*t", "x1^3", "x1^2*t"]


def test_enumeration_without_x_variables():
    only_t = BasisOrdering(0, 0, True, t_cap=1)
    assert names(only_t, enumerate_basis(only_t, 2)) == ["1", "t"]
    assert len(enumerate_basis(only_t, 5)) == 2


def test_index_of_agrees_with_enumeration():
    joint = BasisOrdering(1, 1, True, t_cap=1)
    monos = enumerate_basis(joint, 30)
    assert all(joint.index_of(m) == i for i, m in enumerate(monos, start=1))
    assert joint.index_of((0, 2, 1)) == 16
    assert joint.index_of((2, 0, 1)) == 12
    assert BasisOrdering(1, 0, True, t_cap=2).index_of((0, 2)) == 6


def test_leading_index_examples():
    assert leading_index(parse_poly("t - x1", CAPPED, Q)) == 3
    assert leading_index(parse_poly("(1 + x1^2)*t - x1", CAPPED, Q)) == 7
    assert leading_index(Poly.constant(1, CAPPED, Q)) == 1
    with pytest.raises(ZeroPolynomialError):
        leading_index(Poly.zero(CAPPED, Q))


def test_evaluate_on_graph_points():
    assert evaluate(parse_poly("t - x1", CAPPED, Q), [5, 5]) == 0
    q = parse_poly("(1 + x1^2)*t - x1", CAPPED, Q)
    assert evaluate(q, [Fraction(1, 2), Fraction(2, 5)]) == 0
    assert evaluate(Poly.constant(1, CAPPED, Q), [3, 4]) == 1


def test_substitute_t_clears_the_denominator():
    x_plus_t = parse_poly("x1 + t", CAPPED, Q)
    num = parse_poly("x1", CAPPED, Q)
    den = parse_poly("1 + x1^2", CAPPED, Q)
    assert substitute_t(x_plus_t, num, den) == parse_poly("x1^3 + 2*x1", CAPPED, Q)
    assert substitute_t(parse_poly("t", CAPPED, Q), num, den) == num
    with pytest.raises(ZeroDenominatorError):
        substitute_t(x_plus_t, num, Poly.zero(CAPPED, Q))


def test_multiplying_by_zero():
    a = parse_poly("x1^2 + t", CAPPED, Q)
    assert poly_arith(a, Poly.zero(CAPPED, Q), "mul").is_zero()


def test_product_beyond_t_cap_is_rejected():
    t = parse_poly("t", CAPPED, Q)
    with pytest.raises(OrderingMismatchError):
        poly_arith(t, t, "mul")


def test_serialize_round_trip_and_canonical_text():
    q = parse_poly("t - x1", CAPPED, Q)
    assert serialize(q) == "t - x1"
    assert parse_poly(serialize(q), CAPPED, Q) == q
    assert serialize(Poly.zero(CAPPED, Q)) == "0"


def test_parse_expands_products():
    q = parse_poly("(1 + x1^2)*t - x1", CAPPED, Q)
    assert q.terms == {(2, 1): 1, (0, 1): 1, (1, 0): -1}
    assert serialize(q) == "x1^2*t + t - x1"


def test_parse_rational_coefficients_and_prime_display():
    assert parse_poly("3/4*x1 - 1/2", CAPPED, Q).coefficient((1, 0)) == Fraction(3, 4)
    f7 = FieldDesc.prime(7)
    assert serialize(parse_poly("t - 3*x1", CAPPED, f7)) == "t - 3*x1"


def test_parse_errors_report_position():
    with pytest.raises(ExpressionSyntaxError) as exc_info:
        parse_poly("x1 + * t", CAPPED, Q)
    assert exc_info.value.position == 5
    with pytest.raises(UnknownVariableError):
        parse_poly("x2 + t", CAPPED, Q)
    with pytest.raises(ValidationError):
        parse_poly("t / x1", CAPPED, Q)


def test_t_coefficients_split():
    joint = BasisOrdering(1, 1, True, t_cap=1)
    q = parse_poly("(1 + x1^2)*t - x1*y1", joint, Q)
    a0, a1 = q.t_coefficients(joint.without_t())
    assert a0 == parse_poly("-x1*y1", joint.without_t(), Q)
    assert a1 == parse_poly("1 + x1^2", joint.without_t(), Q)


def test_exact_division():
    ring = BasisOrdering(0, 1, has_t=False)
    a = parse_poly("y1^3 + 2*y1^2 + y1 + 2", ring, Q)
    b = parse_poly("y1^2 + 1", ring, Q)
    assert a.exact_div(b) == parse_poly("y1 + 2", ring, Q)
    with pytest.raises(ValidationError):
        a.exact_div(parse_poly("y1 + 5", ring, Q))


def test_content_and_monic():
    q = parse_poly("6/5*x1^2*t - 4/5*x1", CAPPED, Q)
    assert q.content() == Fraction(2, 5)
    assert q.monic().leading_coefficient() == 1
    assert q.monomial_content() == (1, 0)


F101 = FieldDesc.prime(101)
FREE_T = BasisOrdering(2, 0, True)


def random_poly(rng, ordering, field, size=12):
    coeffs = []
    for _ in range(size):
        if rng.random() < 0.4:
            coeffs.append(0)
        elif field.is_prime:
            coeffs.append(int(rng.integers(0, field.modulus)))
        else:
            coeffs.append(Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 6))))
    return Poly.from_coefficients(coeffs, ordering, field)


def random_point(rng, ordering, field):
    if field.is_prime:
        return [int(v) for v in rng.integers(0, field.modulus, size=ordering.num_vars)]
    return [Fraction(int(n), int(d)) for n, d in zip(rng.integers(-20, 21, size=ordering.num_vars),
                                                     rng.integers(1, 8, size=ordering.num_vars))]


@pytest.mark.parametrize("field", [Q, F101], ids=str)
def test_evaluation_is_a_ring_homomorphism(field):
    rng = np.random.default_rng(12)
    for _ in range(100):
        a, b = random_poly(rng, FREE_T, field), random_poly(rng, FREE_T, field)
        point = random_point(rng, FREE_T, field)
        va, vb = a.evaluate(point), b.evaluate(point)
        assert (a + b).evaluate(point) == field.add(va, vb)
        assert (a - b).evaluate(point) == field.sub(va, vb)
        assert (a * b).evaluate(point) == field.mul(va, vb)


@pytest.mark.parametrize("field", [Q, F101], ids=str)
@pytest.mark.parametrize("ordering", [FREE_T, CAPPED, BasisOrdering(1, 1, True, t_cap=1)], ids=["free", "capped", "joint"])
def test_serialize_parse_round_trip_on_random_polys(field, ordering):
    rng = np.random.default_rng(40)
    for _ in range(100):
        q = random_poly(rng, ordering, field, size=int(rng.integers(1, 20)))
        assert parse_poly(serialize(q), ordering, field) == q


@pytest.mark.parametrize(
    "ordering",
    [
        UNCAPPED,
        CAPPED,
        BasisOrdering(2, 0, True),
        BasisOrdering(2, 0, True, t_cap=2),
        BasisOrdering(3, 0, True, t_cap=1),
        BasisOrdering(1, 1, True, t_cap=1),
        BasisOrdering(2, 1, has_t=False),
    ],
    ids=str,
)
def test_enumeration_is_injective_and_degree_monotone(ordering):
    monos = enumerate_basis(ordering, 500)
    assert len(monos) == 500
    assert len(set(monos)) == 500
    degrees = [sum(m) for m in monos]
    assert degrees == sorted(degrees)
    assert all(ordering.is_admissible(m) for m in monos)


@pytest.mark.parametrize("ordering", [UNCAPPED, CAPPED, BasisOrdering(2, 1, True, t_cap=1)], ids=str)
def test_leading_index_of_basis_monomials(ordering):
    one = Poly.constant(1, ordering, Q)
    for i, mono in enumerate(enumerate_basis(ordering, 200), start=1):
        e_i = Poly.monomial(mono, ordering, Q)
        assert leading_index(e_i) == i
        assert leading_index(e_i + one) == i
