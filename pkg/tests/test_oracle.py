"""Tests for expression parsing, oracles and samplers in `services/oracle.py`."""
import random
from fractions import Fraction

import numpy as np
import pytest

from core.exceptions import ArityMismatchError, ExpressionSyntaxError, UnknownVariableError
from services.expression import BinOp, Const, Neg, Pow, Var
from services.oracle import (
    ExpressionOracle,
    SampleTable,
    Sampler,
    SliceOracle,
    TableOracle,
    draw,
    eval_oracle,
    parse_expression,
    pythagorean_points,
)
from services.scalar import FieldDesc, Scalar

Q = FieldDesc.rationals()
FP = FieldDesc.prime(2147483647)


def test_parse_two_argument_expression():
    ast = parse_expression("x1*y1/(1+x1^2)", 1, 1, Q)
    assert isinstance(ast, BinOp) and ast.op == "/"


def test_unknown_variable_outside_arity():
    with pytest.raises(UnknownVariableError):
        parse_expression("x2", 1, 0, Q)
    with pytest.raises(UnknownVariableError):
        parse_expression("t + x1", 1, 0, Q)


def test_syntax_error_has_position():
    with pytest.raises(ExpressionSyntaxError) as exc_info:
        parse_expression("x1 + (y1", 1, 1, Q)
    assert exc_info.value.position == 8


def test_eval_oracle_examples():
    f = ExpressionOracle.from_text("x1/(1+x1^2)", 1, 0, Q)
    assert eval_oracle(f, [Fraction(1, 2)]) == Fraction(2, 5)
    assert eval_oracle(ExpressionOracle.from_text("1/x1", 1, 0, Q), [0]) is None
    with pytest.raises(ArityMismatchError):
        f.evaluate([1, 2])


def test_table_lookup_semantics():
    table = SampleTable(2, 0, Q, (((Fraction(1), Fraction(1)), Fraction(7)),))
    oracle = TableOracle(table)
    assert eval_oracle(oracle, [1, 1]) == 7
    assert eval_oracle(oracle, [0, 0]) is None


def test_sqrt_is_partial_over_rationals_and_canonical_mod_p():
    f_q = ExpressionOracle.from_text("sqrt(x1^2+1)", 1, 0, Q)
    assert f_q.evaluate([Fraction(3, 4)]) == Fraction(5, 4)
    assert f_q.evaluate([2]) is None
    f_p = ExpressionOracle.from_text("sqrt(x1^2+1)", 1, 0, FP)
    defined = [v for v in (f_p.evaluate([x]) for x in range(1, 40)) if v is not None]
    assert defined and all(v <= FP.modulus - v for v in defined)


def test_undefined_is_sticky():
    f = ExpressionOracle.from_text("(1/(x1 - 2))*0 + 5", 1, 0, Q)
    assert f.evaluate([2]) is None
    assert f.evaluate([3]) == 5


def _random_ast(rng, depth):
    if depth == 0 or rng.random() < 0.3:
        return Var("x", 1) if rng.random() < 0.5 else Const(rng.randint(0, 9))
    kind = rng.choice(["+", "-", "*", "/", "^", "neg"])
    if kind == "^":
        return Pow(_random_ast(rng, depth - 1), rng.randint(0, 3))
    if kind == "neg":
        return Neg(_random_ast(rng, depth - 1))
    return BinOp(kind, _random_ast(rng, depth - 1), _random_ast(rng, depth - 1))


def _direct(node, x):
    """Composition of Scalar operations; None for undefined."""
    if isinstance(node, Const):
        return Scalar(node.value, Q)
    if isinstance(node, Var):
        return x
    if isinstance(node, Neg):
        v = _direct(node.operand, x)
        return None if v is None else -v
    if isinstance(node, Pow):
        v = _direct(node.base, x)
        return None if v is None else v ** node.exponent
    left, right = _direct(node.left, x), _direct(node.right, x)
    if left is None or right is None:
        return None
    if node.op == "/":
        return None if not right else left / right
    return {"+": left + right, "-": left - right, "*": left * right}[node.op]


def test_evaluation_agrees_with_scalar_composition():
    rng = random.Random(6)
    for _ in range(200):
        ast = _random_ast(rng, 6)
        oracle = ExpressionOracle(ast, 1, 0, Q)
        x = Scalar(Fraction(rng.randint(-5, 5), rng.randint(1, 4)), Q)
        expected = _direct(ast, x)
        got = eval_oracle(oracle, [x])
        assert got == expected


def test_slice_oracles_fix_one_side():
    f = ExpressionOracle.from_text("x1 - 2*y1", 1, 1, Q)
    assert SliceOracle(f, fixed_y=(3,)).evaluate([10]) == 4
    assert SliceOracle(f, fixed_x=(10,)).evaluate([3]) == 4
    assert SliceOracle(f, fixed_y=(3,)).arity == 1


def test_grid_sampler_enumerates_in_fixed_order():
    points = draw(Sampler.grid(2, -2, 2), np.random.default_rng(0), 25, Q)
    assert len(points) == 25 and len(set(points)) == 25
    assert points[0] == (-2, -2) and points[-1] == (2, 2)


def test_uniform_sampler_is_reproducible():
    sampler = Sampler.uniform(1, 10)
    a = draw(sampler, np.random.default_rng(4), 30, Q)
    b = draw(sampler, np.random.default_rng(4), 30, Q)
    assert a == b
    assert all(-10 <= p[0] <= 10 for p in a)


def test_list_sampler_returns_the_list():
    pts = pythagorean_points(3, Q)
    assert pts == [(0,), (Fraction(3, 4),), (Fraction(4, 3),)]
    assert draw(Sampler.from_points(pts), np.random.default_rng(0), 3, Q) == pts


def test_pythagorean_points_make_sqrt_rational():
    f = ExpressionOracle.from_text("sqrt(x1^2+1)", 1, 0, Q)
    points = draw(Sampler.pythagorean(1, 1000), np.random.default_rng(1), 20, Q)
    assert all(f.evaluate(p) is not None for p in points)
