"""Tests for evaluation matrices, cofactors and c of a sample in `services/kernel.py`."""
import random
from fractions import Fraction

import numpy as np
import pytest

from core.exceptions import ShapeMismatchError
from services.kernel import (
    _FractionFreePrefix,
    EvalMatrix,
    GraphSample,
    build_matrix,
    c_of_sample,
    cofactor_relation,
    cofactor_vector,
    determinant,
    laplace_determinant,
    rank_kernel,
    relation_from_points,
    select_points,
)
from services.poly import BasisOrdering, Poly, parse_poly
from services.scalar import FieldDesc

Q = FieldDesc.rationals()
F101 = FieldDesc.prime(101)
CAPPED = BasisOrdering(1, 0, True, t_cap=1)


def sample(pairs, field=Q):
    return GraphSample.from_pairs([((x,), v) for x, v in pairs], field)


def test_build_matrix_examples():
    assert build_matrix(sample([(1, 1), (2, 2)]), CAPPED, 3).tolist() == [[1, 1, 1], [1, 2, 2]]
    assert build_matrix(sample([]), CAPPED, 3).shape == (0, 3)
    assert build_matrix(sample([(0, 0)]), CAPPED, 3).tolist() == [[1, 0, 0]]


def test_rank_kernel_examples():
    rank, kernel = rank_kernel(EvalMatrix.from_rows([[1, 1, 1], [1, 2, 2]], Q))
    assert rank == 2
    assert len(kernel) == 1
    assert kernel[0] in ([0, 1, -1], [0, -1, 1])

    rank, kernel = rank_kernel(EvalMatrix.from_rows([[1, 0, 0], [0, 1, 0], [0, 0, 1]], Q))
    assert (rank, kernel) == (3, [])

    rank, kernel = rank_kernel(EvalMatrix.from_rows([[0, 0, 0], [0, 0, 0]], Q))
    assert rank == 0 and len(kernel) == 3


def test_rank_kernel_vectors_are_exact_kernel_elements():
    rows = [[Fraction(1, 2), 3, Fraction(-2, 7), 1], [4, Fraction(5, 3), 0, 2]]
    mat = EvalMatrix.from_rows(rows, Q)
    rank, kernel = rank_kernel(mat)
    assert rank == 2 and len(kernel) == 2
    for v in kernel:
        assert all(sum(Fraction(a) * b for a, b in zip(row, v)) == 0 for row in rows)


def test_cofactor_vector_examples():
    assert cofactor_vector(EvalMatrix.from_rows([[1, 1, 1], [1, 2, 2]], Q)) == [0, 1, -1]
    assert cofactor_vector(EvalMatrix.from_rows([[3, 5]], Q)) == [-5, 3]
    assert cofactor_vector(EvalMatrix.from_rows([[1, 1, 1], [1, 1, 1]], Q)) == [0, 0, 0]
    with pytest.raises(ShapeMismatchError):
        cofactor_vector(EvalMatrix.from_rows([[1, 2], [3, 4]], Q))


def test_determinant_matches_laplace_over_both_fields():
    rng = random.Random(5)
    for field in (Q, F101):
        for size in range(1, 11):
            rows = [[field.convert(rng.randint(-9, 9)) for _ in range(size)] for _ in range(size)]
            assert determinant(rows, field) == laplace_determinant(rows, field)


def test_cofactors_match_the_kernel_on_random_matrices():
    rng = random.Random(17)
    for _ in range(200):
        n = rng.randint(2, 9)
        rows = [[rng.randrange(101) for _ in range(n)] for _ in range(n - 1)]
        if rng.random() < 0.25:
            rows[-1] = list(rows[0])
        mat = EvalMatrix.from_rows(rows, F101)
        delta = cofactor_vector(mat)
        expected = []
        for i in range(1, n + 1):
            minor = [row[: i - 1] + row[i:] for row in mat.tolist()]
            det = laplace_determinant(minor, F101)
            expected.append(det if i % 2 == 0 else F101.neg(det))
        assert delta == expected
        rank, kernel = rank_kernel(mat)
        if rank == n - 1:
            assert any(delta)
            (k,) = kernel
            pivot = next(j for j, v in enumerate(k) if v)
            ratio = F101.div(delta[pivot], k[pivot])
            assert delta == [F101.mul(ratio, v) for v in k]
        else:
            assert not any(delta)


def test_select_points_examples():
    diagonal = sample([(0, 0), (1, 1), (2, 2)])
    assert select_points(diagonal, CAPPED, 3) == [((0,), 0), ((1,), 1)]
    assert select_points(diagonal, CAPPED, 1) == []
    repeated = GraphSample.from_pairs([((1,), 1)] * 3, Q, dedupe=False)
    assert select_points(repeated, CAPPED, 3) is None


def test_c_of_sample_examples():
    cv = c_of_sample(sample([(0, 0), (1, 1), (2, 2)]), CAPPED, 10)
    assert cv.n == 3
    assert cv.witness == parse_poly("t - x1", CAPPED, Q)

    cv = c_of_sample(sample([(0, 0)]), CAPPED, 10)
    assert cv.n == 2 and cv.witness == parse_poly("x1", CAPPED, Q)

    cv = c_of_sample(sample([]), CAPPED, 10)
    assert cv.n == 1 and cv.witness == Poly.constant(1, CAPPED, Q)


def test_c_of_sample_unbounded_below_cutoff():
    powers = sample([(i, 2 ** i) for i in range(12)])
    assert not c_of_sample(powers, CAPPED, 12).bounded


def _random_rational_graph(rng, field, count):
    """Random f = p/q of degree <= 4 sampled where q does not vanish."""
    p = [rng.randrange(field.modulus) for _ in range(5)]
    q = [rng.randrange(field.modulus) for _ in range(5)]
    q[0] = q[0] or 1
    pairs, xs = [], rng.sample(range(field.modulus), field.modulus)
    for x in xs:
        den = sum(c * pow(x, i, field.modulus) for i, c in enumerate(q)) % field.modulus
        if den:
            num = sum(c * pow(x, i, field.modulus) for i, c in enumerate(p)) % field.modulus
            pairs.append(((x,), field.div(num, den)))
        if len(pairs) == count:
            break
    return GraphSample.from_pairs(pairs, field)


def test_cofactor_relation_vanishes_on_random_rational_graphs():
    rng = random.Random(3)
    field = FieldDesc.prime(1009)
    for _ in range(100):
        s = _random_rational_graph(rng, field, 50)
        cv = c_of_sample(s, CAPPED, 40)
        assert cv.bounded
        relation = cofactor_relation(s, CAPPED, cv.n)
        assert not relation.is_zero()
        assert all(relation.evaluate(gp) == 0 for gp in s.graph_points())


def test_rank_deficient_tuple_gives_zero_relation():
    pairs = [((1,), 1), ((1,), 1)]
    assert relation_from_points(pairs, CAPPED, 3, Q).is_zero()


def test_c_is_monotone_on_nested_samples():
    rng = np.random.default_rng(8)
    for _ in range(100):
        xs = rng.integers(-50, 50, size=8)
        ys = rng.integers(-50, 50, size=8)
        pairs = list({int(x): int(y) for x, y in zip(xs, ys)}.items())
        k = int(rng.integers(0, len(pairs) + 1))
        small, large = sample(pairs[:k]), sample(pairs)
        assert c_of_sample(small, CAPPED, 30).n <= c_of_sample(large, CAPPED, 30).n


def test_kernel_is_one_dimensional_at_c():
    rng = random.Random(21)
    for _ in range(50):
        s = _random_rational_graph(rng, F101, 20)
        cv = c_of_sample(s, CAPPED, 30)
        rank, kernel = rank_kernel(build_matrix(s, CAPPED, cv.n))
        assert len(kernel) == 1


def test_rational_prefix_elimination_stays_integral():
    rng = random.Random(44)
    for _ in range(40):
        rows = rng.randint(1, 6)
        cols = [[Fraction(rng.randint(-9, 9), rng.randint(1, 7)) for _ in range(rows)] for _ in range(rows + 2)]
        elim = _FractionFreePrefix(rows)
        for n, column in enumerate(cols, start=1):
            kernel = elim.add_column(column)
            assert all(isinstance(v, int) for row, pivot, prev, below in elim.steps for v in (pivot, prev, *below.values()))
            prefix = EvalMatrix.from_rows([[c[i] for c in cols[:n]] for i in range(rows)], Q)
            rank, _ = rank_kernel(prefix)
            if kernel is None:
                assert rank == n
                continue
            assert rank == n - 1 and kernel[-1] == 1
            assert all(sum(c[i] * v for c, v in zip(cols[:n], kernel)) == 0 for i in range(rows))
            break


def test_rational_c_of_sample_matches_prime_path_on_integer_graphs():
    rng = random.Random(9)
    for _ in range(30):
        xs = rng.sample(range(-40, 40), 10)
        pairs = [(x, Fraction(2 * x + 1, x * x + 3)) for x in xs]
        over_q = c_of_sample(sample(pairs), CAPPED, 20)
        over_p = c_of_sample(sample(pairs, FieldDesc.prime(1000003)), CAPPED, 20)
        assert over_q.n == over_p.n == 7
        assert over_q.witness == parse_poly("(x1^2 + 3)*t - 2*x1 - 1", CAPPED, Q).monic()
