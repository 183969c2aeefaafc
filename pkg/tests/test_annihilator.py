"""Tests for the growing-sample annihilator search in `services/annihilator.py`."""
import numpy as np
import pytest

from core.exceptions import AnnihilatorNotFoundError, OracleFailureError, ZeroPolynomialError
from data.sample_tables import load_table_oracle
from schemas.config_schema import SearchConfig
from services.annihilator import find_annihilator, verify_identity
from services.oracle import ExpressionOracle, Sampler
from services.poly import BasisOrdering, Poly, parse_poly
from services.scalar import FieldDesc

Q = FieldDesc.rationals()
FP = FieldDesc.prime(2147483647)
CAPPED = BasisOrdering(1, 0, True, t_cap=1)
CAP2 = BasisOrdering(1, 0, True, t_cap=2)
CFG = SearchConfig(n_max=60, seed=7, sample_range=10**6)


def oracle(text, field=Q, num_x=1, num_y=0):
    return ExpressionOracle.from_text(text, num_x, num_y, field)


def test_identity_function():
    result = find_annihilator(oracle("x1"), CAPPED, CFG)
    assert result.c == 3
    assert result.annihilator == parse_poly("t - x1", CAPPED, Q)
    assert result.verification.failures == 0


def test_rational_function_has_c_seven():
    result = find_annihilator(oracle("x1/(1+x1^2)"), CAPPED, CFG)
    assert result.c == 7
    assert result.annihilator == parse_poly("(1 + x1^2)*t - x1", CAPPED, Q)
    assert result.annihilator.leading_index() == result.c


def test_accepted_annihilator_vanishes_on_its_sample():
    result = find_annihilator(oracle("(x1^2 - 3)/(x1 + 5)"), CAPPED, CFG)
    assert all(result.annihilator.evaluate(gp) == 0 for gp in result.sample.graph_points())
    assert result.sample_size_used == len(result.sample)


def test_constant_and_zero_oracles():
    assert find_annihilator(oracle("5"), CAPPED, CFG).annihilator == parse_poly("t - 5", CAPPED, Q)
    zero = find_annihilator(oracle("0"), CAPPED, CFG)
    assert zero.c == 3 and zero.annihilator.serialize() == "t"


def test_polynomial_oracle_matches_leading_index_of_graph_relation():
    q0 = "x1^3 - 2*x1 + 1"
    result = find_annihilator(oracle(q0), CAPPED, CFG)
    expected = parse_poly(f"t - ({q0})", CAPPED, Q)
    assert result.c == expected.leading_index()
    assert result.annihilator == expected.monic()


def test_sqrt_at_pythagorean_points():
    result = find_annihilator(oracle("sqrt(x1^2+1)"), CAP2, CFG, sampler=Sampler.pythagorean(1, 10**4))
    assert result.c == 6
    assert result.annihilator.serialize() == "t^2 - x1^2 - 1"


def test_sqrt_over_prime_field():
    result = find_annihilator(oracle("sqrt(x1^2+1)", FP), CAP2, CFG)
    assert result.c == 6
    assert result.annihilator.serialize() == "t^2 - x1^2 - 1"


def test_normalized_result_does_not_depend_on_seed():
    a = find_annihilator(oracle("(2*x1 + 1)/(x1^2 + 3)"), CAPPED, SearchConfig(seed=1))
    b = find_annihilator(oracle("(2*x1 + 1)/(x1^2 + 3)"), CAPPED, SearchConfig(seed=99))
    assert a.c == b.c
    assert a.annihilator == b.annihilator


def test_joint_relation_in_two_variables():
    joint = BasisOrdering(1, 1, True, t_cap=1)
    result = find_annihilator(oracle("x1*y1/(1+x1^2)", num_y=1), joint, CFG)
    assert result.annihilator == parse_poly("(1 + x1^2)*t - x1*y1", joint, Q).monic()


def test_powers_of_two_table_is_not_algebraic():
    table = load_table_oracle("data/fixtures/powers_of_two.csv", Q)
    with pytest.raises(AnnihilatorNotFoundError) as exc_info:
        find_annihilator(table, CAPPED, SearchConfig(n_max=40, seed=0))
    assert exc_info.value.exit_code == 2


def test_cutoff_below_true_c_reports_not_found():
    with pytest.raises(AnnihilatorNotFoundError):
        find_annihilator(oracle("x1/(1+x1^2)"), CAPPED, SearchConfig(n_max=6))


def test_mostly_undefined_oracle_fails():
    with pytest.raises(OracleFailureError):
        find_annihilator(oracle("sqrt(x1^2+1)"), CAP2, CFG)


def test_verify_identity_examples():
    rng = np.random.default_rng(3)
    identity = oracle("x1")
    passed = verify_identity(parse_poly("t - x1", CAPPED, Q), identity, 64, 10**6, rng)
    assert passed.passed and passed.failures == 0
    failed = verify_identity(parse_poly("t", CAPPED, Q), identity, 64, 10**6, rng)
    assert not failed.passed and failed.failures >= 1
    with pytest.raises(ZeroPolynomialError):
        verify_identity(Poly.zero(CAPPED, Q), identity, 64, 10**6, rng)


@pytest.mark.parametrize(
    "text, expected_c",
    [("x1/(1+x1^2)", 7), ("x1^3 - 2*x1 + 1", 6), ("(2*x1 + 1)/(x1^2 + 3)", 7)],
)
def test_reported_c_never_decreases_with_initial_sample(text, expected_c):
    cs = [
        find_annihilator(oracle(text), CAPPED, CFG.model_copy(update={"initial_samples": size})).c
        for size in (1, 2, 4, 8, 16, 32)
    ]
    assert cs == sorted(cs)
    assert cs[-1] == expected_c
