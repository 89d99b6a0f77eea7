import cmath
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fbasis.field import (EXACT, FLOAT, Field, FieldError, Regime,
                          SingularMatrixError, bareiss_det, det, from_json,
                          matmul, parse_scalar, phi, solve, to_json)

from conftest import nonzero_rationals, rationals


def cofactor_det(m):
    """Laplace expansion along the first row (oracle)."""
    n = len(m)
    if n == 0:
        return Fraction(1)
    total = Fraction(0)
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        total += (-1) ** j * m[0][j] * cofactor_det(minor)
    return total


def rand_matrix(rng, n, m=None):
    m = n if m is None else m
    return EXACT.array([[Fraction(rng.randint(-9, 9), rng.randint(1, 5))
                         for _ in range(m)] for _ in range(n)])


def test_det_triangular():
    assert det(EXACT.array([[Fraction(2, 3), 0], [Fraction(1, 3), 1]])) \
        == Fraction(2, 3)


def test_det_identity():
    assert det(EXACT.identity(4)) == 1


@pytest.mark.parametrize("seed", range(5))
def test_det_matches_cofactor_expansion(seed):
    m = rand_matrix(random.Random(seed), 5)
    assert det(m) == cofactor_det([list(r) for r in m])


def test_det_singular_and_empty():
    assert det(EXACT.array([[1, 2], [2, 4]])) == 0
    assert det(EXACT.zeros((0, 0))) == 1


def test_bareiss_integer():
    assert bareiss_det([[0, 1], [1, 0]]) == -1
    assert bareiss_det([[2, 0, 0], [0, 3, 0], [0, 0, 4]]) == 24


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_det_multiplicative(seed):
    rng = random.Random(seed)
    a, b = rand_matrix(rng, 4), rand_matrix(rng, 4)
    assert det(matmul(a, b)) == det(a) * det(b)


def test_det_float_matches_numpy():
    m = np.array([[1 + 1j, 2], [3, 4 - 2j]])
    assert abs(det(m) - np.linalg.det(m)) < 1e-12


def test_solve_identity_and_diagonal():
    b = EXACT.array([Fraction(1, 2), 3])
    assert list(solve(EXACT.identity(2), b)) == list(b)
    x = solve(EXACT.array([[2, 0], [0, 4]]), EXACT.array([[1], [1]]))
    assert x[0, 0] == Fraction(1, 2) and x[1, 0] == Fraction(1, 4)


@pytest.mark.parametrize("seed", range(5))
def test_solve_multiply_back(seed):
    rng = random.Random(seed)
    m = rand_matrix(rng, 4)
    if det(m) == 0:
        pytest.skip("singular draw")
    x0 = rand_matrix(rng, 4, 2)
    assert EXACT.allclose(solve(m, matmul(m, x0)), x0)


def test_solve_singular_reports_stage():
    with pytest.raises(SingularMatrixError) as err:
        solve(EXACT.array([[1, 2], [2, 4]]), EXACT.array([1, 1]))
    assert err.value.stage == 1


@settings(max_examples=50)
@given(rationals, rationals, rationals)
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c


@given(nonzero_rationals)
def test_inverse(a):
    assert a * (1 / a) == 1


def test_division_by_zero_is_an_error():
    with pytest.raises(ZeroDivisionError):
        Fraction(1) / Fraction(0)


def test_float_equality_is_relative():
    f = Field(False, 1e-9)
    assert f.eq(1e12, 1e12 + 1)
    assert not f.eq(1.0, 1.0 + 1e-6)
    assert f.is_zero(1e-10)


def test_exact_field_rejects_floats():
    with pytest.raises(FieldError):
        EXACT(0.5)
    assert EXACT("3/2") == Fraction(3, 2)


@pytest.mark.parametrize("text,expected", [
    ("3/2", Fraction(3, 2)), ("-4", Fraction(-4)), ("0.5", 0.5 + 0j),
    ("1+2j", 1 + 2j)])
def test_parse_scalar(text, expected):
    v = parse_scalar(text)
    assert v == expected and type(v) is type(expected)


def test_parse_rejects_garbage():
    with pytest.raises(FieldError):
        parse_scalar("three")


@pytest.mark.parametrize("value", [Fraction(7, 3), Fraction(-2), 1.5 - 2j])
def test_json_round_trip(value):
    assert from_json(to_json(value)) == value


def test_phi_regimes():
    assert phi(Regime.XXX, Fraction(5)) == 5
    assert phi(Regime.XXX, Fraction(0)) == 0
    assert abs(phi(Regime.XXZ, 1.0 + 0j) - 1.1752011936438014) < 1e-12
    assert phi(Regime.XXZ, 0.3j) == cmath.sinh(0.3j)
    with pytest.raises(FieldError):
        phi(Regime.XXZ, Fraction(1))


def test_matmul_agrees_with_numpy_on_floats():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(3, 3)) + 0j
    b = rng.normal(size=(3, 2)) + 0j
    assert FLOAT.allclose(matmul(a, b), a @ b)


def test_matmul_exact_skips_zeros_correctly():
    a = EXACT.array([[0, Fraction(1, 2)], [0, 0]])
    b = EXACT.array([[1, 2], [3, 4]])
    assert EXACT.allclose(matmul(a, b), EXACT.array(
        [[Fraction(3, 2), 2], [0, 0]]))
