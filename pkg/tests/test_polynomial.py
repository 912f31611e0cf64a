import numpy as np
import pytest

from torsion_lab.errors import ModelError
from torsion_lab.polynomial import MultiPolynomial as P
from torsion_lab.polynomial import x_y


def test_eval_horner():
    x, y = x_y()
    assert (x**2 * y + 1).eval((2, 3)) == 13


def test_shift_binomial():
    z = P.variable(1, 0)
    assert (z**2).shift((1,)) == z**2 + 2 * z + 1


def test_derivative():
    x, y = x_y()
    assert (x**2 * y).derivative(0) == 2 * x * y
    assert (x**2 * y).derivative(1) == x**2


def test_zero_polynomial():
    z = P(2, {})
    assert z.is_zero()
    assert z.eval((1, 2)) == 0
    assert (P.variable(2, 0) - P.variable(2, 0)).is_zero()


def test_pruning_is_relative():
    p = P(1, {(0,): 1.0, (1,): 1e-16})
    assert p.terms == {(0,): 1.0}
    q = P(1, {(0,): 1e-20})
    assert not q.is_zero()


def test_from_roots_and_univariate_coeffs():
    p = P.from_roots([1, -2], lead=3)
    np.testing.assert_allclose(p.univariate_coeffs(0), [-6, 3, 3])


def test_eval_matrices_commuting_calculus(rng):
    x, y = x_y()
    a = np.diag([1.0, 2.0])
    b = np.diag([3.0, -1.0])
    m = (x * y + 2).eval_matrices([a, b])
    np.testing.assert_allclose(m, np.diag([5.0, 0.0]))


def test_json_round_trip():
    x, y = x_y()
    p = x**3 - 2j * y + 0.5
    assert P.from_json(p.to_json()) == p


@pytest.mark.parametrize(
    "bad",
    [
        {"e": [1], "c": [1, 0]},
        [{"e": [1], "c": [1]}],
        [{"e": [-1], "c": [1, 0]}],
        [{"e": [1], "c": [1, 0], "x": 1}],
        [{"e": [1], "c": [1, 0]}, {"e": [1, 0], "c": [1, 0]}],
    ],
)
def test_json_rejects_malformed(bad):
    with pytest.raises(ModelError):
        P.from_json(bad)


def test_variable_count_mismatch():
    with pytest.raises(ModelError):
        P.variable(1, 0) + P.variable(2, 0)
