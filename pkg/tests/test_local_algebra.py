import numpy as np
import pytest

from torsion_lab.errors import BoundaryZeroError, ModelError, NumericalError
from torsion_lab.local_algebra import (
    NotZeroDimensionalError,
    cluster_roots,
    multiplicity,
    quotient_dimensions,
    resultant,
    solve_system,
    univariate_roots,
)
from torsion_lab.polynomial import MultiPolynomial as P
from torsion_lab.polynomial import x_y

x, y = x_y()
z = P.variable(1, 0)


def perturbation_systems(rng, count):
    """Plane systems with an isolated zero at 0 whose branches spread like |w|^(1/2) or faster."""
    templates = [
        lambda: (x, y),
        lambda: (x * x, y),
        lambda: (y - x * x, y + x * x),
        lambda: (x * x, y * y),
        lambda: (x * y, x * x - y * y),
        lambda: (x * x + y * y * 2, x * y),
        lambda: (x * x, x * y + y * y),
    ]
    out = []
    for k in range(count):
        g1, g2 = templates[k % len(templates)]()
        # well-conditioned linear change of coordinates and unit multipliers
        a = np.eye(2) + 0.3 * rng.standard_normal((2, 2))
        u, v = a[0, 0] * x + a[0, 1] * y, a[1, 0] * x + a[1, 1] * y
        sub = lambda p: sum((c * u ** e[0] * v ** e[1] for e, c in p.terms.items()), P(2, {}))  # noqa: E731
        unit1 = 1 + 0.5 * x - 0.25 * y
        unit2 = 1 - 0.4 * y + 0.1 * x * y
        out.append([sub(g1) * unit1, sub(g2) * unit2])
    return out


def test_multiplicity_examples():
    assert multiplicity([x, y], (0, 0)) == 1
    assert multiplicity([x**2, y**3], (0, 0)) == 6
    for k in range(1, 11):
        assert multiplicity([z**k], (0,)) == k


def test_multiplicity_is_zero_off_the_zero_set():
    assert multiplicity([x - 1, y], (0, 0)) == 0


def test_quotient_dimensions_stabilize():
    dims = [d for _, d in zip(range(6), quotient_dimensions([x**2, y**3]))]
    assert dims == [(1, 1), (2, 3), (3, 5), (4, 6), (5, 6), (6, 6)]


def test_non_isolated_zero_raises():
    with pytest.raises(NumericalError, match="not isolated"):
        multiplicity([x * y, x * y * (1 + x)], (0, 0), n_max=12)


def test_multiplicity_square_system_required():
    with pytest.raises(ModelError):
        multiplicity([x], (0, 0))


@pytest.mark.parametrize("seed", range(5))
def test_multiplicity_translation_invariant(seed):
    rng = np.random.default_rng(seed)
    lam = tuple(complex(*rng.standard_normal(2)) for _ in range(2))
    sys0 = perturbation_systems(rng, 5)[seed]
    moved = [p.shift(tuple(-c for c in lam)) for p in sys0]
    assert multiplicity(moved, lam) == multiplicity(sys0, (0, 0))


@pytest.mark.parametrize("seed", range(7))
def test_multiplicity_equals_perturbed_simple_zero_count(seed):
    rng = np.random.default_rng(700 + seed)
    g = perturbation_systems(rng, 7)[seed]
    m = multiplicity(g, (0, 0))
    w = 1e-6 * np.exp(2j * np.pi * rng.uniform(size=2))
    zs = solve_system([g[0] - w[0], g[1] - w[1]], (0, 0), 1e-2)
    assert all(p.multiplicity == 1 for p in zs)
    assert len(zs) == m


def test_resultant_examples():
    r = resultant(y - x, y + x)
    assert r.almost_equal(-2 * z)
    assert resultant(y, y).is_zero()
    assert resultant(y**2 - x**3, y).almost_equal(-(z**3))


def test_resultant_needs_positive_degree():
    with pytest.raises(ModelError):
        resultant(x + 1, y)


@pytest.mark.parametrize("seed", range(6))
def test_resultant_detects_common_roots_of_random_cubics(seed):
    rng = np.random.default_rng(800 + seed)

    def cubic():
        terms = {(i, j): complex(*rng.standard_normal(2)) for i in range(4) for j in range(4) if i + j <= 3}
        return P(2, terms)

    p, q = cubic(), cubic()
    res = resultant(p, q)
    roots = [r for r, _ in univariate_roots(res.univariate_coeffs(0))]
    assert roots

    def gap(x0):
        ry = np.roots(p.substitute(0, x0).univariate_coeffs(1)[::-1])
        sy = np.roots(q.substitute(0, x0).univariate_coeffs(1)[::-1])
        return min(abs(a - b) for a in ry for b in sy)

    for r in roots:
        if abs(r) < 10:
            assert gap(r) < 1e-5
    x1 = complex(*rng.standard_normal(2))
    assert min(abs(x1 - r) for r in roots) > 1e-3
    assert gap(x1) > 1e-6


def test_univariate_roots_and_clusters():
    roots = univariate_roots(P.from_roots([0.5, 0.5, 0.5, -1j]).univariate_coeffs(0))
    got = sorted((round(r.real, 6), round(r.imag, 6), m) for r, m in roots)
    assert got == [(-0.0, -1.0, 1), (0.5, 0.0, 3)] or got == [(0.0, -1.0, 1), (0.5, 0.0, 3)]
    # cube roots of a tiny number are distinct simple roots, not a triple root
    w = 1e-12
    tiny = univariate_roots(P.from_roots([w ** (1 / 3) * np.exp(2j * np.pi * k / 3) for k in range(3)]).univariate_coeffs(0))
    assert all(m == 1 for _, m in tiny) and len(tiny) == 3


def test_cluster_roots_single_linkage():
    out = cluster_roots(np.array([1.0, 1.0 + 1e-9, 2.0]), 1e-6)
    assert sorted(m for _, m in out) == [1, 2]


def test_solve_system_examples():
    zs = solve_system([x, y], (0, 0), 1.0)
    assert len(zs) == 1 and zs.points[0].multiplicity == 1
    zs = solve_system([x * x - 1, y - x], (0, 0), 2.0)
    pts = sorted((round(p.point[0].real, 9), round(p.point[1].real, 9), p.multiplicity) for p in zs)
    assert pts == [(-1.0, -1.0, 1), (1.0, 1.0, 1)]
    zs = solve_system([x * x + 1, y], (0, 0), 2.0)
    pts = sorted((round(p.point[0].imag, 9), p.multiplicity) for p in zs)
    assert pts == [(-1.0, 1), (1.0, 1)]
    for p in zs:
        assert p.residual <= 1e-9


def test_solve_system_multiple_zero():
    zs = solve_system([x**2, y**3 - x], (0, 0), 1.0)
    assert len(zs) == 1 and zs.points[0].multiplicity == 6


def test_solve_system_region_growth_is_consistent():
    g = [x * x - 0.25, y * y - 0.81]
    small = solve_system(g, (0, 0), 0.6).total_multiplicity()
    large = solve_system(g, (0, 0), 1.5).total_multiplicity()
    assert small == 0 and large == 4


def test_solve_system_errors():
    with pytest.raises(BoundaryZeroError):
        solve_system([x - 1, y], (0, 0), 1.0)
    with pytest.raises(NotZeroDimensionalError):
        solve_system([x * y, x * y * 2], (0, 0), 1.0)
    with pytest.raises(ModelError):
        solve_system([P.variable(3, 0)] * 3)


def test_near_coincident_simple_zeros_get_multiplicity_one():
    w = 1e-2 * 0.5**27 * np.exp(1j)
    zs = solve_system([y, x**3 - w], (0, 0), 0.5)
    assert [p.multiplicity for p in zs] == [1, 1, 1]
