from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torsion_lab.complexes import cohomology, mapping_cone
from torsion_lab.errors import ModelError
from torsion_lab.koszul import (
    CommutingTuple,
    build_koszul,
    cone_to_koszul_isomorphism,
    exterior_basis,
    interior_matrix,
    interior_mult,
    joint_spectrum,
    koszul_index,
    koszul_map,
)
from torsion_lab.verify import random_commuting_tuple


@pytest.mark.parametrize(
    "j, subset, expected",
    [(1, (1, 2), (1, (2,))), (2, (1, 2), (-1, (1,))), (1, (2,), (0, (2,))), (3, (1, 2, 3), (1, (1, 2)))],
)
def test_interior_mult_examples(j, subset, expected):
    assert interior_mult(j, subset, 3) == expected


@pytest.mark.parametrize("j, subset", [(0, (1,)), (4, (1, 2)), (1, (2, 1)), (1, (1, 5))])
def test_interior_mult_rejects_bad_indices(j, subset):
    with pytest.raises(ModelError):
        interior_mult(j, subset, 3)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 6).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, n), st.integers(1, n), st.integers(2, n))))
def test_interior_multiplications_anticommute(case):
    n, i, j, k = case
    a = interior_matrix(i, n, k - 1) @ interior_matrix(j, n, k)
    b = interior_matrix(j, n, k - 1) @ interior_matrix(i, n, k)
    assert np.array_equal(a, -b)
    if i == j:
        assert not a.any()


def test_anticommutation_exhaustive_small():
    # every basis index for n <= 6, by brute force on the signed action
    for n in range(1, 7):
        for k in range(2, n + 1):
            for s in exterior_basis(n, k):
                for i in range(1, n + 1):
                    for j in range(1, n + 1):
                        si, ti = interior_mult(j, s, n)
                        sij, _ = interior_mult(i, ti, n) if si else (0, ())
                        sj, tj = interior_mult(i, s, n)
                        sji, _ = interior_mult(j, tj, n) if sj else (0, ())
                        assert si * sij == -(sj * sji)


def test_exterior_basis_counts():
    from math import comb

    for n in range(7):
        for k in range(n + 1):
            assert len(exterior_basis(n, k)) == comb(n, k)
            assert list(exterior_basis(n, k)) == sorted(combinations(range(1, n + 1), k))


def test_single_generator():
    k = build_koszul(CommutingTuple([np.array([[2.0]])]))
    assert k.dims == {-1: 1, 0: 1}
    np.testing.assert_array_equal(k.d(-1), [[2.0]])


def test_zero_pair_on_line():
    k = build_koszul(CommutingTuple([np.zeros((1, 1)), np.zeros((1, 1))]))
    assert [k.dim(d) for d in (-2, -1, 0)] == [1, 2, 1]
    h = cohomology(k)
    assert [h.dim(d) for d in (-2, -1, 0)] == [1, 2, 1]


def test_diagonal_pair_block_pattern():
    a1, a2 = np.diag([1.0, 0.0]), np.diag([0.0, 3.0])
    k = build_koszul(CommutingTuple([a1, a2]))
    # module index fastest; columns e_1 block then e_2 block
    np.testing.assert_array_equal(k.d(-1), np.hstack([a1, a2]))
    np.testing.assert_array_equal(k.d(-2), np.vstack([-a2, a1]))
    assert k.square_defect() == 0.0
    h = cohomology(k)
    assert h.degrees == []


def test_noncommuting_pair_is_rejected():
    a = np.array([[0.0, 1.0], [0.0, 0.0]])
    with pytest.raises(ModelError, match="matrices 1 and 2 do not commute"):
        build_koszul(CommutingTuple([a, a.T]))


def test_dimensions_and_euler_characteristic(rng):
    from math import comb

    for n in range(1, 5):
        for dim in (0, 1, 3):
            a = random_commuting_tuple(rng, n, dim) if dim else CommutingTuple([], dim=0)
            if dim == 0:
                continue
            k = build_koszul(a)
            for deg in range(-n, 1):
                assert k.dim(deg) == dim * comb(n, -deg)
            assert k.euler_characteristic() == 0
            assert koszul_index(a) == 0
            scale = max(np.linalg.norm(m, 2) for m in a.matrices)
            assert k.square_defect() <= 10 * 1e-10 * max(scale, 1) ** 2 + 1e-12


def test_koszul_map_examples():
    a = CommutingTuple([np.zeros((1, 1))])
    m = koszul_map(a, [[5.0]])
    np.testing.assert_array_equal(m.at(-1), [[5.0]])
    np.testing.assert_array_equal(m.at(0), [[5.0]])
    eye = koszul_map(CommutingTuple([np.diag([1.0, 2.0])]), np.eye(2))
    for deg in (-1, 0):
        np.testing.assert_array_equal(eye.at(deg), np.eye(2))


def test_koszul_map_requires_commuting():
    a = CommutingTuple([np.array([[0.0, 1.0], [0.0, 0.0]])])
    with pytest.raises(ModelError):
        koszul_map(a, np.array([[0.0, 0.0], [1.0, 0.0]]))


@pytest.mark.parametrize("seed", range(4))
def test_cone_is_koszul_of_extended_tuple(seed):
    rng = np.random.default_rng(seed)
    n = 1 + seed % 3
    a = random_commuting_tuple(rng, n + 1, 3)
    base = CommutingTuple(a.matrices[1:])
    b = a.matrices[0]
    cone = mapping_cone(koszul_map(base, b)).cone
    target = build_koszul(a)
    psi = cone_to_koszul_isomorphism(n, 3)
    assert {k: cone.dim(k) for k in cone.degrees} == {k: target.dim(k) for k in target.degrees}
    for k in cone.degrees:
        lhs = psi[k + 1] @ cone.d(k) if k + 1 in psi else np.zeros((0, cone.dim(k)))
        rhs = target.d(k) @ psi[k]
        np.testing.assert_allclose(lhs, rhs, atol=1e-12)
        assert abs(abs(np.linalg.det(psi[k])) - 1) < 1e-12


def test_cone_dims_for_diagonal_pair():
    a1, a2 = np.diag([1.0, 0.0]), np.diag([0.0, 3.0])
    base = CommutingTuple([a1, a2])
    cone = mapping_cone(koszul_map(base, a1)).cone
    assert [cone.dim(k) // 2 for k in (-3, -2, -1, 0)] == [1, 3, 3, 1]


def test_joint_spectrum_of_triangular_pair():
    a1 = np.array([[1.0, 1.0], [0.0, 2.0]])
    a2 = np.array([[3.0, 1.0], [0.0, 4.0]])
    pts = sorted((tuple(np.round(p.real, 8)), m) for p, m in joint_spectrum(CommutingTuple([a1, a2])))
    assert pts == [((1.0, 3.0), 1), ((2.0, 4.0), 1)]
