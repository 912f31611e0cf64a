"""Exterior-algebra bookkeeping and Koszul complexes of commuting matrix tuples.

Conventions
-----------
``K^k(A, H) = H (x) Lambda^{-k}(C^n)`` for ``k = -n, ..., 0`` with differential
``d_A = sum_j A_j (x) eps_j^*`` where ``eps_j^*`` is interior multiplication.
Basis of ``K^k``: exterior indices ``e_I`` (``|I| = -k``) in lexicographic
order of the sorted subsets, the module basis varying fastest, i.e. the
coordinate of ``h_a (x) e_I`` is ``pos(I) * dim + a``.

Cone/Koszul isomorphism
-----------------------
For ``B`` commuting with ``A``, the cone of ``B (x) 1`` on ``K(A, H)`` has
``C^k = K^{k+1}(A) + K^k(A)``.  Sending ``(x (x) e_I, y (x) e_J)`` to
``x (x) e_0 ^ e_I + y (x) e_J`` in ``K((B, A), H)`` (generator 0 is ``B``)
is a cochain isomorphism with no signs: ``eps_0^*(e_0 ^ e_I) = e_I`` and
``eps_j^*(e_0 ^ e_I) = -e_0 ^ eps_j^*(e_I)``, which reproduces the blocks
``[[-d_A, 0], [B, d_A]]`` exactly.  :func:`cone_to_koszul_isomorphism`
returns the resulting permutation matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import comb

import numpy as np

from torsion_lab.complexes import ChainMap, CochainComplex
from torsion_lab.errors import ModelError
from torsion_lab.linalg import as_matrix, operator_norm, single_linkage

DEFAULT_COMMUTE_TOL = 1e-10


@lru_cache(maxsize=None)
def exterior_basis(n: int, k: int) -> tuple[tuple[int, ...], ...]:
    """Subsets of {1..n} of size k in lexicographic order."""
    if k < 0 or k > n:
        return ()
    return tuple(combinations(range(1, n + 1), k))


@lru_cache(maxsize=None)
def _positions(n: int, k: int) -> dict[tuple[int, ...], int]:
    return {s: i for i, s in enumerate(exterior_basis(n, k))}


def validate_index(subset, n: int) -> tuple[int, ...]:
    s = tuple(int(i) for i in subset)
    if any(a >= b for a, b in zip(s, s[1:])):
        raise ModelError(f"exterior index {s} is not strictly increasing")
    if s and (s[0] < 1 or s[-1] > n):
        raise ModelError(f"exterior index {s} has entries outside 1..{n}")
    return s


def interior_mult(j: int, subset, n: int | None = None) -> tuple[int, tuple[int, ...]]:
    """eps_j^*(e_I) as (sign, I without j); sign 0 when j is not in I.

    >>> interior_mult(2, (1, 2))
    (-1, (1,))
    """
    s = tuple(subset)
    if n is None:
        n = max(s + (j,)) if s else j
    if not 1 <= j <= n:
        raise ModelError(f"generator index {j} outside 1..{n}")
    s = validate_index(s, n)
    if j not in s:
        return 0, s
    m = s.index(j) + 1
    return (-1) ** (m - 1), s[: m - 1] + s[m:]


def interior_matrix(j: int, n: int, k: int) -> np.ndarray:
    """Matrix of eps_j^* : Lambda^k -> Lambda^(k-1) in the lexicographic bases."""
    src = exterior_basis(n, k)
    dst = _positions(n, k - 1)
    out = np.zeros((len(dst), len(src)))
    for col, s in enumerate(src):
        sign, t = interior_mult(j, s, n)
        if sign:
            out[dst[t], col] = sign
    return out


@dataclass
class CommutingTuple:
    """n commuting dim x dim matrices."""

    matrices: list[np.ndarray]
    commute_tol: float = DEFAULT_COMMUTE_TOL
    dim: int | None = None

    def __post_init__(self):
        mats = [np.asarray(m, dtype=complex) for m in self.matrices]
        if self.dim is None:
            if not mats:
                raise ModelError("an empty tuple needs an explicit dim")
            self.dim = mats[0].shape[0] if mats[0].ndim == 2 else 0
        out = []
        for idx, m in enumerate(mats):
            try:
                out.append(as_matrix(m, self.dim, self.dim))
            except ValueError as exc:
                raise ModelError(f"matrix {idx + 1}: {exc}") from None
        self.matrices = out

    @property
    def n(self) -> int:
        return len(self.matrices)

    def __getitem__(self, j: int) -> np.ndarray:
        return self.matrices[j]

    def commutation_defects(self):
        """Yield (i, j, defect, allowed) for every pair i < j (1-based)."""
        norms = [operator_norm(m) for m in self.matrices]
        for i in range(self.n):
            for j in range(i + 1, self.n):
                a, b = self.matrices[i], self.matrices[j]
                defect = operator_norm(a @ b - b @ a)
                allowed = self.commute_tol * (1.0 + norms[i] * norms[j])
                yield i + 1, j + 1, defect, allowed

    def check(self) -> None:
        for i, j, defect, allowed in self.commutation_defects():
            if defect > allowed:
                raise ModelError(
                    f"matrices {i} and {j} do not commute: defect norm {defect:.3e} "
                    f"exceeds {allowed:.3e}"
                )

    def shifted(self, point) -> "CommutingTuple":
        """A - lambda."""
        eye = np.eye(self.dim)
        return CommutingTuple(
            [m - complex(c) * eye for m, c in zip(self.matrices, point)],
            self.commute_tol,
            self.dim,
        )


def koszul_dims(n: int, dim: int) -> dict[int, int]:
    return {-k: dim * comb(n, k) for k in range(n + 1)}


def build_koszul(a: CommutingTuple, check: bool = True) -> CochainComplex:
    """K(A, H) in degrees -n..0."""
    if check:
        a.check()
    n, dim = a.n, a.dim
    diffs = {}
    for p in range(1, n + 1):
        # K^{-p} -> K^{-p+1}: Lambda^p -> Lambda^{p-1}
        block = np.zeros((dim * comb(n, p - 1), dim * comb(n, p)), dtype=complex)
        for j in range(1, n + 1):
            block += np.kron(interior_matrix(j, n, p), a[j - 1])
        diffs[-p] = block
    return CochainComplex(koszul_dims(n, dim), diffs)


def koszul_map(a: CommutingTuple, b, check: bool = True) -> ChainMap:
    """The cochain map B (x) 1 on K(A, H)."""
    b = np.asarray(b, dtype=complex)
    try:
        b = as_matrix(b, a.dim, a.dim)
    except ValueError as exc:
        raise ModelError(f"map B: {exc}") from None
    if check:
        CommutingTuple([b] + list(a.matrices), a.commute_tol, a.dim).check()
    k = build_koszul(a, check=False)
    comps = {deg: np.kron(np.eye(comb(a.n, -deg)), b) for deg in k.degrees}
    return ChainMap(k, k, comps)


def cone_to_koszul_isomorphism(n: int, dim: int) -> dict[int, np.ndarray]:
    """Degreewise matrices Psi^k : cone(B (x) 1)^k -> K^k((B, A), H).

    Generators of the target are ordered (B, A_1, ..., A_n), i.e. B is the
    first generator.  The cone block order is (K^{k+1}(A), K^k(A)).
    """
    out = {}
    for p in range(n + 2):
        k = -p
        tgt_pos = _positions(n + 1, p)
        src_x = exterior_basis(n, p - 1)  # K^{k+1}(A) = Lambda^{p-1}
        src_y = exterior_basis(n, p)
        cols = dim * (len(src_x) + len(src_y))
        m = np.zeros((dim * len(tgt_pos), cols))
        for c, s in enumerate(src_x):
            t = (1,) + tuple(i + 1 for i in s)
            r = tgt_pos[t]
            m[r * dim : (r + 1) * dim, c * dim : (c + 1) * dim] = np.eye(dim)
        off = dim * len(src_x)
        for c, s in enumerate(src_y):
            t = tuple(i + 1 for i in s)
            r = tgt_pos[t]
            m[r * dim : (r + 1) * dim, off + c * dim : off + (c + 1) * dim] = np.eye(dim)
        out[k] = m
    return out


def koszul_index(a: CommutingTuple, policy=None) -> int:
    from torsion_lab.complexes import cohomology
    from torsion_lab.linalg import DEFAULT_POLICY

    return cohomology(build_koszul(a), policy or DEFAULT_POLICY).index


def joint_spectrum(a: CommutingTuple, cluster_tol: float = 1e-4) -> list[tuple[np.ndarray, int]]:
    """Joint eigenvalues of a commuting tuple with algebraic multiplicities.

    Uses a random linear combination to separate joint eigenvalues, then reads
    each A_j through the Rayleigh quotients on the generalized eigenspaces.
    """
    rng = np.random.default_rng(12345)
    n, dim = a.n, a.dim
    if dim == 0:
        return []
    coeffs = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    comb_mat = sum(c * m for c, m in zip(coeffs, a.matrices))
    vals = np.linalg.eigvals(comb_mat)
    groups = single_linkage(vals, cluster_tol * (1 + float(np.max(np.abs(vals)))))
    clusters = [[vals[i] for i in g] for g in groups]
    out = []
    eye = np.eye(dim)
    for cl in clusters:
        mu = np.mean(cl)
        mult = len(cl)
        # generalized eigenspace: kernel of (C - mu)^mult
        p = np.linalg.matrix_power(comb_mat - mu * eye, mult)
        u, s, vh = np.linalg.svd(p)
        basis = vh.conj().T[:, dim - mult :]
        point = np.array(
            [np.trace(basis.conj().T @ m @ basis) / mult for m in a.matrices]
        )
        out.append((point, mult))
    return out
