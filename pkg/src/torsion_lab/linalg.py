"""Numerical rank decisions and determinant helpers.

Every rank decision in the package goes through a :class:`RankPolicy` value
that is passed explicitly; there is no module-level tolerance.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

AMBIGUITY_FACTOR = 10.0


@dataclass(frozen=True)
class RankPolicy:
    """Threshold for treating singular values as zero.

    A singular value ``s`` counts as zero when
    ``s <= max(absolute_floor, relative_threshold * s_max)``.
    """

    relative_threshold: float = 1e-8
    absolute_floor: float = 1e-12

    def __post_init__(self):
        if not (self.relative_threshold >= 0 and self.absolute_floor >= 0):
            raise ValueError("rank policy thresholds must be nonnegative")

    def threshold(self, singular_values) -> float:
        smax = float(singular_values[0]) if len(singular_values) else 0.0
        return max(self.absolute_floor, self.relative_threshold * smax)

    def rank(self, singular_values) -> int:
        return int(np.sum(np.asarray(singular_values) > self.threshold(singular_values)))

    def is_ambiguous(self, singular_values) -> bool:
        """True when some singular value sits within a factor 10 of the threshold."""
        tol = self.threshold(singular_values)
        if tol == 0.0:
            return False
        for s in singular_values:
            if tol / AMBIGUITY_FACTOR < s <= tol * AMBIGUITY_FACTOR:
                return True
        return False


DEFAULT_POLICY = RankPolicy()


def as_matrix(a, rows=None, cols=None) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        if m.size == 0 and rows is not None and cols is not None:
            return np.zeros((rows, cols), dtype=complex)
        raise ValueError(f"expected a 2-d array, got shape {m.shape}")
    if rows is not None and m.shape[0] != rows or cols is not None and m.shape[1] != cols:
        raise ValueError(f"expected shape ({rows}, {cols}), got {m.shape}")
    return m


@dataclass(frozen=True)
class Decomposition:
    """SVD-based splitting of a matrix into range/kernel bases."""

    rank: int
    singular_values: np.ndarray
    range_basis: np.ndarray  # orthonormal columns spanning the image
    kernel_basis: np.ndarray  # orthonormal columns spanning the kernel
    corange_basis: np.ndarray  # orthonormal complement of the kernel (row space)
    ambiguous: bool


def decompose(a: np.ndarray, policy: RankPolicy = DEFAULT_POLICY) -> Decomposition:
    a = np.asarray(a, dtype=complex)
    m, n = a.shape
    if m == 0 or n == 0:
        return Decomposition(
            0,
            np.zeros(0),
            np.zeros((m, 0), dtype=complex),
            np.eye(n, dtype=complex),
            np.zeros((n, 0), dtype=complex),
            False,
        )
    u, s, vh = np.linalg.svd(a)
    r = policy.rank(s)
    v = vh.conj().T
    return Decomposition(
        r, s, u[:, :r], v[:, r:], v[:, :r], policy.is_ambiguous(s)
    )


def orthonormalize(columns: np.ndarray, policy: RankPolicy = DEFAULT_POLICY) -> np.ndarray:
    """Orthonormal basis of the column span, via SVD."""
    return decompose(columns, policy).range_basis


def numerical_rank(a, policy: RankPolicy = DEFAULT_POLICY) -> int:
    return decompose(np.asarray(a, dtype=complex), policy).rank


def slogdet(a: np.ndarray) -> tuple[complex, float]:
    """Phase and log-magnitude of a square determinant (LU with pivoting).

    The empty matrix has determinant 1.
    """
    a = np.asarray(a, dtype=complex)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"determinant of non-square matrix {a.shape}")
    if a.shape[0] == 0:
        return 1.0 + 0j, 0.0
    phase, logabs = np.linalg.slogdet(a)
    return complex(phase), float(logabs)


class LogScalar:
    """A nonzero complex number kept as (phase, log|.|) to avoid overflow."""

    __slots__ = ("phase", "log_abs")

    def __init__(self, phase: complex = 1.0, log_abs: float = 0.0):
        self.phase = complex(phase)
        self.log_abs = float(log_abs)

    @classmethod
    def from_complex(cls, z: complex) -> "LogScalar":
        if z == 0:
            return cls(0.0, -math.inf)
        return cls(z / abs(z), math.log(abs(z)))

    @classmethod
    def det(cls, a: np.ndarray) -> "LogScalar":
        return cls(*slogdet(a))

    def __mul__(self, other: "LogScalar") -> "LogScalar":
        return LogScalar(self.phase * other.phase, self.log_abs + other.log_abs)

    def __truediv__(self, other: "LogScalar") -> "LogScalar":
        if other.phase == 0:
            raise ZeroDivisionError("division by a zero determinant")
        return LogScalar(self.phase / other.phase, self.log_abs - other.log_abs)

    def __neg__(self) -> "LogScalar":
        return LogScalar(-self.phase, self.log_abs)

    def __pow__(self, k: int) -> "LogScalar":
        return LogScalar(self.phase**k, self.log_abs * k)

    def is_zero(self) -> bool:
        return self.phase == 0

    def to_complex(self) -> complex:
        if self.phase == 0:
            return 0j
        return self.phase * math.exp(self.log_abs)

    def polar(self) -> tuple[float, float]:
        """(magnitude, phase angle in radians)."""
        if self.phase == 0:
            return 0.0, 0.0
        return math.exp(self.log_abs), cmath.phase(self.phase)

    def __repr__(self):
        return f"LogScalar(phase={self.phase!r}, log_abs={self.log_abs!r})"


def operator_norm(a) -> float:
    a = np.asarray(a, dtype=complex)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def relative_gap(a: complex, b: complex) -> float:
    scale = max(abs(a), abs(b))
    if scale == 0:
        return 0.0
    return abs(a - b) / scale


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def single_linkage(points, tol: float) -> list[list[int]]:
    """Group indices of points (complex scalars or vectors) whose chained
    pairwise distances are below ``tol``."""
    pts = [np.atleast_1d(np.asarray(p, dtype=complex)) for p in points]
    parent = list(range(len(pts)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if np.max(np.abs(pts[i] - pts[j])) < tol:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(len(pts)):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values(), key=lambda g: g[0])
