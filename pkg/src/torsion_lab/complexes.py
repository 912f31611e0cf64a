"""Finite cochain complexes over C: cohomology, shifts, mapping cones and
the six-term exact sequence of a cone triangle.

A complex stores only its nonzero spaces.  Differentials that are absent are
zero maps of the appropriate shape.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from torsion_lab.errors import ModelError, NumericalError
from torsion_lab.linalg import DEFAULT_POLICY, RankPolicy, as_matrix, decompose

CHAIN_TOL = 1e-9


@dataclass
class CochainComplex:
    """Spaces ``C^dims[k]`` in degree ``k`` with ``d^k : X^k -> X^(k+1)``."""

    dims: dict[int, int]
    differentials: dict[int, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        self.dims = {int(k): int(v) for k, v in self.dims.items() if int(v) > 0}
        for k, v in self.dims.items():
            if v < 0:
                raise ModelError(f"negative dimension in degree {k}")
        diffs = {}
        for k, d in self.differentials.items():
            k = int(k)
            rows, cols = self.dim(k + 1), self.dim(k)
            try:
                m = as_matrix(d, rows, cols)
            except ValueError as exc:
                raise ModelError(f"differential d^{k}: {exc}") from None
            if m.size:
                diffs[k] = m
        self.differentials = diffs

    def dim(self, k: int) -> int:
        return self.dims.get(k, 0)

    def d(self, k: int) -> np.ndarray:
        m = self.differentials.get(k)
        if m is None:
            return np.zeros((self.dim(k + 1), self.dim(k)), dtype=complex)
        return m

    @property
    def degrees(self) -> list[int]:
        return sorted(self.dims)

    def degree_range(self) -> range:
        """Degrees from one below the support to one above it."""
        if not self.dims:
            return range(0)
        return range(min(self.dims) - 1, max(self.dims) + 2)

    def square_defect(self) -> float:
        """max_k |d^(k+1) d^k| (entrywise)."""
        worst = 0.0
        for k in self.degrees:
            prod = self.d(k + 1) @ self.d(k)
            if prod.size:
                worst = max(worst, float(np.max(np.abs(prod))))
        return worst

    def euler_characteristic(self) -> int:
        return sum((-1) ** (k % 2) * v for k, v in self.dims.items())

    def total_dim(self) -> int:
        return sum(self.dims.values())

    def conjugate(self, transforms: dict[int, np.ndarray]) -> "CochainComplex":
        """Complex obtained by the change of basis ``x -> T^k x`` in each degree."""
        diffs = {}
        for k in self.degrees:
            t_src = transforms.get(k, np.eye(self.dim(k)))
            t_dst = transforms.get(k + 1, np.eye(self.dim(k + 1)))
            diffs[k] = t_dst @ self.d(k) @ np.linalg.inv(t_src)
        return CochainComplex(dict(self.dims), diffs)


@dataclass
class ChainMap:
    source: CochainComplex
    target: CochainComplex
    components: dict[int, np.ndarray]

    def __post_init__(self):
        comps = {}
        for k, m in self.components.items():
            k = int(k)
            try:
                m = as_matrix(m, self.target.dim(k), self.source.dim(k))
            except ValueError as exc:
                raise ModelError(f"chain map component in degree {k}: {exc}") from None
            if m.size:
                comps[k] = m
        self.components = comps

    def at(self, k: int) -> np.ndarray:
        m = self.components.get(k)
        if m is None:
            return np.zeros((self.target.dim(k), self.source.dim(k)), dtype=complex)
        return m

    def defect(self) -> tuple[float, int | None]:
        """Largest |d_Y f^k - f^(k+1) d_X| and the degree where it occurs."""
        worst, where = 0.0, None
        degs = set(self.source.degrees) | set(self.target.degrees)
        for k in sorted(degs):
            r = self.target.d(k) @ self.at(k) - self.at(k + 1) @ self.source.d(k)
            if r.size:
                v = float(np.max(np.abs(r)))
                if v > worst:
                    worst, where = v, k
        return worst, where

    def check(self, tol: float = CHAIN_TOL) -> None:
        worst, where = self.defect()
        scale = 1.0 + max(
            [np.abs(m).max() for m in self.components.values() if m.size] or [0.0]
        )
        if worst > tol * scale:
            raise ModelError(
                f"not a cochain map: defect {worst:.3e} in degree {where}"
            )

    def compose(self, other: "ChainMap") -> "ChainMap":
        """self o other."""
        degs = set(other.source.degrees) | set(self.target.degrees)
        comps = {k: self.at(k) @ other.at(k) for k in degs}
        return ChainMap(other.source, self.target, comps)


def identity_map(x: CochainComplex) -> ChainMap:
    return ChainMap(x, x, {k: np.eye(x.dim(k), dtype=complex) for k in x.degrees})


def zero_map(x: CochainComplex, y: CochainComplex) -> ChainMap:
    return ChainMap(x, y, {})


def scalar_map(x: CochainComplex, c: complex) -> ChainMap:
    return ChainMap(x, x, {k: c * np.eye(x.dim(k), dtype=complex) for k in x.degrees})


def maps_commute(f: ChainMap, g: ChainMap) -> float:
    """max_k |f^k g^k - g^k f^k|."""
    worst = 0.0
    for k in set(f.components) | set(g.components):
        r = f.at(k) @ g.at(k) - g.at(k) @ f.at(k)
        if r.size:
            worst = max(worst, float(np.max(np.abs(r))))
    return worst


# --------------------------------------------------------------------------
# cohomology


@dataclass
class CohomologyData:
    """Cohomology of a complex with explicit representatives.

    ``bases[k]`` has orthonormal columns lying in ker d^k and orthogonal to
    im d^(k-1), so the class of a cocycle ``z`` has coordinates
    ``bases[k].conj().T @ z``.
    """

    complex: CochainComplex
    bases: dict[int, np.ndarray]
    ambiguous: bool = False
    ambiguous_degrees: tuple[int, ...] = ()

    def dim(self, k: int) -> int:
        b = self.bases.get(k)
        return 0 if b is None else b.shape[1]

    def basis(self, k: int) -> np.ndarray:
        b = self.bases.get(k)
        if b is None:
            return np.zeros((self.complex.dim(k), 0), dtype=complex)
        return b

    @property
    def degrees(self) -> list[int]:
        return sorted(k for k, b in self.bases.items() if b.shape[1] > 0)

    def parity_degrees(self, parity: int) -> list[int]:
        return [k for k in self.degrees if k % 2 == parity]

    @property
    def dim_plus(self) -> int:
        return sum(self.dim(k) for k in self.parity_degrees(0))

    @property
    def dim_minus(self) -> int:
        return sum(self.dim(k) for k in self.parity_degrees(1))

    @property
    def index(self) -> int:
        return self.dim_plus - self.dim_minus

    def dims(self) -> dict[int, int]:
        return {k: self.dim(k) for k in self.complex.degree_range() if self.dim(k)}

    def coordinates(self, k: int, z: np.ndarray) -> np.ndarray:
        return self.basis(k).conj().T @ z

    def rescaled(self, k: int, factor: complex) -> "CohomologyData":
        """Same cohomology with the first representative in degree k scaled."""
        bases = dict(self.bases)
        b = self.basis(k).copy()
        if b.shape[1]:
            b[:, 0] *= factor
        bases[k] = b
        return CohomologyData(self.complex, bases, self.ambiguous, self.ambiguous_degrees)

    def coordinate_map(self, k: int) -> np.ndarray:
        """Matrix taking cocycles in degree k to coordinates of their classes.

        Equals the pseudo-inverse of the representative matrix, so rescaled
        (non-orthonormal) bases are handled consistently.
        """
        b = self.basis(k)
        if b.shape[1] == 0:
            return np.zeros((0, self.complex.dim(k)), dtype=complex)
        return np.linalg.pinv(b)


def cohomology(x: CochainComplex, policy: RankPolicy = DEFAULT_POLICY) -> CohomologyData:
    bases = {}
    ambiguous = []
    for k in x.degrees:
        dk = decompose(x.d(k), policy)
        dprev = decompose(x.d(k - 1), policy)
        if dk.ambiguous or dprev.ambiguous:
            ambiguous.append(k)
        kern = dk.kernel_basis
        h = kern.shape[1] - dprev.rank
        if h < 0:
            raise NumericalError(
                f"rank policy inconsistent in degree {k}: dim ker {kern.shape[1]} < "
                f"rank of incoming map {dprev.rank}"
            )
        if h == 0:
            bases[k] = np.zeros((x.dim(k), 0), dtype=complex)
            continue
        im = dprev.range_basis
        projected = kern - im @ (im.conj().T @ kern)
        u, _, _ = np.linalg.svd(projected, full_matrices=False)
        bases[k] = u[:, :h]
    return CohomologyData(x, bases, bool(ambiguous), tuple(ambiguous))


def induced_map(
    f: ChainMap, k: int, hx: CohomologyData, hy: CohomologyData, target_degree: int | None = None
) -> np.ndarray:
    """Matrix of H^k(f) : H^k(X) -> H^t(Y) in the representative bases."""
    t = k if target_degree is None else target_degree
    return hy.coordinate_map(t) @ f.at(k) @ hx.basis(k)


def _block_parity_matrix(
    maps: dict[int, np.ndarray],
    src: CohomologyData,
    dst: CohomologyData,
    src_parity: int,
    shift: int,
) -> np.ndarray:
    """Assemble degreewise maps H^k -> H^(k+shift) into one Z/2-graded block.

    Blocks are ordered by increasing degree on both sides.
    """
    src_degs = src.parity_degrees(src_parity)
    dst_degs = dst.parity_degrees((src_parity + shift) % 2)
    rows = sum(dst.dim(k) for k in dst_degs)
    cols = sum(src.dim(k) for k in src_degs)
    out = np.zeros((rows, cols), dtype=complex)
    row_off = {}
    r = 0
    for k in dst_degs:
        row_off[k] = r
        r += dst.dim(k)
    c = 0
    for k in src_degs:
        t = k + shift
        if t in row_off and k in maps:
            m = maps[k]
            out[row_off[t] : row_off[t] + m.shape[0], c : c + m.shape[1]] = m
        c += src.dim(k)
    return out


def shift(x: CochainComplex) -> CochainComplex:
    """X[1]: X[1]^k = X^(k+1) with differential -d^(k+1)."""
    dims = {k - 1: v for k, v in x.dims.items()}
    diffs = {k - 1: -m for k, m in x.differentials.items()}
    return CochainComplex(dims, diffs)


def shift_map(f: ChainMap) -> ChainMap:
    return ChainMap(
        shift(f.source), shift(f.target), {k - 1: m for k, m in f.components.items()}
    )


# --------------------------------------------------------------------------
# mapping cones


@dataclass
class ConeTriangle:
    """X --f--> Y --i--> C_f --p--> X[1]."""

    f: ChainMap
    cone: CochainComplex
    inclusion: ChainMap
    projection: ChainMap

    def x_slice(self, k: int) -> slice:
        """Rows of C^k holding the X^(k+1) summand."""
        return slice(0, self.f.source.dim(k + 1))

    def y_slice(self, k: int) -> slice:
        a = self.f.source.dim(k + 1)
        return slice(a, a + self.f.target.dim(k))


def mapping_cone(f: ChainMap, tol: float = CHAIN_TOL) -> ConeTriangle:
    """C_f^k = X^(k+1) + Y^k with d = [[-d_X, 0], [f, d_Y]]."""
    f.check(tol)
    x, y = f.source, f.target
    degs = {k - 1 for k in x.degrees} | set(y.degrees)
    dims = {k: x.dim(k + 1) + y.dim(k) for k in degs}
    diffs = {}
    for k in degs:
        a, b = x.dim(k + 1), y.dim(k)
        a2, b2 = x.dim(k + 2), y.dim(k + 1)
        m = np.zeros((a2 + b2, a + b), dtype=complex)
        m[:a2, :a] = -x.d(k + 1)
        m[a2:, :a] = f.at(k + 1)
        m[a2:, a:] = y.d(k)
        diffs[k] = m
    cone = CochainComplex(dims, diffs)
    inc = {}
    proj = {}
    for k in degs:
        a, b = x.dim(k + 1), y.dim(k)
        i = np.zeros((a + b, b), dtype=complex)
        i[a:, :] = np.eye(b)
        inc[k] = i
        p = np.zeros((a, a + b), dtype=complex)
        p[:, :a] = np.eye(a)
        proj[k] = p
    inclusion = ChainMap(y, cone, inc)
    projection = ChainMap(cone, shift(x), proj)
    return ConeTriangle(f, cone, inclusion, projection)


# --------------------------------------------------------------------------
# six-term exact sequences


@dataclass
class SixTermSequence:
    """Exact hexagon V1 -f-> V2 -i-> V -p-> V1[1] of Z/2-graded spaces.

    Matrices are in fixed bases of the six spaces; those bases are the
    reference volumes for torsion computations.

        V1+ --f+--> V2+ --i+--> V+
         ^                       |
        p-                      p+
         |                       v
        V-  <--i-- V2- <--f-- V1-
    """

    f_plus: np.ndarray
    f_minus: np.ndarray
    i_plus: np.ndarray
    i_minus: np.ndarray
    p_plus: np.ndarray
    p_minus: np.ndarray
    ambiguous: bool = False

    @property
    def dims(self) -> dict[str, int]:
        return {
            "V1+": self.f_plus.shape[1],
            "V1-": self.f_minus.shape[1],
            "V2+": self.i_plus.shape[1],
            "V2-": self.i_minus.shape[1],
            "V+": self.p_plus.shape[1],
            "V-": self.p_minus.shape[1],
        }

    def nodes(self):
        """(name, incoming, outgoing) for each of the six nodes."""
        return [
            ("V1+", self.p_minus, self.f_plus),
            ("V2+", self.f_plus, self.i_plus),
            ("V+", self.i_plus, self.p_plus),
            ("V1-", self.p_plus, self.f_minus),
            ("V2-", self.f_minus, self.i_minus),
            ("V-", self.i_minus, self.p_minus),
        ]

    def validate_shapes(self) -> None:
        d = self.dims
        expected = {
            "f_plus": (d["V2+"], d["V1+"]),
            "f_minus": (d["V2-"], d["V1-"]),
            "i_plus": (d["V+"], d["V2+"]),
            "i_minus": (d["V-"], d["V2-"]),
            "p_plus": (d["V1-"], d["V+"]),
            "p_minus": (d["V1+"], d["V-"]),
        }
        for name, shape in expected.items():
            if getattr(self, name).shape != shape:
                raise ModelError(
                    f"six-term map {name} has shape {getattr(self, name).shape}, expected {shape}"
                )

    def exactness_defects(self, policy: RankPolicy = DEFAULT_POLICY) -> dict[str, int]:
        """dim(node) - rank(in) - rank(out) per node; zero iff exact there.

        Also requires the composite out o in to vanish, checked separately by
        :meth:`composite_defect`.
        """
        out = {}
        for name, inc, outg in self.nodes():
            n = inc.shape[0]
            out[name] = n - decompose(inc, policy).rank - decompose(outg, policy).rank
        return out

    def composite_defect(self) -> float:
        worst = 0.0
        for _, inc, outg in self.nodes():
            prod = outg @ inc
            if prod.size:
                worst = max(worst, float(np.max(np.abs(prod))))
        return worst

    def check_exact(self, policy: RankPolicy = DEFAULT_POLICY, tol: float = 1e-7) -> None:
        self.validate_shapes()
        bad = {k: v for k, v in self.exactness_defects(policy).items() if v != 0}
        if bad:
            raise NumericalError(
                f"six-term sequence not exact at {sorted(bad)} (rank policy misclassification?)"
            )
        scale = 1.0 + max(
            [np.abs(m).max() for _, m, _ in self.nodes() if m.size] or [0.0]
        )
        if self.composite_defect() > tol * scale**2:
            raise NumericalError(
                f"six-term sequence composites do not vanish: {self.composite_defect():.3e}"
            )


@dataclass
class ConeSequence:
    """A six-term sequence together with the cohomology data it was built from."""

    sequence: SixTermSequence
    triangle: ConeTriangle
    h_source: CohomologyData
    h_target: CohomologyData
    h_cone: CohomologyData


def six_term(
    f: ChainMap,
    policy: RankPolicy = DEFAULT_POLICY,
    *,
    h_source: CohomologyData | None = None,
    h_target: CohomologyData | None = None,
    h_cone: CohomologyData | None = None,
    check: bool = True,
) -> ConeSequence:
    """Cohomology hexagon of the cone triangle of ``f``.

    Precomputed (possibly rescaled) cohomology data may be supplied; the
    matrices are then expressed in those bases.
    """
    tri = mapping_cone(f)
    hx = h_source if h_source is not None else cohomology(f.source, policy)
    hy = h_target if h_target is not None else cohomology(f.target, policy)
    hc = h_cone if h_cone is not None else cohomology(tri.cone, policy)

    f_maps = {k: induced_map(f, k, hx, hy) for k in hx.degrees}
    i_maps = {k: induced_map(tri.inclusion, k, hy, hc) for k in hy.degrees}
    p_maps = {
        k: hx.coordinate_map(k + 1) @ tri.projection.at(k) @ hc.basis(k) for k in hc.degrees
    }
    seq = SixTermSequence(
        f_plus=_block_parity_matrix(f_maps, hx, hy, 0, 0),
        f_minus=_block_parity_matrix(f_maps, hx, hy, 1, 0),
        i_plus=_block_parity_matrix(i_maps, hy, hc, 0, 0),
        i_minus=_block_parity_matrix(i_maps, hy, hc, 1, 0),
        p_plus=_block_parity_matrix(p_maps, hc, hx, 0, 1),
        p_minus=_block_parity_matrix(p_maps, hc, hx, 1, 1),
        ambiguous=hx.ambiguous or hy.ambiguous or hc.ambiguous,
    )
    if check:
        seq.check_exact(policy)
    return ConeSequence(seq, tri, hx, hy, hc)
