"""Torsion isomorphisms, joint torsion, multiplicative Lefschetz numbers and
joint torsion transition numbers.

Scalars are relative to reference volumes: the wedge of the chosen basis
vectors of each space, in increasing degree order inside ``H^+`` and
``H^-``.  Every graded sign comes from :mod:`torsion_lab.graded`.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from torsion_lab.complexes import (
    ChainMap,
    CochainComplex,
    CohomologyData,
    SixTermSequence,
    _block_parity_matrix,
    cohomology,
    induced_map,
    mapping_cone,
    maps_commute,
    six_term,
)
from torsion_lab.errors import ModelError, NumericalError
from torsion_lab.graded import GradedLineElement, determinant_line_element, mu_exponent
from torsion_lab.koszul import CommutingTuple, build_koszul, koszul_map
from torsion_lab.linalg import DEFAULT_POLICY, LogScalar, RankPolicy, decompose
from torsion_lab.polynomial import MultiPolynomial

CONDITION_WARNING = 1e8
COMMUTE_TOL = 1e-9


class IllConditionedWarning(UserWarning):
    pass


# --------------------------------------------------------------------------
# short exact sequences


def ses_determinant_iso(
    iota: np.ndarray, pi: np.ndarray, policy: RankPolicy = DEFAULT_POLICY, tol: float = 1e-9
) -> complex:
    """Scalar s with |Delta|(vol W) = s vol V (x) vol Z for 0 -> V -> W -> Z -> 0.

    ``iota`` is dim W x dim V, ``pi`` is dim Z x dim W, all in the reference
    bases.
    """
    iota = np.asarray(iota, dtype=complex)
    pi = np.asarray(pi, dtype=complex)
    dim_w = iota.shape[0] if iota.ndim == 2 else pi.shape[1]
    iota = iota.reshape(dim_w, -1)
    pi = pi.reshape(-1, dim_w)
    dim_v, dim_z = iota.shape[1], pi.shape[0]
    if dim_v + dim_z != dim_w:
        raise NumericalError(f"not exact: dim V + dim Z = {dim_v + dim_z} != dim W = {dim_w}")
    if decompose(iota, policy).rank != dim_v or decompose(pi, policy).rank != dim_z:
        raise NumericalError("not exact: inclusion not injective or projection not surjective")
    comp = pi @ iota
    if comp.size and np.max(np.abs(comp)) > tol * (1 + np.abs(pi).max()) * (1 + np.abs(iota).max()):
        raise NumericalError(f"not exact: pi o iota has norm {np.max(np.abs(comp)):.3e}")
    # w_j with pi(w_j) = e_j
    lift = np.linalg.pinv(pi) if dim_z else np.zeros((dim_w, 0))
    m = np.hstack([iota, lift])
    det = LogScalar.det(m)
    # vol W = det^{-1} (v ^ w); |Delta|(v ^ w) = (-1)^{vz} vol V (x) vol Z
    sign = -1 if (dim_v * dim_z) % 2 else 1
    return sign / det.to_complex()


# --------------------------------------------------------------------------
# torsion isomorphism of a six-term sequence


def _complement(kernel: np.ndarray, coimage: np.ndarray, rng: np.random.Generator | None) -> np.ndarray:
    """Columns spanning a complement of the kernel.

    The default is the orthogonal complement; with ``rng`` a random oblique
    complement with a random basis is returned instead.
    """
    if rng is None or coimage.shape[1] == 0:
        return coimage
    r, k = coimage.shape[1], kernel.shape[1]

    def cplx(*shape):
        return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)

    oblique = coimage + (kernel @ cplx(k, r) if k else 0)
    return oblique @ cplx(r, r)


@dataclass
class TorsionReport:
    value: LogScalar
    mu: int
    factors: dict[str, LogScalar]
    complement_dims: dict[str, int]

    @property
    def scalar(self) -> complex:
        return self.value.to_complex()


def torsion_iso_report(
    seq: SixTermSequence,
    policy: RankPolicy = DEFAULT_POLICY,
    rng: np.random.Generator | None = None,
    check: bool = True,
) -> TorsionReport:
    """Evaluate the defining relation of the torsion isomorphism.

    Returns s with |V|(vol V_2) = s vol V_1 (x) vol V.
    """
    if check:
        seq.check_exact(policy)
    maps = {
        "1+": seq.f_plus,
        "1-": seq.f_minus,
        "2+": seq.i_plus,
        "2-": seq.i_minus,
        "+": seq.p_plus,
        "-": seq.p_minus,
    }
    t = {}
    for key, m in maps.items():
        dec = decompose(m, policy)
        t[key] = _complement(dec.kernel_basis, dec.corange_basis, rng)

    def vol(*blocks) -> LogScalar:
        m = np.hstack(blocks)
        if m.shape[0] != m.shape[1]:
            raise NumericalError(
                f"complement volumes do not fill the space ({m.shape}); sequence not exact"
            )
        return LogScalar.det(m)

    a = {
        "1+": vol(seq.p_minus @ t["-"], t["1+"]),
        "1-": vol(seq.p_plus @ t["+"], t["1-"]),
        "2+": vol(seq.f_plus @ t["1+"], t["2+"]),
        "2-": vol(seq.f_minus @ t["1-"], t["2-"]),
        "+": vol(seq.i_plus @ t["2+"], t["+"]),
        "-": vol(seq.i_minus @ t["2-"], t["-"]),
    }
    eps = {k: v.shape[1] for k, v in t.items()}
    mu = mu_exponent(eps["1+"], eps["1-"], eps["2+"], eps["2-"], eps["+"], eps["-"])
    d = seq.dims
    # left side lives in |V_2|, right side in |V_1| (x) |V|
    lhs = determinant_line_element(a["2+"], d["V2+"], a["2-"], d["V2-"])
    rhs = determinant_line_element(a["1+"], d["V1+"], a["1-"], d["V1-"]).tensor(
        determinant_line_element(a["+"], d["V+"], a["-"], d["V-"])
    )
    if mu % 2:
        rhs = rhs.scaled(-1)
    if lhs.degree != rhs.degree:
        raise NumericalError("graded degrees of the torsion relation disagree")
    return TorsionReport(rhs.scalar / lhs.scalar, mu, a, eps)


def torsion_iso(
    seq: SixTermSequence,
    policy: RankPolicy = DEFAULT_POLICY,
    rng: np.random.Generator | None = None,
) -> complex:
    return torsion_iso_report(seq, policy, rng).scalar


def torsion_of_map(
    f: ChainMap,
    policy: RankPolicy = DEFAULT_POLICY,
    rng: np.random.Generator | None = None,
    **cohomology_data,
) -> complex:
    """Torsion isomorphism of H(Delta_f) relative to the cohomology bases.

    ``h_source``/``h_target``/``h_cone`` may pass precomputed bases.
    """
    seq = six_term(f, policy, **cohomology_data).sequence
    return torsion_iso(seq, policy, rng)


# --------------------------------------------------------------------------
# joint torsion


@dataclass
class JointTorsionProblem:
    """Commuting cochain endomorphisms f, g of a finite complex."""

    complex: CochainComplex
    f: dict[int, np.ndarray]
    g: dict[int, np.ndarray]
    policy: RankPolicy = field(default_factory=lambda: DEFAULT_POLICY)
    commute_tol: float = COMMUTE_TOL

    def maps(self) -> tuple[ChainMap, ChainMap]:
        return ChainMap(self.complex, self.complex, self.f), ChainMap(
            self.complex, self.complex, self.g
        )

    def validate(self) -> tuple[ChainMap, ChainMap]:
        f, g = self.maps()
        f.check()
        g.check()
        scale = 1.0 + max(
            [np.abs(m).max() for m in list(f.components.values()) + list(g.components.values())]
            or [0.0]
        )
        defect = maps_commute(f, g)
        if defect > self.commute_tol * scale**2:
            raise ModelError(f"f and g do not commute: defect norm {defect:.3e}")
        return f, g


def delta(f: ChainMap, on: CochainComplex) -> ChainMap:
    """diag(f^{k+1}, f^k) acting on a cone C^k = X^{k+1} + X^k."""
    comps = {}
    for k in on.degrees:
        a, b = f.at(k + 1), f.at(k)
        m = np.zeros((a.shape[0] + b.shape[0], a.shape[1] + b.shape[1]), dtype=complex)
        m[: a.shape[0], : a.shape[1]] = a
        m[a.shape[0] :, a.shape[1] :] = b
        comps[k] = m
    return ChainMap(on, on, comps)


def cone_swap(x: CochainComplex, c_dg: CochainComplex, c_df: CochainComplex) -> ChainMap:
    """Phi : C_{delta(g)} -> C_{delta(f)}, (a, b, c, e) -> (-a, c, b, e).

    Block order (X^{k+2}, X^{k+1}, X^{k+1}, X^k).
    """
    comps = {}
    for k in set(c_dg.degrees) | set(c_df.degrees):
        n2, n1, n0 = x.dim(k + 2), x.dim(k + 1), x.dim(k)
        size = n2 + 2 * n1 + n0
        m = np.zeros((size, size), dtype=complex)
        m[:n2, :n2] = -np.eye(n2)
        m[n2 : n2 + n1, n2 + n1 : n2 + 2 * n1] = np.eye(n1)
        m[n2 + n1 : n2 + 2 * n1, n2 : n2 + n1] = np.eye(n1)
        m[n2 + 2 * n1 :, n2 + 2 * n1 :] = np.eye(n0)
        comps[k] = m
    return ChainMap(c_dg, c_df, comps)


def _parity_det(maps: dict[int, np.ndarray], src: CohomologyData, dst: CohomologyData, parity: int) -> LogScalar:
    block = _block_parity_matrix(maps, src, dst, parity, 0)
    if block.shape[0] != block.shape[1]:
        raise NumericalError("induced isomorphism is not square")
    return LogScalar.det(block)


def _trivialize(s: LogScalar, h_base: CohomologyData, h_cone: CohomologyData) -> GradedLineElement:
    """Image of 1 under F = |C| (x) |C|^dagger -> |C_delta| for a torsion scalar s.

    R (x) R^dagger  |->  s R (x) R' (x) R^dagger  |->  s (-1)^{...} R (x) R^dagger (x) R'
    and the evaluation R (x) R^dagger -> 1 leaves a multiple of R'.
    """
    base = determinant_line_element(LogScalar(), h_base.dim_plus, LogScalar(), h_base.dim_minus)
    cone = determinant_line_element(LogScalar(), h_cone.dim_plus, LogScalar(), h_cone.dim_minus)
    moved = cone.swap(base.dagger())  # R' (x) R^dagger -> R^dagger (x) R'
    sign = moved.scalar / (cone.scalar * base.dagger().scalar)
    unit = base.evaluate(base.dagger())
    return GradedLineElement(s * sign * unit, cone.degree)


@dataclass
class JointTorsionReport:
    value: LogScalar
    torsion_g: LogScalar
    torsion_f: LogScalar
    phi: LogScalar
    index_c_f: int
    index_c_g: int
    ambiguous: bool

    @property
    def scalar(self) -> complex:
        return self.value.to_complex()


def joint_torsion_report(
    problem: JointTorsionProblem,
    rng: np.random.Generator | None = None,
    volume_rescale: dict[str, dict[int, complex]] | None = None,
) -> JointTorsionReport:
    """JT(X; f, g) = |H(Delta_{delta f})|^{-1} o |Phi| o |H(Delta_{delta g})|.

    ``volume_rescale`` maps one of ``"C_f", "C_g", "C_df", "C_dg"`` to
    ``{degree: factor}`` and rescales the first cohomology representative
    there; the result must not change.
    """
    policy = problem.policy
    f, g = problem.validate()
    x = problem.complex
    cf = mapping_cone(f).cone
    cg = mapping_cone(g).cone
    dg = delta(g, cf)
    df = delta(f, cg)
    c_dg = mapping_cone(dg).cone
    c_df = mapping_cone(df).cone

    rescale = volume_rescale or {}

    def coh(name, cx):
        h = cohomology(cx, policy)
        for k, factor in rescale.get(name, {}).items():
            h = h.rescaled(k, factor)
        return h

    h_cf, h_cg = coh("C_f", cf), coh("C_g", cg)
    h_cdg, h_cdf = coh("C_dg", c_dg), coh("C_df", c_df)

    seq_g = six_term(dg, policy, h_source=h_cf, h_target=h_cf, h_cone=h_cdg).sequence
    seq_f = six_term(df, policy, h_source=h_cg, h_target=h_cg, h_cone=h_cdf).sequence
    s_g = torsion_iso_report(seq_g, policy, rng).value
    s_f = torsion_iso_report(seq_f, policy, rng).value

    phi_map = cone_swap(x, c_dg, c_df)
    phi_map.check()
    induced = {k: induced_map(phi_map, k, h_cdg, h_cdf) for k in h_cdg.degrees}
    if h_cdg.dims() != h_cdf.dims():
        raise NumericalError("cohomology of the two double cones differs; rank policy issue")
    phi = _parity_det(induced, h_cdg, h_cdf, 0) / _parity_det(induced, h_cdg, h_cdf, 1)

    from_g = _trivialize(s_g, h_cf, h_cdg)
    from_f = _trivialize(s_f, h_cg, h_cdf)
    # |Phi| maps from_g into |C_delta(f)|, compare with from_f
    value = from_g.scaled(phi).ratio(from_f)
    ambiguous = any(h.ambiguous for h in (h_cf, h_cg, h_cdg, h_cdf))
    return JointTorsionReport(value, s_g, s_f, phi, h_cf.index, h_cg.index, ambiguous)


def joint_torsion(
    problem: JointTorsionProblem,
    rng: np.random.Generator | None = None,
    volume_rescale: dict[str, dict[int, complex]] | None = None,
) -> complex:
    return joint_torsion_report(problem, rng, volume_rescale).scalar


# --------------------------------------------------------------------------
# Lefschetz numbers and the nonsingular formula


def lefschetz(
    f: ChainMap,
    policy: RankPolicy = DEFAULT_POLICY,
    h: CohomologyData | None = None,
) -> complex:
    """det H^+(f) / det H^-(f) for an endomorphism f."""
    if f.source is not f.target and f.source.dims != f.target.dims:
        raise ModelError("Lefschetz number needs an endomorphism")
    f.check()
    h = h or cohomology(f.source, policy)
    induced = {k: induced_map(f, k, h, h) for k in h.degrees}
    out = LogScalar()
    for parity in (0, 1):
        block = _block_parity_matrix(induced, h, h, parity, 0)
        if block.size == 0:
            continue
        dec = decompose(block, policy)
        scale = max(1.0, max((np.abs(m).max() for m in f.components.values()), default=1.0))
        if dec.rank < block.shape[0] or dec.singular_values[-1] <= policy.absolute_floor * scale:
            raise ModelError(
                f"Lefschetz undefined: H^{'+' if parity == 0 else '-'}(f) is singular"
            )
        cond = dec.singular_values[0] / dec.singular_values[-1]
        if cond > CONDITION_WARNING:
            warnings.warn(
                f"H^{'+-'[parity]}(f) is ill-conditioned (condition number {cond:.2e})",
                IllConditionedWarning,
                stacklevel=2,
            )
        det = LogScalar.det(block)
        out = out * det if parity == 0 else out / det
    return out.to_complex()


def evaluate_tuple(a: CommutingTuple, polys) -> CommutingTuple:
    """(p_1(A), ..., p_m(A)) via polynomial functional calculus."""
    mats = [p.eval_matrices(a.matrices) for p in polys]
    return CommutingTuple(mats, a.commute_tol, a.dim)


def _as_polys(polys, nvars) -> list[MultiPolynomial]:
    out = []
    for p in polys:
        if not isinstance(p, MultiPolynomial):
            raise ModelError("expected MultiPolynomial inputs")
        if p.nvars != nvars:
            raise ModelError(f"polynomial in {p.nvars} variables for a {nvars}-tuple")
        out.append(p)
    return out


def koszul_joint_torsion_problem(
    a: CommutingTuple, base, f, g, policy: RankPolicy = DEFAULT_POLICY
) -> JointTorsionProblem:
    """JT problem for K(base(A), H) with the maps f(A) (x) 1 and g(A) (x) 1."""
    base = _as_polys(base, a.n)
    f, g = _as_polys([f, g], a.n)
    tup = evaluate_tuple(a, base) if base else CommutingTuple([], a.commute_tol, a.dim)
    k = build_koszul(tup, check=False)
    fm = koszul_map(tup, f.eval_matrices(a.matrices), check=False)
    gm = koszul_map(tup, g.eval_matrices(a.matrices), check=False)
    return JointTorsionProblem(k, fm.components, gm.components, policy)


def joint_torsion_nonsingular(
    a: CommutingTuple, h, f: MultiPolynomial, g: MultiPolynomial, policy: RankPolicy = DEFAULT_POLICY
) -> complex:
    """M(K((h, g), H); f) / M(K((h, f), H); g), valid when K((h, f, g), H) is acyclic."""
    a.check()
    h = _as_polys(h, a.n)
    f, g = _as_polys([f, g], a.n)
    triple = evaluate_tuple(a, h + [f, g])
    hk = cohomology(build_koszul(triple, check=False), policy)
    if hk.degrees:
        raise ModelError(
            "K((h, f, g), H) is not acyclic (Z(h, f, g) is nonempty); "
            "use the limit procedure in torsion_lab.tame_symbol instead"
        )
    fm = f.eval_matrices(a.matrices)
    gm = g.eval_matrices(a.matrices)
    hg = evaluate_tuple(a, h + [g])
    hf = evaluate_tuple(a, h + [f])
    m_f = lefschetz(koszul_map(hg, fm, check=False), policy)
    m_g = lefschetz(koszul_map(hf, gm, check=False), policy)
    return m_f / m_g


def transition_number(
    a: CommutingTuple,
    polys,
    i: int,
    j: int,
    policy: RankPolicy = DEFAULT_POLICY,
    rng: np.random.Generator | None = None,
) -> complex:
    """tau_{i,j} = JT(K(g without {i, j}, H); g_i, g_j), indices 0-based."""
    polys = _as_polys(polys, a.n)
    m = len(polys)
    if not (0 <= i < m and 0 <= j < m):
        raise ModelError(f"transition index out of range 0..{m - 1}: ({i}, {j})")
    rest = [p for k, p in enumerate(polys) if k not in (i, j)]
    prob = koszul_joint_torsion_problem(a, rest, polys[i], polys[j], policy)
    return joint_torsion(prob, rng)
