"""Tame symbols of plane-curve local models and the classical Hardy-space
formulas.

The local symbol c_lambda(h; f, g) is computed as the limit of

    q(w) = (f(lambda) - w)^{m_lambda(h, g)}
           / prod_{nu in Z(h, f - w), |nu - lambda| < eps/2} g(nu)^{m_nu(h, f - w)}

along w_k = w0 * rho^k * exp(i theta).  Hardy-space facts used by the
models: on H^2 of the unit disc (resp. bidisc) the Toeplitz tuple of the
coordinates has Taylor spectrum the closed disc (polydisc), essential
spectrum its boundary, and Ind(A - lambda) = 1 at every interior point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from torsion_lab.errors import BoundaryZeroError, ModelError, NumericalError, StabilizationError
from torsion_lab.koszul import CommutingTuple, build_koszul, joint_spectrum
from torsion_lab.complexes import cohomology
from torsion_lab.linalg import DEFAULT_POLICY, LogScalar, RankPolicy, relative_gap
from torsion_lab.local_algebra import multiplicity, solve_system, univariate_roots
from torsion_lab.polynomial import MultiPolynomial

GOLDEN_ANGLE = math.pi * (3 - math.sqrt(5))
MAX_ROTATIONS = 8
BOUNDARY_SAMPLES = 256
CIRCLE_TOL = 1e-9
DISC_INDEX = 1  # Ind(A - lambda) for lambda inside the disc / polydisc models
ORDER_TOL = 1e-8


@dataclass
class LimitSchedule:
    w0: float = 1e-2
    ratio: float = 0.5
    theta: float | None = None
    max_steps: int = 40
    stabilization_tol: float = 1e-7

    def __post_init__(self):
        if not (self.w0 > 0 and 0 < self.ratio < 1 and self.max_steps >= 3):
            raise ModelError("schedule needs w0 > 0, 0 < ratio < 1 and max_steps >= 3")
        if self.stabilization_tol <= 0:
            raise ModelError("stabilization_tol must be positive")

    def points(self, w0: float, theta: float):
        direction = complex(math.cos(theta), math.sin(theta))
        return [w0 * self.ratio**k * direction for k in range(self.max_steps)]


@dataclass
class SymbolProblem:
    """Local model (h; f, g) at a point of Z(h) in C^2."""

    h: MultiPolynomial
    f: MultiPolynomial
    g: MultiPolynomial
    point: tuple[complex, complex]
    epsilon: float | None = None

    def __post_init__(self):
        for name in ("h", "f", "g"):
            p = getattr(self, name)
            if not isinstance(p, MultiPolynomial) or p.nvars != 2:
                raise ModelError(f"{name} must be a polynomial in 2 variables")
        pt = tuple(complex(c) for c in np.atleast_1d(self.point))
        if len(pt) != 2:
            raise ModelError("the base point must have 2 coordinates")
        self.point = pt
        if self.epsilon is not None and not self.epsilon > 0:
            raise ModelError("epsilon must be positive")


@dataclass
class SymbolResult:
    value: complex
    steps: int
    theta: float
    w0: float
    epsilon: float
    rotations: int
    trace: list[tuple[complex, complex]] = field(default_factory=list)


def _scale(p: MultiPolynomial) -> float:
    return max(p.max_abs_coeff(), 1e-300)


def _max_dist(a, b) -> float:
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def _nearby_zeros(h, f, center, radius: float):
    """Zeros of (h, f) in a polydisc, shrinking slightly on boundary hits."""
    r = radius
    for _ in range(6):
        try:
            return solve_system([h, f], center, r)
        except BoundaryZeroError:
            r *= 0.97
    raise BoundaryZeroError("could not find a collision-free search radius")


def choose_epsilon(prob: SymbolProblem, search_radius: float = 1.0, cap: float = 0.5) -> float:
    """Radius isolating the base point inside Z(h, f) and Z(h, g)."""
    lam = np.array(prob.point)
    others = []
    for q in (prob.f, prob.g):
        for z in _nearby_zeros(prob.h, q, lam, search_radius):
            d = _max_dist(z.point, lam)
            if d > 1e-7:
                others.append(d)
    return min([cap] + [0.9 * d for d in others])


def validate_symbol_problem(prob: SymbolProblem, epsilon: float) -> None:
    lam = np.array(prob.point)
    if abs(prob.h.eval(lam)) > 1e-9 * _scale(prob.h) * (1 + np.max(np.abs(lam))) ** max(prob.h.total_degree(), 1):
        raise ModelError("base point is not on the curve Z(h)")
    for name, q in (("f", prob.f), ("g", prob.g)):
        for z in _nearby_zeros(prob.h, q, lam, epsilon):
            if _max_dist(z.point, lam) > 1e-7:
                raise ModelError(
                    f"Z(h, {name}) has another zero {np.round(z.point, 9).tolist()} within "
                    f"epsilon = {epsilon:g} of the base point; shrink epsilon"
                )


def _curve_points_on_boundary(h: MultiPolynomial, center, r: float, samples: int):
    """Points of Z(h) on the boundary of the polydisc of radius r."""
    c = np.asarray(center, dtype=complex)
    pts = []
    angles = np.exp(2j * np.pi * (np.arange(samples) + 0.5) / samples)
    for var in (0, 1):
        other = 1 - var
        for a in angles:
            val = c[var] + r * a
            fibre = h.substitute(var, val)
            coeffs = np.zeros(max(fibre.degree_in(other), 0) + 1, dtype=complex)
            for e, cf in fibre.terms.items():
                coeffs[e[other]] += cf
            if len(coeffs) <= 1:
                continue
            for root, _ in univariate_roots(coeffs):
                if abs(root - c[other]) <= r:
                    z = np.zeros(2, dtype=complex)
                    z[var], z[other] = val, root
                    pts.append(z)
    return pts


def perturbation_bound(prob: SymbolProblem, epsilon: float, samples: int = BOUNDARY_SAMPLES) -> tuple[float, float]:
    """(delta0, delta1): min |f| over Z(h) on the boundary of the eps/2 polydisc,
    and |f(lambda)| when g vanishes at lambda but f does not (inf otherwise)."""
    lam = np.array(prob.point)
    pts = _curve_points_on_boundary(prob.h, lam, epsilon / 2, samples)
    delta0 = min((abs(prob.f.eval(z)) for z in pts), default=math.inf)
    f_lam = abs(prob.f.eval(lam))
    g_lam = abs(prob.g.eval(lam))
    delta1 = f_lam if g_lam <= 1e-12 * _scale(prob.g) and f_lam > 1e-12 * _scale(prob.f) else math.inf
    return delta0, delta1


def _scaled(p: MultiPolynomial, s: float, shift: complex = 0j) -> MultiPolynomial:
    """p(s X) + shift, normalized, built without relative pruning so tiny shifts survive."""
    terms = {e: c * s ** sum(e) for e, c in p.terms.items()}
    if shift:
        terms[(0, 0)] = terms.get((0, 0), 0j) + shift
    big = max((abs(c) for c in terms.values()), default=0.0)
    return MultiPolynomial(2, {e: c / big for e, c in terms.items()} if big else terms)


def _cluster_in_window(prob: SymbolProblem, w: complex, s: float, limit: float, m_f: int):
    """Zeros in growing windows |X| <= R of the system rescaled by s.

    Terms pruned after rescaling are negligible only for moderate |X|, so the
    window grows until the zeros found account for the full multiplicity.
    """
    h, f = _scaled(prob.h, s), _scaled(prob.f, s, -w)
    r = 4.0
    while True:
        r = min(r, limit / s)
        try:
            zs = solve_system([h, f], (0, 0), r, cluster_tol=1e-7, boundary_tol=1e-9)
        except BoundaryZeroError:
            r *= 1.3
            continue
        if zs.total_multiplicity() == m_f:
            return [(s * z.point, z.multiplicity) for z in zs]
        if r >= limit / s:
            return None
        r *= 4.0


def _perturbed_zeros(prob: SymbolProblem, w: complex, epsilon: float, m_f: int):
    """Zeros of (h, f - w) near the base point, which sits at the origin.

    For small w these are the m_f zeros splitting off the base point.  They
    shrink far below any absolute clustering tolerance, so the system is
    solved in coordinates X = z / s with s tracking the cluster size.
    """
    plain = None
    if m_f:
        s = abs(w) ** (1.0 / m_f)
        for _ in range(4):
            pts = _cluster_in_window(prob, w, s, epsilon / 2, m_f)
            if pts is None:
                break
            plain = pts
            size = max(float(np.max(np.abs(z))) for z, _ in pts)
            if not 0 < size < 1e-2 * s:
                break
            s = size
    if plain is None:
        zs = solve_system([prob.h, prob.f - w], np.array(prob.point), epsilon / 2)
        plain = [(z.point, z.multiplicity) for z in zs]
    return plain


def _q_value(prob: SymbolProblem, w: complex, m_g: int, m_f: int, epsilon: float) -> complex:
    zeros = _perturbed_zeros(prob, w, epsilon, m_f)
    num = LogScalar.from_complex(prob.f.eval(np.array(prob.point)) - w) ** m_g
    den = LogScalar()
    for point, mult in zeros:
        gv = prob.g.eval(point)
        if gv == 0:
            raise NumericalError("g vanishes at a perturbed zero; Z(h, f - w, g) is not empty")
        den = den * LogScalar.from_complex(gv) ** mult
    return (num / den).to_complex()


def _germ(p: MultiPolynomial, point, tol: float = 1e-12) -> MultiPolynomial:
    """p(z + point) with a negligible constant term dropped."""
    local = p.shift(point)
    const = local.terms.get((0, 0), 0j)
    if abs(const) <= tol * _scale(p) * (1 + float(np.max(np.abs(point)))) ** max(p.total_degree(), 1):
        terms = dict(local.terms)
        terms.pop((0, 0), None)
        local = MultiPolynomial(2, terms)
    return local


def localize(prob: SymbolProblem) -> SymbolProblem:
    """The same germ moved to the origin; evaluations near the base point then
    avoid cancellation between large expanded coefficients."""
    pt = np.array(prob.point)
    return SymbolProblem(
        _germ(prob.h, pt), _germ(prob.f, pt), _germ(prob.g, pt), (0, 0), prob.epsilon
    )


def tame_symbol_local(
    prob: SymbolProblem,
    schedule: LimitSchedule | None = None,
    seed: int = 42,
    trace: bool = False,
) -> SymbolResult:
    """c_lambda(h; f, g) by the perturbation limit along (h, f - w, g)."""
    schedule = schedule or LimitSchedule()
    rng = np.random.default_rng(seed)
    theta = schedule.theta if schedule.theta is not None else float(rng.uniform(0, 2 * math.pi))
    epsilon = prob.epsilon if prob.epsilon is not None else choose_epsilon(prob)
    validate_symbol_problem(prob, epsilon)
    prob = localize(prob)
    lam = np.array(prob.point)
    m_g = multiplicity([prob.h, prob.g], lam)
    m_f = multiplicity([prob.h, prob.f], lam)
    delta0, delta1 = perturbation_bound(prob, epsilon)
    w0 = min(schedule.w0, 0.5 * delta0, 0.5 * delta1)
    if not w0 > 0:
        raise NumericalError("perturbation bound is zero; f vanishes on Z(h) near the boundary")

    tail: list[tuple[complex, complex]] = []
    for rotation in range(MAX_ROTATIONS + 1):
        history: list[tuple[complex, complex]] = []
        try:
            for k, w in enumerate(schedule.points(w0, theta)):
                q = _q_value(prob, w, m_g, m_f, epsilon)
                history.append((w, q))
                if len(history) >= 3:
                    vals = [v for _, v in history[-3:]]
                    if all(
                        relative_gap(vals[i], vals[i + 1]) <= schedule.stabilization_tol
                        for i in range(2)
                    ):
                        return SymbolResult(
                            vals[-1], k + 1, theta, w0, epsilon, rotation,
                            history if trace else [],
                        )
        except BoundaryZeroError:
            theta = (theta + GOLDEN_ANGLE) % (2 * math.pi)
            continue
        tail = history[-5:]
        raise StabilizationError(
            f"limit did not stabilize within {schedule.max_steps} steps", tail=tail
        )
    raise BoundaryZeroError(
        f"perturbed zeros hit the boundary for {MAX_ROTATIONS + 1} directions; shrink epsilon"
    )


# --------------------------------------------------------------------------
# regular points


def vanishing_order(coeffs, x0: complex, tol: float = ORDER_TOL) -> tuple[int, np.ndarray]:
    """Write p = (z - x0)^m phi by repeated synthetic division.

    Coefficients are in increasing degree order; returns (m, phi coeffs).
    """
    c = np.asarray(coeffs, dtype=complex)
    if not np.any(c):
        raise ModelError("the zero polynomial has no vanishing order")
    x0 = complex(x0)
    m = 0
    while len(c) > 1:
        scale = float(np.sum(np.abs(c) * np.abs(x0) ** np.arange(len(c))))
        # synthetic division by (z - x0), highest degree first
        hi = c[::-1]
        quot = np.empty(len(hi) - 1, dtype=complex)
        acc = 0j
        for i, a in enumerate(hi[:-1]):
            acc = acc * x0 + a
            quot[i] = acc
        rem = acc * x0 + hi[-1]
        if abs(rem) > tol * max(scale, 1e-300):
            break
        c = quot[::-1]
        m += 1
    return m, c


def _horner1(c: np.ndarray, x: complex) -> complex:
    acc = 0j
    for a in c[::-1]:
        acc = acc * x + a
    return acc


def _coeffs1(p) -> np.ndarray:
    if isinstance(p, MultiPolynomial):
        if p.nvars != 1:
            raise ModelError("expected a univariate polynomial")
        return p.univariate_coeffs(0)
    return np.asarray(p, dtype=complex)


def tame_symbol_regular(f, g, x0: complex) -> complex:
    """(-1)^{mk} phi(x0)^k / psi(x0)^m with f = (z-x0)^m phi, g = (z-x0)^k psi."""
    m, phi = vanishing_order(_coeffs1(f), x0)
    k, psi = vanishing_order(_coeffs1(g), x0)
    val = LogScalar.from_complex(_horner1(phi, x0)) ** k / LogScalar.from_complex(_horner1(psi, x0)) ** m
    if (m * k) % 2:
        val = -val
    return val.to_complex()


def embed_univariate(p: MultiPolynomial) -> MultiPolynomial:
    """p(z) as p(x) in C[x, y]."""
    if p.nvars != 1:
        raise ModelError("expected a univariate polynomial")
    return MultiPolynomial(2, {(e[0], 0): c for e, c in p.terms.items()})


def coordinate_curve() -> MultiPolynomial:
    """h = y, whose zero set is the x-axis."""
    return MultiPolynomial.variable(2, 1)


# --------------------------------------------------------------------------
# the disc model


@dataclass
class DiscModelProblem:
    """Toeplitz operators T_f, T_g on H^2 of the unit disc."""

    f: MultiPolynomial
    g: MultiPolynomial

    def __post_init__(self):
        for name in ("f", "g"):
            p = getattr(self, name)
            if not isinstance(p, MultiPolynomial) or p.nvars != 1:
                raise ModelError(f"{name} must be a univariate polynomial")
            if p.is_zero():
                raise ModelError(f"{name} is the zero polynomial")

    def validate(self) -> None:
        for name, p in (("f", self.f), ("g", self.g)):
            for r, _ in univariate_roots(p.univariate_coeffs(0)):
                if abs(abs(r) - 1) <= CIRCLE_TOL:
                    raise ModelError(f"{name} vanishes on the unit circle at {r:.6g}; T_{name} is not Fredholm")

    def interior_zeros(self) -> list[complex]:
        """Zeros of f or g in the open disc (merged, sorted)."""
        pts: list[complex] = []
        for p in (self.f, self.g):
            for r, _ in univariate_roots(p.univariate_coeffs(0)):
                if abs(r) < 1 and all(abs(r - q) > 1e-7 for q in pts):
                    pts.append(r)
        return sorted(pts, key=lambda z: (z.real, z.imag))

    def all_zeros(self) -> list[complex]:
        out = []
        for p in (self.f, self.g):
            out += [r for r, _ in univariate_roots(p.univariate_coeffs(0))]
        return out


@dataclass
class GlobalResult:
    value: complex
    factors: list[dict]


def _isolating_radius(lam, zeros, cap: float = 0.5) -> float:
    d = [_max_dist(lam, z) for z in zeros if _max_dist(lam, z) > 1e-7]
    return min([cap] + [0.9 * x for x in d])


def joint_torsion_global_disc(
    prob: DiscModelProblem,
    route: str = "limit",
    schedule: LimitSchedule | None = None,
    seed: int = 42,
) -> GlobalResult:
    """prod over zeros in the disc of c_lambda(f, g)^{Ind(T_z - lambda)}."""
    prob.validate()
    zeros = prob.all_zeros()
    total = LogScalar()
    factors = []
    h = coordinate_curve()
    f2, g2 = embed_univariate(prob.f), embed_univariate(prob.g)
    for lam in prob.interior_zeros():
        if route == "regular":
            c = tame_symbol_regular(prob.f, prob.g, lam)
        elif route == "limit":
            eps = _isolating_radius([lam], [[z] for z in zeros])
            c = tame_symbol_local(SymbolProblem(h, f2, g2, (lam, 0), eps), schedule, seed).value
        else:
            raise ModelError(f"unknown route {route!r}")
        total = total * LogScalar.from_complex(c) ** DISC_INDEX
        factors.append({"point": lam, "index": DISC_INDEX, "symbol": c})
    return GlobalResult(total.to_complex(), factors)


def disc_nonsingular_formula(prob: DiscModelProblem) -> complex:
    """prod_{Z(g)} f^{m} / prod_{Z(f)} g^{m} over the disc; needs no common zeros."""
    prob.validate()
    out = LogScalar()
    for r, m in univariate_roots(prob.g.univariate_coeffs(0)):
        if abs(r) < 1:
            out = out * LogScalar.from_complex(prob.f.eval([r])) ** m
    for r, m in univariate_roots(prob.f.univariate_coeffs(0)):
        if abs(r) < 1:
            out = out / LogScalar.from_complex(prob.g.eval([r])) ** m
    if out.is_zero() or not math.isfinite(out.log_abs):
        raise ModelError("f and g share a zero in the disc; use the limit procedure")
    return out.to_complex()


def carey_pincus(prob: DiscModelProblem) -> complex:
    """prod_{|lambda|<1} (-1)^{m(g)m(f)} lim g^{m(f)} / f^{m(g)}, evaluated literally."""
    prob.validate()
    fc, gc = prob.f.univariate_coeffs(0), prob.g.univariate_coeffs(0)
    out = LogScalar()
    for lam in prob.interior_zeros():
        mf, phi = vanishing_order(fc, lam)
        mg, psi = vanishing_order(gc, lam)
        factor = LogScalar.from_complex(_horner1(psi, lam)) ** mf / LogScalar.from_complex(
            _horner1(phi, lam)
        ) ** mg
        if (mf * mg) % 2:
            factor = -factor
        out = out * factor
    return out.to_complex()


# --------------------------------------------------------------------------
# the bidisc model


def _zeros_in_unit_polydisc(h, q):
    zs = solve_system([h, q], (0, 0), 1.0)
    return [(z.point, z.multiplicity) for z in zs]


def joint_torsion_global_polydisc(
    h: MultiPolynomial,
    f: MultiPolynomial,
    g: MultiPolynomial,
    schedule: LimitSchedule | None = None,
    seed: int = 42,
) -> GlobalResult:
    """Toeplitz pair on H^2 of the bidisc: prod_lambda c_lambda(h; f, g)."""
    zf = _zeros_in_unit_polydisc(h, f)
    zg = _zeros_in_unit_polydisc(h, g)
    pts: list[np.ndarray] = []
    for z, _ in zf + zg:
        if all(_max_dist(z, p) > 1e-7 for p in pts):
            pts.append(z)
    wide = [z.point for q in (f, g) for z in _nearby_zeros(h, q, (0, 0), 3.0)]
    total = LogScalar()
    factors = []
    for lam in pts:
        eps = _isolating_radius(lam, wide)
        c = tame_symbol_local(SymbolProblem(h, f, g, tuple(lam), eps), schedule, seed).value
        total = total * LogScalar.from_complex(c) ** DISC_INDEX
        factors.append({"point": lam, "index": DISC_INDEX, "symbol": c})
    return GlobalResult(total.to_complex(), factors)


def polydisc_nonsingular_formula(h, f, g) -> complex:
    """prod_{Z(h,g)} f^{m(h,g)} / prod_{Z(h,f)} g^{m(h,f)} over the bidisc."""
    out = LogScalar()
    for z, m in _zeros_in_unit_polydisc(h, g):
        out = out * LogScalar.from_complex(f.eval(z)) ** m
    for z, m in _zeros_in_unit_polydisc(h, f):
        out = out / LogScalar.from_complex(g.eval(z)) ** m
    if out.is_zero() or not math.isfinite(out.log_abs):
        raise ModelError("Z(h, f, g) meets the polydisc; use the limit procedure")
    return out.to_complex()


# --------------------------------------------------------------------------
# matrix models


def local_index(a: CommutingTuple, point, policy: RankPolicy = DEFAULT_POLICY) -> int:
    return cohomology(build_koszul(a.shifted(point), check=False), policy).index


def joint_torsion_global_matrix(
    a: CommutingTuple,
    h,
    f: MultiPolynomial,
    g: MultiPolynomial,
    policy: RankPolicy = DEFAULT_POLICY,
    schedule: LimitSchedule | None = None,
    seed: int = 42,
) -> GlobalResult:
    """prod over joint eigenvalues in Z(h,f) u Z(h,g) of c_lambda^{Ind(A - lambda)}.

    The essential spectrum of a matrix tuple is empty.  Symbols are only
    evaluated where the index is nonzero, which needs a plane local model.
    """
    a.check()
    h = list(h)
    total = LogScalar()
    factors = []
    for point, _ in joint_spectrum(a):
        vals_h = [abs(p.eval(point)) for p in h]
        tol = 1e-7
        on_curve = all(v <= tol * (1 + _scale(p)) for v, p in zip(vals_h, h))
        hits = on_curve and (
            abs(f.eval(point)) <= tol * (1 + _scale(f)) or abs(g.eval(point)) <= tol * (1 + _scale(g))
        )
        if not hits:
            continue
        ind = local_index(a, point, policy)
        entry = {"point": point, "index": ind, "symbol": None}
        if ind:
            if a.n != 2 or len(h) != 1:
                raise ModelError("nonzero local index needs a plane local model (n = 2, one h)")
            c = tame_symbol_local(SymbolProblem(h[0], f, g, tuple(point)), schedule, seed).value
            entry["symbol"] = c
            total = total * LogScalar.from_complex(c) ** ind
        factors.append(entry)
    return GlobalResult(total.to_complex(), factors)


def explicit_product_matrix(
    a: CommutingTuple, h, f: MultiPolynomial, g: MultiPolynomial, policy: RankPolicy = DEFAULT_POLICY
) -> complex:
    """prod f(lambda)^{m_lambda(h,g) Ind} / prod g(mu)^{m_mu(h,f) Ind} over the joint spectrum.

    Multiplicities are local degrees of the polynomial systems, so this
    needs len(h) = n - 1 and n <= 2 (otherwise only index-zero points may
    contribute, which is checked).
    """
    h = list(h)
    out = LogScalar()
    for point, _ in joint_spectrum(a):
        ind = local_index(a, point, policy)
        if ind == 0:
            continue
        out = out * LogScalar.from_complex(f.eval(point)) ** (multiplicity(h + [g], point) * ind)
        out = out / LogScalar.from_complex(g.eval(point)) ** (multiplicity(h + [f], point) * ind)
    return out.to_complex()


def joint_torsion_global(model, h, f, g, **kw) -> GlobalResult:
    """Dispatch on the model: a DiscModelProblem, the string "polydisc", or a CommutingTuple."""
    if isinstance(model, DiscModelProblem):
        return joint_torsion_global_disc(model, **kw)
    if model == "polydisc":
        return joint_torsion_global_polydisc(h[0] if isinstance(h, (list, tuple)) else h, f, g, **kw)
    if isinstance(model, CommutingTuple):
        return joint_torsion_global_matrix(model, h, f, g, **kw)
    raise ModelError(f"unknown model {model!r}")


# --------------------------------------------------------------------------
# Noether index


@dataclass
class NoetherResult:
    index: int
    winding: float
    disc_root_count: int


def noether_index(f: MultiPolynomial, nodes: int = 4096) -> NoetherResult:
    """-(winding number of f around the unit circle), cross-checked by root count."""
    c = _coeffs1(f)
    if not np.any(c):
        raise ModelError("the zero polynomial has no index")
    z = np.exp(2j * np.pi * np.arange(nodes) / nodes)
    vals = np.polyval(c[::-1], z)
    if np.min(np.abs(vals)) <= CIRCLE_TOL * np.sum(np.abs(c)):
        raise NumericalError("near-circle zero: f vanishes on the unit circle")
    dc = (np.arange(len(c)) * c)[1:]
    dvals = np.polyval(dc[::-1], z) if len(dc) else np.zeros_like(z)
    winding = complex(np.mean(dvals / vals * z))
    w = winding.real
    if abs(w - round(w)) > 0.1 or abs(winding.imag) > 0.1:
        raise NumericalError(f"near-circle zero: quadrature winding {winding:.4g} is not near an integer")
    index = -int(round(w))
    count = sum(m for r, m in univariate_roots(c) if abs(r) < 1)
    if index != -count:
        raise NumericalError(
            f"winding quadrature ({-index}) disagrees with the root count in the disc ({count})"
        )
    return NoetherResult(index, w, count)


# --------------------------------------------------------------------------
# symbol axioms


@dataclass
class AxiomReport:
    antisymmetry: complex
    multiplicativity: complex
    steinberg: complex

    def deviations(self) -> dict[str, float]:
        return {
            "antisymmetry": abs(self.antisymmetry - 1),
            "multiplicativity": abs(self.multiplicativity - 1),
            "steinberg": abs(self.steinberg - 1),
        }

    def worst(self) -> float:
        return max(self.deviations().values())


def symbol_axioms_check(
    h: MultiPolynomial,
    f1: MultiPolynomial,
    f2: MultiPolynomial,
    f3: MultiPolynomial,
    t: MultiPolynomial,
    point,
    schedule: LimitSchedule | None = None,
    seed: int = 42,
) -> AxiomReport:
    def c(a, b):
        return tame_symbol_local(SymbolProblem(h, a, b, point), schedule, seed).value

    anti = c(f1, f2) * c(f2, f1)
    mult = c(f1, f2 * f3) / (c(f1, f2) * c(f1, f3))
    stein = c(t, 1 - t)
    return AxiomReport(anti, mult, stein)
