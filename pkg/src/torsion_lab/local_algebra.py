"""Local multiplicities, Sylvester resultants and zero sets of square
polynomial systems in one or two variables."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from math import comb

import numpy as np

from torsion_lab.errors import BoundaryZeroError, ModelError, NumericalError
from torsion_lab.linalg import RankPolicy, decompose, single_linkage
from torsion_lab.polynomial import MultiPolynomial

N_MAX = 30
STABLE_WINDOW = 3
MACAULAY_POLICY = RankPolicy(relative_threshold=1e-9, absolute_floor=1e-13)
ZERO_TOL = 1e-10
FRACTION_FREE_MAX = 12
NEWTON_STEPS = 60
RESIDUAL_TOL = 1e-9


class NotZeroDimensionalError(ModelError):
    pass


# --------------------------------------------------------------------------
# multiplicity


def _monomials_below(n: int, degree: int) -> list[tuple[int, ...]]:
    out = []
    for d in range(degree):
        for combo in combinations_with_replacement(range(n), d):
            e = [0] * n
            for i in combo:
                e[i] += 1
            out.append(tuple(e))
    return out


def _normalized(p: MultiPolynomial) -> MultiPolynomial:
    scale = p.max_abs_coeff()
    return p if scale == 0 else p * (1.0 / scale)


def quotient_dimensions(g, n_max: int = N_MAX, policy: RankPolicy = MACAULAY_POLICY):
    """Yield (N, d_N) with d_N = dim C[z]/(<g> + m^N) for g vanishing at 0."""
    n = g[0].nvars
    for big_n in range(1, n_max + 1):
        monos = _monomials_below(n, big_n)
        col = {e: i for i, e in enumerate(monos)}
        rows = []
        for gi in g:
            trunc = gi.truncate(big_n)
            if trunc.is_zero():
                continue
            low = min(sum(e) for e in trunc.terms)
            for alpha in _monomials_below(n, big_n - low):
                row = np.zeros(len(monos), dtype=complex)
                for e, c in trunc.terms.items():
                    shifted = tuple(a + b for a, b in zip(e, alpha))
                    if sum(shifted) < big_n:
                        row[col[shifted]] += c
                if np.any(row):
                    rows.append(row)
        rank = decompose(np.array(rows), policy).rank if rows else 0
        yield big_n, len(monos) - rank


def multiplicity(
    g,
    point,
    zero_tol: float = ZERO_TOL,
    n_max: int = N_MAX,
    policy: RankPolicy = MACAULAY_POLICY,
    scale: float = 1.0,
) -> int:
    """m_lambda(g) = dim C[[z - lambda]]/<g>, 0 when some g_i(lambda) != 0.

    ``scale`` rescales the local coordinate, ``z = lambda + scale * u``.  Set
    it to about half the distance to the nearest other zero so that nearby
    zeros do not get merged by the rank decisions.
    """
    g = list(g)
    if not g:
        raise ModelError("empty system")
    n = g[0].nvars
    if len(g) != n:
        raise ModelError(f"multiplicity needs a square system, got {len(g)} functions in {n} variables")
    point = np.atleast_1d(np.asarray(point, dtype=complex))
    shifted = []
    for gi in g:
        size = max(gi.max_abs_coeff(), 1e-300)
        local = gi.shift(point)
        const = local.terms.get((0,) * n, 0j)
        if abs(const) > zero_tol * size * (1 + float(np.max(np.abs(point)))) ** max(gi.total_degree(), 0):
            return 0
        terms = {e: c * scale ** sum(e) for e, c in local.terms.items() if any(e)}
        local = MultiPolynomial(n, terms)
        if local.is_zero():
            raise NumericalError("zero not isolated or multiplicity too large (a component vanishes identically)")
        shifted.append(_normalized(local))
    history = []
    for big_n, d in quotient_dimensions(shifted, n_max, policy):
        history.append(d)
        if len(history) >= STABLE_WINDOW and len(set(history[-STABLE_WINDOW:])) == 1:
            return d
    raise NumericalError(
        f"zero not isolated or multiplicity too large: d_N did not stabilize by N = {n_max} "
        f"(tail {history[-STABLE_WINDOW:]})"
    )


# --------------------------------------------------------------------------
# resultants


def _padd(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if len(a) < len(b):
        a, b = b, a
    out = a.copy()
    out[: len(b)] += b
    return out


def _det_poly_fraction_free(entries: list[list[np.ndarray]]) -> np.ndarray:
    """Division-free determinant of a matrix of univariate polynomials.

    Row-by-row expansion over column subsets (dynamic programming), so only
    ring operations are used.
    """
    s = len(entries)
    dp: dict[int, np.ndarray] = {0: np.zeros(1, dtype=complex)}
    dp[0][0] = 1.0
    for r in range(s):
        nxt: dict[int, np.ndarray] = {}
        for mask, val in dp.items():
            if not np.any(val):
                continue
            for c in range(s):
                if mask >> c & 1:
                    continue
                e = entries[r][c]
                if not np.any(e):
                    continue
                inversions = bin(mask >> (c + 1)).count("1")
                term = np.convolve(val, e)
                if inversions % 2:
                    term = -term
                m2 = mask | (1 << c)
                nxt[m2] = _padd(nxt[m2], term) if m2 in nxt else term
        dp = nxt
    return dp.get((1 << s) - 1, np.zeros(1, dtype=complex))


def _univariate_coeffs(p: MultiPolynomial, keep: int) -> np.ndarray:
    deg = max(p.degree_in(keep), 0)
    out = np.zeros(deg + 1, dtype=complex)
    for e, c in p.terms.items():
        out[e[keep]] += c
    return out


def sylvester_entries(p: MultiPolynomial, q: MultiPolynomial, eliminate: int):
    """Sylvester matrix with entries in C[keep]; rows p-block then q-block,
    coefficients in increasing powers of the eliminated variable."""
    keep = 1 - eliminate
    l, m = p.degree_in(eliminate), q.degree_in(eliminate)
    pc = [_univariate_coeffs(c, keep) for c in p.coeffs_in(eliminate)]
    qc = [_univariate_coeffs(c, keep) for c in q.coeffs_in(eliminate)]
    s = l + m
    zero = np.zeros(1, dtype=complex)
    rows = []
    for i in range(m):
        row = [zero] * s
        for k, c in enumerate(pc):
            row[i + k] = c
        rows.append(row)
    for i in range(l):
        row = [zero] * s
        for k, c in enumerate(qc):
            row[i + k] = c
        rows.append(row)
    return rows


def resultant(p: MultiPolynomial, q: MultiPolynomial, eliminate: int = 1) -> MultiPolynomial:
    """Res_{z_eliminate}(p, q) as a polynomial in the other variable (2 variables).

    The result is returned as a 1-variable polynomial.
    """
    if p.nvars != 2 or q.nvars != 2:
        raise ModelError("resultant is implemented for polynomials in 2 variables")
    if eliminate not in (0, 1):
        raise ModelError("eliminate must be 0 or 1")
    l, m = p.degree_in(eliminate), q.degree_in(eliminate)
    if l <= 0 or m <= 0:
        raise ModelError("resultant needs positive degree in the eliminated variable")
    entries = sylvester_entries(p, q, eliminate)
    if l + m <= FRACTION_FREE_MAX:
        coeffs = _det_poly_fraction_free(entries)
    else:
        coeffs = _det_poly_interpolated(entries)
    return MultiPolynomial.from_univariate(coeffs)


def _det_poly_interpolated(entries) -> np.ndarray:
    """Determinant polynomial by evaluation at roots of unity and inverse DFT."""
    deg_bound = sum(max(len(e) - 1 for e in row) for row in entries)
    npts = deg_bound + 1
    nodes = np.exp(2j * np.pi * np.arange(npts) / npts)
    vals = np.empty(npts, dtype=complex)
    for t, z in enumerate(nodes):
        mat = np.array([[np.polyval(e[::-1], z) for e in row] for row in entries])
        vals[t] = np.linalg.det(mat)
    return np.fft.ifft(vals)


# --------------------------------------------------------------------------
# univariate roots


def companion_matrix(coeffs) -> np.ndarray:
    """Companion matrix of the monic normalization (coefficients increasing)."""
    c = np.trim_zeros(np.asarray(coeffs, dtype=complex), "b")
    deg = len(c) - 1
    if deg < 1:
        return np.zeros((0, 0), dtype=complex)
    monic = c / c[-1]
    m = np.zeros((deg, deg), dtype=complex)
    m[1:, :-1] = np.eye(deg - 1)
    m[:, -1] = -monic[:-1]
    return m


def _trim(coeffs, rel: float = 1e-14) -> np.ndarray:
    c = np.asarray(coeffs, dtype=complex)
    if not np.any(c):
        return c[:0]
    big = np.max(np.abs(c))
    last = len(c) - 1
    while last >= 0 and abs(c[last]) <= rel * big:
        last -= 1
    return c[: last + 1]


def taylor_coefficients(coeffs, x0: complex) -> np.ndarray:
    """Coefficients of p(x0 + u) in increasing powers of u."""
    work = np.asarray(coeffs, dtype=complex)[::-1].copy()
    n = len(work)
    out = np.empty(n, dtype=complex)
    for j in range(n):
        acc = 0j
        for i in range(n - j):
            acc = acc * x0 + work[i]
            work[i] = acc
        out[j] = work[n - j - 1]
    return out


def _is_multiple_root(coeffs, mu: complex, m: int, rel: float) -> bool:
    """Do the Taylor coefficients of order < m vanish at mu to roundoff?"""
    c = np.asarray(coeffs, dtype=complex)
    taylor = taylor_coefficients(c, mu)
    absc = np.abs(c)
    for j in range(m):
        scale = sum(absc[i] * comb(i, j) * abs(mu) ** (i - j) for i in range(j, len(c)))
        if abs(taylor[j]) > rel * scale:
            return False
    return True


def cluster_roots(
    roots, cluster_tol: float, coeffs=None, noise: float = 1e-12
) -> list[tuple[complex, int]]:
    """Group numerically multiple roots and return (mean, multiplicity).

    Copies of an m-fold root scatter on a circle of radius about
    noise^(1/m); sizes are tried from the largest down, and a group of
    exactly m roots within that scatter is accepted as one m-fold root when
    (given the coefficients) the polynomial really has an m-fold root at the
    group mean.
    """
    remaining = list(np.asarray(roots, dtype=complex))
    out: list[tuple[complex, int]] = []
    for m in range(len(remaining), 1, -1):
        if len(remaining) < m:
            continue
        scale = 1 + max(abs(r) for r in remaining)
        tol = max(cluster_tol, 4.0 * noise ** (1.0 / m) * scale)
        keep = []
        for grp in single_linkage(remaining, tol):
            pts = [remaining[i] for i in grp]
            mu = complex(np.mean(pts))
            if len(pts) == m and (coeffs is None or _is_multiple_root(coeffs, mu, m, noise)):
                out.append((mu, m))
            else:
                keep.extend(pts)
        remaining = keep
    out.extend((complex(r), 1) for r in remaining)
    return sorted(out, key=lambda t: (t[0].real, t[0].imag))


def univariate_roots(coeffs, cluster_tol: float = 1e-6) -> list[tuple[complex, int]]:
    """Roots with multiplicities of a polynomial given by increasing coefficients."""
    c = _trim(coeffs)
    if len(c) == 0:
        raise NotZeroDimensionalError("system not zero-dimensional in region (zero polynomial)")
    if len(c) == 1:
        return []
    vals = np.linalg.eigvals(companion_matrix(c))
    return cluster_roots(vals, cluster_tol, c)


# --------------------------------------------------------------------------
# zero sets


@dataclass
class ZeroPoint:
    point: np.ndarray
    multiplicity: int
    residual: float


@dataclass
class ZeroSet:
    points: list[ZeroPoint] = field(default_factory=list)

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)

    def total_multiplicity(self) -> int:
        return sum(p.multiplicity for p in self.points)

    def coordinates(self) -> list[np.ndarray]:
        return [p.point for p in self.points]


@dataclass(frozen=True)
class Polydisc:
    center: tuple[complex, ...]
    radius: float

    def excess(self, z) -> float:
        """max_i |z_i - c_i| - radius (negative inside)."""
        z = np.atleast_1d(z)
        return float(np.max(np.abs(z - np.asarray(self.center, dtype=complex)))) - self.radius


def _residual(g, z) -> float:
    return max(abs(gi.eval(z)) / max(gi.max_abs_coeff(), 1e-300) for gi in g)


def _newton(g, jac, z: np.ndarray, steps: int = NEWTON_STEPS) -> np.ndarray:
    best, best_res = z, _residual(g, z)
    for _ in range(steps):
        f = np.array([gi.eval(z) for gi in g])
        j = np.array([[d.eval(z) for d in row] for row in jac])
        try:
            dz = np.linalg.lstsq(j, -f, rcond=None)[0]
        except np.linalg.LinAlgError:
            break
        z = z + dz
        res = _residual(g, z)
        if res < best_res:
            best, best_res = z, res
        if np.max(np.abs(dz)) <= 1e-15 * (1 + np.max(np.abs(z))):
            break
    return best


def _jacobian_rank_ok(jac, z, rel: float = 1e-6) -> bool:
    j = np.array([[d.eval(z) for d in row] for row in jac])
    s = np.linalg.svd(j, compute_uv=False)
    return bool(s[0] > 0 and s[-1] > rel * s[0])


def solve_system(
    g,
    center=None,
    radius: float = 1.0,
    cluster_tol: float | None = None,
    boundary_tol: float | None = None,
) -> ZeroSet:
    """Zeros of n polynomials in n <= 2 variables inside the closed polydisc."""
    g = list(g)
    if not g:
        raise ModelError("empty system")
    n = g[0].nvars
    if n not in (1, 2):
        raise ModelError(f"solve_system supports 1 or 2 variables, got {n}")
    if len(g) != n or any(p.nvars != n for p in g):
        raise ModelError("solve_system needs n polynomials in n variables")
    if center is None:
        center = (0.0,) * n
    region = Polydisc(tuple(complex(c) for c in np.atleast_1d(center)), float(radius))
    if cluster_tol is None:
        cluster_tol = 1e-6 * (1 + radius)
    if boundary_tol is None:
        boundary_tol = 1e-8 * (1 + radius)
    if n == 1:
        found = [
            (np.array([r]), m) for r, m in univariate_roots(g[0].univariate_coeffs(0), cluster_tol)
        ]
    else:
        found = _solve_plane(g[0], g[1], cluster_tol)
    out = ZeroSet()
    for z, m in found:
        ex = region.excess(z)
        if abs(ex) <= boundary_tol:
            raise BoundaryZeroError(
                f"zero {np.round(z, 12).tolist()} lies on the region boundary (excess {ex:.2e})"
            )
        if ex < 0:
            out.points.append(ZeroPoint(z, m, _residual(g, z)))
    out.points.sort(key=lambda p: tuple((c.real, c.imag) for c in p.point))
    return out


def _solve_plane(p: MultiPolynomial, q: MultiPolynomial, cluster_tol: float):
    if p.is_zero() or q.is_zero():
        raise NotZeroDimensionalError("system not zero-dimensional in region (zero equation)")
    if p.total_degree() == 0 or q.total_degree() == 0:
        return []
    # choose the elimination that keeps things univariate when possible
    for var in (1, 0):
        keep = 1 - var
        for a, b in ((p, q), (q, p)):
            if a.degree_in(var) <= 0:
                return _solve_triangular(a, b, keep, cluster_tol)
    r = resultant(p, q, eliminate=1)
    if r.is_zero() or r.max_abs_coeff() <= 1e-13 * (p.max_abs_coeff() * q.max_abs_coeff()):
        raise NotZeroDimensionalError("system not zero-dimensional in region (resultant vanishes)")
    xs = univariate_roots(r.univariate_coeffs(0), cluster_tol)
    candidates = []
    for x0, _ in xs:
        for poly in (p, q):
            coeffs = _trim(_univariate_coeffs_at(poly, 0, x0))
            if len(coeffs) <= 1:
                continue
            for y0, _ in univariate_roots(coeffs, cluster_tol):
                candidates.append(np.array([x0, y0]))
    return _finish([p, q], candidates, cluster_tol)


def _univariate_coeffs_at(p: MultiPolynomial, var: int, value: complex) -> np.ndarray:
    """Coefficients in the other variable after fixing ``var = value``."""
    other = 1 - var
    return _univariate_coeffs(p.substitute(var, value), other)


def _solve_triangular(a, b, keep, cluster_tol):
    """a depends only on ``keep``; solve it, then b on each fibre."""
    roots = univariate_roots(_univariate_coeffs(a, keep), cluster_tol)
    other = 1 - keep
    candidates = []
    for t0, _ in roots:
        coeffs = _trim(_univariate_coeffs_at(b, keep, t0))
        if len(coeffs) == 0 or (len(coeffs) == 1 and abs(coeffs[0]) <= 1e-12 * max(b.max_abs_coeff(), 1)):
            raise NotZeroDimensionalError(
                "system not zero-dimensional in region (an equation vanishes on a fibre)"
            )
        if len(coeffs) == 1:
            continue
        for s0, _ in univariate_roots(coeffs, cluster_tol):
            z = np.zeros(2, dtype=complex)
            z[keep], z[other] = t0, s0
            candidates.append(z)
    return _finish([a, b], candidates, cluster_tol)


def _finish(g, candidates, cluster_tol):
    """Newton-refine, drop spurious candidates, merge duplicates, assign multiplicities."""
    jac = [gi.gradient() for gi in g]
    refined = []
    for z in candidates:
        z2 = _newton(g, jac, z.astype(complex))
        scale = 1 + float(np.max(np.abs(z2)))
        if _residual(g, z2) <= 1e-7 * scale ** max(max(gi.total_degree() for gi in g), 1):
            refined.append(z2)
    if not refined:
        return []
    groups = single_linkage(refined, cluster_tol)
    centers = [np.mean([refined[i] for i in grp], axis=0) for grp in groups]
    out = []
    for k, z in enumerate(centers):
        if _jacobian_rank_ok(jac, z):
            out.append((_newton(g, jac, z), 1))
            continue
        gaps = [float(np.max(np.abs(z - w))) for j, w in enumerate(centers) if j != k]
        scale = min(1.0, 0.5 * min(gaps)) if gaps else 1.0
        m = multiplicity(g, z, zero_tol=1e-7, scale=scale)
        out.append((z, max(m, 1)))
    return out
