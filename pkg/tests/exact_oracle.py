"""Exact brute-force joint torsion with sympy.

Shares no code with the package.  Cohomology bases come from pivots,
complements are spanned by standard basis vectors, and every determinant
is exact.  Conventions (block orders, degree ordering within parity
blocks, the sign exponent) are re-derived here from scratch.
"""

from __future__ import annotations

import sympy as sp


def mat(rows, n_rows=None, n_cols=None):
    if rows is None or (hasattr(rows, "__len__") and len(rows) == 0):
        return sp.zeros(n_rows or 0, n_cols or 0)
    return sp.Matrix(rows)


class Cx:
    """Exact cochain complex: dims {k: n}, d {k: matrix X^k -> X^k+1}."""

    def __init__(self, dims, d):
        self.dims = {k: v for k, v in dims.items() if v}
        self._d = dict(d)

    def dim(self, k):
        return self.dims.get(k, 0)

    def d(self, k):
        m = self._d.get(k)
        return m if m is not None and m.shape == (self.dim(k + 1), self.dim(k)) else sp.zeros(self.dim(k + 1), self.dim(k))

    def degrees(self):
        return sorted(self.dims)


def cone(x: Cx, f: dict, y: Cx | None = None):
    """C^k = X^{k+1} + Y^k, d = [[-dX, 0], [f, dY]]; returns (cone, incl, proj)."""
    y = y or x
    degs = sorted({k - 1 for k in x.degrees()} | set(y.degrees()))
    dims = {k: x.dim(k + 1) + y.dim(k) for k in degs}
    d = {}
    for k in degs:
        a, b, a2, b2 = x.dim(k + 1), y.dim(k), x.dim(k + 2), y.dim(k + 1)
        m = sp.zeros(a2 + b2, a + b)
        if a2 and a:
            m[:a2, :a] = -x.d(k + 1)
        if b2 and a:
            m[a2:, :a] = f.get(k + 1, sp.zeros(b2, a))
        if b2 and b:
            m[a2:, a:] = y.d(k)
        d[k] = m
    c = Cx(dims, d)
    incl, proj = {}, {}
    for k in degs:
        a, b = x.dim(k + 1), y.dim(k)
        i = sp.zeros(a + b, b)
        i[a:, :] = sp.eye(b)
        p = sp.zeros(a, a + b)
        p[:, :a] = sp.eye(a)
        incl[k], proj[k] = i, p
    return c, incl, proj


def _col_basis(m):
    return m.columnspace()


def _extend(span_cols, candidates, n):
    """Greedily pick candidates that enlarge the span."""
    basis = list(span_cols)
    chosen = []
    for v in candidates:
        trial = sp.Matrix.hstack(*(basis + [v])) if basis else v
        if trial.rank() > len(basis):
            basis.append(v)
            chosen.append(v)
    return chosen


class Coh:
    """Representatives of H^k and the coordinate map on cocycles."""

    def __init__(self, x: Cx):
        self.x = x
        self.reps = {}
        self.images = {}
        for k in x.degrees():
            n = x.dim(k)
            ker = x.d(k).nullspace() if x.dim(k + 1) else [sp.eye(n)[:, j] for j in range(n)]
            prev = x.d(k - 1)
            img = _col_basis(prev) if prev.shape[1] else []
            self.images[k] = img
            self.reps[k] = _extend(img, ker, n)

    def dim(self, k):
        return len(self.reps.get(k, []))

    def degrees(self, parity=None):
        out = [k for k in sorted(self.reps) if self.dim(k)]
        return out if parity is None else [k for k in out if k % 2 == parity]

    def coords(self, k, z):
        reps, img = self.reps.get(k, []), self.images.get(k, [])
        if not reps:
            return sp.zeros(0, 1)
        m = sp.Matrix.hstack(*(img + reps))
        sol = (m.T * m).LUsolve(m.T * z)
        return sol[len(img) :, :]

    def induced(self, k, f, target: "Coh", t=None):
        t = k if t is None else t
        cols = [target.coords(t, f * r) for r in self.reps.get(k, [])]
        rows = target.dim(t)
        return sp.Matrix.hstack(*cols) if cols else sp.zeros(rows, 0)


def _parity_block(maps, src: Coh, dst: Coh, parity, shift):
    sdeg, ddeg = src.degrees(parity), dst.degrees((parity + shift) % 2)
    rows = sum(dst.dim(k) for k in ddeg)
    cols = sum(src.dim(k) for k in sdeg)
    out = sp.zeros(rows, cols)
    off, r = {}, 0
    for k in ddeg:
        off[k] = r
        r += dst.dim(k)
    c = 0
    for k in sdeg:
        if k + shift in off and k in maps:
            m = maps[k]
            if m.shape[0] and m.shape[1]:
                out[off[k + shift] : off[k + shift] + m.shape[0], c : c + m.shape[1]] = m
        c += src.dim(k)
    return out


def six_term(x: Cx, f: dict, hx: Coh, hc_data=None):
    """(f+, f-, i+, i-, p+, p-) for the cone triangle of f : X -> X."""
    c, incl, proj = cone(x, f)
    hc = hc_data or Coh(c)
    fm = {k: hx.induced(k, f[k], hx) for k in hx.degrees()}
    im = {k: hx.induced(k, incl[k], hc) for k in hx.degrees()}
    pm = {k: hc.induced(k, proj[k], hx, k + 1) for k in hc.degrees()}
    seq = (
        _parity_block(fm, hx, hx, 0, 0),
        _parity_block(fm, hx, hx, 1, 0),
        _parity_block(im, hx, hc, 0, 0),
        _parity_block(im, hx, hc, 1, 0),
        _parity_block(pm, hc, hx, 0, 1),
        _parity_block(pm, hc, hx, 1, 1),
    )
    return seq, c, hc


def _complement_of_kernel(m):
    """Standard basis vectors spanning a complement of ker m."""
    n = m.shape[1]
    ker = m.nullspace() if m.shape[0] else [sp.eye(n)[:, j] for j in range(n)]
    return _extend(ker, [sp.eye(n)[:, j] for j in range(n)], n)


def _det(*blocks):
    cols = [b for b in blocks if b.shape[1]]
    if not cols:
        return sp.Integer(1)
    m = sp.Matrix.hstack(*cols)
    assert m.shape[0] == m.shape[1], m.shape
    return m.det()


def _cols(vs, n):
    return sp.Matrix.hstack(*vs) if vs else sp.zeros(n, 0)


def torsion_iso(seq):
    """Scalar s with |V|(vol V2) = s vol V1 (x) vol V for an exact hexagon."""
    f_p, f_m, i_p, i_m, p_p, p_m = seq
    t = {
        "1+": _cols(_complement_of_kernel(f_p), f_p.shape[1]),
        "1-": _cols(_complement_of_kernel(f_m), f_m.shape[1]),
        "2+": _cols(_complement_of_kernel(i_p), i_p.shape[1]),
        "2-": _cols(_complement_of_kernel(i_m), i_m.shape[1]),
        "+": _cols(_complement_of_kernel(p_p), p_p.shape[1]),
        "-": _cols(_complement_of_kernel(p_m), p_m.shape[1]),
    }
    a1p = _det(p_m * t["-"], t["1+"])
    a1m = _det(p_p * t["+"], t["1-"])
    a2p = _det(f_p * t["1+"], t["2+"])
    a2m = _det(f_m * t["1-"], t["2-"])
    ap = _det(i_p * t["2+"], t["+"])
    am = _det(i_m * t["2-"], t["-"])
    e = {k: v.shape[1] for k, v in t.items()}
    mu = e["2+"] * (e["1-"] + e["1+"]) + e["1-"] * (e["+"] + e["-"]) + e["-"] * (e["2+"] + e["2-"]) + e["+"]
    return sp.simplify((-1) ** mu * a1p * ap * a2m / (a1m * am * a2p))


def _index(h: Coh):
    return sum(h.dim(k) for k in h.degrees(0)) - sum(h.dim(k) for k in h.degrees(1))


def joint_torsion(x: Cx, f: dict, g: dict):
    """JT(X; f, g) in exact arithmetic."""
    zero = lambda k: sp.zeros(x.dim(k), x.dim(k))  # noqa: E731
    f = {k: f.get(k, zero(k)) for k in x.degrees()}
    g = {k: g.get(k, zero(k)) for k in x.degrees()}

    def diag(h, c):
        out = {}
        for k in c.degrees():
            a, b = h.get(k + 1, zero(k + 1)), h.get(k, zero(k))
            out[k] = sp.diag(a, b) if a.shape[0] and b.shape[0] else (a if b.shape[0] == 0 else b)
        return out

    cf, _, _ = cone(x, f)
    cg, _, _ = cone(x, g)
    h_cf, h_cg = Coh(cf), Coh(cg)
    dg, df = diag(g, cf), diag(f, cg)
    seq_g, c_dg, h_cdg = six_term(cf, dg, h_cf)
    seq_f, c_df, h_cdf = six_term(cg, df, h_cg)
    s_g, s_f = torsion_iso(seq_g), torsion_iso(seq_f)

    # Phi (a, b, c, e) -> (-a, c, b, e) on (X^{k+2}, X^{k+1}, X^{k+1}, X^k)
    phi_maps = {}
    for k in h_cdg.degrees():
        n2, n1, n0 = x.dim(k + 2), x.dim(k + 1), x.dim(k)
        size = n2 + 2 * n1 + n0
        m = sp.zeros(size, size)
        for j in range(n2):
            m[j, j] = -1
        for j in range(n1):
            m[n2 + j, n2 + n1 + j] = 1
            m[n2 + n1 + j, n2 + j] = 1
        for j in range(n0):
            m[n2 + 2 * n1 + j, n2 + 2 * n1 + j] = 1
        phi_maps[k] = h_cdg.induced(k, m, h_cdf)
    phi = _det(_parity_block(phi_maps, h_cdg, h_cdf, 0, 0)) / _det(_parity_block(phi_maps, h_cdg, h_cdf, 1, 0))

    def triv_sign(h_base, h_cone):
        return (-1) ** ((_index(h_cone) * _index(h_base)) % 2)

    return sp.nsimplify(sp.simplify(s_g * triv_sign(h_cf, h_cdg) * phi / (s_f * triv_sign(h_cg, h_cdf))))


def from_numbers(rows):
    return sp.Matrix([[sp.nsimplify(v) for v in r] for r in rows])
