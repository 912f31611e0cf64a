"""Sparse multivariate polynomials with complex coefficients."""

from __future__ import annotations

from itertools import product as iproduct
from math import comb

import numpy as np

from torsion_lab.errors import ModelError

PRUNE_RELATIVE = 1e-14


class MultiPolynomial:
    """Polynomial in ``nvars`` variables stored as ``{exponent tuple: coeff}``.

    Coefficients smaller than ``1e-14 * max|coeff|`` are dropped on
    construction, so the zero polynomial has no terms.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms=None, prune: bool = True):
        if nvars < 0:
            raise ModelError("nvars must be nonnegative")
        self.nvars = int(nvars)
        acc: dict[tuple[int, ...], complex] = {}
        for e, c in (terms or {}).items():
            e = tuple(int(v) for v in e)
            if len(e) != self.nvars:
                raise ModelError(f"exponent {e} has length {len(e)}, expected {self.nvars}")
            if any(v < 0 for v in e):
                raise ModelError(f"negative exponent in {e}")
            acc[e] = acc.get(e, 0j) + complex(c)
        if prune and acc:
            big = max(abs(c) for c in acc.values())
            acc = {e: c for e, c in acc.items() if abs(c) > PRUNE_RELATIVE * big and c != 0}
        else:
            acc = {e: c for e, c in acc.items() if c != 0}
        self.terms = acc

    # construction ---------------------------------------------------------

    @classmethod
    def constant(cls, nvars: int, c: complex) -> "MultiPolynomial":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, nvars: int, i: int) -> "MultiPolynomial":
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1.0})

    @classmethod
    def variables(cls, nvars: int) -> list["MultiPolynomial"]:
        return [cls.variable(nvars, i) for i in range(nvars)]

    @classmethod
    def from_univariate(cls, coeffs, nvars: int = 1, var: int = 0) -> "MultiPolynomial":
        """From coefficients in increasing degree order."""
        terms = {}
        for k, c in enumerate(coeffs):
            e = [0] * nvars
            e[var] = k
            terms[tuple(e)] = c
        return cls(nvars, terms)

    @classmethod
    def from_roots(cls, roots, lead: complex = 1.0) -> "MultiPolynomial":
        coeffs = np.poly(np.asarray(roots, dtype=complex))[::-1] * lead if len(roots) else [lead]
        return cls.from_univariate(coeffs)

    def _coerce(self, other) -> "MultiPolynomial":
        if isinstance(other, MultiPolynomial):
            if other.nvars != self.nvars:
                raise ModelError(
                    f"variable-count mismatch: {self.nvars} vs {other.nvars}"
                )
            return other
        return MultiPolynomial.constant(self.nvars, complex(other))

    # arithmetic -----------------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = t.get(e, 0j) + c
        return MultiPolynomial(self.nvars, t)

    __radd__ = __add__

    def __neg__(self):
        return MultiPolynomial(self.nvars, {e: -c for e, c in self.terms.items()}, prune=False)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        t: dict[tuple[int, ...], complex] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, 0j) + c1 * c2
        return MultiPolynomial(self.nvars, t)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a polynomial")
        out = MultiPolynomial.constant(self.nvars, 1.0)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, MultiPolynomial):
            other = self._coerce(other)
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, tuple(sorted(self.terms.items(), key=lambda kv: kv[0]))))

    def almost_equal(self, other, tol: float = 1e-10) -> bool:
        other = self._coerce(other)
        keys = set(self.terms) | set(other.terms)
        return all(abs(self.terms.get(e, 0) - other.terms.get(e, 0)) <= tol for e in keys)

    # queries --------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, var: int) -> int:
        return max((e[var] for e in self.terms), default=-1)

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def __call__(self, *point):
        return self.eval(point[0] if len(point) == 1 and np.ndim(point[0]) else point)

    def eval(self, point) -> complex:
        """Horner evaluation, one variable at a time."""
        point = tuple(complex(v) for v in np.atleast_1d(point)) if self.nvars else ()
        if len(point) != self.nvars:
            raise ModelError(f"expected {self.nvars} coordinates, got {len(point)}")
        if not self.terms:
            return 0j
        if self.nvars == 0:
            return self.terms.get((), 0j)
        return _horner(self.terms, point)

    def eval_many(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=complex).reshape(-1, self.nvars)
        out = np.zeros(points.shape[0], dtype=complex)
        for e, c in self.terms.items():
            out += c * np.prod(points ** np.array(e), axis=1)
        return out

    def eval_matrices(self, mats) -> np.ndarray:
        """Polynomial functional calculus p(A_1, ..., A_n) for commuting matrices."""
        mats = [np.asarray(m, dtype=complex) for m in mats]
        if len(mats) != self.nvars:
            raise ModelError(f"expected {self.nvars} matrices, got {len(mats)}")
        dim = mats[0].shape[0] if mats else 0
        out = np.zeros((dim, dim), dtype=complex)
        powers: list[dict[int, np.ndarray]] = [{0: np.eye(dim, dtype=complex)} for _ in mats]

        def power(i, k):
            cache = powers[i]
            if k not in cache:
                cache[k] = power(i, k - 1) @ mats[i]
            return cache[k]

        for e, c in self.terms.items():
            term = np.eye(dim, dtype=complex)
            for i, k in enumerate(e):
                if k:
                    term = term @ power(i, k)
            out += c * term
        return out

    def derivative(self, var: int) -> "MultiPolynomial":
        t = {}
        for e, c in self.terms.items():
            if e[var]:
                e2 = list(e)
                e2[var] -= 1
                t[tuple(e2)] = c * e[var]
        return MultiPolynomial(self.nvars, t)

    def gradient(self) -> list["MultiPolynomial"]:
        return [self.derivative(i) for i in range(self.nvars)]

    def shift(self, point) -> "MultiPolynomial":
        """p(z + point), expanded binomially."""
        point = [complex(v) for v in np.atleast_1d(point)]
        if len(point) != self.nvars:
            raise ModelError(f"expected {self.nvars} coordinates, got {len(point)}")
        t: dict[tuple[int, ...], complex] = {}
        for e, c in self.terms.items():
            ranges = [range(k + 1) for k in e]
            for sub in iproduct(*ranges):
                coef = c
                for k, j, a in zip(e, sub, point):
                    coef *= comb(k, j) * a ** (k - j)
                t[sub] = t.get(sub, 0j) + coef
        return MultiPolynomial(self.nvars, t)

    def substitute(self, var: int, value: complex) -> "MultiPolynomial":
        """Fix one variable; the result keeps nvars (that slot becomes constant)."""
        t: dict[tuple[int, ...], complex] = {}
        for e, c in self.terms.items():
            e2 = list(e)
            k = e2[var]
            e2[var] = 0
            key = tuple(e2)
            t[key] = t.get(key, 0j) + c * complex(value) ** k
        return MultiPolynomial(self.nvars, t)

    def univariate_coeffs(self, var: int = 0) -> np.ndarray:
        """Coefficients (increasing degree) of a polynomial depending only on ``var``."""
        deg = self.degree_in(var)
        out = np.zeros(max(deg + 1, 1), dtype=complex)
        for e, c in self.terms.items():
            if any(v for i, v in enumerate(e) if i != var):
                raise ModelError("polynomial depends on more than one variable")
            out[e[var]] += c
        return out

    def coeffs_in(self, var: int) -> list["MultiPolynomial"]:
        """Write p = sum_k c_k * z_var^k; returns [c_0, c_1, ...] (var slot zeroed)."""
        deg = self.degree_in(var)
        out: list[dict] = [dict() for _ in range(max(deg + 1, 0))]
        for e, c in self.terms.items():
            e2 = list(e)
            k = e2[var]
            e2[var] = 0
            out[k][tuple(e2)] = c
        return [MultiPolynomial(self.nvars, t) for t in out]

    def truncate(self, degree_below: int) -> "MultiPolynomial":
        return MultiPolynomial(
            self.nvars, {e: c for e, c in self.terms.items() if sum(e) < degree_below}
        )

    # serialization --------------------------------------------------------

    def to_json(self) -> list[dict]:
        return [
            {"e": list(e), "c": [c.real, c.imag]}
            for e, c in sorted(self.terms.items())
        ]

    @classmethod
    def from_json(cls, data, nvars: int | None = None) -> "MultiPolynomial":
        if not isinstance(data, list):
            raise ModelError("polynomial must be a list of {'e': [...], 'c': [re, im]} terms")
        terms = {}
        for idx, term in enumerate(data):
            if not isinstance(term, dict) or set(term) != {"e", "c"}:
                raise ModelError(f"term {idx}: expected keys 'e' and 'c'")
            e = term["e"]
            if not isinstance(e, list) or not all(isinstance(v, int) and v >= 0 for v in e):
                raise ModelError(f"term {idx}: exponents must be nonnegative integers")
            c = term["c"]
            if (
                not isinstance(c, list)
                or len(c) != 2
                or not all(isinstance(v, (int, float)) and np.isfinite(v) for v in c)
            ):
                raise ModelError(f"term {idx}: coefficient must be [re, im] finite numbers")
            if nvars is None:
                nvars = len(e)
            elif len(e) != nvars:
                raise ModelError(f"term {idx}: exponent length {len(e)} != {nvars}")
            key = tuple(e)
            terms[key] = terms.get(key, 0j) + complex(c[0], c[1])
        if nvars is None:
            raise ModelError("cannot infer the variable count of an empty polynomial")
        return cls(nvars, terms)

    def __repr__(self):
        if not self.terms:
            return f"MultiPolynomial({self.nvars}, 0)"
        names = "xyzuvw" if self.nvars <= 6 else None
        parts = []
        for e, c in sorted(self.terms.items(), key=lambda kv: (sum(kv[0]), kv[0])):
            mono = "*".join(
                (names[i] if names else f"z{i}") + (f"^{k}" if k > 1 else "")
                for i, k in enumerate(e)
                if k
            )
            cs = f"{c.real:g}" if c.imag == 0 else f"({c:g})"
            parts.append(cs if not mono else (mono if c == 1 else f"{cs}*{mono}"))
        return " + ".join(parts)


def _horner(terms: dict, point: tuple[complex, ...]) -> complex:
    """Nested Horner in the first variable with recursive coefficients."""
    if len(point) == 1:
        deg = max(e[0] for e in terms)
        coeffs = [0j] * (deg + 1)
        for e, c in terms.items():
            coeffs[e[0]] += c
        acc = 0j
        for c in reversed(coeffs):
            acc = acc * point[0] + c
        return acc
    groups: dict[int, dict] = {}
    for e, c in terms.items():
        groups.setdefault(e[0], {})[e[1:]] = c
    deg = max(groups)
    acc = 0j
    for k in range(deg, -1, -1):
        inner = _horner(groups[k], point[1:]) if k in groups else 0j
        acc = acc * point[0] + inner
    return acc


def x_y() -> tuple[MultiPolynomial, MultiPolynomial]:
    """The coordinate functions of C^2."""
    return MultiPolynomial.variable(2, 0), MultiPolynomial.variable(2, 1)
