"""Seeded self-check batteries behind ``torsion-lab verify``.

Each check returns a :class:`CheckResult`; a suite passes when all of its
checks pass.  Everything is driven by one ``numpy`` generator seeded from
the command line, so reports are reproducible.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from torsion_lab.complexes import ChainMap, CochainComplex, cohomology
from torsion_lab.graded import GradedLineElement
from torsion_lab.koszul import (
    CommutingTuple,
    build_koszul,
    interior_matrix,
    joint_spectrum,
)
from torsion_lab.linalg import random_unitary, relative_gap
from torsion_lab.polynomial import MultiPolynomial, x_y
from torsion_lab.tame_symbol import (
    DiscModelProblem,
    SymbolProblem,
    carey_pincus,
    joint_torsion_global_disc,
    joint_torsion_global_matrix,
    joint_torsion_global_polydisc,
    polydisc_nonsingular_formula,
    symbol_axioms_check,
    tame_symbol_local,
    tame_symbol_regular,
)
from torsion_lab.torsion import (
    joint_torsion,
    joint_torsion_nonsingular,
    koszul_joint_torsion_problem,
    ses_determinant_iso,
    torsion_of_map,
)

SUITES = ("signs", "axioms", "agreement")


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    data: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


# random data ----------------------------------------------------------------


def random_complex(rng: np.random.Generator, *shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_commuting_tuple(
    rng: np.random.Generator, n: int, dim: int, degree: int = 2, spread: float = 1.0
) -> CommutingTuple:
    """U p_j(T) U^*: polynomials in one random upper triangular T, conjugated by a unitary.

    Such tuples are simultaneously triangularizable and commute exactly up
    to roundoff.
    """
    t = np.triu(random_complex(rng, dim, dim) * 0.3)
    t[np.diag_indices(dim)] = spread * random_complex(rng, dim) / math.sqrt(2)
    u = random_unitary(dim, rng)
    mats = []
    for _ in range(n):
        c = random_complex(rng, degree + 1) / (1 + np.arange(degree + 1))
        p = np.zeros((dim, dim), dtype=complex)
        for k in reversed(range(degree + 1)):
            p = p @ t + c[k] * np.eye(dim)
        mats.append(u @ p @ u.conj().T)
    return CommutingTuple(mats)


def random_polynomial(rng: np.random.Generator, nvars: int, degree: int) -> MultiPolynomial:
    terms = {}
    for e in itertools.product(range(degree + 1), repeat=nvars):
        if sum(e) <= degree:
            terms[e] = complex(*rng.standard_normal(2)) / (1 + sum(e))
    return MultiPolynomial(nvars, terms)


def random_disc_polynomial(rng: np.random.Generator, degree: int, margin: float = 0.1) -> MultiPolynomial:
    """Monic-times-constant polynomial whose roots stay margin away from |z| = 1."""
    roots = []
    while len(roots) < degree:
        r = rng.uniform(0.0, 1.8)
        if abs(r - 1) < margin:
            continue
        roots.append(r * np.exp(2j * math.pi * rng.uniform()))
    lead = complex(*rng.standard_normal(2))
    return MultiPolynomial.from_roots(roots) * lead


# signs ------------------------------------------------------------------------


def _check_anticommutation(rng) -> CheckResult:
    worst = 0.0
    for n in range(1, 6):
        for k in range(1, n + 1):
            for i, j in itertools.combinations_with_replacement(range(1, n + 1), 2):
                if k < 2:
                    continue
                a = interior_matrix(i, n, k - 1) @ interior_matrix(j, n, k)
                b = interior_matrix(j, n, k - 1) @ interior_matrix(i, n, k)
                worst = max(worst, float(np.max(np.abs(a + b), initial=0.0)))
    return CheckResult("interior multiplications anticommute", worst == 0.0, f"max defect {worst:g}")


def _check_koszul_square(rng) -> CheckResult:
    worst = 0.0
    for n in (1, 2, 3):
        a = random_commuting_tuple(rng, n, 4)
        worst = max(worst, build_koszul(a).square_defect())
    return CheckResult("Koszul differential squares to zero", worst < 1e-10, f"max |d d| {worst:.2e}")


def _check_euler(rng) -> CheckResult:
    bad = []
    for n in (1, 2, 3):
        a = random_commuting_tuple(rng, n, 3)
        k = build_koszul(a)
        if k.euler_characteristic() != 0 or cohomology(k).index != 0:
            bad.append(n)
    return CheckResult("Koszul index of a matrix tuple is 0", not bad, f"failing n: {bad}")


def _check_graded_signs(rng) -> CheckResult:
    ok = True
    for n, m in itertools.product(range(4), repeat=2):
        a = GradedLineElement.of(complex(*rng.standard_normal(2)), n)
        b = GradedLineElement.of(complex(*rng.standard_normal(2)), m)
        there, back = a.swap(b), b.swap(a)
        ok &= there.degree == back.degree == n + m
        ok &= relative_gap((there.scalar * back.scalar).to_complex(), (a.tensor(b).scalar ** 2).to_complex()) < 1e-14
        sign = a.swap(b).scalar.to_complex() / b.tensor(a).scalar.to_complex()
        ok &= abs(sign - (-1) ** (n * m)) < 1e-12
    return CheckResult("graded swap is an involution with sign (-1)^{nm}", bool(ok))


def _check_ses(rng) -> CheckResult:
    iota = np.array([[1.0], [0.0]])
    pi = np.array([[0.0, 1.0]])
    v1 = ses_determinant_iso(iota, pi)
    v2 = ses_determinant_iso(2 * iota, pi)
    ok = abs(v1 + 1) < 1e-12 and abs(v2 + 0.5) < 1e-12
    return CheckResult("short exact sequence scalar on C -> C^2 -> C", ok, f"{v1:.6g}, {v2:.6g}")


def _check_torsion_of_map(rng) -> CheckResult:
    x = CochainComplex({0: 1})
    vals = []
    ok = True
    for a in (2.0, -0.5, 1j):
        t = torsion_of_map(ChainMap(x, x, {0: np.array([[a]])}))
        vals.append(t)
        ok &= abs(t - 1 / a) < 1e-12
    z = torsion_of_map(ChainMap(x, x, {0: np.zeros((1, 1))}))
    ok &= abs(z + 1) < 1e-12
    return CheckResult("torsion of scalar maps on C", bool(ok), f"zero map gives {z:.6g}")


def _check_complement_invariance(rng) -> CheckResult:
    worst = 0.0
    for _ in range(5):
        a = random_commuting_tuple(rng, 2, 3)
        # f and g both singular, so the cones carry cohomology
        (p, _), (q, _) = joint_spectrum(a)[:2]
        x, y = MultiPolynomial.variables(2)
        f = (x - p[0]) * (y - q[1])
        g = (y - p[1]) * (1 + x * 0.5)
        prob = koszul_joint_torsion_problem(a, [], f, g)
        ref = joint_torsion(prob)
        for _ in range(3):
            worst = max(worst, relative_gap(joint_torsion(prob, rng=rng), ref))
    return CheckResult("joint torsion ignores complement choices", worst < 1e-9, f"max gap {worst:.2e}")


def _check_symbol_z_z(rng) -> CheckResult:
    x, y = x_y()
    loc = tame_symbol_local(SymbolProblem(y, x, x, (0, 0)), seed=int(rng.integers(2**31))).value
    z = MultiPolynomial.variable(1, 0)
    reg = tame_symbol_regular(z, z, 0)
    ok = relative_gap(loc, -1) < 1e-6 and relative_gap(reg, -1) < 1e-12
    return CheckResult("c_0(z, z) = -1 by both routes", ok, f"limit {loc:.8g}, regular {reg:.8g}")


def suite_signs(rng) -> list[CheckResult]:
    return [
        _check_anticommutation(rng),
        _check_koszul_square(rng),
        _check_euler(rng),
        _check_graded_signs(rng),
        _check_ses(rng),
        _check_torsion_of_map(rng),
        _check_complement_invariance(rng),
        _check_symbol_z_z(rng),
    ]


# axioms -----------------------------------------------------------------------


def suite_axioms(rng, cases: int = 3) -> list[CheckResult]:
    x, y = x_y()
    one = MultiPolynomial.constant(2, 1)
    out = []
    for idx in range(cases):
        # units and uniformizer powers along the line y = 0 at the origin
        u1 = one + x * complex(*rng.uniform(-0.5, 0.5, 2))
        u2 = one * complex(*rng.uniform(0.5, 1.5, 2)) + x
        k1, k2 = int(rng.integers(1, 3)), int(rng.integers(1, 3))
        f1, f2, f3 = u1 * x**k1, u2 * x**k2, u2 + x * x
        t = x * complex(*rng.uniform(0.5, 1.5, 2))
        rep = symbol_axioms_check(y, f1, f2, f3, t, (0, 0), seed=int(rng.integers(2**31)))
        worst = rep.worst()
        out.append(
            CheckResult(
                f"symbol axioms case {idx}",
                worst < 1e-6,
                ", ".join(f"{k} {v:.1e}" for k, v in rep.deviations().items()),
            )
        )
    # c(1 + x, x) = 1 and c(unit, unit) = 1
    c1 = tame_symbol_local(SymbolProblem(y, one + x, x, (0, 0))).value
    c2 = tame_symbol_local(SymbolProblem(y, one * 2 + x, one * 3 - x, (0, 0))).value
    out.append(CheckResult("c_0(1 + z, z) = 1", relative_gap(c1, 1) < 1e-6, f"{c1:.8g}"))
    out.append(CheckResult("c_0(unit, unit) = 1", relative_gap(c2, 1) < 1e-6, f"{c2:.8g}"))
    return out


# agreement --------------------------------------------------------------------


def _matrix_triple(rng, cases: int = 4) -> CheckResult:
    worst = 0.0
    for _ in range(cases):
        n = int(rng.integers(1, 4))
        a = random_commuting_tuple(rng, n, int(rng.integers(2, 6)))
        h = [random_polynomial(rng, n, 1) for _ in range(n - 1)]
        f, g = random_polynomial(rng, n, 2), random_polynomial(rng, n, 2)
        jt = joint_torsion(koszul_joint_torsion_problem(a, h, f, g))
        ns = joint_torsion_nonsingular(a, h, f, g)
        gl = joint_torsion_global_matrix(a, h, f, g).value
        worst = max(worst, relative_gap(jt, ns), relative_gap(jt, gl))
    return CheckResult("matrix tuples: definition, nonsingular formula, global product", worst < 1e-8, f"max gap {worst:.2e}")


def _disc_pairs(rng, cases: int = 3) -> CheckResult:
    worst = 0.0
    for _ in range(cases):
        f = random_disc_polynomial(rng, int(rng.integers(1, 4)))
        g = random_disc_polynomial(rng, int(rng.integers(1, 4)))
        prob = DiscModelProblem(f, g)
        lim = joint_torsion_global_disc(prob, route="limit", seed=int(rng.integers(2**31))).value
        reg = joint_torsion_global_disc(prob, route="regular").value
        cp = carey_pincus(prob)
        worst = max(worst, relative_gap(lim, reg), relative_gap(cp * lim, 1))
    return CheckResult("disc model: limit, regular and Carey-Pincus", worst < 1e-6, f"max gap {worst:.2e}")


def _polydisc(rng) -> CheckResult:
    x, y = x_y()
    h = y - x * x
    f = x - complex(*rng.uniform(-0.4, 0.4, 2))
    g = y + x * 0.5 - complex(*rng.uniform(-0.2, 0.2, 2))
    lim = joint_torsion_global_polydisc(h, f, g).value
    ref = polydisc_nonsingular_formula(h, f, g)
    gap = relative_gap(lim, ref)
    return CheckResult("bidisc model: global product vs nonsingular formula", gap < 1e-6, f"gap {gap:.2e}")


def suite_agreement(rng) -> list[CheckResult]:
    return [_matrix_triple(rng), _disc_pairs(rng), _polydisc(rng)]


_SUITES = {"signs": suite_signs, "axioms": suite_axioms, "agreement": suite_agreement}


def run_suite(name: str, seed: int = 42) -> list[CheckResult]:
    names = SUITES if name == "all" else (name,)
    out = []
    for s in names:
        if s not in _SUITES:
            raise ValueError(f"unknown suite {s!r}")
        rng = np.random.default_rng([seed, SUITES.index(s)])
        for r in _SUITES[s](rng):
            r.name = f"{s}: {r.name}"
            out.append(r)
    return out
