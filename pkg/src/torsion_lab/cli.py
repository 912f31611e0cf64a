"""``torsion-lab`` command line front end.

Every command prints one JSON envelope::

    {"status": "ok" | "warning" | "error", "command": ..., "value": ...,
     "diagnostics": [...], "timing_ms": ...}

Exit codes: 0 success, 1 a checked property failed, 2 invalid input,
3 numerical failure, 4 a limit did not stabilize.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
import warnings
from dataclasses import replace

import numpy as np

from torsion_lab.complexes import CochainComplex, cohomology
from torsion_lab.errors import ModelError, NumericalError, StabilizationError
from torsion_lab.io import Problem, ValidationError, encode_complex, encode_polar, load_problem
from torsion_lab.koszul import CommutingTuple, build_koszul
from torsion_lab.linalg import DEFAULT_POLICY, RankPolicy, relative_gap
from torsion_lab.tame_symbol import (
    DiscModelProblem,
    LimitSchedule,
    SymbolProblem,
    carey_pincus,
    coordinate_curve,
    embed_univariate,
    joint_torsion_global_disc,
    noether_index,
    symbol_axioms_check,
    tame_symbol_local,
    tame_symbol_regular,
)
from torsion_lab.torsion import (
    JointTorsionProblem,
    joint_torsion_nonsingular,
    joint_torsion_report,
    koszul_joint_torsion_problem,
)
from torsion_lab.verify import SUITES, run_suite

EXIT_OK, EXIT_FAILED, EXIT_INVALID, EXIT_NUMERICAL, EXIT_UNSTABLE = 0, 1, 2, 3, 4
SEED_ENV = "TORSION_LAB_SEED"
DEFAULT_SEED = 42
AXIOM_TOL = 1e-6


class Outcome:
    """Value and diagnostics collected while a command runs."""

    def __init__(self):
        self.value = None
        self.polar = None
        self.diagnostics: list[dict] = []
        self.failed = False
        self.trace = None

    def scalar(self, z: complex) -> None:
        self.value = encode_complex(z)
        self.polar = encode_polar(z)

    def note(self, level: str, code: str, message: str, **data) -> None:
        entry = {"level": level, "code": code, "message": message}
        if data:
            entry["data"] = data
        self.diagnostics.append(entry)


def _policy(problem: Problem, args) -> RankPolicy:
    policy = problem.policy or DEFAULT_POLICY
    if args.policy_rel is not None:
        policy = replace(policy, relative_threshold=args.policy_rel)
    return policy


def _trace_rows(trace) -> list[dict]:
    return [{"w": encode_complex(w), "q": encode_complex(q)} for w, q in trace]


# commands --------------------------------------------------------------------


def cmd_koszul(problem: Problem, args, out: Outcome) -> None:
    p = problem.payload
    a = CommutingTuple(p["matrices"], dim=p["dim"])
    h = cohomology(build_koszul(a), _policy(problem, args))
    degrees = list(range(-a.n, 1))
    out.value = {"degrees": degrees, "dims": [h.dim(k) for k in degrees], "index": h.index}
    if h.ambiguous:
        out.note("warning", "rank-ambiguous", "a singular value sits near the rank threshold",
                 degrees=list(h.ambiguous_degrees))


def cmd_joint_torsion(problem: Problem, args, out: Outcome) -> None:
    p = problem.payload
    policy = _policy(problem, args)
    rng = np.random.default_rng(args.seed)
    if p["model"] == "matrix":
        a = CommutingTuple(p["matrices"])
        a.check()
        jt = koszul_joint_torsion_problem(a, p["h"], p["f"], p["g"], policy)
    else:
        x = CochainComplex(p["dims"], p["differentials"])
        jt = JointTorsionProblem(x, p["f"], p["g"], policy)
    rep = joint_torsion_report(jt, rng)
    value = rep.value.to_complex()
    out.scalar(value)
    if rep.ambiguous:
        out.note("warning", "rank-ambiguous", "a singular value sits near the rank threshold")
    if args.cross_check:
        if p["model"] != "matrix":
            out.note("info", "cross-check-skipped", "the nonsingular formula needs the matrix model")
            return
        try:
            other = joint_torsion_nonsingular(a, p["h"], p["f"], p["g"], policy)
        except ModelError as exc:
            out.note("info", "cross-check-skipped", str(exc))
            return
        gap = relative_gap(value, other)
        out.note("info", "cross-check", "nonsingular formula", value=encode_complex(other), relative_gap=gap)
        if gap > 1e-8:
            out.note("warning", "cross-check-mismatch", f"relative gap {gap:.3e} exceeds 1e-8")


def cmd_tame_symbol(problem: Problem, args, out: Outcome) -> None:
    p = problem.payload
    schedule = problem.schedule or LimitSchedule()
    if p["route"] == "regular":
        value = tame_symbol_regular(p["f"], p["g"], p["point"])
        out.scalar(value)
        if args.cross_check:
            prob = SymbolProblem(coordinate_curve(), embed_univariate(p["f"]), embed_univariate(p["g"]), (p["point"], 0))
            other = tame_symbol_local(prob, schedule, args.seed).value
            _report_gap(out, value, other, "limit procedure on the line y = 0")
        return
    prob = SymbolProblem(p["h"], p["f"], p["g"], p["point"], p["epsilon"])
    res = tame_symbol_local(prob, schedule, args.seed, trace=args.trace)
    out.scalar(res.value)
    out.note("info", "limit", f"stabilized after {res.steps} steps",
             steps=res.steps, theta=res.theta, w0=res.w0, epsilon=res.epsilon, rotations=res.rotations)
    if args.trace:
        out.trace = _trace_rows(res.trace)
    if args.cross_check:
        # an independent approach direction
        other = tame_symbol_local(prob, replace(schedule, theta=(res.theta + 2.0) % (2 * math.pi)), args.seed).value
        _report_gap(out, res.value, other, "limit along a second direction")


def _report_gap(out: Outcome, value, other, what: str, tol: float = 1e-6) -> None:
    gap = relative_gap(value, other)
    out.note("info", "cross-check", what, value=encode_complex(other), relative_gap=gap)
    if gap > tol:
        out.note("warning", "cross-check-mismatch", f"relative gap {gap:.3e} exceeds {tol:g}")


def cmd_carey_pincus(problem: Problem, args, out: Outcome) -> None:
    p = problem.payload
    prob = DiscModelProblem(p["f"], p["g"])
    value = carey_pincus(prob)
    out.scalar(value)
    if args.cross_check:
        # the classical formula is the inverse of the joint torsion orientation
        jt = joint_torsion_global_disc(prob, route="limit", schedule=problem.schedule, seed=args.seed).value
        _report_gap(out, value * jt, 1.0, "product with the global joint torsion (expected 1)")


def cmd_noether(problem: Problem, args, out: Outcome) -> None:
    p = problem.payload
    res = noether_index(p["f"], p["nodes"])
    out.value = res.index
    out.note("info", "winding", "quadrature winding number and root count",
             winding=res.winding, disc_root_count=res.disc_root_count)


def cmd_axioms(problem: Problem, args, out: Outcome) -> None:
    p = problem.payload
    rep = symbol_axioms_check(p["h"], p["f1"], p["f2"], p["f3"], p["t"], p["point"], problem.schedule, args.seed)
    dev = rep.deviations()
    out.value = {
        "antisymmetry": encode_complex(rep.antisymmetry),
        "multiplicativity": encode_complex(rep.multiplicativity),
        "steinberg": encode_complex(rep.steinberg),
        "deviations": dev,
    }
    bad = [k for k, v in dev.items() if v > AXIOM_TOL]
    if bad:
        out.failed = True
        out.note("error", "axiom-violated", f"deviation above {AXIOM_TOL:g}: {', '.join(bad)}")


def cmd_verify(args, out: Outcome) -> None:
    results = run_suite(args.suite, args.seed)
    out.value = {
        "suite": args.suite,
        "seed": args.seed,
        "checks": [r.as_dict() for r in results],
        "passed": sum(r.passed for r in results),
        "failed": sum(not r.passed for r in results),
    }
    for r in results:
        if not r.passed:
            out.failed = True
            out.note("error", "check-failed", r.name, detail=r.detail)


COMMANDS = {
    "koszul": cmd_koszul,
    "joint-torsion": cmd_joint_torsion,
    "tame-symbol": cmd_tame_symbol,
    "carey-pincus": cmd_carey_pincus,
    "noether": cmd_noether,
    "axioms": cmd_axioms,
}


# plumbing --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="torsion-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=None, help=f"random seed (default {DEFAULT_SEED}, or ${SEED_ENV})")
        p.add_argument("--format", choices=("json", "human"), default="json")

    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--input", required=True, help="problem file (JSON)")
        p.add_argument("--policy-rel", type=float, default=None, help="relative rank threshold override")
        p.add_argument("--cross-check", action="store_true", help="also run an independent route")
        p.add_argument("--trace", action="store_true", help="emit the q(w_k) sequence of the limit")
        common(p)
    p = sub.add_parser("verify")
    p.add_argument("--suite", choices=SUITES + ("all",), default="all")
    common(p)
    return parser


def resolve_seed(flag: int | None, environ=os.environ) -> int:
    if flag is not None:
        return flag
    raw = environ.get(SEED_ENV)
    if raw is None or raw == "":
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        raise ValidationError(f"${SEED_ENV}", f"not an integer: {raw!r}") from None


def run(argv=None, environ=os.environ) -> tuple[int, dict, str]:
    args = build_parser().parse_args(argv)
    out = Outcome()
    code = EXIT_OK
    start = time.perf_counter()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            args.seed = resolve_seed(args.seed, environ)
            if args.command == "verify":
                cmd_verify(args, out)
            else:
                if args.policy_rel is not None and not (args.policy_rel >= 0 and math.isfinite(args.policy_rel)):
                    raise ValidationError("--policy-rel", "must be a finite nonnegative number")
                problem = load_problem(args.input)
                if problem.kind != args.command:
                    raise ValidationError("$.kind", f"file holds a {problem.kind!r} problem, not {args.command!r}")
                COMMANDS[args.command](problem, args, out)
            if out.failed:
                code = EXIT_FAILED
        except ValidationError as exc:
            code = EXIT_INVALID
            out.note("error", "invalid-input", exc.reason, path=exc.path)
        except ModelError as exc:
            code = EXIT_INVALID
            out.note("error", "invalid-input", str(exc))
        except StabilizationError as exc:
            code = EXIT_UNSTABLE
            out.note("error", "not-stabilized", str(exc), tail=_trace_rows(exc.tail))
        except (NumericalError, np.linalg.LinAlgError, ZeroDivisionError, OverflowError) as exc:
            code = EXIT_NUMERICAL
            out.note("error", "numerical", str(exc))
    for w in caught:
        out.note("warning", type(w.message).__name__, str(w.message))
    levels = {d["level"] for d in out.diagnostics}
    status = "error" if code != EXIT_OK else ("warning" if "warning" in levels else "ok")
    envelope = {"status": status, "command": args.command, "value": out.value}
    if out.polar is not None:
        envelope["polar"] = out.polar
    if out.trace is not None:
        envelope["trace"] = out.trace
    envelope["diagnostics"] = out.diagnostics
    envelope["timing_ms"] = round((time.perf_counter() - start) * 1000.0, 3)
    return code, envelope, args.format


def render_human(env: dict) -> str:
    lines = [f"{env['command']}: {env['status']}"]
    value = env["value"]
    if env.get("polar") is not None:
        re, im = value
        mag, phase = env["polar"]
        lines.append(f"value: {re:.12g} {'+' if im >= 0 else '-'} {abs(im):.12g}i   |.| = {mag:.12g}, arg = {phase:.12g}")
    elif isinstance(value, dict) and "checks" in value:
        for c in value["checks"]:
            lines.append(f"  [{'pass' if c['passed'] else 'FAIL'}] {c['name']}  {c['detail']}")
        lines.append(f"passed {value['passed']}, failed {value['failed']}")
    elif value is not None:
        lines.append(f"value: {json.dumps(value)}")
    for row in env.get("trace", []):
        (wr, wi), (qr, qi) = row["w"], row["q"]
        lines.append(f"  w = {wr:+.3e}{wi:+.3e}i   q = {qr:+.12g}{qi:+.12g}i")
    for d in env["diagnostics"]:
        where = f" at {d['data']['path']}" if "data" in d and "path" in d["data"] else ""
        lines.append(f"{d['level']}: {d['code']}{where}: {d['message']}")
    lines.append(f"time: {env['timing_ms']:.1f} ms")
    return "\n".join(lines)


def main(argv=None) -> int:
    code, envelope, fmt = run(argv)
    if fmt == "human":
        print(render_human(envelope))
    else:
        print(json.dumps(envelope, sort_keys=True, allow_nan=False, default=_json_default))
    return code


def _json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return encode_complex(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot encode {type(obj).__name__}")


if __name__ == "__main__":
    sys.exit(main())
