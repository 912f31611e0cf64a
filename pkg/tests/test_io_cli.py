import json
import subprocess
import sys

import numpy as np
import pytest

from torsion_lab import cli
from torsion_lab.io import ValidationError, encode_complex, encode_polar, parse_problem
from torsion_lab.polynomial import MultiPolynomial as P


def poly(terms):
    return [{"e": list(e), "c": [complex(c).real, complex(c).imag]} for e, c in terms.items()]


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def run(*argv, env=None):
    code, envelope, _ = cli.run(list(argv), env or {})
    json.dumps(envelope, allow_nan=False, default=cli._json_default)  # must serialize
    return code, envelope


def value(envelope):
    re, im = envelope["value"]
    return complex(re, im)


# -- documented examples ---------------------------------------------------


def test_koszul_zero_pair(data_dir):
    code, env = run("koszul", "--input", str(data_dir / "koszul_zero_pair.json"))
    assert code == 0 and env["status"] == "ok"
    assert env["value"] == {"degrees": [-2, -1, 0], "dims": [1, 2, 1], "index": 0}


def test_koszul_invertible_pair_is_exact(data_dir):
    code, env = run("koszul", "--input", str(data_dir / "koszul_diag.json"))
    assert code == 0 and env["value"]["dims"] == [0, 0, 0]


def test_koszul_bad_shape_reports_path(data_dir):
    code, env = run("koszul", "--input", str(data_dir / "koszul_bad_shape.json"))
    assert code == 2 and env["status"] == "error"
    assert env["diagnostics"][0]["data"]["path"] == "$.payload.matrices[0][1]"


def test_noncommuting_rejected(data_dir):
    code, env = run("joint-torsion", "--input", str(data_dir / "jt_noncommuting.json"))
    assert code == 2 and "defect norm" in env["diagnostics"][0]["message"]


@pytest.mark.parametrize("name", ["jt_identity.json", "jt_shift.json"])
def test_finite_dimensional_joint_torsion_is_one(data_dir, name):
    code, env = run("joint-torsion", "--input", str(data_dir / name))
    assert code == 0 and abs(value(env) - 1) < 1e-10


def test_matrix_joint_torsion_cross_check(data_dir):
    code, env = run("joint-torsion", "--input", str(data_dir / "jt_matrix.json"), "--cross-check")
    assert code == 0
    checks = [d for d in env["diagnostics"] if d["code"] == "cross-check"]
    assert checks and checks[0]["data"]["relative_gap"] < 1e-8


def test_cusp_symbol(data_dir):
    code, env = run("tame-symbol", "--input", str(data_dir / "cusp.json"), "--cross-check")
    assert code == 0 and abs(value(env) - 1) < 1e-6
    assert not [d for d in env["diagnostics"] if d["code"] == "cross-check-mismatch"]


def test_regular_symbol_with_cross_check(data_dir):
    code, env = run("tame-symbol", "--input", str(data_dir / "symbol_z_z_regular.json"), "--cross-check")
    assert code == 0 and abs(value(env) + 1) < 1e-12
    assert env["polar"][0] == pytest.approx(1)


def test_carey_pincus(data_dir):
    code, env = run("carey-pincus", "--input", str(data_dir / "carey_pincus_z_z.json"), "--cross-check")
    assert code == 0 and abs(value(env) + 1) < 1e-12
    gap = [d for d in env["diagnostics"] if d["code"] == "cross-check"][0]["data"]["relative_gap"]
    assert gap < 1e-6


def test_noether(data_dir):
    code, env = run("noether", "--input", str(data_dir / "noether_z3.json"))
    assert code == 0 and env["value"] == -3


def test_axioms(data_dir):
    code, env = run("axioms", "--input", str(data_dir / "axioms_line.json"))
    assert code == 0
    assert max(env["value"]["deviations"].values()) < 1e-6


def test_trace_flag(data_dir):
    code, env = run("tame-symbol", "--input", str(data_dir / "cusp.json"), "--trace")
    assert code == 0 and len(env["trace"]) >= 3
    assert set(env["trace"][0]) == {"w", "q"}


# -- exit codes ------------------------------------------------------------


def test_exit_1_when_a_property_fails(tmp_path):
    x = {(1, 0): 1}
    doc = {
        "version": "1", "kind": "axioms",
        "payload": {"h": poly({(0, 1): 1}), "f1": poly({(1, 0): 1, (2, 0): 1}), "f2": poly({(1, 0): 1, (0, 0): 2}),
                    "f3": poly({(1, 0): 1}), "t": poly(x), "point": [[0, 0], [0, 0]]},
        # a crude schedule stops far from the limit
        "schedule": {"w0": 0.05, "ratio": 0.9, "stabilization_tol": 0.5, "max_steps": 3},
    }
    code, env = run("axioms", "--input", write(tmp_path, "ax.json", doc))
    assert code == 1
    assert env["diagnostics"][-1]["code"] == "axiom-violated"


def test_exit_2_on_typo_key(data_dir):
    code, env = run("noether", "--input", str(data_dir / "typo_key.json"))
    assert code == 2 and "unknown key" in env["diagnostics"][0]["message"]


def test_exit_2_on_kind_mismatch(data_dir):
    code, env = run("koszul", "--input", str(data_dir / "noether_z3.json"))
    assert code == 2 and env["diagnostics"][0]["data"]["path"] == "$.kind"


def test_exit_2_on_missing_file(tmp_path):
    code, _ = run("koszul", "--input", str(tmp_path / "nope.json"))
    assert code == 2


def test_exit_2_on_nan(tmp_path):
    path = tmp_path / "nan.json"
    path.write_text('{"version": "1", "kind": "noether", "payload": {"f": [{"e": [1], "c": [NaN, 0]}]}}')
    code, _ = run("noether", "--input", str(path))
    assert code == 2


def test_exit_2_on_circle_zero(tmp_path):
    doc = {"version": "1", "kind": "carey-pincus", "payload": {"f": poly({(1,): 1, (0,): -1}), "g": poly({(1,): 1})}}
    code, env = run("carey-pincus", "--input", write(tmp_path, "cp.json", doc))
    assert code == 2 and "unit circle" in env["diagnostics"][0]["message"]


def test_exit_3_on_near_circle_noether(tmp_path):
    doc = {"version": "1", "kind": "noether", "payload": {"f": poly({(1,): 1, (0,): -1})}}
    code, env = run("noether", "--input", write(tmp_path, "n.json", doc))
    assert code == 3 and env["diagnostics"][0]["code"] == "numerical"


def test_exit_4_when_limit_does_not_stabilize(tmp_path):
    doc = {
        "version": "1", "kind": "tame-symbol",
        "payload": {"route": "limit", "h": poly({(0, 1): 1}), "f": poly({(1, 0): 1, (2, 0): -0.3}),
                    "g": poly({(1, 0): 1, (2, 0): 1}), "point": [[0, 0], [0, 0]]},
        "schedule": {"ratio": 0.99, "max_steps": 4, "stabilization_tol": 1e-15},
    }
    code, env = run("tame-symbol", "--input", write(tmp_path, "s.json", doc))
    assert code == 4
    assert env["diagnostics"][0]["code"] == "not-stabilized" and env["diagnostics"][0]["data"]["tail"]


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as err:
        cli.main(["koszul"])
    assert err.value.code == 2


def test_bad_policy_override(data_dir):
    code, _ = run("koszul", "--input", str(data_dir / "koszul_diag.json"), "--policy-rel", "-1")
    assert code == 2


# -- determinism, seeds, formats -------------------------------------------


def strip_timing(env):
    return {k: v for k, v in env.items() if k != "timing_ms"}


def test_output_is_deterministic(data_dir):
    argv = ("tame-symbol", "--input", str(data_dir / "cusp.json"), "--trace")
    assert strip_timing(run(*argv)[1]) == strip_timing(run(*argv)[1])


def test_seed_resolution():
    assert cli.resolve_seed(None, {}) == 42
    assert cli.resolve_seed(None, {"TORSION_LAB_SEED": "7"}) == 7
    assert cli.resolve_seed(3, {"TORSION_LAB_SEED": "7"}) == 3
    with pytest.raises(ValidationError):
        cli.resolve_seed(None, {"TORSION_LAB_SEED": "x"})


def test_env_seed_changes_direction(data_dir):
    argv = ("tame-symbol", "--input", str(data_dir / "cusp.json"))
    theta = lambda env: [d for d in env["diagnostics"] if d["code"] == "limit"][0]["data"]["theta"]  # noqa: E731
    a = theta(run(*argv, env={"TORSION_LAB_SEED": "1"})[1])
    b = theta(run(*argv, env={"TORSION_LAB_SEED": "2"})[1])
    c = theta(run(*argv, "--seed", "1", env={"TORSION_LAB_SEED": "2"})[1])
    assert a != b and a == c


def test_human_format(data_dir, capsys):
    assert cli.main(["carey-pincus", "--input", str(data_dir / "carey_pincus_z_z.json"), "--format", "human"]) == 0
    text = capsys.readouterr().out
    assert "carey-pincus: ok" in text and "|.| = 1" in text


def test_json_output_parses(data_dir, capsys):
    assert cli.main(["noether", "--input", str(data_dir / "noether_z3.json")]) == 0
    env = json.loads(capsys.readouterr().out)
    assert env["value"] == -3 and env["command"] == "noether"


def test_verify_signs_suite():
    code, env = run("verify", "--suite", "signs")
    assert code == 0 and env["value"]["failed"] == 0 and env["value"]["passed"] > 0


def test_console_script_entry(data_dir):
    proc = subprocess.run(
        [sys.executable, "-m", "torsion_lab.cli", "noether", "--input", str(data_dir / "noether_z3.json")],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["value"] == -3


# -- io --------------------------------------------------------------------


def test_encoders_normalize_negative_zero():
    assert encode_complex(complex(-0.0, -0.0)) == [0.0, 0.0]
    assert str(encode_complex(complex(-0.0, 0))[0]) == "0.0"
    assert encode_polar(-1) == [1.0, pytest.approx(np.pi)]


def test_strict_keys_everywhere():
    base = {"version": "1", "kind": "noether", "payload": {"f": poly({(1,): 1})}}
    parse_problem(base)
    with pytest.raises(ValidationError) as err:
        parse_problem({**base, "extra": 1})
    assert err.value.path == "$"
    with pytest.raises(ValidationError):
        parse_problem({**base, "payload": {"f": [{"e": [1], "c": [1, 0], "x": 0}]}})
    with pytest.raises(ValidationError):
        parse_problem({**base, "version": "2"})
    with pytest.raises(ValidationError):
        parse_problem({**base, "schedule": {"ratio": 2}})


def test_polynomial_round_trip():
    p = P(2, {(1, 0): 1 + 2j, (0, 3): -0.5})
    doc = {"version": "1", "kind": "tame-symbol",
           "payload": {"h": p.to_json(), "f": p.to_json(), "g": p.to_json(), "point": [[0, 0], [0, 0]]}}
    assert parse_problem(doc).payload["h"] == p
