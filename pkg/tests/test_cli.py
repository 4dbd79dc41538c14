"""Command-line frontend: outputs, exit codes, determinism, golden files."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from segre import cli
from segre.errors import InternalConsistencyError

from conftest import FIXTURE_DIR

GOLDEN_DIR = Path(__file__).resolve().parent / "goldens"


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# rank
# ---------------------------------------------------------------------------


def test_rank_fixture_h(capsys):
    code, out, _ = run_cli(capsys, "rank", "--fixture", "h")
    assert code == 0
    assert "k0 = 2" in out
    assert (GOLDEN_DIR / "rank_h.txt").read_text() == out


def test_rank_json_values(capsys):
    expectations = {
        "h": ([1, 2, 2], 2),
        "flat": ([1, 1, 1], 1),
        "l4": ([1, 2, 2], 2),
        "c2": ([1, 2, 3, 3], 3),
    }
    for name, (ranks, k0) in expectations.items():
        code, out, _ = run_cli(capsys, "rank", "--fixture", name, "--json")
        assert code == 0
        payload = json.loads(out)
        assert payload["schema"] == 1
        assert payload["ranks"] == ranks
        assert payload["k0"] == k0
        assert payload["stable"] is True


def test_rank_accepts_file_path(capsys):
    code, out, _ = run_cli(capsys, "rank", str(FIXTURE_DIR / "h.json"))
    assert code == 0
    assert "k0 = 2" in out


# ---------------------------------------------------------------------------
# finite-type
# ---------------------------------------------------------------------------


def test_finite_type_reports_both_routes(capsys):
    code, out, _ = run_cli(capsys, "finite-type", "--fixture", "l4")
    assert code == 0
    assert "finite type: yes" in out
    assert "routes agree: yes" in out
    code, out, _ = run_cli(capsys, "finite-type", "--fixture", "flat", "--json")
    assert code == 0
    payload = json.loads(out)
    assert payload["finite_type"] == {"lie": False, "segre": False}


# ---------------------------------------------------------------------------
# orbit
# ---------------------------------------------------------------------------


def test_orbit_flat(capsys):
    code, out, _ = run_cli(capsys, "orbit", "--fixture", "flat", "--json")
    assert code == 0
    payload = json.loads(out)
    assert payload["e"] == 1
    assert payload["orbit_generators"] == ["w1"]


def test_orbit_h_and_c2(capsys):
    for name in ("h", "c2"):
        code, out, _ = run_cli(capsys, "orbit", "--fixture", name, "--json")
        assert code == 0
        assert json.loads(out)["e"] == 0


def test_orbit_inconclusive_degree_bound(tmp_path, capsys):
    # the annihilator here has degree 4, out of reach of bound 1 even after
    # the single built-in escalation
    manifold = tmp_path / "quartic.json"
    manifold.write_text(
        json.dumps(
            {
                "N": 2,
                "d": 1,
                "form": "graph",
                "expressions": ["ta1 + i*z1^4 + i*ch1^4"],
            }
        )
    )
    code, _, err = run_cli(capsys, "orbit", str(manifold), "--degree", "1")
    assert code == cli.EXIT_INCONCLUSIVE
    assert "inconclusive" in err


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def test_verify_flat_golden(capsys):
    code, out, _ = run_cli(capsys, "verify", "--fixture", "flat")
    assert code == 0
    assert (GOLDEN_DIR / "verify_flat.txt").read_text() == out


def test_verify_json_schema(capsys):
    code, out, _ = run_cli(capsys, "verify", "--fixture", "h", "--json")
    assert code == 0
    payload = json.loads(out)
    assert payload["schema"] == 1
    assert set(payload) == {
        "schema",
        "manifold",
        "config",
        "ranks",
        "k0",
        "stable",
        "dim_g0",
        "e",
        "finite_type",
        "orbit_generators",
        "mirror",
        "checks",
    }
    assert payload["finite_type"] == {"lie": True, "segre": True}
    assert payload["mirror"]["annihilates"] is True
    assert payload["mirror"]["literal_annihilates"] is False
    assert all(check["pass"] for check in payload["checks"].values())


def test_verify_byte_determinism_across_jobs(capsys):
    runs = []
    for jobs in ("1", "2"):
        code, out, _ = run_cli(
            capsys, "verify", "--fixture", "h", "--json", "--jobs", jobs, "--seed", "7"
        )
        assert code == 0
        runs.append(out.encode())
    assert runs[0] == runs[1]
    code, out, _ = run_cli(capsys, "verify", "--fixture", "h", "--json", "--seed", "7")
    assert out.encode() == runs[0]


# ---------------------------------------------------------------------------
# loading errors and exit codes
# ---------------------------------------------------------------------------


def test_load_error_exit_code(tmp_path, capsys):
    broken = tmp_path / "broken.json"
    broken.write_text(
        json.dumps(
            {"N": 2, "d": 1, "form": "graph", "expressions": ["ta1 + z1*ch1"]}
        )
    )
    code, _, err = run_cli(capsys, "verify", str(broken))
    assert code == cli.EXIT_LOAD
    assert "not real" in err


def test_missing_file_exit_code(capsys):
    code, _, err = run_cli(capsys, "rank", "/nonexistent/m.json")
    assert code == cli.EXIT_LOAD


def test_unparseable_expression_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(
        json.dumps({"N": 2, "d": 1, "form": "graph", "expressions": ["ta1 +"]})
    )
    code, _, err = run_cli(capsys, "rank", str(bad))
    assert code == cli.EXIT_LOAD
    assert "position" in err


def test_check_failure_exit_code(monkeypatch, capsys):
    from segre import orbit as orbit_module
    from segre.orbit import CheckResult

    real_verify = orbit_module.verify_all

    def sabotaged(manifold, config=None):
        report = real_verify(manifold, config)
        checks = dict(report.checks)
        checks["central_identity"] = CheckResult("central_identity", False, "forced")
        object.__setattr__(report, "checks", checks)
        return report

    monkeypatch.setattr(cli, "verify_all", sabotaged)
    code, out, _ = run_cli(capsys, "verify", "--fixture", "flat")
    assert code == cli.EXIT_CHECK_FAILED
    assert "CHECKS FAILED" in out


def test_unstable_rank_exit_code(monkeypatch, capsys):
    from dataclasses import replace

    from segre import rank_profile as real_rank_profile

    def unstable(manifold, J_max=None, options=None):
        profile = real_rank_profile(manifold, J_max, options)
        certs = tuple(replace(cert, stable=False) for cert in profile.certificates)
        return replace(profile, certificates=certs, stable=False)

    monkeypatch.setattr(cli, "rank_profile", unstable)
    code, out, _ = run_cli(capsys, "rank", "--fixture", "h")
    assert code == cli.EXIT_INCONCLUSIVE
    assert "no" in out


def test_internal_error_exit_code(monkeypatch, capsys):
    def explode(*args, **kwargs):
        raise InternalConsistencyError("ranks moved backwards")

    monkeypatch.setattr(cli, "rank_profile", explode)
    code, _, err = run_cli(capsys, "rank", "--fixture", "h")
    assert code == cli.EXIT_INTERNAL
    assert "internal" in err


def test_env_seed_overrides_flag(monkeypatch, capsys):
    monkeypatch.setenv("SEGRE_SEED", "424242")
    code, out, _ = run_cli(capsys, "rank", "--fixture", "h", "--json", "--seed", "1")
    assert code == 0
    assert json.loads(out)["config"]["seed"] == 424242


def test_unknown_fixture(capsys):
    with pytest.raises(SystemExit):
        cli.main(["rank", "--fixture", "nope"])
