"""Command-line frontend: load manifold files, run computations, emit reports.

Commands
  rank         ranks of the iterated mappings and the stabilization index
  finite-type  the two finite-type routes (bracket closure vs rank) compared
  orbit        annihilator count e and the orbit generators
  verify       the full theorem-verification suite

Exit codes: 0 success, 2 parse/load error, 3 inconclusive result,
4 theorem-check failure, 5 internal consistency error.  JSON output is
byte-deterministic for a fixed seed and configuration; the SEGRE_SEED
environment variable overrides --seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from importlib import resources
from pathlib import Path
from typing import List, Optional

from .config import DEFAULT_SEED, RunConfig
from .errors import (
    InconclusiveError,
    InternalConsistencyError,
    ManifoldError,
    SegreError,
)
from .expressions import GenericManifold, load_manifold_file
from .fields import lie_hull_dimension
from .orbit import VerificationReport, verify_all
from .rank import rank_profile

EXIT_OK = 0
EXIT_LOAD = 2
EXIT_INCONCLUSIVE = 3
EXIT_CHECK_FAILED = 4
EXIT_INTERNAL = 5

FIXTURES = ("h", "flat", "l4", "c2")


def _fixture_path(name: str) -> Path:
    if name not in FIXTURES:
        raise ManifoldError(f"unknown fixture {name!r}; available: {', '.join(FIXTURES)}")
    return Path(str(resources.files("segre").joinpath("fixtures").joinpath(f"{name}.json")))


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="segre",
        description="Exact rank dynamics of iterated Segre mappings at desk scale.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("rank", "ranks of the iterated mappings and the stabilization index"),
        ("finite-type", "compare the bracket and rank routes to finite type"),
        ("orbit", "orbit annihilator count and generators"),
        ("verify", "run the full verification suite"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("manifold", nargs="?", help="manifold definition file (JSON)")
        cmd.add_argument("--fixture", choices=FIXTURES, help="use a bundled fixture instead of a file")
        cmd.add_argument("--kappa", type=int, default=8, help="truncation order (default 8)")
        cmd.add_argument("--jmax", type=int, default=None, help="largest iterate (default d+2)")
        cmd.add_argument("--depth", type=int, default=None, help="bracket depth (default kappa)")
        cmd.add_argument("--degree", type=int, default=None, help="annihilator degree bound (default min(4, kappa/2))")
        cmd.add_argument("--seed", type=int, default=DEFAULT_SEED, help="screening seed")
        cmd.add_argument("--jobs", type=int, default=1, help="parallelism hint; output is independent of it")
        cmd.add_argument("--json", action="store_true", help="emit the JSON report")
    return parser


def _config_from_args(args) -> RunConfig:
    seed = args.seed
    env_seed = os.environ.get("SEGRE_SEED")
    if env_seed is not None:
        seed = int(env_seed)
    return RunConfig(
        kappa=args.kappa,
        J_max=args.jmax,
        bracket_depth=args.depth,
        degree_bound=args.degree,
        seed=seed,
        jobs=args.jobs,
    )


def _load(args, config: RunConfig) -> GenericManifold:
    if args.fixture:
        path = _fixture_path(args.fixture)
    elif args.manifold:
        path = Path(args.manifold)
    else:
        raise ManifoldError("provide a manifold file or --fixture")
    return load_manifold_file(path, config.kappa)


def _emit_json(payload: dict) -> None:
    sys.stdout.write(json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n")


def _config_json(config: RunConfig, manifold: GenericManifold) -> dict:
    # jobs is an execution hint, not part of the report identity
    return {
        "kappa": config.kappa,
        "jmax": config.resolve_jmax(manifold.d),
        "depth": config.resolve_depth(),
        "degree": config.resolve_degree(),
        "seed": config.seed,
    }


def _manifold_json(manifold: GenericManifold) -> dict:
    return {
        "label": manifold.label,
        "N": manifold.N,
        "d": manifold.d,
        "n": manifold.n,
        "kappa": manifold.kappa,
    }


def _report_json(report: VerificationReport, manifold: GenericManifold) -> dict:
    return {
        "schema": 1,
        "manifold": _manifold_json(manifold),
        "config": _config_json(report.config, manifold),
        "ranks": list(report.profile.ranks),
        "k0": report.profile.k0,
        "stable": report.profile.stable,
        "dim_g0": report.lie.dim_g0,
        "e": report.orbit.e,
        "finite_type": {"lie": report.finite_type_lie, "segre": report.finite_type_segre},
        "orbit_generators": report.orbit.generator_texts(report.dims),
        "mirror": {
            "annihilates": report.mirror.annihilates,
            "literal_annihilates": report.mirror.literal_annihilates,
            "rank": report.mirror.rank_certificate.rank,
            "generators": report.mirror.generator_texts(report.dims.n),
        },
        "checks": {
            name: {"pass": check.passed, "witness": check.witness}
            for name, check in report.checks.items()
        },
    }


def _rank_table(manifold: GenericManifold, profile) -> List[str]:
    lines = [manifold.describe()]
    lines.append("  j   Rk v^j   stable")
    for j, (r, cert) in enumerate(zip(profile.ranks, profile.certificates), start=1):
        lines.append(f"{j:>3}   {r:>6}   {'yes' if cert.stable else 'no':>6}")
    lines.append(f"k0 = {profile.k0}   (bound d+1 = {manifold.d + 1})")
    return lines


def cmd_rank(args) -> int:
    config = _config_from_args(args)
    manifold = _load(args, config)
    profile = rank_profile(manifold, config.resolve_jmax(manifold.d), config.rank_options())
    if args.json:
        _emit_json(
            {
                "schema": 1,
                "manifold": _manifold_json(manifold),
                "config": _config_json(config, manifold),
                "ranks": list(profile.ranks),
                "k0": profile.k0,
                "stable": profile.stable,
            }
        )
    else:
        print("\n".join(_rank_table(manifold, profile)))
    return EXIT_OK if profile.stable else EXIT_INCONCLUSIVE


def cmd_finite_type(args) -> int:
    config = _config_from_args(args)
    manifold = _load(args, config)
    profile = rank_profile(manifold, config.resolve_jmax(manifold.d), config.rank_options())
    lie = lie_hull_dimension(manifold, config.resolve_depth())
    finite_lie = lie.dim_g0 == 2 * manifold.N - manifold.d
    finite_segre = profile.rank_at_k0 == manifold.N
    if args.json:
        _emit_json(
            {
                "schema": 1,
                "manifold": _manifold_json(manifold),
                "config": _config_json(config, manifold),
                "ranks": list(profile.ranks),
                "k0": profile.k0,
                "stable": profile.stable and lie.stable,
                "dim_g0": lie.dim_g0,
                "finite_type": {"lie": finite_lie, "segre": finite_segre},
            }
        )
    else:
        print(manifold.describe())
        print(f"bracket route: dim g(0) = {lie.dim_g0} of {2 * manifold.N - manifold.d}"
              f" (depth {lie.bracket_depth_used}, stable {'yes' if lie.stable else 'no'})"
              f" -> finite type: {'yes' if finite_lie else 'no'}")
        print(f"rank route:    Rk v^k0 = {profile.rank_at_k0} of N = {manifold.N}"
              f" (k0 = {profile.k0})"
              f" -> finite type: {'yes' if finite_segre else 'no'}")
        print(f"routes agree: {'yes' if finite_lie == finite_segre else 'NO'}")
    if finite_lie != finite_segre:
        return EXIT_CHECK_FAILED
    if not (profile.stable and lie.stable):
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def cmd_orbit(args) -> int:
    config = _config_from_args(args)
    manifold = _load(args, config)
    report = verify_all(manifold, config)
    orbit = report.orbit
    if args.json:
        _emit_json(
            {
                "schema": 1,
                "manifold": _manifold_json(manifold),
                "config": _config_json(config, manifold),
                "e": orbit.e,
                "dim_O": orbit.dim_O,
                "orbit_generators": orbit.generator_texts(manifold.dims),
                "checks": {
                    name: {"pass": check.passed, "witness": check.witness}
                    for name, check in orbit.checks.items()
                },
            }
        )
    else:
        print(manifold.describe())
        print(f"e = {orbit.e}   dim O = {orbit.dim_O}")
        if orbit.f_generators:
            for index, text in enumerate(orbit.generator_texts(manifold.dims), start=1):
                print(f"f{index} = {text}")
        else:
            print("no annihilators: the intrinsic complexification is the whole space")
        for name, check in orbit.checks.items():
            print(f"[{'pass' if check.passed else 'FAIL'}] {name}: {check.witness}")
    return EXIT_OK


def cmd_verify(args) -> int:
    config = _config_from_args(args)
    manifold = _load(args, config)
    report = verify_all(manifold, config)
    if args.json:
        _emit_json(_report_json(report, manifold))
    else:
        print(manifold.describe())
        ranks = ", ".join(str(r) for r in report.profile.ranks)
        print(f"ranks = ({ranks})   k0 = {report.profile.k0}   dim g(0) = {report.lie.dim_g0}   e = {report.orbit.e}")
        for name in sorted(report.checks):
            check = report.checks[name]
            print(f"[{'pass' if check.passed else 'FAIL'}] {name}: {check.witness}")
        print(f"result: {'all checks passed' if report.passed else 'CHECKS FAILED'}")
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "rank": cmd_rank,
        "finite-type": cmd_finite_type,
        "orbit": cmd_orbit,
        "verify": cmd_verify,
    }
    try:
        return handlers[args.command](args)
    except ManifoldError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LOAD
    except InconclusiveError as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except InternalConsistencyError as exc:
        print(f"internal consistency error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except SegreError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
