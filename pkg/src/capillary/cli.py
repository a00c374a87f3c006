"""Command-line front end.

Subcommands::

    capillary check  --config cfg.json        validate and test balancing
    capillary repair --config cfg.json        print the minimally repaired config
    capillary solve  --config cfg.json --out DIR [--level N]
    capillary verify --demo equatorial-m3 --level 5
    capillary demo   sphere-m1                print an embedded config
    capillary export --config cfg.json --out DIR

Exit codes: 0 success, 1 domain or convergence failure, 2 usage or parse error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .config import CapillaryConfig, load_config, spherical_angle
from .demos import DEMOS, demo_config
from .errors import CapillaryError, ConfigError, StageError
from .minkowski import SolverOptions
from .sphere import balancing_tolerance, check_balancing, repair_areas, sphere_areas

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

# gates applied by ``verify``
AREA_IDENTITY_GATE = 1e-2
CONTACT_GATE_DEG = 1.0
DISTANCE_GATE = 1e-3


class UsageError(Exception):
    pass


def _level(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"level must be an integer, got {text!r}")
    if not 0 <= v <= 7:
        raise argparse.ArgumentTypeError("level must lie in [0, 7]")
    return v


def _positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("value must be positive")
    return v


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("value must be >= 1")
    return v


def build_parser():
    parser = argparse.ArgumentParser(
        prog="capillary",
        description="Capillary surfaces in polyhedral containers from contact-angle data.")
    sub = parser.add_subparsers(dest="command", required=True)

    def source(p):
        g = p.add_mutually_exclusive_group()
        g.add_argument("--config", metavar="PATH", help="config JSON file")
        g.add_argument("--demo", metavar="NAME", help=f"embedded config: {', '.join(DEMOS)}")

    def solver(p):
        p.add_argument("--level", type=_level, default=4,
                       help="icosphere refinement level 0-7 (default 4; 6 and 7 are slow)")
        p.add_argument("--tol", type=_positive_float, default=None,
                       help="relative facet-area tolerance of the solver")
        p.add_argument("--max-iter", type=_positive_int, default=None,
                       help="Newton iteration cap")
        p.add_argument("--seed-h", metavar="PATH", default=None,
                       help="initial support vector (JSON list or whitespace-separated text)")

    p = sub.add_parser("check", help="validate a config and report its balancing residual")
    source(p)
    p = sub.add_parser("repair", help="balance a config by a minimum-norm area change")
    source(p)
    p.add_argument("--out", metavar="PATH", help="write the repaired config here")
    p = sub.add_parser("solve", help="build the surface and write meshes and reports")
    source(p)
    solver(p)
    p.add_argument("--out", metavar="DIR", default=".", help="output directory")
    p = sub.add_parser("verify", help="solve and run the acceptance-style checks")
    source(p)
    solver(p)
    p.add_argument("--out", metavar="PATH", help="write the verification JSON here")
    p = sub.add_parser("demo", help="print an embedded config as JSON")
    p.add_argument("name", nargs="?", help=f"one of {', '.join(DEMOS)}")
    p.add_argument("--demo", dest="demo_flag", metavar="NAME", help="same as NAME")
    p = sub.add_parser("export", help="write sigma.obj, disks.obj, planes.json and body.off")
    source(p)
    solver(p)
    p.add_argument("--out", metavar="DIR", default=".", help="output directory")
    return parser


def _load(args):
    """Config from ``--config`` or ``--demo``, unvalidated; parse failures are usage errors."""
    if getattr(args, "demo", None):
        try:
            return demo_config(args.demo)
        except KeyError:
            raise UsageError(f"unknown demo {args.demo!r}; choose from {', '.join(DEMOS)}")
    if not getattr(args, "config", None):
        raise UsageError("one of --config or --demo is required")
    try:
        return load_config(args.config, validate=False)
    except OSError as exc:
        raise UsageError(f"cannot read {args.config}: {exc.strerror or exc}")
    except ConfigError:
        raise
    except ValueError as exc:
        raise UsageError(str(exc))


def _read_seed(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}")
    try:
        vals = json.loads(text)
    except json.JSONDecodeError:
        vals = text.split()
    try:
        h = np.asarray(vals, dtype=float).reshape(-1)
    except (TypeError, ValueError):
        raise UsageError(f"{path}: support vector must be a list of numbers")
    if len(h) == 0 or not np.all(np.isfinite(h)):
        raise UsageError(f"{path}: support vector must be a non-empty list of finite numbers")
    return h


def _options(args):
    kw = {}
    if args.tol is not None:
        kw["area_tolerance"] = args.tol
    if args.max_iter is not None:
        kw["max_iterations"] = args.max_iter
    if args.seed_h is not None:
        kw["h0"] = _read_seed(args.seed_h)
    return SolverOptions(**kw)


def forced_area_messages(config):
    """Messages for faces whose area the balancing condition pins down.

    When the normals are linearly independent (e.g. two non-antipodal
    faces) balancing forces ``a_j = pi sin^2(theta_j) / (4 H^2)``.
    """
    if config.m == 0 or np.linalg.matrix_rank(config.normals) < config.m:
        return []
    forced = sphere_areas(config)
    out = []
    for j, (a, fa) in enumerate(zip(config.areas, forced)):
        if abs(a - fa) > 1e-9 * max(1.0, fa):
            out.append(f"face {j}: normals are linearly independent, so balancing forces "
                       f"a_{j} = pi sin^2(theta_{j}) / (4 H^2) = {fa:.12g} (given {a:.12g})")
    return out


def check_config(config, stream=None):
    """Print the hypothesis checks for ``config``; return ``True`` when it is admissible."""
    stream = stream or sys.stdout
    ok = True
    problems = config.problems()
    res = check_balancing(config)
    tol = balancing_tolerance(config)
    norm = float(np.linalg.norm(res))
    print(f"faces: {config.m}  H = {config.H:.12g}", file=stream)
    print(f"balancing residual: [{res[0]:.6e}, {res[1]:.6e}, {res[2]:.6e}]  "
          f"|r| = {norm:.6e}  (tolerance {tol:.3e})", file=stream)
    for i in range(config.m):
        for j in range(i + 1, config.m):
            fi, fj = config.faces[i], config.faces[j]
            sep = math.degrees(float(spherical_angle(fi.p, fj.p)))
            need = math.degrees(fi.cap_radius + fj.cap_radius)
            status = "disjoint" if sep > need else "OVERLAP"
            print(f"caps {i},{j}: separation {sep:.6f} deg, cap radii sum {need:.6f} deg "
                  f"-> {status}", file=stream)
    for msg in problems:
        print(f"error: {msg}", file=stream)
        ok = False
    if norm > tol:
        ok = False
        print("error: configuration is not balanced", file=stream)
        for msg in forced_area_messages(config):
            print(f"error: {msg}", file=stream)
    print("OK" if ok else "FAILED", file=stream)
    return ok


def cmd_check(args):
    config = _load(args)
    return EXIT_OK if check_config(config) else EXIT_FAIL


def cmd_repair(args):
    config = _load(args)
    problems = config.problems()
    if problems:
        for msg in problems:
            print(f"error: {msg}", file=sys.stderr)
        return EXIT_FAIL
    fixed = repair_areas(config)
    before = float(np.linalg.norm(check_balancing(config)))
    after = float(np.linalg.norm(check_balancing(fixed)))
    print(f"balancing residual {before:.6e} -> {after:.6e}", file=sys.stderr)
    text = fixed.to_json() + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _gate(config):
    """Validate and require balancing before any pipeline work."""
    if not check_config(config, stream=sys.stderr):
        raise ConfigError("configuration rejected; nothing was solved")
    return CapillaryConfig(config.H, config.faces, allow_theta_pi=config.allow_theta_pi,
                           allow_theta_half_pi=config.allow_theta_half_pi)


def _summary(report, runtime=None, stream=None):
    stream = stream or sys.stdout
    rows = [
        ("level", report.level),
        ("vertices", report.vertices),
        ("atoms", report.atoms),
        ("balancing residual", f"{report.balancing_residual:.3e}"),
        ("raw closure defect", f"{report.raw_closure_defect:.3e}"),
        ("solver residual", f"{report.solver_residual:.3e}"),
        ("solver iterations", report.solver_iterations),
        ("area identity (max)", f"{max(report.area_identity, default=0.0):.3e}"),
        ("contact angle dev (deg)",
         f"{max([c['max_deviation_deg'] for c in report.contact_angles], default=0.0):.3e}"),
        ("convexity violation", f"{report.convexity_violation:.3e}"),
        ("patch radius error", f"{report.patch_radius_error:.3e}"),
        ("energy", f"{report.energy:.10g}"),
        ("diameter", f"{report.diameter:.10g}"),
    ]
    for s in report.symmetry:
        n = ", ".join(f"{c:.4g}" for c in s["normal"])
        rows.append((f"mirror ({n})", f"{s['hausdorff']:.3e}"))
    if runtime is not None:
        rows.append(("runtime (s)", f"{runtime:.2f}"))
    width = max(len(k) for k, _ in rows)
    for k, v in rows:
        print(f"{k:<{width}}  {v}", file=stream)


def _write_outputs(out, directory, report=True):
    from .diagnostics import dumps
    from .pipeline import export_obj, planes_dict
    from .polytope import write_off
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    export_obj(out, d / "sigma.obj", d / "disks.obj")
    (d / "planes.json").write_text(dumps(planes_dict(out)) + "\n", encoding="utf-8")
    if report:
        (d / "report.json").write_text(out.report.to_json() + "\n", encoding="utf-8")
    else:
        write_off(out.polytope, d / "body.off")


def _run(args, diagnostics=True):
    from .pipeline import run
    config = _gate(_load(args))
    return run(config, args.level, _options(args), diagnostics=diagnostics)


def cmd_solve(args):
    out = _run(args)
    _write_outputs(out, args.out)
    _summary(out.report, out.timings.get("total"))
    print(f"wrote sigma.obj, disks.obj, planes.json, report.json to {args.out}")
    return EXIT_OK


def cmd_export(args):
    out = _run(args, diagnostics=False)
    _write_outputs(out, args.out, report=False)
    print(f"wrote sigma.obj, disks.obj, planes.json, body.off to {args.out}")
    return EXIT_OK


def cmd_verify(args):
    from .diagnostics import dumps, quadrature_moment_error, verify_uniqueness
    out = _run(args)
    rep = out.report
    _summary(rep)
    dist, diam = verify_uniqueness(out.config, args.level, _options(args))
    result = {
        "report": rep.to_dict(),
        "uniqueness": {"hausdorff": dist, "diameter": diam},
        "quadrature_moment_error": quadrature_moment_error(out.config, args.level),
    }
    checks = [
        ("area identity < 1%", max(rep.area_identity, default=0.0) < AREA_IDENTITY_GATE),
        ("contact angles within 1 deg",
         all(c["max_deviation_deg"] < CONTACT_GATE_DEG for c in rep.contact_angles)),
        ("independent starts agree", dist < DISTANCE_GATE * diam),
        ("mirror symmetries", all(s["hausdorff"] < DISTANCE_GATE * rep.diameter
                                  for s in rep.symmetry)),
    ]
    result["checks"] = {name: bool(ok) for name, ok in checks}
    print(f"uniqueness distance {dist:.3e} (diameter {diam:.6g})")
    for name, ok in checks:
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
    if args.out:
        Path(args.out).write_text(dumps(result) + "\n", encoding="utf-8")
    return EXIT_OK if all(ok for _, ok in checks) else EXIT_FAIL


def cmd_demo(args):
    name = args.name or args.demo_flag
    if not name:
        raise UsageError(f"demo name required; choose from {', '.join(DEMOS)}")
    try:
        config = demo_config(name)
    except KeyError:
        raise UsageError(f"unknown demo {name!r}; choose from {', '.join(DEMOS)}")
    sys.stdout.write(config.to_json() + "\n")
    return EXIT_OK


COMMANDS = {
    "check": cmd_check,
    "repair": cmd_repair,
    "solve": cmd_solve,
    "verify": cmd_verify,
    "demo": cmd_demo,
    "export": cmd_export,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)     # exits with status 2 on bad usage
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"capillary: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StageError as exc:
        print(f"capillary: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except CapillaryError as exc:
        print(f"capillary: error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
