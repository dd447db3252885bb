"""Command line experiment runner.

One config file = one reproducible run: the manifest records the config
hash, the seed, and library versions, and re-running a manifest's config
with the same seed reproduces the CSV outputs bit for bit.

Exit codes: 0 all enabled diagnostic thresholds pass, 2 config error,
3 solver failure, 4 a diagnostic threshold failed.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys

try:
    import tomllib
except ModuleNotFoundError:                     # Python 3.10
    import tomli as tomllib

from .errors import CondenserError, ConfigError

# schema: section -> key -> accepted types; unknown keys are rejected
_SCHEMA = {
    "domain": {"kind": str, "alpha": (int, float), "radius": (int, float),
               "center": list},
    "plates": {"nodes_a1": int, "nodes_a2": int, "outer_radius": (int, float),
               "margin": (int, float), "levels": int},
    "constraint": {"shape": str, "q": (int, float), "weights_file": str},
    "field": {"case": str, "values_file": str, "zeta_points": list,
              "zeta_weights": list},
    "solver": {"beta": (int, float), "tol_rel": (int, float)},
    "output": {"directory": str, "formats": list},
}

_CONSTRAINT_SHAPES = ("scaled-equilibrium", "disc-series", "weights-file")
_FORMATS = ("csv", "json", "png")


def load_config(path) -> dict:
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config parse error in {path}: {exc}")
    for section, body in raw.items():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown config section [{section}]")
        if not isinstance(body, dict):
            raise ConfigError(f"[{section}] must be a table")
        for key, value in body.items():
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key {section}.{key}")
            if not isinstance(value, _SCHEMA[section][key]) \
                    or isinstance(value, bool):
                raise ConfigError(f"{section}.{key}: bad type "
                                  f"{type(value).__name__}")
    dom = raw.get("domain", {})
    if dom.get("kind") not in ("ball", "halfspace"):
        raise ConfigError("domain.kind must be 'ball' or 'halfspace'")
    alpha = dom.get("alpha", 2.0)
    if not 0.0 < alpha <= 2.0:
        raise ConfigError(f"domain.alpha must lie in (0, 2], got {alpha}")
    shape = raw.get("constraint", {}).get("shape")
    if shape is not None and shape not in _CONSTRAINT_SHAPES:
        raise ConfigError(f"constraint.shape must be one of "
                          f"{_CONSTRAINT_SHAPES}, got {shape!r}")
    q = raw.get("constraint", {}).get("q")
    if q is not None and q <= 1.0:
        raise ConfigError(f"constraint.q must exceed 1, got {q}")
    case = raw.get("field", {}).get("case", "zero")
    if case not in ("zero", "I", "II"):
        raise ConfigError(f"field.case must be zero, I or II, got {case!r}")
    for key in ("nodes_a1", "nodes_a2", "levels"):
        v = raw.get("plates", {}).get(key)
        if v is not None and v <= 0:
            raise ConfigError(f"plates.{key} must be positive")
    beta = raw.get("solver", {}).get("beta")
    if beta is not None and beta <= 0:
        raise ConfigError("solver.beta must be positive")
    for fmt in raw.get("output", {}).get("formats", []):
        if fmt not in _FORMATS:
            raise ConfigError(f"output.formats entry {fmt!r} not in {_FORMATS}")
    return raw


def build_problem(cfg: dict, seed: int):
    """Assemble a Problem from a validated config tree."""
    import numpy as np

    from . import presets
    from .kernels import GreenAlpha, cross_matrix
    from .measures import (ConstraintMeasure, DiscreteMeasure, ExternalField)

    dom = cfg["domain"]
    plates = cfg.get("plates", {})
    constraint = cfg.get("constraint", {})
    solver = cfg.get("solver", {})
    shape = constraint.get("shape")
    kw = dict(seed=seed)
    if "beta" in solver:
        kw["beta"] = float(solver["beta"])
    if "outer_radius" in plates:
        kw["outer_radius"] = float(plates["outer_radius"])
    if dom["kind"] == "ball":
        if shape not in (None, "scaled-equilibrium", "weights-file"):
            raise ConfigError(f"constraint.shape {shape!r} is not available "
                              "on the ball geometry")
        if "margin" in plates:
            kw["margin"] = float(plates["margin"])
        p = presets.ball_problem(alpha=float(dom.get("alpha", 1.5)),
                                 q=float(constraint.get("q", 1.5)),
                                 radius=float(dom.get("radius", 1.0)),
                                 nodes_a1=plates.get("nodes_a1", 500),
                                 nodes_a2=plates.get("nodes_a2", 2000), **kw)
    else:
        if shape not in (None, "disc-series", "weights-file"):
            raise ConfigError(f"constraint.shape {shape!r} is not available "
                              "on the half-space geometry")
        if float(dom.get("alpha", 2.0)) != 2.0:
            raise ConfigError("the half-space preset requires alpha = 2")
        p = presets.halfspace_problem(levels=plates.get("levels", 3),
                                      nodes_a1=plates.get("nodes_a1", 600),
                                      nodes_a2=plates.get("nodes_a2", 1600),
                                      **kw)

    if shape == "weights-file":
        path = constraint.get("weights_file")
        if not path:
            raise ConfigError("constraint.weights_file is required for the "
                              "weights-file shape")
        try:
            w = np.loadtxt(path, ndmin=1)
        except OSError:
            raise ConfigError(f"constraint.weights_file not found: {path}")
        if w.shape != (len(p.cloud),):
            raise ConfigError(f"constraint.weights_file: expected "
                              f"{len(p.cloud)} weights, got {w.shape}")
        try:
            p.constraint = ConstraintMeasure(DiscreteMeasure(w, p.cloud))
        except ValueError as exc:
            raise ConfigError(f"constraint.weights_file: {exc}")

    field = cfg.get("field", {})
    case = field.get("case", "zero")
    if case == "I":
        path = field.get("values_file")
        if not path:
            raise ConfigError("field.values_file is required for case I")
        try:
            vals = np.loadtxt(path, ndmin=1)
        except OSError:
            raise ConfigError(f"field.values_file not found: {path}")
        if vals.shape != (len(p.cloud),):
            raise ConfigError(f"field.values_file: expected {len(p.cloud)} "
                              f"values, got {vals.shape}")
        try:
            p.f = ExternalField.case_i(p.cloud, vals)
        except ValueError as exc:
            raise ConfigError(f"field.values_file: {exc}")
    elif case == "II":
        zpts = np.asarray(field.get("zeta_points", []), float)
        if zpts.ndim != 2 or zpts.shape[0] == 0 or zpts.shape[1] != p.cloud.n:
            raise ConfigError("field.zeta_points must be a nonempty list of "
                              f"{p.cloud.n}-coordinate points")
        if p.domain.alpha != 2.0:
            raise ConfigError("field.case II point charges need the alpha = 2 "
                              "closed forms; use a case I values file instead")
        if not np.all(p.domain.contains(zpts)):
            raise ConfigError("field.zeta_points must lie inside D")
        zw = np.asarray(field.get("zeta_weights", [1.0] * len(zpts)), float)
        if zw.shape != (len(zpts),) or np.any(zw < 0):
            raise ConfigError("field.zeta_weights must list one nonnegative "
                              "weight per zeta point")
        vals = np.zeros(len(p.cloud))
        a1 = p.cloud.a1_indices
        vals[a1] = cross_matrix(GreenAlpha(p.domain),
                                p.cloud.points[a1], zpts) @ zw
        p.f = ExternalField("II", vals, p.cloud)
    return p


# ---------------------------------------------------------------------------
# artifacts
# ---------------------------------------------------------------------------

def _manifest(cfg_path, cfg, seed) -> dict:
    import numpy
    import scipy
    with open(cfg_path, "rb") as fh:
        digest = hashlib.sha256(fh.read()).hexdigest()
    return {
        "config_path": str(cfg_path),
        "config_sha256": digest,
        "config": cfg,
        "seed": seed,
        "versions": {
            "python": sys.version.split()[0],
            "numpy": numpy.__version__,
            "scipy": scipy.__version__,
            "condenser": _version(),
        },
    }


def _version() -> str:
    from importlib.metadata import PackageNotFoundError, version
    try:
        return version("condenser")
    except PackageNotFoundError:
        return "unknown"


def write_solution_csv(path, sol, p) -> None:
    import numpy as np

    from .measures import weighted_potential
    cloud = p.cloud
    U = p.k_riesz.values @ sol.lam.signed_weights()
    W = weighted_potential(sol.lam, p.k_riesz, p.f)
    slack = np.maximum(p.constraint.xi.weights - sol.lam.plus.weights, 0.0)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index"] + [f"x{i+1}" for i in range(cloud.n)]
                        + ["weight_plus", "weight_minus", "potential",
                           "weighted_potential", "constraint_slack"])
        for i in range(len(cloud)):
            writer.writerow([i] + [repr(float(v)) for v in cloud.points[i]]
                            + [repr(float(sol.lam.plus.weights[i])),
                               repr(float(sol.lam.minus.weights[i])),
                               repr(float(U[i])), repr(float(W[i])),
                               repr(float(slack[i]))])


def _write_json(path, payload) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")


def run_diagnostics(sol, p) -> dict:
    """All reports that apply to the given field case, with pass flags."""
    from . import verify
    fr = verify.frostman_diagnostics(sol, p)
    sol.frostman_c = fr.c
    out = {"frostman": dict(fr.as_dict(), passed=fr.passed()),
           "support": verify.support_diagnostics(sol, p).as_dict()}
    if p.f.case == "zero":
        z = verify.zone_diagnostics(sol, p)
        out["zone"] = dict(
            z.as_dict(),
            passed=bool(z.potential_match_rel <= 0.02
                        and z.probe_max_over_c <= 1.02
                        and z.a2_probe_max_over_c <= 0.02
                        and (p.domain.alpha == 2.0
                             or z.support_agreement >= 0.95)))
        d = verify.duality_check(sol, p)
        out["duality"] = dict(
            d.as_dict(),
            passed=bool(d.maxviol_wsc1 <= 0.02 * abs(d.eta)
                        and d.maxviol_wsc2 <= 0.02 * abs(d.eta)
                        and d.objective_gap_rel <= 0.02))
    out["all_passed"] = all(block.get("passed", True)
                            for block in out.values()
                            if isinstance(block, dict))
    return out


def _out_dir(args, cfg) -> str:
    out = args.out or cfg.get("output", {}).get("directory", "out")
    os.makedirs(out, exist_ok=True)
    return out


def _say(args, message) -> None:
    if not args.quiet:
        print(message)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_solve(args) -> int:
    from . import plots
    from .solver import solve_riesz_via_bridge
    cfg = load_config(args.config)
    out = _out_dir(args, cfg)
    formats = cfg.get("output", {}).get("formats", list(_FORMATS))
    p = build_problem(cfg, args.seed)
    sol = solve_riesz_via_bridge(p)
    diag = run_diagnostics(sol, p)
    if "csv" in formats:
        write_solution_csv(os.path.join(out, "solution.csv"), sol, p)
    if "json" in formats:
        _write_json(os.path.join(out, "diagnostics.json"), diag)
        _write_json(os.path.join(out, "manifest.json"),
                    _manifest(args.config, cfg, args.seed))
    if "png" in formats:
        plots.plot_solution(sol, p, os.path.join(out, "solution.png"))
        plots.plot_potentials(sol, p, os.path.join(out, "potentials.png"))
    _say(args, f"objective (Riesz) = {sol.objective_riesz:.8g}")
    _say(args, f"objective (Green) = {sol.objective_green:.8g}")
    for name in ("frostman", "zone", "duality"):
        if name in diag:
            _say(args, f"{name}: {'pass' if diag[name]['passed'] else 'FAIL'}")
    _say(args, f"artifacts written to {out}")
    return 0 if diag["all_passed"] else 4


def cmd_verify(args) -> int:
    return cmd_solve(args)


def cmd_capacity(args) -> int:
    from . import plots
    from .verify import disc_capacity
    if args.shape != "disc":
        raise ConfigError(f"capacity supports shape 'disc', got {args.shape!r}")
    report = disc_capacity(radius=args.radius, nodes=args.nodes,
                           seed=args.seed, beta=args.beta)
    _say(args, f"capacity({args.radius}) = {report['capacity']:.6g} "
               f"(minimal energy {report['minimal_energy']:.6g}, "
               f"{args.nodes} nodes)")
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        radii = [0.5 * args.radius, args.radius, 2.0 * args.radius]
        caps = [disc_capacity(r, args.nodes, args.seed, args.beta)["capacity"]
                for r in radii]
        _write_json(os.path.join(args.out, "capacity.json"),
                    dict(report, scaling={"radii": radii, "capacities": caps}))
        plots.plot_capacity_scaling(radii, caps,
                                    os.path.join(args.out, "capacity.png"))
        _say(args, f"artifacts written to {args.out}")
    return 0


def cmd_balayage(args) -> int:
    import numpy as np

    from .balayage import balayage, dirac_balayage, equilibrium_measure
    from .measures import write_measure_csv
    cfg = load_config(args.config)
    out = _out_dir(args, cfg)
    p = build_problem(cfg, args.seed)
    if args.point:
        y = np.asarray([float(v) for v in args.point.split(",")])
        if y.shape != (p.cloud.n,):
            raise ConfigError(f"--point needs {p.cloud.n} coordinates")
        swept = dirac_balayage(y, p.k_riesz, domain=p.domain)
        source_mass = 1.0
    else:
        eq, _ = equilibrium_measure(p.a1, p.k_riesz)
        swept = balayage(eq, p.k_riesz)
        source_mass = eq.mass()
    write_measure_csv(os.path.join(out, "swept.csv"), swept)
    report = {"source_mass": source_mass, "swept_mass": swept.mass(),
              "mass_error": abs(swept.mass() - source_mass) / source_mass}
    _write_json(os.path.join(out, "balayage.json"), report)
    _write_json(os.path.join(out, "manifest.json"),
                _manifest(args.config, cfg, args.seed))
    _say(args, f"swept mass {report['swept_mass']:.6f} "
               f"(source {source_mass:.6f}); artifacts in {out}")
    return 0


def cmd_experiment(args) -> int:
    from . import plots, verify
    out = args.out or "out"
    os.makedirs(out, exist_ok=True)
    name = args.name
    if name == "short-circuit":
        report = verify.short_circuit_experiment(levels=args.levels or 6)
        ok = report["strictly_decreasing"] and \
            max(report["identity_rel_err"]) <= 0.03
    elif name == "unbounded-constraint":
        report = verify.unbounded_constraint_experiment(
            levels=args.levels or 4)
        ok = report["strictly_decreasing"] and report["norm_bound_ok"]
    elif name == "counterexample":
        report = verify.counterexample_experiment(terms=args.terms)
        ok = report["green_bounded"] and report["riesz_growth_ok"]
    else:                                       # duality
        from .presets import ball_problem
        from .solver import solve_riesz_via_bridge
        if args.config:
            cfg = load_config(args.config)
            p = build_problem(cfg, args.seed)
        else:
            p = ball_problem(seed=args.seed)
        sol = solve_riesz_via_bridge(p)
        d = verify.duality_check(sol, p)
        report = d.as_dict()
        ok = (d.maxviol_wsc1 <= 0.02 * abs(d.eta)
              and d.maxviol_wsc2 <= 0.02 * abs(d.eta)
              and d.objective_gap_rel <= 0.02)
    report["passed"] = bool(ok)
    _write_json(os.path.join(out, f"{name}.json"), report)
    plots.plot_experiment(name, report, os.path.join(out, f"{name}.png"))
    _say(args, f"{name}: {'pass' if ok else 'FAIL'}; artifacts in {out}")
    return 0 if ok else 4


def cmd_calibrate_beta(args) -> int:
    import numpy as np

    from . import qp
    from .verify import _disc_template
    pts, rho = _disc_template(args.nodes, args.seed)
    # off-node probes on the disc; node potentials are exactly flat at any
    # interior simplex optimum, so only probe flatness can rank beta
    rng = np.random.default_rng(args.seed)
    u = np.sqrt(rng.uniform(0.0, 0.9025, 400))
    ang = rng.uniform(0.0, 2.0 * np.pi, 400)
    probes = np.column_stack([np.zeros(400), u * np.cos(ang),
                              u * np.sin(ang)])
    dp = np.linalg.norm(probes[:, None, :] - pts[None, :, :], axis=2)
    clear = np.all(dp > rho[None, :], axis=1)    # keep probes between cells
    dp = dp[clear]
    grid = np.linspace(args.beta_min, args.beta_max, args.grid)
    rows = []
    for beta in grid:
        d = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)
        np.fill_diagonal(d, beta * rho)
        K = 1.0 / d
        res = qp.minimize_simplex(K, np.zeros(len(K)))
        c = res.objective
        flat = float(np.max(np.abs((1.0 / dp) @ res.x - c)) / c)
        rows.append({"beta": float(beta), "minimal_energy": res.objective,
                     "capacity": 1.0 / res.objective,
                     "potential_flatness": flat})
    best = min(rows, key=lambda r: r["potential_flatness"])
    report = {"nodes": args.nodes, "grid": rows, "best": best}
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        _write_json(os.path.join(args.out, "calibrate_beta.json"), report)
    _say(args, f"best beta = {best['beta']:.4g} "
               f"(flatness {best['potential_flatness']:.3e}, "
               f"capacity {best['capacity']:.6g})")
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _add_common(sp) -> None:
    sp.add_argument("--out", default=None, help="output directory")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--threads", type=int, default=None)
    sp.add_argument("--quiet", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="condenser",
        description="constrained minimum-energy problems on condensers")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve", help="solve a configured condenser problem")
    sp.add_argument("--config", required=True)
    _add_common(sp)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("verify", help="solve and report all diagnostics")
    sp.add_argument("--config", required=True)
    _add_common(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("capacity", help="capacity of a flat disc")
    sp.add_argument("--shape", default="disc")
    sp.add_argument("--radius", type=float, default=1.0)
    sp.add_argument("--nodes", type=int, default=2000)
    sp.add_argument("--beta", type=float, default=None)
    _add_common(sp)
    sp.set_defaults(func=cmd_capacity)

    sp = sub.add_parser("balayage", help="sweep a measure onto A2")
    sp.add_argument("--config", required=True)
    sp.add_argument("--point", default=None,
                    help="comma separated coordinates of a unit point charge")
    _add_common(sp)
    sp.set_defaults(func=cmd_balayage)

    sp = sub.add_parser("experiment", help="run a canned structural experiment")
    sp.add_argument("name", choices=["short-circuit", "unbounded-constraint",
                                     "duality", "counterexample"])
    sp.add_argument("--config", default=None,
                    help="problem config (duality experiment only)")
    sp.add_argument("--levels", type=int, default=None,
                    help="exhaustion depth (default 6 short-circuit, "
                         "4 unbounded-constraint)")
    sp.add_argument("--terms", type=int, default=8)
    _add_common(sp)
    sp.set_defaults(func=cmd_experiment)

    sp = sub.add_parser("calibrate-beta",
                        help="scan the diagonal regularization scale")
    sp.add_argument("--nodes", type=int, default=1000)
    sp.add_argument("--beta-min", type=float, default=0.2)
    sp.add_argument("--beta-max", type=float, default=1.2)
    sp.add_argument("--grid", type=int, default=11)
    _add_common(sp)
    sp.set_defaults(func=cmd_calibrate_beta)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                    "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS"):
            os.environ[var] = str(args.threads)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except CondenserError as exc:
        print(f"solver error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
