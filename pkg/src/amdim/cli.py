"""Command-line front end.

Subcommands: region, dimension, esn-sweep, kac, wald, measure, walk-exact.
Global flags: --seed (default 0, overridden by AMDIM_SEED when set),
--threads, --out, --format (repeatable subset of csv/json/svg).

Every run writes a manifest with all resolved parameters and the seed, enough
to re-run the experiment exactly.  Floats are serialized with 17 significant
digits (round-trip exact); in JSON they become decimal strings so reports can
be compared byte for byte.  The thread count never appears in outputs because
results are independent of it by construction.  Exit codes: 0 success,
1 tolerance failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys as _sys

from . import __version__, core, measure, region, svgplot, walks
from .measure import InconclusiveError
from .region import PreconditionError

ALL_FORMATS = ("csv", "json", "svg")


def _f17(x) -> str:
    return format(float(x), ".17g")


def _jsonable(obj):
    """Floats to 17-digit decimal strings, recursively."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return _f17(obj)
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return str(obj)


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


class Run:
    """Resolved output context: directory, formats, manifest bookkeeping."""

    def __init__(self, args, command: str, params: dict):
        self.outdir = args.out
        os.makedirs(self.outdir, exist_ok=True)
        self.formats = tuple(args.format) if args.format else ALL_FORMATS
        self.command = command
        self.params = dict(params)
        self.outputs: list[str] = []
        self.warnings: list[str] = []

    def path(self, name: str) -> str:
        return os.path.join(self.outdir, name)

    def want(self, fmt: str) -> bool:
        return fmt in self.formats

    def emit(self, name: str, text: str) -> None:
        fmt = name.rsplit(".", 1)[-1]
        if not self.want(fmt):
            return
        _write(self.path(name), text)
        self.outputs.append(name)

    def finish(self) -> None:
        manifest = {
            "command": self.command,
            "parameters": _jsonable(self.params),
            "outputs": sorted(self.outputs),
            "version": __version__,
            "warnings": self.warnings,
        }
        _write(self.path("manifest.json"), json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _estimate_json(e: measure.EstimateWithError) -> dict:
    return {"value": e.value, "std_error": e.std_error, "n": e.n}


def _csv(header: list[str], rows: list[list]) -> str:
    def cell(v):
        if v is None:
            return ""
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, float):
            return _f17(v)
        return str(v)

    lines = [",".join(header)]
    lines.extend(",".join(cell(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def _parse_grid(text: str) -> tuple[int, int]:
    try:
        a, b = text.lower().split("x")
        nx, ny = int(a), int(b)
    except Exception:
        raise argparse.ArgumentTypeError(f"grid must look like 400x400, got {text!r}")
    if nx < 2 or ny < 2:
        raise argparse.ArgumentTypeError("grid dimensions must be >= 2")
    return nx, ny


def _count(text: str) -> int:
    # accept 1e7-style counts
    v = float(text)
    if v < 0 or v != int(v):
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text!r}")
    return int(v)


def cmd_region(args, run: Run) -> int:
    grid = region.rasterize_region(
        (args.p_min, args.p_max), (args.gamma_min, args.gamma_max), args.grid
    )
    header = ["p", "gamma", "exponents_positive", "contraction_ok", "lr_ok",
              "a_max_dim", "a_max_lr"]
    rows = []
    for row in grid:
        for v in row:
            rows.append([v.p, v.gamma, v.exponents_positive, v.contraction_ok,
                         v.lr_ok, v.a_max_dim, v.a_max_lr])
    run.emit("region.csv", _csv(header, rows))
    nx, ny = args.grid
    p_vals = [grid[i][0].p for i in range(nx)]
    g_vals = [grid[0][j].gamma for j in range(ny)]
    admissible = [[c.dim_lt_one for c in row] for row in grid]
    invalid = [[not c.valid for c in row] for row in grid]
    run.emit("region.svg", svgplot.region_svg(p_vals, g_vals, admissible, invalid))
    return 0


def cmd_dimension(args, run: Run) -> int:
    sys_, probs = core.new_system(args.a, args.gamma, args.p)
    report: dict = {
        "a": args.a, "gamma": args.gamma, "p": args.p, "seed": args.seed,
        "orbit_length": args.orbit_len, "burn_in": args.burn_in,
    }
    try:
        report["closed_form_bound"] = region.dimension_bound_closed_form(
            args.p, args.gamma, args.a
        )
    except PreconditionError as exc:
        report["closed_form_bound"] = None
        report["closed_form_failed"] = exc.failed
    est = measure.estimate_measure(
        sys_, probs, seed=args.seed, burn_in=args.burn_in, length=args.orbit_len,
        nbins=args.bins,
    )
    chi_p = measure.lyapunov_exponent(est, "pointwise")
    chi_i = measure.lyapunov_exponent(est, "interval-form")
    report["chi_pointwise"] = _estimate_json(chi_p)
    report["chi_interval_form"] = _estimate_json(chi_i)
    try:
        report["empirical_dim_bound"] = _estimate_json(
            measure.dimension_bound_entropy_lyap(probs, chi_p)
        )
    except InconclusiveError as exc:
        report["empirical_dim_bound"] = None
        report["empirical_dim_bound_inconclusive"] = str(exc)
    mu_m = measure.mass_fraction(est, "M")
    report["mu_M"] = _estimate_json(mu_m)
    try:
        report["mu_M_lower_bound"] = measure.mu_M_lower_bound(args.p, args.gamma)
    except ValueError:
        report["mu_M_lower_bound"] = None
    v = region.region_verdict(args.p, args.gamma, args.a)
    report["verdict"] = {
        "valid": v.valid,
        "exponents_positive": v.exponents_positive,
        "contraction_ok": v.contraction_ok,
        "lr_ok": v.lr_ok,
        "dim_lt_one": v.dim_lt_one,
        "a_max_dim": v.a_max_dim,
        "a_max_lr": v.a_max_lr,
    }
    run.emit("dimension.json", json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n")
    return 0


def cmd_esn_sweep(args, run: Run) -> int:
    if args.full:
        args.points, args.trials, args.cap = 4000, 40_000, 3000
    grid = walks.uniform_gamma_grid(args.gamma_min, args.gamma_max, args.points)
    results = walks.esn_sweep(
        args.p, grid, seed=args.seed, trials=args.trials, cap=args.cap,
        threads=args.threads,
    )
    header = ["gamma", "mean_s", "se_s", "mean_n", "se_n", "censored_fraction"]
    rows = []
    for g, s in results:
        rows.append([g, s.mean_s.value, s.mean_s.std_error,
                     s.mean_n.value, s.mean_n.std_error, s.censored_fraction])
        if s.censored_fraction > 1e-3:
            run.warnings.append(
                f"gamma={_f17(g)}: censored fraction {_f17(s.censored_fraction)} exceeds 1e-3"
            )
    run.emit("esn.csv", _csv(header, rows))
    xs = [g for g, _ in results]
    ys = [s.mean_s.value for _, s in results]
    es = [s.mean_s.std_error for _, s in results]
    run.emit("esn.svg", svgplot.curve_svg(xs, ys, es, hline=-2.0,
                                          xlabel="gamma", ylabel="mean terminal sum"))
    return 0


def cmd_kac(args, run: Run) -> int:
    sys_, probs = core.new_system(args.a, args.gamma, args.p)
    est = measure.estimate_measure(
        sys_, probs, seed=args.seed, burn_in=args.burn_in, length=args.len
    )
    frac_m = est.measure.mass_M / est.measure.total
    mean_return = measure.kac_mean_return(est)
    residual = abs(mean_return * frac_m - 1.0)
    passed = residual < args.tol
    report = {
        "a": args.a, "gamma": args.gamma, "p": args.p, "seed": args.seed,
        "orbit_length": args.len, "burn_in": args.burn_in,
        "mu_M": frac_m, "mean_return_time": mean_return,
        "residual": residual, "tolerance": args.tol, "passed": passed,
    }
    run.emit("kac.json", json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n")
    return 0 if passed else 1


def cmd_wald(args, run: Run) -> int:
    summary = walks.walk_summary(args.p, args.gamma, seed=args.seed,
                                 trials=args.trials, cap=args.cap)
    residual, se = walks.wald_check(summary, args.p, args.gamma)
    passed = residual <= 3.0 * se and summary.censored_fraction < 1e-3
    report = {
        "gamma": args.gamma, "p": args.p, "seed": args.seed,
        "trials": args.trials, "cap": args.cap,
        "mean_n": _estimate_json(summary.mean_n),
        "mean_s": _estimate_json(summary.mean_s),
        "censored_fraction": summary.censored_fraction,
        "residual": residual, "residual_3se": 3.0 * se, "passed": passed,
    }
    run.emit("wald.json", json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n")
    return 0 if passed else 1


def cmd_measure(args, run: Run) -> int:
    sys_, probs = core.new_system(args.a, args.gamma, args.p)
    est = measure.estimate_measure(
        sys_, probs, seed=args.seed, burn_in=args.burn_in, length=args.len,
        nbins=args.bins,
    )
    m = est.measure
    residual = measure.stationarity_residual(m, sys_, probs)
    passed = residual < args.tol
    report = {
        "a": args.a, "gamma": args.gamma, "p": args.p, "seed": args.seed,
        "orbit_length": args.len, "burn_in": args.burn_in, "bins": args.bins,
        "masses": {
            "left": m.mass_left, "M": m.mass_M, "L": m.mass_L, "C": m.mass_C,
            "R": m.mass_R, "right": m.mass_right, "total": m.total,
        },
        "mu_M": _estimate_json(measure.mass_fraction(est, "M")),
        "mu_left": _estimate_json(measure.mass_fraction(est, "left")),
        "mu_right": _estimate_json(measure.mass_fraction(est, "right")),
        "stationarity_residual": residual, "tolerance": args.tol, "passed": passed,
    }
    run.emit("measure.json", json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n")
    return 0 if passed else 1


def cmd_walk_exact(args, run: Run) -> int:
    stats = walks.exact_walk_stats(args.p, args.gamma, depth=args.depth)
    drift = args.p - args.gamma * (1.0 - args.p)
    report = {
        "gamma": args.gamma, "p": args.p, "depth": args.depth,
        "e_n": stats.e_n, "e_s": stats.e_s,
        "truncation_bound": stats.truncation_bound,
        "unstopped_mass": stats.unstopped_mass,
        "wald_consistency_residual": abs(stats.e_s - drift * (stats.e_n - 1.0)),
        "mu_M_walk_bound": walks.mu_M_walk_bound(stats.e_s, args.gamma)
        if stats.e_s < 0.0 else None,
    }
    run.emit("walk_exact.json", json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="amdim",
        description="Random piecewise-affine interval systems: experiments and bounds.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="base RNG seed (AMDIM_SEED overrides)")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                        help="worker threads for sweeps (results do not depend on it)")
    common.add_argument("--out", default="amdim-out", help="output directory")
    common.add_argument("--format", action="append", choices=ALL_FORMATS,
                        help="restrict output formats (repeatable)")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("region", parents=[common], help="rasterize the (p, gamma) singularity region")
    p.add_argument("--p-min", type=float, default=0.5)
    p.add_argument("--p-max", type=float, default=0.51)
    p.add_argument("--gamma-min", type=float, default=1.0)
    p.add_argument("--gamma-max", type=float, default=1.6)
    p.add_argument("--grid", type=_parse_grid, default=(100, 100), help="NXxNY cells, e.g. 400x400")
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("dimension", parents=[common], help="dimension bounds at one parameter point")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--p", type=float, default=0.5, help="max(p-, p+); the orbit uses p_minus = p")
    p.add_argument("--orbit-len", type=_count, default=10_000_000)
    p.add_argument("--burn-in", type=_count, default=10_000)
    p.add_argument("--bins", type=_count, default=4096)
    p.set_defaults(func=cmd_dimension)

    p = sub.add_parser("esn-sweep", parents=[common], help="terminal-sum expectation over a gamma grid")
    p.add_argument("--points", type=_count, default=50)
    p.add_argument("--trials", type=_count, default=2000)
    p.add_argument("--cap", type=_count, default=3000)
    p.add_argument("--gamma-min", type=float, default=1.0)
    p.add_argument("--gamma-max", type=float, default=3.0)
    p.add_argument("--p", type=float, default=0.5, help="p_minus for the walk")
    p.add_argument("--full", action="store_true",
                   help="run the full 4000-point, 40000-trial protocol")
    p.set_defaults(func=cmd_esn_sweep)

    p = sub.add_parser("kac", parents=[common], help="first-return-time identity check")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--len", type=_count, default=10_000_000)
    p.add_argument("--burn-in", type=_count, default=10_000)
    p.add_argument("--tol", type=float, default=0.02)
    p.set_defaults(func=cmd_kac)

    p = sub.add_parser("wald", parents=[common], help="stopped-sum identity check")
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--trials", type=_count, default=100_000)
    p.add_argument("--cap", type=_count, default=3000)
    p.set_defaults(func=cmd_wald)

    p = sub.add_parser("measure", parents=[common], help="stationary-measure estimate and residual")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--len", type=_count, default=10_000_000)
    p.add_argument("--burn-in", type=_count, default=10_000)
    p.add_argument("--bins", type=_count, default=1000)
    p.add_argument("--tol", type=float, default=0.005)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("walk-exact", parents=[common], help="exact stopping-time expectations (DP)")
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--depth", type=_count, default=400)
    p.set_defaults(func=cmd_walk_exact)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    env_seed = os.environ.get("AMDIM_SEED")
    if env_seed is not None:
        try:
            args.seed = int(env_seed)
        except ValueError:
            print(f"error: AMDIM_SEED must be an integer, got {env_seed!r}", file=_sys.stderr)
            return 2
    params = {
        k: v for k, v in sorted(vars(args).items())
        if k not in ("func", "threads", "format", "out")
    }
    run = Run(args, args.command, params)
    try:
        code = args.func(args, run)
    except (ValueError, PreconditionError) as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return 2
    run.finish()
    return code


if __name__ == "__main__":
    raise SystemExit(main())
