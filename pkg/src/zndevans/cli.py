"""Command-line front end.

Subcommands: ``profile``, ``evans``, ``contour``, ``roots``, ``bench``.
Every run writes a manifest (JSON, alongside the output as
``<out>.manifest.json``) recording the command line, configuration hash,
tolerances, software version, timestamp, and solver statistics; the data
files themselves contain no timestamps so repeated runs are byte-identical.

Exit codes: 0 success, 2 usage/configuration error, 3 numerical-domain
error, 4 acceptance-trend failure in ``bench``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError, ContourThroughRootError, NumericalDomainError
from .evans import METHODS, duality_check, evaluate
from .modelbench import reproduce_table, C_COLUMNS, LAMBDA_ROWS
from .numerics import SolveStats
from .spectral import coefficient_G
from .stability import ParameterSweep, count_unstable, sweep_roots
from .znd import (
    GasWaveConfig,
    build_wave,
    config_from_json,
    profile_table,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3
EXIT_TREND = 4

_TOL_ENV = "ZNDEVANS_TOL"

_METHOD_FLAGS = {"neutral": "neutral", "erpenbeck": "erpenbeck", "lee-stewart": "lee_stewart"}


def _fmt(x: float) -> str:
    """17 significant digits: round-trip exact for doubles."""
    return f"{x:.17g}"


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _load_config(path: str) -> GasWaveConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return config_from_json(text)


def _default_tol(args) -> tuple[float, bool]:
    """Tolerance resolution: flag > environment > 1e-5."""
    if args.tol is not None:
        return args.tol, False
    env = os.environ.get(_TOL_ENV)
    if env is not None:
        try:
            return float(env), True
        except ValueError as exc:
            raise ConfigError(f"{_TOL_ENV}={env!r} is not a number") from exc
    return 1e-5, False


def _write_manifest(out_path: str, args, tol: float, tol_from_env: bool,
                    stats: list[dict], extra: dict | None = None) -> str:
    manifest = {
        "command": sys.argv,
        "version": __version__,
        "timestamp": _utc_now(),
        "tol": tol,
        "tol_from_env": tol_from_env,
        "M": getattr(args, "M", None),
        "outputs": [out_path],
        "solve_stats": stats,
    }
    if getattr(args, "config", None):
        manifest["config_path"] = args.config
        manifest["config_sha256_16"] = _load_config(args.config).digest()
    if extra:
        manifest.update(extra)
    mpath = out_path + ".manifest.json"
    Path(mpath).write_text(json.dumps(manifest, indent=2) + "\n")
    return mpath


def _stats_dict(stats: SolveStats) -> dict:
    return {
        "accepted_steps": stats.accepted_steps,
        "rejected_steps": stats.rejected_steps,
        "rhs_evaluations": stats.rhs_evaluations,
        "span": list(stats.span),
    }


def _cmd_profile(args) -> int:
    tol, tol_env = _default_tol(args)
    wave = build_wave(_load_config(args.config))
    cols = profile_table(wave, n=args.points)
    lines = ["y,x,rho,u,e,Y,p,T"]
    for i in range(len(cols["y"])):
        lines.append(",".join(_fmt(cols[k][i]) for k in ("y", "x", "rho", "u", "e", "Y", "p", "T")))
    Path(args.out).write_text("\n".join(lines) + "\n")
    _write_manifest(args.out, args, tol, tol_env, [])
    print(f"wrote {len(cols['y'])} profile rows to {args.out}")
    return EXIT_OK


def _dump_G_csv(wave, lam: complex, M: float, path: str, n: int = 81) -> None:
    ys = np.linspace(-M, 0.0, n)
    dim = 3 + wave.burned.r
    header = ["y"] + [f"G{i}{j}_{part}" for i in range(dim) for j in range(dim) for part in ("re", "im")]
    lines = [",".join(header)]
    for y in ys:
        G = coefficient_G(wave, lam, float(y))
        row = [_fmt(float(y))]
        for i in range(dim):
            for j in range(dim):
                row += [_fmt(G[i, j].real), _fmt(G[i, j].imag)]
        lines.append(",".join(row))
    Path(path).write_text("\n".join(lines) + "\n")


def _cmd_evans(args) -> int:
    tol, tol_env = _default_tol(args)
    wave = build_wave(_load_config(args.config))
    lam = complex(args.lam_re, args.lam_im)
    method = _METHOD_FLAGS[args.method]
    result = evaluate(wave, lam, method=method, M=args.M, tol=tol)
    record = result.to_json_dict()
    record["manifest"] = args.out + ".manifest.json"
    if args.duality_grid:
        record["duality_deviation"] = duality_check(wave, lam, M=args.M, n_grid=args.duality_grid, tol=tol)
    Path(args.out).write_text(json.dumps(record, indent=2, sort_keys=True) + "\n")
    if args.dump_g:
        _dump_G_csv(wave, lam, result.M, args.dump_g)
    _write_manifest(args.out, args, tol, tol_env, [_stats_dict(result.stats)])
    print(f"D({lam}) = {result.D} [{method}], {result.stats.mesh_points} mesh points")
    return EXIT_OK


def _cmd_contour(args) -> int:
    tol, tol_env = _default_tol(args)
    wave = build_wave(_load_config(args.config))
    method = _METHOD_FLAGS[args.method]
    if args.jobs > 1:
        pool = ThreadPoolExecutor(max_workers=args.jobs)
        map_fn = lambda f, xs: list(pool.map(f, xs))
    else:
        pool = None
        map_fn = map
    try:
        report = count_unstable(wave, args.radius, method=method, tol=tol, M=args.M, map_fn=map_fn)
    finally:
        if pool is not None:
            pool.shutdown()

    nodes = report.contour.nodes
    lines = ["re_lambda,im_lambda,re_D,im_D"]
    for z, v in zip(nodes, report.samples):
        lines.append(",".join([_fmt(z.real), _fmt(z.imag), _fmt(v.real), _fmt(v.imag)]))
    Path(args.out).write_text("\n".join(lines) + "\n")
    report_path = args.out + ".winding.json"
    payload = report.to_json_dict()
    payload["manifest"] = args.out + ".manifest.json"
    Path(report_path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    _write_manifest(args.out, args, tol, tol_env, [], extra={"winding": report.winding})
    print(f"winding number {report.winding} from {report.n_samples} samples "
          f"(min |D| = {report.min_abs_D:.3e}); wrote {args.out}")
    return EXIT_OK


def _cmd_roots(args) -> int:
    tol, tol_env = _default_tol(args)
    cfg = _load_config(args.config)
    values = tuple(float(v) for v in args.values.split(","))
    sweep = ParameterSweep(
        base=cfg,
        name=args.param,
        values=values,
        method=_METHOD_FLAGS[args.method],
        M=args.M,
        evans_tol=tol,
    )
    trace = sweep_roots(sweep, complex(args.seed_re, args.seed_im), tol=args.root_tol)
    payload = trace.to_json_dict()
    payload["manifest"] = args.out + ".manifest.json"
    Path(args.out).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    _write_manifest(args.out, args, tol, tol_env, [])
    n_ok = int(np.sum(trace.converged))
    print(f"followed root over {len(trace.values)} parameter points ({n_ok} converged)")
    return EXIT_OK if bool(np.all(trace.converged)) else EXIT_NUMERICAL


def _cmd_bench(args) -> int:
    tol, tol_env = _default_tol(args)
    if args.table not in (1, 2):
        raise ConfigError(f"table must be 1 or 2, got {args.table}")
    table = reproduce_table(args.table, tol=tol, M=args.M if args.M else 5.0)
    lines = ["lambda_re,lambda_im,c,direction,variant,mesh_points,paper_count,ratio_to_paper"]
    for direction in ("forward", "backward"):
        counts = table.counts(direction)
        ref = table.reference(direction)
        for i, lam in enumerate(LAMBDA_ROWS):
            lam = complex(lam)
            for j, c in enumerate(C_COLUMNS):
                lines.append(",".join([
                    _fmt(lam.real), _fmt(lam.imag), _fmt(c), direction, table.variant,
                    str(counts[i, j]), str(ref[i, j]),
                    _fmt(counts[i, j] / ref[i, j]),
                ]))
    Path(args.out).write_text("\n".join(lines) + "\n")
    failures = table.trend_failures()
    _write_manifest(args.out, args, tol, tol_env, [], extra={"trend_failures": failures})
    print(f"table {args.table}: wrote {len(lines)-1} rows to {args.out}")
    if failures:
        for f in failures:
            print("TREND FAILURE:", f, file=sys.stderr)
        return EXIT_TREND
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zndevans",
        description="Spectral stability of steady detonation waves "
                    "(adjoint Evans-Lopatinski shooting).",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config=True):
        if config:
            p.add_argument("--config", required=True, help="wave configuration JSON")
        p.add_argument("--tol", type=float, default=None,
                       help=f"integration tolerance (default 1e-5; env {_TOL_ENV} overrides)")
        p.add_argument("--M", type=float, default=None, help="domain truncation length")
        p.add_argument("--out", required=True, help="output file path")

    p = sub.add_parser("profile", help="dump the steady profile as CSV")
    common(p)
    p.add_argument("--points", type=int, default=200, help="number of grid rows")
    p.set_defaults(fn=_cmd_profile)

    p = sub.add_parser("evans", help="evaluate the stability determinant at one frequency")
    common(p)
    p.add_argument("--lambda-re", dest="lam_re", type=float, required=True)
    p.add_argument("--lambda-im", dest="lam_im", type=float, default=0.0)
    p.add_argument("--method", choices=sorted(_METHOD_FLAGS), default="neutral")
    p.add_argument("--duality-grid", type=int, default=0,
                   help="if > 0, attach the duality constancy deviation on this many grid points")
    p.add_argument("--dump-g", default=None, metavar="PATH",
                   help="debug: dump the coefficient matrix on a y grid as CSV")
    p.set_defaults(fn=_cmd_evans)

    p = sub.add_parser("contour", help="winding-number mode count over a semicircle")
    common(p)
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--method", choices=sorted(_METHOD_FLAGS), default="neutral")
    p.add_argument("--jobs", type=int, default=1, help="parallel determinant evaluations")
    p.set_defaults(fn=_cmd_contour)

    p = sub.add_parser("roots", help="follow a root through a parameter sweep")
    common(p)
    p.add_argument("--param", required=True, help="config field to sweep (e.g. EA, q, K)")
    p.add_argument("--values", required=True, help="comma-separated parameter values")
    p.add_argument("--seed-re", type=float, required=True)
    p.add_argument("--seed-im", type=float, default=0.0)
    p.add_argument("--root-tol", type=float, default=1e-8)
    p.add_argument("--method", choices=sorted(_METHOD_FLAGS), default="neutral")
    p.set_defaults(fn=_cmd_roots)

    p = sub.add_parser("bench", help="reproduce a model-problem efficiency table")
    common(p, config=False)
    p.add_argument("--table", type=int, required=True, help="1 (factored) or 2 (unfactored)")
    p.set_defaults(fn=_cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ContourThroughRootError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except NumericalDomainError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
