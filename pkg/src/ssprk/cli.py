"""Command-line interface.

Every operation is reachable through one subcommand; machine formats (CSV,
JSON) are byte-stable given identical flags and ``--rng-seed``.  Exit codes:
0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import analysis, catalog, experiments, family53, lowstorage, tableau
from .exceptions import SSPError
from .lowstorage import StorageClass

# Register-count labels as they appear in the published summary table.
_TABLE_REGISTERS = {
    "2N*": "2N*",
    "3N-A": "3N",
    "3N-B": "3N",
    "general": ">=3N",
    "naive": "naive",
}


def _fmt17(x: float) -> str:
    return format(float(x), ".17g")


def _json_dumps(obj, indent: int = 0) -> str:
    """JSON with floats rendered at 17 significant digits."""
    pad = " " * indent
    if isinstance(obj, dict):
        items = ",\n".join(
            f'{pad}  {json.dumps(k)}: {_json_dumps(v, indent + 2).lstrip()}'
            for k, v in obj.items()
        )
        return f"{pad}{{\n{items}\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        flat = all(not isinstance(v, (dict, list, tuple)) for v in obj)
        if flat:
            return pad + "[" + ", ".join(_json_dumps(v).lstrip() for v in obj) + "]"
        items = ",\n".join(_json_dumps(v, indent + 2) for v in obj)
        return f"{pad}[\n{items}\n{pad}]"
    if isinstance(obj, bool):
        return pad + ("true" if obj else "false")
    if isinstance(obj, (int, np.integer)):
        return pad + str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return pad + _fmt17(obj)
    return pad + json.dumps(obj)


def _resolve_out(path: str | None):
    """Honor SSPRK_OUTPUT_DIR for bare relative output names."""
    if path is None:
        return None
    base = os.environ.get("SSPRK_OUTPUT_DIR", "")
    if base and not os.path.isabs(path):
        os.makedirs(base, exist_ok=True)
        return os.path.join(base, path)
    return path


def _emit(text: str, out: str | None) -> None:
    path = _resolve_out(out)
    if path is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _load_method(spec: str) -> catalog.MethodRecord:
    if spec.endswith(".json") or os.path.exists(spec):
        with open(spec) as fh:
            return catalog.method_from_json(json.load(fh))
    return catalog.lookup(spec)


def _record_json(rec: catalog.MethodRecord) -> dict:
    doc: dict = {
        "name": rec.id,
        "s": rec.s,
        "A": [[float(x) for x in row] for row in rec.tableau.A],
        "b": [float(x) for x in rec.tableau.b],
    }
    if rec.shu_osher is not None:
        doc["shu_osher"] = {
            "Lambda": [[float(x) for x in row] for row in rec.shu_osher.lam],
            "Gamma": [[float(x) for x in row] for row in rec.shu_osher.gam],
        }
    doc["order"] = rec.p
    return doc


def _storage_label(rec: catalog.MethodRecord) -> str:
    if rec.shu_osher is None:
        return "naive"
    return lowstorage.classify(rec.shu_osher).value


# ----------------------------------------------------------------------------
# subcommand handlers
# ----------------------------------------------------------------------------

def _cmd_catalog(args) -> int:
    if args.action == "export":
        if not args.id:
            raise SSPError("catalog export needs a method id")
        _emit(_json_dumps(catalog.export_json(args.id)), args.out)
        return 0
    rows = [
        (r.id, r.s, r.p,
         "" if r.ref_ssp is None else f"{r.ref_ssp:.6g}",
         _storage_label(r))
        for r in catalog.list_methods()
    ]
    if args.format == "csv":
        lines = ["id,s,p,ref_ssp,storage"]
        lines += [",".join(str(v) for v in row) for row in rows]
        _emit("\n".join(lines), args.out)
    else:
        header = f"{'id':16s} {'s':>2s} {'p':>2s} {'ref_ssp':>10s}  storage"
        lines = [header, "-" * len(header)]
        lines += [f"{r[0]:16s} {r[1]:2d} {r[2]:2d} {r[3]:>10s}  {r[4]}" for r in rows]
        _emit("\n".join(lines), args.out)
    return 0


def _cmd_ssp_coefficient(args) -> int:
    rec = _load_method(args.method)
    m = tableau.extended_matrix(rec.tableau)
    radius = analysis.radius_absolute_monotonicity(m, bis_tol=args.tol)
    doc: dict = {"method": rec.id, "radius": radius}
    if radius > 0:
        # certify just inside the interval; at the boundary itself round-off
        # leaves entries a hair below zero
        r_cert = max(radius - 1e-9, 0.5 * radius)
        rep = analysis.canonical_optimal_representation(m, r_cert)
        lam, gam = rep.lam, rep.gam
        doc["certificate"] = {
            "certified_at": r_cert,
            "min_lambda": float(lam.min()),
            "min_gamma": float(gam.min()),
            "min_alpha": float(rep.alpha.min()),
            "min_lambda_minus_r_gamma": float((lam - r_cert * gam).min()),
            "representation_coefficient":
                analysis.representation_ssp_coefficient(rep),
        }
    _emit(_json_dumps(doc), args.out)
    return 0


def _cmd_canonicalize(args) -> int:
    rec = _load_method(args.method)
    m = tableau.extended_matrix(rec.tableau)
    radius = analysis.radius_absolute_monotonicity(m)
    r_cert = max(radius - 1e-9, 0.5 * radius)
    form = analysis.sparsify_gamma(analysis.canonical_optimal_representation(m, r_cert))
    doc = {
        "name": rec.id,
        "radius": radius,
        "certified_at": r_cert,
        "Lambda": [[float(x) for x in row] for row in form.lam],
        "Gamma": [[float(x) for x in row] for row in form.gam],
    }
    _emit(_json_dumps(doc), args.out)
    return 0


def _cmd_classify(args) -> int:
    rec = _load_method(args.method)
    if rec.shu_osher is None:
        _emit(f"{rec.id}: naive (no stored sparse representation)", args.out)
        return 0
    cls = lowstorage.classify(rec.shu_osher)
    lines = [f"{rec.id}: {cls.value}"]
    if cls is StorageClass.GENERAL and rec.s == 5:
        lam = rec.shu_osher.lam
        named = {"lambda_52": lam[4, 1], "lambda_62": lam[5, 1],
                 "lambda_63": lam[5, 2]}
        nz = [k for k, v in named.items() if abs(v) > lowstorage.CLASSIFY_TOL]
        lines.append("nonzero blockers: " + (", ".join(nz) if nz else "none"))
    _emit("\n".join(lines), args.out)
    return 0


def _cmd_stability(args) -> int:
    rec = _load_method(args.method)
    sp = tableau.stability_polynomial(rec.tableau)
    if args.real_interval:
        x = tableau.real_stability_interval(sp, tol=args.tol)
        _emit(f"{x:.6f}", args.out)
        return 0
    grid = tableau.stability_region_grid(
        sp, (args.re_min, args.re_max), (args.im_min, args.im_max),
        args.nx, args.ny,
    )
    re, im = tableau.stability_axes(
        (args.re_min, args.re_max), (args.im_min, args.im_max), args.nx, args.ny
    )
    lines = ["re,im,inside"]
    for iy in range(args.ny):
        for ix in range(args.nx):
            lines.append(f"{_fmt17(re[ix])},{_fmt17(im[iy])},{int(grid[iy, ix])}")
    _emit("\n".join(lines), args.out)
    return 0


def _cmd_bl_sweep(args) -> int:
    cfg = experiments.BLConfig(
        n=args.n, t_end=args.t_end,
        dt_min=args.dt_min, dt_max=args.dt_max, dt_step=args.dt_step,
    )
    rec = _load_method(args.method)
    # the Euler reference always uses the default (fine) sweep grid so that a
    # coarse or shifted method grid still normalizes against the same value
    fe_cfg = experiments.BLConfig(n=args.n, t_end=args.t_end)
    dt_fe = experiments.forward_euler_threshold(fe_cfg)
    if dt_fe <= 0:
        raise SSPError("explicit Euler never diminishes on the reference grid")
    result = experiments.observed_ssp_sweep(rec, cfg, dt_fe)
    lines = ["dt,mu"] + [f"{_fmt17(d)},{_fmt17(m)}" for d, m in result.pairs]
    _emit("\n".join(lines), args.out)
    print(
        f"{rec.id}: dt_obs={result.dt_obs:.6g} dt_fe_obs={result.dt_fe_obs:.6g} "
        f"observed_coeff={result.observed_coeff:.4g} "
        f"largest_passing_dt={result.dt_largest_pass:.6g}"
    )
    if result.nonmonotone:
        print("nonmonotone onset at:", ", ".join(f"{d:.6g}" for d in result.nonmonotone))
    return 0


def _cmd_convergence(args) -> int:
    rec = _load_method(args.method)
    h_list = [1 / 20, 1 / 40, 1 / 80, 1 / 160, 1 / 320]
    slope = experiments.convergence_order(rec, experiments.DECAY, h_list)
    lines = [f"{'h':>12s} {'error':>14s}"]
    for h in h_list:
        n = round(experiments.DECAY.t_end / h)
        y = experiments.DECAY.exact(0.0)
        for _ in range(n):
            y = lowstorage.step_naive(rec.tableau, y, h, experiments.DECAY.rhs)
        err = float(np.abs(y - experiments.DECAY.exact(n * h)).max())
        lines.append(f"{h:12.6g} {err:14.6e}")
    lines.append(f"estimated order: {slope:.4f}")
    _emit("\n".join(lines), args.out)
    return 0


def _cmd_optimize(args) -> int:
    params, radius = family53.optimize_2nstar(
        variant=args.variant, seeds=args.seeds, r_tol=args.rtol,
        rng_seed=args.rng_seed,
    )
    tab = family53.build_2nstar_tableau(params)
    form = family53.twonstar_shu_osher(params)
    res3 = tableau.order_residuals(tab, 3)
    doc = {
        "name": f"optimized_2nstar_{args.variant}",
        "s": 5,
        "A": [[float(x) for x in row] for row in tab.A],
        "b": [float(x) for x in tab.b],
        "shu_osher": {
            "Lambda": [[float(x) for x in row] for row in form.lam],
            "Gamma": [[float(x) for x in row] for row in form.gam],
        },
        "order": 3,
        "certificate": {
            "certified_radius": radius,
            "order3_residual_max": float(np.abs(res3).max()),
            "storage_class": lowstorage.classify(form).value,
            "multipliers": {"u": params.u, "v": params.v,
                            "w": params.w, "x": params.x},
        },
    }
    _emit(_json_dumps(doc), args.out)
    return 0


def _table1_row(method_id: str, cfg: experiments.BLConfig, dt_fe: float) -> dict:
    rec = catalog.lookup(method_id)
    m = tableau.extended_matrix(rec.tableau)
    radius = analysis.radius_absolute_monotonicity(m)
    sweep = experiments.observed_ssp_sweep(rec, cfg, dt_fe)
    return {
        "method": rec.name,
        "id": rec.id,
        "stages": rec.s,
        "order": rec.p,
        "ssp_coefficient": f"{radius:.4f}",
        "observed_ssp_coefficient": f"{sweep.observed_coeff:.2f}",
        "error_constant": f"{tableau.error_constant(rec.tableau):.5e}",
        "registers": _TABLE_REGISTERS[_storage_label(rec)],
    }


def _table1_worker(payload):
    method_id, cfg_kwargs, dt_fe = payload
    return _table1_row(method_id, experiments.BLConfig(**cfg_kwargs), dt_fe)


def _cmd_table1(args) -> int:
    cfg = experiments.BLConfig()
    dt_fe = experiments.forward_euler_threshold(cfg)
    if args.parallel:
        cfg_kwargs = {}
        payloads = [(mid, cfg_kwargs, dt_fe) for mid in catalog.TABLE1_IDS]
        with ProcessPoolExecutor() as pool:
            rows = list(pool.map(_table1_worker, payloads))
    else:
        rows = [_table1_row(mid, cfg, dt_fe) for mid in catalog.TABLE1_IDS]
    cols = ("method", "stages", "order", "ssp_coefficient",
            "observed_ssp_coefficient", "error_constant", "registers")
    if args.format == "csv":
        lines = [",".join(cols)]
        lines += [",".join(str(r[c]) for c in cols) for r in rows]
        _emit("\n".join(lines), args.out)
    else:
        widths = [max(len(c), *(len(str(r[c])) for r in rows)) for c in cols]
        header = "  ".join(c.ljust(w) for c, w in zip(cols, widths))
        lines = [header, "-" * len(header)]
        lines += ["  ".join(str(r[c]).ljust(w) for c, w in zip(cols, widths))
                  for r in rows]
        lines.append(f"dt_fe_obs={dt_fe:.6g}")
        _emit("\n".join(lines), args.out)
    return 0


# ----------------------------------------------------------------------------
# parser
# ----------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ssprk",
        description="Analysis, low-storage execution, and experiments for "
                    "strong-stability-preserving explicit Runge-Kutta methods",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("catalog", help="list built-in methods or export one")
    p.add_argument("action", choices=["list", "export"])
    p.add_argument("id", nargs="?")
    p.add_argument("--format", choices=["human", "csv"], default="human")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_catalog)

    p = sub.add_parser("ssp-coefficient",
                       help="radius of absolute monotonicity with certificate")
    p.add_argument("method")
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_ssp_coefficient)

    p = sub.add_parser("canonicalize",
                       help="emit the sparsified canonical representation")
    p.add_argument("method")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_canonicalize)

    p = sub.add_parser("classify", help="storage class of the stored form")
    p.add_argument("method")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("stability",
                       help="stability region grid CSV or real interval")
    p.add_argument("method")
    p.add_argument("--real-interval", action="store_true")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--re-min", type=float, default=-8.0)
    p.add_argument("--re-max", type=float, default=1.0)
    p.add_argument("--im-min", type=float, default=-5.0)
    p.add_argument("--im-max", type=float, default=5.0)
    p.add_argument("--nx", type=int, default=181)
    p.add_argument("--ny", type=int, default=201)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_stability)

    p = sub.add_parser("bl-sweep",
                       help="total-variation step-size sweep on the step profile")
    p.add_argument("--method", required=True)
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--t-end", type=float, default=0.125)
    p.add_argument("--dt-min", type=float, default=2e-3)
    p.add_argument("--dt-max", type=float, default=1e-2)
    p.add_argument("--dt-step", type=float, default=5e-5)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_bl_sweep)

    p = sub.add_parser("convergence", help="observed order on a smooth problem")
    p.add_argument("--method", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_convergence)

    p = sub.add_parser("optimize",
                       help="search the two-register family for the best radius")
    p.add_argument("--variant", choices=["full", "constrained"], default="full")
    p.add_argument("--seeds", type=int, default=50)
    p.add_argument("--rtol", type=float, default=1e-6)
    p.add_argument("--rng-seed", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_optimize)

    p = sub.add_parser("table1",
                       help="full summary table (radii, observed sweeps, "
                            "error constants, registers)")
    p.add_argument("--format", choices=["human", "csv"], default="human")
    p.add_argument("--parallel", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_table1)

    return parser


def dispatch(argv: list[str]) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse uses exit code 2 for usage errors
        return int(exc.code or 0)
    try:
        return args.func(args)
    except SSPError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
