"""Command-line entry point: ``ridgexmse <subcommand> ...``."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import kernels
from .bench import McConfig, export_results, load_results, run_mc_study
from .data import generate_collection
from .errors import RidgeXmseError
from .prior import WeightingParams
from .xmse import xmse_eb_theoretical, xmse_empirical


def _load_config(args) -> McConfig:
    if args.config:
        d = json.loads(Path(args.config).read_text())
    else:
        if args.n is None or args.N is None:
            raise RidgeXmseError("give --config or both --n and --N")
        d = {"n": args.n, "N": args.N}
    for key, attr in (("seed", "seed"), ("threads", "threads"), ("delay_convention", "delay_convention"),
                      ("n_collections", "collections"), ("n_mc", "reps")):
        val = getattr(args, attr, None)
        if val is not None:
            d[key] = val
    return McConfig.from_dict(d)


def cmd_run_mc(args) -> int:
    config = _load_config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    reports = run_mc_study(config)
    written = export_results(reports, out / f"results.{args.format}", args.format)
    (out / "config.json").write_text(json.dumps(config.to_dict(), indent=2) + "\n")
    print(f"{'estimator':22s} {'sample MSE':>12s} {'avg FIT':>9s} {'time (s)':>10s}")
    for r in reports:
        fit = "n/a" if r.fit_mean is None else f"{r.fit_mean:9.2f}"
        print(f"{r.label:22s} {r.sample_mse_mean:12.4e} {fit:>9s} {r.total_time_s:10.3e}")
    for p in written:
        print(f"wrote {p}", file=sys.stderr)
    return 0


def cmd_xmse_theory(args) -> int:
    ns = args.n or list(range(1, 11))
    rows = []
    for n in ns:
        b = xmse_eb_theoretical(n, args.sigma2, args.theta0_norm2, args.sigma_u2)
        rows.append({"n": n, "sigma2": args.sigma2, "theta0_norm2": args.theta0_norm2, "sigma_u2": args.sigma_u2,
                     "xbias_sq": b.xbias_sq, "tr_xvar": b.tr_xvar, "tr_xvar_hpe": b.tr_xvar_hpe,
                     "total": b.total})
    print(json.dumps(rows, indent=2))
    return 0


def cmd_xmse_empirical(args) -> int:
    params = WeightingParams(args.c1, args.c2, args.n, args.delta)
    res = xmse_empirical(args.estimator, args.n, args.N, sigma2=args.sigma2, reps=args.reps, seed=args.seed,
                         params=params, m_s=args.m_s, snr=args.snr, delay_convention=args.delay_convention,
                         input_mode=args.input_mode)
    print(json.dumps({"estimator": args.estimator, "n": args.n, "N": args.N, "reps": res.reps,
                      "estimate": res.estimate, "std_error": res.std_error, "theory": res.theory,
                      "sigma_u2": res.sigma_u2}, indent=2))
    return 0


def cmd_check_identities(args) -> int:
    from .checks import run_all

    results = run_all(args.seed)
    for r in results:
        print(r.line())
    return 0 if all(r.passed for r in results) else 1


def cmd_export(args) -> int:
    out = Path(args.out)
    if args.results:
        written = export_results(load_results(args.results), out, args.format)
        for p in written:
            print(f"wrote {p}", file=sys.stderr)
        return 0
    from .data import export_dataset_csv

    config = _load_config(args)
    col = generate_collection(config.seed, args.collection, config.n, config.N, config.snr, config.sigma2,
                              config.delay_convention)
    export_dataset_csv(out, col.input, col.output(config.seed, args.rep, config.sigma2))
    print(f"wrote {out}", file=sys.stderr)
    return 0


def _config_args(p):
    p.add_argument("--config", help="JSON study configuration")
    p.add_argument("--n", type=int, help="model order (when no --config)")
    p.add_argument("--N", type=int, help="sample size (when no --config)")
    p.add_argument("--seed", type=int)
    p.add_argument("--delay-convention", choices=["a", "b"], dest="delay_convention")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ridgexmse", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s (kernels: {kernels.BACKEND})")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run-mc", help="Monte Carlo comparison of ML / EB_REG / BAYES_EB / BIASED_EB")
    _config_args(p)
    p.add_argument("--collections", type=int)
    p.add_argument("--reps", type=int)
    p.add_argument("--out", default="results")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--threads", type=int)
    p.set_defaults(func=cmd_run_mc)

    p = sub.add_parser("xmse-theory", help="closed-form XMSE of the EB-tuned ridge estimator")
    p.add_argument("--n", type=int, nargs="*")
    p.add_argument("--sigma2", type=float, default=1.0)
    p.add_argument("--theta0-norm2", type=float, default=1.0)
    p.add_argument("--sigma-u2", type=float, default=1.0)
    p.set_defaults(func=cmd_xmse_theory)

    p = sub.add_parser("xmse-empirical", help="paired-difference Monte Carlo XMSE")
    p.add_argument("--estimator", choices=["ML", "EB_REG", "BAYES_EB", "BIASED_EB"], required=True)
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--N", type=int, default=400)
    p.add_argument("--reps", type=int, default=10_000)
    p.add_argument("--sigma2", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--c1", type=float, default=0.0)
    p.add_argument("--c2", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=1e-8)
    p.add_argument("--m-s", type=int, dest="m_s")
    p.add_argument("--snr", type=float, help="SNR-scale the input instead of unit-variance white noise")
    p.add_argument("--delay-convention", choices=["a", "b"], default="a", dest="delay_convention")
    p.add_argument("--input-mode", choices=["per_rep", "fixed"], default="per_rep", dest="input_mode",
                   help="redraw the input every rep (default) or keep one input for the run")
    p.set_defaults(func=cmd_xmse_empirical)

    p = sub.add_parser("check-identities", help="finite-difference, Euler-equation and dense-oracle checks")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_check_identities)

    p = sub.add_parser("export", help="write one generated dataset, or convert a results file")
    _config_args(p)
    p.add_argument("--results", help="results JSON to convert instead of generating data")
    p.add_argument("--collection", type=int, default=0)
    p.add_argument("--rep", type=int, default=0)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (RidgeXmseError, OSError, ValueError, KeyError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
