"""Command-line surface: simulate / covariance / estimate / verify.

Exit codes: 0 ok, 2 invalid flags or spec, 3 sampler failure,
4 kernel parameter pole, 5 malformed input CSV, 6 verification
disagreement.  Every failure prints a single machine-parsable line
``error[<kind>]: <reason>`` to stderr.

Replicates run in parallel when FRACGAUSS_THREADS is set (> 1); each
file is written by exactly one worker.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import estimators, kernels, oracle, sampler
from .kernels import TimeFunction, UnsupportedParameterError, spec_from_dict
from .specfun import DomainError, PoleError, SpecialFunctionError


EXIT_OK = 0
EXIT_FLAGS = 2
EXIT_SAMPLER = 3
EXIT_KERNEL_POLE = 4
EXIT_BAD_CSV = 5
EXIT_VERIFY = 6


def _fail(kind, msg, code):
    print(f"error[{kind}]: {msg}", file=sys.stderr)
    return code


@dataclass
class RunConfig:
    subcommand: str
    spec: object = None
    grid: sampler.TimeGrid | None = None
    seed: int = 0
    replicates: int = 1
    out_dir: str = "."
    out_file: str | None = None
    method: str | None = None
    rel_tol: float | None = None
    abs_tol: float | None = None
    extras: dict = field(default_factory=dict)


def _spec_from_args(args):
    """ProcessSpec from --spec-file JSON or from flat flags."""
    if getattr(args, "spec_file", None):
        with open(args.spec_file) as fh:
            return spec_from_dict(json.load(fh))
    p = args.process
    if p is None:
        raise DomainError("--process (or --spec-file) is required")
    need = lambda name: getattr(args, name, None)
    if p == "fbm":
        return kernels.FBM(_req(need, "hurst"))
    if p == "rlfbm":
        return kernels.RLFBM(_req(need, "hurst"))
    if p == "mbm":
        return kernels.MBM(kernels.HurstFunction.constant(_req(need, "hurst")))
    if p == "rlmbm":
        return kernels.RLMBM(kernels.HurstFunction.constant(_req(need, "hurst")))
    if p == "weylfou":
        return kernels.WeylFOU(_req(need, "alpha"), _req(need, "omega"))
    if p == "rlfou":
        return kernels.RLFOU(_req(need, "alpha"), _req(need, "omega"))
    if p == "weylmou":
        return kernels.WeylMOU(kernels.AlphaFunction.constant(_req(need, "alpha")),
                               _req(need, "omega"))
    if p == "rlmou":
        return kernels.RLMOU(kernels.AlphaFunction.constant(_req(need, "alpha")),
                             _req(need, "omega"))
    if p == "frbm":
        return kernels.FRBM(_req(need, "alpha"), _req(need, "gamma"),
                            _req(need, "omega"))
    if p == "mrbm":
        return kernels.MRBM(TimeFunction.constant(_req(need, "alpha")),
                            TimeFunction.constant(_req(need, "gamma")),
                            _req(need, "omega"))
    if p == "gc":
        return kernels.GC(_req(need, "alpha"), _req(need, "beta"))
    raise DomainError(f"unknown process {p!r}")


def _req(need, name):
    v = need(name)
    if v is None:
        raise DomainError(f"--{name} is required for this process")
    return v


def _grid_from_args(args):
    return sampler.TimeGrid(start=args.t0, step=args.dt, n=args.n)


def _threads():
    try:
        return max(1, int(os.environ.get("FRACGAUSS_THREADS", "1")))
    except ValueError:
        return 1


def cmd_simulate(args) -> int:
    try:
        if args.replicates < 1:
            raise DomainError("--replicates must be >= 1")
        spec = _spec_from_args(args)
        grid = _grid_from_args(args)
    except (DomainError, OSError, json.JSONDecodeError, KeyError) as e:
        return _fail("invalid-flags", e, EXIT_FLAGS)
    os.makedirs(args.out_dir, exist_ok=True)
    seeds = [sampler.derive_subseed(args.seed, i) for i in range(args.replicates)]
    try:
        draw = sampler._prepare(spec, grid, args.method)

        def one(i):
            path = draw(seeds[i])
            sampler.write_path_csv(path, os.path.join(args.out_dir, f"path_{i:03d}.csv"))
            return path.method

        nthreads = _threads()
        if nthreads > 1:
            with ThreadPoolExecutor(max_workers=nthreads) as ex:
                methods = list(ex.map(one, range(args.replicates)))
        else:
            methods = [one(i) for i in range(args.replicates)]
    except (sampler.SamplerError, np.linalg.LinAlgError) as e:
        return _fail("sampler", e, EXIT_SAMPLER)
    except (DomainError, UnsupportedParameterError) as e:
        return _fail("invalid-flags", e, EXIT_FLAGS)
    sampler.write_metadata(os.path.join(args.out_dir, "metadata.json"),
                           spec, grid, seeds, methods[0],
                           {"replicates": args.replicates, "base_seed": args.seed})
    return EXIT_OK


def cmd_covariance(args) -> int:
    try:
        spec = _spec_from_args(args)
        grid = _grid_from_args(args)
    except (DomainError, OSError, json.JSONDecodeError, KeyError) as e:
        return _fail("invalid-flags", e, EXIT_FLAGS)
    try:
        C = kernels.cov_matrix(spec, grid.times)
    except (UnsupportedParameterError, PoleError) as e:
        return _fail("kernel-pole", e, EXIT_KERNEL_POLE)
    except (DomainError, SpecialFunctionError) as e:
        return _fail("invalid-flags", e, EXIT_FLAGS)
    times = grid.times
    with open(args.out, "w") as fh:
        fh.write("t," + ",".join(repr(float(t)) for t in times) + "\n")
        for i, t in enumerate(times):
            fh.write(repr(float(t)) + ","
                     + ",".join(repr(float(v)) for v in C[i]) + "\n")
    return EXIT_OK


def cmd_estimate(args) -> int:
    try:
        times, vals = sampler.read_path_csv(args.input)
    except (sampler.SamplerError, OSError) as e:
        return _fail("bad-csv", e, EXIT_BAD_CSV)
    dt = float(times[1] - times[0]) if len(times) > 1 else 1.0
    grid = sampler.TimeGrid(start=float(times[0]), step=dt, n=len(times))
    path = sampler.SamplePath(grid, vals, None, 0, "Cholesky")
    try:
        if args.estimator == "aggvar":
            rep = estimators.hurst_aggregated_variance(path)
        elif args.estimator == "local-holder":
            rep = estimators.local_holder(path, window=args.window)
        elif args.estimator == "periodogram":
            rep = estimators.lrd_periodogram(
                path, low_freq_fraction=args.low_freq_fraction,
                difference=args.difference)
        else:
            return _fail("invalid-flags", f"unknown estimator {args.estimator!r}",
                         EXIT_FLAGS)
    except (estimators.DegenerateInputError, estimators.NonstationaryInputError,
            DomainError) as e:
        return _fail("bad-csv", e, EXIT_BAD_CSV)
    with open(args.out, "w") as fh:
        json.dump(rep.to_dict(), fh, indent=2)
        fh.write("\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    fam = args.process
    if fam not in oracle.LATTICE_FAMILIES:
        return _fail("invalid-flags",
                     f"no kernel/oracle pair for {fam!r} "
                     f"(choose from {', '.join(oracle.LATTICE_FAMILIES)})",
                     EXIT_FLAGS)
    cfg = oracle.QuadratureConfig(
        rel_tol=args.rel_tol, abs_tol=args.abs_tol)
    report = oracle.agreement_report(fam, n_points=args.points,
                                     seed=args.seed, cfg=cfg)
    with open(args.out, "w") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    if not report["all_pass"]:
        bad = sum(1 for p in report["points"] if not p["pass"])
        return _fail("verify", f"{bad}/{len(report['points'])} lattice points "
                               f"disagree beyond the certificate bound", EXIT_VERIFY)
    return EXIT_OK


def _add_spec_flags(p):
    p.add_argument("--process", choices=sorted(kernels._FAMILIES), default=None)
    p.add_argument("--spec-file", default=None,
                   help="JSON spec (supports time-varying exponent functions)")
    p.add_argument("--hurst", type=float, default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--omega", type=float, default=None)


def _add_grid_flags(p):
    p.add_argument("--n", type=int, default=256)
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--t0", type=float, default=0.0, help="grid start time")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="fracgauss",
        description="simulate and analyze fractional/multifractional "
                    "Gaussian processes")
    sub = ap.add_subparsers(dest="subcommand", required=True)

    sim = sub.add_parser("simulate", help="write sample-path CSVs + metadata")
    _add_spec_flags(sim)
    _add_grid_flags(sim)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--replicates", type=int, default=1)
    sim.add_argument("--method", choices=["Cholesky", "Circulant", "MovingAverage"],
                     default=None)
    sim.add_argument("--out-dir", default=".")
    sim.set_defaults(func=cmd_simulate)

    covp = sub.add_parser("covariance", help="kernel Gram matrix on the grid")
    _add_spec_flags(covp)
    _add_grid_flags(covp)
    covp.add_argument("--out", default="covariance.csv")
    covp.set_defaults(func=cmd_covariance)

    est = sub.add_parser("estimate", help="estimator report from a path CSV")
    est.add_argument("--input", required=True)
    est.add_argument("--estimator", choices=["aggvar", "local-holder", "periodogram"],
                     default="aggvar")
    est.add_argument("--window", type=int, default=64)
    est.add_argument("--low-freq-fraction", type=float, default=0.1)
    est.add_argument("--difference", action="store_true",
                     help="analyze increments (FBM-type inputs)")
    est.add_argument("--out", default="estimate.json")
    est.set_defaults(func=cmd_estimate)

    ver = sub.add_parser("verify", help="kernel-vs-oracle agreement lattice")
    ver.add_argument("--process", required=True)
    ver.add_argument("--points", type=int, default=50)
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--rel-tol", type=float, default=1e-10)
    ver.add_argument("--abs-tol", type=float, default=1e-12)
    ver.add_argument("--out", default="verify.json")
    ver.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
