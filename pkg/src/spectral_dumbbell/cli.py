"""Command-line entry point.

Exit codes: 0 success, 2 argument errors, 3 domain/validation errors,
4 solver failures. Diagnostics go to stderr; data to files or stdout.
"""
from __future__ import annotations

import argparse
import datetime
import json
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import io
from .closed_forms import segment_dirichlet_spectrum, sphere_spectrum
from .errors import DomainError, MeshError, SolverError
from .experiments import run_dumbbell_convergence, run_weyl_experiment
from .fem import assemble_mass, assemble_stiffness, clean_zeros, solve_lowest
from .mesh import area, gen_icosphere, glue_dumbbell, isoperimetric_ratio, require_valid, validate
from .planner import PiecewiseLinear, plan_counterexample, verify_certificate
from .spectra import Spectrum, merge_spectra

EXIT_OK, EXIT_ARGS, EXIT_DOMAIN, EXIT_SOLVER = 0, 2, 3, 4

log = logging.getLogger("spectral_dumbbell")


@dataclass
class RunConfig:
    out: Optional[Path]
    seed: int
    tol: float
    threads: Optional[int]
    timestamp: bool

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        tol = getattr(args, "tol", 1e-9)
        if tol < 1e-12:
            raise DomainError(f"--tol must be >= 1e-12, got {tol}")
        threads = getattr(args, "threads", None)
        if threads is not None and threads < 1:
            raise DomainError(f"--threads must be >= 1, got {threads}")
        out = getattr(args, "out", None)
        return cls(Path(out) if out else None, getattr(args, "seed", 0), tol, threads,
                   not getattr(args, "no_timestamp", False))

    def metadata(self, **extra) -> dict:
        meta = dict(extra)
        if self.timestamp:
            meta["created"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
        return meta


def _out_dir(cfg: RunConfig) -> Path:
    d = cfg.out if cfg.out is not None else io.default_out_dir()
    d.mkdir(parents=True, exist_ok=True)
    return d


def _emit_spectrum(s: Spectrum, cfg: RunConfig) -> None:
    if cfg.out is None:
        io.dump_spectrum_csv(s, sys.stdout)
    else:
        io.write_spectrum(s, cfg.out)


# --- spectrum ----------------------------------------------------------------

def cmd_spectrum(args) -> int:
    cfg = RunConfig.from_args(args)
    if args.kind == "sphere":
        _emit_spectrum(sphere_spectrum(args.n, args.count, args.radius), cfg)
    elif args.kind == "segment":
        _emit_spectrum(segment_dirichlet_spectrum(args.h, args.count), cfg)
    elif args.kind == "merge":
        parts = [io.read_spectrum(p) for p in args.inputs]
        if len(parts) < 2:
            raise DomainError("merge needs at least two spectra")
        _emit_spectrum(merge_spectra(*parts).merged, cfg)
    elif args.kind == "mesh":
        mesh = io.read_off(args.input)
        require_valid(mesh)
        K = assemble_stiffness(mesh)
        M = assemble_mass(mesh, lumped=not args.consistent)
        res = solve_lowest(K, M, args.num, tol=cfg.tol, seed=cfg.seed)
        if args.eig_out:
            io.write_eig_csv(res.values, res.residuals, args.eig_out)
        if args.matrix_dir:
            d = Path(args.matrix_dir)
            d.mkdir(parents=True, exist_ok=True)
            io.write_matrix_market(K, d / "stiffness.mtx")
            io.write_matrix_market(M, d / "mass.mtx")
        if not res.converged:
            raise SolverError(f"no convergence (max residual {res.residuals.max():.3g})")
        _emit_spectrum(Spectrum(2, clean_zeros(res.values), area(mesh), Path(args.input).stem), cfg)
    return EXIT_OK


# --- mesh --------------------------------------------------------------------

def _emit_mesh(mesh, cfg: RunConfig) -> None:
    if cfg.out is None:
        io.dump_off(mesh, sys.stdout)
    else:
        io.write_off(mesh, cfg.out)


def cmd_mesh(args) -> int:
    cfg = RunConfig.from_args(args)
    if args.kind == "icosphere":
        _emit_mesh(gen_icosphere(args.level, args.radius), cfg)
    elif args.kind == "dumbbell":
        _emit_mesh(glue_dumbbell(args.delta, args.h, args.level, args.rings, args.segs), cfg)
    elif args.kind == "measure":
        rep = isoperimetric_ratio(io.read_off(args.input))
        print(json.dumps(rep.as_dict(), sort_keys=True))
    elif args.kind == "validate":
        rep = validate(io.read_off(args.input))
        print(json.dumps(rep.as_dict(), sort_keys=True))
        if not rep.ok:
            for msg in rep.messages:
                print(msg, file=sys.stderr)
            return EXIT_DOMAIN
    return EXIT_OK


# --- experiments ---------------------------------------------------------------

def _parse_deltas(text: str) -> list[float]:
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad delta list {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("delta list is empty")
    return vals


def cmd_experiment(args) -> int:
    cfg = RunConfig.from_args(args)
    out = _out_dir(cfg)
    if args.kind == "dumbbell":
        table = run_dumbbell_convergence(args.h, args.deltas, args.level, args.num, tol=cfg.tol,
                                         seed=cfg.seed, threads=cfg.threads)
        io.write_table(out / "dumbbell.csv", table.header(), table.records(),
                       cfg.metadata(**table.metadata))
        ok = [r for r in table.rows if r.ok]
        io.write_plot_data(out / "lambda1_vs_delta.csv", [r.delta for r in ok],
                           [r.values[1] for r in ok], "delta", "lambda_1")
        io.write_plot_data(out / "ratio_vs_delta.csv", [r.delta for r in ok],
                           [r.iso.ratio for r in ok], "delta", "isoperimetric_ratio")
        for r in table.failed:
            print(f"delta={r.delta:g}: {r.error}", file=sys.stderr)
        if table.failed:
            return EXIT_SOLVER if any(r.error_kind == "solver" for r in table.failed) else EXIT_DOMAIN
    elif args.kind == "weyl":
        table = run_weyl_experiment(args.n, args.kmax)
        io.write_table(out / "weyl.csv", table.header(), table.records(),
                       cfg.metadata(experiment="weyl", n=args.n, kmax=args.kmax, k1=table.k1))
        io.write_plot_data(out / "weyl_ratio.csv", table.k, table.ratio, "k", "weyl_ratio")
        print(f"k1 = {table.k1}", file=sys.stderr)
    return EXIT_OK


# --- plan ----------------------------------------------------------------------

def cmd_plan(args) -> int:
    cfg = RunConfig.from_args(args)
    x, y = io.read_f_table(args.f)
    cert = plan_counterexample(args.n, args.A, PiecewiseLinear(tuple(x), tuple(y)), args.horizon)
    check = verify_certificate(cert)
    payload = cert.as_dict()
    payload["reverification"] = {"k1": check.k1, "k2": check.k2, "k0": check.k0,
                                 "matches": check.matches, "chain_holds": check.chain_holds,
                                 "messages": check.messages}
    payload["metadata"] = cfg.metadata(command="plan")
    if cfg.out is None:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        io.write_json(payload, cfg.out)
    print(f"k1={cert.k1} k2={cert.k2} k0={cert.k0}", file=sys.stderr)
    if not (check.matches and check.chain_holds and cert.chain_holds):
        print("certificate failed re-verification", file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK


# --- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="spectral-dumbbell",
                                description="Spectral geometry of spheres, unions and dumbbells.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, out_help="output file (default: stdout)"):
        sp.add_argument("--out", help=out_help)
        sp.add_argument("--no-timestamp", action="store_true",
                        help="omit creation time from metadata")

    sp = sub.add_parser("spectrum", help="closed-form, merged or FEM spectra as CSV")
    ssub = sp.add_subparsers(dest="kind", required=True)
    s = ssub.add_parser("sphere")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--count", type=int, required=True)
    s.add_argument("--radius", type=float, default=1.0)
    common(s)
    s = ssub.add_parser("segment")
    s.add_argument("--h", type=float, required=True)
    s.add_argument("--count", type=int, required=True)
    common(s)
    s = ssub.add_parser("merge")
    s.add_argument("inputs", nargs="+")
    common(s)
    s = ssub.add_parser("mesh")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--num", type=int, required=True)
    s.add_argument("--tol", type=float, default=1e-9)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--consistent", action="store_true", help="consistent instead of lumped mass")
    s.add_argument("--eig-out", help="write index,eigenvalue,residual CSV here")
    s.add_argument("--matrix-dir", help="export stiffness/mass in Matrix Market format")
    common(s)
    sp.set_defaults(func=cmd_spectrum)

    mp = sub.add_parser("mesh", help="generate, measure and validate OFF meshes")
    msub = mp.add_subparsers(dest="kind", required=True)
    m = msub.add_parser("icosphere")
    m.add_argument("--level", type=int, required=True)
    m.add_argument("--radius", type=float, default=1.0)
    common(m)
    m = msub.add_parser("dumbbell")
    m.add_argument("--delta", type=float, required=True)
    m.add_argument("--h", type=float, default=0.5)
    m.add_argument("--level", type=int, default=4)
    m.add_argument("--rings", type=int)
    m.add_argument("--segs", type=int)
    common(m)
    m = msub.add_parser("measure")
    m.add_argument("--in", dest="input", required=True)
    m = msub.add_parser("validate")
    m.add_argument("--in", dest="input", required=True)
    mp.set_defaults(func=cmd_mesh)

    ep = sub.add_parser("exp", help="run experiments, writing tables and plot data")
    esub = ep.add_subparsers(dest="kind", required=True)
    e = esub.add_parser("dumbbell")
    e.add_argument("--h", type=float, default=0.5)
    e.add_argument("--deltas", type=_parse_deltas, required=True)
    e.add_argument("--level", type=int, default=4)
    e.add_argument("--num", type=int, default=8)
    e.add_argument("--tol", type=float, default=1e-9)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--threads", type=int, default=os.cpu_count())
    common(e, f"output directory (default: ${io.OUT_DIR_ENV} or .)")
    e = esub.add_parser("weyl")
    e.add_argument("--n", type=int, required=True)
    e.add_argument("--kmax", type=int, required=True)
    common(e, f"output directory (default: ${io.OUT_DIR_ENV} or .)")
    ep.set_defaults(func=cmd_experiment)

    pp = sub.add_parser("plan", help="counterexample certificate as JSON")
    pp.add_argument("--n", type=int, required=True)
    pp.add_argument("--A", type=float, required=True)
    pp.add_argument("--f", required=True, help="CSV with header x,fx")
    pp.add_argument("--horizon", type=int, default=10**6)
    common(pp)
    pp.set_defaults(func=cmd_plan)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (DomainError, MeshError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
