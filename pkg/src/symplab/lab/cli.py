"""Command line entry point: ``symplab run | moser | info``."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from ..ambient import AmbientModel
from ..embedding import classify, is_symplectic_embedding, load_embedding, save_embedding
from ..errors import SymplabError
from ..moser import moser_reparametrize
from ..surface import AreaForm, load_field
from .report import Report, emit_report
from .scenario import load_scenario
from .suites import run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _UsageError(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="symplab", description="Numerical checks for symplectic "
                                "embeddings of the torus into flat symplectic tori.")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run the suites listed in a scenario")
    r.add_argument("--scenario", required=True, help="scenario JSON file")
    r.add_argument("--out", required=True, help="report JSON file to write")
    r.add_argument("--seed", type=int, help="override the scenario seed")
    r.add_argument("--suite", action="append", help="run only this suite (repeatable)")
    r.add_argument("--tolerance", type=float, help="override every scalar tolerance")

    m = sub.add_parser("moser", help="normalise an embedding's pullback area form")
    m.add_argument("--embedding", required=True, help="embedding header (.json)")
    m.add_argument("--sigma",
                   help="'uniform' (constant density of equal area), a positive number, "
                        "or an area-form field file; defaults to the scenario's rho when "
                        "--scenario is given, else 'uniform'")
    m.add_argument("--out", required=True, help="result JSON file")
    m.add_argument("--out-embedding", help="write the reparametrised embedding here")
    m.add_argument("--steps", type=int, default=50)
    m.add_argument("--tol", type=float, default=1e-4)
    m.add_argument("--interp", choices=("spline", "fourier"), default="spline")
    m.add_argument("--scenario", help="take the ambient model from this scenario")

    i = sub.add_parser("info", help="summarise an embedding file")
    i.add_argument("--embedding", required=True)
    i.add_argument("--sigma", default="uniform")
    i.add_argument("--scenario", help="take the ambient model from this scenario")
    return p


def _model(args):
    if args.scenario:
        return load_scenario(args.scenario).model()
    return None


def _sigma(spec: str, f) -> AreaForm:
    if spec == "uniform":
        return AreaForm.constant(f.grid, float(np.mean(f.pullback.g)))
    try:
        return AreaForm.constant(f.grid, float(spec))
    except ValueError:
        pass
    sigma = load_field(spec)
    if not isinstance(sigma, AreaForm) or sigma.density.shape != f.grid.shape:
        raise _UsageError(f"{spec} is not an area form on the embedding grid")
    return sigma


def _cmd_run(args) -> int:
    sc = load_scenario(args.scenario)
    if args.seed is not None:
        sc = sc.with_seed(args.seed)
    if args.tolerance is not None:
        sc = sc.with_tolerance(args.tolerance)
    names = args.suite or list(sc.suites)
    report = Report(sc.digest(), sc.seed, (sc.Nx, sc.Ny))
    for name in names:
        if name not in sc.suites and not args.suite:
            continue
        rep = run_suite(sc, name)
        report.suites.append(rep)
        asserted = any(r.asserted for r in rep.records)
        status = ("PASS" if rep.passed else "FAIL") if asserted else "REPORT"
        print(f"{name:<18} {status:<6} {len(rep.records)} records", flush=True)
    emit_report(report, args.out)
    print(f"report written to {args.out}")
    return EXIT_OK if report.passed else EXIT_FAIL


def _scenario_sigma(path, f) -> AreaForm:
    sc = load_scenario(path)
    if isinstance(sc.rho, (int, float)):
        return AreaForm.constant(f.grid, float(sc.rho))
    sigma = sc.area_form(f)
    if sigma.density.shape != f.grid.shape:
        raise _UsageError("scenario area form and embedding use different grids")
    return sigma


def _cmd_moser(args) -> int:
    f = load_embedding(args.embedding, _model(args))
    if args.sigma is None and args.scenario:
        sigma = _scenario_sigma(args.scenario, f)
    else:
        sigma = _sigma(args.sigma or "uniform", f)
    res = moser_reparametrize(f, sigma, args.steps, args.tol, args.interp)
    out = {"embedding": str(args.embedding), **res.to_dict()}
    if args.out_embedding:
        out["output_embedding"] = str(save_embedding(args.out_embedding, res.embedding))
    Path(args.out).write_text(json.dumps(out, indent=2) + "\n")
    print(f"moser residual {res.residual:.3e} (tol {args.tol:g})")
    return EXIT_OK if res.converged else EXIT_FAIL


def _cmd_info(args) -> int:
    f = load_embedding(args.embedding, _model(args))
    s = f.pullback.g
    print(f"grid {f.grid.nx}x{f.grid.ny}, n={f.model.half_dim}, winding {f.winding.tolist()}")
    print(f"immersion: min Gram determinant {f.gram_det.min():.3e}")
    print(f"pullback density: min {s.min():.6g} max {s.max():.6g} area {s.mean():.12g}")
    if f.is_symplectic_surface():
        chk = is_symplectic_embedding(f, _sigma(args.sigma, f))
        kind = "symplectic embedding" if chk.ok else "symplectic surface, not area-normalised"
        print(f"{kind}, residual {chk.residual:.3g}")
    else:
        print("not a symplectic surface (pullback density changes sign or vanishes)")
    zero = np.zeros_like(f.lift)
    print(f"zero section classifies as {classify(f, zero).verdict}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    cmd = {"run": _cmd_run, "moser": _cmd_moser, "info": _cmd_info}[args.command]
    try:
        return cmd(args)
    except (_UsageError, FileNotFoundError, ValueError) as exc:
        print(f"symplab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SymplabError as exc:
        print(f"symplab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
