"""``dilute-fermi`` command line entry point.

Exit codes: 0 success, 1 configuration or input error, 2 numerical
failure, 3 a verification check failed.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .asymptotics import (
    AsymptoticInput,
    error_envelope,
    free_density,
    hy_correction,
    hy_density,
    interaction_density,
    lss_density,
)
from .config import COMMANDS, ConfigError, load_config
from .fitting import DegenerateFit, loglog_fit
from .hf import free_kinetic_density, hf_density, hf_energy
from .lattice import CapacityError, IncompleteShell, fermi_ball, nearest_admissible_below
from .potential import CutoffTooSmall, FourierPotential, QuadratureError, RadialPotential
from .scattering import IntegratorError, NoBracketError, scattering_length, solve_scattering

__all__ = ["main", "EXIT_OK", "EXIT_CONFIG", "EXIT_NUMERICAL", "EXIT_VERIFY"]

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_VERIFY = 0, 1, 2, 3
THREADS_ENV = "DILUTE_FERMI_THREADS"

log = logging.getLogger("dilute_fermi")


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return "%.17g" % x


class _Writer:
    def __init__(self, out: Path, command: str, cfg_hash: str, seed: int):
        self.out = out
        self.header = [f"# dilute-fermi {__version__}", f"# command {command}", f"# config {cfg_hash}", f"# seed {seed}"]

    def csv(self, name: str, columns, rows) -> Path:
        path = self.out / name
        with path.open("w", newline="") as fh:
            fh.write("\n".join(self.header) + "\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(columns)
            for row in rows:
                w.writerow([_fmt(row[c]) for c in columns])
        return path

    def json(self, name: str, payload: dict) -> Path:
        path = self.out / name
        meta = {"version": __version__, "header": [h[2:] for h in self.header]}
        path.write_text(json.dumps({"meta": meta, **payload}, indent=2, sort_keys=True) + "\n")
        return path


def _potential(cfg):
    p = cfg.values["potential"]
    pot = RadialPotential(p["kind"], p["V0"], p["R0"])
    return pot, FourierPotential(pot, p["quadrature_tol"])


def _resolve_count(N: int, auto_snap: bool, label: str, level: int = logging.WARNING) -> int:
    snapped = nearest_admissible_below(N)
    if snapped != N:
        if not auto_snap:
            try:
                fermi_ball(1.0, N)
            except IncompleteShell as exc:
                raise ConfigError(f"{label}: {exc}; set auto_snap = true to round down") from None
        log.log(level, "%s=%d snapped to %d", label, N, snapped)
    return snapped


def cmd_hf(cfg, out: _Writer, seed: int, threads: int) -> int:
    box = cfg.values["box"]
    _, vhat = _potential(cfg)
    rows = []
    for L in box["L"]:
        if box["N_up"] is not None:
            nu = _resolve_count(box["N_up"], box["auto_snap"], "N_up")
            nd = _resolve_count(box["N_down"], box["auto_snap"], "N_down")
        else:
            targets = (int(math.floor(box["rho_up"] * L**3)), int(math.floor(box["rho_down"] * L**3)))
            if min(targets) < 1:
                raise ConfigError(f"L={L:g} is too small to hold the requested densities")
            nu = _resolve_count(targets[0], True, "N_up", logging.INFO)
            nd = _resolve_count(targets[1], True, "N_down", logging.INFO)
        bd = hf_energy(fermi_ball(L, nu, "up"), fermi_ball(L, nd, "down"), vhat, threads)
        kin, inter = hf_density(bd)
        free = free_kinetic_density(bd.rho_up, bd.rho_down)
        rows.append(
            dict(
                L=L,
                N_up=nu,
                N_down=nd,
                rho_up=bd.rho_up,
                rho_down=bd.rho_down,
                kinetic=bd.kinetic,
                direct=bd.direct,
                exchange=bd.exchange,
                total=bd.total,
                kinetic_density=kin,
                interaction_density=inter,
                free_kinetic_density=free,
                kinetic_density_error=kin - free,
                taylor_residual=bd.taylor_residual,
            )
        )
    out.csv("hf.csv", list(rows[0]), rows)
    fits = []
    if box["N_up"] is None and len(rows) >= 2:
        for q in ("kinetic_density_error", "taylor_residual"):
            try:
                fit = loglog_fit([r["L"] for r in rows], [abs(r[q]) for r in rows], zero_tol=1e-300)
            except DegenerateFit:
                continue
            fits.append(dict(quantity=q, against="L", slope=fit.slope, prefactor=fit.prefactor, n_points=fit.n_points))
    if fits:
        out.csv("hf_fits.csv", list(fits[0]), fits)
    return EXIT_OK


def cmd_scatter(cfg, out: _Writer, seed: int, threads: int) -> int:
    sc = cfg.values["scattering"]
    pot, _ = _potential(cfg)
    a = scattering_length(pot, sc["tol"])
    rows = []
    for rho in sc["rho"]:
        sol = solve_scattering(pot, rho, sc["gamma"], sc["tol"])
        rows.append(
            dict(
                rho=rho,
                gamma=sc["gamma"],
                radius=sol.radius,
                **{"lambda": sol.lam},
                a_gamma=sol.a_gamma,
                a=a,
                a_gamma_error=abs(sol.a_gamma - a),
                boundary_residual=sol.boundary_residual,
            )
        )
    out.csv("scatter.csv", list(rows[0]), rows)
    fits = []
    for q in ("lambda", "a_gamma_error"):
        try:
            fit = loglog_fit([r["rho"] for r in rows], [abs(r[q]) for r in rows], zero_tol=1e-300)
        except DegenerateFit:
            continue
        fits.append(dict(quantity=q, against="rho", slope=fit.slope, prefactor=fit.prefactor, n_points=fit.n_points))
    if fits:
        out.csv("scatter_fits.csv", list(fits[0]), fits)
    return EXIT_OK


def cmd_asympt(cfg, out: _Writer, seed: int, threads: int) -> int:
    am = cfg.values["asymptotics"]
    a = am["a"]
    if a is None:
        a = scattering_length(_potential(cfg)[0])
    rows = []
    for ru, rd in zip(am["rho_up"], am["rho_down"]):
        inp = AsymptoticInput(ru, rd, a)
        lo, hi = error_envelope(inp.rho, am["C"]) if inp.rho > 0 else (0.0, 0.0)
        lss = lss_density(inp)
        hy = hy_density(inp)
        rows.append(
            dict(
                rho_up=ru,
                rho_down=rd,
                a=a,
                free=free_density(inp),
                interaction=interaction_density(inp),
                hy_term=hy_correction(inp),
                lss=lss,
                hy=hy,
                hy_over_lss=hy / lss if lss else math.nan,
                envelope_lower=lo,
                envelope_upper=hi,
            )
        )
    out.csv("asympt.csv", list(rows[0]), rows)
    return EXIT_OK


def cmd_verify(cfg, out: _Writer, seed: int, threads: int) -> int:
    from .verify import build_instance, run_checks

    inst = build_instance(cfg)
    results = run_checks(inst, seed, threads)
    failed = [r.name for r in results if r.enforced and not r.passed]
    for r in results:
        level = logging.INFO if r.passed or not r.enforced else logging.ERROR
        log.log(level, "%-36s %s residual=%.3e threshold=%.1e", r.name, "pass" if r.passed else "FAIL", r.residual, r.threshold)
    payload = {
        "instance": {"modes": inst.modes.descriptor(), "rho": inst.rho, "gamma": inst.gamma, "alpha": inst.alpha, "beta": inst.beta},
        "checks": [r.as_dict() for r in results],
        "failed": failed,
        "passed": not failed,
    }
    out.json("verify.json", payload)
    return EXIT_VERIFY if failed else EXIT_OK


HANDLERS = {"hf": cmd_hf, "scatter": cmd_scatter, "asympt": cmd_asympt, "verify": cmd_verify}
NUMERICAL = (NoBracketError, IntegratorError, QuadratureError, CutoffTooSmall, FloatingPointError, DegenerateFit)


def _threads(arg: int | None) -> int:
    if arg is not None:
        return arg
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
    return 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dilute-fermi", description="Dilute spin-1/2 Fermi gas numerics.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", required=True, help="INI configuration file")
    ap.add_argument("--out", default=".", help="output directory (default: current)")
    ap.add_argument("--seed", type=int, default=0, help="unsigned 64-bit seed (default 0)")
    ap.add_argument("--threads", type=int, default=None, help=f"worker threads (default ${THREADS_ENV} or 1)")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if not 0 <= args.seed < 2**64:
            raise ConfigError(f"--seed must be an unsigned 64-bit integer, got {args.seed}")
        threads = _threads(args.threads)
        if threads < 1:
            raise ConfigError("--threads must be at least 1")
        cfg = load_config(args.config, args.command)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        cfg_hash = hashlib.sha256(f"{cfg.digest}|seed={args.seed}".encode()).hexdigest()
        writer = _Writer(out, args.command, cfg_hash, args.seed)
        with np.errstate(over="raise", invalid="raise", divide="raise"):
            return HANDLERS[args.command](cfg, writer, args.seed, threads)
    except (ConfigError, IncompleteShell, CapacityError) as exc:
        print(f"dilute-fermi: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NUMERICAL as exc:
        print(f"dilute-fermi: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"dilute-fermi: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
