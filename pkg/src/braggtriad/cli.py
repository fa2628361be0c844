"""Command-line entry point: ``braggtriad <command> [options]``."""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import logging
import math
import sys
from dataclasses import replace

import numpy as np

from . import config as cfgmod
from .condensate import detuning_ratio, effective_coupling, mode_coefficients, rabi_for_eta
from .config import ConfigError, RunConfig
from .observables import ProbeState, evolve_dimensionless, evolve_series
from .oracle import RECORD_FIELDS, TruncationError, TruncationSpec, discrepancy, oracle_series
from .triad import build_model, spectrum, threshold, threshold_curve

log = logging.getLogger("braggtriad")

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_ORACLE = 0, 2, 3, 4
ORACLE_TOL = 1e-6

EVOLVE_HEADER = ["t_us", "n_q", "n_mq", "n_k2", "xi_q_mq", "xi_q_k2", "xi_mq_k2", "Q_p"]
SWEEP_HEADER = ["omega_hz", "xi_q_mq", "xi_q_k2", "xi_mq_k2"]

PLOT_TEMPLATE = """\
import csv
import matplotlib.pyplot as plt

with open({csv_path!r}, newline="") as fh:
    rows = list(csv.DictReader(fh))
x = [float(r[{x!r}]) for r in rows]
for col in {cols!r}:
    y = [float(r[col]) if r[col] else float("nan") for r in rows]
    plt.plot(x, y, label=col)
plt.axhline(1.0, color="grey", lw=0.5)
plt.xlabel({x!r})
plt.legend()
plt.show()
"""


def fmt(value) -> str:
    """9 significant digits; undefined values become an empty field."""
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ""
    return format(float(value), ".9g")


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--preset", choices=sorted(cfgmod.PRESETS))
    common.add_argument("--config", metavar="PATH")
    common.add_argument("--out", metavar="PATH")
    common.add_argument("--probe", metavar="STATE", help="vacuum | coherent:<re>,<im> | fock:<n>")
    common.add_argument("--atoms", type=float)
    common.add_argument("--mu-hz", type=float, help="chemical potential mu/(2 pi hbar) in Hz")
    common.add_argument("--x", type=float, dest="momentum_x", help="xi*q")
    common.add_argument("--rabi", type=float, help="two-photon Rabi frequency, s^-1")
    common.add_argument("--eta", type=float, help="dimensionless coupling; sets --rabi to match")
    common.add_argument("--t-start", type=float)
    common.add_argument("--t-stop", type=float)
    common.add_argument("--t-step", type=float)
    common.add_argument("--dump-config", action="store_true", help="print the resolved config and exit")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="braggtriad", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("spectrum", parents=[common], help="eigenvalues and regime of the triad")

    p = sub.add_parser("threshold-curve", parents=[common], help="eta_th versus xi*q as CSV")
    p.add_argument("--x-min", type=float)
    p.add_argument("--x-max", type=float)
    p.add_argument("--points", type=int)

    p = sub.add_parser("evolve", parents=[common], help="time series of occupations and witnesses")
    p.add_argument("--plot-script", metavar="PATH")

    p = sub.add_parser("sweep-omega", parents=[common], help="witnesses versus Rabi frequency")
    p.add_argument("--omega-min", type=float)
    p.add_argument("--omega-max", type=float)
    p.add_argument("--points", type=int)
    p.add_argument("--t-fixed", type=float, help="time in microseconds")
    p.add_argument("--plot-script", metavar="PATH")

    p = sub.add_parser("oracle-check", parents=[common], help="compare with the Fock-space integrator")
    p.add_argument("--cutoff", type=int)
    p.add_argument("--tau-max", type=float)
    p.add_argument("--points", type=int)
    return parser


def resolve_config(args) -> RunConfig:
    if args.config:
        try:
            cfg = cfgmod.load(args.config)
        except OSError as exc:
            raise CliError(f"cannot read config: {exc}", EXIT_CONFIG) from None
        if args.preset:
            cfg = replace(cfgmod.preset(args.preset), output=cfg.output)
    else:
        cfg = cfgmod.preset(args.preset) if args.preset else cfgmod.default_config()

    updates = {}
    phys = {}
    if args.atoms is not None:
        phys["atom_count"] = args.atoms
    if args.mu_hz is not None:
        phys["chem_potential"] = cfgmod.TWO_PI * args.mu_hz
    if args.momentum_x is not None:
        phys["momentum_x"] = args.momentum_x
    if args.rabi is not None:
        phys["rabi"] = args.rabi
    params = replace(cfg.params, **phys) if phys else cfg.params
    if args.eta is not None:
        if args.eta < 0:
            raise ConfigError("--eta must be >= 0")
        params = replace(params, rabi=rabi_for_eta(params, args.eta))
    updates["params"] = params
    if args.probe:
        updates["probe"] = ProbeState.parse(args.probe)
    for flag, attr in (("t_start", "t_start_us"), ("t_stop", "t_stop_us"), ("t_step", "t_step_us")):
        if getattr(args, flag) is not None:
            updates[attr] = getattr(args, flag)
    if args.out:
        updates["output"] = args.out
    cmd = args.command
    if cmd == "threshold-curve":
        for flag, attr in (("x_min", "x_min"), ("x_max", "x_max"), ("points", "x_points")):
            if getattr(args, flag) is not None:
                updates[attr] = getattr(args, flag)
    elif cmd == "sweep-omega":
        for flag, attr in (
            ("omega_min", "omega_min"), ("omega_max", "omega_max"),
            ("points", "omega_points"), ("t_fixed", "t_fixed_us"),
        ):
            if getattr(args, flag) is not None:
                updates[attr] = getattr(args, flag)
    elif cmd == "oracle-check":
        for flag, attr in (("cutoff", "cutoff"), ("tau_max", "tau_max"), ("points", "tau_points")):
            if getattr(args, flag) is not None:
                updates[attr] = getattr(args, flag)
    if phys or args.eta is not None or args.probe:
        updates["preset"] = None
    return replace(cfg, **updates)


@contextlib.contextmanager
def _sink(path):
    if path is None or path == "-":
        yield sys.stdout
        return
    try:
        fh = open(path, "w", newline="", encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}", EXIT_IO) from None
    with fh:
        yield fh


def write_csv(path, header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    with _sink(path) as fh:
        try:
            fh.write(buf.getvalue())
        except OSError as exc:
            raise CliError(f"cannot write {path}: {exc}", EXIT_IO) from None


def write_plot_script(path, csv_path, x, cols):
    if csv_path is None:
        raise ConfigError("--plot-script needs --out")
    with _sink(path) as fh:
        fh.write(PLOT_TEMPLATE.format(csv_path=csv_path, x=x, cols=list(cols)))


# --- commands -----------------------------------------------------------------


def cmd_spectrum(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    scales = effective_coupling(cfg.params)
    spec = spectrum(build_model(scales.eta_tilde, scales.delta_tilde))
    print(f"preset      {cfg.preset or '-'}", file=out)
    print(f"omega_b     {fmt(scales.omega_b)} rad/s (2pi x {fmt(scales.omega_b / cfgmod.TWO_PI)} Hz)", file=out)
    print(f"delta       {fmt(scales.delta_tilde)}", file=out)
    print(f"eta         {fmt(scales.eta_tilde)}", file=out)
    print(f"eta_th      {fmt(threshold(scales.delta_tilde))}", file=out)
    print(f"regime      {spec.regime.value}", file=out)
    for k, z in enumerate(spec.eigenvalues, 1):
        print(f"lambda{k}     {fmt(z.real)} {'+' if z.imag >= 0 else '-'} {fmt(abs(z.imag))}i", file=out)
    return EXIT_OK


def cmd_threshold_curve(cfg: RunConfig) -> int:
    xs = np.linspace(cfg.x_min, cfg.x_max, cfg.x_points)
    rows = [(fmt(x), fmt(eta)) for x, eta in threshold_curve(xs)]
    write_csv(cfg.output, ["x", "eta_th"], rows)
    return EXIT_OK


def evolve_rows(cfg: RunConfig):
    t_us = cfg.time_grid_us()
    records = evolve_series(cfg.params, cfg.probe, np.asarray(t_us) * 1e-6)
    rows = [
        (fmt(t), fmt(r.n_q), fmt(r.n_mq), fmt(r.n_k2), fmt(r.xi_q_mq), fmt(r.xi_q_k2),
         fmt(r.xi_mq_k2), fmt(r.q_mandel))
        for t, r in zip(t_us, records)
    ]
    return records, rows


def summarize(records, stream):
    def below(attr):
        return np.array([(getattr(r, attr) is not None and getattr(r, attr) < 1) for r in records])

    masks = {name: below(name) for name in ("xi_q_mq", "xi_q_k2", "xi_mq_k2", "q_mandel")}
    for name, mask in masks.items():
        print(f"# {name} < 1 at {int(mask.sum())}/{len(records)} samples", file=stream)
    all_three = masks["xi_q_mq"] & masks["xi_q_k2"] & masks["xi_mq_k2"]
    print(f"# all three xi < 1 simultaneously at {int(all_three.sum())} samples", file=stream)


def cmd_evolve(cfg: RunConfig, plot_script=None) -> int:
    records, rows = evolve_rows(cfg)
    write_csv(cfg.output, EVOLVE_HEADER, rows)
    summarize(records, sys.stderr)
    if plot_script:
        write_plot_script(plot_script, cfg.output, "t_us", EVOLVE_HEADER[4:])
    return EXIT_OK


def sweep_rows(cfg: RunConfig):
    rows = []
    for omega in np.linspace(cfg.omega_min, cfg.omega_max, cfg.omega_points):
        params = replace(cfg.params, rabi=float(omega))
        (r,) = evolve_series(params, cfg.probe, [cfg.t_fixed_us * 1e-6])
        rows.append((fmt(omega), fmt(r.xi_q_mq), fmt(r.xi_q_k2), fmt(r.xi_mq_k2)))
    return rows


def cmd_sweep_omega(cfg: RunConfig, plot_script=None) -> int:
    write_csv(cfg.output, SWEEP_HEADER, sweep_rows(cfg))
    if plot_script:
        write_plot_script(plot_script, cfg.output, "omega_hz", SWEEP_HEADER[1:])
    return EXIT_OK


def oracle_discrepancies(cfg: RunConfig) -> dict:
    """Max discrepancy per record field between moment engine and oracle."""
    scales = effective_coupling(cfg.params)
    coeffs = mode_coefficients(cfg.params.momentum_x)
    taus = np.linspace(0.0, cfg.tau_max, cfg.tau_points)
    spec = TruncationSpec((cfg.cutoff,) * 3)
    fast = evolve_dimensionless(scales.eta_tilde, scales.delta_tilde, coeffs, cfg.probe, taus)
    slow = oracle_series(scales.eta_tilde, scales.delta_tilde, coeffs, cfg.probe, taus, spec)
    return {f: max(discrepancy(a, b, f) for a, b in zip(fast, slow)) for f in RECORD_FIELDS}


def cmd_oracle_check(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    try:
        worst = oracle_discrepancies(cfg)
    except TruncationError as exc:
        print(f"truncation failure: {exc}", file=sys.stderr)
        return EXIT_ORACLE
    ok = True
    for name, err in worst.items():
        passed = err < ORACLE_TOL
        ok &= passed
        print(f"{name:10s} {err:.3e} {'ok' if passed else 'FAIL'}", file=out)
    print("PASS" if ok else "FAIL", file=out)
    return EXIT_OK if ok else EXIT_ORACLE


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        cfg = resolve_config(args)
        if args.dump_config:
            sys.stdout.write(cfgmod.to_ini(cfg))
            return EXIT_OK
        log.debug("resolved config: %s", cfg)
        if args.command == "spectrum":
            return cmd_spectrum(cfg)
        if args.command == "threshold-curve":
            return cmd_threshold_curve(cfg)
        if args.command == "evolve":
            return cmd_evolve(cfg, args.plot_script)
        if args.command == "sweep-omega":
            return cmd_sweep_omega(cfg, args.plot_script)
        return cmd_oracle_check(cfg)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
