"""Command line drivers: spectrum, validate, evolve, waveguide, interfere.

    casimir-cavity <subcommand> --config run.json [--out DIR] [--dt DT] [--threads N]

Exit codes: 0 success, 1 invalid input, 2 acceptance threshold violated
(``validate``), 3 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
import warnings
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .cavity import ModeIndex, Wall
from .config import ConfigError, RunConfig, load_config
from .dynamics import (
    EomParams,
    IntegrationDiverged,
    bogoliubov_matrix,
    default_dt,
    initial_condition,
    integrate,
    max_stable_dt,
    unitarity_defects,
)
from .perturbation import (
    TwoWallConfig,
    beta_analytic,
    peak_location,
    photon_number_two_walls,
    spectrum_scan,
    w_coefficient,
    WIndices,
)
from .waveguide import WavePacket, generated_wave_spectrum, reconstruct_field

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_THRESHOLD = 2
EXIT_IO = 3

#: |beta| and |alpha - I| ceiling for an undriven (epsilon = 0) validation run.
ZERO_DRIVE_TOL = 1e-8


class ThresholdFailure(Exception):
    pass


def fmt(x) -> str:
    return format(float(x), ".12g")


def _write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([v if isinstance(v, str) else fmt(v) for v in row])


def _write_summary(path: Path, title: str, lines: Sequence[str], cfg: RunConfig):
    body = [title, "=" * len(title), *lines, "", "resolved config:", json.dumps(cfg.to_dict(), indent=2, sort_keys=True)]
    path.write_text("\n".join(body) + "\n")


def _out_dir(cfg: RunConfig, override: Optional[str]) -> Path:
    out = Path(override if override is not None else cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_spectrum(cfg: RunConfig, out: Path, threads: int = 1) -> dict:
    drive = cfg.drive
    grid = cfg.scan_grid()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        spec = spectrum_scan(grid, drive, cfg.geometry, normalized=cfg.normalized, threads=threads)
    _write_csv(out / "spectrum.csv", ["kx_bar", "ky_bar", "N"], zip(spec.kx_bar, spec.ky_bar, spec.values))
    kx, ky = peak_location(spec)
    peak = float(spec.values.max())
    Omega = cfg.right.Omega
    lines = [
        f"drive: {'two walls' if isinstance(drive, TwoWallConfig) else 'right wall'}",
        f"grid: {grid.kx_count} x {grid.ky_count} points",
        f"peak kx_bar = {fmt(kx)} ({fmt(kx / Omega)} Omega)",
        f"peak ky_bar = {fmt(ky)} ({fmt(ky / Omega)} Omega)",
        f"peak N = {fmt(peak)}",
        f"units = {spec.unit}",
    ]
    _write_summary(out / "summary.txt", "photon spectrum", lines, cfg)
    return {"peak": (kx, ky), "value": peak, "unit": spec.unit}


def _resonant_pairs(params: EomParams):
    """(n, k, detuning) for coupled pairs inside the kernel half-width |Delta| T <= pi."""
    ms = params.mode_set
    motion = params.motion
    geom = params.geometry
    T = motion.duration_T
    pairs, near = [], []
    for n in ms:
        for k in ms:
            if n.ky != k.ky:
                continue
            w = w_coefficient(WIndices(k, n, 1, -1, 1), motion.Omega, geom)
            if w == 0.0:
                continue
            detuning = params.omega[ms.index(n)] + params.omega[ms.index(k)] - motion.Omega
            if abs(detuning) * T <= math.pi:
                pairs.append((n, k, detuning))
            near.append((abs(detuning), n, k))
    near.sort(key=lambda item: item[0])
    return pairs, near[:3]


def cmd_validate(cfg: RunConfig, out: Path, dt: Optional[float] = None, threads: int = 1) -> dict:
    motion = cfg.right
    params = EomParams.build(cfg.geometry, motion, cfg.modes.kx_max, cfg.modes.ky_max, cfg.modes.max_modes)
    pairs, nearest = _resonant_pairs(params)
    if not pairs:
        listing = "; ".join(f"n={n} k={k} |detuning|={fmt(d)}" for d, n, k in nearest)
        raise ConfigError(
            f"no resonant pair within the kernel width pi/T={fmt(math.pi / motion.duration_T)}; nearest: {listing}"
        )
    step = dt or cfg.integrator.dt or default_dt(params, motion.duration_T, cfg.integrator.dt_tolerance)
    started = time.perf_counter()
    bog = bogoliubov_matrix(params, dt=step, threads=threads)
    elapsed = time.perf_counter() - started
    defects = unitarity_defects(bog)
    ms = params.mode_set
    eps = motion.epsilon

    rows, rel_errs = [], []
    for n, k, _ in pairs:
        b_ode = abs(bog.beta[ms.index(n), ms.index(k)])
        b_an = abs(beta_analytic(n, k, motion, cfg.geometry))
        rel = abs(b_ode - b_an) / b_an if b_an > 0 else b_ode
        rel_errs.append(rel)
        rows.append((str(n), str(k), b_ode, b_an, rel, defects[ms.index(k)]))
    _write_csv(
        out / "validate.csv",
        ["n", "k", "|beta_ode|", "|beta_analytic|", "rel_err", "unitarity_defect"],
        rows,
    )

    max_defect = float(np.max(np.abs(defects)))
    checks = []
    if eps > 0:
        checks.append(("resonant rel_err", max(rel_errs), cfg.validate.rel_err_max))
        checks.append(("max |unitarity defect|", max_defect, cfg.validate.defect_factor * eps**2))
    else:
        checks.append(("max |beta|", float(np.max(np.abs(bog.beta))), ZERO_DRIVE_TOL))
        checks.append(("max |alpha - I|", float(np.max(np.abs(bog.alpha - np.eye(len(ms))))), ZERO_DRIVE_TOL))
    passed = all(value <= limit for _, value, limit in checks)
    lines = [
        f"modes: {cfg.modes.kx_max} x {cfg.modes.ky_max}; dt = {fmt(step)}; runtime = {elapsed:.1f} s",
        f"resonant pairs: {len(pairs)}",
        *(f"{name} = {fmt(value)} (limit {fmt(limit)}): {'PASS' if value <= limit else 'FAIL'}"
          for name, value, limit in checks),
    ]
    if len(cfg.motions) == 2:
        lines.append("note: the left-wall motion is ignored; only the right wall enters the mode equations")
    _write_summary(out / "summary.txt", "ODE vs analytic validation", lines, cfg)
    result = {"passed": passed, "checks": checks, "max_defect": max_defect, "rel_err": rel_errs, "dt": step}
    if not passed:
        raise ThresholdFailure(result)
    return result


def cmd_evolve(cfg: RunConfig, out: Path, dt: Optional[float] = None) -> dict:
    motion = cfg.right
    params = EomParams.build(cfg.geometry, motion, cfg.modes.kx_max, cfg.modes.ky_max, cfg.modes.max_modes)
    ms = params.mode_set
    n = ModeIndex(*cfg.evolve.n)
    k = ModeIndex(*cfg.evolve.k)
    j = ms.index(k)
    step = dt or cfg.integrator.dt or max_stable_dt(params)
    rows = []
    counter = {"i": 0}

    def observe(t, Q, V):
        if counter["i"] % cfg.evolve.every == 0 or t == motion.duration_T:
            rows.append((t, Q[j].real, Q[j].imag))
        counter["i"] += 1

    integrate(initial_condition(n, ms), params, motion.duration_T, step, observer=observe)
    _write_csv(out / "trajectory.csv", ["t", "re_Q", "im_Q"], rows)
    lines = [f"initial mode n = {n}, recorded mode k = {k}", f"dt = {fmt(step)}, samples = {len(rows)}"]
    _write_summary(out / "summary.txt", "trajectory", lines, cfg)
    return {"samples": len(rows), "dt": step}


def cmd_waveguide(cfg: RunConfig, out: Path) -> dict:
    if cfg.packet is None:
        raise ConfigError("packet is required for the waveguide command")
    packet = WavePacket.from_csv(cfg.packet, kx=cfg.packet_kx)
    drive = cfg.drive
    motion = cfg.right
    _, ky_axis = cfg.scan_grid().axes()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        waves = generated_wave_spectrum(packet, drive, cfg.geometry, ky_axis)
    left = waves.left_intensity
    if cfg.normalized:
        scale = (motion.epsilon * motion.Omega * motion.duration_T / 2.0) ** 2
        left = left / scale if scale > 0 else np.zeros_like(left)
    _write_csv(
        out / "waveguide.csv",
        ["kx_bar", "ky_bar", "left_intensity", "right_intensity", "amplification"],
        zip(waves.kx_bar, waves.ky_bar, left, waves.right_intensity, waves.amplification),
    )
    lines = [
        f"packet: {cfg.packet} ({packet.ky_samples.size} samples, kx={packet.kx})",
        f"output rows: {waves.kx.size}",
        f"left_intensity units: {'(eps*Omega*T/2)^2' if cfg.normalized else 'absolute'}",
        f"max amplification estimate: {fmt(waves.amplification.max())}",
    ]
    if cfg.snapshot is not None:
        s = cfg.snapshot
        xs = np.linspace(0.0, cfg.geometry.Lx, s.x_count)
        ys = np.linspace(s.y_min, s.y_max, s.y_count)
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        A = reconstruct_field(waves, X, Y, s.t, cfg.geometry)
        _write_csv(out / "field.csv", ["x", "y", "A"], zip(X.ravel(), Y.ravel(), np.ravel(A)))
        lines.append(f"field snapshot at t = {fmt(s.t)}: {X.size} points")
    _write_summary(out / "summary.txt", "waveguide scattering", lines, cfg)
    return {"rows": int(waves.kx.size)}


def cmd_interfere(cfg: RunConfig, out: Path) -> dict:
    drive = cfg.drive
    if not isinstance(drive, TwoWallConfig):
        raise ConfigError("interfere needs two motions (left and right)")
    right = drive.right
    if cfg.interfere.k is not None:
        kx_bar, ky_bar = cfg.interfere.k
    else:
        kx_bar, ky_bar = right.Omega / 2.0, cfg.scan_grid().ky_min
    phis = np.linspace(0.0, 2.0 * math.pi, cfg.interfere.phi_count)
    rows = []
    result = None
    for phi in phis:
        left = type(drive.left)(
            epsilon=drive.left.epsilon, Omega=drive.left.Omega, duration_T=drive.left.duration_T,
            phase=right.phase + phi, wall=Wall.LEFT,
        )
        result = photon_number_two_walls(
            kx_bar, ky_bar, TwoWallConfig(left, right), cfg.geometry, normalized=cfg.normalized
        )
        rows.append((phi, result.N, result.N_left, result.N_right))
    _write_csv(out / "interfere.csv", ["phi", "N", "N_left", "N_right"], rows)
    lines = [
        f"mode k = ({fmt(kx_bar)}, {fmt(ky_bar)})",
        f"coherent (Omega_L = Omega_R within 2 pi / T): {result.coherent}",
        f"kx = {result.kx}, nx = {result.nx}, parity (-1)^(kx+nx) = {result.parity}",
        f"gamma = Omega / omega_11 = {fmt(result.gamma)}",
    ]
    _write_summary(out / "summary.txt", "two-wall interference", lines, cfg)
    return {"rows": np.array(rows), "parity": result.parity, "coherent": result.coherent}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="casimir-cavity", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("spectrum", "tabulate the created-photon spectrum"),
        ("validate", "compare direct ODE Bogoliubov coefficients with the analytic ones"),
        ("evolve", "dump one mode amplitude over the drive"),
        ("waveguide", "scatter a wave packet off the oscillating wall"),
        ("interfere", "sweep the phase difference of two oscillating walls"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--out", default=None, help="output directory (overrides output_dir)")
        p.add_argument("--dt", type=float, default=None, help="integrator step override")
        p.add_argument("--threads", type=int, default=1, help="worker threads")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: cannot read config {args.config}: {exc}", file=sys.stderr)
        return EXIT_IO
    if args.dt is not None and args.dt <= 0:
        print("error: --dt must be positive", file=sys.stderr)
        return EXIT_INVALID
    threads = max(1, args.threads)
    try:
        out = _out_dir(cfg, args.out)
        if args.command == "spectrum":
            cmd_spectrum(cfg, out, threads)
        elif args.command == "validate":
            cmd_validate(cfg, out, args.dt, threads)
        elif args.command == "evolve":
            cmd_evolve(cfg, out, args.dt)
        elif args.command == "waveguide":
            cmd_waveguide(cfg, out)
        elif args.command == "interfere":
            cmd_interfere(cfg, out)
    except ThresholdFailure as exc:
        for name, value, limit in exc.args[0]["checks"]:
            if value > limit:
                print(f"threshold violated: {name} = {fmt(value)} > {fmt(limit)}", file=sys.stderr)
        return EXIT_THRESHOLD
    except (ConfigError, ValueError, IntegrationDiverged) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        path = getattr(exc, "filename", None) or ""
        print(f"error: I/O failure {path}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
