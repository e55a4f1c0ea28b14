"""Direct ODE against the analytic beta on the 30 x 10 lattice of a pi x pi cavity.

Omega = omega_(1,1) + omega_(2,1) makes (1,1), (2,1) an exact resonant pair.
Reports resonant |beta|, the unitarity defect at eps and eps/10, and how the
defect depends on the drive phase.
"""

import argparse
import math
import time

import numpy as np

from casimir_cavity import (
    CavityGeometry,
    EomParams,
    ModeIndex,
    WallMotion,
    beta_analytic,
    bogoliubov_matrix,
    unitarity_defects,
)

GEOM = CavityGeometry(Lx=math.pi, Ly=math.pi)
OMEGA = math.sqrt(2.0) + math.sqrt(5.0)
PAIR = (ModeIndex(1, 1), ModeIndex(2, 1))


def run(eps, phase, kx_max, ky_max, threads):
    motion = WallMotion(epsilon=eps, Omega=OMEGA, duration_T=200 * math.pi / OMEGA, phase=phase)
    params = EomParams.build(GEOM, motion, kx_max, ky_max)
    start = time.perf_counter()
    bog = bogoliubov_matrix(params, threads=threads)
    return motion, bog, time.perf_counter() - start


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kx-max", type=int, default=30)
    ap.add_argument("--ky-max", type=int, default=10)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--phases", type=float, nargs="*", default=[0.0, math.pi / 2])
    args = ap.parse_args()

    for phase in args.phases:
        defects = {}
        for eps in (1e-3, 1e-4):
            motion, bog, elapsed = run(eps, phase, args.kx_max, args.ky_max, args.threads)
            d = unitarity_defects(bog)
            defects[eps] = np.max(np.abs(d))
            line = f"phase {phase:.4f} eps {eps:.0e}: max|defect| = {defects[eps]:.3e} ({defects[eps] / eps**2:.1f} eps^2)"
            for n, k in (PAIR, PAIR[::-1]):
                ode = abs(bog.entry(n, k)[1])
                ana = abs(beta_analytic(n, k, motion, GEOM))
                line += f"; |beta_{n},{k}| ode {ode:.5e} analytic {ana:.5e} rel {abs(ode - ana) / ana:.1e}"
            print(line + f"; {elapsed:.0f} s")
        print(f"phase {phase:.4f}: defect ratio eps/(eps/10) = {defects[1e-3] / defects[1e-4]:.1f}")


if __name__ == "__main__":
    main()
