"""Two oscillating walls: photon number at the spectral peak against the phase difference."""

import argparse
import math

import numpy as np

from casimir_cavity import CavityGeometry, TwoWallConfig, WallMotion, photon_number_two_walls


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--omega", type=float, default=10.0)
    ap.add_argument("--detune", type=float, default=0.0, help="Omega_L - Omega_R in units of 2 pi / T")
    ap.add_argument("--steps", type=int, default=13)
    args = ap.parse_args()

    geom = CavityGeometry(Lx=math.pi, Ly=math.pi)
    T = 200 * math.pi / args.omega
    right = WallMotion(epsilon=1e-3, Omega=args.omega, duration_T=T)
    k = (args.omega / 2, 1e-3)
    print(f"k = {k}, detuning = {args.detune} x 2pi/T")
    print(f"{'phi/pi':>8} {'N':>10}")
    for phi in np.linspace(0.0, 2 * math.pi, args.steps):
        left = WallMotion(epsilon=1e-3, Omega=args.omega + args.detune * 2 * math.pi / T,
                          duration_T=T, phase=phi, wall="left")
        r = photon_number_two_walls(*k, TwoWallConfig(left, right), geom, normalized=True)
        print(f"{phi / math.pi:8.3f} {r.N:10.6f}")
    print(f"parity (-1)^(kx+nx) = {r.parity}, coherent = {r.coherent}, gamma = {r.gamma:.4f}")


if __name__ == "__main__":
    main()
