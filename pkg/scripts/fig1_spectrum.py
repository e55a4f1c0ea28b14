"""Created-photon spectrum over 0 < kx_bar, ky_bar <= Omega in units of (eps Omega T / 2)^2.

Prints the peak and a coarse text rendering of the surface; ``--csv`` saves the grid.
"""

import argparse

import numpy as np

from casimir_cavity import ScanGrid, WallMotion, peak_location, spectrum_scan

SHADES = " .:-=+*#%@"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--omega", type=float, default=10.0)
    ap.add_argument("--count", type=int, default=200)
    ap.add_argument("--csv", default=None)
    args = ap.parse_args()

    motion = WallMotion(epsilon=1e-3, Omega=args.omega, duration_T=200 * np.pi / args.omega)
    grid = ScanGrid.default(args.omega, count=args.count)
    spec = spectrum_scan(grid, motion)
    kx, ky = peak_location(spec)
    print(f"peak at kx_bar = {kx / args.omega:.4f} Omega, ky_bar = {ky / args.omega:.2e} Omega")
    print(f"peak value = {spec.values.max():.8f} {spec.unit}")

    surface = spec.values.reshape(grid.ky_count, grid.kx_count)
    stride = max(1, args.count // 40)
    coarse = surface[::stride, ::stride] / max(spec.values.max(), 1e-300)
    print("\nky_bar up, kx_bar right")
    for row in coarse[::-1]:
        print("".join(SHADES[min(int(v * len(SHADES)), len(SHADES) - 1)] for v in row))

    if args.csv:
        np.savetxt(args.csv, np.column_stack([spec.kx_bar, spec.ky_bar, spec.values]),
                   delimiter=",", header="kx_bar,ky_bar,N", comments="", fmt="%.12g")


if __name__ == "__main__":
    main()
