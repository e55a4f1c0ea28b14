"""RK4 order under step halving and resonant |beta| under doubling of the kx cutoff."""

import math

import numpy as np

from casimir_cavity import (
    CavityGeometry,
    EomParams,
    ModeIndex,
    WallMotion,
    bogoliubov_matrix,
    initial_condition,
    integrate,
    max_stable_dt,
)

GEOM = CavityGeometry(Lx=math.pi, Ly=math.pi)
OMEGA = math.sqrt(2.0) + math.sqrt(5.0)


def step_halving():
    motion = WallMotion(epsilon=0.0, Omega=OMEGA, duration_T=20.0)
    params = EomParams.build(GEOM, motion, 4, 2)
    init = initial_condition(ModeIndex(4, 2), params.mode_set)
    exact = init.Q * np.exp(-1j * params.omega * motion.duration_T)
    h = max_stable_dt(params)
    prev = None
    for level in range(5):
        dt = h / 2**level
        err = np.max(np.abs(integrate(init, params, motion.duration_T, dt).Q - exact))
        ratio = "" if prev is None else f"  ratio {prev / err:.2f}"
        print(f"dt = {dt:.4e}  error = {err:.3e}{ratio}")
        prev = err


def cutoff_doubling():
    motion = WallMotion(epsilon=1e-3, Omega=OMEGA, duration_T=200 * math.pi / OMEGA)
    for kx_max in (4, 8, 16, 32):
        bog = bogoliubov_matrix(EomParams.build(GEOM, motion, kx_max, 1))
        print(f"kx_max = {kx_max:2d}  |beta_(1,1),(2,1)| = {abs(bog.entry(ModeIndex(1, 1), ModeIndex(2, 1))[1]):.6e}")


if __name__ == "__main__":
    step_halving()
    cutoff_doubling()
